use super::config::{Config, CurveSection, MetricSection, NonsmoothConfig};
use crate::error::{Error, Result};
use crate::metric::MetricSpec;

#[derive(Debug, Clone, PartialEq)]
pub struct GalleryEntry {
    pub name: &'static str,
    pub spec: MetricSpec,
    pub description: &'static str,
    pub config: Config,
}

struct Raw {
    name: &'static str,
    f: &'static str,
    h: &'static str,
    nonsmooth: Option<NonsmoothConfig>,
    t_range: [f64; 2],
    description: &'static str,
}

fn raw_entries() -> Vec<Raw> {
    vec![
        Raw {
            name: "product",
            f: "0",
            h: "0",
            nonsmooth: None,
            t_range: [-3.0, 3.0],
            description: "H² × ℝ: the curve is a geodesic and the leaves are its orthogonal geodesics",
        },
        Raw {
            name: "horocycle",
            f: "1",
            h: "1",
            nonsmooth: None,
            t_range: [-3.0, 3.0],
            description: "constant geodesic curvature 1: a horocycle with asymptotic leaves",
        },
        Raw {
            name: "piecewise_pm1",
            f: "builtin:flat_exp()",
            h: "builtin:step_pm1()",
            nonsmooth: Some(NonsmoothConfig::Points(vec![0.0])),
            t_range: [-3.0, 3.0],
            description: "two horocycle arcs of opposite curvature joined at t = 0, f flat there",
        },
        Raw {
            name: "cantor",
            f: "builtin:cantor_bump()",
            h: "builtin:cantor_h()",
            nonsmooth: Some(NonsmoothConfig::Named("cantor".into())),
            t_range: [-1.0, 2.0],
            description: "h = ±1 on the gaps of the middle-thirds Cantor set, f flat on the set",
        },
        Raw {
            name: "sine",
            f: "sin(x)",
            h: "0.5*tanh(x)",
            nonsmooth: None,
            t_range: [-3.0, 3.0],
            description: "smooth f with isolated zeros and |h| < 1/2",
        },
    ]
}

pub fn names() -> Vec<&'static str> {
    raw_entries().iter().map(|r| r.name).collect()
}

pub fn entries() -> Result<Vec<GalleryEntry>> {
    raw_entries().into_iter().map(build).collect()
}

pub fn entry(name: &str) -> Result<GalleryEntry> {
    let raw = raw_entries()
        .into_iter()
        .find(|r| r.name == name)
        .ok_or_else(|| Error::Config(format!("unknown gallery entry `{name}`; known: {}", names().join(", "))))?;
    build(raw)
}

fn build(raw: Raw) -> Result<GalleryEntry> {
    let config = Config {
        metric: MetricSection {
            f: raw.f.into(),
            h: raw.h.into(),
            domain: None,
            nonsmooth: raw.nonsmooth,
        },
        check: Default::default(),
        curve: CurveSection {
            t_range: raw.t_range,
            ..Default::default()
        },
        render: Default::default(),
    };
    Ok(GalleryEntry {
        name: raw.name,
        spec: config.spec()?,
        description: raw.description,
        config,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_are_unique_and_build() {
        let mut n = names();
        assert_eq!(n, ["product", "horocycle", "piecewise_pm1", "cantor", "sine"]);
        n.sort();
        n.dedup();
        assert_eq!(n.len(), 5);
        assert_eq!(entries().unwrap().len(), 5);
        assert!(entry("nope").is_err());
    }
}
