use serde::Deserialize;

use crate::error::{Error, Result};
use crate::expr::ScalarFunction;
use crate::metric::{ChartPoint, MetricSpec, NonsmoothSet};
use crate::verify::{DEFAULT_CLASSIFY_RADIUS, DEFAULT_GRID_STEP};

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub metric: MetricSection,
    #[serde(default)]
    pub check: CheckSection,
    #[serde(default)]
    pub curve: CurveSection,
    #[serde(default)]
    pub render: RenderSection,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum NonsmoothConfig {
    Points(Vec<f64>),
    /// Only `"cantor"` is recognized.
    Named(String),
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricSection {
    pub f: String,
    pub h: String,
    pub domain: Option<[f64; 2]>,
    pub nonsmooth: Option<NonsmoothConfig>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CheckSection {
    /// `None` selects [`default_points`].
    pub points: Option<Vec<[f64; 3]>>,
    pub fd_step: f64,
    pub tol: f64,
    pub decay_orders: [usize; 3],
    pub decay_tol: f64,
    pub grid_step: f64,
    pub classify_radius: f64,
}

impl Default for CheckSection {
    fn default() -> Self {
        CheckSection {
            points: None,
            fd_step: 1e-3,
            tol: 1e-4,
            decay_orders: [3, 2, 2],
            decay_tol: 1e-8,
            grid_step: DEFAULT_GRID_STEP,
            classify_radius: DEFAULT_CLASSIFY_RADIUS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CurveSection {
    pub t_range: [f64; 2],
    pub step: f64,
    /// Half-plane point at the anchor parameter.
    pub start: [f64; 2],
    /// Angle of the initial tangent from `∂x`.
    pub angle: f64,
}

impl Default for CurveSection {
    fn default() -> Self {
        CurveSection {
            t_range: [-3.0, 3.0],
            step: 1e-4,
            start: [0.0, 1.0],
            angle: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RenderSection {
    pub leaf_count: usize,
    pub leaf_span: f64,
    pub size_px: u32,
}

impl Default for RenderSection {
    fn default() -> Self {
        RenderSection {
            leaf_count: 41,
            leaf_span: 5.0,
            size_px: 800,
        }
    }
}

/// Twenty scattered chart points with `|x| ≤ 2.5`, `|u| ≤ 1.9`, `|v| ≤ 2`.
pub fn default_points() -> Vec<[f64; 3]> {
    let golden = 0.5 * (5f64.sqrt() - 1.0);
    (0..20)
        .map(|i| {
            let t = i as f64;
            [
                -2.5 + 5.0 * (t * golden).fract(),
                1.9 * (1.3 * t + 0.1).sin(),
                2.0 * (2.9 * t + 0.5).sin(),
            ]
        })
        .collect()
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Config> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn spec(&self) -> Result<MetricSpec> {
        let m = &self.metric;
        let mut spec = MetricSpec::new(ScalarFunction::parse(&m.f)?, ScalarFunction::parse(&m.h)?);
        if let Some([lo, hi]) = m.domain {
            if !(lo < hi) {
                return Err(Error::Config(format!("empty domain [{lo}, {hi}]")));
            }
            spec = spec.with_domain(lo, hi);
        }
        let set = match &m.nonsmooth {
            None => NonsmoothSet::Empty,
            Some(NonsmoothConfig::Points(p)) => NonsmoothSet::Points(p.clone()),
            Some(NonsmoothConfig::Named(n)) if n == "cantor" => NonsmoothSet::Cantor,
            Some(NonsmoothConfig::Named(n)) => {
                return Err(Error::Config(format!("unknown nonsmooth set `{n}`")));
            }
        };
        Ok(spec.with_nonsmooth(set))
    }

    pub fn points(&self) -> Vec<ChartPoint> {
        self.check
            .points
            .clone()
            .unwrap_or_else(default_points)
            .into_iter()
            .map(ChartPoint::from_array)
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        let c = &self.check;
        for (name, v) in [
            ("check.fd_step", c.fd_step),
            ("check.tol", c.tol),
            ("check.decay_tol", c.decay_tol),
            ("check.grid_step", c.grid_step),
            ("check.classify_radius", c.classify_radius),
            ("curve.step", self.curve.step),
            ("render.leaf_span", self.render.leaf_span),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        let [lo, hi] = self.curve.t_range;
        if !(lo <= hi) {
            return Err(Error::Config(format!("curve.t_range [{lo}, {hi}] is empty")));
        }
        if self.curve.start[1] <= 0.0 {
            return Err(Error::Config("curve.start must lie in the upper half-plane".into()));
        }
        if self.render.leaf_count == 0 || self.render.size_px == 0 {
            return Err(Error::Config("render.leaf_count and render.size_px must be positive".into()));
        }
        Ok(())
    }
}
