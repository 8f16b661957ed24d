//! Command-line front end: `check`, `curve`, `foliate`, `ainv`, `lyndon` and
//! `gallery`.

pub mod config;
pub mod gallery;
pub mod json;
pub mod render;

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use crate::curvature::{angle_to_dv, curvature_report_checked, MetricField};
use crate::error::{Error, Result};
use crate::foliation::{integrate_turning_curve, leaf_family, TurningCurve};
use crate::hyperbolic::{HPoint, HTangent};
use crate::lyndon::{check_axioms_capped, non_archimedean_capped, OverlapConvention, DEFAULT_WORD_CAP};
use crate::metric::{MetricSpec, NonsmoothSet};
use crate::verify::{self, CheckEntry, CheckReport, COMPLETE_SLACK};

pub use config::{Config, CurveSection, RenderSection};
pub use gallery::GalleryEntry;
pub use render::render_svg;

/// Tolerance on `Scal = -2` in the `check` report.
pub const SCALAR_TOL: f64 = 1e-3;

#[derive(Debug, Parser)]
#[command(name = "curvhom", version, about = "Curvature-homogeneous metrics with Ricci eigenvalues (-1,-1,0)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the curvature, frame, decay and classification checks.
    Check { config: PathBuf },
    /// Integrate the turning curve for H = ∫h and write CSV.
    Curve {
        config: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Render the curve and its orthogonal leaves in the disk model as SVG.
    Foliate {
        config: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Print the invariant A between x = FROM and x = TO.
    Ainv {
        config: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        from: f64,
        #[arg(long, allow_hyphen_values = true)]
        to: f64,
    },
    /// Check the Lyndon length-function axioms on reduced words.
    Lyndon {
        #[arg(long)]
        max_len: usize,
        #[arg(long, default_value = "right")]
        convention: String,
        #[arg(long, default_value_t = DEFAULT_WORD_CAP)]
        cap: usize,
    },
    /// Run a built-in example.
    Gallery {
        name: Option<String>,
        /// List the entries.
        #[arg(long)]
        list: bool,
        /// Render the foliation instead of running the checks.
        #[arg(long)]
        foliate: bool,
        /// Write the curve CSV instead of running the checks.
        #[arg(long, conflicts_with = "foliate")]
        curve: bool,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

fn is_config_error(e: &Error) -> bool {
    matches!(
        e,
        Error::Config(_)
            | Error::Syntax { .. }
            | Error::UnknownIdentifier { .. }
            | Error::UnknownBuiltin(_)
            | Error::Arity { .. }
            | Error::BadLetter(_)
    )
}

/// Exit code for an error: 2 for configuration and parse errors, 1 otherwise.
pub fn exit_code(e: &Error) -> i32 {
    if is_config_error(e) {
        2
    } else {
        1
    }
}

pub fn load_config(path: &std::path::Path) -> Result<Config> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let c = Config::from_toml(&text)?;
    c.validate()?;
    c.spec()?;
    Ok(c)
}

fn nonsmooth_value(set: &NonsmoothSet) -> Value {
    match set {
        NonsmoothSet::Empty => Value::Null,
        NonsmoothSet::Points(p) => json!(p),
        NonsmoothSet::Cantor => json!("cantor"),
    }
}

fn ricci_deviation(eig: &[f64; 3]) -> f64 {
    (eig[0] + 1.0).abs().max((eig[1] + 1.0).abs()).max(eig[2].abs())
}

/// The `check` report and whether every non-skipped check passed.
pub fn check_report(config: &Config) -> Result<(Value, bool)> {
    let spec = config.spec()?;
    let c = &config.check;
    let points = config.points();

    let mut ricci_res = Vec::new();
    let mut scalar_res = Vec::new();
    let mut skipped = 0usize;
    let mut per_point = Vec::new();
    for p in &points {
        match curvature_report_checked(&spec, p, c.fd_step) {
            Ok(Some(rep)) => {
                let g = spec.metric(p)?;
                let angle = angle_to_dv(&g, &nalgebra::Vector3::from(rep.kernel));
                ricci_res.push(ricci_deviation(&rep.eigenvalues).max(angle));
                scalar_res.push((rep.scalar + 2.0).abs());
                let mut v = serde_json::to_value(&rep).map_err(|e| Error::Config(e.to_string()))?;
                v["kernel_angle"] = json!(angle);
                per_point.push(v);
            }
            Ok(None) => {
                skipped += 1;
                per_point.push(json!({"point": p.as_array(), "skipped": "near-nonsmooth"}));
            }
            Err(e) if is_config_error(&e) => return Err(e),
            Err(e) => {
                ricci_res.push(f64::MAX);
                scalar_res.push(f64::MAX);
                per_point.push(json!({"point": p.as_array(), "error": e.to_string()}));
            }
        }
    }

    let mut report = CheckReport::default();
    report
        .checks
        .insert("ricci_signature".into(), CheckEntry::from_residuals(&ricci_res, skipped, c.tol));
    report
        .checks
        .insert("scalar_curvature".into(), CheckEntry::from_residuals(&scalar_res, skipped, SCALAR_TOL));

    // frame checks point by point so that one degenerate point fails only itself
    let mut frame: std::collections::BTreeMap<String, (Vec<f64>, usize)> = Default::default();
    let mut frame_errors = Vec::new();
    for p in &points {
        match verify::check_frame_odes_with_step(&spec, std::slice::from_ref(p), c.tol, c.fd_step) {
            Ok(r) => {
                for (name, e) in r.checks {
                    let slot = frame.entry(name).or_default();
                    if e.points > 0 {
                        slot.0.push(e.residual);
                    }
                    slot.1 += e.skipped;
                }
            }
            Err(e) if is_config_error(&e) => return Err(e),
            Err(e) => frame_errors.push(json!({"point": p.as_array(), "error": e.to_string()})),
        }
    }
    for (name, (res, skip)) in frame {
        report.checks.insert(name, CheckEntry::from_residuals(&res, skip, c.tol));
    }
    if !frame_errors.is_empty() {
        report.checks.insert(
            "frame_evaluation".into(),
            CheckEntry::from_residuals(&vec![f64::MAX; frame_errors.len()], 0, c.tol),
        );
    }

    let [k, m, l] = c.decay_orders;
    report.merge(verify::check_fh_decay(&spec, (k, m, l), c.decay_tol)?);

    let cls = verify::classify(&spec, c.grid_step, c.classify_radius)?;
    let completeness = if spec.domain.is_some() { f64::MAX } else { (cls.sup_abs_h - 1.0).max(0.0) };
    report
        .checks
        .insert("completeness".into(), CheckEntry::from_residuals(&[completeness], 0, COMPLETE_SLACK));

    let passed = report.passed();
    let value = json!({
        "metric": {
            "f": spec.f.to_string(),
            "h": spec.h.to_string(),
            "domain": spec.domain.map(|(a, b)| [a, b]),
            "nonsmooth": nonsmooth_value(&spec.nonsmooth),
        },
        "checks": report,
        "classify": cls,
        "curvature": per_point,
        "frame_errors": frame_errors,
        "skipped_points": skipped,
        "passed": passed,
    });
    Ok((value, passed))
}

/// Turning curve for `H = ∫h` with the configured start.
pub fn build_curve(spec: &MetricSpec, curve: &CurveSection) -> Result<TurningCurve> {
    let p0 = HPoint::new(curve.start[0], curve.start[1])?;
    let v0 = HTangent::from_angle(p0, curve.angle);
    let big_h = spec.h.antiderivative();
    integrate_turning_curve(&big_h, p0, v0, (curve.t_range[0], curve.t_range[1]), curve.step)
}

pub fn foliation_svg(config: &Config) -> Result<String> {
    let spec = config.spec()?;
    let curve = build_curve(&spec, &config.curve)?;
    let leaves = leaf_family(&curve, config.render.leaf_count)?;
    render_svg(&curve, &leaves, &config.render)
}

pub fn curve_csv(config: &Config) -> Result<String> {
    Ok(build_curve(&config.spec()?, &config.curve)?.to_csv())
}

fn emit(out: &Option<PathBuf>, text: &str, stdout: &mut dyn Write) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::Config(format!("{}: {e}", path.display()))),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| Error::Config(format!("stdout: {e}"))),
    }
}

fn run_check(config: &Config, stdout: &mut dyn Write) -> Result<i32> {
    let (value, passed) = check_report(config)?;
    emit(&None, &json::to_string(&value), stdout)?;
    Ok(if passed { 0 } else { 1 })
}

fn run_lyndon(max_len: usize, convention: &str, cap: usize, stdout: &mut dyn Write) -> Result<i32> {
    let conv: OverlapConvention = convention.parse()?;
    let violations = check_axioms_capped(max_len, conv, cap)?;
    let non_arch = non_archimedean_capped(max_len, cap)?;
    let mut text = String::new();
    for v in &violations {
        text.push_str(&v.to_json_line());
        text.push('\n');
    }
    text.push_str(&format!("{} violations\n", violations.len()));
    text.push_str(&format!("{} non-archimedean words\n", non_arch.len()));
    for w in &non_arch {
        text.push_str(&format!("non-archimedean: {w}\n"));
    }
    emit(&None, &text, stdout)?;
    Ok(if violations.is_empty() && non_arch.is_empty() { 0 } else { 1 })
}

fn dispatch(cli: Cli, stdout: &mut dyn Write) -> Result<i32> {
    match cli.command {
        Command::Check { config } => run_check(&load_config(&config)?, stdout),
        Command::Curve { config, out } => {
            emit(&out, &curve_csv(&load_config(&config)?)?, stdout)?;
            Ok(0)
        }
        Command::Foliate { config, out } => {
            emit(&out, &foliation_svg(&load_config(&config)?)?, stdout)?;
            Ok(0)
        }
        Command::Ainv { config, from, to } => {
            let spec = load_config(&config)?.spec()?;
            let a = verify::a_invariant(&spec, from, to, None)?;
            emit(&None, &format!("{}\n", json::format_f64(a)), stdout)?;
            Ok(0)
        }
        Command::Lyndon { max_len, convention, cap } => run_lyndon(max_len, &convention, cap, stdout),
        Command::Gallery {
            name,
            list,
            foliate,
            curve,
            out,
        } => {
            if list {
                let mut text = String::new();
                for e in gallery::entries()? {
                    text.push_str(&format!("{}: {}\n", e.name, e.description));
                }
                emit(&out, &text, stdout)?;
                return Ok(0);
            }
            let name = name.ok_or_else(|| Error::Config("gallery needs an entry name or --list".into()))?;
            let entry = gallery::entry(&name)?;
            if foliate {
                emit(&out, &foliation_svg(&entry.config)?, stdout)?;
                Ok(0)
            } else if curve {
                emit(&out, &curve_csv(&entry.config)?, stdout)?;
                Ok(0)
            } else {
                let (value, passed) = check_report(&entry.config)?;
                emit(&out, &json::to_string(&value), stdout)?;
                Ok(if passed { 0 } else { 1 })
            }
        }
    }
}

/// Runs the command line `argv` (program name first) against the given
/// streams and returns the exit code.
pub fn run_with<I, S>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                let _ = stdout.write_all(text.as_bytes());
            } else {
                let _ = stderr.write_all(text.as_bytes());
            }
            return code;
        }
    };
    match dispatch(cli, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}
