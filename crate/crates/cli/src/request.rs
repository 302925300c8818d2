//! Request assembly: an optional TOML file, overridden by flags.

use std::path::Path;

use htype_sbo::pair_config::{PairConfig, ParamPoint, RawConfig};
use htype_sbo::quadrature_lab::QuadratureSpec;
use htype_sbo::rat::{fmt_q, is_int, parse_q, Q};
use serde::Deserialize;

use crate::CliError;

/// Upper bound on the number of lattice points in a window.
pub const MAX_CELLS: usize = 10_000;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileRequest {
    pub config: Option<RawConfig>,
    pub point: Option<RawPoint>,
    pub window: Option<RawWindow>,
    pub quadrature: Option<RawQuadrature>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawPoint {
    pub lambda: String,
    pub nu: String,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawWindow {
    pub lambda: Option<[String; 2]>,
    pub nu: Option<[String; 2]>,
    pub step: Option<String>,
    pub max_k: Option<u32>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawQuadrature {
    pub radial_nodes: Option<usize>,
    pub angular_nodes: Option<usize>,
    pub panel_nodes: Option<usize>,
    pub taylor_terms: Option<usize>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub mc_samples: Option<usize>,
}

pub fn load(path: Option<&Path>) -> Result<FileRequest, CliError> {
    let Some(path) = path else {
        return Ok(FileRequest::default());
    };
    let text = std::fs::read_to_string(path).map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::usage(format!("bad config {}: {e}", path.display())))
}

/// Flag values for the group pair; each overrides the file.
#[derive(Debug, Default, Clone)]
pub struct ConfigFlags {
    pub algebra: Option<String>,
    pub n: Option<i64>,
    pub m: Option<i64>,
    pub f: Option<String>,
}

pub fn pair_config(file: &FileRequest, flags: &ConfigFlags) -> Result<PairConfig, CliError> {
    let base = file.config.clone();
    let raw = RawConfig {
        algebra: flags
            .algebra
            .clone()
            .or_else(|| base.as_ref().map(|b| b.algebra.clone()))
            .ok_or_else(|| CliError::usage("no algebra given (use --algebra or [config] in the TOML file)"))?,
        n: flags.n.or(base.as_ref().map(|b| b.n)).ok_or_else(|| CliError::usage("no n given"))?,
        m: flags.m.or(base.as_ref().map(|b| b.m)).ok_or_else(|| CliError::usage("no m given"))?,
        f: flags.f.clone().or_else(|| base.as_ref().map(|b| b.f.clone())).unwrap_or_else(|| "trivial".into()),
    };
    Ok(PairConfig::from_raw(&raw)?)
}

pub fn point(file: &FileRequest, lambda: Option<&str>, nu: Option<&str>) -> Result<ParamPoint, CliError> {
    let l = lambda.map(str::to_owned).or_else(|| file.point.as_ref().map(|p| p.lambda.clone()));
    let n = nu.map(str::to_owned).or_else(|| file.point.as_ref().map(|p| p.nu.clone()));
    match (l, n) {
        (Some(l), Some(n)) => Ok(ParamPoint::parse(&l, &n)?),
        _ => Err(CliError::usage("no point given (use --lambda/--nu or [point] in the TOML file)")),
    }
}

#[derive(Debug, Default, Clone)]
pub struct WindowFlags {
    pub lambda_min: Option<String>,
    pub lambda_max: Option<String>,
    pub nu_min: Option<String>,
    pub nu_max: Option<String>,
    pub step: Option<String>,
    pub max_k: Option<u32>,
}

/// A rectangular grid of parameter points with a rational step.
#[derive(Debug, Clone)]
pub struct Window {
    pub lambda: (Q, Q),
    pub nu: (Q, Q),
    pub step: Q,
    pub max_k: u32,
}

impl Window {
    fn axis(&self, (lo, hi): &(Q, Q)) -> Vec<Q> {
        let mut out = Vec::new();
        let mut x = lo.clone();
        while &x <= hi {
            out.push(x.clone());
            x += &self.step;
        }
        out
    }

    pub fn lambdas(&self) -> Vec<Q> {
        self.axis(&self.lambda)
    }

    pub fn nus(&self) -> Vec<Q> {
        self.axis(&self.nu)
    }

    /// Row-major over `ν` (outer) and `λ` (inner).
    pub fn points(&self) -> Vec<ParamPoint> {
        let ls = self.lambdas();
        self.nus().into_iter().flat_map(|n| ls.iter().map(move |l| ParamPoint::new(l.clone(), n.clone()))).collect()
    }

    pub fn size(&self) -> usize {
        self.lambdas().len() * self.nus().len()
    }
}

pub fn window(file: &FileRequest, flags: &WindowFlags, default: ([&str; 2], [&str; 2])) -> Result<Window, CliError> {
    let fw = file.window.clone().unwrap_or_default();
    let pick = |flag: &Option<String>, file: Option<&String>, dflt: &str| -> Result<Q, CliError> {
        Ok(parse_q(flag.as_deref().or(file.map(|s| s.as_str())).unwrap_or(dflt))?)
    };
    let lambda = (
        pick(&flags.lambda_min, fw.lambda.as_ref().map(|a| &a[0]), default.0[0])?,
        pick(&flags.lambda_max, fw.lambda.as_ref().map(|a| &a[1]), default.0[1])?,
    );
    let nu = (
        pick(&flags.nu_min, fw.nu.as_ref().map(|a| &a[0]), default.1[0])?,
        pick(&flags.nu_max, fw.nu.as_ref().map(|a| &a[1]), default.1[1])?,
    );
    let step = pick(&flags.step, fw.step.as_ref(), "1")?;
    if step <= Q::from_integer(0.into()) {
        return Err(CliError::usage("window step must be positive"));
    }
    let w = Window { lambda, nu, step, max_k: flags.max_k.or(fw.max_k).unwrap_or(4) };
    // count without materializing a huge window
    let count = |(lo, hi): &(Q, Q)| -> Q {
        if hi < lo {
            Q::from_integer(0.into())
        } else {
            ((hi - lo) / &w.step).floor() + Q::from_integer(1.into())
        }
    };
    let cells = count(&w.lambda) * count(&w.nu);
    if cells > Q::from_integer((MAX_CELLS as i64).into()) {
        return Err(CliError::usage(format!("window has {} points, the limit is {MAX_CELLS}", show_q(&cells))));
    }
    Ok(w)
}

#[derive(Debug, Default, Clone)]
pub struct QuadFlags {
    pub tol: Option<f64>,
    pub seed: Option<u64>,
}

pub fn quadrature_spec(file: &FileRequest, flags: &QuadFlags) -> QuadratureSpec {
    let mut spec = QuadratureSpec::default();
    if let Some(q) = &file.quadrature {
        if let Some(v) = q.radial_nodes {
            spec.polar.radial = v;
        }
        if let Some(v) = q.angular_nodes {
            spec.polar.angular = v;
        }
        if let Some(v) = q.panel_nodes {
            spec.panel_nodes = v;
        }
        if let Some(v) = q.taylor_terms {
            spec.taylor_terms = v;
        }
        if let Some(v) = q.tol {
            spec.tol = v;
        }
        if let Some(v) = q.seed {
            spec.seed = v;
        }
        if let Some(v) = q.mc_samples {
            spec.mc_samples = v;
        }
    }
    if let Some(t) = flags.tol {
        spec.tol = t;
    }
    if let Some(s) = flags.seed {
        spec.seed = s;
    }
    spec
}

/// `"3"` for integers, `"p/q"` otherwise.
pub fn show_q(x: &Q) -> String {
    if is_int(x) {
        x.numer().to_string()
    } else {
        fmt_q(x)
    }
}
