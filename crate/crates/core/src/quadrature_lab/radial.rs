//! `I(s) = ∫_0^∞ r^{s−1} ψ(r) dr` continued meromorphically in `s`.
//!
//! On `[0, r₀]` the Taylor polynomial of `ψ` is subtracted and integrated
//! exactly, `Σ_j c_j r₀^{s+j}/(s+j)`; with `r₀` inside the radius of
//! convergence and enough terms the subtracted remainder is below rounding,
//! so the head is exactly the Gelfand–Shilov continuation.  `[r₀, 1]` is
//! plain Gauss–Legendre and the tail is handled according to the decay.

use num_complex::Complex64;

use super::rules::gauss_legendre;
use super::testfn::Decay;
use super::QuadratureSpec;
use crate::error::{precondition, Error, Result};
use crate::exec::map_collect;
use crate::gamma_expr::gamma_f64;

/// A radial profile: values on demand, Taylor data at `0`, decay at `∞`.
pub struct Profile<'a> {
    pub eval: Box<dyn Fn(f64) -> f64 + Sync + Send + 'a>,
    /// `c_j = ψ^{(j)}(0)/j!`
    pub taylor: Vec<f64>,
    pub decay: Decay,
}

struct Nodes {
    /// `(r, weight, jacobian power)`: the term is `w · r^{s−1} ψ(r)` for
    /// ordinary nodes, and `w · t^{−s−1} ψ(1/t)` (so `r = 1/t`) for the
    /// inverted tail
    pts: Vec<(f64, f64, bool)>,
}

fn nodes(decay: Decay, s_re: f64, spec: &QuadratureSpec) -> Result<Nodes> {
    let n = spec.panel_nodes;
    let mut pts = Vec::new();
    let r0 = spec.r0;
    for k in 0..2 {
        let (a, b) = (r0 + (1.0 - r0) * k as f64 / 2.0, r0 + (1.0 - r0) * (k + 1) as f64 / 2.0);
        let (x, w) = gauss_legendre(n, a, b)?;
        pts.extend(x.into_iter().zip(w).map(|(x, w)| (x, w, false)));
    }
    match decay {
        Decay::Gaussian(a) if a > 0.0 => {
            let big = 1.0 + (80.0 / a).sqrt();
            let panels = ((big - 1.0) / 2.0).ceil() as usize;
            let h = (big - 1.0) / panels as f64;
            for k in 0..panels {
                let (x, w) = gauss_legendre(n, 1.0 + h * k as f64, 1.0 + h * (k + 1) as f64)?;
                pts.extend(x.into_iter().zip(w).map(|(x, w)| (x, w, false)));
            }
        }
        Decay::Power(e) => {
            // t = 1/r, integrand ~ t^{β−1} near 0
            let beta = e - s_re;
            if beta <= 0.0 {
                return Err(Error::Numeric(format!("tail diverges: decay r^-{e} against r^{s_re}")));
            }
            let levels = ((52.0 / beta).ceil() as usize).clamp(4, 600);
            for j in 0..levels {
                let (x, w) = gauss_legendre(n, 0.5f64.powi(j as i32 + 1), 0.5f64.powi(j as i32))?;
                pts.extend(x.into_iter().zip(w).map(|(x, w)| (x, w, true)));
            }
        }
        _ => return precondition("the profile does not decay"),
    }
    Ok(Nodes { pts })
}

/// Values of `ψ` at the quadrature nodes (the expensive part), in a fixed
/// order; reusable across several `s`.
pub struct Sampled {
    nodes: Nodes,
    values: Vec<f64>,
    taylor: Vec<f64>,
    r0: f64,
}

impl Sampled {
    pub fn new(psi: &Profile, s_re_max: f64, spec: &QuadratureSpec) -> Result<Self> {
        let nodes = nodes(psi.decay, s_re_max, spec)?;
        let rs: Vec<f64> = nodes.pts.iter().map(|&(x, _, inv)| if inv { 1.0 / x } else { x }).collect();
        let values = map_collect(spec.exec, &rs, |&r| (psi.eval)(r));
        Ok(Sampled { nodes, values, taylor: psi.taylor.clone(), r0: spec.r0 })
    }

    /// `I(s)`; errors at a pole `s = −j` with `c_j ≠ 0`.
    pub fn integral(&self, s: Complex64) -> Result<Complex64> {
        let scale = self.taylor.iter().fold(0.0f64, |m, c| m.max(c.abs())).max(1e-300);
        let mut head = Complex64::new(0.0, 0.0);
        for (j, c) in self.taylor.iter().enumerate() {
            let d = s + j as f64;
            if d.norm() < 1e-13 {
                if c.abs() > 1e-12 * scale {
                    return Err(Error::Numeric(format!("I(s) has a pole at s = -{j}")));
                }
                continue;
            }
            head += *c * Complex64::new(self.r0, 0.0).powc(d) / d;
        }
        let mut body = Complex64::new(0.0, 0.0);
        for (&(x, w, inv), &v) in self.nodes.pts.iter().zip(&self.values) {
            let e = if inv { -s - 1.0 } else { s - 1.0 };
            body += w * v * Complex64::new(x, 0.0).powc(e);
        }
        Ok(head + body)
    }

    /// `I(s)/Γ(s/2)` for real `s`, entire in `s`; at `s = −2k` it equals
    /// `(−1)^k k! c_{2k}/2`.
    pub fn normalized(&self, s: f64) -> Result<f64> {
        let k = (-s / 2.0).round();
        if k >= 0.0 && (s + 2.0 * k).abs() < 1e-12 {
            let k = k as usize;
            let Some(c) = self.taylor.get(2 * k) else {
                return Err(Error::Precondition(format!("need Taylor data up to order {}", 2 * k)));
            };
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let kf: f64 = (1..=k).map(|i| i as f64).product();
            return Ok(sign * kf * c / 2.0);
        }
        Ok(self.integral(Complex64::new(s, 0.0))?.re / gamma_f64(s / 2.0))
    }
}

/// `I(s)` continued; `order_k` is the pole order the continuation must
/// reach (`Re s > −2k−1`).
pub fn regularized_halfline(psi: &Profile, s: Complex64, order_k: usize, spec: &QuadratureSpec) -> Result<Complex64> {
    if psi.taylor.len() < 2 * order_k + 1 {
        return Err(Error::Precondition(format!(
            "continuation to order {order_k} needs {} Taylor coefficients, got {}",
            2 * order_k + 1,
            psi.taylor.len()
        )));
    }
    if s.re <= -(psi.taylor.len() as f64) {
        return precondition("s lies beyond the reach of the Taylor data");
    }
    Sampled::new(psi, s.re, spec)?.integral(s)
}

/// `I(s)/Γ(s/2)`.
pub fn normalized_halfline(psi: &Profile, s: f64, spec: &QuadratureSpec) -> Result<f64> {
    Sampled::new(psi, s, spec)?.normalized(s)
}

/// Richardson extrapolation to `ε → 0` from `ε, ε/2, ε/4`.
pub fn richardson(f: impl Fn(f64) -> Result<f64>, eps: f64) -> Result<f64> {
    let (a, b, c) = (f(eps)?, f(eps / 2.0)?, f(eps / 4.0)?);
    let (r1, r2) = (2.0 * b - a, 2.0 * c - b);
    Ok((4.0 * r2 - r1) / 3.0)
}
