//! Numeric verification: sphere moments, H-type polar coordinates, the
//! regularized pairing with `u^A`, spherical-vector integrals and the
//! functional-equation constants.
//!
//! Every integral over `n̄` goes through polar coordinates `(rω, r²η)`,
//! `(ω,η) ∈ 𝕊`: the angular part is a product Gauss rule on `𝕊` and the
//! radial part is [`radial::Sampled`].  The one independent path is
//! [`ua_pairing_direct`], which uses ordinary polar coordinates on `𝔳` and `𝔷`
//! separately.

pub mod radial;
pub mod rules;
pub mod testfn;

use num_complex::Complex64;
use serde::Serialize;

pub use radial::{normalized_halfline, regularized_halfline, richardson, Profile, Sampled};
pub use rules::{
    gauss_jacobi, gauss_jacobi_unit, gauss_legendre, htype_invariant_rule, htype_sphere_rule, sphere_area, sphere_monte_carlo, sphere_rule,
    weighted_sphere_rule, PolarNodes, Rule, Weight,
};
pub use testfn::{Decay, Integrand, RayTerm, SphericalVector, TestFunction};

use crate::error::{precondition, Error, Result};
use crate::exec::{chunked_sum, Exec};
use crate::gamma_expr::{
    gamma_exact, gamma_f64, ks_constant, ks_prime_constant, residue_constant_ac, spherical_action_a,
    spherical_integral, Value,
};
use crate::kernel_families::uc_kernel;
use crate::pair_config::{lattice_flags, PairConfig, ParamPoint};
use crate::rat::{factorial, pow2, qi, to_f64, Q};

/// Knobs for every numeric routine here.  Results are deterministic given
/// these settings (and the seed, for Monte Carlo).
#[derive(Clone, Debug)]
pub struct QuadratureSpec {
    pub polar: PolarNodes,
    /// Gauss–Legendre nodes per radial panel
    pub panel_nodes: usize,
    /// Taylor coefficients used by the radial continuation
    pub taylor_terms: usize,
    /// radius below which the Taylor expansion replaces `ψ`
    pub r0: f64,
    pub tol: f64,
    pub exec: Exec,
    pub seed: u64,
    pub mc_samples: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            polar: PolarNodes { radial: 10, angular: 4 },
            panel_nodes: 20,
            taylor_terms: 60,
            r0: 0.5,
            tol: 1e-4,
            exec: Exec::Auto,
            seed: 0,
            mc_samples: 10_000_000,
        }
    }
}

/// One numeric-vs-closed-form comparison.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub check: String,
    pub expected: f64,
    pub got: f64,
    pub rel_err: f64,
    pub tol: f64,
    pub pass: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, expected: f64, got: f64, tol: f64) -> Check {
        let rel_err = (got - expected).abs() / expected.abs().max(1e-300);
        Check { check: name.into(), expected, got, rel_err, tol, pass: rel_err <= tol }
    }
}

// --- sphere moments -------------------------------------------------------------

fn alpha_parts(alpha: &[u32]) -> (u32, Q, Q) {
    let n: u32 = alpha.iter().sum();
    let two: Q = alpha.iter().map(|&a| factorial(2 * a as u64)).product();
    let one: Q = alpha.iter().map(|&a| factorial(a as u64)).product();
    (n, two, one)
}

/// `∫_{S^{p−1}} ω^{2α} dω = 2^{−2|α|+1}(2α)! π^{p/2} / (α! Γ(p/2+|α|))`,
/// exactly.
pub fn sphere_moment(p: usize, alpha: &[u32]) -> Result<Value> {
    if p == 0 || alpha.len() != p {
        return precondition("need p >= 1 and a multi-index of length p");
    }
    let (n, two, one) = alpha_parts(alpha);
    let g = gamma_exact(&(Q::new((p as i64).into(), 2.into()) + qi(n as i64))).expect("half-integer argument");
    let Value::Exact { rat: grat, pi_half: gpi } = g else { unreachable!() };
    Ok(Value::Exact { rat: pow2(1 - 2 * n as i64) * two / one / grat, pi_half: p as i64 - gpi })
}

/// Product-rule value of the same moment.
pub fn sphere_moment_numeric(p: usize, alpha: &[u32], nodes: usize) -> Result<f64> {
    let r = sphere_rule(p, nodes)?;
    Ok(r.integrate(|w| w.iter().zip(alpha).map(|(x, &a)| x.powi(2 * a as i32)).product()))
}

/// `∫_{S^{p−1}} ω^{2α}|ω″|^γ dω` in closed form; `ω″` are the last `p2`
/// coordinates.
pub fn sphere_moment_weighted(p: usize, p2: usize, alpha: &[u32], gamma: f64) -> Result<f64> {
    if p2 == 0 || p2 > p || alpha.len() != p {
        return precondition("need 0 < p'' <= p and a multi-index of length p");
    }
    let a2: u32 = alpha[p - p2..].iter().sum();
    if gamma + p2 as f64 + 2.0 * a2 as f64 <= 0.0 {
        return precondition(format!("divergent exponent: γ = {gamma} <= -p'' - 2|α''|"));
    }
    let (n, two, one) = alpha_parts(alpha);
    let (pf, p2f, nf, a2f) = (p as f64, p2 as f64, n as f64, a2 as f64);
    Ok(2f64.powf(1.0 - 2.0 * nf) * std::f64::consts::PI.powf(pf / 2.0) * to_f64(&(two / one))
        * gamma_f64((gamma + p2f) / 2.0 + a2f)
        / (gamma_f64((gamma + pf) / 2.0 + nf) * gamma_f64(p2f / 2.0 + a2f)))
}

/// Numeric value from `ω = (√(1−u)ω′, √u ω″)`: Gauss–Jacobi in `u` times
/// product rules for the two sub-sphere moments.
pub fn sphere_moment_weighted_numeric(p: usize, p2: usize, alpha: &[u32], gamma: f64, nodes: usize) -> Result<f64> {
    let p1 = p - p2;
    let mono = |w: &[f64]| -> f64 { w.iter().zip(alpha).map(|(x, &a)| x.powi(2 * a as i32)).product() };
    if p1 == 0 {
        return Ok(sphere_rule(p, nodes.min(12))?.integrate(mono));
    }
    let (a1, a2): (u32, u32) = (alpha[..p1].iter().sum(), alpha[p1..].iter().sum());
    let (u, w) = gauss_jacobi_unit(nodes, (p2 as f64 + gamma) / 2.0 - 1.0, p1 as f64 / 2.0 - 1.0)?;
    let radial: f64 = u.iter().zip(&w).map(|(u, w)| 0.5 * w * u.powi(a2 as i32) * (1.0 - u).powi(a1 as i32)).sum();
    let s1 = sphere_moment_numeric(p1, &alpha[..p1], 8)?;
    let s2 = sphere_moment_numeric(p2, &alpha[p1..], 8)?;
    Ok(radial * s1 * s2)
}

// --- H-type polar coordinates ------------------------------------------------------

/// `∫_𝕊 f` for `f` given on `(ω, η)`.
pub fn htype_surface_integral(p: usize, q: usize, f: impl Fn(&[f64]) -> f64, nodes: PolarNodes) -> Result<f64> {
    Ok(htype_sphere_rule(p, q, Weight::None, nodes)?.integrate(f))
}

/// `ψ(r) = ∫_𝕊 w(ω) f(rω, r²η) dS` with its Taylor data.
pub fn polar_profile<'a>(p: usize, q: usize, weight: Weight, f: &'a dyn Integrand, spec: &QuadratureSpec) -> Result<Profile<'a>> {
    if f.dim() != p + q {
        return precondition(format!("integrand lives on R^{}, expected R^{}", f.dim(), p + q));
    }
    let rule = if f.is_radial() {
        htype_invariant_rule(p, q, weight, spec.polar)?
    } else {
        htype_sphere_rule(p, q, weight, spec.polar)?
    };
    profile_from_rule(p, q, rule, f, spec)
}

fn profile_from_rule<'a>(p: usize, q: usize, rule: Rule, f: &'a dyn Integrand, spec: &QuadratureSpec) -> Result<Profile<'a>> {
    let m = spec.taylor_terms;
    let mut taylor = vec![0.0; m];
    for (pt, w) in rule.points.iter().zip(&rule.weights) {
        for (t, c) in taylor.iter_mut().zip(f.taylor_along(pt, p, m)) {
            *t += w * c;
        }
    }
    let decay = f.decay();
    if let Some(rays) = merged_rays(&rule, f, p) {
        let eval = move |r: f64| rays.iter().map(|t| t.eval(r)).sum();
        return Ok(Profile { eval: Box::new(eval), taylor, decay });
    }
    let eval = move |r: f64| {
        let mut x = vec![0.0; p + q];
        let mut acc = 0.0;
        for (pt, w) in rule.points.iter().zip(&rule.weights) {
            for (i, v) in pt.iter().enumerate() {
                x[i] = if i < p { r * v } else { r * r * v };
            }
            acc += w * f.eval(&x);
        }
        acc
    };
    Ok(Profile { eval: Box::new(eval), taylor, decay })
}

/// `Σ_points w·f(rω, r²η)` as a sum of ray terms, with terms of equal
/// exponent (up to ~1e−13) merged: block-isotropic Gaussians collapse whole
/// sub-sphere rules into one term.
fn merged_rays(rule: &Rule, f: &dyn Integrand, p: usize) -> Option<Vec<RayTerm>> {
    let key = |a: &[f64; 3]| a.map(|v| (v * (1u64 << 44) as f64).round() as i64);
    let mut map: std::collections::BTreeMap<[i64; 3], RayTerm> = Default::default();
    for (pt, w) in rule.points.iter().zip(&rule.weights) {
        for t in f.along(pt, p)? {
            let e = map.entry(key(&t.exponent)).or_insert_with(|| RayTerm { exponent: t.exponent, poly: Vec::new() });
            if e.poly.len() < t.poly.len() {
                e.poly.resize(t.poly.len(), 0.0);
            }
            for (a, b) in e.poly.iter_mut().zip(&t.poly) {
                *a += w * b;
            }
        }
    }
    Some(map.into_values().collect())
}

/// `∫_{ℝ^d} φ` exactly, for diagonal Gaussian terms.
pub fn gaussian_total_integral(phi: &TestFunction) -> Result<f64> {
    let mut total = 0.0;
    for t in &phi.terms {
        let d = t.form.nrows();
        if (0..d).any(|i| (0..d).any(|j| i != j && t.form[(i, j)] != 0.0)) {
            return precondition("closed form needs diagonal quadratic forms");
        }
        for (c, e) in &t.poly {
            let mut v = *c;
            for (i, &k) in e.iter().enumerate() {
                if k % 2 == 1 {
                    v = 0.0;
                    break;
                }
                let a = t.form[(i, i)];
                let h = (k as f64 + 1.0) / 2.0;
                v *= gamma_f64(h) / a.powf(h);
            }
            total += v;
        }
    }
    Ok(total)
}

/// `∫_{ℝ^{p+q}} φ = ∫_0^∞ r^{p+2q−1} ∫_𝕊 φ(rω, r²η)`: the Lebesgue identity
/// fixing the measure on `𝕊`.
pub fn polar_consistency(p: usize, q: usize, phi: &TestFunction, spec: &QuadratureSpec) -> Result<Check> {
    let exact = gaussian_total_integral(phi)?;
    let prof = polar_profile(p, q, Weight::None, phi, spec)?;
    let s = (p + 2 * q) as f64;
    let got = regularized_halfline(&prof, Complex64::new(s, 0.0), 0, spec)?.re;
    Ok(Check::new("polar", exact, got, 1e-6))
}

// --- pairings with u^A ------------------------------------------------------------

struct Exponents {
    /// radial exponent `λ+ρ−ν−ρ′`
    s: f64,
    /// `λ−ρ+ν+ρ′`
    b: f64,
}

fn exponents(cfg: &PairConfig, lambda: f64, nu: f64) -> Exponents {
    let (rho, rho1) = (to_f64(&cfg.rho), to_f64(&cfg.rho1));
    Exponents { s: lambda + rho - nu - rho1, b: lambda - rho + nu + rho1 }
}

/// `⟨u^A_{λ,ν}, φ⟩` through polar coordinates and the radial continuation.
pub fn ua_pairing(cfg: &PairConfig, pt: &ParamPoint, phi: &dyn Integrand, spec: &QuadratureSpec) -> Result<f64> {
    ua_pairing_f64(cfg, to_f64(&pt.lambda), to_f64(&pt.nu), phi, spec)
}

pub fn ua_pairing_f64(cfg: &PairConfig, lambda: f64, nu: f64, phi: &dyn Integrand, spec: &QuadratureSpec) -> Result<f64> {
    let e = exponents(cfg, lambda, nu);
    let p2 = cfg.p2 as f64;
    if e.b + p2 <= 0.0 {
        return Err(Error::Unsupported(
            "|X''|-exponent at or below -p'': the second continuation (on \\\\) is not implemented numerically".into(),
        ));
    }
    let prof = polar_profile(cfg.p, cfg.q, Weight::Block { p2: cfg.p2, gamma: e.b }, phi, spec)?;
    let sampled = Sampled::new(&prof, e.s, spec)?;
    Ok(sampled.normalized(e.s)? / gamma_f64((e.b + p2) / 2.0))
}

/// The same pairing in the convergent region, computed with ordinary polar
/// coordinates `X = ρω̂`, `Z = ζη̂` on a graded `(ρ, ζ)` grid.
pub fn ua_pairing_direct(cfg: &PairConfig, lambda: f64, nu: f64, phi: &TestFunction, spec: &QuadratureSpec) -> Result<f64> {
    let e = exponents(cfg, lambda, nu);
    let (p, q, p2) = (cfg.p, cfg.q, cfg.p2);
    if e.s <= 0.0 || e.b + p2 as f64 <= 0.0 {
        return precondition("direct quadrature needs the absolutely convergent region");
    }
    let a = -2.0 * (nu + to_f64(&cfg.rho1));
    let ang_x = weighted_sphere_rule(p, p2, e.b, spec.polar.angular, 2 * spec.polar.radial)?;
    let ang_z = sphere_rule(q, spec.polar.angular)?;
    let big = 1.0 + (80.0 / phi.min_rate()).sqrt();
    let graded = |levels: usize| -> Result<(Vec<f64>, Vec<f64>)> {
        let (mut x, mut w) = (Vec::new(), Vec::new());
        for j in 0..levels {
            let (xs, ws) = gauss_legendre(8, big * 0.5f64.powi(j as i32 + 1), big * 0.5f64.powi(j as i32))?;
            x.extend(xs);
            w.extend(ws);
        }
        Ok((x, w))
    };
    let (rx, rw) = graded(22)?;
    let (zx, zw) = graded(22)?;
    let n = rx.len() * zx.len();
    let dim = p + q;
    let total = chunked_sum(spec.exec, n, 512, |idx| {
        let (i, j) = (idx / zx.len(), idx % zx.len());
        let (rho, zeta) = (rx[i], zx[j]);
        let radial = rw[i] * zw[j] * rho.powf(p as f64 - 1.0 + e.b) * zeta.powi(q as i32 - 1)
            * (rho.powi(4) + zeta * zeta).powf(a / 4.0);
        let mut x = vec![0.0; dim];
        let mut acc = 0.0;
        for (om, wo) in ang_x.points.iter().zip(&ang_x.weights) {
            for (et, we) in ang_z.points.iter().zip(&ang_z.weights) {
                for (k, v) in om.iter().enumerate() {
                    x[k] = rho * v;
                }
                for (k, v) in et.iter().enumerate() {
                    x[p + k] = zeta * v;
                }
                acc += wo * we * phi.eval(&x);
            }
        }
        radial * acc
    });
    Ok(total / (gamma_f64(e.s / 2.0) * gamma_f64((e.b + p2 as f64) / 2.0)))
}

// --- spherical vectors ------------------------------------------------------------

fn check_sv_region(cfg: &PairConfig, lambda: f64, nu: f64) -> Result<()> {
    if nu.abs() >= lambda + cfg.p2 as f64 / 2.0 {
        return precondition(format!("spherical-vector integral needs |ν| < λ + p''/2, got (λ,ν) = ({lambda}, {nu})"));
    }
    Ok(())
}

/// `∫ N^{−2(ν+ρ′)}|X″|^{λ−ρ+ν+ρ′} 1_λ`, fully numerically.
pub fn spherical_vector_integral(cfg: &PairConfig, lambda: f64, nu: f64, spec: &QuadratureSpec) -> Result<f64> {
    check_sv_region(cfg, lambda, nu)?;
    let e = exponents(cfg, lambda, nu);
    let sv = SphericalVector { p: cfg.p, q: cfg.q, c: (lambda + to_f64(&cfg.rho)) / 2.0 };
    let prof = polar_profile(cfg.p, cfg.q, Weight::Block { p2: cfg.p2, gamma: e.b }, &sv, spec)?;
    Ok(regularized_halfline(&prof, Complex64::new(e.s, 0.0), 0, spec)?.re)
}

pub fn spherical_vector_integral_check(cfg: &PairConfig, pt: &ParamPoint, spec: &QuadratureSpec) -> Result<Check> {
    let (l, n) = (to_f64(&pt.lambda), to_f64(&pt.nu));
    let got = spherical_vector_integral(cfg, l, n, spec)?;
    Ok(Check::new("spherical-vector", spherical_integral(cfg).eval_f64(l, n), got, spec.tol))
}

/// `∫_𝔷 |Z|^{ν−ρ′}(1+|Z|²)^{−(ν+ρ′)/2} dZ` for `m = 0` (`ρ′ = q`).
pub fn ks_m0_integral(q: usize, nu: f64, spec: &QuadratureSpec) -> Result<f64> {
    if nu <= 0.0 {
        return precondition(format!("the m = 0 Knapp–Stein integral needs ν > 0, got {nu}"));
    }
    let prof = ks_m0_profile(q, nu, spec)?;
    Ok(regularized_halfline(&prof, Complex64::new(nu, 0.0), 0, spec)?.re)
}

/// `ψ(r) = ∫_{S^{q−1}} (1+r²)^{−(ν+q)/2}`, numerically on the sphere.
fn ks_m0_profile(q: usize, nu: f64, spec: &QuadratureSpec) -> Result<Profile<'static>> {
    let c = (nu + q as f64) / 2.0;
    let area = sphere_rule(q, spec.polar.angular)?.total();
    let taylor = testfn::series_pow(&[1.0, 0.0, 1.0], -c, spec.taylor_terms).into_iter().map(|t| area * t).collect();
    Ok(Profile { eval: Box::new(move |r: f64| area * (1.0 + r * r).powf(-c)), taylor, decay: Decay::Power(2.0 * c) })
}

pub fn ks_m0_check(cfg: &PairConfig, nu: &Q, spec: &QuadratureSpec) -> Result<Check> {
    if cfg.m != 0 {
        return precondition("the m = 0 Knapp–Stein check needs m = 0");
    }
    let n = to_f64(nu);
    let got = ks_m0_integral(cfg.q, n, spec)?;
    let qf = cfg.q as f64;
    let expected = std::f64::consts::PI.powf(qf / 2.0) * gamma_f64(n / 2.0) / gamma_f64((n + qf) / 2.0);
    Ok(Check::new("ks", expected, got, spec.tol))
}

// --- functional equations ---------------------------------------------------------

/// `A_{λ,ν} 1_λ (0) = ⟨u^A_{λ,ν}, 1_λ⟩`.  The integrand depends on `X` only
/// through `|X|` and `|X″|`, so the `|ω″|`-moment factors out; its entire
/// normalized form `2π^{p/2}/(Γ((b+p)/2)Γ(p″/2))` replaces
/// `∫|ω″|^b/Γ((b+p″)/2)`, which extends the numeric range to `b > −p`.
pub fn spherical_action_a_numeric(cfg: &PairConfig, lambda: f64, nu: f64, spec: &QuadratureSpec) -> Result<f64> {
    let e = exponents(cfg, lambda, nu);
    let pf = cfg.p as f64;
    if e.b + pf <= 0.0 {
        return precondition("the radial |X|-weight is not integrable (b <= -p)");
    }
    let sv = SphericalVector { p: cfg.p, q: cfg.q, c: (lambda + to_f64(&cfg.rho)) / 2.0 };
    let prof = polar_profile(cfg.p, cfg.q, Weight::Radial(e.b), &sv, spec)?;
    let radial = Sampled::new(&prof, e.s, spec)?.normalized(e.s)?;
    let angular = 2.0 * std::f64::consts::PI.powf(pf / 2.0)
        / (gamma_f64((e.b + pf) / 2.0) * gamma_f64(cfg.p2 as f64 / 2.0))
        / sphere_area(cfg.p);
    Ok(angular * radial)
}

/// `T_λ 1_λ (0) = Γ(λ)^{−1} ∫ N^{2(λ−ρ)} 1_λ`, continued in `λ`.
pub fn ks_action_numeric(cfg: &PairConfig, lambda: f64, spec: &QuadratureSpec) -> Result<f64> {
    let sv = SphericalVector { p: cfg.p, q: cfg.q, c: (lambda + to_f64(&cfg.rho)) / 2.0 };
    let prof = polar_profile(cfg.p, cfg.q, Weight::None, &sv, spec)?;
    Sampled::new(&prof, 2.0 * lambda, spec)?.normalized(2.0 * lambda)
}

/// `T′_ν 1′_ν (0)`: `Γ(ν)^{−1}∫_{n̄′} N^{2(ν−ρ′)} 1′_ν` for `m > 0`,
/// `Γ(ν/2)^{−1}∫_𝔷 |Z|^{ν−ρ′} 1′_ν` for `m = 0`.
pub fn ks_prime_action_numeric(cfg: &PairConfig, nu: f64, spec: &QuadratureSpec) -> Result<f64> {
    let rho1 = to_f64(&cfg.rho1);
    if cfg.m == 0 {
        let prof = ks_m0_profile(cfg.q, nu, spec)?;
        return Sampled::new(&prof, nu, spec)?.normalized(nu);
    }
    let sv = SphericalVector { p: cfg.p1, q: cfg.q, c: (nu + rho1) / 2.0 };
    let prof = polar_profile(cfg.p1, cfg.q, Weight::None, &sv, spec)?;
    Sampled::new(&prof, 2.0 * nu, spec)?.normalized(2.0 * nu)
}

/// Both functional-equation constants from spherical-vector evaluations:
/// `T′_ν∘A_{λ,ν} = c₁ A_{λ,−ν}` gives `c₁ = a(λ,ν) t′(ν) / a(λ,−ν)`, and
/// `A_{λ,ν}∘T_{−λ} = c₂ A_{−λ,ν}` gives `c₂ = t(−λ) a(λ,ν) / a(−λ,ν)`.
pub fn functional_equation_check(cfg: &PairConfig, pt: &ParamPoint, spec: &QuadratureSpec) -> Result<Vec<Check>> {
    let (l, n) = (to_f64(&pt.lambda), to_f64(&pt.nu));
    let a = |l: f64, n: f64| spherical_action_a_numeric(cfg, l, n, spec);
    let a0 = a(l, n)?;
    let c1 = a0 * ks_prime_action_numeric(cfg, n, spec)? / a(l, -n)?;
    // at λ = ρ, 1_{−λ} ≡ 1 and both t(−λ) and a(−λ,ν) vanish: take the limit
    let c2_at = |l: f64| -> Result<f64> { Ok(ks_action_numeric(cfg, -l, spec)? * a(l, n)? / a(-l, n)?) };
    let c2 = match c2_at(l) {
        Ok(v) if v.is_finite() && v != 0.0 => v,
        _ => richardson(|e| c2_at(l + e), 1e-2)?,
    };
    let closed_a = spherical_action_a(cfg).eval_f64(l, n);
    Ok(vec![
        Check::new("functional:A-spherical", closed_a, a0, spec.tol),
        Check::new("functional:T'A", ks_prime_constant(cfg).eval_f64(l, n), c1, spec.tol),
        Check::new("functional:AT", ks_constant(cfg).eval_f64(l, n), c2, spec.tol),
    ])
}

// --- residues ------------------------------------------------------------------------

/// `⟨u^C_{λ,ν}, φ⟩ = Σ c_{h,i,j} (Δ′^h Δ″^i □^j φ)(0)`.
pub fn uc_pairing(cfg: &PairConfig, pt: &ParamPoint, phi: &TestFunction) -> Result<f64> {
    let kern = uc_kernel(cfg, pt)?;
    let (p, p1) = (cfg.p, cfg.p1);
    let origin = vec![0.0; cfg.nvars()];
    let lap = |f: &TestFunction, range: std::ops::Range<usize>| -> TestFunction {
        let mut out: Option<TestFunction> = None;
        for i in range {
            let d = f.derivative(i).derivative(i);
            out = Some(match out {
                None => d,
                Some(o) => o.add(&d),
            });
        }
        out.unwrap_or_else(|| f.clone().scale(0.0))
    };
    let mut total = 0.0;
    for t in &kern.terms {
        let mut f = phi.clone();
        for _ in 0..t.h {
            f = lap(&f, 0..p1);
        }
        for _ in 0..t.i {
            f = lap(&f, p1..p);
        }
        for _ in 0..t.z_order / 2 {
            f = lap(&f, p..p + cfg.q);
        }
        total += to_f64(&t.coef) * f.eval(&origin);
    }
    Ok(total)
}

/// On `//`: `u^A = c_{AC} u^C`.  Returns the ε-extrapolated pairing along
/// the transversal `λ ↦ λ + ε` and the value at the point itself, each
/// against `c_{AC} ⟨u^C, φ⟩`.
pub fn residue_check(cfg: &PairConfig, pt: &ParamPoint, phi: &TestFunction, spec: &QuadratureSpec) -> Result<Vec<Check>> {
    if lattice_flags(cfg, pt).k.is_none() {
        return precondition("residue check needs a point on the // lines");
    }
    let c = residue_constant_ac(cfg, pt)?.value_at(pt);
    let Some(cv) = c.value() else {
        return Err(Error::Numeric("the A/C residue constant is not finite and nonzero here".into()));
    };
    let expected = cv.to_f64() * uc_pairing(cfg, pt, phi)?;
    let (l, n) = (to_f64(&pt.lambda), to_f64(&pt.nu));
    let extrapolated = richardson(|e| ua_pairing_f64(cfg, l + e, n, phi, spec), 0.1)?;
    let at = ua_pairing_f64(cfg, l, n, phi, spec)?;
    Ok(vec![Check::new("residue:extrapolated", expected, extrapolated, 1e-3), Check::new("residue:at-point", expected, at, 1e-6)])
}

// --- Monte Carlo cross-check for large dimensions ------------------------------

/// `∫ N(X,Z)^a e^{−|X|²−|Z|²}` via polar coordinates.
pub fn norm_moment_polar(p: usize, q: usize, a: f64, spec: &QuadratureSpec) -> Result<f64> {
    let g = TestFunction::gaussian(&vec![1.0; p + q])?;
    // e^{−|X|²−|Z|²} is O(p) × O(q)-invariant
    let prof = profile_from_rule(p, q, htype_invariant_rule(p, q, Weight::None, spec.polar)?, &g, spec)?;
    let s = a + (p + 2 * q) as f64;
    if s <= 0.0 {
        return precondition("N^a is not locally integrable");
    }
    Ok(regularized_halfline(&prof, Complex64::new(s, 0.0), 0, spec)?.re)
}

/// The same integral as `π^{(p+q)/2} E[N^a]` over Gaussian samples.
pub fn norm_moment_monte_carlo(p: usize, q: usize, a: f64, samples: usize, seed: u64, exec: Exec) -> (f64, f64) {
    use rand::SeedableRng;
    use rand_distr::{Distribution, Normal};
    const BLOCK: usize = 8192;
    let blocks: Vec<usize> = (0..samples.div_ceil(BLOCK)).collect();
    let dist = Normal::new(0.0, std::f64::consts::FRAC_1_SQRT_2).unwrap();
    let partial = crate::exec::map_collect(exec, &blocks, |&b| {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(b as u64);
        let (mut s, mut s2) = (0.0, 0.0);
        for _ in (b * BLOCK)..((b + 1) * BLOCK).min(samples) {
            let mut x2 = 0.0;
            for _ in 0..p {
                let v: f64 = dist.sample(&mut rng);
                x2 += v * v;
            }
            let mut z2 = 0.0;
            for _ in 0..q {
                let v: f64 = dist.sample(&mut rng);
                z2 += v * v;
            }
            let y = (x2 * x2 + z2).powf(a / 4.0);
            s += y;
            s2 += y * y;
        }
        (s, s2)
    });
    let (s, s2) = partial.iter().fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    let nf = samples as f64;
    let mean = s / nf;
    let c = std::f64::consts::PI.powf((p + q) as f64 / 2.0);
    (c * mean, c * ((s2 / nf - mean * mean).max(0.0) / nf).sqrt())
}

pub fn norm_moment_check(p: usize, q: usize, a: f64, spec: &QuadratureSpec) -> Result<Check> {
    let polar = norm_moment_polar(p, q, a, spec)?;
    let (mc, _) = norm_moment_monte_carlo(p, q, a, spec.mc_samples, spec.seed, spec.exec);
    Ok(Check::new("polar-vs-monte-carlo", polar, mc, 1e-2))
}

#[cfg(test)]
mod tests;
