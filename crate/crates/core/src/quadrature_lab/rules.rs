//! Gauss rules (Golub–Welsch), product rules on spheres and on the H-type
//! unit sphere `𝕊 = {N(X,Z) = 1}`.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{precondition, Result};
use crate::exec::{map_collect, Exec};
use crate::gamma_expr::gamma_f64;

/// Nodes and weights for `∫_{−1}^{1} f(t)(1−t)^α(1+t)^β dt`.
pub fn gauss_jacobi(n: usize, alpha: f64, beta: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 {
        return precondition("a Gauss rule needs at least one node");
    }
    if alpha <= -1.0 || beta <= -1.0 {
        return precondition(format!("Jacobi exponents must exceed -1, got ({alpha}, {beta})"));
    }
    let ab = alpha + beta;
    let mut jm = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        let kf = k as f64;
        jm[(k, k)] = if k == 0 {
            (beta - alpha) / (ab + 2.0)
        } else {
            (beta * beta - alpha * alpha) / ((2.0 * kf + ab) * (2.0 * kf + ab + 2.0))
        };
        if k + 1 < n {
            let j = kf + 1.0;
            // the j = 1 entry is written with the (j+α+β) factor cancelled
            let b2 = if k == 0 {
                4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + ab).powi(2) * (3.0 + ab))
            } else {
                4.0 * j * (j + alpha) * (j + beta) * (j + ab)
                    / ((2.0 * j + ab).powi(2) * (2.0 * j + ab + 1.0) * (2.0 * j + ab - 1.0))
            };
            jm[(k, k + 1)] = b2.sqrt();
            jm[(k + 1, k)] = b2.sqrt();
        }
    }
    let mu0 = 2f64.powf(ab + 1.0) * gamma_f64(alpha + 1.0) * gamma_f64(beta + 1.0) / gamma_f64(ab + 2.0);
    let eig = SymmetricEigen::new(jm);
    let mut pairs: Vec<(f64, f64)> =
        (0..n).map(|i| (eig.eigenvalues[i], mu0 * eig.eigenvectors[(0, i)].powi(2))).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(pairs.into_iter().unzip())
}

/// Nodes and weights for `∫_0^1 f(u) u^a (1−u)^b du`.
pub fn gauss_jacobi_unit(n: usize, a: f64, b: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let (t, w) = gauss_jacobi(n, b, a)?;
    let s = 2f64.powf(-(a + b + 1.0));
    Ok((t.iter().map(|t| (t + 1.0) / 2.0).collect(), w.iter().map(|w| w * s).collect()))
}

/// Gauss–Legendre on `[lo, hi]`.
pub fn gauss_legendre(n: usize, lo: f64, hi: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let (t, w) = gauss_jacobi(n, 0.0, 0.0)?;
    let (m, h) = ((lo + hi) / 2.0, (hi - lo) / 2.0);
    Ok((t.iter().map(|t| m + h * t).collect(), w.iter().map(|w| w * h).collect()))
}

/// `|S^{p−1}| = 2π^{p/2}/Γ(p/2)`.
pub fn sphere_area(p: usize) -> f64 {
    2.0 * std::f64::consts::PI.powf(p as f64 / 2.0) / gamma_f64(p as f64 / 2.0)
}

/// A weighted point set.
#[derive(Clone, Debug, Default)]
pub struct Rule {
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(&[f64]) -> f64) -> f64 {
        self.points.iter().zip(&self.weights).map(|(x, w)| w * f(x)).sum()
    }

    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Product rule on `S^{p−1}` from `ω = (t, √(1−t²) ω̃)`, with weight
/// `(1−t²)^{(p−3)/2}` in `t`.  Exact for polynomials of degree `< 2n` in each
/// step.  `2 n^{p−1}` points.
pub fn sphere_rule(p: usize, n: usize) -> Result<Rule> {
    if p == 0 {
        return precondition("the sphere S^{p-1} needs p >= 1");
    }
    if p == 1 {
        return Ok(Rule { points: vec![vec![1.0], vec![-1.0]], weights: vec![1.0, 1.0] });
    }
    let e = (p as f64 - 3.0) / 2.0;
    let (t, w) = gauss_jacobi(n, e, e)?;
    let sub = sphere_rule(p - 1, n)?;
    let mut out = Rule::default();
    for (ti, wi) in t.iter().zip(&w) {
        let c = (1.0 - ti * ti).max(0.0).sqrt();
        for (y, wy) in sub.points.iter().zip(&sub.weights) {
            let mut pt = Vec::with_capacity(p);
            pt.push(*ti);
            pt.extend(y.iter().map(|v| c * v));
            out.points.push(pt);
            out.weights.push(wi * wy);
        }
    }
    Ok(out)
}

/// Rule on `S^{p−1}` with the extra weight `|ω″|^γ`, `ω″` the last `p2`
/// coordinates, from `ω = (√(1−u) ω′, √u ω″)`; `n` nodes per angle and
/// `nu` in `u`.
pub fn weighted_sphere_rule(p: usize, p2: usize, gamma: f64, n: usize, nu: usize) -> Result<Rule> {
    if p2 == 0 || p2 > p {
        return precondition("need 0 < p'' <= p");
    }
    let p1 = p - p2;
    if p1 == 0 {
        return sphere_rule(p, n);
    }
    if gamma + p2 as f64 <= 0.0 {
        return precondition(format!("|ω''|^{gamma} is not integrable on S^{}", p - 1));
    }
    let (u, w) = gauss_jacobi_unit(nu, (p2 as f64 + gamma) / 2.0 - 1.0, p1 as f64 / 2.0 - 1.0)?;
    let (s1, s2) = (sphere_rule(p1, n)?, sphere_rule(p2, n)?);
    let mut out = Rule::default();
    for (ui, wi) in u.iter().zip(&w) {
        let (c, s) = ((1.0 - ui).max(0.0).sqrt(), ui.sqrt());
        for (y1, w1) in s1.points.iter().zip(&s1.weights) {
            for (y2, w2) in s2.points.iter().zip(&s2.weights) {
                let mut pt: Vec<f64> = y1.iter().map(|v| c * v).collect();
                pt.extend(y2.iter().map(|v| s * v));
                out.points.push(pt);
                out.weights.push(0.5 * wi * w1 * w2);
            }
        }
    }
    Ok(out)
}

/// Node counts for the polar rules.
#[derive(Clone, Copy, Debug)]
pub struct PolarNodes {
    /// nodes per panel in the `x = |ω|` direction of `𝕊` (twice that in the
    /// `|ω″|` direction of a block weight)
    pub radial: usize,
    /// nodes per angle on `S^{p−1}` and `S^{q−1}`
    pub angular: usize,
}

/// Extra weight on `𝕊`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Weight {
    None,
    /// `|ω″|^γ`, `ω″` the last `p2` of the first `p` coordinates
    Block { p2: usize, gamma: f64 },
    /// `|ω|^γ` only
    Radial(f64),
}

/// Rule on `𝕊 ⊆ ℝ^{p+q}` from
/// `∫_𝕊 f = 2∫_0^1 x^{p−1}(1−x⁴)^{q/2−1} ∫∫ f(xω, √(1−x⁴)η) dη dω dx`.
/// Points are `(ω, η)` concatenated.
pub fn htype_sphere_rule(p: usize, q: usize, weight: Weight, nodes: PolarNodes) -> Result<Rule> {
    if p == 0 || q == 0 {
        return precondition("H-type sphere needs p, q >= 1");
    }
    let (b, sp) = match weight {
        Weight::Block { p2, gamma } => (gamma, weighted_sphere_rule(p, p2, gamma, nodes.angular, 2 * nodes.radial)?),
        Weight::Radial(g) => (g, sphere_rule(p, nodes.angular)?),
        Weight::None => (0.0, sphere_rule(p, nodes.angular)?),
    };
    if p as f64 + b <= 0.0 {
        return precondition("weight not integrable at x = 0");
    }
    let (v, w) = x_rule(p, q, b, nodes.radial)?;
    let sq = sphere_rule(q, nodes.angular)?;
    let mut out = Rule::default();
    for (vi, wi) in v.iter().zip(&w) {
        let x = vi.sqrt();
        let y = (1.0 - vi * vi).max(0.0).sqrt();
        for (om, wo) in sp.points.iter().zip(&sp.weights) {
            for (et, we) in sq.points.iter().zip(&sq.weights) {
                let mut pt: Vec<f64> = om.iter().map(|v| x * v).collect();
                pt.extend(et.iter().map(|v| y * v));
                out.points.push(pt);
                out.weights.push(wi * wo * we);
            }
        }
    }
    Ok(out)
}

/// `2x^{p+b−1}(1−x⁴)^{q/2−1}dx` in `v = x²`: weight
/// `v^{(p+b)/2−1}(1−v)^{q/2−1}` times the smooth `(1+v)^{q/2−1}`.  Integrands
/// on `𝕊` depend on `x` through `x²` and `1−x⁴`, so they are smooth in `v`;
/// for large `r` they develop layers at both ends, hence the graded rule.
fn x_rule(p: usize, q: usize, b: f64, n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let h = q as f64 / 2.0 - 1.0;
    let (v, w) = graded_jacobi_unit(n, (p as f64 + b) / 2.0 - 1.0, h, X_LEVELS)?;
    let w = v.iter().zip(&w).map(|(v, w)| w * (1.0 + v).powf(h)).collect();
    Ok((v, w))
}

const X_LEVELS: usize = 5;

/// Composite rule for `u^a(1−u)^b` on `[0,1]`: panels halving towards both
/// ends, Gauss–Jacobi on the two end panels (which carry the singular
/// factor), Gauss–Legendre with the explicit weight elsewhere.
pub fn graded_jacobi_unit(n: usize, a: f64, b: f64, levels: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if a <= -1.0 || b <= -1.0 {
        return precondition("Jacobi exponents must exceed -1");
    }
    let (mut xs, mut ws) = (Vec::new(), Vec::new());
    let end = 0.5f64.powi(levels as i32 + 1);
    // [0, end] with u^a built in
    let (t, w) = gauss_jacobi_unit(n, a, 0.0)?;
    for (t, w) in t.iter().zip(&w) {
        let u = end * t;
        xs.push(u);
        ws.push(w * end.powf(a + 1.0) * (1.0 - u).powf(b));
    }
    for j in (1..=levels).rev() {
        let (lo, hi) = (0.5f64.powi(j as i32 + 1), 0.5f64.powi(j as i32));
        for (lo, hi) in [(lo, hi), (1.0 - hi, 1.0 - lo)] {
            let (t, w) = gauss_legendre(n, lo, hi)?;
            for (u, w) in t.iter().zip(&w) {
                xs.push(*u);
                ws.push(w * u.powf(a) * (1.0 - u).powf(b));
            }
        }
    }
    // [1 − end, 1] with (1−u)^b built in
    let (t, w) = gauss_jacobi_unit(n, b, 0.0)?;
    for (t, w) in t.iter().zip(&w) {
        let u = 1.0 - end * t;
        xs.push(u);
        ws.push(w * end.powf(b + 1.0) * u.powf(a));
    }
    Ok((xs, ws))
}

/// Reduced rule on `𝕊` for integrands depending only on `|X|` and `|Z|`:
/// the angular spheres collapse to a single point times their area, except
/// for the `|ω″|`-direction of a block weight.
pub fn htype_invariant_rule(p: usize, q: usize, weight: Weight, nodes: PolarNodes) -> Result<Rule> {
    if p == 0 || q == 0 {
        return precondition("H-type sphere needs p, q >= 1");
    }
    // (ω-points, weights) on S^{p−1}
    let (b, omegas): (f64, Vec<(Vec<f64>, f64)>) = match weight {
        Weight::Block { p2, gamma } if p2 < p => {
            if p2 == 0 || gamma + p2 as f64 <= 0.0 {
                return precondition("block weight not integrable");
            }
            let p1 = p - p2;
            let (u, w) = gauss_jacobi_unit(2 * nodes.radial, (p2 as f64 + gamma) / 2.0 - 1.0, p1 as f64 / 2.0 - 1.0)?;
            let area = 0.5 * sphere_area(p1) * sphere_area(p2);
            let pts = u
                .iter()
                .zip(&w)
                .map(|(u, w)| {
                    let mut om = vec![0.0; p];
                    om[0] = (1.0 - u).max(0.0).sqrt();
                    om[p1] = u.sqrt();
                    (om, w * area)
                })
                .collect();
            (gamma, pts)
        }
        Weight::Block { gamma: g, .. } | Weight::Radial(g) => (g, vec![(unit(p, 0), sphere_area(p))]),
        Weight::None => (0.0, vec![(unit(p, 0), sphere_area(p))]),
    };
    if p as f64 + b <= 0.0 {
        return precondition("weight not integrable at x = 0");
    }
    let (v, w) = x_rule(p, q, b, nodes.radial)?;
    let aq = sphere_area(q);
    let mut out = Rule::default();
    for (vi, wi) in v.iter().zip(&w) {
        let (x, y) = (vi.sqrt(), (1.0 - vi * vi).max(0.0).sqrt());
        for (om, wo) in &omegas {
            let mut pt: Vec<f64> = om.iter().map(|o| x * o).collect();
            pt.extend(unit(q, 0).iter().map(|e| y * e));
            out.points.push(pt);
            out.weights.push(wi * wo * aq);
        }
    }
    Ok(out)
}

fn unit(d: usize, i: usize) -> Vec<f64> {
    let mut e = vec![0.0; d];
    e[i] = 1.0;
    e
}

/// Uniform points on `S^{p−1}` (normalized Gaussians); deterministic per
/// `(seed, index)` block so the mode does not change the sample.
pub fn sphere_monte_carlo(p: usize, samples: usize, seed: u64, exec: Exec, f: impl Fn(&[f64]) -> f64 + Sync + Send) -> (f64, f64) {
    const BLOCK: usize = 4096;
    let blocks: Vec<usize> = (0..samples.div_ceil(BLOCK)).collect();
    let partial = map_collect(exec, &blocks, |&b| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(b as u64);
        let mut v = vec![0.0f64; p];
        let (mut s, mut s2) = (0.0, 0.0);
        for _ in (b * BLOCK)..((b + 1) * BLOCK).min(samples) {
            let mut n2 = 0.0f64;
            for x in v.iter_mut() {
                *x = StandardNormal.sample(&mut rng);
                n2 += *x * *x;
            }
            let n = n2.sqrt();
            v.iter_mut().for_each(|x| *x /= n);
            let y = f(&v);
            s += y;
            s2 += y * y;
        }
        (s, s2)
    });
    let (s, s2) = partial.iter().fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    let nf = samples as f64;
    let mean = s / nf;
    let var = (s2 / nf - mean * mean).max(0.0);
    let area = sphere_area(p);
    (area * mean, area * (var / nf).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(5, 0.0, 2.0).unwrap();
        let v: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(9)).sum();
        assert_relative_eq!(v, 1024.0 / 10.0, max_relative = 1e-13);
    }

    #[test]
    fn jacobi_mass_and_moment() {
        // ∫ (1−t)^{1/2}(1+t)^{−1/2} t dt = −π/2
        let (t, w) = gauss_jacobi(6, 0.5, -0.5).unwrap();
        assert_relative_eq!(w.iter().sum::<f64>(), std::f64::consts::PI, max_relative = 1e-13);
        let m: f64 = t.iter().zip(&w).map(|(t, w)| t * w).sum();
        assert_relative_eq!(m, -std::f64::consts::PI / 2.0, max_relative = 1e-12);
        // the α+β = −1 corner of the recurrence
        assert!(gauss_jacobi(4, -0.5, -0.5).unwrap().1.iter().all(|w| w.is_finite()));
    }

    #[test]
    fn sphere_areas() {
        for p in 1..=8 {
            let r = sphere_rule(p, 3).unwrap();
            assert_relative_eq!(r.total(), sphere_area(p), max_relative = 1e-12);
            assert!(r.points.iter().all(|x| (x.iter().map(|v| v * v).sum::<f64>() - 1.0).abs() < 1e-12));
        }
    }

    #[test]
    fn htype_mass_p2_q1() {
        let r = htype_sphere_rule(2, 1, Weight::None, PolarNodes { radial: 8, angular: 4 }).unwrap();
        let pi = std::f64::consts::PI;
        assert_relative_eq!(r.total(), 2.0 * pi * pi, max_relative = 1e-12);
        // points lie on N = 1
        for x in &r.points {
            let n4 = (x[0] * x[0] + x[1] * x[1]).powi(2) + x[2] * x[2];
            assert!((n4 - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn monte_carlo_is_mode_independent() {
        let f = |x: &[f64]| x[0] * x[0];
        let a = sphere_monte_carlo(3, 10_000, 7, Exec::Sequential, f);
        let b = sphere_monte_carlo(3, 10_000, 7, Exec::Auto, f);
        assert_eq!(a, b);
    }
}
