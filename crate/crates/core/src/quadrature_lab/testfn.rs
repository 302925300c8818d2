//! Test functions on `n̄ = ℝ^{p+q}`: sums of polynomial × Gaussian terms
//! (closed under differentiation and under linear changes of variables), and
//! the spherical vectors.  Both expose the Taylor coefficients of
//! `r ↦ f(rX, r²Z)` at `r = 0`, which is all the radial continuation needs.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{precondition, Result};

/// Something that can be integrated against the kernels.
pub trait Integrand: Sync {
    fn dim(&self) -> usize;
    fn eval(&self, x: &[f64]) -> f64;
    /// Coefficients `c_j`, `j < order`, of `f(r·xdir, r²·zdir) = Σ c_j r^j`,
    /// where the point is `(xdir, zdir)` split after `p` coordinates.
    fn taylor_along(&self, point: &[f64], p: usize, order: usize) -> Vec<f64>;
    fn decay(&self) -> Decay;
    /// Depends only on `|X|` and `|Z|`, so reduced rules on `𝕊` are exact in
    /// the angles.
    fn is_radial(&self) -> bool {
        false
    }
    /// `f(r·xdir, r²·zdir)` in closed form as `Σ P(r)·exp(−(a₂r²+a₃r³+a₄r⁴))`,
    /// when the integrand has that shape.
    fn along(&self, _point: &[f64], _p: usize) -> Option<Vec<RayTerm>> {
        None
    }
}

/// One `P(r)·exp(−(a₂r² + a₃r³ + a₄r⁴))` summand along a ray.
#[derive(Clone, Debug)]
pub struct RayTerm {
    /// `[a₂, a₃, a₄]`
    pub exponent: [f64; 3],
    /// dense coefficients of `P`
    pub poly: Vec<f64>,
}

impl RayTerm {
    pub fn eval(&self, r: f64) -> f64 {
        let [a2, a3, a4] = self.exponent;
        let r2 = r * r;
        let p = self.poly.iter().rev().fold(0.0, |acc, c| acc * r + c);
        p * (-(r2 * (a2 + r * (a3 + r * a4)))).exp()
    }
}

/// Behaviour of `r ↦ f(rω, r²η)` at infinity, uniformly on `𝕊`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Decay {
    /// `≲ e^{−a r²}` for `r ≥ 1`
    Gaussian(f64),
    /// `≲ r^{−e}`
    Power(f64),
    None,
}

// --- truncated power series --------------------------------------------------

pub fn series_mul(a: &[f64], b: &[f64], order: usize) -> Vec<f64> {
    let mut c = vec![0.0; order];
    for (i, x) in a.iter().enumerate().take(order) {
        if *x == 0.0 {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(order - i) {
            c[i + j] += x * y;
        }
    }
    c
}

/// `exp(e(r))` for `e(0) = 0`.
pub fn series_exp(e: &[f64], order: usize) -> Vec<f64> {
    let mut y = vec![0.0; order];
    if order == 0 {
        return y;
    }
    y[0] = 1.0;
    // n y_n = Σ_k k e_k y_{n−k}
    for n in 1..order {
        let mut s = 0.0;
        for k in 1..=n.min(e.len().saturating_sub(1)) {
            s += k as f64 * e[k] * y[n - k];
        }
        y[n] = s / n as f64;
    }
    y
}

/// `P(r)^α` for `P(0) = 1`, from `P y′ = α P′ y`.
pub fn series_pow(pcoef: &[f64], alpha: f64, order: usize) -> Vec<f64> {
    let mut y = vec![0.0; order];
    if order == 0 {
        return y;
    }
    y[0] = 1.0;
    for n in 1..order {
        let mut s = 0.0;
        for k in 1..=n.min(pcoef.len().saturating_sub(1)) {
            s += (alpha * k as f64 - (n - k) as f64) * pcoef[k] * y[n - k];
        }
        y[n] = s / n as f64;
    }
    y
}

// --- polynomial × Gaussian ---------------------------------------------------

/// `P(x) · exp(−xᵀAx)`, `P` sparse with `f64` coefficients.
#[derive(Clone, Debug)]
pub struct GaussianTerm {
    pub form: DMatrix<f64>,
    pub poly: Vec<(f64, Vec<u32>)>,
}

#[derive(Clone, Debug)]
pub struct TestFunction {
    pub dim: usize,
    pub terms: Vec<GaussianTerm>,
}

fn mono_eval(e: &[u32], x: &[f64]) -> f64 {
    e.iter().zip(x).map(|(&k, v)| v.powi(k as i32)).product()
}

impl TestFunction {
    /// `exp(−Σ a_i x_i²)`.
    pub fn gaussian(rates: &[f64]) -> Result<Self> {
        if rates.iter().any(|a| *a <= 0.0) {
            return precondition("Gaussian rates must be positive");
        }
        let n = rates.len();
        Ok(TestFunction {
            dim: n,
            terms: vec![GaussianTerm { form: DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(rates)), poly: vec![(1.0, vec![0; n])] }],
        })
    }

    /// Multiply by the monomial `x^e`.
    pub fn times_monomial(mut self, e: &[u32]) -> Self {
        for t in &mut self.terms {
            for (_, m) in &mut t.poly {
                for (a, b) in m.iter_mut().zip(e) {
                    *a += b;
                }
            }
        }
        self
    }

    pub fn scale(mut self, c: f64) -> Self {
        for t in &mut self.terms {
            t.poly.iter_mut().for_each(|(a, _)| *a *= c);
        }
        self
    }

    pub fn add(mut self, o: &TestFunction) -> Self {
        self.terms.extend(o.terms.iter().cloned());
        self
    }

    /// `∂_i`, using `∂_i(P e^{−xᵀAx}) = (∂_i P − 2 (Ax)_i P) e^{−xᵀAx}`.
    pub fn derivative(&self, i: usize) -> TestFunction {
        let n = self.dim;
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let mut poly = Vec::new();
                for (c, m) in &t.poly {
                    if m[i] > 0 {
                        let mut d = m.clone();
                        d[i] -= 1;
                        poly.push((c * m[i] as f64, d));
                    }
                    for j in 0..n {
                        let a = t.form[(i, j)];
                        if a != 0.0 {
                            let mut d = m.clone();
                            d[j] += 1;
                            poly.push((-2.0 * a * c, d));
                        }
                    }
                }
                GaussianTerm { form: t.form.clone(), poly }
            })
            .collect();
        TestFunction { dim: n, terms }
    }

    /// `φ ∘ M` for a linear map `x ↦ Mx` (rows of `M` given).
    pub fn compose_linear(&self, m: &[Vec<f64>]) -> TestFunction {
        let n = self.dim;
        let mm = DMatrix::from_fn(n, n, |i, j| m[i][j]);
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let form = mm.transpose() * &t.form * &mm;
                // expand each monomial Π (M x)_i^{e_i}
                let mut poly: Vec<(f64, Vec<u32>)> = Vec::new();
                for (c, e) in &t.poly {
                    let mut acc: Vec<(f64, Vec<u32>)> = vec![(*c, vec![0; n])];
                    for (i, &k) in e.iter().enumerate() {
                        for _ in 0..k {
                            let mut next = Vec::new();
                            for (a, mono) in &acc {
                                for (j, &mij) in m[i].iter().enumerate() {
                                    if mij != 0.0 {
                                        let mut d = mono.clone();
                                        d[j] += 1;
                                        next.push((a * mij, d));
                                    }
                                }
                            }
                            acc = next;
                        }
                    }
                    poly.extend(acc);
                }
                GaussianTerm { form, poly }
            })
            .collect();
        TestFunction { dim: n, terms }
    }

    /// Smallest eigenvalue over all quadratic forms.
    pub fn min_rate(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| SymmetricEigen::new(t.form.clone()).eigenvalues.min())
            .fold(f64::INFINITY, f64::min)
    }
}

impl Integrand for TestFunction {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let n = x.len();
                let mut q = 0.0;
                for j in 0..n {
                    if x[j] == 0.0 {
                        continue;
                    }
                    let col = t.form.column(j);
                    let mut acc = 0.0;
                    for i in 0..n {
                        acc += col[i] * x[i];
                    }
                    q += acc * x[j];
                }
                let p: f64 = t.poly.iter().map(|(c, e)| c * mono_eval(e, x)).sum();
                p * (-q).exp()
            })
            .sum()
    }

    fn along(&self, point: &[f64], p: usize) -> Option<Vec<RayTerm>> {
        let n = self.dim;
        let deg = |i: usize| if i < p { 1 } else { 2 };
        let out = self
            .terms
            .iter()
            .map(|t| {
                let mut ex = [0.0; 3];
                for i in 0..n {
                    for j in 0..n {
                        ex[deg(i) + deg(j) - 2] += t.form[(i, j)] * point[i] * point[j];
                    }
                }
                let mut poly = Vec::new();
                for (c, m) in &t.poly {
                    let d: usize = m.iter().enumerate().map(|(i, &k)| deg(i) * k as usize).sum();
                    if poly.len() <= d {
                        poly.resize(d + 1, 0.0);
                    }
                    poly[d] += c * mono_eval(m, point);
                }
                RayTerm { exponent: ex, poly }
            })
            .collect();
        Some(out)
    }

    fn taylor_along(&self, point: &[f64], p: usize, order: usize) -> Vec<f64> {
        let n = self.dim;
        // coordinate i scales like r^{deg_i}
        let deg = |i: usize| if i < p { 1 } else { 2 };
        let mut out = vec![0.0; order];
        for t in &self.terms {
            // −xᵀAx along the curve: degrees 2, 3, 4
            let mut e = vec![0.0; 5.min(order.max(1))];
            for i in 0..n {
                for j in 0..n {
                    let d = deg(i) + deg(j);
                    if d < e.len() {
                        e[d] -= t.form[(i, j)] * point[i] * point[j];
                    }
                }
            }
            let ex = series_exp(&e, order);
            let mut pc = vec![0.0; order];
            for (c, m) in &t.poly {
                let d: usize = m.iter().enumerate().map(|(i, &k)| deg(i) * k as usize).sum();
                if d < order {
                    pc[d] += c * mono_eval(m, point);
                }
            }
            for (o, v) in out.iter_mut().zip(series_mul(&pc, &ex, order)) {
                *o += v;
            }
        }
        out
    }

    fn decay(&self) -> Decay {
        // on 𝕊, r²|ω|² + r⁴|η|² = r²x² + r⁴(1−x⁴) ≥ r² once r ≥ 1
        Decay::Gaussian(self.min_rate())
    }
}

/// `((1 + |X|²)² + |Z|²)^{−c}`: the spherical vector `1_λ` for `c = (λ+ρ)/2`
/// (on `n̄`, `p` = number of `X` coordinates) or `1′_ν` on `n̄′`.
#[derive(Clone, Debug)]
pub struct SphericalVector {
    pub p: usize,
    pub q: usize,
    pub c: f64,
}

impl Integrand for SphericalVector {
    fn dim(&self) -> usize {
        self.p + self.q
    }

    fn eval(&self, x: &[f64]) -> f64 {
        let x2: f64 = x[..self.p].iter().map(|v| v * v).sum();
        let z2: f64 = x[self.p..].iter().map(|v| v * v).sum();
        ((1.0 + x2).powi(2) + z2).powf(-self.c)
    }

    fn taylor_along(&self, point: &[f64], p: usize, order: usize) -> Vec<f64> {
        debug_assert_eq!(p, self.p);
        let x2: f64 = point[..p].iter().map(|v| v * v).sum();
        let z2: f64 = point[p..].iter().map(|v| v * v).sum();
        // 1 + 2|x|² r² + (|x|⁴ + |z|²) r⁴
        series_pow(&[1.0, 0.0, 2.0 * x2, 0.0, x2 * x2 + z2], -self.c, order)
    }

    fn decay(&self) -> Decay {
        Decay::Power(4.0 * self.c)
    }

    fn is_radial(&self) -> bool {
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn taylor_matches_evaluation() {
        let f = TestFunction::gaussian(&[1.0, 0.5, 2.0]).unwrap().times_monomial(&[1, 0, 1]);
        let pt = [0.3, -0.4, 0.7];
        let c = f.taylor_along(&pt, 2, 30);
        let r: f64 = 0.4;
        let series: f64 = c.iter().enumerate().map(|(j, c)| c * r.powi(j as i32)).sum();
        let direct = f.eval(&[r * pt[0], r * pt[1], r * r * pt[2]]);
        assert_relative_eq!(series, direct, max_relative = 1e-12);
        let s = SphericalVector { p: 2, q: 1, c: 1.3 };
        let c = s.taylor_along(&pt, 2, 60);
        let series: f64 = c.iter().enumerate().map(|(j, c)| c * r.powi(j as i32)).sum();
        assert_relative_eq!(series, s.eval(&[r * pt[0], r * pt[1], r * r * pt[2]]), max_relative = 1e-12);
    }

    #[test]
    fn ray_form_matches_evaluation() {
        let f = TestFunction::gaussian(&[1.0, 0.5, 2.0])
            .unwrap()
            .times_monomial(&[1, 0, 1])
            .compose_linear(&[vec![1.0, 0.0, 0.3], vec![0.2, 1.0, 0.0], vec![0.0, 0.1, 1.0]]);
        let pt = [0.3, -0.4, 0.7];
        for r in [0.2, 1.0, 2.7] {
            let ray: f64 = f.along(&pt, 2).unwrap().iter().map(|t| t.eval(r)).sum();
            assert_relative_eq!(ray, f.eval(&[r * pt[0], r * pt[1], r * r * pt[2]]), max_relative = 1e-12);
        }
    }

    #[test]
    fn derivative_by_finite_difference() {
        let f = TestFunction::gaussian(&[1.0, 0.7]).unwrap().times_monomial(&[2, 1]);
        let g = f.derivative(0);
        let x = [0.3, 0.8];
        let h = 1e-6;
        let fd = (f.eval(&[x[0] + h, x[1]]) - f.eval(&[x[0] - h, x[1]])) / (2.0 * h);
        assert_relative_eq!(g.eval(&x), fd, max_relative = 1e-7);
    }

    #[test]
    fn composition_is_pullback() {
        let f = TestFunction::gaussian(&[1.0, 2.0]).unwrap().times_monomial(&[1, 2]);
        let (c, s) = (0.6f64, 0.8f64);
        let m = vec![vec![c, -s], vec![s, c]];
        let g = f.compose_linear(&m);
        let x = [0.2, -0.9];
        let mx = [c * x[0] - s * x[1], s * x[0] + c * x[1]];
        assert_relative_eq!(g.eval(&x), f.eval(&mx), max_relative = 1e-12);
    }
}
