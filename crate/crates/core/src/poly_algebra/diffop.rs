//! Differential operators `Σ a_β(x) ∂^β` with polynomial coefficients written
//! to the left (normal ordering), their composition and the Euclidean Fourier
//! transform `x_i ↦ −∂_i`, `∂_i ↦ x_i`.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::poly::{Mono, Poly};
use crate::rat::{binom, qi, Q};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DiffOp {
    /// derivative multi-index ↦ coefficient
    pub terms: BTreeMap<Mono, Poly>,
}

impl DiffOp {
    pub fn zero() -> Self {
        DiffOp::default()
    }

    pub fn identity() -> Self {
        Self::mult(Poly::constant(Q::one()))
    }

    pub fn scalar(c: Q) -> Self {
        Self::mult(Poly::constant(c))
    }

    /// Multiplication operator.
    pub fn mult(p: Poly) -> Self {
        let mut d = DiffOp::default();
        d.add_term(Mono::one(), p);
        d
    }

    /// `∂_i`
    pub fn d(i: usize) -> Self {
        let mut d = DiffOp::default();
        d.add_term(Mono::var(i), Poly::constant(Q::one()));
        d
    }

    /// `Σ coeffs[i] ∂_i` (a vector field).
    pub fn field(coeffs: &[(usize, Poly)]) -> Self {
        let mut d = DiffOp::default();
        for (i, c) in coeffs {
            d.add_term(Mono::var(*i), c.clone());
        }
        d
    }

    pub fn add_term(&mut self, beta: Mono, c: Poly) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(beta.clone()).or_default();
        *slot = std::mem::take(slot) + c;
        if slot.is_zero() {
            self.terms.remove(&beta);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn order(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    pub fn scale(&self, s: &Q) -> DiffOp {
        let mut r = DiffOp::default();
        for (b, c) in &self.terms {
            r.add_term(b.clone(), c.scale(s));
        }
        r
    }

    /// Left multiplication by a polynomial.
    pub fn lmul(&self, p: &Poly) -> DiffOp {
        let mut r = DiffOp::default();
        for (b, c) in &self.terms {
            r.add_term(b.clone(), c * p);
        }
        r
    }

    pub fn apply(&self, f: &Poly) -> Poly {
        let mut out = Poly::default();
        for (b, c) in &self.terms {
            let d = f.derivative_multi(b);
            if !d.is_zero() {
                out = out + c * &d;
            }
        }
        out
    }

    /// Normal-ordered composition `self ∘ o`, via
    /// `∂^α b = Σ_{γ≤α} C(α,γ) (∂^γ b) ∂^{α−γ}`.
    pub fn compose(&self, o: &DiffOp) -> DiffOp {
        let mut r = DiffOp::default();
        for (alpha, a) in &self.terms {
            let subs = sub_indices(alpha);
            for (beta, b) in &o.terms {
                for gamma in &subs {
                    let db = b.derivative_multi(gamma);
                    if db.is_zero() {
                        continue;
                    }
                    let mut coef = Q::one();
                    for &(v, g) in &gamma.0 {
                        coef *= binom(alpha.exp(v as usize) as u64, g as u64);
                    }
                    let rest = alpha.div(gamma).unwrap().mul(beta);
                    r.add_term(rest, (a * &db).scale(&coef));
                }
            }
        }
        r
    }

    /// Euclidean Fourier transform with `F(x_i) = −∂_i`, `F(∂_i) = x_i`,
    /// an algebra homomorphism of the Weyl algebra.
    pub fn fourier(&self) -> DiffOp {
        let mut r = DiffOp::default();
        for (beta, coef) in &self.terms {
            let xb = DiffOp::mult(Poly::monomial(beta.clone(), Q::one()));
            for (alpha, c) in &coef.terms {
                let sign = if alpha.degree() % 2 == 0 { qi(1) } else { qi(-1) };
                let mut da = DiffOp::default();
                da.add_term(alpha.clone(), Poly::constant(c * sign));
                r = r + da.compose(&xb);
            }
        }
        r
    }
}

/// All `γ ≤ α` componentwise.
fn sub_indices(alpha: &Mono) -> Vec<Mono> {
    let mut out = vec![Vec::new()];
    for &(v, e) in &alpha.0 {
        let mut next = Vec::new();
        for base in &out {
            for g in 0..=e {
                let mut b: Vec<(u16, u16)> = base.clone();
                if g > 0 {
                    b.push((v, g));
                }
                next.push(b);
            }
        }
        out = next;
    }
    out.into_iter().map(Mono).collect()
}

impl Add for DiffOp {
    type Output = DiffOp;
    fn add(mut self, o: DiffOp) -> DiffOp {
        for (b, c) in o.terms {
            self.add_term(b, c);
        }
        self
    }
}

impl Add<&DiffOp> for &DiffOp {
    type Output = DiffOp;
    fn add(self, o: &DiffOp) -> DiffOp {
        self.clone() + o.clone()
    }
}

impl Sub for DiffOp {
    type Output = DiffOp;
    fn sub(self, o: DiffOp) -> DiffOp {
        self + o.scale(&qi(-1))
    }
}

impl Neg for DiffOp {
    type Output = DiffOp;
    fn neg(self) -> DiffOp {
        self.scale(&qi(-1))
    }
}

impl Mul for &DiffOp {
    type Output = DiffOp;
    fn mul(self, o: &DiffOp) -> DiffOp {
        self.compose(o)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn commutator_is_one() {
        let x = DiffOp::mult(Poly::var(0));
        let d = DiffOp::d(0);
        let c = d.compose(&x) - x.compose(&d);
        assert_eq!(c, DiffOp::identity());
    }

    #[test]
    fn fourier_of_euler() {
        // F(x ∂) = −∂ x = −x∂ − 1
        let e = DiffOp::d(0).lmul(&Poly::var(0));
        let f = e.fourier();
        let expect = e.scale(&qi(-1)) - DiffOp::identity();
        assert_eq!(f, expect);
    }

    #[test]
    fn fourier_is_multiplicative() {
        let a = DiffOp::d(1).lmul(&Poly::var(0).pow(2)) + DiffOp::mult(Poly::var(1));
        let b = DiffOp::d(0).compose(&DiffOp::d(0)).lmul(&Poly::var(1));
        assert_eq!(a.compose(&b).fourier(), a.fourier().compose(&b.fourier()));
    }
}
