//! Combinatorial identities used by the residue computations, checked as
//! exact polynomial identities.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::poly_algebra::Poly;
use crate::rat::{factorial, poch, pow2, qi, Q};

/// All `α ∈ ℤ≥0^n` with `|α| = m`, in lexicographic order.
pub fn multi_indices(n: usize, m: u32) -> Vec<Vec<u32>> {
    if n == 0 {
        return if m == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in (0..=m).rev() {
        for mut rest in multi_indices(n - 1, m - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// `(x)_k` for a polynomial `x`.
pub fn poch_poly(x: &Poly, k: u32) -> Poly {
    (0..k).fold(Poly::constant(Q::one()), |acc, t| &acc * &(x + &Poly::constant(qi(t as i64))))
}

/// Both sides of `Σ_{|α|=m} (x)_α/α! = (x₁+⋯+x_n)_m/m!` as polynomials in
/// `x₁, …, x_n`.
pub fn multi_index_sum_sides(n: usize, m: u32) -> (Poly, Poly) {
    let mut lhs = Poly::zero();
    for a in multi_indices(n, m) {
        let mut term = Poly::constant(Q::one());
        let mut den = Q::one();
        for (h, &ah) in a.iter().enumerate() {
            term = &term * &poch_poly(&Poly::var(h), ah);
            den *= factorial(ah as u64);
        }
        lhs.add_scaled(&term, &den.recip());
    }
    let sum = (0..n).fold(Poly::zero(), |acc, h| acc + Poly::var(h));
    let rhs = poch_poly(&sum, m).scale(&factorial(m as u64).recip());
    (lhs, rhs)
}

/// Checks `d^k/dt^k|₀ f(tx, t²y) = Σ_{i+2j=k} k!/(i!j!) x^i y^j ∂^{i+j}f(0,0)`
/// for every monomial `f = u^a v^b` with `a + b ≤ k`; by linearity this covers
/// all `f` (only derivatives of order `≤ k` enter either side).  Variables:
/// `x = 0`, `y = 1`, `t = 2`.
pub fn derivative_lemma_holds(k: u32) -> bool {
    let (x, y, t) = (Poly::var(0), Poly::var(1), Poly::var(2));
    let tx = &t * &x;
    let t2y = &t.pow(2) * &y;
    for a in 0..=k {
        for b in 0..=k - a {
            let f_comp = &tx.pow(a) * &t2y.pow(b);
            let mut lhs = f_comp;
            for _ in 0..k {
                lhs = lhs.derivative(2);
            }
            // evaluate at t = 0
            let lhs = lhs.substitute(&[x.clone(), y.clone(), Poly::zero()]);
            let mut rhs = Poly::zero();
            for j in 0..=k / 2 {
                let i = k - 2 * j;
                // ∂_u^i ∂_v^j (u^a v^b) at the origin
                if i == a && j == b {
                    let d = factorial(a as u64) * factorial(b as u64);
                    let c = factorial(k as u64) / (factorial(i as u64) * factorial(j as u64)) * d;
                    rhs.add_scaled(&(&x.pow(i) * &y.pow(j)), &c);
                }
            }
            if lhs != rhs {
                return false;
            }
        }
    }
    true
}

/// Coefficients of `f^{(n)}(0) / b^{−s}` for `f(x) = (x² + 2ax + b)^{−s}`,
/// keyed by `(i, j)` with `i + 2j = n`, meaning `a^i b^{−i−j}`:
/// `(−1)^{i+j} 2^i n!/(i! j!) (s)_{i+j}`.
pub fn faa_di_bruno_quadratic(s: &Q, n: u32) -> BTreeMap<(u32, u32), Q> {
    let mut out = BTreeMap::new();
    for j in 0..=n / 2 {
        let i = n - 2 * j;
        let sign = if (i + j) % 2 == 0 { qi(1) } else { qi(-1) };
        let c = sign * pow2(i as i64) * factorial(n as u64) / (factorial(i as u64) * factorial(j as u64))
            * poch(s, (i + j) as u64);
        out.insert((i, j), c);
    }
    out
}

/// Independent computation of the same coefficients from the binomial series
/// `(1+w)^{−s} = Σ_r (−1)^r (s)_r/r! w^r` with `w = (2ax + x²)/b`; variables
/// of the intermediate polynomial are `x = 0`, `a = 1`.
pub fn quadratic_series_derivative(s: &Q, n: u32) -> BTreeMap<(u32, u32), Q> {
    let (x, a) = (Poly::var(0), Poly::var(1));
    let w = &(&a * &x).scale(&qi(2)) + &x.pow(2);
    let mut out: BTreeMap<(u32, u32), Q> = BTreeMap::new();
    for r in 0..=n {
        let sign = if r % 2 == 0 { qi(1) } else { qi(-1) };
        let c = sign * poch(s, r as u64) / factorial(r as u64);
        // w^r carries b^{−r}
        for (mono, coef) in &w.pow(r).terms {
            if mono.exp(0) == n {
                let i = mono.exp(1);
                let j = r - i;
                *out.entry((i, j)).or_insert_with(Q::zero) += &c * coef * factorial(n as u64);
            }
        }
    }
    out.retain(|_, v| !v.is_zero());
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::q;

    #[test]
    fn multi_index_count() {
        assert_eq!(multi_indices(3, 2).len(), 6);
        assert_eq!(multi_indices(1, 4), vec![vec![4]]);
    }

    #[test]
    fn vandermonde_small() {
        let (l, r) = multi_index_sum_sides(2, 2);
        assert_eq!(l, r);
    }

    #[test]
    fn derivative_lemma_small() {
        assert!(derivative_lemma_holds(3));
    }

    #[test]
    fn faa_di_bruno_first_orders() {
        let s = q(5, 2);
        let f1 = faa_di_bruno_quadratic(&s, 1);
        assert_eq!(f1[&(1, 0)], -qi(5));
        for n in 0..6 {
            assert_eq!(faa_di_bruno_quadratic(&s, n), quadratic_series_derivative(&s, n));
        }
    }
}
