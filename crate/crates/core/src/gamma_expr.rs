//! Formal products `r · π^{j/2} · 2^{a(λ,ν)} · Π Γ(a + bλ + cν)^e` with
//! factor-wise pole/zero bookkeeping and exact evaluation at (half-)integers.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{precondition, Result};
use crate::pair_config::{lattice_flags, PairConfig, ParamPoint};
use crate::rat::{as_i64, factorial, fmt_q, is_half_int, pow2, q, qi, to_f64, Q};

/// `c + l·λ + n·ν`
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Affine {
    pub c: Q,
    pub l: Q,
    pub n: Q,
}

impl Affine {
    pub fn new(c: Q, l: Q, n: Q) -> Self {
        Affine { c, l, n }
    }

    pub fn zero() -> Self {
        Affine::constant(Q::zero())
    }

    pub fn constant(c: Q) -> Self {
        Affine { c, l: Q::zero(), n: Q::zero() }
    }

    pub fn eval(&self, pt: &ParamPoint) -> Q {
        &self.c + &self.l * &pt.lambda + &self.n * &pt.nu
    }

    fn slope(&self, dir: &(Q, Q)) -> Q {
        &self.l * &dir.0 + &self.n * &dir.1
    }

    pub fn add(&self, o: &Affine) -> Affine {
        Affine { c: &self.c + &o.c, l: &self.l + &o.l, n: &self.n + &o.n }
    }

    pub fn scale(&self, s: &Q) -> Affine {
        Affine { c: &self.c * s, l: &self.l * s, n: &self.n * s }
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_zero() && self.l.is_zero() && self.n.is_zero()
    }
}

impl fmt::Display for Affine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = fmt_q(&self.c);
        for (coef, sym) in [(&self.l, "λ"), (&self.n, "ν")] {
            if coef.is_zero() {
                continue;
            }
            let sign = if coef.is_negative() { "-" } else { "+" };
            s.push_str(&format!("{sign}{}{sym}", fmt_q(&coef.abs())));
        }
        f.write_str(&s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GammaExpr {
    pub prefactor: Q,
    pub pi_half_power: i64,
    pub two_power: Affine,
    pub factors: Vec<(Affine, i32)>,
}

/// Exact `r · π^{j/2}` or a float.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Exact { rat: Q, pi_half: i64 },
    Numeric(f64),
}

impl Value {
    pub fn to_f64(&self) -> f64 {
        match self {
            Value::Exact { rat, pi_half } => to_f64(rat) * std::f64::consts::PI.powf(*pi_half as f64 / 2.0),
            Value::Numeric(x) => *x,
        }
    }

    fn mul(self, o: Value) -> Value {
        match (self, o) {
            (Value::Exact { rat: a, pi_half: i }, Value::Exact { rat: b, pi_half: j }) => {
                Value::Exact { rat: a * b, pi_half: i + j }
            }
            (a, b) => Value::Numeric(a.to_f64() * b.to_f64()),
        }
    }

    fn powi(self, e: i32) -> Value {
        match self {
            Value::Exact { rat, pi_half } => {
                let mut r = Q::one();
                for _ in 0..e.unsigned_abs() {
                    r *= &rat;
                }
                if e < 0 {
                    r = r.recip();
                }
                Value::Exact { rat: r, pi_half: pi_half * e as i64 }
            }
            Value::Numeric(x) => Value::Numeric(x.powi(e)),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrderedValue {
    /// negative = pole order, positive = zero order
    pub order: i32,
    /// Leading Laurent coefficient along the evaluation direction; `None` if
    /// some pole factor is constant along that direction.
    pub leading: Option<Value>,
}

impl OrderedValue {
    /// The value, when finite and nonzero.
    pub fn value(&self) -> Option<&Value> {
        if self.order == 0 {
            self.leading.as_ref()
        } else {
            None
        }
    }
}

/// Generic direction used for one-parameter Laurent expansions.
pub fn default_direction() -> (Q, Q) {
    (qi(1), q(1, 7))
}

/// `Γ(x)` exactly, for `x` a non-pole half-integer.
pub fn gamma_exact(x: &Q) -> Option<Value> {
    if !is_half_int(x) {
        return None;
    }
    if let Some(n) = as_i64(x) {
        if n <= 0 {
            return None;
        }
        return Some(Value::Exact { rat: factorial(n as u64 - 1), pi_half: 0 });
    }
    // x = n + 1/2
    let n = as_i64(&(x - q(1, 2))).unwrap();
    let rat = if n >= 0 {
        let n = n as u64;
        factorial(2 * n) / (pow2(2 * n as i64) * factorial(n))
    } else {
        let n = (-n) as u64;
        let sign = if n % 2 == 0 { qi(1) } else { qi(-1) };
        sign * pow2(2 * n as i64) * factorial(n) / factorial(2 * n)
    };
    Some(Value::Exact { rat, pi_half: 1 })
}

pub fn gamma_f64(x: f64) -> f64 {
    statrs::function::gamma::gamma(x)
}

impl GammaExpr {
    pub fn constant(r: Q) -> Self {
        GammaExpr { prefactor: r, pi_half_power: 0, two_power: Affine::zero(), factors: vec![] }
    }

    pub fn one() -> Self {
        Self::constant(Q::one())
    }

    pub fn with_pi_half(mut self, j: i64) -> Self {
        self.pi_half_power += j;
        self
    }

    pub fn with_two_power(mut self, a: Affine) -> Self {
        self.two_power = self.two_power.add(&a);
        self
    }

    /// Multiply by `Γ(a)^e`.
    pub fn gamma(mut self, a: Affine, e: i32) -> Self {
        self.factors.push((a, e));
        self.canonical()
    }

    pub fn mul(&self, o: &GammaExpr) -> GammaExpr {
        let mut r = self.clone();
        r.prefactor *= &o.prefactor;
        r.pi_half_power += o.pi_half_power;
        r.two_power = r.two_power.add(&o.two_power);
        r.factors.extend(o.factors.iter().cloned());
        r.canonical()
    }

    pub fn recip(&self) -> GammaExpr {
        GammaExpr {
            prefactor: self.prefactor.recip(),
            pi_half_power: -self.pi_half_power,
            two_power: self.two_power.scale(&qi(-1)),
            factors: self.factors.iter().map(|(a, e)| (a.clone(), -e)).collect(),
        }
    }

    /// Merge identical arguments, drop zero exponents, sort.
    pub fn canonical(mut self) -> Self {
        let mut m: BTreeMap<Affine, i32> = BTreeMap::new();
        for (a, e) in self.factors.drain(..) {
            *m.entry(a).or_insert(0) += e;
        }
        self.factors = m.into_iter().filter(|(_, e)| *e != 0).collect();
        self
    }

    pub fn order_at(&self, pt: &ParamPoint) -> i32 {
        self.factors
            .iter()
            .map(|(a, e)| match as_i64(&a.eval(pt)) {
                Some(v) if v <= 0 => -e,
                _ => 0,
            })
            .sum()
    }

    pub fn value_at(&self, pt: &ParamPoint) -> OrderedValue {
        self.value_along(pt, &default_direction())
    }

    pub fn value_along(&self, pt: &ParamPoint, dir: &(Q, Q)) -> OrderedValue {
        let mut order = 0;
        let mut val = Value::Exact { rat: self.prefactor.clone(), pi_half: self.pi_half_power };
        let mut defined = true;
        let t = self.two_power.eval(pt);
        val = val.mul(match as_i64(&t) {
            Some(e) => Value::Exact { rat: pow2(e), pi_half: 0 },
            None => Value::Numeric(2f64.powf(to_f64(&t))),
        });
        for (a, e) in &self.factors {
            let x = a.eval(pt);
            match as_i64(&x) {
                Some(v) if v <= 0 => {
                    // Γ(−n + σε) ≈ (−1)^n / (n! σ ε)
                    order -= e;
                    let s = a.slope(dir);
                    if s.is_zero() {
                        defined = false;
                        continue;
                    }
                    let n = (-v) as u64;
                    let sign = if n % 2 == 0 { qi(1) } else { qi(-1) };
                    let res = sign / (factorial(n) * s);
                    val = val.mul(Value::Exact { rat: res, pi_half: 0 }.powi(*e));
                }
                _ => {
                    let g = gamma_exact(&x).unwrap_or_else(|| Value::Numeric(gamma_f64(to_f64(&x))));
                    val = val.mul(g.powi(*e));
                }
            }
        }
        OrderedValue { order, leading: defined.then_some(val) }
    }

    /// Purely numeric evaluation at a real point (no pole handling).
    pub fn eval_f64(&self, lambda: f64, nu: f64) -> f64 {
        let ev = |a: &Affine| to_f64(&a.c) + to_f64(&a.l) * lambda + to_f64(&a.n) * nu;
        let mut v = to_f64(&self.prefactor)
            * std::f64::consts::PI.powf(self.pi_half_power as f64 / 2.0)
            * 2f64.powf(ev(&self.two_power));
        for (a, e) in &self.factors {
            v *= gamma_f64(ev(a)).powi(*e);
        }
        v
    }

    /// Apply `Γ(z)Γ(z+½) = √π 2^{1−2z} Γ(2z)` until no matched pair remains.
    pub fn duplication_reduce(&self) -> GammaExpr {
        let mut e = self.clone().canonical();
        'outer: loop {
            for i in 0..e.factors.len() {
                for j in 0..e.factors.len() {
                    let (z, ez) = e.factors[i].clone();
                    let (w, ew) = e.factors[j].clone();
                    if i == j || w != z.add(&Affine::constant(q(1, 2))) || ez.signum() != ew.signum() {
                        continue;
                    }
                    let t = if ez > 0 { ez.min(ew) } else { ez.max(ew) };
                    e.factors[i].1 -= t;
                    e.factors[j].1 -= t;
                    e.factors.push((z.scale(&qi(2)), t));
                    e.pi_half_power += t as i64;
                    let two = Affine::constant(qi(1)).add(&z.scale(&qi(-2)));
                    e.two_power = e.two_power.add(&two.scale(&qi(t as i64)));
                    e = e.canonical();
                    continue 'outer;
                }
            }
            return e;
        }
    }
}

impl fmt::Display for GammaExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) * pi^({}/2)", fmt_q(&self.prefactor), self.pi_half_power)?;
        if !self.two_power.is_zero() {
            write!(f, " * 2^({})", self.two_power)?;
        }
        for (a, e) in &self.factors {
            write!(f, " * Γ({a})^{e}")?;
        }
        Ok(())
    }
}

fn half(x: &Q) -> Q {
    x / qi(2)
}

/// `(λ+ρ−ν−ρ′)/2`
fn slash_arg(cfg: &PairConfig) -> Affine {
    Affine::new(half(&(&cfg.rho - &cfg.rho1)), q(1, 2), q(-1, 2))
}

/// `(λ+ρ+ν−ρ′)/2`
fn backslash_arg(cfg: &PairConfig) -> Affine {
    Affine::new(half(&(&cfg.rho - &cfg.rho1)), q(1, 2), q(1, 2))
}

/// `1 / (Γ((λ+ρ−ν−ρ′)/2) Γ((λ+ρ+ν−ρ′)/2))`, the normalization of `u^A`.
pub fn ua_normalization(cfg: &PairConfig) -> GammaExpr {
    GammaExpr::one().gamma(slash_arg(cfg), -1).gamma(backslash_arg(cfg), -1)
}

/// `(2ν+p′+2)/4`
fn x_arg(cfg: &PairConfig) -> Affine {
    Affine::new(q(cfg.p1 as i64 + 2, 4), qi(0), q(1, 2))
}

pub fn c_b(cfg: &PairConfig, pt: &ParamPoint) -> Result<GammaExpr> {
    let Some(l) = lattice_flags(cfg, pt).l else {
        return precondition("c^B needs a point with λ+ρ+ν−ρ′ ∈ −2ℤ≥0");
    };
    let p1 = cfg.p1 as i64;
    Ok(if cfg.m > 0 && 2 * l <= p1 {
        GammaExpr::one().gamma(slash_arg(cfg), -1)
    } else if cfg.m > 0 {
        let fl = (2 * l - p1 + 2).div_euclid(4);
        GammaExpr::one()
            .gamma(x_arg(cfg), 1)
            .gamma(x_arg(cfg).add(&Affine::constant(qi(fl))), -1)
            .gamma(slash_arg(cfg), -1)
    } else {
        GammaExpr::one().gamma(Affine::new(qi(-(l / 2)), qi(0), q(-1, 2)), -1)
    })
}

fn sign(k: i64) -> Q {
    if k % 2 == 0 {
        qi(1)
    } else {
        qi(-1)
    }
}

/// Constant relating `u^A` and `u^C` on `//`.
pub fn residue_constant_ac(cfg: &PairConfig, pt: &ParamPoint) -> Result<GammaExpr> {
    let Some(k) = lattice_flags(cfg, pt).k else {
        return precondition("residue constant A/C needs a point with λ+ρ−ν−ρ′ ∈ −2ℤ≥0");
    };
    let base = GammaExpr::constant(sign(k) * factorial(k as u64))
        .with_pi_half((cfg.p + cfg.q) as i64)
        .gamma(Affine::new(half(&cfg.rho1), qi(0), q(1, 2)), -1);
    let p1 = cfg.p1 as i64;
    Ok(if cfg.m > 0 {
        base.gamma(Affine::new(q(p1, 4), qi(0), q(1, 2)), 1).gamma(Affine::new(q(p1, 2), qi(0), qi(1)), -1)
    } else {
        base.mul(&GammaExpr::constant(pow2(-k)))
            .gamma(Affine::new(qi(-(k / 2)), qi(0), q(1, 2)), 1)
            .gamma(Affine::new(qi(-k), qi(0), qi(1)), -1)
    })
}

/// Constant relating `u^A` and `u^B` on `\\`.  For `m = 0` both displayed
/// forms of the correction are built and checked to agree at `pt`.
pub fn residue_constant_ab(cfg: &PairConfig, pt: &ParamPoint) -> Result<GammaExpr> {
    let Some(l) = lattice_flags(cfg, pt).l else {
        return precondition("residue constant A/B needs a point with λ+ρ+ν−ρ′ ∈ −2ℤ≥0");
    };
    let p1 = cfg.p1 as i64;
    let p2h = (cfg.p2 / 2) as i64;
    let base = GammaExpr::constant(sign(l) * pow2(-l))
        .with_pi_half(cfg.p2 as i64)
        .gamma(Affine::constant(qi(p2h + l)), -1);
    Ok(if cfg.m > 0 && 2 * l <= p1 {
        base
    } else if cfg.m > 0 {
        let fl = (2 * l - p1 + 2).div_euclid(4);
        base.gamma(x_arg(cfg).add(&Affine::constant(qi(fl))), 1).gamma(x_arg(cfg), -1)
    } else {
        let num = Affine::new(qi(-(l / 2)), qi(0), q(-1, 2));
        let a = base.clone().gamma(num.clone(), 1).gamma(Affine::new(qi(-l), qi(0), qi(-1)), -1);
        let b = base.gamma(num, 1).gamma(slash_arg(cfg), -1);
        debug_assert_eq!(a.value_along(pt, &(qi(-1), qi(1))), b.value_along(pt, &(qi(-1), qi(1))));
        a
    })
}

/// `∫ N^{−2(ν+ρ′)}|X″|^{λ−ρ+ν+ρ′} 1_λ` (convergent for `|ν| < λ + p″/2`).
pub fn spherical_integral(cfg: &PairConfig) -> GammaExpr {
    GammaExpr::one()
        .with_pi_half((cfg.p + cfg.q) as i64)
        .gamma(Affine::new(q(cfg.p as i64, 4), q(1, 2), qi(0)), 1)
        .gamma(slash_arg(cfg), 1)
        .gamma(backslash_arg(cfg), 1)
        .gamma(Affine::constant(q(cfg.p2 as i64, 2)), -1)
        .gamma(Affine::new(q(cfg.p as i64, 2), qi(1), qi(0)), -1)
        .gamma(Affine::new(half(&cfg.rho), q(1, 2), qi(0)), -1)
}

/// `A_{λ,ν} 1_λ = (this) · 1′_ν`.
pub fn spherical_action_a(cfg: &PairConfig) -> GammaExpr {
    spherical_integral(cfg).mul(&ua_normalization(cfg)).canonical()
}

/// `T_λ 1_λ = (this) · 1_{−λ}`; also the constant of `A_{λ,ν} ∘ T_{−λ}`.
pub fn ks_constant(cfg: &PairConfig) -> GammaExpr {
    GammaExpr::one()
        .with_pi_half((cfg.p + cfg.q) as i64)
        .gamma(Affine::new(q(cfg.p as i64, 4), q(1, 2), qi(0)), 1)
        .gamma(Affine::new(q(cfg.p as i64, 2), qi(1), qi(0)), -1)
        .gamma(Affine::new(half(&cfg.rho), q(1, 2), qi(0)), -1)
}

/// `T′_ν 1′_ν = (this) · 1′_{−ν}`; also the constant of `T′_ν ∘ A_{λ,ν}`.
pub fn ks_prime_constant(cfg: &PairConfig) -> GammaExpr {
    let g = GammaExpr::one()
        .with_pi_half((cfg.p1 + cfg.q) as i64)
        .gamma(Affine::new(half(&cfg.rho1), qi(0), q(1, 2)), -1);
    if cfg.m > 0 {
        g.gamma(Affine::new(q(cfg.p1 as i64, 4), qi(0), q(1, 2)), 1)
            .gamma(Affine::new(q(cfg.p1 as i64, 2), qi(0), qi(1)), -1)
    } else {
        g
    }
}

/// `u^A_{λ,ν} = 0` iff the A/C constant vanishes on `//`; off `//` the
/// kernel is a nonzero locally integrable-type family.
pub fn ua_is_zero(cfg: &PairConfig, pt: &ParamPoint) -> bool {
    match residue_constant_ac(cfg, pt) {
        Ok(c) => c.order_at(pt) > 0,
        Err(_) => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(l: i64, n: i64) -> ParamPoint {
        ParamPoint::ints(l, n)
    }

    #[test]
    fn orders() {
        let g = GammaExpr::one().gamma(Affine::new(qi(0), qi(1), qi(0)), 1);
        assert_eq!(g.order_at(&pt(-3, 0)), -1);
        assert_eq!(g.recip().order_at(&pt(-3, 0)), 1);
    }

    #[test]
    fn exact_values() {
        let g = GammaExpr::one().gamma(Affine::constant(q(3, 2)), 1);
        assert_eq!(g.value_at(&pt(0, 0)).value(), Some(&Value::Exact { rat: q(1, 2), pi_half: 1 }));
        let g = GammaExpr::one().gamma(Affine::constant(qi(5)), 1).gamma(Affine::constant(qi(3)), -1);
        assert_eq!(g.value_at(&pt(0, 0)).value(), Some(&Value::Exact { rat: qi(12), pi_half: 0 }));
        let g = GammaExpr::one()
            .with_pi_half(3)
            .gamma(Affine::constant(q(3, 2)), 3)
            .gamma(Affine::constant(qi(3)), -1)
            .gamma(Affine::constant(qi(2)), -1);
        assert_eq!(g.value_at(&pt(0, 0)).value(), Some(&Value::Exact { rat: q(1, 16), pi_half: 6 }));
    }

    #[test]
    fn negative_half_integers() {
        // Γ(−1/2) = −2√π
        assert_eq!(gamma_exact(&q(-1, 2)), Some(Value::Exact { rat: qi(-2), pi_half: 1 }));
        for k in -6..6 {
            let x = q(2 * k + 1, 2);
            let e = gamma_exact(&x).unwrap().to_f64();
            let n = gamma_f64(to_f64(&x));
            assert!(((e - n) / n).abs() < 1e-12, "{x}: {e} vs {n}");
        }
    }

    #[test]
    fn duplication_example() {
        let z = Affine::constant(qi(1));
        let g = GammaExpr::one().gamma(z.clone(), 1).gamma(z.add(&Affine::constant(q(1, 2))), 1);
        let r = g.duplication_reduce();
        assert_eq!(r.factors.len(), 1);
        assert_eq!(r.value_at(&pt(0, 0)).value(), Some(&Value::Exact { rat: q(1, 2), pi_half: 1 }));
        let single = GammaExpr::one().gamma(Affine::new(qi(0), qi(1), qi(0)), 1);
        assert_eq!(single.duplication_reduce(), single);
    }

    #[test]
    fn display_is_canonical() {
        let g = GammaExpr::constant(q(1, 2)).with_pi_half(1).gamma(Affine::new(q(5, 2), q(1, 2), q(-1, 2)), -1);
        assert_eq!(g.to_string(), "(1/2) * pi^(1/2) * Γ(5/2+1/2λ-1/2ν)^-1");
    }
}
