//! Group-pair data, derived dimensions, lattice predicates and multiplicities.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypercomplex::{Algebra, HNum};
use crate::rat::{as_i64, parse_q, q, qi, Q};

/// The compact factor `F < U(n−m; F)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FCase {
    FullUnitary,
    Trivial,
    /// `U(1)` embedded in `Sp(1)` along a unit imaginary quaternion `U`.
    U1Direction([Q; 3]),
    TransitiveOther,
}

impl FCase {
    pub fn parse(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        match t.as_str() {
            "full" | "fullunitary" | "full_unitary" => return Ok(FCase::FullUnitary),
            "trivial" => return Ok(FCase::Trivial),
            "transitive" | "transitiveother" | "transitive_other" => return Ok(FCase::TransitiveOther),
            "u1" | "u1(i)" => return Ok(FCase::U1Direction([qi(1), qi(0), qi(0)])),
            "u1(j)" => return Ok(FCase::U1Direction([qi(0), qi(1), qi(0)])),
            "u1(k)" => return Ok(FCase::U1Direction([qi(0), qi(0), qi(1)])),
            _ => {}
        }
        // u1(a,b,c) with rational entries
        if let Some(inner) = t.strip_prefix("u1(").and_then(|r| r.strip_suffix(')')) {
            let parts: Vec<&str> = inner.split(',').collect();
            if parts.len() == 3 {
                let u = [parse_q(parts[0])?, parse_q(parts[1])?, parse_q(parts[2])?];
                return Ok(FCase::U1Direction(u));
            }
        }
        Err(Error::Parse(format!("unknown F case '{s}'")))
    }

    pub fn label(&self) -> String {
        match self {
            FCase::FullUnitary => "full".into(),
            FCase::Trivial => "trivial".into(),
            FCase::TransitiveOther => "transitive".into(),
            FCase::U1Direction(u) => format!(
                "u1({},{},{})",
                crate::rat::fmt_q(&u[0]),
                crate::rat::fmt_q(&u[1]),
                crate::rat::fmt_q(&u[2])
            ),
        }
    }

    /// `U` as a quaternion, if this is a `U(1)` direction.
    pub fn direction(&self) -> Option<HNum> {
        match self {
            FCase::U1Direction(u) => Some(HNum { alg: Algebra::H, c: vec![Q::zero(), u[0].clone(), u[1].clone(), u[2].clone()] }),
            _ => None,
        }
    }
}

/// Serialized form: `{algebra:"H", n:1, m:0, f:"trivial"}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub algebra: String,
    pub n: i64,
    pub m: i64,
    #[serde(default = "default_f")]
    pub f: String,
}

fn default_f() -> String {
    "trivial".into()
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PairConfig {
    pub alg: Algebra,
    pub n: usize,
    pub m: usize,
    pub f: FCase,
    pub p: usize,
    pub q: usize,
    pub p1: usize,
    pub p2: usize,
    pub rho: Q,
    pub rho1: Q,
}

impl PairConfig {
    pub fn new(alg: Algebra, n: usize, m: usize, f: FCase) -> Result<Self> {
        if alg == Algebra::R {
            return Err(Error::InvalidConfig("the real field has no H-type structure".into()));
        }
        if n == 0 {
            return Err(Error::InvalidConfig("n must be positive".into()));
        }
        if m >= n {
            return Err(Error::InvalidConfig(format!("need 0 <= m < n, got m={m}, n={n}")));
        }
        if alg == Algebra::O && (n != 1 || m != 0) {
            return Err(Error::InvalidConfig("octonions require n=1, m=0".into()));
        }
        if let FCase::U1Direction(u) = &f {
            if alg != Algebra::H {
                return Err(Error::InvalidConfig("U(1) direction is only defined for quaternions".into()));
            }
            let n2: Q = u.iter().map(|x| x * x).sum();
            if !n2.is_one() {
                return Err(Error::InvalidConfig("U(1) direction must be a unit vector".into()));
            }
        }
        let d = alg.dim();
        let p = n * d;
        let q = d - 1;
        let p1 = m * d;
        let cfg = PairConfig {
            alg,
            n,
            m,
            f,
            p,
            q,
            p1,
            p2: p - p1,
            rho: Q::new(((p + 2 * q) as i64).into(), 2.into()),
            rho1: Q::new(((p1 + 2 * q) as i64).into(), 2.into()),
        };
        Ok(cfg)
    }

    pub fn from_raw(raw: &RawConfig) -> Result<Self> {
        if raw.n < 1 || raw.m < 0 {
            return Err(Error::InvalidConfig("n must be positive and m nonnegative".into()));
        }
        Self::new(Algebra::from_tag(&raw.algebra)?, raw.n as usize, raw.m as usize, FCase::parse(&raw.f)?)
    }

    pub fn to_raw(&self) -> RawConfig {
        RawConfig { algebra: self.alg.tag().into(), n: self.n as i64, m: self.m as i64, f: self.f.label() }
    }

    /// Number of real coordinates of `n̄`.
    pub fn nvars(&self) -> usize {
        self.p + self.q
    }

    pub fn label(&self) -> String {
        format!("({},{},{},{})", self.alg.tag(), self.n, self.m, self.f.label())
    }

    /// `U(1;F) × F` transitive on the unit sphere of `F^{n−m}`.
    pub fn is_strongly_spherical(&self) -> bool {
        match self.alg {
            Algebra::O => true,
            Algebra::R => false,
            Algebra::C | Algebra::H => {
                if self.n - self.m == 1 {
                    return true;
                }
                matches!(self.f, FCase::FullUnitary | FCase::TransitiveOther)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamPoint {
    pub lambda: Q,
    pub nu: Q,
}

impl ParamPoint {
    pub fn new(lambda: Q, nu: Q) -> Self {
        ParamPoint { lambda, nu }
    }

    pub fn ints(l: i64, n: i64) -> Self {
        ParamPoint { lambda: qi(l), nu: qi(n) }
    }

    /// From doubled coordinates `(2λ, 2ν)`.
    pub fn halves(l2: i64, n2: i64) -> Self {
        ParamPoint { lambda: q(l2, 2), nu: q(n2, 2) }
    }

    pub fn parse(l: &str, n: &str) -> Result<Self> {
        Ok(ParamPoint { lambda: parse_q(l)?, nu: parse_q(n)? })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeFlags {
    pub in_slash_set: bool,
    pub in_backslash_set: bool,
    #[serde(rename = "in_X")]
    pub in_x: bool,
    #[serde(rename = "in_L")]
    pub in_l: bool,
    #[serde(rename = "in_S1")]
    pub in_s1: bool,
    #[serde(rename = "in_S2")]
    pub in_s2: bool,
    #[serde(rename = "in_S3")]
    pub in_s3: bool,
    pub k: Option<i64>,
    pub l: Option<i64>,
}

/// `x ∈ −2ℤ≥0` ⇒ `Some(−x/2)`
fn neg_even(x: &Q) -> Option<i64> {
    let v = as_i64(x)?;
    (v <= 0 && v % 2 == 0).then_some(-v / 2)
}

/// If `λ = −ρ+q−1−2i` with `i ≥ 0`, return `i`.
fn lambda_index(cfg: &PairConfig, lambda: &Q) -> Option<i64> {
    let base = -cfg.rho.clone() + qi(cfg.q as i64 - 1);
    neg_even(&(lambda - base))
}

/// Membership in the `m = 0` lattice in the form `±(ρ′ − q + 1 + 2j)`; this
/// must agree with the `±(1+2j)` form because `ρ′ = q` when `m = 0`.
fn m0_l_alt(cfg: &PairConfig, i: i64, nu: &Q) -> bool {
    let base = cfg.rho1.clone() - qi(cfg.q as i64) + Q::one();
    [nu.clone(), -nu.clone()].iter().any(|v| {
        as_i64(&(v - &base)).is_some_and(|d| d >= 0 && d % 2 == 0 && d / 2 <= i)
    })
}

pub fn lattice_flags(cfg: &PairConfig, pt: &ParamPoint) -> LatticeFlags {
    let (lam, nu) = (&pt.lambda, &pt.nu);
    let k = neg_even(&(lam + &cfg.rho - nu - &cfg.rho1));
    let l = neg_even(&(lam + &cfg.rho + nu - &cfg.rho1));
    let mut f = LatticeFlags { in_slash_set: k.is_some(), in_backslash_set: l.is_some(), k, l, ..Default::default() };
    f.in_x = f.in_slash_set && f.in_backslash_set;
    let Some(i) = lambda_index(cfg, lam) else {
        return f;
    };
    if cfg.m > 0 {
        let base = -cfg.rho1.clone() + qi(cfg.q as i64 - 1);
        f.in_l = neg_even(&(nu - base)).is_some_and(|j| j <= i);
    } else {
        let a = as_i64(nu).is_some_and(|v| {
            let w = v.abs();
            w % 2 == 1 && (w - 1) / 2 <= i
        });
        assert_eq!(a, m0_l_alt(cfg, i, nu), "the two m=0 descriptions of L disagree");
        f.in_l = a;
    }
    // S₁: ν = ρ′ + 2j, 0 ≤ j ≤ i
    let d = nu - &cfg.rho1;
    f.in_s1 = as_i64(&d).is_some_and(|v| v >= 0 && v % 2 == 0 && v / 2 <= i);
    f.in_s2 = as_i64(&d) == Some(2 * i);
    f.in_s3 = i == 0 && d.is_zero();
    f
}

/// `dim Hom_{G′}(π_λ|G′, τ_ν)`.
pub fn multiplicity(cfg: &PairConfig, pt: &ParamPoint) -> Result<u32> {
    if !cfg.is_strongly_spherical() {
        return Err(Error::InvalidConfig(format!("{} is not strongly spherical", cfg.label())));
    }
    let fl = lattice_flags(cfg, pt);
    let one_h_sp12 = cfg.alg == Algebra::H && cfg.n == 1 && cfg.m == 0;
    if cfg.alg == Algebra::C && cfg.m == 0 && fl.in_s1 {
        return Ok(3);
    }
    if one_h_sp12 && cfg.f == FCase::Trivial && fl.in_s2 {
        let d = &pt.nu - &cfg.rho1;
        let i = as_i64(&d).unwrap() / 2;
        return Ok((2 * i + 4) as u32);
    }
    if one_h_sp12 && matches!(cfg.f, FCase::U1Direction(_)) && fl.in_s3 {
        return Ok(2);
    }
    Ok(if fl.in_l { 2 } else { 1 })
}

/// `π_λ` irreducible iff `λ ∉ ±(ρ − q + 1 + 2ℤ≥0)`.
pub fn irreducible(cfg: &PairConfig, lambda: &Q) -> bool {
    let base = cfg.rho.clone() - qi(cfg.q as i64) + Q::one();
    ![lambda.clone(), -lambda.clone()]
        .iter()
        .any(|v| as_i64(&(v - &base)).is_some_and(|d| d >= 0 && d % 2 == 0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(alg: Algebra, n: usize, m: usize) -> PairConfig {
        PairConfig::new(alg, n, m, FCase::Trivial).unwrap()
    }

    #[test]
    fn derived_dims() {
        let c = cfg(Algebra::H, 1, 0);
        assert_eq!((c.p, c.q, c.rho.clone(), c.rho1.clone()), (4, 3, qi(5), qi(3)));
        let c = cfg(Algebra::C, 2, 1);
        assert_eq!((c.p, c.q, c.p1, c.rho.clone(), c.rho1.clone()), (4, 1, 2, qi(3), qi(2)));
        let c = cfg(Algebra::O, 1, 0);
        assert_eq!((c.p, c.q, c.rho.clone(), c.rho1.clone()), (8, 7, qi(11), qi(7)));
        assert!(PairConfig::new(Algebra::O, 2, 0, FCase::Trivial).is_err());
        assert!(PairConfig::new(Algebra::C, 2, 2, FCase::Trivial).is_err());
    }

    #[test]
    fn sphericity_table() {
        assert!(cfg(Algebra::H, 2, 1).is_strongly_spherical());
        assert!(!cfg(Algebra::H, 3, 1).is_strongly_spherical());
        assert!(PairConfig::new(Algebra::C, 2, 1, FCase::FullUnitary).unwrap().is_strongly_spherical());
    }

    #[test]
    fn flags_examples() {
        let c = cfg(Algebra::C, 2, 1);
        let f = lattice_flags(&c, &ParamPoint::ints(-3, -2));
        assert!(f.in_slash_set && f.in_backslash_set && f.in_x && f.in_l);
        let h = cfg(Algebra::H, 1, 0);
        let f = lattice_flags(&h, &ParamPoint::ints(-5, 5));
        assert!(f.in_s2 && !f.in_l);
        for c in [cfg(Algebra::C, 1, 0), c, h] {
            let f = lattice_flags(&c, &ParamPoint::ints(0, 0));
            assert!(!(f.in_slash_set || f.in_backslash_set || f.in_l || f.in_s1 || f.in_s2 || f.in_s3));
        }
    }

    #[test]
    fn multiplicity_examples() {
        let h = cfg(Algebra::H, 1, 0);
        assert_eq!(multiplicity(&h, &ParamPoint::ints(-5, 5)).unwrap(), 6);
        let c = cfg(Algebra::C, 2, 1);
        assert_eq!(multiplicity(&c, &ParamPoint::ints(0, 0)).unwrap(), 1);
        assert_eq!(multiplicity(&c, &ParamPoint::ints(-3, -2)).unwrap(), 2);
        assert!(multiplicity(&cfg(Algebra::H, 3, 1), &ParamPoint::ints(0, 0)).is_err());
    }

    #[test]
    fn irreducibility() {
        let c = cfg(Algebra::C, 2, 1);
        assert!(irreducible(&c, &qi(0)));
        assert!(!irreducible(&c, &qi(3)));
        assert!(!irreducible(&cfg(Algebra::H, 1, 0), &qi(-3)));
    }
}
