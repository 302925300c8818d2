//! Fourier-picture solutions: the coefficient tables of `û^C`, the extra
//! complex solution `v̂^C`, the quaternionic sporadic spaces, exact
//! verification of the full system, recurrences and classification of
//! `ℂ[n̄]_{λ,ν}`.
//!
//! The `𝔳′`/`𝔷` equations use [`Variant::Transformed`]: it coincides with
//! the exact Weyl-algebra transform of the position-side system, and it is
//! the one annihilating `û^C` (the alternative display does not; see tests).

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{precondition, Error, Result};
use crate::hypercomplex::Algebra;
use crate::linalg::{nullspace, rank};
use crate::pair_config::{lattice_flags, FCase, PairConfig, ParamPoint};
use crate::poly_algebra::{
    harmonic_basis, invariant_generators, m_prime_invariance_check, m_prime_samples, substitute_p, DiffOp, Mono,
    Ops, Poly, Variant,
};
use crate::rat::{as_i64, factorial, fmt_q, poch, pow2, qi, Q};

/// `c_{h,i,j}` for `h + i + 2j = k`, monomials `|X′|^{2h}|X″|^{2i}|Z|^{2j}`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoeffTable {
    pub k: u32,
    pub entries: BTreeMap<(u32, u32, u32), Q>,
}

fn slash_k(cfg: &PairConfig, pt: &ParamPoint) -> Result<u32> {
    match lattice_flags(cfg, pt).k {
        Some(k) => Ok(k as u32),
        None => precondition("point is not on the lattice λ+ρ−ν−ρ′ ∈ −2ℤ≥0"),
    }
}

/// `Π_{t=1..j} (x − t) = Γ(x)/Γ(x−j)`
fn falling_shift(x: &Q, j: u32) -> Q {
    (1..=j).fold(Q::one(), |acc, t| acc * (x - qi(t as i64)))
}

pub fn coeff_table(cfg: &PairConfig, pt: &ParamPoint) -> Result<CoeffTable> {
    let k = slash_k(cfg, pt)?;
    let mut entries = BTreeMap::new();
    let nu = &pt.nu;
    if cfg.m > 0 {
        let x = (nu * qi(2) + qi(cfg.p1 as i64 + 2)) / qi(4);
        let a = (&pt.lambda + &cfg.rho + nu - &cfg.rho1) / qi(2);
        let p2h = (cfg.p2 / 2) as u64;
        for j in 0..=k / 2 {
            for i in 0..=k - 2 * j {
                let h = k - 2 * j - i;
                let c = pow2(-2 * (i + h) as i64) * falling_shift(&x, j) * poch(&a, i as u64)
                    / (factorial(h as u64) * factorial(i as u64) * factorial(j as u64) * factorial(p2h + i as u64 - 1));
                entries.insert((h, i, j), c);
            }
        }
    } else {
        let ph = (cfg.p / 2) as u64;
        let fk = k / 2;
        for j in 0..=fk {
            let i = k - 2 * j;
            let base = nu / qi(2) - qi(fk as i64);
            let c = pow2(-(i as i64)) * poch(&base, (fk - j) as u64)
                / (factorial(i as u64) * factorial(j as u64) * factorial(ph + i as u64 - 1));
            entries.insert((0, i, j), c);
        }
    }
    Ok(CoeffTable { k, entries })
}

pub fn uhat_c(cfg: &PairConfig, pt: &ParamPoint) -> Result<Poly> {
    let t = coeff_table(cfg, pt)?;
    Ok(table_poly(cfg, &t))
}

pub fn table_poly(cfg: &PairConfig, t: &CoeffTable) -> Poly {
    let o = Ops::new(cfg);
    let (a, b, c) = (o.xp2(), o.xpp2(), o.z2());
    let mut out = Poly::zero();
    for (&(h, i, j), coef) in &t.entries {
        let m = &(&a.pow(h) * &b.pow(i)) * &c.pow(j);
        out.add_scaled(&m, coef);
    }
    out
}

/// Coefficients of `√π · v̂^C` as `(i, j′, c)` for the monomial `|X|^{2i} Z^{j′}`, `j′` odd.
pub fn vhat_c_entries(cfg: &PairConfig, pt: &ParamPoint) -> Result<Vec<(u32, u32, Q)>> {
    if cfg.alg != Algebra::C || cfg.m != 0 {
        return precondition("v̂^C is defined for complex configs with m = 0");
    }
    let k = slash_k(cfg, pt)? as i64;
    if !as_i64(&pt.nu).is_some_and(|v| v % 2 == 1 && v > 0 && v <= k) {
        return precondition("v̂^C needs ν ∈ 1+2ℤ≥0 with 0 < ν ≤ k");
    }
    let big_j = (k - 1) / 2;
    let base = (&pt.nu - qi(1)) / qi(2) - qi(big_j);
    let ph = (cfg.p / 2) as u64;
    let mut out = Vec::new();
    for j in 0..=big_j {
        let i = k - 1 - 2 * j;
        // √π / Γ(j + 3/2) = 4^{j+1} (j+1)! / (2j+2)!
        let inv_g = pow2(2 * (j + 1)) * factorial(j as u64 + 1) / factorial(2 * j as u64 + 2);
        let c = pow2(-i) * poch(&base, (big_j - j) as u64) * inv_g
            / (factorial(i as u64) * factorial(ph + i as u64 - 1));
        out.push((i as u32, 2 * j as u32 + 1, c));
    }
    Ok(out)
}

/// `√π · v̂^C` (the `√π` keeps every coefficient rational).
pub fn vhat_c(cfg: &PairConfig, pt: &ParamPoint) -> Result<Poly> {
    let o = Ops::new(cfg);
    let mut out = Poly::zero();
    for (i, jp, c) in vhat_c_entries(cfg, pt)? {
        out.add_scaled(&(&o.x2().pow(i) * &o.z(0).pow(jp)), &c);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum PolyTag {
    C,
    #[serde(rename = "vC")]
    VC,
    Harmonic(u32),
    UContract,
}

impl std::fmt::Display for PolyTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PolyTag::C => f.write_str("C"),
            PolyTag::VC => f.write_str("vC"),
            PolyTag::Harmonic(l) => write!(f, "Harmonic({l})"),
            PolyTag::UContract => f.write_str("UContract"),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct PolySpace {
    pub basis: Vec<Poly>,
    pub tags: Vec<PolyTag>,
    /// (theorem condition `ν+ρ′ = k+4`, lattice flag `S₂`) when the
    /// quaternionic sporadic regime was examined.
    pub sporadic_flags: Option<(bool, bool)>,
}

impl PolySpace {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }
}

fn is_sp12(cfg: &PairConfig) -> bool {
    cfg.alg == Algebra::H && cfg.n == 1 && cfg.m == 0
}

/// Sporadic quaternionic space at `pt`: `𝓗^{k/2}(p₁,p₂,p₃)` or `U·p`.
pub fn sporadic_space(cfg: &PairConfig, pt: &ParamPoint) -> Result<PolySpace> {
    let mut sp = PolySpace::default();
    let Ok(k) = slash_k(cfg, pt) else { return Ok(sp) };
    if !is_sp12(cfg) {
        return Ok(sp);
    }
    let s = &pt.nu + &cfg.rho1;
    match &cfg.f {
        FCase::Trivial if k > 0 && k % 2 == 0 && s == qi(k as i64 + 4) => {
            for h in harmonic_basis(k / 2) {
                sp.basis.push(substitute_p(&h, cfg)?);
                sp.tags.push(PolyTag::Harmonic(k / 2));
            }
        }
        FCase::U1Direction(u) if k == 2 && s == qi(6) => {
            let up = Poly::var(0).scale(&u[0]) + Poly::var(1).scale(&u[1]) + Poly::var(2).scale(&u[2]);
            sp.basis.push(substitute_p(&up, cfg)?);
            sp.tags.push(PolyTag::UContract);
        }
        _ => {}
    }
    Ok(sp)
}

/// Theorem-based shape of `ℂ[n̄]_{λ,ν}` (no polynomials constructed).
pub fn poly_space_shape(cfg: &PairConfig, pt: &ParamPoint) -> Result<(Vec<(PolyTag, usize)>, Option<(bool, bool)>)> {
    if !cfg.is_strongly_spherical() {
        return Err(Error::InvalidConfig(format!("{} is not strongly spherical", cfg.label())));
    }
    let fl = lattice_flags(cfg, pt);
    let Some(k) = fl.k else { return Ok((vec![], None)) };
    let mut out = vec![(PolyTag::C, 1)];
    let mut flags = None;
    if cfg.alg == Algebra::C && cfg.m == 0 && as_i64(&pt.nu).is_some_and(|v| v % 2 == 1 && v > 0 && v <= k) {
        out.push((PolyTag::VC, 1));
    }
    if is_sp12(cfg) {
        let s = &pt.nu + &cfg.rho1;
        match cfg.f {
            FCase::Trivial => {
                let thm = k > 0 && k % 2 == 0 && s == qi(k + 4);
                flags = Some((thm, fl.in_s2));
                if thm {
                    out.push((PolyTag::Harmonic(k as u32 / 2), k as usize + 1));
                }
            }
            FCase::U1Direction(_) => {
                let thm = k == 2 && s == qi(6);
                flags = Some((thm, fl.in_s3));
                if thm {
                    out.push((PolyTag::UContract, 1));
                }
            }
            _ => {}
        }
    }
    Ok((out, flags))
}

pub fn classify_poly_space(cfg: &PairConfig, pt: &ParamPoint) -> Result<PolySpace> {
    let (shape, flags) = poly_space_shape(cfg, pt)?;
    let mut sp = PolySpace { sporadic_flags: flags, ..Default::default() };
    for (tag, _) in shape {
        match tag {
            PolyTag::C => {
                sp.basis.push(uhat_c(cfg, pt)?);
                sp.tags.push(PolyTag::C);
            }
            PolyTag::VC => {
                sp.basis.push(vhat_c(cfg, pt)?);
                sp.tags.push(PolyTag::VC);
            }
            PolyTag::Harmonic(_) | PolyTag::UContract => {
                let s = sporadic_space(cfg, pt)?;
                sp.basis.extend(s.basis);
                sp.tags.extend(s.tags);
            }
        }
    }
    Ok(sp)
}

/// Exact rank of a family of polynomials.
pub fn poly_rank(polys: &[Poly]) -> usize {
    let monos: Vec<Mono> = {
        let mut s: Vec<Mono> = polys.iter().flat_map(|p| p.terms.keys().cloned()).collect();
        s.sort();
        s.dedup();
        s
    };
    let rows: Vec<Vec<Q>> = polys
        .iter()
        .map(|p| monos.iter().map(|m| p.terms.get(m).cloned().unwrap_or_else(Q::zero)).collect())
        .collect();
    rank(&rows, monos.len())
}

// --- system verification ------------------------------------------------------

#[derive(Clone, Debug)]
pub struct SystemReport {
    pub homogeneity: Poly,
    pub invariance: Vec<(String, bool)>,
    pub dv: Vec<(usize, Poly)>,
    pub dz: Vec<(usize, Poly)>,
}

impl SystemReport {
    pub fn pass(&self) -> bool {
        self.homogeneity.is_zero()
            && self.invariance.iter().all(|(_, ok)| *ok)
            && self.dv.iter().all(|(_, r)| r.is_zero())
            && self.dz.iter().all(|(_, r)| r.is_zero())
    }

    pub fn to_json(&self, names: &[String]) -> Value {
        let res = |v: &[(usize, Poly)]| -> Vec<Value> {
            v.iter()
                .map(|(i, r)| json!({"index": i, "zero": r.is_zero(), "residual": r.render(names)}))
                .collect()
        };
        json!({
            "pass": self.pass(),
            "homogeneity": {"zero": self.homogeneity.is_zero(), "residual": self.homogeneity.render(names)},
            "invariance": self.invariance.iter().map(|(n, ok)| json!({"sample": n, "invariant": ok})).collect::<Vec<_>>(),
            "dv": res(&self.dv),
            "dz": res(&self.dz),
        })
    }
}

/// The operators of the Fourier-picture system at `pt`: homogeneity,
/// `𝔳′`-equations (if `m > 0`) and `𝔷`-equations.
pub struct System {
    pub homogeneity: DiffOp,
    pub dv: Vec<(usize, DiffOp)>,
    pub dz: Vec<(usize, DiffOp)>,
}

pub fn build_system(cfg: &PairConfig, pt: &ParamPoint, variant: Variant) -> System {
    let o = Ops::new(cfg);
    let s = &pt.nu + &cfg.rho1;
    let dv = (0..cfg.p1).map(|i| (i, o.fourier_dv(i, &s, variant).expect("m > 0"))).collect();
    let dz = (0..cfg.q).map(|t| (t, o.fourier_dz(t, &s, variant))).collect();
    System { homogeneity: o.fourier_euler_eq(&pt.lambda, &pt.nu), dv, dz }
}

pub fn verify_system(f: &Poly, cfg: &PairConfig, pt: &ParamPoint) -> SystemReport {
    verify_system_with(f, cfg, pt, Variant::Transformed)
}

pub fn verify_system_with(f: &Poly, cfg: &PairConfig, pt: &ParamPoint, variant: Variant) -> SystemReport {
    let sys = build_system(cfg, pt, variant);
    let samples = m_prime_samples(cfg);
    SystemReport {
        homogeneity: sys.homogeneity.apply(f),
        invariance: samples.iter().map(|g| (g.label.clone(), m_prime_invariance_check(f, std::slice::from_ref(g)))).collect(),
        dv: sys.dv.iter().map(|(i, d)| (*i, d.apply(f))).collect(),
        dz: sys.dz.iter().map(|(i, d)| (*i, d.apply(f))).collect(),
    }
}

/// Dimension of the space of `M′`-invariant polynomials of weighted degree
/// `2k` solving the system, by brute-force linear algebra over all products
/// of the invariant generators.
pub fn solution_space_dimension(cfg: &PairConfig, pt: &ParamPoint) -> Result<usize> {
    let k = slash_k(cfg, pt)?;
    let gens = invariant_generators(cfg);
    // all generator monomials of weighted degree 2k
    let mut cands: Vec<Poly> = Vec::new();
    fn rec(g: &[(String, Poly, u32)], idx: usize, left: u32, acc: Poly, out: &mut Vec<Poly>) {
        if idx == g.len() {
            if left == 0 {
                out.push(acc);
            }
            return;
        }
        let w = g[idx].2;
        let mut cur = acc;
        let mut used = 0;
        loop {
            rec(g, idx + 1, left - used, cur.clone(), out);
            if used + w > left {
                break;
            }
            used += w;
            cur = &cur * &g[idx].1;
        }
    }
    rec(&gens.gens, 0, 2 * k, Poly::constant(Q::one()), &mut cands);
    // independent subset spanning the same space
    let mut basis: Vec<Poly> = Vec::new();
    for c in cands {
        let mut trial = basis.clone();
        trial.push(c.clone());
        if poly_rank(&trial) == trial.len() {
            basis = trial;
        }
    }
    if basis.is_empty() {
        return Ok(0);
    }
    let sys = build_system(cfg, pt, Variant::Transformed);
    let ops: Vec<&DiffOp> = std::iter::once(&sys.homogeneity)
        .chain(sys.dv.iter().map(|x| &x.1))
        .chain(sys.dz.iter().map(|x| &x.1))
        .collect();
    let mut rows: Vec<Vec<Q>> = Vec::new();
    for op in ops {
        let imgs: Vec<Poly> = basis.iter().map(|b| op.apply(b)).collect();
        let mut monos: Vec<Mono> = imgs.iter().flat_map(|p| p.terms.keys().cloned()).collect();
        monos.sort();
        monos.dedup();
        for m in monos {
            rows.push(imgs.iter().map(|p| p.terms.get(&m).cloned().unwrap_or_else(Q::zero)).collect());
        }
    }
    Ok(nullspace(&rows, basis.len()).len())
}

// --- recurrences --------------------------------------------------------------

#[derive(Clone, Debug, Serialize)]
pub struct RecurrenceFailure {
    pub name: String,
    pub index: (i64, i64, i64),
    pub lhs: String,
    pub rhs: String,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct RecurrenceReport {
    pub checked: usize,
    /// Instances of the displayed `2h(…)` form of R1_C, and how many fail.
    pub printed_r1c_checked: usize,
    pub printed_r1c_mismatches: usize,
    pub failures: Vec<RecurrenceFailure>,
}

impl RecurrenceReport {
    pub fn pass(&self) -> bool {
        self.failures.is_empty()
    }

    fn record(&mut self, name: &str, idx: (i64, i64, i64), lhs: Q, rhs: Q) {
        self.checked += 1;
        if lhs != rhs {
            self.failures.push(RecurrenceFailure { name: name.into(), index: idx, lhs: fmt_q(&lhs), rhs: fmt_q(&rhs) });
        }
    }
}

/// Complex tables are indexed by the power of `Z` rather than `|Z|²`.
fn z_power_table(t: &CoeffTable, extra_odd: &[(u32, u32, Q)]) -> BTreeMap<(i64, i64, i64), Q> {
    let mut m: BTreeMap<(i64, i64, i64), Q> =
        t.entries.iter().map(|(&(h, i, j), c)| ((h as i64, i as i64, 2 * j as i64), c.clone())).collect();
    for (i, jp, c) in extra_odd {
        m.insert((0, *i as i64, *jp as i64), c.clone());
    }
    m
}

pub fn check_recurrences(table: &CoeffTable, cfg: &PairConfig, pt: &ParamPoint) -> RecurrenceReport {
    let mut rep = RecurrenceReport::default();
    let get3 = |h: i64, i: i64, j: i64| -> Q {
        if h < 0 || i < 0 || j < 0 {
            return Q::zero();
        }
        table.entries.get(&(h as u32, i as u32, j as u32)).cloned().unwrap_or_else(Q::zero)
    };
    let b = &pt.lambda + &cfg.rho + &pt.nu - &cfg.rho1;
    let s = &pt.nu + &cfg.rho1;
    let (p1, p2, p, qq) = (cfg.p1 as i64, cfg.p2 as i64, cfg.p as i64, cfg.q as i64);
    for (&(h, i, j), c) in &table.entries {
        let (h, i, j) = (h as i64, i as i64, j as i64);
        if cfg.m > 0 {
            if h >= 1 {
                rep.record("R2", (h, i, j), qi(h) * (&b + qi(2 * i)) * c, qi((i + 1) * (2 * i + p2)) * get3(h - 1, i + 1, j));
            }
            if j >= 1 {
                let rhs = qi(4 * (h + 1) * (h + 2) * (2 * h + p1 + 2)) * get3(h + 2, i, j - 1)
                    + qi(4 * (h + 1) * (i + 1) * (2 * i + p2)) * get3(h + 1, i + 1, j - 1);
                rep.record("R3", (h, i, j), qi(j) * c, rhs);
            }
        } else if j >= 1 {
            let lhs = qi(j) * (&s - qi(qq) - qi(2 * j)) * c;
            let rhs = qi(2 * (i + 1) * (i + 2) * (2 * i + p) * (2 * i + p + 2)) * get3(h, i + 2, j - 1);
            rep.record("R4", (h, i, j), lhs, rhs);
        }
    }
    if cfg.alg == Algebra::C {
        let vc = if cfg.m == 0 { vhat_c_entries(cfg, pt).unwrap_or_default() } else { vec![] };
        let zt = z_power_table(table, &vc);
        let g = |h: i64, i: i64, j: i64| -> Q {
            if h < 0 || i < 0 || j < 0 {
                return Q::zero();
            }
            zt.get(&(h, i, j)).cloned().unwrap_or_else(Q::zero)
        };
        for (&(h, i, j), c) in &zt {
            if cfg.m > 0 {
                if h >= 1 {
                    let rhs = qi((i + 1) * (2 * i + p2)) * g(h - 1, i + 1, j);
                    // the displayed form carries an extra factor 2 on the left
                    rep.printed_r1c_checked += 1;
                    if qi(2 * h) * (&b + qi(2 * i)) * c != rhs {
                        rep.printed_r1c_mismatches += 1;
                    }
                    rep.record("R1_C", (h, i, j), qi(h) * (&b + qi(2 * i)) * c, rhs);
                }
                if j >= 2 {
                    let rhs = qi(8 * (h + 1) * (h + 2) * (2 * h + p1 + 2)) * g(h + 2, i, j - 2)
                        + qi(8 * (h + 1) * (i + 1) * (2 * i + p2)) * g(h + 1, i + 1, j - 2);
                    rep.record("R2_C", (h, i, j), qi(j) * c, rhs);
                }
            } else if j >= 2 {
                let lhs = qi(j) * (&s - qi(qq) - qi(j)) * c;
                let rhs = qi(4 * (i + 1) * (i + 2) * (2 * i + p) * (2 * i + p + 2)) * g(h, i + 2, j - 2);
                rep.record("R3_C", (h, i, j), lhs, rhs);
            }
        }
    }
    rep
}

/// Negative control: double one entry of the table.
pub fn perturb_table(table: &CoeffTable) -> CoeffTable {
    let mut t = table.clone();
    // perturb the entry with the largest h so an R2 instance must notice
    if let Some((key, _)) = t.entries.iter().filter(|(_, v)| !v.is_zero()).max_by_key(|(k, _)| (k.0, k.1)) {
        let key = *key;
        let v = t.entries[&key].clone() * qi(2);
        t.entries.insert(key, v);
    }
    t
}

pub fn table_json(t: &CoeffTable) -> Value {
    json!({
        "k": t.k,
        "entries": t.entries.iter().map(|(&(h, i, j), c)| json!({"h": h, "i": i, "j": j, "c": fmt_q(c)})).collect::<Vec<_>>(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::q;

    fn cfg(a: Algebra, n: usize, m: usize, f: FCase) -> PairConfig {
        PairConfig::new(a, n, m, f).unwrap()
    }

    /// `(λ, ν)` on `//` with the given `k` and `ν`.
    fn on_line(c: &PairConfig, nu: Q, k: i64) -> ParamPoint {
        let lambda = &nu + &c.rho1 - &c.rho - qi(2 * k);
        ParamPoint::new(lambda, nu)
    }

    #[test]
    fn table_entries_match_closed_forms() {
        let c = cfg(Algebra::C, 2, 1, FCase::Trivial);
        let t0 = coeff_table(&c, &on_line(&c, q(1, 3), 0)).unwrap();
        assert_eq!(t0.entries.len(), 1);
        assert_eq!(t0.entries[&(0, 0, 0)], Q::one() / factorial((c.p2 / 2 - 1) as u64));
        for k in 1..4 {
            let t = coeff_table(&c, &on_line(&c, q(2, 7), k)).unwrap();
            let want = pow2(-2 * k) / (factorial(k as u64) * factorial((c.p2 / 2 - 1) as u64));
            assert_eq!(t.entries[&(k as u32, 0, 0)], want);
        }
        let pt = on_line(&c, q(5, 3), 1);
        let t = coeff_table(&c, &pt).unwrap();
        let b = &pt.lambda + &c.rho + &pt.nu - &c.rho1;
        assert_eq!(&t.entries[&(1, 0, 0)] / &t.entries[&(0, 1, 0)], qi(c.p2 as i64) / b);
        let h = cfg(Algebra::H, 1, 0, FCase::Trivial);
        let t = coeff_table(&h, &on_line(&h, qi(3), 1)).unwrap();
        assert_eq!(t.entries.keys().cloned().collect::<Vec<_>>(), vec![(0, 1, 0)]);
    }

    #[test]
    fn off_lattice_is_an_error() {
        let c = cfg(Algebra::C, 2, 1, FCase::Trivial);
        assert!(coeff_table(&c, &ParamPoint::ints(0, 0)).is_err());
        assert!(classify_poly_space(&c, &ParamPoint::ints(0, 0)).unwrap().basis.is_empty());
    }

    #[test]
    fn uhat_c_solves_the_system() {
        let confs = [
            cfg(Algebra::C, 2, 1, FCase::Trivial),
            cfg(Algebra::C, 2, 0, FCase::Trivial),
            cfg(Algebra::H, 1, 0, FCase::Trivial),
            cfg(Algebra::H, 2, 1, FCase::Trivial),
            cfg(Algebra::C, 3, 2, FCase::Trivial),
            cfg(Algebra::O, 1, 0, FCase::Trivial),
        ];
        for c in &confs {
            let o = Ops::new(c);
            for k in 0..3 {
                let pt = on_line(c, q(3, 5), k);
                let u = uhat_c(c, &pt).unwrap();
                assert!(!u.is_zero());
                assert_eq!(u.weighted_homogeneous_degree(&o.weights()), Some(2 * k as u32));
                let rep = verify_system(&u, c, &pt);
                assert!(rep.pass(), "{} k={k}: {:?}", c.label(), rep.to_json(&o.var_names()));
            }
        }
    }

    #[test]
    fn listed_variant_does_not_annihilate_uhat_c() {
        // for 𝔽 = ℂ (q = 1) the two displays coincide
        let c = cfg(Algebra::C, 2, 1, FCase::Trivial);
        let pt = on_line(&c, q(3, 5), 2);
        assert!(verify_system_with(&uhat_c(&c, &pt).unwrap(), &c, &pt, Variant::Listed).pass());
        let h = cfg(Algebra::H, 2, 1, FCase::Trivial);
        let pt = on_line(&h, q(3, 5), 2);
        let rep = verify_system_with(&uhat_c(&h, &pt).unwrap(), &h, &pt, Variant::Listed);
        assert!(!rep.pass());
        assert!(rep.dv.iter().any(|(_, r)| !r.is_zero()));
    }

    #[test]
    fn homogeneity_residual_for_z_norm() {
        let c = cfg(Algebra::H, 2, 1, FCase::Trivial);
        let o = Ops::new(&c);
        let f = o.z2();
        let r = verify_system(&f, &c, &ParamPoint::ints(0, 0));
        assert!(!r.homogeneity.is_zero());
        let pt = on_line(&c, qi(1), 2);
        assert!(verify_system(&f, &c, &pt).homogeneity.is_zero());
    }

    #[test]
    fn vhat_c_solves_the_system() {
        for n in [1, 2] {
            let c = cfg(Algebra::C, n, 0, FCase::Trivial);
            for k in 1..5 {
                for nu in (1..=k).step_by(2) {
                    let pt = on_line(&c, qi(nu), k);
                    let v = vhat_c(&c, &pt).unwrap();
                    assert!(verify_system(&v, &c, &pt).pass());
                }
            }
        }
        let c = cfg(Algebra::C, 1, 0, FCase::Trivial);
        assert!(vhat_c(&c, &on_line(&c, qi(2), 2)).is_err());
        let v = vhat_c(&c, &on_line(&c, qi(1), 2)).unwrap();
        assert_eq!(v.len(), 2); // |X|² Z with p = 2
    }

    #[test]
    fn recurrences_hold_and_perturbation_is_flagged() {
        let c = cfg(Algebra::C, 2, 1, FCase::Trivial);
        let pt = on_line(&c, q(1, 3), 2);
        let t = coeff_table(&c, &pt).unwrap();
        let r = check_recurrences(&t, &c, &pt);
        assert!(r.pass(), "{:?}", r.failures);
        assert!(r.checked > 0);
        assert!(r.printed_r1c_mismatches > 0);
        let bad = check_recurrences(&perturb_table(&t), &c, &pt);
        assert!(bad.failures.iter().any(|f| f.name == "R2"));

        let h = cfg(Algebra::H, 1, 0, FCase::Trivial);
        let pt = on_line(&h, qi(2), 2);
        let r = check_recurrences(&coeff_table(&h, &pt).unwrap(), &h, &pt);
        assert!(r.pass() && r.checked > 0);

        let c0 = cfg(Algebra::C, 2, 0, FCase::Trivial);
        let pt = on_line(&c0, qi(3), 4);
        let r = check_recurrences(&coeff_table(&c0, &pt).unwrap(), &c0, &pt);
        assert!(r.pass(), "{:?}", r.failures);
    }

    #[test]
    fn sporadic_spaces() {
        let h = cfg(Algebra::H, 1, 0, FCase::Trivial);
        let s6 = |k| on_line(&h, qi(6) - &h.rho1, k);
        assert_eq!(sporadic_space(&h, &s6(2)).unwrap().dimension(), 3);
        assert_eq!(sporadic_space(&h, &on_line(&h, qi(5) - &h.rho1, 1)).unwrap().dimension(), 0);
        for b in sporadic_space(&h, &s6(2)).unwrap().basis {
            assert!(verify_system(&b, &h, &s6(2)).pass());
        }
        let pt = on_line(&h, qi(8) - &h.rho1, 4);
        let sp = sporadic_space(&h, &pt).unwrap();
        assert_eq!(sp.dimension(), 5);
        for b in &sp.basis {
            assert!(verify_system(b, &h, &pt).pass());
        }
        let u = cfg(Algebra::H, 1, 0, FCase::parse("u1(i)").unwrap());
        let pt = on_line(&u, qi(6) - &u.rho1, 2);
        let sp = sporadic_space(&u, &pt).unwrap();
        assert_eq!(sp.dimension(), 1);
        assert!(verify_system(&sp.basis[0], &u, &pt).pass());
        assert_eq!(sp.basis[0], substitute_p(&Poly::var(0), &u).unwrap());
    }

    #[test]
    fn classification_dimensions() {
        let h = cfg(Algebra::H, 1, 0, FCase::Trivial);
        let sp = classify_poly_space(&h, &ParamPoint::ints(-5, 5)).unwrap();
        assert_eq!(sp.dimension(), 6);
        assert_eq!(poly_rank(&sp.basis), 6);
        assert_eq!(sp.sporadic_flags, Some((true, true)));
        let c = cfg(Algebra::C, 2, 0, FCase::FullUnitary);
        let pt = on_line(&c, qi(1), 2);
        assert!(classify_poly_space(&cfg(Algebra::C, 2, 0, FCase::Trivial), &pt).is_err());
        assert_eq!(classify_poly_space(&c, &pt).unwrap().tags, vec![PolyTag::C, PolyTag::VC]);
    }

    #[test]
    fn brute_force_matches_classification() {
        let cases = [
            (cfg(Algebra::C, 2, 1, FCase::Trivial), q(1, 3)),
            (cfg(Algebra::C, 1, 0, FCase::Trivial), qi(1)),
            (cfg(Algebra::H, 1, 0, FCase::Trivial), q(1, 2)),
        ];
        for (c, nu) in &cases {
            for k in 0..3 {
                let pt = on_line(c, nu.clone(), k);
                let dim = classify_poly_space(c, &pt).unwrap().dimension();
                assert_eq!(solution_space_dimension(c, &pt).unwrap(), dim, "{} k={k}", c.label());
            }
        }
        let h = cfg(Algebra::H, 1, 0, FCase::Trivial);
        let pt = on_line(&h, qi(6) - &h.rho1, 2);
        assert_eq!(solution_space_dimension(&h, &pt).unwrap(), 4);
    }
}
