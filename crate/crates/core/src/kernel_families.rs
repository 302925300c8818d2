//! Position-side kernels: `u^A` (smooth off `X″ = 0`), the `u^B` expansion
//! in δ-derivatives along `𝔳″`, the differential kernels `u^C`, `v^C`, their
//! supports and the classification of `𝒟′(n̄)_{λ,ν}`.

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;
use serde_json::{json, Value as Json};

use crate::error::{precondition, Error, Result};
use crate::exec::{map_collect, Exec};
use crate::fourier_verifier::{classify_poly_space, coeff_table, vhat_c_entries, PolyTag};
use crate::gamma_expr::{c_b, ua_normalization, Affine, GammaExpr};
use crate::pair_config::{lattice_flags, multiplicity, PairConfig, ParamPoint};
use crate::poly_algebra::{m_prime_samples, DiffOp, Ops, Poly};
use crate::rat::{factorial, fmt_q, poch, pow2, q, qi, to_f64, Q};

// --- u^A ----------------------------------------------------------------------

/// `C · N(X,Z)^a · |X″|^b`
#[derive(Clone, Debug, Serialize)]
pub struct SmoothKernel {
    #[serde(serialize_with = "ser_q")]
    pub a: Q,
    #[serde(serialize_with = "ser_q")]
    pub b: Q,
    #[serde(skip)]
    pub normalization: GammaExpr,
    /// numeric value of the normalization (0 where it vanishes)
    pub scale: f64,
}

fn ser_q<S: serde::Serializer>(x: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_q(x))
}

impl SmoothKernel {
    pub fn u_a(cfg: &PairConfig, pt: &ParamPoint) -> Result<Self> {
        let a = qi(-2) * (&pt.nu + &cfg.rho1);
        let b = &pt.lambda - &cfg.rho + &pt.nu + &cfg.rho1;
        let normalization = ua_normalization(cfg);
        let v = normalization.value_at(pt);
        let scale = match v.order {
            o if o > 0 => 0.0,
            0 => v.leading.as_ref().map(|x| x.to_f64()).unwrap_or(f64::NAN),
            _ => return Err(Error::Numeric("infinite normalization of u^A".into())),
        };
        if !scale.is_finite() {
            return Err(Error::Numeric("normalization of u^A could not be evaluated".into()));
        }
        Ok(SmoothKernel { a, b, normalization, scale })
    }

    /// Homogeneity degree `a + b` under `(X,Z) ↦ (rX, r²Z)`.
    pub fn degree(&self) -> f64 {
        to_f64(&(&self.a + &self.b))
    }

    /// Value and gradient at `coords = (X, Z)` (coordinates as in
    /// [`Ops`]: `X′`, `X″`, `Z`).
    pub fn eval(&self, cfg: &PairConfig, coords: &[f64]) -> Result<(f64, Vec<f64>)> {
        let (p, p1) = (cfg.p, cfg.p1);
        if coords.len() != p + cfg.q {
            return precondition("coordinate vector has the wrong length");
        }
        let x2: f64 = coords[..p].iter().map(|v| v * v).sum();
        let xpp2: f64 = coords[p1..p].iter().map(|v| v * v).sum();
        let z2: f64 = coords[p..].iter().map(|v| v * v).sum();
        if xpp2 == 0.0 {
            return precondition("u^A is evaluated off the singular set X'' = 0");
        }
        let n4 = x2 * x2 + z2;
        let (a, b) = (to_f64(&self.a), to_f64(&self.b));
        let u = self.scale * n4.powf(a / 4.0) * xpp2.powf(b / 2.0);
        let grad = (0..coords.len())
            .map(|i| {
                let c = coords[i];
                let dlog = if i < p {
                    a * x2 * c / n4 + if i >= p1 { b * c / xpp2 } else { 0.0 }
                } else {
                    a * c / (2.0 * n4)
                };
                u * dlog
            })
            .collect();
        Ok((u, grad))
    }
}

/// Apply a first-order operator with polynomial coefficients at a point,
/// given the value and gradient; returns the value and the sum of absolute
/// values of the individual terms (the local scale).
pub fn apply_first_order(op: &DiffOp, x: &[f64], u: f64, grad: &[f64]) -> (f64, f64) {
    let mut val = 0.0;
    let mut scale = 0.0;
    for (mono, coef) in &op.terms {
        let d = match mono.degree() {
            0 => u,
            1 => grad[mono.max_var().unwrap()],
            _ => panic!("operator of order > 1"),
        };
        // split the coefficient into monomials for an honest scale
        for (m, c) in &coef.terms {
            let t = to_f64(c) * Poly::monomial(m.clone(), Q::one()).eval_f64(x) * d;
            val += t;
            scale += t.abs();
        }
    }
    (val, scale)
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct PointwiseReport {
    pub points: usize,
    pub max_euler: f64,
    pub max_dv: f64,
    pub max_dz: f64,
    pub max_m_prime: f64,
    pub max_homogeneity: f64,
}

impl PointwiseReport {
    pub fn max_residual(&self) -> f64 {
        [self.max_euler, self.max_dv, self.max_dz, self.max_m_prime, self.max_homogeneity]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

fn rel(v: f64, s: f64) -> f64 {
    if s == 0.0 {
        0.0
    } else {
        v.abs() / s
    }
}

/// Random points with `|X″| ≥ |X|/4`.
pub fn sample_points(cfg: &PairConfig, n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let v: Vec<f64> = (0..cfg.p + cfg.q).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let x2: f64 = v[..cfg.p].iter().map(|t| t * t).sum();
        let xpp2: f64 = v[cfg.p1..cfg.p].iter().map(|t| t * t).sum();
        if xpp2 >= x2 / 16.0 && xpp2 > 1e-6 {
            out.push(v);
        }
    }
    out
}

/// Relative residuals of the invariance system for `kernel` at random
/// points: Euler equation, `D_𝔳(S)` for `S ∈ 𝔳′`, `D_𝔷(T)`, `M′`
/// covariance and the dilation law.
pub fn verify_invariance_pointwise(
    cfg: &PairConfig,
    pt: &ParamPoint,
    kernel: &SmoothKernel,
    n_points: usize,
    seed: u64,
    exec: Exec,
) -> Result<PointwiseReport> {
    let o = Ops::new(cfg);
    let s = &pt.nu + &cfg.rho1;
    let euler = o.euler_eq(&pt.lambda, &pt.nu);
    let dv: Vec<DiffOp> = (0..cfg.p1).map(|i| o.dv_position(i, &s)).collect();
    let dz: Vec<DiffOp> = (0..cfg.q).map(|t| o.dz_position(t, &s)).collect();
    let samples = m_prime_samples(cfg);
    let pts = sample_points(cfg, n_points, seed);
    let deg = kernel.degree();
    let per_point = map_collect(exec, &pts, |x| -> Result<[f64; 5]> {
        let (u, g) = kernel.eval(cfg, x)?;
        let (e, es) = apply_first_order(&euler, x, u, &g);
        let mv = dv.iter().map(|d| apply_first_order(d, x, u, &g)).map(|(v, s)| rel(v, s)).fold(0.0, f64::max);
        let mz = dz.iter().map(|d| apply_first_order(d, x, u, &g)).map(|(v, s)| rel(v, s)).fold(0.0, f64::max);
        let mut mm: f64 = 0.0;
        for gmap in &samples {
            let (ug, _) = kernel.eval(cfg, &gmap.apply_f64(x))?;
            mm = mm.max(rel(ug - u, u.abs()));
        }
        let r = 1.7;
        let y: Vec<f64> = x.iter().enumerate().map(|(i, v)| if i < cfg.p { r * v } else { r * r * v }).collect();
        let (ur, _) = kernel.eval(cfg, &y)?;
        let mh = rel(ur - r.powf(deg) * u, ur.abs().max(u.abs() * r.powf(deg)));
        Ok([rel(e, es), mv, mz, mm, mh])
    });
    let mut rep = PointwiseReport { points: pts.len(), ..Default::default() };
    for r in per_point {
        let r = r?;
        rep.max_euler = rep.max_euler.max(r[0]);
        rep.max_dv = rep.max_dv.max(r[1]);
        rep.max_dz = rep.max_dz.max(r[2]);
        rep.max_m_prime = rep.max_m_prime.max(r[3]);
        rep.max_homogeneity = rep.max_homogeneity.max(r[4]);
    }
    Ok(rep)
}

// --- δ-kernels ----------------------------------------------------------------

/// `coef · Δ_{𝔳′}^h Δ_{𝔳″}^i ∂_Z^{z_order} δ`, where for `q > 1` the
/// `Z`-part is `□^{z_order/2}` (`z_order` even).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DeltaTerm {
    #[serde(serialize_with = "ser_q")]
    pub coef: Q,
    pub h: u32,
    pub i: u32,
    pub z_order: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DifferentialKernel {
    pub family: String,
    pub k: u32,
    pub terms: Vec<DeltaTerm>,
}

/// One summand `coef · |X′|^{2i} N(X′,Z)^{−2(ν+ρ′)−4i−4j} Δ_{𝔳″}^k δ(X″)`.
#[derive(Clone, Debug, Serialize)]
pub struct SingularTerm {
    pub k: u32,
    pub i: u32,
    pub j: u32,
    /// rational factor at the point, without `c^B`
    #[serde(serialize_with = "ser_q")]
    pub rational: Q,
    /// `c^B × rational × Γ(·)`: the coefficient relative to the entire,
    /// nowhere-vanishing normalization of `|X′|^{2i} N(X′,Z)^{…}` on `n̄′`
    #[serde(skip)]
    pub effective: GammaExpr,
    pub effective_order: i32,
    /// whether the normalized norm power is supported at the origin of `n̄′`
    pub radial_is_delta: bool,
}

/// What the summands with a given `k` add up to at the point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum GroupValue {
    Zero,
    /// a nonzero combination of derivatives of `δ(X′,Z)`
    Local,
    /// a nonzero function on `n̄′ ∖ {0}`
    Nonlocal,
}

/// The summands sharing `Δ_{𝔳″}^k δ(X″)`.  They all have the same
/// homogeneity, so their norm powers hit a pole simultaneously and the simple
/// residues (δ-type functionals on `n̄′`) may cancel among themselves.
#[derive(Clone, Debug, Serialize)]
pub struct TermGroup {
    pub k: u32,
    pub radial_pole: bool,
    /// the residue functionals of the order-0 coefficients sum to zero
    pub residue_cancels: bool,
    pub value: GroupValue,
}

#[derive(Clone, Debug, Serialize)]
pub struct SingularKernel {
    pub l: u32,
    #[serde(skip)]
    pub c_b: GammaExpr,
    pub c_b_order: i32,
    pub terms: Vec<SingularTerm>,
    pub groups: Vec<TermGroup>,
}

impl SingularKernel {
    /// Holomorphic at the point.
    pub fn is_finite(&self) -> bool {
        self.c_b_order >= 0 && self.groups.iter().all(|g| g.residue_cancels)
    }

    pub fn is_nonzero(&self) -> bool {
        self.groups.iter().any(|g| g.value != GroupValue::Zero)
    }

    /// Support read off the expansion.
    pub fn support(&self) -> Support {
        let vals: Vec<GroupValue> = self.groups.iter().map(|g| g.value).collect();
        if vals.contains(&GroupValue::Nonlocal) {
            Support::NbarPrime
        } else if vals.contains(&GroupValue::Local) {
            Support::Origin
        } else {
            Support::Empty
        }
    }
}

/// Order and leading coefficient of `(x)_t` when `x` moves with slope `dx`.
fn poch_order_lead(x0: &Q, dx: &Q, t: u32) -> (i32, Q) {
    let mut ord = 0;
    let mut lead = Q::one();
    for u in 0..t {
        let f = x0 + qi(u as i64);
        if f.is_zero() {
            ord += 1;
            lead *= dx;
        } else {
            lead *= f;
        }
    }
    (ord, lead)
}

/// `(x)_d` for an integer `d ≥ 0`.
fn rising(x: &Q, d: u32) -> Q {
    poch(x, d as u64)
}

/// Pairs each pole-group summand with the invariant test functions
/// `|X′|^{2a}|Z|^{2b}`, `a + 2b = n`.  By `O(p′)×O(q)`-invariance these
/// detect every residue functional.  The pairing of the residue of
/// `|X′|^{2i} N^{…}` with such a test function is proportional to the moment
/// `∫_𝕊 |ω′|^{2i+2a}|ω_Z|^{2b} ∝ Γ(A)/Γ(A + q/2 + b)`, `A = (p′+2i+2a)/4`;
/// the returned rows are those moments divided by the one for the smallest
/// `i` (exact, since `i` moves in steps of two inside a group).
fn residue_rows(cfg: &PairConfig, is: &[u32], n: u32) -> Vec<Vec<Q>> {
    if cfg.m == 0 {
        return vec![vec![Q::one(); is.len()]];
    }
    let imin = *is.iter().min().unwrap_or(&0);
    let mut rows = Vec::new();
    for b in 0..=n / 2 {
        let a = n - 2 * b;
        let a0 = q((cfg.p1 as i64) + 2 * imin as i64 + 2 * a as i64, 4);
        let c0 = &a0 + q(cfg.q as i64, 2) + qi(b as i64);
        rows.push(
            is.iter()
                .map(|&i| {
                    let d = (i - imin) / 2;
                    rising(&a0, d) / rising(&c0, d)
                })
                .collect(),
        );
    }
    rows
}

fn combination_vanishes(rows: &[Vec<Q>], w: &[Q]) -> bool {
    rows.iter().all(|r| r.iter().zip(w).fold(Q::zero(), |acc, (x, y)| acc + x * y).is_zero())
}

/// Direction keeping `λ+ν` fixed.
fn along_backslash() -> (Q, Q) {
    (qi(-1), qi(1))
}

pub fn ub_expansion(cfg: &PairConfig, pt: &ParamPoint) -> Result<SingularKernel> {
    let Some(l) = lattice_flags(cfg, pt).l else {
        return precondition("u^B needs a point with λ+ρ+ν−ρ′ ∈ −2ℤ≥0");
    };
    let l = l as u32;
    let cb = c_b(cfg, pt)?;
    let dir = along_backslash();
    let s = &pt.nu + &cfg.rho1;
    let sh = &s / qi(2);
    let p2h = q(cfg.p2 as i64, 2);
    let c_b_order = cb.value_along(pt, &dir).order;
    let mut terms = Vec::new();
    let mut groups = Vec::new();
    for k in 0..=l {
        // (order of the coefficient relative to c^B, leading ratio, i)
        let mut members: Vec<(i32, Q, u32)> = Vec::new();
        let mut radial_pole = false;
        let outer = pow2(2 * (l - k) as i64) * factorial(l as u64) * poch(&(qi(k as i64) + &p2h), (l - k) as u64)
            / factorial(k as u64);
        for j in 0..=(l - k) / 2 {
            let i = l - k - 2 * j;
            if cfg.m == 0 && i > 0 {
                continue; // |X′|^{2i} = 0 when 𝔳′ = 0
            }
            let sign = if (i + j) % 2 == 0 { qi(1) } else { qi(-1) };
            let inner = sign * pow2(i as i64) / (factorial(i as u64) * factorial(j as u64));
            let rational = &outer * &inner * poch(&sh, (i + j) as u64);
            let t = (i + j) as i64;
            // ((ν+ρ′)/2)_t as a gamma ratio, then the norm-power normalization
            let mut eff = cb
                .mul(&GammaExpr::constant(&outer * &inner))
                .gamma(Affine::new(half(&cfg.rho1) + qi(t), qi(0), q(1, 2)), 1)
                .gamma(Affine::new(half(&cfg.rho1), qi(0), q(1, 2)), -1);
            let radial_is_delta;
            if cfg.m > 0 {
                // |X′|^{2i} N^{−2s−4t} on n̄′ is r^{z−1} times an even profile in
                // polar coordinates, z = 2i − 2s − 4t + 2ρ′ = −2(ν + i + 2j); so it
                // equals Γ(z/2) · (entire, nowhere vanishing family)
                let shift = (i + 2 * j) as i64;
                eff = eff.gamma(Affine::new(qi(-shift), qi(0), qi(-1)), 1);
                radial_is_delta = crate::rat::as_i64(&(&pt.nu + qi(shift))).is_some_and(|v| v >= 0);
            } else {
                // |Z|^{−s−2t} on 𝔷 ≅ ℝ^q = Γ((q − s)/2 − t) · (entire family)
                let c = half(&(qi(cfg.q as i64) - &cfg.rho1)) - qi(t);
                eff = eff.gamma(Affine::new(c, qi(0), q(-1, 2)), 1);
                let d = &s + qi(2 * t) - qi(cfg.q as i64);
                radial_is_delta = crate::rat::as_i64(&d).is_some_and(|v| v >= 0 && v % 2 == 0);
            }
            let effective_order = eff.value_along(pt, &dir).order;
            let (po, pl) = poch_order_lead(&sh, &q(1, 2), i + j);
            members.push((c_b_order + po, &outer * &inner * pl, i));
            radial_pole = radial_is_delta;
            terms.push(SingularTerm { k, i, j, rational, effective: eff, effective_order, radial_is_delta });
        }
        groups.push(analyse_group(cfg, pt, l, k, radial_pole, &members));
    }
    Ok(SingularKernel { l, c_b: cb, c_b_order, terms, groups })
}

fn analyse_group(cfg: &PairConfig, pt: &ParamPoint, l: u32, k: u32, radial_pole: bool, members: &[(i32, Q, u32)]) -> TermGroup {
    let at = |o: i32| -> (Vec<u32>, Vec<Q>) {
        members.iter().filter(|m| m.0 == o).map(|m| (m.2, m.1.clone())).unzip()
    };
    let (is0, w0) = at(0);
    if !radial_pole {
        let value = if is0.is_empty() { GroupValue::Zero } else { GroupValue::Nonlocal };
        return TermGroup { k, radial_pole, residue_cancels: true, value };
    }
    // pole of the norm power at radial degree n
    let n = if cfg.m > 0 {
        crate::rat::as_i64(&(&pt.nu + qi((l - k) as i64))).unwrap_or(0) as u32
    } else {
        0
    };
    if !is0.is_empty() {
        let residue_cancels = combination_vanishes(&residue_rows(cfg, &is0, n), &w0);
        return TermGroup { k, radial_pole, residue_cancels, value: GroupValue::Nonlocal };
    }
    let (is1, w1) = at(1);
    let value = if !is1.is_empty() && !combination_vanishes(&residue_rows(cfg, &is1, n), &w1) {
        GroupValue::Local
    } else {
        GroupValue::Zero
    };
    TermGroup { k, radial_pole, residue_cancels: true, value }
}

fn half(x: &Q) -> Q {
    x / qi(2)
}

/// `u^C = Σ c_{h,i,j} Δ_{𝔳′}^h Δ_{𝔳″}^i □^j δ` with the coefficients of
/// [`coeff_table`].
pub fn uc_kernel(cfg: &PairConfig, pt: &ParamPoint) -> Result<DifferentialKernel> {
    let t = coeff_table(cfg, pt)?;
    let terms = t
        .entries
        .iter()
        .map(|(&(h, i, j), c)| DeltaTerm { coef: c.clone(), h, i, z_order: 2 * j })
        .collect();
    Ok(DifferentialKernel { family: "C".into(), k: t.k, terms })
}

/// `√π · v^C = Σ c_{i,j′} Δ^i ∂_Z^{j′} δ` (`j′` odd; complex, `m = 0`).
pub fn vc_kernel(cfg: &PairConfig, pt: &ParamPoint) -> Result<DifferentialKernel> {
    let k = lattice_flags(cfg, pt).k.unwrap_or(0) as u32;
    let terms = vhat_c_entries(cfg, pt)?
        .into_iter()
        .map(|(i, jp, c)| DeltaTerm { coef: c, h: 0, i, z_order: jp })
        .collect();
    Ok(DifferentialKernel { family: "vC".into(), k, terms })
}

/// The constant-coefficient operator of a differential kernel.
pub fn kernel_operator(cfg: &PairConfig, kern: &DifferentialKernel) -> DiffOp {
    let o = Ops::new(cfg);
    let mut out = DiffOp::zero();
    for t in &kern.terms {
        let mut d = DiffOp::identity();
        for _ in 0..t.h {
            d = d.compose(&o.lap_vp());
        }
        for _ in 0..t.i {
            d = d.compose(&o.lap_vpp());
        }
        if cfg.q == 1 {
            for _ in 0..t.z_order {
                d = d.compose(&DiffOp::d(o.zi(0)));
            }
        } else {
            for _ in 0..t.z_order / 2 {
                d = d.compose(&o.box_z());
            }
        }
        out = out + d.scale(&t.coef);
    }
    out
}

/// Fourier transform of the kernel with `𝓕(∂_S) = ⟨X,S⟩` and `𝓕δ = 1`.
pub fn kernel_fourier(cfg: &PairConfig, kern: &DifferentialKernel) -> Poly {
    kernel_operator(cfg, kern).fourier().apply(&Poly::constant(Q::one()))
}

// --- supports and classification ------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Support {
    Empty,
    Origin,
    NbarPrime,
    Nbar,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Family {
    A,
    B,
    C,
    #[serde(rename = "vC")]
    VC,
    Harmonic(u32),
    UContract,
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Family::A => f.write_str("A"),
            Family::B => f.write_str("B"),
            Family::C => f.write_str("C"),
            Family::VC => f.write_str("vC"),
            Family::Harmonic(l) => write!(f, "Harmonic({l})"),
            Family::UContract => f.write_str("UContract"),
        }
    }
}

pub fn support_of(family: &Family, cfg: &PairConfig, pt: &ParamPoint) -> Result<Support> {
    let fl = lattice_flags(cfg, pt);
    match family {
        Family::A => Ok(if fl.in_l {
            Support::Empty
        } else if fl.in_slash_set {
            Support::Origin
        } else if fl.in_backslash_set {
            Support::NbarPrime
        } else {
            Support::Nbar
        }),
        Family::B if !fl.in_backslash_set => precondition("u^B is only defined on \\\\"),
        Family::B => Ok(if fl.in_x && !fl.in_l { Support::Origin } else { Support::NbarPrime }),
        _ if !fl.in_slash_set => precondition("differential kernels live on //"),
        _ => Ok(Support::Origin),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FamilyEntry {
    pub family: Family,
    pub dimension: usize,
    pub support: Support,
}

#[derive(Clone, Debug, Serialize)]
pub struct KernelDescription {
    pub families: Vec<FamilyEntry>,
    pub dimension: usize,
}

impl KernelDescription {
    pub fn labels(&self) -> Vec<String> {
        self.families.iter().map(|f| f.family.to_string()).collect()
    }
}

pub fn classify_sbo_space(cfg: &PairConfig, pt: &ParamPoint) -> Result<KernelDescription> {
    if !cfg.is_strongly_spherical() {
        return Err(Error::InvalidConfig(format!("{} is not strongly spherical", cfg.label())));
    }
    let fl = lattice_flags(cfg, pt);
    let mut families = Vec::new();
    let mut push = |family: Family, dimension: usize| -> Result<()> {
        let support = support_of(&family, cfg, pt)?;
        families.push(FamilyEntry { family, dimension, support });
        Ok(())
    };
    if !fl.in_slash_set {
        push(Family::A, 1)?;
    } else {
        if fl.in_l {
            push(Family::B, 1)?;
        }
        let (shape, _) = crate::fourier_verifier::poly_space_shape(cfg, pt)?;
        for (tag, dim) in shape {
            let fam = match tag {
                PolyTag::C => Family::C,
                PolyTag::VC => Family::VC,
                PolyTag::Harmonic(l) => Family::Harmonic(l),
                PolyTag::UContract => Family::UContract,
            };
            push(fam, dim)?;
        }
    }
    let dimension = families.iter().map(|f| f.dimension).sum();
    Ok(KernelDescription { families, dimension })
}

/// Same as [`classify_sbo_space`] but the differential part is obtained by
/// constructing the polynomial solutions and certifying their rank.
pub fn classify_sbo_space_constructive(cfg: &PairConfig, pt: &ParamPoint) -> Result<KernelDescription> {
    let mut d = classify_sbo_space(cfg, pt)?;
    if lattice_flags(cfg, pt).in_slash_set {
        let sp = classify_poly_space(cfg, pt)?;
        let r = crate::fourier_verifier::poly_rank(&sp.basis);
        let claimed: usize = d.families.iter().filter(|f| f.family != Family::B).map(|f| f.dimension).sum();
        if r != claimed {
            return Err(Error::Numeric(format!("constructed rank {r} differs from {claimed}")));
        }
        d.dimension = r + usize::from(d.families.iter().any(|f| f.family == Family::B));
    }
    Ok(d)
}

/// `dimension == multiplicity` at `pt`.
pub fn dimension_identity(cfg: &PairConfig, pt: &ParamPoint) -> Result<(usize, u32)> {
    Ok((classify_sbo_space(cfg, pt)?.dimension, multiplicity(cfg, pt)?))
}

pub fn smooth_json(k: &SmoothKernel) -> Json {
    json!({"family": "A", "exponent_N": fmt_q(&k.a), "exponent_Xpp": fmt_q(&k.b),
           "normalization": k.normalization.to_string(), "scale": k.scale})
}

pub fn singular_json(k: &SingularKernel) -> Json {
    json!({
        "family": "B", "l": k.l, "c_B": k.c_b.to_string(), "c_B_order": k.c_b_order,
        "support": k.support(), "finite": k.is_finite(), "nonzero": k.is_nonzero(), "groups": k.groups,
        "terms": k.terms.iter().map(|t| json!({
            "k": t.k, "i": t.i, "j": t.j, "rational": fmt_q(&t.rational),
            "effective": t.effective.to_string(), "effective_order": t.effective_order,
            "radial_is_delta": t.radial_is_delta,
        })).collect::<Vec<_>>(),
    })
}

pub fn differential_json(k: &DifferentialKernel) -> Json {
    json!({
        "family": k.family, "k": k.k,
        "terms": k.terms.iter().map(|t| json!({"h": t.h, "i": t.i, "z_order": t.z_order, "coef": fmt_q(&t.coef)})).collect::<Vec<_>>(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::faa_di_bruno_quadratic;
    use crate::fourier_verifier::uhat_c;
    use crate::hypercomplex::Algebra;
    use crate::pair_config::FCase;
    use approx::assert_relative_eq;

    fn cfg(a: Algebra, n: usize, m: usize) -> PairConfig {
        PairConfig::new(a, n, m, FCase::Trivial).unwrap()
    }

    #[test]
    fn ua_spot_value() {
        let c = cfg(Algebra::C, 1, 0);
        let k = SmoothKernel::u_a(&c, &ParamPoint::ints(2, 0)).unwrap();
        assert_eq!((k.a.clone(), k.b.clone()), (qi(-2), qi(1)));
        let (u, g) = k.eval(&c, &[1.0, 0.0, 0.0]).unwrap();
        // 1/(Γ(3/2)Γ(3/2)) · N^{-2}|X| at N = |X| = 1
        assert_relative_eq!(u, 4.0 / std::f64::consts::PI, max_relative = 1e-14);
        assert!(g.iter().all(|v| v.is_finite()));
        assert!(k.eval(&c, &[0.0, 0.0, 1.0]).is_err());
    }

    #[test]
    fn ua_constant_when_exponents_vanish() {
        let c = cfg(Algebra::H, 2, 1);
        let pt = ParamPoint::new(c.rho.clone(), -c.rho1.clone());
        let k = SmoothKernel::u_a(&c, &pt).unwrap();
        assert!(k.a.is_zero() && k.b.is_zero());
        let v: Vec<f64> = sample_points(&c, 5, 1).iter().map(|x| k.eval(&c, x).unwrap().0).collect();
        assert!(v.iter().all(|x| (x - v[0]).abs() < 1e-14));
    }

    #[test]
    fn ua_solves_the_position_system() {
        for c in [cfg(Algebra::C, 2, 1), cfg(Algebra::H, 2, 1), cfg(Algebra::H, 1, 0), cfg(Algebra::C, 3, 1)] {
            let pt = ParamPoint::new(q(7, 3), q(2, 5));
            let k = SmoothKernel::u_a(&c, &pt).unwrap();
            let r = verify_invariance_pointwise(&c, &pt, &k, 40, 7, Exec::Auto).unwrap();
            assert!(r.max_residual() < 1e-10, "{}: {r:?}", c.label());
            let mut bad = k.clone();
            bad.b += qi(1);
            let r = verify_invariance_pointwise(&c, &pt, &bad, 40, 7, Exec::Sequential).unwrap();
            assert!(r.max_euler > 1e-3);
        }
    }

    #[test]
    fn ub_small_l() {
        let c = cfg(Algebra::C, 2, 1);
        // l = 0: single term
        let pt = ParamPoint::new(-&c.rho + &c.rho1 - q(1, 3), q(1, 3));
        let b = ub_expansion(&c, &pt).unwrap();
        assert_eq!(b.terms.len(), 1);
        assert_eq!(b.terms[0].rational, qi(1));
        // l = 1
        let pt = ParamPoint::new(-&c.rho + &c.rho1 - q(1, 3) - qi(2), q(1, 3));
        let b = ub_expansion(&c, &pt).unwrap();
        let s = &pt.nu + &c.rho1;
        let t = b.terms.iter().find(|t| (t.k, t.i, t.j) == (0, 1, 0)).unwrap();
        assert_eq!(t.rational, qi(2 * c.p2 as i64) * qi(-2) * (&s / qi(2)));
        let top = b.terms.iter().find(|t| t.k == 1).unwrap();
        assert_eq!(top.rational, qi(1));
        assert!(ub_expansion(&c, &ParamPoint::ints(0, 0)).is_err());
    }

    #[test]
    fn ub_matches_faa_di_bruno() {
        let c = cfg(Algebra::H, 2, 1);
        for l in 0..3u32 {
            let nu = q(3, 7);
            let pt = ParamPoint::new(-&c.rho + &c.rho1 - &nu - qi(2 * l as i64), nu.clone());
            let b = ub_expansion(&c, &pt).unwrap();
            let sh = (&nu + &c.rho1) / qi(2);
            for t in &b.terms {
                let n = l - t.k;
                let outer = pow2(2 * n as i64) * factorial(l as u64)
                    * poch(&(qi(t.k as i64) + q(c.p2 as i64, 2)), n as u64)
                    / factorial(t.k as u64);
                let fdb = &faa_di_bruno_quadratic(&sh, n)[&(t.i, t.j)] / factorial(n as u64);
                assert_eq!(t.rational, outer * fdb);
            }
        }
    }

    #[test]
    fn uc_transform_is_uhat() {
        for c in [cfg(Algebra::C, 2, 1), cfg(Algebra::H, 1, 0), cfg(Algebra::H, 2, 1)] {
            for k in 0..3 {
                let nu = q(1, 3);
                let pt = ParamPoint::new(&nu + &c.rho1 - &c.rho - qi(2 * k), nu);
                let kern = uc_kernel(&c, &pt).unwrap();
                assert!(kern.terms.iter().any(|t| !t.coef.is_zero()));
                assert_eq!(kernel_fourier(&c, &kern), uhat_c(&c, &pt).unwrap());
            }
        }
        let c = PairConfig::new(Algebra::C, 2, 0, FCase::FullUnitary).unwrap();
        let pt = ParamPoint::new(qi(1) + &c.rho1 - &c.rho - qi(6), qi(1));
        let v = vc_kernel(&c, &pt).unwrap();
        assert_eq!(kernel_fourier(&c, &v), crate::fourier_verifier::vhat_c(&c, &pt).unwrap());
    }

    #[test]
    fn supports() {
        let c = cfg(Algebra::C, 2, 1);
        assert_eq!(support_of(&Family::A, &c, &ParamPoint::ints(-3, -2)).unwrap(), Support::Empty);
        assert_eq!(support_of(&Family::A, &c, &ParamPoint::ints(0, 0)).unwrap(), Support::Nbar);
        assert!(support_of(&Family::B, &c, &ParamPoint::ints(0, 0)).is_err());
    }

    #[test]
    fn classification_examples() {
        let c = cfg(Algebra::C, 2, 1);
        let d = classify_sbo_space(&c, &ParamPoint::ints(0, 0)).unwrap();
        assert_eq!((d.labels(), d.dimension), (vec!["A".to_string()], 1));
        let d = classify_sbo_space(&c, &ParamPoint::ints(-3, -2)).unwrap();
        assert_eq!((d.labels(), d.dimension), (vec!["B".to_string(), "C".to_string()], 2));
        let h = cfg(Algebra::H, 1, 0);
        let d = classify_sbo_space_constructive(&h, &ParamPoint::ints(-5, 5)).unwrap();
        assert_eq!((d.labels(), d.dimension), (vec!["C".to_string(), "Harmonic(2)".to_string()], 6));
    }

    #[test]
    fn ub_pole_residues_cancel_within_groups() {
        // a point of L where several summands carry simple poles
        let c = cfg(Algebra::H, 2, 1);
        let pt = ParamPoint::ints(-19, -3);
        let b = ub_expansion(&c, &pt).unwrap();
        assert!(b.terms.iter().any(|t| t.effective_order < 0));
        assert!(b.is_finite() && b.is_nonzero());
        let g = b.groups.iter().find(|g| g.radial_pole && g.value == GroupValue::Nonlocal).unwrap();
        // the summands with poles in that group, and a broken copy of their weights
        let zero_ord: Vec<&SingularTerm> = b.terms.iter().filter(|t| t.k == g.k && t.effective_order < 0).collect();
        assert!(zero_ord.len() >= 2, "cancellation needs at least two summands");
        let is: Vec<u32> = zero_ord.iter().map(|t| t.i).collect();
        let w: Vec<Q> = zero_ord.iter().map(|t| t.rational.clone()).collect();
        let rows = residue_rows(&c, &is, crate::rat::as_i64(&(&pt.nu + qi((b.l - g.k) as i64))).unwrap() as u32);
        assert!(combination_vanishes(&rows, &w));
        let mut bad = w.clone();
        bad[0] *= qi(2);
        assert!(!combination_vanishes(&rows, &bad));
    }
}
