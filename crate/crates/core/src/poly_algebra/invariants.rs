//! `M′`-invariant polynomials: generators, harmonic polynomials in
//! `(p₁,p₂,p₃)`, and exact invariance checks under rational samples.

use num_traits::{One, Zero};

use super::ops::Ops;
use super::poly::{Mono, Poly};
use crate::error::{Error, Result};
use crate::hypercomplex::{cd_conj, cd_mul, mul, octonion_sign_automorphisms, Algebra, HNum, NilPoint};
use crate::linalg::nullspace;
use crate::pair_config::{FCase, PairConfig};
use crate::rat::{q, qi, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GeneratorCase {
    /// `|X′|², |X″|², Z` (ℂ)
    Complex,
    /// `|X′|², |X″|², |Z|², p₁, p₂, p₃` (ℍ, one-dimensional `X″`, trivial F)
    QuaternionTrivial,
    /// `|X′|², |X″|², |Z|², U·p` (ℍ, one-dimensional `X″`, `U(1)`)
    QuaternionU1,
    /// `|X′|², |X″|², |Z|²`
    Radial,
}

#[derive(Clone, Debug)]
pub struct InvariantGenerators {
    pub case: GeneratorCase,
    /// (name, polynomial, weighted degree)
    pub gens: Vec<(String, Poly, u32)>,
}

/// `p_j = ⟨T_j, conj(X″) Z X″⟩` for quaternionic configs with `n − m = 1`.
pub fn p_polys(cfg: &PairConfig) -> Result<[Poly; 3]> {
    if cfg.alg != Algebra::H || cfg.n - cfg.m != 1 {
        return Err(Error::Precondition("p₁,p₂,p₃ need ℍ with a one-dimensional X″ block".into()));
    }
    let o = Ops::new(cfg);
    let x: Vec<Poly> = (cfg.p1..cfg.p).map(Poly::var).collect();
    let mut z = vec![Poly::zero()];
    z.extend((0..3).map(|j| o.z(j)));
    let prod = cd_mul(&cd_mul(&cd_conj(&x), &z), &x);
    Ok([prod[1].clone(), prod[2].clone(), prod[3].clone()])
}

/// `q(p₁,p₂,p₃)` for a polynomial `q` in three variables.
pub fn substitute_p(q3: &Poly, cfg: &PairConfig) -> Result<Poly> {
    let p = p_polys(cfg)?;
    if q3.terms.keys().any(|m| m.max_var().is_some_and(|v| v > 2)) {
        return Err(Error::Precondition("q must be a polynomial in three variables".into()));
    }
    Ok(q3.substitute(&p))
}

pub fn invariant_generators(cfg: &PairConfig) -> InvariantGenerators {
    let o = Ops::new(cfg);
    let mut gens = Vec::new();
    if cfg.m > 0 {
        gens.push(("|X'|^2".to_string(), o.xp2(), 2));
    }
    gens.push(("|X''|^2".to_string(), o.xpp2(), 2));
    let case = if cfg.alg == Algebra::C {
        gens.push(("Z".into(), o.z(0), 2));
        GeneratorCase::Complex
    } else {
        gens.push(("|Z|^2".into(), o.z2(), 4));
        match (&cfg.f, p_polys(cfg)) {
            (FCase::Trivial, Ok(p)) => {
                for (j, pj) in p.into_iter().enumerate() {
                    gens.push((format!("p{}", j + 1), pj, 4));
                }
                GeneratorCase::QuaternionTrivial
            }
            (FCase::U1Direction(u), Ok(p)) => {
                let up = p.iter().zip(u.iter()).fold(Poly::zero(), |acc, (pj, uj)| acc + pj.scale(uj));
                gens.push(("U.p".into(), up, 4));
                GeneratorCase::QuaternionU1
            }
            _ => GeneratorCase::Radial,
        }
    };
    InvariantGenerators { case, gens }
}

/// Basis of the harmonic homogeneous polynomials of degree `ℓ` in three
/// variables (kernel of the Laplacian, computed exactly).
pub fn harmonic_basis(l: u32) -> Vec<Poly> {
    let monos = |d: i64| -> Vec<Mono> {
        if d < 0 {
            return vec![];
        }
        let d = d as u32;
        let mut v = Vec::new();
        for a in (0..=d).rev() {
            for b in (0..=d - a).rev() {
                v.push(Mono::from_dense(&[a, b, d - a - b]));
            }
        }
        v
    };
    let src = monos(l as i64);
    let dst = monos(l as i64 - 2);
    let images: Vec<Poly> = src
        .iter()
        .map(|m| {
            let p = Poly::monomial(m.clone(), Q::one());
            (0..3).fold(Poly::zero(), |acc, i| acc + p.derivative(i).derivative(i))
        })
        .collect();
    let rows: Vec<Vec<Q>> = dst
        .iter()
        .map(|t| images.iter().map(|img| img.terms.get(t).cloned().unwrap_or_else(Q::zero)).collect())
        .collect();
    nullspace(&rows, src.len())
        .into_iter()
        .map(|v| {
            let mut p = Poly::zero();
            for (c, m) in v.into_iter().zip(&src) {
                p.add_term(m.clone(), c);
            }
            p
        })
        .collect()
}

/// Linear coordinate map `v ↦ A v` on `n̄`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearMap {
    pub label: String,
    pub a: Vec<Vec<Q>>,
}

impl LinearMap {
    /// `f ∘ A`
    pub fn pull_back(&self, f: &Poly) -> Poly {
        let subs: Vec<Poly> = self
            .a
            .iter()
            .map(|row| {
                let mut p = Poly::zero();
                for (j, c) in row.iter().enumerate() {
                    p.add_term(Mono::var(j), c.clone());
                }
                p
            })
            .collect();
        f.substitute(&subs)
    }

    pub fn apply_f64(&self, v: &[f64]) -> Vec<f64> {
        self.a.iter().map(|row| row.iter().zip(v).map(|(c, x)| crate::rat::to_f64(c) * x).sum()).collect()
    }
}

type Matrix = Vec<Vec<HNum>>;

fn identity(alg: Algebra, k: usize) -> Matrix {
    (0..k)
        .map(|i| (0..k).map(|j| if i == j { HNum::real(alg, qi(1)) } else { HNum::zero(alg) }).collect())
        .collect()
}

/// Unitary samples acting on `F^k` from the right.
fn unitary_samples(alg: Algebra, k: usize, units: &[HNum], special: bool) -> Vec<(String, Matrix)> {
    let mut out = Vec::new();
    if k == 0 {
        return out;
    }
    for (ui, u) in units.iter().enumerate() {
        if special && alg == Algebra::C {
            if k < 2 {
                continue;
            }
            let mut m = identity(alg, k);
            m[0][0] = u.clone();
            m[1][1] = u.conj();
            out.push((format!("diag-det1-{ui}"), m));
        } else {
            let mut m = identity(alg, k);
            m[0][0] = u.clone();
            out.push((format!("diag-{ui}"), m));
        }
    }
    if k >= 2 {
        let mut r = identity(alg, k);
        r[0][0] = HNum::real(alg, q(3, 5));
        r[0][1] = HNum::real(alg, q(-4, 5));
        r[1][0] = HNum::real(alg, q(4, 5));
        r[1][1] = HNum::real(alg, q(3, 5));
        out.push(("rot01".into(), r));
        // signed swap keeps determinant one
        let mut s = identity(alg, k);
        s[0][0] = HNum::zero(alg);
        s[1][1] = HNum::zero(alg);
        s[0][1] = HNum::real(alg, qi(-1));
        s[1][0] = HNum::real(alg, qi(1));
        out.push(("swap01".into(), s));
    }
    out
}

fn unit_scalars(alg: Algebra) -> Vec<HNum> {
    match alg {
        Algebra::C => vec![
            HNum { alg, c: vec![q(3, 5), q(4, 5)] },
            HNum { alg, c: vec![q(5, 13), q(-12, 13)] },
        ],
        Algebra::H => vec![
            HNum { alg, c: vec![q(3, 5), q(4, 5), qi(0), qi(0)] },
            HNum { alg, c: vec![q(1, 2), q(1, 2), q(1, 2), q(1, 2)] },
            HNum { alg, c: vec![qi(0), qi(0), q(3, 5), q(4, 5)] },
        ],
        _ => vec![],
    }
}

/// Act by `(X′, X″, Z) ↦ (a X′ b, a X″ c, a Z a⁻¹)`.
fn act(pt: &NilPoint, m: usize, a: &HNum, b: &Matrix, c: &Matrix) -> NilPoint {
    let alg = pt.alg;
    let ax: Vec<HNum> = pt.x.iter().map(|v| mul(a, v)).collect();
    let right = |block: &[HNum], mat: &Matrix| -> Vec<HNum> {
        (0..block.len())
            .map(|j| block.iter().enumerate().fold(HNum::zero(alg), |acc, (i, v)| &acc + &mul(v, &mat[i][j])))
            .collect()
    };
    let mut x = right(&ax[..m], b);
    x.extend(right(&ax[m..], c));
    let z = mul(&mul(a, &pt.z), &a.inv().expect("unit"));
    NilPoint { alg, x, z }
}

fn matrix_of(cfg: &PairConfig, label: String, f: impl Fn(&NilPoint) -> NilPoint) -> LinearMap {
    let nv = cfg.p + cfg.q;
    let cols: Vec<Vec<Q>> = (0..nv)
        .map(|i| {
            let mut e = vec![Q::zero(); nv];
            e[i] = Q::one();
            let pt = NilPoint::from_coords(cfg.alg, cfg.n, &e).unwrap();
            f(&pt).coords()
        })
        .collect();
    let a = (0..nv).map(|r| (0..nv).map(|c| cols[c][r].clone()).collect()).collect();
    LinearMap { label, a }
}

/// Deterministic rational elements of `M′` acting linearly on `n̄`.
pub fn m_prime_samples(cfg: &PairConfig) -> Vec<LinearMap> {
    let alg = cfg.alg;
    let (m, k) = (cfg.m, cfg.n - cfg.m);
    let mut out = Vec::new();
    if alg == Algebra::O {
        let autos = octonion_sign_automorphisms();
        for idx in [1usize, 17, 200, 777, 1343] {
            let (perm, sign) = &autos[idx % autos.len()];
            let phi = |h: &HNum| {
                let mut r = HNum::zero(alg);
                for i in 0..8 {
                    r.c[perm[i]] = h.c[i].clone() * qi(sign[i]);
                }
                r
            };
            out.push(matrix_of(cfg, format!("g2-{idx}"), |p| NilPoint {
                alg,
                x: p.x.iter().map(phi).collect(),
                z: phi(&p.z),
            }));
        }
        return out;
    }
    let one = HNum::real(alg, qi(1));
    let units = unit_scalars(alg);
    let id_b = identity(alg, m);
    let id_c = identity(alg, k);
    for (i, a) in units.iter().enumerate() {
        out.push(matrix_of(cfg, format!("a{i}"), |p| act(p, m, a, &id_b, &id_c)));
    }
    for (name, b) in unitary_samples(alg, m, &units, false) {
        out.push(matrix_of(cfg, format!("b-{name}"), |p| act(p, m, &one, &b, &id_c)));
    }
    let c_samples: Vec<(String, Matrix)> = match &cfg.f {
        FCase::Trivial => vec![],
        FCase::FullUnitary => unitary_samples(alg, k, &units, false),
        FCase::TransitiveOther => unitary_samples(alg, k, &units, alg == Algebra::C),
        FCase::U1Direction(_) => {
            let u = cfg.f.direction().unwrap();
            let c = &HNum::real(alg, q(3, 5)) + &u.scale(&q(4, 5));
            let mut mat = identity(alg, k);
            for (i, row) in mat.iter_mut().enumerate() {
                row[i] = c.clone();
            }
            vec![("u1".into(), mat)]
        }
    };
    for (name, c) in c_samples {
        out.push(matrix_of(cfg, format!("c-{name}"), |p| act(p, m, &one, &id_b, &c)));
    }
    // one mixed element
    if let Some(a) = units.last() {
        let b = unitary_samples(alg, m, &units, false).into_iter().last().map(|x| x.1).unwrap_or(id_b);
        out.push(matrix_of(cfg, "mixed".into(), |p| act(p, m, a, &b, &id_c)));
    }
    out
}

pub fn m_prime_invariance_check(f: &Poly, samples: &[LinearMap]) -> bool {
    samples.iter().all(|g| &g.pull_back(f) == f)
}
