//! Exact ℂ / ℍ / 𝕆 arithmetic, the H-type bracket and J-map, the group law
//! and the inversion `σ` on `n̄ = F^n ⊕ Im F`.
//!
//! Multiplication is the Cayley–Dickson doubling
//! `(a,b)(c,d) = (ac − d̄b, da + bc̄)` applied recursively from ℝ, which gives
//! the usual ℂ and ℍ (`ij = k`) and a fixed octonion table.

use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::rat::{fmt_q, parse_q, qi, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Algebra {
    R,
    C,
    H,
    O,
}

impl Algebra {
    pub fn dim(self) -> usize {
        match self {
            Algebra::R => 1,
            Algebra::C => 2,
            Algebra::H => 4,
            Algebra::O => 8,
        }
    }

    /// `q = dim Im F`
    pub fn q(self) -> usize {
        self.dim() - 1
    }

    pub fn tag(self) -> &'static str {
        match self {
            Algebra::R => "R",
            Algebra::C => "C",
            Algebra::H => "H",
            Algebra::O => "O",
        }
    }

    pub fn from_tag(s: &str) -> Result<Self> {
        match s.trim() {
            "R" | "r" => Ok(Algebra::R),
            "C" | "c" => Ok(Algebra::C),
            "H" | "h" => Ok(Algebra::H),
            "O" | "o" => Ok(Algebra::O),
            other => Err(Error::Parse(format!("unknown algebra '{other}'"))),
        }
    }
}

/// Anything Cayley–Dickson can be run over.  Implemented for `Q`, `f64` and
/// polynomials.
pub trait Ring:
    Clone + Zero + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
}
impl<T> Ring for T where
    T: Clone + Zero + Add<Output = T> + Sub<Output = T> + Mul<Output = T> + Neg<Output = T>
{
}

pub fn cd_conj<T: Ring>(a: &[T]) -> Vec<T> {
    a.iter()
        .enumerate()
        .map(|(i, x)| if i == 0 { x.clone() } else { -x.clone() })
        .collect()
}

pub fn cd_mul<T: Ring>(a: &[T], b: &[T]) -> Vec<T> {
    let n = a.len();
    assert_eq!(n, b.len());
    assert!(n.is_power_of_two());
    if n == 1 {
        return vec![a[0].clone() * b[0].clone()];
    }
    let h = n / 2;
    let (a1, a2) = a.split_at(h);
    let (b1, b2) = b.split_at(h);
    let left = vsub(&cd_mul(a1, b1), &cd_mul(&cd_conj(b2), a2));
    let right = vadd(&cd_mul(b2, a1), &cd_mul(a2, &cd_conj(b1)));
    left.into_iter().chain(right).collect()
}

fn vadd<T: Ring>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(x, y)| x.clone() + y.clone()).collect()
}

fn vsub<T: Ring>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(x, y)| x.clone() - y.clone()).collect()
}

/// Element of F with exact coordinates in the basis `1, e1, …`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HNum {
    pub alg: Algebra,
    pub c: Vec<Q>,
}

impl HNum {
    pub fn zero(alg: Algebra) -> Self {
        HNum { alg, c: vec![Q::zero(); alg.dim()] }
    }

    pub fn unit(alg: Algebra, i: usize) -> Self {
        let mut z = Self::zero(alg);
        z.c[i] = Q::one();
        z
    }

    pub fn real(alg: Algebra, r: Q) -> Self {
        let mut z = Self::zero(alg);
        z.c[0] = r;
        z
    }

    pub fn from_ints(alg: Algebra, v: &[i64]) -> Self {
        let mut z = Self::zero(alg);
        for (i, x) in v.iter().enumerate() {
            z.c[i] = qi(*x);
        }
        z
    }

    pub fn conj(&self) -> Self {
        HNum { alg: self.alg, c: cd_conj(&self.c) }
    }

    pub fn re(&self) -> Q {
        self.c[0].clone()
    }

    pub fn im(&self) -> Self {
        let mut z = self.clone();
        z.c[0] = Q::zero();
        z
    }

    pub fn norm2(&self) -> Q {
        self.c.iter().map(|x| x * x).sum()
    }

    pub fn scale(&self, s: &Q) -> Self {
        HNum { alg: self.alg, c: self.c.iter().map(|x| x * s).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }

    pub fn inv(&self) -> Result<Self> {
        let n = self.norm2();
        if n.is_zero() {
            return Err(Error::Precondition("inverse of zero".into()));
        }
        Ok(self.conj().scale(&n.recip()))
    }
}

impl Add for &HNum {
    type Output = HNum;
    fn add(self, o: &HNum) -> HNum {
        HNum { alg: self.alg, c: vadd(&self.c, &o.c) }
    }
}

impl Sub for &HNum {
    type Output = HNum;
    fn sub(self, o: &HNum) -> HNum {
        HNum { alg: self.alg, c: vsub(&self.c, &o.c) }
    }
}

impl Neg for &HNum {
    type Output = HNum;
    fn neg(self) -> HNum {
        HNum { alg: self.alg, c: self.c.iter().map(|x| -x).collect() }
    }
}

pub fn mul(a: &HNum, b: &HNum) -> HNum {
    HNum { alg: a.alg, c: cd_mul(&a.c, &b.c) }
}

/// `⟨X,Y⟩ = Re Σ X_a conj(Y_a)`
pub fn inner(x: &[HNum], y: &[HNum]) -> Q {
    x.iter().zip(y).map(|(a, b)| mul(a, &b.conj()).re()).sum()
}

pub fn norm2(x: &[HNum]) -> Q {
    x.iter().map(|a| a.norm2()).sum()
}

fn sum_xy_star(x: &[HNum], y: &[HNum]) -> HNum {
    let alg = x.first().map(|a| a.alg).unwrap_or(Algebra::C);
    x.iter().zip(y).fold(HNum::zero(alg), |acc, (a, b)| &acc + &mul(a, &b.conj()))
}

/// `[X,Y] = 4 Im(X Y*)`
pub fn bracket(x: &[HNum], y: &[HNum]) -> HNum {
    sum_xy_star(x, y).im().scale(&qi(4))
}

/// `J_Z X = −4 Z X` (left multiplication, componentwise).
pub fn j_map(z: &HNum, x: &[HNum]) -> Vec<HNum> {
    x.iter().map(|a| mul(z, a).scale(&qi(-4))).collect()
}

/// A point `(X, Z)` of `n̄`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NilPoint {
    pub alg: Algebra,
    pub x: Vec<HNum>,
    pub z: HNum,
}

impl NilPoint {
    pub fn origin(alg: Algebra, n: usize) -> Self {
        NilPoint { alg, x: vec![HNum::zero(alg); n], z: HNum::zero(alg) }
    }

    /// Real coordinates: `X` block by block, then `Im Z`.
    pub fn coords(&self) -> Vec<Q> {
        let mut v: Vec<Q> = self.x.iter().flat_map(|a| a.c.iter().cloned()).collect();
        v.extend(self.z.c[1..].iter().cloned());
        v
    }

    pub fn from_coords(alg: Algebra, n: usize, v: &[Q]) -> Result<Self> {
        let d = alg.dim();
        if v.len() != n * d + d - 1 {
            return Err(Error::InvalidConfig(format!(
                "expected {} coordinates, got {}",
                n * d + d - 1,
                v.len()
            )));
        }
        let x = (0..n).map(|a| HNum { alg, c: v[a * d..(a + 1) * d].to_vec() }).collect();
        let mut z = HNum::zero(alg);
        for j in 1..d {
            z.c[j] = v[n * d + j - 1].clone();
        }
        Ok(NilPoint { alg, x, z })
    }

    /// `N⁴ = |X|⁴ + |Z|²`
    pub fn n4(&self) -> Q {
        let x2 = norm2(&self.x);
        &x2 * &x2 + self.z.norm2()
    }

    pub fn to_json(&self) -> Value {
        let x: Vec<Vec<String>> = self.x.iter().map(|a| a.c.iter().map(fmt_q).collect()).collect();
        let z: Vec<String> = self.z.c[1..].iter().map(fmt_q).collect();
        json!({ "algebra": self.alg.tag(), "x": x, "z": z })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = || Error::Parse("malformed point JSON".into());
        let alg = Algebra::from_tag(v["algebra"].as_str().ok_or_else(bad)?)?;
        let d = alg.dim();
        let parse_list = |v: &Value| -> Result<Vec<Q>> {
            v.as_array().ok_or_else(bad)?.iter().map(|s| parse_q(s.as_str().ok_or_else(bad)?)).collect()
        };
        let mut x = Vec::new();
        for blk in v["x"].as_array().ok_or_else(bad)? {
            let c = parse_list(blk)?;
            if c.len() != d {
                return Err(bad());
            }
            x.push(HNum { alg, c });
        }
        let zc = parse_list(&v["z"])?;
        if zc.len() != d - 1 {
            return Err(bad());
        }
        let mut z = HNum::zero(alg);
        z.c[1..].clone_from_slice(&zc);
        Ok(NilPoint { alg, x, z })
    }
}

/// `(X,Z)(Y,W) = (X+Y, Z+W+2 Im(XY*))`
pub fn group_product(a: &NilPoint, b: &NilPoint) -> NilPoint {
    let x = a.x.iter().zip(&b.x).map(|(u, v)| u + v).collect();
    let cross = sum_xy_star(&a.x, &b.x).im().scale(&qi(2));
    let z = &(&a.z + &b.z) + &cross;
    NilPoint { alg: a.alg, x, z }
}

pub fn group_inverse(a: &NilPoint) -> NilPoint {
    NilPoint { alg: a.alg, x: a.x.iter().map(|u| -u).collect(), z: -&a.z }
}

/// `σ(X,Z) = ((¼J_Z − |X|²)X / N⁴, −Z / N⁴)`; undefined at the origin.
pub fn sigma(p: &NilPoint) -> Result<NilPoint> {
    let n4 = p.n4();
    if n4.is_zero() {
        return Err(Error::Precondition("sigma is undefined at the origin".into()));
    }
    let inv = n4.recip();
    let x2 = norm2(&p.x);
    let jx = j_map(&p.z, &p.x);
    let x = jx
        .iter()
        .zip(&p.x)
        .map(|(j, a)| (&j.scale(&Q::new(1.into(), 4.into())) - &a.scale(&x2)).scale(&inv))
        .collect();
    let z = p.z.scale(&-inv);
    Ok(NilPoint { alg: p.alg, x, z })
}

/// Integer structure constants of the H-type algebra in the standard bases
/// `S_a` (block `a / dim`, unit `a % dim`) and `T_j = e_{j+1}`.
#[derive(Clone, Debug)]
pub struct Structure {
    pub alg: Algebra,
    pub n: usize,
    pub p: usize,
    pub q: usize,
    /// `jc[j][a][b] = ⟨J_{T_j} S_a, S_b⟩`
    pub jc: Vec<Vec<Vec<i64>>>,
    /// `br[a][b][j] = ⟨[S_a, S_b], T_j⟩`
    pub br: Vec<Vec<Vec<i64>>>,
}

fn basis_vec(alg: Algebra, n: usize, a: usize) -> Vec<HNum> {
    let d = alg.dim();
    let mut v = vec![HNum::zero(alg); n];
    v[a / d] = HNum::unit(alg, a % d);
    v
}

fn to_i64(x: &Q) -> i64 {
    crate::rat::as_i64(x).expect("structure constants are integers")
}

impl Structure {
    pub fn new(alg: Algebra, n: usize) -> Self {
        let d = alg.dim();
        let p = n * d;
        let q = d - 1;
        let basis: Vec<Vec<HNum>> = (0..p).map(|a| basis_vec(alg, n, a)).collect();
        let t: Vec<HNum> = (0..q).map(|j| HNum::unit(alg, j + 1)).collect();
        let jc = t
            .iter()
            .map(|tj| {
                basis
                    .iter()
                    .map(|sa| {
                        let js = j_map(tj, sa);
                        basis.iter().map(|sb| to_i64(&inner(&js, sb))).collect()
                    })
                    .collect()
            })
            .collect();
        let br = basis
            .iter()
            .map(|sa| {
                basis
                    .iter()
                    .map(|sb| {
                        let b = bracket(sa, sb);
                        (0..q).map(|j| to_i64(&b.c[j + 1])).collect()
                    })
                    .collect()
            })
            .collect();
        Structure { alg, n, p, q, jc, br }
    }
}

/// Signed permutations of `e1..e7` that are automorphisms of the octonion
/// table in use (a finite subgroup of G₂).
pub fn octonion_sign_automorphisms() -> &'static [(Vec<usize>, Vec<i64>)] {
    use std::sync::OnceLock;
    static CELL: OnceLock<Vec<(Vec<usize>, Vec<i64>)>> = OnceLock::new();
    CELL.get_or_init(|| {
        // table[a][b] = (sign, index) with e_a e_b = sign e_index
        let mut table = [[(0i64, 0usize); 8]; 8];
        for a in 0..8 {
            for b in 0..8 {
                let mut ea = vec![0i64; 8];
                let mut eb = vec![0i64; 8];
                ea[a] = 1;
                eb[b] = 1;
                let prod = cd_mul(&ea, &eb);
                let idx = prod.iter().position(|&x| x != 0).unwrap();
                table[a][b] = (prod[idx], idx);
            }
        }
        let mut out = Vec::new();
        let mut perm: Vec<usize> = (1..8).collect();
        permutations(&mut perm, 0, &mut |perm| {
            let mut img = [0usize; 8];
            img[1..8].copy_from_slice(perm);
            for signs in 0u32..128 {
                let s = |i: usize| if i == 0 { 1 } else if signs >> (i - 1) & 1 == 1 { -1 } else { 1 };
                let ok = (1..8).all(|a| {
                    (1..8).all(|b| {
                        let (sab, c) = table[a][b];
                        let (simg, cimg) = table[img[a]][img[b]];
                        cimg == img[c] && s(a) * s(b) * simg == sab * s(c)
                    })
                });
                if ok {
                    let sv = (0..8).map(s).collect();
                    out.push((img.to_vec(), sv));
                }
            }
        });
        out
    })
}

fn permutations(v: &mut Vec<usize>, k: usize, f: &mut dyn FnMut(&[usize])) {
    if k == v.len() {
        f(v);
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permutations(v, k + 1, f);
        v.swap(k, i);
    }
}
