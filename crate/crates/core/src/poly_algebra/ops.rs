//! Builders for the concrete operators on `n̄`: Laplacians, Euler fields,
//! the H-type vector fields `∂_{J_Z S}`, `∂_{[S,X]}`, …, the position-side
//! invariance system and its Fourier-picture counterpart.
//!
//! Coordinates: `X` block by block (so `X′` occupies `0..p′` and `X″`
//! occupies `p′..p`), then `Z` at `p..p+q`.

use num_traits::Zero;

use super::diffop::DiffOp;
use super::poly::Poly;
use crate::error::{Error, Result};
use crate::hypercomplex::Structure;
use crate::pair_config::PairConfig;
use crate::rat::{q, qi, Q};

/// The two displayed forms of the Fourier-picture system.  They differ in the
/// `∂_S` coefficient of the `𝔳′` equation and in the sign of the
/// `∂_{J_T X} Δ_𝔳` term of the `𝔷` equation.  The exact Fourier transform of
/// the position-side system (see [`Ops::fourier_exact_dv`]) agrees with
/// `Transformed`; see the tests of this module and of the verifier.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    /// `∂_S` coefficient `2(ν+ρ′−1)`, `−¼ ∂_{J_T X} Δ_𝔳`
    Transformed,
    /// `∂_S` coefficient `2(ν+ρ′+q−2)`, `+¼ ∂_{J_T X} Δ_𝔳`
    Listed,
}

pub struct Ops<'a> {
    pub cfg: &'a PairConfig,
    pub st: Structure,
}

impl<'a> Ops<'a> {
    pub fn new(cfg: &'a PairConfig) -> Self {
        Ops { cfg, st: Structure::new(cfg.alg, cfg.n) }
    }

    pub fn p(&self) -> usize {
        self.cfg.p
    }

    pub fn q(&self) -> usize {
        self.cfg.q
    }

    pub fn nvars(&self) -> usize {
        self.cfg.p + self.cfg.q
    }

    pub fn zi(&self, j: usize) -> usize {
        self.cfg.p + j
    }

    pub fn x(&self, a: usize) -> Poly {
        Poly::var(a)
    }

    pub fn z(&self, j: usize) -> Poly {
        Poly::var(self.zi(j))
    }

    /// Weighted degree: `X` coordinates 1, `Z` coordinates 2.
    pub fn weights(&self) -> Vec<u32> {
        (0..self.nvars()).map(|i| if i < self.p() { 1 } else { 2 }).collect()
    }

    pub fn var_names(&self) -> Vec<String> {
        let c = self.cfg;
        (0..self.nvars())
            .map(|i| {
                if i < c.p1 {
                    format!("xp{i}")
                } else if i < c.p {
                    format!("xpp{}", i - c.p1)
                } else {
                    format!("z{}", i - c.p)
                }
            })
            .collect()
    }

    fn sq_sum(vars: impl Iterator<Item = usize>) -> Poly {
        vars.fold(Poly::zero(), |acc, i| acc + Poly::var(i).pow(2))
    }

    pub fn x2(&self) -> Poly {
        Self::sq_sum(0..self.p())
    }

    pub fn xp2(&self) -> Poly {
        Self::sq_sum(0..self.cfg.p1)
    }

    pub fn xpp2(&self) -> Poly {
        Self::sq_sum(self.cfg.p1..self.p())
    }

    pub fn z2(&self) -> Poly {
        Self::sq_sum(self.p()..self.nvars())
    }

    pub fn n4(&self) -> Poly {
        self.x2().pow(2) + self.z2()
    }

    fn lap(vars: impl Iterator<Item = usize>) -> DiffOp {
        vars.fold(DiffOp::zero(), |acc, i| acc + DiffOp::d(i).compose(&DiffOp::d(i)))
    }

    pub fn lap_v(&self) -> DiffOp {
        Self::lap(0..self.p())
    }

    pub fn lap_vp(&self) -> DiffOp {
        Self::lap(0..self.cfg.p1)
    }

    pub fn lap_vpp(&self) -> DiffOp {
        Self::lap(self.cfg.p1..self.p())
    }

    pub fn box_z(&self) -> DiffOp {
        Self::lap(self.p()..self.nvars())
    }

    pub fn euler_v(&self) -> DiffOp {
        DiffOp::field(&(0..self.p()).map(|i| (i, Poly::var(i))).collect::<Vec<_>>())
    }

    pub fn euler_z(&self) -> DiffOp {
        DiffOp::field(&(self.p()..self.nvars()).map(|i| (i, Poly::var(i))).collect::<Vec<_>>())
    }

    /// `E = E_𝔳 + 2 E_𝔷`
    pub fn euler(&self) -> DiffOp {
        self.euler_v() + self.euler_z().scale(&qi(2))
    }

    // --- vectors with polynomial components ---------------------------------

    /// `Σ v_b ∂_{x_b}`
    pub fn v_field(&self, v: &[Poly]) -> DiffOp {
        DiffOp::field(&v.iter().cloned().enumerate().collect::<Vec<_>>())
    }

    /// `Σ w_j ∂_{z_j}`
    pub fn z_field(&self, w: &[Poly]) -> DiffOp {
        DiffOp::field(&w.iter().cloned().enumerate().map(|(j, c)| (self.zi(j), c)).collect::<Vec<_>>())
    }

    pub fn x_vec(&self) -> Vec<Poly> {
        (0..self.p()).map(Poly::var).collect()
    }

    pub fn z_vec(&self) -> Vec<Poly> {
        (0..self.q()).map(|j| self.z(j)).collect()
    }

    pub fn unit_v(&self, s: usize) -> Vec<Poly> {
        (0..self.p()).map(|b| Poly::constant(if b == s { qi(1) } else { qi(0) })).collect()
    }

    pub fn unit_z(&self, t: usize) -> Vec<Poly> {
        (0..self.q()).map(|j| Poly::constant(if j == t { qi(1) } else { qi(0) })).collect()
    }

    /// `J_W V` for `W ∈ 𝔷`, `V ∈ 𝔳` given by components.
    pub fn j_vec(&self, w: &[Poly], v: &[Poly]) -> Vec<Poly> {
        let mut out = vec![Poly::zero(); self.p()];
        for (j, wj) in w.iter().enumerate() {
            if wj.is_zero() {
                continue;
            }
            for (c, vc) in v.iter().enumerate() {
                if vc.is_zero() {
                    continue;
                }
                let prod = wj * vc;
                for (b, slot) in out.iter_mut().enumerate() {
                    let k = self.st.jc[j][c][b];
                    if k != 0 {
                        slot.add_scaled(&prod, &qi(k));
                    }
                }
            }
        }
        out
    }

    /// `[U, V] ∈ 𝔷` by components.
    pub fn br_vec(&self, u: &[Poly], v: &[Poly]) -> Vec<Poly> {
        let mut out = vec![Poly::zero(); self.q()];
        for (a, ua) in u.iter().enumerate() {
            if ua.is_zero() {
                continue;
            }
            for (b, vb) in v.iter().enumerate() {
                if vb.is_zero() {
                    continue;
                }
                let prod = ua * vb;
                for (j, slot) in out.iter_mut().enumerate() {
                    let k = self.st.br[a][b][j];
                    if k != 0 {
                        slot.add_scaled(&prod, &qi(k));
                    }
                }
            }
        }
        out
    }

    // --- position-side system --------------------------------------------------

    /// `(E − λ + ρ + ν + ρ′)`
    pub fn euler_eq(&self, lambda: &Q, nu: &Q) -> DiffOp {
        let c = self.cfg;
        self.euler() + DiffOp::scalar(-lambda + &c.rho + nu + &c.rho1)
    }

    /// Position-side `D_𝔳(S)` with `s = ν + ρ′`.
    pub fn dv_position(&self, s_idx: usize, s: &Q) -> DiffOp {
        let x = self.x_vec();
        let z = self.z_vec();
        let sv = self.unit_v(s_idx);
        let x2 = self.x2();
        let sx = self.br_vec(&sv, &x);
        let jzs = self.j_vec(&z, &sv);
        let jzx = self.j_vec(&z, &x);
        let s_jzx = self.br_vec(&sv, &jzx);
        let j_sx_x = self.j_vec(&sx, &x);
        DiffOp::mult(self.x(s_idx).scale(&(qi(2) * s)))
            + DiffOp::d(s_idx).lmul(&x2)
            + self.z_field(&sx).lmul(&x2).scale(&q(-1, 2))
            + self.v_field(&jzs).scale(&q(1, 4))
            + self.z_field(&s_jzx).scale(&q(1, 8))
            - self.v_field(&j_sx_x).scale(&q(1, 8))
    }

    /// Position-side `D_𝔷(T)` with `s = ν + ρ′`.
    pub fn dz_position(&self, t: usize, s: &Q) -> DiffOp {
        let x = self.x_vec();
        let z = self.z_vec();
        let tv = self.unit_z(t);
        let zt = self.z(t);
        let jtx = self.j_vec(&tv, &x);
        let jzx = self.j_vec(&z, &x);
        let jtjzx = self.j_vec(&tv, &jzx);
        DiffOp::mult(zt.scale(s)) - self.euler_v().lmul(&zt)
            + DiffOp::d(self.zi(t)).lmul(&self.n4())
            + self.v_field(&jtx).lmul(&self.x2()).scale(&q(1, 4))
            - self.v_field(&jtjzx).scale(&q(1, 16))
    }

    /// `−F(D_𝔳(S))` computed exactly in the Weyl algebra.
    pub fn fourier_exact_dv(&self, s_idx: usize, s: &Q) -> DiffOp {
        -self.dv_position(s_idx, s).fourier()
    }

    pub fn fourier_exact_dz(&self, t: usize, s: &Q) -> DiffOp {
        -self.dz_position(t, s).fourier()
    }

    /// `F(E − λ + ρ + ν + ρ′) = −(E + λ + ρ − ν − ρ′)`; returns the bracket.
    pub fn fourier_euler_eq(&self, lambda: &Q, nu: &Q) -> DiffOp {
        let c = self.cfg;
        self.euler() + DiffOp::scalar(lambda + &c.rho - nu - &c.rho1)
    }

    // --- Fourier-picture operators as displayed ---------------------------------

    /// `P_S = 1/16 Σ_j ∂_{J_{T_j} J_Z S} ∂_{T_j}`
    pub fn p_s(&self, s_idx: usize) -> DiffOp {
        let jzs = self.j_vec(&self.z_vec(), &self.unit_v(s_idx));
        let mut r = DiffOp::zero();
        for j in 0..self.q() {
            let f = self.v_field(&self.j_vec(&self.unit_z(j), &jzs));
            r = r + f.compose(&DiffOp::d(self.zi(j)));
        }
        r.scale(&q(1, 16))
    }

    /// `Q_S = 1/16 Σ_i ∂_{J_{[S,S_i]} X} ∂_{S_i}`
    pub fn q_s(&self, s_idx: usize) -> DiffOp {
        let x = self.x_vec();
        let sv = self.unit_v(s_idx);
        let mut r = DiffOp::zero();
        for i in 0..self.p() {
            let w = self.br_vec(&sv, &self.unit_v(i));
            let f = self.v_field(&self.j_vec(&w, &x));
            r = r + f.compose(&DiffOp::d(i));
        }
        r.scale(&q(1, 16))
    }

    /// `R_T = 1/16 Σ_j ∂_{J_{T_j} J_T X} ∂_{T_j}`
    pub fn r_t(&self, t: usize) -> DiffOp {
        let jtx = self.j_vec(&self.unit_z(t), &self.x_vec());
        let mut r = DiffOp::zero();
        for j in 0..self.q() {
            let f = self.v_field(&self.j_vec(&self.unit_z(j), &jtx));
            r = r + f.compose(&DiffOp::d(self.zi(j)));
        }
        r.scale(&q(1, 16))
    }

    /// `∂_{J_T X}`
    pub fn d_jtx(&self, t: usize) -> DiffOp {
        self.v_field(&self.j_vec(&self.unit_z(t), &self.x_vec()))
    }

    /// Fourier-picture `𝔳′` equation; `S` must lie in `𝔳′`.
    pub fn fourier_dv(&self, s_idx: usize, s: &Q, variant: Variant) -> Result<DiffOp> {
        if self.cfg.m == 0 {
            return Err(Error::Precondition("the 𝔳′ equations need m > 0".into()));
        }
        if s_idx >= self.cfg.p1 {
            return Err(Error::Precondition(format!("S index {s_idx} is not in 𝔳′")));
        }
        let coef = match variant {
            Variant::Transformed => qi(2) * (s - qi(1)),
            Variant::Listed => qi(2) * (s + qi(self.q() as i64) - qi(2)),
        };
        let lap = self.lap_v();
        let jzs = self.j_vec(&self.z_vec(), &self.unit_v(s_idx));
        let sx = self.br_vec(&self.unit_v(s_idx), &self.x_vec());
        Ok(DiffOp::d(s_idx).scale(&coef) - lap.lmul(&self.x(s_idx))
            - self.v_field(&jzs).compose(&lap).scale(&q(1, 2))
            + self.z_field(&sx).scale(&q(1, 4))
            + self.p_s(s_idx).scale(&qi(2))
            - self.q_s(s_idx).scale(&qi(2)))
    }

    /// Fourier-picture `𝔷` equation.
    pub fn fourier_dz(&self, t: usize, s: &Q, variant: Variant) -> DiffOp {
        let lap = self.lap_v();
        let sign = match variant {
            Variant::Transformed => q(-1, 4),
            Variant::Listed => q(1, 4),
        };
        let dt = DiffOp::d(self.zi(t));
        (self.euler_v() + DiffOp::scalar(s - qi(2))).compose(&dt)
            - (lap.compose(&lap) + self.box_z()).lmul(&self.z(t))
            + self.d_jtx(t).compose(&lap).scale(&sign)
            + self.r_t(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypercomplex::Algebra;
    use crate::pair_config::FCase;

    #[test]
    fn laplacian_of_norm() {
        let cfg = PairConfig::new(Algebra::H, 2, 1, FCase::Trivial).unwrap();
        let o = Ops::new(&cfg);
        assert_eq!(o.lap_v().apply(&o.x2()), Poly::constant(qi(16)));
        let x4 = o.x2().pow(2);
        assert_eq!(o.euler().apply(&x4), x4.scale(&qi(4)));
    }

    #[test]
    fn displayed_transform_matches_weyl_transform() {
        for (alg, n, m) in [(Algebra::C, 2, 1), (Algebra::H, 2, 1), (Algebra::C, 3, 2)] {
            let cfg = PairConfig::new(alg, n, m, FCase::FullUnitary).unwrap();
            let o = Ops::new(&cfg);
            let s = q(7, 3);
            for si in 0..cfg.p1 {
                assert_eq!(o.fourier_exact_dv(si, &s), o.fourier_dv(si, &s, Variant::Transformed).unwrap());
            }
            for t in 0..cfg.q {
                assert_eq!(o.fourier_exact_dz(t, &s), o.fourier_dz(t, &s, Variant::Transformed));
            }
        }
    }
}
