use super::*;
use crate::hypercomplex::Algebra;
use crate::pair_config::FCase;
use crate::rat::q;
use approx::assert_relative_eq;
use std::f64::consts::PI;

fn cfg(alg: Algebra, n: usize, m: usize) -> PairConfig {
    PairConfig::new(alg, n, m, FCase::Trivial).unwrap()
}

fn pt(l: Q, n: Q) -> ParamPoint {
    ParamPoint { lambda: l, nu: n }
}

/// Graded Gauss–Legendre on `(0, ∞)` through `r = t/(1−t)`, for 1-D oracles.
fn halfline_oracle(f: impl Fn(f64) -> f64) -> f64 {
    let mut total = 0.0;
    for j in 0..40 {
        let (lo, hi) = (0.5f64.powi(j + 2), 0.5f64.powi(j + 1));
        for (a, b) in [(lo, hi), (1.0 - hi, 1.0 - lo)] {
            let (x, w) = gauss_legendre(24, a, b).unwrap();
            for (t, w) in x.iter().zip(&w) {
                total += w * f(t / (1.0 - t)) / ((1.0 - t) * (1.0 - t));
            }
        }
    }
    total
}

#[test]
fn sphere_moment_examples() {
    assert_relative_eq!(sphere_moment(2, &[0, 0]).unwrap().to_f64(), 2.0 * PI, max_relative = 1e-14);
    assert_relative_eq!(sphere_moment(2, &[1, 0]).unwrap().to_f64(), PI, max_relative = 1e-14);
    let v = sphere_moment(4, &[1, 1, 0, 0]).unwrap();
    assert_eq!(v, Value::Exact { rat: q(1, 12), pi_half: 4 });
    assert!(sphere_moment(0, &[]).is_err());
}

#[test]
fn sphere_moments_match_product_rule() {
    for p in 1..=8usize {
        let mut alphas = vec![vec![0u32; p]];
        let mut a = vec![0u32; p];
        a[0] = 3;
        alphas.push(a);
        let mut a = vec![0u32; p];
        a[p - 1] = 1;
        a[0] += 2;
        alphas.push(a);
        if p >= 3 {
            let mut a = vec![0u32; p];
            a[0] = 1;
            a[1] = 1;
            a[2] = 1;
            alphas.push(a);
        }
        for al in alphas {
            let exact = sphere_moment(p, &al).unwrap().to_f64();
            let num = sphere_moment_numeric(p, &al, 6).unwrap();
            assert_relative_eq!(num, exact, max_relative = 1e-10);
        }
    }
}

#[test]
fn sphere_moment_s3_monte_carlo() {
    let (est, err) = sphere_monte_carlo(4, 400_000, 7, Exec::Auto, |w| w[0] * w[0] * w[1] * w[1]);
    let exact = PI * PI / 12.0;
    assert!((est - exact).abs() < 5.0 * err + 1e-4, "{est} vs {exact} ± {err}");
}

#[test]
fn weighted_moments() {
    // γ = 0 is the plain moment
    let a = sphere_moment_weighted(5, 2, &[1, 0, 2, 0, 1], 0.0).unwrap();
    assert_relative_eq!(a, sphere_moment(5, &[1, 0, 2, 0, 1]).unwrap().to_f64(), max_relative = 1e-13);
    // ∫|sin θ| dθ = 4
    assert_relative_eq!(sphere_moment_weighted(2, 1, &[0, 0], 1.0).unwrap(), 4.0, max_relative = 1e-13);
    let oracle: f64 = {
        let (x, w) = gauss_legendre(40, 0.0, PI).unwrap();
        2.0 * x.iter().zip(&w).map(|(t, w)| w * t.sin()).sum::<f64>()
    };
    assert_relative_eq!(oracle, 4.0, max_relative = 1e-12);
    for (p, p2, al, g) in [(4usize, 2usize, vec![1u32, 0, 1, 0], -1.5), (3, 1, vec![0, 1, 2], 0.7), (6, 3, vec![0, 0, 0, 1, 0, 0], -2.2)] {
        let exact = sphere_moment_weighted(p, p2, &al, g).unwrap();
        let num = sphere_moment_weighted_numeric(p, p2, &al, g, 24).unwrap();
        assert_relative_eq!(num, exact, max_relative = 1e-9);
    }
    assert!(matches!(sphere_moment_weighted(3, 1, &[0, 0, 2], -5.0), Err(Error::Precondition(_))));
    assert!(sphere_moment_weighted(3, 1, &[0, 0, 2], -4.999).is_ok());
}

#[test]
fn htype_total_mass_and_symmetry() {
    let nodes = PolarNodes { radial: 16, angular: 6 };
    let m = htype_surface_integral(2, 1, |_| 1.0, nodes).unwrap();
    assert_relative_eq!(m, 2.0 * PI * PI, max_relative = 1e-10);
    assert!(htype_surface_integral(2, 1, |x| x[0] * x[2] * x[2], nodes).unwrap().abs() < 1e-12);
    assert!(htype_surface_integral(4, 3, |x| x[1].powi(3) + x[5], nodes).unwrap().abs() < 1e-12);
}

#[test]
fn polar_coordinates_are_lebesgue() {
    let spec = QuadratureSpec::default();
    let g = TestFunction::gaussian(&[1.0, 1.0, 1.3]).unwrap().times_monomial(&[2, 0, 2]);
    assert!(polar_consistency(2, 1, &g, &spec).unwrap().pass);
    let g = TestFunction::gaussian(&[0.8, 0.8, 0.8, 0.8, 1.5, 1.5, 1.5]).unwrap().times_monomial(&[0, 2, 0, 0, 0, 0, 2]);
    let c = polar_consistency(4, 3, &g, &spec).unwrap();
    assert!(c.pass, "{c:?}");
}

#[test]
fn ua_pairing_agrees_with_direct_quadrature() {
    let spec = QuadratureSpec::default();
    let c = cfg(Algebra::C, 1, 0);
    let phi = TestFunction::gaussian(&[1.0, 0.6, 1.4]).unwrap();
    let a = ua_pairing(&c, &pt(qi(2), qi(0)), &phi, &spec).unwrap();
    let b = ua_pairing_direct(&c, 2.0, 0.0, &phi, &spec).unwrap();
    assert_relative_eq!(a, b, max_relative = 1e-4);

    let c = cfg(Algebra::C, 2, 1);
    let phi = TestFunction::gaussian(&[1.0, 1.0, 0.7, 0.7, 1.2]).unwrap().times_monomial(&[2, 0, 0, 2, 0]);
    let a = ua_pairing_f64(&c, 2.5, 0.5, &phi, &spec).unwrap();
    let b = ua_pairing_direct(&c, 2.5, 0.5, &phi, &spec).unwrap();
    assert_relative_eq!(a, b, max_relative = 1e-4);
}

#[test]
fn ua_pairing_parity_and_linearity() {
    let spec = QuadratureSpec::default();
    let c = cfg(Algebra::C, 2, 1);
    let g = TestFunction::gaussian(&[1.0, 0.8, 1.2, 0.9, 1.1]).unwrap();
    let scale = ua_pairing_f64(&c, 0.3, 0.7, &g, &spec).unwrap().abs().max(1.0);
    for i in 0..5 {
        let mut e = vec![0u32; 5];
        e[i] = 1;
        let odd = g.clone().times_monomial(&e);
        let v = ua_pairing_f64(&c, 0.3, 0.7, &odd, &spec).unwrap();
        assert!(v.abs() < 1e-10 * scale, "coordinate {i}: {v}");
    }
    let h = g.clone().times_monomial(&[0, 0, 2, 0, 2]);
    let sum = g.clone().scale(2.0).add(&h.clone().scale(-0.5));
    let lhs = ua_pairing_f64(&c, 0.3, 0.7, &sum, &spec).unwrap();
    let rhs = 2.0 * ua_pairing_f64(&c, 0.3, 0.7, &g, &spec).unwrap() - 0.5 * ua_pairing_f64(&c, 0.3, 0.7, &h, &spec).unwrap();
    assert_relative_eq!(lhs, rhs, max_relative = 1e-8, epsilon = 1e-12);
}

#[test]
fn ua_pairing_is_invariant_under_m_prime() {
    // a rotation of X′ (inside 𝔽^m) combined with a rotation of X″
    let spec = QuadratureSpec::default();
    let c = cfg(Algebra::C, 2, 1);
    let g = TestFunction::gaussian(&[1.0, 1.0, 0.6, 0.6, 1.1]).unwrap().times_monomial(&[1, 1, 0, 2, 0]);
    let (ca, sa) = (0.6, 0.8);
    let (cb, sb) = (5.0 / 13.0, 12.0 / 13.0);
    let m = vec![
        vec![ca, -sa, 0.0, 0.0, 0.0],
        vec![sa, ca, 0.0, 0.0, 0.0],
        vec![0.0, 0.0, cb, -sb, 0.0],
        vec![0.0, 0.0, sb, cb, 0.0],
        vec![0.0, 0.0, 0.0, 0.0, 1.0],
    ];
    let a = ua_pairing_f64(&c, 1.2, -0.4, &g, &spec).unwrap();
    let b = ua_pairing_f64(&c, 1.2, -0.4, &g.compose_linear(&m), &spec).unwrap();
    assert_relative_eq!(a, b, max_relative = 1e-8, epsilon = 1e-12);
}

#[test]
fn ua_pairing_below_backslash_range_is_unsupported() {
    let c = cfg(Algebra::C, 1, 0);
    let g = TestFunction::gaussian(&[1.0; 3]).unwrap();
    // b + p″ = λ − ρ + ν + ρ′ + p″ ≤ 0
    let e = ua_pairing_f64(&c, -3.0, 0.0, &g, &QuadratureSpec::default());
    assert!(matches!(e, Err(Error::Unsupported(_))));
}

#[test]
fn halfline_is_holomorphic_in_s() {
    // Cauchy: the mean of I(s)/Γ(s/2) around a circle equals its centre value
    let spec = QuadratureSpec::default();
    let g = TestFunction::gaussian(&[1.0, 0.5, 2.0]).unwrap().times_monomial(&[2, 0, 0]);
    let prof = polar_profile(2, 1, Weight::None, &g, &spec).unwrap();
    let smp = Sampled::new(&prof, 1.0, &spec).unwrap();
    let centre = Complex64::new(0.4, 0.0);
    let n = 64;
    let mut mean = Complex64::new(0.0, 0.0);
    for k in 0..n {
        let th = 2.0 * PI * k as f64 / n as f64;
        mean += smp.integral(centre + 0.3 * Complex64::from_polar(1.0, th)).unwrap();
    }
    mean /= n as f64;
    let at = smp.integral(centre).unwrap();
    assert!((mean - at).norm() < 1e-8 * at.norm(), "{mean} vs {at}");
}

#[test]
fn spherical_vector_integral_examples() {
    let spec = QuadratureSpec::default();
    let c = cfg(Algebra::C, 1, 0);
    let r = spherical_vector_integral_check(&c, &pt(qi(2), qi(0)), &spec).unwrap();
    assert_relative_eq!(r.expected, PI.powi(3) / 16.0, max_relative = 1e-12);
    assert!(r.pass, "{r:?}");
    let c = cfg(Algebra::C, 2, 1);
    let r = spherical_vector_integral_check(&c, &pt(qi(3), q(1, 2)), &spec).unwrap();
    assert!(r.pass, "{r:?}");
    // ν = λ + p″/2 is outside the region
    assert!(matches!(spherical_vector_integral_check(&c, &pt(qi(3), qi(4)), &spec), Err(Error::Precondition(_))));
}

#[test]
fn ks_m0_examples() {
    let spec = QuadratureSpec::default();
    let r = ks_m0_check(&cfg(Algebra::C, 1, 0), &qi(2), &spec).unwrap();
    assert_relative_eq!(r.expected, 2.0, max_relative = 1e-13);
    assert!(r.pass, "{r:?}");
    // ∫ 2z(1+z²)^{−3/2} dz = 2
    assert_relative_eq!(halfline_oracle(|z| 2.0 * z * (1.0 + z * z).powf(-1.5)), 2.0, max_relative = 1e-8);
    let r = ks_m0_check(&cfg(Algebra::H, 1, 0), &qi(2), &spec).unwrap();
    assert_relative_eq!(r.expected, 4.0 * PI / 3.0, max_relative = 1e-13);
    assert!(r.pass, "{r:?}");
    assert_relative_eq!(halfline_oracle(|z| 4.0 * PI * z * z * z.powi(-1) * (1.0 + z * z).powf(-2.5)), 4.0 * PI / 3.0, max_relative = 1e-8);
    assert!(matches!(ks_m0_check(&cfg(Algebra::C, 1, 0), &qi(0), &spec), Err(Error::Precondition(_))));
    assert!(ks_m0_check(&cfg(Algebra::C, 2, 1), &qi(2), &spec).is_err());
}

#[test]
fn functional_equations() {
    let spec = QuadratureSpec::default();
    for (c, p) in [
        (cfg(Algebra::C, 1, 0), pt(q(-1, 4), q(1, 8))),
        (cfg(Algebra::C, 1, 0), pt(q(1, 3), q(1, 5))),
        (cfg(Algebra::C, 2, 1), pt(q(-1, 4), q(1, 8))),
        (cfg(Algebra::C, 2, 1), pt(q(1, 3), q(1, 5))),
        (cfg(Algebra::C, 2, 1), pt(qi(3), q(1, 2))),
        (cfg(Algebra::H, 2, 1), pt(q(1, 3), q(1, 5))),
        (cfg(Algebra::H, 1, 0), pt(q(-1, 4), q(1, 8))),
    ] {
        for r in functional_equation_check(&c, &p, &spec).unwrap() {
            assert!(r.pass, "{} at {:?}: {r:?}", c.label(), p);
        }
    }
}

#[test]
fn residue_at_slash_point() {
    let spec = QuadratureSpec::default();
    let c = cfg(Algebra::C, 1, 0);
    let p = pt(qi(0), qi(1));
    assert_eq!(lattice_flags(&c, &p).k, Some(0));
    let phi = TestFunction::gaussian(&[1.0, 1.0, 1.3]).unwrap().add(&TestFunction::gaussian(&[2.0, 2.0, 0.5]).unwrap().times_monomial(&[0, 2, 0]));
    for r in residue_check(&c, &p, &phi, &spec).unwrap() {
        assert!(r.pass, "{r:?}");
    }
    // odd test functions are annihilated by the residue as well
    let odd = phi.clone().times_monomial(&[0, 1, 0]);
    assert!(uc_pairing(&c, &p, &odd).unwrap().abs() < 1e-14);
    assert!(residue_check(&c, &pt(q(1, 3), qi(0)), &phi, &spec).is_err());
}

#[test]
fn residue_at_higher_order_slash_point() {
    let spec = QuadratureSpec::default();
    let c = cfg(Algebra::C, 2, 1);
    // k = 1: λ + ρ − ν − ρ′ = −2
    let p = pt(qi(-1), qi(2));
    assert_eq!(lattice_flags(&c, &p).k, Some(1));
    let phi = TestFunction::gaussian(&[1.0, 1.0, 0.8, 0.8, 1.2]).unwrap().times_monomial(&[0, 0, 2, 0, 0]);
    for r in residue_check(&c, &p, &phi, &spec).unwrap() {
        assert!(r.pass, "{r:?}");
    }
}

#[test]
fn octonion_polar_path_matches_monte_carlo() {
    let spec = QuadratureSpec { mc_samples: 1_000_000, ..QuadratureSpec::default() };
    let r = norm_moment_check(8, 7, -3.0, &spec).unwrap();
    assert!(r.pass, "{r:?}");
    let (a, _) = norm_moment_monte_carlo(8, 7, -3.0, 50_000, 3, Exec::Sequential);
    let (b, _) = norm_moment_monte_carlo(8, 7, -3.0, 50_000, 3, Exec::Auto);
    assert_eq!(a, b);
}
