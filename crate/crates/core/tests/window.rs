//! Exhaustive checks over the lattice window |2λ|, |2ν| ≤ 40.

use htype_sbo::gamma_expr::ua_is_zero;
use htype_sbo::hypercomplex::Algebra;
use htype_sbo::kernel_families::{classify_sbo_space, support_of, ub_expansion, Family};
use htype_sbo::pair_config::{lattice_flags, multiplicity, FCase, PairConfig, ParamPoint};

fn matrix() -> Vec<PairConfig> {
    let mk = |a, n, m, f: &str| PairConfig::new(a, n, m, FCase::parse(f).unwrap()).unwrap();
    vec![
        mk(Algebra::C, 2, 1, "trivial"),
        mk(Algebra::C, 3, 2, "trivial"),
        mk(Algebra::C, 1, 0, "trivial"),
        mk(Algebra::C, 2, 0, "full"),
        mk(Algebra::H, 1, 0, "trivial"),
        mk(Algebra::H, 1, 0, "u1(i)"),
        mk(Algebra::H, 2, 1, "trivial"),
        mk(Algebra::H, 2, 0, "full"),
        mk(Algebra::O, 1, 0, "trivial"),
    ]
}

fn window() -> impl Iterator<Item = ParamPoint> {
    (-40..=40).flat_map(|l2| (-40..=40).map(move |n2| ParamPoint::halves(l2, n2)))
}

#[test]
fn dimension_equals_multiplicity() {
    for cfg in matrix() {
        for pt in window() {
            let d = classify_sbo_space(&cfg, &pt).unwrap();
            let m = multiplicity(&cfg, &pt).unwrap();
            assert_eq!(d.dimension as u32, m, "{} at {:?}: {:?}", cfg.label(), pt, d.labels());
        }
    }
}

#[test]
fn ub_is_holomorphic_nonzero_with_tabulated_support() {
    for cfg in matrix() {
        for pt in window().filter(|pt| lattice_flags(&cfg, pt).in_backslash_set) {
            let b = ub_expansion(&cfg, &pt).unwrap();
            assert!(b.is_finite(), "{} {:?}: pole", cfg.label(), pt);
            assert!(b.is_nonzero(), "{} {:?}: vanishes", cfg.label(), pt);
            assert_eq!(b.support(), support_of(&Family::B, &cfg, &pt).unwrap(), "{} {:?}", cfg.label(), pt);
        }
    }
}

#[test]
fn off_slash_lines_only_a() {
    for cfg in matrix() {
        for pt in window().filter(|pt| !lattice_flags(&cfg, pt).in_slash_set) {
            assert_eq!(classify_sbo_space(&cfg, &pt).unwrap().labels(), vec!["A"]);
        }
    }
}

#[test]
fn ua_vanishes_exactly_on_l() {
    for cfg in matrix() {
        for pt in (-80..=80).flat_map(|l2| (-80..=80).map(move |n2| ParamPoint::halves(l2, n2))) {
            assert_eq!(ua_is_zero(&cfg, &pt), lattice_flags(&cfg, &pt).in_l, "{} at {:?}", cfg.label(), pt);
        }
    }
}
