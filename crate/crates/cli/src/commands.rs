//! One function per subcommand.  Each returns the JSON report; verification
//! failures come back as [`CliError::Failed`] carrying the report.

use htype_sbo::fourier_verifier::{check_recurrences, coeff_table, perturb_table, table_json, table_poly, verify_system};
use htype_sbo::gamma_expr::{c_b, residue_constant_ab, residue_constant_ac, ua_is_zero, ua_normalization, GammaExpr, Value};
use htype_sbo::kernel_families::{
    classify_sbo_space, differential_json, singular_json, smooth_json, ub_expansion, uc_kernel, vc_kernel, SmoothKernel,
};
use htype_sbo::pair_config::{lattice_flags, multiplicity, PairConfig, ParamPoint};
use htype_sbo::poly_algebra::Ops;
use htype_sbo::quadrature_lab::{
    functional_equation_check, htype_surface_integral, ks_m0_check, polar_consistency, residue_check, sphere_area,
    sphere_moment, sphere_moment_numeric, sphere_moment_weighted, sphere_moment_weighted_numeric,
    spherical_vector_integral_check, Check, QuadratureSpec, TestFunction,
};
use htype_sbo::gamma_expr::gamma_f64;
use serde_json::{json, Value as Json};

use crate::request::{show_q, Window};
use crate::CliError;

pub const SCHEMA: u32 = 1;

fn point_json(pt: &ParamPoint) -> Json {
    json!({"lambda": show_q(&pt.lambda), "nu": show_q(&pt.nu)})
}

fn config_json(cfg: &PairConfig) -> Json {
    json!({"algebra": cfg.alg.tag(), "n": cfg.n, "m": cfg.m, "f": cfg.f.label(),
           "p": cfg.p, "q": cfg.q, "p_prime": cfg.p1, "rho": show_q(&cfg.rho), "rho_prime": show_q(&cfg.rho1)})
}

fn value_json(v: &Value) -> Json {
    match v {
        Value::Exact { rat, pi_half } => json!({"rational": show_q(rat), "pi_half_power": pi_half, "approx": v.to_f64()}),
        Value::Numeric(x) => json!({"approx": x}),
    }
}

/// A Gamma expression together with its order and leading value at `pt`.
fn constant_json(e: &GammaExpr, pt: &ParamPoint) -> Json {
    let v = e.value_at(pt);
    json!({"expr": e.to_string(), "order": v.order, "leading": v.leading.as_ref().map(value_json)})
}

pub fn classify(cfg: &PairConfig, pt: &ParamPoint) -> Result<Json, CliError> {
    let flags = lattice_flags(cfg, pt);
    let desc = classify_sbo_space(cfg, pt)?;
    let mult = multiplicity(cfg, pt)?;
    let mut constants = serde_json::Map::new();
    constants.insert("uA_normalization".into(), constant_json(&ua_normalization(cfg), pt));
    if flags.in_slash_set {
        constants.insert("residue_AC".into(), constant_json(&residue_constant_ac(cfg, pt)?, pt));
    }
    if flags.in_backslash_set {
        constants.insert("residue_AB".into(), constant_json(&residue_constant_ab(cfg, pt)?, pt));
        constants.insert("c_B".into(), constant_json(&c_b(cfg, pt)?, pt));
    }
    Ok(json!({
        "schema": SCHEMA,
        "config": config_json(cfg),
        "point": point_json(pt),
        "flags": flags,
        "multiplicity": mult,
        "dimension": desc.dimension,
        "families": desc.labels(),
        "supports": desc.families.iter().map(|f| json!({"family": f.family.to_string(), "dimension": f.dimension, "support": f.support})).collect::<Vec<_>>(),
        "uA_vanishes": ua_is_zero(cfg, pt),
        "constants": constants,
    }))
}

pub fn multiplicity_report(cfg: &PairConfig, pt: &ParamPoint) -> Result<Json, CliError> {
    Ok(json!({"schema": SCHEMA, "config": config_json(cfg), "point": point_json(pt), "multiplicity": multiplicity(cfg, pt)?}))
}

pub fn kernel(cfg: &PairConfig, pt: &ParamPoint, family: &str) -> Result<Json, CliError> {
    let body = match family.to_ascii_lowercase().as_str() {
        "a" => smooth_json(&SmoothKernel::u_a(cfg, pt)?),
        "b" => singular_json(&ub_expansion(cfg, pt)?),
        "c" => {
            let mut j = differential_json(&uc_kernel(cfg, pt)?);
            j["table"] = table_json(&coeff_table(cfg, pt)?);
            j
        }
        "vc" => differential_json(&vc_kernel(cfg, pt)?),
        other => return Err(CliError::usage(format!("unknown family '{other}' (expected A, B, C or vC)"))),
    };
    Ok(json!({"schema": SCHEMA, "config": config_json(cfg), "point": point_json(pt), "kernel": body}))
}

/// Exact suites over a window: the dimension identity everywhere, and on
/// `//` points with `k ≤ max_k` the Fourier-picture system and the
/// recurrences of `û^C`.  `perturb` replaces each table by a corrupted copy.
pub fn verify(cfg: &PairConfig, win: &Window, perturb: bool) -> Result<Json, CliError> {
    let names = Ops::new(cfg).var_names();
    let mut failures = Vec::new();
    let (mut identity_checked, mut system_checked, mut recurrences_checked) = (0usize, 0usize, 0usize);
    for pt in win.points() {
        let fl = lattice_flags(cfg, &pt);
        let dim = classify_sbo_space(cfg, &pt)?.dimension;
        let mult = multiplicity(cfg, &pt)?;
        identity_checked += 1;
        if dim != mult as usize {
            failures.push(json!({"kind": "dimension", "point": point_json(&pt), "dimension": dim, "multiplicity": mult}));
        }
        let Some(k) = fl.k else { continue };
        if k > win.max_k as i64 {
            continue;
        }
        let mut table = coeff_table(cfg, &pt)?;
        if perturb {
            table = perturb_table(&table);
        }
        let rep = verify_system(&table_poly(cfg, &table), cfg, &pt);
        system_checked += 1;
        if !rep.pass() {
            failures.push(json!({"kind": "system", "point": point_json(&pt), "k": k, "report": rep.to_json(&names)}));
        }
        let rec = check_recurrences(&table, cfg, &pt);
        recurrences_checked += rec.checked;
        for f in rec.failures {
            failures.push(json!({"kind": "recurrence", "name": f.name, "index": [f.index.0, f.index.1, f.index.2],
                                 "lhs": f.lhs, "rhs": f.rhs, "point": point_json(&pt), "k": k}));
        }
    }
    let report = json!({
        "schema": SCHEMA,
        "config": config_json(cfg),
        "window": {"lambda": [show_q(&win.lambda.0), show_q(&win.lambda.1)], "nu": [show_q(&win.nu.0), show_q(&win.nu.1)],
                   "step": show_q(&win.step), "max_k": win.max_k},
        "perturbed": perturb,
        "checked": {"dimension_identity": identity_checked, "system": system_checked, "recurrence_instances": recurrences_checked},
        "pass": failures.is_empty(),
        "failures": failures,
    });
    if report["pass"] == json!(true) {
        Ok(report)
    } else {
        Err(CliError::Failed(report))
    }
}

fn moment_checks() -> Result<Vec<Check>, CliError> {
    let mut out = Vec::new();
    for p in 1..=8usize {
        // every multi-index with |α| ≤ 3 up to permutation, placed on the first coordinates
        for alpha in [vec![], vec![1], vec![2], vec![3], vec![1, 1], vec![2, 1], vec![1, 1, 1]] {
            if alpha.len() > p {
                continue;
            }
            let mut a = vec![0u32; p];
            a[..alpha.len()].copy_from_slice(&alpha);
            let exact = sphere_moment(p, &a)?.to_f64();
            let num = sphere_moment_numeric(p, &a, 6)?;
            out.push(Check::new(format!("moment p={p} alpha={a:?}"), exact, num, 1e-6));
        }
    }
    for (p, p2, a, g) in [(2usize, 1usize, vec![0u32, 0], 1.0), (4, 2, vec![1, 0, 1, 0], -1.5), (5, 3, vec![0, 1, 0, 0, 2], 0.5)] {
        let exact = sphere_moment_weighted(p, p2, &a, g)?;
        let num = sphere_moment_weighted_numeric(p, p2, &a, g, 24)?;
        out.push(Check::new(format!("weighted-moment p={p} p''={p2} alpha={a:?} gamma={g}"), exact, num, 1e-6));
    }
    Ok(out)
}

fn polar_checks(cfg: &PairConfig, spec: &QuadratureSpec) -> Result<Vec<Check>, CliError> {
    let (p, q) = (cfg.p, cfg.q);
    // |𝕊| = ½|S^{p−1}||S^{q−1}| B(p/4, q/2)
    let (a, b) = (p as f64 / 4.0, q as f64 / 2.0);
    let beta = gamma_f64(a) * gamma_f64(b) / gamma_f64(a + b);
    let mass = 0.5 * sphere_area(p) * sphere_area(q) * beta;
    let got = htype_surface_integral(p, q, |_| 1.0, spec.polar)?;
    let mut rates = vec![1.0; p + q];
    rates[p..].iter_mut().for_each(|r| *r = 1.5);
    let mut e = vec![0u32; p + q];
    e[0] = 2;
    e[p] = 2;
    let phi = TestFunction::gaussian(&rates)?.times_monomial(&e);
    Ok(vec![Check::new("polar:total-mass", mass, got, 1e-6), polar_consistency(p, q, &phi, spec)?])
}

pub fn integrals(
    cfg: &PairConfig,
    pt: Option<&ParamPoint>,
    check: &str,
    spec: &QuadratureSpec,
) -> Result<Json, CliError> {
    let need_pt = || pt.ok_or_else(|| CliError::usage(format!("--check {check} needs a point")));
    let checks = match check {
        "moments" => moment_checks()?,
        "polar" => polar_checks(cfg, spec)?,
        "spherical-vector" => vec![spherical_vector_integral_check(cfg, need_pt()?, spec)?],
        "ks" => vec![ks_m0_check(cfg, &need_pt()?.nu, spec)?],
        "functional" => functional_equation_check(cfg, need_pt()?, spec)?,
        "residue" => {
            let phi = TestFunction::gaussian(&vec![1.0; cfg.nvars()])?;
            residue_check(cfg, need_pt()?, &phi, spec)?
        }
        other => return Err(CliError::usage(format!("unknown check '{other}'"))),
    };
    let pass = checks.iter().all(|c| c.pass);
    let report = json!({
        "schema": SCHEMA,
        "config": config_json(cfg),
        "point": pt.map(point_json),
        "tol": spec.tol,
        "seed": spec.seed,
        "pass": pass,
        "checks": checks,
    });
    if pass {
        Ok(report)
    } else {
        Err(CliError::Failed(report))
    }
}
