use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use htype_sbo_cli::atlas::{read_csv, AtlasCell};
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_htype-sbo"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON ({e}):\n{}\n{}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr))
    })
}

fn labels(v: &Value) -> Vec<String> {
    v["families"].as_array().unwrap().iter().map(|s| s.as_str().unwrap().to_owned()).collect()
}

#[test]
fn classify_sporadic_sp12_point() {
    let out = run(&["classify", "--algebra", "H", "--n", "1", "--m", "0", "--lambda", "-5", "--nu", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["multiplicity"], 6);
    assert_eq!(v["dimension"], 6);
    assert_eq!(labels(&v), ["C", "Harmonic(2)"]);
    assert_eq!(v["flags"]["in_S2"], true);
    // constants are rendered as text, not floats
    assert!(v["constants"]["uA_normalization"]["expr"].as_str().unwrap().contains('Γ'));
}

#[test]
fn classify_generic_origin() {
    let v = json(&run(&["classify", "--algebra", "C", "--n", "1", "--m", "0", "--lambda", "0", "--nu", "0"]));
    assert_eq!(v["multiplicity"], 1);
    assert_eq!(labels(&v), ["A"]);
    assert_eq!(v["supports"][0]["support"], "Nbar");
}

#[test]
fn classify_from_toml_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("req.toml");
    std::fs::write(&path, "[config]\nalgebra = \"H\"\nn = 1\nm = 0\nf = \"trivial\"\n\n[point]\nlambda = \"-5\"\nnu = \"5\"\n").unwrap();
    let p = path.to_str().unwrap();
    assert_eq!(json(&run(&["--config", p, "classify"]))["multiplicity"], 6);
    assert_eq!(json(&run(&["--config", p, "classify", "--lambda", "-7", "--nu", "7"]))["multiplicity"], 8);
    // ν alone: (−5, 7) is off both the S₂ diagonal and L
    assert_eq!(json(&run(&["--config", p, "classify", "--nu", "7"]))["multiplicity"], 1);
}

#[test]
fn usage_errors_exit_two() {
    let out = run(&["classify", "--algebra", "C", "--n", "1", "--m", "0", "--lambda", "1/0", "--nu", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("1/0"));
    // not strongly spherical
    let out = run(&["multiplicity", "--algebra", "H", "--n", "3", "--m", "1", "--f", "trivial", "--lambda", "0", "--nu", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(run(&["classify", "--n", "1", "--m", "0", "--lambda", "0", "--nu", "0"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "[config]\nalgebra = \"C\"\nn = 1\nm = 0\nbogus = 1\n").unwrap();
    let out = run(&["--config", bad.to_str().unwrap(), "classify", "--lambda", "0", "--nu", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_default_window_passes() {
    let out = run(&["verify", "--algebra", "C", "--n", "2", "--m", "1"]);
    let v = json(&out);
    assert_eq!(out.status.code(), Some(0), "{v:#}");
    assert_eq!(v["pass"], true);
    assert!(v["checked"]["system"].as_u64().unwrap() > 10);
    assert!(v["checked"]["recurrence_instances"].as_u64().unwrap() > 50);
}

#[test]
fn verify_perturbed_tables_fail_on_r2() {
    let out = run(&["verify", "--algebra", "C", "--n", "2", "--m", "1", "--perturb"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["pass"], false);
    let failures = v["failures"].as_array().unwrap();
    assert!(failures.iter().any(|f| f["name"] == "R2"), "{v:#}");
}

#[test]
fn verify_octonion_m0_passes() {
    let out = run(&["verify", "--algebra", "O", "--n", "1", "--m", "0", "--max-k", "3"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}

fn atlas(dir: &Path, name: &str, args: &[&str]) -> (PathBuf, PathBuf, Output) {
    let csv = dir.join(format!("{name}.csv"));
    let svg = dir.join(format!("{name}.svg"));
    let mut all = vec!["atlas", "--csv", csv.to_str().unwrap(), "--svg", svg.to_str().unwrap()];
    all.extend_from_slice(args);
    let out = run(&all);
    (csv, svg, out)
}

const H10: [&str; 6] = ["--algebra", "H", "--n", "1", "--m", "0"];

#[test]
fn atlas_is_byte_deterministic_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let win = ["--lambda-min", "-10", "--lambda-max", "2", "--nu-min", "-2", "--nu-max", "10"];
    let args: Vec<&str> = H10.iter().chain(win.iter()).copied().collect();
    let (c1, s1, o1) = atlas(dir.path(), "a", &args);
    let (c2, s2, o2) = atlas(dir.path(), "b", &args);
    assert_eq!(o1.status.code(), Some(0));
    assert_eq!(o2.status.code(), Some(0));
    assert_eq!(std::fs::read(&c1).unwrap(), std::fs::read(&c2).unwrap());
    assert_eq!(std::fs::read(&s1).unwrap(), std::fs::read(&s2).unwrap());

    let cells = read_csv(std::fs::File::open(&c1).unwrap()).unwrap();
    assert_eq!(cells.len(), 13 * 13);
    let mut buf = Vec::new();
    htype_sbo_cli::atlas::write_csv(&cells, &mut buf).unwrap();
    assert_eq!(buf, std::fs::read(&c1).unwrap());

    // S₂ diagonal: λ = −3 − 2i, ν = 3 + 2i, multiplicity 2i + 4
    let sporadic: Vec<&AtlasCell> = cells.iter().filter(|c| c.class == "sporadic").collect();
    let mut found: Vec<(String, String, u32)> =
        sporadic.iter().map(|c| (c.lambda.clone(), c.nu.clone(), c.multiplicity)).collect();
    found.sort_by_key(|t| t.2);
    assert_eq!(
        found,
        [("-3".into(), "3".into(), 4), ("-5".into(), "5".into(), 6), ("-7".into(), "7".into(), 8), ("-9".into(), "9".into(), 10)]
    );
    let svg = std::fs::read_to_string(&s1).unwrap();
    for m in [4, 6, 8] {
        assert!(svg.contains(&format!(">{m}</text>")), "label {m} missing");
    }
    assert_eq!(svg.matches("<rect").count(), cells.len() + 6);
    assert!(!svg.contains("\"lambda\""), "payload must be escaped");
}

#[test]
fn atlas_l_points_for_c21() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["--algebra", "C", "--n", "2", "--m", "1", "--lambda-min", "-11", "--lambda-max", "1", "--nu-min", "-10", "--nu-max", "2"];
    let (csv, _, out) = atlas(dir.path(), "c21", &args);
    assert_eq!(out.status.code(), Some(0));
    let cells = read_csv(std::fs::File::open(csv).unwrap()).unwrap();
    let mut got: Vec<(i64, i64)> = cells
        .iter()
        .filter(|c| c.in_l)
        .map(|c| {
            assert_eq!(c.multiplicity, 2);
            assert_eq!(c.class, "L");
            (c.lambda.parse().unwrap(), c.nu.parse().unwrap())
        })
        .collect();
    got.sort();
    let mut want: Vec<(i64, i64)> = (0..5i64)
        .flat_map(|i| (0..=i).map(move |j| (-3 - 2 * i, -2 - 2 * j)))
        .filter(|&(l, n)| l >= -11 && n >= -10)
        .collect();
    want.sort();
    assert_eq!(got, want);
}

#[test]
fn atlas_empty_window_has_header() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["--algebra", "C", "--n", "1", "--m", "0", "--lambda-min", "3", "--lambda-max", "0"];
    let (csv, svg, out) = atlas(dir.path(), "e", &args);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 1);
    assert!(text.starts_with("lambda,nu,"));
    assert!(read_csv(text.as_bytes()).unwrap().is_empty());
    assert!(std::fs::read_to_string(svg).unwrap().ends_with("</svg>\n"));
}

#[test]
fn atlas_oversized_window_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["--algebra", "C", "--n", "1", "--m", "0", "--lambda-min", "-200", "--lambda-max", "200", "--nu-min", "-200", "--nu-max", "200"];
    let (csv, _, out) = atlas(dir.path(), "big", &args);
    assert_eq!(out.status.code(), Some(2));
    assert!(!csv.exists());
    // a fine step shrinks the admissible range
    let out = run(&["atlas", "--algebra", "C", "--n", "1", "--m", "0", "--step", "1/100", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(run(&["atlas", "--algebra", "C", "--n", "1", "--m", "0", "--step", "0", "--out", dir.path().to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn integrals_reports() {
    let v = json(&run(&["integrals", "--algebra", "C", "--n", "1", "--m", "0", "--check", "moments"]));
    assert_eq!(v["pass"], true);
    assert!(v["checks"].as_array().unwrap().len() > 30);
    let c = &v["checks"][0];
    for key in ["check", "expected", "got", "rel_err", "pass"] {
        assert!(c.get(key).is_some(), "missing {key}");
    }

    let v = json(&run(&["integrals", "--algebra", "C", "--n", "1", "--m", "0", "--check", "polar"]));
    assert_eq!(v["pass"], true);
    let mass = &v["checks"][0];
    assert!((mass["expected"].as_f64().unwrap() - 2.0 * std::f64::consts::PI.powi(2)).abs() < 1e-12);

    let v = json(&run(&["integrals", "--algebra", "C", "--n", "1", "--m", "0", "--lambda", "2", "--nu", "0", "--check", "spherical-vector"]));
    assert!((v["checks"][0]["expected"].as_f64().unwrap() - std::f64::consts::PI.powi(3) / 16.0).abs() < 1e-12);
    assert_eq!(v["pass"], true);

    let v = json(&run(&["integrals", "--algebra", "C", "--n", "1", "--m", "0", "--lambda", "0", "--nu", "1", "--check", "residue", "--seed", "7"]));
    assert_eq!(v["pass"], true);
    assert_eq!(v["seed"], 7);

    let out = run(&["integrals", "--algebra", "C", "--n", "1", "--m", "0", "--check", "ks"]);
    assert_eq!(out.status.code(), Some(2), "ks needs a point");
    let out = run(&["integrals", "--algebra", "C", "--n", "1", "--m", "0", "--check", "nonsense"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn integrals_functional_equation_with_threads() {
    let out = run(&["--threads", "2", "integrals", "--algebra", "C", "--n", "2", "--m", "1", "--lambda", "3", "--nu", "1/2", "--check", "functional"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["checks"].as_array().unwrap().len(), 3);
}

/// Tables pinned on disk; `BLESS=1 cargo test` rewrites them.
#[test]
fn kernel_tables_match_golden_files() {
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    // (λ, ν) with ν = 0 and λ = ν + ρ′ − ρ − 2k
    let cases = [
        ("C21", ["--algebra", "C", "--n", "2", "--m", "1"], ["-1", "-3", "-5"]),
        ("H10", ["--algebra", "H", "--n", "1", "--m", "0"], ["-2", "-4", "-6"]),
    ];
    for (tag, cfg, lambdas) in cases {
        for (k, lam) in lambdas.iter().enumerate() {
            let mut args = vec!["kernel", "--family", "C", "--nu", "0", "--lambda", lam];
            args.extend_from_slice(&cfg);
            let out = run(&args);
            assert_eq!(out.status.code(), Some(0));
            let v = json(&out);
            assert_eq!(v["kernel"]["k"], k as u64);
            let path = golden.join(format!("kernel_{tag}_k{k}.json"));
            let text = String::from_utf8(out.stdout).unwrap();
            if std::env::var_os("BLESS").is_some() {
                std::fs::write(&path, &text).unwrap();
            }
            let want = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing {}", path.display()));
            assert_eq!(text, want, "{} drifted", path.display());
        }
    }
}
