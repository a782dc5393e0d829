use qnm_cli::{Format, ModeKind, RunConfig};
use std::process::{Command, Output};

fn qnm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qnm"))
        .args(args)
        .output()
        .expect("run qnm")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn horizons_schwarzschild_de_sitter() {
    let o = qnm(&[
        "horizons", "--mass", "1", "--charge", "0", "--lambda", "0.03",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    let rows = csv_rows(&text);
    let get = |name: &str| {
        rows.iter()
            .find(|r| r[0] == name)
            .map(|r| r[1].parse::<f64>().unwrap())
    };
    assert!((get("r_event").unwrap() - 2.0915).abs() < 1e-3);
    assert!((get("r_cosmological").unwrap() - 8.7889).abs() < 1e-3);
    assert!(get("r_cauchy").is_none());
    assert!(get("kappa_cosmological").unwrap() < 0.0);
    assert_eq!(get("r0").unwrap(), 3.0);
}

#[test]
fn inadmissible_charge_is_reported() {
    let o = qnm(&["horizons", "--charge", "1.2", "--mass", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("inadmissible"));
}

#[test]
fn charged_dss_is_a_configuration_error() {
    let o = qnm(&["horizons", "--model", "dss", "--charge", "0.1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("configuration error"));
}

#[test]
fn schwarzschild_order_zero_lattice() {
    let o = qnm(&[
        "qnm", "--model", "dss", "--charge", "0", "--lambda", "0", "--order", "0", "--kmax", "2",
        "--lmin", "8", "--lmax", "12",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = csv_rows(&stdout(&o));
    let w = 1.0 / 27.0f64;
    let engine: Vec<_> = rows.iter().filter(|r| r[9] == "engine").collect();
    assert_eq!(engine.len(), 5 * 3);
    for r in engine {
        let (k, l): (f64, f64) = (r[2].parse().unwrap(), r[3].parse().unwrap());
        let (re, im): (f64, f64) = (r[5].parse().unwrap(), r[6].parse().unwrap());
        assert!((re - w.sqrt() * (l + 0.5)).abs() < 1e-11);
        assert!((im + w.sqrt() * (k + 0.5)).abs() < 1e-11);
    }
}

#[test]
fn order_beyond_engine_is_rejected() {
    let o = qnm(&["qnm", "--order", "7"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("order 7"));
}

#[test]
fn json_rows_match_csv() {
    let args = ["qnm", "--lmin", "5", "--lmax", "9", "--kmax", "1"];
    let csv = stdout(&qnm(&args));
    let json = stdout(&qnm(&[&args[..], &["--format", "json"]].concat()));
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    let rows = v["rows"].as_array().unwrap();
    let csv = csv_rows(&csv);
    assert_eq!(rows.len(), csv.len());
    assert!(!rows.is_empty());
    for (j, c) in rows.iter().zip(&csv) {
        assert_eq!(j["branch"], c[1].as_str());
        assert_eq!(j["k"].as_u64().unwrap().to_string(), c[2]);
        assert_eq!(j["re"].as_f64().unwrap(), c[5].parse::<f64>().unwrap());
        assert_eq!(j["im"].as_f64().unwrap(), c[6].parse::<f64>().unwrap());
        assert_eq!(j["candidate_tag"], c[9].as_str());
    }
    for branch in ["dirac", "mirror", "schrodinger_union"] {
        assert!(rows.iter().any(|r| r["branch"] == branch));
    }
}

#[test]
fn csv_output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let o = qnm(&["qnm", "--lmax", "20", "--out", p.to_str().unwrap()]);
        assert!(o.status.success());
        assert!(o.stdout.is_empty());
    }
    let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    assert!(String::from_utf8(ta)
        .unwrap()
        .starts_with("model,branch,k,l,n,re,im,multiplicity,order,candidate_tag\n"));
}

#[test]
fn config_round_trip() {
    let mut c = RunConfig::default();
    assert_eq!(RunConfig::parse(&c.to_string()).unwrap(), c);
    c.mass = 1.7;
    c.charge = 0.123456789012345;
    c.lambda = 1e-3 / 3.0;
    c.truncation = None;
    c.format = Format::Json;
    c.mode = ModeKind::Strip;
    c.out = Some("runs/out.json".into());
    c.suite = "union,b12".into();
    c.mutation = Some("zero_b02".parse().unwrap());
    let text = c.to_string();
    let back = RunConfig::parse(&text).unwrap();
    assert_eq!(back, c);
    assert_eq!(back.to_string(), text);
    assert!(RunConfig::parse("mass = 1\nnonsense = 2\n").is_err());
    assert!(RunConfig::parse("mass 1\n").is_err());
}

#[test]
fn flags_override_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.cfg");
    std::fs::write(
        &path,
        "# run\nmass = 2\ncharge = 0.5\nlambda = 0.001\nprecision = 6\n",
    )
    .unwrap();
    let o = qnm(&[
        "config",
        "--config",
        path.to_str().unwrap(),
        "--charge",
        "0.25",
    ]);
    assert!(o.status.success());
    let c = RunConfig::parse(&stdout(&o)).unwrap();
    assert_eq!(
        (c.mass, c.charge, c.lambda, c.precision),
        (2.0, 0.25, 0.001, 6)
    );
    let h = stdout(&qnm(&["horizons", "--config", path.to_str().unwrap()]));
    assert!(h.lines().any(|l| l == "r0,5.91548"), "{h}");
}

#[test]
fn verify_dispatches_a_single_suite() {
    let o = qnm(&[
        "verify",
        "--suite",
        "quadratic",
        "--mode",
        "compact",
        "--format",
        "json",
    ]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let suites = v["suites"].as_array().unwrap();
    assert_eq!(suites.len(), 1);
    assert_eq!(suites[0]["suite"], "quadratic");
    assert_eq!(v["pass"], true);
    assert_eq!(qnm(&["verify", "--suite", "nope"]).status.code(), Some(2));
}

#[test]
fn union_suite_in_compact_mode() {
    let o = qnm(&["verify", "--suite", "union", "--mode", "compact"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][0], "union");
    assert_eq!(rows[0][1], "pass");
}

#[test]
fn zeroed_b02_fails_the_convergence_suite() {
    let base = [
        "verify",
        "--suite",
        "convergence",
        "--kmax",
        "0",
        "--lmin",
        "10",
        "--lmax",
        "30",
        "--grid",
        "160",
    ];
    let good = qnm(&base);
    assert!(
        good.status.success(),
        "{}",
        String::from_utf8_lossy(&good.stderr)
    );
    let bad = qnm(&[&base[..], &["--mutation", "zero_b02"]].concat());
    assert_eq!(bad.status.code(), Some(1));
    let err = String::from_utf8_lossy(&bad.stderr);
    let last = err.lines().last().unwrap();
    let v: serde_json::Value = serde_json::from_str(last).unwrap();
    assert_eq!(v["failures"], serde_json::json!(["convergence"]));
}
