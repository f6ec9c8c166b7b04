use std::process::{Command, Output};

fn curvosc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_curvosc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .skip(2)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect()
}

#[test]
fn classify_bounded_example() {
    let out = curvosc(&["classify", "--lambda", "1", "--alpha", "3", "--J", "1", "--E", "3"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("regime=Bounded"));
    let omega: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("omega="))
        .unwrap()
        .parse()
        .unwrap();
    assert!((omega - 3f64.sqrt()).abs() < 1e-15);
}

#[test]
fn classify_json() {
    let out = curvosc(&[
        "classify", "--lambda", "-1", "--alpha", "2", "--J", "1", "--E", "3", "--format", "json",
    ]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["regime"], "Bounded");
    assert!((v["omega"].as_f64().unwrap() - 10f64.sqrt()).abs() < 1e-14);
}

#[test]
fn spectrum_has_five_levels() {
    let out = curvosc(&["spectrum", "--lambda", "1", "--beta", "5.2"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let levels = v.as_array().unwrap();
    assert_eq!(levels.len(), 5);
    assert_eq!(levels[4]["n"], 4);
    for l in levels {
        let n = l["n"].as_u64().unwrap();
        assert_eq!(l["degeneracy"].as_u64().unwrap(), n + 1);
        assert_eq!(l["states"].as_array().unwrap().len() as u64, n + 1);
    }
}

#[test]
fn sphere_spectrum_needs_level_count() {
    let out = curvosc(&["spectrum", "--lambda", "-1", "--beta", "1"]);
    assert_eq!(out.status.code(), Some(1));
    let out = curvosc(&["spectrum", "--lambda", "-1", "--beta", "1", "--levels", "3", "--format", "csv"]);
    let text = stdout(&out);
    assert!(text.starts_with("# curvosc spectrum v1\nn,E,degeneracy\n"));
    let e: Vec<f64> = text.lines().skip(2).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(e, vec![1.0, 3.0, 6.0]);
}

#[test]
fn sphere_trajectory_stays_in_band() {
    let out = curvosc(&[
        "trajectory", "--lambda", "-1", "--alpha", "2", "--J", "1", "--E", "3", "--t1", "5", "--samples", "500",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("# curvosc trajectory v1\nt,r,r_dot,phi,x,y,energy_rel_drift\n"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 500);
    for row in &rows {
        assert!(row[1] >= 0.2f64.sqrt() - 1e-9 && row[1] <= 0.5f64.sqrt() + 1e-9);
        assert!((row[4].hypot(row[5]) - row[1]).abs() < 1e-12);
        assert!(row[6] < 1e-8);
    }
}

#[test]
fn output_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let paths: Vec<_> = (0..2).map(|i| dir.path().join(format!("t{i}.csv"))).collect();
    for p in &paths {
        let out = curvosc(&[
            "trajectory", "--lambda", "1", "--alpha", "3", "--J", "1", "--E", "6", "--t1", "2", "--out",
            p.to_str().unwrap(),
        ]);
        assert!(out.status.success());
        assert!(out.stdout.is_empty());
    }
    let a = std::fs::read(&paths[0]).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, std::fs::read(&paths[1]).unwrap());
}

#[test]
fn potential_profiles_match_figures() {
    let out = curvosc(&[
        "potential", "--lambda", "1", "--alpha", "3", "--J", "1", "--r-min", "0.01", "--r-max", "3", "--samples", "2991",
    ]);
    let text = stdout(&out);
    assert!(text.starts_with("# curvosc potential v1\nr,v_eff_J0,v_eff_J\n"));
    let rows = csv_rows(&text);
    let best = rows.iter().min_by(|a, b| a[2].total_cmp(&b[2])).unwrap();
    assert!((best[0] - 0.5f64.sqrt()).abs() < 2e-3);
    assert!((best[2] - 2.5).abs() < 1e-5);
    assert!(rows[0][1] < 1e-3);

    let out = curvosc(&["potential", "--lambda", "-1", "--alpha", "2", "--J", "1", "--samples", "1000"]);
    let rows = csv_rows(&stdout(&out));
    let best = rows.iter().min_by(|a, b| a[2].total_cmp(&b[2])).unwrap();
    assert!((best[0] - 1.0 / 3f64.sqrt()).abs() < 2e-3);
    assert!((best[2] - 2.5).abs() < 1e-4);
    let last = rows.last().unwrap();
    assert!(last[1] > 50.0 && last[2] > 50.0);

    let out = curvosc(&["potential", "--lambda", "-1", "--alpha", "2", "--J", "1", "--r-max", "1.5"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn bridge_worked_example() {
    let out = curvosc(&[
        "bridge", "--family", "trig", "--lambda", "1", "--alpha", "3.1622776601683795", "--a1", "2", "--a2", "1",
        "--phi1", "1.5707963267948966", "--phi2", "0", "--format", "json",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["a"].as_f64().unwrap() - 1.5).abs() < 1e-14);
    assert!((v["b"].as_f64().unwrap() - 2.5).abs() < 1e-14);
    assert_eq!(v["passed"], true);

    let out = curvosc(&["bridge", "--family", "linear", "--lambda", "1", "--a1", "1", "--a2", "0", "--b2", "1"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("kind=Limiting"));

    let out = curvosc(&["bridge", "--family", "trig", "--lambda", "1", "--a1", "1", "--a2", "1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn wavefunction_table() {
    let out = curvosc(&["wavefunction", "--lambda", "1", "--beta", "5.2", "--n-r", "2", "--m", "0", "--samples", "50"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("# curvosc wavefunction v1\nr,R,residual\n"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 50);
    assert!(rows.iter().all(|r| r[2].abs() < 1e-8));
    let out = curvosc(&["wavefunction", "--lambda", "1", "--beta", "5.2", "--n-r", "2", "--m", "1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn verify_passes() {
    let out = curvosc(&["verify", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let text = stdout(&out);
    assert!(text.lines().all(|l| l.starts_with("PASS")));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(curvosc(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(curvosc(&["classify", "--lambda", "1"]).status.code(), Some(1));
    assert_eq!(
        curvosc(&["classify", "--lambda", "0", "--alpha", "3", "--J", "1", "--E", "3"]).status.code(),
        Some(1)
    );
    assert_eq!(
        curvosc(&["trajectory", "--lambda", "1", "--alpha", "3", "--J", "1", "--E", "3", "--samples", "1"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(curvosc(&["--help"]).status.code(), Some(0));
}
