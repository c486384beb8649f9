use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn kmsolve(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_kmsolve"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn kmsolve");
    if let Some(text) = stdin {
        child.stdin.take().unwrap().write_all(text.as_bytes()).unwrap();
    }
    drop(child.stdin.take());
    child.wait_with_output().unwrap()
}

fn ok(args: &[&str], stdin: Option<&str>) -> String {
    let out = kmsolve(args, stdin);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str], stdin: Option<&str>) -> Value {
    serde_json::from_str(&ok(args, stdin)).unwrap()
}

fn catalog(name: &str, field: &str) -> String {
    ok(&["catalog", name, "--field", field], None)
}

#[test]
fn duffing_pipeline() {
    let file = catalog("duffing", "QQ");
    let v = json(&["solve", "-", "--dreg", "3", "--seed", "1"], Some(&file));
    assert_eq!(v["delta"], 5);
    assert_eq!(v["dreg"], 3);
    let sols = v["solutions"].as_array().unwrap();
    assert_eq!(sols.len(), 5);
    for s in sols {
        assert!(s["residual"].as_f64().unwrap() < 1e-8);
        assert_eq!(s["coords"][0], serde_json::json!([1.0, 0.0]));
    }
    assert!(v["diagnostics"]["commutator_norm"].as_f64().unwrap() < 1e-8);
}

#[test]
fn raw_normalization_keeps_h_scaling() {
    let file = catalog("duffing", "QQ");
    let v = json(&["solve", "-", "--normalize", "raw"], Some(&file));
    let h: Vec<f64> = v["h"].as_array().unwrap().iter().map(|c| c.as_str().unwrap().parse().unwrap()).collect();
    for s in v["solutions"].as_array().unwrap() {
        let (mut re, mut im) = (0.0, 0.0);
        for (c, z) in h.iter().zip(s["coords"].as_array().unwrap()) {
            re += c * z[0].as_f64().unwrap();
            im += c * z[1].as_f64().unwrap();
        }
        assert!((re - 1.0).abs() < 1e-8 && im.abs() < 1e-8, "h(z) = {re} + {im}i");
    }
}

#[test]
fn output_is_independent_of_thread_count() {
    let file = catalog("bottsamelson", "QQ");
    let one = ok(&["--threads", "1", "solve", "-"], Some(&file));
    let four = ok(&["--threads", "4", "solve", "-"], Some(&file));
    assert_eq!(one, four);
    let v: Value = serde_json::from_str(&one).unwrap();
    assert_eq!(v["delta"], 6);
    assert_eq!(v["solutions"].as_array().unwrap().len(), 6);
}

#[test]
fn grassmannian_hilbert_table() {
    let file = catalog("grassmannian:2,4", "QQ");
    let out = ok(&["hilbert", "-", "--dmax", "10"], Some(&file));
    assert!(out.contains("HF(0..=10): 1 6 20 50 105 196 336 "), "{out}");
    assert!(out.contains("numerator: 1 1\n"));
    assert!(out.contains("HReg: -3\n"));
    assert!(out.contains("degree: 2\n"));
    assert!(out.contains("certified: true\n"));
}

#[test]
fn hilbert_numerators() {
    for (name, numerator, hreg, degree) in
        [("duffing", "1 2 2", "0", "5"), ("bottsamelson", "1 4 1", "-1", "6"), ("grassmannian:2,5", "1 3 1", "-4", "5")]
    {
        let out = ok(&["hilbert", "-"], Some(&catalog(name, "QQ")));
        assert!(out.contains(&format!("numerator: {numerator}\n")), "{name}: {out}");
        assert!(out.contains(&format!("HReg: {hreg}\n")), "{name}: {out}");
        assert!(out.contains(&format!("degree: {degree}\n")), "{name}: {out}");
    }
}

#[test]
fn empty_system_is_positive_dimensional() {
    let out = kmsolve(&["solve", "-"], Some(&catalog("grassmannian:2,4", "QQ")));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("positive-dimensional"));
}

#[test]
fn prime_field_counts() {
    let file = catalog("delpezzo:2", "9716633");
    let out = kmsolve(&["solve", "-", "--dreg", "5"], Some(&file));
    assert_eq!(out.status.code(), Some(3));
    let v = json(&["solve", "-", "--dreg", "5", "--count-only"], Some(&file));
    assert_eq!(v["delta"], 20);
    assert!(v.get("solutions").is_none());
}

#[test]
fn del_pezzo_check_and_counts() {
    let file = catalog("delpezzo", "QQ");
    let out = ok(&["check", "-", "--dmax", "3"], Some(&file));
    assert!(out.contains("degree 2: |dA| = 16"));
    assert!(out.contains("degree 3: |dA| = 31"));
    assert!(out.ends_with("holds through degree 3\n"));
    let basis = ok(&["basis", "-", "-d", "2"], Some(&file));
    assert!(basis.starts_with("16 lattice points in degree 2\n"));
    assert_eq!(basis.lines().count(), 17);
}

#[test]
fn failing_khovanskii_check() {
    let file = r#"{"field":"QQ","vars":["t1","t2"],"weight":[-1,-1],"phi":["1","t1","t1^2+t2"]}"#;
    let out = kmsolve(&["check", "-", "--dmax", "3"], Some(file));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stdout).contains("fails in degree 2"));
}

#[test]
fn input_errors_exit_one() {
    let bad_poly = r#"{"field":"QQ","vars":["t1"],"weight":[0],"phi":["1","t1 +* 2"]}"#;
    assert_eq!(kmsolve(&["check", "-"], Some(bad_poly)).status.code(), Some(1));
    let bad_json = "{\"field\": \"QQ\"";
    assert_eq!(kmsolve(&["solve", "-"], Some(bad_json)).status.code(), Some(1));
    assert_eq!(kmsolve(&["catalog", "nonsense"], None).status.code(), Some(1));
    assert_eq!(kmsolve(&["catalog", "duffing", "--field", "12"], None).status.code(), Some(1));
    assert_eq!(kmsolve(&["solve", "/nonexistent/file.json"], None).status.code(), Some(1));
}

#[test]
fn km_csv_export() {
    let file = catalog("duffing", "QQ");
    let csv = ok(&["km", "-", "-d", "2"], Some(&file));
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 11);
    assert!(lines[0].starts_with("i,gamma,"));
    assert_eq!(lines[0].matches("\"(2,").count(), 14);
    // x4·F2 carries exactly the coefficients 13, 11, 17, 19
    let last: Vec<&str> = lines[10].split(',').collect();
    assert_eq!(last[0], "2");
    let mut nonzero: Vec<&str> = last[4..].iter().copied().filter(|x| *x != "0").collect();
    nonzero.sort();
    assert_eq!(nonzero, ["11", "13", "17", "19"]);
    assert_eq!(ok(&["km", "-", "-d", "3", "--out", "shape"], Some(&file)), "28 28\n");
    assert_eq!(ok(&["km", "-", "-d", "3", "--reduce", "--out", "shape"], Some(&file)), "23 28\n");
}

#[test]
fn matrices_export_exact_entries() {
    let dir = std::env::temp_dir().join(format!("kmsolve-mats-{}", std::process::id()));
    let file = catalog("duffing", "QQ");
    ok(&["solve", "-", "--count-only", "--export-matrices", dir.to_str().unwrap()], Some(&file));
    for j in 0..5 {
        let text = std::fs::read_to_string(dir.join(format!("M{j}.csv"))).unwrap();
        assert_eq!(text.lines().count(), 6);
        assert!(!text.contains('.'), "entries must be exact");
    }
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn schubert_random_flags() {
    let v = json(&["schubert", "--k", "3", "--m", "6", "--conditions", "2,4,6;2,4,6;2,4,6", "--seed", "1"], None);
    assert_eq!(v["raw_equations"], 39);
    assert_eq!(v["equations"], 18);
    assert_eq!(v["dreg"], 2);
    assert_eq!(v["solutions"].as_array().unwrap().len(), 2);
    let conds = "3,5,6;2,5,6;2,5,6;2,5,6;2,5,6";
    let v = json(&["schubert", "--k", "3", "--m", "6", "--conditions", conds, "--dreg", "2"], None);
    assert_eq!(v["solutions"].as_array().unwrap().len(), 3);
    let conds = "3,5,6;3,5,6;3,5,6;2,5,6;2,5,6;2,5,6";
    let v = json(
        &["schubert", "--k", "3", "--m", "6", "--conditions", conds, "--field", "GF(9716633)", "--count-only"],
        None,
    );
    assert_eq!(v["delta"], 6);
    assert_eq!(v["dreg"], 3);
}

#[test]
fn osculating_schubert_problem() {
    let conds = "3,5;3,5;3,5;3,5;3,5;3,5";
    let v = json(&["schubert", "--k", "2", "--m", "5", "--conditions", conds, "--osculating=-3,-2,-1,1,2,3"], None);
    let sols = v["solutions"].as_array().unwrap();
    assert_eq!(sols.len(), 5);
    let want = [[1.0, 0.0, 0.0, 2.24227, -16.3333], [0.0, 1.0, 0.0, -4.66667, 17.9382]];
    let matches = sols.iter().any(|s| {
        (0..2).all(|r| {
            (0..5).all(|c| {
                let z = &s["chart"][r][c];
                (z[0].as_f64().unwrap() - want[r][c]).abs() < 1e-3 && z[1].as_f64().unwrap().abs() < 1e-6
            })
        })
    });
    assert!(matches);
    for s in sols {
        assert!(s["coords"].as_array().unwrap().iter().all(|z| z[1].as_f64().unwrap().abs() < 1e-6));
    }
}

#[test]
fn coefficient_form_input() {
    // Duffing f1 given through its coefficient form, f2 as a polynomial
    let file = r#"{"field":"QQ","vars":["t1","t2"],"weight":[0,-1],
        "phi":["1","t1","t2","t1*(t1^2+t2^2)","t2*(t1^2+t2^2)"],
        "equations":[
          {"degree":1,"coeffs":[{"alpha":[1,0,0,0,0],"c":1},{"alpha":[0,1,0,0,0],"c":3},
                                {"alpha":[0,0,1,0,0],"c":"5"},{"alpha":[0,0,0,1,0],"c":7}]},
          {"degree":1,"poly":"11+13*t1+17*t2+19*t2*(t1^2+t2^2)"}]}"#;
    let v = json(&["solve", "-", "--adaptive"], Some(file));
    assert_eq!(v["delta"], 5);
    assert_eq!(v["solutions"].as_array().unwrap().len(), 5);
}
