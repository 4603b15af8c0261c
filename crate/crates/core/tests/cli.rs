use std::process::{Command, Output};

use num_complex::Complex64;
use serde_json::Value;

fn trimap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trimap")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

/// Reads `name = value` from eval output.
fn field(text: &str, name: &str) -> Complex64 {
    let line = text
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{name} = ")))
        .unwrap_or_else(|| panic!("no {name} in {text}"));
    line.parse().unwrap()
}

#[test]
fn params_reports_exponents_and_constant() {
    let o = trimap(&["params", "3,3,4"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("gamma = 0.666666"), "{text}");
    assert!(text.contains("K = 0.2047"), "{text}");
    for key in ["alpha", "beta", "alpha_p", "beta_p", "gamma_p", "C0", "C", "tanh2_half_d12", "w1", "w2", "w3"] {
        assert!(text.lines().any(|l| l.starts_with(&format!("{key} = "))), "{key} missing");
    }
}

#[test]
fn params_json_is_one_object() {
    let o = trimap(&["params", "--sig", "3,3,4", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.trim_end().lines().count(), 1);
    let v: Value = serde_json::from_str(&text).unwrap();
    assert!((v["gamma"].as_f64().unwrap() - 2.0 / 3.0).abs() < 1e-15);
    assert!((v["K"].as_f64().unwrap() - 0.2047).abs() < 1e-4);
    assert_eq!(v["exact"]["alpha"], "1/24");
    assert_eq!(v["vertices"]["w1"]["im"].as_f64(), Some(1.0));
}

#[test]
fn invalid_signatures_exit_2_with_error_name() {
    let o = trimap(&["params", "3,3,3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("NotHyperbolic"));
    let o = trimap(&["params", "2,3,7"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("OrderTooSmall"));
    assert_eq!(trimap(&["params", "3,x,4"]).status.code(), Some(2));
    assert_eq!(trimap(&["params"]).status.code(), Some(2));
    assert_eq!(trimap(&["params", "3,3,4", "--sig", "4,4,4"]).status.code(), Some(2));
}

#[test]
fn eval_at_the_base_vertex() {
    let o = trimap(&["eval", "3,3,4", "--xi", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(field(&text, "w"), Complex64::new(0.0, 1.0));
    assert_eq!(field(&text, "dxi_dw"), Complex64::new(0.0, 0.0));
}

#[test]
fn eval_near_the_base_vertex() {
    let o = trimap(&["eval", "3,3,4", "--w", "1e-9+1i"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(field(&stdout(&o), "xi").norm() <= 1e-6);
}

#[test]
fn eval_round_trip() {
    for xi in ["0.3+0.2i", "-0.7+0.4i", "1.8+0.05i", "0.5+3i"] {
        let forward = stdout(&trimap(&["eval", "4,4,4", "--xi", xi]));
        let w = field(&forward, "w");
        let back = trimap(&["eval", "4,4,4", &format!("--w={}{:+}i", w.re, w.im)]);
        assert_eq!(back.status.code(), Some(0), "{}", stderr(&back));
        let text = stdout(&back);
        let want: Complex64 = xi.parse().unwrap();
        assert!((field(&text, "xi") - want).norm() <= 1e-9, "{xi}: {text}");
        let (d0, d1) = (field(&forward, "dxi_dw"), field(&text, "dxi_dw"));
        assert!((d0 - d1).norm() <= 1e-8 * d0.norm());
    }
}

#[test]
fn eval_errors_map_to_exit_codes() {
    let o = trimap(&["eval", "3,3,4", "--w", "5+0.01i"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("OutsideFundamentalDomain"));
    assert_eq!(trimap(&["eval", "3,3,4", "--w", "1-1i"]).status.code(), Some(3));
    assert_eq!(trimap(&["eval", "3,3,4", "--xi", "2"]).status.code(), Some(3));
    let o = trimap(&["eval", "3,3,4", "--w", "-0.1+1.3i", "--max-iter", "0"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).contains("NoConvergence"));
    assert_eq!(trimap(&["eval", "3,3,4", "--xi", "nope"]).status.code(), Some(2));
    assert_eq!(trimap(&["eval", "3,3,4"]).status.code(), Some(2));
}

#[test]
fn verify_all_lists_many_checks() {
    let o = trimap(&["verify", "3,3,4", "--suite", "all"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = stdout(&o);
    let checks = text.lines().filter(|l| l.contains(" pass ") || l.contains(" FAIL ")).count();
    assert!(checks >= 10, "{text}");
    assert!(text.contains("w3_audit pass"));
    assert!(text.contains("misprint suspected"));
}

#[test]
fn verify_geometry_suite() {
    let o = trimap(&["verify", "4,4,4", "--suite", "geometry"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("lemma1_identity pass"));
}

#[test]
fn verify_unknown_suite_prints_usage() {
    let o = trimap(&["verify", "4,4,4", "--suite", "everything"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("Usage: trimap verify"));
}

#[test]
fn verify_failure_exits_1() {
    let o = Command::new(env!("CARGO_BIN_EXE_trimap"))
        .args(["verify", "3,3,4", "--suite", "hyp"])
        .env("TRIMAP_TOL", "1e-300")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn verify_json() {
    let o = trimap(&["verify", "5,7,9", "--suite", "derivative", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let checks = v["checks"].as_array().unwrap();
    assert!(checks.iter().all(|c| c["pass"] == true));
    assert!(checks.iter().any(|c| c["name"] == "chain_rule"));
}

#[test]
fn sample_csv_layout_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    for p in [&a, &b] {
        let o = trimap(&["sample", "3,3,4", "--grid", "8x8", "--format", "csv", "--out", p.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
    }
    let (bytes_a, bytes_b) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(bytes_a, bytes_b);
    let text = String::from_utf8(bytes_a).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# signature=3,3,4"));
    assert_eq!(lines.next(), Some("w_re,w_im,xi_re,xi_im,dxidw_re,dxidw_im"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert!(!rows.is_empty() && rows.len() <= 64);
    for r in &rows {
        assert_eq!(r.len(), 6);
        assert!(r.iter().all(|x| x.is_finite()));
        assert!(r[1] > 0.0);
    }
}

#[test]
fn sample_jsonl_keys() {
    let o = trimap(&["sample", "--sig", "4,4,4", "--grid", "3x4"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 12);
    for line in text.lines() {
        let v: Value = serde_json::from_str(line).unwrap();
        let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
        assert_eq!(keys.len(), 6);
        for k in ["w_re", "w_im", "xi_re", "xi_im", "dxidw_re", "dxidw_im"] {
            assert!(keys.contains(&k));
        }
    }
    assert_eq!(text, stdout(&trimap(&["sample", "--sig", "4,4,4", "--grid", "3x4"])));
}

#[test]
fn sample_rejects_bad_grids_and_paths() {
    assert_eq!(trimap(&["sample", "3,3,4", "--grid", "1x8"]).status.code(), Some(2));
    assert_eq!(trimap(&["sample", "3,3,4", "--format", "xml"]).status.code(), Some(2));
    let o = trimap(&["sample", "3,3,4", "--out", "/nonexistent-dir/x.jsonl"]);
    assert_eq!(o.status.code(), Some(5));
    assert_eq!(trimap(&["svg", "3,3,4", "--out", "/nonexistent-dir/x.svg"]).status.code(), Some(5));
}

/// Pixel coordinates of the start and end of each path in the plot group.
fn svg_endpoints(doc: &str) -> Vec<((f64, f64), (f64, f64))> {
    let m = doc.split("matrix(").nth(1).unwrap().split(')').next().unwrap();
    let m: Vec<f64> = m.split_whitespace().map(|x| x.parse().unwrap()).collect();
    let px = |x: f64, y: f64| (m[0] * x + m[2] * y + m[4], m[1] * x + m[3] * y + m[5]);
    doc.split(" d=\"")
        .skip(1)
        .map(|chunk| {
            let d: Vec<&str> = chunk.split('"').next().unwrap().split_whitespace().collect();
            let num = |i: usize| d[i].parse::<f64>().unwrap();
            let n = d.len();
            (px(num(1), num(2)), px(num(n - 2), num(n - 1)))
        })
        .collect()
}

#[test]
fn svg_structure_and_closure() {
    let dir = tempfile::tempdir().unwrap();
    for sig in ["3,3,4", "4,4,4", "3,4,5", "5,7,9"] {
        let path = dir.path().join("t.svg");
        let o = trimap(&["svg", sig, "--out", path.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
        let doc = std::fs::read_to_string(&path).unwrap();
        assert!(doc.contains(r#"width="800" height="600""#));
        assert_eq!(doc.matches("<path").count(), 3);
        assert_eq!(doc.matches("<text").count(), 3);
        for k in 1..=3 {
            assert!(doc.contains(&format!(">w{k} (n{k}=")));
        }
        // w1 = i is the first point of the first side, in plot coordinates.
        assert!(doc.contains(r#"d="M 0.000000000000 1.000000000000 "#));
        let ends = svg_endpoints(&doc);
        assert_eq!(ends.len(), 3);
        for k in 0..3 {
            let (end, start) = (ends[k].1, ends[(k + 1) % 3].0);
            let gap = ((end.0 - start.0).powi(2) + (end.1 - start.1).powi(2)).sqrt();
            assert!(gap <= 0.5, "{sig}: sides {k} and {} miss by {gap} px", (k + 1) % 3);
            assert!((0.0..=800.0).contains(&start.0) && (0.0..=600.0).contains(&start.1));
        }
    }
}

#[test]
fn help_and_version() {
    let o = trimap(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("verify"));
    assert_eq!(trimap(&["--version"]).status.code(), Some(0));
    assert_eq!(trimap(&["frobnicate"]).status.code(), Some(2));
}
