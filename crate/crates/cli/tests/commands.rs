use std::process::{Command, Output};

use kglab::output::Document;

fn kglab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kglab")).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> Document {
    let out = kglab(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let doc = Document::parse(&text).unwrap();
    assert_eq!(doc.emit(), text, "output does not round-trip");
    doc
}

fn code(args: &[&str]) -> i32 {
    kglab(args).status.code().unwrap()
}

fn f(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn spectrum_rows() {
    let d = ok(&["spectrum", "--n", "3", "--a", "1"]);
    let t = d.get_table("spectrum").unwrap();
    let want = [(1.0, 2.0, 4.0), (2.0, 2.0, 4.0), (3.0, 1.0, 1.0)];
    assert_eq!(t.rows.len(), 3);
    for (row, (k, w, w2)) in t.rows.iter().zip(want) {
        assert_eq!(f(&row[0]), k);
        assert!((f(&row[1]) - w).abs() < 1e-14 && (f(&row[2]) - w2).abs() < 1e-14);
    }
    let d = ok(&["spectrum", "--n", "4"]);
    let w = d.get_table("spectrum").unwrap().column("omega").unwrap();
    assert_eq!(f(w[3]), 1.0);
    assert!((f(w[1]) - 5f64.sqrt()).abs() < 1e-15);
}

#[test]
fn usage_errors() {
    assert_eq!(code(&["spectrum", "--n", "1"]), 2);
    assert_eq!(code(&["spectrum"]), 2);
    assert_eq!(code(&["spectrum", "--n", "3", "--bogus"]), 2);
    assert_eq!(code(&["frobnicate"]), 2);
    assert_eq!(code(&["kam", "--n", "4", "--odd"]), 2);
    assert_eq!(code(&["kam", "--n", "3"]), 2);
    assert_eq!(code(&["residue", "--order", "9"]), 2);
    assert_eq!(code(&["residue", "--eval", "a=1"]), 2);
    assert_eq!(code(&["drift", "--n", "5", "--eps", "0.2,0.1"]), 2);
    assert_eq!(code(&["--help"]), 0);
}

#[test]
fn other_exit_codes() {
    assert_eq!(code(&["resonances", "--n", "70"]), 4);
    assert_eq!(code(&["simulate", "--n", "3", "--beta", "-1", "--q0", "5,0,0", "--steps", "10000"]), 3);
    assert_eq!(code(&["spectrum", "--n", "3", "-o", "/nonexistent/dir/out.csv"]), 5);
    assert_eq!(code(&["spectrum", "--n", "3", "--config", "/nonexistent/cfg"]), 5);
}

#[test]
fn kam_odd_three() {
    let d = ok(&["kam", "--n", "3", "--beta", "1", "--odd"]);
    let r = d.get_report("kam").unwrap();
    assert_eq!(r.get("closed_form_det_fraction"), Some("5/1024"));
    assert!((f(r.get("closed_form_det").unwrap()) - 5.0 / 1024.0).abs() <= 1e-12);
    assert!((f(r.get("det_a").unwrap()) + 5.0 / 128.0).abs() <= 1e-12);
    assert!((f(r.get("b_hessian.row_1").unwrap()) + 1.0 / 16.0).abs() <= 1e-15);
    let d = ok(&["kam", "--n", "3", "--fixed"]);
    assert_eq!(d.get_report("kam").unwrap().get("f_det"), Some("-12"));
}

#[test]
fn residue_evaluation() {
    let d = ok(&["residue", "--order", "12", "--eval", "a=1,g3=1"]);
    let r = d.get_report("residue").unwrap();
    assert_eq!(r.get("eval.bracket"), Some("25/12"));
    assert_eq!(r.get("residue"), Some("2/3*a + 116/27"));
    assert_eq!(r.get("factor"), Some("none"));
    assert_eq!(r.get("certifies"), Some("true"));
    let d = ok(&["residue", "--eval", "a=-1/2,g3=3"]);
    assert_eq!(d.header_value("eval"), Some("a=-1/2,g3=3"));
}

#[test]
fn resonances_pass() {
    let d = ok(&["resonances", "--n", "5", "--tol", "1e-20"]);
    let r = d.get_report("assertion").unwrap();
    assert_eq!(r.get("verdict"), Some("PASS"));
    assert_eq!(r.get("nontrivial_pairings"), Some("0"));
    let t = d.get_table("relations").unwrap();
    assert!(t.column("trivial").unwrap().iter().all(|&x| x == "true"));
    let d = ok(&["resonances", "--n", "6"]);
    let t = d.get_table("relations").unwrap();
    assert!(t.rows.iter().any(|r| r[0] == "two-to-one" && r[1] == "2" && r[2] == "6 6"));
}

#[test]
fn symmetry_and_normal_form() {
    let d = ok(&["symmetry", "--n", "6", "--samples", "20"]);
    assert_eq!(d.get_report("symmetry").unwrap().get("verdict"), Some("PASS"));
    let d = ok(&["normalform-eval", "--n", "5", "--seed", "3"]);
    let b = d.get_report("brackets_with_H4bar_odd").unwrap();
    for (_, v) in &b.entries {
        let kglab::output::Value::Scalar(s) = v else { panic!() };
        assert!(f(s).abs() < 1e-12);
    }
}

#[test]
fn simulate_table() {
    let d = ok(&["simulate", "--n", "4", "--steps", "100", "--record-every", "10", "--scheme", "linear-split"]);
    let t = d.get_table("trajectory").unwrap();
    assert_eq!(t.rows.len(), 11);
    assert_eq!(t.columns.len(), 2 + 8);
    let h = t.column("H").unwrap();
    assert!(h.iter().all(|x| (f(x) - f(h[0])).abs() < 1e-8));
}

#[test]
fn reruns_are_identical() {
    let args = ["drift", "--n", "4", "--eps", "0.05,0.1", "--horizon", "0.5", "--seeds", "3", "--no-timestamp"];
    let a = kglab(&args).stdout;
    assert_eq!(a, kglab(&args).stdout);
    let mut seq = args.to_vec();
    seq.push("--sequential");
    let b = String::from_utf8(kglab(&seq).stdout).unwrap();
    let a = String::from_utf8(a).unwrap();
    let strip = |s: &str| s.lines().filter(|l| !l.starts_with("# sequential")).collect::<Vec<_>>().join("\n");
    assert_eq!(strip(&a), strip(&b));
    assert!(b.contains("# sequential: true"));

    let stamped = ok(&["spectrum", "--n", "3"]);
    assert!(stamped.header_value("timestamp").is_some());
    assert!(ok(&["spectrum", "--n", "3", "--no-timestamp"]).header_value("timestamp").is_none());
}

#[test]
fn config_file_and_output_path() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# spectrum settings\nn = 4\na = 2\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    let d = ok(&["spectrum", "--config", cfg, "--n", "3", "--no-timestamp"]);
    assert_eq!(d.header_value("n"), Some("3"));
    assert_eq!(d.header_value("a"), Some("2"));
    assert_eq!(d.get_table("spectrum").unwrap().rows.len(), 3);

    let bad = dir.path().join("bad.cfg");
    std::fs::write(&bad, "n = 4\nstep = 3\n").unwrap();
    assert_eq!(code(&["spectrum", "--config", bad.to_str().unwrap()]), 2);

    let out = dir.path().join("kam.txt");
    let o = out.to_str().unwrap();
    let run = kglab(&["kam", "--n", "5", "--odd", "-o", o, "--no-timestamp"]);
    assert!(run.status.success() && run.stdout.is_empty());
    let text = std::fs::read_to_string(&out).unwrap();
    let d = Document::parse(&text).unwrap();
    assert_eq!(d.header_value("command"), Some("kam"));
    assert_eq!(d.get_report("kam").unwrap().get("nondegenerate"), Some("true"));
}
