use std::path::PathBuf;

use gmnl_cli::run_with;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name).to_str().unwrap().to_string()
}

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("gmnl").chain(args.iter().copied());
    let code = run_with(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn field<'a>(text: &'a str, key: &str) -> &'a str {
    text.lines()
        .find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix('=')))
        .unwrap_or_else(|| panic!("no {key} in\n{text}"))
}

#[test]
fn mincut_of_triangle() {
    let (code, out, _) = call(&["mincut", "--graph", &fixture("triangle.txt")]);
    assert_eq!(code, 0);
    assert_eq!(field(&out, "capacity"), "2");
    let (_, star, _) = call(&["mincut", "--graph", "star:4", "--bruteforce"]);
    assert_eq!(field(&star, "capacity"), "1");
}

#[test]
fn kv_exact_n16() {
    let (code, out, _) = call(&["kv", "--n", "16", "--eta", "0.25", "--strategy", "maxweight", "--exact"]);
    assert_eq!(code, 0);
    let bound: f64 = field(&out, "bound").parse().unwrap();
    let value: f64 = field(&out, "value").parse().unwrap();
    assert!((bound - 16f64.powf(-1.0 / 3.0)).abs() < 1e-15);
    assert!(value <= bound);
    assert_eq!(field(&out, "method"), "exact");
}

#[test]
fn kv_monte_carlo_is_seeded() {
    let args = ["kv", "--n", "8", "--strategy", "random", "--samples", "5000", "--seed", "9"];
    let (_, a, _) = call(&args);
    let (_, b, _) = call(&args);
    assert_eq!(a, b);
    assert_eq!(field(&a, "seed"), "9");
    assert_eq!(field(&a, "method"), "monte-carlo");
    let (_, q, _) = call(&["kv", "--n", "4", "--eta", "0.25", "--strategy", "quantum", "--exact"]);
    assert_eq!(field(&q, "value").parse::<f64>().unwrap(), 0.4375);
}

#[test]
fn certify_triangle_state() {
    let (code, out, _) = call(&["certify", "--graph", "triangle", "--state", &fixture("triangle_iso07.state")]);
    assert_eq!(code, 0);
    assert_eq!(field(&out, "verdict"), "certified");
    assert_eq!(field(&out, "c"), "2");
    let margin: f64 = field(&out, "margin").parse().unwrap();
    assert!((margin - (0.343 - 0.25)).abs() < 1e-12);
    assert!(field(&out, "note.0").contains("min-cut capacity is 2"));
}

#[test]
fn certify_csv_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cert.csv");
    let p = path.to_str().unwrap();
    let (code, out, _) = call(&["certify", "--fractions", "0.8,0.7", "--format", "csv", "--out", p]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let data: Vec<_> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(data.len(), 2);
    assert!(data[0].starts_with("graph,parties,edges,d,c,f_gamma"));
    assert!(data[1].contains(",certified,"));
}

#[test]
fn localbound_and_netgame() {
    let (_, lb, _) = call(&["localbound", "--reps", "2"]);
    assert_eq!(field(&lb, "exact"), "5/8");
    let (_, ng, _) = call(&["netgame", "--graph", "triangle"]);
    assert_eq!(field(&ng, "exact"), "5/8");
    assert_eq!(field(&ng, "cut_capacity"), "2");
}

#[test]
fn distill_copies() {
    let (code, out, _) = call(&["distill", "--links", "2", "--copies", "2", "--target", "0.99"]);
    assert_eq!(code, 0);
    assert_eq!(field(&out, "coverage_probability").parse::<f64>().unwrap(), 0.5);
    let k: u64 = field(&out, "copies_needed").parse().unwrap();
    assert!(k >= 2);
}

#[test]
fn verify_single_criterion() {
    let (code, out, _) = call(&["verify", "--only", "5,7"]);
    assert_eq!(code, 0, "{out}");
    assert_eq!(field(&out, "passed"), "2/2");
}

#[test]
fn usage_errors_exit_2_and_name_the_key() {
    let (code, _, err) = call(&["kv", "--n", "12"]);
    assert_eq!(code, 2);
    assert!(err.contains("--n"));
    let (code, _, err) = call(&["kv", "--n", "4"]);
    assert_eq!(code, 2);
    assert!(err.contains("--eta"));
    let (code, _, err) = call(&["mincut", "--graph", "triangle", "--colour", "red"]);
    assert_eq!(code, 2);
    assert!(err.contains("--colour"));
    let (code, _, err) = call(&["verify", "--only", "14"]);
    assert_eq!(code, 2);
    assert!(err.contains("--only"));
    let (code, _, _) = call(&["frobnicate"]);
    assert_eq!(code, 2);
}

#[test]
fn domain_errors_exit_1() {
    let (code, _, err) = call(&["mincut", "--graph", "/nonexistent/graph.txt"]);
    assert_eq!(code, 1);
    assert!(err.contains("--graph"));
    // A qubit triangle state read as two links does not fit.
    let (code, _, _) = call(&["certify", "--graph", "path:3", "--state", &fixture("triangle_iso07.state")]);
    assert_eq!(code, 1);
}
