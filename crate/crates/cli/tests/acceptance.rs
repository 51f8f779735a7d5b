//! Acceptance gate: criteria 1-12 through the library, 13 through the binary.
//! Prints one line per criterion and exits nonzero if any fails.

use std::path::PathBuf;
use std::process::Command;

use gmnl::certify::certify_theorem3;
use gmnl::quantum::{read_state, EdgeAssignment};
use gmnl::verify;
use gmnl::NetworkGraph;

const SEED: u64 = 20240611;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn gmnl(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_gmnl")).args(args).output().expect("gmnl binary runs")
}

fn cli_end_to_end() -> Result<String, String> {
    let seed = SEED.to_string();
    let v = gmnl(&["verify", "--seed", &seed]);
    let stdout = String::from_utf8_lossy(&v.stdout);
    if v.status.code() != Some(0) {
        return Err(format!("verify exited with {:?}:\n{stdout}", v.status.code()));
    }
    let lines = stdout.lines().filter(|l| l.starts_with("criterion.")).count();
    if lines != 12 || !stdout.contains("passed=12/12") {
        return Err(format!("verify reported {lines} criteria:\n{stdout}"));
    }

    let graph = fixture("triangle.txt");
    let state = fixture("triangle_iso07.state");
    let args = ["certify", "--seed", &seed, "--graph", graph.to_str().unwrap(), "--state", state.to_str().unwrap()];
    let first = gmnl(&args);
    let second = gmnl(&args);
    if first.status.code() != Some(0) {
        return Err(format!("certify failed: {}", String::from_utf8_lossy(&first.stderr)));
    }
    if first.stdout != second.stdout {
        return Err("certify output differs between two runs".into());
    }

    let g = NetworkGraph::parse(&std::fs::read_to_string(&graph).unwrap()).map_err(|e| e.to_string())?;
    let rho = read_state(std::fs::read(&state).unwrap().as_slice()).map_err(|e| e.to_string())?;
    let assignment = EdgeAssignment::edge_major(g, 2).map_err(|e| e.to_string())?;
    let cert = certify_theorem3(&rho, &assignment, false).map_err(|e| e.to_string())?;
    let text = String::from_utf8(first.stdout).unwrap();
    if !text.ends_with(&cert.to_records()) {
        return Err(format!("CLI certificate differs from the library's:\n{text}\n---\n{}", cert.to_records()));
    }
    Ok(format!(
        "verify exit 0 with 12/12; certify reproducible ({} bytes), verdict {} margin {:.3}",
        text.len(),
        cert.verdict,
        cert.margin
    ))
}

fn main() {
    let mut failed = Vec::new();
    for c in verify::run_all(SEED) {
        println!("{c}");
        if !c.passed {
            failed.push(c.id);
        }
    }
    let start = std::time::Instant::now();
    let e2e = cli_end_to_end();
    let (ok, detail) = match &e2e {
        Ok(d) => (true, d.clone()),
        Err(d) => (false, d.clone()),
    };
    println!(
        "criterion 13 {} ({:.2}s) CLI end-to-end: {detail}",
        if ok { "PASS" } else { "FAIL" },
        start.elapsed().as_secs_f64()
    );
    if !ok {
        failed.push(13);
    }
    if failed.is_empty() {
        println!("acceptance: all 13 criteria pass");
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
