use std::path::Path;

use gmnl::certify::{certify_result1, certify_theorem3, fmt_f64, Certificate};
use gmnl::games::{
    biseparable_bound_bruteforce, chsh, krep, local_bound_bruteforce, network_game, network_score, theorem1_certify,
    BellGame, Rational, Threshold,
};
use gmnl::kvgame::{
    classical_bound, default_eta, exact_score, max_weight_strategy, mc_score, quantum_orbit_strategy_score,
    random_joint_strategy, random_strategy, KVParams, KVStrategy, QuantumMethod, ScoreEstimate,
};
use gmnl::netgraph::{min_cut, min_cut_bruteforce, NetworkGraph};
use gmnl::quantum::{coupon_collector_prob, copies_for_success, estimate_coverage, read_state, EdgeAssignment};
use gmnl::verify;
use gmnl::SeedStream;

use crate::{
    csv_escape, CertifyArgs, Cli, CliError, Command, DistillArgs, KvArgs, Layout, LocalboundArgs, MincutArgs,
    NetgameArgs, Outcome, Report, VerifyArgs,
};

pub(crate) fn dispatch(cli: &Cli) -> Result<Outcome, CliError> {
    let seed = cli.common.seed;
    let format = cli.common.format;
    let report = match &cli.command {
        Command::Kv(a) => kv(a, seed)?,
        Command::Localbound(a) => localbound(a, seed)?,
        Command::Netgame(a) => netgame(a, seed)?,
        Command::Mincut(a) => mincut(a, seed)?,
        Command::Certify(a) => certify(a, seed)?,
        Command::Distill(a) => distill(a, seed)?,
        Command::Verify(a) => return verify(a, seed, format),
    };
    Ok(Outcome { text: report.render(format), success: true })
}

fn read_file(key: &str, path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Domain(format!("{key} {}: {e}", path.display())))
}

fn with_path<T>(key: &str, path: &Path, r: gmnl::Result<T>) -> Result<T, CliError> {
    r.map_err(|e| CliError::Domain(format!("{key} {}: {e}", path.display())))
}

/// Builtin name or edge-list file.
pub(crate) fn parse_graph(spec: &str) -> Result<NetworkGraph, CliError> {
    let sized = |name: &str| -> Option<Result<usize, CliError>> {
        spec.strip_prefix(name).and_then(|s| s.strip_prefix(':')).map(|v| {
            v.parse::<usize>().map_err(|_| CliError::usage("--graph", format!("bad size {v:?} in {spec:?}")))
        })
    };
    let built = if spec == "triangle" {
        Ok(NetworkGraph::triangle())
    } else if let Some(m) = sized("star") {
        NetworkGraph::star(m?)
    } else if let Some(n) = sized("complete") {
        NetworkGraph::complete(n?)
    } else if let Some(n) = sized("path") {
        NetworkGraph::path(n?)
    } else if let Some(n) = sized("cycle") {
        NetworkGraph::cycle(n?)
    } else {
        let path = Path::new(spec);
        return with_path("--graph", path, NetworkGraph::parse(&read_file("--graph", path)?));
    };
    built.map_err(|e| CliError::usage("--graph", e))
}

fn parse_game(spec: &str) -> Result<BellGame, CliError> {
    if spec == "chsh" {
        return Ok(chsh());
    }
    let path = Path::new(spec);
    with_path("--game", path, BellGame::from_csv(&read_file("--game", path)?))
}

fn show_exact(r: Option<Rational>) -> String {
    r.map_or_else(|| "none".to_string(), |r| format!("{}/{}", r.numer(), r.denom()))
}

fn join<T: ToString>(items: &[T]) -> String {
    items.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}

fn kv(a: &KvArgs, seed: u64) -> Result<Report, CliError> {
    if a.n < 2 || a.n > 64 || !a.n.is_power_of_two() {
        return Err(CliError::usage("--n", format!("{} is not a power of two between 2 and 64", a.n)));
    }
    if a.l == 0 {
        return Err(CliError::usage("--L", "must be at least 1"));
    }
    let k = a.n.trailing_zeros();
    let eta = match a.eta {
        Some(e) => e,
        None => {
            let e = default_eta(k);
            if e <= 0.0 {
                return Err(CliError::usage("--eta", format!("the default 1/2 - 1/log2(n) is {e} for n={}; pass --eta", a.n)));
            }
            e
        }
    };
    let params = KVParams::new(k, a.l, eta).map_err(|e| CliError::usage("--eta", e))?;
    if !a.exact && a.samples == 0 {
        return Err(CliError::usage("--samples", "must be positive for Monte Carlo scoring"));
    }
    let seeds = SeedStream::new(seed);
    let bob_spec = a.bob.clone().unwrap_or_else(|| a.strategy.clone());

    let mut r = Report::new("kv", seed);
    r.config("n", a.n)
        .config("L", a.l)
        .config("eta", fmt_f64(eta))
        .config("strategy", &a.strategy)
        .config("bob", &bob_spec)
        .config("exact", a.exact)
        .config("samples", if a.exact { 0 } else { a.samples });

    let estimate: ScoreEstimate = if a.strategy == "quantum" || bob_spec == "quantum" {
        if a.strategy != bob_spec {
            return Err(CliError::usage("--bob", "the quantum strategy is played by both players"));
        }
        let method = if a.exact {
            QuantumMethod::Exact
        } else {
            QuantumMethod::MonteCarlo { samples: a.samples, seeds: seeds.child("kv-quantum") }
        };
        quantum_orbit_strategy_score(&params, method)?
    } else {
        let alice = kv_strategy("--strategy", &a.strategy, &params, &seeds, "kv-alice")?;
        let bob = kv_strategy("--bob", &bob_spec, &params, &seeds, "kv-bob")?;
        if a.exact {
            exact_score(&alice, &bob, &params)?
        } else {
            mc_score(&alice, &bob, &params, a.samples, &seeds.child("kv"))?
        }
    };
    let bound = classical_bound(&params);
    r.field("value", fmt_f64(estimate.value))
        .field("std_error", fmt_f64(estimate.std_error))
        .field("samples", estimate.samples)
        .field("method", estimate.method)
        .field("bound", fmt_f64(bound))
        .field("ratio", fmt_f64(estimate.value / bound));
    Ok(r)
}

fn kv_strategy(key: &str, spec: &str, params: &KVParams, seeds: &SeedStream, component: &str) -> Result<KVStrategy, CliError> {
    let code = params.code();
    let l = params.repetitions();
    Ok(match spec {
        "maxweight" => max_weight_strategy(code, l),
        "random" => random_strategy(code, l, &mut seeds.rng(component, 0))?,
        "random-joint" => random_joint_strategy(code, l, &mut seeds.rng(component, 0))?,
        _ => {
            let path = Path::new(spec);
            let s = with_path(key, path, KVStrategy::from_text(&read_file(key, path)?))?;
            if s.code().word_len() != code.word_len() || s.repetitions() != l {
                return Err(CliError::usage(
                    key,
                    format!("strategy file is for n={} L={}", s.code().word_len(), s.repetitions()),
                ));
            }
            s
        }
    })
}

fn localbound(a: &LocalboundArgs, seed: u64) -> Result<Report, CliError> {
    if a.reps == 0 {
        return Err(CliError::usage("--reps", "must be at least 1"));
    }
    let base = parse_game(&a.game)?;
    let game = if a.reps == 1 { base } else { krep(&base, a.reps)? };
    let b = local_bound_bruteforce(&game)?;
    let mut r = Report::new("localbound", seed);
    r.config("game", &a.game).config("reps", a.reps);
    r.field("sizes", join(&game.sizes()))
        .field("value", fmt_f64(b.value))
        .field("exact", show_exact(b.exact))
        .field("alice", join(&b.alice))
        .field("bob", join(&b.bob));
    Ok(r)
}

fn netgame(a: &NetgameArgs, seed: u64) -> Result<Report, CliError> {
    let graph = parse_graph(&a.graph)?;
    let ng = network_game(&parse_game(&a.game)?, &graph)?;
    let mut r = Report::new("netgame", seed);
    r.config("game", &a.game).config("graph", &graph);
    match &a.behavior {
        Some(path) => {
            let behavior = with_path("--behavior", path, ng.behavior_from_csv(&read_file("--behavior", path)?))?;
            let source = match a.threshold {
                Some(t) if (0.0..=1.0).contains(&t) => Threshold::Supplied(t),
                Some(t) => return Err(CliError::usage("--threshold", format!("{t} outside [0, 1]"))),
                None => Threshold::BruteForce,
            };
            r.config("behavior", path.display()).config(
                "threshold",
                a.threshold.map_or_else(|| "bruteforce".to_string(), fmt_f64),
            );
            let v = theorem1_certify(&ng, &behavior, &source)?;
            r.field("score", fmt_f64(network_score(&ng, &behavior)?))
                .field("min_cut", v.min_cut)
                .field("threshold", fmt_f64(v.threshold))
                .field("margin", fmt_f64(v.margin))
                .field("verdict", if v.certified { "gmnl" } else { "not-certified" });
        }
        None => {
            if a.threshold.is_some() {
                return Err(CliError::usage("--threshold", "only meaningful with --behavior"));
            }
            let b = biseparable_bound_bruteforce(&ng)?;
            r.field("biseparable_bound", fmt_f64(b.value))
                .field("exact", show_exact(b.exact))
                .field("group", join(&b.subset))
                .field("cut_capacity", b.cut_capacity);
            for (group, v) in &b.per_cut {
                let key = format!("cut.{}", group.iter().map(ToString::to_string).collect::<Vec<_>>().join("-"));
                r.field(&key, fmt_f64(*v));
            }
        }
    }
    Ok(r)
}

fn mincut(a: &MincutArgs, seed: u64) -> Result<Report, CliError> {
    let g = parse_graph(&a.graph)?;
    let cut = if a.bruteforce { min_cut_bruteforce(&g)? } else { min_cut(&g)? };
    let mut r = Report::new("mincut", seed);
    r.config("graph", &g).config("algorithm", if a.bruteforce { "bruteforce" } else { "stoer-wagner" });
    let cut_edges: Vec<String> = cut.cut_set.iter().map(|(i, j)| format!("{i}-{j}")).collect();
    r.field("parties", g.parties())
        .field("edges", g.edges().len())
        .field("capacity", cut.capacity)
        .field("subset", join(&cut.subset))
        .field("complement", join(&cut.complement(g.parties())))
        .field("cut_edges", cut_edges.join(" "));
    Ok(r)
}

fn certify(a: &CertifyArgs, seed: u64) -> Result<Report, CliError> {
    let mut r = Report::new("certify", seed);
    let cert: Certificate = match (&a.state, a.fractions.is_empty()) {
        (Some(_), false) => return Err(CliError::usage("--fractions", "give either --state or --fractions")),
        (None, true) => return Err(CliError::usage("--state", "a state file (or --fractions) is required")),
        (None, false) => {
            if a.graph.is_some() {
                return Err(CliError::usage("--graph", "--fractions always describes a star network"));
            }
            if a.optimize_fraction {
                return Err(CliError::usage("--optimize-fraction", "needs a state"));
            }
            let joined: Vec<String> = a.fractions.iter().map(|f| fmt_f64(*f)).collect();
            r.config("fractions", joined.join(" ")).config("d", a.d);
            certify_result1(&a.fractions, a.d)?
        }
        (Some(path), true) => {
            let spec = a.graph.as_deref().ok_or_else(|| CliError::usage("--graph", "required with --state"))?;
            let graph = parse_graph(spec)?;
            let bytes = std::fs::read(path).map_err(|e| CliError::Domain(format!("--state {}: {e}", path.display())))?;
            let rho = with_path("--state", path, read_state(bytes.as_slice()))?;
            let d = rho.dims()[0];
            let assignment = match a.layout {
                Layout::EdgeMajor => EdgeAssignment::edge_major(graph.clone(), d),
                Layout::PartyMajor => {
                    if graph != NetworkGraph::triangle() {
                        return Err(CliError::usage("--layout", "party-major is defined for the triangle only"));
                    }
                    EdgeAssignment::triangle_party_major(d)
                }
            };
            let assignment = with_path("--state", path, assignment)?;
            r.config("graph", &graph)
                .config("state", path.display())
                .config("dims", join(rho.dims()))
                .config("layout", match a.layout {
                    Layout::EdgeMajor => "edge-major",
                    Layout::PartyMajor => "party-major",
                })
                .config("optimize_fraction", a.optimize_fraction);
            certify_theorem3(&rho, &assignment, a.optimize_fraction)?
        }
    };
    let cert = match a.k_max {
        Some(k) => {
            r.config("k_max", k);
            cert.with_diagnostic(k, &SeedStream::new(seed).child("certify"))?
        }
        None => cert,
    };
    for line in cert.to_records().lines() {
        if let Some((k, v)) = line.split_once('=') {
            r.field(k, v);
        }
    }
    r.table = Some((Certificate::CSV_HEADER.to_string(), vec![cert.to_csv_row()]));
    Ok(r)
}

fn distill(a: &DistillArgs, seed: u64) -> Result<Report, CliError> {
    let links = match (a.links, &a.graph) {
        (Some(_), Some(_)) => return Err(CliError::usage("--graph", "give either --links or --graph")),
        (Some(m), None) => m,
        (None, Some(spec)) => parse_graph(spec)?.edges().len() as u64,
        (None, None) => return Err(CliError::usage("--links", "required")),
    };
    if links == 0 {
        return Err(CliError::usage("--links", "must be at least 1"));
    }
    if a.copies.is_none() && a.target.is_none() {
        return Err(CliError::usage("--copies", "give --copies, --target or both"));
    }
    if a.samples > 0 && a.copies.is_none() {
        return Err(CliError::usage("--samples", "simulation needs --copies"));
    }
    let mut r = Report::new("distill", seed);
    r.config("links", links);
    if let Some(k) = a.copies {
        r.config("copies", k);
    }
    if let Some(p) = a.target {
        r.config("target", fmt_f64(p));
    }
    r.config("samples", a.samples);
    if let Some(k) = a.copies {
        r.field("coverage_probability", fmt_f64(coupon_collector_prob(links, k)));
        if a.samples > 0 {
            let m = usize::try_from(links).map_err(|_| CliError::usage("--links", "too many links to simulate"))?;
            let (p, se) = estimate_coverage(m, k, a.samples, &SeedStream::new(seed).child("distill"))?;
            r.field("simulated_probability", fmt_f64(p)).field("simulated_std_error", fmt_f64(se));
        }
    }
    if let Some(p) = a.target {
        let k = copies_for_success(links, p).map_err(|e| CliError::usage("--target", e))?;
        r.field("copies_needed", k).field("achieved_probability", fmt_f64(coupon_collector_prob(links, k)));
    }
    Ok(r)
}

fn verify(a: &VerifyArgs, seed: u64, format: crate::Format) -> Result<Outcome, CliError> {
    let ids: Vec<u32> = if a.only.is_empty() { (1..=verify::CRITERIA).collect() } else { a.only.clone() };
    if let Some(bad) = ids.iter().find(|id| !(1..=verify::CRITERIA).contains(*id)) {
        return Err(CliError::usage("--only", format!("no criterion {bad}; valid ids are 1..={}", verify::CRITERIA)));
    }
    let mut r = Report::new("verify", seed);
    r.config("criteria", join(&ids));
    let mut rows = Vec::new();
    let mut passed = 0;
    for id in &ids {
        let c = verify::run(*id, seed);
        passed += usize::from(c.passed);
        r.field(&format!("criterion.{id}"), &c);
        rows.push(format!(
            "{},{},{},{:.3},{},{}",
            c.id,
            csv_escape(c.title),
            if c.passed { "pass" } else { "fail" },
            c.elapsed.as_secs_f64(),
            c.limit.map_or(String::new(), |l| l.as_secs().to_string()),
            csv_escape(&c.detail)
        ));
    }
    r.field("passed", format!("{passed}/{}", ids.len()));
    r.table = Some(("id,title,result,elapsed_s,limit_s,detail".to_string(), rows));
    Ok(Outcome { text: r.render(format), success: passed == ids.len() })
}
