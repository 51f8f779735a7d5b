//! End-to-end acceptance checks.
//!
//! Each criterion recomputes its quantities from scratch and compares them
//! against closed forms, independent enumerations or frozen reference values.
//! Tolerances and runtime limits are fixed here.

use std::fmt;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::Rng;

use crate::bitcode::{hadamard_code, orbit_of, BitString};
use crate::certify::{certify_result1, certify_theorem3, Verdict};
use crate::error::Result;
use crate::games::{
    biseparable_bound_bruteforce, chsh, krep, local_bound_bruteforce, network_game, network_score, Behavior,
    Rational,
};
use crate::kvgame::{
    classical_bound, exact_score, max_weight_strategy, mc_score, outcome_distribution, quantum_orbit_strategy_score,
    random_strategy, KVParams, KVStrategy, QuantumMethod,
};
use crate::netgraph::{cut_capacity, min_cut, min_cut_bruteforce, NetworkGraph};
use crate::quantum::{
    coupon_collector_prob, entanglement_fraction, entanglement_fraction_ascent, entanglement_fraction_magic,
    estimate_coverage, fidelity_phi_plus, flag_probability, isotropic, max_entangled, min_eigenvalue,
    network_fraction, network_twirl, network_twirl_operator, random_state, random_unitary, sigma_star, twirl_pair,
    DensityOperator, EdgeAssignment, Matrix, OptimizerSettings,
};
use crate::seed::SeedStream;

/// Frozen reference values from an independent exact-rational enumeration.
pub mod oracle {
    /// Max-weight strategy, `n = 4`, `L = 1`, `eta = 1/4`: 9/16.
    pub const KV_N4_MAXWEIGHT_ETA_QUARTER: f64 = 0.5625;
    /// Max-weight strategy at `n = 4` and `n = 8` for `eta` in {0.1, 0.25, 0.4}.
    pub const KV_MAXWEIGHT: [(u32, f64, f64); 6] = [
        (2, 0.1, 0.81),
        (2, 0.25, 0.5625),
        (2, 0.4, 0.36),
        (3, 0.1, 0.676512),
        (3, 0.25, 0.382_324_218_75),
        (3, 0.4, 0.205632),
    ];
    /// Orbit-basis quantum strategy, `n = 4`, `L = 1`, `eta = 1/4`.
    pub const KV_N4_QUANTUM_ETA_QUARTER: f64 = 0.4375;
}

#[derive(Clone, Debug)]
pub struct CriterionResult {
    pub id: u32,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub limit: Option<Duration>,
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "criterion {:>2} {} ({:.2}s{}) {}: {}",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.elapsed.as_secs_f64(),
            self.limit.map_or(String::new(), |l| format!(" / limit {}s", l.as_secs())),
            self.title,
            self.detail
        )
    }
}

pub const CRITERIA: u32 = 12;

pub fn title(id: u32) -> &'static str {
    match id {
        1 => "Hadamard code and orbits",
        2 => "classical bound dominates exact scores",
        3 => "parallel-repetition multiplicativity",
        4 => "Monte Carlo agrees with exact scores",
        5 => "brute-force local bounds of CHSH",
        6 => "biseparable bound of the triangle CHSH network",
        7 => "Stoer-Wagner min-cut",
        8 => "isotropic twirl",
        9 => "entanglement fraction",
        10 => "certificate thresholds",
        11 => "coupon collector and flag protocol",
        12 => "orbit-basis quantum strategy",
        _ => "unknown criterion",
    }
}

fn limit(id: u32) -> Option<Duration> {
    match id {
        1 => Some(Duration::from_secs(10)),
        2 => Some(Duration::from_secs(120)),
        5 => Some(Duration::from_secs(60)),
        6 => Some(Duration::from_secs(300)),
        _ => None,
    }
}

/// Runs one criterion. Errors from the library count as failures.
pub fn run(id: u32, seed: u64) -> CriterionResult {
    let seeds = SeedStream::new(seed).child(&format!("criterion-{id}"));
    let start = Instant::now();
    let outcome = match id {
        1 => hadamard_suite(),
        2 => bound_dominates(&seeds),
        3 => multiplicativity(&seeds),
        4 => monte_carlo(&seeds),
        5 => chsh_bounds(),
        6 => triangle_network(&seeds),
        7 => min_cuts(&seeds),
        8 => twirl(&seeds),
        9 => fractions(&seeds),
        10 => certificates(),
        11 => coupons(&seeds),
        12 => quantum_strategy(&seeds),
        _ => Ok(Check::fail(format!("no criterion {id}"))),
    };
    let elapsed = start.elapsed();
    let limit = limit(id);
    let (mut passed, mut detail) = match outcome {
        Ok(c) => (c.failures.is_empty(), c.report()),
        Err(e) => (false, format!("error: {e}")),
    };
    if let Some(l) = limit {
        if elapsed > l {
            passed = false;
            detail.push_str(&format!("; exceeded runtime limit of {}s", l.as_secs()));
        }
    }
    CriterionResult { id, title: title(id), passed, detail, elapsed, limit }
}

pub fn run_all(seed: u64) -> Vec<CriterionResult> {
    (1..=CRITERIA).map(|id| run(id, seed)).collect()
}

/// Collected observations and failed assertions of one criterion.
#[derive(Default)]
struct Check {
    notes: Vec<String>,
    failures: Vec<String>,
}

impl Check {
    fn fail(msg: String) -> Self {
        Self { notes: Vec::new(), failures: vec![msg] }
    }

    fn expect(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(msg());
        }
    }

    fn note(&mut self, msg: impl Into<String>) {
        self.notes.push(msg.into());
    }

    fn report(&self) -> String {
        let mut parts = self.notes.clone();
        if !self.failures.is_empty() {
            let shown: Vec<_> = self.failures.iter().take(5).cloned().collect();
            parts.push(format!("{} failure(s): {}", self.failures.len(), shown.join("; ")));
        }
        parts.join("; ")
    }
}

fn hadamard_suite() -> Result<Check> {
    let mut c = Check::default();
    for k in 2..=4u32 {
        let code = hadamard_code(k)?;
        let n = code.word_len();
        let words = code.codewords();
        c.expect(words.len() == n as usize, || format!("k={k}: {} codewords", words.len()));
        for w in words.iter().filter(|w| w.bits() != 0) {
            c.expect(w.hamming_weight() == n / 2, || format!("k={k}: codeword {w} has weight {}", w.hamming_weight()));
        }
        for a in words {
            for b in words {
                c.expect(code.contains(&a.xor(b)?), || format!("k={k}: {a} + {b} not in the code"));
            }
        }
        let reps = code.representatives()?;
        let mut seen = vec![false; 1usize << n];
        let mut sizes_ok = true;
        for r in &reps {
            let o = orbit_of(r, &code)?;
            sizes_ok &= o.len() == n as usize && o.representative() == *r;
            for e in o.elements() {
                c.expect(!std::mem::replace(&mut seen[e.bits() as usize], true), || format!("k={k}: {e} in two orbits"));
            }
        }
        c.expect(sizes_ok, || format!("k={k}: an orbit has the wrong size or representative"));
        c.expect(reps.len() == (1usize << n) / n as usize, || format!("k={k}: {} orbits", reps.len()));
        c.expect(seen.iter().all(|&s| s), || format!("k={k}: orbits do not cover the cube"));
        c.note(format!("n={n}: {} orbits of size {n}", reps.len()));
    }
    Ok(c)
}

const ETAS: [f64; 3] = [0.1, 0.25, 0.4];

fn bound_dominates(seeds: &SeedStream) -> Result<Check> {
    let mut c = Check::default();
    for k in 2..=4u32 {
        let n = 1u32 << k;
        let code = hadamard_code(k)?;
        let mw = max_weight_strategy(&code, 1);
        let pairs: Vec<(KVStrategy, KVStrategy)> = (0..100u64)
            .map(|i| -> Result<_> {
                Ok((
                    random_strategy(&code, 1, &mut seeds.rng(&format!("alice-n{n}"), i))?,
                    random_strategy(&code, 1, &mut seeds.rng(&format!("bob-n{n}"), i))?,
                ))
            })
            .collect::<Result<_>>()?;
        for eta in ETAS {
            let p = KVParams::new(k, 1, eta)?;
            let bound = classical_bound(&p);
            let top = exact_score(&mw, &mw, &p)?.value;
            c.expect(top <= bound + 1e-12, || format!("n={n} eta={eta}: max-weight {top} > bound {bound}"));
            let mut worst: f64 = 0.0;
            for (a, b) in &pairs {
                let s = exact_score(a, b, &p)?.value;
                worst = worst.max(s);
                c.expect(s <= bound + 1e-12, || format!("n={n} eta={eta}: random pair {s} > bound {bound}"));
            }
            c.note(format!("n={n} eta={eta}: max-weight/bound={:.4} best-random/bound={:.4}", top / bound, worst / bound));
        }
    }
    for &(k, eta, want) in &oracle::KV_MAXWEIGHT {
        let p = KVParams::new(k, 1, eta)?;
        let s = max_weight_strategy(p.code(), 1);
        let got = exact_score(&s, &s, &p)?.value;
        c.expect((got - want).abs() <= 1e-12, || format!("n={} eta={eta}: max-weight {got} != oracle {want}", 1 << k));
    }
    Ok(c)
}

fn slot(s: &KVStrategy, i: usize) -> KVStrategy {
    match s {
        KVStrategy::Product { code, slots } => KVStrategy::Product { code: code.clone(), slots: vec![slots[i].clone()] },
        KVStrategy::Joint { .. } => unreachable!("random_strategy builds product strategies"),
    }
}

fn multiplicativity(seeds: &SeedStream) -> Result<Check> {
    let mut c = Check::default();
    let mut worst: f64 = 0.0;
    for k in 2..=3u32 {
        let code = hadamard_code(k)?;
        for i in 0..5u64 {
            let a = if i == 0 { max_weight_strategy(&code, 2) } else { random_strategy(&code, 2, &mut seeds.rng("alice", i))? };
            let b = if i == 0 { a.clone() } else { random_strategy(&code, 2, &mut seeds.rng("bob", i))? };
            for eta in ETAS {
                let p1 = KVParams::new(k, 1, eta)?;
                let p2 = KVParams::new(k, 2, eta)?;
                let s0 = exact_score(&slot(&a, 0), &slot(&b, 0), &p1)?.value;
                let s1 = exact_score(&slot(&a, 1), &slot(&b, 1), &p1)?.value;
                let joint = exact_score(&a, &b, &p2)?.value;
                worst = worst.max((joint - s0 * s1).abs());
                c.expect((joint - s0 * s1).abs() <= 1e-12, || {
                    format!("n={} eta={eta}: L=2 score {joint} vs product {}", 1 << k, s0 * s1)
                });
            }
        }
    }
    c.note(format!("max |S_2 - S_1 S_1'| = {worst:.2e}"));
    let mut worst_bound: f64 = 0.0;
    for k in 2..=4u32 {
        for eta in ETAS {
            let b1 = classical_bound(&KVParams::new(k, 1, eta)?);
            let b2 = classical_bound(&KVParams::new(k, 2, eta)?);
            worst_bound = worst_bound.max((b2 - b1 * b1).abs());
            c.expect((b2 - b1 * b1).abs() <= 1e-15, || format!("n={} eta={eta}: bound {b2} vs {}", 1 << k, b1 * b1));
        }
    }
    c.note(format!("max |B_2 - B_1^2| = {worst_bound:.2e}"));
    Ok(c)
}

fn monte_carlo(seeds: &SeedStream) -> Result<Check> {
    let mut c = Check::default();
    let mut worst: f64 = 0.0;
    for k in 2..=4u32 {
        for eta in ETAS {
            let p = KVParams::new(k, 1, eta)?;
            let s = max_weight_strategy(p.code(), 1);
            let exact = exact_score(&s, &s, &p)?.value;
            let mc = mc_score(&s, &s, &p, 100_000, &seeds.child(&format!("n{}-eta{eta}", 1 << k)))?;
            let z = (mc.value - exact).abs() / mc.std_error;
            worst = worst.max(z);
            c.expect((mc.value - exact).abs() <= 4.0 * mc.std_error, || {
                format!("n={} eta={eta}: MC {} +- {} vs exact {exact}", 1 << k, mc.value, mc.std_error)
            });
        }
    }
    c.note(format!("largest deviation {worst:.2} sigma"));
    Ok(c)
}

fn chsh_bounds() -> Result<Check> {
    let mut c = Check::default();
    let b1 = local_bound_bruteforce(&chsh())?;
    let b2 = local_bound_bruteforce(&krep(&chsh(), 2)?)?;
    c.expect(b1.exact == Some(Rational::new(3, 4)), || format!("CHSH bound {:?}", b1.exact));
    c.expect(b2.exact == Some(Rational::new(5, 8)), || format!("CHSH 2-repetition bound {:?}", b2.exact));
    let show = |r: Option<Rational>| r.map_or("inexact".into(), |r| format!("{}/{}", r.numer(), r.denom()));
    c.note(format!("S_L(CHSH) = {}, S_L(CHSH x 2) = {}", show(b1.exact), show(b2.exact)));
    Ok(c)
}

fn triangle_network(seeds: &SeedStream) -> Result<Check> {
    let mut c = Check::default();
    let ng = network_game(&chsh(), &NetworkGraph::triangle())?;
    let bound = biseparable_bound_bruteforce(&ng)?;
    let target = local_bound_bruteforce(&krep(&chsh(), 2)?)?;
    c.expect(bound.exact.is_some() && bound.exact == target.exact, || {
        format!("biseparable {:?} vs S_L(CHSH x 2) {:?}", bound.exact, target.exact)
    });
    c.expect(bound.exact == Some(Rational::new(5, 8)), || format!("biseparable bound {:?}", bound.exact));
    for (g, v) in &bound.per_cut {
        c.expect(*v <= 0.625, || format!("cut {g:?} reaches {v}"));
    }
    match &bound.witness {
        Some(w) => {
            let s = network_score(&ng, w)?;
            c.expect((s - 0.625).abs() <= 1e-15, || format!("witness behavior scores {s}"));
        }
        None => c.expect(false, || "no witness behavior".into()),
    }
    // Independent spot check: random deterministic biproduct behaviors.
    let pin = ng.party_inputs()?;
    let pout = ng.party_outputs()?;
    let mut rng = seeds.rng("biproduct", 0);
    let mut best: f64 = 0.0;
    let samples = 2000;
    for _ in 0..samples {
        let lone = rng.gen_range(0..3usize);
        let pair: Vec<usize> = (0..3).filter(|&p| p != lone).collect();
        let lone_table: Vec<usize> = (0..pin[lone]).map(|_| rng.gen_range(0..pout[lone])).collect();
        let pair_table: Vec<Vec<usize>> = (0..pin[pair[0]] * pin[pair[1]])
            .map(|_| vec![rng.gen_range(0..pout[pair[0]]), rng.gen_range(0..pout[pair[1]])])
            .collect();
        let b = Behavior::deterministic(&pin, &pout, |x| {
            let mut out = vec![0; 3];
            out[lone] = lone_table[x[lone]];
            let joint = &pair_table[x[pair[0]] * pin[pair[1]] + x[pair[1]]];
            out[pair[0]] = joint[0];
            out[pair[1]] = joint[1];
            out
        })?;
        let s = network_score(&ng, &b)?;
        best = best.max(s);
        c.expect(s <= 0.625 + 1e-15, || format!("random biproduct behavior scores {s}"));
    }
    let show = bound.exact.map_or("inexact".into(), |r| format!("{}/{}", r.numer(), r.denom()));
    c.note(format!(
        "bound {show} witnessed by {:?} (cut capacity {}); best of {samples} random biproduct behaviors {best}",
        bound.subset, bound.cut_capacity
    ));
    Ok(c)
}

fn random_connected<R: Rng + ?Sized>(rng: &mut R) -> NetworkGraph {
    loop {
        let n = rng.gen_range(2..=8usize);
        let p = rng.gen_range(0.2..0.9);
        let edges: Vec<_> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|_| rng.gen_bool(p)).collect();
        if let Ok(g) = NetworkGraph::new(n, &edges) {
            return g;
        }
    }
}

fn min_cuts(seeds: &SeedStream) -> Result<Check> {
    let mut c = Check::default();
    let mut rng = seeds.rng("graphs", 0);
    for i in 0..200 {
        let g = random_connected(&mut rng);
        let sw = min_cut(&g)?;
        let bf = min_cut_bruteforce(&g)?;
        c.expect(sw.capacity == bf.capacity, || format!("graph {i} {g}: Stoer-Wagner {} vs {}", sw.capacity, bf.capacity));
        c.expect(cut_capacity(&g, &sw.subset)? == sw.capacity, || format!("graph {i}: cut set inconsistent"));
    }
    for m in 2..=6 {
        c.expect(min_cut(&NetworkGraph::star(m)?)?.capacity == 1, || format!("star {m}"));
    }
    c.expect(min_cut(&NetworkGraph::triangle())?.capacity == 2, || "triangle".into());
    for n in 2..=8 {
        c.expect(min_cut(&NetworkGraph::complete(n)?)?.capacity == n - 1, || format!("K{n}"));
    }
    c.note("200 random graphs with N <= 8, stars, K3 and K2..K8");
    Ok(c)
}

fn twirl(seeds: &SeedStream) -> Result<Check> {
    let mut c = Check::default();
    let mut rng = seeds.rng("states", 0);
    let mut worst_trace: f64 = 0.0;
    let mut worst_idem: f64 = 0.0;
    let mut worst_iso: f64 = 0.0;
    for i in 0..20 {
        let (dims, pair) = match i % 3 {
            0 => (vec![2, 2], (0, 1)),
            1 => (vec![3, 3], (1, 0)),
            _ => (vec![2, 3, 2], (0, 2)),
        };
        let rho = random_state(dims, &mut rng)?;
        let t = twirl_pair(&rho, pair.0, pair.1)?;
        worst_trace = worst_trace.max((t.trace().re - 1.0).abs());
        worst_idem = worst_idem.max(twirl_pair(&t, pair.0, pair.1)?.max_abs_diff(&t));
        if t.dims().len() == 2 {
            let d = t.dims()[0];
            let f = fidelity_phi_plus(&rho, pair.0, pair.1)?;
            worst_iso = worst_iso.max(t.max_abs_diff(&isotropic(f, d)?));
        }
    }
    c.expect(worst_trace <= 1e-12, || format!("trace defect {worst_trace:e}"));
    c.expect(worst_idem <= 1e-12, || format!("idempotence defect {worst_idem:e}"));
    c.expect(worst_iso <= 1e-10, || format!("distance to isotropic family {worst_iso:e}"));
    for d in [2, 3] {
        let phi = max_entangled(d)?;
        let diff = twirl_pair(&phi, 0, 1)?.max_abs_diff(&phi);
        c.expect(diff <= 1e-12, || format!("Phi+ (d={d}) moved by {diff:e}"));
    }
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let product = DensityOperator::pure(vec![2, 2], &[one, zero, zero, zero])?;
    let diff = twirl_pair(&product, 0, 1)?.max_abs_diff(&isotropic(0.5, 2)?);
    c.expect(diff <= 1e-12, || format!("twirl of |00> differs from isotropic(1/2) by {diff:e}"));

    // Two links (0,1) and (2,3) sharing a correlated pure component.
    let assignment = EdgeAssignment::edge_major(NetworkGraph::path(3)?, 2)?;
    let phi = phi_vec(2);
    let mut psi = vec![zero; 16];
    for i in 0..4 {
        for j in 0..4 {
            psi[i * 4 + j] += phi[i] * phi[j] * 0.8;
        }
    }
    psi[0b0110] += Complex64::new(0.6, 0.0);
    let pure = DensityOperator::pure(vec![2; 4], &psi)?;
    let rho = DensityOperator::mixture(&[(0.9, &pure), (0.1, &DensityOperator::maximally_mixed(vec![2; 4])?)])?;
    let f = network_fraction(&rho, &assignment, false)?;
    let phi_gamma = crate::quantum::phi_gamma_vector(&assignment);
    let proj = Matrix::from_fn(16, 16, |i, j| phi_gamma[i] * phi_gamma[j].conj());
    let remainder = (rho.matrix() - proj.scale(f)).scale(1.0 / (1.0 - f));
    let rem_min = min_eigenvalue(&remainder);
    c.expect(rem_min < -1e-6, || format!("remainder unexpectedly PSD (min eigenvalue {rem_min:e})"));
    let twirled_rem = network_twirl_operator(rho.dims(), &remainder, &assignment)?;
    let twirled_rem_min = min_eigenvalue(&twirled_rem);
    c.expect(twirled_rem_min >= -1e-9, || format!("twirled remainder has eigenvalue {twirled_rem_min:e}"));
    match network_twirl(&rho, &assignment) {
        Ok(t) => {
            let f_after = network_fraction(&t, &assignment, false)?;
            c.expect((f_after - f).abs() <= 1e-12, || format!("F^Gamma changed from {f} to {f_after}"));
        }
        Err(e) => c.expect(false, || format!("network twirl output rejected: {e}")),
    }
    c.note(format!(
        "trace {worst_trace:.1e}, idempotence {worst_idem:.1e}; remainder min eigenvalue {rem_min:.3e} -> {twirled_rem_min:.3e} after twirl"
    ));
    Ok(c)
}

fn phi_vec(d: usize) -> Vec<Complex64> {
    let s = 1.0 / (d as f64).sqrt();
    (0..d * d).map(|i| Complex64::new(if i % (d + 1) == 0 { s } else { 0.0 }, 0.0)).collect()
}

fn rotate_second(rho: &DensityOperator, u: &Matrix) -> Result<DensityOperator> {
    let d = u.nrows();
    let full = Matrix::identity(d, d).kronecker(u);
    DensityOperator::new(rho.dims().to_vec(), &full * rho.matrix() * full.adjoint())
}

fn fractions(seeds: &SeedStream) -> Result<Check> {
    let mut c = Check::default();
    for f in [0.0, 0.3, 0.5, 0.8, 1.0] {
        let rho = isotropic(f, 2)?;
        let fid = fidelity_phi_plus(&rho, 0, 1)?;
        c.expect((fid - f).abs() <= 1e-8, || format!("F={f}: fidelity {fid}"));
        // The best maximally entangled state is Phi+ itself for F >= 1/4 and
        // one orthogonal to it below.
        let want = f.max((1.0 - f) / 3.0);
        let ef = entanglement_fraction(&rho, 0, 1)?.value;
        c.expect((ef - want).abs() <= 1e-8, || format!("F={f}: entanglement fraction {ef}, expected {want}"));
    }
    let mut rng = seeds.rng("states", 0);
    let mut worst: f64 = 0.0;
    for i in 0..100u64 {
        let rho = random_state(vec![2, 2], &mut rng)?;
        let closed = entanglement_fraction_magic(&rho)?;
        let settings = OptimizerSettings { seed: i, ..OptimizerSettings::default() };
        let direct = entanglement_fraction_ascent(&rho, &settings)?;
        worst = worst.max((closed - direct).abs());
    }
    c.expect(worst <= 1e-6, || format!("closed form and ascent differ by {worst:e}"));
    let mut rot_worst: f64 = 0.0;
    for d in [2, 3] {
        for _ in 0..5 {
            let u = random_unitary(d, &mut rng);
            let rho = rotate_second(&max_entangled(d)?, &u)?;
            rot_worst = rot_worst.max((entanglement_fraction(&rho, 0, 1)?.value - 1.0).abs());
        }
    }
    c.expect(rot_worst <= 1e-8, || format!("rotated Phi+ recovered only to {rot_worst:e}"));
    c.note(format!("magic basis vs ascent on 100 states: {worst:.1e}; rotated Phi+: {rot_worst:.1e}"));
    Ok(c)
}

fn triangle_product(f: f64) -> Result<DensityOperator> {
    let r = isotropic(f, 2)?;
    r.tensor(&r)?.tensor(&r)
}

fn certificates() -> Result<Check> {
    let mut c = Check::default();
    let tri = EdgeAssignment::edge_major(NetworkGraph::triangle(), 2)?;
    let below = certify_theorem3(&triangle_product(0.6299)?, &tri, false)?;
    let above = certify_theorem3(&triangle_product(0.6301)?, &tri, false)?;
    c.expect(below.verdict == Verdict::NotCertified, || format!("F=0.6299 gave {}", below.verdict));
    c.expect(above.verdict == Verdict::Certified, || format!("F=0.6301 gave {}", above.verdict));
    c.expect(above.c == 2 && above.threshold == 0.25, || format!("c={} threshold={}", above.c, above.threshold));
    // The same state laid out party by party.
    let party_major = triangle_product(0.6301)?.permute(&[5, 0, 1, 2, 3, 4])?;
    let pm = certify_theorem3(&party_major, &EdgeAssignment::triangle_party_major(2)?, false)?;
    c.expect(pm.verdict == above.verdict && (pm.f_gamma - above.f_gamma).abs() <= 1e-12, || {
        format!("party-major layout gives F={} ({})", pm.f_gamma, pm.verdict)
    });

    let r1_yes = certify_result1(&[0.8, 0.7], 2)?;
    let r1_no = certify_result1(&[0.7, 0.7], 2)?;
    c.expect(r1_yes.verdict == Verdict::Certified, || "star (0.8, 0.7) not certified".into());
    c.expect(r1_no.verdict == Verdict::NotCertified, || "star (0.7, 0.7) certified".into());
    let star = EdgeAssignment::edge_major(NetworkGraph::star(2)?, 2)?;
    for (fs, r1) in [([0.8, 0.7], &r1_yes), ([0.7, 0.7], &r1_no)] {
        let rho = isotropic(fs[0], 2)?.tensor(&isotropic(fs[1], 2)?)?;
        let t3 = certify_theorem3(&rho, &star, false)?;
        c.expect(t3.verdict == r1.verdict && t3.c == r1.c && t3.threshold == r1.threshold, || {
            format!("{fs:?}: star paths disagree ({} vs {})", t3.verdict, r1.verdict)
        });
        c.expect((t3.f_gamma - r1.f_gamma).abs() <= 1e-12, || format!("{fs:?}: F {} vs {}", t3.f_gamma, r1.f_gamma));
    }
    c.note(format!(
        "triangle margins {:.3e} / {:.3e}; star products {} and {}",
        below.margin, above.margin, r1_yes.f_gamma, r1_no.f_gamma
    ));
    Ok(c)
}

fn coupons(seeds: &SeedStream) -> Result<Check> {
    let mut c = Check::default();
    c.expect(coupon_collector_prob(2, 2) == 0.5, || format!("P(2,2) = {}", coupon_collector_prob(2, 2)));
    for m in [2u64, 3, 5] {
        let k = 2 * m;
        let want = coupon_collector_prob(m, k);
        let (p, se) = estimate_coverage(m as usize, k, 100_000, &seeds.child(&format!("m{m}")))?;
        c.expect((p - want).abs() <= 4.0 * se, || format!("M={m} k={k}: simulated {p} +- {se} vs {want}"));
        c.note(format!("M={m} k={k}: {want:.5} vs {p:.5}"));
    }
    for m in [2usize, 3] {
        let edges: Vec<_> = (0..m).map(|i| isotropic(0.6 + 0.1 * i as f64, 2)).collect::<Result<_>>()?;
        let s = sigma_star(&edges)?;
        for i in 0..m {
            let p = flag_probability(&s, 2 * i, 2 * i + 1, 2)?;
            c.expect((p - 1.0 / m as f64).abs() <= 1e-12, || format!("M={m} link {i}: flag probability {p}"));
        }
    }
    Ok(c)
}

fn quantum_strategy(seeds: &SeedStream) -> Result<Check> {
    let mut c = Check::default();
    let mut rng = seeds.rng("inputs", 0);
    let mut worst: f64 = 0.0;
    for (k, l) in [(2u32, 1usize), (2, 2), (3, 1)] {
        let code = hadamard_code(k)?;
        let n = code.word_len();
        for _ in 0..10 {
            let word = |rng: &mut rand_chacha::ChaCha20Rng| BitString::new(n, rng.gen::<u64>() & ((1 << n) - 1));
            let x: Vec<_> = (0..l).map(|_| word(&mut rng)).collect::<Result<_>>()?;
            let y: Vec<_> = (0..l).map(|_| word(&mut rng)).collect::<Result<_>>()?;
            let total: f64 = outcome_distribution(&code, &x, &y)?.iter().map(|o| o.probability).sum();
            worst = worst.max((total - 1.0).abs());
        }
    }
    c.expect(worst <= 1e-10, || format!("outcome distributions off by {worst:e}"));
    let p4 = KVParams::new(2, 1, 0.25)?;
    let q4 = quantum_orbit_strategy_score(&p4, QuantumMethod::Exact)?;
    c.expect((q4.value - oracle::KV_N4_QUANTUM_ETA_QUARTER).abs() <= 1e-12, || {
        format!("n=4 quantum score {} vs oracle {}", q4.value, oracle::KV_N4_QUANTUM_ETA_QUARTER)
    });
    let mut table = vec!["ratio table (eta=0.25): n, quantum, bound, quantum/bound".to_string()];
    for k in 2..=4u32 {
        let p = KVParams::new(k, 1, 0.25)?;
        let method = if p.input_bits() <= crate::kvgame::EXACT_INPUT_BITS {
            QuantumMethod::Exact
        } else {
            QuantumMethod::MonteCarlo { samples: 20_000, seeds: seeds.child(&format!("q-n{}", 1 << k)) }
        };
        let q = quantum_orbit_strategy_score(&p, method)?;
        let b = classical_bound(&p);
        table.push(format!("{}, {:.6} ({}), {:.6}, {:.4}", 1 << k, q.value, q.method, b, q.value / b));
    }
    c.note(format!("normalization defect {worst:.1e}"));
    c.note(table.join(" | "));
    Ok(c)
}
