//! Many-copy GMNL certificates for network states.
//!
//! A state distributed over a connected network with `d`-dimensional links is
//! certified when its network fraction `F^Gamma` strictly exceeds `d^{-c}`,
//! `c` being the min-cut capacity of the network.

use std::fmt;

use crate::error::{input, Error, Result};
use crate::kvgame::{
    classical_bound, default_eta, quantum_orbit_strategy_score, KVParams, QuantumMethod, ScoreEstimate,
};
use crate::netgraph::{min_cut, NetworkGraph};
use crate::quantum::{network_fraction, DensityOperator, EdgeAssignment};
use crate::seed::SeedStream;

/// Largest POVM local-model fidelity known for the two-qubit isotropic state.
pub const LHS_POVM: f64 = 0.625;
/// Local model for projective measurements.
pub const PM_MODEL: f64 = 0.762;

/// Per-edge fidelity the triangle needs, `2^{-2/3}`.
pub fn triangle_required() -> f64 {
    2f64.powf(-2.0 / 3.0)
}

/// `d^{-c}`.
pub fn threshold(d: usize, c: usize) -> f64 {
    (d as f64).powi(-(c as i32))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Certified,
    NotCertified,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Certified => "certified",
            Verdict::NotCertified => "not-certified",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    pub graph: String,
    pub parties: usize,
    pub edges: usize,
    pub d: usize,
    pub c: usize,
    pub f_gamma: f64,
    /// True when `f_gamma` came from the local-unitary search.
    pub optimized: bool,
    pub threshold: f64,
    pub verdict: Verdict,
    pub margin: f64,
    pub k_diagnostic: Option<CopyNumberReport>,
    pub notes: Vec<String>,
}

impl Certificate {
    fn build(graph: &NetworkGraph, d: usize, f_gamma: f64, optimized: bool) -> Result<Self> {
        let c = min_cut(graph)?.capacity;
        let t = threshold(d, c);
        let mut notes = Vec::new();
        if optimized {
            notes.push("f_gamma is a lower bound from per-edge local-unitary ascent".to_string());
        }
        if c > 1 {
            notes.push(format!(
                "min-cut capacity is {c}; the threshold d^-c uses it, while the single-cut (c = 1) argument covers star networks only"
            ));
        }
        Ok(Self {
            graph: graph.to_string(),
            parties: graph.parties(),
            edges: graph.edges().len(),
            d,
            c,
            f_gamma,
            optimized,
            threshold: t,
            verdict: if f_gamma > t { Verdict::Certified } else { Verdict::NotCertified },
            margin: f_gamma - t,
            k_diagnostic: None,
            notes,
        })
    }

    pub fn with_diagnostic(mut self, k_max: u32, seeds: &SeedStream) -> Result<Self> {
        self.k_diagnostic = Some(copy_number_diagnostic(self.f_gamma, self.d, self.c, k_max, seeds)?);
        Ok(self)
    }

    /// Flat `key=value` lines.
    pub fn to_records(&self) -> String {
        let mut out = String::new();
        let mut kv = |k: &str, v: String| out.push_str(&format!("{k}={v}\n"));
        kv("graph", self.graph.clone());
        kv("parties", self.parties.to_string());
        kv("edges", self.edges.to_string());
        kv("d", self.d.to_string());
        kv("c", self.c.to_string());
        kv("f_gamma", fmt_f64(self.f_gamma));
        kv("f_gamma_method", (if self.optimized { "optimized-lower-bound" } else { "canonical" }).into());
        kv("threshold", fmt_f64(self.threshold));
        kv("verdict", self.verdict.to_string());
        kv("margin", fmt_f64(self.margin));
        kv("ref.lhs_povm", fmt_f64(LHS_POVM));
        kv("ref.pm_model", fmt_f64(PM_MODEL));
        kv("ref.triangle_required", fmt_f64(triangle_required()));
        for (i, n) in self.notes.iter().enumerate() {
            kv(&format!("note.{i}"), n.clone());
        }
        if let Some(diag) = &self.k_diagnostic {
            kv("diag.base", fmt_f64(diag.base));
            kv("diag.summary", diag.summary.clone());
            for (k, g) in diag.growth.iter().enumerate() {
                kv(&format!("diag.k{}.growth", k + 1), fmt_f64(*g));
            }
            for r in &diag.kv_rows {
                let p = format!("diag.k{}", r.k);
                kv(&format!("{p}.kv_n"), r.n.to_string());
                kv(&format!("{p}.kv_eta"), fmt_f64(r.eta));
                kv(&format!("{p}.kv_quantum"), fmt_f64(r.quantum.value));
                kv(&format!("{p}.kv_quantum_std_error"), fmt_f64(r.quantum.std_error));
                kv(&format!("{p}.kv_method"), r.quantum.method.to_string());
                kv(&format!("{p}.kv_scaled"), fmt_f64(r.scaled));
                kv(&format!("{p}.kv_bound"), fmt_f64(r.bound));
                kv(&format!("{p}.kv_ratio"), fmt_f64(r.scaled / r.bound));
            }
        }
        out
    }

    pub const CSV_HEADER: &'static str =
        "graph,parties,edges,d,c,f_gamma,f_gamma_method,threshold,verdict,margin,lhs_povm,pm_model,triangle_required";

    pub fn to_csv_row(&self) -> String {
        [
            self.graph.clone(),
            self.parties.to_string(),
            self.edges.to_string(),
            self.d.to_string(),
            self.c.to_string(),
            fmt_f64(self.f_gamma),
            (if self.optimized { "optimized-lower-bound" } else { "canonical" }).into(),
            fmt_f64(self.threshold),
            self.verdict.to_string(),
            fmt_f64(self.margin),
            fmt_f64(LHS_POVM),
            fmt_f64(PM_MODEL),
            fmt_f64(triangle_required()),
        ]
        .join(",")
    }
}

/// Seventeen significant digits, enough to round-trip any double.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Compares the network fraction of `rho` with `d^{-c}`.
pub fn certify_theorem3(rho: &DensityOperator, assignment: &EdgeAssignment, optimize: bool) -> Result<Certificate> {
    let d = assignment
        .uniform_dim()
        .ok_or_else(|| Error::Unsupported("links of different dimensions have no single threshold d^-c".into()))?;
    let f = network_fraction(rho, assignment, optimize)?;
    Certificate::build(assignment.graph(), d, f, optimize)
}

/// Star network with one link per entry of `fractions`: certified iff
/// `prod F_i > 1/d`.
pub fn certify_result1(fractions: &[f64], d: usize) -> Result<Certificate> {
    if fractions.is_empty() {
        return input("need at least one link fidelity");
    }
    if let Some(f) = fractions.iter().find(|f| !(0.0..=1.0).contains(*f)) {
        return input(format!("fidelity {f} outside [0, 1]"));
    }
    if d < 2 {
        return input(format!("local dimension must be at least 2, got {d}"));
    }
    let graph = NetworkGraph::star(fractions.len())?;
    Certificate::build(&graph, d, fractions.iter().product(), false)
}

/// Score over local bound.
pub fn normalized_violation(score: f64, local_bound: f64) -> Result<f64> {
    if local_bound.is_nan() || local_bound <= 0.0 {
        return input(format!("local bound must be positive, got {local_bound}"));
    }
    Ok(score / local_bound)
}

#[derive(Clone, Debug, PartialEq)]
pub struct KvComparison {
    pub k: u32,
    /// Khot-Vishnoi input length `d^k`.
    pub n: u64,
    pub eta: f64,
    pub quantum: ScoreEstimate,
    /// `F^k * quantum`.
    pub scaled: f64,
    /// Classical bound of the single-round game.
    pub bound: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CopyNumberReport {
    /// `F d^c`.
    pub base: f64,
    /// `(F d^c)^k` for `k = 1..=k_max`.
    pub growth: Vec<f64>,
    pub kv_rows: Vec<KvComparison>,
    pub summary: String,
}

/// Largest Khot-Vishnoi input length evaluated in the diagnostic.
pub const DIAGNOSTIC_MAX_N: u64 = 32;
/// Monte Carlo samples for the diagnostic's larger codes.
pub const DIAGNOSTIC_SAMPLES: u64 = 20_000;

/// How `(F d^c)^k` evolves with the copy number `k`, plus, where `d^k` is a
/// small power of two, the quantum orbit-strategy score of the single-round
/// Khot-Vishnoi game on `n = d^k` scaled by `F^k` against its classical bound.
///
/// The noise is `1/2 - 1/log2(n)` when that is positive and `1/4` for `n = 4`.
/// Nothing is extrapolated beyond the computed rows.
pub fn copy_number_diagnostic(
    f_gamma: f64,
    d: usize,
    c: usize,
    k_max: u32,
    seeds: &SeedStream,
) -> Result<CopyNumberReport> {
    if !(f_gamma > 0.0 && f_gamma <= 1.0) {
        return input(format!("network fraction {f_gamma} must lie in (0, 1]"));
    }
    if k_max == 0 {
        return input("k_max must be at least 1");
    }
    if d < 2 {
        return input(format!("local dimension must be at least 2, got {d}"));
    }
    let base = f_gamma * threshold(d, c).recip();
    let growth = (1..=k_max).map(|k| base.powi(k as i32)).collect();
    let mut kv_rows = Vec::new();
    for k in 1..=k_max {
        let Some(n) = (d as u64).checked_pow(k) else { break };
        if n > DIAGNOSTIC_MAX_N {
            break;
        }
        if n < 4 || !n.is_power_of_two() {
            continue;
        }
        let order = n.trailing_zeros();
        let eta = if n >= 8 { default_eta(order) } else { 0.25 };
        let params = KVParams::new(order, 1, eta)?;
        let method = if params.input_bits() <= crate::kvgame::EXACT_INPUT_BITS {
            QuantumMethod::Exact
        } else {
            QuantumMethod::MonteCarlo { samples: DIAGNOSTIC_SAMPLES, seeds: seeds.child(&format!("diagnostic-n{n}")) }
        };
        let quantum = quantum_orbit_strategy_score(&params, method)?;
        kv_rows.push(KvComparison {
            k,
            n,
            eta,
            scaled: f_gamma.powi(k as i32) * quantum.value,
            bound: classical_bound(&params),
            quantum,
        });
    }
    let summary = if base <= 1.0 {
        format!("F d^c = {base:.6} <= 1: the criterion fails and (F d^c)^k does not grow for any k")
    } else {
        format!("asymptotic indicator: F d^c = {base:.6} > 1, so (F d^c)^k grows without bound; the copy number where a violation appears is not determined")
    };
    Ok(CopyNumberReport { base, growth, kv_rows, summary })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::isotropic;

    fn triangle_product(f: f64) -> DensityOperator {
        let r = isotropic(f, 2).unwrap();
        r.tensor(&r).unwrap().tensor(&r).unwrap()
    }

    #[test]
    fn triangle_flip() {
        let a = EdgeAssignment::edge_major(NetworkGraph::triangle(), 2).unwrap();
        let below = certify_theorem3(&triangle_product(0.6299), &a, false).unwrap();
        let above = certify_theorem3(&triangle_product(0.6301), &a, false).unwrap();
        assert_eq!(below.verdict, Verdict::NotCertified);
        assert_eq!(above.verdict, Verdict::Certified);
        assert_eq!(above.c, 2);
        assert_eq!(above.threshold, 0.25);
        assert!(above.notes.iter().any(|n| n.contains("min-cut capacity is 2")));
        let seven = certify_theorem3(&triangle_product(0.7), &a, false).unwrap();
        assert!((seven.margin - 0.093).abs() < 1e-12);
    }

    #[test]
    fn star_product_examples() {
        assert_eq!(certify_result1(&[0.8, 0.7], 2).unwrap().verdict, Verdict::Certified);
        assert_eq!(certify_result1(&[0.7, 0.7], 2).unwrap().verdict, Verdict::NotCertified);
        assert_eq!(certify_result1(&[1.0, 1.0, 1.0], 3).unwrap().verdict, Verdict::Certified);
        assert!(certify_result1(&[], 2).is_err());
        assert!(certify_result1(&[1.2], 2).is_err());
    }

    #[test]
    fn star_paths_agree() {
        let a = EdgeAssignment::edge_major(NetworkGraph::star(2).unwrap(), 2).unwrap();
        let rho = isotropic(0.8, 2).unwrap().tensor(&isotropic(0.7, 2).unwrap()).unwrap();
        let t3 = certify_theorem3(&rho, &a, false).unwrap();
        let r1 = certify_result1(&[0.8, 0.7], 2).unwrap();
        assert_eq!((t3.verdict, t3.c, t3.threshold), (r1.verdict, r1.c, r1.threshold));
        assert!((t3.f_gamma - r1.f_gamma).abs() < 1e-12);
    }

    #[test]
    fn boundary_is_not_certified() {
        let c = certify_result1(&[0.5], 2).unwrap();
        assert_eq!(c.verdict, Verdict::NotCertified);
        assert_eq!(c.margin, 0.0);
    }

    #[test]
    fn mixed_dimensions_unsupported() {
        let a = EdgeAssignment::new(NetworkGraph::path(3).unwrap(), vec![(0, 1), (2, 3)], &[2, 2, 3, 3]).unwrap();
        let rho = isotropic(0.9, 2).unwrap().tensor(&isotropic(0.9, 3).unwrap()).unwrap();
        assert!(matches!(certify_theorem3(&rho, &a, false), Err(Error::Unsupported(_))));
    }

    #[test]
    fn diagnostic() {
        let seeds = SeedStream::new(1);
        let r = copy_number_diagnostic(1.0, 2, 1, 4, &seeds).unwrap();
        assert_eq!(r.growth, vec![2.0, 4.0, 8.0, 16.0]);
        assert_eq!(r.kv_rows.iter().map(|x| x.n).collect::<Vec<_>>(), vec![4, 8, 16]);
        assert!((r.kv_rows[0].quantum.value - 0.4375).abs() < 1e-12);
        assert!(r.summary.starts_with("asymptotic indicator"));
        let weak = copy_number_diagnostic(0.2, 2, 2, 3, &seeds).unwrap();
        assert!(weak.summary.contains("criterion fails"));
        assert!(copy_number_diagnostic(0.0, 2, 1, 3, &seeds).is_err());
    }

    #[test]
    fn records_are_stable() {
        let c = certify_result1(&[0.8, 0.7], 2).unwrap().with_diagnostic(2, &SeedStream::new(3)).unwrap();
        let text = c.to_records();
        assert!(text.contains("verdict=certified\n"));
        assert!(text.contains("threshold=5.0000000000000000e-1\n"));
        assert_eq!(text, c.to_records());
        assert_eq!(c.to_csv_row().split(',').count(), Certificate::CSV_HEADER.split(',').count());
    }

    #[test]
    fn normalized() {
        assert_eq!(normalized_violation(0.75, 0.75).unwrap(), 1.0);
        assert!(normalized_violation(0.5, 0.0).is_err());
    }
}
