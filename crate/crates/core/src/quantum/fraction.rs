//! Overlaps with maximally entangled states.
//!
//! A maximally entangled state on `d (x) d` is `|phi_M> = vec(M) / sqrt(d)`
//! for a unitary `M`, i.e. `phi_M[i d + j] = M[i, j] / sqrt(d)`; `M = 1` is
//! `Phi+`. The network fraction uses products of such states over the edges.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::{strides, DensityOperator, EdgeAssignment, Matrix};
use crate::error::{input, Result};
use crate::netgraph::NetworkGraph;
use crate::seed::SeedStream;

/// Controls for the local-unitary ascent.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OptimizerSettings {
    /// Random starting points in addition to the canonical one.
    pub restarts: usize,
    /// Stop once a full sweep improves the overlap by less than this.
    pub tolerance: f64,
    pub max_sweeps: usize,
    pub seed: u64,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        Self { restarts: 16, tolerance: 1e-9, max_sweeps: 500, seed: 0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FractionEstimate {
    pub value: f64,
    /// True when `value` comes from a local search and may fall short of the maximum.
    pub lower_bound: bool,
}

/// `<Phi+| rho_AB |Phi+>` for the canonical `Phi+`.
pub fn fidelity_phi_plus(rho: &DensityOperator, sys_a: usize, sys_b: usize) -> Result<f64> {
    let pair = pair_state(rho, sys_a, sys_b)?;
    let d = pair.dims()[0];
    let m = pair.matrix();
    let mut s = 0.0;
    for i in 0..d {
        for k in 0..d {
            s += m[(i * (d + 1), k * (d + 1))].re;
        }
    }
    Ok(s / d as f64)
}

fn pair_state(rho: &DensityOperator, sys_a: usize, sys_b: usize) -> Result<DensityOperator> {
    let dims = rho.dims();
    if sys_a >= dims.len() || sys_b >= dims.len() || sys_a == sys_b {
        return input(format!("invalid subsystem pair ({sys_a}, {sys_b})"));
    }
    if dims[sys_a] != dims[sys_b] {
        return input(format!("pair dimensions differ: {} vs {}", dims[sys_a], dims[sys_b]));
    }
    rho.reduce(&[sys_a, sys_b])
}

/// Maximal overlap of the pair with any maximally entangled state: exact for
/// qubits, a lower bound from [`entanglement_fraction_ascent`] otherwise.
pub fn entanglement_fraction(rho: &DensityOperator, sys_a: usize, sys_b: usize) -> Result<FractionEstimate> {
    let pair = pair_state(rho, sys_a, sys_b)?;
    if pair.dims()[0] == 2 {
        Ok(FractionEstimate { value: entanglement_fraction_magic(&pair)?, lower_bound: false })
    } else {
        let value = entanglement_fraction_ascent(&pair, &OptimizerSettings::default())?;
        Ok(FractionEstimate { value, lower_bound: true })
    }
}

/// Two-qubit closed form: the largest eigenvalue of the real part of the
/// state written in the magic basis.
pub fn entanglement_fraction_magic(pair: &DensityOperator) -> Result<f64> {
    if pair.dims() != [2, 2] {
        return input(format!("magic-basis formula needs a two-qubit state, got dims {:?}", pair.dims()));
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let (r, i, z) = (Complex64::new(s, 0.0), Complex64::new(0.0, s), Complex64::new(0.0, 0.0));
    #[rustfmt::skip]
    let magic = Matrix::from_row_slice(4, 4, &[
        r,  i, z,  z,
        z,  z, i,  r,
        z,  z, i, -r,
        r, -i, z,  z,
    ]);
    let in_magic = magic.adjoint() * pair.matrix() * &magic;
    let re = DMatrix::<f64>::from_fn(4, 4, |a, b| 0.5 * (in_magic[(a, b)].re + in_magic[(b, a)].re));
    Ok(re.symmetric_eigenvalues().iter().copied().fold(f64::NEG_INFINITY, f64::max))
}

/// Alternating local-unitary ascent on a single `d (x) d` pair.
pub fn entanglement_fraction_ascent(pair: &DensityOperator, settings: &OptimizerSettings) -> Result<f64> {
    let dims = pair.dims();
    if dims.len() != 2 || dims[0] != dims[1] {
        return input(format!("expected a d (x) d state, got dims {dims:?}"));
    }
    let assignment = EdgeAssignment::edge_major(NetworkGraph::path(2)?, dims[0])?;
    network_fraction_optimized(pair, &assignment, settings)
}

/// The product of `Phi+` over all edges, as a state vector.
pub fn phi_gamma_vector(assignment: &EdgeAssignment) -> Vec<Complex64> {
    let unitaries: Vec<Matrix> = (0..assignment.pairs().len())
        .map(|e| {
            let d = assignment.edge_dim(e);
            Matrix::identity(d, d)
        })
        .collect();
    Layout::new(assignment).product_vector(&unitaries)
}

/// `F^Gamma = <Phi^Gamma| rho |Phi^Gamma>`, with the canonical `Phi+` on every
/// edge or, when `optimize` is set, the best found by per-edge ascent (a
/// lower bound on the maximum over local unitaries).
pub fn network_fraction(rho: &DensityOperator, assignment: &EdgeAssignment, optimize: bool) -> Result<f64> {
    if optimize {
        network_fraction_optimized(rho, assignment, &OptimizerSettings::default())
    } else {
        assignment.check(rho.dims())?;
        Ok(expectation(rho.matrix(), &phi_gamma_vector(assignment)))
    }
}

/// Per-edge coordinate ascent from the canonical start and `restarts` random
/// starts; the best value found is returned.
pub fn network_fraction_optimized(
    rho: &DensityOperator,
    assignment: &EdgeAssignment,
    settings: &OptimizerSettings,
) -> Result<f64> {
    assignment.check(rho.dims())?;
    let layout = Layout::new(assignment);
    let seeds = SeedStream::new(settings.seed);
    let best = (0..=settings.restarts)
        .into_par_iter()
        .map(|r| {
            let start: Vec<Matrix> = if r == 0 {
                (0..layout.edges.len()).map(|e| Matrix::identity(layout.edges[e].2, layout.edges[e].2)).collect()
            } else {
                let mut rng = seeds.rng("fraction-restart", r as u64);
                layout.edges.iter().map(|&(_, _, d)| random_unitary(d, &mut rng)).collect()
            };
            layout.ascend(rho.matrix(), start, settings)
        })
        .collect::<Vec<_>>();
    Ok(best.into_iter().fold(f64::NEG_INFINITY, f64::max))
}

fn expectation(m: &Matrix, psi: &[Complex64]) -> f64 {
    let v = nalgebra::DVector::from_column_slice(psi);
    (v.adjoint() * m * &v)[(0, 0)].re
}

/// `Q` factor of a complex Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Matrix {
    let g = Matrix::from_fn(d, d, |_, _| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    g.qr().q()
}

/// `U V^dag` from the SVD `g = U S V^dag`: the unitary maximizing `Re tr(M^dag g)`.
fn polar_unitary(g: &Matrix) -> Matrix {
    let svd = g.clone().svd(true, true);
    svd.u.expect("u requested") * svd.v_t.expect("v_t requested")
}

struct Layout {
    /// `(sys_a, sys_b, d)` per edge.
    edges: Vec<(usize, usize, usize)>,
    /// Per edge, the pair index `i d + j` of every basis state.
    pair_index: Vec<Vec<usize>>,
}

impl Layout {
    fn new(assignment: &EdgeAssignment) -> Self {
        let dims = assignment.dims();
        let st = strides(dims);
        let total: usize = dims.iter().product();
        let edges: Vec<_> = assignment.pairs().iter().map(|&(a, b)| (a, b, dims[a])).collect();
        let pair_index = edges
            .iter()
            .map(|&(a, b, d)| (0..total).map(|i| ((i / st[a]) % d) * d + (i / st[b]) % d).collect())
            .collect();
        Self { edges, pair_index }
    }

    fn edge_vector(&self, e: usize, m: &Matrix) -> Vec<Complex64> {
        let d = self.edges[e].2;
        let s = 1.0 / (d as f64).sqrt();
        (0..d * d).map(|k| m[(k / d, k % d)] * s).collect()
    }

    fn product_vector(&self, unitaries: &[Matrix]) -> Vec<Complex64> {
        let phis: Vec<_> = unitaries.iter().enumerate().map(|(e, m)| self.edge_vector(e, m)).collect();
        let total = self.pair_index[0].len();
        (0..total)
            .map(|i| phis.iter().enumerate().map(|(e, p)| p[self.pair_index[e][i]]).product())
            .collect()
    }

    fn ascend(&self, rho: &Matrix, mut us: Vec<Matrix>, settings: &OptimizerSettings) -> f64 {
        let mut value = expectation(rho, &self.product_vector(&us));
        for _ in 0..settings.max_sweeps {
            let before = value;
            for e in 0..self.edges.len() {
                let d = self.edges[e].2;
                let psi = self.product_vector(&us);
                let w = rho * nalgebra::DVector::from_column_slice(&psi);
                let others: Vec<_> = (0..self.edges.len())
                    .filter(|&f| f != e)
                    .map(|f| (f, self.edge_vector(f, &us[f])))
                    .collect();
                let mut g = Matrix::zeros(d, d);
                for (i, wi) in w.iter().enumerate() {
                    let c: Complex64 = others.iter().map(|(f, p)| p[self.pair_index[*f][i]]).product();
                    let k = self.pair_index[e][i];
                    g[(k / d, k % d)] += c.conj() * wi;
                }
                let candidate = polar_unitary(&g);
                let mut trial = us.clone();
                trial[e] = candidate;
                let v = expectation(rho, &self.product_vector(&trial));
                if v >= value {
                    us = trial;
                    value = v;
                }
            }
            if value - before < settings.tolerance {
                break;
            }
        }
        value
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{isotropic, max_entangled};

    fn local_rotation(rho: &DensityOperator, u: &Matrix) -> DensityOperator {
        let d = u.nrows();
        let full = Matrix::identity(d, d).kronecker(u);
        DensityOperator::new(rho.dims().to_vec(), &full * rho.matrix() * full.adjoint()).unwrap()
    }

    #[test]
    fn isotropic_fractions() {
        for f in [0.0, 0.3, 0.5, 0.8, 1.0] {
            let rho = isotropic(f, 2).unwrap();
            assert!((fidelity_phi_plus(&rho, 0, 1).unwrap() - f).abs() < 1e-12);
            let e = entanglement_fraction(&rho, 0, 1).unwrap();
            // Below 1/4 the maximum is attained away from Phi+.
            let want = if f < 0.25 { (1.0 - f) / 3.0 } else { f };
            assert!((e.value - want).abs() < 1e-8, "F={f}: {}", e.value);
        }
    }

    #[test]
    fn product_state_has_fraction_half() {
        let c = Complex64::new(1.0, 0.0);
        let z = Complex64::new(0.0, 0.0);
        let zero = DensityOperator::pure(vec![2, 2], &[c, z, z, z]).unwrap();
        assert!((fidelity_phi_plus(&zero, 0, 1).unwrap() - 0.5).abs() < 1e-15);
        assert!((entanglement_fraction(&zero, 0, 1).unwrap().value - 0.5).abs() < 1e-10);
    }

    #[test]
    fn rotated_phi_plus_recovered() {
        let mut rng = SeedStream::new(5).rng("t", 0);
        for d in [2, 3] {
            let u = random_unitary(d, &mut rng);
            let rho = local_rotation(&max_entangled(d).unwrap(), &u);
            assert!(fidelity_phi_plus(&rho, 0, 1).unwrap() < 0.99);
            let e = entanglement_fraction(&rho, 0, 1).unwrap();
            assert!((e.value - 1.0).abs() < 1e-8, "d={d}: {}", e.value);
            assert_eq!(e.lower_bound, d > 2);
        }
    }

    #[test]
    fn network_fraction_factorizes() {
        let a = EdgeAssignment::edge_major(NetworkGraph::triangle(), 2).unwrap();
        let rho = isotropic(0.7, 2).unwrap();
        let prod = rho.tensor(&rho).unwrap().tensor(&rho).unwrap();
        assert!((network_fraction(&prod, &a, false).unwrap() - 0.343).abs() < 1e-12);
        assert!((network_fraction(&prod, &a, true).unwrap() - 0.343).abs() < 1e-9);
        let wrong = EdgeAssignment::edge_major(NetworkGraph::path(2).unwrap(), 2).unwrap();
        assert!(network_fraction(&prod, &wrong, false).is_err());
    }
}
