//! Dense density operators on small multipartite systems.
//!
//! Subsystem 0 is the most significant tensor factor: a basis index is the
//! mixed-radix number formed by the per-subsystem levels in order.

mod assignment;
mod coupon;
mod fraction;
mod io;
mod states;
mod twirl;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{capacity, input, Error, Result};

pub use assignment::EdgeAssignment;
pub use coupon::{coupon_collector_prob, copies_for_success, estimate_coverage, simulate_flag_protocol};
pub use fraction::{
    entanglement_fraction, entanglement_fraction_ascent, entanglement_fraction_magic, fidelity_phi_plus,
    network_fraction, network_fraction_optimized, phi_gamma_vector, random_unitary, FractionEstimate, OptimizerSettings,
};
pub use io::{read_state, write_state};
pub use states::{flag_probability, isotropic, max_entangled, random_state, sigma_star, sigma_triangle};
pub use twirl::{network_twirl, network_twirl_operator, twirl_pair};

pub type Matrix = DMatrix<Complex64>;

/// Largest total dimension handled.
pub const MAX_DIM: usize = 4096;

pub const HERMITIAN_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
/// Smallest eigenvalue accepted as positive semidefinite.
pub const PSD_TOL: f64 = -1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    dims: Vec<usize>,
    matrix: Matrix,
}

impl DensityOperator {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(dims: Vec<usize>, matrix: Matrix) -> Result<Self> {
        let rho = Self::unchecked(dims, matrix)?;
        rho.validate()?;
        Ok(rho)
    }

    /// Checks only the shape.
    pub(crate) fn unchecked(dims: Vec<usize>, matrix: Matrix) -> Result<Self> {
        let total = total_dim(&dims)?;
        if matrix.nrows() != total || matrix.ncols() != total {
            return input(format!("matrix is {}x{}, dims {dims:?} need {total}x{total}", matrix.nrows(), matrix.ncols()));
        }
        Ok(Self { dims, matrix })
    }

    pub fn validate(&self) -> Result<()> {
        let herm = hermitian_defect(&self.matrix);
        if herm > HERMITIAN_TOL {
            return Err(Error::Validation(format!("not Hermitian: max |rho - rho^dag| = {herm:e}")));
        }
        let tr = self.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::Validation(format!("trace is {tr}, not 1")));
        }
        let min = min_eigenvalue(&self.matrix);
        if min < PSD_TOL {
            return Err(Error::Validation(format!("not positive semidefinite: smallest eigenvalue {min:e}")));
        }
        Ok(())
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> Matrix {
        self.matrix
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    pub fn min_eigenvalue(&self) -> f64 {
        min_eigenvalue(&self.matrix)
    }

    /// Pure state `|psi><psi|` of a normalized vector.
    pub fn pure(dims: Vec<usize>, psi: &[Complex64]) -> Result<Self> {
        let norm: f64 = psi.iter().map(|c| c.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-10 {
            return input(format!("state vector has squared norm {norm}"));
        }
        let n = psi.len();
        Self::new(dims, Matrix::from_fn(n, n, |i, j| psi[i] * psi[j].conj()))
    }

    pub fn maximally_mixed(dims: Vec<usize>) -> Result<Self> {
        let n = total_dim(&dims)?;
        Self::new(dims, Matrix::identity(n, n).scale(1.0 / n as f64))
    }

    pub fn tensor(&self, other: &DensityOperator) -> Result<Self> {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        total_dim(&dims)?;
        Ok(Self { dims, matrix: self.matrix.kronecker(&other.matrix) })
    }

    /// Partial trace keeping `keep` (in the given order).
    pub fn reduce(&self, keep: &[usize]) -> Result<Self> {
        let n = self.dims.len();
        let mut seen = vec![false; n];
        for &k in keep {
            if k >= n || std::mem::replace(&mut seen[k], true) {
                return input(format!("invalid subsystem list {keep:?} for {n} subsystems"));
            }
        }
        if keep.is_empty() {
            return input("must keep at least one subsystem");
        }
        let traced: Vec<usize> = (0..n).filter(|i| !seen[*i]).collect();
        let strides = strides(&self.dims);
        let kept_off = offsets(&self.dims, &strides, keep);
        let traced_off = offsets(&self.dims, &strides, &traced);
        let m = kept_off.len();
        let out = Matrix::from_fn(m, m, |r, c| {
            traced_off.iter().map(|&t| self.matrix[(kept_off[r] + t, kept_off[c] + t)]).sum()
        });
        Ok(Self { dims: keep.iter().map(|&k| self.dims[k]).collect(), matrix: out })
    }

    /// Reorders subsystems: new subsystem `i` is old subsystem `order[i]`.
    pub fn permute(&self, order: &[usize]) -> Result<Self> {
        let n = self.dims.len();
        let mut seen = vec![false; n];
        if order.len() != n || order.iter().any(|&o| o >= n || std::mem::replace(&mut seen[o], true)) {
            return input(format!("{order:?} is not a permutation of {n} subsystems"));
        }
        let map = offsets(&self.dims, &strides(&self.dims), order);
        let d = self.dim();
        let out = Matrix::from_fn(d, d, |i, j| self.matrix[(map[i], map[j])]);
        Ok(Self { dims: order.iter().map(|&o| self.dims[o]).collect(), matrix: out })
    }

    /// Largest entrywise distance to another operator of the same shape.
    pub fn max_abs_diff(&self, other: &DensityOperator) -> f64 {
        if self.dims != other.dims {
            return f64::INFINITY;
        }
        (&self.matrix - &other.matrix).iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `sum_i w_i rho_i` for states of equal shape.
    pub fn mixture(parts: &[(f64, &DensityOperator)]) -> Result<Self> {
        let Some((_, first)) = parts.first() else {
            return input("mixture of zero states");
        };
        if parts.iter().any(|(w, r)| w.is_nan() || *w < 0.0 || r.dims != first.dims) {
            return input("mixture needs nonnegative weights and equal dimensions");
        }
        let mut m = Matrix::zeros(first.dim(), first.dim());
        for (w, r) in parts {
            m += r.matrix.scale(*w);
        }
        Self::new(first.dims.clone(), m)
    }
}

pub(crate) fn total_dim(dims: &[usize]) -> Result<usize> {
    if dims.is_empty() || dims.contains(&0) {
        return input(format!("subsystem dimensions must be positive, got {dims:?}"));
    }
    let total = dims.iter().try_fold(1usize, |acc, &d| acc.checked_mul(d)).unwrap_or(usize::MAX);
    if total > MAX_DIM {
        return capacity(format!("total dimension {total} exceeds {MAX_DIM}"));
    }
    Ok(total)
}

pub(crate) fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * dims[i + 1];
    }
    s
}

/// Full-space offsets of every joint index of `systems`, enumerated with
/// `systems[0]` most significant.
pub(crate) fn offsets(dims: &[usize], strides: &[usize], systems: &[usize]) -> Vec<usize> {
    let mut out = vec![0usize];
    for &s in systems {
        out = out.iter().flat_map(|&o| (0..dims[s]).map(move |k| o + k * strides[s])).collect();
    }
    out
}

pub(crate) fn hermitian_defect(m: &Matrix) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Smallest eigenvalue of the Hermitian part of `m`.
pub fn min_eigenvalue(m: &Matrix) -> f64 {
    let h = (m + m.adjoint()).scale(0.5);
    h.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
}
