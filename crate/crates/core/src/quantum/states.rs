use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::{DensityOperator, Matrix};
use crate::error::{input, Result};

/// `|Phi+><Phi+|` with `|Phi+> = sum_i |ii> / sqrt(d)`.
pub fn max_entangled(d: usize) -> Result<DensityOperator> {
    if d < 2 {
        return input(format!("maximally entangled state needs d >= 2, got {d}"));
    }
    DensityOperator::new(vec![d, d], phi_plus_matrix(d))
}

pub(crate) fn phi_plus_matrix(d: usize) -> Matrix {
    let v = Complex64::new(1.0 / d as f64, 0.0);
    Matrix::from_fn(d * d, d * d, |i, j| if i % (d + 1) == 0 && j % (d + 1) == 0 { v } else { Complex64::new(0.0, 0.0) })
}

/// `F Phi+ + (1 - F) (1 - Phi+) / (d^2 - 1)`.
pub fn isotropic(f: f64, d: usize) -> Result<DensityOperator> {
    if !(0.0..=1.0).contains(&f) {
        return input(format!("fidelity {f} outside [0, 1]"));
    }
    if d < 2 {
        return input(format!("isotropic state needs d >= 2, got {d}"));
    }
    let phi = phi_plus_matrix(d);
    let n = d * d;
    let id = Matrix::identity(n, n);
    let m = phi.scale(f) + (id - &phi).scale((1.0 - f) / (n - 1) as f64);
    DensityOperator::new(vec![d, d], m)
}

/// `|k><k|` on a `dim`-level system.
fn level(dim: usize, k: usize) -> Matrix {
    let mut m = Matrix::zeros(dim, dim);
    m[(k, k)] = Complex64::new(1.0, 0.0);
    m
}

/// Embeds a `d (x) d` operator into the lower `d` levels of two `(d+1)`-level systems.
fn embed_pair(m: &Matrix, d: usize) -> Matrix {
    let e = d + 1;
    let mut out = Matrix::zeros(e * e, e * e);
    for i in 0..d * d {
        for j in 0..d * d {
            out[((i / d) * e + i % d, (j / d) * e + j % d)] = m[(i, j)];
        }
    }
    out
}

/// Star-network flag state: with probability `1/M` link `i` carries
/// `edge_states[i]` while every other link carries the flag `|dd>`.
///
/// Subsystems are edge-major, `A_1 B_1 A_2 B_2 ...`, each of dimension
/// `d + 1` with the flag on level `d`. With a single edge the state is
/// returned unchanged.
pub fn sigma_star(edge_states: &[DensityOperator]) -> Result<DensityOperator> {
    let Some(first) = edge_states.first() else {
        return input("sigma_star needs at least one edge state");
    };
    let d = first.dims()[0];
    if edge_states.iter().any(|r| r.dims() != [d, d]) {
        return input(format!("every edge state must live on {d} (x) {d}"));
    }
    let m = edge_states.len();
    if m == 1 {
        return Ok(first.clone());
    }
    let e = d + 1;
    let flag = level(e, d).kronecker(&level(e, d));
    let dims = vec![e; 2 * m];
    super::total_dim(&dims)?;
    let total = e.pow(2 * m as u32);
    let mut acc = Matrix::zeros(total, total);
    for (i, rho) in edge_states.iter().enumerate() {
        let mut term = Matrix::from_element(1, 1, Complex64::new(1.0, 0.0));
        for j in 0..m {
            let factor = if i == j { embed_pair(rho.matrix(), d) } else { flag.clone() };
            term = term.kronecker(&factor);
        }
        acc += term;
    }
    DensityOperator::new(dims, acc.scale(1.0 / m as f64))
}

/// The triangle state on six qutrits `A1 A2 B1 B2 C1 C2`: an equal mixture of
/// the isotropic two-qubit state on one link (`A2-B1`, `B2-C1` or `C2-A1`)
/// with `|2>` on the four remaining subsystems.
pub fn sigma_triangle(f: f64) -> Result<DensityOperator> {
    let rho = embed_pair(isotropic(f, 2)?.matrix(), 2);
    let flag = level(3, 2);
    let flag2 = flag.kronecker(&flag);
    // Term for link A2-B1 in the order (A1, A2 B1, B2, C1, C2).
    let base = flag.kronecker(&rho).kronecker(&flag2).kronecker(&flag);
    let t1 = DensityOperator::unchecked(vec![3; 6], base)?;
    // Relabel A -> B -> C -> A: new subsystem s is old subsystem s - 2.
    let t2 = t1.permute(&[4, 5, 0, 1, 2, 3])?;
    let t3 = t2.permute(&[4, 5, 0, 1, 2, 3])?;
    let m = (t1.into_matrix() + t2.into_matrix() + t3.into_matrix()).scale(1.0 / 3.0);
    DensityOperator::new(vec![3; 6], m)
}

/// `G G^dag / tr(G G^dag)` for a complex Gaussian `G`: a full-rank random state.
pub fn random_state<R: Rng + ?Sized>(dims: Vec<usize>, rng: &mut R) -> Result<DensityOperator> {
    let n = super::total_dim(&dims)?;
    let g = Matrix::from_fn(n, n, |_, _| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    DensityOperator::new(dims, m.scale(1.0 / tr))
}

/// Probability that the flag test `{Pi_d (x) Pi_d, 1 - Pi_d (x) Pi_d}` on
/// subsystems `(sys_a, sys_b)` reports entanglement, where `Pi_d` projects
/// onto the non-flag levels `0..d`.
pub fn flag_probability(rho: &DensityOperator, sys_a: usize, sys_b: usize, d: usize) -> Result<f64> {
    let pair = rho.reduce(&[sys_a, sys_b])?;
    let e = pair.dims()[0];
    if pair.dims()[1] != e || d >= e {
        return input(format!("flag level {d} needs two subsystems of dimension > {d}"));
    }
    Ok((0..e * e).filter(|i| i / e < d && i % e < d).map(|i| pair.matrix()[(i, i)].re).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::fidelity_phi_plus;

    #[test]
    fn phi_plus_properties() {
        let phi = max_entangled(2).unwrap();
        assert!((phi.purity() - 1.0).abs() < 1e-14);
        let half = phi.reduce(&[0]).unwrap();
        assert!(half.max_abs_diff(&DensityOperator::maximally_mixed(vec![2]).unwrap()) < 1e-15);
        assert!(max_entangled(1).is_err());
    }

    #[test]
    fn isotropic_family() {
        assert!(isotropic(1.0, 3).unwrap().max_abs_diff(&max_entangled(3).unwrap()) < 1e-15);
        let mixed = isotropic(0.25, 2).unwrap();
        assert!(mixed.max_abs_diff(&DensityOperator::maximally_mixed(vec![2, 2]).unwrap()) < 1e-15);
        assert!((fidelity_phi_plus(&isotropic(0.8, 2).unwrap(), 0, 1).unwrap() - 0.8).abs() < 1e-15);
        assert!(isotropic(1.1, 2).is_err());
        assert!(isotropic(0.0, 2).is_ok());
    }

    #[test]
    fn sigma_star_shapes() {
        let rho = isotropic(0.9, 2).unwrap();
        assert_eq!(sigma_star(std::slice::from_ref(&rho)).unwrap(), rho);
        let s = sigma_star(&[rho.clone(), rho.clone()]).unwrap();
        assert_eq!(s.dims(), &[3, 3, 3, 3]);
        assert_eq!(s.dim(), 81);
        for i in 0..2 {
            assert!((flag_probability(&s, 2 * i, 2 * i + 1, 2).unwrap() - 0.5).abs() < 1e-12);
        }
        assert!(sigma_star(&[]).is_err());
        assert!(sigma_star(&[rho, isotropic(0.5, 3).unwrap()]).is_err());
    }

    #[test]
    fn triangle_state_symmetry() {
        let s = sigma_triangle(0.7).unwrap();
        assert_eq!(s.dim(), 729);
        let shifted = s.permute(&[4, 5, 0, 1, 2, 3]).unwrap();
        assert!(shifted.max_abs_diff(&s) < 1e-12);
        assert!(sigma_triangle(-0.1).is_err());
    }
}
