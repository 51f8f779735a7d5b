//! The isotropic `(U (x) U*)` twirl on one link, and on every link of a network.
//!
//! On a pair `P` of `d`-level subsystems with the rest `R`,
//! `T(rho) = Phi+ (x) R1 + (1 - Phi+) / (d^2 - 1) (x) R0` where
//! `R1 = <Phi+| rho |Phi+>` (a partial inner product on `P`) and
//! `R0 = Tr_P rho - R1`. All coherence between the pair and `R` is removed.

use num_complex::Complex64;

use super::{offsets, strides, DensityOperator, EdgeAssignment, Matrix};
use crate::error::{input, Result};

pub fn twirl_pair(rho: &DensityOperator, sys_a: usize, sys_b: usize) -> Result<DensityOperator> {
    let m = twirl_matrix(rho.dims(), rho.matrix(), sys_a, sys_b)?;
    DensityOperator::new(rho.dims().to_vec(), m)
}

/// Twirls every edge pair of `assignment`, validating once at the end.
pub fn network_twirl(rho: &DensityOperator, assignment: &EdgeAssignment) -> Result<DensityOperator> {
    let m = network_twirl_operator(rho.dims(), rho.matrix(), assignment)?;
    DensityOperator::new(rho.dims().to_vec(), m)
}

/// The same map on an arbitrary (not necessarily positive) operator.
pub fn network_twirl_operator(dims: &[usize], m: &Matrix, assignment: &EdgeAssignment) -> Result<Matrix> {
    assignment.check(dims)?;
    let mut out = m.clone();
    for &(a, b) in assignment.pairs() {
        out = twirl_matrix(dims, &out, a, b)?;
    }
    Ok(out)
}

fn twirl_matrix(dims: &[usize], m: &Matrix, a: usize, b: usize) -> Result<Matrix> {
    let n = dims.len();
    if a >= n || b >= n || a == b {
        return input(format!("invalid subsystem pair ({a}, {b}) for {n} subsystems"));
    }
    let d = dims[a];
    if dims[b] != d {
        return input(format!("pair dimensions differ: {} vs {}", dims[a], dims[b]));
    }
    if d < 2 {
        return input("twirl needs local dimension at least 2");
    }
    let total = m.nrows();
    if total != dims.iter().product::<usize>() {
        return input("operator size does not match dims");
    }
    let st = strides(dims);
    let rest: Vec<usize> = (0..n).filter(|&s| s != a && s != b).collect();
    let rest_off = offsets(dims, &st, &rest);
    let r = rest_off.len();
    let diag: Vec<usize> = (0..d).map(|i| i * (st[a] + st[b])).collect();

    // R1 = (1/d) sum_{i,k} rho[(ii, r), (kk, r')], T = Tr_P rho.
    let inv_d = 1.0 / d as f64;
    let mut r1 = Matrix::zeros(r, r);
    let mut tr = Matrix::zeros(r, r);
    let pair_off = offsets(dims, &st, &[a, b]);
    for x in 0..r {
        for y in 0..r {
            let (ox, oy) = (rest_off[x], rest_off[y]);
            let mut s1 = Complex64::new(0.0, 0.0);
            for &i in &diag {
                for &k in &diag {
                    s1 += m[(ox + i, oy + k)];
                }
            }
            r1[(x, y)] = s1 * inv_d;
            tr[(x, y)] = pair_off.iter().map(|&p| m[(ox + p, oy + p)]).sum();
        }
    }
    let r0 = &tr - &r1;

    // Phi+ entries: 1/d on (ii, kk); (1 - Phi+)/(d^2 - 1) on the pair block.
    let iso = 1.0 / (d * d - 1) as f64;
    let mut out = Matrix::zeros(total, total);
    for x in 0..r {
        for y in 0..r {
            let (ox, oy) = (rest_off[x], rest_off[y]);
            let (v1, v0) = (r1[(x, y)], r0[(x, y)]);
            for &p in &pair_off {
                out[(ox + p, oy + p)] += v0 * iso;
            }
            let phi = (v1 - v0 * iso) * inv_d;
            for &i in &diag {
                for &k in &diag {
                    out[(ox + i, oy + k)] += phi;
                }
            }
        }
    }
    Ok(out)
}
