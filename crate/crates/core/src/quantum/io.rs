//! Binary state files: a little-endian `u32` subsystem count, one `u32` per
//! dimension, then the matrix row-major as `(re, im)` pairs of `f64`.

use std::io::{Read, Write};

use num_complex::Complex64;

use super::{total_dim, DensityOperator, Matrix};
use crate::error::{Error, Result};

pub fn write_state<W: Write>(rho: &DensityOperator, mut w: W) -> Result<()> {
    w.write_all(&(rho.dims().len() as u32).to_le_bytes())?;
    for &d in rho.dims() {
        w.write_all(&(d as u32).to_le_bytes())?;
    }
    let m = rho.matrix();
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            w.write_all(&m[(i, j)].re.to_le_bytes())?;
            w.write_all(&m[(i, j)].im.to_le_bytes())?;
        }
    }
    Ok(())
}

/// Reads and validates a state.
pub fn read_state<R: Read>(mut r: R) -> Result<DensityOperator> {
    let mut u32_buf = [0u8; 4];
    let mut read_u32 = |r: &mut R| -> Result<u32> {
        r.read_exact(&mut u32_buf)?;
        Ok(u32::from_le_bytes(u32_buf))
    };
    let count = read_u32(&mut r)? as usize;
    if count == 0 || count > 64 {
        return Err(Error::Input(format!("implausible subsystem count {count}")));
    }
    let dims = (0..count).map(|_| read_u32(&mut r).map(|d| d as usize)).collect::<Result<Vec<_>>>()?;
    let n = total_dim(&dims)?;
    let mut buf = vec![0u8; n * n * 16];
    r.read_exact(&mut buf)?;
    let mut rest = Vec::new();
    r.read_to_end(&mut rest)?;
    if !rest.is_empty() {
        return Err(Error::Input(format!("{} trailing bytes after the matrix", rest.len())));
    }
    let f = |k: usize| f64::from_le_bytes(buf[8 * k..8 * k + 8].try_into().unwrap());
    let m = Matrix::from_fn(n, n, |i, j| Complex64::new(f(2 * (i * n + j)), f(2 * (i * n + j) + 1)));
    DensityOperator::new(dims, m)
}
