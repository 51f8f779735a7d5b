use super::{checked_product, mixed_digits, mixed_index};
use crate::error::{input, Error, Result};

/// Conditional distribution `P(a | x)` over `N` parties.
///
/// Joint inputs and outputs are mixed-radix indices with party 0 as the most
/// significant digit; the table is stored row-major as `[x * |A| + a]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Behavior {
    inputs: Vec<usize>,
    outputs: Vec<usize>,
    total_in: usize,
    total_out: usize,
    table: Vec<f64>,
}

/// Normalization tolerance for every row.
pub const ROW_TOLERANCE: f64 = 1e-10;

/// Largest table a behavior may hold.
pub const MAX_TABLE: usize = 1 << 26;

impl Behavior {
    pub fn new(inputs: &[usize], outputs: &[usize], table: Vec<f64>) -> Result<Self> {
        let (total_in, total_out) = shape(inputs, outputs)?;
        if table.len() != total_in * total_out {
            return input(format!("behavior table has {} entries, expected {}", table.len(), total_in * total_out));
        }
        if let Some(p) = table.iter().find(|p| p.is_nan() || **p < 0.0) {
            return Err(Error::Validation(format!("behavior has negative or NaN entry {p}")));
        }
        for x in 0..total_in {
            let s: f64 = table[x * total_out..(x + 1) * total_out].iter().sum();
            if (s - 1.0).abs() > ROW_TOLERANCE {
                return Err(Error::Validation(format!("row for joint input {x} sums to {s}")));
            }
        }
        Ok(Self { inputs: inputs.to_vec(), outputs: outputs.to_vec(), total_in, total_out, table })
    }

    /// Every party's output is a function `f` of the full input tuple.
    pub fn deterministic(inputs: &[usize], outputs: &[usize], f: impl Fn(&[usize]) -> Vec<usize>) -> Result<Self> {
        let (total_in, total_out) = shape(inputs, outputs)?;
        let mut table = vec![0.0; total_in * total_out];
        for x in 0..total_in {
            let a = f(&mixed_digits(x, inputs));
            if a.len() != outputs.len() || a.iter().zip(outputs).any(|(&v, &m)| v >= m) {
                return input(format!("deterministic response {a:?} does not fit outputs {outputs:?}"));
            }
            table[x * total_out + mixed_index(&a, outputs)] = 1.0;
        }
        Self::new(inputs, outputs, table)
    }

    /// Each party answers from its own input only.
    pub fn local_deterministic(inputs: &[usize], outputs: &[usize], responses: &[Vec<usize>]) -> Result<Self> {
        if responses.len() != inputs.len() || responses.iter().zip(inputs).any(|(r, &n)| r.len() != n) {
            return input("one response table per party, one entry per input, is required");
        }
        Self::deterministic(inputs, outputs, |x| x.iter().zip(responses).map(|(&xi, r)| r[xi]).collect())
    }

    pub fn uniform(inputs: &[usize], outputs: &[usize]) -> Result<Self> {
        let (total_in, total_out) = shape(inputs, outputs)?;
        Self::new(inputs, outputs, vec![1.0 / total_out as f64; total_in * total_out])
    }

    /// Convex combination `sum_i w_i B_i`.
    pub fn mixture(parts: &[(f64, Behavior)]) -> Result<Self> {
        let Some((_, first)) = parts.first() else {
            return input("mixture of zero behaviors");
        };
        if parts.iter().any(|(w, _)| w.is_nan() || *w < 0.0) {
            return input("mixture weights must be nonnegative");
        }
        let total: f64 = parts.iter().map(|(w, _)| w).sum();
        if (total - 1.0).abs() > 1e-12 {
            return input(format!("mixture weights sum to {total}"));
        }
        if parts.iter().any(|(_, b)| b.inputs != first.inputs || b.outputs != first.outputs) {
            return input("mixture components have different alphabets");
        }
        let mut table = vec![0.0; first.table.len()];
        for (w, b) in parts {
            table.iter_mut().zip(&b.table).for_each(|(t, v)| *t += w * v);
        }
        Self::new(&first.inputs, &first.outputs, table)
    }

    pub fn parties(&self) -> usize {
        self.inputs.len()
    }

    pub fn inputs(&self) -> &[usize] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[usize] {
        &self.outputs
    }

    pub fn total_inputs(&self) -> usize {
        self.total_in
    }

    pub fn total_outputs(&self) -> usize {
        self.total_out
    }

    /// `P(a | x)` for per-party input and output tuples.
    pub fn prob(&self, x: &[usize], a: &[usize]) -> Result<f64> {
        let fits = |v: &[usize], r: &[usize]| v.len() == r.len() && v.iter().zip(r).all(|(d, m)| d < m);
        if !fits(x, &self.inputs) || !fits(a, &self.outputs) {
            return input(format!("indices x={x:?} a={a:?} out of range"));
        }
        Ok(self.table[mixed_index(x, &self.inputs) * self.total_out + mixed_index(a, &self.outputs)])
    }

    /// Distribution over joint outputs for joint input index `x`.
    pub fn row(&self, x: usize) -> &[f64] {
        &self.table[x * self.total_out..(x + 1) * self.total_out]
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    /// Rows `x0..x{N-1},a0..a{N-1},p` for every nonzero entry.
    pub fn to_csv(&self) -> String {
        let n = self.parties();
        let header = (0..n).map(|i| format!("x{i}")).chain((0..n).map(|i| format!("a{i}"))).chain(["p".into()]);
        let mut out = header.collect::<Vec<_>>().join(",");
        out.push('\n');
        for x in 0..self.total_in {
            for a in 0..self.total_out {
                let p = self.table[x * self.total_out + a];
                if p != 0.0 {
                    let cells = mixed_digits(x, &self.inputs).into_iter().chain(mixed_digits(a, &self.outputs));
                    for c in cells {
                        out.push_str(&format!("{c},"));
                    }
                    out.push_str(&format!("{p:.16e}\n"));
                }
            }
        }
        out
    }

    /// Reads the format written by [`Behavior::to_csv`]; missing rows are zero.
    pub fn from_csv(text: &str, inputs: &[usize], outputs: &[usize]) -> Result<Self> {
        let n = inputs.len();
        let expected: Vec<String> =
            (0..n).map(|i| format!("x{i}")).chain((0..n).map(|i| format!("a{i}"))).chain(["p".into()]).collect();
        let rows = super::csv::read_table(text, &expected)?;
        let (_, total_out) = shape(inputs, outputs)?;
        let mut table = vec![0.0; checked_product(inputs)? * total_out];
        for (line, cells) in rows {
            let (x, a) = cells.split_at(n);
            let x = super::csv::indices(x, inputs, line)?;
            let a = super::csv::indices(&a[..n], outputs, line)?;
            let p = super::csv::parse_f64(&cells[2 * n], line)?;
            let slot = &mut table[mixed_index(&x, inputs) * total_out + mixed_index(&a, outputs)];
            if *slot != 0.0 {
                return Err(Error::Parse { line, msg: "duplicate row".into() });
            }
            *slot = p;
        }
        Self::new(inputs, outputs, table)
    }
}

fn shape(inputs: &[usize], outputs: &[usize]) -> Result<(usize, usize)> {
    if inputs.is_empty() || inputs.len() != outputs.len() {
        return input(format!("need one input and one output alphabet per party, got {inputs:?} / {outputs:?}"));
    }
    if inputs.iter().chain(outputs).any(|&m| m == 0) {
        return input("alphabet sizes must be positive");
    }
    let ti = checked_product(inputs)?;
    let to = checked_product(outputs)?;
    match ti.checked_mul(to) {
        Some(t) if t <= MAX_TABLE => Ok((ti, to)),
        _ => Err(Error::Capacity(format!("behavior table {ti} x {to} exceeds {MAX_TABLE} entries"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(Behavior::new(&[2], &[2], vec![0.5, 0.5, 1.0, 0.0]).is_ok());
        assert!(matches!(Behavior::new(&[2], &[2], vec![0.5, 0.4, 1.0, 0.0]), Err(Error::Validation(_))));
        assert!(matches!(Behavior::new(&[2], &[2], vec![1.5, -0.5, 1.0, 0.0]), Err(Error::Validation(_))));
        assert!(Behavior::new(&[2], &[2], vec![1.0; 3]).is_err());
        assert!(Behavior::new(&[2, 2], &[2], vec![]).is_err());
    }

    #[test]
    fn deterministic_and_prob() {
        let b = Behavior::local_deterministic(&[2, 3], &[2, 2], &[vec![1, 0], vec![0, 1, 1]]).unwrap();
        assert_eq!(b.prob(&[0, 2], &[1, 1]).unwrap(), 1.0);
        assert_eq!(b.prob(&[0, 2], &[1, 0]).unwrap(), 0.0);
        assert!(b.prob(&[2, 0], &[0, 0]).is_err());
    }

    #[test]
    fn mixture_and_csv_roundtrip() {
        let b1 = Behavior::deterministic(&[2, 2], &[2, 2], |_| vec![0, 0]).unwrap();
        let b2 = Behavior::deterministic(&[2, 2], &[2, 2], |x| vec![x[0], x[1]]).unwrap();
        let m = Behavior::mixture(&[(0.25, b1), (0.75, b2)]).unwrap();
        assert_eq!(m.prob(&[1, 1], &[1, 1]).unwrap(), 0.75);
        let back = Behavior::from_csv(&m.to_csv(), &[2, 2], &[2, 2]).unwrap();
        assert_eq!(back, m);
        assert!(Behavior::mixture(&[]).is_err());
    }
}
