//! Binary words, the Hadamard code and its orbits on the Boolean cube.
//!
//! A [`BitString`] of length `n <= 64` is packed into a `u64` with coordinate
//! `j` stored at bit `n - 1 - j`, so coordinate 0 is the most significant bit
//! and the text form `"0101"` lists coordinates `0, 1, 2, 3` left to right.
//! With this packing the numeric order of the packed value coincides with the
//! lexicographic order of the text form, which is what the canonical-orbit and
//! tie-breaking rules use.

use std::fmt;
use std::str::FromStr;

use crate::error::{capacity, input, Error, Result};

/// Largest code order `k` accepted (`n = 2^k <= 64`).
pub const MAX_CODE_ORDER: u32 = 6;

/// Largest word length for which all orbits of the cube are enumerated eagerly.
pub const EAGER_ORBIT_LEN: u32 = 16;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString {
    // `len` first so the derived `Ord` only compares bits for equal lengths.
    len: u32,
    bits: u64,
}

impl BitString {
    pub fn new(len: u32, bits: u64) -> Result<Self> {
        if len == 0 || len > 64 {
            return input(format!("bit string length {len} outside 1..=64"));
        }
        if len < 64 && bits >> len != 0 {
            return input(format!("value {bits:#x} does not fit in {len} bits"));
        }
        Ok(Self { len, bits })
    }

    pub(crate) fn from_raw(len: u32, bits: u64) -> Self {
        debug_assert!((1..=64).contains(&len) && (len == 64 || bits >> len == 0));
        Self { len, bits }
    }

    pub fn zeros(len: u32) -> Result<Self> {
        Self::new(len, 0)
    }

    /// Builds a word from its coordinates, coordinate 0 first.
    pub fn from_bits(coords: &[bool]) -> Result<Self> {
        let len = u32::try_from(coords.len()).unwrap_or(u32::MAX);
        let bits = coords.iter().fold(0u64, |acc, &b| (acc << 1) | u64::from(b));
        Self::new(len, bits)
    }

    pub fn len(&self) -> u32 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Packed value; coordinate 0 is the most significant of the `len` bits.
    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn coord(&self, j: u32) -> bool {
        assert!(j < self.len, "coordinate {j} out of range for length {}", self.len);
        (self.bits >> (self.len - 1 - j)) & 1 == 1
    }

    pub fn hamming_weight(&self) -> u32 {
        self.bits.count_ones()
    }

    pub fn xor(&self, other: &BitString) -> Result<BitString> {
        if self.len != other.len {
            return input(format!("length mismatch: {} vs {}", self.len, other.len));
        }
        Ok(self.xor_unchecked(other))
    }

    #[inline]
    pub(crate) fn xor_unchecked(&self, other: &BitString) -> BitString {
        BitString { len: self.len, bits: self.bits ^ other.bits }
    }
}

/// Pointwise sum mod 2.
pub fn xor(a: &BitString, b: &BitString) -> Result<BitString> {
    a.xor(b)
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for j in 0..self.len {
            f.write_str(if self.coord(j) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let mut coords = Vec::with_capacity(s.len());
        for c in s.chars() {
            match c {
                '0' => coords.push(false),
                '1' => coords.push(true),
                other => return input(format!("unexpected character {other:?} in bit string {s:?}")),
            }
        }
        Self::from_bits(&coords)
    }
}

/// The order-`n` Hadamard code: codeword `a` has coordinate `j` equal to the
/// inner product `a . j` mod 2, for `a, j` ranging over `{0,1}^k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HadamardCode {
    k: u32,
    codewords: Vec<BitString>,
}

impl HadamardCode {
    pub fn new(k: u32) -> Result<Self> {
        if k == 0 || k > MAX_CODE_ORDER {
            return capacity(format!("code order k={k} outside 1..={MAX_CODE_ORDER}"));
        }
        let n = 1u32 << k;
        let codewords = (0..u64::from(n))
            .map(|a| {
                let bits = (0..u64::from(n)).fold(0u64, |acc, j| (acc << 1) | u64::from((a & j).count_ones() & 1));
                BitString::from_raw(n, bits)
            })
            .collect();
        Ok(Self { k, codewords })
    }

    pub fn order(&self) -> u32 {
        self.k
    }

    /// Word length `n = 2^k`.
    pub fn word_len(&self) -> u32 {
        1 << self.k
    }

    /// Codewords indexed by `a` in `{0,1}^k` (read as an integer).
    pub fn codewords(&self) -> &[BitString] {
        &self.codewords
    }

    pub fn contains(&self, w: &BitString) -> bool {
        self.codewords.contains(w)
    }

    /// Lexicographically smallest element of the orbit of `x`, without
    /// materialising the orbit.
    pub fn canonical(&self, x: &BitString) -> Result<BitString> {
        self.check_len(x)?;
        Ok(self.canonical_unchecked(x))
    }

    #[inline]
    pub(crate) fn canonical_unchecked(&self, x: &BitString) -> BitString {
        let bits = self.codewords.iter().map(|h| x.bits ^ h.bits).min().expect("code is nonempty");
        BitString::from_raw(x.len, bits)
    }

    /// Maximum-weight element of the orbit of `x` with lexicographic tie-break.
    #[inline]
    pub(crate) fn max_weight_unchecked(&self, x: &BitString) -> BitString {
        let mut best = x.bits ^ self.codewords[0].bits;
        for h in &self.codewords[1..] {
            let cand = x.bits ^ h.bits;
            let (cw, bw) = (cand.count_ones(), best.count_ones());
            if cw > bw || (cw == bw && cand < best) {
                best = cand;
            }
        }
        BitString::from_raw(x.len, best)
    }

    /// All orbit representatives of `{0,1}^n` in increasing order.
    ///
    /// Only available for `n <= 16`; larger cubes are handled per query through
    /// [`HadamardCode::canonical`].
    pub fn representatives(&self) -> Result<Vec<BitString>> {
        let n = self.word_len();
        if n > EAGER_ORBIT_LEN {
            return capacity(format!("eager orbit enumeration limited to n <= {EAGER_ORBIT_LEN}, got n={n}"));
        }
        let size = 1usize << n;
        let mut seen = vec![false; size];
        let mut reps = Vec::with_capacity(size / n as usize);
        for w in 0..size {
            if seen[w] {
                continue;
            }
            // Ascending scan: the first unseen word is the orbit minimum.
            reps.push(BitString::from_raw(n, w as u64));
            for h in &self.codewords {
                seen[w ^ h.bits as usize] = true;
            }
        }
        Ok(reps)
    }

    fn check_len(&self, x: &BitString) -> Result<()> {
        if x.len() != self.word_len() {
            return input(format!("word length {} does not match code length {}", x.len(), self.word_len()));
        }
        Ok(())
    }
}

/// Builds the Hadamard code of order `k` (`n = 2^k`, `1 <= k <= 6`).
pub fn hadamard_code(k: u32) -> Result<HadamardCode> {
    HadamardCode::new(k)
}

/// The coset `{x + h : h in H_n}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Orbit {
    representative: BitString,
    /// Sorted ascending; `elements[0] == representative`.
    elements: Vec<BitString>,
}

impl Orbit {
    pub fn representative(&self) -> BitString {
        self.representative
    }

    pub fn elements(&self) -> &[BitString] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, w: &BitString) -> bool {
        self.elements.binary_search(w).is_ok()
    }
}

pub fn orbit_of(x: &BitString, code: &HadamardCode) -> Result<Orbit> {
    code.check_len(x)?;
    let mut elements: Vec<BitString> = code.codewords().iter().map(|h| x.xor_unchecked(h)).collect();
    elements.sort_unstable();
    Ok(Orbit { representative: elements[0], elements })
}

/// Element of maximal Hamming weight; ties go to the lexicographically smallest.
pub fn max_weight_element(orbit: &Orbit) -> BitString {
    // `elements` is ascending, so the first maximum is the lexicographic minimum.
    let mut best = orbit.elements[0];
    for e in &orbit.elements[1..] {
        if e.hamming_weight() > best.hamming_weight() {
            best = *e;
        }
    }
    best
}

/// Componentwise orbits of an `L`-tuple of words under `H_n^L`.
pub fn cartesian_orbit(xs: &[BitString], code: &HadamardCode) -> Result<Vec<Orbit>> {
    if xs.is_empty() {
        return input("cartesian orbit of an empty tuple");
    }
    xs.iter().map(|x| orbit_of(x, code)).collect()
}

/// Size of the joint orbit of a tuple, the product of the component sizes.
pub fn joint_orbit_size(orbits: &[Orbit]) -> u128 {
    orbits.iter().map(|o| o.len() as u128).product()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn xor_examples() {
        assert_eq!(xor(&w("0101"), &w("0011")).unwrap(), w("0110"));
        assert_eq!(xor(&w("1011"), &w("1011")).unwrap(), w("0000"));
        assert_eq!(xor(&w("0000"), &w("1101")).unwrap(), w("1101"));
        assert!(matches!(xor(&w("01"), &w("011")), Err(Error::Input(_))));
    }

    #[test]
    fn text_roundtrip_and_order() {
        let a = w("0011");
        assert_eq!(a.to_string(), "0011");
        assert!(a.coord(2) && a.coord(3) && !a.coord(0));
        assert!(w("0011") < w("0101"));
        assert!("01x1".parse::<BitString>().is_err());
        assert!("".parse::<BitString>().is_err());
    }

    #[test]
    fn code_of_order_two() {
        let code = hadamard_code(2).unwrap();
        let words: Vec<String> = code.codewords().iter().map(ToString::to_string).collect();
        assert_eq!(words, ["0000", "0101", "0011", "0110"]);
        for h in &code.codewords()[1..] {
            assert_eq!(h.hamming_weight(), 2);
        }
    }

    #[test]
    fn code_order_bounds() {
        assert!(matches!(hadamard_code(0), Err(Error::Capacity(_))));
        assert!(matches!(hadamard_code(7), Err(Error::Capacity(_))));
        let c = hadamard_code(6).unwrap();
        assert_eq!(c.word_len(), 64);
        assert!(c.contains(&BitString::zeros(64).unwrap()));
        for h in &c.codewords()[1..] {
            assert_eq!(h.hamming_weight(), 32);
        }
    }

    #[test]
    fn orbit_examples() {
        let code = hadamard_code(2).unwrap();
        let o = orbit_of(&w("0000"), &code).unwrap();
        assert_eq!(o.representative(), w("0000"));
        assert_eq!(max_weight_element(&o), w("0011"));

        let o = orbit_of(&w("1000"), &code).unwrap();
        let elems: Vec<String> = o.elements().iter().map(ToString::to_string).collect();
        assert_eq!(elems, ["1000", "1011", "1101", "1110"]);
        assert_eq!(o.representative(), w("1000"));
        assert_eq!(max_weight_element(&o), w("1011"));
        assert_eq!(max_weight_element(&o), max_weight_element(&o));
        assert_eq!(code.max_weight_unchecked(&w("1110")), w("1011"));
        assert!(orbit_of(&w("100"), &code).is_err());
    }

    #[test]
    fn orbit_is_invariant_under_codewords() {
        let code = hadamard_code(3).unwrap();
        let x = w("10010110");
        let o = orbit_of(&x, &code).unwrap();
        for h in code.codewords() {
            assert_eq!(orbit_of(&x.xor(h).unwrap(), &code).unwrap(), o);
        }
        assert_eq!(code.canonical(&x).unwrap(), o.representative());
    }

    #[test]
    fn cartesian_examples() {
        let code = hadamard_code(2).unwrap();
        let xs = [w("1000"), w("0110")];
        let orbits = cartesian_orbit(&xs, &code).unwrap();
        assert_eq!(joint_orbit_size(&orbits), 16);
        assert_eq!(orbits[0], orbit_of(&xs[0], &code).unwrap());
        assert_eq!(orbits[1].representative(), w("0000"));
        assert_eq!(cartesian_orbit(&xs[..1], &code).unwrap()[0], orbit_of(&xs[0], &code).unwrap());
        assert!(cartesian_orbit(&[w("10")], &code).is_err());
    }

    #[test]
    fn representatives_partition_small_cubes() {
        for k in 1..=3 {
            let code = hadamard_code(k).unwrap();
            let n = code.word_len();
            let reps = code.representatives().unwrap();
            assert_eq!(reps.len(), (1usize << n) / n as usize);
            for r in &reps {
                assert_eq!(code.canonical(r).unwrap(), *r);
            }
        }
        assert!(matches!(hadamard_code(5).unwrap().representatives(), Err(Error::Capacity(_))));
    }
}
