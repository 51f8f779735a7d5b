use std::collections::HashMap;
use std::fmt::Write as _;

use rand::Rng;

use crate::bitcode::{BitString, HadamardCode};
use crate::error::{input, Error, Result};

/// How one slot maps an input orbit to an output.
#[derive(Clone, Debug, PartialEq)]
pub enum SlotRule {
    /// Heaviest element of the orbit, lexicographically smallest on ties.
    MaxWeight,
    /// Explicit canonical representative -> chosen element table.
    Table(HashMap<BitString, BitString>),
}

/// A deterministic, orbit-constant strategy for one player.
#[derive(Clone, Debug, PartialEq)]
pub enum KVStrategy {
    /// Slots answered independently.
    Product { code: HadamardCode, slots: Vec<SlotRule> },
    /// One table over `L`-tuples of representatives, allowing correlated answers.
    Joint { code: HadamardCode, repetitions: u32, table: HashMap<Vec<BitString>, Vec<BitString>> },
}

pub fn max_weight_strategy(code: &HadamardCode, repetitions: u32) -> KVStrategy {
    KVStrategy::Product { code: code.clone(), slots: vec![SlotRule::MaxWeight; repetitions as usize] }
}

/// Independent per-slot strategy picking a uniformly random element of every orbit.
pub fn random_strategy<R: Rng + ?Sized>(code: &HadamardCode, repetitions: u32, rng: &mut R) -> Result<KVStrategy> {
    let reps = code.representatives()?;
    let slots = (0..repetitions)
        .map(|_| SlotRule::Table(reps.iter().map(|r| (*r, random_element(code, r, rng))).collect()))
        .collect();
    Ok(KVStrategy::Product { code: code.clone(), slots })
}

/// Strategy with a uniformly random answer for every joint orbit of `L`-tuples.
pub fn random_joint_strategy<R: Rng + ?Sized>(code: &HadamardCode, repetitions: u32, rng: &mut R) -> Result<KVStrategy> {
    let reps = code.representatives()?;
    let mut table = HashMap::new();
    for key in product(&vec![reps; repetitions as usize]) {
        let choice = key.iter().map(|r| random_element(code, r, rng)).collect();
        table.insert(key, choice);
    }
    Ok(KVStrategy::Joint { code: code.clone(), repetitions, table })
}

fn random_element<R: Rng + ?Sized>(code: &HadamardCode, rep: &BitString, rng: &mut R) -> BitString {
    let h = code.codewords()[rng.gen_range(0..code.codewords().len())];
    rep.xor_unchecked(&h)
}

/// Cartesian product of lists, first list varying slowest.
pub(crate) fn product(lists: &[Vec<BitString>]) -> Vec<Vec<BitString>> {
    let mut out: Vec<Vec<BitString>> = vec![Vec::new()];
    for list in lists {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                list.iter().map(move |w| {
                    let mut t = prefix.clone();
                    t.push(*w);
                    t
                })
            })
            .collect();
    }
    out
}

impl KVStrategy {
    pub fn from_slot_tables(code: &HadamardCode, tables: Vec<HashMap<BitString, BitString>>) -> Result<Self> {
        if tables.is_empty() {
            return input("strategy needs at least one slot");
        }
        for (slot, table) in tables.iter().enumerate() {
            for (rep, choice) in table {
                check_entry(code, rep, choice).map_err(|e| Error::Input(format!("slot {slot}: {e}")))?;
            }
        }
        let s = KVStrategy::Product { code: code.clone(), slots: tables.into_iter().map(SlotRule::Table).collect() };
        s.check_complete()?;
        Ok(s)
    }

    pub fn from_joint_table(
        code: &HadamardCode,
        repetitions: u32,
        table: HashMap<Vec<BitString>, Vec<BitString>>,
    ) -> Result<Self> {
        for (key, choice) in &table {
            if key.len() != repetitions as usize || choice.len() != repetitions as usize {
                return input(format!("joint entry has {} / {} slots, expected {repetitions}", key.len(), choice.len()));
            }
            for (rep, c) in key.iter().zip(choice) {
                check_entry(code, rep, c)?;
            }
        }
        let s = KVStrategy::Joint { code: code.clone(), repetitions, table };
        s.check_complete()?;
        Ok(s)
    }

    pub fn code(&self) -> &HadamardCode {
        match self {
            KVStrategy::Product { code, .. } | KVStrategy::Joint { code, .. } => code,
        }
    }

    pub fn repetitions(&self) -> u32 {
        match self {
            KVStrategy::Product { slots, .. } => slots.len() as u32,
            KVStrategy::Joint { repetitions, .. } => *repetitions,
        }
    }

    /// Answer to the input tuple `x`; always an element of the orbit of `x`.
    pub fn respond(&self, x: &[BitString]) -> Result<Vec<BitString>> {
        if x.len() != self.repetitions() as usize {
            return input(format!("expected {} slots, got {}", self.repetitions(), x.len()));
        }
        let code = self.code();
        for w in x {
            if w.len() != code.word_len() {
                return input(format!("word length {} does not match n={}", w.len(), code.word_len()));
            }
        }
        self.respond_unchecked(x)
    }

    pub(crate) fn respond_unchecked(&self, x: &[BitString]) -> Result<Vec<BitString>> {
        match self {
            KVStrategy::Product { code, slots } => x
                .iter()
                .zip(slots)
                .map(|(w, rule)| match rule {
                    SlotRule::MaxWeight => Ok(code.max_weight_unchecked(w)),
                    SlotRule::Table(t) => {
                        let rep = code.canonical_unchecked(w);
                        t.get(&rep).copied().ok_or_else(|| Error::Input(format!("no entry for orbit {rep}")))
                    }
                })
                .collect(),
            KVStrategy::Joint { code, table, .. } => {
                let key: Vec<BitString> = x.iter().map(|w| code.canonical_unchecked(w)).collect();
                table.get(&key).cloned().ok_or_else(|| Error::Input(format!("no entry for joint orbit {key:?}")))
            }
        }
    }

    /// Chosen element of every orbit in one slot of a product strategy.
    pub fn slot_choices(&self, slot: usize) -> Result<Vec<BitString>> {
        match self {
            KVStrategy::Product { code, slots } => {
                let rule = slots.get(slot).ok_or_else(|| Error::Input(format!("slot {slot} out of range")))?;
                Ok(match rule {
                    SlotRule::MaxWeight => code.representatives()?.iter().map(|r| code.max_weight_unchecked(r)).collect(),
                    SlotRule::Table(t) => {
                        let mut v: Vec<_> = t.values().copied().collect();
                        v.sort_unstable();
                        v
                    }
                })
            }
            KVStrategy::Joint { .. } => input("slot choices are undefined for a joint strategy"),
        }
    }

    /// Number of joint orbits, i.e. the size of the set `{a(x)}`.
    pub fn chosen_count(&self) -> u128 {
        let n = self.code().word_len();
        let per_slot: u128 = if n >= 127 { u128::MAX } else { (1u128 << n) / u128::from(n) };
        (0..self.repetitions()).fold(1u128, |acc, _| acc.saturating_mul(per_slot))
    }

    /// The set `{a(x)}`: one chosen `L`-tuple per joint orbit.
    pub fn chosen_tuples(&self) -> Result<Vec<Vec<BitString>>> {
        match self {
            KVStrategy::Product { slots, .. } => {
                let lists = (0..slots.len()).map(|s| self.slot_choices(s)).collect::<Result<Vec<_>>>()?;
                Ok(product(&lists))
            }
            KVStrategy::Joint { table, .. } => {
                let mut v: Vec<_> = table.values().cloned().collect();
                v.sort_unstable();
                Ok(v)
            }
        }
    }

    fn check_complete(&self) -> Result<()> {
        let expected = self.code().representatives()?.len();
        match self {
            KVStrategy::Product { slots, .. } => {
                for (s, rule) in slots.iter().enumerate() {
                    if let SlotRule::Table(t) = rule {
                        if t.len() != expected {
                            return input(format!("slot {s} covers {} of {expected} orbits", t.len()));
                        }
                    }
                }
            }
            KVStrategy::Joint { repetitions, table, .. } => {
                let want = expected.pow(*repetitions);
                if table.len() != want {
                    return input(format!("joint table covers {} of {want} joint orbits", table.len()));
                }
            }
        }
        Ok(())
    }

    /// Text form: a header line, then one `representative -> choice` line per
    /// orbit. Product strategies prefix each line with the slot index; joint
    /// strategies write comma-separated tuples on both sides.
    pub fn to_text(&self) -> Result<String> {
        let n = self.code().word_len();
        let mut out = String::new();
        match self {
            KVStrategy::Product { code, slots } => {
                writeln!(out, "kv-strategy n={n} slots={} kind=product", slots.len()).unwrap();
                for (s, rule) in slots.iter().enumerate() {
                    let mut rows: Vec<(BitString, BitString)> = match rule {
                        SlotRule::MaxWeight => {
                            code.representatives()?.into_iter().map(|r| (r, code.max_weight_unchecked(&r))).collect()
                        }
                        SlotRule::Table(t) => t.iter().map(|(a, b)| (*a, *b)).collect(),
                    };
                    rows.sort_unstable();
                    for (rep, choice) in rows {
                        writeln!(out, "{s} {rep} -> {choice}").unwrap();
                    }
                }
            }
            KVStrategy::Joint { repetitions, table, .. } => {
                writeln!(out, "kv-strategy n={n} slots={repetitions} kind=joint").unwrap();
                let mut rows: Vec<_> = table.iter().collect();
                rows.sort_unstable();
                for (key, choice) in rows {
                    writeln!(out, "{} -> {}", join(key), join(choice)).unwrap();
                }
            }
        }
        Ok(out)
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
        let (hline, header) = lines.next().ok_or_else(|| Error::Parse { line: 1, msg: "empty strategy file".into() })?;
        let perr = |line: usize, msg: String| Error::Parse { line: line + 1, msg };
        let mut n = None;
        let mut slots = None;
        let mut kind = None;
        let mut parts = header.split_whitespace();
        if parts.next() != Some("kv-strategy") {
            return Err(perr(hline, "expected header starting with `kv-strategy`".into()));
        }
        for kv in parts {
            match kv.split_once('=') {
                Some(("n", v)) => n = v.parse::<u32>().ok(),
                Some(("slots", v)) => slots = v.parse::<u32>().ok(),
                Some(("kind", v)) => kind = Some(v.to_string()),
                _ => return Err(perr(hline, format!("unknown header key {kv:?}"))),
            }
        }
        let (n, slots, kind) = match (n, slots, kind) {
            (Some(n), Some(s), Some(k)) => (n, s, k),
            _ => return Err(perr(hline, "header needs n=, slots= and kind=".into())),
        };
        if !n.is_power_of_two() {
            return Err(perr(hline, format!("n={n} is not a power of two")));
        }
        let code = HadamardCode::new(n.trailing_zeros())?;
        let word = |line: usize, s: &str| s.trim().parse::<BitString>().map_err(|e| perr(line, e.to_string()));
        let split_arrow = |line: usize, l: &str| -> Result<(String, String)> {
            let (lhs, rhs) = l
                .split_once("->")
                .or_else(|| l.split_once('\u{2192}'))
                .ok_or_else(|| perr(line, "missing `->`".into()))?;
            Ok((lhs.trim().to_string(), rhs.trim().to_string()))
        };
        match kind.as_str() {
            "product" => {
                let mut tables = vec![HashMap::new(); slots as usize];
                for (i, l) in lines {
                    let (lhs, rhs) = split_arrow(i, l)?;
                    let (slot, rep) = lhs.split_once(char::is_whitespace).ok_or_else(|| perr(i, "expected `<slot> <rep>`".into()))?;
                    let slot: usize = slot.parse().map_err(|_| perr(i, format!("bad slot index {slot:?}")))?;
                    let table = tables.get_mut(slot).ok_or_else(|| perr(i, format!("slot {slot} out of range")))?;
                    table.insert(word(i, rep)?, word(i, &rhs)?);
                }
                KVStrategy::from_slot_tables(&code, tables)
            }
            "joint" => {
                let mut table = HashMap::new();
                for (i, l) in lines {
                    let (lhs, rhs) = split_arrow(i, l)?;
                    let key = lhs.split(',').map(|s| word(i, s)).collect::<Result<Vec<_>>>()?;
                    let val = rhs.split(',').map(|s| word(i, s)).collect::<Result<Vec<_>>>()?;
                    table.insert(key, val);
                }
                KVStrategy::from_joint_table(&code, slots, table)
            }
            other => Err(perr(hline, format!("unknown strategy kind {other:?}"))),
        }
    }
}

fn join(ws: &[BitString]) -> String {
    ws.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

fn check_entry(code: &HadamardCode, rep: &BitString, choice: &BitString) -> Result<()> {
    if code.canonical(rep)? != *rep {
        return input(format!("{rep} is not a canonical orbit representative"));
    }
    if code.canonical(choice)? != *rep {
        return input(format!("choice {choice} is outside the orbit of {rep}"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitcode::{hadamard_code, orbit_of};
    use crate::seed::SeedStream;

    fn w(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn max_weight_examples() {
        let code = hadamard_code(2).unwrap();
        let s = max_weight_strategy(&code, 1);
        assert_eq!(s.respond(&[w("0000")]).unwrap(), [w("0011")]);
        assert_eq!(s.respond(&[w("0101")]).unwrap(), [w("0011")]);
        assert_eq!(s.respond(&[w("1110")]).unwrap(), [w("1011")]);
        assert!(s.respond(&[w("000")]).is_err());
        assert!(s.respond(&[w("0000"), w("0000")]).is_err());
    }

    #[test]
    fn outputs_stay_in_orbit_and_are_orbit_constant() {
        let code = hadamard_code(3).unwrap();
        let mut rng = SeedStream::new(5).rng("strategy", 0);
        let strategies = [
            max_weight_strategy(&code, 2),
            random_strategy(&code, 2, &mut rng).unwrap(),
            random_joint_strategy(&code, 2, &mut rng).unwrap(),
        ];
        let xs = [w("10110010"), w("00000001")];
        for s in &strategies {
            let out = s.respond(&xs).unwrap();
            for (x, a) in xs.iter().zip(&out) {
                assert!(orbit_of(x, &code).unwrap().contains(a));
            }
            for h in code.codewords() {
                let shifted = [xs[0].xor(h).unwrap(), xs[1]];
                assert_eq!(s.respond(&shifted).unwrap(), out);
            }
        }
    }

    #[test]
    fn text_roundtrip() {
        let code = hadamard_code(2).unwrap();
        let mut rng = SeedStream::new(11).rng("strategy", 0);
        for s in [random_strategy(&code, 2, &mut rng).unwrap(), random_joint_strategy(&code, 2, &mut rng).unwrap()] {
            let back = KVStrategy::from_text(&s.to_text().unwrap()).unwrap();
            assert_eq!(back, s);
        }
        let mw = max_weight_strategy(&code, 1).to_text().unwrap();
        assert!(mw.contains("0 0000 -> 0011"));
        assert!(mw.contains("0 1000 -> 1011"));
        let parsed = KVStrategy::from_text(&mw.replace("->", "\u{2192}")).unwrap();
        assert_eq!(parsed.respond(&[w("1101")]).unwrap(), [w("1011")]);
    }

    #[test]
    fn invalid_tables_rejected() {
        let code = hadamard_code(2).unwrap();
        let mut t: HashMap<_, _> = code.representatives().unwrap().into_iter().map(|r| (r, r)).collect();
        assert!(KVStrategy::from_slot_tables(&code, vec![t.clone()]).is_ok());
        t.insert(w("0000"), w("1000"));
        assert!(KVStrategy::from_slot_tables(&code, vec![t.clone()]).is_err());
        t.remove(&w("0000"));
        assert!(KVStrategy::from_slot_tables(&code, vec![t]).is_err());
        assert!(KVStrategy::from_text("kv-strategy n=4 slots=1 kind=product\n0 0101 -> 0101\n").is_err());
        assert!(KVStrategy::from_text("kv-strategy n=4 slots=1 kind=weird\n").is_err());
    }

    #[test]
    fn chosen_tuples_cover_every_orbit() {
        let code = hadamard_code(2).unwrap();
        let s = max_weight_strategy(&code, 2);
        let tuples = s.chosen_tuples().unwrap();
        assert_eq!(tuples.len() as u128, s.chosen_count());
        assert_eq!(tuples.len(), 16);
    }
}
