//! Network-extension games: one copy of a symmetric bipartite game on every
//! edge of a graph, scored by the product of the edge weights.
//!
//! A party's joint input (and output) is a tuple over its incident edges, the
//! "slots", ordered by ascending neighbor index with the first slot as the
//! most significant digit. On edge `{i, j}` with `i < j`, party `i` plays the
//! first role of the base game.

use num_traits::{One, Zero};

use super::behavior::MAX_TABLE;
use super::csv::{indices, parse_f64, read_table};
use super::{
    checked_mul, checked_product, krep, local_bound_bruteforce, mixed_digits, mixed_index, Behavior, BellGame,
    Rational,
};
use crate::error::{input, Error, Result};
use crate::kvgame::{classical_bound, KVParams};
use crate::netgraph::{cut_capacity, min_cut, NetworkGraph};

/// Party limit for [`biseparable_bound_bruteforce`].
pub const MAX_NETWORK_PARTIES: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Slot {
    pub edge: usize,
    pub neighbor: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NetworkGame {
    base: BellGame,
    graph: NetworkGraph,
    slots: Vec<Vec<Slot>>,
}

pub fn network_game(game: &BellGame, graph: &NetworkGraph) -> Result<NetworkGame> {
    if !game.is_symmetric() {
        return Err(Error::Unsupported("network games need a game symmetric under exchanging the players".into()));
    }
    let edges = graph.edges();
    let slots = (0..graph.parties())
        .map(|i| {
            graph
                .neighbors(i)
                .into_iter()
                .map(|j| Slot { edge: edges.iter().position(|&e| e == (i.min(j), i.max(j))).unwrap(), neighbor: j })
                .collect()
        })
        .collect();
    Ok(NetworkGame { base: game.clone(), graph: graph.clone(), slots })
}

impl NetworkGame {
    pub fn base(&self) -> &BellGame {
        &self.base
    }

    pub fn graph(&self) -> &NetworkGraph {
        &self.graph
    }

    pub fn slots(&self, party: usize) -> &[Slot] {
        &self.slots[party]
    }

    fn slot_radix(&self, party: usize, outputs: bool) -> Vec<usize> {
        let [m, _, k, _] = self.base.sizes();
        vec![if outputs { k } else { m }; self.slots[party].len()]
    }

    /// Per-party input alphabet sizes.
    pub fn party_inputs(&self) -> Result<Vec<usize>> {
        (0..self.slots.len()).map(|i| checked_product(&self.slot_radix(i, false))).collect()
    }

    pub fn party_outputs(&self) -> Result<Vec<usize>> {
        (0..self.slots.len()).map(|i| checked_product(&self.slot_radix(i, true))).collect()
    }

    /// Per-slot digits of every party input (or output) index.
    fn digit_tables(&self, outputs: bool) -> Result<Vec<Vec<Vec<usize>>>> {
        let sizes = if outputs { self.party_outputs()? } else { self.party_inputs()? };
        Ok((0..self.slots.len())
            .map(|i| {
                let radix = self.slot_radix(i, outputs);
                (0..sizes[i]).map(|v| mixed_digits(v, &radix)).collect()
            })
            .collect())
    }

    /// `(first, second)` slot position of edge `e` within its endpoints' tuples.
    fn edge_positions(&self) -> Vec<((usize, usize), (usize, usize))> {
        self.graph
            .edges()
            .iter()
            .enumerate()
            .map(|(e, &(i, j))| {
                let pi = self.slots[i].iter().position(|s| s.edge == e).unwrap();
                let pj = self.slots[j].iter().position(|s| s.edge == e).unwrap();
                ((i, pi), (j, pj))
            })
            .collect()
    }

    /// A behavior where each party answers from its own joint input.
    pub fn local_behavior(&self, responses: &[Vec<usize>]) -> Result<Behavior> {
        Behavior::local_deterministic(&self.party_inputs()?, &self.party_outputs()?, responses)
    }

    /// Header names: `x<i>.<j>` for party `i`'s slot shared with `j`.
    fn slot_columns(&self, prefix: char) -> Vec<String> {
        (0..self.slots.len())
            .flat_map(|i| self.slots[i].iter().map(move |s| format!("{prefix}{i}.{}", s.neighbor)))
            .collect()
    }

    /// Nonzero entries as rows of slot inputs, slot outputs and `p`.
    pub fn behavior_to_csv(&self, behavior: &Behavior) -> Result<String> {
        self.check_behavior(behavior)?;
        let dx = self.digit_tables(false)?;
        let da = self.digit_tables(true)?;
        let pin = self.party_inputs()?;
        let pout = self.party_outputs()?;
        let mut header = self.slot_columns('x');
        header.extend(self.slot_columns('a'));
        header.push("p".into());
        let mut out = header.join(",") + "\n";
        for x in 0..behavior.total_inputs() {
            let xs = mixed_digits(x, &pin);
            for (a, &p) in behavior.row(x).iter().enumerate() {
                if p == 0.0 {
                    continue;
                }
                let as_ = mixed_digits(a, &pout);
                let cells = xs
                    .iter()
                    .enumerate()
                    .flat_map(|(i, &v)| dx[i][v].clone())
                    .chain(as_.iter().enumerate().flat_map(|(i, &v)| da[i][v].clone()));
                for c in cells {
                    out.push_str(&format!("{c},"));
                }
                out.push_str(&format!("{p:.16e}\n"));
            }
        }
        Ok(out)
    }

    pub fn behavior_from_csv(&self, text: &str) -> Result<Behavior> {
        let pin = self.party_inputs()?;
        let pout = self.party_outputs()?;
        let xcols = self.slot_columns('x');
        let acols = self.slot_columns('a');
        let mut header = xcols.clone();
        header.extend(acols.iter().cloned());
        header.push("p".into());
        let rows = read_table(text, &header)?;
        let slots = xcols.len();
        let [m, _, k, _] = self.base.sizes();
        let total_out = checked_product(&pout)?;
        let total = checked_product(&pin)?
            .checked_mul(total_out)
            .filter(|&t| t <= MAX_TABLE)
            .ok_or_else(|| Error::Capacity("behavior table too large".into()))?;
        let mut table = vec![0.0; total];
        for (line, cells) in rows {
            let xd = indices(&cells[..slots], &vec![m; slots], line)?;
            let ad = indices(&cells[slots..2 * slots], &vec![k; slots], line)?;
            let p = parse_f64(&cells[2 * slots], line)?;
            let mut offset = 0;
            let mut xp = Vec::with_capacity(pin.len());
            let mut ap = Vec::with_capacity(pin.len());
            for i in 0..pin.len() {
                let d = self.slots[i].len();
                xp.push(mixed_index(&xd[offset..offset + d], &self.slot_radix(i, false)));
                ap.push(mixed_index(&ad[offset..offset + d], &self.slot_radix(i, true)));
                offset += d;
            }
            let cell = &mut table[mixed_index(&xp, &pin) * total_out + mixed_index(&ap, &pout)];
            if *cell != 0.0 {
                return Err(Error::Parse { line, msg: "duplicate row".into() });
            }
            *cell = p;
        }
        Behavior::new(&pin, &pout, table)
    }

    fn check_behavior(&self, behavior: &Behavior) -> Result<()> {
        if behavior.inputs() != self.party_inputs()?.as_slice() || behavior.outputs() != self.party_outputs()?.as_slice() {
            return input(format!(
                "behavior alphabets inputs={:?} outputs={:?} do not match the network slots",
                behavior.inputs(),
                behavior.outputs()
            ));
        }
        Ok(())
    }
}

/// Expected product of edge weights under the product input distribution.
pub fn network_score(ng: &NetworkGame, behavior: &Behavior) -> Result<f64> {
    ng.check_behavior(behavior)?;
    let pin = ng.party_inputs()?;
    let pout = ng.party_outputs()?;
    let dx = ng.digit_tables(false)?;
    let da = ng.digit_tables(true)?;
    let pos = ng.edge_positions();
    let mut total = 0.0;
    for x in 0..behavior.total_inputs() {
        let xs = mixed_digits(x, &pin);
        let slot_x = |(party, p): (usize, usize)| dx[party][xs[party]][p];
        let prob: f64 = pos.iter().map(|&(u, v)| ng.base.prob(slot_x(u), slot_x(v))).product();
        if prob == 0.0 {
            continue;
        }
        let mut inner = 0.0;
        for (a, &pa) in behavior.row(x).iter().enumerate() {
            if pa == 0.0 {
                continue;
            }
            let as_ = mixed_digits(a, &pout);
            let w: f64 = pos
                .iter()
                .map(|&(u, v)| ng.base.weight(da[u.0][as_[u.0]][u.1], da[v.0][as_[v.0]][v.1], slot_x(u), slot_x(v)))
                .product();
            inner += pa * w;
        }
        total += prob * inner;
    }
    Ok(total)
}

/// Bipartite game between the merged groups `subset` and its complement.
fn merged_game(ng: &NetworkGame, subset: &[usize]) -> Result<(BellGame, Vec<usize>, Vec<usize>)> {
    let n = ng.graph.parties();
    let rest: Vec<usize> = (0..n).filter(|v| !subset.contains(v)).collect();
    let pin = ng.party_inputs()?;
    let pout = ng.party_outputs()?;
    let radix = |group: &[usize], sizes: &[usize]| group.iter().map(|&i| sizes[i]).collect::<Vec<_>>();
    let (rxa, rxb, raa, rab) = (radix(subset, &pin), radix(&rest, &pin), radix(subset, &pout), radix(&rest, &pout));
    let sizes = [checked_product(&rxa)?, checked_product(&rxb)?, checked_product(&raa)?, checked_product(&rab)?];
    let table = checked_product(&sizes)?;
    if table as u128 > super::ENUMERATION_BUDGET {
        return Err(Error::Capacity(format!("merged game for {subset:?} has {table} entries")));
    }
    let dx = ng.digit_tables(false)?;
    let da = ng.digit_tables(true)?;
    let pos = ng.edge_positions();
    let exact = ng.base.is_exact();

    // Per-party digits indexed by group member.
    let spread = |v: usize, group: &[usize], r: &[usize], out: &mut [usize]| {
        for (&party, d) in group.iter().zip(mixed_digits(v, r)) {
            out[party] = d;
        }
    };
    let [nxa, nxb, naa, nab] = sizes;
    let mut weights = vec![0.0; table];
    let mut probs = vec![0.0; nxa * nxb];
    let mut ew = exact.then(|| vec![Rational::zero(); table]);
    let mut ep = exact.then(|| vec![Rational::zero(); nxa * nxb]);
    let mut overflow = false;
    let mut xs = vec![0; n];
    let mut as_ = vec![0; n];
    for xa in 0..nxa {
        spread(xa, subset, &rxa, &mut xs);
        for xb in 0..nxb {
            spread(xb, &rest, &rxb, &mut xs);
            let slot_x = |(party, p): (usize, usize)| dx[party][xs[party]][p];
            probs[xa * nxb + xb] = pos.iter().map(|&(u, v)| ng.base.prob(slot_x(u), slot_x(v))).product();
            if let Some(ep) = ep.as_mut() {
                let mut acc = Some(Rational::one());
                for &(u, v) in &pos {
                    acc = acc.and_then(|r| checked_mul(&r, &ng.base.exact_prob(slot_x(u), slot_x(v)).unwrap()));
                }
                match acc {
                    Some(r) => ep[xa * nxb + xb] = r,
                    None => overflow = true,
                }
            }
            for aa in 0..naa {
                spread(aa, subset, &raa, &mut as_);
                for ab in 0..nab {
                    spread(ab, &rest, &rab, &mut as_);
                    let wi = ((xa * nxb + xb) * naa + aa) * nab + ab;
                    let slot_a = |(party, p): (usize, usize)| da[party][as_[party]][p];
                    weights[wi] = pos
                        .iter()
                        .map(|&(u, v)| ng.base.weight(slot_a(u), slot_a(v), slot_x(u), slot_x(v)))
                        .product();
                    if let Some(ew) = ew.as_mut() {
                        let mut acc = Some(Rational::one());
                        for &(u, v) in &pos {
                            let g = ng.base.exact_weight(slot_a(u), slot_a(v), slot_x(u), slot_x(v)).unwrap();
                            acc = acc.and_then(|r| checked_mul(&r, &g));
                        }
                        match acc {
                            Some(r) => ew[wi] = r,
                            None => overflow = true,
                        }
                    }
                }
            }
        }
    }
    let game = match (ew, ep) {
        (Some(w), Some(p)) if !overflow => BellGame::new_exact(sizes, w, p)?,
        _ => BellGame::new(sizes, weights, probs)?,
    };
    Ok((game, subset.to_vec(), rest))
}

#[derive(Clone, Debug, PartialEq)]
pub struct BiseparableBound {
    pub value: f64,
    pub exact: Option<Rational>,
    /// The first maximizing group containing party 0.
    pub subset: Vec<usize>,
    pub cut_capacity: usize,
    /// Local bound of the merged game for every bipartition, in scan order.
    pub per_cut: Vec<(Vec<usize>, f64)>,
    /// The optimal deterministic biproduct behavior for `subset`, when its
    /// table fits in memory.
    pub witness: Option<Behavior>,
}

/// Maximum score of biseparable behaviors: over every bipartition, the local
/// bound of the game in which each side is merged into a single player.
///
/// Bipartitions are scanned as groups containing party 0, in lexicographic
/// order of their sorted member lists.
pub fn biseparable_bound_bruteforce(ng: &NetworkGame) -> Result<BiseparableBound> {
    let n = ng.graph.parties();
    if n > MAX_NETWORK_PARTIES {
        return Err(Error::Capacity(format!("biseparable brute force supports at most {MAX_NETWORK_PARTIES} parties")));
    }
    let mut groups: Vec<Vec<usize>> = (0u32..1 << (n - 1))
        .map(|rest| (0..n).filter(|&v| v == 0 || (rest >> (v - 1)) & 1 == 1).collect::<Vec<_>>())
        .filter(|g: &Vec<usize>| g.len() < n)
        .collect();
    groups.sort();

    let mut per_cut = Vec::with_capacity(groups.len());
    let mut best: Option<(super::LocalBound, Vec<usize>, Vec<usize>)> = None;
    for g in groups {
        let (game, ga, gb) = merged_game(ng, &g)?;
        let lb = local_bound_bruteforce(&game)?;
        per_cut.push((g.clone(), lb.value));
        let better = match &best {
            None => true,
            Some((b, ..)) => match (lb.exact, b.exact) {
                (Some(x), Some(y)) => x > y,
                _ => lb.value > b.value,
            },
        };
        if better {
            best = Some((lb, ga, gb));
        }
    }
    let (lb, ga, gb) = best.expect("at least one bipartition");
    let witness = biproduct_behavior(ng, &ga, &gb, &lb.alice, &lb.bob).ok();
    Ok(BiseparableBound {
        value: lb.value,
        exact: lb.exact,
        cut_capacity: cut_capacity(&ng.graph, &ga)?,
        subset: ga,
        per_cut,
        witness,
    })
}

/// The deterministic behavior where group `ga` answers jointly via `alice`
/// and `gb` via `bob`.
fn biproduct_behavior(ng: &NetworkGame, ga: &[usize], gb: &[usize], alice: &[usize], bob: &[usize]) -> Result<Behavior> {
    let pin = ng.party_inputs()?;
    let pout = ng.party_outputs()?;
    let r = |g: &[usize], s: &[usize]| g.iter().map(|&i| s[i]).collect::<Vec<_>>();
    let (rxa, rxb, raa, rab) = (r(ga, &pin), r(gb, &pin), r(ga, &pout), r(gb, &pout));
    Behavior::deterministic(&pin, &pout, |x| {
        let xa = mixed_index(&r(ga, x), &rxa);
        let xb = mixed_index(&r(gb, x), &rxb);
        let mut out = vec![0; x.len()];
        for (&party, d) in ga.iter().zip(mixed_digits(alice[xa], &raa)) {
            out[party] = d;
        }
        for (&party, d) in gb.iter().zip(mixed_digits(bob[xb], &rab)) {
            out[party] = d;
        }
        out
    })
}

/// Where the biseparable threshold `S_L(G^{(x)c})` comes from.
#[derive(Clone, Debug, PartialEq)]
pub enum Threshold {
    /// Brute-force local bound of the `c`-fold repetition of the base game.
    BruteForce,
    Supplied(f64),
    /// Closed-form Khot-Vishnoi bound at `L = c` for the code of order `k`.
    KhotVishnoi { k: u32, eta: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Theorem1Verdict {
    pub score: f64,
    pub threshold: f64,
    pub margin: f64,
    pub min_cut: usize,
    /// `score > threshold`, strictly.
    pub certified: bool,
}

/// GMNL test: the network score must strictly exceed the local bound of the
/// base game repeated `c` times, `c` the min-cut capacity.
pub fn theorem1_certify(ng: &NetworkGame, behavior: &Behavior, source: &Threshold) -> Result<Theorem1Verdict> {
    let c = min_cut(&ng.graph)?.capacity;
    let threshold = match source {
        Threshold::Supplied(t) => *t,
        Threshold::BruteForce => {
            let unavailable = |e: Error| Error::Unsupported(format!("no local bound available for the {c}-fold game: {e}"));
            let rep = krep(&ng.base, c as u32).map_err(unavailable)?;
            local_bound_bruteforce(&rep).map_err(unavailable)?.value
        }
        Threshold::KhotVishnoi { k, eta } => classical_bound(&KVParams::new(*k, c as u32, *eta)?),
    };
    let score = network_score(ng, behavior)?;
    Ok(Theorem1Verdict { score, threshold, margin: score - threshold, min_cut: c, certified: score > threshold })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::{chsh, score, trivial_game};

    #[test]
    fn slot_bookkeeping() {
        let ng = network_game(&chsh(), &NetworkGraph::triangle()).unwrap();
        assert_eq!(ng.party_inputs().unwrap(), vec![4, 4, 4]);
        assert_eq!(ng.slots(1), &[Slot { edge: 0, neighbor: 0 }, Slot { edge: 2, neighbor: 2 }]);
        let star = network_game(&chsh(), &NetworkGraph::star(3).unwrap()).unwrap();
        assert_eq!(star.party_outputs().unwrap(), vec![8, 2, 2, 2]);
    }

    #[test]
    fn asymmetric_game_rejected() {
        let g = BellGame::new([2, 2, 2, 2], (0..16).map(|i| f64::from(i % 3) / 2.0).collect(), vec![0.25; 4]).unwrap();
        assert!(matches!(network_game(&g, &NetworkGraph::triangle()), Err(Error::Unsupported(_))));
    }

    #[test]
    fn constant_outputs_on_triangle() {
        let ng = network_game(&chsh(), &NetworkGraph::triangle()).unwrap();
        let b = ng.local_behavior(&vec![vec![0; 4]; 3]).unwrap();
        assert!((network_score(&ng, &b).unwrap() - 0.421875).abs() < 1e-15);
    }

    #[test]
    fn single_edge_reduces_to_bipartite_score() {
        let ng = network_game(&chsh(), &NetworkGraph::path(2).unwrap()).unwrap();
        let b = Behavior::deterministic(&[2, 2], &[2, 2], |x| vec![x[0], 1 - x[1]]).unwrap();
        assert_eq!(network_score(&ng, &b).unwrap(), score(&chsh(), &b).unwrap());
        let bound = biseparable_bound_bruteforce(&ng).unwrap();
        assert_eq!(bound.exact, Some(Rational::new(3, 4)));
    }

    #[test]
    fn triangle_biseparable_bound() {
        let ng = network_game(&chsh(), &NetworkGraph::triangle()).unwrap();
        let bound = biseparable_bound_bruteforce(&ng).unwrap();
        assert_eq!(bound.exact, Some(Rational::new(5, 8)));
        assert_eq!(bound.subset, vec![0]);
        assert_eq!(bound.cut_capacity, 2);
        assert_eq!(bound.per_cut.len(), 3);
        let w = bound.witness.unwrap();
        assert!((network_score(&ng, &w).unwrap() - 0.625).abs() < 1e-15);
    }

    #[test]
    fn trivial_base_game() {
        let ng = network_game(&trivial_game([2, 2, 2, 2]).unwrap(), &NetworkGraph::triangle()).unwrap();
        assert_eq!(biseparable_bound_bruteforce(&ng).unwrap().value, 1.0);
    }

    #[test]
    fn gmnl_test_thresholds() {
        let ng = network_game(&chsh(), &NetworkGraph::triangle()).unwrap();
        let b = ng.local_behavior(&vec![vec![0; 4]; 3]).unwrap();
        let v = theorem1_certify(&ng, &b, &Threshold::BruteForce).unwrap();
        assert_eq!(v.threshold, 0.625);
        assert_eq!(v.min_cut, 2);
        assert!(!v.certified);
        let at = theorem1_certify(&ng, &b, &Threshold::Supplied(0.421875)).unwrap();
        assert!(!at.certified);
        let below = theorem1_certify(&ng, &b, &Threshold::Supplied(0.42)).unwrap();
        assert!(below.certified);
        let kv = theorem1_certify(&ng, &b, &Threshold::KhotVishnoi { k: 4, eta: 0.25 }).unwrap();
        assert!((kv.threshold - 0.157_490_131_236_859_15).abs() < 1e-15);
    }

    #[test]
    fn behavior_csv_roundtrip() {
        let ng = network_game(&chsh(), &NetworkGraph::triangle()).unwrap();
        let b = ng.local_behavior(&[vec![0, 1, 2, 3], vec![3, 2, 1, 0], vec![1, 1, 2, 2]]).unwrap();
        let text = ng.behavior_to_csv(&b).unwrap();
        assert!(text.starts_with("x0.1,x0.2,x1.0,x1.2,x2.0,x2.1,a0.1,a0.2,a1.0,a1.2,a2.0,a2.1,p\n"));
        assert_eq!(ng.behavior_from_csv(&text).unwrap(), b);
    }
}
