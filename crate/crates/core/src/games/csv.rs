//! Comma-separated tables for games and behaviors.
//!
//! Games are written as `x,y,a,b,weight,p`, one row per table entry, with
//! `p` repeated on every row of an input pair. Numbers are decimals or exact
//! fractions such as `1/4`.

use num_traits::Zero;

use super::{dyadic, to_f64, BellGame, Rational};
use crate::error::{Error, Result};

pub const GAME_HEADER: &str = "x,y,a,b,weight,p";

/// Parses a probability-like number, keeping an exact value when the text is
/// a fraction or a terminating decimal.
pub fn parse_number(s: &str) -> Option<(f64, Option<Rational>)> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: u128 = n.trim().parse().ok()?;
        let d: u128 = d.trim().parse().ok()?;
        if d == 0 {
            return None;
        }
        let r = Rational::new(n, d);
        return Some((to_f64(&r), Some(r)));
    }
    let v: f64 = s.parse().ok()?;
    if !v.is_finite() {
        return None;
    }
    let exact = decimal(s).or_else(|| dyadic(v));
    Some((v, exact))
}

fn decimal(s: &str) -> Option<Rational> {
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    if int.is_empty() && frac.is_empty() || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) || frac.len() > 30 {
        return None;
    }
    let digits: u128 = format!("{int}{frac}").parse().ok()?;
    Some(Rational::new(digits, 10u128.checked_pow(frac.len() as u32)?))
}

pub(crate) fn read_table(text: &str, header: &[String]) -> Result<Vec<(usize, Vec<String>)>> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
    let (hline, h) = lines.next().ok_or(Error::Parse { line: 1, msg: "missing header".into() })?;
    let got: Vec<&str> = h.split(',').map(str::trim).collect();
    if got != header.iter().map(String::as_str).collect::<Vec<_>>() {
        return Err(Error::Parse { line: hline + 1, msg: format!("expected header {:?}, got {h:?}", header.join(",")) });
    }
    let mut rows = Vec::new();
    for (i, l) in lines {
        let cells: Vec<String> = l.split(',').map(|c| c.trim().to_string()).collect();
        if cells.len() != header.len() {
            return Err(Error::Parse { line: i + 1, msg: format!("expected {} columns, got {}", header.len(), cells.len()) });
        }
        rows.push((i + 1, cells));
    }
    Ok(rows)
}

pub(crate) fn indices(cells: &[String], radix: &[usize], line: usize) -> Result<Vec<usize>> {
    cells
        .iter()
        .zip(radix)
        .map(|(c, &m)| match c.parse::<usize>() {
            Ok(v) if v < m => Ok(v),
            _ => Err(Error::Parse { line, msg: format!("index {c:?} not in 0..{m}") }),
        })
        .collect()
}

pub(crate) fn parse_f64(cell: &str, line: usize) -> Result<f64> {
    parse_number(cell).map(|(v, _)| v).ok_or_else(|| Error::Parse { line, msg: format!("bad number {cell:?}") })
}

impl BellGame {
    pub fn to_csv(&self) -> String {
        let [nx, ny, na, nb] = self.sizes();
        let fmt = |v: f64, e: Option<Rational>| match e {
            Some(r) if *r.denom() == 1 => format!("{}", r.numer()),
            Some(r) => format!("{}/{}", r.numer(), r.denom()),
            None => format!("{v:.16e}"),
        };
        let mut out = format!("{GAME_HEADER}\n");
        for x in 0..nx {
            for y in 0..ny {
                let p = fmt(self.prob(x, y), self.exact_prob(x, y));
                for a in 0..na {
                    for b in 0..nb {
                        let w = fmt(self.weight(a, b, x, y), self.exact_weight(a, b, x, y));
                        out.push_str(&format!("{x},{y},{a},{b},{w},{p}\n"));
                    }
                }
            }
        }
        out
    }

    /// Alphabet sizes are one more than the largest index seen; every entry
    /// of the table must appear exactly once.
    pub fn from_csv(text: &str) -> Result<Self> {
        let header: Vec<String> = GAME_HEADER.split(',').map(String::from).collect();
        let rows = read_table(text, &header)?;
        if rows.is_empty() {
            return Err(Error::Parse { line: 1, msg: "game table has no rows".into() });
        }
        let mut parsed = Vec::with_capacity(rows.len());
        let mut sizes = [0usize; 4];
        for (line, cells) in &rows {
            let idx = indices(&cells[..4], &[usize::MAX; 4], *line)?;
            for (s, v) in sizes.iter_mut().zip(&idx) {
                *s = (*s).max(v + 1);
            }
            let num = |c: &str| parse_number(c).ok_or_else(|| Error::Parse { line: *line, msg: format!("bad number {c:?}") });
            parsed.push((*line, idx, num(&cells[4])?, num(&cells[5])?));
        }
        let [nx, ny, na, nb] = sizes;
        let table = super::checked_product(&sizes)?;
        let mut weights = vec![None; table];
        let mut probs: Vec<Option<(f64, Option<Rational>)>> = vec![None; nx * ny];
        for (line, idx, w, p) in parsed {
            let [x, y, a, b] = [idx[0], idx[1], idx[2], idx[3]];
            let wi = ((x * ny + y) * na + a) * nb + b;
            if weights[wi].replace(w).is_some() {
                return Err(Error::Parse { line, msg: format!("duplicate entry for x={x} y={y} a={a} b={b}") });
            }
            match &probs[x * ny + y] {
                Some(prev) if prev.0 != p.0 => {
                    return Err(Error::Parse { line, msg: format!("inconsistent p for x={x} y={y}") });
                }
                _ => probs[x * ny + y] = Some(p),
            }
        }
        let weights = weights
            .into_iter()
            .collect::<Option<Vec<_>>>()
            .ok_or(Error::Parse { line: 0, msg: format!("table must list all {table} entries") })?;
        let probs = probs
            .into_iter()
            .map(|p| p.unwrap_or((0.0, Some(Rational::zero()))))
            .collect::<Vec<_>>();
        let all_exact = weights.iter().chain(&probs).all(|(_, e)| e.is_some());
        if all_exact {
            BellGame::new_exact(
                sizes,
                weights.into_iter().map(|(_, e)| e.unwrap()).collect(),
                probs.into_iter().map(|(_, e)| e.unwrap()).collect(),
            )
        } else {
            BellGame::new(sizes, weights.into_iter().map(|w| w.0).collect(), probs.into_iter().map(|p| p.0).collect())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::chsh;

    #[test]
    fn numbers() {
        assert_eq!(parse_number("1/4"), Some((0.25, Some(Rational::new(1, 4)))));
        assert_eq!(parse_number("0.1").unwrap().1, Some(Rational::new(1, 10)));
        assert_eq!(parse_number("1").unwrap().1, Some(Rational::new(1, 1)));
        assert_eq!(parse_number("2.5e-1").unwrap().1, Some(Rational::new(1, 4)));
        assert!(parse_number("1/0").is_none());
        assert!(parse_number("abc").is_none());
    }

    #[test]
    fn game_roundtrip() {
        let g = chsh();
        let text = g.to_csv();
        assert!(text.starts_with("x,y,a,b,weight,p\n0,0,0,0,1,1/4\n"));
        assert_eq!(BellGame::from_csv(&text).unwrap(), g);
    }

    #[test]
    fn thirds_stay_exact() {
        let mut text = String::from("x,y,a,b,weight,p\n");
        for x in 0..3 {
            for a in 0..2 {
                text.push_str(&format!("{x},0,{a},0,{},1/3\n", u8::from(a == 0)));
            }
        }
        let g = BellGame::from_csv(&text).unwrap();
        assert_eq!(g.sizes(), [3, 1, 2, 1]);
        assert_eq!(g.exact_prob(2, 0), Some(Rational::new(1, 3)));
    }

    #[test]
    fn malformed() {
        assert!(BellGame::from_csv("x,y,a,b,w,p\n").is_err());
        assert!(BellGame::from_csv("x,y,a,b,weight,p\n0,0,0,0,1\n").is_err());
        assert!(BellGame::from_csv("x,y,a,b,weight,p\n0,0,0,0,1,1\n0,0,0,0,1,1\n").is_err());
        assert!(BellGame::from_csv("x,y,a,b,weight,p\n0,0,1,0,1,1\n").is_err());
    }
}
