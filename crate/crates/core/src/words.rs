//! Eventually periodic digit words and their lexicographic order.
//!
//! A word is `pre` followed by `cycle` repeated forever. Construction
//! canonicalizes: the cycle is reduced to its primitive period and the
//! preperiod is rolled back as far as possible, so two values compare equal
//! exactly when they denote the same infinite word. Finite digit strings are
//! represented with the zero tail `(0)`.

use std::cmp::Ordering;
use std::fmt;

use num_integer::Integer;

use crate::{Error, Result};

pub type Digit = u32;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PeriodicWord {
    pre: Vec<Digit>,
    cycle: Vec<Digit>,
}

impl PeriodicWord {
    pub fn new(pre: Vec<Digit>, cycle: Vec<Digit>) -> Result<Self> {
        if cycle.is_empty() {
            return Err(Error::EmptyPeriod);
        }
        let mut w = PeriodicWord { pre, cycle };
        w.canonicalize();
        Ok(w)
    }

    /// A finite digit string, read as the word with tail (0).
    pub fn finite(digits: Vec<Digit>) -> Self {
        let mut w = PeriodicWord {
            pre: digits,
            cycle: vec![0],
        };
        w.canonicalize();
        w
    }

    pub fn zero() -> Self {
        PeriodicWord {
            pre: vec![],
            cycle: vec![0],
        }
    }

    fn canonicalize(&mut self) {
        // primitive period
        let n = self.cycle.len();
        for p in 1..n {
            if n % p == 0 && (p..n).all(|i| self.cycle[i] == self.cycle[i % p]) {
                self.cycle.truncate(p);
                break;
            }
        }
        // roll the cycle window left over matching preperiod symbols
        while let Some(&last) = self.pre.last() {
            if last != *self.cycle.last().unwrap() {
                break;
            }
            self.cycle.rotate_right(1);
            self.pre.pop();
        }
    }

    pub fn preperiod(&self) -> &[Digit] {
        &self.pre
    }

    pub fn cycle(&self) -> &[Digit] {
        &self.cycle
    }

    pub fn preperiod_len(&self) -> usize {
        self.pre.len()
    }

    pub fn period_len(&self) -> usize {
        self.cycle.len()
    }

    /// Symbol at position `i` of the infinite word.
    pub fn digit(&self, i: usize) -> Digit {
        if i < self.pre.len() {
            self.pre[i]
        } else {
            self.cycle[(i - self.pre.len()) % self.cycle.len()]
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = Digit> + '_ {
        (0..).map(move |i| self.digit(i))
    }

    /// True for the all-zero tail, i.e. the word denotes a finite string.
    pub fn is_finite(&self) -> bool {
        self.cycle == [0]
    }

    /// The word with its first `k` symbols removed.
    pub fn shift(&self, k: usize) -> PeriodicWord {
        if k <= self.pre.len() {
            let mut w = PeriodicWord {
                pre: self.pre[k..].to_vec(),
                cycle: self.cycle.clone(),
            };
            w.canonicalize();
            w
        } else {
            let r = (k - self.pre.len()) % self.cycle.len();
            let mut cycle = self.cycle.clone();
            cycle.rotate_left(r);
            let mut w = PeriodicWord { pre: vec![], cycle };
            w.canonicalize();
            w
        }
    }

    pub fn max_digit(&self) -> Digit {
        self.iter()
            .take(self.pre.len() + self.cycle.len())
            .max()
            .unwrap()
    }

    /// Number of symbols that decides comparison with `other`: if two
    /// eventually periodic words agree this far, they are equal.
    fn decision_bound(&self, other: &PeriodicWord) -> usize {
        self.pre.len().max(other.pre.len()) + self.cycle.len().lcm(&other.cycle.len())
    }

    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = |m: &str| Error::Parse(format!("{m}: {s:?}"));
        let (pre_part, cycle_part) = match s.find('(') {
            Some(i) => {
                let rest = &s[i + 1..];
                let j = rest.find(')').ok_or_else(|| bad("unclosed cycle"))?;
                if !rest[j + 1..].trim().is_empty() {
                    return Err(bad("trailing input after cycle"));
                }
                (&s[..i], Some(&rest[..j]))
            }
            None => {
                if s.contains(')') {
                    return Err(bad("unmatched parenthesis"));
                }
                (s, None)
            }
        };
        let digits = |part: &str| -> Result<Vec<Digit>> {
            let part = part.trim();
            if part.is_empty() {
                return Ok(vec![]);
            }
            if part.contains(',') {
                part.split(',')
                    .map(|d| {
                        d.trim()
                            .parse::<Digit>()
                            .map_err(|_| bad("digit"))
                    })
                    .collect()
            } else {
                part.chars()
                    .map(|c| c.to_digit(10).map(|d| d as Digit).ok_or_else(|| bad("digit")))
                    .collect()
            }
        };
        let pre = digits(pre_part)?;
        match cycle_part {
            Some(c) => {
                let cycle = digits(c)?;
                PeriodicWord::new(pre, cycle)
            }
            None => {
                if pre.is_empty() {
                    return Err(bad("empty word"));
                }
                Ok(PeriodicWord::finite(pre))
            }
        }
    }
}

/// Lexicographic order of the denoted infinite words.
impl PartialOrd for PeriodicWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for PeriodicWord {
    fn cmp(&self, other: &Self) -> Ordering {
        let bound = self.decision_bound(other);
        for i in 0..bound {
            match self.digit(i).cmp(&other.digit(i)) {
                Ordering::Equal => {}
                o => return o,
            }
        }
        Ordering::Equal
    }
}

impl fmt::Display for PeriodicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wide = self.max_digit() > 9;
        let join = |ds: &[Digit]| -> String {
            if wide {
                ds.iter()
                    .map(|d| d.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            } else {
                ds.iter().map(|d| d.to_string()).collect()
            }
        };
        if self.is_finite() {
            if self.pre.is_empty() {
                return write!(f, "0");
            }
            return write!(f, "{}", join(&self.pre));
        }
        write!(f, "{}({})", join(&self.pre), join(&self.cycle))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(pre: &[Digit], cyc: &[Digit]) -> PeriodicWord {
        PeriodicWord::new(pre.to_vec(), cyc.to_vec()).unwrap()
    }

    #[test]
    fn canonical_forms() {
        // trailing zeros are absorbed into the zero tail
        let a = PeriodicWord::finite(vec![1, 0, 1, 0, 0]);
        assert_eq!(a.preperiod(), &[1, 0, 1]);
        assert_eq!(a.cycle(), &[0]);
        assert!(a.is_finite());
        // primitive period
        let b = w(&[], &[1, 0, 1, 0]);
        assert_eq!(b.cycle(), &[1, 0]);
        assert_eq!(b.preperiod_len(), 0);
        // rollback: 21(1) is 2(1)
        let c = w(&[2, 1], &[1]);
        assert_eq!(c.preperiod(), &[2]);
        assert_eq!(c.cycle(), &[1]);
        // rollback across rotations: 10(10) is (10)
        let d = w(&[1, 0], &[1, 0]);
        let e = w(&[], &[1, 0]);
        assert_eq!(d, e);
        assert_eq!(d.preperiod_len(), 0);
        // equality after canonicalization means equal words
        assert_eq!(w(&[1, 0, 0], &[1, 0, 0]), w(&[], &[1, 0, 0]));
    }

    #[test]
    fn indexing_and_shift() {
        let v = w(&[2], &[1, 0]);
        let got: Vec<Digit> = v.iter().take(6).collect();
        assert_eq!(got, vec![2, 1, 0, 1, 0, 1]);
        assert_eq!(v.shift(1), w(&[], &[1, 0]));
        assert_eq!(v.shift(2), w(&[], &[0, 1]));
        assert_eq!(v.shift(4), w(&[], &[0, 1]));
        let f = PeriodicWord::finite(vec![1, 0, 0, 0, 1]);
        assert_eq!(f.shift(5), PeriodicWord::zero());
        assert_eq!(f.shift(4), PeriodicWord::finite(vec![1]));
    }

    #[test]
    fn lexicographic_order() {
        // 10001(0) > (10000): differs at position 4
        let d1 = PeriodicWord::finite(vec![1, 0, 0, 0, 1]);
        let dstar = w(&[], &[1, 0, 0, 0, 0]);
        assert!(d1 > dstar);
        // (10) < 11(0)
        assert!(w(&[], &[1, 0]) < PeriodicWord::finite(vec![1, 1]));
        // equal words with different spellings
        assert_eq!(
            w(&[1], &[0, 1]).cmp(&w(&[1, 0, 1], &[0, 1])),
            Ordering::Equal
        );
        // 10(01) and 1(001) differ first at position 5
        assert!(w(&[1, 0], &[0, 1]) > w(&[1], &[0, 0, 1]));
        // long common prefix resolved inside the lcm window
        let a = w(&[], &[1, 0, 1, 1, 0, 1]);
        let b = w(&[], &[1, 0, 1]);
        assert_eq!(a, b);
        let c = w(&[], &[1, 0, 1, 1, 0, 0]);
        assert!(c < b);
    }

    #[test]
    fn parse_round_trips() {
        for s in ["10001", "1(0010)", "(10000)", "2(1)", "0"] {
            let p = PeriodicWord::parse(s).unwrap();
            assert_eq!(PeriodicWord::parse(&p.to_string()).unwrap(), p);
        }
        assert_eq!(
            PeriodicWord::parse("12,0(3)").unwrap().digit(1),
            0
        );
        assert_eq!(PeriodicWord::parse("12,0(3)").unwrap().digit(0), 12);
        assert!(PeriodicWord::parse("1(").is_err());
        assert!(PeriodicWord::parse("1)").is_err());
        assert!(PeriodicWord::parse("").is_err());
        assert!(PeriodicWord::parse("1(2)x").is_err());
        assert!(PeriodicWord::parse("()").is_err());
    }

    #[test]
    fn zero_word_display() {
        assert_eq!(PeriodicWord::zero().to_string(), "0");
        assert_eq!(w(&[1], &[2, 0]).to_string(), "1(20)");
        assert_eq!(PeriodicWord::finite(vec![1, 0, 0, 0, 1]).to_string(), "10001");
    }
}
