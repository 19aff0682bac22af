//! Braid words, their validation, Markov stabilization and the permutation
//! combinatorics of the trace closure.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A braid on `strands` strands. A letter `g` stands for the generator
/// `sigma_|g|`, positive when `g > 0` and inverted when `g < 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BraidWord {
    strands: usize,
    letters: Vec<i64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct CrossingCounts {
    pub positive: usize,
    pub negative: usize,
}

/// Named braids accepted wherever an inline braid is.
pub const TABLE: &[(&str, usize, &[i64])] = &[
    ("3_1", 2, &[-1, -1, -1]),
    ("4_1", 3, &[-1, 2, -1, 2]),
    ("8_12a", 5, &[-1, 2, -1, -3, 2, 4, -3, 4]),
    ("8_12b", 5, &[-1, 2, -3, 4, -3, 4, -2, -1, 3, 2]),
];

impl BraidWord {
    pub fn new(strands: usize, letters: Vec<i64>) -> Result<Self> {
        if strands < 1 {
            return Err(Error::Input("a braid needs at least one strand".into()));
        }
        for &g in &letters {
            if g == 0 || g.unsigned_abs() as usize >= strands {
                return Err(Error::LetterOutOfRange { letter: g, strands });
            }
        }
        Ok(BraidWord { strands, letters })
    }

    /// Looks up one of the built-in table names.
    pub fn named(name: &str) -> Option<BraidWord> {
        TABLE.iter().find(|(n, _, _)| *n == name).map(|(_, s, l)| BraidWord {
            strands: *s,
            letters: l.to_vec(),
        })
    }

    pub fn strands(&self) -> usize {
        self.strands
    }

    pub fn letters(&self) -> &[i64] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Whether crossing `c` is positive.
    pub fn is_positive(&self, c: usize) -> bool {
        self.letters[c] > 0
    }

    /// Strand position (1-based) of the left strand at crossing `c`.
    pub fn generator(&self, c: usize) -> usize {
        self.letters[c].unsigned_abs() as usize
    }

    pub fn crossing_counts(&self) -> CrossingCounts {
        let positive = self.letters.iter().filter(|&&g| g > 0).count();
        CrossingCounts {
            positive,
            negative: self.letters.len() - positive,
        }
    }

    /// Appends `eps * n` for each sign in order, where `n` is the current
    /// strand count, adding a strand each time.
    pub fn stabilize(&self, signs: &[i64]) -> Result<BraidWord> {
        let mut out = self.clone();
        for &eps in signs {
            if eps != 1 && eps != -1 {
                return Err(Error::Input(format!("stabilization sign must be +1 or -1, got {eps}")));
            }
            out.letters.push(eps * out.strands as i64);
            out.strands += 1;
        }
        Ok(out)
    }

    pub fn mirror(&self) -> BraidWord {
        BraidWord {
            strands: self.strands,
            letters: self.letters.iter().map(|g| -g).collect(),
        }
    }

    /// Permutation of strand positions induced by the braid (0-based).
    pub fn permutation(&self) -> Vec<usize> {
        let mut perm: Vec<usize> = (0..self.strands).collect();
        for c in 0..self.len() {
            let g = self.generator(c);
            perm.swap(g - 1, g);
        }
        perm
    }

    /// Number of components of the closure, i.e. the cycle count of the
    /// underlying permutation.
    pub fn closure_components(&self) -> usize {
        let perm = self.permutation();
        let mut seen = vec![false; self.strands];
        let mut cycles = 0;
        for start in 0..self.strands {
            if seen[start] {
                continue;
            }
            cycles += 1;
            let mut p = start;
            while !seen[p] {
                seen[p] = true;
                p = perm[p];
            }
        }
        cycles
    }

    /// Compact inline form `S:g1,g2,...`, accepted by [`parse_braid`].
    pub fn inline(&self) -> String {
        let letters: Vec<String> = self.letters.iter().map(|g| g.to_string()).collect();
        format!("{}:{}", self.strands, letters.join(","))
    }
}

impl fmt::Display for BraidWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let letters: Vec<String> = self.letters.iter().map(|g| g.to_string()).collect();
        write!(f, "BR[{},{{{}}}]", self.strands, letters.join(","))
    }
}

impl FromStr for BraidWord {
    type Err = Error;
    fn from_str(s: &str) -> Result<BraidWord> {
        parse_braid(s)
    }
}

/// Parses `"S:g1,g2,..."`, the display form `"BR[S,{g1,g2,...}]"`, or a
/// table name such as `"3_1"`.
pub fn parse_braid(text: &str) -> Result<BraidWord> {
    let text = text.trim();
    if let Some(b) = BraidWord::named(text) {
        return Ok(b);
    }
    if let Some(body) = text.strip_prefix("BR[").and_then(|r| r.strip_suffix("}]")) {
        let (strands, letters) = body
            .split_once(",{")
            .ok_or_else(|| Error::Parse(format!("expected \"BR[S,{{...}}]\", got {text:?}")))?;
        return parse_braid(&format!("{strands}:{letters}"));
    }
    let (strands, letters) = text
        .split_once(':')
        .ok_or_else(|| Error::Parse(format!("expected \"S:g1,g2,...\" or a table name, got {text:?}")))?;
    let strands: i64 = strands
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad strand count {strands:?}")))?;
    if strands < 1 {
        return Err(Error::Input(format!("strand count must be at least 1, got {strands}")));
    }
    let letters = if letters.trim().is_empty() {
        Vec::new()
    } else {
        letters
            .split(',')
            .map(|g| {
                g.trim()
                    .parse::<i64>()
                    .map_err(|_| Error::Parse(format!("bad braid letter {g:?}")))
            })
            .collect::<Result<Vec<_>>>()?
    };
    BraidWord::new(strands as usize, letters)
}
