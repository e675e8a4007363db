use std::fmt;

/// A freely reduced word in the generators of a presentation.
///
/// Stored as syllables `(generator, exponent)` with nonzero exponents and no
/// two adjacent syllables on the same generator. The empty word is the
/// identity.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    syllables: Vec<(usize, i64)>,
}

impl Word {
    pub fn identity() -> Self {
        Word::default()
    }

    pub fn generator(index: usize) -> Self {
        Word {
            syllables: vec![(index, 1)],
        }
    }

    pub fn power_of(index: usize, exponent: i64) -> Self {
        let mut w = Word::identity();
        w.push(index, exponent);
        w
    }

    /// Builds a word from arbitrary syllables, freely reducing them.
    pub fn from_syllables<I: IntoIterator<Item = (usize, i64)>>(syllables: I) -> Self {
        let mut w = Word::identity();
        for (g, e) in syllables {
            w.push(g, e);
        }
        w
    }

    /// True if the given syllables are already freely reduced.
    pub fn is_reduced_syllables(syllables: &[(usize, i64)]) -> bool {
        syllables.iter().all(|&(_, e)| e != 0) && syllables.windows(2).all(|p| p[0].0 != p[1].0)
    }

    pub fn syllables(&self) -> &[(usize, i64)] {
        &self.syllables
    }

    pub fn is_identity(&self) -> bool {
        self.syllables.is_empty()
    }

    /// Number of letters (sum of absolute exponents).
    pub fn length(&self) -> u64 {
        self.syllables.iter().map(|&(_, e)| e.unsigned_abs()).sum()
    }

    /// Appends `g^e` on the right and reduces.
    pub fn push(&mut self, g: usize, e: i64) {
        if e == 0 {
            return;
        }
        if let Some(last) = self.syllables.last_mut() {
            if last.0 == g {
                last.1 += e;
                if last.1 == 0 {
                    self.syllables.pop();
                }
                return;
            }
        }
        self.syllables.push((g, e));
    }

    pub fn mul(&self, other: &Word) -> Word {
        let mut out = self.clone();
        for &(g, e) in &other.syllables {
            out.push(g, e);
        }
        out
    }

    pub fn inverse(&self) -> Word {
        Word {
            syllables: self.syllables.iter().rev().map(|&(g, e)| (g, -e)).collect(),
        }
    }

    pub fn pow(&self, n: i64) -> Word {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::identity();
        for _ in 0..n.unsigned_abs() {
            out = out.mul(&base);
        }
        out
    }

    /// Exponent sum of each generator, for `ngens` generators.
    pub fn exponent_sums(&self, ngens: usize) -> Vec<i64> {
        let mut v = vec![0; ngens];
        for &(g, e) in &self.syllables {
            v[g] += e;
        }
        v
    }

    pub fn max_generator(&self) -> Option<usize> {
        self.syllables.iter().map(|&(g, _)| g).max()
    }

    /// Renders with generator names; the result parses back with the
    /// presentation grammar.
    pub fn display<'a>(&'a self, names: &'a [String]) -> WordDisplay<'a> {
        WordDisplay { word: self, names }
    }
}

pub struct WordDisplay<'a> {
    word: &'a Word,
    names: &'a [String],
}

/// Name of the inverse letter: first character upper-cased.
pub fn inverse_name(name: &str) -> String {
    let mut c = name.chars();
    match c.next() {
        Some(first) => first.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

impl fmt::Display for WordDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.is_identity() {
            return write!(f, "1");
        }
        for (i, &(g, e)) in self.word.syllables.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            let name = self
                .names
                .get(g)
                .cloned()
                .unwrap_or_else(|| format!("g{g}"));
            let letter = if e < 0 { inverse_name(&name) } else { name };
            if e.abs() == 1 {
                write!(f, "{letter}")?;
            } else {
                write!(f, "{letter}^{}", e.abs())?;
            }
        }
        Ok(())
    }
}
