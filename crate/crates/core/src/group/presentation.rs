use std::fmt;

use crate::error::{Error, Result};
use crate::group::parse::{parse_presentation_text, parse_word};
use crate::group::word::Word;

/// A finitely presented group `⟨generators | relators⟩`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupPresentation {
    generators: Vec<String>,
    relators: Vec<Word>,
}

/// Parser output: the presentation plus the indices of relators that had to
/// be freely reduced.
#[derive(Clone, Debug)]
pub struct PresentationParse {
    pub presentation: GroupPresentation,
    pub auto_reduced: Vec<usize>,
}

pub fn parse_presentation(text: &str) -> Result<PresentationParse> {
    let parsed = parse_presentation_text(text)?;
    Ok(PresentationParse {
        presentation: GroupPresentation {
            generators: parsed.generators,
            relators: parsed.relators,
        },
        auto_reduced: parsed.auto_reduced,
    })
}

impl GroupPresentation {
    pub fn new(generators: Vec<String>, relators: Vec<Word>) -> Result<Self> {
        for (i, g) in generators.iter().enumerate() {
            if !g.chars().next().is_some_and(|c| c.is_ascii_lowercase())
                || !g.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
            {
                return Err(Error::Presentation(format!("bad generator name `{g}`")));
            }
            if generators[..i].contains(g) {
                return Err(Error::Presentation(format!("duplicate generator `{g}`")));
            }
        }
        for r in &relators {
            if let Some(m) = r.max_generator() {
                if m >= generators.len() {
                    return Err(Error::Presentation(format!(
                        "relator references generator index {m} but only {} are declared",
                        generators.len()
                    )));
                }
            }
        }
        Ok(GroupPresentation {
            generators,
            relators,
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        Ok(parse_presentation(text)?.presentation)
    }

    pub fn trivial() -> Self {
        GroupPresentation {
            generators: vec![],
            relators: vec![],
        }
    }

    /// Free abelian group of rank `n` on generators `a, b, c, …` (or
    /// `x1, x2, …` beyond 26), with all pairwise commutators as relators.
    pub fn free_abelian(n: usize) -> Self {
        let generators: Vec<String> = (0..n)
            .map(|i| {
                if n <= 26 {
                    ((b'a' + i as u8) as char).to_string()
                } else {
                    format!("x{}", i + 1)
                }
            })
            .collect();
        let mut relators = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                relators.push(Word::from_syllables([(i, 1), (j, 1), (i, -1), (j, -1)]));
            }
        }
        GroupPresentation {
            generators,
            relators,
        }
    }

    pub fn generators(&self) -> &[String] {
        &self.generators
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn generator_index(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g == name)
    }

    pub fn word(&self, text: &str) -> Result<Word> {
        parse_word(text, &self.generators)
    }

    /// True if the relators are exactly one commutator for each unordered
    /// pair of generators, so the group is free abelian.
    pub fn is_free_abelian(&self) -> bool {
        self.commutator_pairs().is_ok()
    }

    pub(crate) fn commutator_pairs(&self) -> Result<()> {
        let n = self.rank();
        let mut seen = vec![false; n * n];
        for r in &self.relators {
            let s = r.syllables();
            let ok = s.len() == 4
                && s.iter().all(|&(_, e)| e.abs() == 1)
                && s[0].0 == s[2].0
                && s[1].0 == s[3].0
                && s[0].1 == -s[2].1
                && s[1].1 == -s[3].1;
            if !ok {
                return Err(Error::NotAbelian(format!(
                    "relator `{}` is not a commutator of two generators",
                    r.display(&self.generators)
                )));
            }
            let (i, j) = (s[0].0.min(s[1].0), s[0].0.max(s[1].0));
            if seen[i * n + j] {
                return Err(Error::NotAbelian(format!(
                    "duplicate commutator of `{}` and `{}`",
                    self.generators[i], self.generators[j]
                )));
            }
            seen[i * n + j] = true;
        }
        for i in 0..n {
            for j in i + 1..n {
                if !seen[i * n + j] {
                    return Err(Error::NotAbelian(format!(
                        "missing commutator of `{}` and `{}`",
                        self.generators[i], self.generators[j]
                    )));
                }
            }
        }
        Ok(())
    }

    /// Adds a fresh generator, returning its index and the extended
    /// presentation. The name is `base` or `base1`, `base2`, … if taken.
    pub fn with_new_generator(&self, base: &str) -> (usize, GroupPresentation) {
        let mut name = base.to_string();
        let mut k = 1;
        while self.generators.contains(&name) {
            name = format!("{base}{k}");
            k += 1;
        }
        let mut generators = self.generators.clone();
        generators.push(name);
        (
            self.generators.len(),
            GroupPresentation {
                generators,
                relators: self.relators.clone(),
            },
        )
    }

    pub fn with_extra_relators(mut self, extra: impl IntoIterator<Item = Word>) -> Self {
        self.relators.extend(extra);
        self
    }
}

impl fmt::Display for GroupPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "gens")?;
        for g in &self.generators {
            write!(f, " {g}")?;
        }
        write!(f, "; rels")?;
        for (i, r) in self.relators.iter().enumerate() {
            let sep = if i == 0 { " " } else { ", " };
            write!(f, "{sep}{}", r.display(&self.generators))?;
        }
        write!(f, ";")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_round_trips() {
        let src = "gens a b t; rels a b A B, t a T B^2;";
        let p = GroupPresentation::parse(src).unwrap();
        let again = GroupPresentation::parse(&p.to_string()).unwrap();
        assert_eq!(p, again);
    }

    #[test]
    fn free_abelian_detection() {
        assert!(GroupPresentation::free_abelian(3).is_free_abelian());
        assert!(GroupPresentation::parse("gens a; rels ;")
            .unwrap()
            .is_free_abelian());
        assert!(GroupPresentation::parse("gens a b; rels b a B A;")
            .unwrap()
            .is_free_abelian());
        assert!(!GroupPresentation::parse("gens a b; rels ;")
            .unwrap()
            .is_free_abelian());
        assert!(!GroupPresentation::parse("gens a t; rels t a T a;")
            .unwrap()
            .is_free_abelian());
    }

    #[test]
    fn fresh_generator_avoids_clash() {
        let p = GroupPresentation::parse("gens t; rels ;").unwrap();
        let (i, q) = p.with_new_generator("t");
        assert_eq!(i, 1);
        assert_eq!(q.generators()[1], "t1");
    }
}
