use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::presentation::GroupPresentation;
use crate::group::ring::{RingElement, RingMatrix};
use crate::group::tower::{Permutation, QuotientLevel, QuotientTower};
use crate::group::word::Word;

/// An endomorphism of a presented group given by generator images; it is
/// checked to induce automorphisms of the finite quotients it is used with.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AutomorphismSpec {
    images: Vec<Word>,
    declared_order: Option<u64>,
}

/// The automorphism induced on one finite quotient, as a permutation of its
/// points (point `p` stands for the element `q` with `σ_q(0) = p`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelAutomorphism {
    pub point_map: Permutation,
    pub order: u64,
}

#[derive(Serialize, Deserialize)]
struct AutomorphismFile {
    images: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    declared_order: Option<u64>,
}

impl AutomorphismSpec {
    pub fn new(images: Vec<Word>, declared_order: Option<u64>) -> Result<Self> {
        if declared_order == Some(0) {
            return Err(Error::Invalid("declared order must be positive".into()));
        }
        Ok(AutomorphismSpec {
            images,
            declared_order,
        })
    }

    pub fn identity(ngens: usize) -> Self {
        AutomorphismSpec {
            images: (0..ngens).map(Word::generator).collect(),
            declared_order: Some(1),
        }
    }

    /// Parses generator images written in the word grammar, e.g.
    /// `[("a", "A"), ("b", "a b")]`.
    pub fn from_strings(g: &GroupPresentation, images: &[(&str, &str)]) -> Result<Self> {
        let map: BTreeMap<String, String> = images
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect();
        Self::from_map(g, map, None)
    }

    fn from_map(
        g: &GroupPresentation,
        mut map: BTreeMap<String, String>,
        declared_order: Option<u64>,
    ) -> Result<Self> {
        let mut images = Vec::with_capacity(g.rank());
        for name in g.generators() {
            let src = map
                .remove(name)
                .ok_or_else(|| Error::Invalid(format!("no image for generator `{name}`")))?;
            images.push(g.word(&src)?);
        }
        if let Some(extra) = map.keys().next() {
            return Err(Error::UndeclaredGenerator(extra.clone()));
        }
        Self::new(images, declared_order)
    }

    /// JSON form: `{"images": {"a": "A", "b": "a b"}, "declared_order": 2}`.
    pub fn from_json(text: &str, g: &GroupPresentation) -> Result<Self> {
        let file: AutomorphismFile = serde_json::from_str(text)?;
        Self::from_map(g, file.images, file.declared_order)
    }

    pub fn from_json_value(v: serde_json::Value, g: &GroupPresentation) -> Result<Self> {
        let file: AutomorphismFile = serde_json::from_value(v)?;
        Self::from_map(g, file.images, file.declared_order)
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    pub fn declared_order(&self) -> Option<u64> {
        self.declared_order
    }

    pub fn is_identity(&self) -> bool {
        self.images
            .iter()
            .enumerate()
            .all(|(i, w)| *w == Word::generator(i))
    }

    /// Substitutes generator images and freely reduces. Generators beyond
    /// the automorphism's range are left fixed.
    pub fn apply_word(&self, w: &Word) -> Word {
        let mut out = Word::identity();
        for &(g, e) in w.syllables() {
            match self.images.get(g) {
                Some(img) => out = out.mul(&img.pow(e)),
                None => out.push(g, e),
            }
        }
        out
    }

    pub fn apply_element(&self, x: &RingElement) -> RingElement {
        x.map_words(|w| self.apply_word(w))
    }

    pub fn apply_matrix(&self, m: &RingMatrix) -> RingMatrix {
        m.map_entries(|e| self.apply_element(e))
    }

    /// The automorphism induced on a quotient level. `index` only labels
    /// error messages.
    pub fn induced_on_level(
        &self,
        g: &GroupPresentation,
        level: &QuotientLevel,
        index: usize,
    ) -> Result<LevelAutomorphism> {
        let names = g.generators();
        let fail = |gen: usize, reason: String| Error::NotInvariant {
            level: index,
            generator: names.get(gen).cloned().unwrap_or_else(|| format!("#{gen}")),
            reason,
        };
        if self.images.len() != level.generator_count() {
            return Err(Error::Invalid(format!(
                "automorphism has {} images, level {index} has {} generators",
                self.images.len(),
                level.generator_count()
            )));
        }
        let image_perms = self
            .images
            .iter()
            .map(|w| level.word_permutation(w))
            .collect::<Result<Vec<_>>>()?;
        for r in g.relators() {
            let pr = level.word_permutation(&self.apply_word(r))?;
            if !pr.is_identity() {
                let gen = r.syllables().first().map_or(0, |s| s.0);
                return Err(fail(
                    gen,
                    format!(
                        "image of relator `{}` is not trivial in the quotient",
                        r.display(names)
                    ),
                ));
            }
        }
        // φ(σ_g(p)) = σ_{Φ(g)}(φ(p)), φ(0) = 0, propagated along a Schreier tree.
        let d = level.degree();
        let mut phi = vec![u32::MAX; d];
        phi[0] = 0;
        let (order, _) = level.schreier_tree();
        for &p in &order {
            let fp = phi[p] as usize;
            for (gen, s) in level.images().iter().enumerate() {
                let q = s.apply(p);
                let want = image_perms[gen].apply(fp) as u32;
                if phi[q] == u32::MAX {
                    phi[q] = want;
                } else if phi[q] != want {
                    return Err(fail(
                        gen,
                        "the generator assignment is not a homomorphism of the quotient".into(),
                    ));
                }
            }
        }
        let point_map = Permutation::from_images(phi).map_err(|_| {
            let gen = (0..self.images.len()).next().unwrap_or(0);
            fail(gen, "the induced map is not surjective".into())
        })?;
        let order = point_map.order();
        if let Some(k) = self.declared_order {
            if k % order != 0 {
                return Err(fail(
                    0,
                    format!("induced order {order} does not divide declared order {k}"),
                ));
            }
        }
        Ok(LevelAutomorphism { point_map, order })
    }

    /// Induced automorphisms on every level of the tower.
    pub fn validate_on_tower(
        &self,
        g: &GroupPresentation,
        t: &QuotientTower,
    ) -> Result<Vec<LevelAutomorphism>> {
        t.levels()
            .iter()
            .enumerate()
            .map(|(i, l)| self.induced_on_level(g, l, i))
            .collect()
    }
}
