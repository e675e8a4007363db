//! Algebraic mapping torus of a twisted chain self-map.
//!
//! Conventions: modules are right modules and matrices act on column
//! vectors, so a `Φ`-twisted chain map `f` satisfies
//! `∂_n f_n = f_{n−1} Φ(∂_n)`. Over `G ⋊_Φ ℤ` (with `t g t⁻¹ = Φ(g)`) the map
//! `f` becomes the untwisted matrix `f · t` (every word right-multiplied by
//! `t`), and the mapping torus has
//!
//! ```text
//! C'_n = C_n ⊕ C_{n−1},   ∂'_n = [ ∂_n   (−1)ⁿ (1 − f_{n−1} t) ]
//!                                [ 0     ∂_{n−1}              ]
//! ```

use serde::{Deserialize, Serialize};

use crate::chain::complex::{ChainComplex, ComplexFile, EntryFile};
use crate::engine::evaluate::evaluate_matrix;
use crate::error::{Error, Result};
use crate::group::{
    AutomorphismSpec, GroupPresentation, Permutation, QuotientLevel, QuotientTower, RingElement,
    RingMatrix, Word,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MappingTorusSpec {
    pub base: ChainComplex,
    pub automorphism: AutomorphismSpec,
    /// `f_n : C_n → C_n` for every degree of the base.
    pub chain_map: Vec<RingMatrix>,
}

/// The presentation of `G ⋊_Φ ℤ`: the generators of `G` plus a stable
/// letter `t`, and relators `t g t⁻¹ Φ(g)⁻¹`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtendedGroup {
    pub presentation: GroupPresentation,
    pub stable_letter: usize,
}

impl ExtendedGroup {
    pub fn new(g: &GroupPresentation, phi: &AutomorphismSpec) -> Self {
        let (t, ext) = g.with_new_generator("t");
        let extra: Vec<Word> = (0..g.rank())
            .map(|i| {
                Word::from_syllables([(t, 1), (i, 1), (t, -1)]).mul(&phi.images()[i].inverse())
            })
            .collect();
        ExtendedGroup {
            presentation: ext.with_extra_relators(extra),
            stable_letter: t,
        }
    }
}

impl MappingTorusSpec {
    pub fn new(
        base: ChainComplex,
        automorphism: AutomorphismSpec,
        chain_map: Vec<RingMatrix>,
    ) -> Result<Self> {
        if automorphism.images().len() != base.group().rank() {
            return Err(Error::Invalid(format!(
                "automorphism has {} images for {} generators",
                automorphism.images().len(),
                base.group().rank()
            )));
        }
        if chain_map.len() != base.ranks().len() {
            return Err(Error::Shape(format!(
                "chain map has {} components for {} degrees",
                chain_map.len(),
                base.ranks().len()
            )));
        }
        for (n, f) in chain_map.iter().enumerate() {
            let r = base.rank(n);
            if f.rows() != r || f.cols() != r {
                return Err(Error::Shape(format!(
                    "f_{n} is {}×{}, expected {r}×{r}",
                    f.rows(),
                    f.cols()
                )));
            }
        }
        Ok(MappingTorusSpec {
            base,
            automorphism,
            chain_map,
        })
    }

    /// The identity self-map (with `Φ = id`).
    pub fn identity(base: ChainComplex) -> Self {
        let phi = AutomorphismSpec::identity(base.group().rank());
        let maps = base.ranks().iter().map(|&r| RingMatrix::identity(r)).collect();
        MappingTorusSpec::new(base, phi, maps).expect("identity mapping torus")
    }

    /// Checks `∂_n f_n = f_{n−1} Φ(∂_n)` at every level.
    pub fn check_chain_map(&self, t: &QuotientTower) -> Result<()> {
        let g = self.base.group();
        self.automorphism.validate_on_tower(g, t)?;
        for n in 1..=self.base.top_degree() {
            let d = self.base.boundary(n);
            let lhs = d.try_mul(&self.chain_map[n])?;
            let rhs = self.chain_map[n - 1].try_mul(&self.automorphism.apply_matrix(&d))?;
            let diff = lhs.try_sub(&rhs)?;
            for (li, level) in t.levels().iter().enumerate() {
                if evaluate_matrix(&diff, level)?.matrix.max_abs() != 0 {
                    return Err(Error::ChainMap {
                        level: li,
                        degree: n,
                    });
                }
            }
        }
        Ok(())
    }

    /// JSON form: `{"complex": {...}, "automorphism": {"images": {...}},
    /// "chain_map": [{"degree", "row", "col", "entry"}, ...]}`. A missing
    /// `chain_map` means the identity in every degree.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: MappingTorusFile = serde_json::from_str(text)?;
        let base = file.complex.into_complex()?;
        let g = base.group().clone();
        let automorphism = match file.automorphism {
            Some(v) => AutomorphismSpec::from_json_value(v, &g)?,
            None => AutomorphismSpec::identity(g.rank()),
        };
        let chain_map = match file.chain_map {
            None => base.ranks().iter().map(|&r| RingMatrix::identity(r)).collect(),
            Some(entries) => {
                let mut maps: Vec<RingMatrix> =
                    base.ranks().iter().map(|&r| RingMatrix::zero(r, r)).collect();
                for e in entries {
                    let m = maps.get_mut(e.degree).ok_or_else(|| {
                        Error::Shape(format!("chain map entry in degree {}", e.degree))
                    })?;
                    if e.row >= m.rows() || e.col >= m.cols() {
                        return Err(Error::Shape(format!(
                            "chain map entry ({}, {}) outside f_{}",
                            e.row, e.col, e.degree
                        )));
                    }
                    let x = RingElement::parse(&e.entry, g.generators())?;
                    m.add_to(e.row, e.col, &x);
                }
                maps
            }
        };
        MappingTorusSpec::new(base, automorphism, chain_map)
    }
}

#[derive(Deserialize, Serialize)]
struct MappingTorusFile {
    complex: ComplexFile,
    #[serde(default)]
    automorphism: Option<serde_json::Value>,
    #[serde(default)]
    chain_map: Option<Vec<EntryFile>>,
}

/// Builds the mapping-torus complex over `G ⋊_Φ ℤ`, after checking the
/// chain-map condition on `tower`.
pub fn mapping_torus(
    spec: &MappingTorusSpec,
    tower: &QuotientTower,
) -> Result<(ExtendedGroup, ChainComplex)> {
    spec.check_chain_map(tower)?;
    Ok(mapping_torus_unchecked(spec))
}

pub(crate) fn mapping_torus_unchecked(spec: &MappingTorusSpec) -> (ExtendedGroup, ChainComplex) {
    let base = &spec.base;
    let ext = ExtendedGroup::new(base.group(), &spec.automorphism);
    let t = Word::generator(ext.stable_letter);
    let top = base.top_degree() + 1;
    let r = |n: isize| -> usize {
        if n < 0 {
            0
        } else {
            base.rank(n as usize)
        }
    };
    let ranks: Vec<usize> = (0..=top as isize).map(|n| r(n) + r(n - 1)).collect();
    let mut boundaries = Vec::with_capacity(top);
    for n in 1..=top {
        let mut b = RingMatrix::zero(ranks[n - 1], ranks[n]);
        let (rn, rn1) = (r(n as isize), r(n as isize - 1));
        b.insert_block(0, 0, &base.boundary(n));
        let sign = if n % 2 == 0 { 1 } else { -1 };
        let ft = spec.chain_map[n - 1].map_entries(|e| e.right_mul_word(&t));
        let cone = RingMatrix::identity(rn1)
            .try_sub(&ft)
            .expect("square blocks")
            .scale(sign);
        b.insert_block(0, rn, &cone);
        if n >= 2 {
            b.insert_block(rn1, rn, &base.boundary(n - 1));
        }
        boundaries.push(b);
    }
    let complex = ChainComplex::new(ext.presentation.clone(), ranks, boundaries, None)
        .expect("mapping torus shapes are consistent");
    (ext, complex)
}

/// Finite quotients of `G ⋊_Φ ℤ`: level `Q` becomes `Q ⋊ ℤ/M` with
/// `M = m · ord(Φ_Q)`, acting on `Q × ℤ/M` (point `(q, j)` is `j·|Q| + q`).
pub fn extend_tower(
    g: &GroupPresentation,
    t: &QuotientTower,
    phi: &AutomorphismSpec,
    m: usize,
) -> Result<QuotientTower> {
    if m == 0 {
        return Err(Error::Invalid("t-order multiplier must be at least 1".into()));
    }
    let induced = phi.validate_on_tower(g, t)?;
    let levels = t
        .levels()
        .iter()
        .zip(induced)
        .map(|(level, la)| {
            let d = level.degree();
            let big_m = m * la.order as usize;
            let n = d * big_m;
            let mut images = Vec::with_capacity(level.generator_count() + 1);
            for s in level.images() {
                let img: Vec<u32> = (0..n)
                    .map(|x| {
                        let (j, q) = (x / d, x % d);
                        (j * d + s.apply(q)) as u32
                    })
                    .collect();
                images.push(Permutation::from_images(img)?);
            }
            let tp: Vec<u32> = (0..n)
                .map(|x| {
                    let (j, q) = (x / d, x % d);
                    (((j + 1) % big_m) * d + la.point_map.apply(q)) as u32
                })
                .collect();
            images.push(Permutation::from_images(tp)?);
            QuotientLevel::new(level.label(), n, images)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(QuotientTower::with_derived_maps(levels))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::complex::validate_complex;
    use crate::group::validate_tower;

    fn klein_spec() -> MappingTorusSpec {
        let base = ChainComplex::circle();
        let g = base.group().clone();
        let phi = AutomorphismSpec::from_strings(&g, &[("a", "A")]).unwrap();
        let f0 = RingMatrix::identity(1);
        let f1 = RingMatrix::from_rows(vec![vec![RingElement::parse("-A", g.generators()).unwrap()]]);
        MappingTorusSpec::new(base, phi, vec![f0, f1]).unwrap()
    }

    #[test]
    fn mapping_torus_of_a_point_is_the_circle() {
        let spec = MappingTorusSpec::identity(ChainComplex::point());
        let tower = QuotientTower::new(vec![QuotientLevel::grid(&[], 1).unwrap()], None).unwrap();
        let (ext, c) = mapping_torus(&spec, &tower).unwrap();
        assert_eq!(ext.presentation.generators(), &["t".to_string()]);
        assert_eq!(c.ranks(), &[1, 1]);
        let expected = RingElement::parse("t - 1", ext.presentation.generators()).unwrap();
        assert_eq!(c.boundary(1).entry(0, 0), expected);
    }

    #[test]
    fn mapping_torus_of_circle_identity_is_a_torus() {
        let spec = MappingTorusSpec::identity(ChainComplex::circle());
        let tower = QuotientTower::cyclic(&[2, 4]).unwrap();
        let (ext, c) = mapping_torus(&spec, &tower).unwrap();
        assert_eq!(c.ranks(), &[1, 2, 1]);
        let et = extend_tower(c_group(&spec), &tower, &spec.automorphism, 3).unwrap();
        assert!(validate_tower(&ext.presentation, &et).pass);
        assert!(validate_complex(&c, &et).unwrap().pass);
    }

    fn c_group(spec: &MappingTorusSpec) -> &GroupPresentation {
        spec.base.group()
    }

    #[test]
    fn klein_bottle_complex() {
        let spec = klein_spec();
        let tower = QuotientTower::cyclic(&[3, 5, 8]).unwrap();
        let (ext, c) = mapping_torus(&spec, &tower).unwrap();
        assert_eq!(ext.presentation.to_string(), "gens a t; rels t a T a;");
        let et = extend_tower(spec.base.group(), &tower, &spec.automorphism, 1).unwrap();
        assert!(validate_tower(&ext.presentation, &et).pass);
        assert!(validate_complex(&c, &et).unwrap().pass);
    }

    #[test]
    fn wrong_twist_is_rejected() {
        let mut spec = klein_spec();
        spec.chain_map[1] = RingMatrix::identity(1);
        let tower = QuotientTower::cyclic(&[3, 5]).unwrap();
        assert!(matches!(
            mapping_torus(&spec, &tower),
            Err(Error::ChainMap { level: 0, degree: 1 })
        ));
    }

    #[test]
    fn extend_identity_gives_product() {
        let g = GroupPresentation::parse("gens a; rels ;").unwrap();
        let t = QuotientTower::cyclic(&[4]).unwrap();
        let et = extend_tower(&g, &t, &AutomorphismSpec::identity(1), 3).unwrap();
        let level = &et.levels()[0];
        assert_eq!(level.degree(), 12);
        assert!(level.is_abelian());
        assert!(level.is_regular());
    }

    #[test]
    fn extend_inversion_gives_dihedral_of_order_ten() {
        let g = GroupPresentation::parse("gens a; rels ;").unwrap();
        let phi = AutomorphismSpec::from_strings(&g, &[("a", "A")]).unwrap();
        let t = QuotientTower::cyclic(&[5]).unwrap();
        let et = extend_tower(&g, &t, &phi, 1).unwrap();
        let level = &et.levels()[0];
        assert_eq!(level.degree(), 10);
        assert!(level.is_regular());
        // Dihedral relations: a⁵ = t² = (t a)² = 1 and t a t⁻¹ = a⁻¹.
        let ext = ExtendedGroup::new(&g, &phi);
        let check = |s: &str| level.word_permutation(&ext.presentation.word(s).unwrap()).unwrap().is_identity();
        assert!(check("a^5"));
        assert!(check("t^2"));
        assert!(check("(t a)^2"));
        assert!(!check("a"));
        assert!(!check("t"));
        assert_eq!(level.group_order(1000), Some(10));
    }

    #[test]
    fn extend_shear_gives_order_27() {
        let g = GroupPresentation::parse("gens a b; rels a b A B;").unwrap();
        let phi = AutomorphismSpec::from_strings(&g, &[("a", "a"), ("b", "a b")]).unwrap();
        let t = QuotientTower::grid(2, &[3]).unwrap();
        let et = extend_tower(&g, &t, &phi, 1).unwrap();
        let level = &et.levels()[0];
        assert_eq!(level.degree(), 27);
        assert!(!level.is_abelian());
        assert!(level.is_regular());
        let ext = ExtendedGroup::new(&g, &phi);
        assert!(validate_tower(&ext.presentation, &et).pass);
    }
}
