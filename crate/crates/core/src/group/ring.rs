use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::group::parse::parse_ring_terms;
use crate::group::word::Word;

/// An element of the integral group ring: a finite sum `Σ c_w · w` with
/// nonzero integer coefficients over freely reduced words.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RingElement {
    terms: BTreeMap<Word, i64>,
}

impl RingElement {
    pub fn zero() -> Self {
        RingElement::default()
    }

    pub fn one() -> Self {
        RingElement::monomial(Word::identity(), 1)
    }

    pub fn monomial(w: Word, c: i64) -> Self {
        let mut r = RingElement::zero();
        r.add_term(w, c);
        r
    }

    pub fn from_terms<I: IntoIterator<Item = (Word, i64)>>(terms: I) -> Self {
        let mut r = RingElement::zero();
        for (w, c) in terms {
            r.add_term(w, c);
        }
        r
    }

    /// Parses a literal like `2 - a - A` or `3*g + 2 H^2`.
    pub fn parse(src: &str, generators: &[String]) -> Result<Self> {
        Ok(RingElement::from_terms(parse_ring_terms(src, generators)?))
    }

    pub fn add_term(&mut self, w: Word, c: i64) {
        if c == 0 {
            return;
        }
        let entry = self.terms.entry(w);
        match entry {
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if *o.get() == 0 {
                    o.remove();
                }
            }
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, i64)> {
        self.terms.iter().map(|(w, &c)| (w, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, w: &Word) -> i64 {
        self.terms.get(w).copied().unwrap_or(0)
    }

    /// Sum of absolute coefficients.
    pub fn l1_norm(&self) -> u64 {
        self.terms.values().map(|c| c.unsigned_abs()).sum()
    }

    /// The involution `Σ c_w w ↦ Σ c_w w⁻¹`.
    pub fn star(&self) -> Self {
        RingElement::from_terms(self.terms.iter().map(|(w, &c)| (w.inverse(), c)))
    }

    pub fn scale(&self, k: i64) -> Self {
        RingElement::from_terms(self.terms.iter().map(|(w, &c)| (w.clone(), c * k)))
    }

    /// Rewrites every word through `f` (which must produce reduced words).
    pub fn map_words(&self, mut f: impl FnMut(&Word) -> Word) -> Self {
        RingElement::from_terms(self.terms.iter().map(|(w, &c)| (f(w), c)))
    }

    /// Right-multiplies every word by `w`.
    pub fn right_mul_word(&self, w: &Word) -> Self {
        self.map_words(|x| x.mul(w))
    }

    pub fn max_generator(&self) -> Option<usize> {
        self.terms.keys().filter_map(|w| w.max_generator()).max()
    }

    pub fn display<'a>(&'a self, names: &'a [String]) -> RingDisplay<'a> {
        RingDisplay { elem: self, names }
    }
}

pub struct RingDisplay<'a> {
    elem: &'a RingElement,
    names: &'a [String],
}

impl fmt::Display for RingDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.elem.is_zero() {
            return write!(f, "0");
        }
        for (i, (w, c)) in self.elem.terms().enumerate() {
            let (sign, mag) = if c < 0 { ("-", -c) } else { ("+", c) };
            if i == 0 {
                if c < 0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            if w.is_identity() {
                write!(f, "{mag}")?;
            } else if mag == 1 {
                write!(f, "{}", w.display(self.names))?;
            } else {
                write!(f, "{mag} {}", w.display(self.names))?;
            }
        }
        Ok(())
    }
}

impl Add for &RingElement {
    type Output = RingElement;
    fn add(self, rhs: &RingElement) -> RingElement {
        let mut out = self.clone();
        for (w, c) in rhs.terms() {
            out.add_term(w.clone(), c);
        }
        out
    }
}

impl Sub for &RingElement {
    type Output = RingElement;
    fn sub(self, rhs: &RingElement) -> RingElement {
        let mut out = self.clone();
        for (w, c) in rhs.terms() {
            out.add_term(w.clone(), -c);
        }
        out
    }
}

impl Neg for &RingElement {
    type Output = RingElement;
    fn neg(self) -> RingElement {
        self.scale(-1)
    }
}

/// Convolution product; concatenated words are freely reduced.
impl Mul for &RingElement {
    type Output = RingElement;
    fn mul(self, rhs: &RingElement) -> RingElement {
        let mut out = RingElement::zero();
        for (u, a) in self.terms() {
            for (v, b) in rhs.terms() {
                out.add_term(u.mul(v), a * b);
            }
        }
        out
    }
}

/// Sparse matrix over the integral group ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RingMatrix {
    rows: usize,
    cols: usize,
    entries: BTreeMap<(usize, usize), RingElement>,
}

impl RingMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        RingMatrix {
            rows,
            cols,
            entries: BTreeMap::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = RingMatrix::zero(n, n);
        for i in 0..n {
            m.entries.insert((i, i), RingElement::one());
        }
        m
    }

    pub fn from_entries<I>(rows: usize, cols: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = ((usize, usize), RingElement)>,
    {
        let mut m = RingMatrix::zero(rows, cols);
        for ((i, j), e) in entries {
            if i >= rows || j >= cols {
                return Err(Error::Shape(format!(
                    "entry ({i}, {j}) outside a {rows}×{cols} matrix"
                )));
            }
            m.add_to(i, j, &e);
        }
        Ok(m)
    }

    /// Convenience constructor from a dense row-major grid of elements.
    pub fn from_rows(rows: Vec<Vec<RingElement>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut m = RingMatrix::zero(r, c);
        for (i, row) in rows.into_iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, e) in row.into_iter().enumerate() {
                m.set(i, j, e);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Option<&RingElement> {
        self.entries.get(&(i, j))
    }

    pub fn entry(&self, i: usize, j: usize) -> RingElement {
        self.get(i, j).cloned().unwrap_or_default()
    }

    pub fn set(&mut self, i: usize, j: usize, e: RingElement) {
        assert!(i < self.rows && j < self.cols, "index out of bounds");
        if e.is_zero() {
            self.entries.remove(&(i, j));
        } else {
            self.entries.insert((i, j), e);
        }
    }

    pub fn add_to(&mut self, i: usize, j: usize, e: &RingElement) {
        let sum = &self.entry(i, j) + e;
        self.set(i, j, sum);
    }

    pub fn entries(&self) -> impl Iterator<Item = ((usize, usize), &RingElement)> {
        self.entries.iter().map(|(&k, v)| (k, v))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn max_generator(&self) -> Option<usize> {
        self.entries.values().filter_map(|e| e.max_generator()).max()
    }

    /// Conjugate transpose: `(A*)_{ij} = star(A_{ji})`.
    pub fn star(&self) -> Self {
        RingMatrix {
            rows: self.cols,
            cols: self.rows,
            entries: self
                .entries
                .iter()
                .map(|(&(i, j), e)| ((j, i), e.star()))
                .collect(),
        }
    }

    pub fn map_entries(&self, mut f: impl FnMut(&RingElement) -> RingElement) -> Self {
        let mut m = RingMatrix::zero(self.rows, self.cols);
        for (&(i, j), e) in &self.entries {
            m.set(i, j, f(e));
        }
        m
    }

    pub fn scale(&self, k: i64) -> Self {
        self.map_entries(|e| e.scale(k))
    }

    pub fn try_add(&self, other: &RingMatrix) -> Result<RingMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Shape(format!(
                "cannot add {}×{} and {}×{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = self.clone();
        for (&(i, j), e) in &other.entries {
            out.add_to(i, j, e);
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &RingMatrix) -> Result<RingMatrix> {
        self.try_add(&other.scale(-1))
    }

    pub fn try_mul(&self, other: &RingMatrix) -> Result<RingMatrix> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}×{} by {}×{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut by_row: BTreeMap<usize, Vec<(usize, &RingElement)>> = BTreeMap::new();
        for (&(k, j), e) in &other.entries {
            by_row.entry(k).or_default().push((j, e));
        }
        let mut out = RingMatrix::zero(self.rows, other.cols);
        for (&(i, k), a) in &self.entries {
            if let Some(row) = by_row.get(&k) {
                for &(j, b) in row {
                    out.add_to(i, j, &(a * b));
                }
            }
        }
        Ok(out)
    }

    /// Places `block` with its top-left corner at `(r0, c0)`.
    pub fn insert_block(&mut self, r0: usize, c0: usize, block: &RingMatrix) {
        assert!(r0 + block.rows <= self.rows && c0 + block.cols <= self.cols);
        for (&(i, j), e) in &block.entries {
            self.add_to(r0 + i, c0 + j, e);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn circle_laplacian_by_convolution() {
        let g = names(&["t"]);
        let a = RingElement::parse("t - 1", &g).unwrap();
        let b = RingElement::parse("T - 1", &g).unwrap();
        let expected = RingElement::parse("2 - t - T", &g).unwrap();
        assert_eq!(&a * &b, expected);
    }

    #[test]
    fn star_inverts_words() {
        let g = names(&["g", "h"]);
        let x = RingElement::parse("3 g + 2 H", &g).unwrap();
        assert_eq!(x.star(), RingElement::parse("3 G + 2 h", &g).unwrap());
    }

    #[test]
    fn unit_law() {
        let g = names(&["a", "b"]);
        let x = RingElement::parse("a b - 4 B^2 + 7", &g).unwrap();
        assert_eq!(&RingElement::one() * &x, x);
        assert_eq!(&x * &RingElement::one(), x);
    }

    #[test]
    fn display_parses_back() {
        let g = names(&["a", "b"]);
        let x = RingElement::parse("-2 a b^2 + 3 - B", &g).unwrap();
        let again = RingElement::parse(&x.display(&g).to_string(), &g).unwrap();
        assert_eq!(x, again);
    }

    #[test]
    fn matrix_shapes_checked() {
        let a = RingMatrix::zero(2, 3);
        let b = RingMatrix::zero(2, 3);
        assert!(a.try_mul(&b).is_err());
        assert!(RingMatrix::from_entries(1, 1, [((1, 0), RingElement::one())]).is_err());
    }

    #[test]
    fn star_of_product_reverses() {
        let g = names(&["a", "b"]);
        let p = |s: &str| RingElement::parse(s, &g).unwrap();
        let a = RingMatrix::from_rows(vec![vec![p("a - 1"), p("b")], vec![p("2"), p("a B")]]);
        let b = RingMatrix::from_rows(vec![vec![p("b + 1")], vec![p("A - 3 b")]]);
        let lhs = a.try_mul(&b).unwrap().star();
        let rhs = b.star().try_mul(&a.star()).unwrap();
        assert_eq!(lhs, rhs);
    }
}
