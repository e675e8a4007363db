use std::fmt;

use serde::{Deserialize, Serialize};

use crate::engine::evaluate::evaluate_matrix;
use crate::error::{Error, Result};
use crate::group::{GroupPresentation, QuotientTower, RingElement, RingMatrix};

/// A finite free chain complex over the integral group ring of `group`.
///
/// `boundaries[n − 1]` is `∂_n : C_n → C_{n−1}`, an `ranks[n−1] × ranks[n]`
/// matrix acting on column vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainComplex {
    group: GroupPresentation,
    ranks: Vec<usize>,
    boundaries: Vec<RingMatrix>,
    stabilizers: Option<Vec<Vec<u64>>>,
}

impl ChainComplex {
    pub fn new(
        group: GroupPresentation,
        ranks: Vec<usize>,
        boundaries: Vec<RingMatrix>,
        stabilizers: Option<Vec<Vec<u64>>>,
    ) -> Result<Self> {
        if ranks.is_empty() {
            return Err(Error::Shape("a complex needs at least degree 0".into()));
        }
        if boundaries.len() + 1 != ranks.len() {
            return Err(Error::Shape(format!(
                "{} boundary maps for {} degrees",
                boundaries.len(),
                ranks.len()
            )));
        }
        for (k, b) in boundaries.iter().enumerate() {
            let n = k + 1;
            if b.rows() != ranks[n - 1] || b.cols() != ranks[n] {
                return Err(Error::Shape(format!(
                    "∂_{n} is {}×{}, expected {}×{}",
                    b.rows(),
                    b.cols(),
                    ranks[n - 1],
                    ranks[n]
                )));
            }
            if let Some(g) = b.max_generator() {
                if g >= group.rank() {
                    return Err(Error::UndeclaredGenerator(format!("#{g} in ∂_{n}")));
                }
            }
        }
        if let Some(st) = &stabilizers {
            if st.len() != ranks.len() || st.iter().zip(&ranks).any(|(s, &r)| s.len() != r) {
                return Err(Error::Shape(
                    "stabilizer orders must list one entry per cell".into(),
                ));
            }
            if st.iter().flatten().any(|&o| o == 0) {
                return Err(Error::Invalid("stabilizer orders must be positive".into()));
            }
        }
        Ok(ChainComplex {
            group,
            ranks,
            boundaries,
            stabilizers,
        })
    }

    pub fn group(&self) -> &GroupPresentation {
        &self.group
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn rank(&self, n: usize) -> usize {
        self.ranks.get(n).copied().unwrap_or(0)
    }

    pub fn top_degree(&self) -> usize {
        self.ranks.len() - 1
    }

    pub fn stabilizers(&self) -> Option<&[Vec<u64>]> {
        self.stabilizers.as_deref()
    }

    pub fn is_free(&self) -> bool {
        self.stabilizers
            .as_ref()
            .is_none_or(|s| s.iter().flatten().all(|&o| o == 1))
    }

    /// `∂_n`, with the zero map of the right shape outside `1..=top`.
    pub fn boundary(&self, n: usize) -> RingMatrix {
        if n >= 1 && n <= self.boundaries.len() {
            self.boundaries[n - 1].clone()
        } else {
            RingMatrix::zero(if n == 0 { 0 } else { self.rank(n - 1) }, self.rank(n))
        }
    }

    pub fn boundaries(&self) -> &[RingMatrix] {
        &self.boundaries
    }

    /// `Δ_p = ∂_p* ∂_p + ∂_{p+1} ∂_{p+1}*`.
    pub fn laplacian(&self, p: usize) -> Result<RingMatrix> {
        if p > self.top_degree() {
            return Err(Error::Invalid(format!(
                "degree {p} above top degree {}",
                self.top_degree()
            )));
        }
        let down = self.boundary(p);
        let up = self.boundary(p + 1);
        let a = down.star().try_mul(&down)?;
        let b = up.try_mul(&up.star())?;
        a.try_add(&b)
    }

    /// Direct sum over the same group, degreewise block-diagonal.
    pub fn direct_sum(&self, other: &ChainComplex) -> Result<ChainComplex> {
        if self.group != other.group {
            return Err(Error::Invalid("direct sum needs a common group".into()));
        }
        let top = self.top_degree().max(other.top_degree());
        let ranks: Vec<usize> = (0..=top).map(|n| self.rank(n) + other.rank(n)).collect();
        let mut boundaries = Vec::new();
        for n in 1..=top {
            let mut b = RingMatrix::zero(ranks[n - 1], ranks[n]);
            b.insert_block(0, 0, &self.boundary(n));
            b.insert_block(self.rank(n - 1), self.rank(n), &other.boundary(n));
            boundaries.push(b);
        }
        ChainComplex::new(self.group.clone(), ranks, boundaries, None)
    }

    /// Point complex over the trivial group: one 0-cell.
    pub fn point() -> Self {
        ChainComplex::new(GroupPresentation::trivial(), vec![1], vec![], None)
            .expect("point complex")
    }

    /// One-dimensional complex `ℤG → ℤG`, `∂₁ = p`.
    pub fn one_cell(group: GroupPresentation, p: RingElement) -> Result<Self> {
        let b = RingMatrix::from_rows(vec![vec![p]]);
        ChainComplex::new(group, vec![1, 1], vec![b], None)
    }

    /// The universal cover of the circle over `ℤ = ⟨a⟩`: `∂₁ = a − 1`.
    pub fn circle() -> Self {
        let g = GroupPresentation::parse("gens a; rels ;").expect("static");
        let p = RingElement::parse("a - 1", g.generators()).expect("static");
        ChainComplex::one_cell(g, p).expect("circle complex")
    }

    /// The universal cover of the 2-torus over `ℤ² = ⟨a, b⟩`:
    /// `∂₁ = (a − 1, b − 1)`, `∂₂ = (−(b − 1), a − 1)ᵀ`.
    pub fn torus() -> Self {
        let g = GroupPresentation::parse("gens a b; rels a b A B;").expect("static");
        let e = |s: &str| RingElement::parse(s, g.generators()).expect("static");
        let d1 = RingMatrix::from_rows(vec![vec![e("a - 1"), e("b - 1")]]);
        let d2 = RingMatrix::from_rows(vec![vec![e("1 - b")], vec![e("a - 1")]]);
        ChainComplex::new(g, vec![1, 2, 1], vec![d1, d2], None).expect("torus complex")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ComplexFile = serde_json::from_str(text)?;
        file.into_complex()
    }

    pub fn from_json_value(v: serde_json::Value) -> Result<Self> {
        let file: ComplexFile = serde_json::from_value(v)?;
        file.into_complex()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("complex serialises")
    }

    pub(crate) fn to_file(&self) -> ComplexFile {
        let names = self.group.generators();
        let mut boundaries = Vec::new();
        for (k, b) in self.boundaries.iter().enumerate() {
            for ((row, col), e) in b.entries() {
                boundaries.push(EntryFile {
                    degree: k + 1,
                    row,
                    col,
                    entry: e.display(names).to_string(),
                });
            }
        }
        ComplexFile {
            group: self.group.to_string(),
            ranks: self.ranks.clone(),
            boundaries,
            stabilizers: self.stabilizers.clone(),
        }
    }
}

/// A sparse matrix entry in the file formats: `(degree, row, col, literal)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub(crate) struct EntryFile {
    pub degree: usize,
    pub row: usize,
    pub col: usize,
    pub entry: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub(crate) struct ComplexFile {
    pub group: String,
    pub ranks: Vec<usize>,
    #[serde(default)]
    pub boundaries: Vec<EntryFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stabilizers: Option<Vec<Vec<u64>>>,
}

impl ComplexFile {
    pub(crate) fn into_complex(self) -> Result<ChainComplex> {
        let group = GroupPresentation::parse(&self.group)?;
        if self.ranks.is_empty() {
            return Err(Error::Shape("a complex needs at least degree 0".into()));
        }
        let mut boundaries: Vec<RingMatrix> = (1..self.ranks.len())
            .map(|n| RingMatrix::zero(self.ranks[n - 1], self.ranks[n]))
            .collect();
        for e in self.boundaries {
            if e.degree == 0 || e.degree >= self.ranks.len() {
                return Err(Error::Shape(format!(
                    "boundary entry in degree {} outside 1..={}",
                    e.degree,
                    self.ranks.len() - 1
                )));
            }
            let m = &mut boundaries[e.degree - 1];
            if e.row >= m.rows() || e.col >= m.cols() {
                return Err(Error::Shape(format!(
                    "entry ({}, {}) outside ∂_{} of shape {}×{}",
                    e.row,
                    e.col,
                    e.degree,
                    m.rows(),
                    m.cols()
                )));
            }
            let x = RingElement::parse(&e.entry, group.generators())?;
            m.add_to(e.row, e.col, &x);
        }
        ChainComplex::new(group, self.ranks, boundaries, self.stabilizers)
    }
}

/// Outcome of [`validate_complex`] for one level and degree.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompositeCheck {
    pub level: usize,
    pub label: i64,
    /// The composite checked is `∂_{degree−1} ∘ ∂_degree`.
    pub degree: usize,
    pub max_abs_entry: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComplexReport {
    pub checks: Vec<CompositeCheck>,
    pub pass: bool,
}

impl ComplexReport {
    pub fn first_failure(&self) -> Option<&CompositeCheck> {
        self.checks.iter().find(|c| c.max_abs_entry != 0)
    }
}

impl fmt::Display for ComplexReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "level {} (label {}), degree {}: max |∂∂| = {}{}",
                c.level,
                c.label,
                c.degree,
                c.max_abs_entry,
                if c.max_abs_entry == 0 { "" } else { "  FAIL" }
            )?;
        }
        write!(f, "overall: {}", if self.pass { "pass" } else { "FAIL" })
    }
}

/// Checks `∂_{n−1} ∂_n = 0` exactly at every level of the tower.
pub fn validate_complex(c: &ChainComplex, t: &QuotientTower) -> Result<ComplexReport> {
    let composites: Vec<(usize, RingMatrix)> = (2..=c.top_degree())
        .map(|n| Ok((n, c.boundary(n - 1).try_mul(&c.boundary(n))?)))
        .collect::<Result<_>>()?;
    let mut checks = Vec::new();
    for (li, level) in t.levels().iter().enumerate() {
        for (n, comp) in &composites {
            let lm = evaluate_matrix(comp, level)?;
            checks.push(CompositeCheck {
                level: li,
                label: level.label(),
                degree: *n,
                max_abs_entry: lm.matrix.max_abs(),
            });
        }
    }
    let pass = checks.iter().all(|c| c.max_abs_entry == 0);
    Ok(ComplexReport { checks, pass })
}
