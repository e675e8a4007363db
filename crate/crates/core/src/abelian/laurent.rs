//! Laurent polynomials with rational coefficients, `ℚ[ℤⁿ]`.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::group::{GroupPresentation, RingElement, RingMatrix};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentPoly {
    nvars: usize,
    terms: BTreeMap<Vec<i64>, BigRational>,
}

impl LaurentPoly {
    pub fn zero(nvars: usize) -> Self {
        LaurentPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: BigRational) -> Self {
        Self::monomial(vec![0; nvars], c)
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, BigRational::one())
    }

    pub fn monomial(exponents: Vec<i64>, c: BigRational) -> Self {
        let mut p = LaurentPoly::zero(exponents.len());
        p.add_term(exponents, c);
        p
    }

    /// Builds from `(exponents, integer coefficient)` pairs.
    pub fn from_int_terms<I: IntoIterator<Item = (Vec<i64>, i64)>>(nvars: usize, terms: I) -> Self {
        let mut p = LaurentPoly::zero(nvars);
        for (e, c) in terms {
            p.add_term(e, BigRational::from_integer(BigInt::from(c)));
        }
        p
    }

    /// Image of a group-ring element of `ℤⁿ`, reading words through their
    /// exponent sums.
    pub fn from_ring_element(x: &RingElement, nvars: usize) -> Self {
        LaurentPoly::from_int_terms(nvars, x.terms().map(|(w, c)| (w.exponent_sums(nvars), c)))
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i64>, &BigRational)> {
        self.terms.iter()
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

    pub fn add_term(&mut self, e: Vec<i64>, c: BigRational) {
        assert_eq!(e.len(), self.nvars, "exponent vector length");
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// Lexicographically largest exponent and its coefficient.
    pub fn leading(&self) -> Option<(&Vec<i64>, &BigRational)> {
        self.terms.iter().next_back()
    }

    pub fn coefficient(&self, e: &[i64]) -> BigRational {
        self.terms.get(e).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn add(&self, other: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> LaurentPoly {
        LaurentPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &LaurentPoly) -> LaurentPoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &LaurentPoly) -> LaurentPoly {
        let mut acc: BTreeMap<Vec<i64>, BigRational> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Vec<i64> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                *acc.entry(e).or_insert_with(BigRational::zero) += ca * cb;
            }
        }
        acc.retain(|_, c| !c.is_zero());
        LaurentPoly {
            nvars: self.nvars,
            terms: acc,
        }
    }

    /// Exact quotient `self / d`; fails unless `d` divides `self`.
    pub fn div_exact(&self, d: &LaurentPoly) -> Result<LaurentPoly> {
        let (de, dc) = d
            .leading()
            .map(|(e, c)| (e.clone(), c.clone()))
            .ok_or_else(|| Error::Invalid("division by the zero polynomial".into()))?;
        let mut rem = self.clone();
        let mut q = LaurentPoly::zero(self.nvars);
        // Each step cancels the leading term of the remainder; an exact
        // quotient is recovered term by term in decreasing order.
        let budget = self.len() * d.len().max(1) + 16 * (self.len() + 1);
        for _ in 0..budget.max(1 << 16) {
            let Some((re, rc)) = rem.leading().map(|(e, c)| (e.clone(), c.clone())) else {
                return Ok(q);
            };
            let e: Vec<i64> = re.iter().zip(&de).map(|(a, b)| a - b).collect();
            let c = rc / &dc;
            let t = LaurentPoly::monomial(e, c);
            rem = rem.sub(&t.mul(d));
            q = q.add(&t);
        }
        Err(Error::Invalid("polynomial division is not exact".into()))
    }

    /// Value at a point of the torus given by per-variable angles.
    pub fn eval_angles(&self, theta: &[f64]) -> Complex64 {
        let mut z = Complex64::new(0.0, 0.0);
        for (e, c) in &self.terms {
            let phase: f64 = e.iter().zip(theta).map(|(&k, t)| k as f64 * t).sum();
            z += Complex64::from_polar(1.0, phase) * c.to_f64().unwrap_or(f64::NAN);
        }
        z
    }

    pub fn eval(&self, z: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (e, c) in &self.terms {
            let mut m = Complex64::new(c.to_f64().unwrap_or(f64::NAN), 0.0);
            for (&k, zi) in e.iter().zip(z) {
                m *= zi.powi(k as i32);
            }
            acc += m;
        }
        acc
    }

    /// Coefficient list of a one-variable polynomial multiplied by the
    /// smallest power of `x` making it a polynomial, lowest degree first.
    pub fn univariate_coefficients(&self) -> Option<(i64, Vec<f64>)> {
        if self.nvars != 1 || self.is_zero() {
            return None;
        }
        let lo = self.terms.keys().next().expect("nonzero")[0];
        let hi = self.terms.keys().next_back().expect("nonzero")[0];
        let mut v = vec![0.0; (hi - lo) as usize + 1];
        for (e, c) in &self.terms {
            v[(e[0] - lo) as usize] = c.to_f64().unwrap_or(f64::NAN);
        }
        Some((lo, v))
    }

    pub fn max_abs_coefficient(&self) -> BigRational {
        self.terms
            .values()
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(BigRational::zero)
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let names = ["x", "y", "z", "w"];
        let var = |i: usize| {
            names
                .get(i)
                .map_or_else(|| format!("x{}", i + 1), |s| s.to_string())
        };
        for (k, (e, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if k == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            let monomial: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &p)| p != 0)
                .map(|(i, &p)| if p == 1 { var(i) } else { format!("{}^{}", var(i), p) })
                .collect();
            if monomial.is_empty() {
                write!(f, "{a}")?;
            } else {
                if !a.is_one() {
                    write!(f, "{a}*")?;
                }
                f.write_str(&monomial.join("*"))?;
            }
        }
        Ok(())
    }
}

/// Determinant of a square matrix over `ℤ[ℤⁿ]` by fraction-free elimination
/// in the Laurent ring. The presentation must be free abelian.
pub fn laurent_det(m: &RingMatrix, g: &GroupPresentation) -> Result<LaurentPoly> {
    if !g.is_free_abelian() {
        return Err(Error::NotAbelian(
            "relators must be exactly the pairwise commutators of the generators".into(),
        ));
    }
    if m.rows() != m.cols() {
        return Err(Error::Shape(format!(
            "determinant of a {}×{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    let n = g.rank();
    let mut a: Vec<Vec<LaurentPoly>> = (0..m.rows())
        .map(|i| {
            (0..m.cols())
                .map(|j| LaurentPoly::from_ring_element(&m.entry(i, j), n))
                .collect()
        })
        .collect();
    bareiss(&mut a, n)
}

pub(crate) fn bareiss(a: &mut [Vec<LaurentPoly>], nvars: usize) -> Result<LaurentPoly> {
    let size = a.len();
    if size == 0 {
        return Ok(LaurentPoly::one(nvars));
    }
    let mut prev = LaurentPoly::one(nvars);
    let mut negate = false;
    for k in 0..size {
        // Prefer the sparsest nonzero pivot to limit intermediate growth.
        let Some(p) = (k..size)
            .filter(|&i| !a[i][k].is_zero())
            .min_by_key(|&i| a[i][k].len())
        else {
            return Ok(LaurentPoly::zero(nvars));
        };
        if p != k {
            a.swap(p, k);
            negate = !negate;
        }
        for i in k + 1..size {
            for j in k + 1..size {
                let num = a[k][k].mul(&a[i][j]).sub(&a[i][k].mul(&a[k][j]));
                a[i][j] = num.div_exact(&prev)?;
            }
            a[i][k] = LaurentPoly::zero(nvars);
        }
        prev = a[k][k].clone();
    }
    let det = a[size - 1][size - 1].clone();
    Ok(if negate { det.neg() } else { det })
}
