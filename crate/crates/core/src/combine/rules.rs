//! The combination rules for L²-torsion, one function per rule.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::combine::value::{Quantity, TorsionValue};
use crate::error::{Error, Result};
use crate::provenance::Provenance;

fn weakest<'a>(values: impl IntoIterator<Item = &'a TorsionValue>, start: Provenance) -> Provenance {
    values.into_iter().fold(start, |p, v| p.join(v.provenance))
}

/// `Σ (−1)^dim · ρ(stabilizer)` over the equivariant cells.
pub fn cell_sum(cells: &[(usize, TorsionValue)]) -> TorsionValue {
    let mut q = Quantity::zero();
    for (dim, v) in cells {
        q = if dim % 2 == 0 {
            q.add(&v.quantity)
        } else {
            q.sub(&v.quantity)
        };
    }
    TorsionValue::new(q, weakest(cells.iter().map(|(_, v)| v), Provenance::ClosedForm))
}

/// `Σ vertices − Σ edges`.
pub fn graph_of_groups(vertices: &[TorsionValue], edges: &[TorsionValue]) -> TorsionValue {
    let cells: Vec<(usize, TorsionValue)> = vertices
        .iter()
        .map(|v| (0, v.clone()))
        .chain(edges.iter().map(|e| (1, e.clone())))
        .collect();
    cell_sum(&cells)
}

/// `ρ(G₁ ∗_{G₀} G₂) = ρ(G₁) + ρ(G₂) − ρ(G₀)`.
pub fn amalgam(g1: &TorsionValue, g2: &TorsionValue, g0: &TorsionValue) -> TorsionValue {
    graph_of_groups(&[g1.clone(), g2.clone()], std::slice::from_ref(g0))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scaling {
    /// Product with a factor of L²-Euler characteristic `χ`.
    Product(#[serde(serialize_with = "ser_rational")] BigRational),
    /// Passage to a subgroup of the given index.
    Restriction(u64),
    /// Quotient by a finite normal subgroup of the given order.
    FiniteQuotient(u64),
    /// `n`-th power of an automorphism.
    Power(u64),
}

fn ser_rational<S: serde::Serializer>(q: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&crate::combine::value::rational_string(q))
}

/// `χ·v`, `index·v`, `v/k` or `n·v`.
pub fn scale(mode: &Scaling, v: &TorsionValue) -> Result<TorsionValue> {
    let positive = |n: u64, what: &str| {
        if n == 0 {
            Err(Error::Invalid(format!("{what} must be positive")))
        } else {
            Ok(n)
        }
    };
    let q = match mode {
        Scaling::Product(chi) => v.quantity.scale(chi),
        Scaling::Restriction(n) => v.quantity.scale_int(positive(*n, "index")?),
        Scaling::FiniteQuotient(k) => v.quantity.div_int(positive(*k, "finite quotient order")?),
        Scaling::Power(n) => v.quantity.scale_int(positive(*n, "power")?),
    };
    Ok(TorsionValue::new(q, v.provenance))
}

/// One equivariant cell with its stabilizer order; `None` marks an infinite
/// stabilizer.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrbitCell {
    pub dim: usize,
    pub order: Option<u64>,
}

/// `Σ_c (−1)^dim / |stabilizer|`.
pub fn orbifold_euler(cells: &[OrbitCell]) -> Result<BigRational> {
    let mut chi = BigRational::zero();
    for (i, c) in cells.iter().enumerate() {
        let order = match c.order {
            Some(0) => {
                return Err(Error::Invalid(format!("cell {i}: stabilizer order must be at least 1")))
            }
            Some(o) => o,
            None => {
                return Err(Error::Invalid(format!(
                    "cell {i}: infinite stabilizer in an orbifold Euler characteristic"
                )))
            }
        };
        let term = BigRational::new(BigInt::from(1), BigInt::from(order));
        if c.dim % 2 == 0 {
            chi += term;
        } else {
            chi -= term;
        }
    }
    Ok(chi)
}

/// `−(1/6π) · Σ vol(M_i)` over the hyperbolic pieces of the mapping torus
/// of a surface automorphism.
pub fn surface_auto(volumes: &[f64]) -> Result<TorsionValue> {
    let mut total = 0.0;
    for (i, &v) in volumes.iter().enumerate() {
        if !(v >= 0.0 && v.is_finite()) {
            return Err(Error::Invalid(format!("volume {i} is {v}; volumes must be nonnegative")));
        }
        total += v;
    }
    Ok(TorsionValue::new(Quantity::volume(total), Provenance::ClosedForm))
}

/// `Σ` over flexible JSJ vertices; rigid and polycyclic vertices contribute
/// nothing and are not inputs.
pub fn jsj_auto(flexible: &[TorsionValue]) -> TorsionValue {
    let cells: Vec<(usize, TorsionValue)> = flexible.iter().map(|v| (0, v.clone())).collect();
    cell_sum(&cells)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn a(n: i64) -> TorsionValue {
        TorsionValue::asserted_int(n)
    }

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn single_orbit() {
        let v = cell_sum(&[(0, TorsionValue::asserted(q(-1, 2)))]);
        assert_eq!(v.exact(), Some(&q(-1, 2)));
    }

    #[test]
    fn amalgam_formula() {
        let v = cell_sum(&[(0, a(-1)), (0, a(-2)), (1, a(0))]);
        assert_eq!(v.exact(), Some(&q(-3, 1)));
        assert_eq!(amalgam(&a(-1), &a(-2), &a(0)), v);
        assert_eq!(graph_of_groups(&[a(-1), a(-2)], &[a(0)]), v);
    }

    #[test]
    fn graph_of_groups_cases() {
        assert_eq!(graph_of_groups(&[a(-7)], &[]).exact(), Some(&q(-7, 1)));
        assert_eq!(graph_of_groups(&[a(0)], &[a(0)]).exact(), Some(&q(0, 1)));
    }

    #[test]
    fn graph_manifold_sum() {
        let (v1, v2) = (TorsionValue::asserted(q(-3, 7)), TorsionValue::asserted(q(-5, 11)));
        let v = cell_sum(&[(0, v1.clone()), (0, v2.clone()), (0, a(0)), (1, a(0)), (1, a(0))]);
        assert_eq!(v.exact(), Some(&(q(-3, 7) + q(-5, 11))));
    }

    #[test]
    fn scaling_examples() {
        let v = TorsionValue::computed(1.234, Provenance::Approximated);
        assert_eq!(scale(&Scaling::Product(q(0, 1)), &v).unwrap().value(), 0.0);
        assert_eq!(scale(&Scaling::Restriction(3), &a(-2)).unwrap().exact(), Some(&q(-6, 1)));
        let r = scale(
            &Scaling::FiniteQuotient(2),
            &TorsionValue::asserted(crate::combine::value::parse_rational("-4.0596").unwrap()),
        )
        .unwrap();
        assert_eq!(r.exact(), Some(&q(-20298, 10000)));
        assert!(scale(&Scaling::Power(0), &a(1)).is_err());
        assert!(scale(&Scaling::Restriction(0), &a(1)).is_err());
    }

    #[test]
    fn orbifold_examples() {
        let free = |d| OrbitCell { dim: d, order: Some(1) };
        let c = |d, o| OrbitCell { dim: d, order: Some(o) };
        assert_eq!(orbifold_euler(&[free(0)]).unwrap(), q(1, 1));
        assert_eq!(orbifold_euler(&[c(0, 2), c(0, 2), free(1)]).unwrap(), q(0, 1));
        assert_eq!(orbifold_euler(&[c(0, 2), c(0, 3), free(1)]).unwrap(), q(-1, 6));
        assert!(orbifold_euler(&[OrbitCell { dim: 0, order: None }]).is_err());
    }

    #[test]
    fn surface_closed_form() {
        assert_eq!(surface_auto(&[]).unwrap().value(), 0.0);
        let v = 2.0298832;
        let s = surface_auto(&[v]).unwrap();
        assert!((s.value() + 0.10768865).abs() < 1e-7);
        assert!(((s.value() - (-v / (6.0 * PI))) / s.value()).abs() < 1e-12);
        assert_eq!(s.provenance, Provenance::ClosedForm);
        assert!(surface_auto(&[-1.0]).is_err());
        let p = scale(&Scaling::Power(3), &s).unwrap();
        assert_eq!(p.value().to_bits(), surface_auto(&[3.0 * v]).unwrap().value().to_bits());
        assert!(surface_auto(&[v, 0.5]).unwrap().value() < s.value());
    }

    #[test]
    fn jsj_examples() {
        assert_eq!(jsj_auto(&[]).value(), 0.0);
        assert_eq!(jsj_auto(&[a(0)]).value(), 0.0);
        let (v1, v2) = (2.0298832, 0.9159655);
        let j = jsj_auto(&[surface_auto(&[v1]).unwrap(), surface_auto(&[v2]).unwrap()]);
        assert!((j.value() + (v1 + v2) / (6.0 * PI)).abs() < 1e-15);
        assert_eq!(j.provenance, Provenance::ClosedForm);
    }

    #[test]
    fn weakest_provenance_wins() {
        let v = cell_sum(&[
            (0, surface_auto(&[1.0]).unwrap()),
            (0, TorsionValue::computed(0.1, Provenance::Approximated)),
        ]);
        assert_eq!(v.provenance, Provenance::Approximated);
        let v = cell_sum(&[(0, surface_auto(&[1.0]).unwrap()), (0, a(1))]);
        assert_eq!(v.provenance, Provenance::Asserted);
    }
}
