use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::provenance::Provenance;

/// `exact − volume/(6π) + real`.
///
/// Hyperbolic volumes are kept apart from the real part so that scaling a
/// closed-form surface value repeats exactly the arithmetic of evaluating
/// the closed form on scaled volumes.
#[derive(Clone, Debug, PartialEq)]
pub struct Quantity {
    pub exact: BigRational,
    pub volume: f64,
    pub real: f64,
}

impl Quantity {
    pub fn zero() -> Self {
        Quantity {
            exact: BigRational::zero(),
            volume: 0.0,
            real: 0.0,
        }
    }

    pub fn rational(q: BigRational) -> Self {
        Quantity {
            exact: q,
            ..Quantity::zero()
        }
    }

    pub fn real(x: f64) -> Self {
        Quantity {
            real: x,
            ..Quantity::zero()
        }
    }

    pub fn volume(v: f64) -> Self {
        Quantity {
            volume: v,
            ..Quantity::zero()
        }
    }

    pub fn is_rational(&self) -> bool {
        self.volume == 0.0 && self.real == 0.0
    }

    pub fn to_f64(&self) -> f64 {
        let e = self.exact.to_f64().unwrap_or(f64::NAN);
        let mut v = e;
        if self.volume != 0.0 {
            v += -self.volume / (6.0 * std::f64::consts::PI);
        }
        v + self.real
    }

    pub fn add(&self, o: &Quantity) -> Quantity {
        Quantity {
            exact: &self.exact + &o.exact,
            volume: self.volume + o.volume,
            real: self.real + o.real,
        }
    }

    pub fn neg(&self) -> Quantity {
        Quantity {
            exact: -&self.exact,
            volume: -self.volume,
            real: -self.real,
        }
    }

    pub fn sub(&self, o: &Quantity) -> Quantity {
        self.add(&o.neg())
    }

    pub fn scale(&self, q: &BigRational) -> Quantity {
        let f = q.to_f64().unwrap_or(f64::NAN);
        Quantity {
            exact: &self.exact * q,
            volume: self.volume * f,
            real: self.real * f,
        }
    }

    pub fn scale_int(&self, n: u64) -> Quantity {
        Quantity {
            exact: &self.exact * BigInt::from(n),
            volume: self.volume * n as f64,
            real: self.real * n as f64,
        }
    }

    pub fn div_int(&self, n: u64) -> Quantity {
        Quantity {
            exact: &self.exact / BigInt::from(n),
            volume: self.volume / n as f64,
            real: self.real / n as f64,
        }
    }
}

/// Parses `p/q`, an integer, or a finite decimal (with optional exponent)
/// as an exact rational.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p = BigInt::from_str(p.trim()).ok()?;
        let q = BigInt::from_str(q.trim()).ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(BigRational::new(p, q));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let num = BigInt::from_str(&format!("{int}{frac}")).ok()?;
    let scale = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    let mut r = BigRational::from_integer(num);
    if scale >= 0 {
        r *= BigRational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        r /= BigRational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Some(if neg { -r } else { r })
}

/// Renders a rational as `p` or `p/q`.
pub fn rational_string(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// A value of ρ⁽²⁾ with the route that produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct TorsionValue {
    pub quantity: Quantity,
    pub provenance: Provenance,
    pub note: String,
}

impl TorsionValue {
    pub fn new(quantity: Quantity, provenance: Provenance) -> Self {
        TorsionValue {
            quantity,
            provenance,
            note: String::new(),
        }
    }

    /// An exact rational input; rational values are always asserted or
    /// closed-form.
    pub fn rational(q: BigRational, provenance: Provenance) -> Result<Self> {
        if !matches!(provenance, Provenance::Asserted | Provenance::ClosedForm) {
            return Err(Error::Invalid(format!(
                "a rational value cannot carry provenance {provenance}"
            )));
        }
        Ok(TorsionValue::new(Quantity::rational(q), provenance))
    }

    pub fn asserted(q: BigRational) -> Self {
        TorsionValue::new(Quantity::rational(q), Provenance::Asserted)
    }

    pub fn asserted_int(n: i64) -> Self {
        TorsionValue::asserted(BigRational::from_integer(n.into()))
    }

    /// A real number from a computation (engine or abelian oracle).
    pub fn computed(x: f64, provenance: Provenance) -> Self {
        TorsionValue::new(Quantity::real(x), provenance)
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }

    pub fn value(&self) -> f64 {
        self.quantity.to_f64()
    }

    pub fn exact(&self) -> Option<&BigRational> {
        self.quantity.is_rational().then_some(&self.quantity.exact)
    }
}

impl fmt::Display for TorsionValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.exact() {
            Some(q) => write!(f, "{} [{}]", rational_string(q), self.provenance),
            None => write!(f, "{:.12} [{}]", self.value(), self.provenance),
        }
    }
}

#[derive(Serialize)]
struct ValueJson {
    value: f64,
    exact: Option<String>,
    provenance: Provenance,
    #[serde(skip_serializing_if = "String::is_empty")]
    note: String,
}

impl Serialize for TorsionValue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ValueJson {
            value: self.value(),
            exact: self.exact().map(rational_string),
            provenance: self.provenance,
            note: self.note.clone(),
        }
        .serialize(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn decimal_parsing_is_exact() {
        assert_eq!(parse_rational("-4.0596"), Some(q(-40596, 10000)));
        assert_eq!(parse_rational("1/6"), Some(q(1, 6)));
        assert_eq!(parse_rational("-2"), Some(q(-2, 1)));
        assert_eq!(parse_rational("2.5e-1"), Some(q(1, 4)));
        assert_eq!(parse_rational(".5"), Some(q(1, 2)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("abc"), None);
        assert_eq!(parse_rational("."), None);
    }

    #[test]
    fn rational_values_need_exact_provenance() {
        assert!(TorsionValue::rational(q(1, 2), Provenance::Approximated).is_err());
        assert!(TorsionValue::rational(q(1, 2), Provenance::ClosedForm).is_ok());
    }

    #[test]
    fn display_forms() {
        assert_eq!(TorsionValue::asserted(q(-3, 1)).to_string(), "-3 [asserted]");
        assert_eq!(TorsionValue::asserted(q(1, 6)).to_string(), "1/6 [asserted]");
    }
}
