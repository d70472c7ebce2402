//! Exact arithmetic in ℚ(ω), ω a primitive cube root of unity.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// a + b·ω with ω² = −1 − ω.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CycloRational {
    pub a: BigRational,
    pub b: BigRational,
}

pub fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

impl CycloRational {
    pub fn new(a: BigRational, b: BigRational) -> Self {
        CycloRational { a, b }
    }

    pub fn int(n: i64) -> Self {
        CycloRational::new(rat(n, 1), BigRational::zero())
    }

    pub fn zero() -> Self {
        Self::int(0)
    }

    pub fn one() -> Self {
        Self::int(1)
    }

    pub fn omega() -> Self {
        CycloRational::new(BigRational::zero(), BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// ω^k for any integer k.
    pub fn omega_pow(k: i64) -> Self {
        match k.rem_euclid(3) {
            0 => Self::one(),
            1 => Self::omega(),
            _ => CycloRational::new(rat(-1, 1), rat(-1, 1)),
        }
    }

    /// Galois conjugate, ω ↦ ω².
    pub fn conj(&self) -> Self {
        CycloRational::new(&self.a - &self.b, -&self.b)
    }

    /// Field norm a² − ab + b².
    pub fn norm(&self) -> BigRational {
        &self.a * &self.a - &self.a * &self.b + &self.b * &self.b
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm();
        let c = self.conj();
        Some(CycloRational::new(c.a / &n, c.b / &n))
    }

    /// Complex value, for plotting.
    pub fn to_complex(&self) -> (f64, f64) {
        let a = self.a.to_f64().unwrap_or(f64::NAN);
        let b = self.b.to_f64().unwrap_or(f64::NAN);
        (a - 0.5 * b, b * 3f64.sqrt() / 2.0)
    }
}

impl<'a> Add for &'a CycloRational {
    type Output = CycloRational;
    fn add(self, o: Self) -> CycloRational {
        CycloRational::new(&self.a + &o.a, &self.b + &o.b)
    }
}

impl<'a> Sub for &'a CycloRational {
    type Output = CycloRational;
    fn sub(self, o: Self) -> CycloRational {
        CycloRational::new(&self.a - &o.a, &self.b - &o.b)
    }
}

impl<'a> Mul for &'a CycloRational {
    type Output = CycloRational;
    fn mul(self, o: Self) -> CycloRational {
        let bd = &self.b * &o.b;
        CycloRational::new(
            &self.a * &o.a - &bd,
            &self.a * &o.b + &self.b * &o.a - bd,
        )
    }
}

impl<'a> Div for &'a CycloRational {
    type Output = CycloRational;
    fn div(self, o: Self) -> CycloRational {
        self * &o.inv().expect("division by zero in Q(ω)")
    }
}

impl<'a> Neg for &'a CycloRational {
    type Output = CycloRational;
    fn neg(self) -> CycloRational {
        CycloRational::new(-&self.a, -&self.b)
    }
}

macro_rules! owned_ops {
    ($($tr:ident $f:ident),*) => {$(
        impl $tr for CycloRational {
            type Output = CycloRational;
            fn $f(self, o: Self) -> CycloRational {
                (&self).$f(&o)
            }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul, Div div);

impl Neg for CycloRational {
    type Output = CycloRational;
    fn neg(self) -> CycloRational {
        -&self
    }
}

impl fmt::Display for CycloRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.a.is_zero(), self.b.is_zero()) {
            (_, true) => write!(f, "{}", self.a),
            (true, false) => write!(f, "{}ω", self.b),
            (false, false) if self.b.is_negative() => write!(f, "{} - {}ω", self.a, -&self.b),
            _ => write!(f, "{} + {}ω", self.a, self.b),
        }
    }
}

/// Rational as a `[numerator, denominator]` pair in files.
#[derive(Serialize, Deserialize)]
struct Pair(i64, i64);

fn to_pair(r: &BigRational) -> Result<Pair, String> {
    match (r.numer().to_i64(), r.denom().to_i64()) {
        (Some(p), Some(q)) => Ok(Pair(p, q)),
        _ => Err(format!("{r} does not fit in 64-bit integers")),
    }
}

fn from_pair(p: Pair) -> Result<BigRational, String> {
    if p.1 == 0 {
        return Err("zero denominator".into());
    }
    Ok(rat(p.0, p.1))
}

#[derive(Serialize, Deserialize)]
struct CycloFile {
    a: Pair,
    #[serde(default = "zero_pair")]
    b: Pair,
}

fn zero_pair() -> Pair {
    Pair(0, 1)
}

impl Serialize for CycloRational {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let file = CycloFile {
            a: to_pair(&self.a).map_err(serde::ser::Error::custom)?,
            b: to_pair(&self.b).map_err(serde::ser::Error::custom)?,
        };
        file.serialize(s)
    }
}

impl<'de> Deserialize<'de> for CycloRational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let f = CycloFile::deserialize(d)?;
        Ok(CycloRational::new(
            from_pair(f.a).map_err(serde::de::Error::custom)?,
            from_pair(f.b).map_err(serde::de::Error::custom)?,
        ))
    }
}

/// Serde helpers for exact rationals as `[p, q]`.
pub mod rational_pair {
    use super::*;

    pub fn serialize<S: Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        to_pair(r).map_err(serde::ser::Error::custom)?.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        from_pair(Pair::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

/// Serde helper writing exact rationals as "p/q" strings.
pub mod rational_string {
    use super::*;

    pub fn serialize<S: Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&r.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn omega_is_a_cube_root_of_unity() {
        let w = CycloRational::omega();
        let w2 = &w * &w;
        assert_eq!(w2, CycloRational::omega_pow(2));
        assert_eq!(&w2 * &w, CycloRational::one());
        assert_eq!(&(&w2 + &w) + &CycloRational::one(), CycloRational::zero());
    }

    #[test]
    fn field_inverse() {
        let x = CycloRational::new(rat(3, 2), rat(-5, 7));
        assert_eq!(&x * &x.inv().unwrap(), CycloRational::one());
        assert!(CycloRational::zero().inv().is_none());
        assert_eq!(&x / &x, CycloRational::one());
    }

    #[test]
    fn file_round_trip() {
        let x = CycloRational::new(rat(1, 2), rat(-3, 1));
        let text = serde_json::to_string(&x).unwrap();
        assert_eq!(text, r#"{"a":[1,2],"b":[-3,1]}"#);
        let back: CycloRational = serde_json::from_str(&text).unwrap();
        assert_eq!(back, x);
        let plain: CycloRational = serde_json::from_str(r#"{"a":[4,2]}"#).unwrap();
        assert_eq!(plain, CycloRational::int(2));
    }

    #[test]
    fn complex_value_of_omega() {
        let (re, im) = CycloRational::omega().to_complex();
        assert!((re + 0.5).abs() < 1e-15);
        assert!((im - 3f64.sqrt() / 2.0).abs() < 1e-15);
    }
}
