//! Coefficient rings for the symbol algebra.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;
use std::fmt::{self, Debug};

/// A commutative ring containing the rationals.
pub trait Coefficient: Clone + Debug + PartialEq + Send + Sync + 'static {
    fn zero() -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;
    fn is_zero(&self) -> bool;
    fn add_ref(&self, other: &Self) -> Self;
    fn mul_ref(&self, other: &Self) -> Self;
    fn scale_ratio(&self, num: i64, den: i64) -> Self;

    fn one() -> Self {
        Self::from_ratio(1, 1)
    }

    fn neg_ref(&self) -> Self {
        self.scale_ratio(-1, 1)
    }

    fn sub_ref(&self, other: &Self) -> Self {
        self.add_ref(&other.neg_ref())
    }

    /// Numeric value when the coefficient is a plain number.
    fn to_f64(&self) -> Option<f64>;
}

impl Coefficient for f64 {
    fn zero() -> Self {
        0.0
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn add_ref(&self, other: &Self) -> Self {
        self + other
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn scale_ratio(&self, num: i64, den: i64) -> Self {
        self * num as f64 / den as f64
    }
    fn to_f64(&self) -> Option<f64> {
        Some(*self)
    }
}

impl Coefficient for f32 {
    fn zero() -> Self {
        0.0
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        (num as f64 / den as f64) as f32
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn add_ref(&self, other: &Self) -> Self {
        self + other
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn scale_ratio(&self, num: i64, den: i64) -> Self {
        (*self as f64 * num as f64 / den as f64) as f32
    }
    fn to_f64(&self) -> Option<f64> {
        Some(*self as f64)
    }
}

impl Coefficient for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add_ref(&self, other: &Self) -> Self {
        self + other
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn scale_ratio(&self, num: i64, den: i64) -> Self {
        self * BigRational::new(BigInt::from(num), BigInt::from(den))
    }
    fn to_f64(&self) -> Option<f64> {
        Some(self.numer().to_f64()? / self.denom().to_f64()?)
    }
}

/// Polynomial with rational coefficients in named parameters.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct ParamPoly {
    /// exponent vector (sorted (variable, power) pairs) -> coefficient
    terms: BTreeMap<Vec<(String, u32)>, BigRational>,
}

impl ParamPoly {
    pub fn var(name: &str) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(vec![(name.to_string(), 1)], <BigRational as One>::one());
        ParamPoly { terms }
    }

    pub fn constant(c: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !Zero::is_zero(&c) {
            terms.insert(Vec::new(), c);
        }
        ParamPoly { terms }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<(String, u32)>, &BigRational)> {
        self.terms.iter()
    }

    /// Evaluates with the given variable values; unknown names count as 0.
    pub fn eval(&self, values: &dyn Fn(&str) -> f64) -> f64 {
        self.terms
            .iter()
            .map(|(mono, c)| {
                let coeff =
                    c.numer().to_f64().unwrap_or(f64::NAN) / c.denom().to_f64().unwrap_or(f64::NAN);
                mono.iter()
                    .fold(coeff, |acc, (v, p)| acc * values(v).powi(*p as i32))
            })
            .sum()
    }

    fn insert(&mut self, mono: Vec<(String, u32)>, c: BigRational) {
        let entry = self
            .terms
            .entry(mono.clone())
            .or_insert_with(<BigRational as Zero>::zero);
        *entry += c;
        if Zero::is_zero(entry) {
            self.terms.remove(&mono);
        }
    }
}

fn mono_mul(a: &[(String, u32)], b: &[(String, u32)]) -> Vec<(String, u32)> {
    let mut map: BTreeMap<String, u32> = BTreeMap::new();
    for (v, p) in a.iter().chain(b) {
        *map.entry(v.clone()).or_insert(0) += p;
    }
    map.into_iter().collect()
}

impl Coefficient for ParamPoly {
    fn zero() -> Self {
        ParamPoly::default()
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        ParamPoly::constant(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn add_ref(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert(m.clone(), c.clone());
        }
        out
    }
    fn mul_ref(&self, other: &Self) -> Self {
        let mut out = ParamPoly::default();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.insert(mono_mul(ma, mb), ca * cb);
            }
        }
        out
    }
    fn scale_ratio(&self, num: i64, den: i64) -> Self {
        if num == 0 {
            return ParamPoly::default();
        }
        let s = BigRational::new(BigInt::from(num), BigInt::from(den));
        ParamPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c * &s))
                .collect(),
        }
    }
    fn to_f64(&self) -> Option<f64> {
        match self.terms.len() {
            0 => Some(0.0),
            1 => {
                let (m, c) = self.terms.iter().next()?;
                m.is_empty().then(|| {
                    c.numer().to_f64().unwrap_or(f64::NAN) / c.denom().to_f64().unwrap_or(f64::NAN)
                })
            }
            _ => None,
        }
    }
}

impl fmt::Display for ParamPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (mono, c) in &self.terms {
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            let vars = mono
                .iter()
                .map(|(v, p)| {
                    if *p == 1 {
                        v.clone()
                    } else {
                        format!("{v}^{p}")
                    }
                })
                .collect::<Vec<_>>()
                .join("*");
            if vars.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                f.write_str(&vars)?;
            } else {
                write!(f, "{mag}*{vars}")?;
            }
        }
        Ok(())
    }
}

impl Debug for ParamPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
