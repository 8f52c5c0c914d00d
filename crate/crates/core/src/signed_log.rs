//! Overflow-safe storage for solutions that grow or decay like
//! `exp(±C n^{1-α/2})`.
//!
//! A value is kept as `mantissa * 2^exponent` with `|mantissa|` in `[1, 2)`.
//! The natural log of the magnitude is `ln|mantissa| + exponent ln 2`, so the
//! sign/log-magnitude view is exact up to one rounding in the mantissa, no
//! matter how large the magnitude gets.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Multiply `x` by `2^k` without intermediate overflow for moderate `k`.
#[inline]
pub fn ldexp(x: f64, k: i64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let mut x = x;
    let mut k = k;
    while k > 1000 {
        x *= pow2(1000);
        k -= 1000;
        if x.is_infinite() {
            return x;
        }
    }
    while k < -1000 {
        x *= pow2(-1000);
        k += 1000;
        if x == 0.0 {
            return x;
        }
    }
    x * pow2(k as i32)
}

#[inline]
fn pow2(k: i32) -> f64 {
    debug_assert!((-1022..=1023).contains(&k));
    f64::from_bits(((k + 1023) as u64) << 52)
}

/// Split a finite nonzero `x` into `(m, e)` with `x = m 2^e`, `|m|` in `[1, 2)`.
#[inline]
fn frexp(x: f64) -> (f64, i64) {
    debug_assert!(x.is_finite() && x != 0.0);
    let bits = x.to_bits();
    let raw = ((bits >> 52) & 0x7ff) as i64;
    if raw == 0 {
        // subnormal: renormalize first
        let (m, e) = frexp(x * pow2(600));
        return (m, e - 600);
    }
    let e = raw - 1023;
    let m = f64::from_bits((bits & !(0x7ffu64 << 52)) | (1023u64 << 52));
    (m, e)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignedLogValue {
    mantissa: f64,
    exponent: i64,
}

impl SignedLogValue {
    pub const ZERO: Self = Self {
        mantissa: 0.0,
        exponent: 0,
    };

    pub fn from_f64(x: f64) -> Self {
        Self::from_scaled(x, 0)
    }

    /// The value `x * 2^scale`.
    pub fn from_scaled(x: f64, scale: i64) -> Self {
        if x == 0.0 {
            return Self::ZERO;
        }
        assert!(x.is_finite(), "non-finite value in signed-log conversion");
        let (m, e) = frexp(x);
        Self {
            mantissa: m,
            exponent: e + scale,
        }
    }

    /// Build from an explicit sign and natural-log magnitude.
    pub fn from_sign_logmag(sign: i8, logmag: f64) -> Self {
        if sign == 0 || logmag == f64::NEG_INFINITY {
            return Self::ZERO;
        }
        let log2 = logmag / std::f64::consts::LN_2;
        let e = log2.floor();
        let frac = logmag - e * std::f64::consts::LN_2;
        let m = frac.exp();
        let v = Self::from_scaled(m, e as i64);
        if sign < 0 {
            -v
        } else {
            v
        }
    }

    pub fn sign(&self) -> i8 {
        if self.mantissa > 0.0 {
            1
        } else if self.mantissa < 0.0 {
            -1
        } else {
            0
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa == 0.0
    }

    /// Natural log of `|value|`; `-inf` for zero.
    pub fn logmag(&self) -> f64 {
        if self.is_zero() {
            f64::NEG_INFINITY
        } else {
            self.mantissa.abs().ln() + self.exponent as f64 * std::f64::consts::LN_2
        }
    }

    pub fn mantissa(&self) -> f64 {
        self.mantissa
    }

    pub fn exponent(&self) -> i64 {
        self.exponent
    }

    /// Plain `f64` value; may overflow to infinity or underflow to zero.
    pub fn to_f64(&self) -> f64 {
        ldexp(self.mantissa, self.exponent)
    }

    /// `value * 2^{-shift}` as a plain `f64`.
    pub fn scaled_down(&self, shift: i64) -> f64 {
        ldexp(self.mantissa, self.exponent - shift)
    }

    /// `self / other` as an `f64` (finite as long as the ratio is representable).
    pub fn ratio(&self, other: &Self) -> f64 {
        ldexp(
            self.mantissa / other.mantissa,
            self.exponent - other.exponent,
        )
    }

    pub fn mul_f64(&self, x: f64) -> Self {
        if self.is_zero() || x == 0.0 {
            return Self::ZERO;
        }
        Self::from_scaled(self.mantissa * x, self.exponent)
    }
}

impl std::ops::Neg for SignedLogValue {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            mantissa: -self.mantissa,
            exponent: self.exponent,
        }
    }
}

/// Largest binary exponent among nonzero values (0 when all are zero).
pub fn common_exponent(values: &[SignedLogValue]) -> i64 {
    values
        .iter()
        .filter(|v| !v.is_zero())
        .map(|v| v.exponent)
        .max()
        .unwrap_or(0)
}

/// Contiguous run of solution values starting at `start_index`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignedLogSeq {
    start_index: usize,
    values: Vec<SignedLogValue>,
}

impl SignedLogSeq {
    pub fn new(start_index: usize, values: Vec<SignedLogValue>) -> Result<Self> {
        if start_index < 1 {
            return Err(Error::InvalidParameter("start_index must be >= 1".into()));
        }
        if values.len() < 2 {
            return Err(Error::InvalidParameter(
                "a solution needs at least two consecutive values".into(),
            ));
        }
        Ok(Self {
            start_index,
            values,
        })
    }

    pub fn from_f64s(start_index: usize, xs: &[f64]) -> Result<Self> {
        Self::new(
            start_index,
            xs.iter().map(|&x| SignedLogValue::from_f64(x)).collect(),
        )
    }

    pub fn start_index(&self) -> usize {
        self.start_index
    }

    /// Last stored index (inclusive).
    pub fn end_index(&self) -> usize {
        self.start_index + self.values.len() - 1
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[SignedLogValue] {
        &self.values
    }

    pub fn get(&self, n: usize) -> Option<SignedLogValue> {
        n.checked_sub(self.start_index)
            .and_then(|i| self.values.get(i))
            .copied()
    }

    /// Value at `n`; panics outside the stored range.
    pub fn at(&self, n: usize) -> SignedLogValue {
        self.get(n).unwrap_or_else(|| {
            panic!(
                "index {n} outside [{}, {}]",
                self.start_index,
                self.end_index()
            )
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, SignedLogValue)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(i, v)| (self.start_index + i, *v))
    }

    /// Restriction to `[from, to]` (clamped to the stored range).
    pub fn slice(&self, from: usize, to: usize) -> Result<Self> {
        let from = from.max(self.start_index);
        let to = to.min(self.end_index());
        if to < from + 1 {
            return Err(Error::InvalidParameter(format!(
                "slice [{from}, {to}] holds fewer than two values"
            )));
        }
        Self::new(
            from,
            self.values[from - self.start_index..=to - self.start_index].to_vec(),
        )
    }

    /// Concatenate `self` with `tail`, which must start at or before
    /// `self.end_index() + 1`; overlapping indices keep `self`'s values.
    pub fn extend_with(&self, tail: &Self) -> Result<Self> {
        if tail.start_index > self.end_index() + 1 || tail.start_index < self.start_index {
            return Err(Error::InvalidParameter(
                "sequences are not contiguous".into(),
            ));
        }
        let mut values = self.values.clone();
        let skip = self.end_index() + 1 - tail.start_index;
        values.extend_from_slice(tail.values.get(skip..).unwrap_or(&[]));
        Self::new(self.start_index, values)
    }

    /// Multiply every value by `1 / self.at(n)`.
    pub fn normalized_at(&self, n: usize) -> Result<Self> {
        let pivot = self.get(n).ok_or_else(|| {
            Error::InvalidParameter(format!("normalization index {n} outside the sequence"))
        })?;
        if pivot.is_zero() {
            return Err(Error::InvalidParameter(format!("value at {n} is zero")));
        }
        let inv = 1.0 / pivot.mantissa;
        let shift = pivot.exponent;
        let values = self
            .values
            .iter()
            .map(|v| {
                if v.is_zero() {
                    *v
                } else {
                    SignedLogValue::from_scaled(v.mantissa * inv, v.exponent - shift)
                }
            })
            .collect();
        Self::new(self.start_index, values)
    }

    /// Plain `(n, sign, logmag)` triples.
    pub fn triples(&self) -> Vec<(usize, i8, f64)> {
        self.iter()
            .map(|(n, v)| (n, v.sign(), v.logmag()))
            .collect()
    }

    pub fn from_triples(triples: &[(usize, i8, f64)]) -> Result<Self> {
        let start = triples
            .first()
            .map(|t| t.0)
            .ok_or_else(|| Error::InvalidParameter("empty dump".into()))?;
        for (i, t) in triples.iter().enumerate() {
            if t.0 != start + i {
                return Err(Error::InvalidParameter(format!(
                    "indices not contiguous at row {i}"
                )));
            }
        }
        Self::new(
            start,
            triples
                .iter()
                .map(|&(_, s, l)| SignedLogValue::from_sign_logmag(s, l))
                .collect(),
        )
    }
}
