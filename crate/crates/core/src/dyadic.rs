//! Nonnegative dyadic rationals `m·2^-k`, kept in canonical form
//! (`m` odd, or `m = 0` with `k = 0`).

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Dyadic {
    mant: BigUint,
    shift: u32,
}

impl Dyadic {
    pub fn new(mant: impl Into<BigUint>, shift: u32) -> Self {
        let mut d = Dyadic {
            mant: mant.into(),
            shift,
        };
        d.canonicalize();
        d
    }

    fn canonicalize(&mut self) {
        if self.mant.is_zero() {
            self.shift = 0;
            return;
        }
        let tz = self.mant.trailing_zeros().unwrap_or(0).min(self.shift as u64);
        self.mant >>= tz;
        self.shift -= tz as u32;
    }

    pub fn zero() -> Self {
        Dyadic::default()
    }

    pub fn one() -> Self {
        Dyadic::new(1u32, 0)
    }

    pub fn from_u64(n: u64) -> Self {
        Dyadic::new(n, 0)
    }

    /// `2^-k`.
    pub fn pow2_neg(k: u32) -> Self {
        Dyadic::new(1u32, k)
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn mantissa(&self) -> &BigUint {
        &self.mant
    }

    pub fn shift(&self) -> u32 {
        self.shift
    }

    fn aligned(&self, other: &Dyadic) -> (BigUint, BigUint, u32) {
        let k = self.shift.max(other.shift);
        (
            &self.mant << (k - self.shift),
            &other.mant << (k - other.shift),
            k,
        )
    }

    pub fn add(&self, other: &Dyadic) -> Dyadic {
        let (a, b, k) = self.aligned(other);
        Dyadic::new(a + b, k)
    }

    /// `|self - other|`.
    pub fn abs_diff(&self, other: &Dyadic) -> Dyadic {
        let (a, b, k) = self.aligned(other);
        if a >= b {
            Dyadic::new(a - b, k)
        } else {
            Dyadic::new(b - a, k)
        }
    }

    pub fn mul_u64(&self, n: u64) -> Dyadic {
        Dyadic::new(&self.mant * n, self.shift)
    }

    pub fn half(&self) -> Dyadic {
        Dyadic::new(self.mant.clone(), self.shift + 1)
    }

    /// `self · 2^-k`.
    pub fn scale_down(&self, k: u32) -> Dyadic {
        Dyadic::new(self.mant.clone(), self.shift + k)
    }

    pub fn max(self, other: Dyadic) -> Dyadic {
        if self >= other {
            self
        } else {
            other
        }
    }

    pub fn min(self, other: Dyadic) -> Dyadic {
        if self <= other {
            self
        } else {
            other
        }
    }

    /// `k` such that `self = 2^-k`, if it is a nonpositive power of two.
    pub fn as_pow2_neg(&self) -> Option<u32> {
        (self.mant.is_one()).then_some(self.shift)
    }

    /// The largest `j` with `2^-j ≥ self`, for `0 < self ≤ 1`.
    pub fn floor_log2_inv(&self) -> Option<u32> {
        if self.is_zero() || *self > Dyadic::one() {
            return None;
        }
        let bits = self.mant.bits() as u32;
        Some(self.shift + u32::from(self.mant.is_one()) - bits)
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b, _) = self.aligned(other);
        a.cmp(&b)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.shift, self.mant.is_one()) {
            (0, _) => write!(f, "{}", self.mant),
            (1, true) => write!(f, "1/2"),
            (k, true) => write!(f, "2^-{k}"),
            (k, false) => write!(f, "{}·2^-{k}", self.mant),
        }
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn parse_pow2_neg(s: &str) -> Option<u32> {
    s.strip_prefix("2^-")?.parse().ok()
}

impl FromStr for Dyadic {
    type Err = Error;

    /// Accepts `n`, `2^-k`, `m·2^-k`, `m*2^-k`, `a/b` with `b` a power of two,
    /// and `a/2^k`.
    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        let bad = || Error::Parse(format!("not a dyadic rational: {s:?}"));
        if let Some(k) = parse_pow2_neg(s) {
            return Ok(Dyadic::pow2_neg(k));
        }
        if let Some((m, rest)) = s.split_once('·').or_else(|| s.split_once('*')) {
            let m: BigUint = m.trim().parse().map_err(|_| bad())?;
            let k = parse_pow2_neg(rest.trim()).ok_or_else(bad)?;
            return Ok(Dyadic::new(m, k));
        }
        if let Some((a, b)) = s.split_once('/') {
            let a: BigUint = a.trim().parse().map_err(|_| bad())?;
            let b = b.trim();
            let k = if let Some(e) = b.strip_prefix("2^") {
                e.parse::<u32>().map_err(|_| bad())?
            } else {
                let b: BigUint = b.parse().map_err(|_| bad())?;
                if b.is_zero() || !(&b & (&b - 1u32)).is_zero() {
                    return Err(bad());
                }
                (b.bits() - 1) as u32
            };
            return Ok(Dyadic::new(a, k));
        }
        let m: BigUint = s.parse().map_err(|_| bad())?;
        Ok(Dyadic::new(m, 0))
    }
}

impl Serialize for Dyadic {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Dyadic {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let s = String::deserialize(de)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl Dyadic {
    /// Lossy conversion for display and benchmarks only.
    pub fn to_f64(&self) -> f64 {
        self.mant.to_f64().unwrap_or(f64::INFINITY) * 2f64.powi(-(self.shift as i32))
    }

    pub fn is_integer(&self) -> bool {
        self.shift == 0
    }

}
