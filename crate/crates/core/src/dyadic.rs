//! Dyadic rationals `m * 2^e` with arbitrary-precision mantissa.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::ParseError;

/// An exact dyadic rational `mantissa * 2^exponent`.
///
/// Always kept canonical: the mantissa is odd, or the value is zero and the
/// exponent is zero. Structural equality is therefore numeric equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mantissa: BigInt,
    exponent: i64,
}

impl Dyadic {
    pub fn new(mantissa: impl Into<BigInt>, exponent: i64) -> Self {
        let mut mantissa = mantissa.into();
        if mantissa.is_zero() {
            return Self::zero();
        }
        let tz = mantissa.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            mantissa >>= tz;
        }
        Dyadic {
            mantissa,
            exponent: exponent + tz as i64,
        }
    }

    pub fn zero() -> Self {
        Dyadic {
            mantissa: BigInt::zero(),
            exponent: 0,
        }
    }

    pub fn one() -> Self {
        Dyadic::from(1)
    }

    /// `2^k`.
    pub fn pow2(k: i64) -> Self {
        Dyadic {
            mantissa: BigInt::one(),
            exponent: k,
        }
    }

    /// `numerator / 2^k`.
    pub fn ratio(numerator: i64, k: u32) -> Self {
        Dyadic::new(numerator, -(k as i64))
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn exponent(&self) -> i64 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mantissa.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.mantissa.is_positive()
    }

    pub fn abs(&self) -> Dyadic {
        Dyadic {
            mantissa: self.mantissa.abs(),
            exponent: self.exponent,
        }
    }

    /// Multiplication by `2^k`; exact.
    pub fn shl(&self, k: i64) -> Dyadic {
        if self.is_zero() {
            return Dyadic::zero();
        }
        Dyadic {
            mantissa: self.mantissa.clone(),
            exponent: self.exponent + k,
        }
    }

    pub fn half(&self) -> Dyadic {
        self.shl(-1)
    }

    /// Mantissa scaled to the grid `2^grid`; only valid when `exponent >= grid`.
    fn mantissa_at(&self, grid: i64) -> BigInt {
        debug_assert!(self.exponent >= grid || self.is_zero());
        if self.is_zero() {
            return BigInt::zero();
        }
        &self.mantissa << ((self.exponent - grid) as usize)
    }

    /// Largest multiple of `2^grid` that is `<= self`.
    pub fn floor_to(&self, grid: i64) -> Dyadic {
        if self.is_zero() || self.exponent >= grid {
            return self.clone();
        }
        let shift = (grid - self.exponent) as usize;
        let m = self.mantissa.div_floor(&(BigInt::one() << shift));
        Dyadic::new(m, grid)
    }

    /// Smallest multiple of `2^grid` that is `>= self`.
    pub fn ceil_to(&self, grid: i64) -> Dyadic {
        if self.is_zero() || self.exponent >= grid {
            return self.clone();
        }
        let shift = (grid - self.exponent) as usize;
        let m = self.mantissa.div_ceil(&(BigInt::one() << shift));
        Dyadic::new(m, grid)
    }

    /// Nearest multiple of `2^grid`, ties rounded towards +∞.
    pub fn round_to(&self, grid: i64) -> Dyadic {
        (self + &Dyadic::pow2(grid - 1)).floor_to(grid)
    }

    pub fn floor(&self) -> BigInt {
        self.floor_to(0).to_bigint_exact().expect("integral")
    }

    /// The integer value, if the number is integral.
    pub fn to_bigint_exact(&self) -> Option<BigInt> {
        if self.is_zero() {
            Some(BigInt::zero())
        } else if self.exponent >= 0 {
            Some(&self.mantissa << (self.exponent as usize))
        } else {
            None
        }
    }

    /// `floor(log2 |self|)` for nonzero values.
    pub fn ilog2(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            Some(self.mantissa.bits() as i64 - 1 + self.exponent)
        }
    }

    /// Division rounded to the grid `2^grid`, downwards or upwards.
    pub fn div_to(&self, rhs: &Dyadic, grid: i64, up: bool) -> Dyadic {
        assert!(!rhs.is_zero(), "division by zero");
        // self / rhs = (ms / mr) * 2^(es - er); scale numerator so the integer
        // quotient lands on the requested grid.
        let shift = self.exponent - rhs.exponent - grid;
        let (num, den) = if shift >= 0 {
            (&self.mantissa << (shift as usize), rhs.mantissa.clone())
        } else {
            (self.mantissa.clone(), &rhs.mantissa << ((-shift) as usize))
        };
        let q = if up {
            num.div_ceil(&den)
        } else {
            num.div_floor(&den)
        };
        Dyadic::new(q, grid)
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        // Keep 64 significant bits to avoid overflow in the mantissa conversion.
        let bits = self.mantissa.bits() as i64;
        let (m, e) = if bits > 64 {
            (&self.mantissa >> ((bits - 64) as usize), self.exponent + bits - 64)
        } else {
            (self.mantissa.clone(), self.exponent)
        };
        m.to_f64().unwrap_or(f64::NAN) * 2f64.powi(e.clamp(-2000, 2000) as i32)
    }

    /// Exact finite decimal expansion (every dyadic has one).
    pub fn to_decimal_string(&self) -> String {
        if self.exponent >= 0 {
            return self.to_bigint_exact().expect("integral").to_string();
        }
        // m / 2^k = m * 5^k / 10^k
        let k = (-self.exponent) as u32;
        let scaled = self.mantissa.abs() * num_traits::pow(BigInt::from(5), k as usize);
        let digits = scaled.to_string();
        let k = k as usize;
        let (int_part, frac_part) = if digits.len() > k {
            let split = digits.len() - k;
            (digits[..split].to_string(), digits[split..].to_string())
        } else {
            ("0".to_string(), format!("{}{}", "0".repeat(k - digits.len()), digits))
        };
        let frac = frac_part.trim_end_matches('0');
        let sign = if self.is_negative() { "-" } else { "" };
        if frac.is_empty() {
            format!("{sign}{int_part}")
        } else {
            format!("{sign}{int_part}.{frac}")
        }
    }

    /// Parses a decimal literal (`-0.75`, `3`, `1e-2`) exactly. Returns
    /// `Ok(None)` when the literal is a valid decimal but not dyadic.
    pub fn parse_decimal(s: &str) -> Result<Option<Dyadic>, ParseError> {
        let (num, k) = parse_decimal_parts(s)?;
        if k == 0 {
            return Ok(Some(Dyadic::new(num, 0)));
        }
        // num / 10^k = num / (5^k 2^k): dyadic iff 5^k divides num.
        let five_k = num_traits::pow(BigInt::from(5), k);
        let (q, r) = num.div_rem(&five_k);
        if !r.is_zero() {
            return Ok(None);
        }
        Ok(Some(Dyadic::new(q, -(k as i64))))
    }
}

/// A decimal literal as `num / 10^k`.
pub fn parse_decimal_parts(s: &str) -> Result<(BigInt, usize), ParseError> {
    let s = s.trim();
    let bad = || ParseError::Number(s.to_string());
    let (body, exp10) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i64>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, body) = match body.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, body.strip_prefix('+').unwrap_or(body)),
    };
    let (int_digits, frac_digits) = match body.split_once('.') {
        Some((a, b)) => (a, b),
        None => (body, ""),
    };
    if int_digits.is_empty() && frac_digits.is_empty() {
        return Err(bad());
    }
    if !int_digits.chars().chain(frac_digits.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    if exp10.abs() > 100_000 {
        return Err(bad());
    }
    let all = format!("{int_digits}{frac_digits}");
    let mut num: BigInt = all.parse().map_err(|_| bad())?;
    if neg {
        num = -num;
    }
    let scale = exp10 - frac_digits.len() as i64;
    if scale >= 0 {
        return Ok((num * num_traits::pow(BigInt::from(10), scale as usize), 0));
    }
    Ok((num, (-scale) as usize))
}

impl Default for Dyadic {
    fn default() -> Self {
        Dyadic::zero()
    }
}

impl From<i64> for Dyadic {
    fn from(v: i64) -> Self {
        Dyadic::new(v, 0)
    }
}

impl From<i32> for Dyadic {
    fn from(v: i32) -> Self {
        Dyadic::new(v, 0)
    }
}

impl From<BigInt> for Dyadic {
    fn from(v: BigInt) -> Self {
        Dyadic::new(v, 0)
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (sa, sb) = (self.mantissa.sign(), other.mantissa.sign());
        if sa != sb || sa == Sign::NoSign {
            return sign_rank(sa).cmp(&sign_rank(sb));
        }
        let grid = self.exponent.min(other.exponent);
        self.mantissa_at(grid).cmp(&other.mantissa_at(grid))
    }
}

fn sign_rank(s: Sign) -> i8 {
    match s {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for &Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: &Dyadic) -> Dyadic {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let grid = self.exponent.min(rhs.exponent);
        Dyadic::new(self.mantissa_at(grid) + rhs.mantissa_at(grid), grid)
    }
}

impl Sub for &Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: &Dyadic) -> Dyadic {
        self + &(-rhs)
    }
}

impl Mul for &Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: &Dyadic) -> Dyadic {
        if self.is_zero() || rhs.is_zero() {
            return Dyadic::zero();
        }
        // product of odd mantissas is odd; already canonical
        Dyadic {
            mantissa: &self.mantissa * &rhs.mantissa,
            exponent: self.exponent + rhs.exponent,
        }
    }
}

impl Neg for &Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic {
            mantissa: -&self.mantissa,
            exponent: self.exponent,
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Dyadic {
            type Output = Dyadic;
            fn $m(self, rhs: Dyadic) -> Dyadic {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        -&self
    }
}

/// `m*2^e` notation, or a plain integer when the exponent is non-negative.
impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponent >= 0 {
            write!(f, "{}", self.to_bigint_exact().expect("integral"))
        } else {
            write!(f, "{}*2^{}", self.mantissa, self.exponent)
        }
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Accepts `m*2^e`, `m/2^k`, `m/2`, and exact dyadic decimals.
impl FromStr for Dyadic {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let bad = || ParseError::Number(t.to_string());
        if let Some((m, e)) = t.split_once("*2^") {
            let m: BigInt = m.trim().parse().map_err(|_| bad())?;
            let e: i64 = e.trim().parse().map_err(|_| bad())?;
            return Ok(Dyadic::new(m, e));
        }
        if let Some((m, d)) = t.split_once('/') {
            let m = Dyadic::parse_decimal(m)?.ok_or_else(bad)?;
            let d = d.trim();
            let k = if let Some(k) = d.strip_prefix("2^") {
                k.parse::<i64>().map_err(|_| bad())?
            } else {
                let d: u64 = d.parse().map_err(|_| bad())?;
                if d == 0 || !d.is_power_of_two() {
                    return Err(ParseError::NotDyadic(t.to_string()));
                }
                d.trailing_zeros() as i64
            };
            return Ok(m.shl(-k));
        }
        Dyadic::parse_decimal(t)?.ok_or_else(|| ParseError::NotDyadic(t.to_string()))
    }
}

/// Serialized as the exact decimal expansion.
impl serde::Serialize for Dyadic {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_decimal_string())
    }
}

impl<'de> serde::Deserialize<'de> for Dyadic {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
