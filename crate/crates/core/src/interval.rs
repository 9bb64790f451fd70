//! Outward-rounded interval arithmetic over dyadic rationals.
//!
//! Every endpoint is a [`Dyadic`] `m * 2^e` with at most `precision`
//! significant bits. Lower endpoints are always rounded toward negative
//! infinity and upper endpoints toward positive infinity, so each operation
//! returns an enclosure of the exact real result. Transcendental functions
//! (`exp`, `ln`, and the constants `e`, `pi`, `ln 2`) carry explicit
//! truncation remainders.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use once_cell::sync::Lazy;
use parking_lot::RwLock;

/// Working precision every certification starts from.
pub const DEFAULT_PRECISION: u32 = 128;
/// Largest precision the escalation loop will reach.
pub const MAX_PRECISION: u32 = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Round {
    Down,
    Up,
}

/// A dyadic rational `man * 2^exp`.
#[derive(Clone, Debug)]
pub struct Dyadic {
    man: BigInt,
    exp: i64,
}

fn shr_floor(man: &BigInt, k: u64) -> BigInt {
    if man.sign() != Sign::Minus {
        man >> k
    } else {
        let m: BigInt = -man - 1u32;
        -(m >> k) - 1u32
    }
}

fn shr_round(man: &BigInt, k: u64, dir: Round) -> BigInt {
    match dir {
        Round::Down => shr_floor(man, k),
        Round::Up => -shr_floor(&-man, k),
    }
}

fn div_round(num: &BigInt, den: &BigInt, dir: Round) -> BigInt {
    match dir {
        Round::Down => num.div_floor(den),
        Round::Up => -((-num).div_floor(den)),
    }
}

impl Dyadic {
    pub fn zero() -> Self {
        Dyadic {
            man: BigInt::zero(),
            exp: 0,
        }
    }

    pub fn new(man: BigInt, exp: i64) -> Self {
        Dyadic { man, exp }
    }

    pub fn from_int(n: impl Into<BigInt>) -> Self {
        Dyadic {
            man: n.into(),
            exp: 0,
        }
    }

    /// Exact conversion; every finite `f64` is dyadic.
    pub fn from_f64(x: f64) -> Option<Self> {
        if !x.is_finite() {
            return None;
        }
        if x == 0.0 {
            return Some(Self::zero());
        }
        let bits = x.to_bits();
        let sign = if (bits >> 63) == 0 { 1i64 } else { -1 };
        let raw_exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (man, exp) = if raw_exp == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), raw_exp - 1075)
        };
        Some(Dyadic {
            man: BigInt::from(man) * sign,
            exp,
        })
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.man
    }

    pub fn exponent(&self) -> i64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.man.is_zero()
    }

    pub fn sign(&self) -> Sign {
        self.man.sign()
    }

    pub fn abs(&self) -> Self {
        Dyadic {
            man: self.man.abs(),
            exp: self.exp,
        }
    }

    /// Upper bound on `log2 |self|`: `|self| < 2^magnitude()`.
    fn magnitude(&self) -> i64 {
        self.man.bits() as i64 + self.exp
    }

    pub fn round(&self, prec: u32, dir: Round) -> Self {
        let bits = self.man.bits();
        if bits <= prec as u64 {
            return self.clone();
        }
        let k = bits - prec as u64;
        Dyadic {
            man: shr_round(&self.man, k, dir),
            exp: self.exp + k as i64,
        }
    }

    fn align(&self, other: &Self) -> (BigInt, BigInt, i64) {
        let e = self.exp.min(other.exp);
        let a = &self.man << (self.exp - e) as u64;
        let b = &other.man << (other.exp - e) as u64;
        (a, b, e)
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let (a, b, e) = self.align(other);
        Dyadic { man: a + b, exp: e }
    }

    pub fn neg(&self) -> Self {
        Dyadic {
            man: -&self.man,
            exp: self.exp,
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        Dyadic {
            man: &self.man * &other.man,
            exp: self.exp + other.exp,
        }
    }

    pub fn mul_pow2(&self, k: i64) -> Self {
        Dyadic {
            man: self.man.clone(),
            exp: self.exp + k,
        }
    }

    /// `self / other` rounded to `prec` bits in direction `dir`.
    pub fn div(&self, other: &Self, prec: u32, dir: Round) -> Self {
        assert!(!other.is_zero(), "division by zero");
        if self.is_zero() {
            return Self::zero();
        }
        let shift = (prec as i64 + 2 + other.man.bits() as i64 - self.man.bits() as i64).max(0);
        let num = &self.man << shift as u64;
        let q = div_round(&num, &other.man, dir);
        Dyadic {
            man: q,
            exp: self.exp - other.exp - shift,
        }
        .round(prec, dir)
    }

    /// Square root of a nonnegative dyadic, rounded in direction `dir`.
    pub fn sqrt(&self, prec: u32, dir: Round) -> Self {
        assert!(self.sign() != Sign::Minus, "sqrt of a negative number");
        if self.is_zero() {
            return Self::zero();
        }
        let mut shift = (2 * prec as i64 + 4 - self.man.bits() as i64).max(0);
        if (self.exp - shift).rem_euclid(2) != 0 {
            shift += 1;
        }
        let scaled = (self.man.magnitude() << shift as u64).clone();
        let root = scaled.sqrt();
        let root = if dir == Round::Up && &root * &root != scaled {
            root + 1u32
        } else {
            root
        };
        Dyadic {
            man: BigInt::from(root),
            exp: (self.exp - shift) / 2,
        }
        .round(prec, dir)
    }

    pub fn to_rational(&self) -> BigRational {
        if self.exp >= 0 {
            BigRational::from_integer(&self.man << self.exp as u64)
        } else {
            BigRational::new(self.man.clone(), BigInt::one() << (-self.exp) as u64)
        }
    }

    pub fn from_rational(q: &BigRational, prec: u32, dir: Round) -> Self {
        Dyadic::from_int(q.numer().clone()).div(&Dyadic::from_int(q.denom().clone()), prec, dir)
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.man.bits();
        let (m, e) = if bits > 60 {
            let k = bits - 60;
            (shr_floor(&self.man, k), self.exp + k as i64)
        } else {
            (self.man.clone(), self.exp)
        };
        let m = m.to_f64().unwrap_or(f64::NAN);
        if e > 1100 {
            return m.signum() * f64::INFINITY;
        }
        if e < -1200 {
            return 0.0;
        }
        let half = (e / 2) as i32;
        m * 2f64.powi(half) * 2f64.powi(e as i32 - half)
    }

    /// Decimal rendering with `digits` significant digits, rounded in `dir`.
    pub fn to_decimal(&self, digits: usize, dir: Round) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let q = self.to_rational();
        // Rough decimal exponent of |q|; exactness is restored by the integer rounding below.
        let log10 = (self.man.bits() as f64 - 1.0 + self.exp as f64) * std::f64::consts::LOG10_2;
        let e10 = log10.floor() as i64;
        let scale = digits as i64 - 1 - e10;
        let ten = BigInt::from(10u32);
        let scaled = if scale >= 0 {
            q * BigRational::from_integer(num_traits::pow(ten, scale as usize))
        } else {
            q / BigRational::from_integer(num_traits::pow(ten, (-scale) as usize))
        };
        let n = match dir {
            Round::Down => scaled.floor().to_integer(),
            Round::Up => scaled.ceil().to_integer(),
        };
        if n.is_zero() {
            return "0".to_string();
        }
        let neg = n.is_negative();
        let ds = n.abs().to_string();
        let exp10 = ds.len() as i64 - 1 - scale;
        let ds = ds.trim_end_matches('0');
        let ds = if ds.is_empty() { "0" } else { ds };
        let mut out = String::new();
        if neg {
            out.push('-');
        }
        out.push_str(&ds[..1]);
        if ds.len() > 1 {
            out.push('.');
            out.push_str(&ds[1..]);
        }
        if exp10 != 0 {
            out.push('e');
            out.push_str(&exp10.to_string());
        }
        out
    }
}

impl PartialEq for Dyadic {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Dyadic {}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b, _) = self.align(other);
        a.cmp(&b)
    }
}

/// A closed interval `[lo, hi]` known to contain some real number.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RealInterval {
    lo: Dyadic,
    hi: Dyadic,
    precision: u32,
}

static LN2_CACHE: Lazy<RwLock<HashMap<u32, RealInterval>>> = Lazy::new(Default::default);
static PI_CACHE: Lazy<RwLock<HashMap<u32, RealInterval>>> = Lazy::new(Default::default);

impl RealInterval {
    pub fn new(lo: Dyadic, hi: Dyadic, precision: u32) -> Self {
        assert!(lo <= hi, "interval endpoints out of order");
        RealInterval {
            lo: lo.round(precision, Round::Down),
            hi: hi.round(precision, Round::Up),
            precision,
        }
    }

    pub fn point(x: Dyadic, precision: u32) -> Self {
        Self::new(x.clone(), x, precision)
    }

    pub fn from_int(n: impl Into<BigInt>, precision: u32) -> Self {
        Self::point(Dyadic::from_int(n), precision)
    }

    pub fn from_biguint(n: &BigUint, precision: u32) -> Self {
        Self::from_int(BigInt::from(n.clone()), precision)
    }

    pub fn from_rational(q: &BigRational, precision: u32) -> Self {
        RealInterval {
            lo: Dyadic::from_rational(q, precision, Round::Down),
            hi: Dyadic::from_rational(q, precision, Round::Up),
            precision,
        }
    }

    pub fn from_ratio(num: impl Into<BigInt>, den: impl Into<BigInt>, precision: u32) -> Self {
        Self::from_rational(&BigRational::new(num.into(), den.into()), precision)
    }

    pub fn from_f64(x: f64, precision: u32) -> Option<Self> {
        Dyadic::from_f64(x).map(|d| Self::point(d, precision))
    }

    pub fn zero(precision: u32) -> Self {
        Self::point(Dyadic::zero(), precision)
    }

    pub fn one(precision: u32) -> Self {
        Self::from_int(1, precision)
    }

    pub fn lo(&self) -> &Dyadic {
        &self.lo
    }

    pub fn hi(&self) -> &Dyadic {
        &self.hi
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn with_precision(&self, precision: u32) -> Self {
        Self::new(self.lo.clone(), self.hi.clone(), precision)
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn width(&self) -> Dyadic {
        self.hi.add(&self.lo.neg())
    }

    pub fn mid_f64(&self) -> f64 {
        0.5 * (self.lo.to_f64() + self.hi.to_f64())
    }

    pub fn contains_rational(&self, q: &BigRational) -> bool {
        let lo = self.lo.to_rational();
        let hi = self.hi.to_rational();
        &lo <= q && q <= &hi
    }

    pub fn contains_int(&self, n: &BigUint) -> bool {
        self.contains_rational(&BigRational::from_integer(BigInt::from(n.clone())))
    }

    pub fn contains(&self, other: &Self) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    /// Every point of `self` is `<=` every point of `other`.
    pub fn certainly_le(&self, other: &Self) -> bool {
        self.hi <= other.lo
    }

    pub fn certainly_lt(&self, other: &Self) -> bool {
        self.hi < other.lo
    }

    pub fn is_positive(&self) -> bool {
        self.lo.sign() == Sign::Plus
    }

    fn prec_with(&self, other: &Self) -> u32 {
        self.precision.max(other.precision)
    }

    pub fn add(&self, other: &Self) -> Self {
        let p = self.prec_with(other);
        RealInterval {
            lo: self.lo.add(&other.lo).round(p, Round::Down),
            hi: self.hi.add(&other.hi).round(p, Round::Up),
            precision: p,
        }
    }

    pub fn neg(&self) -> Self {
        RealInterval {
            lo: self.hi.neg(),
            hi: self.lo.neg(),
            precision: self.precision,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let p = self.prec_with(other);
        let cands = [
            self.lo.mul(&other.lo),
            self.lo.mul(&other.hi),
            self.hi.mul(&other.lo),
            self.hi.mul(&other.hi),
        ];
        let lo = cands.iter().min().unwrap().round(p, Round::Down);
        let hi = cands.iter().max().unwrap().round(p, Round::Up);
        RealInterval {
            lo,
            hi,
            precision: p,
        }
    }

    pub fn square(&self) -> Self {
        if self.lo.sign() == Sign::Minus && self.hi.sign() != Sign::Minus {
            let p = self.precision;
            let a = self.lo.mul(&self.lo);
            let b = self.hi.mul(&self.hi);
            return RealInterval {
                lo: Dyadic::zero(),
                hi: a.max(b).round(p, Round::Up),
                precision: p,
            };
        }
        self.mul(self)
    }

    pub fn mul_pow2(&self, k: i64) -> Self {
        RealInterval {
            lo: self.lo.mul_pow2(k),
            hi: self.hi.mul_pow2(k),
            precision: self.precision,
        }
    }

    /// Division; panics if the divisor interval contains zero.
    pub fn div(&self, other: &Self) -> Self {
        assert!(
            other.lo.sign() == Sign::Plus || other.hi.sign() == Sign::Minus,
            "interval division by an interval containing zero"
        );
        let p = self.prec_with(other);
        let pairs = [
            (&self.lo, &other.lo),
            (&self.lo, &other.hi),
            (&self.hi, &other.lo),
            (&self.hi, &other.hi),
        ];
        let lo = pairs
            .iter()
            .map(|(a, b)| a.div(b, p, Round::Down))
            .min()
            .unwrap();
        let hi = pairs
            .iter()
            .map(|(a, b)| a.div(b, p, Round::Up))
            .max()
            .unwrap();
        RealInterval {
            lo,
            hi,
            precision: p,
        }
    }

    pub fn recip(&self) -> Self {
        Self::one(self.precision).div(self)
    }

    pub fn div_int(&self, n: u64) -> Self {
        self.div(&Self::from_int(n, self.precision))
    }

    pub fn mul_int(&self, n: impl Into<BigInt>) -> Self {
        self.mul(&Self::from_int(n, self.precision))
    }

    pub fn powi(&self, n: u32) -> Self {
        let mut acc = Self::one(self.precision);
        let mut base = self.clone();
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.square();
            }
        }
        acc
    }

    pub fn sqrt(&self) -> Self {
        assert!(self.hi.sign() != Sign::Minus, "sqrt of a negative interval");
        let lo = if self.lo.sign() == Sign::Minus {
            Dyadic::zero()
        } else {
            self.lo.sqrt(self.precision, Round::Down)
        };
        RealInterval {
            lo,
            hi: self.hi.sqrt(self.precision, Round::Up),
            precision: self.precision,
        }
    }

    /// Interval join (convex hull).
    pub fn hull(&self, other: &Self) -> Self {
        RealInterval {
            lo: self.lo.clone().min(other.lo.clone()),
            hi: self.hi.clone().max(other.hi.clone()),
            precision: self.prec_with(other),
        }
    }

    fn pad(&self, eps: &Dyadic) -> Self {
        let e = eps.abs();
        RealInterval {
            lo: self.lo.add(&e.neg()).round(self.precision, Round::Down),
            hi: self.hi.add(&e).round(self.precision, Round::Up),
            precision: self.precision,
        }
    }

    pub fn exp(&self) -> Self {
        let p = self.precision;
        if self.is_point() {
            return exp_point(&self.lo, p);
        }
        let lo = exp_point(&self.lo, p).lo;
        let hi = exp_point(&self.hi, p).hi;
        RealInterval {
            lo,
            hi,
            precision: p,
        }
    }

    /// Natural logarithm; panics unless the interval is strictly positive.
    pub fn ln(&self) -> Self {
        assert!(self.is_positive(), "ln of a non-positive interval");
        let p = self.precision;
        let lo = ln_dyadic(&self.lo, p);
        if self.is_point() {
            return lo;
        }
        let hi = ln_dyadic(&self.hi, p);
        RealInterval {
            lo: lo.lo,
            hi: hi.hi,
            precision: p,
        }
    }

    /// `self^exponent` for a strictly positive base.
    pub fn pow(&self, exponent: &Self) -> Self {
        if self.is_point() && self.lo == Dyadic::from_int(1) {
            return Self::one(self.precision);
        }
        self.ln().mul(exponent).exp()
    }

    pub fn pi(precision: u32) -> Self {
        if let Some(v) = PI_CACHE.read().get(&precision) {
            return v.clone();
        }
        let w = precision + 16;
        let a = atan_inv(5, w).mul_int(16);
        let b = atan_inv(239, w).mul_int(4);
        let v = a.sub(&b).with_precision(precision);
        PI_CACHE.write().insert(precision, v.clone());
        v
    }

    pub fn e(precision: u32) -> Self {
        exp_point(&Dyadic::from_int(1), precision)
    }

    pub fn ln2(precision: u32) -> Self {
        if let Some(v) = LN2_CACHE.read().get(&precision) {
            return v.clone();
        }
        let w = precision + 16;
        let v = atanh_rational(&BigRational::new(1.into(), 3.into()), w)
            .mul_int(2)
            .with_precision(precision);
        LN2_CACHE.write().insert(precision, v.clone());
        v
    }

    /// Enclosure of `ln(q)` for a positive rational.
    pub fn ln_rational(q: &BigRational, precision: u32) -> Self {
        assert!(q.is_positive(), "ln of a non-positive rational");
        ln_ratio(q.numer().magnitude(), q.denom().magnitude(), precision)
    }

    pub fn ln_biguint(n: &BigUint, precision: u32) -> Self {
        ln_ratio(n, &BigUint::one(), precision)
    }

    pub fn lo_decimal(&self, digits: usize) -> String {
        self.lo.to_decimal(digits, Round::Down)
    }

    pub fn hi_decimal(&self, digits: usize) -> String {
        self.hi.to_decimal(digits, Round::Up)
    }
}

impl fmt::Display for RealInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo_decimal(20), self.hi_decimal(20))
    }
}

/// Enclosure of `exp(x)` for a dyadic point.
fn exp_point(x: &Dyadic, prec: u32) -> RealInterval {
    if x.is_zero() {
        return RealInterval::one(prec);
    }
    // Halve until |y| < 2^-8, sum the Taylor series, then square back up.
    let halvings = (x.magnitude() + 8).max(0) as u32;
    let w = prec + halvings + 24;
    let y = RealInterval::point(x.mul_pow2(-(halvings as i64)), w);
    let mut sum = RealInterval::one(w);
    let mut term = RealInterval::one(w);
    let tiny = Dyadic::new(BigInt::one(), -(w as i64) - 4);
    for k in 1u64.. {
        term = term.mul(&y).div_int(k);
        sum = sum.add(&term);
        let mag = term.lo.abs().max(term.hi.abs());
        if mag < tiny {
            // Remaining terms shrink by a factor |y|/(k+1) < 2^-8 each.
            sum = sum.pad(&mag);
            break;
        }
    }
    for _ in 0..halvings {
        sum = sum.square();
    }
    sum.with_precision(prec)
}

/// Enclosure of `atanh(t)` for a rational `|t| <= 1/2`.
fn atanh_rational(t: &BigRational, w: u32) -> RealInterval {
    if t.is_zero() {
        return RealInterval::zero(w);
    }
    let ti = RealInterval::from_rational(t, w);
    let t2 = ti.square();
    let mut power = ti.clone();
    let mut sum = ti;
    let tiny = Dyadic::new(BigInt::one(), -(w as i64) - 4);
    for k in 1u64.. {
        power = power.mul(&t2);
        let term = power.div_int(2 * k + 1);
        sum = sum.add(&term);
        let mag = term.lo.abs().max(term.hi.abs());
        if mag < tiny {
            // Tail is at most mag * t^2 / (1 - t^2) <= mag / 3.
            sum = sum.pad(&mag);
            break;
        }
    }
    sum
}

/// Enclosure of `atan(1/n)` for an integer `n >= 2`.
fn atan_inv(n: u64, w: u32) -> RealInterval {
    let inv = RealInterval::from_ratio(1, n, w);
    let inv2 = inv.square();
    let mut power = inv.clone();
    let mut sum = inv;
    let tiny = Dyadic::new(BigInt::one(), -(w as i64) - 4);
    for k in 1u64.. {
        power = power.mul(&inv2);
        let term = power.div_int(2 * k + 1);
        sum = if k % 2 == 1 {
            sum.sub(&term)
        } else {
            sum.add(&term)
        };
        let mag = term.hi.abs();
        if mag < tiny {
            // Alternating series with decreasing terms.
            sum = sum.pad(&mag);
            break;
        }
    }
    sum
}

/// Enclosure of `ln(num/den)`: write the ratio as `f * 2^k` with
/// `f` in `[1/sqrt 2, sqrt 2)`, then use `ln f = 2 atanh((f-1)/(f+1))`.
fn ln_ratio(num: &BigUint, den: &BigUint, prec: u32) -> RealInterval {
    assert!(!num.is_zero() && !den.is_zero());
    let mut k = num.bits() as i64 - den.bits() as i64;
    let scaled = |k: i64| -> (BigUint, BigUint) {
        if k >= 0 {
            (num.clone(), den << k as u64)
        } else {
            (num << (-k) as u64, den.clone())
        }
    };
    let (mut a, mut b) = scaled(k);
    // Now a/b lies in (1/2, 2); move it into [1/sqrt 2, sqrt 2).
    if &a * &a * 2u32 < &b * &b {
        k -= 1;
        (a, b) = scaled(k);
    } else if &a * &a >= &b * &b * 2u32 {
        k += 1;
        (a, b) = scaled(k);
    }
    let w = prec + 24 + (64 - k.unsigned_abs().leading_zeros());
    let t = BigRational::new(
        BigInt::from(a.clone()) - BigInt::from(b.clone()),
        BigInt::from(a) + BigInt::from(b),
    );
    let mut out = atanh_rational(&t, w).mul_int(2);
    if k != 0 {
        out = out.add(&RealInterval::ln2(w).mul_int(k));
    }
    out.with_precision(prec)
}

fn ln_dyadic(x: &Dyadic, prec: u32) -> RealInterval {
    let q = x.to_rational();
    ln_ratio(q.numer().magnitude(), q.denom().magnitude(), prec)
}
