//! Capped absolute-precision p-adic integers.
//!
//! A [`PadicContext`] fixes a prime `p > 3` and an exponent `B`; every
//! [`PadicInt`] is a residue modulo `p^B` held in one machine word. The
//! residue zero reports valuation `B` (the cap) rather than infinity.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Largest modulus `p^B` a context may carry.
pub const MAX_MODULUS: u64 = 1 << 62;

/// Deterministic Miller-Rabin for all `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(q) {
            return n == q;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    let mulm = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let powm = |mut b: u64, mut e: u64| {
        let mut r = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                r = mulm(r, b);
            }
            b = mulm(b, b);
            e >>= 1;
        }
        r
    };
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powm(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulm(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Exponent of `p` in `n`; `None` stands for the infinite valuation of 0.
pub fn val_p(n: i128, p: u64) -> Option<u32> {
    if n == 0 {
        return None;
    }
    let p = p as i128;
    let mut n = n;
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    Some(v)
}

pub fn val_p_big(n: &BigInt, p: u64) -> Option<u32> {
    if n.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let mut n = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return Some(v);
        }
        n = q;
        v += 1;
    }
}

/// The prime, the precision exponent and the cached modulus `p^B`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PadicContext {
    p: u64,
    prec: u32,
    modulus: u64,
}

impl PadicContext {
    pub fn new(p: u64, prec: u32) -> Result<Self> {
        if p <= 3 || !is_prime(p) {
            return Err(Error::InvalidPrime { p });
        }
        if prec == 0 {
            return Err(Error::InvalidPrecision);
        }
        let mut modulus: u64 = 1;
        for _ in 0..prec {
            modulus = modulus
                .checked_mul(p)
                .filter(|&m| m <= MAX_MODULUS)
                .ok_or(Error::PrecisionOverflow { p, prec })?;
        }
        Ok(PadicContext { p, prec, modulus })
    }

    /// Largest `B` with `p^B <= MAX_MODULUS`.
    pub fn max_precision(p: u64) -> u32 {
        let mut m: u64 = 1;
        let mut b = 0;
        while let Some(next) = m.checked_mul(p).filter(|&x| x <= MAX_MODULUS) {
            m = next;
            b += 1;
        }
        b
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn with_precision(&self, prec: u32) -> Result<Self> {
        PadicContext::new(self.p, prec)
    }

    pub fn reduce_i64(&self, x: i64) -> u64 {
        (x as i128).rem_euclid(self.modulus as i128) as u64
    }

    pub fn reduce_i128(&self, x: i128) -> u64 {
        x.rem_euclid(self.modulus as i128) as u64
    }

    pub fn reduce_bigint(&self, x: &BigInt) -> u64 {
        let m = BigInt::from(self.modulus);
        x.mod_floor(&m).to_u64().expect("residue fits")
    }

    #[inline]
    pub fn add_mod(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.modulus {
            s - self.modulus
        } else {
            s
        }
    }

    #[inline]
    pub fn sub_mod(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.modulus - b
        }
    }

    #[inline]
    pub fn neg_mod(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.modulus - a
        }
    }

    #[inline]
    pub fn mul_mod(&self, a: u64, b: u64) -> u64 {
        if self.modulus <= 1 << 32 {
            (a * b) % self.modulus
        } else {
            ((a as u128 * b as u128) % self.modulus as u128) as u64
        }
    }

    pub fn pow_mod(&self, mut b: u64, mut e: u64) -> u64 {
        let mut r = 1 % self.modulus;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul_mod(r, b);
            }
            b = self.mul_mod(b, b);
            e >>= 1;
        }
        r
    }

    /// Valuation of a residue, capped at `B`.
    pub fn valuation(&self, mut a: u64) -> u32 {
        if a == 0 {
            return self.prec;
        }
        let mut v = 0;
        while a.is_multiple_of(self.p) {
            a /= self.p;
            v += 1;
        }
        v
    }

    /// Inverse of a residue when it is a unit.
    pub fn inv_mod(&self, a: u64) -> Option<u64> {
        if a.is_multiple_of(self.p) {
            return None;
        }
        let (mut r0, mut r1) = (self.modulus as i128, a as i128);
        let (mut t0, mut t1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        debug_assert_eq!(r0, 1);
        Some(self.reduce_i128(t0))
    }

    pub fn element(&self, x: i64) -> PadicInt {
        PadicInt {
            ctx: *self,
            value: self.reduce_i64(x),
        }
    }

    pub fn from_residue(&self, value: u64) -> PadicInt {
        PadicInt {
            ctx: *self,
            value: value % self.modulus,
        }
    }

    pub fn from_bigint(&self, x: &BigInt) -> PadicInt {
        PadicInt {
            ctx: *self,
            value: self.reduce_bigint(x),
        }
    }

    pub fn zero(&self) -> PadicInt {
        self.from_residue(0)
    }

    pub fn one(&self) -> PadicInt {
        self.from_residue(1)
    }

    /// `p^e` as an element (zero once `e >= B`).
    pub fn p_power(&self, e: u32) -> PadicInt {
        self.from_residue(self.pow_mod(self.p, e as u64))
    }
}

impl fmt::Display for PadicContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z/{}^{}", self.p, self.prec)
    }
}

/// An integer modulo `p^B`, value kept in `[0, p^B)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PadicInt {
    ctx: PadicContext,
    value: u64,
}

impl PadicInt {
    pub fn ctx(&self) -> PadicContext {
        self.ctx
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    /// Representative in `(-p^B/2, p^B/2]`.
    pub fn to_signed(&self) -> i128 {
        let m = self.ctx.modulus as i128;
        let v = self.value as i128;
        if 2 * v > m {
            v - m
        } else {
            v
        }
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    pub fn is_unit(&self) -> bool {
        !self.value.is_multiple_of(self.ctx.p)
    }

    pub fn valuation(&self) -> u32 {
        self.ctx.valuation(self.value)
    }

    pub fn inverse(&self) -> Result<PadicInt> {
        self.ctx
            .inv_mod(self.value)
            .map(|value| PadicInt {
                ctx: self.ctx,
                value,
            })
            .ok_or(Error::NotAUnit {
                valuation: self.valuation(),
            })
    }

    pub fn pow(&self, e: u64) -> PadicInt {
        PadicInt {
            ctx: self.ctx,
            value: self.ctx.pow_mod(self.value, e),
        }
    }

    /// Signed power; negative exponents need a unit.
    pub fn powi(&self, e: i64) -> Result<PadicInt> {
        if e >= 0 {
            Ok(self.pow(e as u64))
        } else {
            Ok(self.inverse()?.pow(e.unsigned_abs()))
        }
    }

    /// Image under `Z/p^B -> Z/p^B'` for `B' <= B`.
    pub fn reduce(&self, prec: u32) -> Result<PadicInt> {
        if prec > self.ctx.prec {
            return Err(Error::InsufficientPrecision {
                needed: prec,
                available: self.ctx.prec,
            });
        }
        let ctx = self.ctx.with_precision(prec)?;
        Ok(ctx.from_residue(self.value))
    }

    fn align(self, other: PadicInt) -> (PadicContext, u64, u64) {
        assert_eq!(
            self.ctx.p, other.ctx.p,
            "arithmetic between different primes"
        );
        if self.ctx.prec <= other.ctx.prec {
            (self.ctx, self.value, other.value % self.ctx.modulus)
        } else {
            (other.ctx, self.value % other.ctx.modulus, other.value)
        }
    }
}

impl fmt::Display for PadicInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + O({}^{})", self.value, self.ctx.p, self.ctx.prec)
    }
}

// Mixed precisions meet at the smaller one.
impl Add for PadicInt {
    type Output = PadicInt;
    fn add(self, rhs: PadicInt) -> PadicInt {
        let (ctx, a, b) = self.align(rhs);
        ctx.from_residue(ctx.add_mod(a, b))
    }
}

impl Sub for PadicInt {
    type Output = PadicInt;
    fn sub(self, rhs: PadicInt) -> PadicInt {
        let (ctx, a, b) = self.align(rhs);
        ctx.from_residue(ctx.sub_mod(a, b))
    }
}

impl Mul for PadicInt {
    type Output = PadicInt;
    fn mul(self, rhs: PadicInt) -> PadicInt {
        let (ctx, a, b) = self.align(rhs);
        ctx.from_residue(ctx.mul_mod(a, b))
    }
}

impl Neg for PadicInt {
    type Output = PadicInt;
    fn neg(self) -> PadicInt {
        self.ctx.from_residue(self.ctx.neg_mod(self.value))
    }
}

/// The unit root of `X^2 - a_p X + p` in `Z_p`, to precision `B`.
///
/// Newton iteration from the seed `a_p mod p`; each step doubles the number
/// of correct digits.
pub fn unit_root(a_p: i64, ctx: &PadicContext) -> Result<PadicInt> {
    let p = ctx.p();
    if (a_p as i128).rem_euclid(p as i128) == 0 {
        return Err(Error::SupersingularPrime { p });
    }
    let a = ctx.element(a_p);
    let pp = ctx.element(p as i64);
    let mut u = ctx.from_residue(ctx.reduce_i64(a_p) % p);
    let mut correct = 1u32;
    while correct < ctx.prec() {
        let f = u * u - a * u + pp;
        let df = u + u - a;
        u = u - f * df.inverse()?;
        correct = correct.saturating_mul(2);
    }
    debug_assert!((u * u - a * u + pp).is_zero());
    Ok(u)
}
