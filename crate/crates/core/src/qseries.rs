//! Truncated Laurent series in `q` over a coefficient ring.
//!
//! A [`Series`] stores `a_{n0}, ..., a_{N-1}` together with the offset `n0`
//! and is known exactly below the truncation order `N`. Asking for `a_n`
//! with `n >= N` is an error; coefficients below the offset are exact zeros.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::ntt;
use crate::padic::{PadicContext, PadicInt};
use crate::par::Exec;

/// Identifies a coefficient ring in serialized series.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RingDescriptor {
    Integer,
    Padic { p: u64, prec: u32 },
}

impl fmt::Display for RingDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingDescriptor::Integer => write!(f, "integer"),
            RingDescriptor::Padic { p, prec } => write!(f, "padic {p} {prec}"),
        }
    }
}

impl FromStr for RingDescriptor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split_whitespace().collect();
        match parts.as_slice() {
            ["integer"] => Ok(RingDescriptor::Integer),
            ["padic", p, prec] => Ok(RingDescriptor::Padic {
                p: p.parse()
                    .map_err(|_| Error::Parse(format!("bad prime {p:?}")))?,
                prec: prec
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad precision {prec:?}")))?,
            }),
            _ => Err(Error::Parse(format!("unknown ring descriptor {s:?}"))),
        }
    }
}

/// Coefficient ring of a [`Series`].
pub trait CoeffRing: Clone + fmt::Debug + PartialEq + Send + Sync {
    type Elem: Clone + fmt::Debug + PartialEq + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_i64(&self, x: i64) -> Self::Elem;
    fn from_bigint(&self, x: &BigInt) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn unit_inverse(&self, a: &Self::Elem) -> Option<Self::Elem>;
    /// `a / d` when the quotient exists in the ring.
    fn div_exact(&self, a: &Self::Elem, d: i64) -> Option<Self::Elem> {
        self.unit_inverse(&self.from_i64(d))
            .map(|inv| self.mul(a, &inv))
    }
    /// Canonical integer representative (the residue in `[0, p^B)` for p-adics).
    fn to_bigint(&self, a: &Self::Elem) -> BigInt;
    fn descriptor(&self) -> RingDescriptor;

    /// Whether [`CoeffRing::convolve`] is subquadratic; selects Newton
    /// inversion over the schoolbook recurrence.
    fn fast_convolution(&self) -> bool {
        false
    }

    /// First `len` coefficients of the product of two coefficient slices.
    fn convolve(
        &self,
        a: &[Self::Elem],
        b: &[Self::Elem],
        len: usize,
        exec: Exec,
    ) -> Vec<Self::Elem> {
        schoolbook(self, a, b, len, exec)
    }
}

/// O(len^2) truncated product, rows computed independently.
pub fn schoolbook<R: CoeffRing>(
    ring: &R,
    a: &[R::Elem],
    b: &[R::Elem],
    len: usize,
    exec: Exec,
) -> Vec<R::Elem> {
    exec.map_range(len, |n| {
        let mut acc = ring.zero();
        let lo = n.saturating_sub(b.len().saturating_sub(1));
        let hi = n.min(a.len().saturating_sub(1));
        if a.is_empty() || b.is_empty() || lo > hi {
            return acc;
        }
        for i in lo..=hi {
            if !ring.is_zero(&a[i]) {
                acc = ring.add(&acc, &ring.mul(&a[i], &b[n - i]));
            }
        }
        acc
    })
}

/// Exact integers.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Integers;

impl CoeffRing for Integers {
    type Elem = BigInt;

    fn zero(&self) -> BigInt {
        BigInt::zero()
    }
    fn one(&self) -> BigInt {
        BigInt::one()
    }
    fn from_i64(&self, x: i64) -> BigInt {
        BigInt::from(x)
    }
    fn from_bigint(&self, x: &BigInt) -> BigInt {
        x.clone()
    }
    fn add(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a + b
    }
    fn sub(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a - b
    }
    fn neg(&self, a: &BigInt) -> BigInt {
        -a
    }
    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a * b
    }
    fn is_zero(&self, a: &BigInt) -> bool {
        a.is_zero()
    }
    fn unit_inverse(&self, a: &BigInt) -> Option<BigInt> {
        (a.abs().is_one()).then(|| a.clone())
    }
    fn div_exact(&self, a: &BigInt, d: i64) -> Option<BigInt> {
        let d = BigInt::from(d);
        (!d.is_zero() && (a % &d).is_zero()).then(|| a / d)
    }
    fn to_bigint(&self, a: &BigInt) -> BigInt {
        a.clone()
    }
    fn descriptor(&self) -> RingDescriptor {
        RingDescriptor::Integer
    }
}

/// Below this many terms on the shorter side, schoolbook beats the NTT.
const NTT_THRESHOLD: usize = 48;

impl CoeffRing for PadicContext {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn from_i64(&self, x: i64) -> u64 {
        self.reduce_i64(x)
    }
    fn from_bigint(&self, x: &BigInt) -> u64 {
        self.reduce_bigint(x)
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        self.add_mod(*a, *b)
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        self.sub_mod(*a, *b)
    }
    fn neg(&self, a: &u64) -> u64 {
        self.neg_mod(*a)
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        self.mul_mod(*a, *b)
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn unit_inverse(&self, a: &u64) -> Option<u64> {
        self.inv_mod(*a)
    }
    fn to_bigint(&self, a: &u64) -> BigInt {
        BigInt::from(*a)
    }
    fn descriptor(&self) -> RingDescriptor {
        RingDescriptor::Padic {
            p: self.p(),
            prec: self.prec(),
        }
    }
    fn fast_convolution(&self) -> bool {
        true
    }

    fn convolve(&self, a: &[u64], b: &[u64], len: usize, exec: Exec) -> Vec<u64> {
        if a.len().min(b.len()).min(len) <= NTT_THRESHOLD {
            return padic_schoolbook(self, a, b, len, exec);
        }
        ntt::convolve_mod(a, b, len, self.modulus(), exec)
    }
}

/// Word-level schoolbook with lazy reduction of the u128 accumulator.
pub fn padic_schoolbook(
    ctx: &PadicContext,
    a: &[u64],
    b: &[u64],
    len: usize,
    exec: Exec,
) -> Vec<u64> {
    let m = ctx.modulus() as u128;
    // 8 products of size < 2^124 on top of a reduced accumulator stay below 2^128
    let batch = if ctx.modulus() <= 1 << 32 {
        usize::MAX
    } else {
        8
    };
    exec.map_range(len, |n| {
        if a.is_empty() || b.is_empty() {
            return 0;
        }
        let lo = n.saturating_sub(b.len() - 1);
        let hi = n.min(a.len() - 1);
        if lo > hi {
            return 0;
        }
        let mut acc: u128 = 0;
        let mut pending = 0;
        for i in lo..=hi {
            acc += a[i] as u128 * b[n - i] as u128;
            pending += 1;
            if pending == batch {
                acc %= m;
                pending = 0;
            }
        }
        (acc % m) as u64
    })
}

/// A truncated Laurent series `sum_{n0 <= n < N} a_n q^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct Series<R: CoeffRing> {
    ring: R,
    offset: i64,
    coeffs: Vec<R::Elem>,
}

fn check_same_ring<R: CoeffRing>(a: &R, b: &R) -> Result<()> {
    if a != b {
        return Err(Error::RingMismatch {
            left: a.descriptor().to_string(),
            right: b.descriptor().to_string(),
        });
    }
    Ok(())
}

impl<R: CoeffRing> Series<R> {
    pub fn new(ring: R, offset: i64, coeffs: Vec<R::Elem>) -> Self {
        Series {
            ring,
            offset,
            coeffs,
        }
    }

    pub fn zero(ring: R, offset: i64, trunc: i64) -> Self {
        let len = (trunc - offset).max(0) as usize;
        let coeffs = vec![ring.zero(); len];
        Series::new(ring, offset, coeffs)
    }

    pub fn one(ring: R, trunc: i64) -> Self {
        Series::monomial(ring.clone(), 0, ring.one(), trunc)
    }

    /// `c q^e + O(q^trunc)`.
    pub fn monomial(ring: R, exponent: i64, c: R::Elem, trunc: i64) -> Self {
        let mut s = Series::zero(ring, exponent, trunc);
        if let Some(first) = s.coeffs.first_mut() {
            *first = c;
        }
        s
    }

    pub fn from_i64s(ring: R, offset: i64, coeffs: &[i64]) -> Self {
        let c = coeffs.iter().map(|&x| ring.from_i64(x)).collect();
        Series::new(ring, offset, c)
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    /// Exclusive truncation order `N`.
    pub fn trunc(&self) -> i64 {
        self.offset + self.coeffs.len() as i64
    }

    pub fn coeffs(&self) -> &[R::Elem] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<R::Elem> {
        self.coeffs
    }

    /// `a_n`; exact zero below the offset, an error at or past the truncation.
    pub fn coeff(&self, n: i64) -> Result<R::Elem> {
        if n >= self.trunc() {
            return Err(Error::InsufficientTruncation {
                index: n,
                trunc: self.trunc(),
            });
        }
        if n < self.offset {
            return Ok(self.ring.zero());
        }
        Ok(self.coeffs[(n - self.offset) as usize].clone())
    }

    /// Drops every coefficient at or past `trunc`.
    pub fn truncate(&self, trunc: i64) -> Self {
        let keep = (trunc - self.offset).clamp(0, self.coeffs.len() as i64) as usize;
        Series::new(self.ring.clone(), self.offset, self.coeffs[..keep].to_vec())
    }

    /// Whether both series are known below `q^n` and agree there.
    pub fn agrees_below(&self, other: &Self, n: i64) -> bool {
        let start = self.offset.min(other.offset);
        self.trunc() >= n
            && other.trunc() >= n
            && (start..n).all(|i| self.coeff(i).ok() == other.coeff(i).ok())
    }

    /// Same series written from a lower starting exponent.
    pub fn with_offset(&self, offset: i64) -> Self {
        if offset >= self.offset {
            let skip = ((offset - self.offset) as usize).min(self.coeffs.len());
            return Series::new(
                self.ring.clone(),
                offset.min(self.trunc()),
                self.coeffs[skip..].to_vec(),
            );
        }
        let pad = (self.offset - offset) as usize;
        let mut c = vec![self.ring.zero(); pad];
        c.extend_from_slice(&self.coeffs);
        Series::new(self.ring.clone(), offset, c)
    }

    fn combine(&self, other: &Self, op: impl Fn(&R::Elem, &R::Elem) -> R::Elem) -> Result<Self> {
        check_same_ring(&self.ring, &other.ring)?;
        let offset = self.offset.min(other.offset);
        let trunc = self.trunc().min(other.trunc()).max(offset);
        let zero = self.ring.zero();
        let coeffs = (offset..trunc)
            .map(|n| {
                let a = self.coeff(n).unwrap_or_else(|_| zero.clone());
                let b = other.coeff(n).unwrap_or_else(|_| zero.clone());
                op(&a, &b)
            })
            .collect();
        Ok(Series::new(self.ring.clone(), offset, coeffs))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(other, |a, b| self.ring.add(a, b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(other, |a, b| self.ring.sub(a, b))
    }

    pub fn neg(&self) -> Self {
        let c = self.coeffs.iter().map(|a| self.ring.neg(a)).collect();
        Series::new(self.ring.clone(), self.offset, c)
    }

    pub fn scale(&self, c: &R::Elem) -> Self {
        let coeffs = self.coeffs.iter().map(|a| self.ring.mul(a, c)).collect();
        Series::new(self.ring.clone(), self.offset, coeffs)
    }

    pub fn scale_i64(&self, c: i64) -> Self {
        self.scale(&self.ring.from_i64(c))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.mul_with(other, Exec::default())
    }

    /// Cauchy product. Offsets add and the truncation is
    /// `min(trunc f + offset g, trunc g + offset f)`.
    pub fn mul_with(&self, other: &Self, exec: Exec) -> Result<Self> {
        check_same_ring(&self.ring, &other.ring)?;
        let len = self.coeffs.len().min(other.coeffs.len());
        let coeffs = self.ring.convolve(&self.coeffs, &other.coeffs, len, exec);
        Ok(Series::new(
            self.ring.clone(),
            self.offset + other.offset,
            coeffs,
        ))
    }

    pub fn square(&self) -> Self {
        let len = self.coeffs.len();
        let coeffs = self
            .ring
            .convolve(&self.coeffs, &self.coeffs, len, Exec::default());
        Series::new(self.ring.clone(), 2 * self.offset, coeffs)
    }

    pub fn pow(&self, e: u32) -> Self {
        if e == 0 {
            return Series::one(self.ring.clone(), self.coeffs.len() as i64);
        }
        let mut result: Option<Self> = None;
        let mut base = self.clone();
        let mut e = e;
        loop {
            if e & 1 == 1 {
                result = Some(match result {
                    None => base.clone(),
                    Some(r) => r.mul(&base).expect("same ring"),
                });
            }
            e >>= 1;
            if e == 0 {
                break;
            }
            base = base.square();
        }
        result.expect("e > 0")
    }

    pub fn inverse(&self) -> Result<Self> {
        self.inverse_with(Exec::default())
    }

    /// Multiplicative inverse; the coefficient at the offset must be a unit.
    /// The result has offset `-offset` and the same number of coefficients.
    pub fn inverse_with(&self, exec: Exec) -> Result<Self> {
        let lead = self.coeffs.first().ok_or(Error::InsufficientTruncation {
            index: self.offset,
            trunc: self.trunc(),
        })?;
        let inv0 = self
            .ring
            .unit_inverse(lead)
            .ok_or(Error::NonUnitLeadingCoefficient)?;
        let n = self.coeffs.len();
        let coeffs = if self.ring.fast_convolution() && n > 2 * NTT_THRESHOLD {
            self.newton_inverse(inv0, n, exec)
        } else {
            self.recurrence_inverse(inv0, n)
        };
        Ok(Series::new(self.ring.clone(), -self.offset, coeffs))
    }

    fn recurrence_inverse(&self, inv0: R::Elem, n: usize) -> Vec<R::Elem> {
        let r = &self.ring;
        let a = &self.coeffs;
        let mut out = Vec::with_capacity(n);
        out.push(inv0.clone());
        for k in 1..n {
            let mut s = r.zero();
            for i in 1..=k {
                if !r.is_zero(&a[i]) {
                    s = r.add(&s, &r.mul(&a[i], &out[k - i]));
                }
            }
            out.push(r.neg(&r.mul(&s, &inv0)));
        }
        out
    }

    fn newton_inverse(&self, inv0: R::Elem, n: usize, exec: Exec) -> Vec<R::Elem> {
        let r = &self.ring;
        let mut g = vec![inv0];
        while g.len() < n {
            let next = (2 * g.len()).min(n);
            let fg = r.convolve(&self.coeffs[..next], &g, next, exec);
            // e = 1 - f g, which vanishes below the current length
            let mut e: Vec<R::Elem> = fg.iter().map(|c| r.neg(c)).collect();
            e[0] = r.add(&e[0], &r.one());
            let cur = g.len();
            let corr = r.convolve(&g, &e[cur..], next - cur, exec);
            g.extend(corr);
        }
        g
    }

    /// `q d/dq`: `a_n -> n a_n`.
    pub fn theta(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, a)| {
                self.ring
                    .mul(a, &self.ring.from_i64(self.offset + i as i64))
            })
            .collect();
        Series::new(self.ring.clone(), self.offset, coeffs)
    }

    /// Iterated `theta`.
    pub fn theta_pow(&self, e: u32) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let n = self.ring.from_i64(self.offset + i as i64);
                let mut c = a.clone();
                for _ in 0..e {
                    c = self.ring.mul(&c, &n);
                }
                c
            })
            .collect();
        Series::new(self.ring.clone(), self.offset, coeffs)
    }

    /// `(U_p f)_n = a_{pn}(f)`, truncation `ceil(N / p)`.
    pub fn u_p(&self, p: u64) -> Result<Self> {
        if self.offset < 0 {
            return Err(Error::NegativeOffset {
                offset: self.offset,
            });
        }
        let p = p as i64;
        let trunc = (self.trunc() + p - 1) / p;
        let coeffs = (0..trunc)
            .map(|n| self.coeff(n * p).expect("index below truncation"))
            .collect();
        Ok(Series::new(self.ring.clone(), 0, coeffs))
    }

    /// `(V f)(q) = p^k f(q^p)`; truncation `p N`, optionally capped.
    pub fn v_operator(&self, p: u64, k: u32, cap: Option<i64>) -> Result<Self> {
        if self.offset < 0 {
            return Err(Error::NegativeOffset {
                offset: self.offset,
            });
        }
        let pi = p as i64;
        let mut trunc = pi * self.trunc();
        if let Some(c) = cap {
            trunc = trunc.min(c);
        }
        let offset = (pi * self.offset).min(trunc);
        let mut factor = self.ring.one();
        let pe = self.ring.from_i64(pi);
        for _ in 0..k {
            factor = self.ring.mul(&factor, &pe);
        }
        let coeffs = (offset..trunc)
            .map(|n| {
                if n % pi == 0 {
                    self.ring
                        .mul(&factor, &self.coeffs[(n / pi - self.offset) as usize])
                } else {
                    self.ring.zero()
                }
            })
            .collect();
        Ok(Series::new(self.ring.clone(), offset, coeffs))
    }

    /// Coefficientwise image in another ring via integer representatives.
    pub fn reduce_into<S: CoeffRing>(&self, target: &S) -> Series<S> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|a| target.from_bigint(&self.ring.to_bigint(a)))
            .collect();
        Series::new(target.clone(), self.offset, coeffs)
    }

    /// Text form: a ring line, offset and trunc lines, then one decimal
    /// coefficient per line.
    pub fn write_text<W: Write>(&self, w: &mut W) -> io::Result<()> {
        writeln!(w, "ring {}", self.ring.descriptor())?;
        writeln!(w, "offset {}", self.offset)?;
        writeln!(w, "trunc {}", self.trunc())?;
        for c in &self.coeffs {
            writeln!(w, "{}", self.ring.to_bigint(c))?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_text(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii output")
    }

    pub fn from_text(ring: &R, text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let mut header = |key: &str| -> Result<String> {
            let line = lines
                .next()
                .ok_or_else(|| Error::Parse(format!("missing {key} line")))?;
            line.strip_prefix(key)
                .and_then(|r| r.strip_prefix(' '))
                .map(str::to_owned)
                .ok_or_else(|| Error::Parse(format!("expected {key:?}, found {line:?}")))
        };
        let desc: RingDescriptor = header("ring")?.parse()?;
        if desc != ring.descriptor() {
            return Err(Error::RingMismatch {
                left: desc.to_string(),
                right: ring.descriptor().to_string(),
            });
        }
        let offset: i64 = header("offset")?
            .parse()
            .map_err(|e| Error::Parse(format!("offset: {e}")))?;
        let trunc: i64 = header("trunc")?
            .parse()
            .map_err(|e| Error::Parse(format!("trunc: {e}")))?;
        if trunc < offset {
            return Err(Error::Parse("trunc below offset".into()));
        }
        let bound = match desc {
            RingDescriptor::Padic { .. } => Some(ring.to_bigint(&ring.neg(&ring.one())) + 1),
            RingDescriptor::Integer => None,
        };
        let mut coeffs = Vec::with_capacity((trunc - offset) as usize);
        for line in lines {
            let v: BigInt = line
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad coefficient {line:?}")))?;
            if let Some(m) = &bound {
                if v.is_negative() || &v >= m {
                    return Err(Error::Parse(format!("residue {v} out of range")));
                }
            }
            coeffs.push(ring.from_bigint(&v));
        }
        if coeffs.len() as i64 != trunc - offset {
            return Err(Error::Parse(format!(
                "expected {} coefficients, found {}",
                trunc - offset,
                coeffs.len()
            )));
        }
        Ok(Series::new(ring.clone(), offset, coeffs))
    }
}

impl Series<PadicContext> {
    pub fn ctx(&self) -> PadicContext {
        self.ring
    }

    pub fn padic_coeff(&self, n: i64) -> Result<PadicInt> {
        Ok(self.ring.from_residue(self.coeff(n)?))
    }

    pub fn scale_padic(&self, c: PadicInt) -> Self {
        self.scale(&c.value())
    }
}
