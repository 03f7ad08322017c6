//! Long-Weierstrass curves over Q and their reductions at primes p > 3.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::is_prime;
use crate::par::Exec;

/// `y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WeierstrassCurve {
    pub a1: i64,
    pub a2: i64,
    pub a3: i64,
    pub a4: i64,
    pub a6: i64,
}

/// The CM curve `y^2 + xy = x^3 - x^2 - 2x - 1`.
pub const ZHANG_CURVE: WeierstrassCurve = WeierstrassCurve::new([1, -1, 0, -2, -1]);

fn big(x: i64) -> BigInt {
    BigInt::from(x)
}

impl WeierstrassCurve {
    pub const fn new(a: [i64; 5]) -> Self {
        WeierstrassCurve {
            a1: a[0],
            a2: a[1],
            a3: a[2],
            a4: a[3],
            a6: a[4],
        }
    }

    pub fn coefficients(&self) -> [i64; 5] {
        [self.a1, self.a2, self.a3, self.a4, self.a6]
    }

    /// `(b2, b4, b6, b8)`.
    pub fn b_invariants(&self) -> [BigInt; 4] {
        let [a1, a2, a3, a4, a6] = self.coefficients().map(big);
        let b2 = &a1 * &a1 + 4 * &a2;
        let b4 = 2 * &a4 + &a1 * &a3;
        let b6 = &a3 * &a3 + 4 * &a6;
        let b8 = &a1 * &a1 * &a6 + 4 * &a2 * &a6 - &a1 * &a3 * &a4 + &a2 * &a3 * &a3 - &a4 * &a4;
        [b2, b4, b6, b8]
    }

    pub fn c4(&self) -> BigInt {
        let [b2, b4, _, _] = self.b_invariants();
        &b2 * &b2 - 24 * b4
    }

    pub fn c6(&self) -> BigInt {
        let [b2, b4, b6, _] = self.b_invariants();
        -(&b2 * &b2 * &b2) + 36 * &b2 * &b4 - 216 * b6
    }

    pub fn discriminant(&self) -> BigInt {
        let [b2, b4, b6, b8] = self.b_invariants();
        -(&b2 * &b2 * &b8) - 8 * &b4 * &b4 * &b4 - 27 * &b6 * &b6 + 9 * &b2 * &b4 * &b6
    }

    /// `c4^3 / disc`.
    pub fn j_invariant(&self) -> Result<BigRational> {
        let d = self.discriminant();
        if d.is_zero() {
            return Err(Error::SingularCurve);
        }
        let c4 = self.c4();
        Ok(BigRational::new(&c4 * &c4 * &c4, d))
    }

    /// Substitution `x = X + r`, `y = Y + sX + t`.
    pub fn change_coordinates(&self, r: i64, s: i64, t: i64) -> Result<Self> {
        let [a1, a2, a3, a4, a6] = self.coefficients().map(|a| a as i128);
        let (r, s, t) = (r as i128, s as i128, t as i128);
        let n1 = a1 + 2 * s;
        let n2 = a2 - s * a1 + 3 * r - s * s;
        let n3 = a3 + r * a1 + 2 * t;
        let n4 = a4 - s * a3 + 2 * r * a2 - (t + r * s) * a1 + 3 * r * r - 2 * s * t;
        let n6 = a6 + r * a4 + r * r * a2 + r * r * r - t * a3 - t * t - r * t * a1;
        let fit = |v: i128| i64::try_from(v).map_err(|_| Error::CoefficientOverflow);
        Ok(WeierstrassCurve::new([
            fit(n1)?,
            fit(n2)?,
            fit(n3)?,
            fit(n4)?,
            fit(n6)?,
        ]))
    }

    /// `y^2 = x^3 + d b2 x^2 + 8 d^2 b4 x + 16 d^3 b6`, the twist by `Q(sqrt d)`.
    pub fn quadratic_twist(&self, d: i64) -> Result<Self> {
        let [b2, b4, b6, _] = self.b_invariants();
        let d = big(d);
        let fit = |v: BigInt| v.to_i64().ok_or(Error::CoefficientOverflow);
        Ok(WeierstrassCurve::new([
            0,
            fit(&d * b2)?,
            0,
            fit(8 * &d * &d * b4)?,
            fit(16 * &d * &d * &d * b6)?,
        ]))
    }
}

impl std::fmt::Display for WeierstrassCurve {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let [a1, a2, a3, a4, a6] = self.coefficients();
        write!(f, "[{a1},{a2},{a3},{a4},{a6}]")
    }
}

impl std::str::FromStr for WeierstrassCurve {
    type Err = Error;

    /// Five integers separated by commas and/or whitespace, optional brackets.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<i64> = s
            .trim()
            .trim_start_matches('[')
            .trim_end_matches(']')
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<i64>()
                    .map_err(|e| Error::Parse(format!("{t}: {e}")))
            })
            .collect::<Result<_>>()?;
        let a: [i64; 5] = parts.try_into().map_err(|v: Vec<i64>| {
            Error::Parse(format!("expected 5 coefficients, got {}", v.len()))
        })?;
        let c = WeierstrassCurve::new(a);
        if c.discriminant().is_zero() {
            return Err(Error::SingularCurve);
        }
        Ok(c)
    }
}

fn mod_p(x: &BigInt, p: u64) -> u64 {
    x.mod_floor(&BigInt::from(p))
        .to_u64()
        .expect("residue below p")
}

/// `x in F_p` is a square (0 included).
#[derive(Clone, Debug)]
pub struct QrTable {
    p: u64,
    square: Vec<bool>,
}

impl QrTable {
    pub fn new(p: u64) -> Self {
        let mut square = vec![false; p as usize];
        for x in 0..p.div_ceil(2) + 1 {
            square[((x * x) % p) as usize] = true;
        }
        QrTable { p, square }
    }

    /// Legendre symbol.
    pub fn chi(&self, x: u64) -> i64 {
        let x = x % self.p;
        if x == 0 {
            0
        } else if self.square[x as usize] {
            1
        } else {
            -1
        }
    }

    pub fn non_residue(&self) -> u64 {
        (2..self.p)
            .find(|&x| !self.square[x as usize])
            .expect("p > 2")
    }
}

/// A curve over F_p in the form `Y^2 = 4x^3 + b2 x^2 + 2 b4 x + b6`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ReducedCurve {
    pub p: u64,
    pub b2: u64,
    pub b4: u64,
    pub b6: u64,
}

fn check_prime(p: u64) -> Result<()> {
    if p <= 3 || !is_prime(p) {
        return Err(Error::InvalidPrime { p });
    }
    Ok(())
}

impl ReducedCurve {
    /// `y^2 = x^3 + A x + B` over F_p.
    pub fn short(p: u64, a: u64, b: u64) -> Result<Self> {
        check_prime(p)?;
        let (a, b) = (a % p, b % p);
        let p128 = p as u128;
        let disc = (4 * (a as u128).pow(3) % p128 + 27 * (b as u128).pow(2) % p128) % p128;
        if disc == 0 {
            return Err(Error::BadReduction { p });
        }
        // 4x^3 + 4Ax + 4B
        Ok(ReducedCurve {
            p,
            b2: 0,
            b4: (2 * a) % p,
            b6: (4 * b) % p,
        })
    }

    /// `4x^3 + b2 x^2 + 2 b4 x + b6` at `x`.
    fn cubic(&self, x: u64) -> u64 {
        let p = self.p as u128;
        let x = x as u128;
        let v = ((4 * x + self.b2 as u128) % p * x % p + 2 * self.b4 as u128) % p * x % p
            + self.b6 as u128;
        (v % p) as u64
    }

    pub fn count_points_with(&self, qr: &QrTable) -> u64 {
        let mut count: i64 = 1;
        for x in 0..self.p {
            count += 1 + qr.chi(self.cubic(x));
        }
        count as u64
    }

    pub fn count_points(&self) -> u64 {
        self.count_points_with(&QrTable::new(self.p))
    }

    /// Points on the quadratic twist by a non-residue.
    pub fn count_twist_points_with(&self, qr: &QrTable) -> u64 {
        let d = qr.non_residue();
        let mut count: i64 = 1;
        for x in 0..self.p {
            count += 1 + qr.chi((self.cubic(x) as u128 * d as u128 % self.p as u128) as u64);
        }
        count as u64
    }
}

pub fn reduce_and_validate(curve: &WeierstrassCurve, p: u64) -> Result<ReducedCurve> {
    check_prime(p)?;
    if mod_p(&curve.discriminant(), p) == 0 {
        return Err(Error::BadReduction { p });
    }
    let [b2, b4, b6, _] = curve.b_invariants();
    Ok(ReducedCurve {
        p,
        b2: mod_p(&b2, p),
        b4: mod_p(&b4, p),
        b6: mod_p(&b6, p),
    })
}

/// `|C(F_p)|` including the point at infinity.
pub fn count_points(curve: &WeierstrassCurve, p: u64) -> Result<u64> {
    Ok(reduce_and_validate(curve, p)?.count_points())
}

/// Frobenius data `X^2 - a_p X + p` of a curve at a good prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FrobeniusQuadratic {
    pub p: u64,
    pub a_p: i64,
    pub ordinary: bool,
}

impl FrobeniusQuadratic {
    pub fn new(p: u64, a_p: i64) -> Result<Self> {
        if (a_p as i128).pow(2) > 4 * p as i128 {
            return Err(Error::HasseViolation { p, a_p });
        }
        Ok(FrobeniusQuadratic {
            p,
            a_p,
            ordinary: a_p.rem_euclid(p as i64) != 0,
        })
    }
}

fn trace_from_count(p: u64, count: u64) -> Result<FrobeniusQuadratic> {
    FrobeniusQuadratic::new(p, p as i64 + 1 - count as i64)
}

pub fn a_p(curve: &WeierstrassCurve, p: u64) -> Result<FrobeniusQuadratic> {
    trace_from_count(p, count_points(curve, p)?)
}

/// `a_p` over a list of primes; failures are kept per prime.
pub fn a_p_many(
    curve: &WeierstrassCurve,
    primes: &[u64],
    exec: Exec,
) -> Vec<(u64, Result<FrobeniusQuadratic>)> {
    exec.map_slice(primes, |&p| (p, a_p(curve, p)))
}

/// One curve over F_p with the given j-invariant.
pub fn curve_with_j(j: u64, p: u64) -> Result<ReducedCurve> {
    check_prime(p)?;
    let j = j % p;
    if j == 0 {
        return ReducedCurve::short(p, 0, 1);
    }
    if j == 1728 % p {
        return ReducedCurve::short(p, 1, 0);
    }
    // y^2 = x^3 + 3c x + 2c with c = j / (1728 - j)
    let denom = (1728 % p + p - j) % p;
    let inv = crate::padic::PadicContext::new(p, 1)?
        .inv_mod(denom)
        .expect("j != 1728");
    let c = (j as u128 * inv as u128 % p as u128) as u64;
    ReducedCurve::short(p, 3 * c % p, 2 * c % p)
}

/// Supersingular j-invariants lying in F_p.
pub fn supersingular_j_list(p: u64) -> Result<Vec<u64>> {
    supersingular_j_list_with(p, Exec::default())
}

pub fn supersingular_j_list_with(p: u64, exec: Exec) -> Result<Vec<u64>> {
    check_prime(p)?;
    let qr = QrTable::new(p);
    let flags = exec.map_range(p as usize, |j| {
        let c = curve_with_j(j as u64, p).expect("model is nonsingular for every j");
        let base = c.count_points_with(&qr) == p + 1;
        let twist = c.count_twist_points_with(&qr) == p + 1;
        assert_eq!(
            base, twist,
            "twists disagree on supersingularity at j = {j}"
        );
        base
    });
    Ok((0..p).filter(|&j| flags[j as usize]).collect())
}

/// `F_{p^2} = F_p[s] / (s^2 - n)` for a non-residue `n`.
#[derive(Clone, Copy, Debug)]
struct Fp2 {
    p: u64,
    n: u64,
}

type Fp2Elem = (u64, u64);

impl Fp2 {
    fn mul(&self, x: Fp2Elem, y: Fp2Elem) -> Fp2Elem {
        let p = self.p as u128;
        let (a, b, c, d) = (x.0 as u128, x.1 as u128, y.0 as u128, y.1 as u128);
        let re = (a * c + b * d % p * self.n as u128) % p;
        let im = (a * d + b * c) % p;
        (re as u64, im as u64)
    }

    fn add(&self, x: Fp2Elem, y: Fp2Elem) -> Fp2Elem {
        ((x.0 + y.0) % self.p, (x.1 + y.1) % self.p)
    }

    fn sub(&self, x: Fp2Elem, y: Fp2Elem) -> Fp2Elem {
        ((x.0 + self.p - y.0) % self.p, (x.1 + self.p - y.1) % self.p)
    }

    fn scalar(&self, c: u64) -> Fp2Elem {
        (c % self.p, 0)
    }

    fn inv(&self, x: Fp2Elem) -> Fp2Elem {
        let p = self.p as u128;
        let norm = ((x.0 as u128 * x.0 as u128) % p + p
            - (x.1 as u128 * x.1 as u128) % p * self.n as u128 % p)
            % p;
        let ni = crate::padic::PadicContext::new(self.p, 1)
            .expect("p > 3 prime")
            .inv_mod(norm as u64)
            .expect("nonzero norm");
        self.mul((x.0, (self.p - x.1) % self.p), (ni, 0))
    }
}

/// All supersingular j-invariants over the algebraic closure of F_p, as
/// elements `a + b s` of `F_{p^2}`, found from the Legendre parameters that
/// are roots of `sum_i C(m, i)^2 x^i`, `m = (p - 1) / 2`.
pub fn supersingular_j_closure(p: u64) -> Result<Vec<(u64, u64)>> {
    check_prime(p)?;
    let qr = QrTable::new(p);
    let f = Fp2 {
        p,
        n: qr.non_residue(),
    };
    let m = (p - 1) / 2;
    let ctx = crate::padic::PadicContext::new(p, 1)?;
    // C(m, i)^2 mod p
    let mut hasse = Vec::with_capacity(m as usize + 1);
    let mut binom = 1u64;
    for i in 0..=m {
        hasse.push(ctx.mul_mod(binom, binom));
        if i < m {
            binom = ctx.mul_mod(binom, m - i);
            binom = ctx.mul_mod(binom, ctx.inv_mod(i + 1).expect("i + 1 < p"));
        }
    }
    let mut found = std::collections::BTreeSet::new();
    for a in 0..p {
        for b in 0..p {
            let lam = (a, b);
            if lam == (0, 0) || lam == (1, 0) {
                continue;
            }
            let mut v = (0, 0);
            for &c in hasse.iter().rev() {
                v = f.add(f.mul(v, lam), f.scalar(c));
            }
            if v != (0, 0) {
                continue;
            }
            // j = 256 (l^2 - l + 1)^3 / (l^2 (l - 1)^2)
            let l2 = f.mul(lam, lam);
            let t = f.add(f.sub(l2, lam), (1, 0));
            let num = f.mul(f.scalar(256), f.mul(t, f.mul(t, t)));
            let lm1 = f.sub(lam, (1, 0));
            let den = f.mul(l2, f.mul(lm1, lm1));
            found.insert(f.mul(num, f.inv(den)));
        }
    }
    Ok(found.into_iter().collect())
}

/// Primes `p` with `lo <= p <= hi`.
pub fn primes_between(lo: u64, hi: u64) -> Vec<u64> {
    (lo..=hi).filter(|&p| is_prime(p)).collect()
}

/// Eichler-Deuring bracket for the number of supersingular j over the closure.
pub fn mass_bracket(p: u64) -> (usize, usize) {
    let base = ((p - 1) / 12) as usize;
    (base, base + 2)
}
