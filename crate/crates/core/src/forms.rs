//! q-expansions of the level-1 forms E4, E6, Delta, j and of meromorphic
//! forms with a pole at a point `j0` of the j-line.
//!
//! Poles are cleared through `j - j0 = (E4^3 - j0 Delta) / Delta`, so every
//! meromorphic form is a polynomial in E4, E6, Delta times a power of the
//! inverse of the unit series `E4^3 - j0 Delta`.

use std::collections::HashMap;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qseries::{CoeffRing, Series};

/// `sigma_k(n)` for `0 <= n < len` (index 0 holds zero), by divisor sieve.
pub fn sigma_table<R: CoeffRing>(ring: &R, k: u32, len: usize) -> Vec<R::Elem> {
    let mut table = vec![ring.zero(); len];
    for d in 1..len {
        let base = ring.from_i64(d as i64);
        let mut dk = ring.one();
        for _ in 0..k {
            dk = ring.mul(&dk, &base);
        }
        for m in (d..len).step_by(d) {
            table[m] = ring.add(&table[m], &dk);
        }
    }
    table
}

/// Exact divisor sums.
pub fn sigma_table_exact(k: u32, len: usize) -> Vec<BigInt> {
    sigma_table(&crate::qseries::Integers, k, len)
}

/// `E4 = 1 + 240 sum sigma_3(n) q^n` and `E6 = 1 - 504 sum sigma_5(n) q^n`.
pub fn eisenstein<R: CoeffRing>(k: u32, trunc: usize, ring: &R) -> Result<Series<R>> {
    let (power, factor) = match k {
        4 => (3, 240),
        6 => (5, -504),
        _ => return Err(Error::UnsupportedWeight { k }),
    };
    let f = ring.from_i64(factor);
    let mut coeffs: Vec<R::Elem> = sigma_table(ring, power, trunc)
        .iter()
        .map(|s| ring.mul(s, &f))
        .collect();
    if let Some(c0) = coeffs.first_mut() {
        *c0 = ring.one();
    }
    Ok(Series::new(ring.clone(), 0, coeffs))
}

/// `prod_{n>=1} (1 - q^n)^3` through Jacobi's identity
/// `sum_{m>=0} (-1)^m (2m+1) q^{m(m+1)/2}`.
fn euler_cubed<R: CoeffRing>(len: usize, ring: &R) -> Series<R> {
    let mut coeffs = vec![ring.zero(); len];
    let mut m: i64 = 0;
    loop {
        let e = (m * (m + 1) / 2) as usize;
        if e >= len {
            break;
        }
        let c = if m % 2 == 0 { 2 * m + 1 } else { -(2 * m + 1) };
        coeffs[e] = ring.from_i64(c);
        m += 1;
    }
    Series::new(ring.clone(), 0, coeffs)
}

/// `Delta = q prod (1 - q^n)^24`, offset 1, known below `q^trunc`.
pub fn delta<R: CoeffRing>(trunc: usize, ring: &R) -> Series<R> {
    assert!(trunc >= 2, "Delta needs trunc >= 2");
    let e3 = euler_cubed(trunc - 1, ring);
    let e24 = e3.square().square().square();
    Series::new(ring.clone(), 1, e24.into_coeffs())
}

/// `Delta = (E4^3 - E6^2) / 1728`, the second construction route.
pub fn delta_from_eisenstein<R: CoeffRing>(trunc: usize, ring: &R) -> Result<Series<R>> {
    let e4 = eisenstein(4, trunc, ring)?;
    let e6 = eisenstein(6, trunc, ring)?;
    delta_from_parts(&e4.square().mul(&e4)?, &e6)
}

fn delta_from_parts<R: CoeffRing>(e4_cubed: &Series<R>, e6: &Series<R>) -> Result<Series<R>> {
    let ring = e4_cubed.ring();
    let diff = e4_cubed.sub(&e6.square())?;
    let coeffs = diff
        .coeffs()
        .iter()
        .map(|c| {
            ring.div_exact(c, 1728)
                .ok_or(Error::NotDivisible { divisor: 1728 })
        })
        .collect::<Result<Vec<_>>>()?;
    if !ring.is_zero(&coeffs[0]) {
        return Err(Error::Parse("E4^3 - E6^2 has a constant term".into()));
    }
    Ok(Series::new(ring.clone(), 0, coeffs).with_offset(1))
}

/// `j = E4^3 / Delta`, offset -1, known below `q^trunc`.
pub fn j_series<R: CoeffRing>(trunc: usize, ring: &R) -> Result<Series<R>> {
    let work = trunc + 2;
    let e4 = eisenstein(4, work, ring)?;
    let e4_cubed = e4.square().mul(&e4)?;
    let j = e4_cubed.mul(&delta(work, ring).inverse()?)?;
    Ok(j.truncate(trunc as i64))
}

/// `E4^a E6^b Delta^c`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Monomial {
    pub e4: u32,
    pub e6: u32,
    pub delta: u32,
}

impl Monomial {
    pub fn weight(&self) -> u32 {
        4 * self.e4 + 6 * self.e6 + 12 * self.delta
    }
}

/// `coeff * numerator / (E4^3 - j0 Delta)^pole_order`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeroTerm {
    pub coeff: i64,
    pub pole_order: u32,
    pub numerator: Monomial,
}

/// A weight `k + 2` form with poles only along `j = j0`.
///
/// Each term's numerator weight minus `12 * pole_order` equals `k + 2`;
/// `E4 / (j - j0)^m` is the term with numerator `E4 Delta^m`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeroFormSpec {
    pub k: u32,
    pub j0: i64,
    pub terms: Vec<MeroTerm>,
}

impl MeroFormSpec {
    /// `sum c_m E4 / (j - j0)^m` (weight 4, so `k = 2`).
    pub fn e4_poles(j0: i64, terms: &[(i64, u32)]) -> Self {
        MeroFormSpec {
            k: 2,
            j0,
            terms: terms
                .iter()
                .map(|&(coeff, m)| MeroTerm {
                    coeff,
                    pole_order: m,
                    numerator: Monomial {
                        e4: 1,
                        e6: 0,
                        delta: m,
                    },
                })
                .collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.j0 == 0 || self.j0 == 1728 {
            return Err(Error::EllipticPole { j0: self.j0 });
        }
        for t in &self.terms {
            let w = t.numerator.weight();
            if t.pole_order == 0 || w != self.k + 2 + 12 * t.pole_order {
                return Err(Error::WeightMismatch {
                    numerator: w,
                    pole_order: t.pole_order,
                    target: self.k + 2,
                });
            }
        }
        Ok(())
    }

    pub fn max_pole_order(&self) -> u32 {
        self.terms.iter().map(|t| t.pole_order).max().unwrap_or(0)
    }
}

/// Shared building blocks for forms with a pole at one `j0`.
pub struct MeroBuilder<R: CoeffRing> {
    trunc: usize,
    e4: Series<R>,
    e6: Series<R>,
    delta: Series<R>,
    /// `Delta / (E4^3 - j0 Delta) = 1 / (j - j0)`, offset 1
    inv_j_shift: Series<R>,
    inv_j_shift_powers: Vec<Series<R>>,
    terms: HashMap<(Monomial, u32), Series<R>>,
}

impl<R: CoeffRing> MeroBuilder<R> {
    pub fn new(j0: i64, trunc: usize, ring: &R) -> Result<Self> {
        if j0 == 0 || j0 == 1728 {
            return Err(Error::EllipticPole { j0 });
        }
        if trunc < 2 {
            return Err(Error::InsufficientTruncation {
                index: 1,
                trunc: trunc as i64,
            });
        }
        let e4 = eisenstein(4, trunc, ring)?;
        let e6 = eisenstein(6, trunc, ring)?;
        let e4_cubed = e4.square().mul(&e4)?;
        let delta = delta_from_parts(&e4_cubed, &e6)?;
        let denom = e4_cubed.sub(&delta.scale(&ring.from_i64(j0)))?;
        let inv_j_shift = delta.mul(&denom.inverse()?)?;
        Ok(MeroBuilder {
            trunc,
            e4,
            e6,
            delta,
            inv_j_shift: inv_j_shift.clone(),
            inv_j_shift_powers: vec![inv_j_shift],
            terms: HashMap::new(),
        })
    }

    /// `(j - j0)^{-m}`.
    fn pole_power(&mut self, m: u32) -> Result<Series<R>> {
        while self.inv_j_shift_powers.len() < m as usize {
            let last = self.inv_j_shift_powers.last().expect("nonempty");
            let next = last.mul(&self.inv_j_shift)?;
            self.inv_j_shift_powers.push(next);
        }
        Ok(self.inv_j_shift_powers[m as usize - 1].clone())
    }

    /// `E4^a E6^b Delta^c / (E4^3 - j0 Delta)^m`.
    fn term(&mut self, t: &MeroTerm) -> Result<Series<R>> {
        let key = (t.numerator, t.pole_order);
        if !self.terms.contains_key(&key) {
            let mon = t.numerator;
            let m = t.pole_order;
            // Delta^m (E4^3 - j0 Delta)^{-m} = (j - j0)^{-m}
            if mon.delta < m {
                return Err(Error::WeightMismatch {
                    numerator: mon.weight(),
                    pole_order: m,
                    target: mon.weight().saturating_sub(12 * m),
                });
            }
            let prev = Monomial {
                delta: mon.delta.wrapping_sub(1),
                ..mon
            };
            if m > 1 && self.terms.contains_key(&(prev, m - 1)) {
                let acc = self.terms[&(prev, m - 1)].mul(&self.inv_j_shift)?;
                self.terms.insert(key, acc);
                let ring = self.e4.ring().clone();
                return Ok(self.terms[&key].scale(&ring.from_i64(t.coeff)));
            }
            let mut acc = self.pole_power(m)?;
            if mon.e4 > 0 {
                acc = acc.mul(&self.e4.pow(mon.e4))?;
            }
            if mon.e6 > 0 {
                acc = acc.mul(&self.e6.pow(mon.e6))?;
            }
            if mon.delta > m {
                acc = acc.mul(&self.delta.pow(mon.delta - m))?;
            }
            self.terms.insert(key, acc);
        }
        let ring = self.e4.ring().clone();
        Ok(self.terms[&key].scale(&ring.from_i64(t.coeff)))
    }

    pub fn form(&mut self, spec: &MeroFormSpec) -> Result<Series<R>> {
        spec.validate()?;
        let ring = self.e4.ring().clone();
        let mut total = Series::zero(ring, 0, self.trunc as i64);
        for t in &spec.terms {
            total = total.add(&self.term(t)?.with_offset(0))?;
        }
        let total = total.truncate(self.trunc as i64);
        if total.trunc() < self.trunc as i64 {
            return Err(Error::InsufficientTruncation {
                index: self.trunc as i64 - 1,
                trunc: total.trunc(),
            });
        }
        Ok(total)
    }
}

/// Expansion of a meromorphic form at the cusp, offset 0, known below `q^trunc`.
pub fn mero_form<R: CoeffRing>(spec: &MeroFormSpec, trunc: usize, ring: &R) -> Result<Series<R>> {
    spec.validate()?;
    MeroBuilder::new(spec.j0, trunc, ring)?.form(spec)
}

/// j-invariant of the CM curve `y^2 + xy = x^3 - x^2 - 2x - 1`.
pub const ZHANG_J0: i64 = -3375;

/// Coefficients `(c, m)` of `sum c E4 / (j + 3375)^m` for `f1, f2, f3`.
pub const ZHANG_TERMS: [&[(i64, u32)]; 3] = [
    &[(1, 1)],
    &[(19, 1), (-91125, 2)],
    &[(1399, 1), (-19008675, 2), (54251268750, 3)],
];

pub fn zhang_specs() -> [MeroFormSpec; 3] {
    ZHANG_TERMS.map(|t| MeroFormSpec::e4_poles(ZHANG_J0, t))
}

/// The weight-4 forms `f1, f2, f3` spanning the Sym^2 residue piece at
/// `j = -3375`.
#[derive(Clone, Debug, PartialEq)]
pub struct ZhangBasis<R: CoeffRing> {
    pub forms: [Series<R>; 3],
}

impl<R: CoeffRing> ZhangBasis<R> {
    pub fn f1(&self) -> &Series<R> {
        &self.forms[0]
    }
    pub fn f2(&self) -> &Series<R> {
        &self.forms[1]
    }
    pub fn f3(&self) -> &Series<R> {
        &self.forms[2]
    }
}

pub fn zhang_basis<R: CoeffRing>(trunc: usize, ring: &R) -> Result<ZhangBasis<R>> {
    let mut builder = MeroBuilder::new(ZHANG_J0, trunc, ring)?;
    let [a, b, c] = zhang_specs();
    Ok(ZhangBasis {
        forms: [builder.form(&a)?, builder.form(&b)?, builder.form(&c)?],
    })
}
