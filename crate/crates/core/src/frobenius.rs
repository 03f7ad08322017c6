//! U_p spectra on the symmetric-power residue piece and the annihilating
//! polynomials built from them.

use serde::{Deserialize, Serialize};

use crate::curve::FrobeniusQuadratic;
use crate::error::{Error, Result};
use crate::padic::{unit_root, PadicContext, PadicInt};

/// Placement of the Tate twist on the residue piece.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TwistConvention {
    /// roots `lambda_a`
    None,
    /// roots `p * lambda_a`
    TateTimesP,
}

impl std::str::FromStr for TwistConvention {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(TwistConvention::None),
            "tate" => Ok(TwistConvention::TateTimesP),
            other => Err(Error::Parse(format!("unknown twist convention {other}"))),
        }
    }
}

impl std::fmt::Display for TwistConvention {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            TwistConvention::None => "none",
            TwistConvention::TateTimesP => "tate",
        })
    }
}

/// `lambda_a = u^{k-2a} p^a` for `a = 0..=k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UpSpectrum {
    pub p: u64,
    pub k: u32,
    pub u: PadicInt,
    pub lambdas: Vec<PadicInt>,
}

pub fn up_spectrum(frob: &FrobeniusQuadratic, k: u32, ctx: &PadicContext) -> Result<UpSpectrum> {
    if frob.p != ctx.p() {
        return Err(Error::InvalidPrime { p: frob.p });
    }
    let u = unit_root(frob.a_p, ctx)?;
    Ok(spectrum_from_unit_root(u, k))
}

/// Spectrum for a given unit root (also used with deliberately wrong roots).
pub fn spectrum_from_unit_root(u: PadicInt, k: u32) -> UpSpectrum {
    let ctx = u.ctx();
    let lambdas = (0..=k)
        .map(|a| u.powi(k as i64 - 2 * a as i64).expect("u is a unit") * ctx.p_power(a))
        .collect();
    UpSpectrum {
        p: ctx.p(),
        k,
        u,
        lambdas,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    ResiduePiece,
    ClassicalPart,
    Product,
    Custom,
}

/// Monic polynomial over `Z/p^B`, coefficients in ascending degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnnihilatorPoly {
    pub coeffs: Vec<PadicInt>,
    pub provenance: Provenance,
}

impl AnnihilatorPoly {
    pub fn one(ctx: &PadicContext) -> Self {
        AnnihilatorPoly {
            coeffs: vec![ctx.one()],
            provenance: Provenance::Custom,
        }
    }

    pub fn from_roots(roots: &[PadicInt], ctx: &PadicContext, provenance: Provenance) -> Self {
        let mut poly = AnnihilatorPoly::one(ctx);
        for &r in roots {
            poly = poly.times_linear(r);
        }
        poly.provenance = provenance;
        poly
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn ctx(&self) -> PadicContext {
        self.coeffs[0].ctx()
    }

    pub fn is_monic(&self) -> bool {
        let lead = *self.coeffs.last().expect("nonempty");
        lead == lead.ctx().one()
    }

    /// `self * (X - mu)`.
    pub fn times_linear(&self, mu: PadicInt) -> Self {
        let n = self.coeffs.len();
        let zero = self.ctx().zero();
        let mut out = vec![zero; n + 1];
        for (i, &c) in self.coeffs.iter().enumerate() {
            out[i + 1] = out[i + 1] + c;
            out[i] = out[i] - mu * c;
        }
        AnnihilatorPoly {
            coeffs: out,
            provenance: self.provenance,
        }
    }

    pub fn eval(&self, x: PadicInt) -> PadicInt {
        self.coeffs
            .iter()
            .rev()
            .fold(self.ctx().zero(), |acc, &c| acc * x + c)
    }

    pub fn derivative_eval(&self, x: PadicInt) -> PadicInt {
        let ctx = self.ctx();
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(ctx.zero(), |acc, (i, &c)| {
                acc * x + c * ctx.element(i as i64)
            })
    }
}

/// `det(X - Frob)` on the residue piece under a twist convention.
pub fn residue_charpoly(spec: &UpSpectrum, twist: TwistConvention) -> AnnihilatorPoly {
    let ctx = spec.u.ctx();
    let scale = match twist {
        TwistConvention::None => ctx.one(),
        TwistConvention::TateTimesP => ctx.p_power(1),
    };
    let roots: Vec<PadicInt> = spec.lambdas.iter().map(|&l| l * scale).collect();
    AnnihilatorPoly::from_roots(&roots, &ctx, Provenance::ResiduePiece)
}

/// `prod_cusp (X^2 - a_p X + p^{k+1}) * ((X - 1)(X - p^{k+1}))^{num_eisenstein}`.
///
/// Both stabilization values are included for each Eisenstein class, so the
/// result is a multiple of the true polynomial whichever one is correct.
pub fn classical_q_poly(
    cusp_eigen_aps: &[i64],
    num_eisenstein: usize,
    k: u32,
    ctx: &PadicContext,
) -> Result<AnnihilatorPoly> {
    let p = ctx.p();
    let bound = 4 * (p as i128).pow(k + 1);
    let mut coeffs = vec![ctx.one()];
    let pk1 = ctx.p_power(k + 1);
    for &a in cusp_eigen_aps {
        if (a as i128).pow(2) > bound {
            return Err(Error::HasseViolation { p, a_p: a });
        }
        let factor = [pk1, -ctx.element(a), ctx.one()];
        coeffs = poly_mul(&coeffs, &factor, ctx);
    }
    let mut poly = AnnihilatorPoly {
        coeffs,
        provenance: Provenance::ClassicalPart,
    };
    for _ in 0..num_eisenstein {
        poly = poly.times_linear(ctx.one()).times_linear(pk1);
    }
    Ok(poly)
}

fn poly_mul(a: &[PadicInt], b: &[PadicInt], ctx: &PadicContext) -> Vec<PadicInt> {
    let mut out = vec![ctx.zero(); a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = out[i + j] + x * y;
        }
    }
    out
}

/// `P(X) Q(X) = sum e_i X^i`.
pub fn product_coeffs(p_poly: &AnnihilatorPoly, q_poly: &AnnihilatorPoly) -> AnnihilatorPoly {
    AnnihilatorPoly {
        coeffs: poly_mul(&p_poly.coeffs, &q_poly.coeffs, &p_poly.ctx()),
        provenance: Provenance::Product,
    }
}

/// Roots of `poly` of valuation exactly `a`, recovered by rescaling
/// `X = p^a Y`, clearing the common power `p^s`, and Hensel-lifting the
/// simple unit roots of the reduction mod p. Returned to precision `B - s + a`.
pub fn roots_of_valuation(poly: &AnnihilatorPoly, a: u32) -> Result<Vec<PadicInt>> {
    let ctx = poly.ctx();
    let p = ctx.p();
    let scaled: Vec<PadicInt> = poly
        .coeffs
        .iter()
        .enumerate()
        .map(|(i, &c)| c * ctx.p_power(a * i as u32))
        .collect();
    let s = scaled.iter().map(|c| c.valuation()).min().unwrap_or(0);
    if s >= ctx.prec() {
        return Err(Error::InsufficientPrecision {
            needed: s + 1,
            available: ctx.prec(),
        });
    }
    let work = ctx.with_precision(ctx.prec() - s)?;
    let divided = AnnihilatorPoly {
        coeffs: scaled
            .iter()
            .map(|c| work.from_residue(c.value() / ctx.p_power(s).value()))
            .collect(),
        provenance: Provenance::Custom,
    };
    let mut roots = Vec::new();
    for y0 in 1..p {
        let y = work.from_residue(y0);
        if !divided.eval(y).value().is_multiple_of(p) || divided.derivative_eval(y).value().is_multiple_of(p) {
            continue;
        }
        let mut y = y;
        for _ in 0..=work.prec().ilog2() + 1 {
            y = y - divided.eval(y) * divided.derivative_eval(y).inverse()?;
        }
        let out_ctx = ctx.with_precision((work.prec() + a).min(ctx.prec()))?;
        roots.push(out_ctx.from_residue(y.value()) * out_ctx.p_power(a));
    }
    Ok(roots)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{a_p, ZHANG_CURVE};

    fn ctx() -> PadicContext {
        PadicContext::new(11, 8).unwrap()
    }

    #[test]
    fn spectrum_examples() {
        let c = ctx();
        let f = a_p(&ZHANG_CURVE, 11).unwrap();
        let s0 = up_spectrum(&f, 0, &c).unwrap();
        assert_eq!(s0.lambdas, vec![c.one()]);
        let s = up_spectrum(&f, 2, &c).unwrap();
        assert_eq!(s.u.value() % 121, 92);
        let u = s.u;
        assert_eq!(s.lambdas[0], u * u);
        assert_eq!(s.lambdas[1], c.element(11));
        assert_eq!(s.lambdas[2], c.element(121) * (u * u).inverse().unwrap());
        let prod = s.lambdas.iter().fold(c.one(), |acc, &l| acc * l);
        assert_eq!(prod, c.p_power(3));
        for (a, l) in s.lambdas.iter().enumerate() {
            assert_eq!(l.valuation(), a as u32);
        }
    }

    #[test]
    fn supersingular_has_no_spectrum() {
        let c = PadicContext::new(5, 4).unwrap();
        let f = a_p(&ZHANG_CURVE, 5).unwrap();
        assert_eq!(
            up_spectrum(&f, 2, &c),
            Err(Error::SupersingularPrime { p: 5 })
        );
    }

    #[test]
    fn residue_charpoly_examples() {
        let c = ctx();
        let f = a_p(&ZHANG_CURVE, 11).unwrap();
        let s0 = up_spectrum(&f, 0, &c).unwrap();
        let p0 = residue_charpoly(&s0, TwistConvention::None);
        assert_eq!(p0.coeffs, vec![-c.one(), c.one()]);
        let s = up_spectrum(&f, 2, &c).unwrap();
        let p = residue_charpoly(&s, TwistConvention::None);
        assert_eq!(p.degree(), 3);
        assert!(p.is_monic());
        assert_eq!(p.coeffs[0], -c.p_power(3));
        for &l in &s.lambdas {
            assert!(p.eval(l).is_zero());
        }
        let t = residue_charpoly(&s, TwistConvention::TateTimesP);
        assert_eq!(t.coeffs[0], -c.p_power(6));
        assert!(t.eval(s.lambdas[0] * c.element(11)).is_zero());
    }

    #[test]
    fn classical_examples() {
        let c = ctx();
        let q = classical_q_poly(&[], 1, 2, &c).unwrap();
        assert_eq!(
            q.coeffs,
            vec![c.p_power(3), -(c.one() + c.p_power(3)), c.one()]
        );
        assert_eq!(
            classical_q_poly(&[], 0, 2, &c).unwrap().coeffs,
            vec![c.one()]
        );
        let q = classical_q_poly(&[0], 0, 2, &c).unwrap();
        assert_eq!(q.coeffs, vec![c.p_power(3), c.zero(), c.one()]);
        assert_eq!(
            classical_q_poly(&[1000], 0, 2, &c),
            Err(Error::HasseViolation { p: 11, a_p: 1000 })
        );
    }

    #[test]
    fn product_examples() {
        let c = ctx();
        let lin = AnnihilatorPoly::from_roots(&[c.one()], &c, Provenance::Custom);
        let sq = product_coeffs(&lin, &lin);
        assert_eq!(sq.coeffs, vec![c.one(), -c.element(2), c.one()]);
        assert_eq!(
            product_coeffs(&lin, &AnnihilatorPoly::one(&c)).coeffs,
            lin.coeffs
        );
        let f = a_p(&ZHANG_CURVE, 11).unwrap();
        let s = up_spectrum(&f, 2, &c).unwrap();
        let p = residue_charpoly(&s, TwistConvention::None);
        let q = classical_q_poly(&[], 1, 2, &c).unwrap();
        let e = product_coeffs(&p, &q);
        assert_eq!(e.degree(), 5);
        assert_eq!(e.provenance, Provenance::Product);
    }

    #[test]
    fn roots_recovered_by_slope() {
        let c = PadicContext::new(11, 12).unwrap();
        let f = a_p(&ZHANG_CURVE, 11).unwrap();
        let s = up_spectrum(&f, 2, &c).unwrap();
        let p = residue_charpoly(&s, TwistConvention::None);
        let m = c.p().pow(c.prec() - 2);
        for a in 0..3u32 {
            let roots = roots_of_valuation(&p, a).unwrap();
            assert_eq!(roots.len(), 1, "slope {a}");
            assert_eq!(roots[0].value() % m, s.lambdas[a as usize].value() % m);
        }
    }

    #[test]
    fn twist_parse() {
        assert_eq!(
            "none".parse::<TwistConvention>().unwrap(),
            TwistConvention::None
        );
        assert_eq!(
            "tate".parse::<TwistConvention>().unwrap(),
            TwistConvention::TateTimesP
        );
        assert!("x".parse::<TwistConvention>().is_err());
    }
}
