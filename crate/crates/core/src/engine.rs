//! Congruence checks on q-expansions: the theta^{k+1}-image test, single
//! eigenvalue congruences, polynomial annihilators, the aggregate
//! coefficient congruence, and the convention calibrator.
//!
//! Every check reduces coefficients into `Z/p^B` and compares the p-adic
//! valuation of a difference with a required exponent. A record whose
//! requirement cannot be resolved at precision `B`, or whose coefficients lie
//! beyond the series truncation, is inconclusive and never a pass.

use serde::{Deserialize, Serialize};

use crate::curve::{a_p, FrobeniusQuadratic, WeierstrassCurve};
use crate::error::{Error, Result};
use crate::forms::{zhang_basis, ZhangBasis};
use crate::frobenius::{
    residue_charpoly, spectrum_from_unit_root, up_spectrum, AnnihilatorPoly, TwistConvention,
    UpSpectrum,
};
use crate::padic::{PadicContext, PadicInt};
use crate::par::Exec;
use crate::qseries::{CoeffRing, RingDescriptor, Series};

/// Extra digits carried beyond the largest required exponent.
pub const PRECISION_MARGIN: u32 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    ThetaImage,
    Eigen,
    Annihilator,
    Aggregate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
    Skipped,
}

/// Outcome of comparing an observed valuation (capped at `prec`) with a
/// required exponent.
pub fn classify(observed: u32, required: u32, prec: u32) -> Status {
    if observed >= required && required <= prec {
        Status::Pass
    } else if observed < required && observed < prec {
        Status::Fail
    } else {
        Status::Inconclusive
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub kind: CheckKind,
    pub label: String,
    pub n: i64,
    pub l: u32,
    /// residues mod `p^B`
    pub left: Option<u64>,
    pub right: Option<u64>,
    pub required_exponent: u32,
    /// `None` when a coefficient lies beyond the truncation
    pub observed_valuation: Option<u32>,
    pub status: Status,
    pub p_divides_n: bool,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub inconclusive: usize,
    pub skipped: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CongruenceReport {
    pub records: Vec<CheckRecord>,
    pub notes: Vec<String>,
}

impl CongruenceReport {
    pub fn summary(&self) -> Summary {
        let mut s = Summary {
            total: self.records.len(),
            ..Summary::default()
        };
        for r in &self.records {
            match r.status {
                Status::Pass => s.passed += 1,
                Status::Fail => s.failed += 1,
                Status::Inconclusive => s.inconclusive += 1,
                Status::Skipped => s.skipped += 1,
            }
        }
        s
    }

    /// No failures and nothing inconclusive (skips allowed).
    pub fn all_pass(&self) -> bool {
        self.records
            .iter()
            .all(|r| matches!(r.status, Status::Pass | Status::Skipped))
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.records.iter().filter(|r| r.status == Status::Fail)
    }

    pub fn with_label<'a>(&'a self, label: &'a str) -> impl Iterator<Item = &'a CheckRecord> + 'a {
        self.records.iter().filter(move |r| r.label == label)
    }

    pub fn extend(&mut self, other: CongruenceReport) {
        self.records.extend(other.records);
        self.notes.extend(other.notes);
    }

    fn relabel(mut self, label: &str) -> Self {
        for r in &mut self.records {
            r.label = label.to_string();
        }
        self
    }
}

/// Exponent constant `c` in the scaling `p^{c (M - i)}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpConst {
    One,
    WeightPlusOne,
}

impl ExpConst {
    pub fn value(&self, k: u32) -> u32 {
        match self {
            ExpConst::One => 1,
            ExpConst::WeightPlusOne => k + 1,
        }
    }
}

impl std::str::FromStr for ExpConst {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "1" => Ok(ExpConst::One),
            "k1" => Ok(ExpConst::WeightPlusOne),
            other => Err(Error::Parse(format!("unknown exponent constant {other}"))),
        }
    }
}

impl std::fmt::Display for ExpConst {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ExpConst::One => "1",
            ExpConst::WeightPlusOne => "k1",
        })
    }
}

/// Smallest `e` with `p^e >= n`.
pub fn ceil_log(p: u64, n: u64) -> u32 {
    let mut e = 0;
    let mut pe: u128 = 1;
    while pe < n as u128 {
        pe *= p as u128;
        e += 1;
    }
    e
}

/// Largest `e` with `p^e <= n` (`n >= 1`).
pub fn floor_log(p: u64, n: u64) -> u32 {
    let mut e = 0;
    let mut pe: u128 = p as u128;
    while pe <= n as u128 {
        pe *= p as u128;
        e += 1;
    }
    e
}

/// `(k+1) l_max + (k+1) ceil(log_p N) + M + 4`, the conservative budget
/// covering every check on a series of truncation `N`.
pub fn full_precision_budget(p: u64, k: u32, l_max: u32, trunc: usize, m: u32) -> u32 {
    (k + 1) * l_max + (k + 1) * ceil_log(p, trunc as u64) + m + PRECISION_MARGIN
}

/// Precision for eigen and aggregate congruences up to `l_max`.
pub fn eigen_precision(k: u32, l_max: u32) -> u32 {
    (k + 1) * l_max + PRECISION_MARGIN
}

/// Precision for a theta-image test on `out_trunc` coefficients.
pub fn theta_precision(p: u64, k: u32, out_trunc: usize) -> u32 {
    (k + 1) * floor_log(p, (out_trunc as u64).saturating_sub(1).max(1)) + PRECISION_MARGIN
}

/// Precision for calibration: the scaled sums carry up to `p^{(k+1)^2}`
/// on top of the eigen requirement; capped at the word size.
pub fn calibration_precision(p: u64, k: u32, l_max: u32, out_trunc: usize) -> u32 {
    (eigen_precision(k, l_max) + (k + 1) * (k + 1))
        .max(theta_precision(p, k, out_trunc))
        .min(PadicContext::max_precision(p))
}

/// Truncation for eigen checks: the index `n_max p^{l_max+1}` must be known.
pub fn eigen_trunc(p: u64, l_max: u32, n_max: i64) -> usize {
    n_max as usize * (p as usize).pow(l_max + 1) + 1
}

/// Truncation for aggregate checks with a degree `m` polynomial.
pub fn aggregate_trunc(p: u64, l_max: u32, n_max: i64, m: u32) -> usize {
    n_max as usize * (p as usize).pow(l_max + m) + 1
}

/// Truncation of `f` giving `out` coefficients of `R(U_p) f`, `deg R = m`.
pub fn annihilator_trunc(p: u64, m: u32, out: usize) -> usize {
    out * (p as usize).pow(m)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckConfig {
    pub p: u64,
    pub k: u32,
    pub ls: Vec<u32>,
    pub ns: Vec<i64>,
    pub precision: u32,
    pub trunc: usize,
    pub twist: TwistConvention,
    pub exp_const: ExpConst,
    pub skip_supersingular: bool,
    /// output coefficients of annihilator checks (all available if `None`)
    pub out_trunc: Option<usize>,
    pub exec: Exec,
}

impl CheckConfig {
    /// Eigen-check defaults: `l = 1..=l_max`, `n = 1..=n_max`, budgets from
    /// [`eigen_precision`] and [`eigen_trunc`].
    pub fn new(p: u64, k: u32, l_max: u32, n_max: i64) -> Self {
        CheckConfig {
            p,
            k,
            ls: (1..=l_max).collect(),
            ns: (1..=n_max).collect(),
            precision: eigen_precision(k, l_max),
            trunc: eigen_trunc(p, l_max, n_max),
            twist: TwistConvention::None,
            exp_const: ExpConst::One,
            skip_supersingular: true,
            out_trunc: None,
            exec: Exec::default(),
        }
    }

    pub fn ctx(&self) -> Result<PadicContext> {
        PadicContext::new(self.p, self.precision)
    }

    pub fn l_max(&self) -> u32 {
        self.ls.iter().copied().max().unwrap_or(0)
    }

    pub fn n_max(&self) -> i64 {
        self.ns.iter().copied().max().unwrap_or(0)
    }

    /// Reject configurations whose precision cannot hold the eigen
    /// requirement or does not fit the residue word.
    pub fn validate(&self) -> Result<()> {
        let ctx = self.ctx()?;
        let needed = (self.k + 1) * self.l_max();
        if ctx.prec() < needed {
            return Err(Error::InsufficientPrecision {
                needed,
                available: ctx.prec(),
            });
        }
        Ok(())
    }
}

fn check_ring_precision<R: CoeffRing>(ring: &R, ctx: &PadicContext) -> Result<()> {
    match ring.descriptor() {
        RingDescriptor::Integer => Ok(()),
        RingDescriptor::Padic { p, prec } => {
            if p != ctx.p() {
                Err(Error::RingMismatch {
                    left: ring.descriptor().to_string(),
                    right: ctx.to_string(),
                })
            } else if prec < ctx.prec() {
                Err(Error::InsufficientPrecision {
                    needed: ctx.prec(),
                    available: prec,
                })
            } else {
                Ok(())
            }
        }
    }
}

/// `a_n(f) mod p^B`, or `None` beyond the truncation.
fn residue<R: CoeffRing>(f: &Series<R>, n: i64, ctx: &PadicContext) -> Option<u64> {
    f.coeff(n)
        .ok()
        .map(|c| ctx.reduce_bigint(&f.ring().to_bigint(&c)))
}

/// Coefficientwise test for membership in the image of `theta^{k+1}`:
/// `a_0 = 0` to precision and `val_p(a_n) >= (k+1) val_p(n)` for `n >= 1`.
pub fn theta_image_test<R: CoeffRing>(
    g: &Series<R>,
    k: u32,
    ctx: &PadicContext,
    label: &str,
) -> Result<CongruenceReport> {
    if g.offset() < 0 {
        return Err(Error::NegativeOffset { offset: g.offset() });
    }
    check_ring_precision(g.ring(), ctx)?;
    let p = ctx.p();
    let records = (0..g.trunc())
        .map(|n| {
            let a = residue(g, n, ctx).expect("below truncation");
            let required = if n == 0 {
                ctx.prec()
            } else {
                (k + 1) * crate::padic::val_p(n as i128, p).expect("n > 0")
            };
            let observed = ctx.valuation(a);
            CheckRecord {
                kind: CheckKind::ThetaImage,
                label: label.to_string(),
                n,
                l: 0,
                left: Some(a),
                right: Some(0),
                required_exponent: required,
                observed_valuation: Some(observed),
                status: classify(observed, required, ctx.prec()),
                p_divides_n: n % p as i64 == 0,
            }
        })
        .collect();
    Ok(CongruenceReport {
        records,
        notes: vec![format!(
            "{label}: theta^{} image test on {} coefficients",
            k + 1,
            g.trunc()
        )],
    })
}

/// `val_p(a_{n p^{l+1}}(f) - lambda a_{n p^l}(f)) >= (k+1) l` for every
/// configured `(n, l)`.
pub fn eigen_congruence_check<R: CoeffRing>(
    f: &Series<R>,
    lambda: PadicInt,
    cfg: &CheckConfig,
    label: &str,
) -> Result<CongruenceReport> {
    let ctx = lambda.ctx();
    check_ring_precision(f.ring(), &ctx)?;
    let p = ctx.p() as i64;
    let pairs: Vec<(i64, u32)> = cfg
        .ns
        .iter()
        .flat_map(|&n| cfg.ls.iter().map(move |&l| (n, l)))
        .collect();
    let records = cfg.exec.map_slice(&pairs, |&(n, l)| {
        let lo = n * p.pow(l);
        let hi = lo * p;
        let required = (cfg.k + 1) * l;
        let base = CheckRecord {
            kind: CheckKind::Eigen,
            label: label.to_string(),
            n,
            l,
            left: None,
            right: None,
            required_exponent: required,
            observed_valuation: None,
            status: Status::Inconclusive,
            p_divides_n: n % p == 0,
        };
        match (residue(f, hi, &ctx), residue(f, lo, &ctx)) {
            (Some(a_hi), Some(a_lo)) => {
                let right = ctx.mul_mod(lambda.value(), a_lo);
                let observed = ctx.valuation(ctx.sub_mod(a_hi, right));
                CheckRecord {
                    left: Some(a_hi),
                    right: Some(right),
                    observed_valuation: Some(observed),
                    status: classify(observed, required, ctx.prec()),
                    ..base
                }
            }
            _ => base,
        }
    });
    let starved = records
        .iter()
        .filter(|r| r.observed_valuation.is_none())
        .count();
    let mut notes = Vec::new();
    if starved > 0 {
        notes.push(format!(
            "{label}: {starved} eigen records need coefficients beyond q^{}",
            f.trunc()
        ));
    }
    Ok(CongruenceReport { records, notes })
}

/// How the polynomial acts on `U_p` in an annihilator check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scaling {
    /// `R(U_p) = sum r_i U_p^i`
    Unscaled,
    /// `sum e_{M-i} p^{c (M-i)} U_p^i`
    PowersOfP(u32),
}

/// Coefficients multiplying `U_p^i`, `i = 0..=M`.
fn operator_coeffs(poly: &AnnihilatorPoly, scaling: Scaling) -> Vec<PadicInt> {
    let ctx = poly.ctx();
    let m = poly.degree();
    match scaling {
        Scaling::Unscaled => poly.coeffs.clone(),
        Scaling::PowersOfP(c) => (0..=m)
            .map(|i| poly.coeffs[m - i] * ctx.p_power(c * (m - i) as u32))
            .collect(),
    }
}

/// `g = sum_i c_i U_p^i f` followed by [`theta_image_test`].
pub fn annihilator_check(
    f: &Series<PadicContext>,
    poly: &AnnihilatorPoly,
    scaling: Scaling,
    cfg: &CheckConfig,
    label: &str,
) -> Result<CongruenceReport> {
    let ctx = poly.ctx();
    check_ring_precision(f.ring(), &ctx)?;
    let f = if f.ctx() == ctx {
        f.clone()
    } else {
        f.reduce_into(&ctx)
    };
    let coeffs = operator_coeffs(poly, scaling);
    let mut notes = Vec::new();
    let mut iterate = f.with_offset(0);
    let mut g = iterate.scale(&coeffs[0].value());
    for (i, c) in coeffs.iter().enumerate().skip(1) {
        iterate = iterate.u_p(ctx.p())?;
        notes.push(format!(
            "{label}: U_p^{i} f known below q^{}",
            iterate.trunc()
        ));
        g = g
            .truncate(iterate.trunc())
            .add(&iterate.scale(&c.value()))?;
    }
    if let Some(out) = cfg.out_trunc {
        if (out as i64) > g.trunc() {
            notes.push(format!(
                "{label}: requested {out} output coefficients, only {} available",
                g.trunc()
            ));
        }
        g = g.truncate(out as i64);
    }
    let mut report = theta_image_test(&g, cfg.k, &ctx, label)?;
    for r in &mut report.records {
        r.kind = CheckKind::Annihilator;
    }
    notes.append(&mut report.notes);
    report.notes = notes;
    Ok(report)
}

/// `val_p(sum_{i=0}^M e_{M-i} p^{c(M-i)} a_{n p^{l+i}}(f)) >= l (k+1)`.
pub fn corollary_aggregate_check<R: CoeffRing>(
    f: &Series<R>,
    poly: &AnnihilatorPoly,
    c: u32,
    cfg: &CheckConfig,
    label: &str,
) -> Result<CongruenceReport> {
    let ctx = poly.ctx();
    check_ring_precision(f.ring(), &ctx)?;
    let p = ctx.p() as i64;
    let coeffs = operator_coeffs(poly, Scaling::PowersOfP(c));
    let mut records = Vec::new();
    for &n in &cfg.ns {
        for &l in &cfg.ls {
            let required = l * (cfg.k + 1);
            let mut sum = Some(0u64);
            for (i, ci) in coeffs.iter().enumerate() {
                let idx = n * p.pow(l + i as u32);
                sum = match (sum, residue(f, idx, &ctx)) {
                    (Some(s), Some(a)) => Some(ctx.add_mod(s, ctx.mul_mod(ci.value(), a))),
                    _ => None,
                };
            }
            let observed = sum.map(|s| ctx.valuation(s));
            records.push(CheckRecord {
                kind: CheckKind::Aggregate,
                label: label.to_string(),
                n,
                l,
                left: sum,
                right: sum.map(|_| 0),
                required_exponent: required,
                observed_valuation: observed,
                status: observed
                    .map_or(Status::Inconclusive, |o| classify(o, required, ctx.prec())),
                p_divides_n: n % p == 0,
            });
        }
    }
    Ok(CongruenceReport {
        records,
        notes: Vec::new(),
    })
}

/// Which sabotage to apply in a negative-control run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sabotage {
    /// replace `u` by `u + p`
    PerturbU,
    /// exchange the eigenvalues assigned to `f1` and `f2`
    SwapF1F2,
}

pub const ZHANG_LABELS: [&str; 3] = ["f1", "f2", "f3"];

/// The three congruences `a_{np^{l+1}}(f_i) = lambda_i a_{np^l}(f_i)`.
pub fn zhang_eigen_checks<R: CoeffRing>(
    basis: &ZhangBasis<R>,
    spectrum: &UpSpectrum,
    cfg: &CheckConfig,
    sabotage: Option<Sabotage>,
) -> Result<CongruenceReport> {
    let spectrum = match sabotage {
        Some(Sabotage::PerturbU) => {
            let u = spectrum.u;
            spectrum_from_unit_root(u + u.ctx().element(u.ctx().p() as i64), spectrum.k)
        }
        _ => spectrum.clone(),
    };
    let mut lambdas = [
        spectrum.lambdas[0],
        spectrum.lambdas[1],
        spectrum.lambdas[2],
    ];
    if sabotage == Some(Sabotage::SwapF1F2) {
        lambdas.swap(0, 1);
    }
    let mut report = CongruenceReport::default();
    for ((f, lambda), label) in basis.forms.iter().zip(lambdas).zip(ZHANG_LABELS) {
        report.extend(eigen_congruence_check(f, lambda, cfg, label)?);
    }
    Ok(report)
}

/// Placeholder record for a check not run at this prime.
pub fn skipped(label: &str, kind: CheckKind) -> CheckRecord {
    CheckRecord {
        kind,
        label: label.to_string(),
        n: 0,
        l: 0,
        left: None,
        right: None,
        required_exponent: 0,
        observed_valuation: None,
        status: Status::Skipped,
        p_divides_n: false,
    }
}

/// Result of the eigen checks at one prime.
#[derive(Clone, Debug, PartialEq)]
pub struct PrimeRun {
    pub p: u64,
    pub frob: FrobeniusQuadratic,
    pub precision: u32,
    pub trunc: usize,
    pub report: CongruenceReport,
}

/// Zhang eigen checks at `cfg.p` for `curve`: computes `a_p`, the basis at
/// the configured precision and truncation, and the spectrum. A
/// supersingular prime yields one skipped record per form.
pub fn run_zhang_prime(
    curve: &WeierstrassCurve,
    cfg: &CheckConfig,
    sabotage: Option<Sabotage>,
) -> Result<PrimeRun> {
    let frob = a_p(curve, cfg.p)?;
    let mut run = PrimeRun {
        p: cfg.p,
        frob,
        precision: cfg.precision,
        trunc: cfg.trunc,
        report: CongruenceReport::default(),
    };
    if !frob.ordinary {
        if !cfg.skip_supersingular {
            return Err(Error::SupersingularPrime { p: cfg.p });
        }
        run.report.records = ZHANG_LABELS
            .iter()
            .map(|l| skipped(l, CheckKind::Eigen))
            .collect();
        run.report.notes.push(format!(
            "p = {} is supersingular (a_p = {})",
            cfg.p, frob.a_p
        ));
        return Ok(run);
    }
    cfg.validate()?;
    let ctx = cfg.ctx()?;
    let spectrum = up_spectrum(&frob, cfg.k, &ctx)?;
    let basis = zhang_basis(cfg.trunc, &ctx)?;
    run.report = zhang_eigen_checks(&basis, &spectrum, cfg, sabotage)?;
    Ok(run)
}

/// A normalization tried by [`calibrate`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "variant")]
pub enum Convention {
    /// `R(U_p) f` with the untwisted roots
    ConventionFree,
    Scaled {
        twist: TwistConvention,
        exp_const: ExpConst,
    },
}

impl std::fmt::Display for Convention {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Convention::ConventionFree => f.write_str("convention-free"),
            Convention::Scaled { twist, exp_const } => write!(f, "twist={twist},c={exp_const}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConventionResult {
    pub convention: Convention,
    pub passed: bool,
    pub summary: Summary,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Calibration {
    pub gate: CongruenceReport,
    pub results: Vec<ConventionResult>,
}

impl Calibration {
    pub fn passing(&self) -> Vec<Convention> {
        self.results
            .iter()
            .filter(|r| r.passed)
            .map(|r| r.convention)
            .collect()
    }
}

pub fn all_conventions() -> Vec<Convention> {
    let mut out = vec![Convention::ConventionFree];
    for twist in [TwistConvention::None, TwistConvention::TateTimesP] {
        for exp_const in [ExpConst::One, ExpConst::WeightPlusOne] {
            out.push(Convention::Scaled { twist, exp_const });
        }
    }
    out
}

/// Runs every convention on the annihilator and aggregate checks for the
/// three basis forms. The eigen congruences gate the run; the
/// convention-free variant must pass.
pub fn calibrate(
    basis: &ZhangBasis<PadicContext>,
    frob: &FrobeniusQuadratic,
    cfg: &CheckConfig,
) -> Result<Calibration> {
    if !frob.ordinary {
        return Err(Error::SupersingularPrime { p: frob.p });
    }
    let ctx = cfg.ctx()?;
    let spectrum = up_spectrum(frob, cfg.k, &ctx)?;
    calibrate_with_spectrum(basis, &spectrum, cfg)
}

pub fn calibrate_with_spectrum(
    basis: &ZhangBasis<PadicContext>,
    spectrum: &UpSpectrum,
    cfg: &CheckConfig,
) -> Result<Calibration> {
    let gate = zhang_eigen_checks(basis, spectrum, cfg, None)?;
    if !gate.all_pass() {
        return Err(Error::NoConventionPasses);
    }
    let untwisted = residue_charpoly(spectrum, TwistConvention::None);
    let results = cfg.exec.map_slice(&all_conventions(), |&convention| {
        let mut report = CongruenceReport::default();
        for (f, label) in basis.forms.iter().zip(ZHANG_LABELS) {
            let r = match convention {
                Convention::ConventionFree => {
                    annihilator_check(f, &untwisted, Scaling::Unscaled, cfg, label)
                }
                Convention::Scaled { twist, exp_const } => {
                    let poly = residue_charpoly(spectrum, twist);
                    let c = exp_const.value(cfg.k);
                    annihilator_check(f, &poly, Scaling::PowersOfP(c), cfg, label).and_then(
                        |mut a| {
                            a.extend(corollary_aggregate_check(f, &poly, c, cfg, label)?);
                            Ok(a)
                        },
                    )
                }
            };
            match r {
                Ok(r) => report.extend(r.relabel(label)),
                Err(e) => report.notes.push(format!("{label}: {e}")),
            }
        }
        ConventionResult {
            convention,
            passed: report.all_pass() && !report.records.is_empty(),
            summary: report.summary(),
        }
    });
    let calibration = Calibration { gate, results };
    if !calibration.passing().contains(&Convention::ConventionFree) {
        return Err(Error::NoConventionPasses);
    }
    Ok(calibration)
}
