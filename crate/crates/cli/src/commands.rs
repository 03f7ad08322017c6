//! Subcommands and their flag sets.

use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{bail, Result};
use asdlab_core::curve::{
    a_p, mass_bracket, supersingular_j_closure, supersingular_j_list, FrobeniusQuadratic,
    WeierstrassCurve, ZHANG_CURVE,
};
use asdlab_core::engine::{
    aggregate_trunc, annihilator_check, annihilator_trunc, calibrate_with_spectrum,
    calibration_precision, corollary_aggregate_check, eigen_precision, skipped, theta_precision,
    zhang_eigen_checks, CheckConfig, CheckKind, ExpConst, Sabotage, Scaling, ZHANG_LABELS,
};
use asdlab_core::forms::{MeroBuilder, MeroFormSpec, ZhangBasis, ZHANG_J0, ZHANG_TERMS};
use asdlab_core::frobenius::{
    classical_q_poly, product_coeffs, residue_charpoly, spectrum_from_unit_root, up_spectrum,
    AnnihilatorPoly, TwistConvention, UpSpectrum,
};
use asdlab_core::{Error, PadicContext, Series};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::cache::{CacheKey, SeriesCache};
use crate::config::{ConfigFile, IntList, PoleTerms, PrimeList};
use crate::report::{write_reports, Report};

#[derive(Parser, Debug)]
#[command(
    name = "asdlab",
    version,
    about = "p-adic congruence checks for meromorphic modular forms"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Trace of Frobenius and reduction type per prime
    Ap(RunArgs),
    /// Eigenvalue congruences for the Zhang basis f1, f2, f3
    CheckZhang(ZhangArgs),
    /// Annihilator and aggregate congruences for a polynomial in U_p
    CheckTheorem(TheoremArgs),
    /// Supersingular j-invariants over F_p and over the closure
    Supersingular(RunArgs),
    /// Try every normalization convention on the Zhang basis
    Calibrate(ZhangArgs),
}

#[derive(Args, Debug, Clone, Default)]
pub struct RunArgs {
    /// Weierstrass coefficients a1,a2,a3,a4,a6
    #[arg(long, allow_hyphen_values = true)]
    pub curve: Option<WeierstrassCurve>,
    /// Primes, e.g. 11,23 or 5-50
    #[arg(long = "p")]
    pub primes: Option<PrimeList>,
    #[arg(long)]
    pub k: Option<u32>,
    #[arg(long)]
    pub lmax: Option<u32>,
    #[arg(long)]
    pub nmax: Option<i64>,
    /// Series truncation N (coefficients below q^N)
    #[arg(long)]
    pub trunc: Option<usize>,
    /// Working precision exponent B
    #[arg(long)]
    pub prec: Option<u32>,
    #[arg(long)]
    pub twist: Option<TwistConvention>,
    /// Exponent constant: 1 or k1
    #[arg(long)]
    pub expc: Option<ExpConst>,
    /// Output coefficients of annihilator checks
    #[arg(long = "out-trunc")]
    pub out_trunc: Option<usize>,
    /// Write the JSON report here
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Series cache directory (ASDLAB_CACHE takes precedence)
    #[arg(long)]
    pub cache: Option<PathBuf>,
    /// key = value file; flags take precedence
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Print the JSON report instead of the summary
    #[arg(long)]
    pub json: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SabotageArg {
    PerturbU,
    #[value(name = "swap-f1-f2")]
    SwapF1F2,
}

impl FromStr for SabotageArg {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        <SabotageArg as ValueEnum>::from_str(s, true).map_err(|e| anyhow::anyhow!(e))
    }
}

impl From<SabotageArg> for Sabotage {
    fn from(s: SabotageArg) -> Self {
        match s {
            SabotageArg::PerturbU => Sabotage::PerturbU,
            SabotageArg::SwapF1F2 => Sabotage::SwapF1F2,
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct ZhangArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Negative control
    #[arg(long, value_enum)]
    pub sabotage: Option<SabotageArg>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PolyArg {
    /// residue characteristic polynomial
    Residue,
    /// the constant 1
    One,
}

impl FromStr for PolyArg {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        <PolyArg as ValueEnum>::from_str(s, true).map_err(|e| anyhow::anyhow!(e))
    }
}

#[derive(Args, Debug, Clone)]
pub struct TheoremArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Pole location j0
    #[arg(long, allow_hyphen_values = true)]
    pub j0: Option<i64>,
    /// Form sum c E4/(j-j0)^m as c:m,c:m; repeatable (default f1, f2, f3)
    #[arg(long, allow_hyphen_values = true)]
    pub form: Vec<PoleTerms>,
    #[arg(long, value_enum)]
    pub poly: Option<PolyArg>,
    /// Number of Eisenstein factors (X-1)(X-p^{k+1})
    #[arg(long)]
    pub eisenstein: Option<usize>,
    /// a_p of cusp eigenforms contributing X^2 - a_p X + p^{k+1}
    #[arg(long = "cusp-ap", allow_hyphen_values = true)]
    pub cusp_ap: Option<IntList>,
}

/// Flags merged with the config file and command defaults.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub curve: WeierstrassCurve,
    pub primes: Vec<u64>,
    pub k: u32,
    pub l_max: u32,
    pub n_max: i64,
    pub trunc: Option<usize>,
    pub prec: Option<u32>,
    pub twist: Option<TwistConvention>,
    pub exp_const: Option<ExpConst>,
    pub out_trunc: usize,
    pub out: Option<PathBuf>,
    pub cache: Option<PathBuf>,
    pub json: bool,
    pub file: ConfigFile,
}

struct Defaults {
    l_max: u32,
    n_max: i64,
    out_trunc: usize,
}

impl RunConfig {
    fn resolve(args: &RunArgs, d: Defaults) -> Result<Self> {
        let file = match &args.config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };
        let primes = file
            .pick(args.primes.clone(), "p")?
            .map(|p| p.0)
            .ok_or_else(|| anyhow::anyhow!("no primes given (--p or p = ... in the config)"))?;
        let env_cache = std::env::var_os("ASDLAB_CACHE")
            .filter(|v| !v.is_empty())
            .map(PathBuf::from);
        let cfg = RunConfig {
            curve: file.pick(args.curve, "curve")?.unwrap_or(ZHANG_CURVE),
            primes,
            k: file.pick(args.k, "k")?.unwrap_or(2),
            l_max: file.pick(args.lmax, "lmax")?.unwrap_or(d.l_max),
            n_max: file.pick(args.nmax, "nmax")?.unwrap_or(d.n_max),
            trunc: file.pick(args.trunc, "trunc")?,
            prec: file.pick(args.prec, "prec")?,
            twist: file.pick(args.twist, "twist")?,
            exp_const: file.pick(args.expc, "expc")?,
            out_trunc: file
                .pick(args.out_trunc, "out-trunc")?
                .unwrap_or(d.out_trunc),
            out: file.pick(args.out.clone(), "out")?,
            cache: env_cache.or(file.pick(args.cache.clone(), "cache")?),
            json: args.json,
            file,
        };
        if cfg.l_max == 0 || cfg.n_max < 1 || cfg.out_trunc == 0 {
            bail!("lmax, nmax and out-trunc must be positive");
        }
        Ok(cfg)
    }

    fn require_weight_two(&self) -> Result<()> {
        if self.k != 2 {
            bail!(
                "only k = 2 (weight 4 forms with poles at j0) is supported, got k = {}",
                self.k
            );
        }
        Ok(())
    }

    /// Eigen-check configuration at `p`; the precision is checked before
    /// any series is built.
    fn eigen_config(&self, p: u64) -> Result<CheckConfig> {
        let mut cfg = CheckConfig::new(p, self.k, self.l_max, self.n_max);
        if let Some(b) = self.prec {
            cfg.precision = b;
        }
        if let Some(n) = self.trunc {
            cfg.trunc = n;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn cache(&self) -> Result<Option<SeriesCache>> {
        self.cache.as_deref().map(SeriesCache::open).transpose()
    }

    fn emit(&self, reports: &[Report], summary: &[String]) -> Result<()> {
        if let Some(path) = &self.out {
            write_reports(path, reports)?;
        }
        if self.json {
            println!("{}", serde_json::to_string_pretty(reports)?);
        } else {
            for line in summary {
                println!("{line}");
            }
        }
        Ok(())
    }
}

/// `Ok(true)` when every check passed or was skipped.
pub fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Ap(args) => cmd_ap(&RunConfig::resolve(&args, zhang_defaults())?),
        Command::Supersingular(args) => {
            cmd_supersingular(&RunConfig::resolve(&args, zhang_defaults())?)
        }
        Command::CheckZhang(args) => {
            let cfg = RunConfig::resolve(&args.run, zhang_defaults())?;
            let sabotage = cfg.file.pick(args.sabotage, "sabotage")?;
            cmd_check_zhang(&cfg, sabotage.map(Into::into))
        }
        Command::CheckTheorem(args) => {
            let cfg = RunConfig::resolve(
                &args.run,
                Defaults {
                    l_max: 1,
                    n_max: 3,
                    out_trunc: 100,
                },
            )?;
            let theorem = TheoremSetup::resolve(&args, &cfg)?;
            cmd_check_theorem(&cfg, &theorem)
        }
        Command::Calibrate(args) => {
            let cfg = RunConfig::resolve(
                &args.run,
                Defaults {
                    l_max: 2,
                    n_max: 3,
                    out_trunc: 100,
                },
            )?;
            let sabotage = cfg.file.pick(args.sabotage, "sabotage")?;
            cmd_calibrate(&cfg, sabotage.map(Into::into))
        }
    }
}

fn zhang_defaults() -> Defaults {
    Defaults {
        l_max: 2,
        n_max: 8,
        out_trunc: 100,
    }
}

fn reduction(frob: &std::result::Result<FrobeniusQuadratic, Error>) -> &'static str {
    match frob {
        Ok(f) if f.ordinary => "ordinary",
        Ok(_) => "supersingular",
        Err(Error::BadReduction { .. }) => "bad",
        Err(_) => "error",
    }
}

pub fn cmd_ap(cfg: &RunConfig) -> Result<bool> {
    let mut reports = Vec::new();
    let mut lines = vec![
        format!("curve {}", cfg.curve),
        "p\ta_p\treduction".to_string(),
    ];
    for &p in &cfg.primes {
        let frob = a_p(&cfg.curve, p);
        if let Err(e) = &frob {
            if !matches!(e, Error::BadReduction { .. }) {
                return Err(e.clone().into());
            }
        }
        let mut r = Report::new(&cfg.curve, p, cfg.k);
        r.a_p = frob.as_ref().ok().map(|f| f.a_p);
        r.reduction = reduction(&frob).into();
        let a = r.a_p.map_or("-".to_string(), |a| a.to_string());
        lines.push(format!("{p}\t{a}\t{}", r.reduction));
        reports.push(r);
    }
    cfg.emit(&reports, &lines)?;
    Ok(true)
}

pub fn cmd_supersingular(cfg: &RunConfig) -> Result<bool> {
    let mut reports = Vec::new();
    let mut lines = Vec::new();
    let mut ok = true;
    for &p in &cfg.primes {
        let rational = supersingular_j_list(p)?;
        let closure = supersingular_j_closure(p)?;
        let (lo, hi) = mass_bracket(p);
        let inside = (lo..=hi).contains(&closure.len());
        ok &= inside;
        let mut r = Report::new(&cfg.curve, p, cfg.k);
        r.reduction = String::new();
        r.conventions = json!({
            "j_over_fp": rational,
            "j_over_fp2": closure.iter().map(|(a, b)| [a, b]).collect::<Vec<_>>(),
            "mass_bracket": [lo, hi],
        });
        lines.push(format!(
            "p={p}: F_p j = {rational:?}; {} over F_p^2, bracket [{lo}, {hi}]{}",
            closure.len(),
            if inside { "" } else { " VIOLATED" }
        ));
        reports.push(r);
    }
    cfg.emit(&reports, &lines)?;
    Ok(ok)
}

/// Zhang forms at `(ctx, trunc)`, through the cache when one is configured.
fn zhang_forms(
    cache: Option<&SeriesCache>,
    ctx: &PadicContext,
    trunc: usize,
) -> Result<ZhangBasis<PadicContext>> {
    let specs: Vec<(String, MeroFormSpec)> = ZHANG_LABELS
        .iter()
        .zip(ZHANG_TERMS)
        .map(|(l, t)| (format!("zhang-{l}"), MeroFormSpec::e4_poles(ZHANG_J0, t)))
        .collect();
    let forms = build_forms(cache, ctx, trunc, ZHANG_J0, &specs)?;
    let [a, b, c]: [Series<PadicContext>; 3] = forms.try_into().expect("three forms");
    Ok(ZhangBasis { forms: [a, b, c] })
}

fn build_forms(
    cache: Option<&SeriesCache>,
    ctx: &PadicContext,
    trunc: usize,
    j0: i64,
    specs: &[(String, MeroFormSpec)],
) -> Result<Vec<Series<PadicContext>>> {
    if let Some(cache) = cache {
        let hits: Option<Vec<_>> = specs
            .iter()
            .map(|(id, _)| cache.load(&CacheKey::new(id, ctx, trunc)))
            .collect();
        if let Some(hits) = hits {
            return Ok(hits);
        }
    }
    let mut builder = MeroBuilder::new(j0, trunc, ctx)?;
    let mut out = Vec::new();
    for (id, spec) in specs {
        let f = builder.form(spec)?;
        if let Some(cache) = cache {
            cache.store(&CacheKey::new(id, ctx, trunc), &f)?;
        }
        out.push(f);
    }
    Ok(out)
}

fn skipped_report(r: &mut Report, labels: &[&str], kind: CheckKind, why: String) {
    for l in labels {
        r.checks.push((&skipped(l, kind)).into());
    }
    r.notes.push(why);
    r.summary.total = r.checks.len();
    r.summary.skipped = r.checks.len();
}

fn spectrum_at(
    p: u64,
    frob: &FrobeniusQuadratic,
    k: u32,
    ctx: &PadicContext,
) -> Result<UpSpectrum> {
    debug_assert_eq!(frob.p, p);
    Ok(up_spectrum(frob, k, ctx)?)
}

pub fn cmd_check_zhang(cfg: &RunConfig, sabotage: Option<Sabotage>) -> Result<bool> {
    cfg.require_weight_two()?;
    let configs = cfg
        .primes
        .iter()
        .map(|&p| cfg.eigen_config(p))
        .collect::<Result<Vec<_>>>()?;
    let cache = cfg.cache()?;
    let mut reports = Vec::new();
    let mut lines = Vec::new();
    for cc in configs {
        let p = cc.p;
        let frob = a_p(&cfg.curve, p);
        let mut r = Report::new(&cfg.curve, p, cfg.k);
        r.a_p = frob.as_ref().ok().map(|f| f.a_p);
        r.reduction = reduction(&frob).into();
        r.conventions = json!({ "sabotage": sabotage });
        match frob {
            Ok(frob) if frob.ordinary => {
                let ctx = cc.ctx()?;
                r.precision = Some(cc.precision);
                r.trunc = Some(cc.trunc);
                let basis = zhang_forms(cache.as_ref(), &ctx, cc.trunc)?;
                let spectrum = spectrum_at(p, &frob, cfg.k, &ctx)?;
                r.absorb(&zhang_eigen_checks(&basis, &spectrum, &cc, sabotage)?);
            }
            Ok(frob) => skipped_report(
                &mut r,
                &ZHANG_LABELS,
                CheckKind::Eigen,
                format!("p = {p} is supersingular (a_p = {})", frob.a_p),
            ),
            Err(Error::BadReduction { .. }) => skipped_report(
                &mut r,
                &ZHANG_LABELS,
                CheckKind::Eigen,
                format!("bad reduction at p = {p}"),
            ),
            Err(e) => return Err(e.into()),
        }
        let s = r.summary;
        lines.push(format!(
            "p={p} {}: {} pass, {} fail, {} inconclusive, {} skipped (B={}, N={})",
            r.reduction,
            s.passed,
            s.failed,
            s.inconclusive,
            s.skipped,
            r.precision.map_or("-".into(), |b| b.to_string()),
            r.trunc.map_or("-".into(), |n| n.to_string()),
        ));
        reports.push(r);
    }
    cfg.emit(&reports, &lines)?;
    Ok(reports.iter().all(Report::clean))
}

/// Forms and polynomial options for `check-theorem`.
#[derive(Clone, Debug)]
pub struct TheoremSetup {
    pub j0: i64,
    pub forms: Vec<(String, MeroFormSpec)>,
    pub poly: PolyArg,
    pub eisenstein: usize,
    pub cusp_aps: Vec<i64>,
}

impl TheoremSetup {
    fn resolve(args: &TheoremArgs, cfg: &RunConfig) -> Result<Self> {
        cfg.require_weight_two()?;
        let j0 = cfg.file.pick(args.j0, "j0")?.unwrap_or(ZHANG_J0);
        let mut terms: Vec<PoleTerms> = args.form.clone();
        if terms.is_empty() {
            if let Some(raw) = cfg.file.raw("form") {
                terms = raw.split(';').map(str::parse).collect::<Result<_>>()?;
            }
        }
        let forms: Vec<(String, MeroFormSpec)> = if terms.is_empty() {
            ZHANG_LABELS
                .iter()
                .zip(ZHANG_TERMS)
                .map(|(l, t)| (l.to_string(), MeroFormSpec::e4_poles(j0, t)))
                .collect()
        } else {
            terms
                .iter()
                .enumerate()
                .map(|(i, t)| (format!("form{}", i + 1), MeroFormSpec::e4_poles(j0, &t.0)))
                .collect()
        };
        for (_, spec) in &forms {
            spec.validate()?;
        }
        Ok(TheoremSetup {
            j0,
            forms,
            poly: cfg
                .file
                .pick(args.poly, "poly")?
                .unwrap_or(PolyArg::Residue),
            eisenstein: cfg.file.pick(args.eisenstein, "eisenstein")?.unwrap_or(0),
            cusp_aps: cfg
                .file
                .pick(args.cusp_ap.clone(), "cusp-ap")?
                .unwrap_or_default()
                .0,
        })
    }

    fn form_id(&self, label: &str, spec: &MeroFormSpec) -> String {
        let terms: Vec<String> = spec
            .terms
            .iter()
            .map(|t| format!("{}x{}", t.coeff, t.pole_order))
            .collect();
        format!("{label}-j{}-{}", self.j0, terms.join("_"))
    }

    fn degree(&self) -> usize {
        let p_deg = match self.poly {
            PolyArg::Residue => 3,
            PolyArg::One => 0,
        };
        p_deg + 2 * self.cusp_aps.len() + 2 * self.eisenstein
    }
}

pub fn cmd_check_theorem(cfg: &RunConfig, setup: &TheoremSetup) -> Result<bool> {
    let m = setup.degree() as u32;
    let scaled = cfg.twist.is_some() || cfg.exp_const.is_some();
    let twist = cfg.twist.unwrap_or(TwistConvention::None);
    let exp_const = cfg.exp_const.unwrap_or(ExpConst::One);
    let mut configs = Vec::new();
    for &p in &cfg.primes {
        let mut cc = CheckConfig::new(p, cfg.k, cfg.l_max, cfg.n_max);
        cc.out_trunc = Some(cfg.out_trunc);
        cc.precision = cfg.prec.unwrap_or(
            theta_precision(p, cfg.k, cfg.out_trunc).max(eigen_precision(cfg.k, cfg.l_max)),
        );
        let mut trunc = annihilator_trunc(p, m, cfg.out_trunc);
        if scaled {
            trunc = trunc.max(aggregate_trunc(p, cfg.l_max, cfg.n_max, m));
        }
        cc.trunc = cfg.trunc.unwrap_or(trunc);
        cc.twist = twist;
        cc.exp_const = exp_const;
        cc.validate()?;
        configs.push(cc);
    }
    let cache = cfg.cache()?;
    let mut reports = Vec::new();
    let mut lines = Vec::new();
    for cc in configs {
        let p = cc.p;
        let frob = a_p(&cfg.curve, p);
        let mut r = Report::new(&cfg.curve, p, cfg.k);
        r.a_p = frob.as_ref().ok().map(|f| f.a_p);
        r.reduction = reduction(&frob).into();
        r.conventions = json!({
            "mode": if scaled { "scaled" } else { "convention-free" },
            "twist": twist,
            "exp_const": exp_const,
            "poly": format!("{:?}", setup.poly).to_lowercase(),
            "eisenstein_factors": setup.eisenstein,
            "cusp_aps": setup.cusp_aps,
            "degree": m,
        });
        let labels: Vec<&str> = setup.forms.iter().map(|(l, _)| l.as_str()).collect();
        match frob {
            Ok(frob) if frob.ordinary => {
                let ctx = cc.ctx()?;
                r.precision = Some(cc.precision);
                r.trunc = Some(cc.trunc);
                let specs: Vec<(String, MeroFormSpec)> = setup
                    .forms
                    .iter()
                    .map(|(l, s)| (setup.form_id(l, s), s.clone()))
                    .collect();
                let forms = build_forms(cache.as_ref(), &ctx, cc.trunc, setup.j0, &specs)?;
                let spectrum = spectrum_at(p, &frob, cfg.k, &ctx)?;
                let base = match setup.poly {
                    PolyArg::Residue => residue_charpoly(
                        &spectrum,
                        if scaled { twist } else { TwistConvention::None },
                    ),
                    PolyArg::One => AnnihilatorPoly::one(&ctx),
                };
                let q = classical_q_poly(&setup.cusp_aps, setup.eisenstein, cfg.k, &ctx)?;
                let poly = product_coeffs(&base, &q);
                let scaling = if scaled {
                    Scaling::PowersOfP(exp_const.value(cfg.k))
                } else {
                    Scaling::Unscaled
                };
                for (f, label) in forms.iter().zip(&labels) {
                    r.absorb(&annihilator_check(f, &poly, scaling, &cc, label)?);
                    if scaled {
                        let c = exp_const.value(cfg.k);
                        r.absorb(&corollary_aggregate_check(f, &poly, c, &cc, label)?);
                    }
                }
            }
            Ok(frob) => skipped_report(
                &mut r,
                &labels,
                CheckKind::Annihilator,
                format!("p = {p} is supersingular (a_p = {})", frob.a_p),
            ),
            Err(Error::BadReduction { .. }) => skipped_report(
                &mut r,
                &labels,
                CheckKind::Annihilator,
                format!("bad reduction at p = {p}"),
            ),
            Err(e) => return Err(e.into()),
        }
        let s = r.summary;
        lines.push(format!(
            "p={p} {} degree {m}: {} pass, {} fail, {} inconclusive, {} skipped",
            r.reduction, s.passed, s.failed, s.inconclusive, s.skipped
        ));
        reports.push(r);
    }
    cfg.emit(&reports, &lines)?;
    Ok(reports.iter().all(Report::clean))
}

pub fn cmd_calibrate(cfg: &RunConfig, sabotage: Option<Sabotage>) -> Result<bool> {
    cfg.require_weight_two()?;
    let mut configs = Vec::new();
    for &p in &cfg.primes {
        let mut cc = CheckConfig::new(p, cfg.k, cfg.l_max, cfg.n_max);
        cc.out_trunc = Some(cfg.out_trunc);
        cc.precision =
            cfg.prec
                .unwrap_or(calibration_precision(p, cfg.k, cfg.l_max, cfg.out_trunc));
        cc.trunc = cfg.trunc.unwrap_or(
            aggregate_trunc(p, cfg.l_max, cfg.n_max, cfg.k + 1).max(annihilator_trunc(
                p,
                cfg.k + 1,
                cfg.out_trunc,
            )),
        );
        cc.validate()?;
        configs.push(cc);
    }
    let cache = cfg.cache()?;
    let mut reports = Vec::new();
    let mut lines = Vec::new();
    let mut ok = true;
    for cc in configs {
        let p = cc.p;
        let frob = a_p(&cfg.curve, p);
        let mut r = Report::new(&cfg.curve, p, cfg.k);
        r.a_p = frob.as_ref().ok().map(|f| f.a_p);
        r.reduction = reduction(&frob).into();
        match frob {
            Ok(frob) if frob.ordinary => {
                let ctx = cc.ctx()?;
                r.precision = Some(cc.precision);
                r.trunc = Some(cc.trunc);
                let basis = zhang_forms(cache.as_ref(), &ctx, cc.trunc)?;
                let mut spectrum = spectrum_at(p, &frob, cfg.k, &ctx)?;
                if sabotage == Some(Sabotage::PerturbU) {
                    spectrum = spectrum_from_unit_root(spectrum.u + ctx.element(p as i64), cfg.k);
                }
                match calibrate_with_spectrum(&basis, &spectrum, &cc) {
                    Ok(cal) => {
                        r.absorb(&cal.gate);
                        let names: Vec<String> =
                            cal.passing().iter().map(|c| c.to_string()).collect();
                        r.conventions = json!({ "passing": names, "results": cal.results });
                        lines.push(format!("p={p}: passing conventions: {}", names.join("; ")));
                    }
                    Err(Error::NoConventionPasses) => {
                        ok = false;
                        r.notes.push(Error::NoConventionPasses.to_string());
                        r.conventions = json!({ "passing": [] });
                        lines.push(format!("p={p}: {}", Error::NoConventionPasses));
                    }
                    Err(e) => return Err(e.into()),
                }
            }
            Ok(frob) => {
                skipped_report(
                    &mut r,
                    &ZHANG_LABELS,
                    CheckKind::Eigen,
                    format!("p = {p} is supersingular (a_p = {})", frob.a_p),
                );
                lines.push(format!("p={p}: supersingular, skipped"));
            }
            Err(Error::BadReduction { .. }) => {
                skipped_report(
                    &mut r,
                    &ZHANG_LABELS,
                    CheckKind::Eigen,
                    format!("bad reduction at p = {p}"),
                );
                lines.push(format!("p={p}: bad reduction, skipped"));
            }
            Err(e) => return Err(e.into()),
        }
        reports.push(r);
    }
    cfg.emit(&reports, &lines)?;
    Ok(ok && reports.iter().all(Report::clean))
}
