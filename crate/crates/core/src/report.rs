//! Verification runs over a genus range and their machine-readable reports.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curve::{
    binomial2, verify_q_recurrences, Component, CurveFamily, PairIndex, MIN_GENUS, REFERENCE_MAX_GENUS,
};
use crate::error::{Error, Result};
use crate::field::PrimeModulus;
use crate::gauss_map::{
    degree_drop_check, expected_ranks, leading_coeff_closed_forms, mu_target_dim, nu_target_dim, rank_report,
    tau_target_dim, RankReport,
};
use crate::ideal::{
    build_p_system, build_q_system, restrict_quadric, vandermonde_minor_check, verify_pkhij, verify_pq_identity,
    IdealSystem,
};
use crate::minors::{
    MinorCase, MinorLabel, N_EXPECTED, N_GENUS, N_PRIME, N_PRIME_EXPECTED, N_PRIME_GENUS, N_PRIME_PRIME,
};

/// Prime at which the reference rank table was recorded.
pub const REFERENCE_PRIME: u64 = 109;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Verify,
    Minors,
    Properties,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilySource {
    Reference,
    Random(u64),
    File(PathBuf),
}

impl FromStr for FamilySource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "reference" {
            return Ok(FamilySource::Reference);
        }
        if let Some(seed) = s.strip_prefix("random:") {
            return seed
                .parse()
                .map(FamilySource::Random)
                .map_err(|e| Error::Parse(format!("random seed {seed:?}: {e}")));
        }
        if let Some(path) = s.strip_prefix("file:") {
            return Ok(FamilySource::File(PathBuf::from(path)));
        }
        Err(Error::Parse(format!("family source {s:?}: expected reference, random:<seed> or file:<path>")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub g_min: usize,
    pub g_max: usize,
    pub prime: u64,
    pub family: FamilySource,
    pub trials: usize,
    /// Seed for kernel sampling in the property checks.
    pub seed: u64,
    pub output_path: Option<PathBuf>,
    /// For `minors`: compute both minors at this prime instead of 5 and 23.
    pub prime_override: Option<u64>,
    /// Accept rank drops of the reference family at primes other than 109.
    pub allow_prime_drop: bool,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            g_min: MIN_GENUS,
            g_max: REFERENCE_MAX_GENUS,
            prime: REFERENCE_PRIME,
            family: FamilySource::Reference,
            trials: 5,
            seed: 0,
            output_path: None,
            prime_override: None,
            allow_prime_drop: false,
        }
    }

    pub fn validate(&self) -> Result<PrimeModulus> {
        if self.g_min < MIN_GENUS {
            return Err(Error::GenusOutOfRange {
                g: self.g_min,
                reason: format!("genus must be at least {MIN_GENUS}"),
            });
        }
        if self.g_min > self.g_max {
            return Err(Error::GenusOutOfRange {
                g: self.g_min,
                reason: format!("empty genus range {}..={}", self.g_min, self.g_max),
            });
        }
        if self.family == FamilySource::Reference && self.g_max > REFERENCE_MAX_GENUS {
            return Err(Error::GenusOutOfRange {
                g: self.g_max,
                reason: format!("reference parameters cover genus up to {REFERENCE_MAX_GENUS}"),
            });
        }
        PrimeModulus::new(self.prime)
    }

    /// Genera the run covers; a family file fixes its own genus.
    fn genera(&self, p: PrimeModulus) -> Result<Vec<(usize, Result<CurveFamily>)>> {
        match &self.family {
            FamilySource::File(path) => {
                let fam = CurveFamily::load(path, p);
                let g = match &fam {
                    Ok(f) => f.genus(),
                    Err(_) => self.g_min,
                };
                Ok(vec![(g, fam)])
            }
            src => Ok((self.g_min..=self.g_max)
                .map(|g| {
                    let fam = match src {
                        FamilySource::Reference => CurveFamily::reference(g, p),
                        FamilySource::Random(seed) => CurveFamily::random(g, p, *seed),
                        FamilySource::File(_) => unreachable!(),
                    };
                    (g, fam)
                })
                .collect()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenusReport {
    #[serde(flatten)]
    pub ranks: RankReport,
    /// `None` when no reference table applies to the run.
    pub expected_pass: Option<bool>,
    /// Reference family deviates from the table at a prime other than 109.
    pub prime_drop: bool,
    pub warnings: Vec<String>,
}

impl GenusReport {
    pub fn passed(&self, allow_prime_drop: bool) -> bool {
        match self.expected_pass {
            Some(false) => self.prime_drop && allow_prime_drop,
            _ => true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinorResult {
    pub label: MinorLabel,
    pub g: usize,
    pub prime: u64,
    pub size: usize,
    pub value: u64,
    pub expected: Option<u64>,
}

impl MinorResult {
    pub fn passed(&self) -> bool {
        self.expected.is_none_or(|e| e == self.value)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinorsReport {
    #[serde(rename = "N")]
    pub n: Option<MinorResult>,
    #[serde(rename = "N_prime")]
    pub n_prime: Option<MinorResult>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunError {
    pub g: Option<usize>,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: RunConfig,
    pub reports: Vec<GenusReport>,
    pub minors: Option<MinorsReport>,
    pub properties: BTreeMap<String, bool>,
    pub errors: Vec<RunError>,
    /// Logged but not fatal, e.g. a rank drop on a special random family.
    pub warnings: Vec<String>,
    /// Wall-clock time per stage, in microseconds.
    pub timings_us: BTreeMap<String, u64>,
    pub pass: bool,
}

impl RunReport {
    fn new(config: &RunConfig) -> Self {
        RunReport {
            config: config.clone(),
            reports: Vec::new(),
            minors: None,
            properties: BTreeMap::new(),
            errors: Vec::new(),
            warnings: Vec::new(),
            timings_us: BTreeMap::new(),
            pass: false,
        }
    }

    fn finish(mut self) -> Self {
        let allow = self.config.allow_prime_drop;
        self.pass = self.errors.is_empty()
            && self.reports.iter().all(|r| r.passed(allow))
            && self.properties.values().all(|&ok| ok)
            && self.minors.as_ref().is_none_or(|m| m.pass);
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Console table, one block per genus.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in &self.reports {
            let k = &r.ranks;
            let n = binomial2(k.g);
            let _ = writeln!(out, "For g={:2}, dim I_2={:3}", k.g, k.dim_i2);
            let _ = writeln!(out, "dim Ker(nu)={:3}; corank(nu)={:3}", k.dim_ker_nu, k.corank_nu);
            let _ = writeln!(out, "dim ker(tau)={:2}; corank(tau)={:2}", n - k.r2, k.corank_tau);
            let verdict = |b: bool| if b { "yes" } else { "no" };
            let expected = match r.expected_pass {
                Some(true) => "pass",
                Some(false) if r.prime_drop => "PRIME-DROP",
                Some(false) => "FAIL",
                None => "-",
            };
            let _ = writeln!(
                out,
                "  p={} r0={} r1={} r2={} | nu inj={} surj={} | mu inj={} surj={} | table: {expected}",
                k.prime,
                k.r0,
                k.r1,
                k.r2,
                verdict(k.nu_injective),
                verdict(k.nu_surjective),
                verdict(k.mu_injective),
                verdict(k.mu_surjective),
            );
            for w in &r.warnings {
                let _ = writeln!(out, "  warning: {w}");
            }
        }
        if let Some(m) = &self.minors {
            for res in [&m.n, &m.n_prime].into_iter().flatten() {
                let name = match res.label {
                    MinorLabel::N => "N",
                    MinorLabel::NPrime => "N'",
                };
                let status = match res.expected {
                    Some(e) if e == res.value => "pass".to_string(),
                    Some(e) => format!("FAIL (expected {e})"),
                    None => "informational".to_string(),
                };
                let _ = writeln!(
                    out,
                    "For g={:2}, the minor {name} ({}x{}) is congruent to {} mod {}: {status}",
                    res.g, res.size, res.size, res.value, res.prime
                );
            }
        }
        for (name, ok) in &self.properties {
            let _ = writeln!(out, "{:<48} {}", name, if *ok { "pass" } else { "FAIL" });
        }
        for w in &self.warnings {
            let _ = writeln!(out, "warning: {w}");
        }
        for e in &self.errors {
            match e.g {
                Some(g) => {
                    let _ = writeln!(out, "error (g={g}): {}", e.message);
                }
                None => {
                    let _ = writeln!(out, "error: {}", e.message);
                }
            }
        }
        let _ = writeln!(out, "overall: {}", if self.pass { "PASS" } else { "FAIL" });
        out
    }
}

fn elapsed_us(t: Instant) -> u64 {
    t.elapsed().as_micros().min(u64::MAX as u128) as u64
}

fn family_warnings(fam: &CurveFamily) -> Vec<String> {
    fam.cross_collisions()
        .into_iter()
        .map(|(i, j)| format!("parameter {i} of C1 equals parameter {j} of C2 mod {}", fam.modulus()))
        .collect()
}

pub fn cmd_verify(cfg: &RunConfig) -> Result<RunReport> {
    let p = cfg.validate()?;
    let mut report = RunReport::new(cfg);
    let start = Instant::now();
    let compare = cfg.family == FamilySource::Reference;

    let results: Vec<(usize, Result<GenusReport>, u64)> = cfg
        .genera(p)?
        .into_par_iter()
        .map(|(g, fam)| {
            let t = Instant::now();
            let out = fam.and_then(|fam| {
                let ranks = rank_report(&fam)?;
                let expected_pass = if compare {
                    expected_ranks(g).map(|e| e.r0 == ranks.r0 && e.r1 == ranks.r1 && e.r2 == ranks.r2)
                } else {
                    None
                };
                let prime_drop = expected_pass == Some(false) && p.value() != REFERENCE_PRIME;
                Ok(GenusReport { ranks, expected_pass, prime_drop, warnings: family_warnings(&fam) })
            });
            (g, out, elapsed_us(t))
        })
        .collect();

    for (g, res, us) in results {
        report.timings_us.insert(format!("g={g:02}"), us);
        match res {
            Ok(r) => report.reports.push(r),
            Err(e) => report.errors.push(RunError { g: Some(g), message: e.to_string() }),
        }
    }
    report.timings_us.insert("total".into(), elapsed_us(start));
    Ok(report.finish())
}

fn minor_result(case: &MinorCase, expected: Option<u64>) -> MinorResult {
    MinorResult {
        label: case.label.clone(),
        g: case.g,
        prime: case.prime.value(),
        size: case.matrix.rows(),
        value: case.value.value(),
        expected,
    }
}

pub fn cmd_minors(cfg: &RunConfig) -> Result<RunReport> {
    let mut report = RunReport::new(cfg);
    let start = Instant::now();
    let mut minors = MinorsReport::default();

    let run = |label: MinorLabel, fam: Result<CurveFamily>, expected: Option<u64>| -> Result<MinorResult> {
        let case = MinorCase::from_family(label, &fam?)?;
        Ok(minor_result(&case, expected))
    };

    match &cfg.family {
        FamilySource::File(path) => {
            let p = PrimeModulus::new(cfg.prime_override.unwrap_or(cfg.prime))?;
            let fam = CurveFamily::load(path, p)?;
            match fam.genus() {
                N_GENUS => minors.n = Some(run(MinorLabel::N, Ok(fam), None)?),
                N_PRIME_GENUS => minors.n_prime = Some(run(MinorLabel::NPrime, Ok(fam), None)?),
                g => {
                    return Err(Error::GenusOutOfRange {
                        g,
                        reason: format!("minors are defined for genus {N_GENUS} (N) and {N_PRIME_GENUS} (N')"),
                    })
                }
            }
        }
        FamilySource::Random(_) => {
            return Err(Error::Parse("minors require the reference family or a family file".into()));
        }
        FamilySource::Reference => {
            let (pn, pnp, informational) = match cfg.prime_override {
                Some(q) => (q, q, true),
                None => (N_PRIME, N_PRIME_PRIME, false),
            };
            let (pn, pnp) = (PrimeModulus::new(pn)?, PrimeModulus::new(pnp)?);
            let exp = |v: u64| if informational { None } else { Some(v) };
            minors.n = Some(run(MinorLabel::N, CurveFamily::reference_unchecked(N_GENUS, pn), exp(N_EXPECTED))?);
            minors.n_prime = Some(run(
                MinorLabel::NPrime,
                CurveFamily::reference_unchecked(N_PRIME_GENUS, pnp),
                exp(N_PRIME_EXPECTED),
            )?);
        }
    }
    minors.pass = [&minors.n, &minors.n_prime].into_iter().flatten().all(MinorResult::passed);
    report.minors = Some(minors);
    report.timings_us.insert("total".into(), elapsed_us(start));
    Ok(report.finish())
}

/// The property battery for one family. Sampled checks are skipped when `trials == 0`.
pub fn family_properties(fam: &CurveFamily, trials: usize, seed: u64) -> Result<BTreeMap<&'static str, bool>> {
    let g = fam.genus();
    let p = fam.modulus();
    let mut out = BTreeMap::new();
    let ideal = IdealSystem::build(fam);

    out.insert("pq_identity_rows", verify_pq_identity(fam));
    out.insert("pq_identity_coefficients", verify_pkhij(fam));
    out.insert(
        "pq_rank_equal",
        Component::BOTH.into_iter().all(|k| build_p_system(fam, k).rank(p) == build_q_system(fam, k).rank(p)),
    );
    let mut vdm = true;
    for k in Component::BOTH {
        vdm &= vandermonde_minor_check(fam, k)?;
    }
    out.insert("vandermonde_minor", vdm);
    out.insert("q_recurrences", verify_q_recurrences(fam));
    out.insert(
        "pair_index_roundtrip",
        PairIndex::all(g)
            .enumerate()
            .all(|(pos, pr)| pr.position(g) == pos && PairIndex::from_position(g, pos) == Some(pr)),
    );
    out.insert("target_dimension_identity", nu_target_dim(g) + tau_target_dim(g) == mu_target_dim(g));

    if trials > 0 {
        if ideal.dim_i2() > 0 {
            out.insert("degree_drop", degree_drop_check(&ideal, trials, seed));
            out.insert("leading_closed_forms", leading_coeff_closed_forms(&ideal, trials, seed.wrapping_add(1)));
            let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed.wrapping_add(2));
            let contains = (0..trials).all(|_| {
                let s = ideal.z_echelon.random_kernel_vector(p, &mut rng);
                Component::BOTH.into_iter().all(|k| restrict_quadric(fam, k, &s).is_zero())
            });
            out.insert("kernel_quadrics_contain_curve", contains);
        }
        let ranks = rank_report(fam)?;
        out.insert("monotone_rank_chain", ranks.r0 <= ranks.r1 && ranks.r1 <= ranks.r2 && ranks.r2 <= binomial2(g));
    }
    Ok(out)
}

type GenusProperties = (BTreeMap<&'static str, bool>, Vec<String>);

pub fn cmd_properties(cfg: &RunConfig) -> Result<RunReport> {
    let p = cfg.validate()?;
    let mut report = RunReport::new(cfg);
    let start = Instant::now();

    let results: Vec<(usize, Result<GenusProperties>, u64)> = cfg
        .genera(p)?
        .into_par_iter()
        .map(|(g, fam)| {
            let t = Instant::now();
            let out = fam.and_then(|fam| {
                let props = family_properties(&fam, cfg.trials, cfg.seed ^ ((g as u64) << 32))?;
                let mut warnings = family_warnings(&fam);
                let r0 = IdealSystem::build(&fam).r0;
                if r0 != 2 * g - 3 {
                    warnings.push(format!("rank of Z is {r0}, below the generic 2g-3 = {}; special family", 2 * g - 3));
                }
                Ok((props, warnings))
            });
            (g, out, elapsed_us(t))
        })
        .collect();

    for (g, res, us) in results {
        report.timings_us.insert(format!("g={g:02}"), us);
        match res {
            Ok((props, warnings)) => {
                for (name, ok) in props {
                    report.properties.insert(format!("g={g:02}/{name}"), ok);
                }
                report.warnings.extend(warnings.into_iter().map(|w| format!("g={g}: {w}")));
            }
            Err(e) => report.errors.push(RunError { g: Some(g), message: e.to_string() }),
        }
    }
    report.timings_us.insert("total".into(), elapsed_us(start));
    Ok(report.finish())
}

pub fn run(cfg: &RunConfig) -> Result<RunReport> {
    match cfg.command {
        Command::Verify => cmd_verify(cfg),
        Command::Minors => cmd_minors(cfg),
        Command::Properties => cmd_properties(cfg),
    }
}
