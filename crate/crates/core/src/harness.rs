//! Seeded sampling of in-domain parameters, batch verification and reports.
//!
//! Sampling draws every candidate from one ChaCha8 stream, so a run is a pure
//! function of its [`SampleSpec`]. Evaluation of the accepted assignments may
//! run in parallel; results are collected in sample order.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::identities::{
    self, find_identity, EquivalenceCheck, IdentityDescriptor,
    ParamAssignment, SpecializationCheck, JOUHET, REDUCTION, SPECIALIZABLE, THM3,
};
use crate::series::EvalConfig;
use crate::ComplexScalar;

/// Consecutive rejections after which sampling gives up.
pub const MAX_REJECTIONS: usize = 10_000;

/// Environment variable capping the number of evaluation threads.
pub const THREADS_ENV: &str = "QSERIES_THREADS";

/// Largest relative difference accepted between the two left sides of an
/// equivalence check.
pub const LHS_MATCH_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleSpec {
    pub identity_id: String,
    pub count: usize,
    pub seed: u64,
    /// Real `q` drawn uniformly from this range.
    pub q_range: [f64; 2],
    /// Slot moduli drawn log-uniformly from this range.
    pub modulus_range: [f64; 2],
    /// Uniform phases when set; otherwise real values of random sign.
    pub complex_phases: bool,
    /// Minimum log-modulus distance from every convergence boundary.
    pub margin: f64,
    /// Minimum distance of every denominator product from its nearest zero.
    pub pole_guard: f64,
}

impl SampleSpec {
    pub fn new(identity_id: &str, count: usize, seed: u64) -> Self {
        SampleSpec {
            identity_id: identity_id.to_string(),
            count,
            seed,
            q_range: [0.1, 0.6],
            modulus_range: [0.3, 3.0],
            complex_phases: true,
            margin: 0.15,
            pole_guard: 1e-3,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let [qlo, qhi] = self.q_range;
        let [mlo, mhi] = self.modulus_range;
        let bad = |msg: &str| Err(Error::InvalidArgument(msg.to_string()));
        if self.count < 1 {
            return bad("sample count must be at least 1");
        }
        if !(0.0 < qlo && qlo <= qhi && qhi < 1.0) {
            return bad("q range must satisfy 0 < lo <= hi < 1");
        }
        if !(0.0 < mlo && mlo <= mhi && mhi.is_finite()) {
            return bad("modulus range must satisfy 0 < lo <= hi");
        }
        if !(self.margin > 0.0) {
            return bad("margin must be positive");
        }
        if !(self.pole_guard > 0.0) {
            return bad("pole guard must be positive");
        }
        Ok(())
    }
}

/// Maps a drawn assignment to the one actually checked, or rejects it.
type Transform = dyn Fn(&ParamAssignment, &SampleSpec) -> Option<ParamAssignment> + Sync;

/// Rejection sampler over one identity's free slots.
pub struct Sampler<'t> {
    spec: SampleSpec,
    identity: &'static IdentityDescriptor,
    rng: ChaCha8Rng,
    transform: Option<&'t Transform>,
    rejected: usize,
}

impl<'t> Sampler<'t> {
    pub fn new(spec: &SampleSpec) -> Result<Self> {
        spec.validate()?;
        Ok(Sampler {
            identity: find_identity(&spec.identity_id)?,
            rng: ChaCha8Rng::seed_from_u64(spec.seed),
            spec: spec.clone(),
            transform: None,
            rejected: 0,
        })
    }

    fn with_transform(mut self, t: &'t Transform) -> Self {
        self.transform = Some(t);
        self
    }

    /// Total rejected candidates so far.
    pub fn rejected(&self) -> usize {
        self.rejected
    }

    fn draw(&mut self) -> ParamAssignment {
        let [qlo, qhi] = self.spec.q_range;
        let (llo, lhi) = (self.spec.modulus_range[0].ln(), self.spec.modulus_range[1].ln());
        let mut p = ParamAssignment::new();
        let q = if qlo < qhi { self.rng.gen_range(qlo..qhi) } else { qlo };
        p.set("q", ComplexScalar::new(q, 0.0));
        for slot in self.identity.parameter_slots() {
            let modulus = if llo < lhi { self.rng.gen_range(llo..lhi) } else { llo }.exp();
            let phase = if self.spec.complex_phases {
                self.rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI)
            } else if self.rng.gen_bool(0.5) {
                0.0
            } else {
                std::f64::consts::PI
            };
            p.set(slot, ComplexScalar::from_polar(modulus, phase));
        }
        p
    }

    fn admissible(&self, p: &ParamAssignment) -> bool {
        in_domain(self.identity, p, &self.spec)
    }

    /// The next accepted assignment of the stream.
    pub fn next_sample(&mut self) -> Result<ParamAssignment> {
        for _ in 0..MAX_REJECTIONS {
            let raw = self.draw();
            let candidate = match self.transform {
                Some(t) => t(&raw, &self.spec),
                None => Some(raw),
            };
            match candidate {
                Some(p) if self.admissible(&p) => return Ok(p),
                _ => self.rejected += 1,
            }
        }
        Err(Error::Exhausted {
            identity: self.identity.id.to_string(),
            attempts: MAX_REJECTIONS,
        })
    }
}

fn in_domain(d: &IdentityDescriptor, p: &ParamAssignment, spec: &SampleSpec) -> bool {
    d.margin(p).is_ok_and(|m| m >= spec.margin) && d.check_constraint(p, spec.pole_guard).is_ok()
}

/// The first assignment of the stream for `spec`.
pub fn sample_params(spec: &SampleSpec) -> Result<ParamAssignment> {
    Sampler::new(spec)?.next_sample()
}

fn sample_batch(spec: &SampleSpec, t: Option<&Transform>) -> Result<(Vec<ParamAssignment>, usize)> {
    let mut s = Sampler::new(spec)?;
    if let Some(t) = t {
        s = s.with_transform(t);
    }
    let samples = (0..spec.count).map(|_| s.next_sample()).collect::<Result<_>>()?;
    Ok((samples, s.rejected()))
}

/// Thread cap from [`THREADS_ENV`], if set to a positive integer.
pub fn thread_cap() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()?
        .trim()
        .parse()
        .ok()
        .filter(|&n: &usize| n > 0)
}

/// Runs `f` over `items` in parallel on at most `threads` threads, keeping
/// input order.
fn par_map<T: Sync, U: Send>(
    items: &[T],
    threads: Option<usize>,
    f: impl Fn(&T) -> U + Sync + Send,
) -> Vec<U> {
    let run = || items.par_iter().map(&f).collect();
    match threads.and_then(|n| rayon::ThreadPoolBuilder::new().num_threads(n).build().ok()) {
        Some(pool) => pool.install(run),
        None => run(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleStatus {
    Pass,
    /// Residual above the check tolerance.
    Fail,
    /// A side did not converge or hit a pole.
    Error,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleRecord {
    pub index: usize,
    pub params: ParamAssignment,
    pub lhs: Option<ComplexScalar>,
    pub rhs: Option<ComplexScalar>,
    pub lhs_err: Option<f64>,
    pub rhs_err: Option<f64>,
    pub rel_residual: Option<f64>,
    pub tol_check: Option<f64>,
    pub status: SampleStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl SampleRecord {
    fn evaluate(index: usize, id: &str, params: ParamAssignment, cfg: &EvalConfig) -> Self {
        match identities::evaluate_identity(id, &params, cfg) {
            Ok(c) => SampleRecord {
                index,
                params,
                lhs: Some(c.lhs),
                rhs: Some(c.rhs),
                lhs_err: Some(c.lhs_err),
                rhs_err: Some(c.rhs_err),
                rel_residual: Some(c.rel_residual),
                tol_check: Some(c.tol_check),
                status: if c.pass { SampleStatus::Pass } else { SampleStatus::Fail },
                error: None,
            },
            Err(e) => SampleRecord {
                index,
                params,
                lhs: None,
                rhs: None,
                lhs_err: None,
                rhs_err: None,
                rel_residual: None,
                tol_check: None,
                status: SampleStatus::Error,
                error: Some(e.to_string()),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportConfig {
    pub sampler: SampleSpec,
    pub eval: EvalConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub count: usize,
    /// Samples that passed.
    pub accepted: usize,
    /// Candidates rejected by the sampler before `count` were accepted.
    pub rejected_domain: usize,
    /// Samples that failed the residual check or did not evaluate.
    pub failed: usize,
    /// Over samples that evaluated.
    pub max_rel_residual: f64,
    pub median_rel_residual: f64,
    pub wall_time_ms: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub identity_id: String,
    pub seed: u64,
    pub config: ReportConfig,
    pub summary: Summary,
    pub samples: Vec<SampleRecord>,
}

impl VerificationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// The report with `wall_time_ms` zeroed, for comparing runs.
    pub fn without_timing(&self) -> Self {
        let mut r = self.clone();
        r.summary.wall_time_ms = 0;
        r
    }

    pub fn residuals(&self) -> Vec<Option<f64>> {
        self.samples.iter().map(|s| s.rel_residual).collect()
    }
}

/// Median of a non-empty list; mean of the middle pair for even lengths.
fn median(v: &mut [f64]) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

pub fn run_verification(spec: &SampleSpec, cfg: &EvalConfig) -> Result<VerificationReport> {
    run_verification_with_threads(spec, cfg, thread_cap())
}

/// [`run_verification`] on at most `threads` threads (`None`: rayon default).
pub fn run_verification_with_threads(
    spec: &SampleSpec,
    cfg: &EvalConfig,
    threads: Option<usize>,
) -> Result<VerificationReport> {
    let start = Instant::now();
    cfg.validate()?;
    let (params, rejected) = sample_batch(spec, None)?;
    let indexed: Vec<_> = params.into_iter().enumerate().collect();
    let samples = par_map(&indexed, threads, |(i, p)| {
        SampleRecord::evaluate(*i, &spec.identity_id, p.clone(), cfg)
    });
    let mut residuals: Vec<f64> = samples.iter().filter_map(|s| s.rel_residual).collect();
    let accepted = samples.iter().filter(|s| s.status == SampleStatus::Pass).count();
    let max_rel_residual = residuals.iter().copied().fold(0.0, f64::max);
    Ok(VerificationReport {
        identity_id: spec.identity_id.clone(),
        seed: spec.seed,
        config: ReportConfig {
            sampler: spec.clone(),
            eval: *cfg,
        },
        summary: Summary {
            count: samples.len(),
            accepted,
            rejected_domain: rejected,
            failed: samples.len() - accepted,
            max_rel_residual,
            median_rel_residual: median(&mut residuals),
            wall_time_ms: start.elapsed().as_millis() as u64,
        },
        samples,
    })
}

/// Samples for the integer specialization of `spec.identity_id` at `m`; the
/// domain is checked after pinning.
pub fn sample_specialized(spec: &SampleSpec, m: u32) -> Result<Vec<ParamAssignment>> {
    let slot = identities::pinned_slot(&spec.identity_id)?;
    let pin = move |p: &ParamAssignment, _: &SampleSpec| identities::pin(p, slot, m).ok();
    Ok(sample_batch(spec, Some(&pin))?.0)
}

pub fn run_specialization(
    spec: &SampleSpec,
    m: u32,
    cfg: &EvalConfig,
) -> Result<Vec<Result<SpecializationCheck>>> {
    let params = sample_specialized(spec, m)?;
    Ok(par_map(&params, thread_cap(), |p| {
        identities::specialize_at_integer(&spec.identity_id, m, p, cfg)
    }))
}

/// Theorem 3 samples whose mapped Jouhet assignment is also in domain.
pub fn sample_equivalence(count: usize, seed: u64) -> Result<Vec<ParamAssignment>> {
    let spec = SampleSpec::new(THM3, count, seed);
    let jouhet = find_identity(JOUHET)?;
    let both = move |p: &ParamAssignment, s: &SampleSpec| {
        let mapped = identities::thm3_to_jouhet(p).ok()?;
        in_domain(jouhet, &mapped, s).then(|| p.clone())
    };
    Ok(sample_batch(&spec, Some(&both))?.0)
}

pub fn run_equivalence(
    count: usize,
    seed: u64,
    cfg: &EvalConfig,
) -> Result<Vec<Result<EquivalenceCheck>>> {
    let params = sample_equivalence(count, seed)?;
    Ok(par_map(&params, thread_cap(), |p| {
        identities::cross_check_equivalence(p, cfg)
    }))
}

/// Entry 16 samples extended by a `d` for which Theorem 3 with `e = aq/d` is
/// also in domain.
pub fn sample_reduction(count: usize, seed: u64) -> Result<Vec<ParamAssignment>> {
    let spec = SampleSpec::new(THM3, count, seed);
    let reduction = find_identity(REDUCTION)?;
    let pinned = move |p: &ParamAssignment, s: &SampleSpec| {
        let (a, q, d) = (p.get("a")?, p.get("q")?, p.get("d")?);
        let mut direct = p.clone();
        direct.remove("d");
        direct.remove("e");
        in_domain(reduction, &direct, s).then(|| p.clone().with("e", a * q / d))
    };
    let samples = sample_batch(&spec, Some(&pinned))?.0;
    Ok(samples
        .into_iter()
        .map(|mut p| {
            p.remove("e");
            p
        })
        .collect())
}

/// One line of the `check-all` suite.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckLine {
    pub label: String,
    pub samples: usize,
    pub failed: usize,
    pub max_rel_residual: f64,
    /// Equivalence runs: largest left-side mismatch.
    pub max_lhs_match: Option<f64>,
    pub error: Option<String>,
}

impl CheckLine {
    pub fn pass(&self) -> bool {
        self.error.is_none() && self.failed == 0
    }

    fn errored(label: String, e: Error) -> Self {
        CheckLine {
            label,
            samples: 0,
            failed: 0,
            max_rel_residual: 0.0,
            max_lhs_match: None,
            error: Some(e.to_string()),
        }
    }
}

impl std::fmt::Display for CheckLine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let verdict = if self.pass() { "PASS" } else { "FAIL" };
        if let Some(e) = &self.error {
            return write!(f, "{verdict} {} error: {e}", self.label);
        }
        write!(
            f,
            "{verdict} {} samples={} failed={} max_rel_residual={:.16e}",
            self.label, self.samples, self.failed, self.max_rel_residual
        )?;
        if let Some(m) = self.max_lhs_match {
            write!(f, " max_lhs_match={m:.16e}")?;
        }
        Ok(())
    }
}

/// Per-entry verification, specialization at `m = 0..=3` for Theorems 1–3,
/// and the Theorem 3 / Jouhet equivalence, `samples` assignments each.
pub fn check_all(samples: usize, seed: u64, cfg: &EvalConfig) -> Result<Vec<CheckLine>> {
    if samples == 0 {
        return Err(Error::InvalidArgument("sample count must be at least 1".into()));
    }
    let mut lines = Vec::new();
    for d in identities::catalog() {
        let label = d.id.to_string();
        lines.push(
            match run_verification(&SampleSpec::new(d.id, samples, seed), cfg) {
                Ok(r) => CheckLine {
                    label,
                    samples: r.summary.count,
                    failed: r.summary.failed,
                    max_rel_residual: r.summary.max_rel_residual,
                    max_lhs_match: None,
                    error: None,
                },
                Err(e) => CheckLine::errored(label, e),
            },
        );
    }
    for (id, _) in SPECIALIZABLE {
        for m in 0..=3 {
            let label = format!("{id}@m={m}");
            let spec = SampleSpec::new(id, samples, seed);
            lines.push(match run_specialization(&spec, m, cfg) {
                Ok(rs) => {
                    let ok = |r: &Result<SpecializationCheck>| {
                        r.as_ref().is_ok_and(|s| s.check.pass && s.terminated)
                    };
                    CheckLine {
                        label,
                        samples: rs.len(),
                        failed: rs.iter().filter(|r| !ok(r)).count(),
                        max_rel_residual: max_of(rs.iter().flatten().map(|s| s.check.rel_residual)),
                        max_lhs_match: None,
                        error: None,
                    }
                }
                Err(e) => CheckLine::errored(label, e),
            });
        }
    }
    let label = format!("{THM3}~{JOUHET}");
    lines.push(match run_equivalence(samples, seed, cfg) {
        Ok(rs) => {
            let ok = |r: &Result<EquivalenceCheck>| {
                r.as_ref().is_ok_and(|e| {
                    e.check_a.pass && e.check_b.pass && e.lhs_match <= LHS_MATCH_TOL
                })
            };
            CheckLine {
                label,
                samples: rs.len(),
                failed: rs.iter().filter(|r| !ok(r)).count(),
                max_rel_residual: max_of(
                    rs.iter()
                        .flatten()
                        .flat_map(|e| [e.check_a.rel_residual, e.check_b.rel_residual]),
                ),
                max_lhs_match: Some(max_of(rs.iter().flatten().map(|e| e.lhs_match))),
                error: None,
            }
        }
        Err(e) => CheckLine::errored(label, e),
    });
    Ok(lines)
}

fn max_of(it: impl Iterator<Item = f64>) -> f64 {
    it.fold(0.0, f64::max)
}
