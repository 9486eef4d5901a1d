//! Unilateral `rφs` and bilateral `rψs` series by term-ratio marching.
//!
//! The forward direction starts at `t_0 = 1` and multiplies by
//! `t_{k+1}/t_k = z (-q^k)^e ∏(1 - a_i q^k) / ∏(1 - b_j q^k)`.
//! The backward direction divides by the same ratio at `j = k - 1 < 0`, written
//! in terms of `u = q^{-j}` as `z (-1)^e ∏(u - a_i) / ∏(u - b_j)` so that no
//! factor grows like `q^j`. A multiplication factor that vanishes ends the
//! direction exactly; vanishing division factors are poles.
//!
//! Parameters of the form `±√w` are never split: a [`Param::PairSq`] holds `w`
//! and contributes the factor `1 - w q^{2k}`.

use std::cmp::Ordering;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::qpochhammer::{ProductConfig, QBase, POLE_GUARD};
use crate::ComplexScalar;

/// Relative size below which a multiplication factor is treated as an exact
/// zero (a terminating series).
pub const TERMINATION_SNAP: f64 = 1e-12;

/// Ratios at or above this cannot certify a geometric tail bound.
pub const RATIO_CEILING: f64 = 0.95;

const ZERO: ComplexScalar = ComplexScalar::new(0.0, 0.0);
const ONE: ComplexScalar = ComplexScalar::new(1.0, 0.0);

/// One entry of a numerator or denominator parameter list.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Param {
    /// An ordinary parameter `a`.
    Single(ComplexScalar),
    /// The pair `√w, -√w`, stored as the square `w`.
    PairSq(ComplexScalar),
}

impl Param {
    fn weight(self) -> u32 {
        match self {
            Param::Single(_) => 1,
            Param::PairSq(_) => 2,
        }
    }

    /// Contribution to the product of the expanded parameter list.
    fn product(self) -> ComplexScalar {
        match self {
            Param::Single(a) => a,
            Param::PairSq(w) => -w,
        }
    }

    /// `1 - a q^k` (or `1 - w q^{2k}`), given `q^k`.
    #[inline]
    fn forward_factor(self, qk: ComplexScalar) -> ComplexScalar {
        match self {
            Param::Single(a) => 1.0 - a * qk,
            Param::PairSq(w) => 1.0 - w * (qk * qk),
        }
    }

    /// `u - a` (or `u² - w`) with `u = q^{-j}`, and `|1 - a q^j|` which it
    /// represents after dividing by `u` (or `u²`).
    #[inline]
    fn backward_factor(self, u: ComplexScalar) -> (ComplexScalar, f64) {
        match self {
            Param::Single(a) => {
                let f = u - a;
                (f, f.norm() / u.norm())
            }
            Param::PairSq(w) => {
                let u2 = u * u;
                let f = u2 - w;
                (f, f.norm() / u2.norm())
            }
        }
    }

    fn cmp_canonical(&self, other: &Param) -> Ordering {
        let key = |p: &Param| match *p {
            Param::Single(v) => (0u8, v),
            Param::PairSq(v) => (1u8, v),
        };
        let (ta, va) = key(self);
        let (tb, vb) = key(other);
        ta.cmp(&tb)
            .then(va.re.total_cmp(&vb.re))
            .then(va.im.total_cmp(&vb.im))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SeriesKind {
    /// `Σ_{k≥0}`, with the implicit `(q;q)_k` in the denominator.
    Unilateral,
    /// `Σ_{k∈ℤ}`.
    Bilateral,
}

/// Parameters of an `rφs` or `rψs` series.
///
/// Parameter lists are stored in a canonical order, so two specs that differ
/// only by a permutation of their parameters evaluate bit-identically.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesSpec {
    kind: SeriesKind,
    numerator: Vec<Param>,
    denominator: Vec<Param>,
    q: QBase,
    z: ComplexScalar,
    sign_exponent: u32,
}

impl SeriesSpec {
    pub fn new(
        kind: SeriesKind,
        mut numerator: Vec<Param>,
        mut denominator: Vec<Param>,
        q: QBase,
        z: ComplexScalar,
    ) -> Result<Self> {
        let all_finite = numerator
            .iter()
            .chain(denominator.iter())
            .map(|p| match *p {
                Param::Single(v) | Param::PairSq(v) => v,
            })
            .chain(std::iter::once(z))
            .all(|v| v.re.is_finite() && v.im.is_finite());
        if !all_finite {
            return Err(Error::InvalidArgument("non-finite series parameter".into()));
        }
        let num_w: u32 = numerator.iter().map(|p| p.weight()).sum();
        let mut den_w: u32 = denominator.iter().map(|p| p.weight()).sum();
        if kind == SeriesKind::Unilateral {
            den_w += 1;
        }
        if den_w < num_w {
            return Err(Error::InvalidArgument(format!(
                "more numerator ({num_w}) than denominator ({den_w}) parameters"
            )));
        }
        numerator.sort_by(Param::cmp_canonical);
        denominator.sort_by(Param::cmp_canonical);
        Ok(SeriesSpec {
            kind,
            numerator,
            denominator,
            q,
            z,
            sign_exponent: den_w - num_w,
        })
    }

    pub fn unilateral(
        numerator: Vec<Param>,
        denominator: Vec<Param>,
        q: QBase,
        z: ComplexScalar,
    ) -> Result<Self> {
        Self::new(SeriesKind::Unilateral, numerator, denominator, q, z)
    }

    pub fn bilateral(
        numerator: Vec<Param>,
        denominator: Vec<Param>,
        q: QBase,
        z: ComplexScalar,
    ) -> Result<Self> {
        Self::new(SeriesKind::Bilateral, numerator, denominator, q, z)
    }

    pub fn kind(&self) -> SeriesKind {
        self.kind
    }

    pub fn numerator(&self) -> &[Param] {
        &self.numerator
    }

    pub fn denominator(&self) -> &[Param] {
        &self.denominator
    }

    pub fn q(&self) -> QBase {
        self.q
    }

    pub fn z(&self) -> ComplexScalar {
        self.z
    }

    /// `e` in the factor `((-1)^k q^{k(k-1)/2})^e`.
    pub fn sign_exponent(&self) -> u32 {
        self.sign_exponent
    }

    /// The same series with `z` replaced.
    pub fn with_z(&self, z: ComplexScalar) -> SeriesSpec {
        SeriesSpec { z, ..self.clone() }
    }

    fn gauss_factor(&self, qk: ComplexScalar) -> ComplexScalar {
        let mut g = ONE;
        for _ in 0..self.sign_exponent {
            g *= -qk;
        }
        g
    }

    fn backward_sign(&self) -> f64 {
        if self.sign_exponent % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    fn product_of(params: &[Param]) -> ComplexScalar {
        params.iter().fold(ONE, |acc, p| acc * p.product())
    }
}

/// Marching and stopping controls.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EvalConfig {
    /// Terms are small once `|t| <= tol * |partial sum|`.
    pub tol: f64,
    /// Per direction.
    pub max_terms: usize,
    pub pole_guard: f64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            tol: 1e-14,
            max_terms: 20_000,
            pole_guard: POLE_GUARD,
        }
    }
}

impl EvalConfig {
    pub fn new(tol: f64, max_terms: usize, pole_guard: f64) -> Result<Self> {
        let cfg = EvalConfig {
            tol,
            max_terms,
            pole_guard,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_tol(self, tol: f64) -> Self {
        EvalConfig { tol, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) || self.max_terms < 8 || !(self.pole_guard > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "eval config needs tol > 0, max_terms >= 8, pole_guard > 0 (got {:e}, {}, {:e})",
                self.tol, self.max_terms, self.pole_guard
            )));
        }
        Ok(())
    }

    /// Matching truncation control for the infinite products of an identity.
    pub fn products(&self) -> ProductConfig {
        ProductConfig {
            tol: self.tol * 1e-2,
            max_factors: 100_000,
            pole_guard: self.pole_guard,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalStatus {
    Converged,
    Budget,
    PoleHit,
    DivergentRegion,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvalResult {
    pub value: ComplexScalar,
    /// Geometric tail bounds of both directions plus the rounding of the
    /// compensated partial sums.
    pub err: f64,
    /// Partial sum over `k >= 0`.
    pub forward_sum: ComplexScalar,
    /// Partial sum over `k < 0`; zero for unilateral series.
    pub backward_sum: ComplexScalar,
    /// Terms summed with `k >= 0`.
    pub n_forward: usize,
    /// Terms summed with `k < 0`.
    pub n_backward: usize,
    pub status: EvalStatus,
    pub forward_terminated: bool,
    pub backward_terminated: bool,
    pub detail: Option<String>,
}

impl EvalResult {
    fn failed(status: EvalStatus, detail: String) -> Self {
        EvalResult {
            value: ZERO,
            err: 0.0,
            forward_sum: ZERO,
            backward_sum: ZERO,
            n_forward: 0,
            n_backward: 0,
            status,
            forward_terminated: false,
            backward_terminated: false,
            detail: Some(detail),
        }
    }

    pub fn is_converged(&self) -> bool {
        self.status == EvalStatus::Converged
    }

    /// Maps every non-converged status to the matching [`Error`].
    pub fn into_result(self) -> Result<EvalResult> {
        let detail = self.detail.clone().unwrap_or_default();
        match self.status {
            EvalStatus::Converged => Ok(self),
            EvalStatus::Budget => Err(Error::Budget(detail)),
            EvalStatus::PoleHit => Err(Error::PoleHit(detail)),
            EvalStatus::DivergentRegion => Err(Error::DivergentRegion(detail)),
        }
    }
}

/// Ratio-test analysis of a series.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConvergenceRegion {
    pub forward_ok: bool,
    pub backward_ok: bool,
    /// `-ln|z|` for `e = 0`, `+∞` otherwise.
    pub forward_margin: f64,
    /// `ln(|a_1⋯a_r z| / |b_1⋯b_s|)`; `+∞` for unilateral series.
    pub backward_margin: f64,
}

pub fn convergence_region(spec: &SeriesSpec) -> ConvergenceRegion {
    let forward_margin = if spec.sign_exponent > 0 {
        f64::INFINITY
    } else {
        -spec.z.norm().ln()
    };
    let backward_margin = match spec.kind {
        SeriesKind::Unilateral => f64::INFINITY,
        SeriesKind::Bilateral => {
            let top = (SeriesSpec::product_of(&spec.numerator) * spec.z).norm();
            let bottom = SeriesSpec::product_of(&spec.denominator).norm();
            top.ln() - bottom.ln()
        }
    };
    ConvergenceRegion {
        forward_ok: forward_margin > 0.0,
        backward_ok: backward_margin > 0.0,
        forward_margin,
        backward_margin,
    }
}

/// Smallest log-distance to the convergence boundary over the directions that
/// do not terminate; `+inf` when both terminate.
pub fn convergence_margin(spec: &SeriesSpec) -> f64 {
    let region = convergence_region(spec);
    let fwd = if forward_termination(spec).is_some() {
        f64::INFINITY
    } else {
        region.forward_margin
    };
    let bwd = if backward_termination(spec).is_some() {
        f64::INFINITY
    } else {
        region.backward_margin
    };
    fwd.min(bwd)
}

/// `t_{k+1}/t_k` of the defining sum.
pub fn term_ratio(spec: &SeriesSpec, k: i64) -> Result<ComplexScalar> {
    let q = spec.q.value();
    let mut den_params = spec.denominator.clone();
    if spec.kind == SeriesKind::Unilateral {
        den_params.push(Param::Single(q));
    }
    let pole = |rel: f64, p: &Param| {
        if rel < POLE_GUARD {
            Err(Error::PoleHit(format!("denominator factor of {p:?} vanishes at k = {k}")))
        } else {
            Ok(())
        }
    };
    if k >= 0 {
        let qk = q.powi(k as i32);
        let mut r = spec.z * spec.gauss_factor(qk);
        for p in &spec.numerator {
            r *= p.forward_factor(qk);
        }
        for p in &den_params {
            let f = p.forward_factor(qk);
            pole(f.norm(), p)?;
            r /= f;
        }
        Ok(r)
    } else {
        let u = q.powi((-k) as i32);
        let mut r = spec.z * spec.backward_sign();
        for p in &spec.numerator {
            r *= p.backward_factor(u).0;
        }
        for p in &den_params {
            let (f, rel) = p.backward_factor(u);
            pole(rel, p)?;
            r /= f;
        }
        Ok(r)
    }
}

enum Step {
    Next(ComplexScalar),
    Terminate,
}

fn forward_step(spec: &SeriesSpec, qk: ComplexScalar, k: i64, guard: f64) -> Result<Step> {
    let mut mult = spec.z * spec.gauss_factor(qk);
    let mut zero = mult == ZERO;
    for p in &spec.numerator {
        let f = p.forward_factor(qk);
        if f.norm() <= TERMINATION_SNAP {
            zero = true;
        }
        mult *= f;
    }
    let mut div = ONE;
    let mut pole = None;
    let implicit = (spec.kind == SeriesKind::Unilateral).then_some(Param::Single(spec.q.value()));
    for p in spec.denominator.iter().chain(implicit.iter()) {
        let f = p.forward_factor(qk);
        if f.norm() < guard {
            pole = Some(*p);
        }
        div *= f;
    }
    match (zero, pole) {
        (true, Some(p)) => Err(Error::PoleHit(format!(
            "indeterminate: numerator zero and denominator pole {p:?} coincide at k = {k}"
        ))),
        (true, None) => Ok(Step::Terminate),
        (false, Some(p)) => Err(Error::PoleHit(format!(
            "denominator parameter {p:?} hits a pole at k = {k}"
        ))),
        (false, None) => Ok(Step::Next(mult / div)),
    }
}

/// Ratio `t_j / t_{j+1}` for `j <= -1`, with `u = q^{-j}`.
fn backward_step(spec: &SeriesSpec, u: ComplexScalar, j: i64, guard: f64) -> Result<Step> {
    let mut mult = ONE;
    let mut zero = false;
    for p in &spec.denominator {
        let (f, rel) = p.backward_factor(u);
        if rel <= TERMINATION_SNAP {
            zero = true;
        }
        mult *= f;
    }
    let mut div = spec.z * spec.backward_sign();
    let mut pole = None;
    for p in &spec.numerator {
        let (f, rel) = p.backward_factor(u);
        if rel < guard {
            pole = Some(*p);
        }
        div *= f;
    }
    if div == ZERO && pole.is_none() && !zero {
        return Err(Error::DivergentRegion(format!(
            "backward ratio is infinite at k = {j}"
        )));
    }
    match (zero, pole) {
        (true, Some(p)) => Err(Error::PoleHit(format!(
            "indeterminate: denominator zero and numerator pole {p:?} coincide at k = {j}"
        ))),
        (true, None) => Ok(Step::Terminate),
        (false, Some(p)) => Err(Error::PoleHit(format!(
            "numerator parameter {p:?} hits a pole at k = {j}"
        ))),
        (false, None) => Ok(Step::Next(mult / div)),
    }
}

/// Smallest integer `n` in units of `step` with `|1 - x q^{step n}| <= thresh`.
fn lattice_hits(x: ComplexScalar, q: QBase, step: i64, thresh: f64) -> Vec<i64> {
    let xm = x.norm();
    if xm == 0.0 || !xm.is_finite() {
        return Vec::new();
    }
    let lq = q.modulus().ln() * step as f64;
    let centre = -xm.ln() / lq;
    if !centre.is_finite() || centre.abs() > 1e6 {
        return Vec::new();
    }
    let lo = centre.floor() as i64 - 1;
    let hi = centre.ceil() as i64 + 1;
    (lo..=hi)
        .filter(|&n| {
            let w = x * q.value().powi((n * step) as i32);
            (1.0 - w).norm() <= thresh
        })
        .collect()
}

fn param_hits(p: Param, q: QBase, thresh: f64) -> Vec<i64> {
    match p {
        Param::Single(a) => lattice_hits(a, q, 1, thresh),
        Param::PairSq(w) => lattice_hits(w, q, 2, thresh),
    }
}

/// First index `k >= 0` at which the forward direction terminates.
fn forward_termination(spec: &SeriesSpec) -> Option<i64> {
    if spec.z == ZERO {
        return Some(0);
    }
    spec.numerator
        .iter()
        .flat_map(|&p| param_hits(p, spec.q, TERMINATION_SNAP))
        .filter(|&n| n >= 0)
        .min()
}

/// Last index `j <= -1` at which the backward direction terminates.
fn backward_termination(spec: &SeriesSpec) -> Option<i64> {
    if spec.kind == SeriesKind::Unilateral {
        return Some(-1);
    }
    spec.denominator
        .iter()
        .flat_map(|&p| param_hits(p, spec.q, TERMINATION_SNAP))
        .filter(|&n| n <= -1)
        .max()
}

/// Checks, without summing, that the series converges (or terminates) in each
/// direction and meets no pole before terminating.
pub fn check_domain(spec: &SeriesSpec, guard: f64) -> Result<()> {
    let region = convergence_region(spec);
    let fwd_end = forward_termination(spec);
    let bwd_end = backward_termination(spec);
    if !region.forward_ok && fwd_end.is_none() {
        return Err(Error::DivergentRegion(format!(
            "forward ratio |z| = {:.6} >= 1",
            spec.z.norm()
        )));
    }
    if !region.backward_ok && bwd_end.is_none() {
        return Err(Error::DivergentRegion(format!(
            "backward ratio |b1...bs / (a1...ar z)| = {:.6} >= 1",
            (-region.backward_margin).exp()
        )));
    }
    let last_fwd = fwd_end.unwrap_or(i64::MAX);
    let implicit = (spec.kind == SeriesKind::Unilateral).then_some(Param::Single(spec.q.value()));
    for &p in spec.denominator.iter().chain(implicit.iter()) {
        if let Some(n) = param_hits(p, spec.q, guard)
            .into_iter()
            .find(|&n| n >= 0 && n <= last_fwd)
        {
            return Err(Error::PoleHit(format!(
                "denominator parameter {p:?} meets a pole at k = {n}"
            )));
        }
    }
    if spec.kind == SeriesKind::Bilateral {
        let last_bwd = bwd_end.unwrap_or(i64::MIN);
        for &p in &spec.numerator {
            if let Some(n) = param_hits(p, spec.q, guard)
                .into_iter()
                .find(|&n| n <= -1 && n >= last_bwd)
            {
                return Err(Error::PoleHit(format!(
                    "numerator parameter {p:?} meets a pole at k = {n}"
                )));
            }
        }
    }
    Ok(())
}

/// Neumaier-compensated complex sum.
#[derive(Clone, Copy)]
struct CompensatedSum {
    sum: ComplexScalar,
    comp: ComplexScalar,
}

impl CompensatedSum {
    fn new(start: ComplexScalar) -> Self {
        CompensatedSum { sum: start, comp: ZERO }
    }

    fn add(&mut self, t: ComplexScalar) {
        fn two_sum(s: f64, t: f64, c: &mut f64) -> f64 {
            let n = s + t;
            *c += if s.abs() >= t.abs() { (s - n) + t } else { (t - n) + s };
            n
        }
        self.sum.re = two_sum(self.sum.re, t.re, &mut self.comp.re);
        self.sum.im = two_sum(self.sum.im, t.im, &mut self.comp.im);
    }

    fn value(&self) -> ComplexScalar {
        self.sum + self.comp
    }
}

/// State of one summation direction.
struct Direction {
    forward: bool,
    /// Index of the last computed term.
    idx: i64,
    /// `q^idx` going forward; `u = q^{1-idx}` for the next backward step.
    power: ComplexScalar,
    t: ComplexScalar,
    partial: CompensatedSum,
    n: usize,
    small_run: usize,
    asymptotic_ratio: f64,
    terminated: bool,
}

impl Direction {
    fn forward(spec: &SeriesSpec) -> Self {
        Direction {
            forward: true,
            idx: 0,
            power: ONE,
            t: ONE,
            partial: CompensatedSum::new(ONE),
            n: 1,
            small_run: 0,
            asymptotic_ratio: if spec.sign_exponent == 0 {
                spec.z.norm()
            } else {
                0.0
            },
            terminated: false,
        }
    }

    fn backward(spec: &SeriesSpec) -> Self {
        let region = convergence_region(spec);
        Direction {
            forward: false,
            idx: 0,
            power: spec.q.value(),
            t: ONE,
            partial: CompensatedSum::new(ZERO),
            n: 0,
            small_run: 0,
            asymptotic_ratio: (-region.backward_margin).exp(),
            terminated: spec.kind == SeriesKind::Unilateral,
        }
    }

    /// Bound on the modulus of every remaining term ratio. Each factor
    /// `1 - a q^k` is bounded through `|a||q|^k`, which only shrinks further
    /// along the march, so the bound holds for all later steps.
    fn ratio_bound(&self, spec: &SeriesSpec) -> f64 {
        let m = self.power.norm();
        let size = |p: &Param| match *p {
            Param::Single(a) => (a.norm(), m),
            Param::PairSq(w) => (w.norm(), m * m),
        };
        let mut r;
        if self.forward {
            r = spec.z.norm() * m.powi(spec.sign_exponent as i32);
            for p in &spec.numerator {
                let (a, mk) = size(p);
                r *= 1.0 + a * mk;
            }
            let implicit = (spec.kind == SeriesKind::Unilateral).then_some(Param::Single(spec.q.value()));
            for p in spec.denominator.iter().chain(implicit.iter()) {
                let (b, mk) = size(p);
                r /= 1.0 - b * mk;
                if b * mk >= 1.0 {
                    return f64::INFINITY;
                }
            }
        } else {
            r = 1.0 / spec.z.norm();
            for p in &spec.denominator {
                let (b, vk) = size(p);
                r *= b + vk;
            }
            for p in &spec.numerator {
                let (a, vk) = size(p);
                if a <= vk {
                    return f64::INFINITY;
                }
                r /= a - vk;
            }
        }
        if r.is_nan() {
            f64::INFINITY
        } else {
            r
        }
    }

    fn tail(&self, spec: &SeriesSpec) -> f64 {
        if self.terminated {
            return 0.0;
        }
        let r = self.ratio_bound(spec);
        if r >= 1.0 {
            return f64::INFINITY;
        }
        self.t.norm() * r / (1.0 - r)
    }

    /// Marches until three consecutive terms fall below `tol * |partial|` and
    /// the tail bound does too. With a `floor`, only the tail bound is tested,
    /// against `tol * floor`; the bound never grows along the march, so the
    /// stopping index is monotone in `tol`.
    fn advance(&mut self, spec: &SeriesSpec, cfg: &EvalConfig, floor: Option<f64>) -> Result<()> {
        let q = spec.q.value();
        loop {
            if self.terminated {
                return Ok(());
            }
            let thresh = cfg.tol
                * match floor {
                    Some(f) => f,
                    None => self.partial.value().norm().max(cfg.tol),
                };
            if self.small_run >= 3 || floor.is_some() {
                let r = self.ratio_bound(spec);
                if r < RATIO_CEILING && self.tail(spec) <= thresh {
                    return Ok(());
                }
                if self.asymptotic_ratio >= RATIO_CEILING {
                    return Err(Error::Budget(format!(
                        "term ratio {:.4} too close to 1 for a tail bound",
                        self.asymptotic_ratio
                    )));
                }
            }
            if self.n >= cfg.max_terms {
                return Err(Error::Budget(format!(
                    "{} direction not converged after {} terms",
                    if self.forward { "forward" } else { "backward" },
                    self.n
                )));
            }
            let step = if self.forward {
                forward_step(spec, self.power, self.idx, cfg.pole_guard)?
            } else {
                backward_step(spec, self.power, self.idx - 1, cfg.pole_guard)?
            };
            let ratio = match step {
                Step::Terminate => {
                    self.terminated = true;
                    return Ok(());
                }
                Step::Next(r) => r,
            };
            let t = self.t * ratio;
            if t == ZERO {
                self.terminated = true;
                return Ok(());
            }
            if !(t.re.is_finite() && t.im.is_finite()) {
                return Err(Error::Overflow(format!("term at k = {} is not finite", self.idx)));
            }
            self.t = t;
            self.partial.add(t);
            self.n += 1;
            self.power *= q;
            self.idx += if self.forward { 1 } else { -1 };
            let thresh = cfg.tol
                * match floor {
                    Some(f) => f,
                    None => self.partial.value().norm().max(cfg.tol),
                };
            if t.norm() <= thresh {
                self.small_run += 1;
            } else {
                self.small_run = 0;
            }
        }
    }
}

fn status_of(e: &Error) -> EvalStatus {
    match e {
        Error::PoleHit(_) => EvalStatus::PoleHit,
        Error::DivergentRegion(_) => EvalStatus::DivergentRegion,
        _ => EvalStatus::Budget,
    }
}

fn evaluate(spec: &SeriesSpec, cfg: &EvalConfig) -> EvalResult {
    if let Err(e) = cfg.validate() {
        return EvalResult::failed(EvalStatus::Budget, e.to_string());
    }
    let region = convergence_region(spec);
    if !region.forward_ok && forward_termination(spec).is_none() {
        return EvalResult::failed(
            EvalStatus::DivergentRegion,
            format!("forward ratio |z| = {} >= 1 and no termination", spec.z.norm()),
        );
    }
    if !region.backward_ok && backward_termination(spec).is_none() {
        return EvalResult::failed(
            EvalStatus::DivergentRegion,
            format!(
                "backward ratio {} >= 1 and no termination",
                (-region.backward_margin).exp()
            ),
        );
    }

    let mut fwd = Direction::forward(spec);
    let mut bwd = Direction::backward(spec);
    let run = |fwd: &mut Direction, bwd: &mut Direction, floor: Option<f64>| -> Result<()> {
        fwd.advance(spec, cfg, floor)?;
        bwd.advance(spec, cfg, floor)?;
        Ok(())
    };
    let mut outcome = run(&mut fwd, &mut bwd, None);
    // Refine both directions against the total when they partly cancel.
    for _ in 0..4 {
        if outcome.is_err() {
            break;
        }
        let value = fwd.partial.value() + bwd.partial.value();
        let scale = value.norm().max(cfg.tol);
        if fwd.tail(spec) + bwd.tail(spec) <= cfg.tol * scale {
            break;
        }
        outcome = run(&mut fwd, &mut bwd, Some(0.5 * scale));
    }
    let (fsum, bsum) = (fwd.partial.value(), bwd.partial.value());
    let (status, detail) = match outcome {
        Ok(()) => (EvalStatus::Converged, None),
        Err(e) => (status_of(&e), Some(e.to_string())),
    };
    EvalResult {
        value: fsum + bsum,
        // compensated partials carry about one rounding unit each
        err: fwd.tail(spec) + bwd.tail(spec) + 2.0 * f64::EPSILON * (fsum.norm() + bsum.norm()),
        forward_sum: fsum,
        backward_sum: bsum,
        n_forward: fwd.n,
        n_backward: bwd.n,
        status,
        forward_terminated: fwd.terminated,
        backward_terminated: bwd.terminated && spec.kind == SeriesKind::Bilateral,
        detail,
    }
}

/// `rφs`: the sum over `k >= 0`.
pub fn eval_phi(spec: &SeriesSpec, cfg: &EvalConfig) -> Result<EvalResult> {
    if spec.kind != SeriesKind::Unilateral {
        return Err(Error::InvalidArgument("eval_phi needs a unilateral spec".into()));
    }
    Ok(evaluate(spec, cfg))
}

/// `rψs`: the sum over all integers `k`.
pub fn eval_psi(spec: &SeriesSpec, cfg: &EvalConfig) -> Result<EvalResult> {
    if spec.kind != SeriesKind::Bilateral {
        return Err(Error::InvalidArgument("eval_psi needs a bilateral spec".into()));
    }
    Ok(evaluate(spec, cfg))
}

/// Dispatches on the spec's kind.
pub fn eval_series(spec: &SeriesSpec, cfg: &EvalConfig) -> EvalResult {
    evaluate(spec, cfg)
}
