//! The identity catalog, evaluation of both sides, and the specialization,
//! equivalence and reduction cross-checks.
//!
//! Each entry carries two independent evaluators. They share no intermediate
//! values: every parameter list, prefactor and derived slot (μ, λ, Jouhet's
//! `c`) is rebuilt from the raw slot values by the side that uses it.

mod entries;
mod expr;

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result, Side};
use crate::qpochhammer::{QBase, POLE_GUARD};
use crate::series::EvalConfig;
use crate::ComplexScalar;

use expr::{SideExpr, Slots};

pub use expr::SideValue;

/// Slot name → value, in insertion order. `q` is stored like any other slot
/// and validated as a base when used. Serializes as a JSON object whose values
/// are `[re, im]` pairs.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ParamAssignment(Vec<(String, ComplexScalar)>);

impl ParamAssignment {
    pub fn new() -> Self {
        ParamAssignment(Vec::new())
    }

    /// Sets `name`, replacing any previous value.
    pub fn set(&mut self, name: &str, value: ComplexScalar) {
        match self.0.iter_mut().find(|(n, _)| n == name) {
            Some(slot) => slot.1 = value,
            None => self.0.push((name.to_string(), value)),
        }
    }

    pub fn with(mut self, name: &str, value: ComplexScalar) -> Self {
        self.set(name, value);
        self
    }

    pub fn get(&self, name: &str) -> Option<ComplexScalar> {
        self.get_ref(name).copied()
    }

    pub(crate) fn get_ref(&self, name: &str) -> Option<&ComplexScalar> {
        self.0.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }

    pub fn remove(&mut self, name: &str) -> Option<ComplexScalar> {
        let i = self.0.iter().position(|(n, _)| n == name)?;
        Some(self.0.remove(i).1)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, ComplexScalar)> {
        self.0.iter().map(|(n, v)| (n.as_str(), *v))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl<S: Into<String>> FromIterator<(S, ComplexScalar)> for ParamAssignment {
    fn from_iter<I: IntoIterator<Item = (S, ComplexScalar)>>(iter: I) -> Self {
        let mut p = ParamAssignment::new();
        for (n, v) in iter {
            p.set(&n.into(), v);
        }
        p
    }
}

impl Serialize for ParamAssignment {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for (n, v) in &self.0 {
            map.serialize_entry(n, &[v.re, v.im])?;
        }
        map.end()
    }
}

/// One stated convergence condition, `ratio < 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Condition {
    pub label: &'static str,
    pub ratio: f64,
}

impl Condition {
    pub fn holds(&self) -> bool {
        self.ratio < 1.0
    }

    /// Log-distance to the boundary; positive inside.
    pub fn margin(&self) -> f64 {
        -self.ratio.ln()
    }
}

/// A catalog entry.
#[derive(Serialize)]
pub struct IdentityDescriptor {
    pub id: &'static str,
    pub name: &'static str,
    /// Free slots, `q` first.
    pub slots: &'static [&'static str],
    /// The stated convergence conditions.
    pub constraint: &'static str,
    pub citation: &'static str,
    #[serde(skip)]
    conditions: fn(&Slots) -> Vec<Condition>,
    #[serde(skip)]
    lhs: fn(&Slots) -> Result<SideExpr>,
    #[serde(skip)]
    rhs: fn(&Slots) -> Result<SideExpr>,
    /// Also keep numerator products off their zeros (identities whose sides
    /// are pure products and would otherwise compare two tiny numbers).
    #[serde(skip)]
    guard_numerators: bool,
}

impl std::fmt::Debug for IdentityDescriptor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("IdentityDescriptor").field("id", &self.id).finish_non_exhaustive()
    }
}

impl IdentityDescriptor {
    fn slots_of<'a>(&self, params: &'a ParamAssignment) -> Result<Slots<'a>> {
        Slots::new(params, self.slots)
    }

    fn violation(&self, condition: impl Into<String>) -> Error {
        Error::DomainViolation {
            identity: self.id.to_string(),
            condition: condition.into(),
        }
    }

    /// The stated conditions evaluated at `params`.
    pub fn conditions(&self, params: &ParamAssignment) -> Result<Vec<Condition>> {
        let p = self.slots_of(params)?;
        Ok((self.conditions)(&p))
    }

    /// Stated conditions, then pole guards and convergence of every series on
    /// both sides. Fails with [`Error::DomainViolation`] naming the first
    /// violated sub-condition.
    pub fn check_constraint(&self, params: &ParamAssignment, guard: f64) -> Result<()> {
        let p = self.slots_of(params)?;
        for c in (self.conditions)(&p) {
            if !c.holds() {
                return Err(self.violation(format!("{} (ratio {:.6})", c.label, c.ratio)));
            }
        }
        for (side, build) in [(Side::Lhs, self.lhs), (Side::Rhs, self.rhs)] {
            let expr = build(&p).map_err(|e| self.violation(format!("{side}: {e}")))?;
            expr.check(p.q, guard, self.guard_numerators)
                .map_err(|m| self.violation(format!("{side}: {m}")))?;
        }
        Ok(())
    }

    /// [`check_constraint`](Self::check_constraint) at the default pole guard.
    pub fn constraint_holds(&self, params: &ParamAssignment) -> bool {
        self.check_constraint(params, POLE_GUARD).is_ok()
    }

    /// Smallest log-distance to any stated condition or series convergence
    /// boundary.
    pub fn margin(&self, params: &ParamAssignment) -> Result<f64> {
        let p = self.slots_of(params)?;
        let mut m = (self.conditions)(&p)
            .iter()
            .map(Condition::margin)
            .fold(f64::INFINITY, f64::min);
        for build in [self.lhs, self.rhs] {
            m = m.min(build(&p)?.margin());
        }
        Ok(m)
    }

    pub fn lhs(&self, params: &ParamAssignment, cfg: &EvalConfig) -> Result<SideValue> {
        self.side(Side::Lhs, params, cfg)
    }

    pub fn rhs(&self, params: &ParamAssignment, cfg: &EvalConfig) -> Result<SideValue> {
        self.side(Side::Rhs, params, cfg)
    }

    fn side(&self, side: Side, params: &ParamAssignment, cfg: &EvalConfig) -> Result<SideValue> {
        let p = self.slots_of(params)?;
        let build = match side {
            Side::Lhs => self.lhs,
            Side::Rhs => self.rhs,
        };
        build(&p)
            .and_then(|e| e.evaluate(p.q, cfg))
            .map_err(|e| e.on(side))
    }

    /// Free slots other than `q`.
    pub fn parameter_slots(&self) -> impl Iterator<Item = &'static str> {
        self.slots.iter().copied().filter(|&s| s != "q")
    }
}

/// Residuals of one evaluated identity.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub lhs: ComplexScalar,
    pub rhs: ComplexScalar,
    pub lhs_err: f64,
    pub rhs_err: f64,
    pub abs_residual: f64,
    /// `|lhs - rhs| / max(|lhs|, |rhs|, 1e-300)`.
    pub rel_residual: f64,
    pub combined_err: f64,
    /// `max(1e-8, 50 * combined_err / scale)`.
    pub tol_check: f64,
    pub pass: bool,
}

/// Floor of the pass threshold on `rel_residual`.
pub const CHECK_FLOOR: f64 = 1e-8;

/// Multiple of the propagated error allowed in a residual.
pub const ERR_SAFETY: f64 = 50.0;

pub fn relative_difference(a: ComplexScalar, b: ComplexScalar) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1e-300)
}

impl IdentityCheck {
    pub fn from_sides(lhs: &SideValue, rhs: &SideValue) -> Self {
        let abs_residual = (lhs.value - rhs.value).norm();
        let scale = lhs.value.norm().max(rhs.value.norm()).max(1e-300);
        let rel_residual = abs_residual / scale;
        let combined_err = lhs.err + rhs.err;
        let tol_check = CHECK_FLOOR.max(ERR_SAFETY * combined_err / scale);
        IdentityCheck {
            lhs: lhs.value,
            rhs: rhs.value,
            lhs_err: lhs.err,
            rhs_err: rhs.err,
            abs_residual,
            rel_residual,
            combined_err,
            tol_check,
            pass: rel_residual <= tol_check,
        }
    }
}

/// An [`IdentityCheck`] with the evaluated sides attached.
#[derive(Clone, Debug, Serialize)]
pub struct DetailedCheck {
    pub check: IdentityCheck,
    pub lhs: SideValue,
    pub rhs: SideValue,
}

pub fn catalog() -> &'static [IdentityDescriptor] {
    &entries::CATALOG
}

pub fn find_identity(id: &str) -> Result<&'static IdentityDescriptor> {
    catalog()
        .iter()
        .find(|d| d.id == id)
        .ok_or_else(|| Error::UnknownIdentity(id.to_string()))
}

/// Checks the constraint, then evaluates both sides.
pub fn evaluate_detailed(
    id: &str,
    params: &ParamAssignment,
    cfg: &EvalConfig,
) -> Result<DetailedCheck> {
    let d = find_identity(id)?;
    cfg.validate()?;
    d.check_constraint(params, cfg.pole_guard)?;
    let lhs = d.lhs(params, cfg)?;
    let rhs = d.rhs(params, cfg)?;
    Ok(DetailedCheck {
        check: IdentityCheck::from_sides(&lhs, &rhs),
        lhs,
        rhs,
    })
}

pub fn evaluate_identity(
    id: &str,
    params: &ParamAssignment,
    cfg: &EvalConfig,
) -> Result<IdentityCheck> {
    evaluate_detailed(id, params, cfg).map(|d| d.check)
}

/// Entries with an integer specialization and the slot it pins.
pub const SPECIALIZABLE: [(&str, &str); 3] = [
    ("thm1_2psi2_to_8psi8", "c"),
    ("thm2_4psi4_to_8psi8", "c"),
    ("thm3_8psi8_three_term", "g"),
];

/// Largest `m` accepted by [`specialize_at_integer`].
pub const MAX_SPECIALIZATION: u32 = 8;

#[derive(Clone, Debug, Serialize)]
pub struct SpecializationCheck {
    pub identity: String,
    pub m: u32,
    pub pinned_slot: String,
    pub pinned_value: ComplexScalar,
    pub check: IdentityCheck,
    /// Backward terms summed on the left side.
    pub n_backward: usize,
    /// The left series terminated after exactly `m` backward terms.
    pub terminated: bool,
}

/// Slot pinned by the integer specialization of `id`.
pub fn pinned_slot(id: &str) -> Result<&'static str> {
    SPECIALIZABLE
        .iter()
        .find(|(i, _)| *i == id)
        .map(|&(_, s)| s)
        .ok_or_else(|| Error::InvalidArgument(format!("'{id}' has no integer specialization")))
}

/// Pins `c` (entries 3, 4) or `g` (entry 5) to `a q^{-m}`, so that
/// `aq/slot = q^{1+m}` and the left series terminates below index `-m`. Any
/// value given for the pinned slot is replaced.
pub fn specialize_at_integer(
    id: &str,
    m: u32,
    params: &ParamAssignment,
    cfg: &EvalConfig,
) -> Result<SpecializationCheck> {
    let slot = pinned_slot(id)?;
    if m > MAX_SPECIALIZATION {
        return Err(Error::InvalidArgument(format!(
            "m = {m} exceeds {MAX_SPECIALIZATION}"
        )));
    }
    let pinned = pin(params, slot, m)?;
    let detailed = evaluate_detailed(id, &pinned, cfg)?;
    let lhs_series = &detailed.lhs.series[0];
    Ok(SpecializationCheck {
        identity: id.to_string(),
        m,
        pinned_slot: slot.to_string(),
        pinned_value: pinned.get(slot).unwrap_or_default(),
        check: detailed.check,
        n_backward: lhs_series.n_backward,
        terminated: lhs_series.backward_terminated && lhs_series.n_backward == m as usize,
    })
}

/// `params` with `slot = a q^{-m}`.
pub fn pin(params: &ParamAssignment, slot: &str, m: u32) -> Result<ParamAssignment> {
    let get = |n: &str| {
        params
            .get(n)
            .ok_or_else(|| Error::InvalidArgument(format!("missing slot '{n}'")))
    };
    let q = QBase::new(get("q")?)?;
    let value = get("a")? * q.value().powi(-(m as i32));
    Ok(params.clone().with(slot, value))
}

#[derive(Clone, Debug, Serialize)]
pub struct EquivalenceCheck {
    /// Entry 5 at the given slots.
    pub check_a: IdentityCheck,
    /// Jouhet's identity at the mapped slots.
    pub check_b: IdentityCheck,
    /// Relative difference of the two left sides.
    pub lhs_match: f64,
}

/// Maps entry 5's slots `(q, a, b, c, d, e, f, g)` positionally onto Jouhet's
/// free slots `(q, a, b, d, e, f, g, h)`. Both left sides are then the same
/// very-well-poised 8ψ8 with argument `a³q²/bcdefg`.
pub fn thm3_to_jouhet(params: &ParamAssignment) -> Result<ParamAssignment> {
    let from = ["q", "a", "b", "c", "d", "e", "f", "g"];
    let to = ["q", "a", "b", "d", "e", "f", "g", "h"];
    from.iter()
        .zip(to)
        .map(|(&f, t)| {
            params
                .get(f)
                .map(|v| (t, v))
                .ok_or_else(|| Error::InvalidArgument(format!("missing slot '{f}'")))
        })
        .collect()
}

pub const THM3: &str = "thm3_8psi8_three_term";
pub const JOUHET: &str = "jouhet_eq3";
pub const REDUCTION: &str = "thm3_reduction_aq_de";

/// Checks entry 5 and Jouhet's identity on one sample and compares their left
/// sides. Both constraints are checked before anything is evaluated.
pub fn cross_check_equivalence(
    params: &ParamAssignment,
    cfg: &EvalConfig,
) -> Result<EquivalenceCheck> {
    let mapped = thm3_to_jouhet(params)?;
    find_identity(THM3)?.check_constraint(params, cfg.pole_guard)?;
    find_identity(JOUHET)?.check_constraint(&mapped, cfg.pole_guard)?;
    let a = evaluate_detailed(THM3, params, cfg)?;
    let b = evaluate_detailed(JOUHET, &mapped, cfg)?;
    Ok(EquivalenceCheck {
        lhs_match: relative_difference(a.lhs.value, b.lhs.value),
        check_a: a.check,
        check_b: b.check,
    })
}

/// Entry 16's right side with its 6φ5 replaced by Rogers' closed form,
/// against Bailey's 6ψ6 product side at `(a; b, c, f, g)`.
#[derive(Clone, Debug, Serialize)]
pub struct ReductionChainCheck {
    pub composed: ComplexScalar,
    pub bailey: ComplexScalar,
    pub rel_residual: f64,
}

pub fn reduction_chain(params: &ParamAssignment, cfg: &EvalConfig) -> Result<ReductionChainCheck> {
    let d = find_identity(REDUCTION)?;
    let p = d.slots_of(params)?;
    let [a, b, c, f, g] = ["a", "b", "c", "f", "g"].map(|n| p[n]);
    let q = p.qv();
    let prefactor = SideExpr::single(entries::reduction_prefactor(&p)).evaluate(p.q, cfg)?;
    let rogers = ParamAssignment::new()
        .with("q", q)
        .with("a", b * b / a)
        .with("b", b * c / a)
        .with("c", b * f / a)
        .with("d", b * g / a);
    let closed = find_identity("rogers_6phi5")?.rhs(&rogers, cfg)?;
    let bailey_params = ParamAssignment::new()
        .with("q", q)
        .with("a", a)
        .with("b", b)
        .with("c", c)
        .with("d", f)
        .with("e", g);
    let bailey = find_identity("bailey_6psi6")?.rhs(&bailey_params, cfg)?;
    let composed = prefactor.value * closed.value;
    Ok(ReductionChainCheck {
        composed,
        bailey: bailey.value,
        rel_residual: relative_difference(composed, bailey.value),
    })
}

/// Entry 16 against entry 5 with `e` pinned to `aq/d`.
#[derive(Clone, Debug, Serialize)]
pub struct ReductionCoherence {
    /// Left sides.
    pub lhs_match: f64,
    /// Entry 16's right side against entry 5's second term.
    pub term_match: f64,
    /// `|first term of entry 5| / |entry 16 right side|`; the term carries the
    /// factor `(aq/de; q)_∞ = (1; q)_∞ = 0`.
    pub vanishing_term: f64,
}

/// `params` holds entry 16's slots plus `d`.
pub fn reduction_coherence(
    params: &ParamAssignment,
    cfg: &EvalConfig,
) -> Result<ReductionCoherence> {
    let direct = evaluate_detailed(REDUCTION, params, cfg)?;
    let get = |n: &str| {
        params
            .get(n)
            .ok_or_else(|| Error::InvalidArgument(format!("missing slot '{n}'")))
    };
    let (a, d) = (get("a")?, get("d")?);
    let pinned = params.clone().with("e", a * get("q")? / d);
    let t3 = find_identity(THM3)?;
    let lhs = t3.lhs(&pinned, cfg)?;
    let rhs = t3.rhs(&pinned, cfg)?;
    let scale = direct.rhs.value.norm().max(1e-300);
    Ok(ReductionCoherence {
        lhs_match: relative_difference(direct.lhs.value, lhs.value),
        term_match: relative_difference(direct.rhs.value, rhs.terms[1]),
        vanishing_term: rhs.terms[0].norm() / scale,
    })
}

#[cfg(test)]
mod tests;
