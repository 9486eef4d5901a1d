//! A side of an identity as a sum of `coefficient × product quotient × series`
//! terms, with evaluation and domain checks.

use std::ops::Index;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::qpochhammer::{lattice_distance, poch_ratio, Approx, QBase};
use crate::series::{
    check_domain, convergence_margin, eval_series, EvalConfig, EvalResult, Param, SeriesSpec,
    RATIO_CEILING,
};
use crate::ComplexScalar;

use super::ParamAssignment;

const ONE: ComplexScalar = ComplexScalar::new(1.0, 0.0);

/// Slot values of one assignment, with `q` already validated.
pub(crate) struct Slots<'a> {
    pub q: QBase,
    values: &'a ParamAssignment,
}

impl<'a> Slots<'a> {
    pub fn new(values: &'a ParamAssignment, names: &[&str]) -> Result<Self> {
        for name in names {
            if values.get(name).is_none() {
                return Err(Error::InvalidArgument(format!("missing slot '{name}'")));
            }
        }
        let q = QBase::new(values.get("q").unwrap_or_default())?;
        Ok(Slots { q, values })
    }

    pub fn qv(&self) -> ComplexScalar {
        self.q.value()
    }
}

impl Index<&str> for Slots<'_> {
    type Output = ComplexScalar;

    fn index(&self, name: &str) -> &ComplexScalar {
        self.values
            .get_ref(name)
            .unwrap_or_else(|| panic!("slot '{name}' was validated on construction"))
    }
}

pub(crate) fn s(x: ComplexScalar) -> Param {
    Param::Single(x)
}

pub(crate) fn w(x: ComplexScalar) -> Param {
    Param::PairSq(x)
}

pub(crate) struct Term {
    coeff: ComplexScalar,
    num: Vec<ComplexScalar>,
    den: Vec<ComplexScalar>,
    series: Option<SeriesSpec>,
}

impl Term {
    /// `(num; q)_∞ / (den; q)_∞`.
    pub fn products(num: Vec<ComplexScalar>, den: Vec<ComplexScalar>) -> Term {
        Term {
            coeff: ONE,
            num,
            den,
            series: None,
        }
    }

    pub fn series(spec: SeriesSpec) -> Term {
        Term::products(Vec::new(), Vec::new()).with(spec)
    }

    pub fn with(mut self, spec: SeriesSpec) -> Term {
        self.series = Some(spec);
        self
    }

    pub fn times(mut self, k: ComplexScalar) -> Term {
        self.coeff *= k;
        self
    }

    /// Further product factors, multiplied into the quotient.
    pub fn and(mut self, num: Vec<ComplexScalar>, den: Vec<ComplexScalar>) -> Term {
        self.num.extend(num);
        self.den.extend(den);
        self
    }
}

pub(crate) struct SideExpr {
    pub terms: Vec<Term>,
    /// Derived slots as this side computed them.
    pub derived: Vec<(&'static str, ComplexScalar)>,
}

impl SideExpr {
    pub fn single(term: Term) -> SideExpr {
        SideExpr {
            terms: vec![term],
            derived: Vec::new(),
        }
    }

    pub fn sum(terms: Vec<Term>) -> SideExpr {
        SideExpr {
            terms,
            derived: Vec::new(),
        }
    }

    pub fn derive(mut self, name: &'static str, value: ComplexScalar) -> SideExpr {
        self.derived.push((name, value));
        self
    }

    pub fn series(&self) -> impl Iterator<Item = &SeriesSpec> {
        self.terms.iter().filter_map(|t| t.series.as_ref())
    }

    /// Pole guard on every denominator product and series, optionally also on
    /// numerator products; series must converge with a certifiable ratio.
    pub fn check(&self, q: QBase, guard: f64, guard_numerators: bool) -> Result<(), String> {
        for t in &self.terms {
            for &x in &t.den {
                if lattice_distance(x, q) < guard {
                    return Err(format!("pole: ({x};q)_inf in a denominator"));
                }
            }
            if guard_numerators {
                for &x in &t.num {
                    if lattice_distance(x, q) < guard {
                        return Err(format!("zero: ({x};q)_inf in a numerator"));
                    }
                }
            }
        }
        for spec in self.series() {
            check_domain(spec, guard).map_err(|e| e.to_string())?;
            if convergence_margin(spec) <= -RATIO_CEILING.ln() {
                return Err(format!(
                    "series ratio {:.6} above the certifiable {RATIO_CEILING}",
                    (-convergence_margin(spec)).exp()
                ));
            }
        }
        Ok(())
    }

    /// Smallest convergence margin over this side's series.
    pub fn margin(&self) -> f64 {
        self.series().map(convergence_margin).fold(f64::INFINITY, f64::min)
    }

    pub fn evaluate(&self, q: QBase, cfg: &EvalConfig) -> Result<SideValue> {
        let pc = cfg.products();
        let mut value = ComplexScalar::new(0.0, 0.0);
        let mut err = 0.0;
        let mut mass = 0.0;
        let mut terms = Vec::with_capacity(self.terms.len());
        let mut series = Vec::new();
        for t in &self.terms {
            let p = poch_ratio(&t.num, &t.den, q, &pc)?;
            let sv = match &t.series {
                Some(spec) => {
                    let res = eval_series(spec, cfg).into_result()?;
                    let a = Approx {
                        value: res.value,
                        err: res.err,
                    };
                    series.push(res);
                    a
                }
                None => Approx::exact(ONE),
            };
            let v = p.mul(sv).scale(t.coeff);
            value += v.value;
            err += v.err;
            mass += v.value.norm();
            terms.push(v.value);
        }
        if !(value.re.is_finite() && value.im.is_finite()) {
            return Err(Error::Overflow("side value is not finite".into()));
        }
        Ok(SideValue {
            value,
            // rounding of the term sum
            err: err + f64::EPSILON * mass,
            terms,
            series,
            derived: self
                .derived
                .iter()
                .map(|&(n, v)| (n.to_string(), v))
                .collect(),
        })
    }
}

/// One evaluated side.
#[derive(Clone, Debug, Serialize)]
pub struct SideValue {
    pub value: ComplexScalar,
    pub err: f64,
    /// Value of each additive term.
    pub terms: Vec<ComplexScalar>,
    /// Every series summed on this side, in term order.
    pub series: Vec<EvalResult>,
    /// Derived slots (μ, λ, ...) as recomputed by this side.
    pub derived: Vec<(String, ComplexScalar)>,
}
