//! q-shifted factorials `(x;q)_n` for every integer `n` and for `n = ∞`.
//!
//! Finite factorials are plain products (negative orders via the reciprocal
//! of a shifted positive-order product). Infinite products are truncated at
//! the first index `N` with `|x||q|^N <= 1/2` and `2|x||q|^N / (1-|q|) <= tol`,
//! which bounds the modulus of the logarithm of the discarded tail by `tol`.
//! Factors are always multiplied in ascending index order.

use crate::error::{Error, Result};
use crate::ComplexScalar;

/// Distance from zero below which a factor in a denominator position is a pole.
pub const POLE_GUARD: f64 = 1e-8;

/// A base `q` with `0 < |q| < 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QBase(ComplexScalar);

impl QBase {
    pub fn new(q: ComplexScalar) -> Result<Self> {
        let m = q.norm();
        if !(q.re.is_finite() && q.im.is_finite()) || m <= 0.0 || m >= 1.0 {
            return Err(Error::InvalidBase(q));
        }
        Ok(QBase(q))
    }

    pub fn real(q: f64) -> Result<Self> {
        Self::new(ComplexScalar::new(q, 0.0))
    }

    #[inline]
    pub fn value(self) -> ComplexScalar {
        self.0
    }

    #[inline]
    pub fn modulus(self) -> f64 {
        self.0.norm()
    }

    /// The base `q²`, used for products of `±` pairs.
    pub fn squared(self) -> QBase {
        QBase(self.0 * self.0)
    }
}

/// Truncation control for infinite products.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProductConfig {
    /// Target bound on the modulus of the log of the discarded tail.
    pub tol: f64,
    pub max_factors: usize,
    /// Factors closer than this to zero are reported as poles. Zero disables
    /// the check (numerator use), exact zeros are always allowed.
    pub pole_guard: f64,
}

impl Default for ProductConfig {
    fn default() -> Self {
        ProductConfig {
            tol: 1e-16,
            max_factors: 100_000,
            pole_guard: POLE_GUARD,
        }
    }
}

impl ProductConfig {
    pub fn new(tol: f64, max_factors: usize) -> Result<Self> {
        if !(tol > 0.0) || max_factors < 1 {
            return Err(Error::InvalidArgument(format!(
                "product config needs tol > 0 and max_factors >= 1 (got {tol}, {max_factors})"
            )));
        }
        Ok(ProductConfig {
            tol,
            max_factors,
            pole_guard: POLE_GUARD,
        })
    }

    pub fn with_pole_guard(mut self, guard: f64) -> Self {
        self.pole_guard = guard;
        self
    }

    pub(crate) fn unguarded(self) -> Self {
        self.with_pole_guard(0.0)
    }
}

/// A value together with an absolute error bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Approx {
    pub value: ComplexScalar,
    pub err: f64,
}

impl Approx {
    pub fn exact(value: ComplexScalar) -> Self {
        Approx { value, err: 0.0 }
    }

    /// First-order error of a product of two approximations.
    pub fn mul(self, other: Approx) -> Approx {
        Approx {
            value: self.value * other.value,
            err: self.err * other.value.norm() + other.err * self.value.norm(),
        }
    }

    /// First-order error of a quotient; `other` must be nonzero.
    pub fn div(self, other: Approx) -> Approx {
        let d = other.value.norm();
        let value = self.value / other.value;
        Approx {
            value,
            err: self.err / d + value.norm() * other.err / d,
        }
    }

    pub fn scale(self, k: ComplexScalar) -> Approx {
        Approx {
            value: self.value * k,
            err: self.err * k.norm(),
        }
    }
}

/// Order of a q-shifted factorial.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Order {
    Finite(i64),
    Infinite,
}

fn finite(z: ComplexScalar, what: &str) -> Result<ComplexScalar> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(Error::Overflow(what.to_string()))
    }
}

/// `(x;q)_n` for any integer `n`.
///
/// For `n < 0` this is `1/(x q^n; q)_{-n}`; a factor `1 - x q^{-j}` closer than
/// [`POLE_GUARD`] to zero is a pole.
pub fn poch_finite(x: ComplexScalar, q: QBase, n: i64) -> Result<ComplexScalar> {
    let qv = q.value();
    if n >= 0 {
        let mut acc = ComplexScalar::new(1.0, 0.0);
        let mut w = x;
        for _ in 0..n {
            acc *= 1.0 - w;
            w *= qv;
        }
        return finite(acc, "finite q-shifted factorial");
    }
    let m = -n;
    // (x q^{-m}; q)_m, factors in ascending order: 1 - x q^{-m}, ..., 1 - x q^{-1}
    let qinv = 1.0 / qv;
    let mut shifted = x;
    for _ in 0..m {
        shifted *= qinv;
    }
    let mut acc = ComplexScalar::new(1.0, 0.0);
    let mut w = shifted;
    for i in 0..m {
        let f = 1.0 - w;
        if f.norm() < POLE_GUARD {
            return Err(Error::PoleHit(format!(
                "(x;q)_{n} with x = {x}: factor 1 - x q^{} = {f}",
                i - m
            )));
        }
        acc *= f;
        w *= qv;
    }
    let acc = finite(acc, "negative-order q-shifted factorial")?;
    finite(recip(acc), "negative-order q-shifted factorial")
}

/// `1/z` without squaring `|z|`, so reciprocals of values near the overflow
/// threshold stay representable.
pub(crate) fn recip(z: ComplexScalar) -> ComplexScalar {
    let s = z.norm();
    (z.conj() / s) / s
}

/// `(x;q)_∞` truncated so the log of the discarded tail is bounded by `cfg.tol`.
///
/// `err` is that bound carried to the value, `|P| (e^bound - 1)`, plus one
/// rounding unit per multiplied factor.
pub fn poch_infinite(x: ComplexScalar, q: QBase, cfg: &ProductConfig) -> Result<Approx> {
    if x == ComplexScalar::new(0.0, 0.0) {
        return Ok(Approx::exact(ComplexScalar::new(1.0, 0.0)));
    }
    let qv = q.value();
    let qm = q.modulus();
    let xm = x.norm();
    let mut acc = ComplexScalar::new(1.0, 0.0);
    let mut w = x;
    let mut i = 0usize;
    loop {
        let lead = xm * qm.powi(i as i32);
        let bound = 2.0 * lead / (1.0 - qm);
        if lead <= 0.5 && bound <= cfg.tol {
            let err = acc.norm() * (bound.exp_m1() + 2.0 * i as f64 * f64::EPSILON);
            return Ok(Approx { value: acc, err });
        }
        if i >= cfg.max_factors {
            return Err(Error::Budget(format!(
                "({x};q)_inf needs more than {} factors to reach tol {:e}",
                cfg.max_factors, cfg.tol
            )));
        }
        let f = 1.0 - w;
        if f == ComplexScalar::new(0.0, 0.0) {
            return Ok(Approx::exact(f));
        }
        if f.norm() < cfg.pole_guard {
            return Err(Error::PoleHit(format!(
                "({x};q)_inf: factor 1 - x q^{i} = {f} within guard {:e}",
                cfg.pole_guard
            )));
        }
        acc *= f;
        w *= qv;
        i += 1;
    }
}

/// `(x_1, ..., x_r; q)_n`, the product of the individual factorials.
pub fn poch_multi(
    xs: &[ComplexScalar],
    q: QBase,
    n: Order,
    cfg: &ProductConfig,
) -> Result<Approx> {
    let mut parts = Vec::with_capacity(xs.len());
    for (i, &x) in xs.iter().enumerate() {
        let part = match n {
            Order::Finite(n) => poch_finite(x, q, n).map(Approx::exact),
            Order::Infinite => poch_infinite(x, q, cfg),
        }
        .map_err(|e| tag(e, i, x))?;
        parts.push(part);
    }
    Ok(combine(&parts))
}

fn tag(e: Error, i: usize, x: ComplexScalar) -> Error {
    match e {
        Error::PoleHit(m) => Error::PoleHit(format!("argument #{i} ({x}): {m}")),
        Error::Budget(m) => Error::Budget(format!("argument #{i} ({x}): {m}")),
        other => other,
    }
}

/// Product with first-order error: `Σ_i err_i ∏_{j≠i} |v_j|`.
fn combine(parts: &[Approx]) -> Approx {
    let mut value = ComplexScalar::new(1.0, 0.0);
    for p in parts {
        value *= p.value;
    }
    let mut err = 0.0;
    for (i, p) in parts.iter().enumerate() {
        if p.err == 0.0 {
            continue;
        }
        let others: f64 = parts
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, o)| o.value.norm())
            .product();
        err += p.err * others;
    }
    Approx { value, err }
}

/// `(x;q)_n (-x;q)_n = (x²;q²)_n`, evaluated from the square `x²` alone so no
/// square root is ever taken.
pub fn poch_pair_sq(
    x_squared: ComplexScalar,
    q: QBase,
    n: Order,
    cfg: &ProductConfig,
) -> Result<Approx> {
    let q2 = q.squared();
    match n {
        Order::Finite(n) => poch_finite(x_squared, q2, n).map(Approx::exact),
        Order::Infinite => poch_infinite(x_squared, q2, cfg),
    }
}

/// `min_{i>=0} |1 - x q^i|`: how close `(x;q)_∞` comes to a zero factor.
pub fn lattice_distance(x: ComplexScalar, q: QBase) -> f64 {
    let qv = q.value();
    let mut w = x;
    let mut best = f64::INFINITY;
    for _ in 0..100_000 {
        if !(w.re.is_finite() && w.im.is_finite()) {
            return 0.0;
        }
        best = best.min((1.0 - w).norm());
        // once |x q^i| < 1/2 every later factor is at least 1/2 away from zero
        if w.norm() < 0.5 {
            break;
        }
        w *= qv;
    }
    best
}

/// `(num;q)_∞ / (den;q)_∞`. Only the denominator factors are pole-guarded.
pub fn poch_ratio(
    num: &[ComplexScalar],
    den: &[ComplexScalar],
    q: QBase,
    cfg: &ProductConfig,
) -> Result<Approx> {
    let top = poch_multi(num, q, Order::Infinite, &cfg.unguarded())?;
    let bottom = poch_multi(den, q, Order::Infinite, cfg)?;
    if bottom.value == ComplexScalar::new(0.0, 0.0) {
        return Err(Error::PoleHit("denominator product is exactly zero".into()));
    }
    Ok(top.div(bottom))
}
