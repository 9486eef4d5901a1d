//! The identity catalog.
//!
//! Every `± pair` of the form `(√w, -√w)` in a parameter list is written as
//! `w(..)` with the square; prefactors never contain square roots. Each side
//! builds its own parameter lists and derived slots from the raw slot values.

use crate::error::Result;
use crate::series::{Param, SeriesSpec};
use crate::ComplexScalar as C;

use super::expr::{s, w, SideExpr, Slots, Term};
use super::{Condition, IdentityDescriptor};

type Side = Result<SideExpr>;

fn one() -> C {
    C::new(1.0, 0.0)
}

fn psi(p: &Slots, num: Vec<Param>, den: Vec<Param>, z: C) -> Result<SeriesSpec> {
    SeriesSpec::bilateral(num, den, p.q, z)
}

fn phi(p: &Slots, num: Vec<Param>, den: Vec<Param>, z: C) -> Result<SeriesSpec> {
    SeriesSpec::unilateral(num, den, p.q, z)
}

/// Very-well-poised `r+3φr+2` with `±q√a` over `±√a`: `[a, ±q√a, ps; ±√a, aq/ps]`.
fn vwp_phi(p: &Slots, a: C, ps: &[C], z: C) -> Result<SeriesSpec> {
    let q = p.qv();
    let mut num = vec![s(a), w(q * q * a)];
    let mut den = vec![w(a)];
    for &x in ps {
        num.push(s(x));
        den.push(s(a * q / x));
    }
    phi(p, num, den, z)
}

/// Very-well-poised bilateral series `[±q√a, ps; ±√a, aq/ps]`.
fn vwp_psi(p: &Slots, a: C, ps: &[C], z: C) -> Result<SeriesSpec> {
    let q = p.qv();
    let mut num = vec![w(q * q * a)];
    let mut den = vec![w(a)];
    for &x in ps {
        num.push(s(x));
        den.push(s(a * q / x));
    }
    psi(p, num, den, z)
}

fn cond(label: &'static str, value: C) -> Condition {
    Condition {
        label,
        ratio: value.norm(),
    }
}

impl Slots<'_> {
    fn vals<const N: usize>(&self, names: [&str; N]) -> [C; N] {
        names.map(|n| self[n])
    }
}

// 1. Ramanujan's 1ψ1 sum

fn ramanujan_conditions(p: &Slots) -> Vec<Condition> {
    let [a, b, z] = p.vals(["a", "b", "z"]);
    vec![cond("|b/a| < |z|", b / (a * z)), cond("|z| < 1", z)]
}

fn ramanujan_lhs(p: &Slots) -> Side {
    let [a, b, z] = p.vals(["a", "b", "z"]);
    Ok(SideExpr::single(Term::series(psi(p, vec![s(a)], vec![s(b)], z)?)))
}

fn ramanujan_rhs(p: &Slots) -> Side {
    let [a, b, z] = p.vals(["a", "b", "z"]);
    let q = p.qv();
    Ok(SideExpr::single(Term::products(
        vec![q, b / a, a * z, q / (a * z)],
        vec![b, q / a, z, b / (a * z)],
    )))
}

// 2. Bailey's 6ψ6 sum

fn bailey_conditions(p: &Slots) -> Vec<Condition> {
    let [a, b, c, d, e] = p.vals(["a", "b", "c", "d", "e"]);
    vec![cond("|a²q/bcde| < 1", a * a * p.qv() / (b * c * d * e))]
}

fn bailey_lhs(p: &Slots) -> Side {
    let [a, b, c, d, e] = p.vals(["a", "b", "c", "d", "e"]);
    let z = a * a * p.qv() / (b * c * d * e);
    Ok(SideExpr::single(Term::series(vwp_psi(p, a, &[b, c, d, e], z)?)))
}

fn bailey_rhs(p: &Slots) -> Side {
    let [a, b, c, d, e] = p.vals(["a", "b", "c", "d", "e"]);
    let q = p.qv();
    let aq = a * q;
    Ok(SideExpr::single(Term::products(
        vec![q, aq, q / a, aq / (b * c), aq / (b * d), aq / (b * e), aq / (c * d), aq / (c * e), aq / (d * e)],
        vec![q / b, q / c, q / d, q / e, aq / b, aq / c, aq / d, aq / e, a * a * q / (b * c * d * e)],
    )))
}

// 3. 2ψ2 -> 8ψ8

fn thm1_conditions(p: &Slots) -> Vec<Condition> {
    let [a, b, c, x] = p.vals(["a", "b", "c", "x"]);
    let q = p.qv();
    vec![
        cond("|aq/bcx| < 1", a * q / (b * c * x)),
        cond("|aqx/bc| < 1", a * q * x / (b * c)),
    ]
}

fn thm1_lhs(p: &Slots) -> Side {
    let [a, b, c, x] = p.vals(["a", "b", "c", "x"]);
    let q = p.qv();
    let z = a * q * x / (b * c);
    let spec = psi(p, vec![s(b), s(c)], vec![s(a * q / b), s(a * q / c)], z)?;
    Ok(SideExpr::single(Term::series(spec)))
}

fn thm1_rhs(p: &Slots) -> Side {
    let [a, b, c, x] = p.vals(["a", "b", "c", "x"]);
    let q = p.qv();
    let z = a * q * x / (b * c);
    let spec = psi(
        p,
        vec![w(a * q * q * x), w(a * q), w(a), s(b * x), s(c * x)],
        vec![w(a * x), w(a * q * x * x), w(a * q * q * x * x), s(a * q / b), s(a * q / c)],
        z,
    )?;
    Ok(SideExpr::single(
        Term::products(
            vec![q / a, a * q / (b * c), q / (b * x), q / (c * x), q * x, a * q * x * x],
            vec![q / b, q / c, a * q / (b * c * x), q / (a * x), a * q * x, q * x * x],
        )
        .with(spec),
    ))
}

// 4. 4ψ4 -> 8ψ8

fn thm2_conditions(p: &Slots) -> Vec<Condition> {
    let [a, b, c, x] = p.vals(["a", "b", "c", "x"]);
    let q = p.qv();
    vec![
        cond("|aq/bcx| < 1", a * q / (b * c * x)),
        cond("|ax/bcq| < 1", a * x / (b * c * q)),
    ]
}

fn thm2_lhs(p: &Slots) -> Side {
    let [a, b, c, x] = p.vals(["a", "b", "c", "x"]);
    let z = a * x / (b * c * p.qv());
    Ok(SideExpr::single(Term::series(vwp_psi(p, a, &[b, c], z)?)))
}

fn thm2_rhs(p: &Slots) -> Side {
    let [a, b, c, x] = p.vals(["a", "b", "c", "x"]);
    let q = p.qv();
    let z = a * x / (b * c * q);
    let spec = psi(
        p,
        vec![w(a * q * q * x), w(a * q), w(q * q * a), s(b * x), s(c * x)],
        vec![w(a * x), w(a * q * x * x), w(a * x * x), s(a * q / b), s(a * q / c)],
        z,
    )?;
    Ok(SideExpr::single(
        Term::products(
            vec![q / a, a * q / (b * c), q / (b * x), q / (c * x), x / q, a * x * x],
            vec![q / b, q / c, a * q / (b * c * x), q / (a * x), a * q * x, x * x / q],
        )
        .with(spec),
    ))
}

// 5. Very-well-poised 8ψ8 three-term transformation, μ = bcde/aq.
//
// The first prefactor is read with the combined arguments aq/(fg) in the
// numerator and a²q/(μfg) in the denominator; that reading passes both the
// residual suite and the equivalence check against Jouhet's identity.

fn thm3_conditions(p: &Slots) -> Vec<Condition> {
    let [a, b, c, d, e, f, g] = p.vals(["a", "b", "c", "d", "e", "f", "g"]);
    let q = p.qv();
    vec![
        cond("|a³q²/bcdefg| < 1", a * a * a * q * q / (b * c * d * e * f * g)),
        cond("|aq/fg| < 1", a * q / (f * g)),
    ]
}

fn thm3_lhs(p: &Slots) -> Side {
    let [a, b, c, d, e, f, g] = p.vals(["a", "b", "c", "d", "e", "f", "g"]);
    let q = p.qv();
    let mu = b * c * d * e / (a * q);
    let z = a * a * a * q * q / (b * c * d * e * f * g);
    Ok(SideExpr::single(Term::series(vwp_psi(p, a, &[b, c, d, e, f, g], z)?)).derive("mu", mu))
}

fn thm3_rhs(p: &Slots) -> Side {
    let [a, b, c, d, e, f, g] = p.vals(["a", "b", "c", "d", "e", "f", "g"]);
    let q = p.qv();
    let mu = b * c * d * e / (a * q);
    let aq = a * q;
    let s1 = psi(
        p,
        vec![w(q * q * mu), s(b), s(c), s(d), s(e), s(mu * f / a), s(mu * g / a)],
        vec![
            w(mu),
            s(mu * q / b),
            s(mu * q / c),
            s(mu * q / d),
            s(mu * q / e),
            s(aq / f),
            s(aq / g),
        ],
        aq / (f * g),
    )?;
    let t1 = Term::products(
        vec![
            aq,
            q / a,
            aq / (c * d),
            aq / (c * e),
            aq / (d * e),
            aq / (f * g),
            b / a,
            mu * q / c,
            mu * q / d,
            mu * q / e,
            aq / (mu * f),
            aq / (mu * g),
        ],
        vec![
            q / f,
            q / g,
            aq / c,
            aq / d,
            aq / e,
            b * c / a,
            b * d / a,
            b * e / a,
            b / mu,
            mu * q,
            q / mu,
            a * a * q / (mu * f * g),
        ],
    )
    .with(s1);

    let bb = b * b / a;
    let z = a * a * a * q * q / (b * c * d * e * f * g);
    let s2 = phi(
        p,
        vec![s(bb), w(q * q * bb), s(b * c / a), s(b * d / a), s(b * e / a), s(b * f / a), s(b * g / a)],
        vec![w(bb), s(b * q / c), s(b * q / d), s(b * q / e), s(b * q / f), s(b * q / g)],
        z,
    )?;
    let t2 = Term::products(
        vec![q, aq, q / a, c, d, e, b * q / c, b * q / d, b * q / e, b * q / f, b * q / g],
        vec![q / f, q / g, aq / b, aq / c, aq / d, aq / e, aq / f, aq / g, b * c / a, b * d / a, b * e / a],
    )
    .and(
        vec![aq / (b * f), aq / (b * g), b * c * d * e / (a * aq), aq * aq / (b * c * d * e)],
        vec![q / b, b * b * q / a, c * d * e / aq, aq * q / (c * d * e)],
    )
    .with(s2);
    Ok(SideExpr::sum(vec![t1, t2]).derive("mu", mu))
}

// 6. Corollary of entry 3 at x = 1/c

fn cor4_conditions(p: &Slots) -> Vec<Condition> {
    let [a, b, c] = p.vals(["a", "b", "c"]);
    let q = p.qv();
    vec![cond("|aq/b| < 1", a * q / b), cond("|aq/bc²| < 1", a * q / (b * c * c))]
}

fn cor4_lhs(p: &Slots) -> Side {
    let [a, b, c] = p.vals(["a", "b", "c"]);
    let q = p.qv();
    let z = a * q / (b * c * c);
    let spec = psi(p, vec![s(b), s(c)], vec![s(a * q / b), s(a * q / c)], z)?;
    Ok(SideExpr::single(Term::series(spec)))
}

fn cor4_rhs(p: &Slots) -> Side {
    let [a, b, c] = p.vals(["a", "b", "c"]);
    let q = p.qv();
    let z = a * q / (b * c * c);
    let ca = c / a;
    let spec = phi(
        p,
        vec![s(ca), w(q * q * ca), w(c * c * q / a), w(c * c / a), s(b / a)],
        vec![w(ca), w(q / a), w(q * q / a), s(c * q / b)],
        z,
    )?;
    Ok(SideExpr::single(
        Term::products(
            vec![q, q / a, a * q / (b * c), a * q / (c * c), c * q / b],
            vec![q / b, q / (c * c), a * q / b, a * q / c, c * q / a],
        )
        .with(spec),
    ))
}

// 7. Corollary of entry 4 at x = 1/c

fn cor5_conditions(p: &Slots) -> Vec<Condition> {
    let [a, b, c] = p.vals(["a", "b", "c"]);
    let q = p.qv();
    vec![cond("|aq/b| < 1", a * q / b), cond("|a/bc²q| < 1", a / (b * c * c * q))]
}

fn cor5_lhs(p: &Slots) -> Side {
    let [a, b, c] = p.vals(["a", "b", "c"]);
    let z = a / (b * c * c * p.qv());
    Ok(SideExpr::single(Term::series(vwp_psi(p, a, &[b, c], z)?)))
}

fn cor5_rhs(p: &Slots) -> Side {
    let [a, b, c] = p.vals(["a", "b", "c"]);
    let q = p.qv();
    let z = a / (b * c * c * q);
    let ca = c / a;
    let spec = phi(
        p,
        vec![s(ca), w(q * q * ca), w(c * c * q / a), w(c * c * q * q / a), s(b / a)],
        vec![w(ca), w(q / a), w(one() / a), s(c * q / b)],
        z,
    )?;
    Ok(SideExpr::single(
        Term::products(
            vec![q, q / a, one() / (c * q), a * q / (b * c), a / (c * c), c * q / b],
            vec![q / b, q / c, one() / (c * c * q), a * q / b, a * q / c, c * q / a],
        )
        .with(spec),
    ))
}

// 8. Rogers' 6φ5 sum

fn rogers_conditions(p: &Slots) -> Vec<Condition> {
    let [a, b, c, d] = p.vals(["a", "b", "c", "d"]);
    vec![cond("|aq/bcd| < 1", a * p.qv() / (b * c * d))]
}

fn rogers_lhs(p: &Slots) -> Side {
    let [a, b, c, d] = p.vals(["a", "b", "c", "d"]);
    let z = a * p.qv() / (b * c * d);
    Ok(SideExpr::single(Term::series(vwp_phi(p, a, &[b, c, d], z)?)))
}

fn rogers_rhs(p: &Slots) -> Side {
    let [a, b, c, d] = p.vals(["a", "b", "c", "d"]);
    let aq = a * p.qv();
    Ok(SideExpr::single(Term::products(
        vec![aq, aq / (b * c), aq / (b * d), aq / (c * d)],
        vec![aq / b, aq / c, aq / d, aq / (b * c * d)],
    )))
}

// 9. Watson-type 8φ7 transformation, λ = a²q/bcd

fn watson_conditions(p: &Slots) -> Vec<Condition> {
    let [a, b, c, d, e, f] = p.vals(["a", "b", "c", "d", "e", "f"]);
    let q = p.qv();
    vec![
        cond("|a²q²/bcdef| < 1", a * a * q * q / (b * c * d * e * f)),
        cond("|aq/ef| < 1", a * q / (e * f)),
    ]
}

fn watson_lhs(p: &Slots) -> Side {
    let [a, b, c, d, e, f] = p.vals(["a", "b", "c", "d", "e", "f"]);
    let q = p.qv();
    let lambda = a * a * q / (b * c * d);
    let z = a * a * q * q / (b * c * d * e * f);
    Ok(SideExpr::single(Term::series(vwp_phi(p, a, &[b, c, d, e, f], z)?)).derive("lambda", lambda))
}

fn watson_rhs(p: &Slots) -> Side {
    let [a, b, c, d, e, f] = p.vals(["a", "b", "c", "d", "e", "f"]);
    let q = p.qv();
    let lambda = a * a * q / (b * c * d);
    let l = lambda;
    let spec = vwp_phi(p, l, &[l * b / a, l * c / a, l * d / a, e, f], a * q / (e * f))?;
    Ok(SideExpr::single(
        Term::products(
            vec![a * q, a * q / (e * f), l * q / e, l * q / f],
            vec![a * q / e, a * q / f, l * q, l * q / (e * f)],
        )
        .with(spec),
    )
    .derive("lambda", lambda))
}

// 10. Three-term theta relation

/// `S(x1, x2, x3, x4) = ∏ (x_i, q/x_i; q)_∞`.
fn theta4(p: &Slots, xs: [C; 4]) -> Term {
    let q = p.qv();
    Term::products(xs.iter().flat_map(|&x| [x, q / x]).collect(), Vec::new())
}

fn three_term_conditions(_: &Slots) -> Vec<Condition> {
    Vec::new()
}

fn three_term_lhs(p: &Slots) -> Side {
    let [x, l, m, n] = p.vals(["x", "lambda", "mu", "nu"]);
    Ok(SideExpr::sum(vec![
        theta4(p, [x * l, x / l, m * n, m / n]),
        theta4(p, [x * n, x / n, l * m, m / l]).times(-one()),
    ]))
}

fn three_term_rhs(p: &Slots) -> Side {
    let [x, l, m, n] = p.vals(["x", "lambda", "mu", "nu"]);
    Ok(SideExpr::single(theta4(p, [x * m, x / m, l * n, l / n]).times(m / l)))
}

// 11. Jouhet's four-term 8ψ8 identity, c = a³q²/bdefgh, λ = a²q/cde

fn jouhet_derived(p: &Slots) -> (C, C) {
    let [a, b, d, e, f, g, h] = p.vals(["a", "b", "d", "e", "f", "g", "h"]);
    let q = p.qv();
    let c = a * a * a * q * q / (b * d * e * f * g * h);
    let lambda = a * a * q / (c * d * e);
    (c, lambda)
}

fn jouhet_conditions(p: &Slots) -> Vec<Condition> {
    let a = p["a"];
    let (c, lambda) = jouhet_derived(p);
    vec![cond("|c| < 1", c), cond("|λc/a| < 1", lambda * c / a)]
}

fn jouhet_lhs(p: &Slots) -> Side {
    let [a, b, d, e, f, g, h] = p.vals(["a", "b", "d", "e", "f", "g", "h"]);
    let q = p.qv();
    let c = a * a * a * q * q / (b * d * e * f * g * h);
    let lambda = a * a * q / (c * d * e);
    Ok(SideExpr::single(Term::series(vwp_psi(p, a, &[b, d, e, f, g, h], c)?))
        .derive("c", c)
        .derive("lambda", lambda))
}

fn jouhet_rhs(p: &Slots) -> Side {
    let [a, b, d, e, f, g, h] = p.vals(["a", "b", "d", "e", "f", "g", "h"]);
    let q = p.qv();
    let c = a * a * a * q * q / (b * d * e * f * g * h);
    let lambda = a * a * q / (c * d * e);
    let l = lambda;
    let aq = a * q;

    let s1 = psi(
        p,
        vec![w(q * q * l), s(b), s(l * d / a), s(l * e / a), s(f), s(g), s(h)],
        vec![w(l), s(l * q / b), s(aq / d), s(aq / e), s(l * q / f), s(l * q / g), s(l * q / h)],
        l * c / a,
    )?;
    let t1 = Term::products(
        vec![
            aq,
            q / a,
            l * c / a,
            aq / (l * d),
            aq / (l * e),
            b / a,
            b * f / l,
            b * g / l,
            b * h / l,
            l * q / f,
            l * q / g,
            l * q / h,
        ],
        vec![
            l * q,
            q / l,
            c,
            q / d,
            q / e,
            b / l,
            b * f / a,
            b * g / a,
            b * h / a,
            aq / f,
            aq / g,
            aq / h,
        ],
    )
    .with(s1);

    let bb = b * b / a;
    let s2 = phi(
        p,
        vec![s(bb), w(q * q * bb), s(b * d / a), s(b * e / a), s(b * f / a), s(b * g / a), s(b * h / a)],
        vec![w(bb), s(b * q / d), s(b * q / e), s(b * q / f), s(b * q / g), s(b * q / h)],
        c,
    )?;
    let t2 = Term::products(
        vec![q, q / a, c / b, aq, b * q / c, b * q / d, b * q / e, b * q / f, b * q / g, b * q / h, d, e],
        vec![
            q / b,
            c / a,
            b * b * q / a,
            aq / b,
            aq / c,
            b * d / a,
            b * e / a,
            b * f / a,
            b * g / a,
            b * h / a,
            aq / d,
            aq / e,
        ],
    )
    .and(vec![f, g, h], vec![aq / f, aq / g, aq / h])
    .times(b / a)
    .with(s2);

    let bl = b * b / l;
    let s3 = phi(
        p,
        vec![s(bl), w(q * q * bl), s(b * d / a), s(b * e / a), s(b * f / l), s(b * g / l), s(b * h / l)],
        vec![w(bl), s(a * b * q / (l * d)), s(a * b * q / (l * e)), s(b * q / f), s(b * q / g), s(b * q / h)],
        l * c / a,
    )?;
    let t3 = Term::products(
        vec![
            q,
            q / a,
            b / a,
            aq / (l * d),
            aq / (l * e),
            l * c / (a * b),
            aq,
            f,
            g,
            h,
            l * c / a,
            l * d / a,
            l * e / a,
        ],
        vec![
            c,
            c / a,
            q / b,
            q / d,
            q / e,
            b * q / l,
            b * b * q / l,
            aq / f,
            aq / g,
            aq / h,
            b * d / a,
            b * e / a,
            b * f / a,
        ],
    )
    .and(
        vec![b * q / f, b * q / g, b * q / h, a * b * q / (l * c), a * b * q / (l * d), a * b * q / (l * e)],
        vec![b * g / a, b * h / a, l / b, aq / c, aq / d, aq / e],
    )
    .with(s3);

    Ok(SideExpr::sum(vec![t1, t2, t3])
        .derive("c", c)
        .derive("lambda", lambda))
}

// 12. 2φ1 -> 8φ7

fn g347_conditions(p: &Slots) -> Vec<Condition> {
    let [b, x] = p.vals(["b", "x"]);
    vec![cond("|qx/b²| < 1", p.qv() * x / (b * b))]
}

fn g347_lhs(p: &Slots) -> Side {
    let [a, b, x] = p.vals(["a", "b", "x"]);
    let q = p.qv();
    let spec = phi(p, vec![s(a), s(b)], vec![s(a * q / b)], q * x / (b * b))?;
    Ok(SideExpr::single(Term::series(spec)))
}

fn g347_rhs(p: &Slots) -> Side {
    let [a, b, x] = p.vals(["a", "b", "x"]);
    let q = p.qv();
    let axb = a * x / b;
    let spec = phi(
        p,
        vec![s(axb), w(q * q * axb), w(a * q), w(a), s(x)],
        vec![w(axb), w(x * x * a * q / (b * b)), w(x * x * q * q * a / (b * b)), s(a * q / b)],
        q * x / (b * b),
    )?;
    Ok(SideExpr::single(
        Term::products(
            vec![x * q / b, a * q * x * x / (b * b)],
            vec![a * q * x / b, q * x * x / (b * b)],
        )
        .with(spec),
    ))
}

// 13. 4φ3 -> 8φ7

fn g348_conditions(p: &Slots) -> Vec<Condition> {
    let [b, x] = p.vals(["b", "x"]);
    vec![cond("|x/b²q| < 1", x / (b * b * p.qv()))]
}

fn g348_lhs(p: &Slots) -> Side {
    let [a, b, x] = p.vals(["a", "b", "x"]);
    let z = x / (b * b * p.qv());
    Ok(SideExpr::single(Term::series(vwp_phi(p, a, &[b], z)?)))
}

fn g348_rhs(p: &Slots) -> Side {
    let [a, b, x] = p.vals(["a", "b", "x"]);
    let q = p.qv();
    let axb = a * x / b;
    let spec = phi(
        p,
        vec![s(axb), w(q * q * axb), w(a * q), w(q * q * a), s(x)],
        vec![w(axb), w(x * x * a * q / (b * b)), w(x * x * a / (b * b)), s(a * q / b)],
        x / (b * b * q),
    )?;
    Ok(SideExpr::single(
        Term::products(
            vec![a * x * x / (b * b), x / (b * q)],
            vec![a * q * x / b, x * x / (b * b * q)],
        )
        .with(spec),
    ))
}

// 14. Two-term 8φ7 transformation, Gasper–Rahman (III.37)
//
// The first denominator reads (…, q/c, efq/c, …); the repeated eq/c printed
// in some sources does not balance the identity.

fn iii37_conditions(p: &Slots) -> Vec<Condition> {
    let [a, b, c, d, e, f] = p.vals(["a", "b", "c", "d", "e", "f"]);
    let q = p.qv();
    vec![
        cond("|bd/a| < 1", b * d / a),
        cond("|a²q²/bcdef| < 1", a * a * q * q / (b * c * d * e * f)),
    ]
}

fn vwp8_lhs(p: &Slots) -> Side {
    let [a, b, c, d, e, f] = p.vals(["a", "b", "c", "d", "e", "f"]);
    let q = p.qv();
    let z = a * a * q * q / (b * c * d * e * f);
    Ok(SideExpr::single(Term::series(vwp_phi(p, a, &[b, c, d, e, f], z)?)))
}

fn iii37_rhs(p: &Slots) -> Side {
    let [a, b, c, d, e, f] = p.vals(["a", "b", "c", "d", "e", "f"]);
    let q = p.qv();
    let aq = a * q;
    let s1 = vwp_phi(p, e * f / c, &[aq / (b * c), aq / (c * d), e * f / a, e, f], b * d / a)?;
    let t1 = Term::products(
        vec![aq, aq / (d * e), aq / (d * f), aq / (e * f), e * q / c, f * q / c, b / a, b * e * f / a],
        vec![aq / d, aq / e, aq / f, aq / (d * e * f), q / c, e * f * q / c, b * e / a, b * f / a],
    )
    .with(s1);
    let s2 = vwp_phi(
        p,
        b * b / a,
        &[b, b * c / a, b * d / a, b * e / a, b * f / a],
        a * a * q * q / (b * c * d * e * f),
    )?;
    let t2 = Term::products(
        vec![aq, b * q / a, b * q / c, b * q / d, b * q / e, b * q / f, d, e, f],
        vec![aq / b, aq / c, aq / d, aq / e, aq / f, b * d / a, b * e / a, b * f / a, d * e * f / a],
    )
    .and(
        vec![aq / (b * c), b * d * e * f / (a * a), a * aq / (b * d * e * f)],
        vec![aq / (d * e * f), q / c, b * b * q / a],
    )
    .times(b / a)
    .with(s2);
    Ok(SideExpr::sum(vec![t1, t2]))
}

// 15. Three-term 8φ7 transformation, μ = bcde/aq

fn lemma8_conditions(p: &Slots) -> Vec<Condition> {
    let [a, b, c, d, e, f] = p.vals(["a", "b", "c", "d", "e", "f"]);
    let q = p.qv();
    vec![
        cond("|q/f| < 1", q / f),
        cond("|a²q²/bcdef| < 1", a * a * q * q / (b * c * d * e * f)),
    ]
}

fn lemma8_lhs(p: &Slots) -> Side {
    let [a, b, c, d, e] = p.vals(["a", "b", "c", "d", "e"]);
    let mu = b * c * d * e / (a * p.qv());
    Ok(vwp8_lhs(p)?.derive("mu", mu))
}

fn lemma8_rhs(p: &Slots) -> Side {
    let [a, b, c, d, e, f] = p.vals(["a", "b", "c", "d", "e", "f"]);
    let q = p.qv();
    let mu = b * c * d * e / (a * q);
    let aq = a * q;
    let s1 = vwp_phi(p, mu, &[mu * f / a, b, c, d, e], q / f)?;
    let t1 = Term::products(
        vec![aq, aq / (c * d), aq / (c * e), aq / (d * e), b / a, mu * q / c, mu * q / d, mu * q / e],
        vec![aq / c, aq / d, aq / e, b * c / a, b * d / a, b * e / a, b / mu, mu * q],
    )
    .with(s1);
    let s2 = vwp_phi(
        p,
        b * b / a,
        &[b, b * c / a, b * d / a, b * e / a, b * f / a],
        a * a * q * q / (b * c * d * e * f),
    )?;
    let t2 = Term::products(
        vec![aq, b * q / a, b * q / c, b * q / d, b * q / e, b * q / f, c, d, e],
        vec![aq / b, aq / c, aq / d, aq / e, aq / f, b * c / a, b * d / a, b * e / a, c * d * e / aq],
    )
    .and(
        vec![aq / (b * f), b * c * d * e / (a * aq), aq * aq / (b * c * d * e)],
        vec![aq * q / (c * d * e), q / f, b * b * q / a],
    )
    .with(s2);
    Ok(SideExpr::sum(vec![t1, t2]).derive("mu", mu))
}

// 16. Entry 5 at aq = de: 6ψ6 -> 6φ5

fn reduction_conditions(p: &Slots) -> Vec<Condition> {
    let [a, b, c, f, g] = p.vals(["a", "b", "c", "f", "g"]);
    vec![cond("|a²q/bcfg| < 1", a * a * p.qv() / (b * c * f * g))]
}

fn reduction_lhs(p: &Slots) -> Side {
    let [a, b, c, f, g] = p.vals(["a", "b", "c", "f", "g"]);
    let z = a * a * p.qv() / (b * c * f * g);
    Ok(SideExpr::single(Term::series(vwp_psi(p, a, &[b, c, f, g], z)?)))
}

pub(crate) fn reduction_prefactor(p: &Slots) -> Term {
    let [a, b, c, f, g] = p.vals(["a", "b", "c", "f", "g"]);
    let q = p.qv();
    let aq = a * q;
    Term::products(
        vec![q, aq, q / a, aq / (b * c), aq / (b * f), aq / (b * g), b * q / c, b * q / f, b * q / g],
        vec![q / b, q / c, q / f, q / g, aq / b, aq / c, aq / f, aq / g, b * b * q / a],
    )
}

fn reduction_rhs(p: &Slots) -> Side {
    let [a, b, c, f, g] = p.vals(["a", "b", "c", "f", "g"]);
    let z = a * a * p.qv() / (b * c * f * g);
    let spec = vwp_phi(p, b * b / a, &[b * c / a, b * f / a, b * g / a], z)?;
    Ok(SideExpr::single(reduction_prefactor(p).with(spec)))
}

pub(crate) static CATALOG: [IdentityDescriptor; 16] = [
    IdentityDescriptor {
        id: "ramanujan_1psi1",
        name: "Ramanujan's 1ψ1 summation",
        slots: &["q", "a", "b", "z"],
        constraint: "|b/a| < |z| < 1",
        citation: "Gasper–Rahman, Basic Hypergeometric Series, Appendix II. 29",
        conditions: ramanujan_conditions,
        lhs: ramanujan_lhs,
        rhs: ramanujan_rhs,
        guard_numerators: false,
    },
    IdentityDescriptor {
        id: "bailey_6psi6",
        name: "Bailey's 6ψ6 summation",
        slots: &["q", "a", "b", "c", "d", "e"],
        constraint: "|a²q/bcde| < 1",
        citation: "Gasper–Rahman, Basic Hypergeometric Series, Appendix II. 33",
        conditions: bailey_conditions,
        lhs: bailey_lhs,
        rhs: bailey_rhs,
        guard_numerators: false,
    },
    IdentityDescriptor {
        id: "thm1_2psi2_to_8psi8",
        name: "2ψ2 to very-well-poised 8ψ8 transformation",
        slots: &["q", "a", "b", "c", "x"],
        constraint: "max{|aq/bcx|, |aqx/bc|} < 1",
        citation: "bilateral extension of Gasper–Rahman (3.4.7)",
        conditions: thm1_conditions,
        lhs: thm1_lhs,
        rhs: thm1_rhs,
        guard_numerators: false,
    },
    IdentityDescriptor {
        id: "thm2_4psi4_to_8psi8",
        name: "well-poised 4ψ4 to very-well-poised 8ψ8 transformation",
        slots: &["q", "a", "b", "c", "x"],
        constraint: "max{|aq/bcx|, |ax/bcq|} < 1",
        citation: "bilateral extension of Gasper–Rahman (3.4.8)",
        conditions: thm2_conditions,
        lhs: thm2_lhs,
        rhs: thm2_rhs,
        guard_numerators: false,
    },
    IdentityDescriptor {
        id: "thm3_8psi8_three_term",
        name: "very-well-poised 8ψ8 three-term transformation",
        slots: &["q", "a", "b", "c", "d", "e", "f", "g"],
        constraint: "max{|a³q²/bcdefg|, |aq/fg|} < 1, μ = bcde/aq",
        citation: "bilateral extension of Gasper–Rahman (III.37); equivalent to Jouhet (2007)",
        conditions: thm3_conditions,
        lhs: thm3_lhs,
        rhs: thm3_rhs,
        guard_numerators: false,
    },
    IdentityDescriptor {
        id: "cor4",
        name: "2ψ2 to very-well-poised 8φ7 (x = 1/c in the 2ψ2 transformation)",
        slots: &["q", "a", "b", "c"],
        constraint: "max{|aq/b|, |aq/bc²|} < 1",
        citation: "thm1_2psi2_to_8psi8 at x = 1/c",
        conditions: cor4_conditions,
        lhs: cor4_lhs,
        rhs: cor4_rhs,
        guard_numerators: false,
    },
    IdentityDescriptor {
        id: "cor5",
        name: "4ψ4 to very-well-poised 8φ7 (x = 1/c in the 4ψ4 transformation)",
        slots: &["q", "a", "b", "c"],
        constraint: "max{|aq/b|, |a/bc²q|} < 1",
        citation: "thm2_4psi4_to_8psi8 at x = 1/c",
        conditions: cor5_conditions,
        lhs: cor5_lhs,
        rhs: cor5_rhs,
        guard_numerators: false,
    },
    IdentityDescriptor {
        id: "rogers_6phi5",
        name: "Rogers' 6φ5 summation",
        slots: &["q", "a", "b", "c", "d"],
        constraint: "|aq/bcd| < 1",
        citation: "Gasper–Rahman, Basic Hypergeometric Series, Appendix II. 21",
        conditions: rogers_conditions,
        lhs: rogers_lhs,
        rhs: rogers_rhs,
        guard_numerators: false,
    },
    IdentityDescriptor {
        id: "watson_III23",
        name: "8φ7 to 8φ7 transformation, λ = a²q/bcd",
        slots: &["q", "a", "b", "c", "d", "e", "f"],
        constraint: "max{|a²q²/bcdef|, |aq/ef|} < 1",
        citation: "Gasper–Rahman, Basic Hypergeometric Series, Appendix III. 23",
        conditions: watson_conditions,
        lhs: watson_lhs,
        rhs: watson_rhs,
        guard_numerators: false,
    },
    IdentityDescriptor {
        id: "three_term_S",
        name: "three-term theta function relation",
        slots: &["q", "x", "lambda", "mu", "nu"],
        constraint: "none beyond pole guards",
        citation: "Gasper–Rahman, Basic Hypergeometric Series, Exercise 2.16",
        conditions: three_term_conditions,
        lhs: three_term_lhs,
        rhs: three_term_rhs,
        guard_numerators: true,
    },
    IdentityDescriptor {
        id: "jouhet_eq3",
        name: "Jouhet's four-term 8ψ8 transformation",
        slots: &["q", "a", "b", "d", "e", "f", "g", "h"],
        constraint: "max{|c|, |λc/a|} < 1, c = a³q²/bdefgh, λ = a²q/cde",
        citation: "Jouhet (2007), by Cauchy's method",
        conditions: jouhet_conditions,
        lhs: jouhet_lhs,
        rhs: jouhet_rhs,
        guard_numerators: false,
    },
    IdentityDescriptor {
        id: "gasper_347",
        name: "2φ1 to very-well-poised 8φ7 transformation",
        slots: &["q", "a", "b", "x"],
        constraint: "|qx/b²| < 1",
        citation: "Gasper–Rahman, Basic Hypergeometric Series, (3.4.7)",
        conditions: g347_conditions,
        lhs: g347_lhs,
        rhs: g347_rhs,
        guard_numerators: false,
    },
    IdentityDescriptor {
        id: "gasper_348",
        name: "well-poised 4φ3 to very-well-poised 8φ7 transformation",
        slots: &["q", "a", "b", "x"],
        constraint: "|x/b²q| < 1",
        citation: "Gasper–Rahman, Basic Hypergeometric Series, (3.4.8)",
        conditions: g348_conditions,
        lhs: g348_lhs,
        rhs: g348_rhs,
        guard_numerators: false,
    },
    IdentityDescriptor {
        id: "bailey_III37",
        name: "two-term 8φ7 transformation",
        slots: &["q", "a", "b", "c", "d", "e", "f"],
        constraint: "max{|bd/a|, |a²q²/bcdef|} < 1",
        citation: "Gasper–Rahman, Basic Hypergeometric Series, Appendix III. 37",
        conditions: iii37_conditions,
        lhs: vwp8_lhs,
        rhs: iii37_rhs,
        guard_numerators: false,
    },
    IdentityDescriptor {
        id: "lemma8_8phi7_three_term",
        name: "three-term 8φ7 transformation, μ = bcde/aq",
        slots: &["q", "a", "b", "c", "d", "e", "f"],
        constraint: "max{|q/f|, |a²q²/bcdef|} < 1",
        citation: "from Gasper–Rahman (III.37) and (III.23)",
        conditions: lemma8_conditions,
        lhs: lemma8_lhs,
        rhs: lemma8_rhs,
        guard_numerators: false,
    },
    IdentityDescriptor {
        id: "thm3_reduction_aq_de",
        name: "6ψ6 to very-well-poised 6φ5 (thm3 at aq = de)",
        slots: &["q", "a", "b", "c", "f", "g"],
        constraint: "|a²q/bcfg| < 1",
        citation: "thm3_8psi8_three_term at e = aq/d; with Rogers' 6φ5 gives Bailey's 6ψ6",
        conditions: reduction_conditions,
        lhs: reduction_lhs,
        rhs: reduction_rhs,
        guard_numerators: false,
    },
];
