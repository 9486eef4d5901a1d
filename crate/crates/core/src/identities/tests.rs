use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::expr::{SideExpr, Slots};
use super::*;
use crate::series::{convergence_margin, eval_phi, eval_psi, Param, SeriesKind, SeriesSpec};
use crate::{c, r};

fn draw(rng: &mut ChaCha8Rng, d: &IdentityDescriptor) -> ParamAssignment {
    let mut p = ParamAssignment::new().with("q", r(rng.gen_range(0.1..0.6)));
    for slot in d.parameter_slots() {
        let modulus = rng.gen_range(0.3f64.ln()..3.0f64.ln()).exp();
        let phase = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
        p.set(slot, ComplexScalar::from_polar(modulus, phase));
    }
    p
}

fn sides(d: &IdentityDescriptor, p: &ParamAssignment) -> [SideExpr; 2] {
    let slots = Slots::new(p, d.slots).unwrap();
    [(d.lhs)(&slots).unwrap(), (d.rhs)(&slots).unwrap()]
}

#[test]
fn stated_conditions_imply_series_convergence() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for d in catalog() {
        let mut inside = 0;
        for _ in 0..3000 {
            let p = draw(&mut rng, d);
            if !d.conditions(&p).unwrap().iter().all(Condition::holds) {
                continue;
            }
            inside += 1;
            for side in sides(d, &p) {
                for spec in side.series() {
                    assert!(
                        convergence_margin(spec) > 0.0,
                        "{}: series outside its region at {}",
                        d.id,
                        serde_json::to_string(&p).unwrap()
                    );
                }
            }
        }
        assert!(inside > 30, "{}: only {inside} draws inside", d.id);
    }
}

#[test]
fn permuted_pair_inputs_are_bit_identical() {
    let d = find_identity("thm1_2psi2_to_8psi8").unwrap();
    let p = ParamAssignment::new()
        .with("q", r(0.25))
        .with("a", c(0.9, 0.1))
        .with("b", c(1.6, -0.2))
        .with("c", r(1.4))
        .with("x", c(0.7, 0.3));
    let [_, rhs] = sides(d, &p);
    let spec = rhs.series().next().unwrap();
    let pairs = |list: &[Param]| list.iter().filter(|x| matches!(x, Param::PairSq(_))).count();
    assert!(pairs(spec.numerator()) >= 2 && pairs(spec.denominator()) >= 2);
    let rev = |list: &[Param]| list.iter().rev().copied().collect::<Vec<_>>();
    let permuted = SeriesSpec::bilateral(
        rev(spec.numerator()),
        rev(spec.denominator()),
        spec.q(),
        spec.z(),
    )
    .unwrap();
    let cfg = EvalConfig::default();
    let x = eval_psi(spec, &cfg).unwrap();
    let y = eval_psi(&permuted, &cfg).unwrap();
    assert_eq!(x.value, y.value);
    assert_eq!(x.err, y.err);
}

/// Replaces the first single denominator parameter by `q`.
fn inject_q(spec: &SeriesSpec) -> Option<(SeriesSpec, SeriesSpec)> {
    let q = spec.q();
    let mut den = spec.denominator().to_vec();
    let i = den.iter().position(|x| matches!(x, Param::Single(_)))?;
    den.remove(i);
    let phi = SeriesSpec::unilateral(spec.numerator().to_vec(), den.clone(), q, spec.z()).ok()?;
    den.push(Param::Single(q.value()));
    let psi = SeriesSpec::bilateral(spec.numerator().to_vec(), den, q, spec.z()).ok()?;
    Some((psi, phi))
}

#[test]
fn catalog_psi_series_reduce_when_a_denominator_is_q() {
    let cfg = EvalConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut checked = 0;
    for d in catalog() {
        let mut done = false;
        for _ in 0..2000 {
            let p = draw(&mut rng, d);
            if !d.constraint_holds(&p) {
                continue;
            }
            for side in sides(d, &p) {
                for spec in side.series().filter(|s| s.kind() == SeriesKind::Bilateral) {
                    let (psi, phi) = inject_q(spec).unwrap();
                    let (Ok(x), Ok(y)) = (eval_psi(&psi, &cfg), eval_phi(&phi, &cfg)) else {
                        continue;
                    };
                    if !(x.is_converged() && y.is_converged()) {
                        continue;
                    }
                    assert_eq!(x.n_backward, 0, "{}", d.id);
                    let rel = (x.value - y.value).norm() / y.value.norm().max(1e-300);
                    assert!(rel <= 1e-12, "{}: {rel:e}", d.id);
                    done = true;
                }
            }
            if done {
                checked += 1;
                break;
            }
        }
    }
    // entries with a bilateral series: 1-5, 10 has none, 11, 16
    assert!(checked >= 7, "only {checked} entries checked");
}

#[test]
fn evaluate_rejects_q_outside_unit_disk() {
    for d in catalog() {
        let mut p = ParamAssignment::new();
        for s in d.slots {
            p.set(s, r(0.5));
        }
        p.set("q", r(1.0));
        assert!(matches!(
            d.check_constraint(&p, POLE_GUARD),
            Err(Error::InvalidBase(_))
        ));
    }
}
