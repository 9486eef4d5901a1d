use proptest::prelude::*;
use qseries::{
    c, eval_phi, eval_psi, poch_finite, ComplexScalar, EvalConfig, Param, QBase, SeriesSpec,
};

const ORACLE_TERMS: i64 = 30;

fn polar(modulus: f64, phase: f64) -> ComplexScalar {
    ComplexScalar::from_polar(modulus, phase)
}

fn param() -> impl Strategy<Value = ComplexScalar> {
    (0.3f64.ln()..3.0f64.ln(), -std::f64::consts::PI..std::f64::consts::PI)
        .prop_map(|(lm, ph)| polar(lm.exp(), ph))
}

/// A 2ψ2 whose forward and backward ratios are both at most `e^{-1.5}` asymptotically.
#[derive(Debug, Clone)]
struct Psi22 {
    q: f64,
    a: [ComplexScalar; 2],
    b: [ComplexScalar; 2],
    z: ComplexScalar,
}

impl Psi22 {
    fn spec(&self) -> SeriesSpec {
        SeriesSpec::bilateral(
            self.a.iter().map(|&x| Param::Single(x)).collect(),
            self.b.iter().map(|&x| Param::Single(x)).collect(),
            QBase::real(self.q).unwrap(),
            self.z,
        )
        .unwrap()
    }

    fn term(&self, k: i64) -> ComplexScalar {
        let q = QBase::real(self.q).unwrap();
        let mut t = self.z.powi(k as i32);
        for (&x, &y) in self.a.iter().zip(&self.b) {
            t *= if k >= 0 {
                poch_finite(x, q, k).unwrap() / poch_finite(y, q, k).unwrap()
            } else {
                // (x;q)_{-m} alone underflows for large m; invert the quotient
                let shift = self.q.powi(k as i32);
                let den = poch_finite(x * shift, q, -k).unwrap();
                let s = den.norm();
                (poch_finite(y * shift, q, -k).unwrap() / s) / (den / s)
            };
        }
        t
    }
}

fn psi22() -> impl Strategy<Value = Psi22> {
    let ratio = (-3.0f64..-1.5, -3.2f64..3.2);
    (0.3f64..0.6, param(), param(), param(), ratio.clone(), ratio).prop_map(
        |(q, a1, a2, b1, (lz, pz), (lb, pb))| {
            let z = polar(lz.exp(), pz);
            // |b1 b2 / (a1 a2 z)| = e^lb
            let b2 = polar(lb.exp() * (a1 * a2 * z).norm() / b1.norm(), pb);
            Psi22 { q, a: [a1, a2], b: [b1, b2], z }
        },
    )
}

fn rel(a: ComplexScalar, b: ComplexScalar, scale: f64) -> f64 {
    (a - b).norm() / scale.max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn direction_split_matches_brute_force(s in psi22()) {
        let res = eval_psi(&s.spec(), &EvalConfig::default()).unwrap();
        prop_assert!(res.is_converged(), "{:?}", res);
        let fwd: Vec<_> = (0..ORACLE_TERMS).map(|k| s.term(k)).collect();
        let bwd: Vec<_> = (1..=ORACLE_TERMS).map(|k| s.term(-k)).collect();
        // each partial against its own absolute mass: cancellation inside a
        // direction is a property of the data, not of the summation
        let fmass: f64 = fwd.iter().map(|t| t.norm()).sum();
        let bmass: f64 = bwd.iter().map(|t| t.norm()).sum();
        let fsum: ComplexScalar = fwd.iter().sum();
        let bsum: ComplexScalar = bwd.iter().sum();
        prop_assert!(rel(res.forward_sum, fsum, fmass) <= 1e-11, "{} vs {}", res.forward_sum, fsum);
        prop_assert!(rel(res.backward_sum, bsum, bmass) <= 1e-11, "{} vs {}", res.backward_sum, bsum);
        prop_assert!(rel(res.value, fsum + bsum, fmass + bmass) <= 1e-11);
    }

    #[test]
    fn shift_consistency(s in psi22()) {
        let spec = s.spec();
        let shifted = Psi22 {
            a: s.a.map(|x| x * s.q),
            b: s.b.map(|x| x * s.q),
            ..s.clone()
        };
        let v = eval_psi(&spec, &EvalConfig::default()).unwrap();
        let w = eval_psi(&shifted.spec(), &EvalConfig::default()).unwrap();
        prop_assert!(v.is_converged() && w.is_converged());
        let t1 = s.term(1);
        prop_assume!(v.value.norm() > 1e-6 * (v.forward_sum.norm() + v.backward_sum.norm()));
        prop_assert!(rel(v.value, t1 * w.value, v.value.norm()) <= 1e-11,
            "{} vs {}", v.value, t1 * w.value);
    }

    #[test]
    fn halving_tol_stays_within_err(s in psi22(), tol_exp in 8i32..14) {
        let cfg = EvalConfig::default().with_tol(10f64.powi(-tol_exp));
        let coarse = eval_psi(&s.spec(), &cfg).unwrap();
        let fine = eval_psi(&s.spec(), &cfg.with_tol(cfg.tol / 2.0)).unwrap();
        prop_assert!(coarse.is_converged() && fine.is_converged());
        prop_assert!((coarse.value - fine.value).norm() <= coarse.err,
            "moved {} > err {}", (coarse.value - fine.value).norm(), coarse.err);
    }

    #[test]
    fn converged_truncation_err_is_small(s in psi22()) {
        let cfg = EvalConfig::default();
        let res = eval_psi(&s.spec(), &cfg).unwrap();
        prop_assume!(res.is_converged());
        // the rounding allowance of the two partial sums is reported on top
        let rounding = 2.0 * f64::EPSILON * (res.forward_sum.norm() + res.backward_sum.norm());
        let truncation = res.err - rounding;
        prop_assert!(truncation <= 10.0 * cfg.tol * res.value.norm() || res.value.norm() < cfg.tol,
            "truncation {} value {}", truncation, res.value.norm());
    }

    #[test]
    fn unilateral_halving_tol(a in param(), b in param(), d in param(), lz in -3.0f64..-0.2, ph in -3.2f64..3.2) {
        let spec = SeriesSpec::unilateral(
            vec![Param::Single(a), Param::Single(b)],
            vec![Param::Single(d)],
            QBase::real(0.45).unwrap(),
            polar(lz.exp(), ph),
        ).unwrap();
        let coarse = eval_phi(&spec, &EvalConfig::default().with_tol(1e-10)).unwrap();
        let fine = eval_phi(&spec, &EvalConfig::default().with_tol(5e-11)).unwrap();
        prop_assert!(coarse.is_converged() && fine.is_converged());
        prop_assert!((coarse.value - fine.value).norm() <= coarse.err);
    }

    #[test]
    fn permuted_parameters_are_bit_identical(s in psi22()) {
        let swapped = Psi22 { a: [s.a[1], s.a[0]], b: [s.b[1], s.b[0]], ..s.clone() };
        let x = eval_psi(&s.spec(), &EvalConfig::default()).unwrap();
        let y = eval_psi(&swapped.spec(), &EvalConfig::default()).unwrap();
        prop_assert_eq!(x.value, y.value);
        prop_assert_eq!(x.err, y.err);
    }

    #[test]
    fn injected_q_reduces_to_phi(s in psi22()) {
        let q = QBase::real(s.q).unwrap();
        let num: Vec<_> = s.a.iter().map(|&x| Param::Single(x)).collect();
        let psi = SeriesSpec::bilateral(num.clone(), vec![Param::Single(s.b[0]), Param::Single(c(s.q, 0.0))], q, s.z).unwrap();
        let phi = SeriesSpec::unilateral(num, vec![Param::Single(s.b[0])], q, s.z).unwrap();
        let x = eval_psi(&psi, &EvalConfig::default()).unwrap();
        let y = eval_phi(&phi, &EvalConfig::default()).unwrap();
        prop_assert!(x.is_converged() && y.is_converged());
        prop_assert_eq!(x.n_backward, 0);
        prop_assert!(rel(x.value, y.value, y.value.norm()) <= 1e-12);
    }
}
