//! Symmetric hyperbolic systems and their right-hand sides: the full
//! nonlinearity `N(u)`, its linearization, the paradifferential flow and the
//! perturbative remainders.
//!
//! `F` and the high-high part of the linearized remainder are computed as
//! exact complements of the paradifferential part, so
//! `N(u) = paradiff(u, u) + F(u)` holds to round-off whatever the
//! quantization. The displayed three-term forms are kept as cross-checks.

mod ops;
mod registry;
mod system;

pub use ops::{
    apply_linearized, apply_n, apply_paradiff, apply_paradiff_with, coefficient_field,
    f_difference_check, linearized_pi_displayed, linearized_remainder, paradiff_principal,
    perturbative_f, perturbative_f_displayed, zeroth_order_field, FDifferenceReport,
    LinearizedRemainder, ParadiffOperator,
};
pub use registry::{builtin, Registry};
pub use system::{
    Burgers, Burgers2d, CallbackSystem, CoeffFn, ConstantSystem, HyperbolicSystem, JacobianFn,
    Sym2, System,
};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::paraproduct::{ParaConfig, Quantization};
    use crate::spectral::{Field, GridSpec};

    fn g1(n: usize) -> GridSpec {
        GridSpec::one_d(n).unwrap()
    }

    #[test]
    fn burgers_of_sine() {
        let sys = builtin("burgers").unwrap();
        let g = g1(64);
        let u = Field::from_fn(g, 1, |_, x| x[0].sin());
        let n = apply_n(&sys, &u).unwrap();
        let want = Field::from_fn(g, 1, |_, x| 0.5 * (2.0 * x[0]).sin());
        assert!((&n - &want).linf_norm() < 1e-10);
    }

    #[test]
    fn constant_state_gives_zero() {
        let g = g1(32);
        for name in ["burgers", "sym2"] {
            let sys = builtin(name).unwrap();
            let u = Field::constant(g, &vec![0.7; sys.components()]);
            assert!(apply_n(&sys, &u).unwrap().linf_norm() < 1e-13);
            let f = perturbative_f(&sys, &u, &ParaConfig::with_gap(2)).unwrap();
            assert!(f.linf_norm() < 1e-13);
        }
    }

    #[test]
    fn burgers_linearized_analytic() {
        let sys = builtin("burgers").unwrap();
        let g = g1(64);
        let u = Field::from_fn(g, 1, |_, x| x[0].sin());
        let v = Field::from_fn(g, 1, |_, x| x[0].cos());
        let lin = apply_linearized(&sys, &u, &v).unwrap();
        let want = Field::from_fn(g, 1, |_, x| (2.0 * x[0]).cos());
        assert!((&lin - &want).linf_norm() < 1e-10);
        let zero = Field::zeros(g, 1);
        assert_eq!(apply_linearized(&sys, &u, &zero).unwrap().linf_norm(), 0.0);
    }

    #[test]
    fn displayed_forms_agree_for_coefficient_lowpass() {
        let sys = builtin("sym2").unwrap();
        let g = g1(128);
        let u = Field::from_fn(g, 2, |c, x| (x[0] + c as f64).sin().exp() * 0.3);
        let v = Field::from_fn(g, 2, |c, x| (3.0 * x[0] - c as f64).cos() + (20.0 * x[0]).sin());
        let cfg = ParaConfig { gap: 2, quantization: Quantization::CoeffLowpass, ..Default::default() };
        let f = perturbative_f(&sys, &u, &cfg).unwrap();
        let fd = perturbative_f_displayed(&sys, &u, &cfg).unwrap();
        assert!((&f - &fd).l2_norm() < 1e-12 * f.l2_norm().max(1.0));
        let rem = linearized_remainder(&sys, &u, &v, &cfg).unwrap();
        let pid = linearized_pi_displayed(&sys, &u, &v, &cfg).unwrap();
        assert!((&rem.pi_part - &pid).l2_norm() < 1e-12 * pid.l2_norm().max(1.0));
    }

    #[test]
    fn zeroth_order_term_can_be_dropped() {
        let sys = builtin("burgers").unwrap();
        let g = g1(128);
        let u = Field::from_fn(g, 1, |_, x| x[0].sin());
        let w = Field::from_fn(g, 1, |_, x| (40.0 * x[0]).cos());
        let cfg = ParaConfig::with_gap(2);
        let full = apply_paradiff(&sys, &u, &w, &cfg).unwrap();
        let principal = apply_paradiff_with(&sys, &u, &w, &cfg, false).unwrap();
        let tm = &full - &principal;
        // M = u_x = cos x multiplies the high mode
        let want = Field::from_fn(g, 1, |_, x| x[0].cos() * (40.0 * x[0]).cos());
        assert!((&tm - &want).l2_norm() < 1e-10);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let sys = builtin("burgers2d").unwrap();
        let u = Field::zeros(g1(32), 1);
        assert!(apply_n(&sys, &u).is_err());
    }
}
