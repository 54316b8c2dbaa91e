//! Comparisons against values obtained independently of this crate:
//! closed forms, and roots of the characteristic equation computed to 30
//! digits with arbitrary-precision arithmetic.

// Reference values keep the digits they were computed with.
#![allow(clippy::excessive_precision)]

use std::f64::consts::PI;

use parahyp::envelope::{sharp_envelope, FrequencyEnvelope, Slack};
use parahyp::harness::spearman;
use parahyp::model::{apply_n, builtin};
use parahyp::norms::{control_params, sobolev_norm};
use parahyp::paraproduct::{para_decompose, ParaConfig};
use parahyp::solver::{self, euler_reg_step, CharacteristicsOracle, Scheme, SolveConfig};
use parahyp::{Field, GridSpec};

fn grid(n: usize) -> GridSpec {
    GridSpec::one_d(n).unwrap()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

/// `u = sin(x + t u)` at `(t, x, u)`.
const CHARACTERISTIC_ROOTS: [(f64, f64, f64); 12] = [
    (0.25, 0.3, 0.386_249_870_830_467_777_15),
    (0.25, 1.0, 0.944_519_954_808_107_221_8),
    (0.25, 2.5, 0.495_005_583_555_567_897_59),
    (0.25, 4.0, -0.642_516_742_213_806_613_89),
    (0.5, 0.3, 0.539_364_512_887_889_493_29),
    (0.5, 1.0, 0.997_402_267_035_696_628_12),
    (0.5, 2.5, 0.418_843_221_855_389_423_58),
    (0.5, 4.0, -0.550_614_439_381_025_513_4),
    (0.9, 0.3, 0.892_797_467_003_429_984_74),
    (0.9, 1.0, 0.957_874_096_527_258_056_18),
    (0.9, 2.5, 0.334_228_738_114_590_909_73),
    (0.9, 4.0, -0.443_379_631_738_452_534_83),
];

#[test]
fn characteristics_oracle_matches_reference_roots() {
    let oracle = CharacteristicsOracle::sine(1.0);
    assert_eq!(oracle.shock_time(), 1.0);
    for (t, x, u) in CHARACTERISTIC_ROOTS {
        let got = oracle.value(t, x).unwrap();
        assert!((got - u).abs() < 1e-13, "t={t} x={x}: {got} vs {u}");
    }
    assert!(oracle.value(1.0, 0.0).is_err());
}

#[test]
fn three_mode_shock_time() {
    let oracle = CharacteristicsOracle::sine_modes(&[(1.0, 1.0), (0.05, 17.0), (0.01, 53.0)]);
    assert!(close(oracle.shock_time(), 0.420_168_067_226_890_756_3, 1e-12));
}

#[test]
fn euler_solution_tracks_characteristics_pointwise() {
    // u(0.5, 2πj/256) for u0 = sin x.
    let reference = [
        (32, 0.952_609_783_711_306_713_75),
        (64, 0.900_367_222_589_747_146_07),
        (160, -0.507_118_928_415_373_975_36),
        (224, -0.952_609_783_711_306_713_75),
    ];
    let g = grid(256);
    let sys = builtin("burgers").unwrap();
    let u0 = Field::from_fn(g, 1, |_, x| x[0].sin());
    let cfg = SolveConfig { epsilon: 2f64.powi(-10), horizon: 0.5, ..SolveConfig::default() };
    let traj = solver::solve(&sys, &u0, &cfg).unwrap();
    let u = traj.state_at(0.5).unwrap();
    for (j, want) in reference {
        let got = u.data()[j];
        assert!((got - want).abs() < 2e-3, "x_{j}: {got} vs {want}");
    }
}

#[test]
fn sobolev_norm_of_a_cosine() {
    // ‖cos 5x‖_{H^3} = √π · 26^{3/2}
    let f = Field::from_fn(grid(64), 1, |_, x| (5.0 * x[0]).cos());
    assert!(close(sobolev_norm(&f, 3.0), 234.982_196_090_457_470_13, 1e-13));
    assert!(close(sobolev_norm(&f, 0.0), PI.sqrt(), 1e-14));
    let g2 = GridSpec::new(2, 32).unwrap();
    // ‖sin x sin y‖_{L²(T²)} = π
    let h = Field::from_fn(g2, 1, |_, x| x[0].sin() * x[1].sin());
    assert!(close(sobolev_norm(&h, 0.0), PI, 1e-14));
    assert!(close(sobolev_norm(&h, 1.0), PI * 3f64.sqrt(), 1e-14));
}

#[test]
fn control_parameters_of_a_sine() {
    let f = Field::from_fn(grid(128), 1, |_, x| (3.0 * x[0]).sin());
    let c = control_params(&f);
    assert!(close(c.a, 1.0, 1e-14));
    assert!(close(c.b, 3.0, 1e-13));
}

#[test]
fn young_constants() {
    // Σ_m 2^{-|m|/2} = (1 + 2^{-1/2}) / (1 - 2^{-1/2})
    assert!(close(Slack::symmetric(0.25).young_constant(), 5.828_427_124_746_190_097_6, 1e-14));
    // Σ_{m>=0} 2^{-4m} + Σ_{m>=1} 2^{-m/2} = 16/15 + 1/(√2 - 1)
    let want = 16.0 / 15.0 + 1.0 / (2f64.sqrt() - 1.0);
    assert!(close(Slack::default_asymmetric().young_constant(), want, 1e-14));
}

#[test]
fn envelope_of_a_single_shell() {
    let mut a = vec![0.0; 8];
    a[3] = 2.0;
    let env = FrequencyEnvelope::from_shell_norms(a, 3.0, Slack::symmetric(0.25)).unwrap();
    for (k, c) in env.c.iter().enumerate() {
        let want = 2.0 * 2f64.powf(-0.25 * (k as f64 - 3.0).abs());
        assert!(close(*c, want, 1e-15), "k={k}");
    }
    // cos 10x lives in shell 3, [8, 16), with ‖·‖_{H^1} = √(101π).
    let f = Field::from_fn(grid(64), 1, |_, x| (10.0 * x[0]).cos());
    let env = sharp_envelope(&f, 1.0, 0.5).unwrap();
    let h1 = (101.0 * PI).sqrt();
    for (k, a) in env.shell_norms.iter().enumerate() {
        assert!(close(*a, if k == 3 { h1 } else { 0.0 }, 1e-13), "k={k}");
    }
}

#[test]
fn paraproduct_of_separated_modes() {
    // cos x sits in shell 0 and cos 40x in shell 5, so with gap 2 the whole
    // product is the low-high part: cos x cos 40x = (cos 39x + cos 41x)/2.
    let g = grid(256);
    let lo = Field::from_fn(g, 1, |_, x| x[0].cos());
    let hi = Field::from_fn(g, 1, |_, x| (40.0 * x[0]).cos());
    let tri = para_decompose(&lo, &hi, &ParaConfig::with_gap(2)).unwrap();
    let want = Field::from_fn(g, 1, |_, x| 0.5 * ((39.0 * x[0]).cos() + (41.0 * x[0]).cos()));
    assert!((&tri.low_high - &want).linf_norm() < 1e-13);
    assert!(tri.high_low.linf_norm() < 1e-13);
    assert!(tri.high_high.linf_norm() < 1e-13);
}

#[test]
fn burgers_nonlinearity_and_one_euler_step() {
    let g = grid(64);
    let sys = builtin("burgers").unwrap();
    let u = Field::from_fn(g, 1, |_, x| x[0].sin());
    // sin x · cos x = sin 2x / 2
    let want = Field::from_fn(g, 1, |_, x| 0.5 * (2.0 * x[0]).sin());
    assert!((&apply_n(&sys, &u).unwrap() - &want).linf_norm() < 1e-14);
    let eps = 2f64.powi(-6);
    let (next, _) = euler_reg_step(&sys, &u, eps, &SolveConfig::default()).unwrap();
    let want = Field::from_fn(g, 1, |_, x| x[0].sin() + eps * 0.5 * (2.0 * x[0]).sin());
    assert!((&next - &want).linf_norm() < 1e-14);
}

#[test]
fn transport_is_an_exact_shift() {
    // u_t = u_x carries sin 3x to sin 3(x + t).
    let g = grid(64);
    let sys = builtin("transport").unwrap();
    let u0 = Field::from_fn(g, 1, |_, x| (3.0 * x[0]).sin());
    let t = 0.5;
    let want = Field::from_fn(g, 1, |_, x| (3.0 * (x[0] + t)).sin());
    for scheme in [Scheme::Galerkin, Scheme::Iteration] {
        let cfg = SolveConfig { scheme, horizon: t, para: ParaConfig::with_gap(2), ..SolveConfig::default() };
        let traj = solver::solve(&sys, &u0, &cfg).unwrap();
        let err = (traj.final_state() - &want).linf_norm();
        assert!(err < 1e-6, "{scheme}: {err}");
    }
    // Viscous transport damps the mode by exp(-9 ν t).
    let nu = 0.05;
    let cfg = SolveConfig { scheme: Scheme::Parabolic, nu, horizon: t, ..SolveConfig::default() };
    let traj = solver::solve(&sys, &u0, &cfg).unwrap();
    let want = want.scaled((-9.0 * nu * t).exp());
    let err = (traj.final_state() - &want).linf_norm();
    assert!(err < 1e-6, "parabolic: {err}");
}

#[test]
fn spearman_with_ties() {
    // Average ranks; reference value from an independent implementation.
    let x = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0];
    let y = [2.0, 1.0, 4.0, 4.0, 7.0, 9.0, 8.0];
    assert!(close(spearman(&x, &y), 0.918_956_211_949_470_3, 1e-14));
}
