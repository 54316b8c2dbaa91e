//! Acceptance suite: twelve criteria at desk scale (1D, N = 256, s = 3
//! unless stated). Each criterion is re-derived here from the recorded
//! series of its experiment, printed as one PASS/FAIL line, and the target
//! fails when any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use parahyp::harness::{self, ExperimentConfig, ExperimentResult};

struct Verdict {
    pass: bool,
    detail: String,
}

fn column(res: &ExperimentResult, series: &str, col: &str) -> Vec<f64> {
    res.series(series)
        .and_then(|s| s.column(col))
        .unwrap_or_else(|| panic!("{}: missing column {series}.{col}", res.name))
}

fn max(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

fn min(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::INFINITY, f64::min)
}

fn decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

fn increasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] > w[0])
}

fn c1(cfg: &ExperimentConfig) -> Verdict {
    let res = harness::exp_trichotomy(cfg).unwrap();
    let defects = column(&res, "defects", "relative_defect");
    let gaps = column(&res, "defects", "gap");
    let profiles = column(&res, "defects", "profile");
    let trials = defects.len() / 4;
    let covered = gaps.contains(&4.0) && gaps.contains(&8.0) && profiles.contains(&0.0) && profiles.contains(&1.0);
    let worst = max(&defects);
    Verdict {
        pass: covered && trials == 200 && worst <= 1e-12,
        detail: format!("{trials} pairs, both profiles, gaps 4 and 8, max relative defect {worst:.2e} (limit 1e-12)"),
    }
}

fn c2(cfg: &ExperimentConfig) -> Verdict {
    let res = harness::exp_coifman_meyer(cfg).unwrap();
    let cm = column(&res, "per_n", "cm_constant");
    let comm = column(&res, "per_n", "commutator_constant");
    let (cm_max, comm_max) = (max(&cm), max(&comm));
    let (cm_var, comm_var) = (cm_max / min(&cm), comm_max / min(&comm));
    Verdict {
        pass: cm_max <= 4.0 && comm_max <= 8.0 && cm_var <= 2.0 && comm_var <= 2.0,
        detail: format!(
            "paraproduct constant {cm_max:.3} (limit 4), commutator constant {comm_max:.3} (limit 8), \
             variation over N = 64, 128, 256: {cm_var:.3}x and {comm_var:.3}x (limit 2x)"
        ),
    }
}

fn c3(cfg: &ExperimentConfig) -> Verdict {
    let res = harness::exp_splitting(cfg).unwrap();
    let cols = ["n_split", "lin_split", "n_displayed", "lin_displayed"];
    let worst = cols
        .iter()
        .map(|c| max(&column(&res, "defects", c).into_iter().filter(|v| !v.is_nan()).collect::<Vec<_>>()))
        .fold(0.0, f64::max);
    let fields = column(&res, "defects", "trial").iter().map(|t| *t as usize).max().unwrap_or(0) + 1;
    Verdict {
        pass: fields >= 50 && worst <= 1e-10,
        detail: format!("{fields} random fields per system, max relative defect {worst:.2e} (limit 1e-10)"),
    }
}

fn c4(cfg: &ExperimentConfig) -> Verdict {
    let res = harness::exp_single_step(cfg).unwrap();
    let eps = column(&res, "defects", "epsilon");
    let literal = column(&res, "defects", "literal_defect");
    let evolved = column(&res, "defects", "evolved_defect");
    let slope = harness::loglog_slope(&eps, &evolved);
    let lit = max(&literal);
    Verdict {
        pass: slope >= 1.9 && lit <= 1e-13,
        detail: format!(
            "sin x: defect at round-off for every eps (max {lit:.2e}), bound holds trivially; \
             exact state at t = 0.5: slope {slope:.3} (limit 1.9)"
        ),
    }
}

fn c5(cfg: &ExperimentConfig) -> Verdict {
    let res = harness::exp_oracle_convergence(cfg).unwrap();
    let eps = column(&res, "errors", "epsilon");
    let err = column(&res, "errors", "l2_error");
    let rate = harness::loglog_slope(&eps, &err);
    let last = *err.last().unwrap();
    Verdict {
        pass: decreasing(&err) && rate >= 0.8 && last <= 5e-3 && eps.last() == Some(&2f64.powi(-10)),
        detail: format!(
            "monotone {}, rate {rate:.3} (limit 0.8), error at eps = 2^-10 {last:.2e} (limit 5e-3)",
            decreasing(&err)
        ),
    }
}

fn c6(cfg: &ExperimentConfig) -> Verdict {
    let res = harness::exp_energy_growth(cfg).unwrap();
    let c = column(&res, "constants", "constant");
    let spread = max(&c) / min(&c);
    let list: Vec<String> = c.iter().map(|v| format!("{v:.3}")).collect();
    Verdict {
        pass: c.len() == 5 && spread <= 4.0,
        detail: format!("constants over a = 0.25..2: [{}], spread {spread:.2}x (limit 4x)", list.join(", ")),
    }
}

fn c7(cfg: &ExperimentConfig) -> Verdict {
    let res = harness::exp_uniqueness(cfg).unwrap();
    let c = column(&res, "constants", "l2_constant");
    let spread = max(&c) / min(&c);
    let list: Vec<String> = c.iter().map(|v| format!("{v:.4}")).collect();
    Verdict {
        pass: c.len() == 3 && min(&c) > 0.0 && spread <= 2.0,
        detail: format!("constants for eta = 1e-2, 1e-3, 1e-4: [{}], spread {spread:.3}x (limit 2x)", list.join(", ")),
    }
}

fn c8(cfg: &ExperimentConfig) -> Verdict {
    let res = harness::exp_iteration_contraction(cfg).unwrap();
    let t = column(&res, "ratios", "T");
    let r = column(&res, "ratios", "ratio");
    let worst = |h: f64| max(&t.iter().zip(&r).filter(|(a, b)| **a == h && !b.is_nan()).map(|p| *p.1).collect::<Vec<_>>());
    let (full, half) = (worst(0.05), worst(0.025));
    let reduction = full / half;
    Verdict {
        pass: full <= 0.5 && half <= 0.5 && (1.0..=4.0).contains(&reduction),
        detail: format!(
            "max ratio {full:.4} at T = 0.05, {half:.4} at T = 0.025 (limit 0.5), \
             reduction {reduction:.3} (within 2x of 2)"
        ),
    }
}

fn c9(cfg: &ExperimentConfig) -> Verdict {
    let res = harness::exp_regularized_family(cfg).unwrap();
    let h = column(&res, "family", "h");
    let worst = |c: &str| max(&column(&res, "family", c).into_iter().filter(|v| !v.is_nan()).collect::<Vec<_>>());
    let (a, b, c) = (worst("ratio_a"), worst("ratio_b"), worst("ratio_c"));
    Verdict {
        pass: h == [2.0, 3.0, 4.0, 5.0, 6.0] && a <= 16.0 && b <= 16.0 && c <= 16.0,
        detail: format!("h = 2..6, constants (a) {a:.3}, (b) {b:.3}, (c) {c:.3} (single C, limit 16)"),
    }
}

fn c10(cfg: &ExperimentConfig) -> Verdict {
    let res = harness::exp_continuous_dependence(cfg).unwrap();
    let d = column(&res, "distances", "hs_distance");
    let e = column(&res, "distances", "envelope_distance");
    Verdict {
        pass: d.len() == 6 && decreasing(&d) && decreasing(&e),
        detail: format!(
            "H^s distances {:.3e} .. {:.3e} strictly decreasing {}, envelope distances {:.3e} .. {:.3e} strictly decreasing {}",
            d[0],
            d[5],
            decreasing(&d),
            e[0],
            e[5],
            decreasing(&e)
        ),
    }
}

fn c11(cfg: &ExperimentConfig) -> Verdict {
    let res = harness::exp_continuation(cfg).unwrap();
    let times = column(&res, "detection", "time");
    let ib = column(&res, "detection", "int_b");
    let rank = ["spearman_s2.5", "spearman_s3", "spearman_s4"]
        .iter()
        .map(|c| min(&column(&res, "detection", c)))
        .fold(f64::INFINITY, f64::min);
    let window = times.iter().all(|t| (0.9..1.0).contains(t));
    let list: Vec<String> = times.iter().map(|v| format!("{v:.4}")).collect();
    Verdict {
        pass: times.len() == 3 && window && increasing(&times) && increasing(&ib) && rank >= 0.99,
        detail: format!(
            "detection at N = 128, 256, 512: [{}] (in [0.9, 1), increasing {}), int B growing {}, min rank correlation {rank:.4} (limit 0.99)",
            list.join(", "),
            increasing(&times),
            increasing(&ib)
        ),
    }
}

fn c12(cfg: &ExperimentConfig) -> Verdict {
    let res = harness::exp_envelope_axioms(cfg).unwrap();
    let dom = column(&res, "envelopes", "dominates");
    let defect = max(&column(&res, "envelopes", "slow_variation_defect"));
    let fields = dom.len() / 2;
    Verdict {
        pass: fields == 500 && dom.iter().all(|v| *v == 1.0) && defect <= 1.0 + 1e-9,
        detail: format!(
            "{fields} fields, symmetric and asymmetric slack, dominance {}, max c_j / (2^d(j,k) c_k) = {defect:.12}",
            dom.iter().all(|v| *v == 1.0)
        ),
    }
}

type Criterion = (&'static str, fn(&ExperimentConfig) -> Verdict, Duration);

fn main() -> ExitCode {
    let cfg = ExperimentConfig::default();
    let secs = Duration::from_secs;
    let criteria: [Criterion; 12] = [
        ("paraproduct trichotomy identity", c1, secs(10)),
        ("Coifman-Meyer and commutator constants", c2, secs(30)),
        ("splitting identities", c3, secs(10)),
        ("single-step order", c4, secs(5)),
        ("convergence to the characteristics solution", c5, secs(30)),
        ("energy growth constant across amplitudes", c6, secs(60)),
        ("uniqueness constant across perturbation scales", c7, secs(60)),
        ("iteration contraction", c8, secs(60)),
        ("regularized family bounds", c9, secs(120)),
        ("continuous dependence", c10, secs(120)),
        ("continuation criterion", c11, secs(120)),
        ("envelope axioms", c12, secs(10)),
    ];
    let mut failed = 0;
    for (i, (name, check, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let v = check(&cfg);
        let elapsed = start.elapsed();
        let pass = v.pass && elapsed <= *budget;
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} {}: {} | {} | {:.2}s (budget {}s)",
            i + 1,
            name,
            if pass { "PASS" } else { "FAIL" },
            v.detail,
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
