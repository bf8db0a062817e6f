//! Acceptance suite. Each criterion runs at its stated tolerance and time
//! budget and prints one PASS/FAIL line; the process exits non-zero if any
//! criterion fails.

mod common;

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use common::*;
use cqm::closedform::{
    additive_reduced_state, gaussian_solution, multiplicative_elements, multiplicative_entropy_rate,
    multiplicative_entropy_rate_product, AdditiveObservable, MultiplicativeObservable,
};
use cqm::composite::{asymptotic_states, evolve_reduced, CompositeSystem, ReducedPair};
use cqm::eigen::hermitian_eigenvalues;
use cqm::infoexchange::{exchange_report, info_gain_matrix, isoenergetic_max_info, max_info, Regime};
use cqm::lindblad::{evolve, LindbladGenerator, MeasurementGenerator};
use cqm::matrix::{pauli, ComplexMatrix, Subsystem};
use cqm::state::{partial_trace, trace_distance, DensityMatrix, HermitianObservable, UnitaryMap};
use rand::Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

/// Random system with H_S shifted to zero trace, as both regimes require.
fn traceless_system(rng: &mut impl Rng, n: usize) -> CompositeSystem {
    let h = random_hermitian(rng, n);
    CompositeSystem::new(h, random_unitary(rng, n))
        .unwrap()
        .traceless_shifted()
        .0
}

fn efficiency() -> Outcome {
    let mut rng = rng(1001);
    let mut worst = 0.0_f64;
    let mut count = [0usize; 2];
    let mut skipped = 0;
    for n in 2..=4 {
        for (k, regime) in [Regime::Unconstrained, Regime::Isoenergetic]
            .into_iter()
            .enumerate()
        {
            let mut accepted = 0;
            while accepted < 50 {
                let sys = traceless_system(&mut rng, n);
                let rho_s = random_state(&mut rng, n);
                if rho_s.purity() <= 1.0 / n as f64 + 1e-6 {
                    continue;
                }
                let report = match exchange_report(&sys, &rho_s, regime) {
                    Ok(r) => r,
                    Err(cqm::Error::Infeasible { .. }) => {
                        skipped += 1;
                        continue;
                    }
                    Err(e) => return outcome(false, format!("error: {e}")),
                };
                accepted += 1;
                worst = worst.max(report.eta.map_or(f64::INFINITY, |eta| (eta - 0.6).abs()));
            }
            count[k] += accepted;
        }
    }
    outcome(
        worst < 1e-9,
        format!(
            "max |eta - 0.6| = {worst:.2e} over {} + {} senders ({skipped} infeasible draws redrawn)",
            count[0], count[1]
        ),
    )
}

fn global_bound() -> Outcome {
    let mut rng = rng(1002);
    let mut worst = 0.0_f64;
    for n in 2..=6 {
        let sys = CompositeSystem::new(random_hermitian(&mut rng, n), random_unitary(&mut rng, n)).unwrap();
        for _ in 0..10 {
            let pure = random_pure(&mut rng, n);
            let bound = (1.0 - 1.0 / n as f64) / 3.0;
            worst = worst.max((max_info(&sys, &pure).unwrap() - bound).abs());
        }
    }
    let sys = CompositeSystem::new(HermitianObservable::zero(2), UnitaryMap::identity(2)).unwrap();
    let qubit = max_info(&sys, &DensityMatrix::basis_state(2, 0).unwrap()).unwrap();
    let dev = (qubit - 1.0 / 6.0).abs();
    outcome(
        worst < 1e-12 && dev < 1e-12,
        format!("max deviation {worst:.2e}; N=2 value {qubit:.15}"),
    )
}

fn qubit_law() -> Outcome {
    let mut rng = rng(1003);
    let mut worst = 0.0_f64;
    for _ in 0..100 {
        let delta = rng.gen_range(0.1..3.0);
        let h = HermitianObservable::new(pauli::z().scale_real(delta)).unwrap();
        let sys = CompositeSystem::new(h, UnitaryMap::identity(2)).unwrap();
        let rho_s = random_state(&mut rng, 2);
        let c = rho_s.matrix()[(0, 1)].norm_sqr();
        let di = isoenergetic_max_info(&sys, &rho_s).unwrap();
        worst = worst.max((di - 2.0 / 3.0 * c).abs());
    }
    outcome(
        worst < 1e-12,
        format!("max |dI - (2/3)|c|^2| = {worst:.2e} over 100 senders"),
    )
}

fn duality() -> Outcome {
    let mut rng = rng(1004);
    let mut worst = 0.0_f64;
    for n in [2, 3] {
        for _ in 0..25 {
            let sys =
                CompositeSystem::new(random_hermitian(&mut rng, n), random_unitary(&mut rng, n)).unwrap();
            let pair = ReducedPair::new(random_state(&mut rng, n), random_state(&mut rng, n)).unwrap();
            let limit = asymptotic_states(&sys, &pair).unwrap();
            let traj = evolve_reduced(&sys, &pair, 20.0, 1e-3).unwrap();
            let end = &traj.last().unwrap().pair;
            worst = worst
                .max(end.rho_r.matrix().max_abs_diff(limit.rho_r.matrix()))
                .max(end.rho_s.matrix().max_abs_diff(limit.rho_s.matrix()));
        }
    }
    outcome(
        worst < 1e-6,
        format!("max entrywise gap at t=20: {worst:.2e} over 50 instances"),
    )
}

fn monotonicity() -> Outcome {
    let mut rng = rng(1005);
    let mut worst = f64::NEG_INFINITY;
    for k in 0..100 {
        let n = 2 + k % 3;
        let gen = MeasurementGenerator::new(random_hermitian(&mut rng, n), 1.0).unwrap();
        let traj = evolve(&gen, &random_state(&mut rng, n), 5.0, 1e-3).unwrap();
        let s: Vec<f64> = traj.samples().iter().map(|x| x.linear_entropy).collect();
        for w in s.windows(2) {
            worst = worst.max(w[0] - w[1]);
        }
    }
    outcome(
        worst <= 1e-8,
        format!("largest per-step decrease {worst:.2e} over 100 trajectories (t=5, dt=1e-3)"),
    )
}

fn attractor() -> Outcome {
    let mut rng = rng(1006);
    let gen = LindbladGenerator::two_level_decay(1.0).unwrap();
    let ground = DensityMatrix::basis_state(2, 0).unwrap();
    let (mut dist, mut s_lin) = (0.0_f64, 0.0_f64);
    for _ in 0..100 {
        let traj = evolve(&gen, &random_state(&mut rng, 2), 20.0, 1e-3).unwrap();
        let last = traj.last().unwrap();
        dist = dist.max(trace_distance(&last.state, &ground).unwrap());
        s_lin = s_lin.max(last.linear_entropy);
    }
    outcome(
        dist < 1e-6 && s_lin < 1e-10,
        format!("max trace distance {dist:.2e} (limit 1e-6), max S_lin {s_lin:.2e} (limit 1e-10)"),
    )
}

fn dephasing_oracles() -> Outcome {
    let mut rng = rng(1007);
    let rk4 = |o: &HermitianObservable, rho: &DensityMatrix| {
        let gen = MeasurementGenerator::new(o.clone(), 1.0).unwrap();
        evolve(&gen, rho, 1.0, 1e-3)
            .unwrap()
            .last()
            .unwrap()
            .state
            .clone()
    };
    let (mut g, mut a, mut m, mut forms, mut min_rate) = (0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64, f64::INFINITY);
    for _ in 0..25 {
        let o = random_hermitian(&mut rng, 4);
        let rho = random_state(&mut rng, 4);
        g = g.max(
            gaussian_solution(&o, &rho, 1.0)
                .unwrap()
                .matrix()
                .max_abs_diff(rk4(&o, &rho).matrix()),
        );

        let add = AdditiveObservable::new(random_hermitian(&mut rng, 2), random_hermitian(&mut rng, 2));
        let rho_r = random_state(&mut rng, 2);
        let rho_c = rho_r.tensor(&random_state(&mut rng, 2));
        let numeric = partial_trace(&rk4(&add.composite(), &rho_c), Subsystem::R, (2, 2)).unwrap();
        a = a.max(
            additive_reduced_state(&add, &rho_r, 1.0)
                .unwrap()
                .matrix()
                .max_abs_diff(numeric.matrix()),
        );

        let mul = MultiplicativeObservable::new(random_hermitian(&mut rng, 2), random_hermitian(&mut rng, 2));
        let rho_c = random_state(&mut rng, 4);
        m = m.max(
            multiplicative_elements(&mul, &rho_c, 1.0)
                .unwrap()
                .matrix()
                .max_abs_diff(rk4(&mul.composite(), &rho_c).matrix()),
        );

        let (r, s) = (random_state(&mut rng, 2), random_state(&mut rng, 2));
        for t in [0.0, 0.5, 1.0, 3.0] {
            let general = multiplicative_entropy_rate(&mul, &r.tensor(&s), t).unwrap();
            let product = multiplicative_entropy_rate_product(&mul, &r, &s, t).unwrap();
            forms = forms.max((general - product).abs());
            min_rate = min_rate.min(product);
        }
    }
    outcome(
        g < 1e-6 && a < 1e-6 && m < 1e-6 && forms < 1e-12 && min_rate >= -1e-12,
        format!(
            "gaussian {g:.2e}, additive {a:.2e}, multiplicative {m:.2e}; rate forms {forms:.2e}, min rate {min_rate:.2e}"
        ),
    )
}

/// Least-squares slope of y against x.
fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

fn energy_relaxation() -> Outcome {
    let mut rng = rng(1008);
    let (mut drift, mut worst_rate_err, mut rate_seen) = (0.0_f64, 0.0_f64, 0.0);
    for n in [2, 3, 4] {
        for _ in 0..3 {
            let sys =
                CompositeSystem::new(random_hermitian(&mut rng, n), random_unitary(&mut rng, n)).unwrap();
            let pair = ReducedPair::new(random_pure(&mut rng, n), random_state(&mut rng, n)).unwrap();
            let traj = evolve_reduced(&sys, &pair, 20.0, 1e-3).unwrap();
            let samples = traj.samples();
            let e0 = samples[0].e_r + samples[0].e_s;
            for s in samples {
                drift = drift.max((s.e_r + s.e_s - e0).abs());
            }
            let gap0 = (samples[0].e_r - samples[0].e_s).abs();
            // fit only where the gap is well above rounding
            let (x, y): (Vec<f64>, Vec<f64>) = samples
                .iter()
                .filter(|s| (s.e_r - s.e_s).abs() > 1e-8 * gap0.max(1e-300))
                .map(|s| (s.t, (s.e_r - s.e_s).abs().ln()))
                .unzip();
            let rate = -slope(&x, &y);
            if (rate - 2.0).abs() > worst_rate_err {
                worst_rate_err = (rate - 2.0).abs();
                rate_seen = rate;
            }
        }
    }
    outcome(
        drift < 1e-9 && worst_rate_err <= 0.01,
        format!("max energy drift {drift:.2e}; worst fitted exponent {rate_seen:.6} over 9 instances"),
    )
}

/// Random Hermitian direction with tr δ = 0, and tr(δH) = 0 when `h` is given.
fn feasible_direction(rng: &mut impl Rng, n: usize, h: Option<&ComplexMatrix>) -> ComplexMatrix {
    let d = random_hermitian(rng, n).matrix().clone();
    let d = d.add_scaled(&ComplexMatrix::identity(n), -d.trace().re / n as f64);
    let d = match h {
        None => d,
        Some(h) => d.add_scaled(h, -d.trace_product(h).re / h.trace_product(h).re),
    };
    d.scale_real(1.0 / d.max_abs())
}

fn optimality() -> Outcome {
    let mut rng = rng(1009);
    let mut best_gain = f64::NEG_INFINITY;
    let mut tried = 0usize;
    for regime in [Regime::Unconstrained, Regime::Isoenergetic] {
        let mut senders = 0;
        while senders < 20 {
            let n = 2 + senders % 3;
            let sys = traceless_system(&mut rng, n);
            let rho_s = random_state(&mut rng, n);
            let Ok(report) = exchange_report(&sys, &rho_s, regime) else {
                continue;
            };
            senders += 1;
            let opt = report.optimal_rho_r0.matrix();
            let base = info_gain_matrix(&sys, opt, &rho_s);
            let h = (regime == Regime::Isoenergetic).then(|| sys.h_r().matrix());
            for _ in 0..200 {
                let d = feasible_direction(&mut rng, n, h);
                let mut eps = 1e-2;
                // shrink until the perturbed matrix is still a state
                while hermitian_eigenvalues(&opt.add_scaled(&d, eps)).unwrap()[0] < 0.0 && eps > 1e-12 {
                    eps /= 2.0;
                }
                for e in [eps, -eps] {
                    let moved = opt.add_scaled(&d, e);
                    if hermitian_eigenvalues(&moved).unwrap()[0] < 0.0 {
                        continue;
                    }
                    tried += 1;
                    best_gain = best_gain.max(info_gain_matrix(&sys, &moved, &rho_s) - base);
                }
            }
        }
    }
    outcome(
        best_gain <= 1e-9,
        format!("largest improvement {best_gain:.2e} over {tried} feasible perturbations"),
    )
}

fn cli_determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("optimal.toml");
    std::fs::write(
        &cfg,
        "scenario = \"optimal\"\nn = 2\n[matrices]\nrho_s0 = [[[1, 0], [0, 0]], [[0, 0], [0, 0]]]\n",
    )
    .unwrap();
    let mut runs = Vec::new();
    for k in 0..2 {
        let out_dir = dir.path().join(format!("run{k}"));
        let status = Command::new(env!("CARGO_BIN_EXE_cqm"))
            .args([
                "run",
                cfg.to_str().unwrap(),
                "--out-dir",
                out_dir.to_str().unwrap(),
            ])
            .output()
            .unwrap()
            .status;
        if !status.success() {
            return outcome(false, format!("run {k} exited with {status}"));
        }
        runs.push((
            std::fs::read(out_dir.join("optimal.csv")).unwrap(),
            std::fs::read(out_dir.join("optimal.report.json")).unwrap(),
        ));
    }
    let identical = runs[0] == runs[1];
    let report: serde_json::Value = serde_json::from_slice(&runs[0].1).unwrap();
    let di = report["quantities"]["delta_i"].as_f64().unwrap_or(f64::NAN);
    let eta = report["quantities"]["eta"].as_f64().unwrap_or(f64::NAN);
    let digits =
        format!("{di:.12}") == format!("{:.12}", 1.0 / 6.0) && format!("{eta:.12}") == format!("{:.12}", 0.6);
    outcome(
        identical && digits,
        format!("byte-identical: {identical}; delta_i = {di:.12}, eta = {eta:.12}"),
    )
}

/// Name, time budget in seconds, check.
type Criterion = (&'static str, f64, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("efficiency constant", 5.0, efficiency),
        ("global information bound", 1.0, global_bound),
        ("qubit isoenergetic law", 1.0, qubit_law),
        ("closed-form/ODE duality", 30.0, duality),
        ("entropy monotonicity", 60.0, monotonicity),
        ("recoherence attractor", 30.0, attractor),
        ("dephasing oracles", 60.0, dephasing_oracles),
        ("energy conservation and relaxation", 10.0, energy_relaxation),
        ("optimality by perturbation", 60.0, optimality),
        ("CLI determinism", 5.0, cli_determinism),
    ];
    let mut failed = Vec::new();
    for (k, (name, budget, run)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let out = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs_f64(budget);
        let pass = out.pass && in_time;
        println!(
            "criterion {:>2} {:<36} {}  [{:.2}s / {budget}s] {}",
            k + 1,
            name,
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            out.detail,
        );
        if !pass {
            failed.push(k + 1);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 10 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failed:?}");
        ExitCode::FAILURE
    }
}
