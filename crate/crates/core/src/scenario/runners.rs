//! One function per registered scenario. Composite scenarios integrate in
//! dimensionless time τ = γt and report physical time in the table.

use super::config::ScenarioConfig;
use super::{RunError, RunReport};
use crate::closedform::{
    additive_reduced_state, gaussian_solution, multiplicative_elements, multiplicative_entropy_rate,
    multiplicative_entropy_rate_of, multiplicative_entropy_rate_product, AdditiveObservable,
    MultiplicativeObservable,
};
use crate::composite::{
    asymptotic_states, evolve_reduced, swap_operator, CompositeSystem, PairedTrajectory, ReducedPair,
};
use crate::infoexchange::{
    energy_flow, exchange_report, info_gain, optimal_receiver_state, sender_entropy_change, Regime, ETA_FLOOR,
};
use crate::lindblad::{entropy_rate, evolve, LindbladGenerator, MeasurementGenerator};
use crate::matrix::{pauli, tensor_product, ComplexMatrix, Subsystem, C64};
use crate::state::{
    linear_entropy, partial_trace, trace_distance, DensityMatrix, HermitianObservable, UnitaryMap,
};
use crate::trajectory::{CsvTable, Trajectory};

/// Asymptotic comparisons are only meaningful once e^{−2τ} is negligible.
const ASYMPTOTIC_HORIZON: f64 = 15.0;
/// Residual probes per run; every sample is integrated, a subset is compared.
const PROBES: usize = 500;
/// Below this distance from its limit, S_R may stall in floating point.
const RESOLVABLE_GAP: f64 = 1e-12;

fn probe_indices(len: usize) -> impl Iterator<Item = usize> {
    let stride = ((len.saturating_sub(1)) / PROBES).max(1);
    (0..len).step_by(stride).chain(std::iter::once(len - 1))
}

/// Five-point central difference of `f` on a uniform grid, compared with
/// `rate(k)` at probed interior points. The short closing step is skipped.
fn fd_residual(f: &[f64], h: f64, mut rate: impl FnMut(usize) -> crate::Result<f64>) -> crate::Result<f64> {
    let mut worst = 0.0_f64;
    if f.len() < 6 {
        return Ok(worst);
    }
    for k in probe_indices(f.len()).filter(|&k| k >= 2 && k + 3 < f.len()) {
        let fd = (-f[k + 2] + 8.0 * f[k + 1] - 8.0 * f[k - 1] + f[k - 2]) / (12.0 * h);
        worst = worst.max((fd - rate(k)?).abs());
    }
    Ok(worst)
}

pub(super) fn attractor(cfg: &ScenarioConfig, report: &mut RunReport) -> Result<CsvTable, RunError> {
    let rho0 = cfg
        .state("rho0")
        .cloned()
        .unwrap_or_else(|| DensityMatrix::maximally_mixed(2));
    let gen = LindbladGenerator::two_level_decay(cfg.gamma)?;
    let traj = evolve(&gen, &rho0, cfg.t_final, cfg.dt)?;
    let samples = traj.samples();

    // ρ_ee decays as e^{−γt}, the coherence as e^{−γt/2}.
    let (p_e, c) = (rho0.matrix()[(1, 1)].re, rho0.matrix()[(0, 1)]);
    let exact = |t: f64| {
        let e = (-cfg.gamma * t).exp();
        let coh = c * (-cfg.gamma * t / 2.0).exp();
        ComplexMatrix::from_rows(&[
            vec![C64::new(1.0 - p_e * e, 0.0), coh],
            vec![coh.conj(), C64::new(p_e * e, 0.0)],
        ])
        .expect("2x2")
    };
    let closed = probe_indices(samples.len())
        .map(|k| samples[k].state.matrix().max_abs_diff(&exact(samples[k].t)))
        .fold(0.0, f64::max);
    report.residual("amplitude_damping_closed_form", closed);

    let s_lin: Vec<f64> = samples.iter().map(|s| s.linear_entropy).collect();
    let fd = fd_residual(&s_lin, cfg.dt, |k| entropy_rate(&gen, &samples[k].state))?;
    report.residual("entropy_rate_fd", fd);

    let last = traj.last().expect("non-empty trajectory");
    let ground = DensityMatrix::basis_state(2, 0)?;
    let distance = trace_distance(&last.state, &ground)?;
    report.quantity("trace_distance_ground_final", distance);
    report.quantity("purity_final", last.purity);
    report.quantity("s_lin_final", last.linear_entropy);
    report.quantity("s_vn_final", last.von_neumann_entropy);

    let peak = s_lin
        .iter()
        .enumerate()
        .fold(0, |best, (k, &s)| if s > s_lin[best] { k } else { best });
    let monotone = s_lin[peak..].windows(2).all(|w| w[1] <= w[0] + 1e-15);
    report.check("s_lin_monotone_after_transient", monotone);
    // ½‖ρ − |g⟩⟨g|‖₁ for the exact state.
    let last_exact = exact(last.t);
    let (x, coh) = (last_exact[(1, 1)].re, last_exact[(0, 1)].norm());
    report.residual(
        "trace_distance_closed_form",
        (distance - (x * x + coh * coh).sqrt()).abs(),
    );
    Ok(traj.to_table())
}

fn composite_system(cfg: &ScenarioConfig) -> Result<CompositeSystem, RunError> {
    let n = cfg.n;
    let h_r = cfg
        .observable("h_r")
        .cloned()
        .unwrap_or_else(|| HermitianObservable::zero(n));
    let u = cfg
        .unitary("u")
        .cloned()
        .unwrap_or_else(|| UnitaryMap::identity(n));
    Ok(match cfg.observable("h_s") {
        Some(h_s) => CompositeSystem::with_hamiltonians(h_r, h_s.clone(), u)?,
        None => CompositeSystem::new(h_r, u)?,
    })
}

/// Exact reduced pair at dimensionless time τ: with a = (1 + e^{−2τ})/2,
/// ρ_R = aρ_R(0) + (1 − a)U†ρ_S(0)U and symmetrically for ρ_S.
fn exact_pair(sys: &CompositeSystem, pair0: &ReducedPair, tau: f64) -> (ComplexMatrix, ComplexMatrix) {
    let a = 0.5 * (1.0 + (-2.0 * tau).exp());
    let u = sys.u().matrix();
    let r = pair0
        .rho_r
        .matrix()
        .scale_real(a)
        .add_scaled(&pair0.rho_s.matrix().conjugate_by(&u.dagger()), 1.0 - a);
    let s = pair0
        .rho_s
        .matrix()
        .scale_real(a)
        .add_scaled(&pair0.rho_r.matrix().conjugate_by(u), 1.0 - a);
    (r, s)
}

/// Integrates the reduced pair and records every closed-form residual.
fn run_pair(
    cfg: &ScenarioConfig,
    sys: &CompositeSystem,
    pair0: &ReducedPair,
    report: &mut RunReport,
) -> Result<PairedTrajectory, RunError> {
    let g = cfg.gamma;
    let traj = evolve_reduced(sys, pair0, g * cfg.t_final, g * cfg.dt)?;
    let samples = traj.samples();
    let first = traj.first().expect("non-empty trajectory");
    let last = traj.last().expect("non-empty trajectory");

    let mut closed = 0.0_f64;
    for k in probe_indices(samples.len()) {
        let s = &samples[k];
        let (r, q) = exact_pair(sys, pair0, s.t);
        closed = closed
            .max(s.pair.rho_r.matrix().max_abs_diff(&r))
            .max(s.pair.rho_s.matrix().max_abs_diff(&q));
    }
    report.residual("reduced_closed_form", closed);

    let (mut flow, mut drift) = (0.0_f64, 0.0_f64);
    let total0 = first.e_r + first.e_s;
    for s in samples {
        let (e_r, e_s) = energy_flow(first.e_r, first.e_s, s.t)?;
        flow = flow.max((e_r - s.e_r).abs()).max((e_s - s.e_s).abs());
        drift = drift.max((s.e_r + s.e_s - total0).abs());
    }
    report.residual("energy_flow", flow);
    report.residual("energy_conservation", drift);

    let delta_i = info_gain(sys, pair0)?;
    let delta_s = sender_entropy_change(sys, pair0)?;
    report.quantity("delta_i", delta_i);
    report.quantity("delta_s", delta_s);
    if delta_s > ETA_FLOOR {
        report.quantity("eta", delta_i / delta_s);
    }
    report.quantity("e_r0", first.e_r);
    report.quantity("e_s0", first.e_s);
    report.quantity("e_r_final", last.e_r);
    report.quantity("e_s_final", last.e_s);
    report.quantity("purity_r_final", 1.0 - last.s_r);
    report.quantity("purity_s_final", 1.0 - last.s_s);

    if g * cfg.t_final >= ASYMPTOTIC_HORIZON {
        let inf = asymptotic_states(sys, pair0)?;
        report.residual(
            "asymptotic_states",
            last.pair
                .rho_r
                .matrix()
                .max_abs_diff(inf.rho_r.matrix())
                .max(last.pair.rho_s.matrix().max_abs_diff(inf.rho_s.matrix())),
        );
        report.residual("delta_i", (delta_i - (first.s_r - last.s_r)).abs());
        report.residual("delta_s", (delta_s - (last.s_s - first.s_s)).abs());
    }
    Ok(traj)
}

fn pair_table(traj: &PairedTrajectory, gamma: f64) -> CsvTable {
    let mut table = traj.to_table();
    for row in &mut table.rows {
        row[0] /= gamma;
    }
    table
}

pub(super) fn swap_exchange(cfg: &ScenarioConfig, report: &mut RunReport) -> Result<CsvTable, RunError> {
    let sys = composite_system(cfg)?;
    let pair0 = ReducedPair::new(
        cfg.state("rho_r0").expect("required").clone(),
        cfg.state("rho_s0").expect("required").clone(),
    )?;
    let traj = run_pair(cfg, &sys, &pair0, report)?;
    Ok(pair_table(&traj, cfg.gamma))
}

pub(super) fn optimal(cfg: &ScenarioConfig, report: &mut RunReport) -> Result<CsvTable, RunError> {
    let sys = composite_system(cfg)?;
    let rho_s0 = cfg.state("rho_s0").expect("required");
    let exchange = exchange_report(&sys, rho_s0, Regime::Unconstrained)?;
    let pair0 = ReducedPair::new(exchange.optimal_rho_r0.clone(), rho_s0.clone())?;
    let traj = run_pair(cfg, &sys, &pair0, report)?;
    report.residual(
        "max_info",
        (exchange.delta_i - report.quantities["delta_i"]).abs(),
    );
    report.residual(
        "sender_entropy_increment",
        (exchange.delta_s - report.quantities["delta_s"]).abs(),
    );
    report.exchange = Some(exchange.to_record());
    Ok(pair_table(&traj, cfg.gamma))
}

pub(super) fn isoenergetic(cfg: &ScenarioConfig, report: &mut RunReport) -> Result<CsvTable, RunError> {
    let sys = composite_system(cfg)?;
    let rho_s0 = cfg.state("rho_s0").expect("required");
    let exchange = exchange_report(&sys, rho_s0, Regime::Isoenergetic)?;
    let (shifted, _) = sys.traceless_shifted();
    let pair0 = ReducedPair::new(exchange.optimal_rho_r0.clone(), rho_s0.clone())?;
    let traj = run_pair(cfg, &shifted, &pair0, report)?;
    report.residual(
        "isoenergetic_max_info",
        (exchange.delta_i - report.quantities["delta_i"]).abs(),
    );
    report.residual(
        "isoenergetic_entropy_increment",
        (exchange.delta_s - report.quantities["delta_s"]).abs(),
    );
    report.residual(
        "isoenergetic_energy_gap",
        (report.quantities["e_r0"] - report.quantities["e_s0"]).abs(),
    );
    if cfg.n == 2 {
        // For a qubit the gain is (2/3)|c|², c the coherence of ρ_S in the
        // H_S eigenbasis, whenever H_S is non-degenerate.
        let eig = shifted.h_s().eigen();
        if (eig.values[1] - eig.values[0]).abs() > 1e-12 {
            let c = eig.to_eigenbasis(rho_s0.matrix())[(0, 1)];
            report.residual("qubit_law", (exchange.delta_i - 2.0 / 3.0 * c.norm_sqr()).abs());
        }
    }
    report.exchange = Some(exchange.to_record());
    Ok(pair_table(&traj, cfg.gamma))
}

struct Dephasing {
    rho_r0: DensityMatrix,
    rho_s0: DensityMatrix,
    rho_c0: DensityMatrix,
    dims: (usize, usize),
}

fn dephasing_inputs(cfg: &ScenarioConfig) -> (HermitianObservable, HermitianObservable, Dephasing) {
    let a_r = cfg.observable("a_r").expect("required").clone();
    let b_s = cfg.observable("b_s").expect("required").clone();
    let rho_r0 = cfg.state("rho_r0").expect("required").clone();
    let rho_s0 = cfg.state("rho_s0").expect("required").clone();
    let rho_c0 = rho_r0.tensor(&rho_s0);
    let dims = (a_r.dim(), b_s.dim());
    (
        a_r,
        b_s,
        Dephasing {
            rho_r0,
            rho_s0,
            rho_c0,
            dims,
        },
    )
}

/// Reduced (R, S) states at every sample.
type ReducedStates = Vec<(DensityMatrix, DensityMatrix)>;

/// Full-space integration under measurement of `o_c` at rate γ, with the
/// reduced linear entropies appended as `S_R`, `S_S`.
fn dephasing_run(
    cfg: &ScenarioConfig,
    o_c: &HermitianObservable,
    d: &Dephasing,
    report: &mut RunReport,
) -> Result<(Trajectory, ReducedStates, CsvTable), RunError> {
    let gen = MeasurementGenerator::new(o_c.clone(), cfg.gamma)?;
    let traj = evolve(&gen, &d.rho_c0, cfg.t_final, cfg.dt)?;
    let mut reduced = Vec::with_capacity(traj.len());
    for s in traj.samples() {
        reduced.push((
            partial_trace(&s.state, Subsystem::R, d.dims)?,
            partial_trace(&s.state, Subsystem::S, d.dims)?,
        ));
    }

    let mut gauss = 0.0_f64;
    for k in probe_indices(traj.len()) {
        let s = &traj.samples()[k];
        let exact = gaussian_solution(o_c, &d.rho_c0, cfg.gamma * s.t)?;
        gauss = gauss.max(s.state.matrix().max_abs_diff(exact.matrix()));
    }
    report.residual("gaussian_solution", gauss);

    let base = traj.to_table();
    let mut header: Vec<&str> = base.header.iter().map(String::as_str).collect();
    header.extend(["S_R", "S_S"]);
    let mut table = CsvTable::new(&header);
    for (row, (r, s)) in base.rows.iter().zip(&reduced) {
        let mut row = row.clone();
        row.extend([linear_entropy(r), linear_entropy(s)]);
        table.push_row(row);
    }

    let last = traj.last().expect("non-empty trajectory");
    let (r, s) = reduced.last().expect("non-empty trajectory");
    report.quantity("purity_c_final", last.purity);
    report.quantity("purity_r_final", r.purity());
    report.quantity("purity_s_final", s.purity());
    report.quantity("s_r0", linear_entropy(&d.rho_r0));
    report.quantity("s_s0", linear_entropy(&d.rho_s0));
    Ok((traj, reduced, table))
}

pub(super) fn additive(cfg: &ScenarioConfig, report: &mut RunReport) -> Result<CsvTable, RunError> {
    let (a_r, b_s, d) = dephasing_inputs(cfg);
    let obs = AdditiveObservable::new(a_r.clone(), b_s.clone());
    let mirrored = AdditiveObservable::new(b_s, a_r);
    let (traj, reduced, table) = dephasing_run(cfg, &obs.composite(), &d, report)?;

    let (mut res_r, mut res_s) = (0.0_f64, 0.0_f64);
    for k in probe_indices(traj.len()) {
        let tau = cfg.gamma * traj.samples()[k].t;
        let (r, s) = &reduced[k];
        res_r = res_r.max(
            r.matrix()
                .max_abs_diff(additive_reduced_state(&obs, &d.rho_r0, tau)?.matrix()),
        );
        res_s = res_s.max(
            s.matrix()
                .max_abs_diff(additive_reduced_state(&mirrored, &d.rho_s0, tau)?.matrix()),
        );
    }
    report.residual("additive_reduced_r", res_r);
    report.residual("additive_reduced_s", res_s);
    Ok(table)
}

pub(super) fn multiplicative(cfg: &ScenarioConfig, report: &mut RunReport) -> Result<CsvTable, RunError> {
    let (a_r, b_s, d) = dephasing_inputs(cfg);
    let obs = MultiplicativeObservable::new(a_r, b_s);
    let (traj, reduced, table) = dephasing_run(cfg, &obs.composite(), &d, report)?;
    let samples = traj.samples();
    let g = cfg.gamma;

    let (mut elements, mut forms, mut min_rate) = (0.0_f64, 0.0_f64, f64::INFINITY);
    for k in probe_indices(samples.len()) {
        let tau = g * samples[k].t;
        let exact = multiplicative_elements(&obs, &d.rho_c0, tau)?;
        elements = elements.max(samples[k].state.matrix().max_abs_diff(exact.matrix()));
        let general = multiplicative_entropy_rate(&obs, &d.rho_c0, tau)?;
        let product = multiplicative_entropy_rate_product(&obs, &d.rho_r0, &d.rho_s0, tau)?;
        forms = forms.max((general - product).abs());
        min_rate = min_rate.min(general);
    }
    report.residual("multiplicative_elements", elements);
    report.residual("entropy_rate_product_form", forms);
    report.quantity("min_entropy_rate_r", min_rate);

    // dS/dt = γ · dS/dτ
    let s_r: Vec<f64> = reduced.iter().map(|(r, _)| linear_entropy(r)).collect();
    let s_s: Vec<f64> = reduced.iter().map(|(_, s)| linear_entropy(s)).collect();
    let fd_r = fd_residual(&s_r, cfg.dt, |k| {
        Ok(g * multiplicative_entropy_rate_of(&obs, &d.rho_c0, g * samples[k].t, Subsystem::R)?)
    })?;
    let fd_s = fd_residual(&s_s, cfg.dt, |k| {
        Ok(g * multiplicative_entropy_rate_of(&obs, &d.rho_c0, g * samples[k].t, Subsystem::S)?)
    })?;
    report.residual("entropy_rate_r_fd", fd_r);
    report.residual("entropy_rate_s_fd", fd_s);
    report.check("entropy_rate_r_non_negative", min_rate >= -1e-12);
    Ok(table)
}

/// s₁·s₂ = ¼ Σ_k σ_k ⊗ σ_k.
fn spin_product() -> ComplexMatrix {
    let mut acc = ComplexMatrix::zeros(4, 4);
    for s in [pauli::x(), pauli::y(), pauli::z()] {
        acc = acc.add_scaled(&tensor_product(&s, &s), 0.25);
    }
    acc
}

/// Least-squares a, b with T ≈ a·1 + b·S in the Frobenius norm, and the
/// remaining misfit.
fn linear_fit(t: &ComplexMatrix, s: &ComplexMatrix) -> (f64, f64, f64) {
    let id = ComplexMatrix::identity(t.rows());
    let g11 = id.trace().re;
    let g12 = s.trace().re;
    let g22 = s.trace_product(s).re;
    let r1 = t.trace().re;
    let r2 = s.trace_product(t).re;
    let det = g11 * g22 - g12 * g12;
    let a = (r1 * g22 - r2 * g12) / det;
    let b = (g11 * r2 - g12 * r1) / det;
    let fit = id.scale_real(a).add_scaled(s, b);
    (a, b, t.max_abs_diff(&fit))
}

pub(super) fn neutron_spin(cfg: &ScenarioConfig, report: &mut RunReport) -> Result<CsvTable, RunError> {
    let swap = swap_operator(2);
    let t = swap.matrix();
    let s_dot = spin_product();
    let id = ComplexMatrix::identity(4);
    let standard = id.add_scaled(&s_dot, 4.0).scale_real(0.5);
    let printed = id.add_scaled(&s_dot, 0.25).scale_real(0.5);
    let dev_standard = t.max_abs_diff(&standard);
    let dev_printed = t.max_abs_diff(&printed);
    report.quantity("swap_vs_half_one_plus_4s1s2", dev_standard);
    report.quantity("swap_vs_half_one_plus_s1s2_over_4", dev_printed);
    report.check("swap_equals_half_one_plus_4s1s2", dev_standard < 1e-12);
    report.check("swap_equals_half_one_plus_s1s2_over_4", dev_printed < 1e-12);
    let (a, b, misfit) = linear_fit(t, &s_dot);
    report.quantity("swap_fit_a", a);
    report.quantity("swap_fit_b", b);
    report.residual("swap_linear_fit", misfit);

    // Beam 2 is the sender, beam 1 the receiver.
    let sys = composite_system(cfg)?;
    let rho_s0 = match cfg.state("rho_s0") {
        Some(s) => s.clone(),
        None => DensityMatrix::basis_state(2, 0)?,
    };
    let rho_r0 = match cfg.state("rho_r0") {
        Some(r) => r.clone(),
        None => optimal_receiver_state(&sys, &rho_s0)?,
    };
    let pair0 = ReducedPair::new(rho_r0, rho_s0)?;
    let traj = run_pair(cfg, &sys, &pair0, report)?;

    // Measuring s₁·s₂ at rate 4γ is measuring T at rate γ, since
    // T = ½ + 2 s₁·s₂ and the double commutator is quadratic.
    let gen = MeasurementGenerator::new(HermitianObservable::new(s_dot)?, 4.0 * cfg.gamma)?;
    let full = evolve(&gen, &pair0.product_state(), cfg.t_final, cfg.dt)?;
    let mut spin = 0.0_f64;
    for k in probe_indices(full.len()) {
        let s = &full.samples()[k];
        let (r, q) = exact_pair(&sys, &pair0, cfg.gamma * s.t);
        spin = spin
            .max(
                partial_trace(&s.state, Subsystem::R, (2, 2))?
                    .matrix()
                    .max_abs_diff(&r),
            )
            .max(
                partial_trace(&s.state, Subsystem::S, (2, 2))?
                    .matrix()
                    .max_abs_diff(&q),
            );
    }
    report.residual("spin_product_measurement", spin);

    let limit = asymptotic_states(&sys, &pair0)?;
    let s_inf = linear_entropy(&limit.rho_r);
    let s_r: Vec<f64> = traj.samples().iter().map(|s| s.s_r).collect();
    let recoheres = s_r.windows(2).all(|w| {
        if w[0] - s_inf > RESOLVABLE_GAP {
            w[1] < w[0]
        } else {
            w[1] <= w[0] + 1e-15
        }
    });
    report.check("receiver_entropy_strictly_decreasing", recoheres);
    Ok(pair_table(&traj, cfg.gamma))
}
