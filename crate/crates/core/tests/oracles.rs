//! Closed-form reference values checked against the numerical paths.

use approx::assert_abs_diff_eq;
use finbath::bounds::{bound_reebwolf_2014, build_kraus, goold_series};
use finbath::engine::{cycle_quantities, hot_temperature_after, SwapEngineParams};
use finbath::models::{build_spin_chain, prepare_initial, InitialCondition, SpinChainModel, SystemState};
use finbath::qdyn::{evolve, CMatrix, CompositeSpace, DensityMatrix, Propagator, C64};
use finbath::thermo::{build_trajectory, entropy_ledger_at, BathSpectrum, ThermoTrajectory};

fn qubit(gap: f64) -> BathSpectrum {
    BathSpectrum::from_diagonal(CompositeSpace::new([("B", 2)]).unwrap(), &[0.0, gap]).unwrap()
}

#[test]
fn qubit_inverse_temperature_is_analytic() {
    for gap in [0.3, 1.0, 2.5] {
        let spec = qubit(gap);
        for e in [0.01, 0.1, 0.25, 0.49] {
            let target = e * gap;
            let analytic = (gap / target - 1.0).ln() / gap;
            let solved = spec.solve_beta(target).unwrap().beta;
            assert_abs_diff_eq!(solved, analytic, epsilon = 1e-10 * analytic.abs().max(1.0));
        }
    }
}

#[test]
fn swap_on_two_qubits_exchanges_populations() {
    // ρ_S(0) = |1⟩⟨1|, bath qubit in |0⟩, H = J(σxσx + σyσy): a full swap at t = π/(4J)
    let h = build_spin_chain(&SpinChainModel::new(1, 0.0, 0.0, 0.0, 1.0)).unwrap();
    let space = h.space.clone();
    let rho0 = DensityMatrix::basis_state(space.clone(), 2).unwrap();
    let states = evolve(&rho0, &h.total().unwrap(), &[0.0, std::f64::consts::FRAC_PI_4]).unwrap();
    let after = &states[1];
    assert_abs_diff_eq!(after.matrix()[(1, 1)].re, 1.0, epsilon = 1e-12);
}

#[test]
fn resonant_exchange_with_one_bath_spin() {
    // B₀ = B, J₀ = 1: the flip-flop term swaps |01⟩ and |10⟩ with probability sin²(2t), so
    // ⟨σ_z^B⟩(t) = cos²(2t)⟨σ_z^B⟩(0) + sin²(2t)⟨σ_z^S⟩(0) and ⟨σ_z^S⟩(0) = 0 here
    let h = build_spin_chain(&SpinChainModel::new(1, 1.0, 1.0, 0.0, 1.0)).unwrap();
    let spec = h.bath_spectrum().unwrap();
    let beta0 = 0.7;
    let ic = InitialCondition { system_state: SystemState::MaximallyMixed, bath_beta0: beta0 };
    let rho0 = prepare_initial(&ic, &h.h_system, &spec).unwrap();
    let times: Vec<f64> = (0..50).map(|i| 0.05 * i as f64 + 0.01).collect();
    let states = evolve(&rho0, &h.total().unwrap(), &times).unwrap();
    let traj = build_trajectory(&states, &times, &spec, &["S"]).unwrap();
    for (i, &t) in times.iter().enumerate() {
        let expected = -(2.0 * t).cos().powi(2) * beta0.tanh();
        assert_abs_diff_eq!(traj.bath_energy()[i], expected, epsilon = 1e-12);
    }
}

#[test]
fn canonical_divergence_of_a_qubit() {
    let spec = qubit(1.0);
    let (b1, b0) = (0.4, 2.0);
    let p = |b: f64| 1.0 / (b.exp() + 1.0);
    let oracle = p(b1) * (p(b1) / p(b0)).ln() + (1.0 - p(b1)) * ((1.0 - p(b1)) / (1.0 - p(b0))).ln();
    assert_abs_diff_eq!(spec.canonical_divergence(b1, b0), oracle, epsilon = 1e-15);
}

#[test]
fn reebwolf_scalar_value() {
    let spec = qubit(1.0);
    let e0 = spec.canonical_energy(1.0);
    let traj = ThermoTrajectory::from_series(vec![0.0, 1.0], vec![e0, e0 + 0.1], vec![2f64.ln(), 0.0], &spec)
        .unwrap()
        .with_initial_beta(1.0, &spec)
        .unwrap();
    let b = bound_reebwolf_2014(&traj, 2).unwrap();
    assert_abs_diff_eq!(b.values[1].unwrap(), 0.933373687519, epsilon = 1e-12);
}

#[test]
fn kraus_operators_of_a_product_unitary() {
    // U = U_S ⊗ U_B leaves 𝔸 = 1 for any ρ_S(0) and every A_(j,k) ∝ U_B
    let space = CompositeSpace::qubits(["S", "B"]).unwrap();
    let (c, s) = (0.3f64.cos(), 0.3f64.sin());
    let us = CMatrix::from_row_slice(2, 2, &[C64::new(c, 0.0), C64::new(0.0, -s), C64::new(0.0, -s), C64::new(c, 0.0)]);
    let ub = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![C64::new(0.0, 1.0), C64::new(1.0, 0.0)]));
    let u = us.kronecker(&ub);
    let rho_s = DensityMatrix::diagonal(CompositeSpace::qubits(["S"]).unwrap(), &[0.8, 0.2]).unwrap();
    let k = build_kraus(&u, &rho_s, &space).unwrap();
    assert!(k.completeness_error() < 1e-14);
    let a = k.bath_operator();
    assert!(finbath::qdyn::max_abs(&(a - CMatrix::identity(2, 2))) < 1e-14);
}

#[test]
fn goold_series_for_decoupled_bath_is_zero() {
    let h = build_spin_chain(&SpinChainModel::new(2, 1.0, 1.0, 1.0, 0.0)).unwrap();
    let spec = h.bath_spectrum().unwrap();
    let prop = Propagator::new(&h.total().unwrap()).unwrap();
    let rho_s = DensityMatrix::basis_state(h.system_space.clone(), 0).unwrap();
    let times = [0.0, 1.0, 2.0];
    let g = goold_series(&prop, &rho_s, &spec.gibbs_state(3.0).unwrap(), &times, 3.0).unwrap();
    assert!(g.values.iter().all(|v| v.unwrap().abs() < 1e-12));
}

#[test]
fn engine_closed_forms() {
    let p = SwapEngineParams::default();
    let q = cycle_quantities(&p);
    assert_abs_diff_eq!(q.work, -0.0675, epsilon = 1e-4);
    assert_abs_diff_eq!(hot_temperature_after(&p, 100).unwrap(), 0.5, epsilon = 1e-12);
}

#[test]
fn closed_excursion_ledger() {
    // E_B returns to its initial value while the system entropy changed
    let spec = qubit(1.0);
    let e0 = spec.canonical_energy(2.0);
    let traj = ThermoTrajectory::from_series(vec![0.0, 1.0, 2.0], vec![e0, e0 + 0.05, e0], vec![0.0, 0.2, 0.4], &spec)
        .unwrap()
        .with_initial_beta(2.0, &spec)
        .unwrap();
    let l = entropy_ledger_at(&traj, &spec, 2);
    assert_abs_diff_eq!(l.sigma, 0.4, epsilon = 1e-10);
    assert_abs_diff_eq!(l.sigma_prime, 0.4, epsilon = 1e-15);
    assert!(l.divergence < 1e-14);
}
