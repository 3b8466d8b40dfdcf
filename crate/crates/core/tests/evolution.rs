use spinbath::evolution::*;
use spinbath::hamiltonian::*;
use spinbath::observables::{diagonal_ensemble_average, eigenstate_lambdas, reduce_central};
use spinbath::{AccessibleSubspace, Basis, C};

fn ring_star(n_env: usize, seed: u64) -> ModelConfig {
    ModelConfig {
        n_env,
        coupling: CouplingKind::RingStar,
        gamma: 3.0,
        seed,
        alpha: 0.05,
        ..Default::default()
    }
}

fn random_state(basis: Basis, seed: u64) -> PureState<f64> {
    // deterministic pseudo-random amplitudes
    let mut x = seed
        .wrapping_mul(6364136223846793005)
        .wrapping_add(1442695040888963407);
    let mut next = || {
        x = x
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (x >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    let amps = (0..basis.dim()).map(|_| C::new(next(), next())).collect();
    let mut s = PureState::new(basis, amps).unwrap();
    s.normalize();
    s
}

#[test]
fn krylov_matches_exact_512() {
    let cfg = ring_star(8, 5);
    let h = assemble::<f64>(&cfg).unwrap().total;
    assert_eq!(h.dim(), 512);
    let psi0 = random_state(h.basis().clone(), 1);
    let eig = eigendecompose(&h).unwrap();
    let dt = 0.7;
    let states = propagate_krylov(&h, &psi0, dt, 100, 1e-10).unwrap();
    let times: Vec<f64> = (0..=100).map(|i| i as f64 * dt).collect();
    let exact = propagate_exact(&eig, &psi0, &times).unwrap();
    let dev = states
        .iter()
        .zip(&exact)
        .map(|(a, b)| a.max_deviation(b).unwrap())
        .fold(0.0, f64::max);
    assert!(dev <= 1e-8, "deviation {dev:e}");
}

#[test]
fn krylov_energy_and_norm_over_many_steps() {
    let cfg = ring_star(6, 2);
    let h = assemble::<f64>(&cfg).unwrap().total;
    let psi0 = random_state(h.basis().clone(), 3);
    let mut prop = KrylovPropagator::new(&h, KrylovOptions::default());
    let mut psi = psi0.clone();
    let e0 = h.expectation(psi0.amplitudes());
    let mut drift = 0.0f64;
    for step in 1..=10_000 {
        prop.step(&mut psi, 0.5, step).unwrap();
        if step % 100 == 0 {
            drift = drift.max((h.expectation(psi.amplitudes()) - e0).abs());
        }
    }
    assert!(drift <= 1e-8 * e0.abs().max(1.0), "energy drift {drift:e}");
    assert!((psi.norm() - 1.0).abs() <= 1e-8);
    let stats = prop.stats();
    assert_eq!(stats.steps, 10_000);
    assert!(stats.max_error_estimate <= 1e-9);
}

#[test]
fn krylov_step_splitting() {
    // one huge step must be split into substeps and still agree with the exact answer
    let cfg = ring_star(5, 1);
    let h = assemble::<f64>(&cfg).unwrap().total;
    let psi0 = random_state(h.basis().clone(), 9);
    let mut prop = KrylovPropagator::new(&h, KrylovOptions::default());
    let mut psi = psi0.clone();
    prop.step(&mut psi, 400.0, 1).unwrap();
    assert!(prop.stats().substeps > 1);
    let eig = eigendecompose(&h).unwrap();
    let exact = ExactPropagator::new(&eig, &psi0).unwrap().state_at(400.0);
    assert!(psi.max_deviation(&exact).unwrap() < 1e-8);
}

#[test]
fn time_reversal() {
    let cfg = ring_star(6, 8);
    let h = assemble::<f64>(&cfg).unwrap().total;
    let psi0 = random_state(h.basis().clone(), 4);
    let eig = eigendecompose(&h).unwrap();
    let prop = ExactPropagator::new(&eig, &psi0).unwrap();
    let fwd = prop.state_at(37.5);
    let back = ExactPropagator::new(&eig, &fwd).unwrap().state_at(-37.5);
    assert!(back.max_deviation(&psi0).unwrap() < 1e-12);

    let mut k = KrylovPropagator::new(&h, KrylovOptions::default());
    let mut psi = psi0.clone();
    k.step(&mut psi, 37.5, 1).unwrap();
    k.step(&mut psi, -37.5, 2).unwrap();
    assert!(psi.max_deviation(&psi0).unwrap() < 1e-8);
}

#[test]
fn eigensystem_quality() {
    let cfg = ModelConfig {
        n_env: 8,
        coupling: CouplingKind::RingStar,
        gamma: 1.0,
        ..Default::default()
    };
    for h in [
        assemble::<f64>(&cfg).unwrap().total,
        assemble_projected::<f64>(&cfg).unwrap().total,
    ] {
        let eig = eigendecompose(&h).unwrap();
        assert!(eig.orthonormality_defect() < 1e-12);
        assert!(eig.reconstruction_residual(&h) < 1e-12 * eig.spectral_radius());
        assert!(eig.values().windows(2).all(|w| w[0] <= w[1]));
    }
}

#[test]
fn degenerate_spectrum_diagonal_ensemble() {
    // the Zeeman part alone is fully degenerate on the resonant subspace:
    // nothing evolves, and the infinite-time average is the initial value
    let sub = AccessibleSubspace::new(6, 2).unwrap();
    let basis = Basis::subspace(sub.clone());
    let h = zeeman_hamiltonian::<f64>(&basis, 1.0, 1.0);
    let eig = eigendecompose(&h).unwrap();
    assert_eq!(eig.degenerate_groups(eig.degeneracy_tolerance()).len(), 1);
    let cfg = ModelConfig {
        n_env: 6,
        ..Default::default()
    };
    let psi0 = make_initial_state::<f64>(&cfg, &basis).unwrap();
    let z = diagonal_ensemble_average(&eig, &psi0).unwrap();
    assert!((z - 1.0).abs() < 1e-12, "{z}");

    let lam = eigenstate_lambdas(&eig).unwrap();
    let ups = lam
        .values
        .iter()
        .filter(|v| (**v - 1.0).abs() < 1e-12)
        .count();
    let downs = lam
        .values
        .iter()
        .filter(|v| (**v + 1.0).abs() < 1e-12)
        .count();
    assert_eq!((ups, downs), (sub.upper_len(), sub.lower_len()));
}

#[test]
fn exact_trajectory_records_bloch_and_energy() {
    let cfg = ModelConfig {
        n_env: 6,
        coupling: CouplingKind::Gue,
        alpha: 0.01,
        ..Default::default()
    };
    let h = assemble::<f64>(&cfg).unwrap().total;
    let psi0 = make_initial_state::<f64>(&cfg, h.basis()).unwrap();
    let eig = eigendecompose(&h).unwrap();
    let times = time_grid::<f64>(2000.0, 300);
    let (traj, stats) = evolve(&h, &psi0, &times, Method::Exact(&eig)).unwrap();
    assert!(stats.is_none());
    assert_eq!(traj.len(), 300);
    assert_eq!(traj.bloch[0], [0.0, 0.0, 1.0]);
    traj.validate(1e-12, 1e-12, 1e-14).unwrap();
    // state at a sample time agrees with a direct reconstruction
    let direct = ExactPropagator::new(&eig, &psi0)
        .unwrap()
        .state_at(times[137]);
    let z = reduce_central(&direct).unwrap().bloch[2];
    assert!((z - traj.bloch[137][2]).abs() < 1e-13);
    // Krylov gives the same trajectory
    let opts = KrylovOptions {
        tol: 1e-12,
        ..KrylovOptions::default()
    };
    let (kt, ks) = evolve(&h, &psi0, &times, Method::Krylov(opts)).unwrap();
    assert!(ks.is_some());
    for (a, b) in traj.bloch.iter().zip(&kt.bloch) {
        assert!((a[2] - b[2]).abs() < 1e-8, "{} {}", a[2], b[2]);
    }
}

#[test]
fn flipped_state_negates_bloch() {
    let cfg = ModelConfig {
        n_env: 5,
        central_init: CentralInit::Superposition,
        coupling: CouplingKind::Star,
        ..Default::default()
    };
    let psi = random_state(Basis::full(5), 11);
    let f = psi.flipped().unwrap();
    let (a, b) = (reduce_central(&psi).unwrap(), reduce_central(&f).unwrap());
    assert!((a.bloch[0] - b.bloch[0]).abs() < 1e-15);
    assert!((a.bloch[1] + b.bloch[1]).abs() < 1e-15);
    assert!((a.bloch[2] + b.bloch[2]).abs() < 1e-15);
    let s0 = make_initial_state::<f64>(&cfg, &Basis::full(5)).unwrap();
    assert!((reduce_central(&s0).unwrap().bloch[0] - 1.0).abs() < 1e-15);
    assert!(make_initial_state::<f64>(
        &cfg,
        &Basis::subspace(AccessibleSubspace::new(5, 2).unwrap())
    )
    .is_err());
}
