use spinbath::evolution::eigendecompose;
use spinbath::hamiltonian::*;
use spinbath::rng::{stream, STREAM_GUE, STREAM_STAR};
use spinbath::{AccessibleSubspace, Basis, C};

fn full(n: usize) -> Basis {
    Basis::full(n)
}

fn commutator_norm(a: &OperatorMatrix<f64>, b: &OperatorMatrix<f64>) -> f64 {
    let (a, b) = (a.to_dense(), b.to_dense());
    a.matmul(&b).sub(&b.matmul(&a)).max_abs()
}

/// `sum_nu sigma_z^(nu)` built directly from bit counts.
fn env_jz(n: usize) -> OperatorMatrix<f64> {
    let d = 1usize << (n + 1);
    let diag: Vec<C<f64>> = (0..d)
        .map(|i| {
            let up = ((i >> 1) as u64).count_ones() as f64;
            C::new(2.0 * up - n as f64, 0.0)
        })
        .collect();
    OperatorMatrix::sparse(full(n), SparseMatrix::diagonal_matrix(&diag)).unwrap()
}

#[test]
fn gue_entry_variance() {
    // dim 8 subspace: N = 7, k = 0 gives 1 + 7 states
    let sub = Basis::subspace(AccessibleSubspace::new(7, 0).unwrap());
    assert_eq!(sub.dim(), 8);
    let mut rng = stream(3, STREAM_GUE);
    let (mut diag, mut off, mut re_off, mut n_diag, mut n_off) = (0.0, 0.0, 0.0, 0usize, 0usize);
    let alpha = 0.25;
    for _ in 0..1250 {
        let h = sample_gue::<f64, _>(&sub, alpha, &mut rng).unwrap();
        assert_eq!(h.hermiticity_defect(), 0.0);
        for i in 0..8 {
            diag += h.get(i, i).norm_sqr() / (alpha * alpha);
            n_diag += 1;
            assert_eq!(h.get(i, i).im, 0.0);
            for j in i + 1..8 {
                let z = h.get(i, j) / alpha;
                off += z.norm_sqr();
                re_off += z.re * z.re;
                n_off += 1;
            }
        }
    }
    let diag = diag / n_diag as f64;
    let off = off / n_off as f64;
    let re_off = re_off / n_off as f64;
    assert!((diag - 1.0).abs() < 0.05, "diag {diag}");
    assert!((off - 1.0).abs() < 0.05, "off {off}");
    assert!((re_off - 0.5).abs() < 0.03, "re {re_off}");
}

#[test]
fn gue_semicircle_edge() {
    let sub = AccessibleSubspace::new(14, 2).unwrap();
    let d = sub.dim() as f64;
    let mut rng = stream(1, STREAM_GUE);
    let h = sample_gue::<f64, _>(&Basis::subspace(sub), 1.0, &mut rng).unwrap();
    let eig = eigendecompose(&h).unwrap();
    let radius = 2.0 * d.sqrt();
    let lo = eig.values()[0] / radius;
    let hi = eig.values()[eig.dim() - 1] / radius;
    assert!(
        (lo + 1.0).abs() < 0.05 && (hi - 1.0).abs() < 0.05,
        "edges {lo} {hi}"
    );
    // second moment of the semicircle of radius R is R^2 / 4 = d
    let m2 = eig.values().iter().map(|x| x * x).sum::<f64>() / d;
    assert!((m2 / d - 1.0).abs() < 0.05, "m2 / d {}", m2 / d);
}

#[test]
fn star_trace_norm() {
    let n = 6;
    let dim = (1usize << (n + 1)) as f64;
    let mut total = 0.0;
    let seeds = 60;
    for seed in 0..seeds {
        let mut rng = stream(seed, STREAM_STAR);
        let coeffs = StarCoefficients::sample(n, &mut rng);
        let h = star_coupling::<f64>(&full(n), &coeffs, 0.5).unwrap();
        // Tr H^2 from the sparse entries against the sum of squared coefficients
        let tr2: f64 = h
            .as_sparse()
            .unwrap()
            .entries()
            .map(|(_, _, v)| v.norm_sqr())
            .sum();
        let sum_sq: f64 = coeffs
            .blocks
            .iter()
            .flatten()
            .flatten()
            .map(|g| g * g)
            .sum();
        assert!((tr2 / dim - 0.25 * sum_sq).abs() < 1e-10 * sum_sq);
        total += tr2 / (0.25 * dim);
    }
    let mean = total / seeds as f64;
    assert!((mean / (9.0 * n as f64) - 1.0).abs() < 0.06, "mean {mean}");
}

#[test]
fn heisenberg_triangle_spectrum() {
    // sigma . sigma summed over a 3-ring: +3 on total spin 3/2, -3 on spin 1/2
    let h = ring_coupling::<f64>(&full(3), RingKind::Heisenberg, 1.0).unwrap();
    let eig = eigendecompose(&h).unwrap();
    let v = eig.values();
    assert_eq!(v.len(), 16);
    for (i, x) in v.iter().enumerate() {
        let want = if i < 8 { -3.0 } else { 3.0 };
        assert!((x - want).abs() < 1e-12, "{i}: {x}");
    }
}

#[test]
fn ring_symmetries() {
    let n = 5;
    let jz = env_jz(n);
    for kind in [RingKind::Xy, RingKind::Heisenberg, RingKind::IsingZz] {
        let h = ring_coupling::<f64>(&full(n), kind, 1.3).unwrap();
        assert!(commutator_norm(&h, &jz) < 1e-13, "{kind}");
        assert!(h.is_hermitian(1e-15));
    }
    let xx = ring_coupling::<f64>(&full(n), RingKind::IsingXx, 1.0).unwrap();
    assert!(commutator_norm(&xx, &jz) > 1.0);
    // the ring never touches the central spin
    for (i, j, _) in xx.as_sparse().unwrap().entries() {
        assert_eq!(i & 1, j & 1);
    }
    assert!(ring_coupling::<f64>(&full(2), RingKind::Xy, 1.0).is_err());
}

#[test]
fn assembled_models_are_hermitian() {
    for coupling in [
        CouplingKind::Gue,
        CouplingKind::Star,
        CouplingKind::RingStar,
    ] {
        let cfg = ModelConfig {
            n_env: 7,
            k: 2,
            coupling,
            gamma: 3.0,
            seed: 9,
            ..Default::default()
        };
        let m = assemble::<f64>(&cfg).unwrap();
        assert!(m.total.is_hermitian(1e-14), "{coupling}");
        let p = assemble_projected::<f64>(&cfg).unwrap();
        assert_eq!(p.total.dim(), 21 + 35);
        assert!(p.total.is_hermitian(1e-14));
    }
}

#[test]
fn projection_is_compression() {
    let cfg = ModelConfig {
        n_env: 6,
        coupling: CouplingKind::RingStar,
        gamma: 2.0,
        seed: 4,
        ..Default::default()
    };
    let sub = AccessibleSubspace::new(6, 2).unwrap();
    let h = assemble::<f64>(&cfg).unwrap().total;
    let p = project(&h, &sub).unwrap();
    for (a, &i) in sub.members().iter().enumerate() {
        for (b, &j) in sub.members().iter().enumerate() {
            assert_eq!(p.get(a, b), h.get(i, j));
        }
    }
    // projecting the identity gives the identity, and projecting twice changes nothing
    let id = OperatorMatrix::sparse(
        full(6),
        SparseMatrix::diagonal_matrix(&vec![C::new(1.0, 0.0); 128]),
    )
    .unwrap();
    let pid = project(&id, &sub).unwrap().to_dense();
    assert_eq!(pid.sub(&DenseMatrix::identity(sub.dim())).max_abs(), 0.0);
    let twice = project(&p, &sub).unwrap();
    assert_eq!(twice.to_dense().sub(&p.to_dense()).max_abs(), 0.0);
}

#[test]
fn global_flip_conjugation() {
    let n = 5;
    let cfg = ModelConfig {
        n_env: n,
        coupling: CouplingKind::RingStar,
        gamma: 3.0,
        seed: 2,
        delta_s: 1.001,
        ..Default::default()
    };
    let h = assemble::<f64>(&cfg).unwrap();
    // the Zeeman part changes sign, two-body terms are invariant
    let z = h.free.flip_conjugated().unwrap();
    assert_eq!(z.add(&h.free).unwrap().max_abs(), 0.0);
    // sigma_x is invariant, sigma_y and sigma_z change sign
    let sign = |p: Pauli| if p == Pauli::X { 1.0 } else { -1.0 };
    for a in Pauli::ALL {
        for b in Pauli::ALL {
            let single = StarCoefficients::single(n, 2, a, b, 1.0);
            let s = star_coupling::<f64>(&full(n), &single, 1.0).unwrap();
            let f = s.flip_conjugated().unwrap().scaled(sign(a) * sign(b));
            assert_eq!(f.to_dense().sub(&s.to_dense()).max_abs(), 0.0, "{a:?}{b:?}");
        }
    }
    let r = h.ring.as_ref().unwrap();
    assert_eq!(
        r.flip_conjugated()
            .unwrap()
            .to_dense()
            .sub(&r.to_dense())
            .max_abs(),
        0.0
    );
    let back = h
        .total
        .flip_conjugated()
        .unwrap()
        .flip_conjugated()
        .unwrap();
    assert_eq!(back.to_dense().sub(&h.total.to_dense()).max_abs(), 0.0);

    // on the subspace the flip lands on the dual subspace and agrees with the full-space image
    let p = assemble_projected::<f64>(&cfg).unwrap().total;
    let pd = p.flip_conjugated().unwrap();
    let dual = AccessibleSubspace::new(n, n - 1 - cfg.k).unwrap();
    assert_eq!(pd.dim(), dual.dim());
    let full_flipped = h.total.flip_conjugated().unwrap();
    let expect = project(&full_flipped, &dual).unwrap();
    assert!(pd.to_dense().sub(&expect.to_dense()).max_abs() < 1e-15);
}

#[test]
fn seeds_are_reproducible_and_independent() {
    let cfg = ModelConfig {
        coupling: CouplingKind::Star,
        ..Default::default()
    };
    let a = assemble::<f64>(&cfg).unwrap().total.to_dense();
    let b = assemble::<f64>(&cfg).unwrap().total.to_dense();
    assert_eq!(a.sub(&b).max_abs(), 0.0);
    let c = assemble::<f64>(&ModelConfig {
        seed: 1,
        ..cfg.clone()
    })
    .unwrap()
    .total
    .to_dense();
    assert!(a.sub(&c).max_abs() > 1e-6);
    // gamma only adds the ring: the star part is shared
    let ring = ModelConfig {
        coupling: CouplingKind::RingStar,
        gamma: 2.0,
        ..cfg
    };
    let r = assemble::<f64>(&ring).unwrap();
    let star = assemble::<f64>(&ModelConfig {
        coupling: CouplingKind::Star,
        ..ring.clone()
    })
    .unwrap();
    assert_eq!(
        r.interaction
            .to_dense()
            .sub(&star.interaction.to_dense())
            .max_abs(),
        0.0
    );
}

#[test]
fn f32_model_matches_f64() {
    let cfg = ModelConfig {
        n_env: 6,
        coupling: CouplingKind::RingStar,
        gamma: 1.0,
        ..Default::default()
    };
    let a = assemble_projected::<f64>(&cfg).unwrap().total;
    let b = assemble_projected::<f32>(&cfg).unwrap().total;
    for i in 0..a.dim() {
        for j in 0..a.dim() {
            let (x, y) = (a.get(i, j), b.get(i, j));
            assert!((x.re - y.re as f64).abs() < 1e-6 && (x.im - y.im as f64).abs() < 1e-6);
        }
    }
}
