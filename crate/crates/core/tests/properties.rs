//! Cross-module consistency: the quartet engine against the brute-force
//! full-space route, plus the independent matrix-exponential check of the
//! 16-dimensional evolution.

use kitaev_chain::echo::{
    loschmidt_definite_q, loschmidt_uniform, loschmidt_vacuum, momentum_dist_uniform, EchoEngine,
    InitialState,
};
use kitaev_chain::floquet::{KickSpec, KickedEngine};
use kitaev_chain::linalg::C64;
use kitaev_chain::mode::{
    apply_evolved_operator, build_mode_hamiltonian, heisenberg_beta, quartet_ops, ModeState, DIM,
};
use kitaev_chain::model::{allowed_momenta, momentum_grid, ChainSpec, Momentum};
use kitaev_chain::oracle::{EchoOracle, KickedOracle, DEFAULT_SIZE_CAP};
use ndarray::prelude::*;

fn flipped_field_pair(n: usize) -> (ChainSpec, ChainSpec) {
    let f = ChainSpec::with_unit_coupling(n, 1.0, 1.0).unwrap();
    (f, f.with_field(-1.0))
}

#[test]
fn engine_matches_oracle_at_named_points() {
    let (f, b) = flipped_field_pair(8);
    let oracle = EchoOracle::new(&f, &b).unwrap();
    for t in [0.25, 0.5, 1.0] {
        let engine = loschmidt_vacuum(&f, &b, t).unwrap();
        let exact = oracle.loschmidt(&InitialState::Vacuum, t);
        assert!(
            (engine - exact).abs() < 1e-9,
            "vacuum t={t}: {engine} vs {exact}"
        );
    }
    let q = Momentum::from_numerator(8, 1).unwrap();
    let lq = loschmidt_definite_q(&f, &b, q, 0.5).unwrap();
    let lq_exact = oracle.loschmidt(&InitialState::DefiniteMomentum(q), 0.5);
    assert!((lq - lq_exact).abs() < 1e-9);
    let lu = loschmidt_uniform(&f, &b, 0.5).unwrap();
    let lu_exact = oracle.loschmidt(&InitialState::UniformSite, 0.5);
    assert!((lu - lu_exact).abs() < 1e-9);
    let pu = momentum_dist_uniform(&f, &b, q, 0.5).unwrap();
    let pu_exact = oracle.momentum_dist(&InitialState::UniformSite, q, 0.5);
    assert!((pu - pu_exact).abs() < 1e-9);
}

#[test]
fn overlap_amplitude_reproduces_oracle_vacuum_echo() {
    // |prod_q A_q|^2 against the definitional full-space echo, with the
    // backward field flipped
    let (f, b) = flipped_field_pair(8);
    let oracle = EchoOracle::new(&f, &b).unwrap();
    let grid = momentum_grid(8).unwrap();
    for t in [0.0, 0.5, 1.7, 3.2] {
        let mut a = C64::new(1.0, 0.0);
        for quartet in &grid {
            a *= kitaev_chain::mode::overlap_amplitude(&f, &b, quartet, t).unwrap();
        }
        let exact = oracle.loschmidt(&InitialState::Vacuum, t);
        assert!((a.norm_sqr() - exact).abs() < 1e-10);
    }
}

#[test]
fn full_chain_spectrum_equals_assembled_quartet_spectra() {
    for (n, r, h) in [(8usize, 0.5, 0.7), (12, 1.0, 1.0), (12, 0.3, -0.9)] {
        let spec = ChainSpec::with_unit_coupling(n, r, h).unwrap();
        let exact = kitaev_chain::oracle::full_spectrum(&spec, DEFAULT_SIZE_CAP).unwrap();
        let grid = momentum_grid(n).unwrap();
        let halves: Vec<Array1<f64>> = grid
            .iter()
            .map(|quartet| {
                build_mode_hamiltonian(&spec, quartet)
                    .eigvals
                    .mapv(|v| 2.0 * v)
            })
            .collect();
        // Minkowski sum of the per-quartet spectra
        let mut assembled = vec![0.0f64];
        for half in &halves {
            assembled = assembled
                .iter()
                .flat_map(|&a| half.iter().map(move |&b| a + b))
                .collect();
        }
        assembled.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(assembled.len(), exact.len());
        for (got, want) in assembled.iter().zip(exact.iter()) {
            assert!((got - want).abs() < 1e-9, "N={n}: {got} vs {want}");
        }
    }
}

/// Dense scaling-and-squaring exponential, independent of the
/// eigendecomposition path it checks.
fn expm(a: &Array2<C64>) -> Array2<C64> {
    let norm: f64 = a.iter().map(|z| z.norm()).fold(0.0, f64::max) * a.nrows() as f64;
    let squarings = norm.log2().ceil().max(0.0) as u32 + 4;
    let scaled = a.mapv(|z| z / 2f64.powi(squarings as i32));
    // Taylor series on the scaled matrix
    let mut term = Array2::<C64>::eye(a.nrows());
    let mut sum = term.clone();
    for k in 1..30 {
        term = term.dot(&scaled).mapv(|z| z / k as f64);
        sum += &term;
    }
    let mut out = sum;
    for _ in 0..squarings {
        out = out.dot(&out);
    }
    out
}

#[test]
fn evolution_matches_independent_matrix_exponential() {
    let spec = ChainSpec::with_unit_coupling(32, 1.0, 1.0).unwrap();
    let quartet = momentum_grid(32).unwrap()[0]; // q = pi/32
    let h = build_mode_hamiltonian(&spec, &quartet);
    let t = 0.5;
    let generator = h.matrix.mapv(|z| C64::new(0.0, -2.0 * t) * z);
    let u = expm(&generator);
    let direct = u.dot(&ModeState::vacuum().amplitudes);
    let evolved = h.evolve_vacuum(t);
    for (a, b) in evolved.amplitudes.iter().zip(direct.iter()) {
        assert!((a - b).norm() < 1e-10);
    }
}

#[test]
fn beta_expansion_acts_correctly_on_the_vacuum() {
    // named point: r=1, h=1, q=pi/8, t=0.7
    let spec = ChainSpec::with_unit_coupling(8, 1.0, 1.0).unwrap();
    let quartet = momentum_grid(8).unwrap()[0];
    let h = build_mode_hamiltonian(&spec, &quartet);
    let t = 0.7;
    let beta = heisenberg_beta(&spec, &quartet, t).unwrap();
    let total: f64 = beta.iter().map(|b| b.norm_sqr()).sum();
    assert!((total - 1.0).abs() < 1e-12);
    let lhs = apply_evolved_operator(&ModeState::vacuum(), &h, 2, t, true).unwrap();
    let ops = quartet_ops();
    let mixed = [
        &ops.create[0],
        &ops.annihilate[1],
        &ops.create[2],
        &ops.annihilate[3],
    ];
    let mut rhs = Array1::<C64>::zeros(DIM);
    for (j, op) in mixed.iter().enumerate() {
        rhs = rhs
            + op.dot(&ModeState::vacuum().amplitudes)
                .mapv(|z| beta[j] * z);
    }
    for (a, b) in lhs.amplitudes.iter().zip(rhs.iter()) {
        assert!((a - b).norm() < 1e-9);
    }
}

#[test]
fn kicked_echo_matches_kicked_oracle() {
    let n = 8;
    let base = ChainSpec::with_unit_coupling(n, 1.0, 0.0).unwrap();
    let tau = std::f64::consts::PI / 12.0;
    let kick_f = KickSpec::new(base, tau, 1.0).unwrap();
    let kick_b = KickSpec::new(base, tau, -1.0).unwrap();
    let engine = KickedEngine::new(&kick_f, &kick_b).unwrap();
    let oracle = KickedOracle::new(&base, DEFAULT_SIZE_CAP).unwrap();
    let states = [
        InitialState::Vacuum,
        InitialState::DefiniteMomentum(Momentum::from_numerator(n, 1).unwrap()),
        InitialState::UniformSite,
    ];
    for state in &states {
        for kicks in [1usize, 2, 3, 5, 10, 25, 50] {
            let got = engine.loschmidt(state, kicks).unwrap();
            let want = oracle.loschmidt(1.0, -1.0, tau, kicks, state);
            assert!(
                (got - want).abs() < 1e-9,
                "{state} n={kicks}: {got} vs {want}"
            );
        }
    }
}

#[test]
fn dynamical_selection_rule_within_the_quartet() {
    // C(k, q) stays diagonal through the evolution, so the one-magnon
    // distribution lives entirely on k = q
    let (f, b) = flipped_field_pair(32);
    let engine = EchoEngine::new(&f, &b).unwrap();
    let q = Momentum::from_numerator(32, 1).unwrap();
    let state = InitialState::DefiniteMomentum(q);
    for k in allowed_momenta(32) {
        if k == q {
            continue;
        }
        for t in [0.3, 1.2, 7.7] {
            let p = engine.momentum_dist(&state, k, t).unwrap();
            assert!(p < 1e-10, "k={k:?} t={t}: {p}");
        }
    }
}

#[test]
fn echo_oracle_rejects_mismatched_chains() {
    let (f, _) = flipped_field_pair(8);
    let other = ChainSpec::with_unit_coupling(12, 1.0, -1.0).unwrap();
    assert!(EchoOracle::new(&f, &other).is_err());
}
