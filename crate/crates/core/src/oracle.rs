//! Brute-force ground truth on the full `2^N` fermion Fock space.
//!
//! Everything here is computed straight from the defining expressions: the
//! quadratic Jordan-Wigner Hamiltonian is lifted to the full occupation
//! basis, eigendecomposed once per spec (split into the two total-parity
//! sectors, which the Hamiltonian never mixes), and every observable is an
//! explicit inner product of exactly evolved vectors. Chains are capped at
//! `N = 12` (4096 states) by default.

use crate::echo::InitialState;
use crate::error::{ChainError, Result};
use crate::linalg::{adjoint_matvec, eigh, matvec, vdot, C64};
use crate::model::{allowed_momenta, quadratic_form, ChainSpec, Momentum};
use ndarray::prelude::*;
use rayon::prelude::*;

pub const DEFAULT_SIZE_CAP: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    fn of(bits: u32) -> Parity {
        if bits.count_ones() % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn flipped(self) -> Parity {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }
}

/// Occupation bitmasks of one total-parity sector, with the inverse lookup.
#[derive(Debug, Clone)]
pub struct SectorBasis {
    pub n_sites: usize,
    pub parity: Parity,
    pub states: Vec<u32>,
    index_of: Vec<u32>,
}

const NO_INDEX: u32 = u32::MAX;

impl SectorBasis {
    pub fn new(n_sites: usize, parity: Parity) -> Self {
        let dim = 1usize << n_sites;
        let mut states = Vec::with_capacity(dim / 2);
        let mut index_of = vec![NO_INDEX; dim];
        for b in 0..dim as u32 {
            if Parity::of(b) == parity {
                index_of[b as usize] = states.len() as u32;
                states.push(b);
            }
        }
        Self {
            n_sites,
            parity,
            states,
            index_of,
        }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    #[inline]
    pub fn index_of(&self, state: u32) -> usize {
        let i = self.index_of[state as usize];
        debug_assert_ne!(i, NO_INDEX);
        i as usize
    }
}

/// A state vector supported on one parity sector.
#[derive(Debug, Clone)]
pub struct FullState {
    pub n_sites: usize,
    pub parity: Parity,
    pub amplitudes: Array1<C64>,
}

impl FullState {
    pub fn vacuum(n_sites: usize) -> Self {
        let basis = SectorBasis::new(n_sites, Parity::Even);
        let mut amplitudes = Array1::zeros(basis.len());
        amplitudes[basis.index_of(0)] = C64::new(1.0, 0.0);
        Self {
            n_sites,
            parity: Parity::Even,
            amplitudes,
        }
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Expand to the dense `2^N` occupation-basis vector.
    pub fn to_dense(&self) -> Array1<C64> {
        let basis = SectorBasis::new(self.n_sites, self.parity);
        let mut out = Array1::zeros(1usize << self.n_sites);
        for (i, &b) in basis.states.iter().enumerate() {
            out[b as usize] = self.amplitudes[i];
        }
        out
    }
}

/// Apply `c_j^dag` (1-based site `j`, `dagger = true`) or `c_j` with the
/// Jordan-Wigner string over sites `1..j-1`.
fn apply_site_op(state: &FullState, site: usize, dagger: bool) -> FullState {
    let n = state.n_sites;
    debug_assert!((1..=n).contains(&site));
    let bit = 1u32 << (site - 1);
    let string_mask = bit - 1;
    let from = SectorBasis::new(n, state.parity);
    let to = SectorBasis::new(n, state.parity.flipped());
    let mut amplitudes = Array1::zeros(to.len());
    for (i, &b) in from.states.iter().enumerate() {
        let occupied = b & bit != 0;
        if occupied == dagger {
            continue;
        }
        let sign = if ((b & string_mask).count_ones() & 1) == 0 {
            1.0
        } else {
            -1.0
        };
        amplitudes[to.index_of(b ^ bit)] += state.amplitudes[i] * sign;
    }
    FullState {
        n_sites: n,
        parity: state.parity.flipped(),
        amplitudes,
    }
}

/// `c_q^dag |state>` with `c_q^dag = N^{-1/2} sum_j e^{iqj} c_j^dag`.
pub fn momentum_creation(state: &FullState, q: Momentum) -> FullState {
    momentum_op(state, q, true)
}

/// `c_q |state>` with `c_q = N^{-1/2} sum_j e^{-iqj} c_j`.
pub fn momentum_annihilation(state: &FullState, q: Momentum) -> FullState {
    momentum_op(state, q, false)
}

fn momentum_op(state: &FullState, q: Momentum, dagger: bool) -> FullState {
    let n = state.n_sites;
    let k = q.value(n);
    let scale = 1.0 / (n as f64).sqrt();
    let mut out: Option<FullState> = None;
    for j in 1..=n {
        let angle = if dagger { k * j as f64 } else { -k * j as f64 };
        let phase = C64::from_polar(scale, angle);
        let term = apply_site_op(state, j, dagger);
        match &mut out {
            None => {
                let mut term = term;
                term.amplitudes.mapv_inplace(|z| z * phase);
                out = Some(term);
            }
            Some(acc) => {
                acc.amplitudes
                    .zip_mut_with(&term.amplitudes, |a, &b| *a += phase * b);
            }
        }
    }
    out.expect("chain has at least one site")
}

/// `c_1^dag |state>` (the uniformly momentum-distributed magnon source).
pub fn site_one_creation(state: &FullState) -> FullState {
    apply_site_op(state, 1, true)
}

struct SectorEig {
    eigvals: Array1<f64>,
    eigvecs: Array2<C64>,
}

impl SectorEig {
    fn phased(&self, proj: &Array1<C64>, t: f64) -> Array1<C64> {
        proj.iter()
            .zip(self.eigvals.iter())
            .map(|(z, &w)| z * C64::from_polar(1.0, -w * t))
            .collect()
    }

    fn evolve(&self, amplitudes: &Array1<C64>, t: f64) -> Array1<C64> {
        let proj = adjoint_matvec(&self.eigvecs, amplitudes);
        matvec(&self.eigvecs, &self.phased(&proj, t))
    }
}

/// Dense full-space Hamiltonian, eigendecomposed per parity sector at
/// construction so evolution at any time is phase multiplication.
pub struct FullHamiltonian {
    pub spec: ChainSpec,
    even: SectorEig,
    odd: SectorEig,
}

pub fn build_full_hamiltonian(spec: &ChainSpec) -> Result<FullHamiltonian> {
    FullHamiltonian::with_cap(spec, DEFAULT_SIZE_CAP)
}

impl FullHamiltonian {
    pub fn with_cap(spec: &ChainSpec, cap: usize) -> Result<Self> {
        if spec.n_sites > cap {
            return Err(ChainError::SizeCapExceeded {
                n: spec.n_sites,
                cap,
            });
        }
        let (even, odd) = rayon::join(
            || Self::sector(spec, Parity::Even),
            || Self::sector(spec, Parity::Odd),
        );
        Ok(Self {
            spec: *spec,
            even,
            odd,
        })
    }

    fn sector(spec: &ChainSpec, parity: Parity) -> SectorEig {
        let basis = SectorBasis::new(spec.n_sites, parity);
        let matrix = sector_matrix(spec, &basis);
        let (eigvals, eigvecs) = eigh(&matrix);
        SectorEig { eigvals, eigvecs }
    }

    fn sector_eig(&self, parity: Parity) -> &SectorEig {
        match parity {
            Parity::Even => &self.even,
            Parity::Odd => &self.odd,
        }
    }

    /// `exp(-iHt) |state>`.
    pub fn evolve(&self, state: &FullState, t: f64) -> FullState {
        let sector = self.sector_eig(state.parity);
        FullState {
            n_sites: state.n_sites,
            parity: state.parity,
            amplitudes: sector.evolve(&state.amplitudes, t),
        }
    }

    /// All `2^N` eigenvalues, ascending.
    pub fn spectrum(&self) -> Vec<f64> {
        let mut all: Vec<f64> = self
            .even
            .eigvals
            .iter()
            .chain(self.odd.eigvals.iter())
            .copied()
            .collect();
        all.sort_by(|a, b| a.partial_cmp(b).unwrap());
        all
    }

    /// Largest Hermiticity violation of the rebuilt sector matrices.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for parity in [Parity::Even, Parity::Odd] {
            let basis = SectorBasis::new(self.spec.n_sites, parity);
            let m = sector_matrix(&self.spec, &basis);
            for i in 0..m.nrows() {
                for j in 0..=i {
                    worst = worst.max((m[[i, j]] - m[[j, i]].conj()).norm());
                }
            }
        }
        worst
    }
}

/// Assemble one parity block of `H = sum A_{jl} c_j^dag c_l
/// + 1/2 sum (B_{jl} c_j^dag c_l^dag + h.c.)` in the occupation basis.
fn sector_matrix(spec: &ChainSpec, basis: &SectorBasis) -> Array2<C64> {
    let form = quadratic_form(spec);
    let dim = basis.len();
    let mut m = Array2::<C64>::zeros((dim, dim));
    let string_sign = |b: u32, site: usize| -> f64 {
        let mask = (1u32 << (site - 1)) - 1;
        if ((b & mask).count_ones() & 1) == 0 {
            1.0
        } else {
            -1.0
        }
    };
    for (col, &b) in basis.states.iter().enumerate() {
        // hopping c_j^dag c_l, sites 1-based from the 0-based form entries
        for &(j0, l0, v) in &form.hopping {
            let (j, l) = (j0 + 1, l0 + 1);
            let (bj, bl) = (1u32 << (j - 1), 1u32 << (l - 1));
            if b & bl == 0 {
                continue;
            }
            let mut sign = string_sign(b, l);
            let b1 = b ^ bl;
            if b1 & bj != 0 {
                continue;
            }
            sign *= string_sign(b1, j);
            m[[basis.index_of(b1 | bj), col]] += C64::new(v * sign, 0.0);
        }
        // pairing 1/2 (B_{jl} c_j^dag c_l^dag + B*_{jl} c_l c_j)
        for &(j0, l0, v) in &form.pairing {
            let (j, l) = (j0 + 1, l0 + 1);
            let (bj, bl) = (1u32 << (j - 1), 1u32 << (l - 1));
            if b & bl == 0 {
                let mut sign = string_sign(b, l);
                let b1 = b | bl;
                if b1 & bj == 0 {
                    sign *= string_sign(b1, j);
                    m[[basis.index_of(b1 | bj), col]] += C64::new(0.5 * v * sign, 0.0);
                }
            }
            // c_l c_j with amplitude B*_{jl}/2
            if b & bj != 0 {
                let mut sign = string_sign(b, j);
                let b1 = b ^ bj;
                if b1 & bl != 0 {
                    sign *= string_sign(b1, l);
                    m[[basis.index_of(b1 ^ bl), col]] += C64::new(0.5 * v * sign, 0.0);
                }
            }
        }
    }
    m
}

/// Eigenvalues of the full Hamiltonian only, ascending — cheaper than
/// [`build_full_hamiltonian`] when no evolution is needed (spectrum
/// identity checks at the cap size).
pub fn full_spectrum(spec: &ChainSpec, cap: usize) -> Result<Vec<f64>> {
    if spec.n_sites > cap {
        return Err(ChainError::SizeCapExceeded {
            n: spec.n_sites,
            cap,
        });
    }
    let (even, odd) = rayon::join(
        || {
            crate::linalg::eigvalsh(&sector_matrix(
                spec,
                &SectorBasis::new(spec.n_sites, Parity::Even),
            ))
        },
        || {
            crate::linalg::eigvalsh(&sector_matrix(
                spec,
                &SectorBasis::new(spec.n_sites, Parity::Odd),
            ))
        },
    );
    let mut all: Vec<f64> = even.iter().chain(odd.iter()).copied().collect();
    all.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(all)
}

/// Initial state vector for the oracle route.
pub fn oracle_initial_state(n_sites: usize, state: &InitialState) -> FullState {
    let vac = FullState::vacuum(n_sites);
    match state {
        InitialState::Vacuum => vac,
        InitialState::DefiniteMomentum(q) => momentum_creation(&vac, *q),
        InitialState::UniformSite => site_one_creation(&vac),
    }
}

/// Forward/backward pair of full Hamiltonians with the echo observables
/// computed literally from their definitions.
pub struct EchoOracle {
    pub forward: FullHamiltonian,
    pub backward: FullHamiltonian,
}

impl EchoOracle {
    pub fn new(spec_f: &ChainSpec, spec_b: &ChainSpec) -> Result<Self> {
        Self::with_cap(spec_f, spec_b, DEFAULT_SIZE_CAP)
    }

    pub fn with_cap(spec_f: &ChainSpec, spec_b: &ChainSpec, cap: usize) -> Result<Self> {
        if spec_f.n_sites != spec_b.n_sites {
            return Err(ChainError::MismatchedSpecs(format!(
                "forward chain has {} sites, backward {}",
                spec_f.n_sites, spec_b.n_sites
            )));
        }
        Ok(Self {
            forward: FullHamiltonian::with_cap(spec_f, cap)?,
            backward: FullHamiltonian::with_cap(spec_b, cap)?,
        })
    }

    /// `L(t) = |<psi(0)| e^{iH_b t} e^{-iH_f t} |psi(0)>|^2`.
    pub fn loschmidt(&self, state: &InitialState, t: f64) -> f64 {
        let psi0 = oracle_initial_state(self.forward.spec.n_sites, state);
        let f = self.forward.evolve(&psi0, t);
        let b = self.backward.evolve(&psi0, t);
        vdot(&b.amplitudes.view(), &f.amplitudes.view()).norm_sqr()
    }

    /// `P(k, t) = |<0| c_k e^{iH_b t} e^{-iH_f t} |psi(0)>|^2`.
    pub fn momentum_dist(&self, state: &InitialState, k: Momentum, t: f64) -> f64 {
        let n = self.forward.spec.n_sites;
        let psi0 = oracle_initial_state(n, state);
        let echoed = self.backward.evolve(&self.forward.evolve(&psi0, t), -t);
        if echoed.parity != Parity::Odd {
            return 0.0;
        }
        let probe = momentum_creation(&FullState::vacuum(n), k);
        vdot(&probe.amplitudes.view(), &echoed.amplitudes.view()).norm_sqr()
    }

    /// The same distribution through the Heisenberg-ordered expression
    /// `|<psi'(t)| c'_k(-t) c_q^dag(-t) |psi(t)>|^2`, kept as an oracle
    /// self-consistency route.
    pub fn momentum_dist_heisenberg_form(&self, state: &InitialState, k: Momentum, t: f64) -> f64 {
        let n = self.forward.spec.n_sites;
        let psi0 = oracle_initial_state(n, state);
        let fwd = self.forward.evolve(&psi0, t);
        let probe = self
            .backward
            .evolve(&momentum_creation(&FullState::vacuum(n), k), t);
        vdot(&probe.amplitudes.view(), &fwd.amplitudes.view()).norm_sqr()
    }

    /// `L(t)` over a grid of times, projecting the initial state onto both
    /// eigenbases once.
    pub fn loschmidt_series(&self, state: &InitialState, times: &[f64]) -> Vec<f64> {
        let psi0 = oracle_initial_state(self.forward.spec.n_sites, state);
        let sf = self.forward.sector_eig(psi0.parity);
        let sb = self.backward.sector_eig(psi0.parity);
        let pf = adjoint_matvec(&sf.eigvecs, &psi0.amplitudes);
        let pb = adjoint_matvec(&sb.eigvecs, &psi0.amplitudes);
        times
            .par_iter()
            .map(|&t| {
                let f = matvec(&sf.eigvecs, &sf.phased(&pf, t));
                let b = matvec(&sb.eigvecs, &sb.phased(&pb, t));
                vdot(&b.view(), &f.view()).norm_sqr()
            })
            .collect()
    }

    /// The full `P(k, t)` profile over every allowed momentum, one inner
    /// list per requested time. Identically zero profiles come back for
    /// even-parity (vacuum) initial states.
    pub fn momentum_profile_series(
        &self,
        state: &InitialState,
        times: &[f64],
    ) -> Vec<Vec<(Momentum, f64)>> {
        let n = self.forward.spec.n_sites;
        let momenta = allowed_momenta(n);
        let psi0 = oracle_initial_state(n, state);
        if psi0.parity == Parity::Even {
            return times
                .iter()
                .map(|_| momenta.iter().map(|&k| (k, 0.0)).collect())
                .collect();
        }
        let sf = self.forward.sector_eig(Parity::Odd);
        let sb = self.backward.sector_eig(Parity::Odd);
        let pf = adjoint_matvec(&sf.eigvecs, &psi0.amplitudes);
        let vac = FullState::vacuum(n);
        // probes in the backward eigenbasis
        let probes: Vec<Array1<C64>> = momenta
            .iter()
            .map(|&k| adjoint_matvec(&sb.eigvecs, &momentum_creation(&vac, k).amplitudes))
            .collect();
        times
            .par_iter()
            .map(|&t| {
                let fwd = matvec(&sf.eigvecs, &sf.phased(&pf, t));
                let y = adjoint_matvec(&sb.eigvecs, &fwd);
                momenta
                    .iter()
                    .zip(probes.iter())
                    .map(|(&k, probe)| {
                        // P = |probe^dag e^{+i Lambda t} y|^2
                        let amp: C64 = probe
                            .iter()
                            .zip(y.iter())
                            .zip(sb.eigvals.iter())
                            .map(|((p, z), &w)| p.conj() * z * C64::from_polar(1.0, w * t))
                            .sum();
                        (k, amp.norm_sqr())
                    })
                    .collect()
            })
            .collect()
    }
}

/// Kicked-field oracle: exact alternating exponentials
/// `(e^{-i tau H_int} e^{-i tau H_z})^n` in the full space, with the spin
/// field `H_z = h sum sigma_i^z = 2h sum n_j - hN` kept whole so phases
/// match the analytic Floquet eigenvalue conventions.
pub struct KickedOracle {
    interaction: FullHamiltonian,
    n_sites: usize,
}

impl KickedOracle {
    pub fn new(base: &ChainSpec, cap: usize) -> Result<Self> {
        let h_int_spec = ChainSpec { h: 0.0, ..*base };
        Ok(Self {
            interaction: FullHamiltonian::with_cap(&h_int_spec, cap)?,
            n_sites: base.n_sites,
        })
    }

    fn kick_once(&self, state: &FullState, h_kick: f64, tau: f64) -> FullState {
        let n = self.n_sites as f64;
        let basis = SectorBasis::new(self.n_sites, state.parity);
        let mut amplitudes = state.amplitudes.clone();
        for (i, &b) in basis.states.iter().enumerate() {
            let count = b.count_ones() as f64;
            amplitudes[i] *= C64::from_polar(1.0, -tau * (2.0 * h_kick * count - h_kick * n));
        }
        let phased = FullState {
            n_sites: state.n_sites,
            parity: state.parity,
            amplitudes,
        };
        self.interaction.evolve(&phased, tau)
    }

    /// State after `n` kicks of strength `h_kick` at period `tau`.
    pub fn kicked_state(&self, state: &FullState, h_kick: f64, tau: f64, n: usize) -> FullState {
        let mut out = state.clone();
        for _ in 0..n {
            out = self.kick_once(&out, h_kick, tau);
        }
        out
    }

    /// `L(n tau)` for forward/backward kick fields.
    pub fn loschmidt(&self, h_f: f64, h_b: f64, tau: f64, n: usize, state: &InitialState) -> f64 {
        let psi0 = oracle_initial_state(self.n_sites, state);
        let f = self.kicked_state(&psi0, h_f, tau, n);
        let b = self.kicked_state(&psi0, h_b, tau, n);
        vdot(&b.amplitudes.view(), &f.amplitudes.view()).norm_sqr()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::allowed_momenta;

    #[test]
    fn vacuum_is_normalized_even_state() {
        let v = FullState::vacuum(8);
        assert_eq!(v.parity, Parity::Even);
        assert!((v.norm() - 1.0).abs() < 1e-15);
        assert_eq!(v.to_dense()[0], C64::new(1.0, 0.0));
    }

    #[test]
    fn momentum_modes_are_orthonormal() {
        let n = 8;
        let vac = FullState::vacuum(n);
        let momenta = allowed_momenta(n);
        let basis = SectorBasis::new(n, Parity::Even);
        for &k in &momenta {
            for &q in &momenta {
                let overlap = momentum_annihilation(&momentum_creation(&vac, q), k);
                let got = overlap.amplitudes[basis.index_of(0)];
                let expect = if k == q { 1.0 } else { 0.0 };
                assert!(
                    (got - C64::new(expect, 0.0)).norm() < 1e-12,
                    "k={k:?} q={q:?}"
                );
            }
        }
    }

    #[test]
    fn site_one_creation_is_uniform_momentum_combination() {
        // c_1^dag = N^{-1/2} sum_q e^{-iq} c_q^dag on the vacuum
        let n = 8;
        let vac = FullState::vacuum(n);
        let direct = site_one_creation(&vac);
        let mut combo: Option<Array1<C64>> = None;
        for q in allowed_momenta(n) {
            let phase = C64::from_polar(1.0 / (n as f64).sqrt(), -q.value(n));
            let term = momentum_creation(&vac, q);
            match &mut combo {
                None => combo = Some(term.amplitudes.mapv(|z| z * phase)),
                Some(acc) => acc.zip_mut_with(&term.amplitudes, |a, &b| *a += phase * b),
            }
        }
        for (a, b) in direct.amplitudes.iter().zip(combo.unwrap().iter()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn anticommutators_on_random_vectors() {
        use rand::prelude::*;
        use rand_chacha::ChaCha8Rng;
        let n = 8;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let basis = SectorBasis::new(n, Parity::Even);
        let amplitudes: Array1<C64> = (0..basis.len())
            .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let psi = FullState {
            n_sites: n,
            parity: Parity::Even,
            amplitudes,
        };
        for j in [1usize, 3, 8] {
            for l in [1usize, 5] {
                // {c_j, c_l^dag} psi = delta_jl psi
                let a = apply_site_op(&apply_site_op(&psi, l, true), j, false);
                let b = apply_site_op(&apply_site_op(&psi, j, false), l, true);
                let expect = if j == l { 1.0 } else { 0.0 };
                for i in 0..a.amplitudes.len() {
                    let got = a.amplitudes[i] + b.amplitudes[i];
                    assert!((got - psi.amplitudes[i] * expect).norm() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn hamiltonian_is_hermitian_and_capped() {
        let spec = ChainSpec::with_unit_coupling(8, 0.5, 0.7).unwrap();
        let h = build_full_hamiltonian(&spec).unwrap();
        assert!(h.hermiticity_defect() < 1e-12);
        let big = ChainSpec::with_unit_coupling(16, 0.5, 0.7).unwrap();
        assert!(matches!(
            build_full_hamiltonian(&big),
            Err(ChainError::SizeCapExceeded { n: 16, cap: 12 })
        ));
    }

    #[test]
    fn zero_field_isotropic_spectrum_is_symmetric() {
        let spec = ChainSpec::with_unit_coupling(8, 1.0, 0.0).unwrap();
        let spectrum = build_full_hamiltonian(&spec).unwrap().spectrum();
        let mid = (spectrum[0] + spectrum[spectrum.len() - 1]) / 2.0;
        for (lo, hi) in spectrum.iter().zip(spectrum.iter().rev()) {
            assert!(((lo - mid) + (hi - mid)).abs() < 1e-9);
        }
    }

    #[test]
    fn oracle_loschmidt_trivial_identities() {
        let f = ChainSpec::with_unit_coupling(8, 1.0, 1.0).unwrap();
        let b = f.with_field(-1.0);
        let oracle = EchoOracle::new(&f, &b).unwrap();
        for state in [
            InitialState::Vacuum,
            InitialState::DefiniteMomentum(Momentum::from_numerator(8, 1).unwrap()),
            InitialState::UniformSite,
        ] {
            assert!((oracle.loschmidt(&state, 0.0) - 1.0).abs() < 1e-12);
        }
        let same = EchoOracle::new(&f, &f).unwrap();
        assert!((same.loschmidt(&InitialState::Vacuum, 1.7) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn oracle_momentum_dist_at_zero_time() {
        let f = ChainSpec::with_unit_coupling(8, 1.0, 1.0).unwrap();
        let b = f.with_field(-1.0);
        let oracle = EchoOracle::new(&f, &b).unwrap();
        let q = Momentum::from_numerator(8, 3).unwrap();
        let state = InitialState::DefiniteMomentum(q);
        for k in allowed_momenta(8) {
            let expect = if k == q { 1.0 } else { 0.0 };
            assert!((oracle.momentum_dist(&state, k, 0.0) - expect).abs() < 1e-12);
        }
        for k in allowed_momenta(8) {
            let got = oracle.momentum_dist(&InitialState::UniformSite, k, 0.0);
            assert!((got - 1.0 / 8.0).abs() < 1e-12);
        }
    }

    #[test]
    fn heisenberg_and_schroedinger_forms_agree() {
        let f = ChainSpec::with_unit_coupling(8, 0.5, 1.0).unwrap();
        let b = f.with_field(-1.0);
        let oracle = EchoOracle::new(&f, &b).unwrap();
        let state = InitialState::UniformSite;
        for k in allowed_momenta(8) {
            for t in [0.3, 1.2, 4.0] {
                let a = oracle.momentum_dist(&state, k, t);
                let c = oracle.momentum_dist_heisenberg_form(&state, k, t);
                assert!((a - c).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn kicked_oracle_basics() {
        let base = ChainSpec::with_unit_coupling(8, 1.0, 0.0).unwrap();
        let oracle = KickedOracle::new(&base, DEFAULT_SIZE_CAP).unwrap();
        assert!((oracle.loschmidt(1.0, -1.0, 0.4, 0, &InitialState::Vacuum) - 1.0).abs() < 1e-12);
        // special kick tau = pi/4, h = +-1 freezes the echo
        let tau = std::f64::consts::FRAC_PI_4;
        for n in [1usize, 2, 7, 25] {
            let l = oracle.loschmidt(1.0, -1.0, tau, n, &InitialState::Vacuum);
            assert!((l - 1.0).abs() < 1e-10, "n={n}: L={l}");
        }
    }
}
