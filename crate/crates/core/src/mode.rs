//! Exact dynamics inside one momentum quartet.
//!
//! A quartet `{q-pi, -q, q, pi-q}` carries four fermion modes, hence a
//! 16-dimensional Fock space. The quartet block of the chain Hamiltonian is
//! obtained by Fourier-restricting the real-space quadratic form to the four
//! coupled momenta and lifting the resulting 4x4 hopping/pairing blocks into
//! that Fock space. One Hermitian eigendecomposition per `(spec, quartet)`
//! then gives evolution at any time as a pair of dense 16-vector products.

use crate::error::{ChainError, Result};
use crate::linalg::{adjoint_matvec, eigh, matvec, vdot, C64};
use crate::model::{mode_spectrum, quadratic_form, ChainSpec, ModeQuartet, ModeSpectrum};
use ndarray::prelude::*;
use std::sync::OnceLock;

pub const DIM: usize = 16;

/// Occupation-basis index of one quartet Fock state:
/// `b = 8 n_{q-pi} + 4 n_{-q} + 2 n_q + n_{pi-q}`.
#[inline]
pub fn basis_index(occupations: [u8; 4]) -> usize {
    (occupations[0] as usize) << 3
        | (occupations[1] as usize) << 2
        | (occupations[2] as usize) << 1
        | occupations[3] as usize
}

/// 16-component state over the quartet occupation basis.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeState {
    pub amplitudes: Array1<C64>,
}

impl ModeState {
    pub fn vacuum() -> Self {
        let mut amplitudes = Array1::zeros(DIM);
        amplitudes[0] = C64::new(1.0, 0.0);
        Self { amplitudes }
    }

    /// `c_slot^dag |0000>`.
    pub fn one_particle(slot: usize) -> Result<Self> {
        if slot >= 4 {
            return Err(ChainError::SlotOutOfRange { slot });
        }
        let mut amplitudes = Array1::zeros(DIM);
        amplitudes[1 << (3 - slot)] = C64::new(1.0, 0.0);
        Ok(Self { amplitudes })
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `+1`/`-1` if every nonzero amplitude sits in one parity sector,
    /// `None` for mixed states.
    pub fn fermion_parity(&self) -> Option<i8> {
        let mut even = 0.0;
        let mut odd = 0.0;
        for (b, z) in self.amplitudes.iter().enumerate() {
            if (b.count_ones() & 1) == 0 {
                even += z.norm_sqr();
            } else {
                odd += z.norm_sqr();
            }
        }
        let tol = 1e-24 * (even + odd);
        match (even <= tol, odd <= tol) {
            (false, true) => Some(1),
            (true, false) => Some(-1),
            _ => None,
        }
    }
}

/// The four creation operators `c_k^dag` (slot order `q-pi, -q, q, pi-q`)
/// as 16x16 matrices with the Jordan-Wigner sign string internal to that
/// slot order. Annihilators are their adjoints.
pub struct QuartetOps {
    pub create: [Array2<C64>; 4],
    pub annihilate: [Array2<C64>; 4],
}

pub fn quartet_ops() -> &'static QuartetOps {
    static OPS: OnceLock<QuartetOps> = OnceLock::new();
    OPS.get_or_init(|| {
        let mut create: [Array2<C64>; 4] = std::array::from_fn(|_| Array2::zeros((DIM, DIM)));
        for slot in 0..4 {
            let bit = 1usize << (3 - slot);
            for b in 0..DIM {
                if b & bit == 0 {
                    // string over slots before this one (higher bits)
                    let before = b >> (4 - slot);
                    let sign = if (before.count_ones() & 1) == 0 {
                        1.0
                    } else {
                        -1.0
                    };
                    create[slot][[b | bit, b]] = C64::new(sign, 0.0);
                }
            }
        }
        let annihilate = std::array::from_fn(|s: usize| create[s].t().mapv(|z| z.conj()));
        QuartetOps { create, annihilate }
    })
}

/// Quartet block of the chain Hamiltonian in the mode normalization
/// `H = 2 sum_q H_q`: the stored matrix is `H_q` (half the raw block), so
/// its 16 eigenvalues are the subset sums of the quartet `lambda_i` up to
/// one constant shift, and evolution uses `exp(-2i H_q t)`.
#[derive(Debug, Clone)]
pub struct ModeHamiltonian {
    pub matrix: Array2<C64>,
    pub eigvals: Array1<f64>,
    pub eigvecs: Array2<C64>,
    pub spectrum: ModeSpectrum,
    quartet: ModeQuartet,
    h_field: f64,
}

pub fn build_mode_hamiltonian(spec: &ChainSpec, quartet: &ModeQuartet) -> ModeHamiltonian {
    let raw = quartet_fock_block(spec, quartet);
    let matrix = raw.mapv(|z| 0.5 * z);
    let (eigvals, eigvecs) = eigh(&matrix);
    ModeHamiltonian {
        matrix,
        eigvals,
        eigvecs,
        spectrum: mode_spectrum(spec, quartet),
        quartet: *quartet,
        h_field: spec.h,
    }
}

/// Fourier-restrict the real-space quadratic form to the quartet momenta
/// and lift to the Fock space. Returns the raw block `K_q = 2 H_q + const`.
fn quartet_fock_block(spec: &ChainSpec, quartet: &ModeQuartet) -> Array2<C64> {
    let n = spec.n_sites;
    let form = quadratic_form(spec);
    // plane waves f[a][j] = exp(i k_a (j+1)) / sqrt(n), sites stored 0-based
    let waves: [Vec<C64>; 4] = std::array::from_fn(|a| {
        let k = quartet.partners[a].value(n);
        (0..n)
            .map(|j| C64::from_polar(1.0 / (n as f64).sqrt(), k * (j + 1) as f64))
            .collect()
    });
    // hopping block: A~[a,b] = sum conj(f_a(j)) A_{jl} f_b(l)
    let mut hop = Array2::<C64>::zeros((4, 4));
    for &(j, l, v) in &form.hopping {
        for a in 0..4 {
            for b in 0..4 {
                hop[[a, b]] += waves[a][j].conj() * v * waves[b][l];
            }
        }
    }
    // pairing block: B~[a,b] = sum conj(f_a(j)) B_{jl} conj(f_b(l))
    let mut pair = Array2::<C64>::zeros((4, 4));
    for &(j, l, v) in &form.pairing {
        for a in 0..4 {
            for b in 0..4 {
                pair[[a, b]] += waves[a][j].conj() * v * waves[b][l].conj();
            }
        }
    }
    let ops = quartet_ops();
    let mut k = Array2::<C64>::zeros((DIM, DIM));
    for a in 0..4 {
        for b in 0..4 {
            if hop[[a, b]].norm() > 0.0 {
                k = k + ops.create[a].dot(&ops.annihilate[b]) * hop[[a, b]];
            }
            if pair[[a, b]].norm() > 0.0 {
                k = k + ops.create[a].dot(&ops.create[b]) * (0.5 * pair[[a, b]]);
                k = k + ops.annihilate[b].dot(&ops.annihilate[a]) * (0.5 * pair[[a, b]].conj());
            }
        }
    }
    // exact Hermitian symmetrization
    let kt = k.t().mapv(|z| z.conj());
    (k + kt).mapv(|z| 0.5 * z)
}

impl ModeHamiltonian {
    pub fn quartet(&self) -> &ModeQuartet {
        &self.quartet
    }

    /// Transverse field this block was built with.
    pub fn field(&self) -> f64 {
        self.h_field
    }

    /// `exp(-2i H_q t) |state>`.
    pub fn evolve_state(&self, state: &ModeState, t: f64) -> ModeState {
        let proj = adjoint_matvec(&self.eigvecs, &state.amplitudes);
        let phased: Array1<C64> = proj
            .iter()
            .zip(self.eigvals.iter())
            .map(|(z, &w)| z * C64::from_polar(1.0, -2.0 * w * t))
            .collect();
        ModeState {
            amplitudes: matvec(&self.eigvecs, &phased),
        }
    }

    /// `exp(-2i H_q t) |0000>`.
    pub fn evolve_vacuum(&self, t: f64) -> ModeState {
        self.evolve_state(&ModeState::vacuum(), t)
    }
}

/// `(exp(2i H_q t) O exp(-2i H_q t)) |state>` where `O` is the slot's
/// creation (`dagger`) or annihilation operator. Flips the state's parity.
pub fn apply_evolved_operator(
    state: &ModeState,
    h_q: &ModeHamiltonian,
    slot: usize,
    t: f64,
    dagger: bool,
) -> Result<ModeState> {
    if slot >= 4 {
        return Err(ChainError::SlotOutOfRange { slot });
    }
    let ops = quartet_ops();
    let op = if dagger {
        &ops.create[slot]
    } else {
        &ops.annihilate[slot]
    };
    let back = h_q.evolve_state(state, t);
    let acted = ModeState {
        amplitudes: op.dot(&back.amplitudes),
    };
    Ok(h_q.evolve_state(&acted, -t))
}

/// Overlap amplitude `A_q(t) = <phi'_q(t) | phi_q(t)>` between the quartet
/// vacua evolved under the forward and backward specs.
pub fn overlap_amplitude(
    spec_f: &ChainSpec,
    spec_b: &ChainSpec,
    quartet: &ModeQuartet,
    t: f64,
) -> Result<C64> {
    check_shared_chain(spec_f, spec_b)?;
    let hf = build_mode_hamiltonian(spec_f, quartet);
    let hb = build_mode_hamiltonian(spec_b, quartet);
    let f = hf.evolve_vacuum(t);
    let b = hb.evolve_vacuum(t);
    Ok(vdot(&b.amplitudes.view(), &f.amplitudes.view()))
}

/// One-quartet correlator `C(k, q) = <phi'(t)| c'_k(-t) c_q^dag(-t) |phi(t)>`
/// with the annihilator evolved under `spec_b` and the creator under
/// `spec_f`; equivalently the overlap of the two one-particle states evolved
/// under the respective blocks.
pub fn correlator_c(
    spec_f: &ChainSpec,
    spec_b: &ChainSpec,
    quartet: &ModeQuartet,
    k_slot: usize,
    q_slot: usize,
    t: f64,
) -> Result<C64> {
    check_shared_chain(spec_f, spec_b)?;
    let hf = build_mode_hamiltonian(spec_f, quartet);
    let hb = build_mode_hamiltonian(spec_b, quartet);
    let f = hf.evolve_state(&ModeState::one_particle(q_slot)?, t);
    let b = hb.evolve_state(&ModeState::one_particle(k_slot)?, t);
    Ok(vdot(&b.amplitudes.view(), &f.amplitudes.view()))
}

fn check_shared_chain(spec_f: &ChainSpec, spec_b: &ChainSpec) -> Result<()> {
    if spec_f.n_sites != spec_b.n_sites {
        return Err(ChainError::MismatchedSpecs(format!(
            "forward chain has {} sites, backward {}",
            spec_f.n_sites, spec_b.n_sites
        )));
    }
    Ok(())
}

/// Row-normalized eigenoperator coefficient matrix over the mixed basis
/// `(c_{q-pi}^dag, c_{-q}, c_q^dag, c_{pi-q})`, one row per `lambda_i`
/// ascending. Built from `C = cos(theta_q/2)`, `S = sin(theta_q/2)` and
/// `h_i = h/lambda_i`; each row is normalized so the eigenoperator
/// satisfies `{xi_i, xi_i^dag} = 1`, which makes the matrix unitary.
#[derive(Debug, Clone)]
pub struct GammaMatrix {
    pub entries: Array2<C64>,
    pub lambdas: [f64; 4],
}

pub fn gamma_matrix(spec: &ChainSpec, quartet: &ModeQuartet) -> Result<GammaMatrix> {
    let sp = mode_spectrum(spec, quartet);
    let h_i = sp.h_over_lambda(spec.h, quartet.q())?;
    // Full-range Bogoliubov angle. Equals the arcsin form of ModeSpectrum
    // wherever (1+r) cos q > 0; the arcsin branch folds the angle for
    // strongly negative r and breaks the eigenoperator identity there.
    let q = quartet.q();
    let theta = ((1.0 - spec.r) * q.sin()).atan2((1.0 + spec.r) * q.cos());
    let c = (0.5 * theta).cos();
    let s = (0.5 * theta).sin();
    let mut entries = Array2::<C64>::zeros((4, 4));
    for i in 0..4 {
        let hp = 1.0 + h_i[i];
        let hm = 1.0 - h_i[i];
        let norm = 1.0 / (2.0 * (1.0 + h_i[i] * h_i[i])).sqrt();
        let row: [C64; 4] = if i % 2 == 0 {
            // lambda_1, lambda_3 channel
            [
                C64::new(hp * c, 0.0),
                C64::new(hm * c, 0.0),
                C64::new(0.0, -hp * s),
                C64::new(0.0, -hm * s),
            ]
        } else {
            // lambda_2, lambda_4 channel
            [
                C64::new(hp * s, 0.0),
                C64::new(hm * s, 0.0),
                C64::new(0.0, hp * c),
                C64::new(0.0, hm * c),
            ]
        };
        for (j, z) in row.into_iter().enumerate() {
            entries[[i, j]] = norm * z;
        }
    }
    Ok(GammaMatrix {
        entries,
        lambdas: sp.lambdas,
    })
}

/// Heisenberg coefficients of the conjugated creator at the quartet's
/// representative momentum:
///
/// `exp(2i H_q t) c_q^dag exp(-2i H_q t)
///     = beta_1 c_{q-pi}^dag + beta_2 c_{-q} + beta_3 c_q^dag + beta_4 c_{pi-q}`
///
/// with `beta_j = sum_i exp(2i lambda_i t) Gamma*_{i3} Gamma_{ij}`.
/// Refused on degenerate spectra; the numerical route
/// [`apply_evolved_operator`] covers those.
pub fn heisenberg_beta(spec: &ChainSpec, quartet: &ModeQuartet, t: f64) -> Result<[C64; 4]> {
    let gamma = gamma_matrix(spec, quartet)?;
    let mut beta = [C64::new(0.0, 0.0); 4];
    for (j, out) in beta.iter_mut().enumerate() {
        for i in 0..4 {
            let phase = C64::from_polar(1.0, 2.0 * gamma.lambdas[i] * t);
            *out += phase * gamma.entries[[i, 2]].conj() * gamma.entries[[i, j]];
        }
    }
    Ok(beta)
}
