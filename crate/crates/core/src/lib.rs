//! Exact dynamics of the one-dimensional Kitaev spin chain in a transverse
//! field, built on its free-fermion momentum-quartet structure.
//!
//! The chain of `N` spins maps, through the Jordan-Wigner transformation with
//! an antiperiodic fermion boundary, onto `N/4` independent momentum quartets
//! `{q-pi, -q, q, pi-q}`. Each quartet evolves inside a 16-dimensional Fock
//! space, which makes Loschmidt echoes and magnon momentum distributions
//! computable at arbitrary chain length for three families of initial states:
//! the fermion vacuum, a single magnon of definite momentum, and a magnon
//! localized on one site (uniform momentum weight).
//!
//! Modules:
//! - [`model`]: couplings, momentum grid and closed-form quartet spectra
//! - [`mode`]: 16-dimensional quartet Hamiltonians, evolution and correlators
//! - [`echo`]: chain-level echoes, distributions, averages and fits
//! - [`floquet`]: stroboscopic dynamics under a delta-kicked field
//! - [`oracle`]: brute-force full Fock-space cross-checks for small chains

// Pull in the system BLAS/LAPACK symbols for the lapack-sys calls.
extern crate openblas_src as _;

pub mod echo;
pub mod error;
pub mod floquet;
pub mod linalg;
pub mod mode;
pub mod model;
pub mod oracle;

pub use error::{ChainError, Result};
pub use linalg::C64;
