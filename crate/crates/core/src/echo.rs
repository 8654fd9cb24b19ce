//! Chain-level observables assembled from per-quartet amplitudes.
//!
//! Every quantity reduces to the quartet overlap `A_q(t)` and the 4x4
//! one-particle correlator matrix `C(k, q)` of each block. Cross-quartet
//! correlators vanish identically by fermion parity, so they are never
//! computed, and products over "all other quartets" are built by
//! prefix/suffix multiplication rather than division (amplitudes can pass
//! through zero).

use crate::error::{ChainError, Result};
use crate::linalg::{vdot, C64};
use crate::mode::{build_mode_hamiltonian, ModeState};
use crate::model::{momentum_grid, quartet_of, ChainSpec, Momentum};
use ndarray::prelude::*;
use rayon::prelude::*;

/// Initial state of the echo protocol.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialState {
    /// Fully polarized chain: the fermion vacuum `|00..00>`.
    Vacuum,
    /// One magnon of definite momentum: `c_q^dag |00..00>`.
    DefiniteMomentum(Momentum),
    /// One magnon on site 1, all momenta equally weighted:
    /// `N^{-1/2} sum_q e^{-iq} c_q^dag |00..00>`.
    UniformSite,
}

impl InitialState {
    pub fn validate(&self, n_sites: usize) -> Result<()> {
        if let InitialState::DefiniteMomentum(q) = self {
            Momentum::from_numerator(n_sites, q.numerator())?;
        }
        Ok(())
    }
}

impl std::fmt::Display for InitialState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            InitialState::Vacuum => write!(f, "vacuum"),
            InitialState::DefiniteMomentum(q) => write!(f, "magnon:o={}", q.numerator()),
            InitialState::UniformSite => write!(f, "uniform"),
        }
    }
}

/// Parameter record attached to every series.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesMeta {
    pub n_sites: usize,
    pub j_x: f64,
    pub r: f64,
    pub h_f: f64,
    pub h_b: f64,
    pub state: String,
    pub grid: String,
    pub window: Option<usize>,
}

/// A sampled observable over a monotone time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct EchoSeries {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub meta: SeriesMeta,
}

/// Uniform grid `0, dt, 2 dt, ..` up to and including `t_max` (within half
/// a step).
pub fn time_grid(t_max: f64, dt: f64) -> Vec<f64> {
    let steps = (t_max / dt).round() as usize;
    (0..=steps).map(|i| i as f64 * dt).collect()
}

/// Per-quartet data at one time: the vacuum overlap and, when requested,
/// the one-particle correlator matrix indexed `correlators[k_slot][q_slot]`.
#[derive(Debug, Clone)]
pub(crate) struct QuartetAmplitudes {
    pub momenta: [Momentum; 4],
    pub overlap: C64,
    pub correlators: Option<[[C64; 4]; 4]>,
}

/// How much per-quartet data an assembly needs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Detail {
    Overlaps,
    Block(usize),
    All,
}

impl Detail {
    pub(crate) fn for_state(n_sites: usize, state: &InitialState) -> Detail {
        match state {
            InitialState::Vacuum => Detail::Overlaps,
            InitialState::DefiniteMomentum(q) => Detail::Block(quartet_of(n_sites, *q).0),
            InitialState::UniformSite => Detail::All,
        }
    }
}

/// Cached spectral data of one quartet for a forward/backward spec pair.
/// Everything time-dependent is then 16-vector phase products against the
/// fixed bilinear kernel `g = V_b^dag V_f`.
struct QuartetPair {
    momenta: [Momentum; 4],
    eig_f: Array1<f64>,
    eig_b: Array1<f64>,
    g: Array2<C64>,
    /// `V^dag e` for the vacuum and the four one-particle basis states.
    proj_f: [Array1<C64>; 5],
    proj_b: [Array1<C64>; 5],
}

impl QuartetPair {
    fn new(spec_f: &ChainSpec, spec_b: &ChainSpec, quartet: &crate::model::ModeQuartet) -> Self {
        let hf = build_mode_hamiltonian(spec_f, quartet);
        let hb = build_mode_hamiltonian(spec_b, quartet);
        let vf_h = hf.eigvecs.t().mapv(|z| z.conj());
        let vb_h = hb.eigvecs.t().mapv(|z| z.conj());
        let g = vb_h.dot(&hf.eigvecs);
        let initial = |i: usize| -> Array1<C64> {
            if i == 0 {
                ModeState::vacuum().amplitudes
            } else {
                ModeState::one_particle(i - 1).expect("slot < 4").amplitudes
            }
        };
        let proj_f = std::array::from_fn(|i| vf_h.dot(&initial(i)));
        let proj_b = std::array::from_fn(|i| vb_h.dot(&initial(i)));
        Self {
            momenta: quartet.partners,
            eig_f: hf.eigvals,
            eig_b: hb.eigvals,
            g,
            proj_f,
            proj_b,
        }
    }

    fn phases(eig: &Array1<f64>, t: f64) -> [C64; 16] {
        std::array::from_fn(|i| C64::from_polar(1.0, -2.0 * eig[i] * t))
    }

    fn amplitudes(&self, t: f64, with_correlators: bool) -> QuartetAmplitudes {
        let ph_f = Self::phases(&self.eig_f, t);
        let ph_b = Self::phases(&self.eig_b, t);
        let count = if with_correlators { 5 } else { 1 };
        // u_i = g . (ph_f ⊙ proj_f[i])
        let mut u: Vec<Array1<C64>> = Vec::with_capacity(count);
        for i in 0..count {
            let phased: Array1<C64> = self.proj_f[i]
                .iter()
                .zip(ph_f.iter())
                .map(|(z, p)| z * p)
                .collect();
            u.push(self.g.dot(&phased));
        }
        let bra = |j: usize| -> Array1<C64> {
            self.proj_b[j]
                .iter()
                .zip(ph_b.iter())
                .map(|(z, p)| z * p)
                .collect()
        };
        let overlap = vdot(&bra(0).view(), &u[0].view());
        let correlators = with_correlators.then(|| {
            let mut c = [[C64::new(0.0, 0.0); 4]; 4];
            for (k, row) in c.iter_mut().enumerate() {
                let b = bra(k + 1);
                for (q, entry) in row.iter_mut().enumerate() {
                    *entry = vdot(&b.view(), &u[q + 1].view());
                }
            }
            c
        });
        QuartetAmplitudes {
            momenta: self.momenta,
            overlap,
            correlators,
        }
    }
}

/// Forward/backward evolution pair over the whole momentum grid.
pub struct EchoEngine {
    pub spec_f: ChainSpec,
    pub spec_b: ChainSpec,
    blocks: Vec<QuartetPair>,
}

impl EchoEngine {
    pub fn new(spec_f: &ChainSpec, spec_b: &ChainSpec) -> Result<Self> {
        if spec_f.n_sites != spec_b.n_sites {
            return Err(ChainError::MismatchedSpecs(format!(
                "forward chain has {} sites, backward {}",
                spec_f.n_sites, spec_b.n_sites
            )));
        }
        let grid = momentum_grid(spec_f.n_sites)?;
        let blocks: Vec<QuartetPair> = grid
            .par_iter()
            .map(|quartet| QuartetPair::new(spec_f, spec_b, quartet))
            .collect();
        Ok(Self {
            spec_f: *spec_f,
            spec_b: *spec_b,
            blocks,
        })
    }

    pub fn n_sites(&self) -> usize {
        self.spec_f.n_sites
    }

    pub(crate) fn quartet_data(&self, t: f64, detail: Detail) -> Vec<QuartetAmplitudes> {
        self.blocks
            .iter()
            .enumerate()
            .map(|(i, block)| {
                let full = match detail {
                    Detail::Overlaps => false,
                    Detail::Block(which) => i == which,
                    Detail::All => true,
                };
                block.amplitudes(t, full)
            })
            .collect()
    }

    /// Loschmidt echo `L(t)` for the given initial state.
    pub fn loschmidt(&self, state: &InitialState, t: f64) -> Result<f64> {
        state.validate(self.n_sites())?;
        let data = self.quartet_data(t, Detail::for_state(self.n_sites(), state));
        Ok(assemble_loschmidt(self.n_sites(), state, &data))
    }

    /// Momentum distribution `P(k, t)`; identically zero for the vacuum
    /// state (odd operator between even-parity states).
    pub fn momentum_dist(&self, state: &InitialState, k: Momentum, t: f64) -> Result<f64> {
        state.validate(self.n_sites())?;
        Momentum::from_numerator(self.n_sites(), k.numerator())?;
        let detail = match state {
            InitialState::Vacuum => return Ok(0.0),
            InitialState::DefiniteMomentum(_) => Detail::for_state(self.n_sites(), state),
            InitialState::UniformSite => Detail::Block(quartet_of(self.n_sites(), k).0),
        };
        let data = self.quartet_data(t, detail);
        Ok(assemble_dist(self.n_sites(), state, k, &data))
    }

    /// `P(k, t)` over every allowed momentum at one time.
    pub fn dist_profile(&self, state: &InitialState, t: f64) -> Result<Vec<(Momentum, f64)>> {
        state.validate(self.n_sites())?;
        let n = self.n_sites();
        let data = self.quartet_data(t, Detail::All);
        Ok(crate::model::allowed_momenta(n)
            .into_iter()
            .map(|k| (k, assemble_dist(n, state, k, &data)))
            .collect())
    }

    /// `L(t)` over a time grid, evaluated in parallel.
    pub fn loschmidt_series(&self, state: &InitialState, times: &[f64]) -> Result<Vec<f64>> {
        state.validate(self.n_sites())?;
        let detail = Detail::for_state(self.n_sites(), state);
        Ok(times
            .par_iter()
            .map(|&t| {
                let data = self.quartet_data(t, detail);
                assemble_loschmidt(self.n_sites(), state, &data)
            })
            .collect())
    }

    /// `P(k, t)` over a time grid, evaluated in parallel.
    pub fn momentum_dist_series(
        &self,
        state: &InitialState,
        k: Momentum,
        times: &[f64],
    ) -> Result<Vec<f64>> {
        state.validate(self.n_sites())?;
        Momentum::from_numerator(self.n_sites(), k.numerator())?;
        if matches!(state, InitialState::Vacuum) {
            return Ok(vec![0.0; times.len()]);
        }
        let detail = match state {
            InitialState::DefiniteMomentum(q) => Detail::Block(quartet_of(self.n_sites(), *q).0),
            _ => Detail::Block(quartet_of(self.n_sites(), k).0),
        };
        Ok(times
            .par_iter()
            .map(|&t| {
                let data = self.quartet_data(t, detail);
                assemble_dist(self.n_sites(), state, k, &data)
            })
            .collect())
    }

    pub fn series_meta(&self, state: &InitialState, grid: String) -> SeriesMeta {
        SeriesMeta {
            n_sites: self.n_sites(),
            j_x: self.spec_f.j_x,
            r: self.spec_f.r,
            h_f: self.spec_f.h,
            h_b: self.spec_b.h,
            state: state.to_string(),
            grid,
            window: None,
        }
    }
}

/// `prod_{p != i} a_p` for every `i`, plus the total product.
fn products_skipping(amps: &[C64]) -> (C64, Vec<C64>) {
    let m = amps.len();
    let one = C64::new(1.0, 0.0);
    let mut prefix = vec![one; m + 1];
    for i in 0..m {
        prefix[i + 1] = prefix[i] * amps[i];
    }
    let mut suffix = vec![one; m + 1];
    for i in (0..m).rev() {
        suffix[i] = suffix[i + 1] * amps[i];
    }
    let skips = (0..m).map(|i| prefix[i] * suffix[i + 1]).collect();
    (prefix[m], skips)
}

pub(crate) fn assemble_loschmidt(
    n_sites: usize,
    state: &InitialState,
    data: &[QuartetAmplitudes],
) -> f64 {
    let overlaps: Vec<C64> = data.iter().map(|d| d.overlap).collect();
    match state {
        InitialState::Vacuum => {
            let (total, _) = products_skipping(&overlaps);
            total.norm_sqr()
        }
        InitialState::DefiniteMomentum(q) => {
            let (block, slot) = quartet_of(n_sites, *q);
            let (_, skips) = products_skipping(&overlaps);
            let c = data[block]
                .correlators
                .expect("correlators for the magnon block")[slot][slot];
            skips[block].norm_sqr() * c.norm_sqr()
        }
        InitialState::UniformSite => {
            let (_, skips) = products_skipping(&overlaps);
            let mut total = C64::new(0.0, 0.0);
            for (block, d) in data.iter().enumerate() {
                let c = d.correlators.expect("correlators for every block");
                let mut s = C64::new(0.0, 0.0);
                for k in 0..4 {
                    for q in 0..4 {
                        let arg = d.momenta[k].value(n_sites) - d.momenta[q].value(n_sites);
                        s += C64::from_polar(1.0, arg) * c[k][q];
                    }
                }
                total += skips[block] * s;
            }
            (total / n_sites as f64).norm_sqr()
        }
    }
}

pub(crate) fn assemble_dist(
    n_sites: usize,
    state: &InitialState,
    k: Momentum,
    data: &[QuartetAmplitudes],
) -> f64 {
    let (k_block, k_slot) = quartet_of(n_sites, k);
    match state {
        InitialState::Vacuum => 0.0,
        InitialState::DefiniteMomentum(q) => {
            let (q_block, q_slot) = quartet_of(n_sites, *q);
            if q_block != k_block {
                // parity selection rule: exactly zero across quartets
                return 0.0;
            }
            let overlaps: Vec<C64> = data.iter().map(|d| d.overlap).collect();
            let (_, skips) = products_skipping(&overlaps);
            let c = data[q_block]
                .correlators
                .expect("correlators for the magnon block");
            skips[q_block].norm_sqr() * c[k_slot][q_slot].norm_sqr()
        }
        InitialState::UniformSite => {
            let overlaps: Vec<C64> = data.iter().map(|d| d.overlap).collect();
            let (_, skips) = products_skipping(&overlaps);
            let d = &data[k_block];
            let c = d.correlators.expect("correlators for the probed block");
            let mut s = C64::new(0.0, 0.0);
            for q in 0..4 {
                s += C64::from_polar(1.0, -d.momenta[q].value(n_sites)) * c[k_slot][q];
            }
            skips[k_block].norm_sqr() * s.norm_sqr() / n_sites as f64
        }
    }
}

/// `L(t)` for the vacuum state: `|prod_q A_q|^2`.
pub fn loschmidt_vacuum(spec_f: &ChainSpec, spec_b: &ChainSpec, t: f64) -> Result<f64> {
    EchoEngine::new(spec_f, spec_b)?.loschmidt(&InitialState::Vacuum, t)
}

/// `L(t)` for the one-magnon state of definite momentum `q`.
pub fn loschmidt_definite_q(
    spec_f: &ChainSpec,
    spec_b: &ChainSpec,
    q: Momentum,
    t: f64,
) -> Result<f64> {
    EchoEngine::new(spec_f, spec_b)?.loschmidt(&InitialState::DefiniteMomentum(q), t)
}

/// `P_q(k, t)` for the definite-momentum magnon: zero whenever `k` lies
/// outside the quartet of `q`, and `L(t)` itself at `k = q`.
pub fn momentum_dist_definite_q(
    spec_f: &ChainSpec,
    spec_b: &ChainSpec,
    q: Momentum,
    k: Momentum,
    t: f64,
) -> Result<f64> {
    EchoEngine::new(spec_f, spec_b)?.momentum_dist(&InitialState::DefiniteMomentum(q), k, t)
}

/// `L(t)` for the site-localized magnon (uniform momentum weight).
pub fn loschmidt_uniform(spec_f: &ChainSpec, spec_b: &ChainSpec, t: f64) -> Result<f64> {
    EchoEngine::new(spec_f, spec_b)?.loschmidt(&InitialState::UniformSite, t)
}

/// `P(k, t)` for the site-localized magnon; `P(k, 0) = 1/N`.
pub fn momentum_dist_uniform(
    spec_f: &ChainSpec,
    spec_b: &ChainSpec,
    k: Momentum,
    t: f64,
) -> Result<f64> {
    EchoEngine::new(spec_f, spec_b)?.momentum_dist(&InitialState::UniformSite, k, t)
}

/// Arithmetic mean over the sampled grid.
pub fn time_average(series: &EchoSeries) -> Result<f64> {
    if series.values.is_empty() {
        return Err(ChainError::EmptyRange);
    }
    Ok(series.values.iter().sum::<f64>() / series.values.len() as f64)
}

/// Default averaging horizon: long (`500/j_x`) for chains up to 48 sites,
/// where late revivals still matter, short (`5/j_x`) beyond.
pub fn default_time_horizon(n_sites: usize) -> f64 {
    if n_sites <= 48 {
        500.0
    } else {
        5.0
    }
}

/// Sliding mean over `window_len` consecutive samples; the output grid
/// keeps the center sample of each window.
pub fn window_average(series: &EchoSeries, window_len: usize) -> Result<EchoSeries> {
    let len = series.values.len();
    if window_len == 0 || window_len > len {
        return Err(ChainError::WindowTooLong {
            window: window_len,
            len,
        });
    }
    let out_len = len - window_len + 1;
    let mut values = Vec::with_capacity(out_len);
    let mut acc: f64 = series.values[..window_len].iter().sum();
    values.push(acc / window_len as f64);
    for i in 1..out_len {
        acc += series.values[i + window_len - 1] - series.values[i - 1];
        values.push(acc / window_len as f64);
    }
    let times = (0..out_len)
        .map(|i| series.times[i + (window_len - 1) / 2])
        .collect();
    Ok(EchoSeries {
        times,
        values,
        meta: SeriesMeta {
            window: Some(window_len),
            ..series.meta.clone()
        },
    })
}

/// A fitted power law `value = amplitude * n^exponent`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerLawFit {
    pub amplitude: f64,
    pub exponent: f64,
    pub samples: Vec<(f64, f64)>,
}

/// Least-squares power-law fit in linear space (residuals on the values
/// themselves, the way a plotting tool's `a*x**b` fit weights them),
/// seeded by the log-log regression. The profile over the exponent is
/// minimized by golden-section search with the amplitude eliminated
/// analytically.
pub fn power_law_fit(samples: &[(f64, f64)]) -> Result<PowerLawFit> {
    let good = samples.iter().filter(|(n, p)| *n > 0.0 && *p > 0.0).count();
    if good < samples.len() || samples.len() < 2 {
        return Err(ChainError::DegenerateFit {
            needed: 2,
            got: good,
        });
    }
    // log-log seed
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(n, p) in samples {
        let (x, y) = (n.ln(), p.ln());
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    let m = samples.len() as f64;
    let b0 = (m * sxy - sx * sy) / (m * sxx - sx * sx);

    let amp_for = |b: f64| -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for &(n, p) in samples {
            let nb = n.powf(b);
            num += p * nb;
            den += nb * nb;
        }
        num / den
    };
    let sse = |b: f64| -> f64 {
        let a = amp_for(b);
        samples
            .iter()
            .map(|&(n, p)| (a * n.powf(b) - p).powi(2))
            .sum()
    };
    let phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (b0 - 2.0, b0 + 2.0);
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let (mut f1, mut f2) = (sse(x1), sse(x2));
    for _ in 0..200 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = sse(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = sse(x2);
        }
        if hi - lo < 1e-12 {
            break;
        }
    }
    let exponent = 0.5 * (lo + hi);
    Ok(PowerLawFit {
        amplitude: amp_for(exponent),
        exponent,
        samples: samples.to_vec(),
    })
}

/// Peak of the uniform-state momentum distribution at `t_star` for each
/// chain length, fitted to a power law in `N`.
pub fn peak_scaling_fit(
    template_f: &ChainSpec,
    template_b: &ChainSpec,
    sizes: &[usize],
    t_star: f64,
) -> Result<PowerLawFit> {
    if sizes.len() < 4 {
        return Err(ChainError::DegenerateFit {
            needed: 4,
            got: sizes.len(),
        });
    }
    let peaks = peak_values(template_f, template_b, sizes, t_star)?;
    power_law_fit(&peaks)
}

/// The per-size peak values behind [`peak_scaling_fit`].
pub fn peak_values(
    template_f: &ChainSpec,
    template_b: &ChainSpec,
    sizes: &[usize],
    t_star: f64,
) -> Result<Vec<(f64, f64)>> {
    sizes
        .par_iter()
        .map(|&n| {
            let spec_f = ChainSpec::new(n, template_f.j_x, template_f.r, template_f.h)?;
            let spec_b = ChainSpec::new(n, template_b.j_x, template_b.r, template_b.h)?;
            let engine = EchoEngine::new(&spec_f, &spec_b)?;
            let profile = engine.dist_profile(&InitialState::UniformSite, t_star)?;
            let peak = profile.iter().map(|&(_, p)| p).fold(f64::MIN, f64::max);
            Ok((n as f64, peak))
        })
        .collect()
}

/// `L` at a fixed time as a function of the forward field, the backward
/// spec held fixed.
pub fn field_sweep(
    spec_b: &ChainSpec,
    h_f_values: &[f64],
    t_star: f64,
    state: &InitialState,
) -> Result<Vec<(f64, f64)>> {
    if h_f_values.is_empty() {
        return Err(ChainError::EmptyRange);
    }
    state.validate(spec_b.n_sites)?;
    h_f_values
        .par_iter()
        .map(|&h_f| {
            let spec_f = spec_b.with_field(h_f);
            let engine = EchoEngine::new(&spec_f, spec_b)?;
            Ok((h_f, engine.loschmidt(state, t_star)?))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::allowed_momenta;

    fn flipped_field_pair(n: usize) -> (ChainSpec, ChainSpec) {
        let f = ChainSpec::with_unit_coupling(n, 1.0, 1.0).unwrap();
        (f, f.with_field(-1.0))
    }

    fn test_meta() -> SeriesMeta {
        SeriesMeta {
            n_sites: 8,
            j_x: 1.0,
            r: 1.0,
            h_f: 1.0,
            h_b: -1.0,
            state: "vacuum".into(),
            grid: "test".into(),
            window: None,
        }
    }

    #[test]
    fn all_states_start_at_unity() {
        let (f, b) = flipped_field_pair(8);
        assert!((loschmidt_vacuum(&f, &b, 0.0).unwrap() - 1.0).abs() < 1e-12);
        let q = Momentum::from_numerator(8, 1).unwrap();
        assert!((loschmidt_definite_q(&f, &b, q, 0.0).unwrap() - 1.0).abs() < 1e-12);
        assert!((loschmidt_uniform(&f, &b, 0.0).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn equal_specs_stay_at_unity() {
        let f = ChainSpec::with_unit_coupling(12, 0.5, 0.8).unwrap();
        for t in [0.3, 1.9, 7.7] {
            assert!((loschmidt_vacuum(&f, &f, t).unwrap() - 1.0).abs() < 1e-10);
            assert!((loschmidt_uniform(&f, &f, t).unwrap() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn uniform_distribution_is_flat_at_zero_time() {
        let (f, b) = flipped_field_pair(8);
        let mut total = 0.0;
        for k in allowed_momenta(8) {
            let p = momentum_dist_uniform(&f, &b, k, 0.0).unwrap();
            assert!((p - 1.0 / 8.0).abs() < 1e-12);
            total += p;
        }
        assert!((total - 1.0).abs() < 1e-10);
    }

    #[test]
    fn definite_q_distribution_selects_its_own_momentum() {
        let (f, b) = flipped_field_pair(8);
        let q = Momentum::from_numerator(8, 1).unwrap();
        for t in [0.0, 0.4, 2.2] {
            for k in allowed_momenta(8) {
                let p = momentum_dist_definite_q(&f, &b, q, k, t).unwrap();
                if k == q {
                    let l = loschmidt_definite_q(&f, &b, q, t).unwrap();
                    assert!((p - l).abs() < 1e-12);
                } else {
                    assert!(p <= 1e-10, "k={k:?} t={t} P={p}");
                }
            }
        }
    }

    #[test]
    fn partner_momenta_share_the_uniform_distribution_value() {
        let (f, b) = flipped_field_pair(16);
        let engine = EchoEngine::new(&f, &b).unwrap();
        for t in [0.3, 1.2, 2.7] {
            let profile = engine.dist_profile(&InitialState::UniformSite, t).unwrap();
            for quartet in crate::model::momentum_grid(16).unwrap() {
                let values: Vec<f64> = profile
                    .iter()
                    .filter(|(k, _)| quartet.slot_of(*k).is_some())
                    .map(|&(_, p)| p)
                    .collect();
                assert_eq!(values.len(), 4);
                let lo = values.iter().cloned().fold(f64::MAX, f64::min);
                let hi = values.iter().cloned().fold(f64::MIN, f64::max);
                assert!(
                    hi - lo < 1e-9,
                    "t={t} q={}: spread {}",
                    quartet.q(),
                    hi - lo
                );
            }
        }
    }

    #[test]
    fn cross_quartet_distribution_is_exactly_zero() {
        let (f, b) = flipped_field_pair(8);
        let q = Momentum::from_numerator(8, 1).unwrap();
        let k = Momentum::from_numerator(8, 3).unwrap(); // different quartet
        assert_eq!(momentum_dist_definite_q(&f, &b, q, k, 1.3).unwrap(), 0.0);
    }

    #[test]
    fn vacuum_state_has_no_momentum_distribution() {
        let (f, b) = flipped_field_pair(8);
        let engine = EchoEngine::new(&f, &b).unwrap();
        let k = Momentum::from_numerator(8, 1).unwrap();
        assert_eq!(
            engine.momentum_dist(&InitialState::Vacuum, k, 0.7).unwrap(),
            0.0
        );
    }

    #[test]
    fn values_remain_in_unit_interval() {
        let (f, b) = flipped_field_pair(12);
        let engine = EchoEngine::new(&f, &b).unwrap();
        let times = time_grid(5.0, 0.05);
        for state in [
            InitialState::Vacuum,
            InitialState::DefiniteMomentum(Momentum::from_numerator(12, 1).unwrap()),
            InitialState::UniformSite,
        ] {
            for &v in &engine.loschmidt_series(&state, &times).unwrap() {
                assert!((-1e-9..=1.0 + 1e-9).contains(&v));
            }
        }
    }

    #[test]
    fn series_matches_pointwise_evaluation() {
        let (f, b) = flipped_field_pair(8);
        let engine = EchoEngine::new(&f, &b).unwrap();
        let times = vec![0.0, 0.3, 1.1, 2.4];
        let series = engine
            .loschmidt_series(&InitialState::UniformSite, &times)
            .unwrap();
        for (&t, &v) in times.iter().zip(series.iter()) {
            assert!((v - engine.loschmidt(&InitialState::UniformSite, t).unwrap()).abs() < 1e-13);
        }
        let k = Momentum::from_numerator(8, 3).unwrap();
        let ps = engine
            .momentum_dist_series(&InitialState::UniformSite, k, &times)
            .unwrap();
        for (&t, &v) in times.iter().zip(ps.iter()) {
            assert!(
                (v - engine
                    .momentum_dist(&InitialState::UniformSite, k, t)
                    .unwrap())
                .abs()
                    < 1e-13
            );
        }
    }

    #[test]
    fn rejects_momentum_from_wrong_chain() {
        let (f, b) = flipped_field_pair(8);
        let engine = EchoEngine::new(&f, &b).unwrap();
        let foreign = Momentum::from_numerator(32, 11).unwrap();
        assert!(engine
            .loschmidt(&InitialState::DefiniteMomentum(foreign), 0.1)
            .is_err());
    }

    #[test]
    fn time_average_basics() {
        let constant = EchoSeries {
            times: vec![0.0, 1.0, 2.0],
            values: vec![1.0, 1.0, 1.0],
            meta: test_meta(),
        };
        assert_eq!(time_average(&constant).unwrap(), 1.0);
        let two = EchoSeries {
            times: vec![0.0, 1.0],
            values: vec![0.0, 1.0],
            meta: test_meta(),
        };
        assert_eq!(time_average(&two).unwrap(), 0.5);
        let empty = EchoSeries {
            times: vec![],
            values: vec![],
            meta: test_meta(),
        };
        assert!(time_average(&empty).is_err());
    }

    #[test]
    fn window_average_basics() {
        let series = EchoSeries {
            times: (0..6).map(|i| i as f64).collect(),
            values: vec![0.0, 1.0, 0.0, 1.0, 0.0, 1.0],
            meta: test_meta(),
        };
        let identity = window_average(&series, 1).unwrap();
        assert_eq!(identity.values, series.values);
        assert_eq!(identity.times, series.times);
        let pairs = window_average(&series, 2).unwrap();
        assert!(pairs.values.iter().all(|&v| (v - 0.5).abs() < 1e-15));
        assert_eq!(pairs.values.len(), 5);
        assert_eq!(pairs.meta.window, Some(2));
        assert!(window_average(&series, 7).is_err());
        let constant = EchoSeries {
            times: (0..5).map(|i| i as f64).collect(),
            values: vec![0.7; 5],
            meta: test_meta(),
        };
        let smoothed = window_average(&constant, 3).unwrap();
        assert!(smoothed.values.iter().all(|&v| (v - 0.7).abs() < 1e-15));
    }

    #[test]
    fn power_law_fit_recovers_exact_law() {
        let samples: Vec<(f64, f64)> = [32.0f64, 64.0, 96.0, 128.0]
            .iter()
            .map(|&n| (n, 3.5 / n))
            .collect();
        let fit = power_law_fit(&samples).unwrap();
        assert!(
            (fit.exponent + 1.0).abs() < 1e-6,
            "exponent {}",
            fit.exponent
        );
        assert!((fit.amplitude - 3.5).abs() < 1e-5);
        assert!(power_law_fit(&[(32.0, 0.0), (64.0, 1.0)]).is_err());
    }

    #[test]
    fn field_sweep_hits_unity_at_matched_fields() {
        let b = ChainSpec::with_unit_coupling(8, 1.0, -1.0).unwrap();
        let points = field_sweep(&b, &[-1.0, 0.0, 1.0], 1.2, &InitialState::Vacuum).unwrap();
        assert_eq!(points.len(), 3);
        assert!((points[0].1 - 1.0).abs() < 1e-10); // h_f = h_b = -1
        assert!(field_sweep(&b, &[], 1.2, &InitialState::Vacuum).is_err());
    }

    #[test]
    fn peak_scaling_requires_four_sizes() {
        let (f, b) = flipped_field_pair(8);
        assert!(matches!(
            peak_scaling_fit(&f, &b, &[8, 12], 1.2),
            Err(ChainError::DegenerateFit { needed: 4, got: 2 })
        ));
    }
}
