//! Model parameters, the momentum grid and closed-form quartet spectra.
//!
//! All momenta of an `N`-site chain with the antiperiodic fermion boundary
//! are odd multiples of `pi/N`. They are kept as exact integer numerators so
//! quartet membership and the partner maps `k -> -k`, `k -> pi - k` are
//! integer arithmetic rather than float matching.

use crate::error::{ChainError, Result};

/// Static parameters of one evolution direction.
///
/// Energies are reported in units of `j_x` and times in units of `1/j_x`;
/// the two-parameter family of the model is `(r, h)` with `r = j_y/j_x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainSpec {
    pub n_sites: usize,
    pub j_x: f64,
    pub r: f64,
    pub h: f64,
}

impl ChainSpec {
    pub fn new(n_sites: usize, j_x: f64, r: f64, h: f64) -> Result<Self> {
        if n_sites < 8 || n_sites % 4 != 0 {
            return Err(ChainError::InvalidChainSize { n: n_sites });
        }
        if j_x == 0.0 || !j_x.is_finite() {
            return Err(ChainError::ZeroCoupling);
        }
        Ok(Self { n_sites, j_x, r, h })
    }

    /// Unit coupling `j_x = 1`.
    pub fn with_unit_coupling(n_sites: usize, r: f64, h: f64) -> Result<Self> {
        Self::new(n_sites, 1.0, r, h)
    }

    pub fn j_y(&self) -> f64 {
        self.r * self.j_x
    }

    /// Same chain, different transverse field.
    pub fn with_field(&self, h: f64) -> Self {
        Self { h, ..*self }
    }
}

/// One allowed momentum `k = o * pi / N`, stored by its odd numerator
/// `o` in `(-N, N)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Momentum {
    numerator: i64,
}

impl Momentum {
    pub fn from_numerator(n_sites: usize, numerator: i64) -> Result<Self> {
        let n = n_sites as i64;
        if numerator.rem_euclid(2) != 1 || numerator <= -n || numerator >= n {
            return Err(ChainError::MomentumNotAllowed {
                numerator,
                n: n_sites,
            });
        }
        Ok(Self { numerator })
    }

    /// Nearest allowed momentum to a real value in `(-pi, pi]`.
    pub fn nearest(n_sites: usize, k: f64) -> Result<Self> {
        let n = n_sites as f64;
        let raw = k * n / std::f64::consts::PI;
        // round to the nearest odd integer
        let lo = 2.0 * ((raw - 1.0) / 2.0).floor() + 1.0;
        let cand = if raw - lo > 1.0 { lo + 2.0 } else { lo };
        let mut o = cand as i64;
        let n_i = n_sites as i64;
        if o >= n_i {
            o -= 2 * n_i;
        }
        if o <= -n_i {
            o += 2 * n_i;
        }
        Self::from_numerator(n_sites, o)
    }

    pub fn numerator(&self) -> i64 {
        self.numerator
    }

    /// The value `o * pi / N`.
    pub fn value(&self, n_sites: usize) -> f64 {
        self.numerator as f64 * std::f64::consts::PI / n_sites as f64
    }

    fn wrap(o: i64, n_sites: usize) -> i64 {
        let period = 2 * n_sites as i64;
        let mut o = o.rem_euclid(period);
        if o >= n_sites as i64 {
            o -= period;
        }
        o
    }

    /// `k -> -k` within the allowed set.
    pub fn negate(&self, n_sites: usize) -> Self {
        Self {
            numerator: Self::wrap(-self.numerator, n_sites),
        }
    }

    /// `k -> pi - k` within the allowed set.
    pub fn pi_minus(&self, n_sites: usize) -> Self {
        Self {
            numerator: Self::wrap(n_sites as i64 - self.numerator, n_sites),
        }
    }

    /// `k -> k - pi` within the allowed set.
    pub fn minus_pi(&self, n_sites: usize) -> Self {
        Self {
            numerator: Self::wrap(self.numerator - n_sites as i64, n_sites),
        }
    }
}

/// All `N` allowed momenta, ascending by numerator.
pub fn allowed_momenta(n_sites: usize) -> Vec<Momentum> {
    let n = n_sites as i64;
    (0..n)
        .map(|i| Momentum {
            numerator: 2 * i + 1 - n,
        })
        .collect()
}

/// One of the `N/4` momentum blocks `{q-pi, -q, q, pi-q}` with
/// `q = (2m - 1) pi / N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeQuartet {
    pub index_m: usize,
    pub n_sites: usize,
    /// Partner momenta in the fixed order `(q-pi, -q, q, pi-q)`.
    pub partners: [Momentum; 4],
}

impl ModeQuartet {
    /// Representative momentum `q` in `(0, pi/2)`.
    pub fn q(&self) -> f64 {
        self.partners[2].value(self.n_sites)
    }

    pub fn q_momentum(&self) -> Momentum {
        self.partners[2]
    }

    /// Which slot (0..4) a momentum occupies here, if any.
    pub fn slot_of(&self, k: Momentum) -> Option<usize> {
        self.partners.iter().position(|&p| p == k)
    }
}

/// The `N/4` quartets of an `N`-site chain.
pub fn momentum_grid(n_sites: usize) -> Result<Vec<ModeQuartet>> {
    if n_sites < 8 || n_sites % 4 != 0 {
        return Err(ChainError::InvalidChainSize { n: n_sites });
    }
    let n = n_sites as i64;
    Ok((1..=n_sites / 4)
        .map(|m| {
            let o = 2 * m as i64 - 1;
            ModeQuartet {
                index_m: m,
                n_sites,
                partners: [
                    Momentum { numerator: o - n },
                    Momentum { numerator: -o },
                    Momentum { numerator: o },
                    Momentum { numerator: n - o },
                ],
            }
        })
        .collect())
}

/// Locate the quartet containing momentum `k`: returns `(index_m - 1, slot)`.
pub fn quartet_of(n_sites: usize, k: Momentum) -> (usize, usize) {
    let o = k.numerator().abs();
    let n = n_sites as i64;
    let rep = if o < n / 2 { o } else { n - o };
    let m = ((rep + 1) / 2 - 1) as usize;
    let q = Momentum { numerator: rep };
    let slot = [
        q.minus_pi(n_sites),
        q.negate(n_sites),
        q,
        q.pi_minus(n_sites),
    ]
    .iter()
    .position(|&p| p == k)
    .expect("momentum belongs to its own quartet");
    (m, slot)
}

/// Closed-form single-quartet spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeSpectrum {
    /// Mode energy scale `|e|`.
    pub abs_e: f64,
    /// Bogoliubov angle of the quartet.
    pub theta_q: f64,
    /// `lambda_1 <= .. <= lambda_4`, the set `{+-|e| +- sqrt(|e|^2 + h^2)}`.
    pub lambdas: [f64; 4],
}

const DEGENERACY_TOL: f64 = 1e-12;

impl ModeSpectrum {
    /// Some `lambda_i` vanishes (happens at `h = 0`), which breaks every
    /// formula containing `h_i = h / lambda_i`.
    pub fn is_degenerate(&self) -> bool {
        let scale = self.lambdas[3].abs().max(1.0);
        self.lambdas
            .iter()
            .any(|l| l.abs() <= DEGENERACY_TOL * scale)
    }

    /// The ratios `h_i = h / lambda_i`, defined only off degeneracy.
    pub fn h_over_lambda(&self, h: f64, q: f64) -> Result<[f64; 4]> {
        if self.is_degenerate() {
            return Err(ChainError::DegenerateSpectrum { q });
        }
        Ok([
            h / self.lambdas[0],
            h / self.lambdas[1],
            h / self.lambdas[2],
            h / self.lambdas[3],
        ])
    }
}

/// Evaluate `|e|`, `theta_q` and the four `lambda_i` for one quartet.
pub fn mode_spectrum(spec: &ChainSpec, quartet: &ModeQuartet) -> ModeSpectrum {
    let q = quartet.q();
    let (jx, jy) = (spec.j_x, spec.j_y());
    let cx = (jx + jy) * q.cos();
    let sx = (jx - jy) * q.sin();
    let abs_e = 0.5 * (cx * cx + sx * sx).sqrt();
    let root = (abs_e * abs_e + spec.h * spec.h).sqrt();
    let r = spec.r;
    let denom = (((1.0 + r) * q.cos()).powi(2) + ((1.0 - r) * q.sin()).powi(2)).sqrt();
    let theta_q = ((1.0 - r) * q.sin() / denom).asin();
    ModeSpectrum {
        abs_e,
        theta_q,
        lambdas: [-abs_e - root, abs_e - root, -abs_e + root, abs_e + root],
    }
}

/// The quadratic Jordan-Wigner form of the chain Hamiltonian (antiperiodic
/// boundary `c_{N+1} = -c_1`), as sparse coefficient lists:
///
/// `H = sum A_{jl} c_j^dag c_l + 1/2 sum (B_{jl} c_j^dag c_l^dag + h.c.)`
///
/// with `A` Hermitian and `B` antisymmetric, sites numbered 1..N (stored
/// 0-based). Shared by the quartet engine (after Fourier restriction) and
/// the full-space oracle, so both routes diagonalize the same operator.
#[derive(Debug, Clone)]
pub struct QuadraticForm {
    /// `(j, l, value)` entries of `A`, both triangles.
    pub hopping: Vec<(usize, usize, f64)>,
    /// `(j, l, value)` entries of `B`, both orientations.
    pub pairing: Vec<(usize, usize, f64)>,
}

/// Build the quadratic form for a spec. `x` bonds sit on site pairs
/// (1,2), (3,4), ...; `y` bonds on (2,3), ..., (N,1); the (N,1) bond
/// carries the antiperiodic sign. The field enters as `2h n_j` per site
/// (the `sigma^z` constant is dropped).
pub fn quadratic_form(spec: &ChainSpec) -> QuadraticForm {
    let n = spec.n_sites;
    let (jx, jy) = (spec.j_x, spec.j_y());
    let mut hopping = Vec::with_capacity(3 * n);
    let mut pairing = Vec::with_capacity(2 * n);
    // x bonds: hopping +jx, pairing +jx
    for j in (0..n).step_by(2) {
        let l = j + 1;
        hopping.push((j, l, jx));
        hopping.push((l, j, jx));
        pairing.push((j, l, jx));
        pairing.push((l, j, -jx));
    }
    // y bonds: hopping +jy, pairing -jy; boundary bond flips both
    for j in (1..n).step_by(2) {
        let l = (j + 1) % n;
        let s = if j + 1 < n { 1.0 } else { -1.0 };
        hopping.push((j, l, s * jy));
        hopping.push((l, j, s * jy));
        pairing.push((j, l, -s * jy));
        pairing.push((l, j, s * jy));
    }
    for j in 0..n {
        hopping.push((j, j, 2.0 * spec.h));
    }
    QuadraticForm { hopping, pairing }
}
