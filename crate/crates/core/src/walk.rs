//! Coin and shift operators and the full state-vector walk.
//!
//! A step is `W = S (C ⊗ I)` with `S = |↑⟩⟨↑| ⊗ T₋ + |↓⟩⟨↓| ⊗ T₊`, where
//! `T± |x⟩ = |x ± a⟩`. The spin-up component therefore moves left and the
//! spin-down component moves right. With several flavor sectors the coin
//! space is the direct sum of 2-dimensional sectors ordered
//! `(1↑, 1↓, 2↑, 2↓, …)` and each sector is shifted the same way.
//!
//! Positions are lattice site indices; one step moves `a` sites.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::linalg::{cis, CMatrix, C64, I, ZERO};

/// Parameters of the general SU(2)×U(1) coin
/// `C = e^{iξ} e^{−iθσx} e^{−iφσy} e^{−iδσz}`.
///
/// Angles are used as given; no reduction modulo 2π is applied.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoinParams {
    pub xi: f64,
    pub theta: f64,
    pub phi: f64,
    pub delta: f64,
}

impl CoinParams {
    pub fn new(xi: f64, theta: f64, phi: f64, delta: f64) -> Self {
        Self {
            xi,
            theta,
            phi,
            delta,
        }
    }
}

/// The general coin as an explicit 2×2 matrix in the `(|↑⟩, |↓⟩)` basis.
pub fn build_general_coin(p: &CoinParams) -> CMatrix {
    let (ct, st) = (libm::cos(p.theta), libm::sin(p.theta));
    let (cp, sp) = (libm::cos(p.phi), libm::sin(p.phi));
    let em = cis(-p.delta);
    let ep = cis(p.delta);
    let f = C64::new(ct * cp, -st * sp);
    let g = C64::new(ct * sp, st * cp);
    let lower_left = C64::new(ct * sp, -st * cp);
    let m = CMatrix::from_rows(&[[em * f, -(ep * g)], [em * lower_left, ep * f.conj()]]);
    m.scale(cis(p.xi))
}

/// The Dirac coin `B = [[cos θ, sin θ], [−sin θ, cos θ]]`.
pub fn build_dirac_coin(theta: f64) -> CMatrix {
    let (c, s) = (libm::cos(theta), libm::sin(theta));
    CMatrix::from_real_rows(&[[c, s], [-s, c]])
}

/// Block-diagonal coin `⊕_f B(θ_f)` for several flavor sectors.
pub fn block_dirac_coin(thetas: &[f64]) -> CMatrix {
    let blocks: Vec<CMatrix> = thetas.iter().map(|&t| build_dirac_coin(t)).collect();
    CMatrix::direct_sum(&blocks)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    /// Positions wrap modulo `2N+1`.
    Periodic,
    /// Amplitude may not leave `−N..=N`.
    Open,
}

/// Finite lattice with sites `−N..=N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LatticeSpec {
    half_size: i64,
    spacing: i64,
    boundary: Boundary,
}

impl LatticeSpec {
    pub fn new(half_size: i64, spacing: i64, boundary: Boundary) -> Result<Self> {
        if half_size < 1 {
            return Err(Error::InvalidParameter(
                "lattice half size must be at least 1",
            ));
        }
        if spacing < 1 {
            return Err(Error::InvalidParameter(
                "lattice spacing must be at least 1",
            ));
        }
        Ok(Self {
            half_size,
            spacing,
            boundary,
        })
    }

    pub fn periodic(half_size: i64) -> Result<Self> {
        Self::new(half_size, 1, Boundary::Periodic)
    }

    pub fn open(half_size: i64) -> Result<Self> {
        Self::new(half_size, 1, Boundary::Open)
    }

    pub fn half_size(&self) -> i64 {
        self.half_size
    }

    pub fn spacing(&self) -> i64 {
        self.spacing
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    /// Number of sites, `2N+1`.
    pub fn sites(&self) -> i64 {
        2 * self.half_size + 1
    }

    pub fn contains(&self, x: i64) -> bool {
        (-self.half_size..=self.half_size).contains(&x)
    }

    /// Folds `x` into `−N..=N` on a periodic lattice; checks bounds on an open one.
    pub fn place(&self, x: i64) -> Result<i64> {
        match self.boundary {
            Boundary::Periodic => Ok(self.fold(x)),
            Boundary::Open if self.contains(x) => Ok(x),
            Boundary::Open => Err(Error::OutOfSupport {
                position: x,
                half_size: self.half_size,
            }),
        }
    }

    /// Periodic reduction into `−N..=N`, regardless of the boundary kind.
    pub fn fold(&self, x: i64) -> i64 {
        (x + self.half_size).rem_euclid(self.sites()) - self.half_size
    }
}

/// An allowed lattice momentum `k = 2πn/(2N+1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentumSpec {
    index: i64,
    half_size: i64,
    spacing: i64,
}

impl MomentumSpec {
    pub fn from_index(index: i64, lattice: &LatticeSpec) -> Self {
        Self {
            index,
            half_size: lattice.half_size,
            spacing: lattice.spacing,
        }
    }

    /// Accepts `k` only if it is an allowed momentum to within 1e-12.
    pub fn from_value(k: f64, lattice: &LatticeSpec) -> Result<Self> {
        let sites = lattice.sites() as f64;
        let n = libm::round(k * sites / (2.0 * PI));
        if !k.is_finite() || (2.0 * PI * n / sites - k).abs() > 1e-12 {
            return Err(Error::InvalidMomentum {
                k,
                half_size: lattice.half_size,
            });
        }
        Ok(Self::from_index(n as i64, lattice))
    }

    /// Nearest allowed momentum to the requested dimensionless `k̃ = k·a`.
    pub fn snap(k_tilde: f64, lattice: &LatticeSpec) -> Self {
        let k = k_tilde / lattice.spacing as f64;
        let n = libm::round(k * lattice.sites() as f64 / (2.0 * PI)) as i64;
        Self::from_index(n, lattice)
    }

    pub fn index(&self) -> i64 {
        self.index
    }

    /// `k` in radians per site.
    pub fn value(&self) -> f64 {
        2.0 * PI * self.index as f64 / (2 * self.half_size + 1) as f64
    }

    /// `k̃ = k·a`.
    pub fn k_tilde(&self) -> f64 {
        self.value() * self.spacing as f64
    }
}

/// Position amplitudes `c_x = e^{−ikx}/√(2N+1)` of a momentum eigenstate.
pub fn momentum_state(m: &MomentumSpec, lattice: &LatticeSpec) -> Result<BTreeMap<i64, C64>> {
    if lattice.boundary != Boundary::Periodic {
        return Err(Error::InvalidParameter(
            "momentum eigenstates require a periodic lattice",
        ));
    }
    if m.half_size != lattice.half_size {
        return Err(Error::InvalidMomentum {
            k: m.value(),
            half_size: lattice.half_size,
        });
    }
    let norm = 1.0 / libm::sqrt(lattice.sites() as f64);
    let k = m.value();
    Ok((-lattice.half_size..=lattice.half_size)
        .map(|x| (x, cis(-k * x as f64) * norm))
        .collect())
}

/// Walker state: one coin vector of dimension `2n` per occupied site.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkState {
    flavor_count: usize,
    amplitudes: BTreeMap<i64, Vec<C64>>,
}

impl WalkState {
    /// Product state `|χ⟩ ⊗ Σ c_x |x⟩`.
    pub fn product(coin: &[C64], position: &BTreeMap<i64, C64>) -> Result<Self> {
        if coin.is_empty() || coin.len() % 2 == 1 {
            return Err(Error::InvalidParameter(
                "coin dimension must be a positive even number",
            ));
        }
        let amplitudes = position
            .iter()
            .map(|(&x, &c)| (x, coin.iter().map(|a| a * c).collect()))
            .collect();
        Ok(Self {
            flavor_count: coin.len() / 2,
            amplitudes,
        })
    }

    pub fn localized(coin: &[C64], x: i64) -> Result<Self> {
        let mut pos = BTreeMap::new();
        pos.insert(x, C64::new(1.0, 0.0));
        Self::product(coin, &pos)
    }

    pub fn from_amplitudes(
        flavor_count: usize,
        amplitudes: BTreeMap<i64, Vec<C64>>,
    ) -> Result<Self> {
        if flavor_count == 0 || amplitudes.values().any(|v| v.len() != 2 * flavor_count) {
            return Err(Error::DimensionMismatch {
                expected: 2 * flavor_count,
                found: amplitudes
                    .values()
                    .map(Vec::len)
                    .find(|&l| l != 2 * flavor_count)
                    .unwrap_or(0),
            });
        }
        Ok(Self {
            flavor_count,
            amplitudes,
        })
    }

    pub fn flavor_count(&self) -> usize {
        self.flavor_count
    }

    pub fn coin_dim(&self) -> usize {
        2 * self.flavor_count
    }

    pub fn amplitudes(&self) -> &BTreeMap<i64, Vec<C64>> {
        &self.amplitudes
    }

    pub fn amplitude(&self, x: i64) -> Option<&[C64]> {
        self.amplitudes.get(&x).map(Vec::as_slice)
    }

    /// `Σ_x ‖ψ_x‖²`.
    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes
            .values()
            .map(|v| crate::linalg::norm_sqr(v))
            .sum()
    }

    /// Sites carrying a non-zero amplitude.
    pub fn support(&self) -> impl Iterator<Item = i64> + '_ {
        self.amplitudes
            .iter()
            .filter(|(_, v)| v.iter().any(|a| *a != ZERO))
            .map(|(&x, _)| x)
    }
}

/// One walk step `S (⊕_f C_f ⊗ I)`.
pub fn apply_walk_step(
    state: &WalkState,
    coins: &[CMatrix],
    lattice: &LatticeSpec,
) -> Result<WalkState> {
    if coins.len() != state.flavor_count {
        return Err(Error::DimensionMismatch {
            expected: state.flavor_count,
            found: coins.len(),
        });
    }
    if let Some(c) = coins.iter().find(|c| c.rows() != 2 || c.cols() != 2) {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: c.rows().max(c.cols()),
        });
    }
    let dim = state.coin_dim();
    let a = lattice.spacing;
    let mut next: BTreeMap<i64, Vec<C64>> = BTreeMap::new();
    for (&x, psi) in &state.amplitudes {
        for (f, coin) in coins.iter().enumerate() {
            let up_in = psi[2 * f];
            let down_in = psi[2 * f + 1];
            let up = coin[(0, 0)] * up_in + coin[(0, 1)] * down_in;
            let down = coin[(1, 0)] * up_in + coin[(1, 1)] * down_in;
            if up != ZERO {
                let dest = lattice.place(x - a)?;
                next.entry(dest).or_insert_with(|| vec![ZERO; dim])[2 * f] += up;
            }
            if down != ZERO {
                let dest = lattice.place(x + a)?;
                next.entry(dest).or_insert_with(|| vec![ZERO; dim])[2 * f + 1] += down;
            }
        }
    }
    Ok(WalkState {
        flavor_count: state.flavor_count,
        amplitudes: next,
    })
}

/// `W^t |ψ⟩` by repeated steps.
pub fn evolve(
    state: &WalkState,
    coins: &[CMatrix],
    lattice: &LatticeSpec,
    steps: usize,
) -> Result<WalkState> {
    let mut s = state.clone();
    for _ in 0..steps {
        s = apply_walk_step(&s, coins, lattice)?;
    }
    Ok(s)
}

/// Single-sector momentum-space step `W_k = diag(e^{−ik̃}, e^{+ik̃}) C`.
///
/// This is how `W` acts on `|χ⟩ ⊗ |k⟩` for the phase convention of
/// [`momentum_state`]: `T₋|k⟩ = e^{−ik̃}|k⟩` and `T₊|k⟩ = e^{+ik̃}|k⟩`.
pub fn momentum_step_operator(coin: &CMatrix, k_tilde: f64) -> CMatrix {
    let phases = CMatrix::from_diagonal(&[cis(-k_tilde), cis(k_tilde)]);
    &phases * coin
}

/// Block momentum-space step for several sectors.
pub fn block_momentum_step_operator(coins: &[CMatrix], k_tilde: f64) -> CMatrix {
    let blocks: Vec<CMatrix> = coins
        .iter()
        .map(|c| momentum_step_operator(c, k_tilde))
        .collect();
    CMatrix::direct_sum(&blocks)
}

/// Walk dispersion `E = arccos(cos θ cos k̃)` on the principal branch, in units of 1/τ.
pub fn dispersion_energy(theta: f64, k_tilde: f64) -> f64 {
    let c = (libm::cos(theta) * libm::cos(k_tilde)).clamp(-1.0, 1.0);
    libm::acos(c)
}

/// Positive-energy eigenvector `(f, g)` of the Dirac-coin step `W_k`.
///
/// Satisfies `W_k (f, g)ᵀ = e^{−iE} (f, g)ᵀ` with `E = dispersion_energy(θ, k̃)`.
/// Fails at the massless forward mode, where the closed form is 0/0; see
/// [`mass_eigenvector_or_massless`] for the fallback.
pub fn mass_eigenvector(theta: f64, k_tilde: f64) -> Result<(C64, C64)> {
    let (ct, st) = (libm::cos(theta), libm::sin(theta));
    let (ck, sk) = (libm::cos(k_tilde), libm::sin(k_tilde));
    let sin_e = libm::sqrt((1.0 - ct * ct * ck * ck).max(0.0));
    // cos θ sin k − (1 − cos²θ cos²k)^{1/2}; rewritten as −sin²θ/(…) when
    // the two terms nearly cancel
    let bracket = if ct * sk > 0.0 {
        -(st * st) / (sin_e + ct * sk)
    } else {
        ct * sk - sin_e
    };
    let denom = libm::sqrt(st * st + bracket * bracket);
    if denom.is_nan() || denom < f64::MIN_POSITIVE {
        return Err(Error::DegenerateEigenvector { theta, k: k_tilde });
    }
    let f = cis(-k_tilde) * (st / denom);
    let g = I * (bracket / denom);
    Ok((f, g))
}

/// [`mass_eigenvector`], with `(f, g) = (1, 0)` at the degenerate massless point.
pub fn mass_eigenvector_or_massless(theta: f64, k_tilde: f64) -> (C64, C64) {
    mass_eigenvector(theta, k_tilde).unwrap_or((C64::new(1.0, 0.0), ZERO))
}

/// Reduced coin state `ρ_c = Σ_x ψ_x ψ_x†`.
pub fn reduce_to_coin(state: &WalkState) -> DensityMatrix {
    let dim = state.coin_dim();
    let terms: Vec<CMatrix> = state
        .amplitudes
        .values()
        .map(|psi| CMatrix::outer(psi, psi))
        .collect();
    DensityMatrix::from_matrix_unchecked(crate::linalg::pairwise_sum(&terms, dim, dim))
}
