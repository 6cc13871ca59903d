//! Flavor mixing and transition probabilities on top of the coin channel.
//!
//! Mass eigenstate `i` lives in coin sector `i` as the positive-energy
//! eigenvector `(f, g)` of that sector's momentum-space step. A flavor
//! state is `|ν_α⟩_c = Σ_i U_{αi} |ν_i⟩_c`, and the probability of finding
//! flavor `β` after `t` steps is `Tr[|ν_β⟩_c⟨ν_β|_c ρ_c(t)]`, where `ρ_c(t)`
//! comes from the block Kraus channel.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;

use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::kraus::{block_kraus, extend_kraus, initial_kraus, ExtendedKrausFamily};
use crate::linalg::{cis, CMatrix, C64, ZERO};
use crate::tol;
use crate::walk::{
    block_dirac_coin, dispersion_energy, mass_eigenvector_or_massless, momentum_state, Boundary,
    LatticeSpec, MomentumSpec,
};

/// `Δm² L / 4E` per eV²·km/GeV, with ħ = c = 1.
pub const PHASE_PER_EV2_KM_PER_GEV: f64 = 1.266_932_679_815_373;

/// Three-flavor mixing angles and phases.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixingSpec {
    pub phi12: f64,
    pub phi13: f64,
    pub phi23: f64,
    pub delta_cp: f64,
    /// Majorana phases.
    pub alpha1: f64,
    pub alpha2: f64,
}

impl MixingSpec {
    pub fn new(phi12: f64, phi13: f64, phi23: f64, delta_cp: f64) -> Self {
        Self {
            phi12,
            phi13,
            phi23,
            delta_cp,
            alpha1: 0.0,
            alpha2: 0.0,
        }
    }

    pub fn with_majorana(mut self, alpha1: f64, alpha2: f64) -> Self {
        self.alpha1 = alpha1;
        self.alpha2 = alpha2;
        self
    }
}

/// The 3×3 factors `[U₀, U₁, U₂, U₃]` with `U = U₃U₂U₁U₀`.
pub fn pmns_factors(m: &MixingSpec) -> [CMatrix; 4] {
    let (c12, s12) = (libm::cos(m.phi12), libm::sin(m.phi12));
    let (c13, s13) = (libm::cos(m.phi13), libm::sin(m.phi13));
    let (c23, s23) = (libm::cos(m.phi23), libm::sin(m.phi23));
    let one = C64::new(1.0, 0.0);
    let r = |x: f64| C64::new(x, 0.0);

    let u0 = CMatrix::from_diagonal(&[cis(m.alpha1 / 2.0), cis(m.alpha2 / 2.0), one]);
    let u1 = CMatrix::from_real_rows(&[[c12, s12, 0.0], [-s12, c12, 0.0], [0.0, 0.0, 1.0]]);
    let u2 = CMatrix::from_rows(&[
        [r(c13), ZERO, cis(-m.delta_cp) * s13],
        [ZERO, one, ZERO],
        [-(cis(m.delta_cp) * s13), ZERO, r(c13)],
    ]);
    let u3 = CMatrix::from_real_rows(&[[1.0, 0.0, 0.0], [0.0, c23, s23], [0.0, -s23, c23]]);
    [u0, u1, u2, u3]
}

/// PMNS matrix, rows `(e, μ, τ)`, columns mass states `(1, 2, 3)`.
pub fn pmns_matrix(m: &MixingSpec) -> CMatrix {
    let [u0, u1, u2, u3] = pmns_factors(m);
    &(&(&u3 * &u2) * &u1) * &u0
}

/// Two-flavor rotation `[[cos φ, sin φ], [−sin φ, cos φ]]`.
pub fn two_flavor_mixing(phi: f64) -> CMatrix {
    let (c, s) = (libm::cos(phi), libm::sin(phi));
    CMatrix::from_real_rows(&[[c, s], [-s, c]])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mixing {
    /// Single angle φ; flavors are `(μ, τ)`.
    TwoFlavor { phi: f64 },
    /// Full PMNS; flavors are `(e, μ, τ)`.
    ThreeFlavor(MixingSpec),
}

impl Mixing {
    pub fn flavor_count(&self) -> usize {
        match self {
            Mixing::TwoFlavor { .. } => 2,
            Mixing::ThreeFlavor(_) => 3,
        }
    }

    pub fn matrix(&self) -> CMatrix {
        match self {
            Mixing::TwoFlavor { phi } => two_flavor_mixing(*phi),
            Mixing::ThreeFlavor(m) => pmns_matrix(m),
        }
    }
}

/// Short flavor labels in row order of the mixing matrix.
pub fn flavor_labels(n_flavors: usize) -> &'static [&'static str] {
    match n_flavors {
        2 => &["mu", "tau"],
        _ => &["e", "mu", "tau"],
    }
}

/// How mass-state energies are evaluated in closed-form probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnergyModel {
    /// `E = arccos(cos θ cos k̃)`.
    WalkDispersion,
    /// `E = k̃ + θ²/(2k̃)`.
    UltraRelativistic,
}

/// Initial position state of the walker.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialPosition {
    /// Lattice momentum eigenstate at the snapped `k̃` (periodic lattice).
    Momentum,
    /// Walker at a single site.
    Localized(i64),
    /// Arbitrary normalized amplitudes.
    Amplitudes(BTreeMap<i64, C64>),
}

/// Everything needed to run one oscillation experiment on the walk.
#[derive(Debug, Clone, PartialEq)]
pub struct FlavorScenario {
    /// One coin angle `θ_f = m_f τ` per mass state.
    pub coin_angles: Vec<f64>,
    /// Requested `k̃`; snapped to the nearest allowed lattice momentum.
    pub k_tilde: f64,
    pub lattice: LatticeSpec,
    pub mixing: Mixing,
    /// Row index into the mixing matrix.
    pub initial_flavor: usize,
    pub steps: usize,
    pub initial_position: InitialPosition,
}

impl FlavorScenario {
    /// Momentum-eigenstate scenario on a periodic lattice with unit spacing.
    pub fn momentum(
        coin_angles: Vec<f64>,
        k_tilde: f64,
        half_size: i64,
        mixing: Mixing,
        initial_flavor: usize,
        steps: usize,
    ) -> Result<Self> {
        let s = Self {
            coin_angles,
            k_tilde,
            lattice: LatticeSpec::periodic(half_size)?,
            mixing,
            initial_flavor,
            steps,
            initial_position: InitialPosition::Momentum,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.mixing.flavor_count();
        if self.coin_angles.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: self.coin_angles.len(),
            });
        }
        if self.coin_angles.iter().any(|t| !t.is_finite()) || !self.k_tilde.is_finite() {
            return Err(Error::InvalidParameter(
                "angles and momentum must be finite",
            ));
        }
        if self.initial_flavor >= n {
            return Err(Error::InvalidParameter("initial flavor index out of range"));
        }
        match &self.initial_position {
            InitialPosition::Momentum if self.lattice.boundary() != Boundary::Periodic => Err(
                Error::InvalidParameter("momentum eigenstates require a periodic lattice"),
            ),
            InitialPosition::Localized(x) if !self.lattice.contains(*x) => Err(
                Error::InvalidParameter("initial position lies outside the lattice"),
            ),
            _ => Ok(()),
        }
    }

    pub fn n_flavors(&self) -> usize {
        self.coin_angles.len()
    }

    pub fn momentum_spec(&self) -> MomentumSpec {
        MomentumSpec::snap(self.k_tilde, &self.lattice)
    }

    /// The `k̃` used for mass eigenvectors and energies: snapped to the
    /// lattice for momentum starts, as requested otherwise.
    pub fn snapped_k_tilde(&self) -> f64 {
        match self.initial_position {
            InitialPosition::Momentum => self.momentum_spec().k_tilde(),
            _ => self.k_tilde,
        }
    }

    /// `|k̃_snapped − k̃_requested|`.
    pub fn snap_distance(&self) -> f64 {
        (self.snapped_k_tilde() - self.k_tilde).abs()
    }

    pub fn mixing_matrix(&self) -> CMatrix {
        self.mixing.matrix()
    }

    pub fn block_coin(&self) -> CMatrix {
        block_dirac_coin(&self.coin_angles)
    }

    /// Mass-state energies at the snapped momentum.
    pub fn energies(&self, model: EnergyModel) -> Vec<f64> {
        let k = self.snapped_k_tilde();
        self.coin_angles
            .iter()
            .map(|&th| match model {
                EnergyModel::WalkDispersion => dispersion_energy(th, k),
                EnergyModel::UltraRelativistic => k + th * th / (2.0 * k),
            })
            .collect()
    }

    /// Position amplitudes of the initial walker state.
    pub fn position_amplitudes(&self) -> Result<BTreeMap<i64, C64>> {
        match &self.initial_position {
            InitialPosition::Momentum => momentum_state(&self.momentum_spec(), &self.lattice),
            InitialPosition::Localized(x) => {
                let mut m = BTreeMap::new();
                m.insert(*x, C64::new(1.0, 0.0));
                Ok(m)
            }
            InitialPosition::Amplitudes(a) => Ok(a.clone()),
        }
    }

    /// Block Kraus family at `t = 0` for this scenario's initial position.
    pub fn initial_family(&self) -> Result<ExtendedKrausFamily> {
        let amps = self.position_amplitudes()?;
        let sector = extend_kraus(&initial_kraus(), &amps, Some(&self.lattice))?;
        let sectors = vec![sector; self.n_flavors()];
        block_kraus(&sectors)
    }
}

/// `|ν_f⟩_c`: the sector-`f` mass eigenvector, zero elsewhere.
pub fn mass_state_coin(f: usize, scenario: &FlavorScenario) -> Vec<C64> {
    let n = scenario.n_flavors();
    let (fc, gc) =
        mass_eigenvector_or_massless(scenario.coin_angles[f], scenario.snapped_k_tilde());
    let mut v = vec![ZERO; 2 * n];
    v[2 * f] = fc;
    v[2 * f + 1] = gc;
    v
}

/// `|ν_α⟩_c = Σ_i U_{αi} |ν_i⟩_c`.
pub fn flavor_state_coin(alpha: usize, scenario: &FlavorScenario) -> Vec<C64> {
    let u = scenario.mixing_matrix();
    let n = scenario.n_flavors();
    let mut v = vec![ZERO; 2 * n];
    for i in 0..n {
        let m = mass_state_coin(i, scenario);
        for (acc, x) in v.iter_mut().zip(&m) {
            *acc += u[(alpha, i)] * x;
        }
    }
    v
}

/// `ρ_c(0) = |ν_α⟩_c⟨ν_α|_c`.
pub fn flavor_density(alpha: usize, scenario: &FlavorScenario) -> Result<DensityMatrix> {
    DensityMatrix::pure(&flavor_state_coin(alpha, scenario))
}

/// Probabilities at one step plus channel diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionRow {
    pub step: usize,
    /// `P(α → β)` for every `β` in flavor order.
    pub probabilities: Vec<f64>,
    /// `max |Σ K†K − I|` of the family used at this step.
    pub completeness_residual: f64,
    /// `Tr ρ_c(t)²`.
    pub purity: f64,
}

impl TransitionRow {
    pub fn total(&self) -> f64 {
        self.probabilities.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransitionSeries {
    pub initial_flavor: usize,
    pub n_flavors: usize,
    /// Momentum actually simulated.
    pub k_tilde: f64,
    pub rows: Vec<TransitionRow>,
}

impl TransitionSeries {
    /// `P(α → β)` over all steps.
    pub fn column(&self, beta: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r.probabilities[beta]).collect()
    }

    pub fn max_completeness_residual(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| r.completeness_residual)
            .fold(0.0, f64::max)
    }
}

/// `P(α → β; t)` for `t = 0..=steps` from the block Kraus channel.
///
/// The extended family is advanced in place with the recurrence, which is
/// equivalent to extending `K_x(t)` at every step but costs one pass over
/// the lattice per step.
pub fn walk_transition_series(scenario: &FlavorScenario) -> Result<TransitionSeries> {
    scenario.validate()?;
    let n = scenario.n_flavors();
    let coin = scenario.block_coin();
    let spacing = scenario.lattice.spacing();
    let rho0 = flavor_density(scenario.initial_flavor, scenario)?;
    let targets: Vec<Vec<C64>> = (0..n).map(|b| flavor_state_coin(b, scenario)).collect();

    let mut family = scenario.initial_family()?;
    let mut rows = Vec::with_capacity(scenario.steps + 1);
    for t in 0..=scenario.steps {
        if t > 0 {
            family = family.advance(&coin, spacing, Some(&scenario.lattice))?;
        }
        let rho = crate::kraus::apply_channel(&family, &rho0)?;
        rows.push(TransitionRow {
            step: t,
            probabilities: targets.iter().map(|v| rho.expectation(v)).collect(),
            completeness_residual: family.completeness_residual(),
            purity: rho.purity(),
        });
    }
    Ok(TransitionSeries {
        initial_flavor: scenario.initial_flavor,
        n_flavors: n,
        k_tilde: scenario.snapped_k_tilde(),
        rows,
    })
}

/// `Ũ_{αβ}(t) = Σ_j U_{αj} U*_{βj} e^{−iE_j t}`.
///
/// This is the overlap `⟨ν_β|ν_α(t)⟩` for `|ν_α⟩ = Σ_j U_{αj}|ν_j⟩`, the
/// same flavor convention the coin-space states use. `t` may be fractional.
pub fn flavor_amplitude(
    alpha: usize,
    beta: usize,
    t: f64,
    scenario: &FlavorScenario,
    model: EnergyModel,
) -> C64 {
    let u = scenario.mixing_matrix();
    let e = scenario.energies(model);
    (0..scenario.n_flavors())
        .map(|j| u[(alpha, j)] * u[(beta, j)].conj() * cis(-e[j] * t))
        .sum()
}

/// Plane-wave probability `|Ũ_{αβ}(t)|²`.
pub fn analytic_transition(
    alpha: usize,
    beta: usize,
    t: f64,
    scenario: &FlavorScenario,
    model: EnergyModel,
) -> f64 {
    flavor_amplitude(alpha, beta, t, scenario, model).norm_sqr()
}

/// Closed-form series over the same steps as [`walk_transition_series`].
pub fn analytic_series(scenario: &FlavorScenario, model: EnergyModel) -> TransitionSeries {
    let n = scenario.n_flavors();
    let alpha = scenario.initial_flavor;
    let rows = (0..=scenario.steps)
        .map(|t| TransitionRow {
            step: t,
            probabilities: (0..n)
                .map(|b| analytic_transition(alpha, b, t as f64, scenario, model))
                .collect(),
            completeness_residual: 0.0,
            purity: 1.0,
        })
        .collect();
    TransitionSeries {
        initial_flavor: alpha,
        n_flavors: n,
        k_tilde: scenario.snapped_k_tilde(),
        rows,
    }
}

/// Inputs tying walk steps to a physical baseline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkCalibration {
    pub k_tilde: f64,
    /// Angle of the lightest state, `θ₁`.
    pub theta_ref: f64,
    /// Neutrino energy in GeV.
    pub energy_gev: f64,
    /// Baseline covered by one walk step, in km.
    pub km_per_step: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WalkAngles {
    /// `θ₁, θ₂, …`.
    pub thetas: Vec<f64>,
    /// Oscillation phase `Δm²L/4E` accumulated per step, per eV² of splitting.
    pub phase_per_step_per_ev2: f64,
    /// Some angle exceeds the small-angle regime (0.3 rad).
    pub beyond_small_angle: bool,
}

/// Coin angles whose per-step oscillation phase matches `Δm²_{j1} L / 4E`.
///
/// `delta_m2` holds `Δm²_{21}, Δm²_{31}, …` in eV². With the ultra-relativistic
/// model `θ_j = √(θ₁² + Δθ²_{j1})` and `Δθ²_{j1}/4k̃ = Δm²_{j1}L/4E` per step.
/// With the walk dispersion the angles are solved so that
/// `E_j − E_1 = 2 Δm²_{j1}L/4E` per step holds exactly.
pub fn physics_to_walk(
    delta_m2: &[f64],
    cal: &WalkCalibration,
    model: EnergyModel,
) -> Result<WalkAngles> {
    if [cal.k_tilde, cal.energy_gev, cal.km_per_step]
        .iter()
        .any(|&v| v.is_nan() || v <= 0.0)
    {
        return Err(Error::InvalidParameter(
            "k_tilde, energy and km per step must be positive",
        ));
    }
    let phase = PHASE_PER_EV2_KM_PER_GEV * cal.km_per_step / cal.energy_gev;
    let th1 = cal.theta_ref;
    let mut thetas = vec![th1];
    for &dm2 in delta_m2 {
        let th = match model {
            EnergyModel::UltraRelativistic => {
                let d_theta2 = 4.0 * cal.k_tilde * phase * dm2;
                let sq = th1 * th1 + d_theta2;
                if sq <= 0.0 {
                    return Err(Error::InfeasibleAngles { theta: 0.0 });
                }
                libm::sqrt(sq)
            }
            EnergyModel::WalkDispersion => {
                let e = dispersion_energy(th1, cal.k_tilde) + 2.0 * phase * dm2;
                let c = libm::cos(e) / libm::cos(cal.k_tilde);
                if !(-1.0..=1.0).contains(&c) || e > core::f64::consts::PI {
                    return Err(Error::InfeasibleAngles { theta: f64::NAN });
                }
                libm::acos(c)
            }
        };
        thetas.push(th);
    }
    if let Some(&bad) = thetas.iter().find(|&&t| !(t > 0.0 && t < FRAC_PI_2)) {
        return Err(Error::InfeasibleAngles { theta: bad });
    }
    Ok(WalkAngles {
        beyond_small_angle: thetas.iter().any(|&t| t > tol::SMALL_ANGLE_WARN),
        thetas,
        phase_per_step_per_ev2: phase,
    })
}
