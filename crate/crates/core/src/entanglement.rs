//! Mode entanglement of the flavor state.
//!
//! A flavor state evolving as `|ν_α(t)⟩ = Σ_β Ũ_{αβ}(t) |ν_β⟩` is read in
//! occupation-number form: flavor `β` is a qubit, occupied when the neutrino
//! is in that flavor. The state is then a superposition of one-hot strings,
//! `|100⟩, |010⟩, |001⟩` for three flavors.
//!
//! Entropies here are linear entropies `S = 2(1 − Tr ρ²)` of reduced states.
//! For one mode `S = 4P(1 − P)`.

use alloc::vec;
use alloc::vec::Vec;

use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64, ZERO};
use crate::neutrino::{flavor_amplitude, EnergyModel, FlavorScenario, TransitionSeries};
use crate::tol;

/// `2 (1 − Tr ρ²)`.
pub fn linear_entropy(rho: &DensityMatrix) -> f64 {
    2.0 * (1.0 - rho.purity())
}

/// Flavor amplitudes of a single-particle state in mode form.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeState {
    amplitudes: Vec<C64>,
}

impl ModeState {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        let n = crate::linalg::norm_sqr(&amplitudes);
        if amplitudes.is_empty() || (n - 1.0).abs() > tol::EIGEN {
            return Err(Error::UnnormalizedInput { norm_sqr: n });
        }
        Ok(Self { amplitudes })
    }

    pub fn modes(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Basis index of "only mode `beta` occupied"; mode 0 is the leftmost bit.
    pub fn one_hot_index(&self, beta: usize) -> usize {
        1 << (self.modes() - 1 - beta)
    }

    /// Full `2ⁿ` occupation-number state vector.
    pub fn occupation_vector(&self) -> Vec<C64> {
        let mut v = vec![ZERO; 1 << self.modes()];
        for (b, a) in self.amplitudes.iter().enumerate() {
            v[self.one_hot_index(b)] = *a;
        }
        v
    }

    /// Reduced state of the modes in `keep` (in the given order), tracing out
    /// the rest of the occupation-number register.
    pub fn reduced_density(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let n = self.modes();
        if keep.iter().any(|&m| m >= n) {
            return Err(Error::InvalidParameter("mode index out of range"));
        }
        let psi = self.occupation_vector();
        let traced: Vec<usize> = (0..n).filter(|m| !keep.contains(m)).collect();
        let bit = |m: usize| 1usize << (n - 1 - m);
        let compose = |kept_bits: usize, traced_bits: usize| {
            let mut idx = 0;
            for (i, &m) in keep.iter().enumerate() {
                if kept_bits >> (keep.len() - 1 - i) & 1 == 1 {
                    idx |= bit(m);
                }
            }
            for (i, &m) in traced.iter().enumerate() {
                if traced_bits >> (traced.len() - 1 - i) & 1 == 1 {
                    idx |= bit(m);
                }
            }
            idx
        };
        let d = 1 << keep.len();
        let mut rho = CMatrix::zeros(d, d);
        for r in 0..(1 << traced.len()) {
            for a in 0..d {
                let pa = psi[compose(a, r)];
                if pa == ZERO {
                    continue;
                }
                for b in 0..d {
                    rho[(a, b)] += pa * psi[compose(b, r)].conj();
                }
            }
        }
        Ok(DensityMatrix::from_matrix_unchecked(rho))
    }

    /// Linear entropy of mode `beta` against all others.
    pub fn mode_entropy(&self, beta: usize) -> Result<f64> {
        Ok(linear_entropy(&self.reduced_density(&[beta])?))
    }
}

/// Mode state of `|ν_α(t)⟩` at (possibly fractional) time `t`.
pub fn mode_state(
    alpha: usize,
    t: f64,
    scenario: &FlavorScenario,
    model: EnergyModel,
) -> Result<ModeState> {
    let amps = (0..scenario.n_flavors())
        .map(|b| flavor_amplitude(alpha, b, t, scenario, model))
        .collect();
    ModeState::new(amps)
}

/// Two-flavor entanglement `S_α(t) = 4 P(α→α) P(α→β)`.
pub fn two_flavor_entropy(
    alpha: usize,
    t: f64,
    scenario: &FlavorScenario,
    model: EnergyModel,
) -> Result<f64> {
    if scenario.n_flavors() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: scenario.n_flavors(),
        });
    }
    mode_state(alpha, t, scenario, model)?.mode_entropy(0)
}

/// Linear entropy of the pair left after tracing out mode `traced`.
///
/// For a one-hot state this equals the entropy of mode `traced` itself,
/// `4 P_γ (1 − P_γ)`.
pub fn partial_entropy(
    alpha: usize,
    traced: usize,
    t: f64,
    scenario: &FlavorScenario,
    model: EnergyModel,
) -> Result<f64> {
    let state = mode_state(alpha, t, scenario, model)?;
    let keep: Vec<usize> = (0..state.modes()).filter(|&m| m != traced).collect();
    if keep.len() + 1 != state.modes() {
        return Err(Error::InvalidParameter("mode index out of range"));
    }
    Ok(linear_entropy(&state.reduced_density(&keep)?))
}

/// Mean of the partial entropies over the three traced modes.
pub fn average_entropy(
    alpha: usize,
    t: f64,
    scenario: &FlavorScenario,
    model: EnergyModel,
) -> Result<f64> {
    if scenario.n_flavors() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: scenario.n_flavors(),
        });
    }
    let mut acc = 0.0;
    for g in 0..3 {
        acc += partial_entropy(alpha, g, t, scenario, model)?;
    }
    Ok(acc / 3.0)
}

/// `4 P (1 − P)` for the probability of one mode.
pub fn entropy_from_probability(p: f64) -> f64 {
    4.0 * p * (1.0 - p)
}

/// `(8/3)(P₀P₁ + P₀P₂ + P₁P₂)`, the three-mode average from probabilities.
pub fn average_entropy_from_probabilities(p: &[f64; 3]) -> f64 {
    8.0 / 3.0 * (p[0] * p[1] + p[0] * p[2] + p[1] * p[2])
}

/// Entropies at one step, computed from walk probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyRow {
    pub step: usize,
    /// Two flavors: a single entry `4 P₀ P₁`. Three flavors: `4 P_γ(1 − P_γ)`
    /// for each traced mode `γ`.
    pub partial: Vec<f64>,
    /// Three-flavor average, absent for two flavors.
    pub average: Option<f64>,
}

/// Entropy columns for a transition series.
///
/// Uses the probabilities as produced, so a run whose rows do not sum to
/// one (localized starts) yields entropies of the measured populations.
pub fn entropy_report(series: &TransitionSeries) -> Vec<EntropyRow> {
    series
        .rows
        .iter()
        .map(|r| {
            let p = &r.probabilities;
            if p.len() == 2 {
                EntropyRow {
                    step: r.step,
                    partial: vec![4.0 * p[0] * p[1]],
                    average: None,
                }
            } else {
                let partial: Vec<f64> = p.iter().map(|&x| entropy_from_probability(x)).collect();
                let average =
                    (p.len() == 3).then(|| average_entropy_from_probabilities(&[p[0], p[1], p[2]]));
                EntropyRow {
                    step: r.step,
                    partial,
                    average,
                }
            }
        })
        .collect()
}
