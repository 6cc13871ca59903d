//! Three-qubit one-hot encoding of flavor states.
//!
//! `ν_e → |100⟩`, `ν_μ → |010⟩`, `ν_τ → |001⟩`, with `|ijk⟩` at basis index
//! `4i + 2j + k`. Each 3×3 mixing factor becomes an 8×8 unitary that mixes
//! the one-hot strings and leaves every other basis state alone.

use crate::linalg::{cis, CMatrix, C64, ONE, ZERO};
use crate::neutrino::{pmns_factors, MixingSpec};

/// Basis indices of `(e, μ, τ)`.
pub const ONE_HOT_INDICES: [usize; 3] = [4, 2, 1];

/// Flavor to three-qubit index mapping.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct OneHotBasis;

impl OneHotBasis {
    /// Basis index of flavor `alpha` (0 = e, 1 = μ, 2 = τ).
    pub fn index(&self, alpha: usize) -> usize {
        ONE_HOT_INDICES[alpha]
    }

    /// `|ijk⟩` label of an index, e.g. `"100"`.
    pub fn label(index: usize) -> [u8; 3] {
        [
            b'0' + ((index >> 2) & 1) as u8,
            b'0' + ((index >> 1) & 1) as u8,
            b'0' + (index & 1) as u8,
        ]
    }

    pub fn is_one_hot(index: usize) -> bool {
        index < 8 && index.count_ones() == 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Factor {
    U0,
    U1,
    U2,
    U3,
}

impl Factor {
    pub const ALL: [Factor; 4] = [Factor::U0, Factor::U1, Factor::U2, Factor::U3];

    pub fn name(&self) -> &'static str {
        match self {
            Factor::U0 => "U0",
            Factor::U1 => "U1",
            Factor::U2 => "U2",
            Factor::U3 => "U3",
        }
    }

    fn position(&self) -> usize {
        *self as usize
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddedFactor {
    pub which: Factor,
    pub matrix: CMatrix,
}

/// Places a 3×3 flavor-space operator on the one-hot indices of an 8×8
/// identity.
pub fn lift_one_hot(m: &CMatrix) -> CMatrix {
    let mut out = CMatrix::identity(8);
    for (a, &ia) in ONE_HOT_INDICES.iter().enumerate() {
        for (b, &ib) in ONE_HOT_INDICES.iter().enumerate() {
            out[(ia, ib)] = m[(a, b)];
        }
    }
    out
}

/// Reads the 3×3 block on the one-hot indices, in flavor order.
pub fn restrict_one_hot(m: &CMatrix) -> CMatrix {
    let mut out = CMatrix::zeros(3, 3);
    for (a, &ia) in ONE_HOT_INDICES.iter().enumerate() {
        for (b, &ib) in ONE_HOT_INDICES.iter().enumerate() {
            out[(a, b)] = m[(ia, ib)];
        }
    }
    out
}

/// The 8×8 form of one factor, entry by entry.
pub fn embed_factor(which: Factor, m: &MixingSpec) -> EmbeddedFactor {
    let mut u = CMatrix::identity(8);
    match which {
        Factor::U0 => {
            u[(2, 2)] = cis(m.alpha2 / 2.0);
            u[(4, 4)] = cis(m.alpha1 / 2.0);
        }
        Factor::U1 => {
            let (c, s) = (libm::cos(m.phi12), libm::sin(m.phi12));
            u[(2, 2)] = C64::new(c, 0.0);
            u[(2, 4)] = C64::new(-s, 0.0);
            u[(4, 2)] = C64::new(s, 0.0);
            u[(4, 4)] = C64::new(c, 0.0);
        }
        Factor::U2 => {
            let (c, s) = (libm::cos(m.phi13), libm::sin(m.phi13));
            u[(1, 1)] = C64::new(c, 0.0);
            u[(1, 4)] = -(cis(m.delta_cp) * s);
            u[(4, 1)] = cis(-m.delta_cp) * s;
            u[(4, 4)] = C64::new(c, 0.0);
        }
        Factor::U3 => {
            let (c, s) = (libm::cos(m.phi23), libm::sin(m.phi23));
            u[(1, 1)] = C64::new(c, 0.0);
            u[(1, 2)] = C64::new(-s, 0.0);
            u[(2, 1)] = C64::new(s, 0.0);
            u[(2, 2)] = C64::new(c, 0.0);
        }
    }
    EmbeddedFactor { which, matrix: u }
}

/// `U₃ U₂ U₁ U₀` on three qubits.
pub fn embedded_product(m: &MixingSpec) -> CMatrix {
    let f = |w| embed_factor(w, m).matrix;
    &(&(&f(Factor::U3) * &f(Factor::U2)) * &f(Factor::U1)) * &f(Factor::U0)
}

/// Two-qubit block acting on `|ij⟩` when the last qubit is 0: the `c₁₂`
/// rotation between `|01⟩` and `|10⟩`.
pub fn controlled_block(m: &MixingSpec) -> CMatrix {
    let (c, s) = (libm::cos(m.phi12), libm::sin(m.phi12));
    CMatrix::from_real_rows(&[
        [1.0, 0.0, 0.0, 0.0],
        [0.0, c, -s, 0.0],
        [0.0, s, c, 0.0],
        [0.0, 0.0, 0.0, 1.0],
    ])
}

/// `|ij1⟩ → |ij1⟩`, `|ij0⟩ → (B|ij⟩) ⊗ |0⟩`.
pub fn controlled_on_last_zero(block: &CMatrix) -> CMatrix {
    let mut out = CMatrix::zeros(8, 8);
    for r in 0..4 {
        for c in 0..4 {
            out[(2 * r, 2 * c)] = block[(r, c)];
        }
        out[(2 * r + 1, 2 * r + 1)] = ONE;
    }
    out
}

/// Whether the `c₁₂` factor equals the controlled operation built from
/// [`controlled_block`], to 1e-12.
pub fn controlled_reading_check(m: &MixingSpec) -> bool {
    let direct = embed_factor(Factor::U1, m).matrix;
    controlled_on_last_zero(&controlled_block(m)).max_abs_diff(&direct) < 1e-12
}

/// Largest entry of `U − I` outside the rows and columns in `support`.
pub fn complement_residual(u: &CMatrix, support: &[usize]) -> f64 {
    let mut worst: f64 = 0.0;
    for r in 0..u.rows() {
        for c in 0..u.cols() {
            if support.contains(&r) && support.contains(&c) {
                continue;
            }
            let target = if r == c { ONE } else { ZERO };
            worst = worst.max((u[(r, c)] - target).norm());
        }
    }
    worst
}

/// Lifts of the 3×3 factors, in the same order as [`Factor::ALL`].
pub fn lifted_factors(m: &MixingSpec) -> [CMatrix; 4] {
    pmns_factors(m).map(|f| lift_one_hot(&f))
}

impl EmbeddedFactor {
    /// The 3×3 factor this matrix encodes.
    pub fn flavor_block(&self) -> CMatrix {
        restrict_one_hot(&self.matrix)
    }

    /// Lift of the matching 3×3 factor.
    pub fn lifted_reference(&self, m: &MixingSpec) -> CMatrix {
        lifted_factors(m)[self.which.position()].clone()
    }
}
