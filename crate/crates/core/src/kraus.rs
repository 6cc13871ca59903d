//! Kraus operators of the reduced coin channel.
//!
//! Tracing the walker position out of `W^t (ρ_c ⊗ |ψ⟩⟨ψ|) W^t†` leaves the
//! channel `ρ_c ↦ Σ_x K̃_x ρ_c K̃_x†` with `K̃_x(t) = ⟨x|W^t|ψ⟩`. For a walker
//! starting at the origin the operators obey
//!
//! ```text
//! K_x(t+1) = C↑ K_{x+a}(t) + C↓ K_{x−a}(t),    K_x(0) = δ_{x,0} I
//! ```
//!
//! where `C↑ = |↑⟩⟨↑|C` and `C↓ = |↓⟩⟨↓|C`. Any other initial position
//! state is a linear combination of shifted copies of these.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::linalg::{pairwise_sum, CMatrix, C64, ZERO};
use crate::tol;
use crate::walk::LatticeSpec;

/// `{K_x(t)}` for a walker started at the origin, single 2-dimensional sector.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausFamily {
    step: usize,
    ops: BTreeMap<i64, CMatrix>,
}

impl KrausFamily {
    pub fn step(&self) -> usize {
        self.step
    }

    pub fn ops(&self) -> &BTreeMap<i64, CMatrix> {
        &self.ops
    }

    pub fn get(&self, x: i64) -> Option<&CMatrix> {
        self.ops.get(&x)
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// `max |Σ_x K_x†K_x − I|`.
    pub fn completeness_residual(&self) -> f64 {
        completeness_residual(&self.ops, 2)
    }
}

/// `{0 ↦ I}`.
pub fn initial_kraus() -> KrausFamily {
    let mut ops = BTreeMap::new();
    ops.insert(0, CMatrix::identity(2));
    KrausFamily { step: 0, ops }
}

/// Advances the family by one step of the recurrence on the infinite line.
pub fn kraus_step(family: &KrausFamily, coin: &CMatrix, spacing: i64) -> KrausFamily {
    let ops =
        advance(&family.ops, coin, spacing, Ok).expect("infinite line never rejects a position");
    KrausFamily {
        step: family.step + 1,
        ops,
    }
}

/// `{K_x(t)}` by iterating the recurrence from [`initial_kraus`].
pub fn kraus_at(steps: usize, coin: &CMatrix, spacing: i64) -> KrausFamily {
    let mut fam = initial_kraus();
    for _ in 0..steps {
        fam = kraus_step(&fam, coin, spacing);
    }
    fam
}

/// Kraus operators for an arbitrary initial position state, possibly with
/// several flavor sectors (`dim = 2n`, block diagonal).
#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedKrausFamily {
    step: usize,
    dim: usize,
    ops: BTreeMap<i64, CMatrix>,
}

impl ExtendedKrausFamily {
    pub fn step(&self) -> usize {
        self.step
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ops(&self) -> &BTreeMap<i64, CMatrix> {
        &self.ops
    }

    pub fn get(&self, x: i64) -> Option<&CMatrix> {
        self.ops.get(&x)
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn completeness_residual(&self) -> f64 {
        completeness_residual(&self.ops, self.dim)
    }

    /// One step of the recurrence applied directly to the extended operators.
    ///
    /// `coin` is the full `dim × dim` coin (block diagonal for several
    /// sectors). With `lattice = None` the walk runs on the infinite line;
    /// otherwise positions are folded (periodic) or bounds-checked (open).
    pub fn advance(
        &self,
        coin: &CMatrix,
        spacing: i64,
        lattice: Option<&LatticeSpec>,
    ) -> Result<Self> {
        if coin.rows() != self.dim || coin.cols() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: coin.rows(),
            });
        }
        let ops = match lattice {
            Some(l) => advance(&self.ops, coin, spacing, |x| l.place(x))?,
            None => advance(&self.ops, coin, spacing, Ok)?,
        };
        Ok(Self {
            step: self.step + 1,
            dim: self.dim,
            ops,
        })
    }
}

impl From<KrausFamily> for ExtendedKrausFamily {
    fn from(f: KrausFamily) -> Self {
        Self {
            step: f.step,
            dim: 2,
            ops: f.ops,
        }
    }
}

/// `K̃_x(t) = Σ_{x'} c_{x'} K_{x−x'}(t)`.
///
/// On a periodic lattice the target position is folded into `−N..=N`;
/// on an open lattice positions outside the lattice are an error.
pub fn extend_kraus(
    family: &KrausFamily,
    amplitudes: &BTreeMap<i64, C64>,
    lattice: Option<&LatticeSpec>,
) -> Result<ExtendedKrausFamily> {
    let n: f64 = amplitudes.values().map(|c| c.norm_sqr()).sum();
    if (n - 1.0).abs() > tol::UNITARY {
        return Err(Error::UnnormalizedInput { norm_sqr: n });
    }
    let mut ops: BTreeMap<i64, CMatrix> = BTreeMap::new();
    for (&x0, &c) in amplitudes {
        if c == ZERO {
            continue;
        }
        for (&y, k) in &family.ops {
            let x = match lattice {
                Some(l) => l.place(x0 + y)?,
                None => x0 + y,
            };
            let term = k.scale(c);
            match ops.get_mut(&x) {
                Some(acc) => *acc += &term,
                None => {
                    ops.insert(x, term);
                }
            }
        }
    }
    prune(&mut ops);
    Ok(ExtendedKrausFamily {
        step: family.step,
        dim: 2,
        ops,
    })
}

/// Block-diagonal operators `⊕_f K̃_x(θ_f, t)` over the union of positions.
///
/// A sector without an operator at some position contributes a zero block.
pub fn block_kraus(sectors: &[ExtendedKrausFamily]) -> Result<ExtendedKrausFamily> {
    let first = sectors.first().ok_or(Error::InvalidParameter(
        "block_kraus needs at least one sector",
    ))?;
    if let Some(bad) = sectors.iter().find(|s| s.step != first.step) {
        return Err(Error::StepMismatch {
            expected: first.step,
            found: bad.step,
        });
    }
    let dim: usize = sectors.iter().map(|s| s.dim).sum();
    let mut positions: Vec<i64> = sectors.iter().flat_map(|s| s.ops.keys().copied()).collect();
    positions.sort_unstable();
    positions.dedup();
    let ops = positions
        .into_iter()
        .map(|x| {
            let mut m = CMatrix::zeros(dim, dim);
            let mut off = 0;
            for s in sectors {
                if let Some(k) = s.ops.get(&x) {
                    m.set_block(off, off, k);
                }
                off += s.dim;
            }
            (x, m)
        })
        .collect();
    Ok(ExtendedKrausFamily {
        step: first.step,
        dim,
        ops,
    })
}

/// `ρ ↦ Σ_x K̃_x ρ K̃_x†`, summed pairwise in position order.
pub fn apply_channel(family: &ExtendedKrausFamily, rho: &DensityMatrix) -> Result<DensityMatrix> {
    if rho.dim() != family.dim {
        return Err(Error::DimensionMismatch {
            expected: family.dim,
            found: rho.dim(),
        });
    }
    let terms: Vec<CMatrix> = family
        .ops
        .values()
        .map(|k| k.sandwich(rho.matrix()))
        .collect();
    Ok(DensityMatrix::from_matrix_unchecked(pairwise_sum(
        &terms, family.dim, family.dim,
    )))
}

fn completeness_residual(ops: &BTreeMap<i64, CMatrix>, dim: usize) -> f64 {
    let terms: Vec<CMatrix> = ops.values().map(|k| &k.adjoint() * k).collect();
    pairwise_sum(&terms, dim, dim).max_abs_diff(&CMatrix::identity(dim))
}

fn prune(ops: &mut BTreeMap<i64, CMatrix>) {
    ops.retain(|_, k| k.max_abs() >= tol::PRUNE);
}

/// Shared recurrence: rows `2f` (spin up) of `C K_y` land on `y − a`,
/// rows `2f+1` (spin down) land on `y + a`.
fn advance<P>(
    ops: &BTreeMap<i64, CMatrix>,
    coin: &CMatrix,
    spacing: i64,
    place: P,
) -> Result<BTreeMap<i64, CMatrix>>
where
    P: Fn(i64) -> Result<i64>,
{
    let dim = coin.rows();
    let mut next: BTreeMap<i64, CMatrix> = BTreeMap::new();
    for (&y, k) in ops {
        let m = coin * k;
        for (parity, target) in [(0usize, y - spacing), (1usize, y + spacing)] {
            let rows_nonzero = (parity..dim)
                .step_by(2)
                .any(|r| m.row(r).iter().any(|z| *z != ZERO));
            if !rows_nonzero {
                continue;
            }
            let x = place(target)?;
            let acc = next
                .entry(x)
                .or_insert_with(|| CMatrix::zeros(dim, k.cols()));
            for r in (parity..dim).step_by(2) {
                for c in 0..k.cols() {
                    acc[(r, c)] += m[(r, c)];
                }
            }
        }
    }
    prune(&mut next);
    Ok(next)
}
