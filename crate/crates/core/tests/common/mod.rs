#![allow(dead_code)]

use std::collections::BTreeMap;

use nuwalk_core::walk::{evolve, LatticeSpec, WalkState};
use nuwalk_core::{CMatrix, C64};

/// `⟨x|W^t|0⟩` for every reached `x`, from the full state-vector walk.
pub fn state_vector_kraus(coin: &CMatrix, t: usize, spacing: i64) -> BTreeMap<i64, CMatrix> {
    let d = coin.rows();
    let lat =
        LatticeSpec::new(spacing * t as i64 + 1, spacing, nuwalk_core::Boundary::Open).unwrap();
    let mut out: BTreeMap<i64, CMatrix> = BTreeMap::new();
    for col in 0..d {
        let mut chi = vec![C64::new(0.0, 0.0); d];
        chi[col] = C64::new(1.0, 0.0);
        let s = evolve(
            &WalkState::localized(&chi, 0).unwrap(),
            std::slice::from_ref(coin),
            &lat,
            t,
        )
        .unwrap();
        for (&x, amp) in s.amplitudes() {
            let k = out.entry(x).or_insert_with(|| CMatrix::zeros(d, d));
            for (r, a) in amp.iter().enumerate() {
                k[(r, col)] = *a;
            }
        }
    }
    out
}

/// Max entrywise distance between two position-keyed families, treating
/// missing keys as zero matrices.
pub fn family_distance(a: &BTreeMap<i64, CMatrix>, b: &BTreeMap<i64, CMatrix>, dim: usize) -> f64 {
    let zero = CMatrix::zeros(dim, dim);
    a.keys()
        .chain(b.keys())
        .map(|x| {
            a.get(x)
                .unwrap_or(&zero)
                .max_abs_diff(b.get(x).unwrap_or(&zero))
        })
        .fold(0.0, f64::max)
}
