//! One test per acceptance criterion; each prints a PASS/FAIL line with the
//! measured figure before asserting.
//!
//! `cargo test -p nuwalk-core --test acceptance -- --include-ignored --nocapture`

mod common;

use std::f64::consts::{FRAC_PI_4, PI};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nuwalk_core::embedding::{embedded_product, restrict_one_hot};
use nuwalk_core::entanglement::{
    average_entropy_from_probabilities, entropy_from_probability, linear_entropy, mode_state,
    ModeState,
};
use nuwalk_core::kraus::{apply_channel, block_kraus, kraus_at, ExtendedKrausFamily};
use nuwalk_core::neutrino::{
    analytic_series, analytic_transition, pmns_matrix, walk_transition_series, EnergyModel,
    FlavorScenario, Mixing, MixingSpec, TransitionSeries,
};
use nuwalk_core::walk::{build_dirac_coin, build_general_coin, dispersion_energy};
use nuwalk_core::{CMatrix, CoinParams, DensityMatrix, C64};

use common::{family_distance, state_vector_kraus};

fn report(id: &str, pass: bool, detail: String) {
    println!(
        "criterion {id}: {} ({detail})",
        if pass { "PASS" } else { "FAIL" }
    );
}

const TWO_FLAVOR_THETAS: [f64; 2] = [0.001, 0.0986];
const THREE_FLAVOR_THETAS: [f64; 3] = [0.001, 0.01963, 0.12797];

fn reference_mixing() -> MixingSpec {
    MixingSpec::new(0.59437, 0.16087, 0.69835, 0.0)
}

fn two_flavor_ref(steps: usize) -> FlavorScenario {
    FlavorScenario::momentum(
        TWO_FLAVOR_THETAS.to_vec(),
        0.05,
        188,
        Mixing::TwoFlavor { phi: 0.698 },
        0,
        steps,
    )
    .unwrap()
}

fn three_flavor_ref(steps: usize) -> FlavorScenario {
    FlavorScenario::momentum(
        THREE_FLAVOR_THETAS.to_vec(),
        0.1,
        31,
        Mixing::ThreeFlavor(reference_mixing()),
        0,
        steps,
    )
    .unwrap()
}

fn max_dev(a: &TransitionSeries, b: &TransitionSeries) -> f64 {
    a.rows
        .iter()
        .zip(&b.rows)
        .flat_map(|(x, y)| {
            x.probabilities
                .iter()
                .zip(&y.probabilities)
                .map(|(p, q)| (p - q).abs())
        })
        .fold(0.0, f64::max)
}

fn max_row_sum_error(s: &TransitionSeries) -> f64 {
    s.rows
        .iter()
        .map(|r| (r.total() - 1.0).abs())
        .fold(0.0, f64::max)
}

#[test]
fn criterion_1_kraus_oracle_equivalence() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let p = CoinParams::new(
            rng.gen_range(0.0..2.0 * PI),
            rng.gen_range(0.0..2.0 * PI),
            rng.gen_range(0.0..2.0 * PI),
            rng.gen_range(0.0..2.0 * PI),
        );
        let coin = build_general_coin(&p);
        for t in 1..=10 {
            let fam = kraus_at(t, &coin, 1);
            worst = worst.max(family_distance(
                fam.ops(),
                &state_vector_kraus(&coin, t, 1),
                2,
            ));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = worst < 1e-12 && secs < 5.0;
    report("1", pass, format!("max deviation {worst:.2e}, {secs:.2} s"));
    assert!(pass);
}

#[test]
fn criterion_2_paper_pinned_kraus_values() {
    let mut worst: f64 = 0.0;
    for th in [0.3, FRAC_PI_4, 1.0] {
        let (c, s) = (f64::cos(th), f64::sin(th));
        let b = build_dirac_coin(th);
        let up = CMatrix::from_real_rows(&[[1.0, 0.0], [0.0, 0.0]]);
        let down = CMatrix::from_real_rows(&[[0.0, 0.0], [0.0, 1.0]]);
        let b_up = &up * &b;
        let b_down = &down * &b;

        let one = kraus_at(1, &b, 1);
        worst = worst.max(
            one.get(-1)
                .unwrap()
                .max_abs_diff(&CMatrix::from_real_rows(&[[c, s], [0.0, 0.0]])),
        );
        worst = worst.max(
            one.get(1)
                .unwrap()
                .max_abs_diff(&CMatrix::from_real_rows(&[[0.0, 0.0], [-s, c]])),
        );

        let two = kraus_at(2, &b, 1);
        let k_m2 = two.get(-2).unwrap();
        let k_0 = two.get(0).unwrap();
        let k_p2 = two.get(2).unwrap();
        // product forms B↑B↑, B↑B↓ + B↓B↑, B↓B↓
        worst = worst.max(k_m2.max_abs_diff(&(&b_up * &b_up)));
        worst = worst.max(k_0.max_abs_diff(&(&(&b_up * &b_down) + &(&b_down * &b_up))));
        worst = worst.max(k_p2.max_abs_diff(&(&b_down * &b_down)));
        // displayed entries
        worst =
            worst.max(k_m2.max_abs_diff(&CMatrix::from_real_rows(&[[c * c, s * c], [0.0, 0.0]])));
        worst =
            worst.max(k_p2.max_abs_diff(&CMatrix::from_real_rows(&[[0.0, 0.0], [-s * c, c * c]])));
        worst = worst.max(k_0.max_abs_diff(&CMatrix::from_real_rows(&[
            [-s * s, s * c],
            [-s * c, -s * s],
        ])));
    }
    let pass = worst <= 1e-15;
    report("2", pass, format!("max deviation {worst:.2e}"));
    assert!(pass);
}

fn block_family(thetas: &[f64], t: usize) -> ExtendedKrausFamily {
    let sectors: Vec<ExtendedKrausFamily> = thetas
        .iter()
        .map(|&th| kraus_at(t, &build_dirac_coin(th), 1).into())
        .collect();
    block_kraus(&sectors).unwrap()
}

#[test]
fn criterion_3_cptp_block_families() {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for thetas in [&TWO_FLAVOR_THETAS[..], &THREE_FLAVOR_THETAS[..]] {
        for t in [0, 1, 2, 10, 50, 100, 150, 200] {
            worst = worst.max(block_family(thetas, t).completeness_residual());
        }
    }
    // the momentum-extended block families actually used for the series
    for s in [two_flavor_ref(200), three_flavor_ref(200)] {
        let coin = s.block_coin();
        let mut fam = s.initial_family().unwrap();
        for _ in 0..200 {
            fam = fam.advance(&coin, 1, Some(&s.lattice)).unwrap();
            worst = worst.max(fam.completeness_residual());
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = worst < 1e-12 && secs < 10.0;
    report("3", pass, format!("max residual {worst:.2e}, {secs:.2} s"));
    assert!(pass);
}

#[test]
fn criterion_4_two_flavor_reference() {
    let s = two_flavor_ref(400);
    let walk = walk_transition_series(&s).unwrap();
    let an = analytic_series(&s, EnergyModel::WalkDispersion);
    let sum_err = max_row_sum_error(&walk);
    let p = walk.column(1);
    let p_max = p.iter().copied().fold(0.0, f64::max);
    let amp = (2.0 * 0.698f64).sin().powi(2);
    let first_max = (1..p.len() - 1)
        .find(|&t| p[t] >= p[t - 1] && p[t] > p[t + 1])
        .unwrap();
    let e = s.energies(EnergyModel::WalkDispersion);
    let predicted = PI / (e[1] - e[0]);
    let dev = max_dev(&walk, &an);

    let pass = sum_err < 1e-10
        && (p_max - amp).abs() < 0.01
        && (first_max as f64 - predicted).abs() <= 2.0
        && dev < 1e-8;
    report(
        "4",
        pass,
        format!(
            "row-sum error {sum_err:.1e}; max P(mu->tau) {p_max:.5} vs {amp:.5}; first max at step {first_max} vs {predicted:.2}; walk-analytic {dev:.1e}"
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_5_three_flavor_sums_and_analytic() {
    let s = three_flavor_ref(5000);
    let walk = walk_transition_series(&s).unwrap();
    let an = analytic_series(&s, EnergyModel::WalkDispersion);
    let sum_err = max_row_sum_error(&walk);
    let dev = max_dev(&walk, &an);
    let pass = sum_err < 1e-10 && dev < 1e-8;
    report(
        "5a",
        pass,
        format!("row-sum error {sum_err:.1e}; walk-analytic {dev:.1e} over 5000 steps"),
    );
    assert!(pass);
}

/// Slow and fast angular frequencies read off `P(e→e)`.
///
/// The fast component is removed by a moving average over one fast period;
/// the first minimum of the smoothed curve is half a slow period. The fast
/// period is the mean spacing of local maxima of the residual.
fn measured_frequencies(p: &[f64]) -> (f64, f64) {
    let maxima: Vec<usize> = (1..p.len() - 1)
        .filter(|&t| p[t] > p[t - 1] && p[t] >= p[t + 1])
        .collect();
    let rough_fast = (maxima[maxima.len() - 1] - maxima[0]) as f64 / (maxima.len() - 1) as f64;
    let w = rough_fast.round() as usize;
    let smooth: Vec<f64> = (0..p.len() - w)
        .map(|t| p[t..t + w].iter().sum::<f64>() / w as f64)
        .collect();
    let half_slow = (1..smooth.len() - 1)
        .find(|&t| smooth[t] < smooth[t - 1] && smooth[t] <= smooth[t + 1])
        .unwrap() as f64
        + (w as f64 - 1.0) / 2.0;
    let residual: Vec<f64> = (0..smooth.len())
        .map(|t| p[t + w / 2] - smooth[t])
        .collect();
    let rmax: Vec<usize> = (1..residual.len() - 1)
        .filter(|&t| {
            residual[t] > residual[t - 1] && residual[t] >= residual[t + 1] && residual[t] > 0.0
        })
        .collect();
    let fast_period = (rmax[rmax.len() - 1] - rmax[0]) as f64 / (rmax.len() - 1) as f64;
    (PI / half_slow, 2.0 * PI / fast_period)
}

#[test]
#[ignore = "unattainable with the published angles; see the decisions ledger"]
fn criterion_5_three_flavor_frequency_ratio() {
    let s = three_flavor_ref(5000);
    let walk = walk_transition_series(&s).unwrap();
    let (slow, fast) = measured_frequencies(&walk.column(0));
    let measured = fast / slow;
    let th = THREE_FLAVOR_THETAS;
    let target = (th[2].powi(2) - th[0].powi(2)) / (th[1].powi(2) - th[0].powi(2));
    let e: Vec<f64> = th
        .iter()
        .map(|&t| dispersion_energy(t, s.snapped_k_tilde()))
        .collect();
    let dispersion_ratio = (e[2] - e[0]) / (e[1] - e[0]);
    let rel = (measured / target - 1.0).abs();
    let pass = rel < 0.05;
    report(
        "5b",
        pass,
        format!(
            "measured fast/slow {measured:.2}, dispersion (E3-E1)/(E2-E1) {dispersion_ratio:.2}, target dtheta2 ratio {target:.2}, off by {:.1}%",
            100.0 * rel
        ),
    );
    assert!(pass);
}

/// Continuous time in `[lo, hi]` where `P(α→γ) = 1/2`, by bisection.
fn bisect_half(s: &FlavorScenario, gamma: usize, mut lo: f64, mut hi: f64) -> f64 {
    let f = |t: f64| analytic_transition(0, gamma, t, s, EnergyModel::WalkDispersion) - 0.5;
    let flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn criterion_6_entropy_identities() {
    let s = three_flavor_ref(2000);
    let walk = walk_transition_series(&s).unwrap();
    let mut worst_partial: f64 = 0.0;
    let mut worst_mean: f64 = 0.0;
    for row in &walk.rows {
        let state = mode_state(0, row.step as f64, &s, EnergyModel::WalkDispersion).unwrap();
        let p = &row.probabilities;
        let mut partials = [0.0; 3];
        for g in 0..3 {
            let keep: Vec<usize> = (0..3).filter(|&m| m != g).collect();
            let from_pair = linear_entropy(&state.reduced_density(&keep).unwrap());
            let from_mode = linear_entropy(&state.reduced_density(&[g]).unwrap());
            let from_p = entropy_from_probability(p[g]);
            worst_partial = worst_partial
                .max((from_pair - from_p).abs())
                .max((from_mode - from_p).abs());
            partials[g] = from_pair;
        }
        let avg = average_entropy_from_probabilities(&[p[0], p[1], p[2]]);
        worst_mean = worst_mean.max((avg - partials.iter().sum::<f64>() / 3.0).abs());
    }

    let mut crossings = 0;
    let mut worst_peak: f64 = 0.0;
    for g in 0..3 {
        let col = walk.column(g);
        for t in 0..col.len() - 1 {
            if (col[t] - 0.5) * (col[t + 1] - 0.5) < 0.0 {
                let tc = bisect_half(&s, g, t as f64, t as f64 + 1.0);
                let st = mode_state(0, tc, &s, EnergyModel::WalkDispersion).unwrap();
                worst_peak = worst_peak.max((st.mode_entropy(g).unwrap() - 1.0).abs());
                crossings += 1;
            }
        }
    }
    // two-mode sanity: an explicitly built equal superposition is maximal
    let r = 0.5f64.sqrt();
    let maximal = ModeState::new(vec![C64::new(r, 0.0), C64::new(0.0, r)]).unwrap();
    worst_peak = worst_peak.max((maximal.mode_entropy(0).unwrap() - 1.0).abs());

    let pass = worst_partial < 1e-10 && worst_mean < 1e-12 && crossings > 0 && worst_peak < 1e-6;
    report(
        "6",
        pass,
        format!("partial vs 4P(1-P) {worst_partial:.1e}; mean identity {worst_mean:.1e}; {crossings} crossings, peak error {worst_peak:.1e}"),
    );
    assert!(pass);
}

#[test]
fn criterion_7_embedding_restriction() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let mut a = || rng.gen_range(0.0..2.0 * PI);
        let m = MixingSpec::new(a(), a(), a(), a()).with_majorana(a(), a());
        worst = worst.max(restrict_one_hot(&embedded_product(&m)).max_abs_diff(&pmns_matrix(&m)));
    }
    let pass = worst < 1e-12;
    report(
        "7",
        pass,
        format!("max deviation {worst:.2e} over 100 draws"),
    );
    assert!(pass);
}

#[test]
fn criterion_8_dirac_limit() {
    let mut worst: f64 = 0.0;
    for i in 1..=50 {
        for j in 1..=50 {
            let (th, k) = (0.1 * i as f64 / 50.0, 0.1 * j as f64 / 50.0);
            let dirac = (th * th + k * k).sqrt();
            worst = worst.max((dispersion_energy(th, k) - dirac).abs() / dirac);
        }
    }
    let pass = worst < 0.01;
    report("8", pass, format!("max relative error {worst:.2e}"));
    assert!(pass);
}

#[test]
fn criterion_9_decoherence_contrast() {
    let mut worst: f64 = 0.0;
    for s in [two_flavor_ref(300), three_flavor_ref(300)] {
        let walk = walk_transition_series(&s).unwrap();
        for r in &walk.rows {
            worst = worst.max((r.purity - 1.0).abs());
        }
    }
    let rho0 = DensityMatrix::pure(&[C64::new(1.0, 0.0), C64::new(0.0, 0.0)]).unwrap();
    let fam = kraus_at(2, &build_dirac_coin(FRAC_PI_4), 1);
    let localized = apply_channel(&fam.into(), &rho0).unwrap().purity();
    let pass = worst < 1e-10 && localized <= 0.9;
    report(
        "9",
        pass,
        format!("momentum purity deviation {worst:.1e}; localized purity at t=2 {localized:.4}"),
    );
    assert!(pass);
}
