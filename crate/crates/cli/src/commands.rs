use std::collections::BTreeMap;
use std::fmt::Write as _;

use nuwalk_core::embedding::{
    controlled_reading_check, embed_factor, embedded_product, restrict_one_hot, Factor,
};
use nuwalk_core::entanglement::{entropy_report, EntropyRow};
use nuwalk_core::kraus::{apply_channel, block_kraus, kraus_at, ExtendedKrausFamily};
use nuwalk_core::neutrino::{
    analytic_series, flavor_density, flavor_labels, pmns_matrix, walk_transition_series,
    EnergyModel, FlavorScenario, InitialPosition, TransitionSeries,
};
use nuwalk_core::walk::{build_dirac_coin, evolve, Boundary, LatticeSpec, WalkState};
use nuwalk_core::{CMatrix, C64};

use crate::config::ScenarioConfig;
use crate::error::{CliError, CliResult};
use crate::format::matrix_block;

/// Completeness residual above which a simulation is rejected.
pub const SIMULATE_CPTP_LIMIT: f64 = 1e-8;
/// Row-sum deviation above which a momentum-start simulation is rejected.
pub const ROW_SUM_LIMIT: f64 = 1e-9;
pub const CPTP_TOL_ENV: &str = "OSC_TOL_CPTP";

/// CPTP tolerance for `validate`, overridable through the environment.
pub fn cptp_tolerance() -> CliResult<f64> {
    match std::env::var(CPTP_TOL_ENV) {
        Ok(v) => match v.trim().parse::<f64>() {
            Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
            _ => Err(CliError::Config(format!(
                "{CPTP_TOL_ENV}: '{v}' is not a positive number"
            ))),
        },
        Err(_) => Ok(1e-12),
    }
}

fn energy_name(m: EnergyModel) -> &'static str {
    match m {
        EnergyModel::WalkDispersion => "walk dispersion",
        EnergyModel::UltraRelativistic => "ultra-relativistic",
    }
}

fn max_series_dev(a: &TransitionSeries, b: &TransitionSeries) -> f64 {
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

fn row_sum_range(s: &TransitionSeries) -> (f64, f64) {
    s.rows
        .iter()
        .map(|r| r.total())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| {
            (lo.min(x), hi.max(x))
        })
}

pub struct Simulation {
    pub scenario: FlavorScenario,
    pub series: TransitionSeries,
    pub entropy: Option<Vec<EntropyRow>>,
}

/// Runs the walk and applies the numerical acceptance checks.
pub fn simulate(cfg: &ScenarioConfig) -> CliResult<Simulation> {
    let scenario = cfg.scenario()?;
    let series = walk_transition_series(&scenario)?;
    let worst = series.max_completeness_residual();
    if worst > SIMULATE_CPTP_LIMIT {
        return Err(CliError::Numerical(format!(
            "completeness residual {worst:.3e} exceeds {SIMULATE_CPTP_LIMIT:e}"
        )));
    }
    if scenario.initial_position == InitialPosition::Momentum {
        let (lo, hi) = row_sum_range(&series);
        let dev = (lo - 1.0).abs().max((hi - 1.0).abs());
        if dev > ROW_SUM_LIMIT {
            return Err(CliError::Numerical(format!(
                "probability row sums deviate from 1 by {dev:.3e}"
            )));
        }
    }
    let entropy = cfg.entropy.then(|| entropy_report(&series));
    Ok(Simulation {
        scenario,
        series,
        entropy,
    })
}

/// First step at which `p` has crossed 1/2 from its starting side.
fn first_half_crossing(p: &[f64]) -> Option<usize> {
    let start = p.first()? - 0.5;
    p.iter()
        .position(|&x| (x - 0.5) * start < 0.0 || (start == 0.0 && x != 0.5))
}

pub fn summary(sim: &Simulation, model: EnergyModel) -> String {
    let s = &sim.scenario;
    let series = &sim.series;
    let labels = flavor_labels(series.n_flavors);
    let a = labels[series.initial_flavor];
    let mut out = String::new();
    writeln!(
        out,
        "scenario: {} flavors, initial {a}, {} steps, angles {:?}",
        series.n_flavors, s.steps, s.coin_angles
    )
    .unwrap();
    if s.initial_position == InitialPosition::Momentum {
        let m = s.momentum_spec();
        writeln!(
            out,
            "k_tilde: requested {}, snapped {:.12} (n = {}, distance {:.3e})",
            s.k_tilde,
            m.k_tilde(),
            m.index(),
            s.snap_distance()
        )
        .unwrap();
    } else {
        writeln!(
            out,
            "k_tilde: {} (not snapped; no momentum eigenstate)",
            s.k_tilde
        )
        .unwrap();
    }
    writeln!(
        out,
        "completeness residual (max over steps): {:.3e}",
        series.max_completeness_residual()
    )
    .unwrap();
    let (lo, hi) = row_sum_range(series);
    writeln!(out, "row sums: min {lo:.12}, max {hi:.12}").unwrap();
    for (b, name) in labels.iter().enumerate() {
        let col = series.column(b);
        let (imax, pmax) =
            col.iter()
                .copied()
                .enumerate()
                .fold(
                    (0, f64::NEG_INFINITY),
                    |acc, (i, x)| if x > acc.1 { (i, x) } else { acc },
                );
        let (imin, pmin) =
            col.iter()
                .copied()
                .enumerate()
                .fold(
                    (0, f64::INFINITY),
                    |acc, (i, x)| if x < acc.1 { (i, x) } else { acc },
                );
        let cross = first_half_crossing(&col).map_or("never".to_string(), |t| t.to_string());
        writeln!(
            out,
            "P_{a}{name}: max {pmax:.6} at step {imax}, min {pmin:.6} at step {imin}, first 1/2 crossing at step {cross}"
        )
        .unwrap();
    }
    if s.initial_position == InitialPosition::Momentum {
        let dev = max_series_dev(series, &analytic_series(s, model));
        writeln!(
            out,
            "walk vs analytic ({}): max |dP| {dev:.3e}",
            energy_name(model)
        )
        .unwrap();
    }
    out
}

/// `⟨x|W^t|0⟩` from the full state-vector walk, one column per coin basis state.
fn state_vector_family(coin: &CMatrix, t: usize) -> CliResult<BTreeMap<i64, CMatrix>> {
    let d = coin.rows();
    let lat = LatticeSpec::new(t as i64 + 1, 1, Boundary::Open)?;
    let mut out: BTreeMap<i64, CMatrix> = BTreeMap::new();
    for col in 0..d {
        let mut chi = vec![C64::new(0.0, 0.0); d];
        chi[col] = C64::new(1.0, 0.0);
        let s = evolve(
            &WalkState::localized(&chi, 0)?,
            std::slice::from_ref(coin),
            &lat,
            t,
        )?;
        for (&x, amp) in s.amplitudes() {
            let k = out.entry(x).or_insert_with(|| CMatrix::zeros(d, d));
            for (r, a) in amp.iter().enumerate() {
                k[(r, col)] = *a;
            }
        }
    }
    Ok(out)
}

pub struct Check {
    pub name: &'static str,
    /// `None` when the check does not apply to this scenario.
    pub residual: Option<f64>,
    pub tolerance: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.residual.is_none_or(|r| r <= self.tolerance)
    }
}

/// Runs the oracle-equivalence suite. `corrupt_coin` scales the coin by
/// 1.05 before the CPTP check, as a negative control.
pub fn validate(cfg: &ScenarioConfig, corrupt_coin: bool) -> CliResult<Vec<Check>> {
    let s = cfg.scenario()?;
    let tol = cptp_tolerance()?;
    let mut checks = Vec::new();

    let mut oracle: f64 = 0.0;
    for &th in &s.coin_angles {
        let coin = build_dirac_coin(th);
        for t in 1..=10 {
            let fam = kraus_at(t, &coin, 1);
            let sv = state_vector_family(&coin, t)?;
            for (x, k) in fam.ops() {
                let other = sv.get(x).cloned().unwrap_or_else(|| CMatrix::zeros(2, 2));
                oracle = oracle.max(k.max_abs_diff(&other));
            }
            for (x, k) in &sv {
                if fam.get(*x).is_none() {
                    oracle = oracle.max(k.max_abs());
                }
            }
        }
    }
    checks.push(Check {
        name: "kraus recurrence vs state vector (t <= 10)",
        residual: Some(oracle),
        tolerance: 1e-12,
    });

    let mut coin = s.block_coin();
    if corrupt_coin {
        coin = coin.scale_real(1.05);
    }
    let rho0 = flavor_density(s.initial_flavor, &s)?;
    let mut fam = s.initial_family()?;
    let mut cptp: f64 = fam.completeness_residual();
    for _ in 0..s.steps.max(1) {
        fam = fam.advance(&coin, s.lattice.spacing(), Some(&s.lattice))?;
        let rho = apply_channel(&fam, &rho0)?;
        cptp = cptp
            .max(fam.completeness_residual())
            .max(rho.trace_residual());
    }
    checks.push(Check {
        name: "CPTP completeness and trace",
        residual: Some(cptp),
        tolerance: tol,
    });

    let momentum = s.initial_position == InitialPosition::Momentum;
    let (walk_dev, row_dev) = if momentum {
        let walk = walk_transition_series(&s)?;
        let (lo, hi) = row_sum_range(&walk);
        (
            Some(max_series_dev(
                &walk,
                &analytic_series(&s, EnergyModel::WalkDispersion),
            )),
            Some((lo - 1.0).abs().max((hi - 1.0).abs())),
        )
    } else {
        (None, None)
    };
    checks.push(Check {
        name: "walk vs analytic series",
        residual: walk_dev,
        tolerance: 1e-8,
    });
    checks.push(Check {
        name: "probability row sums",
        residual: row_dev,
        tolerance: 1e-10,
    });

    let (embed_dev, controlled) = if s.n_flavors() == 3 {
        let m = cfg.mixing_spec()?;
        (
            Some(restrict_one_hot(&embedded_product(&m)).max_abs_diff(&pmns_matrix(&m))),
            Some(if controlled_reading_check(&m) {
                0.0
            } else {
                1.0
            }),
        )
    } else {
        (None, None)
    };
    checks.push(Check {
        name: "embedding restriction",
        residual: embed_dev,
        tolerance: 1e-12,
    });
    checks.push(Check {
        name: "controlled reading of the c12 factor",
        residual: controlled,
        tolerance: 0.0,
    });
    Ok(checks)
}

pub fn check_table(checks: &[Check]) -> String {
    let mut out = format!(
        "{:<42} {:>12} {:>12}  result\n",
        "check", "residual", "tolerance"
    );
    for c in checks {
        let residual = c.residual.map_or("n/a".to_string(), |r| format!("{r:.3e}"));
        let result = match (c.residual, c.passed()) {
            (None, _) => "skip",
            (_, true) => "pass",
            (_, false) => "FAIL",
        };
        writeln!(
            out,
            "{:<42} {residual:>12} {:>12.1e}  {result}",
            c.name, c.tolerance
        )
        .unwrap();
    }
    out
}

/// Block family `⊕_f K_x^{(f)}(t)`, or the position-extended block family
/// of the configured initial state.
pub fn kraus_family(
    cfg: &ScenarioConfig,
    t: usize,
    extended: bool,
) -> CliResult<ExtendedKrausFamily> {
    if extended {
        let s = cfg.scenario()?;
        let coin = s.block_coin();
        let mut fam = s.initial_family()?;
        for _ in 0..t {
            fam = fam.advance(&coin, s.lattice.spacing(), Some(&s.lattice))?;
        }
        return Ok(fam);
    }
    let angles = cfg.coin_angles()?;
    if angles.is_empty() {
        return Err(CliError::Config("no coin angles given".into()));
    }
    let sectors: Vec<ExtendedKrausFamily> = angles
        .iter()
        .map(|&th| kraus_at(t, &build_dirac_coin(th), cfg.spacing).into())
        .collect();
    Ok(block_kraus(&sectors)?)
}

pub fn kraus_dump(fam: &ExtendedKrausFamily, angles: &[f64], extended: bool) -> String {
    let mut out = String::new();
    writeln!(out, "# kraus family, t = {}", fam.step()).unwrap();
    writeln!(out, "# theta = {angles:?}").unwrap();
    writeln!(
        out,
        "# {} operators of dimension {}{}",
        fam.len(),
        fam.dim(),
        if extended { ", position-extended" } else { "" }
    )
    .unwrap();
    for (x, k) in fam.ops() {
        matrix_block(&mut out, &format!("K {x}"), k);
    }
    writeln!(
        out,
        "# completeness_residual = {:.3e}",
        fam.completeness_residual()
    )
    .unwrap();
    out
}

pub fn embed_dump(cfg: &ScenarioConfig) -> CliResult<String> {
    let m = cfg.mixing_spec()?;
    let mut out = String::new();
    writeln!(
        out,
        "# three-qubit factors, basis index 4i+2j+k for |ijk>; e=|100>, mu=|010>, tau=|001>"
    )
    .unwrap();
    for w in Factor::ALL {
        matrix_block(&mut out, w.name(), &embed_factor(w, &m).matrix);
    }
    let p = embedded_product(&m);
    matrix_block(&mut out, "U3U2U1U0", &p);
    matrix_block(&mut out, "one-hot-restriction", &restrict_one_hot(&p));
    writeln!(
        out,
        "# restriction vs PMNS max deviation = {:.3e}",
        restrict_one_hot(&p).max_abs_diff(&pmns_matrix(&m))
    )
    .unwrap();
    writeln!(
        out,
        "# controlled reading of U1 holds: {}",
        controlled_reading_check(&m)
    )
    .unwrap();
    Ok(out)
}
