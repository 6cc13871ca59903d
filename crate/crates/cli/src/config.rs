//! `key = value` scenario files.
//!
//! ```text
//! # two-flavor run
//! flavors = 2
//! theta = 0.001, 0.0986
//! k_tilde = 0.05
//! lattice_N = 188
//! phi = 0.698
//! initial_flavor = mu
//! steps = 400
//! output = two_flavor.csv
//! ```
//!
//! Instead of `theta`, the angles can be derived from physical splittings
//! with `delta_m2`, `theta_ref`, `energy_gev` and `km_per_step`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use nuwalk_core::neutrino::{
    flavor_labels, physics_to_walk, EnergyModel, FlavorScenario, InitialPosition, Mixing,
    MixingSpec, WalkCalibration,
};
use nuwalk_core::walk::{Boundary, LatticeSpec};
use nuwalk_core::C64;

use crate::error::{CliError, CliResult};

const KEYS: &[&str] = &[
    "flavors",
    "theta",
    "k_tilde",
    "lattice_N",
    "spacing",
    "phi",
    "phi12",
    "phi13",
    "phi23",
    "delta",
    "alpha1",
    "alpha2",
    "initial_flavor",
    "steps",
    "initial_position",
    "output",
    "energy_model",
    "entropy",
    "delta_m2",
    "theta_ref",
    "energy_gev",
    "km_per_step",
];

#[derive(Debug, Clone, PartialEq)]
pub enum PositionSpec {
    Momentum,
    Localized(i64),
    /// File of `x re im` lines.
    Amplitudes(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Calibration {
    pub delta_m2: Vec<f64>,
    pub theta_ref: f64,
    pub energy_gev: f64,
    pub km_per_step: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub flavors: Option<usize>,
    pub theta: Vec<f64>,
    pub k_tilde: Option<f64>,
    pub lattice_n: Option<i64>,
    pub spacing: i64,
    pub phi: Option<f64>,
    pub phi12: Option<f64>,
    pub phi13: Option<f64>,
    pub phi23: Option<f64>,
    pub delta: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub initial_flavor: String,
    pub steps: usize,
    pub initial_position: PositionSpec,
    pub output: Option<PathBuf>,
    pub energy_model: EnergyModel,
    pub entropy: bool,
    pub calibration: Option<Calibration>,
    /// Directory that relative file references resolve against.
    pub base_dir: PathBuf,
}

fn err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn number(key: &str, v: &str) -> CliResult<f64> {
    let x: f64 = v
        .trim()
        .parse()
        .map_err(|_| err(format!("{key}: '{v}' is not a number")))?;
    if !x.is_finite() {
        return Err(err(format!("{key}: value must be finite")));
    }
    Ok(x)
}

fn list(key: &str, v: &str) -> CliResult<Vec<f64>> {
    v.split(',').map(|s| number(key, s)).collect()
}

fn integer<T: std::str::FromStr>(key: &str, v: &str) -> CliResult<T> {
    v.trim()
        .parse()
        .map_err(|_| err(format!("{key}: '{v}' is not a valid integer")))
}

fn energy_model(v: &str) -> CliResult<EnergyModel> {
    match v.to_ascii_lowercase().as_str() {
        "walk" | "dispersion" | "walk_dispersion" => Ok(EnergyModel::WalkDispersion),
        "ur" | "ultrarelativistic" | "ultra_relativistic" => Ok(EnergyModel::UltraRelativistic),
        _ => Err(err(format!("energy_model: unknown model '{v}'"))),
    }
}

fn switch(key: &str, v: &str) -> CliResult<bool> {
    match v.to_ascii_lowercase().as_str() {
        "on" | "true" | "yes" | "1" => Ok(true),
        "off" | "false" | "no" | "0" => Ok(false),
        _ => Err(err(format!("{key}: expected on or off, got '{v}'"))),
    }
}

fn position(v: &str) -> CliResult<PositionSpec> {
    let (kind, arg) = match v.split_once(':') {
        Some((k, a)) => (k.trim(), Some(a.trim())),
        None => (v.trim(), None),
    };
    match (kind, arg) {
        ("momentum", None) => Ok(PositionSpec::Momentum),
        ("localized", None) => Ok(PositionSpec::Localized(0)),
        ("localized", Some(x)) => Ok(PositionSpec::Localized(integer("initial_position", x)?)),
        ("amplitudes", Some(p)) if !p.is_empty() => Ok(PositionSpec::Amplitudes(PathBuf::from(p))),
        _ => Err(err(format!(
            "initial_position: expected momentum, localized[:x] or amplitudes:<file>, got '{v}'"
        ))),
    }
}

impl ScenarioConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| err(format!("cannot read {}: {e}", path.display())))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::parse(&text, base)
    }

    pub fn parse(text: &str, base_dir: PathBuf) -> CliResult<Self> {
        let mut raw: BTreeMap<&str, &str> = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| err(format!("line {}: expected key = value", n + 1)))?;
            let (k, v) = (k.trim(), v.trim());
            if !KEYS.contains(&k) {
                return Err(err(format!("line {}: unknown key '{k}'", n + 1)));
            }
            if raw.insert(k, v).is_some() {
                return Err(err(format!("line {}: duplicate key '{k}'", n + 1)));
            }
        }
        let get = |k: &str| raw.get(k).copied();
        let opt = |k: &str| get(k).map(|v| number(k, v)).transpose();

        let calibration = match get("delta_m2") {
            Some(v) => Some(Calibration {
                delta_m2: list("delta_m2", v)?,
                theta_ref: opt("theta_ref")?.ok_or_else(|| err("delta_m2 needs theta_ref"))?,
                energy_gev: opt("energy_gev")?.ok_or_else(|| err("delta_m2 needs energy_gev"))?,
                km_per_step: opt("km_per_step")?
                    .ok_or_else(|| err("delta_m2 needs km_per_step"))?,
            }),
            None => None,
        };
        let theta = get("theta")
            .map(|v| list("theta", v))
            .transpose()?
            .unwrap_or_default();
        if theta.is_empty() && calibration.is_none() {
            return Err(err("missing key 'theta' (or delta_m2 calibration)"));
        }
        if !theta.is_empty() && calibration.is_some() {
            return Err(err("give either theta or delta_m2, not both"));
        }
        let spacing = get("spacing")
            .map(|v| integer("spacing", v))
            .transpose()?
            .unwrap_or(1);
        if spacing < 1 {
            return Err(err("spacing must be at least 1"));
        }
        let lattice_n = get("lattice_N")
            .map(|v| integer::<i64>("lattice_N", v))
            .transpose()?;
        if lattice_n.is_some_and(|n| n < 1) {
            return Err(err("lattice_N must be at least 1"));
        }

        Ok(Self {
            flavors: get("flavors").map(|v| integer("flavors", v)).transpose()?,
            theta,
            k_tilde: opt("k_tilde")?,
            lattice_n,
            spacing,
            phi: opt("phi")?,
            phi12: opt("phi12")?,
            phi13: opt("phi13")?,
            phi23: opt("phi23")?,
            delta: opt("delta")?.unwrap_or(0.0),
            alpha1: opt("alpha1")?.unwrap_or(0.0),
            alpha2: opt("alpha2")?.unwrap_or(0.0),
            initial_flavor: get("initial_flavor").unwrap_or("1").to_string(),
            steps: get("steps")
                .map(|v| integer("steps", v))
                .transpose()?
                .unwrap_or(0),
            initial_position: get("initial_position")
                .map(position)
                .transpose()?
                .unwrap_or(PositionSpec::Momentum),
            output: get("output").map(PathBuf::from),
            energy_model: get("energy_model")
                .map(energy_model)
                .transpose()?
                .unwrap_or(EnergyModel::WalkDispersion),
            entropy: get("entropy")
                .map(|v| switch("entropy", v))
                .transpose()?
                .unwrap_or(false),
            calibration,
            base_dir,
        })
    }

    /// Coin angles, from `theta` or from the physical calibration.
    pub fn coin_angles(&self) -> CliResult<Vec<f64>> {
        if let Some(c) = &self.calibration {
            let k = self.k_tilde.ok_or_else(|| err("missing key 'k_tilde'"))?;
            let cal = WalkCalibration {
                k_tilde: k,
                theta_ref: c.theta_ref,
                energy_gev: c.energy_gev,
                km_per_step: c.km_per_step,
            };
            let w = physics_to_walk(&c.delta_m2, &cal, self.energy_model)?;
            if w.beyond_small_angle {
                eprintln!("warning: calibrated angles exceed 0.3 rad; the small-angle reading no longer holds");
            }
            return Ok(w.thetas);
        }
        Ok(self.theta.clone())
    }

    pub fn mixing_spec(&self) -> CliResult<MixingSpec> {
        let need =
            |v: Option<f64>, k: &str| v.ok_or_else(|| err(format!("three flavors need '{k}'")));
        Ok(MixingSpec::new(
            need(self.phi12, "phi12")?,
            need(self.phi13, "phi13")?,
            need(self.phi23, "phi23")?,
            self.delta,
        )
        .with_majorana(self.alpha1, self.alpha2))
    }

    fn mixing(&self, n: usize) -> CliResult<Mixing> {
        match n {
            2 => Ok(Mixing::TwoFlavor {
                phi: self.phi.ok_or_else(|| err("two flavors need 'phi'"))?,
            }),
            3 => Ok(Mixing::ThreeFlavor(self.mixing_spec()?)),
            _ => Err(err(format!("flavors must be 2 or 3, got {n}"))),
        }
    }

    fn flavor_index(&self, n: usize) -> CliResult<usize> {
        let labels = flavor_labels(n);
        let v = self.initial_flavor.trim();
        if let Some(i) = labels.iter().position(|l| l.eq_ignore_ascii_case(v)) {
            return Ok(i);
        }
        match v.parse::<usize>() {
            Ok(i) if (1..=n).contains(&i) => Ok(i - 1),
            _ => Err(err(format!(
                "initial_flavor: expected one of {labels:?} or 1..{n}, got '{v}'"
            ))),
        }
    }

    fn read_amplitudes(&self, path: &Path) -> CliResult<BTreeMap<i64, C64>> {
        let full = if path.is_absolute() {
            path.to_path_buf()
        } else {
            self.base_dir.join(path)
        };
        let text = std::fs::read_to_string(&full)
            .map_err(|e| err(format!("cannot read {}: {e}", full.display())))?;
        let mut out = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 3 {
                return Err(err(format!(
                    "{}:{}: expected 'x re im'",
                    full.display(),
                    n + 1
                )));
            }
            let x: i64 = integer("amplitudes", f[0])?;
            let z = C64::new(number("amplitudes", f[1])?, number("amplitudes", f[2])?);
            if out.insert(x, z).is_some() {
                return Err(err(format!(
                    "{}:{}: position {x} given twice",
                    full.display(),
                    n + 1
                )));
            }
        }
        Ok(out)
    }

    /// Builds and validates the scenario this file describes.
    pub fn scenario(&self) -> CliResult<FlavorScenario> {
        let coin_angles = self.coin_angles()?;
        let n = self.flavors.unwrap_or(coin_angles.len());
        if n != coin_angles.len() {
            return Err(err(format!(
                "flavors = {n} but {} angles given",
                coin_angles.len()
            )));
        }
        let mixing = self.mixing(n)?;
        let k_tilde = self.k_tilde.ok_or_else(|| err("missing key 'k_tilde'"))?;
        let reach = self.steps as i64 * self.spacing;

        let periodic = |what: &str| -> CliResult<LatticeSpec> {
            let n = self
                .lattice_n
                .ok_or_else(|| err(format!("{what} starts need 'lattice_N'")))?;
            Ok(LatticeSpec::new(n, self.spacing, Boundary::Periodic)?)
        };
        let (lattice, initial_position) = match &self.initial_position {
            PositionSpec::Momentum => (periodic("momentum")?, InitialPosition::Momentum),
            PositionSpec::Localized(x) => {
                let needed = reach + x.abs();
                let half = match self.lattice_n {
                    Some(n) if n < needed => {
                        return Err(err(format!(
                            "lattice_N = {n} is too small for a localized start: {} steps from {x} need N >= {needed}",
                            self.steps
                        )))
                    }
                    Some(n) => n,
                    None => needed.max(1),
                };
                (
                    LatticeSpec::new(half, self.spacing, Boundary::Open)?,
                    InitialPosition::Localized(*x),
                )
            }
            PositionSpec::Amplitudes(p) => (
                periodic("amplitude")?,
                InitialPosition::Amplitudes(self.read_amplitudes(p)?),
            ),
        };
        if let InitialPosition::Amplitudes(a) = &initial_position {
            if let Some(x) = a.keys().find(|x| !lattice.contains(**x)) {
                return Err(err(format!(
                    "amplitude position {x} lies outside the lattice"
                )));
            }
        }

        let s = FlavorScenario {
            coin_angles,
            k_tilde,
            lattice,
            mixing,
            initial_flavor: self.flavor_index(n)?,
            steps: self.steps,
            initial_position,
        };
        s.validate()?;
        Ok(s)
    }
}
