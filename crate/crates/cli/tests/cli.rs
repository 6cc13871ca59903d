use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use nuwalk_cli::format::{parse_csv, parse_matrix_blocks};
use nuwalk_core::entanglement::partial_entropy;
use nuwalk_core::neutrino::{pmns_matrix, EnergyModel, FlavorScenario, Mixing, MixingSpec};
use nuwalk_core::CMatrix;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_nuwalk"))
}

fn run(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut c = bin();
    c.args(args).env_remove("OSC_TOL_CPTP");
    for (k, v) in env {
        c.env(k, v);
    }
    c.output().unwrap()
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

const TWO_FLAVOR: &str = "
flavors = 2
theta = 0.001, 0.0986
k_tilde = 0.05
lattice_N = 188
phi = 0.698
initial_flavor = mu
steps = 120
entropy = on
";

const THREE_FLAVOR: &str = "
flavors = 3
theta = 0.001, 0.01963, 0.12797
k_tilde = 0.1
lattice_N = 31
phi12 = 0.59437
phi13 = 0.16087
phi23 = 0.69835
initial_flavor = e
steps = 300
entropy = on
";

#[test]
fn simulate_two_flavor_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "two_flavor.conf", TWO_FLAVOR);
    let out_path = dir.path().join("two_flavor.csv");
    let out = run(
        &[
            "simulate",
            cfg.to_str().unwrap(),
            "-o",
            out_path.to_str().unwrap(),
        ],
        &[],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("snapped 0.04999882"));
    assert!(stdout.contains("completeness residual"));

    let (header, rows) = parse_csv(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(header, ["step", "P_mumu", "P_mutau", "S"]);
    assert_eq!(rows.len(), 121);
    let pmax = rows.iter().map(|r| r[2]).fold(0.0, f64::max);
    assert!((pmax - 0.970).abs() < 0.01);
    for r in &rows {
        assert!((r[1] + r[2] - 1.0).abs() < 1e-9);
        assert!((r[3] - 4.0 * r[1] * r[2]).abs() < 1e-10);
    }
}

#[test]
fn simulate_zero_steps_gives_single_row() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "z.conf",
        &TWO_FLAVOR.replace("steps = 120", "steps = 0"),
    );
    let out = run(&["simulate", cfg.to_str().unwrap(), "-o", "-"], &[]);
    assert!(out.status.success());
    let (_, rows) = parse_csv(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(rows.len(), 1);
    assert!((rows[0][1] - 1.0).abs() < 1e-12);
}

#[test]
fn three_flavor_entropy_columns_match_mode_construction() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "three_flavor.conf", THREE_FLAVOR);
    let out = run(&["simulate", cfg.to_str().unwrap(), "-o", "-"], &[]);
    assert!(out.status.success());
    let (header, rows) = parse_csv(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(
        header,
        ["step", "P_ee", "P_emu", "P_etau", "S_e", "S_mu", "S_tau", "S_avg"]
    );
    let s = FlavorScenario::momentum(
        vec![0.001, 0.01963, 0.12797],
        0.1,
        31,
        Mixing::ThreeFlavor(MixingSpec::new(0.59437, 0.16087, 0.69835, 0.0)),
        0,
        0,
    )
    .unwrap();
    for r in rows.iter().step_by(23) {
        for g in 0..3 {
            let e = partial_entropy(0, g, r[0], &s, EnergyModel::WalkDispersion).unwrap();
            assert!((r[4 + g] - e).abs() < 1e-10, "step {} traced {g}", r[0]);
        }
        assert!((r[7] - (r[4] + r[5] + r[6]) / 3.0).abs() < 1e-10);
    }
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "three_flavor.conf", THREE_FLAVOR);
    let a = run(&["simulate", cfg.to_str().unwrap(), "-o", "-"], &[]).stdout;
    let b = run(&["simulate", cfg.to_str().unwrap(), "-o", "-"], &[]).stdout;
    assert!(!a.is_empty());
    assert_eq!(a, b);
}

#[test]
fn config_errors_exit_2_and_leave_no_file() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("never.csv");
    let cfg = write_config(
        dir.path(),
        "bad.conf",
        &format!(
            "{}\noutput = {}\n",
            TWO_FLAVOR.replace("phi = 0.698", ""),
            out_path.display()
        ),
    );
    let out = run(&["simulate", cfg.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("phi"));
    assert!(!out_path.exists());
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);

    let out = run(
        &[
            "simulate",
            dir.path().join("missing.conf").to_str().unwrap(),
        ],
        &[],
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn failed_run_keeps_previous_output() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("keep.csv");
    std::fs::write(&out_path, "old\n").unwrap();
    let cfg = write_config(
        dir.path(),
        "bad.conf",
        &TWO_FLAVOR.replace("initial_flavor = mu", "initial_flavor = e"),
    );
    let out = run(
        &[
            "simulate",
            cfg.to_str().unwrap(),
            "-o",
            out_path.to_str().unwrap(),
        ],
        &[],
    );
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(std::fs::read_to_string(&out_path).unwrap(), "old\n");
}

#[test]
fn validate_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "three_flavor.conf", THREE_FLAVOR);
    let c = cfg.to_str().unwrap();

    let ok = run(&["validate", c], &[]);
    assert_eq!(
        ok.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&ok.stdout)
    );
    let table = String::from_utf8(ok.stdout).unwrap();
    assert!(table.contains("walk vs analytic series"));
    assert!(!table.contains("FAIL"));

    let bad = run(&["validate", c, "--corrupt-coin"], &[]);
    assert_eq!(bad.status.code(), Some(1));
    let table = String::from_utf8(bad.stdout).unwrap();
    let line = table.lines().find(|l| l.starts_with("CPTP")).unwrap();
    assert!(line.ends_with("FAIL"));

    let strict = run(&["validate", c], &[("OSC_TOL_CPTP", "1e-30")]);
    assert_eq!(strict.status.code(), Some(1));
    let garbage = run(&["validate", c], &[("OSC_TOL_CPTP", "tight")]);
    assert_eq!(garbage.status.code(), Some(2));
}

fn kraus_blocks(config: &str, t: &str) -> (Vec<(String, CMatrix)>, String) {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "k.conf", config);
    let out = run(&["kraus", cfg.to_str().unwrap(), "--t", t], &[]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    (parse_matrix_blocks(&text).unwrap(), text)
}

#[test]
fn kraus_dumps() {
    let (blocks, text) = kraus_blocks("theta = 0.3\n", "0");
    assert_eq!(blocks.len(), 1);
    assert_eq!(blocks[0].1, CMatrix::identity(2));
    assert!(text.contains("# completeness_residual = 0.000e0"));

    let (blocks, _) = kraus_blocks("theta = 0.3\n", "1");
    let (c, s) = (0.3f64.cos(), 0.3f64.sin());
    assert_eq!(blocks.len(), 2);
    assert_eq!(blocks[0].0, "K -1");
    assert_eq!(blocks[0].1, CMatrix::from_real_rows(&[[c, s], [0.0, 0.0]]));
    assert_eq!(blocks[1].1, CMatrix::from_real_rows(&[[0.0, 0.0], [-s, c]]));

    let (blocks, _) = kraus_blocks("theta = 0.785398163397448309615\n", "2");
    assert_eq!(blocks.len(), 3);
    for (_, m) in &blocks {
        for z in m.as_slice() {
            assert!(z.im == 0.0);
            assert!(z.re.abs() < 1e-15 || (z.re.abs() - 0.5).abs() < 1e-15);
        }
    }

    // two sectors give 4×4 block-diagonal operators
    let (blocks, _) = kraus_blocks(TWO_FLAVOR, "3");
    assert_eq!(blocks.len(), 4);
    assert!(blocks
        .iter()
        .all(|(_, m)| m.rows() == 4 && m.is_block_diagonal(2)));
}

#[test]
fn embed_dump_restricts_to_pmns() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "three_flavor.conf", THREE_FLAVOR);
    let out = run(&["embed", cfg.to_str().unwrap()], &[]);
    assert!(out.status.success());
    let blocks = parse_matrix_blocks(&String::from_utf8(out.stdout).unwrap()).unwrap();
    let names: Vec<&str> = blocks.iter().map(|(n, _)| n.as_str()).collect();
    assert_eq!(
        names,
        ["U0", "U1", "U2", "U3", "U3U2U1U0", "one-hot-restriction"]
    );
    let (c, s) = (0.59437f64.cos(), 0.59437f64.sin());
    let u1 = &blocks[1].1;
    assert_eq!(
        (u1[(2, 2)].re, u1[(2, 4)].re, u1[(4, 2)].re, u1[(4, 4)].re),
        (c, -s, s, c)
    );
    let pmns = pmns_matrix(&MixingSpec::new(0.59437, 0.16087, 0.69835, 0.0));
    assert!(blocks[5].1.max_abs_diff(&pmns) < 1e-12);

    let two = write_config(dir.path(), "two_flavor.conf", TWO_FLAVOR);
    assert_eq!(
        run(&["embed", two.to_str().unwrap()], &[]).status.code(),
        Some(2)
    );
}

#[test]
fn localized_start_reports_row_sums() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "loc.conf",
        "theta = 0.785398163397, 0.3\nk_tilde = 0.2\nphi = 0.5\ninitial_flavor = mu\nsteps = 10\ninitial_position = localized\n",
    );
    let out = run(
        &[
            "simulate",
            cfg.to_str().unwrap(),
            "-o",
            dir.path().join("l.csv").to_str().unwrap(),
        ],
        &[],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("not snapped"));
    let line = stdout.lines().find(|l| l.starts_with("row sums")).unwrap();
    let min: f64 = line
        .split_whitespace()
        .nth(3)
        .unwrap()
        .trim_end_matches(',')
        .parse()
        .unwrap();
    assert!(min < 0.99);
}

#[test]
fn amplitudes_file_start() {
    let dir = tempfile::tempdir().unwrap();
    let r = 0.5f64.sqrt();
    std::fs::write(
        dir.path().join("amps.txt"),
        format!("# x re im\n-1 {r} 0\n1 0 {r}\n"),
    )
    .unwrap();
    let cfg = write_config(
        dir.path(),
        "a.conf",
        "theta = 0.1, 0.3\nk_tilde = 0.2\nlattice_N = 8\nphi = 0.5\nsteps = 5\ninitial_position = amplitudes:amps.txt\n",
    );
    let out = run(&["simulate", cfg.to_str().unwrap(), "-o", "-"], &[]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    std::fs::write(dir.path().join("amps.txt"), "0 1 1\n").unwrap();
    assert_eq!(
        run(&["simulate", cfg.to_str().unwrap(), "-o", "-"], &[])
            .status
            .code(),
        Some(2)
    );
}
