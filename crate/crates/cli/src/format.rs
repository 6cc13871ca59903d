//! Series CSV and matrix text dumps.
//!
//! Numbers in CSV files carry 12 significant digits (`{:.11e}`); matrix
//! dumps carry 17 (`{:.16e}`), enough to round-trip an `f64`.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use nuwalk_core::entanglement::EntropyRow;
use nuwalk_core::neutrino::{flavor_labels, TransitionSeries};
use nuwalk_core::{CMatrix, C64};

use crate::error::{CliError, CliResult};

/// Writes `contents` to a sibling temp file and renames it over `path`, so a
/// failed run never leaves a partial file behind.
pub fn write_atomic(path: &Path, contents: &str) -> CliResult<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| CliError::Io(e.error))?;
    Ok(())
}

/// Column names after `step`.
pub fn series_header(series: &TransitionSeries, entropy: bool) -> Vec<String> {
    let labels = flavor_labels(series.n_flavors);
    let a = labels[series.initial_flavor];
    let mut cols: Vec<String> = labels.iter().map(|b| format!("P_{a}{b}")).collect();
    if entropy {
        if series.n_flavors == 2 {
            cols.push("S".into());
        } else {
            cols.extend(labels.iter().map(|g| format!("S_{g}")));
            cols.push("S_avg".into());
        }
    }
    cols
}

pub fn series_csv(series: &TransitionSeries, entropy: Option<&[EntropyRow]>) -> String {
    let mut out = String::from("step");
    for c in series_header(series, entropy.is_some()) {
        out.push(',');
        out.push_str(&c);
    }
    out.push('\n');
    for (i, row) in series.rows.iter().enumerate() {
        write!(out, "{}", row.step).unwrap();
        for p in &row.probabilities {
            write!(out, ",{p:.11e}").unwrap();
        }
        if let Some(e) = entropy {
            for s in &e[i].partial {
                write!(out, ",{s:.11e}").unwrap();
            }
            if let Some(avg) = e[i].average {
                write!(out, ",{avg:.11e}").unwrap();
            }
        }
        out.push('\n');
    }
    out
}

/// Parsed CSV: header and numeric rows.
pub fn parse_csv(text: &str) -> CliResult<(Vec<String>, Vec<Vec<f64>>)> {
    let mut lines = text.lines();
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| CliError::Config("empty CSV".into()))?
        .split(',')
        .map(str::to_string)
        .collect();
    let rows = lines
        .filter(|l| !l.is_empty())
        .map(|l| {
            l.split(',')
                .map(|v| {
                    v.parse::<f64>()
                        .map_err(|_| CliError::Config(format!("bad CSV value '{v}'")))
                })
                .collect::<CliResult<Vec<f64>>>()
        })
        .collect::<CliResult<_>>()?;
    Ok((header, rows))
}

fn write_matrix(out: &mut String, m: &CMatrix) {
    for r in 0..m.rows() {
        let row: Vec<String> = m
            .row(r)
            .iter()
            .map(|z| format!("{:.16e},{:.16e}", z.re, z.im))
            .collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
}

/// A titled matrix block: `name`, then one line per row of `re,im` pairs.
pub fn matrix_block(out: &mut String, name: &str, m: &CMatrix) {
    writeln!(out, "{name} {}x{}", m.rows(), m.cols()).unwrap();
    write_matrix(out, m);
    out.push('\n');
}

/// Reads back the blocks written by [`matrix_block`], skipping `#` lines.
pub fn parse_matrix_blocks(text: &str) -> CliResult<Vec<(String, CMatrix)>> {
    let bad = |msg: String| CliError::Config(msg);
    let mut out = Vec::new();
    let mut lines = text
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty());
    while let Some(title) = lines.next() {
        let (name, shape) = title
            .rsplit_once(' ')
            .ok_or_else(|| bad(format!("bad block title '{title}'")))?;
        let (r, c) = shape
            .split_once('x')
            .ok_or_else(|| bad(format!("bad shape '{shape}'")))?;
        let (r, c): (usize, usize) = (
            r.parse().map_err(|_| bad(format!("bad shape '{shape}'")))?,
            c.parse().map_err(|_| bad(format!("bad shape '{shape}'")))?,
        );
        let mut m = CMatrix::zeros(r, c);
        for i in 0..r {
            let line = lines
                .next()
                .ok_or_else(|| bad(format!("block '{name}' is truncated")))?;
            let entries: Vec<&str> = line.split_whitespace().collect();
            if entries.len() != c {
                return Err(bad(format!(
                    "block '{name}' row {i} has {} entries",
                    entries.len()
                )));
            }
            for (j, e) in entries.iter().enumerate() {
                let (re, im) = e
                    .split_once(',')
                    .ok_or_else(|| bad(format!("bad entry '{e}'")))?;
                let p = |s: &str| {
                    s.parse::<f64>()
                        .map_err(|_| bad(format!("bad number '{s}'")))
                };
                m[(i, j)] = C64::new(p(re)?, p(im)?);
            }
        }
        out.push((name.to_string(), m));
    }
    Ok(out)
}
