//! Plain-text channel dump.
//!
//! ```text
//! # cfmimo channel dump v1
//! # L=3 K=2 M=8 P=1 B=8 spacing=0.5 p_T_W=19.95... noise_W=3.38...e-12
//! run_index k l p re_beta im_beta theta_rad alpha_dB
//! 0 0 0 0 0.1234 -0.5678 1.2345 101.23
//! ```
//!
//! Indices are 0-based. Floats use the shortest representation that parses
//! back to the same bits, so channels rebuilt from a dump are identical to
//! the ones that were written.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use super::{ChannelRealization, NetworkConfig, PathRecord};
use crate::error::{Error, Result};
use crate::C64;

const MAGIC: &str = "# cfmimo channel dump v1";
const COLUMNS: &str = "run_index k l p re_beta im_beta theta_rad alpha_dB";

/// Network constants needed to rebuild and score realizations from a dump.
#[derive(Debug, Clone, PartialEq)]
pub struct DumpHeader {
    pub aps: usize,
    pub users: usize,
    pub antennas: usize,
    pub paths: usize,
    pub codebook_size: usize,
    pub spacing_wavelengths: f64,
    pub p_t_w: f64,
    pub noise_w: f64,
}

impl DumpHeader {
    pub fn from_config(cfg: &NetworkConfig) -> Self {
        Self {
            aps: cfg.aps,
            users: cfg.users,
            antennas: cfg.antennas,
            paths: cfg.paths,
            codebook_size: cfg.codebook_size(),
            spacing_wavelengths: cfg.antenna_spacing_wavelengths,
            p_t_w: cfg.p_t_watts(),
            noise_w: cfg.noise_power_watts(),
        }
    }
}

pub fn write_dump<'a, W, I>(mut out: W, header: &DumpHeader, realizations: I) -> Result<()>
where
    W: Write,
    I: IntoIterator<Item = &'a ChannelRealization>,
{
    writeln!(out, "{MAGIC}")?;
    writeln!(
        out,
        "# L={} K={} M={} P={} B={} spacing={} p_T_W={} noise_W={}",
        header.aps,
        header.users,
        header.antennas,
        header.paths,
        header.codebook_size,
        header.spacing_wavelengths,
        header.p_t_w,
        header.noise_w
    )?;
    writeln!(out, "{COLUMNS}")?;
    for r in realizations {
        for k in 0..r.users() {
            for l in 0..r.aps() {
                for (p, rec) in r.link_paths(k, l).iter().enumerate() {
                    writeln!(
                        out,
                        "{} {k} {l} {p} {} {} {} {}",
                        r.run_index(),
                        rec.beta.re,
                        rec.beta.im,
                        rec.theta_rad,
                        rec.alpha_db
                    )?;
                }
            }
        }
    }
    Ok(())
}

fn parse_header(line: &str) -> Result<DumpHeader> {
    let fields: BTreeMap<&str, &str> = line
        .trim_start_matches('#')
        .split_whitespace()
        .filter_map(|kv| kv.split_once('='))
        .collect();
    let get = |key: &str| -> Result<&str> {
        fields
            .get(key)
            .copied()
            .ok_or_else(|| Error::Parse(format!("dump header missing `{key}`")))
    };
    let int = |key: &str| -> Result<usize> {
        get(key)?.parse().map_err(|e| Error::Parse(format!("dump header `{key}`: {e}")))
    };
    let float = |key: &str| -> Result<f64> {
        get(key)?.parse().map_err(|e| Error::Parse(format!("dump header `{key}`: {e}")))
    };
    Ok(DumpHeader {
        aps: int("L")?,
        users: int("K")?,
        antennas: int("M")?,
        paths: int("P")?,
        codebook_size: int("B")?,
        spacing_wavelengths: float("spacing")?,
        p_t_w: float("p_T_W")?,
        noise_w: float("noise_W")?,
    })
}

/// Reads a dump back into realizations, in file order of first appearance.
pub fn read_dump<R: BufRead>(input: R) -> Result<(DumpHeader, Vec<ChannelRealization>)> {
    let mut header = None;
    let mut runs: Vec<(u64, Vec<PathRecord>)> = Vec::new();
    for (lineno, line) in input.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('#') {
            if line.contains("L=") {
                header = Some(parse_header(line)?);
            }
            continue;
        }
        if line.starts_with("run_index") {
            continue;
        }
        let h = header
            .as_ref()
            .ok_or_else(|| Error::Parse("dump record before header".into()))?;
        let cols: Vec<&str> = line.split_whitespace().collect();
        if cols.len() != 8 {
            return Err(Error::Parse(format!("line {}: expected 8 columns, got {}", lineno + 1, cols.len())));
        }
        let bad = |what: &str| Error::Parse(format!("line {}: bad {what}", lineno + 1));
        let run: u64 = cols[0].parse().map_err(|_| bad("run_index"))?;
        let idx: Vec<usize> = cols[1..4]
            .iter()
            .map(|c| c.parse().map_err(|_| bad("index")))
            .collect::<Result<_>>()?;
        let vals: Vec<f64> = cols[4..]
            .iter()
            .map(|c| c.parse().map_err(|_| bad("value")))
            .collect::<Result<_>>()?;
        let (k, l, p) = (idx[0], idx[1], idx[2]);
        if k >= h.users || l >= h.aps || p >= h.paths {
            return Err(Error::Parse(format!("line {}: index out of range", lineno + 1)));
        }
        if runs.last().map(|(r, _)| *r) != Some(run) {
            runs.push((run, Vec::with_capacity(h.aps * h.users * h.paths)));
        }
        let recs = &mut runs.last_mut().expect("just pushed").1;
        let expected = recs.len();
        if (k * h.aps + l) * h.paths + p != expected {
            return Err(Error::Parse(format!("line {}: records out of order", lineno + 1)));
        }
        recs.push(PathRecord { beta: C64::new(vals[0], vals[1]), theta_rad: vals[2], alpha_db: vals[3] });
    }
    let header = header.ok_or_else(|| Error::Parse("missing dump header".into()))?;
    let realizations = runs
        .into_iter()
        .map(|(run, recs)| {
            ChannelRealization::from_paths(
                run,
                header.aps,
                header.users,
                header.antennas,
                header.paths,
                header.spacing_wavelengths,
                recs,
                header.noise_w,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((header, realizations))
}
