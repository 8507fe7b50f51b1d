use std::collections::HashMap;
use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::precode::{BeamAssignment, Evaluator, PrecoderKind};
use crate::scenario::{ChannelRealization, Codebook, DumpHeader};

/// Metrics of one scored assignment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRecord {
    pub run_index: u64,
    pub sum_rate: f64,
    pub rates: Vec<f64>,
    pub sinr: Vec<f64>,
    /// Some users share a beam somewhere in the network.
    pub conflict_warning: bool,
    pub conflicts: usize,
    pub fallback_count: u64,
}

/// Reads `run_index` and the `label_l_k` columns (1-based, AP-major) from a
/// CSV file; other columns are ignored, so an exported dataset is accepted
/// as is.
pub fn read_assignments<R: Read>(input: R, aps: usize, users: usize) -> Result<Vec<(u64, BeamAssignment)>> {
    let mut rdr = csv::Reader::from_reader(input);
    let headers = rdr.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| Error::InvalidAssignment(format!("missing column `{name}`")))
    };
    let run_col = col("run_index")?;
    let label_cols: Vec<usize> = (1..=aps)
        .flat_map(|l| (1..=users).map(move |k| (l, k)))
        .map(|(l, k)| col(&format!("label_{l}_{k}")))
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let field = |c: usize| rec.get(c).unwrap_or("").trim();
        let parse_err = |what: &str, v: &str| Error::InvalidAssignment(format!("row {i}: bad {what} `{v}`"));
        let run: u64 = field(run_col).parse().map_err(|_| parse_err("run_index", field(run_col)))?;
        let idx = label_cols
            .iter()
            .map(|&c| field(c).parse::<usize>().map_err(|_| parse_err("beam index", field(c))))
            .collect::<Result<Vec<_>>>()?;
        out.push((run, BeamAssignment::from_indices(aps, users, idx)?));
    }
    Ok(out)
}

/// Scores each assignment on the dumped realization with the same run
/// index. Singular ZF designs fall back to MMSE.
pub fn score_assignments(
    header: &DumpHeader,
    realizations: &[ChannelRealization],
    assignments: &[(u64, BeamAssignment)],
    precoder: PrecoderKind,
) -> Result<Vec<ScoreRecord>> {
    let codebook = Codebook::dft(header.antennas, header.codebook_size)?;
    let by_run: HashMap<u64, &ChannelRealization> = realizations.iter().map(|r| (r.run_index(), r)).collect();
    assignments
        .iter()
        .map(|(run, a)| {
            if a.aps() != header.aps || a.users() != header.users {
                return Err(Error::InvalidAssignment(format!(
                    "run {run}: assignment is {}x{}, dump is L={} K={}",
                    a.aps(),
                    a.users(),
                    header.aps,
                    header.users
                )));
            }
            a.validate(header.codebook_size)?;
            let r = by_run
                .get(run)
                .ok_or_else(|| Error::InvalidAssignment(format!("run {run} is not in the dump")))?;
            let eval = Evaluator::new(r, &codebook, header.p_t_w, precoder, true, None)?;
            let report = eval.report(a);
            let conflicts = a.conflicts(None);
            Ok(ScoreRecord {
                run_index: *run,
                sum_rate: report.sum_rate,
                rates: report.rates,
                sinr: report.sinr,
                conflict_warning: conflicts > 0,
                conflicts,
                fallback_count: report.fallback_count,
            })
        })
        .collect()
}
