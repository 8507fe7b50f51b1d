use std::io::Write;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scenario::{draw_realization, Codebook, NetworkConfig};
use crate::search::{search, SearchProblem, SearchSettings};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct DatasetOptions {
    /// Adds `|beta|` of the strongest path per link.
    pub include_gains: bool,
    /// First realization index; rows use consecutive indices from here.
    pub first_run: u64,
}

/// Column names: `run_index`, `pl_l_k`, `aod_l_k`, optional `gain_l_k`,
/// `label_l_k`, `sum_rate`, with 1-based indices, AP-major.
pub fn dataset_header(aps: usize, users: usize, include_gains: bool) -> Vec<String> {
    let block = |prefix: &str| -> Vec<String> {
        (1..=aps).flat_map(|l| (1..=users).map(move |k| format!("{prefix}_{l}_{k}"))).collect()
    };
    let mut cols = vec!["run_index".to_string()];
    cols.extend(block("pl"));
    cols.extend(block("aod"));
    if include_gains {
        cols.extend(block("gain"));
    }
    cols.extend(block("label"));
    cols.push("sum_rate".into());
    cols
}

/// Writes `rows` teacher-labelled rows. Features are path loss (dB) and AoD
/// (rad) of the strongest path of every link. Returns the number of rows.
pub fn export_dataset<W: Write>(
    config: &NetworkConfig,
    teacher: &SearchSettings,
    rows: usize,
    options: DatasetOptions,
    out: W,
) -> Result<usize> {
    config.validate()?;
    teacher.check_network(config.users, config.codebook_size())?;
    let codebook = Codebook::dft(config.antennas, config.codebook_size())?;
    let p_t_w = config.p_t_watts();
    let (aps, users) = (config.aps, config.users);
    let row = |i: usize| -> Result<Vec<String>> {
        let run = options.first_run + i as u64;
        let teach = || -> Result<Vec<String>> {
            let r = draw_realization(config, run)?;
            let out = search(&SearchProblem::new(&r, &codebook, p_t_w, config.master_seed), teacher)?;
            let links: Vec<(usize, usize)> = (0..aps).flat_map(|l| (0..users).map(move |k| (l, k))).collect();
            let mut v = vec![run.to_string()];
            v.extend(links.iter().map(|&(l, k)| r.strongest_path(k, l).alpha_db.to_string()));
            v.extend(links.iter().map(|&(l, k)| r.strongest_path(k, l).theta_rad.to_string()));
            if options.include_gains {
                v.extend(links.iter().map(|&(l, k)| r.strongest_path(k, l).beta.norm().to_string()));
            }
            v.extend(links.iter().map(|&(l, k)| out.assignment.get(l, k).to_string()));
            v.push(out.report.sum_rate.to_string());
            Ok(v)
        };
        teach().map_err(|e| Error::Teacher { row: i, source: Box::new(e) })
    };
    // collect everything first so the reported failure is the lowest row
    let results: Vec<Result<Vec<String>>> = (0..rows).into_par_iter().map(row).collect();
    let lines: Vec<Vec<String>> = results.into_iter().collect::<Result<_>>()?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(dataset_header(aps, users, options.include_gains))?;
    for line in &lines {
        w.write_record(line)?;
    }
    w.flush()?;
    Ok(lines.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_layout() {
        let h = dataset_header(3, 2, false);
        assert_eq!(h.len(), 1 + 12 + 6 + 1);
        assert_eq!(&h[1..3], &["pl_1_1", "pl_1_2"]);
        assert_eq!(h[7], "aod_1_1");
        assert_eq!(h[13], "label_1_1");
        assert_eq!(dataset_header(3, 2, true).len(), 1 + 18 + 6 + 1);
    }

    #[test]
    fn teacher_failure_reports_row() {
        let cfg = NetworkConfig::reference(2, 2, 4);
        let teacher = SearchSettings::exhaustive().with_budget(10);
        let err = export_dataset(&cfg, &teacher, 2, DatasetOptions::default(), Vec::new()).unwrap_err();
        assert!(matches!(err, Error::Teacher { row: 0, .. }));
    }
}
