//! RF-chain shutoff: each AP serves only a subset of users, chosen from
//! path losses before the beam search runs.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use crate::precode::ActiveMask;
use crate::error::{Error, Result};
use crate::scenario::ChannelRealization;
use crate::search::{search, SearchOutcome, SearchProblem, SearchSettings};

/// Which users each AP serves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RfMode {
    /// Every AP serves every user.
    #[default]
    Full,
    /// Each AP serves its `n` lowest path-loss users.
    Naive(usize),
    /// Each AP serves users whose path loss lies below a per-AP threshold.
    Smart,
}

impl fmt::Display for RfMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RfMode::Full => f.write_str("full"),
            RfMode::Naive(n) => write!(f, "naive({n})"),
            RfMode::Smart => f.write_str("smart"),
        }
    }
}

impl FromStr for RfMode {
    type Err = Error;

    /// Accepts `full`, `smart`, `naive(n)` and `naive:n`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        match t.as_str() {
            "full" => return Ok(RfMode::Full),
            "smart" => return Ok(RfMode::Smart),
            _ => {}
        }
        let n = t
            .strip_prefix("naive(")
            .and_then(|r| r.strip_suffix(')'))
            .or_else(|| t.strip_prefix("naive:"))
            .and_then(|n| n.trim().parse().ok())
            .ok_or_else(|| Error::Parse(format!("unknown rf mode `{s}`")))?;
        Ok(RfMode::Naive(n))
    }
}

/// Users served by one AP under the smart rule: path loss strictly below
/// `mean - var^(1/4)` (population variance, dB values). Falls back to the
/// single lowest-loss user when nobody qualifies.
pub fn smart_mask(path_loss_db: &[f64]) -> Vec<usize> {
    let n = path_loss_db.len();
    if n == 0 {
        return Vec::new();
    }
    let mean = path_loss_db.iter().sum::<f64>() / n as f64;
    let var = path_loss_db.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
    let tau = mean - var.powf(0.25);
    let served: Vec<usize> = (0..n).filter(|&k| path_loss_db[k] < tau).collect();
    if served.is_empty() {
        naive_mask(path_loss_db, 1)
    } else {
        served
    }
}

/// The `n` lowest path-loss users (ties to the lower index), in index order.
pub fn naive_mask(path_loss_db: &[f64], n: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..path_loss_db.len()).collect();
    order.sort_by(|&a, &b| path_loss_db[a].total_cmp(&path_loss_db[b]).then(a.cmp(&b)));
    order.truncate(n.max(1));
    order.sort_unstable();
    order
}

/// Per-AP served sets for `mode`.
pub fn policy_mask(realization: &ChannelRealization, mode: RfMode) -> Result<ActiveMask> {
    let (aps, users) = (realization.aps(), realization.users());
    if let RfMode::Naive(n) = mode {
        if n == 0 || n > users {
            return Err(Error::InvalidConfig(format!("naive rf mode needs 1 <= n <= K, got n={n}, K={users}")));
        }
    }
    let served: Vec<Vec<usize>> = (0..aps)
        .map(|l| {
            let pl: Vec<f64> = (0..users).map(|k| realization.link_path_loss_db(k, l)).collect();
            match mode {
                RfMode::Full => (0..users).collect(),
                RfMode::Naive(n) => naive_mask(&pl, n),
                RfMode::Smart => smart_mask(&pl),
            }
        })
        .collect();
    Ok(ActiveMask::from_served(users, &served))
}

/// Search results with all chains on and with the policy's chains on.
#[derive(Debug, Clone)]
pub struct PolicyOutcome {
    pub mask: ActiveMask,
    pub full: SearchOutcome,
    pub reduced: SearchOutcome,
    /// Fraction of RF chains switched off.
    pub saving: f64,
    /// `1 - reduced/full` sum-rate.
    pub loss: f64,
}

/// Runs `settings` twice, once with every chain and once masked by `mode`.
pub fn apply_policy(problem: &SearchProblem<'_>, mode: RfMode, settings: &SearchSettings) -> Result<PolicyOutcome> {
    let full_problem = problem.with_mask(None);
    let full = search(&full_problem, settings)?;
    let mask = policy_mask(problem.realization, mode)?;
    let reduced = if mode == RfMode::Full {
        full.clone()
    } else {
        search(&problem.with_mask(Some(&mask)), settings)?
    };
    let loss = rate_loss(full.report.sum_rate, reduced.report.sum_rate);
    Ok(PolicyOutcome { saving: mask.saving_fraction(), mask, full, reduced, loss })
}

/// `1 - reduced/full`, zero when the full rate is zero.
pub fn rate_loss(full: f64, reduced: f64) -> f64 {
    if full > 0.0 {
        1.0 - reduced / full
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smart_threshold_example() {
        // mean 105, var 125, tau = 105 - 125^0.25 ~ 101.66
        assert_eq!(smart_mask(&[90.0, 100.0, 110.0, 120.0]), vec![0, 1]);
        assert_eq!(smart_mask(&[120.0, 110.0, 100.0, 90.0]), vec![2, 3]);
    }

    #[test]
    fn smart_fallbacks() {
        assert_eq!(smart_mask(&[100.0; 4]), vec![0]);
        assert_eq!(smart_mask(&[77.0]), vec![0]);
    }

    #[test]
    fn naive_picks_lowest() {
        assert_eq!(naive_mask(&[90.0, 120.0, 80.0, 100.0], 2), vec![0, 2]);
        assert_eq!(naive_mask(&[1.0, 1.0, 1.0], 2), vec![0, 1]);
    }

    #[test]
    fn mode_parsing() {
        assert_eq!("naive(2)".parse::<RfMode>().unwrap(), RfMode::Naive(2));
        assert_eq!("naive:3".parse::<RfMode>().unwrap(), RfMode::Naive(3));
        assert_eq!("Smart".parse::<RfMode>().unwrap(), RfMode::Smart);
        assert!("naive".parse::<RfMode>().is_err());
        assert_eq!(RfMode::Naive(2).to_string(), "naive(2)");
        #[derive(Deserialize)]
        struct W {
            rf: RfMode,
        }
        let w: W = toml::from_str("rf = { naive = 2 }").unwrap();
        assert_eq!(w.rf, RfMode::Naive(2));
        let w: W = toml::from_str("rf = \"smart\"").unwrap();
        assert_eq!(w.rf, RfMode::Smart);
    }
}
