use serde::{Deserialize, Serialize};

use super::{Algorithm, BccMode, SearchSettings};
use crate::error::{Error, Result};

/// Search structures whose first-sweep cost has a closed form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchFamily {
    Exhaustive,
    Semilinear,
    /// Per-user search over all APs jointly; formula only.
    Semicentralized,
    Linear,
    DisjointLinear,
}

impl SearchFamily {
    pub const ALL: [SearchFamily; 5] = [
        SearchFamily::Exhaustive,
        SearchFamily::Semilinear,
        SearchFamily::Semicentralized,
        SearchFamily::Linear,
        SearchFamily::DisjointLinear,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SearchFamily::Exhaustive => "exhaustive",
            SearchFamily::Semilinear => "semilinear",
            SearchFamily::Semicentralized => "semicentralized",
            SearchFamily::Linear => "linear",
            SearchFamily::DisjointLinear => "disjoint_linear",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace('-', "_");
        let norm = match norm.as_str() {
            "disjoint" | "disjoint_linear_dl" => "disjoint_linear",
            "linear_iis" => "linear",
            other => other,
        };
        SearchFamily::ALL
            .into_iter()
            .find(|f| f.name() == norm)
            .ok_or_else(|| Error::Parse(format!("unknown search family `{s}`")))
    }
}

impl From<Algorithm> for SearchFamily {
    fn from(a: Algorithm) -> Self {
        match a {
            Algorithm::Exhaustive => SearchFamily::Exhaustive,
            Algorithm::DisjointLinearDl => SearchFamily::DisjointLinear,
            Algorithm::Linear | Algorithm::LinearIis => SearchFamily::Linear,
            Algorithm::Semilinear => SearchFamily::Semilinear,
        }
    }
}

/// Number of candidate evaluations in one sweep over all APs (the whole
/// enumeration for the exhaustive search). Linear and disjoint counts are
/// the upper bound `L*K*B`; with conflict control the logs shrink later
/// segments. Saturates at `u128::MAX`.
pub fn complexity_formula(family: SearchFamily, aps: usize, users: usize, codebook_size: usize, bcc: BccMode) -> Result<u128> {
    if bcc != BccMode::Off && codebook_size < users {
        return Err(Error::ConfigConflict(format!(
            "beam conflict control needs B >= K, got B={codebook_size}, K={users}"
        )));
    }
    let (l, k, b) = (aps as u128, users as u128, codebook_size as u128);
    let pow = |base: u128, exp: u128| base.checked_pow(exp as u32).unwrap_or(u128::MAX);
    let falling = |n: u128, r: u128| (0..r).map(|i| n.saturating_sub(i)).fold(1u128, |a, x| a.saturating_mul(x));
    Ok(match family {
        SearchFamily::Exhaustive => pow(b, k.saturating_mul(l)),
        SearchFamily::Semilinear if bcc == BccMode::Full => l.saturating_mul(falling(b, k)),
        SearchFamily::Semilinear => l.saturating_mul(pow(b, k)),
        SearchFamily::Semicentralized => k.saturating_mul(pow(b, l)),
        SearchFamily::Linear | SearchFamily::DisjointLinear => l * k * b,
    })
}

/// First-sweep formula scaled by the restart loops of `settings`.
pub fn settings_complexity(settings: &SearchSettings, aps: usize, users: usize, codebook_size: usize) -> Result<u128> {
    let base = complexity_formula(settings.algorithm.into(), aps, users, codebook_size, settings.bcc_mode)?;
    let loops = match settings.algorithm {
        Algorithm::Exhaustive | Algorithm::DisjointLinearDl => 1,
        Algorithm::Linear | Algorithm::Semilinear => (settings.n_init * settings.n_iter) as u128,
        Algorithm::LinearIis => (settings.n_init * settings.n_iter * aps) as u128,
    };
    Ok(base.saturating_mul(loops))
}
