use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::precode::PrecoderKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Exhaustive,
    DisjointLinearDl,
    Linear,
    Semilinear,
    LinearIis,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::Exhaustive,
        Algorithm::DisjointLinearDl,
        Algorithm::Linear,
        Algorithm::Semilinear,
        Algorithm::LinearIis,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Exhaustive => "exhaustive",
            Algorithm::DisjointLinearDl => "disjoint_linear_dl",
            Algorithm::Linear => "linear",
            Algorithm::Semilinear => "semilinear",
            Algorithm::LinearIis => "linear_iis",
        }
    }

    /// Metric used when a configuration does not name one.
    pub fn default_metric(self) -> Metric {
        match self {
            Algorithm::DisjointLinearDl => Metric::Dl,
            _ => Metric::Rate,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace('-', "_");
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == norm)
            .ok_or_else(|| Error::Parse(format!("unknown algorithm `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    /// Network sum-rate.
    #[default]
    Rate,
    /// Sum of desired direct-link powers.
    Dl,
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::Rate => "rate",
            Metric::Dl => "dl",
        })
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "rate" => Ok(Metric::Rate),
            "dl" => Ok(Metric::Dl),
            _ => Err(Error::Parse(format!("unknown metric `{s}`"))),
        }
    }
}

/// Beam conflict control: whether two users may share a codeword anywhere in
/// the network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BccMode {
    /// Conflict-free init and conflict-free search.
    #[default]
    Full,
    /// Conflict-free init only; the search may reuse beams.
    InitOnly,
    Off,
}

impl BccMode {
    /// Whether the initial assignment must be conflict free.
    pub fn feasible_init(self) -> bool {
        self != BccMode::Off
    }
}

impl fmt::Display for BccMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BccMode::Full => "full",
            BccMode::InitOnly => "init_only",
            BccMode::Off => "off",
        })
    }
}

impl FromStr for BccMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "full" => Ok(BccMode::Full),
            "init_only" => Ok(BccMode::InitOnly),
            "off" => Ok(BccMode::Off),
            _ => Err(Error::Parse(format!("unknown bcc mode `{s}`"))),
        }
    }
}

pub const DEFAULT_BUDGET: u64 = 1_000_000;

/// Everything that selects and tunes a search. Ties always go to the lowest
/// beam or tuple index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchSettings {
    pub algorithm: Algorithm,
    pub metric: Metric,
    #[serde(default)]
    pub bcc_mode: BccMode,
    #[serde(default = "one")]
    pub n_init: usize,
    #[serde(default = "one")]
    pub n_iter: usize,
    #[serde(default)]
    pub precoder: PrecoderKind,
    /// Upper bound on enumerated combinations for exhaustive and semilinear.
    #[serde(default = "default_budget")]
    pub exhaustive_budget: u64,
}

fn one() -> usize {
    1
}

fn default_budget() -> u64 {
    DEFAULT_BUDGET
}

impl SearchSettings {
    pub fn new(algorithm: Algorithm) -> Self {
        Self {
            algorithm,
            metric: algorithm.default_metric(),
            bcc_mode: BccMode::Full,
            n_init: 1,
            n_iter: 1,
            precoder: PrecoderKind::Zf,
            exhaustive_budget: DEFAULT_BUDGET,
        }
    }

    pub fn exhaustive() -> Self {
        Self::new(Algorithm::Exhaustive)
    }

    pub fn disjoint() -> Self {
        Self::new(Algorithm::DisjointLinearDl)
    }

    pub fn linear(n_init: usize, n_iter: usize) -> Self {
        Self::new(Algorithm::Linear).with_restarts(n_init, n_iter)
    }

    pub fn semilinear(n_init: usize, n_iter: usize) -> Self {
        Self::new(Algorithm::Semilinear).with_restarts(n_init, n_iter)
    }

    pub fn linear_iis(n_init: usize, n_iter: usize) -> Self {
        Self::new(Algorithm::LinearIis).with_restarts(n_init, n_iter)
    }

    pub fn with_restarts(mut self, n_init: usize, n_iter: usize) -> Self {
        self.n_init = n_init;
        self.n_iter = n_iter;
        self
    }

    pub fn with_metric(mut self, metric: Metric) -> Self {
        self.metric = metric;
        self
    }

    pub fn with_bcc(mut self, bcc_mode: BccMode) -> Self {
        self.bcc_mode = bcc_mode;
        self
    }

    pub fn with_precoder(mut self, precoder: PrecoderKind) -> Self {
        self.precoder = precoder;
        self
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.exhaustive_budget = budget;
        self
    }

    /// Short name in the style `linear-II-rate`.
    pub fn label(&self) -> String {
        match self.algorithm {
            Algorithm::Exhaustive => "exhaustive".into(),
            Algorithm::DisjointLinearDl => "disjoint-linear-DL".into(),
            Algorithm::Linear => format!("linear-II-{}", self.metric_label()),
            Algorithm::Semilinear => format!("semilinear-II-{}", self.metric_label()),
            Algorithm::LinearIis => format!("linear-IIS-{}", self.metric_label()),
        }
    }

    fn metric_label(&self) -> &'static str {
        match self.metric {
            Metric::Rate => "rate",
            Metric::Dl => "DL",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(format!("{}: {msg}", self.algorithm)));
        match (self.algorithm, self.metric) {
            (Algorithm::DisjointLinearDl, Metric::Rate) => return bad("the disjoint search scores direct-link power"),
            (Algorithm::LinearIis, Metric::Dl) => return bad("the prioritized search scores sum-rate"),
            (Algorithm::Exhaustive, Metric::Dl) => return bad("the exhaustive search scores sum-rate"),
            _ => {}
        }
        if self.n_init == 0 || self.n_iter == 0 {
            return bad("n_init and n_iter must be at least 1");
        }
        if self.exhaustive_budget == 0 {
            return bad("budget must be positive");
        }
        Ok(())
    }

    /// Checks the settings against a network's dimensions.
    pub fn check_network(&self, users: usize, codebook_size: usize) -> Result<()> {
        self.validate()?;
        if self.bcc_mode != BccMode::Off && codebook_size < users {
            return Err(Error::ConfigConflict(format!(
                "beam conflict control needs B >= K, got B={codebook_size}, K={users}"
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels() {
        assert_eq!(SearchSettings::linear(2, 2).label(), "linear-II-rate");
        assert_eq!(SearchSettings::linear(2, 2).with_metric(Metric::Dl).label(), "linear-II-DL");
        assert_eq!(SearchSettings::linear_iis(1, 1).label(), "linear-IIS-rate");
        assert_eq!(SearchSettings::disjoint().label(), "disjoint-linear-DL");
    }

    #[test]
    fn metric_restrictions() {
        assert!(SearchSettings::disjoint().with_metric(Metric::Rate).validate().is_err());
        assert!(SearchSettings::linear_iis(1, 1).with_metric(Metric::Dl).validate().is_err());
        assert!(SearchSettings::semilinear(1, 1).with_metric(Metric::Dl).validate().is_ok());
        assert!(SearchSettings::linear(0, 1).validate().is_err());
    }

    #[test]
    fn bcc_needs_enough_beams() {
        let s = SearchSettings::linear(1, 1);
        assert!(matches!(s.check_network(4, 2), Err(Error::ConfigConflict(_))));
        assert!(s.clone().with_bcc(BccMode::Off).check_network(4, 2).is_ok());
    }

    #[test]
    fn parsing() {
        assert_eq!("linear-iis".parse::<Algorithm>().unwrap(), Algorithm::LinearIis);
        assert_eq!("init_only".parse::<BccMode>().unwrap(), BccMode::InitOnly);
        assert!("greedy".parse::<Algorithm>().is_err());
        let s: SearchSettings = toml::from_str("algorithm = \"semilinear\"\nmetric = \"dl\"\nn_init = 3").unwrap();
        assert_eq!(s.n_init, 3);
        assert_eq!(s.n_iter, 1);
        assert_eq!(s.bcc_mode, BccMode::Full);
    }
}
