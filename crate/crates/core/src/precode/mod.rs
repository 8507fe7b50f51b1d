//! Effective channels, ZF/MMSE digital precoders, hybrid normalization and
//! link metrics.

mod assignment;
mod evaluator;
mod hybrid;
mod linalg;
mod metrics;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

pub use assignment::{ActiveMask, BeamAssignment};
pub use evaluator::{ApDesign, Evaluator};
pub use hybrid::{design_hybrid, effective_channel, normalize_hybrid, HybridPrecoder, NormalizedColumns};
pub use linalg::{mmse_precoder, zf_precoder, CONDITION_LIMIT};
pub use metrics::{dl_power, metrics_from_gains, sinr_and_rates, ApGains, MetricsReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PrecoderKind {
    #[default]
    Zf,
    Mmse,
}

impl fmt::Display for PrecoderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PrecoderKind::Zf => "zf",
            PrecoderKind::Mmse => "mmse",
        })
    }
}

impl FromStr for PrecoderKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "zf" => Ok(PrecoderKind::Zf),
            "mmse" => Ok(PrecoderKind::Mmse),
            other => Err(Error::Parse(format!("unknown precoder `{other}` (expected zf or mmse)"))),
        }
    }
}
