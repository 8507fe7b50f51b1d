//! Beam selection searches under optional beam conflict control.

mod algorithms;
mod complexity;
mod logs;
mod settings;
mod state;

pub use algorithms::{
    disjoint_linear_dl, exhaustive_search, random_init, run_ii, run_iis, search, SearchOutcome, SearchProblem,
};
pub use complexity::{complexity_formula, settings_complexity, SearchFamily};
pub(crate) use logs::odometer;
pub use logs::{CodebookLog, CombinationSet};
pub use settings::{Algorithm, BccMode, Metric, SearchSettings, DEFAULT_BUDGET};
pub use state::{linear_search_pass, semilinear_search_pass, SearchState};
