//! Fixtures shared by the benchmarks.

use cfmimo::scenario::{draw_realization, Codebook};
use cfmimo::search::SearchProblem;
use cfmimo::{ChannelRealization, NetworkConfig};

pub struct Fixture {
    pub config: NetworkConfig,
    pub codebook: Codebook,
    pub realization: ChannelRealization,
}

impl Fixture {
    /// Reference network `L`x`K`x`M` with a DFT codebook of `M` beams.
    pub fn new(aps: usize, users: usize, antennas: usize) -> Self {
        let config = NetworkConfig::reference(aps, users, antennas).with_seed(2024);
        let codebook = Codebook::dft(antennas, antennas).expect("valid codebook");
        let realization = draw_realization(&config, 0).expect("valid config");
        Self { config, codebook, realization }
    }

    pub fn problem(&self) -> SearchProblem<'_> {
        SearchProblem::new(&self.realization, &self.codebook, self.config.p_t_watts(), self.config.master_seed)
    }
}
