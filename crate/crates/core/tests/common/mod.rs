#![allow(dead_code)]

use cfmimo::scenario::{draw_realization, Codebook};
use cfmimo::search::{search, SearchOutcome, SearchProblem};
use cfmimo::{ChannelRealization, NetworkConfig, SearchSettings};

/// One realization plus everything needed to search it.
pub struct Instance {
    pub config: NetworkConfig,
    pub codebook: Codebook,
    pub realization: ChannelRealization,
}

impl Instance {
    pub fn new(config: &NetworkConfig, run: u64) -> Self {
        let codebook = Codebook::dft(config.antennas, config.codebook_size()).unwrap();
        let realization = draw_realization(config, run).unwrap();
        Self { config: config.clone(), codebook, realization }
    }

    pub fn net(l: usize, k: usize, m: usize, seed: u64, run: u64) -> Self {
        Self::new(&NetworkConfig::reference(l, k, m).with_seed(seed), run)
    }

    pub fn problem(&self) -> SearchProblem<'_> {
        SearchProblem::new(&self.realization, &self.codebook, self.config.p_t_watts(), self.config.master_seed)
    }

    pub fn run(&self, settings: &SearchSettings) -> SearchOutcome {
        search(&self.problem(), settings).unwrap()
    }
}
