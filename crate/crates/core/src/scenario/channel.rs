use std::f64::consts::PI;

use nalgebra::DVector;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{array_response, path_loss_db, NetworkConfig};
use crate::error::{Error, Result};
use crate::seed::{substream, Stream};
use crate::C64;

/// One propagation path of one AP-user link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathRecord {
    pub beta: C64,
    pub theta_rad: f64,
    pub alpha_db: f64,
}

impl PathRecord {
    /// Received power factor `|beta|^2 / alpha` (linear).
    pub fn strength(&self) -> f64 {
        self.beta.norm_sqr() / 10f64.powf(self.alpha_db / 10.0)
    }
}

/// Per-link path records and the assembled `M`-element channel vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    run_index: u64,
    aps: usize,
    users: usize,
    antennas: usize,
    paths: usize,
    spacing: f64,
    records: Vec<PathRecord>,
    channels: Vec<DVector<C64>>,
    noise_power_w: f64,
}

impl ChannelRealization {
    /// Assembles the channel vectors from path records ordered
    /// user-major, then AP, then path.
    #[allow(clippy::too_many_arguments)]
    pub fn from_paths(
        run_index: u64,
        aps: usize,
        users: usize,
        antennas: usize,
        paths: usize,
        spacing_wavelengths: f64,
        records: Vec<PathRecord>,
        noise_power_w: f64,
    ) -> Result<Self> {
        if records.len() != aps * users * paths {
            return Err(Error::InvalidGeometry(format!(
                "expected {} path records, got {}",
                aps * users * paths,
                records.len()
            )));
        }
        let amp = (antennas as f64 / paths as f64).sqrt();
        let mut channels = Vec::with_capacity(aps * users);
        for link in records.chunks(paths) {
            let mut h = DVector::<C64>::zeros(antennas);
            for rec in link {
                if !(rec.alpha_db.is_finite() && rec.theta_rad.is_finite()) {
                    return Err(Error::InvalidGeometry("non-finite path record".into()));
                }
                let a = array_response(rec.theta_rad, antennas, spacing_wavelengths)?;
                let gain = rec.beta * (amp / 10f64.powf(rec.alpha_db / 20.0));
                h.axpy(gain, &a, C64::new(1.0, 0.0));
            }
            channels.push(h);
        }
        Ok(Self {
            run_index,
            aps,
            users,
            antennas,
            paths,
            spacing: spacing_wavelengths,
            records,
            channels,
            noise_power_w,
        })
    }

    pub fn run_index(&self) -> u64 {
        self.run_index
    }
    pub fn aps(&self) -> usize {
        self.aps
    }
    pub fn users(&self) -> usize {
        self.users
    }
    pub fn antennas(&self) -> usize {
        self.antennas
    }
    pub fn paths(&self) -> usize {
        self.paths
    }
    pub fn spacing_wavelengths(&self) -> f64 {
        self.spacing
    }
    pub fn noise_power_w(&self) -> f64 {
        self.noise_power_w
    }

    /// Channel vector `h_kl` from AP `ap` to user `user`.
    pub fn channel(&self, user: usize, ap: usize) -> &DVector<C64> {
        &self.channels[user * self.aps + ap]
    }

    pub fn path(&self, user: usize, ap: usize, p: usize) -> &PathRecord {
        &self.records[(user * self.aps + ap) * self.paths + p]
    }

    pub fn link_paths(&self, user: usize, ap: usize) -> &[PathRecord] {
        let start = (user * self.aps + ap) * self.paths;
        &self.records[start..start + self.paths]
    }

    pub fn records(&self) -> &[PathRecord] {
        &self.records
    }

    /// Path loss of a link in dB. All paths of a link share distance and
    /// shadowing, so the first path is representative.
    pub fn link_path_loss_db(&self, user: usize, ap: usize) -> f64 {
        self.path(user, ap, 0).alpha_db
    }

    /// Path with the largest received power on a link.
    pub fn strongest_path(&self, user: usize, ap: usize) -> &PathRecord {
        self.link_paths(user, ap)
            .iter()
            .reduce(|best, p| if p.strength() > best.strength() { p } else { best })
            .expect("links have at least one path")
    }

    /// Order-sensitive fingerprint over every record's bit pattern.
    pub fn fingerprint(&self) -> u64 {
        const PRIME: u64 = 0x0100_0000_01b3;
        let mut h: u64 = 0xcbf2_9ce4_8422_2325 ^ self.run_index;
        for r in &self.records {
            for bits in [r.beta.re.to_bits(), r.beta.im.to_bits(), r.theta_rad.to_bits(), r.alpha_db.to_bits()] {
                h = (h ^ bits).wrapping_mul(PRIME);
            }
        }
        h
    }
}

/// Power share of each path. With a K-factor the first path carries
/// `kappa / (kappa + 1)` and the rest split `1 / (kappa + 1)` equally.
fn path_weights(paths: usize, k_factor_db: Option<f64>) -> Vec<f64> {
    match k_factor_db {
        Some(k_db) if paths > 1 => {
            let (los, nlos) = if k_db == f64::INFINITY {
                (1.0, 0.0)
            } else {
                let kappa = 10f64.powf(k_db / 10.0);
                (kappa / (kappa + 1.0), 1.0 / (kappa + 1.0))
            };
            let mut w = vec![nlos / (paths - 1) as f64; paths];
            w[0] = los;
            w
        }
        _ => vec![1.0 / paths as f64; paths],
    }
}

/// Draws realization `run_index` of the network described by `config`.
///
/// Draw order is fixed: all gains, then all angles, then per-link distance,
/// exponent, shadowing std and shadowing value.
pub fn draw_realization(config: &NetworkConfig, run_index: u64) -> Result<ChannelRealization> {
    config.validate()?;
    let (aps, users, paths) = (config.aps, config.users, config.paths);
    let links = aps * users;
    let mut rng = substream(config.master_seed, run_index, Stream::Channel, 0);

    let weights = path_weights(paths, config.k_factor_db);
    let mut betas = Vec::with_capacity(links * paths);
    for _ in 0..links {
        for w in &weights {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            // CN(0,1) scaled so the link's total E|beta|^2 stays P
            let scale = (0.5 * w * paths as f64).sqrt();
            betas.push(C64::new(re, im) * scale);
        }
    }
    let thetas: Vec<f64> = (0..links * paths).map(|_| rng.random_range(-PI..PI)).collect();

    let [d_lo, d_hi] = config.dist_m;
    let dists: Vec<f64> = (0..links)
        .map(|_| if d_lo == d_hi { d_lo } else { rng.random_range(d_lo..d_hi) })
        .collect();
    let exponents: Vec<f64> = (0..links).map(|_| config.n_pl.sample(&mut rng)).collect();
    let sigmas: Vec<f64> = (0..links).map(|_| config.shadow_sigma_db.sample(&mut rng)).collect();
    let shadows: Vec<f64> = sigmas
        .iter()
        .map(|s| {
            let z: f64 = rng.sample(StandardNormal);
            z * s
        })
        .collect();

    let mut records = Vec::with_capacity(links * paths);
    for link in 0..links {
        let alpha_db = path_loss_db(config.f_c_hz, config.c_mps, exponents[link], dists[link], shadows[link])?;
        for p in 0..paths {
            let i = link * paths + p;
            records.push(PathRecord { beta: betas[i], theta_rad: thetas[i], alpha_db });
        }
    }
    ChannelRealization::from_paths(
        run_index,
        aps,
        users,
        config.antennas,
        paths,
        config.antenna_spacing_wavelengths,
        records,
        config.noise_power_watts(),
    )
}
