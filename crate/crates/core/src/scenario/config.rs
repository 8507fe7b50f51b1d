use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A scalar parameter that is either fixed or drawn uniformly per link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamRange {
    Fixed(f64),
    Uniform([f64; 2]),
}

impl ParamRange {
    pub fn bounds(&self) -> (f64, f64) {
        match *self {
            ParamRange::Fixed(v) => (v, v),
            ParamRange::Uniform([lo, hi]) => (lo, hi),
        }
    }

    pub fn is_fixed(&self) -> bool {
        matches!(self, ParamRange::Fixed(_))
    }

    /// Fixed values consume no randomness, so switching a parameter between
    /// fixed and ranged changes only the draws that follow it.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            ParamRange::Fixed(v) => v,
            ParamRange::Uniform([lo, hi]) if lo == hi => lo,
            ParamRange::Uniform([lo, hi]) => rng.random_range(lo..hi),
        }
    }
}

/// Physical and experiment constants of one cell-free network.
///
/// Field names on the wire follow the usual symbols (`L`, `K`, `M`, ...);
/// every field has a default matching the reference 28 GHz scenario
/// (L3K2M8, 43 dBm, 850 MHz, 95-105 m, n = 2, 4 dB shadowing, single path).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NetworkConfig {
    #[serde(rename = "L")]
    pub aps: usize,
    #[serde(rename = "K")]
    pub users: usize,
    #[serde(rename = "M")]
    pub antennas: usize,
    /// RF chains per AP; `None` means one per user.
    #[serde(rename = "M_rf", skip_serializing_if = "Option::is_none")]
    pub rf_chains: Option<usize>,
    /// Codebook size; `None` means `M` (square DFT codebook).
    #[serde(rename = "B", skip_serializing_if = "Option::is_none")]
    pub codebook_size: Option<usize>,
    #[serde(rename = "p_T_dBm")]
    pub p_t_dbm: f64,
    #[serde(rename = "noise_psd_dBm_Hz")]
    pub noise_psd_dbm_hz: f64,
    #[serde(rename = "bandwidth_Hz")]
    pub bandwidth_hz: f64,
    #[serde(rename = "f_c_Hz")]
    pub f_c_hz: f64,
    pub c_mps: f64,
    pub n_pl: ParamRange,
    #[serde(rename = "shadow_sigma_dB")]
    pub shadow_sigma_db: ParamRange,
    pub dist_m: [f64; 2],
    #[serde(rename = "P")]
    pub paths: usize,
    /// Rician K-factor of the first path; `inf` puts all power on it.
    #[serde(rename = "k_factor_dB", skip_serializing_if = "Option::is_none")]
    pub k_factor_db: Option<f64>,
    pub antenna_spacing_wavelengths: f64,
    pub master_seed: u64,
}

impl Default for NetworkConfig {
    fn default() -> Self {
        Self {
            aps: 3,
            users: 2,
            antennas: 8,
            rf_chains: None,
            codebook_size: None,
            p_t_dbm: 43.0,
            noise_psd_dbm_hz: -174.0,
            bandwidth_hz: 850e6,
            f_c_hz: 28e9,
            c_mps: 3e8,
            n_pl: ParamRange::Fixed(2.0),
            shadow_sigma_db: ParamRange::Fixed(4.0),
            dist_m: [95.0, 105.0],
            paths: 1,
            k_factor_db: None,
            antenna_spacing_wavelengths: 0.5,
            master_seed: 1,
        }
    }
}

impl NetworkConfig {
    /// Reference scenario with the given `L`, `K`, `M`.
    pub fn reference(aps: usize, users: usize, antennas: usize) -> Self {
        Self {
            aps,
            users,
            antennas,
            ..Self::default()
        }
    }

    /// Varying channel conditions: shadowing 4-6 dB, distance 100-200 m,
    /// path-loss exponent 2-4, each uniform per link.
    pub fn with_varying_channels(mut self) -> Self {
        self.shadow_sigma_db = ParamRange::Uniform([4.0, 6.0]);
        self.dist_m = [100.0, 200.0];
        self.n_pl = ParamRange::Uniform([2.0, 4.0]);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.master_seed = seed;
        self
    }

    pub fn rf_chains(&self) -> usize {
        self.rf_chains.unwrap_or(self.users)
    }

    pub fn codebook_size(&self) -> usize {
        self.codebook_size.unwrap_or(self.antennas)
    }

    pub fn p_t_watts(&self) -> f64 {
        dbm_to_watts(self.p_t_dbm)
    }

    pub fn noise_power_watts(&self) -> f64 {
        super::noise_power_w(self.noise_psd_dbm_hz, self.bandwidth_hz)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.aps == 0 || self.users == 0 || self.antennas == 0 || self.paths == 0 {
            return bad("L, K, M and P must be at least 1".into());
        }
        let rf = self.rf_chains();
        if rf == 0 || rf > self.antennas {
            return bad(format!("need M >= M_rf >= 1, got M = {}, M_rf = {rf}", self.antennas));
        }
        if self.codebook_size() == 0 {
            return bad("B must be at least 1".into());
        }
        for (name, v) in [
            ("bandwidth_Hz", self.bandwidth_hz),
            ("f_c_Hz", self.f_c_hz),
            ("c_mps", self.c_mps),
            ("antenna_spacing_wavelengths", self.antenna_spacing_wavelengths),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return bad(format!("{name} must be finite and positive, got {v}"));
            }
        }
        if !self.p_t_dbm.is_finite() || !self.noise_psd_dbm_hz.is_finite() {
            return bad("powers must be finite".into());
        }
        let [lo, hi] = self.dist_m;
        if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
            return bad(format!("dist_m must satisfy 0 < lo <= hi, got [{lo}, {hi}]"));
        }
        for (name, r) in [("n_pl", self.n_pl), ("shadow_sigma_dB", self.shadow_sigma_db)] {
            let (lo, hi) = r.bounds();
            if !(lo.is_finite() && hi.is_finite() && lo <= hi && lo >= 0.0) {
                return bad(format!("{name} must be non-negative with lo <= hi"));
            }
        }
        if let Some(k) = self.k_factor_db {
            if k.is_nan() {
                return bad("k_factor_dB is NaN".into());
            }
        }
        Ok(())
    }

    /// Checks that hold only once the search settings are known.
    pub fn check_bcc_feasible(&self) -> Result<()> {
        if self.codebook_size() < self.users {
            return Err(Error::ConfigConflict(format!(
                "beam conflict control needs B >= K, got B = {}, K = {}",
                self.codebook_size(),
                self.users
            )));
        }
        Ok(())
    }
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn watts_to_dbm(w: f64) -> f64 {
    10.0 * w.log10() + 30.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        let cfg = NetworkConfig::default();
        cfg.validate().unwrap();
        assert_eq!(cfg.rf_chains(), 2);
        assert_eq!(cfg.codebook_size(), 8);
        assert!((cfg.p_t_watts() - 19.952_623_149_688_8).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_geometry() {
        let mut cfg = NetworkConfig::default();
        cfg.dist_m = [200.0, 100.0];
        assert!(cfg.validate().is_err());
        let mut cfg = NetworkConfig::default();
        cfg.rf_chains = Some(9);
        assert!(cfg.validate().is_err());
        let mut cfg = NetworkConfig::default();
        cfg.f_c_hz = 0.0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn bcc_needs_enough_beams() {
        let mut cfg = NetworkConfig::reference(2, 4, 4);
        cfg.codebook_size = Some(3);
        assert!(matches!(cfg.check_bcc_feasible(), Err(Error::ConfigConflict(_))));
    }

    #[test]
    fn parses_toml_with_ranges() {
        let cfg: NetworkConfig = toml::from_str(
            r#"
            L = 4
            K = 4
            M = 4
            n_pl = [2.0, 4.0]
            shadow_sigma_dB = 5.0
            dist_m = [100.0, 200.0]
            master_seed = 9
            "#,
        )
        .unwrap();
        assert_eq!(cfg.aps, 4);
        assert_eq!(cfg.n_pl, ParamRange::Uniform([2.0, 4.0]));
        assert_eq!(cfg.shadow_sigma_db, ParamRange::Fixed(5.0));
        assert_eq!(cfg.codebook_size(), 4);
        let back: NetworkConfig = toml::from_str(&toml::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn dbm_conversions() {
        assert!((dbm_to_watts(0.0) - 1e-3).abs() < 1e-18);
        assert!((watts_to_dbm(1.0) - 30.0).abs() < 1e-12);
    }
}
