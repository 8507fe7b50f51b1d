//! Network geometry, channel realizations, array responses and codebooks.

mod channel;
mod codebook;
mod config;
mod dump;

use std::f64::consts::PI;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::C64;

pub use channel::{draw_realization, ChannelRealization, PathRecord};
pub use codebook::{dft_codebook, Codebook};
pub use config::{dbm_to_watts, watts_to_dbm, NetworkConfig, ParamRange};
pub use dump::{read_dump, write_dump, DumpHeader};

/// Free-space reference loss at 1 m plus log-distance decay and shadowing, in dB.
pub fn path_loss_db(f_c_hz: f64, c_mps: f64, n_pl: f64, dist_m: f64, shadow_db: f64) -> Result<f64> {
    if !(dist_m > 0.0 && dist_m.is_finite()) {
        return Err(Error::InvalidGeometry(format!("distance must be positive, got {dist_m}")));
    }
    if !(f_c_hz > 0.0 && c_mps > 0.0) {
        return Err(Error::InvalidGeometry(format!(
            "carrier frequency and speed of light must be positive, got {f_c_hz}, {c_mps}"
        )));
    }
    if !(n_pl.is_finite() && shadow_db.is_finite()) {
        return Err(Error::InvalidGeometry("non-finite path-loss parameters".into()));
    }
    Ok(20.0 * (4.0 * PI * f_c_hz / c_mps).log10() + 10.0 * n_pl * dist_m.log10() + shadow_db)
}

/// ULA response toward departure angle `theta_rad`; unit L2 norm.
pub fn array_response(theta_rad: f64, antennas: usize, spacing_wavelengths: f64) -> Result<DVector<C64>> {
    if antennas == 0 {
        return Err(Error::InvalidGeometry("array needs at least one antenna".into()));
    }
    let scale = (1.0 / antennas as f64).sqrt();
    let step = 2.0 * PI * spacing_wavelengths * theta_rad.sin();
    Ok(DVector::from_fn(antennas, |y, _| C64::from_polar(scale, y as f64 * step)))
}

/// Thermal noise power over `bandwidth_hz`, in watts.
pub fn noise_power_w(noise_psd_dbm_hz: f64, bandwidth_hz: f64) -> f64 {
    dbm_to_watts(noise_psd_dbm_hz + 10.0 * bandwidth_hz.log10())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Independent evaluation of the free-space term using ln instead of log10.
    fn path_loss_oracle(f: f64, c: f64, n: f64, d: f64, x: f64) -> f64 {
        let fs = 4.0 * std::f64::consts::PI * f / c;
        20.0 * fs.ln() / std::f64::consts::LN_10 + 10.0 * n * d.ln() / std::f64::consts::LN_10 + x
    }

    #[test]
    fn path_loss_reference_points() {
        let one = path_loss_db(28e9, 3e8, 2.0, 1.0, 0.0).unwrap();
        let hundred = path_loss_db(28e9, 3e8, 2.0, 100.0, 0.0).unwrap();
        assert!((one - 61.384_932_812_893).abs() < 1e-9, "{one}");
        assert!((one - path_loss_oracle(28e9, 3e8, 2.0, 1.0, 0.0)).abs() < 1e-12);
        assert!((hundred - 101.384_932_812_893).abs() < 1e-9, "{hundred}");
        assert!((hundred - one - 40.0).abs() < 1e-12);
        for n in [1.5, 2.0, 3.7] {
            let v = path_loss_db(28e9, 3e8, n, 1.0, 0.0).unwrap();
            assert_eq!(v, one);
        }
    }

    #[test]
    fn path_loss_rejects_bad_inputs() {
        assert!(matches!(path_loss_db(28e9, 3e8, 2.0, 0.0, 0.0), Err(Error::InvalidGeometry(_))));
        assert!(matches!(path_loss_db(28e9, 3e8, 2.0, -5.0, 0.0), Err(Error::InvalidGeometry(_))));
        assert!(matches!(path_loss_db(0.0, 3e8, 2.0, 5.0, 0.0), Err(Error::InvalidGeometry(_))));
    }

    #[test]
    fn array_response_examples() {
        let a = array_response(0.0, 4, 0.5).unwrap();
        for v in a.iter() {
            assert!((v - C64::new(0.5, 0.0)).norm() < 1e-15);
        }
        let a = array_response(1.234, 1, 0.37).unwrap();
        assert_eq!(a.len(), 1);
        assert!((a[0] - C64::new(1.0, 0.0)).norm() < 1e-15);
        let a = array_response(PI / 2.0, 2, 0.5).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((a[0] - C64::new(h, 0.0)).norm() < 1e-15);
        assert!((a[1] - C64::new(-h, 0.0)).norm() < 1e-15);
        assert!(matches!(array_response(0.0, 0, 0.5), Err(Error::InvalidGeometry(_))));
    }

    #[test]
    fn noise_power_examples() {
        let w = noise_power_w(-174.0, 850e6);
        assert!((watts_to_dbm(w) + 84.705_810_742_857).abs() < 1e-9);
        assert!((w - 3.383_910_949_704_7e-12).abs() < 1e-22);
        assert!((watts_to_dbm(noise_power_w(-174.0, 1.0)) + 174.0).abs() < 1e-12);
        assert!((noise_power_w(0.0, 1.0) - 1e-3).abs() < 1e-18);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn array_response_is_unit_norm(theta in -PI..PI, m in 1usize..64, d in 0.1f64..2.0) {
            let a = array_response(theta, m, d).unwrap();
            prop_assert!((a.norm() - 1.0).abs() < 1e-12);
        }
    }
}
