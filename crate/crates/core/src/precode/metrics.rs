use nalgebra::{DMatrix, DVectorView};
use serde::{Deserialize, Serialize};

use super::HybridPrecoder;
use crate::scenario::ChannelRealization;
use crate::C64;

/// Per-user link quality and network totals for one beam assignment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub sinr: Vec<f64>,
    /// bits/s/Hz
    pub rates: Vec<f64>,
    pub sum_rate: f64,
    /// Desired direct-link power per AP and user, `dl_power[l][k]`, in W.
    pub dl_power: Vec<Vec<f64>>,
    pub dl_sum: f64,
    /// Candidate assignments scored while searching.
    pub evaluation_count: u64,
    /// Designs where singular ZF was replaced by MMSE.
    pub fallback_count: u64,
    /// `active[l][k]`: AP `l` radiates a stream for user `k`.
    pub active: Vec<Vec<bool>>,
    pub wall_time_s: f64,
}

/// Link gains of one AP: `gains[(k, j)] = h_kl^H u~_jl`.
pub type ApGains = DMatrix<C64>;

/// Computes SINR, rates and DL powers from per-AP gain matrices. Desired and
/// interfering terms add coherently across APs before the magnitude.
pub fn metrics_from_gains(gains: &[ApGains], per_stream_power: f64, noise_w: f64) -> MetricsReport {
    let users = gains.first().map_or(0, |g| g.nrows());
    let mut sinr = Vec::with_capacity(users);
    for k in 0..users {
        let mut desired = 0.0;
        let mut interference = 0.0;
        for j in 0..users {
            let s: C64 = gains.iter().map(|g| g[(k, j)]).sum();
            if j == k {
                desired = s.norm_sqr();
            } else {
                interference += s.norm_sqr();
            }
        }
        sinr.push(per_stream_power * desired / (per_stream_power * interference + noise_w));
    }
    let rates: Vec<f64> = sinr.iter().map(|s| (1.0 + s).log2()).collect();
    let dl_power: Vec<Vec<f64>> = gains
        .iter()
        .map(|g| (0..users).map(|k| per_stream_power * g[(k, k)].norm_sqr()).collect())
        .collect();
    let dl_sum = dl_power.iter().flatten().sum();
    MetricsReport {
        sum_rate: rates.iter().sum(),
        sinr,
        rates,
        dl_power,
        dl_sum,
        evaluation_count: 0,
        fallback_count: 0,
        active: gains
            .iter()
            .map(|g| (0..users).map(|k| g.column(k).iter().any(|z| *z != C64::new(0.0, 0.0))).collect())
            .collect(),
        wall_time_s: 0.0,
    }
}

/// Rates of every user given the hybrid precoders of all APs.
pub fn sinr_and_rates(realization: &ChannelRealization, hybrids: &[HybridPrecoder], p_t_w: f64) -> MetricsReport {
    let users = realization.users();
    let gains: Vec<ApGains> = hybrids
        .iter()
        .enumerate()
        .map(|(l, hp)| {
            DMatrix::from_fn(users, users, |k, j| realization.channel(k, l).dotc(&hp.composed.column(j)))
        })
        .collect();
    let mut report = metrics_from_gains(&gains, p_t_w / users as f64, realization.noise_power_w());
    report.active = hybrids.iter().map(|h| h.active.clone()).collect();
    report.fallback_count = hybrids.iter().filter(|h| h.used_fallback).count() as u64;
    report
}

/// Direct-link received power `(p_T/K) |h^H u~|^2`.
pub fn dl_power(h: DVectorView<'_, C64>, u: DVectorView<'_, C64>, p_t_w: f64, users: usize) -> f64 {
    p_t_w / users as f64 * h.dotc(&u).norm_sqr()
}
