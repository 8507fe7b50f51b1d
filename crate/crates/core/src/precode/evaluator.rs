//! Fast scoring of beam assignments.
//!
//! Search algorithms score thousands of candidate assignments per
//! realization. Everything they need reduces to `K`-dimensional quantities:
//! the projections `h_kl^H u_b` of every channel on every codeword and the
//! codebook Gram matrix. Designing an AP then costs one small `n x n` solve.

use std::borrow::Borrow;

use nalgebra::DMatrix;

use super::{metrics_from_gains, mmse_precoder, zf_precoder, ActiveMask, ApGains, BeamAssignment, MetricsReport, PrecoderKind};
use crate::error::{Error, Result};
use crate::scenario::{ChannelRealization, Codebook};
use crate::C64;

/// Outcome of designing one AP's digital precoder for a fixed set of beams.
#[derive(Debug, Clone)]
pub struct ApDesign {
    pub gains: ApGains,
    pub used_fallback: bool,
    /// ZF was singular and fallback was not allowed; gains are zero and the
    /// assignment scores `-inf`.
    pub singular: bool,
}

pub struct Evaluator<'a> {
    realization: &'a ChannelRealization,
    codebook: &'a Codebook,
    proj: Vec<C64>,
    gram: DMatrix<C64>,
    p_t_w: f64,
    precoder: PrecoderKind,
    allow_fallback: bool,
    served: Vec<Vec<usize>>,
    mask: Option<ActiveMask>,
}

impl<'a> Evaluator<'a> {
    pub fn new(
        realization: &'a ChannelRealization,
        codebook: &'a Codebook,
        p_t_w: f64,
        precoder: PrecoderKind,
        allow_fallback: bool,
        mask: Option<&ActiveMask>,
    ) -> Result<Self> {
        let (aps, users) = (realization.aps(), realization.users());
        if codebook.antennas() != realization.antennas() {
            return Err(Error::InvalidConfig(format!(
                "codebook has {} antennas, channel has {}",
                codebook.antennas(),
                realization.antennas()
            )));
        }
        if let Some(m) = mask {
            if m.aps() != aps || m.users() != users {
                return Err(Error::InvalidConfig("mask dimensions do not match the network".into()));
            }
        }
        let nb = codebook.len();
        let mut proj = Vec::with_capacity(users * aps * nb);
        for k in 0..users {
            for l in 0..aps {
                let h = realization.channel(k, l);
                proj.extend((0..nb).map(|b| h.dotc(&codebook.beam(b))));
            }
        }
        let served = (0..aps)
            .map(|l| match mask {
                Some(m) => m.served(l),
                None => (0..users).collect(),
            })
            .collect();
        Ok(Self {
            realization,
            codebook,
            proj,
            gram: codebook.gram(),
            p_t_w,
            precoder,
            allow_fallback,
            served,
            mask: mask.cloned(),
        })
    }

    pub fn realization(&self) -> &ChannelRealization {
        self.realization
    }

    pub fn codebook(&self) -> &Codebook {
        self.codebook
    }

    pub fn aps(&self) -> usize {
        self.realization.aps()
    }

    pub fn users(&self) -> usize {
        self.realization.users()
    }

    pub fn codebook_size(&self) -> usize {
        self.codebook.len()
    }

    pub fn mask(&self) -> Option<&ActiveMask> {
        self.mask.as_ref()
    }

    pub fn served(&self, ap: usize) -> &[usize] {
        &self.served[ap]
    }

    pub fn per_stream_power(&self) -> f64 {
        self.p_t_w / self.users() as f64
    }

    /// `h_kl^H u_b`.
    pub fn projection(&self, user: usize, ap: usize, beam: usize) -> C64 {
        self.proj[(user * self.aps() + ap) * self.codebook.len() + beam]
    }

    /// Direct-link power of `(k, l)` through the bare codeword `b`.
    pub fn analog_dl_power(&self, user: usize, ap: usize, beam: usize) -> f64 {
        self.per_stream_power() * self.projection(user, ap, beam).norm_sqr()
    }

    pub fn design(&self, ap: usize, beams: &[usize]) -> ApDesign {
        self.design_with(ap, beams, self.allow_fallback)
    }

    /// Designs AP `ap` for user beams `beams` (indexed by user).
    pub fn design_with(&self, ap: usize, beams: &[usize], allow_fallback: bool) -> ApDesign {
        let users = self.users();
        let served = &self.served[ap];
        let n = served.len();
        let full = DMatrix::from_fn(users, n, |k, r| self.projection(k, ap, beams[served[r]]));
        let h = full.select_rows(served);
        let noise = self.realization.noise_power_w();
        let mmse = || mmse_precoder(&h, self.p_t_w, users, noise);
        let (v, used_fallback) = match self.precoder {
            PrecoderKind::Mmse => (mmse(), false),
            PrecoderKind::Zf => match zf_precoder(&h) {
                Ok(v) => (Ok(v), false),
                Err(_) if allow_fallback => (mmse(), true),
                Err(e) => (Err(e), false),
            },
        };
        let mut gains = DMatrix::zeros(users, users);
        let v = match v {
            Ok(v) => v,
            Err(_) => return ApDesign { gains, used_fallback, singular: true },
        };
        for (r, &j) in served.iter().enumerate() {
            let col = v.column(r);
            // ||U v||^2 = v^H (U^H U) v with U^H U taken from the codebook Gram
            let mut norm_sq = 0.0;
            for a in 0..n {
                for b in 0..n {
                    let g = self.gram[(beams[served[a]], beams[served[b]])];
                    norm_sq += (col[a].conj() * g * col[b]).re;
                }
            }
            if !(norm_sq > 0.0 && norm_sq.is_finite()) {
                continue;
            }
            let scale = C64::from(1.0 / norm_sq.sqrt());
            let g = (&full * col) * scale;
            gains.set_column(j, &g);
        }
        ApDesign { gains, used_fallback, singular: false }
    }

    pub fn design_all(&self, assignment: &BeamAssignment) -> Vec<ApDesign> {
        (0..self.aps()).map(|l| self.design(l, assignment.ap_beams(l))).collect()
    }

    /// Network sum-rate; `-inf` if any AP design is singular.
    pub fn sum_rate<D: Borrow<ApDesign>>(&self, designs: &[D]) -> f64 {
        if designs.iter().any(|d| d.borrow().singular) {
            return f64::NEG_INFINITY;
        }
        self.sum_rate_silent(designs)
    }

    /// Network sum-rate with singular APs treated as silent.
    pub fn sum_rate_silent<D: Borrow<ApDesign>>(&self, designs: &[D]) -> f64 {
        let users = self.users();
        let p = self.per_stream_power();
        let noise = self.realization.noise_power_w();
        let mut total = 0.0;
        for k in 0..users {
            let mut desired = 0.0;
            let mut interference = 0.0;
            for j in 0..users {
                let s: C64 = designs.iter().map(|d| d.borrow().gains[(k, j)]).sum();
                if j == k {
                    desired = s.norm_sqr();
                } else {
                    interference += s.norm_sqr();
                }
            }
            total += (1.0 + p * desired / (p * interference + noise)).log2();
        }
        total
    }

    /// Sum of direct-link powers over all served pairs; `-inf` if singular.
    pub fn dl_sum<D: Borrow<ApDesign>>(&self, designs: &[D]) -> f64 {
        if designs.iter().any(|d| d.borrow().singular) {
            return f64::NEG_INFINITY;
        }
        self.dl_sum_silent(designs)
    }

    /// Direct-link power sum with singular APs treated as silent.
    pub fn dl_sum_silent<D: Borrow<ApDesign>>(&self, designs: &[D]) -> f64 {
        let p = self.per_stream_power();
        designs
            .iter()
            .map(|d| (0..self.users()).map(|k| p * d.borrow().gains[(k, k)].norm_sqr()).sum::<f64>())
            .sum()
    }

    /// Full report for `assignment`. Singular ZF designs always fall back to
    /// MMSE here so that every assignment gets finite numbers.
    pub fn report(&self, assignment: &BeamAssignment) -> MetricsReport {
        let designs: Vec<ApDesign> = (0..self.aps())
            .map(|l| self.design_with(l, assignment.ap_beams(l), true))
            .collect();
        self.report_from(&designs)
    }

    pub fn report_from(&self, designs: &[ApDesign]) -> MetricsReport {
        let gains: Vec<ApGains> = designs.iter().map(|d| d.gains.clone()).collect();
        let mut r = metrics_from_gains(&gains, self.per_stream_power(), self.realization.noise_power_w());
        r.fallback_count = designs.iter().filter(|d| d.used_fallback).count() as u64;
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precode::{design_hybrid, sinr_and_rates};
    use crate::scenario::{draw_realization, dft_codebook, NetworkConfig};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// The fast path and the explicit M-dimensional path agree.
    #[test]
    fn matches_explicit_hybrid_path() {
        let cfg = NetworkConfig::reference(3, 3, 8).with_seed(17);
        let cb = dft_codebook(8).unwrap();
        let p_t = cfg.p_t_watts();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for run in 0..40 {
            let r = draw_realization(&cfg, run).unwrap();
            for kind in [PrecoderKind::Zf, PrecoderKind::Mmse] {
                let ev = Evaluator::new(&r, &cb, p_t, kind, true, None).unwrap();
                let idx: Vec<usize> = (0..9).map(|_| rng.random_range(0..8)).collect();
                let a = BeamAssignment::from_indices(3, 3, idx).unwrap();
                let fast = ev.report(&a);
                let hybrids: Vec<_> = (0..3)
                    .map(|l| design_hybrid(&r, &cb, l, a.ap_beams(l), &[0, 1, 2], kind, p_t, true).unwrap())
                    .collect();
                let slow = sinr_and_rates(&r, &hybrids, p_t);
                let tol = 1e-9 * slow.sum_rate.max(1.0);
                assert!((fast.sum_rate - slow.sum_rate).abs() < tol, "{} vs {}", fast.sum_rate, slow.sum_rate);
                assert!((fast.dl_sum - slow.dl_sum).abs() < 1e-9 * slow.dl_sum.max(1e-300));
                assert_eq!(fast.fallback_count, slow.fallback_count);
                for h in &hybrids {
                    for (k, &on) in h.active.iter().enumerate() {
                        if on {
                            assert!((h.composed.column(k).norm() - 1.0).abs() < 1e-9);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn masked_users_get_no_stream() {
        let cfg = NetworkConfig::reference(2, 3, 8).with_seed(2);
        let cb = dft_codebook(8).unwrap();
        let r = draw_realization(&cfg, 0).unwrap();
        let mask = ActiveMask::from_served(3, &[vec![0, 1], vec![0]]);
        let ev = Evaluator::new(&r, &cb, cfg.p_t_watts(), PrecoderKind::Zf, false, Some(&mask)).unwrap();
        let a = BeamAssignment::repeated(2, &[0, 1, 2]);
        let rep = ev.report(&a);
        // user 2 is unserved everywhere: zero desired power, zero rate
        assert_eq!(rep.rates[2], 0.0);
        assert_eq!(rep.active, vec![vec![true, true, false], vec![true, false, false]]);
        assert_eq!(rep.dl_power[1][1], 0.0);
        assert!(rep.rates[0] > 0.0 && rep.rates[1] > 0.0);
    }

    #[test]
    fn singular_without_fallback_scores_neg_inf() {
        let cfg = NetworkConfig::reference(1, 2, 4).with_seed(2);
        let cb = dft_codebook(4).unwrap();
        let r = draw_realization(&cfg, 0).unwrap();
        let a = BeamAssignment::filled(1, 2, 1);
        let strict = Evaluator::new(&r, &cb, 1.0, PrecoderKind::Zf, false, None).unwrap();
        assert_eq!(strict.sum_rate(&strict.design_all(&a)), f64::NEG_INFINITY);
        let lenient = Evaluator::new(&r, &cb, 1.0, PrecoderKind::Zf, true, None).unwrap();
        let d = lenient.design_all(&a);
        assert!(d[0].used_fallback);
        assert!(lenient.sum_rate(&d).is_finite());
    }

    #[test]
    fn positive_rescaling_of_digital_stage_is_invisible() {
        let cfg = NetworkConfig::reference(2, 2, 8).with_seed(4);
        let cb = dft_codebook(8).unwrap();
        let r = draw_realization(&cfg, 3).unwrap();
        let p_t = cfg.p_t_watts();
        let served = [0, 1];
        let base: Vec<_> = (0..2)
            .map(|l| design_hybrid(&r, &cb, l, &[l, 3 + l], &served, PrecoderKind::Zf, p_t, false).unwrap())
            .collect();
        let reference = sinr_and_rates(&r, &base, p_t);
        for scale in [2.0, 0.5, 1024.0] {
            let scaled: Vec<_> = base
                .iter()
                .map(|h| {
                    let mut h = h.clone();
                    let norm = crate::precode::normalize_hybrid(&h.analog, &(&h.digital * C64::from(scale)));
                    for (j, &k) in h.served.iter().enumerate() {
                        h.composed.set_column(k, &norm.columns.column(j));
                    }
                    h
                })
                .collect();
            let rep = sinr_and_rates(&r, &scaled, p_t);
            assert_eq!(rep.sum_rate.to_bits(), reference.sum_rate.to_bits());
        }
        let rep = {
            let scaled: Vec<_> = base
                .iter()
                .map(|h| {
                    let mut h = h.clone();
                    let norm = crate::precode::normalize_hybrid(&h.analog, &(&h.digital * C64::from(3.7)));
                    for (j, &k) in h.served.iter().enumerate() {
                        h.composed.set_column(k, &norm.columns.column(j));
                    }
                    h
                })
                .collect::<Vec<_>>();
            sinr_and_rates(&r, &scaled, p_t)
        };
        assert!((rep.sum_rate - reference.sum_rate).abs() < 1e-12 * reference.sum_rate);
    }
}
