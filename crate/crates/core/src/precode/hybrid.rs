use nalgebra::DMatrix;

use super::{mmse_precoder, zf_precoder, PrecoderKind};
use crate::error::{Error, Result};
use crate::scenario::{ChannelRealization, Codebook};
use crate::C64;

/// Effective channel of AP `ap` seen through analog precoder `u_l`:
/// row `k` is `h_kl^H U_l`.
pub fn effective_channel(realization: &ChannelRealization, u_l: &DMatrix<C64>, ap: usize) -> DMatrix<C64> {
    let users = realization.users();
    DMatrix::from_fn(users, u_l.ncols(), |k, r| realization.channel(k, ap).dotc(&u_l.column(r)))
}

/// Column-normalized `U_l V_l`.
#[derive(Debug, Clone)]
pub struct NormalizedColumns {
    pub columns: DMatrix<C64>,
    /// Columns that were exactly zero; they stay zero and their users are
    /// treated as unserved.
    pub degenerate: Vec<usize>,
}

/// Rescales every composed column `U_l v_k` to unit norm, so the digital
/// stage adds no power gain.
pub fn normalize_hybrid(u_l: &DMatrix<C64>, v_l: &DMatrix<C64>) -> NormalizedColumns {
    let mut columns = u_l * v_l;
    let mut degenerate = Vec::new();
    for (j, mut col) in columns.column_iter_mut().enumerate() {
        let n = col.norm();
        if n > 0.0 && n.is_finite() {
            col /= C64::from(n);
        } else {
            col.fill(C64::new(0.0, 0.0));
            degenerate.push(j);
        }
    }
    NormalizedColumns { columns, degenerate }
}

/// Analog and digital stages of one AP plus the composed per-user columns.
#[derive(Debug, Clone)]
pub struct HybridPrecoder {
    /// `M x n` analog precoder, one codeword per served user.
    pub analog: DMatrix<C64>,
    /// `n x n` digital precoder before normalization.
    pub digital: DMatrix<C64>,
    /// Users behind the analog columns, in column order.
    pub served: Vec<usize>,
    /// `M x K` composed unit-norm columns; unserved users have zero columns.
    pub composed: DMatrix<C64>,
    /// Whether user `k` receives a nonzero stream from this AP.
    pub active: Vec<bool>,
    /// ZF was singular and MMSE was used instead.
    pub used_fallback: bool,
}

/// Designs the hybrid precoder of AP `ap` from explicit `M`-dimensional
/// quantities. `beams[k]` is user `k`'s codeword; only `served` users get an
/// RF chain.
#[allow(clippy::too_many_arguments)]
pub fn design_hybrid(
    realization: &ChannelRealization,
    codebook: &Codebook,
    ap: usize,
    beams: &[usize],
    served: &[usize],
    kind: PrecoderKind,
    p_t_w: f64,
    allow_fallback: bool,
) -> Result<HybridPrecoder> {
    let users = realization.users();
    let chosen: Vec<usize> = served.iter().map(|&k| beams[k]).collect();
    let analog = codebook.select(&chosen);
    let full = effective_channel(realization, &analog, ap);
    let h = full.select_rows(served);
    let noise = realization.noise_power_w();
    let (digital, used_fallback) = match kind {
        PrecoderKind::Mmse => (mmse_precoder(&h, p_t_w, users, noise)?, false),
        PrecoderKind::Zf => match zf_precoder(&h) {
            Ok(v) => (v, false),
            Err(Error::SingularEffectiveChannel { .. }) if allow_fallback => {
                (mmse_precoder(&h, p_t_w, users, noise)?, true)
            }
            Err(e) => return Err(e),
        },
    };
    let norm = normalize_hybrid(&analog, &digital);
    let mut composed = DMatrix::zeros(analog.nrows(), users);
    let mut active = vec![false; users];
    for (j, &k) in served.iter().enumerate() {
        if !norm.degenerate.contains(&j) {
            composed.set_column(k, &norm.columns.column(j));
            active[k] = true;
        }
    }
    Ok(HybridPrecoder { analog, digital, served: served.to_vec(), composed, active, used_fallback })
}
