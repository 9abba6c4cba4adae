//! Per-symbol log-likelihood branch metrics for the noncoherent envelope.
//!
//! Given the envelope `eta`, the log-likelihood of hypothesis `x` is
//!
//! ```text
//! ln(eta / s2) - eta^2 / (2 s2) - x * Es / (2 s2) + ln I0(x * eta * sqrt(Es) / s2)
//! ```
//!
//! with `s2` the per-dimension noise variance. The first two terms do not
//! depend on `x`, so the stored metrics keep only the last two: `0` for
//! `x = 0` and `-Es/(2 s2) + ln I0(eta sqrt(Es) / s2)` for `x = 1`.

use serde::{Deserialize, Serialize};

use crate::channel::{ChannelParams, EnvelopeSequence};
use crate::error::{invalid, Result};
use crate::Bit;

/// Below this argument `ln I0` is summed from its power series, above it
/// from the large-argument expansion.
const SERIES_LIMIT: f64 = 20.0;

/// Natural log of the modified Bessel function of the first kind, order 0.
///
/// Log-domain throughout, so arguments far beyond the `I0` overflow point
/// (about 713) are fine.
pub fn ln_i0(z: f64) -> Result<f64> {
    if z.is_nan() || z < 0.0 {
        return Err(invalid(format!("ln_i0 needs z >= 0, got {z}")));
    }
    Ok(ln_i0_unchecked(z))
}

#[inline]
pub(crate) fn ln_i0_unchecked(z: f64) -> f64 {
    if z < SERIES_LIMIT {
        ln_i0_series(z)
    } else {
        ln_i0_asymptotic(z)
    }
}

const TERMS: usize = 64;

/// `1 / k^2`, index `k`.
const INV_SQUARES: [f64; TERMS] = {
    let mut t = [0.0; TERMS];
    let mut k = 1;
    while k < TERMS {
        t[k] = 1.0 / (k * k) as f64;
        k += 1;
    }
    t
};

/// `(2k - 1)^2 / k`, index `k`.
const ASYMPTOTIC_RATIOS: [f64; TERMS] = {
    let mut t = [0.0; TERMS];
    let mut k = 1;
    while k < TERMS {
        t[k] = ((2 * k - 1) * (2 * k - 1)) as f64 / k as f64;
        k += 1;
    }
    t
};

/// `ln(1 + sum_{k>=1} (z^2/4)^k / (k!)^2)`; all terms positive. Converges
/// within the table for `z < SERIES_LIMIT` (about 35 terms at the limit).
pub(crate) fn ln_i0_series(z: f64) -> f64 {
    let q = 0.25 * z * z;
    let mut term = 1.0;
    let mut tail = 0.0;
    for inv in &INV_SQUARES[1..] {
        term *= q * inv;
        tail += term;
        if term <= tail * 1e-17 {
            break;
        }
    }
    tail.ln_1p()
}

/// `z - ln(2 pi z)/2 + ln(sum_k t_k)` with
/// `t_k = t_{k-1} (2k-1)^2 / (8 k z)`, truncated at the smallest term.
pub(crate) fn ln_i0_asymptotic(z: f64) -> f64 {
    let inv = 1.0 / (8.0 * z);
    let mut term = 1.0;
    let mut sum = 1.0;
    for c in &ASYMPTOTIC_RATIOS[1..] {
        let ratio = c * inv;
        if ratio >= 1.0 {
            break;
        }
        term *= ratio;
        sum += term;
        if term <= sum * 1e-17 {
            break;
        }
    }
    z - 0.5 * (2.0 * std::f64::consts::PI * z).ln() + sum.ln()
}

/// Exact log-likelihood score of `bit` given envelope `eta`.
#[inline]
pub fn branch_metric_exact(eta: f64, bit: Bit, params: &ChannelParams) -> f64 {
    if bit == 0 {
        return 0.0;
    }
    -params.es / (2.0 * params.sigma2) + ln_i0_unchecked(eta * params.es.sqrt() / params.sigma2)
}

/// High-SNR score: `ln I0(z)` replaced by `z - 1`.
#[inline]
pub fn branch_metric_approx(eta: f64, bit: Bit, params: &ChannelParams) -> f64 {
    if bit == 0 {
        return 0.0;
    }
    -params.es / (2.0 * params.sigma2) + eta * params.es.sqrt() / params.sigma2 - 1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MetricVariant {
    Exact,
    Approx,
}

impl MetricVariant {
    #[inline]
    pub fn metric(self, eta: f64, bit: Bit, params: &ChannelParams) -> f64 {
        match self {
            MetricVariant::Exact => branch_metric_exact(eta, bit, params),
            MetricVariant::Approx => branch_metric_approx(eta, bit, params),
        }
    }
}

/// Viterbi input: one `[score if 0, score if 1]` row per received symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricTable {
    rows: Vec<[f64; 2]>,
    variant: MetricVariant,
}

impl MetricTable {
    pub fn from_rows(rows: Vec<[f64; 2]>, variant: MetricVariant) -> Self {
        debug_assert!(rows.iter().flatten().all(|m| m.is_finite()));
        Self { rows, variant }
    }

    pub fn rows(&self) -> &[[f64; 2]] {
        &self.rows
    }

    pub fn variant(&self) -> MetricVariant {
        self.variant
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

pub fn metric_table(etas: &EnvelopeSequence, variant: MetricVariant) -> MetricTable {
    let params = etas.params();
    let rows = etas
        .etas()
        .iter()
        .map(|&eta| [variant.metric(eta, 0, params), variant.metric(eta, 1, params)])
        .collect();
    MetricTable { rows, variant }
}
