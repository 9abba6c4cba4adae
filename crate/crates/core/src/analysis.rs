//! Closed-form error rates for noncoherent OOK, uncoded and convolutionally
//! coded.
//!
//! All curve functions take Eb/N0 as a linear ratio. The coded bounds keep
//! only the free-distance term of the union bound.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::codec::DistanceSpectrum;
use crate::error::{invalid, Result};

/// Error function (musl/FreeBSD implementation, < 1 ulp).
#[inline]
pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

/// Complementary error function, accurate deep into the tail.
#[inline]
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// Gaussian tail probability `Q(x) = erfc(x / sqrt 2) / 2`.
#[inline]
pub fn q_function(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Uncoded bit error rate with threshold detection, Rician "1" envelope
/// treated as Gaussian:
/// `Pb = exp(-Eb/2N0)/2 + Q(sqrt(Eb/N0))/2`.
pub fn uncoded_ber(ebno: f64) -> f64 {
    0.5 * (-ebno / 2.0).exp() + 0.5 * q_function(ebno.sqrt())
}

/// Mean and variance of the sum of `d` i.i.d. Rayleigh(`sigma`) envelopes.
pub fn gauss_approx_stats(d: usize, sigma: f64) -> (f64, f64) {
    let d = d as f64;
    (d * (PI / 2.0).sqrt() * sigma, d * (2.0 - PI / 2.0) * sigma * sigma)
}

/// Comparison threshold for a weight-`d` competitor under the linearised
/// metric: `d (sqrt(Es)/2 + s2/sqrt(Es))`.
pub fn decision_threshold(d: usize, es: f64, sigma2: f64) -> f64 {
    d as f64 * (es.sqrt() / 2.0 + sigma2 / es.sqrt())
}

/// Probability that a weight-`d` path beats the all-zero path when the sum
/// of its `d` Rayleigh envelopes is modelled as Gaussian:
///
/// ```text
/// Pd = erfc( sqrt(d / (8 - 2 pi)) (sqrt(x) + 1/sqrt(x) - sqrt(pi)) ) / 2,   x = Es/N0
/// ```
pub fn pairwise_error(d: usize, es_n0: f64) -> f64 {
    let r = es_n0.sqrt();
    let arg = (d as f64 / (8.0 - 2.0 * PI)).sqrt() * (r + 1.0 / r - PI.sqrt());
    0.5 * erfc(arg)
}

/// Inputs of the free-distance bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundInputs {
    pub d_free: usize,
    pub b_dfree: f64,
    /// Information bits per trellis step.
    pub k: usize,
    pub rate: f64,
}

impl BoundInputs {
    pub fn new(d_free: usize, b_dfree: f64, rate: f64) -> Result<Self> {
        if d_free == 0 || b_dfree.is_nan() || b_dfree < 1.0 {
            return Err(invalid(format!(
                "need d_free >= 1 and b_dfree >= 1, got {d_free}, {b_dfree}"
            )));
        }
        if !(rate > 0.0 && rate <= 1.0) {
            return Err(invalid(format!("rate must lie in (0, 1], got {rate}")));
        }
        Ok(Self {
            d_free,
            b_dfree,
            k: 1,
            rate,
        })
    }

    pub fn from_spectrum(spectrum: &DistanceSpectrum, rate: f64) -> Result<Self> {
        Self::new(spectrum.d_free, spectrum.b_dfree as f64, rate)
    }
}

/// Soft-decision bound `Pb <= (B/k) Pd(d_free, Es/N0)` with `Es = 2 R Eb`.
pub fn soft_bound(ebno: f64, inputs: &BoundInputs) -> f64 {
    inputs.b_dfree / inputs.k as f64 * pairwise_error(inputs.d_free, 2.0 * inputs.rate * ebno)
}

/// Crossover probability of the hard-decision channel seen by the decoder:
/// the uncoded expression evaluated at the per-coded-bit energy `R Eb`.
pub fn hard_channel_error(ebno: f64, rate: f64) -> f64 {
    uncoded_ber(rate * ebno)
}

/// Hard-decision estimate `Pb ~ (B/k) 2^d p^(d/2)`.
pub fn hard_bound(ebno: f64, inputs: &BoundInputs) -> f64 {
    let p = hard_channel_error(ebno, inputs.rate);
    let d = inputs.d_free as f64;
    inputs.b_dfree / inputs.k as f64 * 2f64.powf(d) * p.powf(d / 2.0)
}

/// Eb/N0 (dB) where a nonincreasing curve crosses `target`, by bisection on
/// `log(curve)` over `[lo_db, hi_db]`.
pub fn crossing_db(curve: impl Fn(f64) -> f64, target: f64, lo_db: f64, hi_db: f64) -> Result<f64> {
    let f = |db: f64| curve(db_to_linear(db)).ln() - target.ln();
    let (mut lo, mut hi) = (lo_db, hi_db);
    if !(f(lo) >= 0.0 && f(hi) <= 0.0) {
        return Err(invalid(format!(
            "curve does not cross {target:e} between {lo_db} and {hi_db} dB"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-12 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    // Reference values below come from 30-digit evaluations of the same
    // formulas with an independent erfc.
    #[test]
    fn uncoded_reference_points() {
        assert!(rel(uncoded_ber(1.0), 0.382592956822045237509) < 1e-13);
        assert!(rel(uncoded_ber(10.0), 0.00376032406404337096769) < 1e-13);
        assert!(rel(uncoded_ber(db_to_linear(6.0)), 0.0798146676615478358980) < 1e-12);
        assert!(rel(uncoded_ber(db_to_linear(8.0)), 0.0243259410892147210917) < 1e-12);
        assert!(uncoded_ber(1e4) < 1e-300);
    }

    #[test]
    fn rayleigh_moments() {
        let (m, v) = gauss_approx_stats(1, 1.0);
        assert!((m - 1.2533141373155).abs() < 1e-12);
        assert!((v - 0.4292036732051).abs() < 1e-12);
        let (m, v) = gauss_approx_stats(10, 1.0);
        assert!((m - 12.533141373155).abs() < 1e-11);
        assert!((v - 4.292036732051).abs() < 1e-11);
        let (m2, v2) = gauss_approx_stats(10, 3.0);
        assert!(rel(m2, 3.0 * m) < 1e-15 && rel(v2, 9.0 * v) < 1e-15);
    }

    #[test]
    fn pairwise_reference() {
        assert!(rel(pairwise_error(10, 10.0), 2.890340189109794564879e-9) < 1e-12);
        assert!(pairwise_error(10, 1e8) < 1e-300);
    }

    #[test]
    fn bounds_reference() {
        let inputs = BoundInputs::new(10, 36.0, 0.5).unwrap();
        assert!(rel(soft_bound(10.0, &inputs), 1.040522468079526043356e-7) < 1e-12);
        assert!(rel(soft_bound(db_to_linear(8.0), &inputs), 1.860409164407528336e-3) < 1e-12);
        assert!(rel(hard_bound(10.0, &inputs), 8.801303265214754931376e-3) < 1e-12);
    }

    #[test]
    fn soft_bound_is_scaled_pairwise_error() {
        for (d, b, r) in [(10, 36.0, 0.5), (15, 11.0, 1.0 / 3.0)] {
            let inputs = BoundInputs::new(d, b, r).unwrap();
            for i in 0..20 {
                let ebno = db_to_linear(i as f64 * 0.7);
                let direct = b * pairwise_error(d, 2.0 * r * ebno);
                assert!(rel(soft_bound(ebno, &inputs), direct) <= 1e-15);
                // Eb/N0 form written out, with 1 - erf replaced by erfc
                let x = 2.0 * r * ebno;
                let arg = (d as f64).sqrt() / (8.0 - 2.0 * PI).sqrt() * (x.sqrt() + (1.0 / x).sqrt() - PI.sqrt());
                let written = b / 2.0 * erfc(arg);
                assert!(rel(soft_bound(ebno, &inputs), written) <= 1e-12);
            }
        }
    }

    #[test]
    fn curves_nonincreasing() {
        let inputs = BoundInputs::new(10, 36.0, 0.5).unwrap();
        let curves: [&dyn Fn(f64) -> f64; 4] = [
            &uncoded_ber,
            &|x| soft_bound(x, &inputs),
            &|x| hard_bound(x, &inputs),
            &|x| pairwise_error(10, 2.0 * 0.5 * x),
        ];
        for curve in curves {
            let vals: Vec<f64> = (0..=140).map(|i| curve(db_to_linear(i as f64 * 0.1))).collect();
            assert!(vals.windows(2).all(|w| w[1] <= w[0]));
        }
    }

    #[test]
    fn soft_hard_gap_near_three_db() {
        let inputs = BoundInputs::new(10, 36.0, 0.5).unwrap();
        let soft = crossing_db(|x| soft_bound(x, &inputs), 1e-4, 0.0, 20.0).unwrap();
        let hard = crossing_db(|x| hard_bound(x, &inputs), 1e-4, 0.0, 20.0).unwrap();
        assert!((soft - 8.749223659).abs() < 1e-6);
        assert!(((hard - soft) - 3.0).abs() <= 0.7, "gap {}", hard - soft);
    }

    #[test]
    fn lower_rate_code_ordering() {
        // The rate 1/3 code sits below the rate 1/2 code only at low Eb/N0:
        // with a third of the energy per symbol the noncoherent penalty
        // outweighs the extra distance, and the curves cross near 5.77 dB.
        let half = BoundInputs::new(10, 36.0, 0.5).unwrap();
        let third = BoundInputs::new(15, 11.0, 1.0 / 3.0).unwrap();
        for i in 30..=140 {
            let db = i as f64 * 0.1;
            let x = db_to_linear(db);
            let below = soft_bound(x, &third) < soft_bound(x, &half);
            assert_eq!(below, db < 5.77, "at {db} dB");
        }
    }

    #[test]
    fn crossing_requires_bracket() {
        assert!(crossing_db(uncoded_ber, 1e-4, 20.0, 30.0).is_err());
        let db = crossing_db(uncoded_ber, 0.00376032406404337, 5.0, 15.0).unwrap();
        assert!((db - 10.0).abs() < 1e-9);
    }

    #[test]
    fn bound_inputs_validation() {
        assert!(BoundInputs::new(0, 1.0, 0.5).is_err());
        assert!(BoundInputs::new(5, 0.0, 0.5).is_err());
        assert!(BoundInputs::new(5, 1.0, 0.0).is_err());
    }
}
