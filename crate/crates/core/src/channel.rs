//! Envelope-level model of noncoherent on-off keying over AWGN.
//!
//! The quadrature receiver's correlator outputs are synthesised directly:
//! for a "1" the in-phase and quadrature components carry `sqrt(Es)` rotated
//! by a uniformly random carrier phase, for a "0" they are pure noise; both
//! get independent `N(0, N0/2)` noise. The detector output is the envelope
//! `eta = sqrt(xI^2 + xQ^2)`, Rayleigh under "0" and Rician under "1".
//!
//! Energies are normalised to `Eb = 1`; the operating point is set through
//! `N0` alone.

use std::f64::consts::TAU;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::Bit;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    /// Energy of a "1" symbol.
    pub es: f64,
    /// One-sided noise spectral density.
    pub n0: f64,
    /// Per-dimension noise variance, `n0 / 2`.
    pub sigma2: f64,
    /// Eb/N0 this point represents, in dB.
    pub ebno_db: f64,
    /// Rate used for the `Es = 2 R Eb` conversion (1 when uncoded).
    pub rate: f64,
}

impl ChannelParams {
    /// Parameters straight from `Es` and the per-dimension variance. The
    /// Eb/N0 bookkeeping assumes an uncoded link.
    pub fn from_es_sigma2(es: f64, sigma2: f64) -> Result<Self> {
        if !(es > 0.0 && es.is_finite()) || !(sigma2 > 0.0 && sigma2.is_finite()) {
            return Err(invalid(format!("need es > 0 and sigma2 > 0, got {es}, {sigma2}")));
        }
        let n0 = 2.0 * sigma2;
        Ok(Self {
            es,
            n0,
            sigma2,
            ebno_db: 10.0 * (es / 2.0 / n0).log10(),
            rate: 1.0,
        })
    }

    /// Unit-energy symbol at the given Es/N0 in dB.
    pub fn from_es_n0_db(es_n0_db: f64) -> Result<Self> {
        Self::from_es_sigma2(1.0, 0.5 / 10f64.powf(es_n0_db / 10.0))
    }

    pub fn sigma(&self) -> f64 {
        self.sigma2.sqrt()
    }

    pub fn es_n0(&self) -> f64 {
        self.es / self.n0
    }
}

/// Maps an Eb/N0 operating point onto channel parameters with `Eb = 1`:
/// `N0 = 10^(-ebno_db/10)` and `Es = 2R` for coded links, `Es = 2` uncoded.
pub fn ebno_to_params(ebno_db: f64, rate: f64, coded: bool) -> Result<ChannelParams> {
    if !(rate > 0.0 && rate <= 1.0) {
        return Err(invalid(format!("rate must lie in (0, 1], got {rate}")));
    }
    if !ebno_db.is_finite() {
        return Err(invalid(format!("Eb/N0 must be finite, got {ebno_db} dB")));
    }
    let rate = if coded { rate } else { 1.0 };
    let n0 = 10f64.powf(-ebno_db / 10.0);
    Ok(ChannelParams {
        es: 2.0 * rate,
        n0,
        sigma2: n0 / 2.0,
        ebno_db,
        rate,
    })
}

/// Received envelopes together with the channel that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeSequence {
    etas: Vec<f64>,
    params: ChannelParams,
}

impl EnvelopeSequence {
    pub fn new(etas: Vec<f64>, params: ChannelParams) -> Result<Self> {
        if let Some(eta) = etas.iter().find(|e| !(**e >= 0.0 && e.is_finite())) {
            return Err(invalid(format!("envelope {eta} is not a finite non-negative value")));
        }
        Ok(Self { etas, params })
    }

    pub fn etas(&self) -> &[f64] {
        &self.etas
    }

    pub fn params(&self) -> &ChannelParams {
        &self.params
    }

    pub fn len(&self) -> usize {
        self.etas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.etas.is_empty()
    }
}

/// Carrier phase handling for [`transmit_with_phase`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Phase {
    /// Independent uniform phase per symbol.
    Random,
    /// The same known phase on every symbol.
    Fixed(f64),
}

/// Sends `codeword` through the channel with an independent random carrier
/// phase per symbol.
pub fn transmit<R: Rng + ?Sized>(codeword: &[Bit], params: &ChannelParams, rng: &mut R) -> EnvelopeSequence {
    transmit_with_phase(codeword, params, Phase::Random, rng)
}

pub fn transmit_with_phase<R: Rng + ?Sized>(
    codeword: &[Bit],
    params: &ChannelParams,
    phase: Phase,
    rng: &mut R,
) -> EnvelopeSequence {
    let amplitude = params.es.sqrt();
    let sigma = params.sigma();
    let etas = codeword
        .iter()
        .map(|&bit| envelope(bit, amplitude, sigma, phase, rng))
        .collect();
    EnvelopeSequence {
        etas,
        params: params.clone(),
    }
}

/// One envelope sample. The phase draw is skipped for "0" symbols, where it
/// multiplies a zero amplitude.
#[inline]
pub(crate) fn envelope<R: Rng + ?Sized>(bit: Bit, amplitude: f64, sigma: f64, phase: Phase, rng: &mut R) -> f64 {
    let (mut xi, mut xq) = if bit == 0 {
        (0.0, 0.0)
    } else {
        let phi = match phase {
            Phase::Random => rng.random::<f64>() * TAU,
            Phase::Fixed(phi) => phi,
        };
        let (s, c) = phi.sin_cos();
        (amplitude * c, amplitude * s)
    };
    xi += sigma * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, rng);
    xq += sigma * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, rng);
    xi.hypot(xq)
}

/// Threshold detector at half the "1" amplitude.
#[inline]
pub fn hard_detect(eta: f64, params: &ChannelParams) -> Bit {
    Bit::from(eta > params.es.sqrt() / 2.0)
}
