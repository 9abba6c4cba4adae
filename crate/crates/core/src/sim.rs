//! Reproducible Monte Carlo engine.
//!
//! Every frame draws from its own ChaCha stream, keyed by
//! `(master_seed, Eb/N0 bit pattern, frame index)` through a SplitMix64
//! mixer. Nothing is shared between frames, so results do not depend on the
//! order in which points run or on how many worker threads a point uses.
//! Frames are computed in parallel batches but folded into the running
//! totals strictly in frame order, and the stopping rule is checked after
//! every frame, so a run with N workers stops on exactly the same frame as
//! a run with one.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::gauss_approx_stats;
use crate::channel::{ebno_to_params, envelope, hard_detect, transmit, ChannelParams, Phase};
use crate::codec::{encode, hard_viterbi_decode, viterbi_decode, ConvCodeSpec, Trellis};
use crate::error::{invalid, Result};
use crate::likelihood::{metric_table, MetricVariant};
use crate::Bit;

const Z_95: f64 = 1.959_963_984_540_054;
const Z_95_ONE_SIDED: f64 = 1.644_853_626_951_472_2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecoderKind {
    /// Viterbi over exact log-likelihood metrics.
    SoftExact,
    /// Viterbi over the linearised high-SNR metrics.
    SoftApprox,
    /// Threshold detection followed by Hamming-distance Viterbi.
    Hard,
    /// No code; threshold detection of the information bits.
    UncodedHard,
}

impl DecoderKind {
    pub const ALL: [DecoderKind; 4] = [
        DecoderKind::SoftExact,
        DecoderKind::SoftApprox,
        DecoderKind::Hard,
        DecoderKind::UncodedHard,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DecoderKind::SoftExact => "soft-exact",
            DecoderKind::SoftApprox => "soft-approx",
            DecoderKind::Hard => "hard",
            DecoderKind::UncodedHard => "uncoded-hard",
        }
    }
}

impl std::str::FromStr for DecoderKind {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        DecoderKind::ALL
            .into_iter()
            .find(|d| d.name() == s)
            .ok_or_else(|| invalid(format!("unknown decoder '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    /// `None` for the uncoded link.
    pub code: Option<ConvCodeSpec>,
    pub decoder: DecoderKind,
    pub ebno_points_db: Vec<f64>,
    pub frame_info_bits: usize,
    pub max_info_bits: u64,
    pub target_errors: u64,
    pub master_seed: u64,
    /// Worker threads per point; 0 means one per available core.
    #[serde(default)]
    pub workers: usize,
}

impl SweepConfig {
    pub const DEFAULT_FRAME_INFO_BITS: usize = 1000;
    pub const DEFAULT_MAX_INFO_BITS: u64 = 100_000_000;
    pub const DEFAULT_TARGET_ERRORS: u64 = 100;

    pub fn new(code: Option<ConvCodeSpec>, decoder: DecoderKind, ebno_points_db: Vec<f64>, master_seed: u64) -> Self {
        Self {
            code,
            decoder,
            ebno_points_db,
            frame_info_bits: Self::DEFAULT_FRAME_INFO_BITS,
            max_info_bits: Self::DEFAULT_MAX_INFO_BITS,
            target_errors: Self::DEFAULT_TARGET_ERRORS,
            master_seed,
            workers: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match (self.decoder, &self.code) {
            (DecoderKind::UncodedHard, Some(_)) => {
                return Err(invalid("decoder 'uncoded-hard' takes no code"));
            }
            (d, None) if d != DecoderKind::UncodedHard => {
                return Err(invalid(format!("decoder '{}' needs a code", d.name())));
            }
            _ => {}
        }
        if self.ebno_points_db.iter().any(|p| !p.is_finite()) {
            return Err(invalid("ebno_points_db must be finite"));
        }
        if self.ebno_points_db.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("ebno_points_db must be strictly increasing"));
        }
        if self.frame_info_bits == 0 {
            return Err(invalid("frame_info_bits must be positive"));
        }
        if self.target_errors < 20 {
            return Err(invalid(format!(
                "target_errors must be at least 20, got {}",
                self.target_errors
            )));
        }
        if self.max_info_bits == 0 {
            return Err(invalid("max_info_bits must be positive"));
        }
        Ok(())
    }

    fn channel(&self, ebno_db: f64) -> Result<ChannelParams> {
        match &self.code {
            Some(code) => ebno_to_params(ebno_db, code.rate(), true),
            None => ebno_to_params(ebno_db, 1.0, false),
        }
    }
}

/// Outcome of one Eb/N0 point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointResult {
    pub ebno_db: f64,
    pub info_bits_simulated: u64,
    pub bit_errors: u64,
    pub frames: u64,
    pub ber: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub wall_seconds: f64,
}

impl PointResult {
    /// Equality on everything but the wall-clock time.
    pub fn same_outcome(&self, other: &Self) -> bool {
        self.ebno_db.to_bits() == other.ebno_db.to_bits()
            && self.info_bits_simulated == other.info_bits_simulated
            && self.bit_errors == other.bit_errors
            && self.frames == other.frames
            && self.ber.to_bits() == other.ber.to_bits()
            && self.ci_low.to_bits() == other.ci_low.to_bits()
            && self.ci_high.to_bits() == other.ci_high.to_bits()
    }
}

/// 95% Wilson score interval for `errors` out of `trials`. With no errors
/// the upper end is the one-sided 95% bound and the lower end is 0.
pub fn wilson_interval(errors: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = errors as f64 / n;
    if errors == 0 {
        let z2 = Z_95_ONE_SIDED * Z_95_ONE_SIDED;
        return (0.0, z2 / (n + z2));
    }
    let z2 = Z_95 * Z_95;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = Z_95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0).min(p), (centre + half).min(1.0).max(p))
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Independent stream for `(master_seed, point key, index)`.
pub fn stream_rng(master_seed: u64, point_key: u64, index: u64) -> ChaCha8Rng {
    let seed = splitmix64(splitmix64(splitmix64(master_seed) ^ point_key) ^ index);
    ChaCha8Rng::seed_from_u64(seed)
}

fn point_key(ebno_db: f64) -> u64 {
    // -0.0 and 0.0 are the same operating point
    (ebno_db + 0.0).to_bits()
}

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| invalid(format!("cannot start worker pool: {e}")))
}

/// Simulates one frame and returns its information-bit error count.
fn run_frame(cfg: &SweepConfig, trellis: Option<&Trellis>, params: &ChannelParams, index: u64) -> u64 {
    let mut rng = stream_rng(cfg.master_seed, point_key(params.ebno_db), index);
    let message: Vec<Bit> = (0..cfg.frame_info_bits).map(|_| rng.random::<bool>() as Bit).collect();
    let decoded = match (cfg.decoder, &cfg.code, trellis) {
        (DecoderKind::UncodedHard, _, _) => {
            let etas = transmit(&message, params, &mut rng);
            etas.etas().iter().map(|&e| hard_detect(e, params)).collect()
        }
        (kind, Some(code), Some(trellis)) => {
            let codeword = encode(&message, code).expect("non-empty frame");
            let etas = transmit(&codeword, params, &mut rng);
            let decoded = match kind {
                DecoderKind::SoftExact => viterbi_decode(&metric_table(&etas, MetricVariant::Exact), trellis),
                DecoderKind::SoftApprox => viterbi_decode(&metric_table(&etas, MetricVariant::Approx), trellis),
                _ => {
                    let bits: Vec<Bit> = etas.etas().iter().map(|&e| hard_detect(e, params)).collect();
                    hard_viterbi_decode(&bits, trellis)
                }
            };
            decoded.expect("terminated codeword length")
        }
        _ => unreachable!("validated configuration"),
    };
    message.iter().zip(&decoded).filter(|(a, b)| a != b).count() as u64
}

/// Runs one Eb/N0 point until `target_errors` bit errors or `max_info_bits`
/// information bits, whichever comes first.
pub fn run_point(cfg: &SweepConfig, ebno_db: f64) -> Result<PointResult> {
    cfg.validate()?;
    let workers = pool(cfg.workers)?;
    run_point_in(cfg, ebno_db, &workers)
}

fn run_point_in(cfg: &SweepConfig, ebno_db: f64, workers: &rayon::ThreadPool) -> Result<PointResult> {
    let started = Instant::now();
    let params = cfg.channel(ebno_db)?;
    let trellis = cfg.code.as_ref().map(Trellis::new);
    let frame_bits = cfg.frame_info_bits as u64;
    let batch = 8 * workers.current_num_threads() as u64;

    let mut bits = 0u64;
    let mut errors = 0u64;
    let mut frames = 0u64;
    'outer: loop {
        let first = frames;
        let counts: Vec<u64> = workers.install(|| {
            (first..first + batch)
                .into_par_iter()
                .map(|i| run_frame(cfg, trellis.as_ref(), &params, i))
                .collect()
        });
        for e in counts {
            errors += e;
            bits += frame_bits;
            frames += 1;
            if errors >= cfg.target_errors || bits >= cfg.max_info_bits {
                break 'outer;
            }
        }
    }

    let ber = errors as f64 / bits as f64;
    let (ci_low, ci_high) = wilson_interval(errors, bits);
    Ok(PointResult {
        ebno_db,
        info_bits_simulated: bits,
        bit_errors: errors,
        frames,
        ber,
        ci_low,
        ci_high,
        wall_seconds: started.elapsed().as_secs_f64(),
    })
}

/// Runs every point of the sweep, in the configured order.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<PointResult>> {
    cfg.validate()?;
    let workers = pool(cfg.workers)?;
    cfg.ebno_points_db
        .iter()
        .map(|&db| run_point_in(cfg, db, &workers))
        .collect()
}

/// One row of the Gaussian-approximation check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproxRow {
    pub ebno_db: f64,
    pub sigma: f64,
    pub mean_sim: f64,
    pub mean_theory: f64,
    pub var_sim: f64,
    pub var_theory: f64,
    pub rel_err_mean: f64,
    pub rel_err_var: f64,
}

const APPROX_CHUNK: u64 = 1 << 16;

/// Running count, mean and sum of squared deviations.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1.0;
        let delta = x - self.mean;
        self.mean += delta / self.n;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(self, other: Moments) -> Moments {
        if self.n == 0.0 {
            return other;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        Moments {
            n,
            mean: self.mean + delta * other.n / n,
            m2: self.m2 + other.m2 + delta * delta * self.n * other.n / n,
        }
    }

    fn variance(&self) -> f64 {
        self.m2 / (self.n - 1.0)
    }
}

/// Samples `Z = eta_1 + ... + eta_d` with all-zero transmission (each
/// envelope Rayleigh with `s2 = N0/2`) and compares its sample mean and
/// variance with `gauss_approx_stats`.
pub fn approx_check(
    d: usize,
    ebno_points_db: &[f64],
    samples_per_point: u64,
    seed: u64,
    workers: usize,
) -> Result<Vec<ApproxRow>> {
    if d == 0 {
        return Err(invalid("d must be at least 1"));
    }
    if samples_per_point < 2 {
        return Err(invalid("need at least 2 samples per point"));
    }
    let workers = pool(workers)?;
    ebno_points_db
        .iter()
        .map(|&ebno_db| {
            let params = ebno_to_params(ebno_db, 1.0, false)?;
            let sigma = params.sigma();
            let chunks = samples_per_point.div_ceil(APPROX_CHUNK);
            let parts: Vec<Moments> = workers.install(|| {
                (0..chunks)
                    .into_par_iter()
                    .map(|c| {
                        let mut rng = stream_rng(seed, point_key(ebno_db), c);
                        let count = APPROX_CHUNK.min(samples_per_point - c * APPROX_CHUNK);
                        let mut m = Moments::default();
                        for _ in 0..count {
                            let z: f64 = (0..d).map(|_| envelope(0, 0.0, sigma, Phase::Random, &mut rng)).sum();
                            m.push(z);
                        }
                        m
                    })
                    .collect()
            });
            let total = parts.into_iter().fold(Moments::default(), Moments::merge);
            let (mean_theory, var_theory) = gauss_approx_stats(d, sigma);
            let var_sim = total.variance();
            Ok(ApproxRow {
                ebno_db,
                sigma,
                mean_sim: total.mean,
                mean_theory,
                var_sim,
                var_theory,
                rel_err_mean: ((total.mean - mean_theory) / mean_theory).abs(),
                rel_err_var: ((var_sim - var_theory) / var_theory).abs(),
            })
        })
        .collect()
}
