use std::f64::consts::PI;

use ncask_core::analysis::{db_to_linear, uncoded_ber};
use ncask_core::channel::{ebno_to_params, hard_detect, transmit, transmit_with_phase, ChannelParams, Phase};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Kolmogorov critical value at significance 0.01 (asymptotic).
const KS_C_001: f64 = 1.628;

fn mean_var(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let var = x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

fn envelopes(bit: u8, params: &ChannelParams, n: usize, phase: Phase, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    transmit_with_phase(&vec![bit; n], params, phase, &mut rng)
        .etas()
        .to_vec()
}

fn ks_statistic(mut samples: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Plain power series of I0 times `exp(-shift)`, for moderate arguments.
fn i0_scaled(z: f64, shift: f64) -> f64 {
    let q = 0.25 * z * z;
    let (mut term, mut sum) = (1.0f64, 1.0f64);
    for k in 1..400 {
        term *= q / (k * k) as f64;
        sum += term;
        if term < sum * 1e-17 {
            break;
        }
    }
    sum * (-shift).exp()
}

/// Rician CDF tabulated by composite Simpson integration of the density.
struct RicianCdf {
    step: f64,
    table: Vec<f64>,
}

impl RicianCdf {
    fn new(nu: f64, sigma2: f64) -> Self {
        let hi = nu + 12.0 * sigma2.sqrt();
        let cells = 40_000;
        let step = hi / cells as f64;
        let pdf = |x: f64| x / sigma2 * i0_scaled(x * nu / sigma2, (x * x + nu * nu) / (2.0 * sigma2));
        let mut table = vec![0.0; cells + 1];
        for i in 0..cells {
            let (a, b) = (i as f64 * step, (i + 1) as f64 * step);
            table[i + 1] = table[i] + (b - a) / 6.0 * (pdf(a) + 4.0 * pdf(0.5 * (a + b)) + pdf(b));
        }
        Self { step, table }
    }

    fn eval(&self, x: f64) -> f64 {
        let pos = x / self.step;
        let i = pos.floor() as usize;
        if i + 1 >= self.table.len() {
            return 1.0;
        }
        let frac = pos - i as f64;
        self.table[i] * (1.0 - frac) + self.table[i + 1] * frac
    }
}

fn ks_settings() -> Vec<ChannelParams> {
    [(1.0, 0.5), (1.0, 0.05), (4.0, 1.0), (2.0, 0.02)]
        .iter()
        .map(|&(es, s2)| ChannelParams::from_es_sigma2(es, s2).unwrap())
        .collect()
}

#[test]
fn rayleigh_moments() {
    let params = ChannelParams::from_es_sigma2(1.0, 1.0).unwrap();
    let etas = envelopes(0, &params, 1_000_000, Phase::Random, 11);
    let (mean, var) = mean_var(&etas);
    assert!((mean / (PI / 2.0).sqrt() - 1.0).abs() < 0.01, "mean {mean}");
    assert!((var / (2.0 - PI / 2.0) - 1.0).abs() < 0.02, "var {var}");
}

#[test]
fn rician_mean_at_high_snr() {
    // es/N0 = 100 with es = 1
    let params = ChannelParams::from_es_sigma2(1.0, 0.005).unwrap();
    let etas = envelopes(1, &params, 200_000, Phase::Random, 12);
    let (mean, _) = mean_var(&etas);
    let expected = 1.0 + params.sigma2 / 2.0;
    assert!((mean / expected - 1.0).abs() < 0.01, "mean {mean} vs {expected}");
}

#[test]
fn envelopes_follow_rayleigh_and_rician_laws() {
    let n = 100_000;
    let critical = KS_C_001 / (n as f64).sqrt();
    for (k, params) in ks_settings().iter().enumerate() {
        let s2 = params.sigma2;
        for phase in [Phase::Random, Phase::Fixed(0.0)] {
            let zeros = envelopes(0, params, n, phase, 100 + k as u64);
            let d0 = ks_statistic(zeros, |x| 1.0 - (-x * x / (2.0 * s2)).exp());
            assert!(d0 < critical, "rayleigh {params:?} {phase:?}: D = {d0}");

            let rician = RicianCdf::new(params.es.sqrt(), s2);
            let ones = envelopes(1, params, n, phase, 200 + k as u64);
            let d1 = ks_statistic(ones, |x| rician.eval(x));
            assert!(d1 < critical, "rician {params:?} {phase:?}: D = {d1}");
        }
    }
}

#[test]
fn fixed_phase_leaves_envelope_statistics_unchanged() {
    let params = ChannelParams::from_es_sigma2(1.0, 0.1).unwrap();
    let random = envelopes(1, &params, 200_000, Phase::Random, 7);
    for phi in [0.0, 1.0, PI] {
        let fixed = envelopes(1, &params, 200_000, Phase::Fixed(phi), 8);
        let ((m1, v1), (m2, v2)) = (mean_var(&random), mean_var(&fixed));
        assert!((m1 - m2).abs() < 0.005, "mean {m1} vs {m2} at phi {phi}");
        assert!((v1 / v2 - 1.0).abs() < 0.03, "var {v1} vs {v2} at phi {phi}");
    }
}

#[test]
fn uncoded_threshold_detection_matches_closed_form_at_10_db() {
    let params = ebno_to_params(10.0, 1.0, false).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let total = 10_000_000usize;
    let chunk = 100_000;
    let mut errors = 0u64;
    for _ in 0..total / chunk {
        let bits: Vec<u8> = (0..chunk).map(|_| rng.random::<bool>() as u8).collect();
        let rx = transmit(&bits, &params, &mut rng);
        errors += bits
            .iter()
            .zip(rx.etas())
            .filter(|(&b, &eta)| hard_detect(eta, &params) != b)
            .count() as u64;
    }
    let ber = errors as f64 / total as f64;
    let expected = uncoded_ber(db_to_linear(10.0));
    assert!((ber / expected - 1.0).abs() < 0.10, "ber {ber} vs {expected}");
}

#[test]
fn zero_symbols_cross_threshold_with_exponential_probability() {
    // P(eta > sqrt(es)/2 | 0) = exp(-es / (8 sigma2))
    let params = ebno_to_params(6.0, 1.0, false).unwrap();
    let n = 1_000_000;
    let etas = envelopes(0, &params, n, Phase::Random, 5);
    let rate = etas.iter().filter(|&&e| hard_detect(e, &params) == 1).count() as f64 / n as f64;
    let expected = (-params.es / (8.0 * params.sigma2)).exp();
    let se = (expected * (1.0 - expected) / n as f64).sqrt();
    assert!((rate - expected).abs() < 4.0 * se, "{rate} vs {expected}");
}
