use std::path::Path;

use anyhow::{bail, Context};
use ncask_core::codec::ConvCodeSpec;
use ncask_core::sim::{DecoderKind, SweepConfig};
use serde::Deserialize;

use crate::UsageError;

/// Expands an Eb/N0 grid: `start:step:stop` (inclusive), a comma list, or a
/// single value.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, UsageError> {
    let num = |s: &str| -> Result<f64, UsageError> {
        let v: f64 = s
            .trim()
            .parse()
            .map_err(|_| UsageError(format!("ebno: '{s}' is not a number")))?;
        if !v.is_finite() {
            return Err(UsageError(format!("ebno: '{s}' is not finite")));
        }
        Ok(v)
    };
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        [start, step, stop] => {
            let (start, step, stop) = (num(start)?, num(step)?, num(stop)?);
            if step <= 0.0 || stop < start {
                return Err(UsageError(format!(
                    "ebno: grid '{spec}' needs step > 0 and stop >= start"
                )));
            }
            let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
            if count > 100_000 {
                return Err(UsageError(format!("ebno: grid '{spec}' has too many points")));
            }
            Ok((0..count)
                .map(|i| ((start + i as f64 * step) * 1e9).round() / 1e9)
                .collect())
        }
        [_] => spec.split(',').map(num).collect(),
        _ => Err(UsageError(format!(
            "ebno: '{spec}' is neither start:step:stop nor a list"
        ))),
    }
}

/// Flat JSON config file for `sim`; every field optional, flags win.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    /// Octal generators, or "uncoded".
    pub code: Option<String>,
    pub constraint_length: Option<usize>,
    pub decoder: Option<String>,
    pub ebno_points_db: Option<Vec<f64>>,
    pub frame_info_bits: Option<usize>,
    pub max_info_bits: Option<u64>,
    pub target_errors: Option<u64>,
    pub master_seed: Option<u64>,
    pub workers: Option<usize>,
}

impl FileConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| UsageError(format!("config {}: {e}", path.display())).into())
    }
}

pub struct SimOverrides {
    pub code: Option<String>,
    pub constraint_length: Option<usize>,
    pub decoder: Option<String>,
    pub ebno: Option<String>,
    pub frame_info_bits: Option<usize>,
    pub max_info_bits: Option<u64>,
    pub target_errors: Option<u64>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
}

pub fn resolve_code(code: Option<&str>, constraint_length: Option<usize>) -> Result<Option<ConvCodeSpec>, UsageError> {
    match code {
        None | Some("uncoded") => Ok(None),
        Some(gens) => {
            let k =
                constraint_length.ok_or_else(|| UsageError("K: constraint length is required with --code".into()))?;
            ConvCodeSpec::from_octal(gens, k)
                .map(Some)
                .map_err(|e| UsageError(format!("code: {e}")))
        }
    }
}

/// Merges flags over the file config into a validated `SweepConfig`.
pub fn resolve_sim(file: FileConfig, flags: SimOverrides) -> anyhow::Result<SweepConfig> {
    let code_str = flags.code.or(file.code);
    let k = flags.constraint_length.or(file.constraint_length);
    let code = resolve_code(code_str.as_deref(), k)?;

    let decoder = match flags.decoder.or(file.decoder) {
        Some(d) => d
            .parse::<DecoderKind>()
            .map_err(|e| UsageError(format!("decoder: {e}")))?,
        None if code.is_some() => DecoderKind::SoftExact,
        None => DecoderKind::UncodedHard,
    };
    let ebno_points_db = match flags.ebno {
        Some(g) => parse_grid(&g)?,
        None => file
            .ebno_points_db
            .ok_or_else(|| UsageError("ebno: no Eb/N0 points given (--ebno or ebno_points_db)".into()))?,
    };
    let master_seed = match flags.seed.or(file.master_seed) {
        Some(s) => s,
        None => seed_from_env()?,
    };

    let mut cfg = SweepConfig::new(code, decoder, ebno_points_db, master_seed);
    if let Some(v) = flags.frame_info_bits.or(file.frame_info_bits) {
        cfg.frame_info_bits = v;
    }
    if let Some(v) = flags.max_info_bits.or(file.max_info_bits) {
        cfg.max_info_bits = v;
    }
    if let Some(v) = flags.target_errors.or(file.target_errors) {
        cfg.target_errors = v;
    }
    cfg.workers = flags.workers.or(file.workers).unwrap_or(0);
    if let Err(e) = cfg.validate() {
        bail!(UsageError(e.to_string()));
    }
    Ok(cfg)
}

/// `NCASK_SEED` if set, otherwise 0.
pub fn seed_from_env() -> Result<u64, UsageError> {
    match std::env::var("NCASK_SEED") {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| UsageError(format!("NCASK_SEED: '{s}' is not an unsigned integer"))),
        Err(_) => Ok(0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(parse_grid("4:1:9").unwrap(), vec![4.0, 5.0, 6.0, 7.0, 8.0, 9.0]);
        assert_eq!(parse_grid("0:0.1:0.3").unwrap(), vec![0.0, 0.1, 0.2, 0.3]);
        assert_eq!(parse_grid("10").unwrap(), vec![10.0]);
        assert_eq!(parse_grid("6, 8,10").unwrap(), vec![6.0, 8.0, 10.0]);
        assert!(parse_grid("4:0:9").is_err());
        assert!(parse_grid("9:1:4").is_err());
        assert!(parse_grid("a").is_err());
        assert!(parse_grid("1:2").is_err());
    }

    #[test]
    fn flags_override_file() {
        let file: FileConfig = serde_json::from_str(
            r#"{"code": "133,171", "constraint_length": 7, "decoder": "hard",
                "ebno_points_db": [1, 2], "target_errors": 50, "master_seed": 9}"#,
        )
        .unwrap();
        let flags = SimOverrides {
            code: None,
            constraint_length: None,
            decoder: Some("soft-approx".into()),
            ebno: Some("3".into()),
            frame_info_bits: None,
            max_info_bits: None,
            target_errors: None,
            seed: None,
            workers: Some(1),
        };
        let cfg = resolve_sim(file, flags).unwrap();
        assert_eq!(cfg.decoder, DecoderKind::SoftApprox);
        assert_eq!(cfg.ebno_points_db, vec![3.0]);
        assert_eq!((cfg.target_errors, cfg.master_seed, cfg.workers), (50, 9, 1));
        assert_eq!(cfg.code, Some(ConvCodeSpec::k7_rate_half()));
    }

    #[test]
    fn unknown_field_named() {
        let err = serde_json::from_str::<FileConfig>(r#"{"target_error": 5}"#).unwrap_err();
        assert!(err.to_string().contains("target_error"));
    }
}
