use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context};
use ncask_core::analysis::{db_to_linear, hard_bound, soft_bound, uncoded_ber, BoundInputs};
use ncask_core::channel::{ebno_to_params, transmit, EnvelopeSequence};
use ncask_core::codec::{distance_spectrum, encode, ConvCodeSpec};
use ncask_core::likelihood::{metric_table, MetricVariant};
use ncask_core::sim::{approx_check, run_sweep, stream_rng};
use ncask_core::Bit;
use rand::Rng;
use serde::Serialize;
use serde_json::json;

use crate::config::{parse_grid, resolve_code, resolve_sim, seed_from_env, FileConfig, SimOverrides};
use crate::{CodeArgs, Command, OutputArgs, UsageError};

#[derive(Serialize)]
struct RunManifest {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    config: serde_json::Value,
    master_seed: Option<u64>,
    outputs: Vec<PathBuf>,
    wall_seconds: f64,
}

pub fn run(command: Command, stdout: &mut dyn Write) -> anyhow::Result<()> {
    let started = Instant::now();
    let (name, output, body, config, seed) = match command {
        Command::Sim {
            config,
            code,
            decoder,
            ebno,
            seed,
            frame_bits,
            max_bits,
            target_errors,
            workers,
            output,
        } => {
            let file = match config {
                Some(path) => FileConfig::load(&path)?,
                None => FileConfig::default(),
            };
            let cfg = resolve_sim(
                file,
                SimOverrides {
                    code: code.code,
                    constraint_length: code.constraint_length,
                    decoder,
                    ebno,
                    frame_info_bits: frame_bits,
                    max_info_bits: max_bits,
                    target_errors,
                    seed,
                    workers,
                },
            )?;
            let results = run_sweep(&cfg)?;
            let mut csv = String::from("ebno_db,ber,bits,errors,ci_low,ci_high\n");
            for r in &results {
                writeln!(
                    csv,
                    "{},{:e},{},{},{:e},{:e}",
                    r.ebno_db, r.ber, r.info_bits_simulated, r.bit_errors, r.ci_low, r.ci_high
                )?;
            }
            let seed = cfg.master_seed;
            ("sim", output, csv, serde_json::to_value(&cfg)?, Some(seed))
        }
        Command::Bound {
            code,
            dfree,
            bdfree,
            rate,
            ebno,
            output,
        } => {
            let inputs = bound_inputs(&code, dfree, bdfree, rate)?;
            let grid = parse_grid(&ebno)?;
            let mut csv = String::from("ebno_db,uncoded,soft_bound,hard_bound\n");
            for db in &grid {
                let x = db_to_linear(*db);
                writeln!(
                    csv,
                    "{db},{:e},{:e},{:e}",
                    uncoded_ber(x),
                    soft_bound(x, &inputs),
                    hard_bound(x, &inputs)
                )?;
            }
            let config = json!({ "inputs": inputs, "ebno_points_db": grid });
            ("bound", output, csv, config, None)
        }
        Command::Spectrum { code, dmax, output } => {
            let spec = require_code(&code)?;
            let d_max = dmax.unwrap_or(2 * spec.constraint_length() * spec.n_outputs());
            let spectrum = distance_spectrum(&spec, d_max).map_err(|e| UsageError(e.to_string()))?;
            let body = serde_json::to_string_pretty(&json!({
                "code": spec.octal(),
                "constraint_length": spec.constraint_length(),
                "rate": spec.rate(),
                "d_max": d_max,
                "d_free": spectrum.d_free,
                "b_dfree": spectrum.b_dfree,
                "table": spectrum.table,
            }))? + "\n";
            let config = json!({ "code": spec, "d_max": d_max });
            ("spectrum", output, body, config, None)
        }
        Command::MetricTable {
            code,
            ebno,
            variant,
            info_bits,
            seed,
            output,
        } => {
            let spec = resolve_code(code.code.as_deref(), code.constraint_length)?;
            let variant = match variant.as_str() {
                "exact" => MetricVariant::Exact,
                "approx" => MetricVariant::Approx,
                other => bail!(UsageError(format!("variant: '{other}' is not exact or approx"))),
            };
            if info_bits == 0 {
                bail!(UsageError("info-bits: must be positive".into()));
            }
            let seed = match seed {
                Some(s) => s,
                None => seed_from_env()?,
            };
            let etas = simulate_frame(spec.as_ref(), ebno, info_bits, seed)?;
            let table = metric_table(&etas, variant);
            let mut csv = String::from("index,eta,m0,m1\n");
            for (i, (eta, row)) in etas.etas().iter().zip(table.rows()).enumerate() {
                writeln!(csv, "{i},{eta:e},{:e},{:e}", row[0], row[1])?;
            }
            let config = json!({
                "code": spec, "ebno_db": ebno, "variant": variant, "info_bits": info_bits,
            });
            ("metric-table", output, csv, config, Some(seed))
        }
        Command::ApproxCheck {
            d,
            ebno,
            samples,
            seed,
            workers,
            output,
        } => {
            let grid = parse_grid(&ebno)?;
            if d == 0 || samples < 2 {
                bail!(UsageError("need d >= 1 and samples >= 2".into()));
            }
            let seed = match seed {
                Some(s) => s,
                None => seed_from_env()?,
            };
            let rows = approx_check(d, &grid, samples, seed, workers.unwrap_or(0))?;
            let mut csv = String::from("ebno_db,mean_sim,mean_theory,var_sim,var_theory,rel_err_mean,rel_err_var\n");
            for r in &rows {
                writeln!(
                    csv,
                    "{},{:e},{:e},{:e},{:e},{:e},{:e}",
                    r.ebno_db, r.mean_sim, r.mean_theory, r.var_sim, r.var_theory, r.rel_err_mean, r.rel_err_var
                )?;
            }
            let config = json!({ "d": d, "ebno_points_db": grid, "samples_per_point": samples });
            ("approx-check", output, csv, config, Some(seed))
        }
    };

    emit(&output, &body, stdout)?;
    let manifest_path = match (&output.manifest, &output.out) {
        (Some(m), _) => Some(m.clone()),
        (None, Some(out)) => Some(default_manifest_path(out)),
        (None, None) => None,
    };
    if let Some(path) = manifest_path {
        let manifest = RunManifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: name,
            config,
            master_seed: seed,
            outputs: output.out.iter().cloned().collect(),
            wall_seconds: started.elapsed().as_secs_f64(),
        };
        let text = serde_json::to_string_pretty(&manifest)? + "\n";
        std::fs::write(&path, text).with_context(|| format!("writing manifest {}", path.display()))?;
    }
    Ok(())
}

fn default_manifest_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

fn emit(output: &OutputArgs, body: &str, stdout: &mut dyn Write) -> anyhow::Result<()> {
    match &output.out {
        Some(path) => std::fs::write(path, body).with_context(|| format!("writing {}", path.display())),
        None => {
            stdout.write_all(body.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn require_code(code: &CodeArgs) -> anyhow::Result<ConvCodeSpec> {
    match resolve_code(code.code.as_deref(), code.constraint_length)? {
        Some(spec) => Ok(spec),
        None => bail!(UsageError("code: --code and --K are required".into())),
    }
}

fn bound_inputs(
    code: &CodeArgs,
    dfree: Option<usize>,
    bdfree: Option<f64>,
    rate: Option<f64>,
) -> anyhow::Result<BoundInputs> {
    let usage = |e: ncask_core::Error| UsageError(e.to_string());
    match (dfree, bdfree) {
        (Some(d), Some(b)) => {
            let rate = match (rate, resolve_code(code.code.as_deref(), code.constraint_length)?) {
                (Some(r), _) => r,
                (None, Some(spec)) => spec.rate(),
                (None, None) => bail!(UsageError("rate: --rate is required with --dfree/--bdfree".into())),
            };
            Ok(BoundInputs::new(d, b, rate).map_err(usage)?)
        }
        (None, None) => {
            if code.code.is_none() {
                bail!(UsageError("bound: give --dfree and --bdfree, or --code and --K".into()));
            }
            let spec = require_code(code)?;
            let d_max = 2 * spec.constraint_length() * spec.n_outputs();
            let spectrum = distance_spectrum(&spec, d_max).map_err(usage)?;
            Ok(BoundInputs::from_spectrum(&spectrum, rate.unwrap_or(spec.rate())).map_err(usage)?)
        }
        _ => bail!(UsageError("bound: --dfree and --bdfree go together".into())),
    }
}

/// Random information frame through the coded (or uncoded) channel.
fn simulate_frame(
    code: Option<&ConvCodeSpec>,
    ebno_db: f64,
    info_bits: usize,
    seed: u64,
) -> anyhow::Result<EnvelopeSequence> {
    let params = match code {
        Some(c) => ebno_to_params(ebno_db, c.rate(), true),
        None => ebno_to_params(ebno_db, 1.0, false),
    }
    .map_err(|e| UsageError(e.to_string()))?;
    let mut rng = stream_rng(seed, ebno_db.to_bits(), 0);
    let message: Vec<Bit> = (0..info_bits).map(|_| rng.random::<bool>() as Bit).collect();
    let symbols = match code {
        Some(c) => encode(&message, c)?,
        None => message,
    };
    Ok(transmit(&symbols, &params, &mut rng))
}
