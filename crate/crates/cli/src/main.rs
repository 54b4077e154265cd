//! nlslab: experiment front end.
//!
//! Usage:
//!   nlslab <experiment> [--config PATH] [--seed N] [--out DIR]
//!   nlslab verify-all   [--config PATH] [--seed N] [--out DIR]
//!   nlslab plot --out DIR
//!
//! Exit codes: 0 all checks pass, 1 check failure, 2 usage/config error,
//! 3 numeric failure.

mod config;
mod plot;
mod report;
mod runner;

use std::path::{Path, PathBuf};

use config::{parse_config_file, ExperimentConfig, ExperimentKind, ALL_KINDS};
use report::{write_matrix, write_matrix_to, write_summary_csv, ReportRecord};

const USAGE: &str = "usage: nlslab <experiment|verify-all|plot> [--config PATH] [--seed N] [--out DIR]
experiments: simulate decay scattering strichartz dispersive equivalence
             commutators resolvent heat-domination regular-point as-bound linf-interp";

struct Args {
    command: String,
    config: Option<PathBuf>,
    seed: Option<u64>,
    out: PathBuf,
}

fn parse_args() -> Result<Args, String> {
    let mut argv = std::env::args().skip(1);
    let command = argv.next().ok_or_else(|| USAGE.to_string())?;
    let mut config = None;
    let mut seed = None;
    let mut out = None;
    while let Some(flag) = argv.next() {
        let mut value_for = |name: &str| {
            argv.next()
                .ok_or_else(|| format!("{name} expects a value\n{USAGE}"))
        };
        match flag.as_str() {
            "--config" => config = Some(PathBuf::from(value_for("--config")?)),
            "--seed" => {
                seed = Some(
                    value_for("--seed")?
                        .parse::<u64>()
                        .map_err(|_| "--seed expects an integer".to_string())?,
                )
            }
            "--out" => out = Some(PathBuf::from(value_for("--out")?)),
            other => return Err(format!("unknown flag '{other}'\n{USAGE}")),
        }
    }
    Ok(Args {
        command: command.clone(),
        config,
        seed,
        out: out.unwrap_or_else(|| PathBuf::from(format!("nlslab-out/{command}"))),
    })
}

fn load_config(args: &Args, kind: ExperimentKind) -> Result<ExperimentConfig, Vec<String>> {
    let mut cfg = match &args.config {
        Some(path) => parse_config_file(path, kind)?,
        None => ExperimentConfig::defaults(kind),
    };
    if let Some(seed) = args.seed {
        cfg.set_number("seed", seed as f64);
    }
    Ok(cfg)
}

fn finish_run(
    out_dir: &Path,
    cfg: Option<&ExperimentConfig>,
    records: &[ReportRecord],
) -> std::io::Result<i32> {
    std::fs::create_dir_all(out_dir)?;
    write_summary_csv(&out_dir.join("summary.csv"), records)?;
    write_matrix(&out_dir.join("matrix.txt"), records)?;
    if let Some(cfg) = cfg {
        std::fs::write(out_dir.join("effective-config.txt"), cfg.to_text())?;
    }
    let (_, notes) = plot::emit_plot_data(out_dir)?;
    for note in notes {
        eprintln!("plot: {note}");
    }
    let mut stdout = std::io::stdout().lock();
    write_matrix_to(&mut stdout, records)?;
    Ok(if records.iter().all(|r| r.pass) { 0 } else { 1 })
}

fn numeric_failure(out_dir: &Path, experiment: &str, err: &nlslab_core::Error) -> i32 {
    eprintln!("{experiment}: {err}");
    let record = ReportRecord::flag(experiment, "execution", &format!("{err}"), "completed", false);
    let _ = std::fs::create_dir_all(out_dir);
    let _ = write_summary_csv(&out_dir.join("summary.csv"), std::slice::from_ref(&record));
    let _ = write_matrix(&out_dir.join("matrix.txt"), std::slice::from_ref(&record));
    3
}

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    let args = match parse_args() {
        Ok(a) => a,
        Err(msg) => {
            eprintln!("{msg}");
            return 2;
        }
    };

    if args.command == "plot" {
        return match plot::emit_plot_data(&args.out) {
            Ok((count, notes)) => {
                for note in &notes {
                    eprintln!("plot: {note}");
                }
                println!("wrote {count} plot files to {}", args.out.display());
                0
            }
            Err(e) => {
                eprintln!("plot: {e}");
                2
            }
        };
    }

    if args.command == "verify-all" {
        let mut all_records = Vec::new();
        for kind in ALL_KINDS {
            let cfg = match load_config(&args, kind) {
                Ok(c) => c,
                Err(errors) => {
                    // keys namespaced for other kinds are expected in a shared config
                    let fatal: Vec<&String> = errors
                        .iter()
                        .filter(|e| !is_foreign_key_error(e, kind))
                        .collect();
                    if fatal.is_empty() {
                        continue;
                    }
                    for e in fatal {
                        eprintln!("config ({}): {e}", kind.name());
                    }
                    return 2;
                }
            };
            let sub_dir = args.out.join(kind.name());
            eprintln!("running {} ...", kind.name());
            match runner::run(&cfg, &sub_dir) {
                Ok(mut records) => all_records.append(&mut records),
                Err(err) => return numeric_failure(&args.out, kind.name(), &err),
            }
        }
        return match finish_run(&args.out, None, &all_records) {
            Ok(code) => code,
            Err(e) => {
                eprintln!("output error: {e}");
                3
            }
        };
    }

    let Some(kind) = ExperimentKind::parse(&args.command) else {
        eprintln!("unknown experiment '{}'\n{USAGE}", args.command);
        return 2;
    };
    let cfg = match load_config(&args, kind) {
        Ok(c) => c,
        Err(errors) => {
            for e in errors {
                eprintln!("config: {e}");
            }
            return 2;
        }
    };
    match runner::run(&cfg, &args.out) {
        Ok(records) => match finish_run(&args.out, Some(&cfg), &records) {
            Ok(code) => code,
            Err(e) => {
                eprintln!("output error: {e}");
                3
            }
        },
        Err(err) => numeric_failure(&args.out, kind.name(), &err),
    }
}

/// In a shared verify-all config, keys namespaced for other experiment kinds
/// are not errors for this one.
fn is_foreign_key_error(error: &str, _kind: ExperimentKind) -> bool {
    if let Some(rest) = error.strip_prefix("unknown key '") {
        let key = rest.trim_end_matches('\'');
        let prefixes = [
            "simulate.", "decay.", "scattering.", "strichartz.", "dispersive.", "equivalence.",
            "commutators.", "resolvent.", "heat.", "regular.", "asbound.", "linf.", "p",
            "re_lambda", "im_lambda", "epsilon", "alpha", "width", "dt",
        ];
        return prefixes.iter().any(|p| key.starts_with(p));
    }
    if error.starts_with("experiment: file says") {
        return true;
    }
    false
}
