//! Plot-ready two-column text files derived from a finished run directory.

use std::io::Write;
use std::path::Path;

/// Converts known CSV outputs in `dir` into whitespace-delimited .txt files
/// any plotting tool can consume. Missing inputs are listed and skipped;
/// returns (files written, notes).
pub fn emit_plot_data(dir: &Path) -> std::io::Result<(usize, Vec<String>)> {
    let mut written = 0;
    let mut notes = Vec::new();

    // decay curve: (log t, log sup-norm), first column monotone
    let traj = dir.join("trajectory.csv");
    if traj.exists() {
        let text = std::fs::read_to_string(&traj)?;
        let mut out = std::io::BufWriter::new(std::fs::File::create(dir.join("plot_decay.txt"))?);
        for line in text.lines().skip(1) {
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() >= 2 {
                if let (Ok(t), Ok(s)) = (cols[0].parse::<f64>(), cols[1].parse::<f64>()) {
                    if t > 0.0 && s > 0.0 {
                        writeln!(out, "{:.12e} {:.12e}", t.ln(), s.ln())?;
                    }
                }
            }
        }
        out.flush()?;
        written += 1;
    } else {
        notes.push("trajectory.csv not found, decay plot skipped".into());
    }

    // survey files: one (parameter, ratio) or (sample, ratio) pair per row
    let mut entries: Vec<_> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .collect();
    entries.sort();
    for path in entries {
        let Some(name) = path.file_name().and_then(|n| n.to_str()) else {
            continue;
        };
        if !name.ends_with(".csv") || name == "trajectory.csv" || name == "summary.csv" {
            continue;
        }
        let text = std::fs::read_to_string(&path)?;
        let stem = name.trim_end_matches(".csv");
        let out_path = dir.join(format!("plot_{stem}.txt"));
        let mut out = std::io::BufWriter::new(std::fs::File::create(&out_path)?);
        let mut rows = 0;
        for line in text.lines() {
            if line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() >= 2 {
                if let (Ok(a), Ok(b)) = (
                    cols[0].parse::<f64>(),
                    cols[cols.len() - 1].parse::<f64>(),
                ) {
                    writeln!(out, "{a:.12e} {b:.12e}")?;
                    rows += 1;
                }
            }
        }
        out.flush()?;
        if rows == 0 {
            std::fs::remove_file(&out_path)?;
            notes.push(format!("{name}: no numeric rows, skipped"));
        } else {
            written += 1;
        }
    }
    if written == 0 {
        notes.push("no plottable inputs found".into());
    }
    Ok((written, notes))
}
