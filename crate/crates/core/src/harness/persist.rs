use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::sweep::{RunPaths, RunSummary};
use crate::diagnostics::BlockSeries;
use crate::dynamics::{write_history, HistoryMeta, PairRun, ReplayRun, RunConfig};
use crate::error::{Error, Result};

pub const BLOCKS_FILE: &str = "blocks.csv";
pub const OVERLAP_FILE: &str = "overlap.csv";
pub const HISTORY_FILE: &str = "history.txt";
pub const SUMMARY_FILE: &str = "summary.json";
pub const TIMING_FILE: &str = "timing.json";

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

fn write_with(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> Result<()> {
    let mut w = create(path)?;
    f(&mut w).and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).expect("plain data serialises");
    write_with(path, |w| writeln!(w, "{text}"))
}

pub fn write_blocks_csv<W: Write>(series: &BlockSeries, mut w: W) -> std::io::Result<()> {
    writeln!(w, "t,b_m")?;
    for b in &series.blocks {
        writeln!(w, "{},{:e}", b.start, b.value)?;
    }
    Ok(())
}

/// `n, lattice time n/N, C_n`.
pub fn write_overlap_csv<W: Write>(c_series: &[f64], n_vertices: usize, mut w: W) -> std::io::Result<()> {
    writeln!(w, "n,lattice_time,c_n")?;
    for (k, c) in c_series.iter().enumerate() {
        let n = k + 1;
        writeln!(w, "{n},{},{c:e}", n as f64 / n_vertices as f64)?;
    }
    Ok(())
}

pub fn history_meta(config: &RunConfig) -> HistoryMeta {
    HistoryMeta {
        n_vertices: config.n_vertices,
        seed: Some(config.seed),
        field_mode: config.field_mode.name().to_owned(),
        x: Some(config.x),
        theta: Some(config.theta),
    }
}

/// Writes the series, history and summary of one run into `dir`.
/// `summary.paths` is filled in with the file names.
pub fn persist_run(run: &PairRun, summary: &mut RunSummary, dir: &Path, plot_scripts: bool) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let config = &summary.config;
    write_with(&dir.join(BLOCKS_FILE), |w| write_blocks_csv(&run.diagnostics.blocks, w))?;
    write_with(&dir.join(OVERLAP_FILE), |w| {
        write_overlap_csv(&run.diagnostics.c_series, config.n_vertices, w)
    })?;
    let meta = history_meta(config);
    write_with(&dir.join(HISTORY_FILE), |w| write_history(&run.history, &meta, w))?;
    summary.paths = Some(RunPaths::default());
    write_json(&dir.join(SUMMARY_FILE), summary)?;
    write_json(
        &dir.join(TIMING_FILE),
        &serde_json::json!({ "wall_time_s": summary.wall_time.as_secs_f64() }),
    )?;
    if plot_scripts {
        write_with(&dir.join("plot_blocks.gp"), |w| w.write_all(PLOT_BLOCKS.as_bytes()))?;
        write_with(&dir.join("plot_overlap.gp"), |w| w.write_all(PLOT_OVERLAP.as_bytes()))?;
    }
    Ok(())
}

/// Writes a summary that has no series (an infeasible run).
pub fn persist_summary_only(summary: &RunSummary, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_json(&dir.join(SUMMARY_FILE), summary)
}

/// `replay.csv`: per-motion marginals and, with a reference, `C_n`.
pub fn write_replay_csv<W: Write>(run: &ReplayRun, mut w: W) -> std::io::Result<()> {
    writeln!(w, "n,row,col,alpha_a,alpha_b,b_a,b_b,ref_b_a,ref_b_b,c_n")?;
    for s in &run.steps {
        let opt = |x: Option<f64>| x.map(|v| format!("{v:e}")).unwrap_or_default();
        writeln!(
            w,
            "{},{},{},{},{},{:e},{:e},{},{},{}",
            s.step,
            s.vertex.row,
            s.vertex.col,
            s.outcome.a as u8,
            s.outcome.b as u8,
            s.marginals[0],
            s.marginals[1],
            opt(s.reference_marginals.map(|m| m[0])),
            opt(s.reference_marginals.map(|m| m[1])),
            opt(s.overlap_deficit),
        )?;
    }
    Ok(())
}

pub fn write_replay(run: &ReplayRun, dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let path = dir.join("replay.csv");
    write_with(&path, |w| write_replay_csv(run, w))?;
    Ok(path)
}

pub(crate) fn write_text(path: &Path, text: &str) -> Result<()> {
    write_with(path, |w| w.write_all(text.as_bytes()))
}

const PLOT_BLOCKS: &str = "\
set datafile separator ','
set xlabel 'lattice time t'
set ylabel 'B_m(t)'
set logscale y
plot 'blocks.csv' using 1:(abs($2)) skip 1 with linespoints title 'B_m'
";

const PLOT_OVERLAP: &str = "\
set datafile separator ','
set xlabel 'lattice time n/N'
set ylabel 'C_n'
set logscale y
plot 'overlap.csv' using 2:3 skip 1 with lines title 'C_n'
";

pub(crate) const PLOT_EPSILON: &str = "\
set datafile separator ','
set xlabel 'log epsilon'
set ylabel 'log T_c'
plot 'sweep.csv' using (log($1)):(log($5)) skip 1 with points title 'runs'
";

pub(crate) const PLOT_THETA: &str = "\
set datafile separator ','
set xlabel 'theta / pi'
set ylabel 'T_c'
plot 'sweep.csv' using ($1/pi):5 skip 1 with points title 'runs'
";

pub(crate) const PLOT_PARTICLE: &str = "\
set datafile separator ','
set xlabel 'particle number'
set ylabel 'T_c'
set y2label 'log T_c'
plot 'sweep.csv' using 1:5 skip 1 with points title 'T_c', \
     '' using 1:(log($5)) skip 1 axes x1y2 with points title 'log T_c'
";
