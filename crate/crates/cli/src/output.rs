//! Report files. JSON writes one file per run; CSV writes a summary table
//! plus any named tables next to it.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use curvlab::report::{Format, RunConfig, VerificationReport};
use serde::Serialize;

/// A CSV table serialized from flat row records.
pub struct Table {
    pub name: &'static str,
    pub body: Vec<u8>,
}

impl Table {
    pub fn from_rows<R: Serialize>(name: &'static str, rows: &[R]) -> Result<Table> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in rows {
            w.serialize(r)?;
        }
        Ok(Table {
            name,
            body: w.into_inner().context("flushing CSV")?,
        })
    }
}

#[derive(Serialize)]
struct SummaryRow<'a> {
    suite: &'a str,
    pass: bool,
    seed: u64,
    r_max: f64,
    grid_points: usize,
    frame_budget: usize,
}

fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

/// Writes the report and returns the written paths, summary first.
pub fn emit(
    report: &VerificationReport,
    stem: &str,
    tables: Vec<Table>,
    cfg: &RunConfig,
) -> Result<Vec<PathBuf>> {
    let dir = &cfg.output_dir;
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    match cfg.format {
        Format::Json => {
            let path = dir.join(format!("{stem}.json"));
            write(&path, report.to_json().as_bytes())?;
            Ok(vec![path])
        }
        Format::Csv => {
            let summary = Table::from_rows(
                "summary",
                &[SummaryRow {
                    suite: &report.suite,
                    pass: report.pass,
                    seed: cfg.seed,
                    r_max: cfg.r_max,
                    grid_points: cfg.grid_points,
                    frame_budget: cfg.frame_budget,
                }],
            )?;
            let mut paths = Vec::new();
            let main = dir.join(format!("{stem}.csv"));
            write(&main, &summary.body)?;
            paths.push(main);
            for t in tables {
                let p = dir.join(format!("{stem}.{}.csv", t.name));
                write(&p, &t.body)?;
                paths.push(p);
            }
            Ok(paths)
        }
    }
}
