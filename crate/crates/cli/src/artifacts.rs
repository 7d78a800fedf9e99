//! Output-file plumbing shared by every subcommand: collision checking
//! (files are never overwritten without `--force`), directory creation, and
//! deterministic CSV/JSON writers.
//!
//! Determinism contract: all floating-point values are written with Rust's
//! shortest-round-trip `Display`, JSON maps are ordered, and rows are
//! emitted in a fixed order — so a rerun with the same configuration
//! produces byte-identical files.

use std::fs::{self, File};
use std::io::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Serialize;

use aurum_core::{write_price_csv, write_rate_csv, PriceSeries, RateSeries};

/// The set of files a subcommand intends to write, validated as a group
/// before any file is touched.
pub struct OutputPlan {
    dir: PathBuf,
    force: bool,
    planned: Vec<PathBuf>,
}

impl OutputPlan {
    pub fn new(dir: &Path, force: bool) -> Self {
        Self {
            dir: dir.to_path_buf(),
            force,
            planned: Vec::new(),
        }
    }

    /// Registers an output file name and returns its full path.
    pub fn declare(&mut self, name: &str) -> PathBuf {
        let path = self.dir.join(name);
        self.planned.push(path.clone());
        path
    }

    /// Verifies every declared output at once: without `--force`, any file
    /// that already exists is an error, and all collisions are listed
    /// together. Creates the output directory on success.
    pub fn check(&self) -> Result<()> {
        if !self.force {
            let collisions: Vec<String> = self
                .planned
                .iter()
                .filter(|p| p.exists())
                .map(|p| format!("  - {}", p.display()))
                .collect();
            if !collisions.is_empty() {
                bail!(
                    "refusing to overwrite existing output files (pass --force to replace):\n{}",
                    collisions.join("\n")
                );
            }
        }
        fs::create_dir_all(&self.dir)
            .with_context(|| format!("creating output directory {}", self.dir.display()))?;
        Ok(())
    }
}

/// Writes a price series as `date,<name>` CSV and reports the path.
pub fn write_price_series(path: &Path, series: &PriceSeries, name: &str) -> Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    write_price_csv(file, series, name).with_context(|| format!("writing {}", path.display()))?;
    println!("wrote {}", path.display());
    Ok(())
}

/// Writes a rate series as `date,<name>` CSV and reports the path.
pub fn write_rate_series(path: &Path, series: &RateSeries, name: &str) -> Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    write_rate_csv(file, series, name).with_context(|| format!("writing {}", path.display()))?;
    println!("wrote {}", path.display());
    Ok(())
}

/// Writes several series in tidy long form (`date,series,value`), one block
/// per series in the order given — plot-ready without further reshaping.
pub fn write_tidy(path: &Path, groups: &[(&str, &PriceSeries)]) -> Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut wtr = csv::Writer::from_writer(file);
    wtr.write_record(["date", "series", "value"])?;
    for (name, series) in groups {
        for (date, value) in series.iter() {
            wtr.write_record([date.to_string(), name.to_string(), value.to_string()])?;
        }
    }
    wtr.flush()?;
    println!("wrote {}", path.display());
    Ok(())
}

/// Writes a report as pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value).context("serializing report")?;
    bytes.push(b'\n');
    let mut file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    file.write_all(&bytes)
        .with_context(|| format!("writing {}", path.display()))?;
    println!("wrote {}", path.display());
    Ok(())
}

/// Writes a report as two-column `key,value` CSV, rows in the order given.
pub fn write_kv_csv(path: &Path, rows: &[(String, String)]) -> Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut wtr = csv::Writer::from_writer(file);
    wtr.write_record(["key", "value"])?;
    for (key, value) in rows {
        wtr.write_record([key, value])?;
    }
    wtr.flush()?;
    println!("wrote {}", path.display());
    Ok(())
}

/// Writes a homogeneous table (header + rows) as CSV.
pub fn write_table_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut wtr = csv::Writer::from_writer(file);
    wtr.write_record(header)?;
    for row in rows {
        wtr.write_record(row)?;
    }
    wtr.flush()?;
    println!("wrote {}", path.display());
    Ok(())
}
