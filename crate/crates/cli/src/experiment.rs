//! Monte Carlo sweeps: one CSV row per (cell, trial), computed in parallel
//! and written in grid order so identical configs give identical files.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use bigenus::bigraph::{gen_random_bipartite, GenParams};
use bigenus::estimator::{estimate_genus, EstimateConfig, GenusEstimate};
use rayon::prelude::*;

use crate::config::{Cell, ExperimentConfig};
use crate::error::{CliError, CliResult};

/// Identifies a row across runs: `(n1, n2, p_spec, i, seed)`.
type RowKey = (String, String, String, String, String);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct RunSummary {
    pub rows: usize,
    pub computed: usize,
    pub reused: usize,
    pub failed: usize,
}

fn run_one(cfg: &ExperimentConfig, cell: &Cell, seed: u64) -> String {
    let p = cell.p.resolve(cell.n1);
    let spec = cell.p.to_string();
    let result = GenParams::new(cell.n1, cell.n2, p, seed, cell.i)
        .and_then(|params| gen_random_bipartite(&params))
        .and_then(|g| {
            let est = EstimateConfig {
                strategy: cfg.strategy,
                seed,
                trail_cap: cfg.cap,
                p: Some(p),
                eps: cfg.eps,
                ..EstimateConfig::default()
            };
            estimate_genus(&g, cell.i, &est)
        });
    match result {
        Ok(e) => e.csv_row_with_spec(&spec),
        Err(e) => GenusEstimate::csv_error_row(cell.n1, cell.n2, &spec, p, cell.i, seed, &e),
    }
}

fn key_of(record: &[&str]) -> Option<RowKey> {
    // schema,n1,n2,p_spec,p,i,seed,...
    (record.len() >= 7).then(|| {
        (
            record[1].to_string(),
            record[2].to_string(),
            record[3].to_string(),
            record[5].to_string(),
            record[6].to_string(),
        )
    })
}

fn existing_rows(path: &Path) -> CliResult<HashMap<RowKey, String>> {
    let mut rows = HashMap::new();
    if !path.exists() {
        return Ok(rows);
    }
    let text = fs::read_to_string(path).map_err(|source| CliError::File {
        path: path.display().to_string(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(text.as_bytes());
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if header.join(",") != GenusEstimate::csv_header() {
        return Err(CliError::Usage(format!(
            "{} has a different column layout; refusing to resume into it",
            path.display()
        )));
    }
    for (record, line) in reader.records().zip(text.lines().skip(1)) {
        let record = record?;
        let fields: Vec<&str> = record.iter().collect();
        if let Some(key) = key_of(&fields) {
            rows.insert(key, line.to_string());
        }
    }
    Ok(rows)
}

/// Runs the grid. With an existing output file, rows already present (by
/// key) are kept as they are and only missing rows are computed; the file
/// is then rewritten in grid order.
pub fn run_experiment(
    cfg: &ExperimentConfig,
    out: Option<&Path>,
) -> CliResult<(String, RunSummary)> {
    cfg.validate()?;
    let done = match out {
        Some(path) => existing_rows(path)?,
        None => HashMap::new(),
    };
    let tasks: Vec<(Cell, u64)> = cfg
        .cells()
        .into_iter()
        .flat_map(|cell| (0..cfg.trials as u64).map(move |t| (cell, cfg.seed.wrapping_add(t))))
        .collect();
    let mut summary = RunSummary {
        rows: tasks.len(),
        ..RunSummary::default()
    };
    let rows: Vec<(String, bool)> = tasks
        .par_iter()
        .map(|(cell, seed)| {
            let key = (
                cell.n1.to_string(),
                cell.n2.to_string(),
                cell.p.to_string(),
                cell.i.to_string(),
                seed.to_string(),
            );
            match done.get(&key) {
                Some(line) => (line.clone(), true),
                None => (run_one(cfg, cell, *seed), false),
            }
        })
        .collect();
    let mut text = String::from(GenusEstimate::csv_header());
    text.push('\n');
    for (line, reused) in rows {
        if reused {
            summary.reused += 1;
        } else {
            summary.computed += 1;
        }
        if line
            .rsplit(',')
            .next()
            .is_some_and(|s| s.starts_with("error"))
        {
            summary.failed += 1;
        }
        text.push_str(&line);
        text.push('\n');
    }
    if let Some(path) = out {
        fs::write(path, &text).map_err(|source| CliError::File {
            path: path.display().to_string(),
            source,
        })?;
    }
    Ok((text, summary))
}
