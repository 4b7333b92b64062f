//! Output layout shared by all experiments: `cells.csv` (long format),
//! `bound.csv` (overlay curves), `meta.json` (resolved config) and `.pgm`
//! images. Values are written with shortest round-trip formatting, so equal
//! runs produce byte-identical files.

use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::error::Result;
use crate::harness::config::ExperimentConfig;
use crate::harness::experiments::ExperimentOutput;
use crate::io::{write_json, write_pgm};

#[derive(Serialize)]
struct Meta<'a> {
    config: &'a ExperimentConfig,
    package: &'static str,
    version: &'static str,
    success_nmse: f64,
}

/// Writes the experiment artifacts under `dir` (created if missing).
pub fn write_outputs(
    dir: &Path,
    cfg: &ExperimentConfig,
    out: &ExperimentOutput,
) -> Result<()> {
    fs::create_dir_all(dir)?;

    let mut cells = String::from("s,m,metric,value,trials,seed\n");
    for c in &out.cells {
        cells.push_str(&format!(
            "{},{},{},{:?},{},{}\n",
            c.s, c.m, c.metric, c.value, c.trials, c.seed
        ));
    }
    fs::write(dir.join("cells.csv"), cells)?;

    if !out.bound.is_empty() {
        let mut bound = String::from("s,m_bound\n");
        for b in &out.bound {
            bound.push_str(&format!("{},{:?}\n", b.s, b.m_bound));
        }
        fs::write(dir.join("bound.csv"), bound)?;
    }

    for (name, img) in &out.images {
        write_pgm(&dir.join(format!("{name}.pgm")), img)?;
    }

    write_json(
        &dir.join("meta.json"),
        &Meta {
            config: cfg,
            package: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            success_nmse: crate::harness::experiments::SUCCESS_NMSE,
        },
    )
}

/// Parses an experiment config from JSON text; accepts both a bare config
/// and the `meta.json` wrapper written by [`write_outputs`], so a run can be
/// reproduced directly from its own metadata.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    if let Ok(cfg) = serde_json::from_str::<ExperimentConfig>(text) {
        return Ok(cfg);
    }
    #[derive(serde::Deserialize)]
    struct MetaIn {
        config: ExperimentConfig,
    }
    match serde_json::from_str::<MetaIn>(text) {
        Ok(meta) => Ok(meta.config),
        Err(e) => Err(crate::error::Error::Parse(format!(
            "config is neither a bare experiment config nor a meta.json: {e}"
        ))),
    }
}
