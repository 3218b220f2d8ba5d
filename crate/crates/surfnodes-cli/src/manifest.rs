//! Run manifests: every command records its full parameterization so the
//! run can be reproduced (and verified) from the manifest alone.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

use crate::RunArgs;

/// RNG identifier recorded in manifests and reports. All randomness flows
/// through this one generator family, keyed only by `seed`.
pub const RNG_ID: &str = "chacha8";

#[derive(Serialize, Deserialize, Clone)]
pub struct Manifest {
    pub command: String,
    pub rng_id: String,
    pub surface: String,
    pub algorithms: Vec<String>,
    pub h: Vec<f64>,
    pub h_grid: Option<String>,
    pub h_min: f64,
    pub h_max: f64,
    pub n: Option<usize>,
    pub tau: f64,
    pub seed: u64,
    pub refinement: f64,
    pub index: String,
    pub start: Option<Vec<f64>>,
    pub max_nodes: usize,
    pub reps: usize,
    /// Output files (relative to the manifest's directory) that are
    /// deterministic and byte-comparable on replay.
    pub outputs: Vec<String>,
    /// Output files containing wall-clock timings; informative only,
    /// excluded from replay comparison.
    pub volatile_outputs: Vec<String>,
    pub node_count: Option<u64>,
    pub truncated: Option<bool>,
    pub gamma: Option<f64>,
    /// Wall time of the computation (excluding file I/O), seconds.
    pub wall_time_s: f64,
}

impl Manifest {
    pub fn new(command: &str, args: &RunArgs, algorithms: Vec<String>) -> Self {
        Manifest {
            command: command.to_string(),
            rng_id: RNG_ID.to_string(),
            surface: args.surface.clone(),
            algorithms,
            h: args.h.clone(),
            h_grid: args.h_grid.as_ref().map(|p| p.to_string_lossy().into_owned()),
            h_min: args.h_min,
            h_max: args.h_max,
            n: args.n,
            tau: args.tau,
            seed: args.seed,
            refinement: args.refinement,
            index: args.index.clone(),
            start: args.start.clone(),
            max_nodes: args.max_nodes,
            reps: args.reps,
            outputs: Vec::new(),
            volatile_outputs: Vec::new(),
            node_count: None,
            truncated: None,
            gamma: None,
            wall_time_s: 0.0,
        }
    }

    /// Reconstructs command-line arguments for a replay into `out`.
    /// A relative altitude-grid path is resolved against the manifest's
    /// directory so replays work from any working directory.
    pub fn to_args(&self, manifest_dir: &Path, out: PathBuf) -> RunArgs {
        let h_grid = self.h_grid.as_ref().map(|p| {
            let p = PathBuf::from(p);
            if p.is_relative() {
                manifest_dir.join(p)
            } else {
                p
            }
        });
        RunArgs {
            surface: self.surface.clone(),
            alg: self.algorithms.join(","),
            h: self.h.clone(),
            h_grid,
            h_min: self.h_min,
            h_max: self.h_max,
            n: self.n,
            tau: self.tau,
            seed: self.seed,
            refinement: self.refinement,
            out,
            reps: self.reps,
            index: self.index.clone(),
            start: self.start.clone(),
            max_nodes: self.max_nodes,
        }
    }

    pub fn save(&self, dir: &Path) -> Result<()> {
        let path = dir.join("manifest.json");
        let text = serde_json::to_string_pretty(self)?;
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }
}
