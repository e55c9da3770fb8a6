//! Markov-chain samplers over differentiable log densities: HMC with
//! acceptance-rate step-size adaptation, SGLD, and SGHMC, plus chain
//! diagnostics.
//!
//! Samplers are generic over [`Target`]; the network posterior is adapted via
//! [`BnnPosterior`] and small closed-form targets for validation live in
//! [`toy`].

mod batches;
pub mod diagnostics;
mod hmc;
mod leapfrog;
mod sghmc;
mod sgld;
mod target;
pub mod toy;

pub use hmc::{run_hmc, HmcConfig};
pub use leapfrog::{leapfrog, Divergent};
pub use sghmc::{run_sghmc, SghmcConfig};
pub use sgld::{run_sgld, SgldConfig};
pub use target::{BnnPosterior, MinibatchTarget, Target};

use crate::error::{Error, Result};
use ndarray::{Array1, Array2, ArrayView1, Axis};
use std::io::{BufRead, Write};

/// Retained weight draws representing an approximate posterior.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorSamples {
    samples: Array2<f64>,
    pub method: String,
    pub seed: u64,
    pub config_digest: String,
}

impl PosteriorSamples {
    /// Validates that every retained draw is finite.
    pub fn new(
        samples: Array2<f64>,
        method: impl Into<String>,
        seed: u64,
        config_digest: impl Into<String>,
    ) -> Result<Self> {
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("posterior sample entry".into()));
        }
        Ok(Self {
            samples,
            method: method.into(),
            seed,
            config_digest: config_digest.into(),
        })
    }

    pub fn num_samples(&self) -> usize {
        self.samples.nrows()
    }

    pub fn dim(&self) -> usize {
        self.samples.ncols()
    }

    pub fn samples(&self) -> &Array2<f64> {
        &self.samples
    }

    pub fn row(&self, s: usize) -> ArrayView1<'_, f64> {
        self.samples.row(s)
    }

    /// Empirical mean over draws.
    pub fn mean(&self) -> Array1<f64> {
        self.samples.mean_axis(Axis(0)).expect("at least one sample")
    }

    /// One column of the draw matrix as a trace for diagnostics.
    pub fn coordinate_trace(&self, coord: usize) -> Vec<f64> {
        self.samples.column(coord).to_vec()
    }

    /// Writes the draws as CSV with a provenance comment line.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(
            out,
            "# method={} seed={} config_digest={}",
            self.method, self.seed, self.config_digest
        )?;
        let header: Vec<String> = (0..self.dim()).map(|j| format!("w{j}")).collect();
        writeln!(out, "{}", header.join(","))?;
        for row in self.samples.rows() {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
            writeln!(out, "{}", cells.join(","))?;
        }
        Ok(())
    }

    /// Reads draws written by [`Self::write_csv`].
    pub fn read_csv<R: BufRead>(reader: R) -> Result<Self> {
        let mut method = String::from("unknown");
        let mut seed = 0u64;
        let mut config_digest = String::new();
        let mut rows: Vec<f64> = Vec::new();
        let mut dim = None;
        let mut n_rows = 0usize;
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let lineno = idx + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            if let Some(rest) = trimmed.strip_prefix('#') {
                for token in rest.split_whitespace() {
                    if let Some((k, v)) = token.split_once('=') {
                        match k {
                            "method" => method = v.to_string(),
                            "seed" => {
                                seed = v.parse().map_err(|_| Error::Parse {
                                    line: lineno,
                                    message: format!("bad seed {v:?}"),
                                })?
                            }
                            "config_digest" => config_digest = v.to_string(),
                            _ => {}
                        }
                    }
                }
                continue;
            }
            if trimmed.starts_with('w') {
                continue; // header
            }
            let values: Vec<f64> = trimmed
                .split(',')
                .map(|c| {
                    c.trim().parse::<f64>().map_err(|_| Error::Parse {
                        line: lineno,
                        message: format!("bad float {c:?}"),
                    })
                })
                .collect::<Result<_>>()?;
            match dim {
                None => dim = Some(values.len()),
                Some(d) if d != values.len() => {
                    return Err(Error::Parse {
                        line: lineno,
                        message: format!("expected {d} columns, got {}", values.len()),
                    })
                }
                _ => {}
            }
            rows.extend(values);
            n_rows += 1;
        }
        let dim = dim.ok_or(Error::Parse {
            line: 0,
            message: "no sample rows".into(),
        })?;
        let samples = Array2::from_shape_vec((n_rows, dim), rows).expect("consistent row widths");
        Self::new(samples, method, seed, config_digest)
    }
}

/// One subsampled row of the per-iteration chain record.
#[derive(Debug, Clone)]
pub struct TraceRow {
    pub iteration: usize,
    pub log_joint: f64,
    /// 1.0 when the iteration's proposal was accepted (always 1.0 for the
    /// unadjusted SG methods).
    pub acceptance: f64,
    pub step_size: f64,
    pub coords: Vec<f64>,
}

/// Per-run chain statistics: window acceptance rates, step-size history, and
/// a subsampled trace of log joint plus selected weight coordinates.
#[derive(Debug, Clone)]
pub struct ChainStats {
    pub method: String,
    pub window_acceptance: Vec<f64>,
    pub step_size_history: Vec<f64>,
    pub coord_indices: Vec<usize>,
    pub trace: Vec<TraceRow>,
    pub final_step_size: f64,
    pub divergences: usize,
    /// Set when the run stopped early on the wall-clock budget.
    pub truncated: bool,
}

impl ChainStats {
    /// CSV export: iteration, log_joint, acceptance, step_size, then the
    /// selected weight coordinates.
    pub fn write_trace_csv<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        let coord_names: Vec<String> = self.coord_indices.iter().map(|i| format!("w{i}")).collect();
        writeln!(out, "iteration,log_joint,acceptance,step_size,{}", coord_names.join(","))?;
        for row in &self.trace {
            let coords: Vec<String> = row.coords.iter().map(|v| format!("{v:.16e}")).collect();
            writeln!(
                out,
                "{},{:.16e},{},{:.16e},{}",
                row.iteration,
                row.log_joint,
                row.acceptance,
                row.step_size,
                coords.join(",")
            )?;
        }
        Ok(())
    }
}

/// Evenly spread coordinate indices to trace (at most five).
pub(crate) fn trace_coords(dim: usize) -> Vec<usize> {
    if dim <= 5 {
        (0..dim).collect()
    } else {
        (0..5).map(|k| k * (dim - 1) / 4).collect()
    }
}

/// Subsampling stride keeping roughly a thousand trace rows.
pub(crate) fn trace_stride(iterations: usize) -> usize {
    (iterations / 1024).max(1)
}
