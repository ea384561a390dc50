//! CSV rows shared by every subcommand.

use std::io::Write;
use std::path::Path;

use deqmi::channel::ChannelModel;
use deqmi::montecarlo::McEstimate;
use deqmi::mutual_info::MutualInfoResult;
use serde::Serialize;

use crate::config::ModelConfig;
use crate::error::CliError;

/// One output line. Column order is the field order; empty cells mean "not
/// applicable". Every row repeats the full model description.
#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct Row {
    pub command: &'static str,
    pub variable: Option<String>,
    pub value: Option<f64>,
    #[serde(rename = "N")]
    pub n_rx: usize,
    #[serde(rename = "T")]
    pub n_tx: usize,
    #[serde(rename = "L")]
    pub lag_span: usize,
    pub grid_size: usize,
    pub doppler: &'static str,
    pub f_d: Option<f64>,
    pub reg: Option<f64>,
    pub profile: &'static str,
    pub xi: Option<f64>,
    pub rho: f64,
    pub rho_db: f64,
    #[serde(rename = "K")]
    pub k: f64,
    pub sigma_sq: Option<f64>,
    pub los_power: Option<f64>,
    pub mi_nats: Option<f64>,
    pub mi_bits: Option<f64>,
    pub iterations: Option<usize>,
    pub residual: Option<f64>,
    pub mc_window: Option<usize>,
    pub mc_trials: Option<usize>,
    pub mc_seed: Option<u64>,
    pub mc_mean_nats: Option<f64>,
    pub mc_mean_bits: Option<f64>,
    pub mc_stderr_nats: Option<f64>,
    pub abs_gap: Option<f64>,
    pub rel_gap: Option<f64>,
    pub tolerance: Option<f64>,
    pub status: &'static str,
    pub error: Option<String>,
}

pub const HEADER: &[&str] = &[
    "command", "variable", "value", "N", "T", "L", "grid_size", "doppler", "f_d", "reg",
    "profile", "xi", "rho", "rho_db", "K", "sigma_sq", "los_power", "mi_nats", "mi_bits",
    "iterations", "residual", "mc_window", "mc_trials", "mc_seed", "mc_mean_nats",
    "mc_mean_bits", "mc_stderr_nats", "abs_gap", "rel_gap", "tolerance", "status", "error",
];

pub fn nats_to_bits(nats: f64) -> f64 {
    nats / std::f64::consts::LN_2
}

impl Row {
    pub fn describe(command: &'static str, cfg: &ModelConfig) -> Self {
        Row {
            command,
            n_rx: cfg.n_rx,
            n_tx: cfg.n_tx,
            lag_span: cfg.lag_span,
            grid_size: cfg.grid_size,
            doppler: cfg.doppler_name(),
            f_d: cfg.f_d(),
            reg: cfg.reg(),
            profile: cfg.profile_name(),
            xi: cfg.xi(),
            rho: cfg.rho(),
            rho_db: cfg.rho_db(),
            k: cfg.snr.k.0,
            status: "ok",
            ..Row::default()
        }
    }

    pub fn with_model(mut self, model: &ChannelModel) -> Self {
        self.sigma_sq = Some(model.sigma_sq());
        self.los_power = Some(model.los_power());
        self
    }

    pub fn with_sweep_point(mut self, variable: impl ToString, value: f64) -> Self {
        self.variable = Some(variable.to_string());
        self.value = Some(value);
        self
    }

    pub fn with_deq(mut self, r: &MutualInfoResult) -> Self {
        self.mi_nats = Some(r.total);
        self.mi_bits = Some(nats_to_bits(r.total));
        self.iterations = Some(r.diagnostics.iterations);
        self.residual = Some(r.diagnostics.final_residual);
        self
    }

    pub fn with_mc(mut self, window: usize, seed: u64, e: &McEstimate) -> Self {
        self.mc_window = Some(window);
        self.mc_trials = Some(e.trials);
        self.mc_seed = Some(seed);
        self.mc_mean_nats = Some(e.mean);
        self.mc_mean_bits = Some(nats_to_bits(e.mean));
        self.mc_stderr_nats = Some(e.stderr);
        self
    }

    pub fn with_error(mut self, err: &CliError) -> Self {
        self.status = "error";
        self.error = Some(err.to_string());
        self
    }
}

fn writer<W: Write>(sink: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .has_headers(false)
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(sink)
}

pub fn write_rows<W: Write>(sink: W, rows: &[Row]) -> Result<(), CliError> {
    let mut w = writer(sink);
    w.write_record(HEADER)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes to `path`, or stdout when absent.
pub fn emit(path: Option<&Path>, rows: &[Row]) -> Result<(), CliError> {
    match path {
        Some(p) => write_rows(std::fs::File::create(p)?, rows),
        None => write_rows(std::io::stdout().lock(), rows),
    }
}

pub fn write_per_trial(path: &Path, samples: &[f64]) -> Result<(), CliError> {
    let mut w = writer(std::fs::File::create(path)?);
    w.write_record(["trial", "mi_nats", "mi_bits"])?;
    for (i, v) in samples.iter().enumerate() {
        w.serialize((i, v, nats_to_bits(*v)))?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_matches_fields() {
        let mut buf = Vec::new();
        let mut w = csv::WriterBuilder::new().from_writer(&mut buf);
        w.serialize(Row::default()).unwrap();
        drop(w);
        let text = String::from_utf8(buf).unwrap();
        let first = text.lines().next().unwrap();
        assert_eq!(first, HEADER.join(","));
    }

    #[test]
    fn rows_use_newline_terminators() {
        let mut buf = Vec::new();
        write_rows(&mut buf, &[Row::default(), Row::default()]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(!text.contains('\r'));
        assert_eq!(text.lines().count(), 3);
        assert!(text.ends_with('\n'));
    }

    #[test]
    fn bits_conversion() {
        assert!((nats_to_bits(std::f64::consts::LN_2) - 1.0).abs() < 1e-15);
    }
}
