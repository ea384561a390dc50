//! Subcommand logic. Each runner returns its rows; nothing is written until
//! the whole run has been configured successfully.

use deqmi::channel::ChannelModel;
use deqmi::deq::SolverOptions;
use deqmi::montecarlo::{McConfig, McEstimate, Simulator};
use deqmi::mutual_info::deq_mutual_information;
use rayon::prelude::*;

use crate::config::{check_window, value_to_window, ModelConfig, SweepConfig, SweepVariable};
use crate::error::CliError;
use crate::output::Row;

/// Monte Carlo estimate with trials spread over the current rayon pool.
/// Bit-identical to [`deqmi::montecarlo::estimate`]: every trial owns its
/// seeded stream and the mean is accumulated in trial order.
pub fn estimate_parallel(model: &ChannelModel, config: &McConfig) -> Result<McEstimate, deqmi::Error> {
    if config.trials == 0 {
        return Err(deqmi::Error::InvalidParameter {
            name: "trials",
            reason: "need at least one trial".into(),
        });
    }
    let sim = Simulator::new(model, config.half_window)?;
    let samples = (0..config.trials)
        .into_par_iter()
        .map(|i| sim.trial(config.seed, i))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(McEstimate::from_samples(samples, true))
}

/// Window and trial count for a Monte Carlo run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McPlan {
    pub window: usize,
    pub trials: usize,
    pub seed: u64,
}

impl McPlan {
    pub fn config(&self) -> McConfig {
        McConfig {
            half_window: self.window / 2,
            trials: self.trials,
            seed: self.seed,
        }
    }
}

pub fn solve(cfg: &ModelConfig, opts: &SolverOptions) -> Result<Row, CliError> {
    let model = cfg.build()?;
    let result = deq_mutual_information(&model, opts)?;
    Ok(Row::describe("solve", cfg).with_model(&model).with_deq(&result))
}

/// One row per sweep value. Every point is configured and built before any
/// solve; numerical failures at a point become error rows.
pub fn sweep(
    cfg: &ModelConfig,
    spec: &SweepConfig,
    opts: &SolverOptions,
    mc: Option<McPlan>,
) -> Result<Vec<Row>, CliError> {
    if spec.values.is_empty() {
        return Err(CliError::Config("sweep: values must not be empty".into()));
    }
    if spec.variable == SweepVariable::M && mc.is_none() {
        return Err(CliError::Config("an M sweep needs a trial count".into()));
    }
    let points = spec
        .values
        .iter()
        .map(|&v| {
            let point = cfg.with_value(spec.variable, v)?;
            let model = point.build()?;
            let plan = match spec.variable {
                SweepVariable::M => Some(McPlan {
                    window: value_to_window(v)?,
                    ..mc.expect("checked above")
                }),
                _ => None,
            };
            Ok((v, point, model, plan))
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    Ok(points
        .par_iter()
        .map(|(v, point, model, plan)| {
            let row = Row::describe("sweep", point)
                .with_sweep_point(spec.variable, *v)
                .with_model(model);
            let evaluated = deq_mutual_information(model, opts)
                .map_err(CliError::from)
                .and_then(|r| {
                    let row = row.clone().with_deq(&r);
                    match plan {
                        Some(p) => {
                            let e = estimate_parallel(model, &p.config())?;
                            Ok(gap(row.with_mc(p.window, p.seed, &e), r.total, e.mean))
                        }
                        None => Ok(row),
                    }
                });
            evaluated.unwrap_or_else(|e| row.with_error(&e))
        })
        .collect())
}

fn gap(mut row: Row, deq: f64, mc: f64) -> Row {
    row.abs_gap = Some((mc - deq).abs());
    row.rel_gap = Some((mc - deq).abs() / deq.abs());
    row
}

pub fn montecarlo(cfg: &ModelConfig, plan: McPlan) -> Result<(Row, McEstimate), CliError> {
    check_window(plan.window)?;
    let model = cfg.build()?;
    let e = estimate_parallel(&model, &plan.config())?;
    let row = Row::describe("montecarlo", cfg)
        .with_model(&model)
        .with_mc(plan.window, plan.seed, &e);
    Ok((row, e))
}

/// Outcome of one window of a validation run.
#[derive(Debug, Clone, PartialEq)]
pub struct Validation {
    pub row: Row,
    pub passed: bool,
}

/// Compares the deterministic equivalent with Monte Carlo at each window.
/// A window passes when the relative gap is strictly below `tolerance`.
pub fn validate(
    cfg: &ModelConfig,
    windows: &[usize],
    trials: usize,
    seed: u64,
    tolerance: f64,
    opts: &SolverOptions,
) -> Result<Vec<Validation>, CliError> {
    if !(tolerance >= 0.0) {
        return Err(CliError::Config("tolerance must be nonnegative".into()));
    }
    if windows.is_empty() {
        return Err(CliError::Config("validate needs at least one window".into()));
    }
    for &w in windows {
        check_window(w)?;
    }
    let model = cfg.build()?;
    let deq = deq_mutual_information(&model, opts)?;
    windows
        .iter()
        .map(|&window| {
            let plan = McPlan { window, trials, seed };
            let e = estimate_parallel(&model, &plan.config())?;
            let mut row = gap(
                Row::describe("validate", cfg)
                    .with_model(&model)
                    .with_deq(&deq)
                    .with_mc(window, seed, &e),
                deq.total,
                e.mean,
            );
            let passed = row.rel_gap.is_some_and(|g| g < tolerance);
            row.tolerance = Some(tolerance);
            row.status = if passed { "pass" } else { "fail" };
            Ok(Validation { row, passed })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{DopplerConfig, LosConfig, ProfileConfig, RiceanK, SnrConfig};
    use deqmi::montecarlo::estimate;

    fn cfg() -> ModelConfig {
        ModelConfig {
            schema: 1,
            n_rx: 2,
            n_tx: 2,
            lag_span: 1,
            grid_size: 64,
            doppler: DopplerConfig::Exponential { f_d: 0.5, horizon: None },
            profile: ProfileConfig::Uniform,
            los: LosConfig::Steering { xi: 1.0 },
            snr: SnrConfig { rho: Some(4.0), rho_db: None, k: RiceanK(1.0) },
            sweep: None,
            montecarlo: None,
        }
    }

    #[test]
    fn parallel_estimate_is_bit_identical() {
        let model = cfg().build().unwrap();
        let mc = McConfig { half_window: 3, trials: 37, seed: 5 };
        let seq = estimate(&model, &mc).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let par = pool.install(|| estimate_parallel(&model, &mc)).unwrap();
        assert_eq!(seq, par);
        assert_eq!(seq.mean.to_bits(), par.mean.to_bits());
    }

    #[test]
    fn sweep_rejects_bad_points_before_solving() {
        let mut c = cfg();
        c.los = LosConfig::None;
        c.snr.k = RiceanK(0.0);
        let spec = SweepConfig { variable: SweepVariable::K, values: vec![0.0, 1.0] };
        // K = 1 with no LOS cannot be normalized
        assert!(matches!(
            sweep(&c, &spec, &SolverOptions::default(), None),
            Err(CliError::Config(_))
        ));
        let xi = SweepConfig { variable: SweepVariable::Xi, values: vec![1.0] };
        assert!(matches!(
            sweep(&c, &xi, &SolverOptions::default(), None),
            Err(CliError::Config(_))
        ));
    }

    #[test]
    fn sweep_records_numerical_failures() {
        let spec = SweepConfig { variable: SweepVariable::RhoDb, values: vec![0.0, 10.0] };
        let starved = SolverOptions { max_iter: 2, ..SolverOptions::default() };
        let rows = sweep(&cfg(), &spec, &starved, None).unwrap();
        assert_eq!(rows.len(), 2);
        assert!(rows.iter().all(|r| r.status == "error" && r.error.is_some()));
        let rows = sweep(&cfg(), &spec, &SolverOptions::default(), None).unwrap();
        assert!(rows.iter().all(|r| r.status == "ok"));
        assert!(rows[1].mi_nats.unwrap() > rows[0].mi_nats.unwrap());
    }

    #[test]
    fn window_sweep_runs_monte_carlo() {
        let spec = SweepConfig { variable: SweepVariable::M, values: vec![1.0, 5.0] };
        let plan = McPlan { window: 1, trials: 20, seed: 3 };
        let rows = sweep(&cfg(), &spec, &SolverOptions::default(), Some(plan)).unwrap();
        assert_eq!(rows[0].mc_window, Some(1));
        assert_eq!(rows[1].mc_window, Some(5));
        assert!(rows.iter().all(|r| r.rel_gap.is_some()));
        assert!(sweep(&cfg(), &spec, &SolverOptions::default(), None).is_err());
    }

    #[test]
    fn zero_tolerance_always_fails() {
        let v = validate(&cfg(), &[3], 10, 1, 0.0, &SolverOptions::default()).unwrap();
        assert!(!v[0].passed);
        assert_eq!(v[0].row.status, "fail");
        let v = validate(&cfg(), &[3], 10, 1, 10.0, &SolverOptions::default()).unwrap();
        assert!(v[0].passed);
        assert!(validate(&cfg(), &[4], 10, 1, 0.1, &SolverOptions::default()).is_err());
    }
}
