//! Oracle, property and reproduction checks behind `deqmi selftest` and the
//! acceptance suite. Each check reports pass/fail with a one-line summary.

use std::time::{Duration, Instant};

use deqmi::channel::{ChannelModel, DopplerModel, FrequencyGrid, LosTaps, PowerProfile};
use deqmi::deq::{check_stieltjes_properties, contraction_region_lhs, solve, SolverOptions};
use deqmi::montecarlo::{trial_rng, FieldGenerator};
use deqmi::mutual_info::{
    deq_mutual_information, deterministic_only_mutual_info, mp_stieltjes,
    mutual_info_via_quadrature, MpLaw,
};
use deqmi::C64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use rayon::prelude::*;

use crate::config::{
    DopplerConfig, LosConfig, ModelConfig, ProfileConfig, RiceanK, SnrConfig, SweepConfig,
    SweepVariable,
};
use crate::error::CliError;
use crate::run::{estimate_parallel, sweep, McPlan};

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl CheckResult {
    pub fn line(&self) -> String {
        format!(
            "{} {:<22} {} [{:.1}s]",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.detail,
            self.elapsed.as_secs_f64()
        )
    }
}

type Check = fn() -> Result<(bool, String), CliError>;

pub const CHECKS: &[(&str, Check)] = &[
    ("marchenko-pastur", marchenko_pastur),
    ("deterministic-channel", deterministic_channel),
    ("contraction", contraction),
    ("stieltjes-properties", stieltjes_properties),
    ("method-agreement", method_agreement),
    ("window-reproduction", window_reproduction),
    ("k-xi-trends", trends),
    ("field-statistics", field_statistics),
];

/// Runs one check; solver and configuration errors count as failures.
pub fn run_check(name: &'static str, check: Check) -> CheckResult {
    let start = Instant::now();
    let (passed, detail) = match check() {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e}")),
    };
    CheckResult {
        name,
        passed,
        detail,
        elapsed: start.elapsed(),
    }
}

fn within_budget(start: Instant, seconds: f64) -> (bool, f64) {
    let t = start.elapsed().as_secs_f64();
    (t < seconds, t)
}

fn base_config(n_rx: usize, n_tx: usize, lag_span: usize) -> ModelConfig {
    ModelConfig {
        schema: crate::config::SCHEMA_VERSION,
        n_rx,
        n_tx,
        lag_span,
        grid_size: 256,
        doppler: DopplerConfig::Exponential { f_d: 1.0, horizon: None },
        profile: ProfileConfig::Uniform,
        los: LosConfig::Steering { xi: 1.0 },
        snr: SnrConfig { rho: None, rho_db: Some(10.0), k: RiceanK(1.0) },
        sweep: None,
        montecarlo: None,
    }
}

/// Pure Rayleigh (`A = 0`, `σ² = 1`) against the closed-form law.
pub fn marchenko_pastur() -> Result<(bool, String), CliError> {
    let start = Instant::now();
    let grid = FrequencyGrid::new(256)?;
    let dopplers = [
        DopplerModel::delta(&grid),
        DopplerModel::exponential(1.0, &grid, None)?,
        DopplerModel::jakes(0.2, None, &grid)?,
    ];
    let opts = SolverOptions::default();
    let (mut spread, mut alpha_err, mut mi_err) = (0.0f64, 0.0f64, 0.0f64);
    for (n, t) in [(2, 4), (4, 4), (4, 2)] {
        let c = n as f64 / t as f64;
        let (alpha, alpha_t) = mp_stieltjes(1.0, c, C64::new(-1.0, 0.0))?;
        let law = MpLaw::new(1.0, c)?.mutual_information()?;
        for d in &dopplers {
            let model = ChannelModel::new(
                d.clone(),
                PowerProfile::from_taps(vec![1.0])?,
                LosTaps::zero(n, t, 0)?,
                grid,
            )?;
            let r = deq_mutual_information(&model, &opts)?;
            let s = &r.state;
            for (p, pt) in s.phi.iter().zip(&s.phi_tilde) {
                spread = spread.max((p - s.phi[0]).norm()).max((pt - s.phi_tilde[0]).norm());
                alpha_err = alpha_err.max((p - alpha).norm()).max((pt - alpha_t).norm());
            }
            mi_err = mi_err.max((r.total - law).abs());
        }
    }
    let (fast, secs) = within_budget(start, 5.0);
    let passed = spread <= 1e-10 && alpha_err <= 1e-8 && mi_err <= 1e-6 && fast;
    Ok((
        passed,
        format!(
            "9 models: phi spread {spread:.1e} (<=1e-10), |phi-alpha| {alpha_err:.1e} (<=1e-8), |I-I_MP| {mi_err:.1e} (<=1e-6), {secs:.2}s (<5s)"
        ),
    ))
}

/// Pure line-of-sight channel: the closed form and a long simulated window.
pub fn deterministic_channel() -> Result<(bool, String), CliError> {
    let start = Instant::now();
    let mut cfg = base_config(4, 4, 2);
    cfg.snr.k = RiceanK(f64::INFINITY);
    cfg.doppler = DopplerConfig::Delta;
    let model = cfg.build()?;
    let deq = deq_mutual_information(&model, &SolverOptions::default())?.total;
    let exact = deterministic_only_mutual_info(&model)?;
    let plan = McPlan { window: 201, trials: 2, seed: 1 };
    let mc = estimate_parallel(&model, &plan.config())?;
    let rel = (mc.mean - exact).abs() / exact;
    let (fast, secs) = within_budget(start, 30.0);
    let err = (deq - exact).abs();
    let passed = err <= 1e-10 && rel <= 0.01 && mc.stderr == 0.0 && fast;
    Ok((
        passed,
        format!(
            "I {deq:.8}, |I-logdet| {err:.1e} (<=1e-10); MC M=201 {:.6}, rel gap {:.3}% (<=1%), {secs:.1}s (<30s)",
            mc.mean,
            100.0 * rel
        ),
    ))
}

/// Residual ratios at points sampled inside the contraction region.
pub fn contraction() -> Result<(bool, String), CliError> {
    let mut models = Vec::new();
    for (n, t, l, rho, k) in [(2, 2, 1, 1.0, 1.0), (3, 2, 2, 0.5, 3.0), (2, 4, 1, 2.0, 0.0)] {
        let mut cfg = base_config(n, t, l);
        cfg.snr = SnrConfig { rho: Some(rho), rho_db: None, k: RiceanK(k) };
        if k == 0.0 {
            cfg.los = LosConfig::None;
        }
        models.push(cfg.build()?);
    }
    let opts = SolverOptions::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut worst, mut sampled, mut ratios) = (0.0f64, 0, 0);
    while sampled < 20 {
        let model = &models[sampled % models.len()];
        let z = C64::new(rng.gen_range(-6.0..6.0), rng.gen_range(0.5..12.0));
        if contraction_region_lhs(model, z) >= 0.5 {
            continue;
        }
        let (_, diag) = solve(model, z, &opts)?;
        ratios += diag.contraction_estimates.len();
        worst = diag.contraction_estimates.iter().copied().fold(worst, f64::max);
        sampled += 1;
    }
    let passed = worst <= 0.5 + 1e-9 && ratios > 0;
    Ok((
        passed,
        format!("20 z in region, {ratios} ratios, max {worst:.4} (<=0.5+1e-9)"),
    ))
}

fn random_config(rng: &mut ChaCha8Rng) -> ModelConfig {
    let mut cfg = base_config(rng.gen_range(1..=4), rng.gen_range(1..=4), rng.gen_range(0..=2));
    cfg.grid_size = 64;
    cfg.doppler = match rng.gen_range(0..3) {
        0 => DopplerConfig::Delta,
        1 => DopplerConfig::Exponential { f_d: rng.gen_range(0.1..3.0), horizon: None },
        _ => DopplerConfig::Jakes { f_d: rng.gen_range(0.05..0.45), reg: None },
    };
    if rng.gen_bool(0.5) {
        cfg.profile = ProfileConfig::Exponential { decay: rng.gen_range(0.3..3.0) };
    }
    let k = if rng.gen_bool(0.2) {
        cfg.los = LosConfig::None;
        0.0
    } else {
        cfg.los = LosConfig::Steering { xi: rng.gen_range(0.0..3.0) };
        rng.gen_range(0.0..10.0)
    };
    // |-iy p(iy) - 1| ~ rho / y, so the y = 100 tightness bound needs rho < 5
    cfg.snr = SnrConfig { rho: Some(rng.gen_range(0.1..4.0)), rho_db: None, k: RiceanK(k) };
    cfg
}

/// Stieltjes-transform properties on random models.
pub fn stieltjes_properties() -> Result<(bool, String), CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let points = [C64::new(0.0, 1.0), C64::new(1.0, 2.0), C64::new(-3.0, 0.5)];
    let ladder = [1.0, 10.0, 100.0];
    let opts = SolverOptions::default();
    let (mut failures, mut worst_dev, mut max_rho) = (0, 0.0f64, 0.0f64);
    for _ in 0..10 {
        let cfg = random_config(&mut rng);
        max_rho = max_rho.max(cfg.rho());
        let model = cfg.build()?;
        let report = check_stieltjes_properties(&model, &points, &ladder, &opts)?;
        failures += report.points.iter().filter(|p| !p.passed()).count();
        let dev = report.ladder.last().map_or(f64::INFINITY, |l| l.deviation);
        worst_dev = worst_dev.max(dev);
    }
    let passed = failures == 0 && worst_dev < 0.05;
    Ok((
        passed,
        format!(
            "10 models (rho <= {max_rho:.2}) x 3 z: {failures} sign/bound failures; max |-iy p(iy) - 1| at y=100 {worst_dev:.2e} (<0.05)"
        ),
    ))
}

/// Closed-form mutual information against the Stieltjes-transform integral.
pub fn method_agreement() -> Result<(bool, String), CliError> {
    let mut configs = Vec::new();
    let mut mp = base_config(3, 3, 0);
    mp.los = LosConfig::None;
    mp.doppler = DopplerConfig::Delta;
    mp.snr = SnrConfig { rho: Some(1.0), rho_db: None, k: RiceanK(0.0) };
    configs.push(mp);
    configs.push(base_config(2, 2, 2));
    let mut c = base_config(4, 2, 1);
    c.doppler = DopplerConfig::Jakes { f_d: 0.2, reg: None };
    c.snr.k = RiceanK(3.0);
    configs.push(c);
    let mut c = base_config(2, 4, 1);
    c.snr = SnrConfig { rho: Some(2.0), rho_db: None, k: RiceanK(0.5) };
    c.profile = ProfileConfig::Exponential { decay: 1.0 };
    configs.push(c);
    let mut c = base_config(3, 3, 2);
    c.doppler = DopplerConfig::Delta;
    c.snr.k = RiceanK(f64::INFINITY);
    configs.push(c);
    let mut c = base_config(2, 3, 3);
    c.los = LosConfig::Steering { xi: 2.0 };
    c.snr.rho_db = Some(0.0);
    configs.push(c);

    let opts = SolverOptions::default();
    let mut worst = f64::NEG_INFINITY;
    for cfg in &configs {
        let model = cfg.build()?;
        let deq = deq_mutual_information(&model, &opts)?.total;
        let (lo, hi) = mutual_info_via_quadrature(&model, 1e4, 64, &opts)?.interval();
        // distance outside the interval, negative when inside
        worst = worst.max((lo - deq).max(deq - hi));
    }
    let passed = worst <= 1e-4;
    Ok((
        passed,
        format!("6 models: worst excursion outside tail interval {worst:.2e} (<=1e-4)"),
    ))
}

/// Small-array Monte Carlo agreement at `M = 41` and the window effect.
pub fn window_reproduction() -> Result<(bool, String), CliError> {
    let start = Instant::now();
    let opts = SolverOptions::default();
    let mut parts = Vec::new();
    let mut passed = true;
    for f_d in [0.1, 1.0] {
        let mut cfg = base_config(2, 2, 2);
        cfg.doppler = DopplerConfig::Exponential { f_d, horizon: None };
        let model = cfg.build()?;
        let deq = deq_mutual_information(&model, &opts)?.total;
        let gap = |window: usize| -> Result<f64, CliError> {
            let plan = McPlan { window, trials: 2000, seed: 41 };
            let e = estimate_parallel(&model, &plan.config())?;
            Ok((e.mean - deq).abs() / deq)
        };
        let g41 = gap(41)?;
        passed &= g41 <= 0.02;
        parts.push(format!("f_d={f_d}: M=41 gap {:.2}%", 100.0 * g41));
        if f_d == 0.1 {
            let g5 = gap(5)?;
            passed &= g5 > g41;
            parts.push(format!("M=5 gap {:.2}% (> M=41)", 100.0 * g5));
        }
    }
    let (fast, secs) = within_budget(start, 300.0);
    passed &= fast;
    Ok((passed, format!("{} (<=2%), {secs:.1}s (<300s)", parts.join(", "))))
}

fn sweep_values(cfg: &ModelConfig, variable: SweepVariable, values: &[f64]) -> Result<Vec<f64>, CliError> {
    let spec = SweepConfig { variable, values: values.to_vec() };
    sweep(cfg, &spec, &SolverOptions::default(), None)?
        .into_iter()
        .map(|row| {
            row.mi_nats
                .ok_or_else(|| CliError::Config(row.error.unwrap_or_default()))
        })
        .collect()
}

/// Configuration of the K-sweep trend check: a 3 x 2 array with a
/// seven-tap line-of-sight channel.
pub fn k_sweep_config() -> ModelConfig {
    let mut cfg = base_config(3, 2, 3);
    cfg.los = LosConfig::Steering { xi: 2.0 };
    cfg
}

/// Configuration of the xi-sweep trend check.
pub fn xi_sweep_config() -> ModelConfig {
    let mut cfg = base_config(4, 4, 1);
    cfg.snr.k = RiceanK(3.0);
    cfg
}

/// Ordinal trends of the K and xi sweeps.
pub fn trends() -> Result<(bool, String), CliError> {
    let ks = [0.0, 1.0, 3.0, 10.0, 100.0];
    let k_vals = sweep_values(&k_sweep_config(), SweepVariable::K, &ks)?;
    let argmax = (0..k_vals.len())
        .max_by(|&a, &b| k_vals[a].total_cmp(&k_vals[b]))
        .unwrap_or(0);
    let interior = argmax > 0 && argmax < k_vals.len() - 1;

    let xis = [0.5, 1.0, 2.0, 4.0];
    let xi_vals = sweep_values(&xi_sweep_config(), SweepVariable::Xi, &xis)?;
    let decreasing = xi_vals.windows(2).all(|w| w[1] < w[0]);

    let fmt = |v: &[f64]| v.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>().join(" ");
    Ok((
        interior && decreasing,
        format!(
            "K sweep [{}] max at K={} (interior: {interior}); xi sweep [{}] strictly decreasing: {decreasing}",
            fmt(&k_vals),
            ks[argmax],
            fmt(&xi_vals)
        ),
    ))
}

struct Moment {
    mean: C64,
    se_re: f64,
    se_im: f64,
}

impl Moment {
    fn of(samples: &[C64]) -> Self {
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<C64>() / n;
        let var = |f: fn(&C64) -> f64, m: f64| {
            samples.iter().map(|x| (f(x) - m).powi(2)).sum::<f64>() / (n - 1.0)
        };
        Moment {
            mean,
            se_re: (var(|x| x.re, mean.re) / n).sqrt(),
            se_im: (var(|x| x.im, mean.im) / n).sqrt(),
        }
    }

    /// Within three standard errors of `target`, per component.
    fn matches(&self, target: C64) -> bool {
        (self.mean.re - target.re).abs() <= 3.0 * self.se_re
            && (self.mean.im - target.im).abs() <= 3.0 * self.se_im
    }
}

/// Pooled second moments of generated sequences.
pub fn field_statistics() -> Result<(bool, String), CliError> {
    let start = Instant::now();
    const SEQUENCES: usize = 10_000;
    const WINDOW: usize = 11;
    let grid = FrequencyGrid::new(256)?;
    let mut passed = true;
    let mut parts = Vec::new();
    for (label, doppler, seed) in [
        ("white", DopplerModel::delta(&grid), 100u64),
        ("exp(f_d=1)", DopplerModel::exponential(1.0, &grid, None)?, 200),
    ] {
        let gen = FieldGenerator::new(&doppler, WINDOW)?;
        let seqs: Vec<Vec<C64>> = (0..SEQUENCES)
            .into_par_iter()
            .map(|i| gen.sample(&mut trial_rng(seed, i)))
            .collect();
        let mut ok = 0;
        for k in 0..=5usize {
            // one product per sequence keeps the samples independent
            let cov: Vec<C64> = seqs.iter().map(|x| x[k] * x[0].conj()).collect();
            let pseudo: Vec<C64> = seqs.iter().map(|x| x[k] * x[0]).collect();
            let target = C64::new(doppler.gamma(k as i64), 0.0);
            if Moment::of(&cov).matches(target) && Moment::of(&pseudo).matches(C64::new(0.0, 0.0)) {
                ok += 1;
            }
        }
        passed &= ok == 6;
        parts.push(format!("{label}: {ok}/6 lags"));
    }
    let (fast, secs) = within_budget(start, 30.0);
    passed &= fast;
    Ok((
        passed,
        format!(
            "{SEQUENCES} sequences, autocovariance and circularity at 3 SE: {}, {secs:.1}s (<30s)",
            parts.join(", ")
        ),
    ))
}

/// Runs the named checks, or all when `only` is empty.
pub fn run_all(only: &[String]) -> Vec<CheckResult> {
    CHECKS
        .iter()
        .filter(|(name, _)| only.is_empty() || only.iter().any(|o| o == name))
        .map(|&(name, check)| run_check(name, check))
        .collect()
}
