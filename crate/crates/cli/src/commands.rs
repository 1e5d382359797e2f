//! Subcommand implementations; each returns the text written to stdout.

use std::f64::consts::PI;
use std::fmt::Write as _;

use log::info;
use meanmotion::bessel::{j0_eval, j1_eval, jp_integral_oracle};
use meanmotion::mean_motion::{empirical_mean_motion_series, mean_motion_with, MeanMotionResult};
use meanmotion::spectral::{
    controllability_check, eigen_decompose, extract_oscillator_sum, LinearSystem, DEFAULT_TOL_RANK, DEFAULT_TOL_SPEC,
};
use meanmotion::switching::{bound_from_count, count_zeros, simulate_bang_bang, DEFAULT_BOUND_ALLOWANCE};
use meanmotion::torus_volume::{
    torus_volume, w1_step, w2_closed_form, w_bww, w_monte_carlo, AmplitudeSet, QuadratureConfig, TorusVolumeResult,
};
use meanmotion::OscillatorSum;
use serde::Serialize;

use crate::input::{Problem, ProblemSpecFile, RunConfig};
use crate::report::{
    oscillator_summary, AnalysisReport, EmpiricalEntry, MeanMotionSummary, SpectrumSummary, ZeroSummary,
};
use crate::{AnalyzeArgs, BesselArgs, CliError, ConvergenceArgs, Format, Method, SimulateArgs, Spacing, WvolumeArgs, ZerosArgs};

fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::validation(format!("output: {e}")))?;
    text.push('\n');
    Ok(text)
}

fn no_csv(format: Format) -> Result<(), CliError> {
    if format == Format::Csv {
        return Err(CliError::validation("csv output is only available for `convergence`"));
    }
    Ok(())
}

fn positive(name: &str, value: f64) -> Result<(), CliError> {
    if !(value > 0.0 && value.is_finite()) {
        return Err(CliError::validation(format!("{name} must be positive and finite, got {value}")));
    }
    Ok(())
}

fn quadrature_config(cfg: &RunConfig, tol: Option<f64>) -> QuadratureConfig {
    let mut q = cfg.quadrature;
    if let Some(t) = tol {
        q.tol = t;
    }
    q
}

/// Oscillator sum of the problem plus spectrum details for system input.
fn resolve(problem: &Problem) -> Result<(OscillatorSum, Option<SpectrumSummary>), CliError> {
    match problem {
        Problem::Oscillators(sum) => Ok((sum.clone(), None)),
        Problem::System(sys) => {
            let spec = eigen_decompose(sys.a(), DEFAULT_TOL_SPEC).map_err(|e| CliError::core("spectral", e))?;
            let ctrl = controllability_check(sys, DEFAULT_TOL_RANK);
            let sum = extract_oscillator_sum(sys, DEFAULT_TOL_SPEC).map_err(|e| CliError::core("spectral", e))?;
            Ok((sum, Some(SpectrumSummary::new(spec, ctrl))))
        }
    }
}

fn volume(
    method: Method,
    r: f64,
    amps: &AmplitudeSet,
    quad: &QuadratureConfig,
    samples: u64,
    seed: Option<u64>,
) -> meanmotion::Result<TorusVolumeResult> {
    match (method, amps.as_slice()) {
        (Method::Auto, _) => torus_volume(r, amps, quad),
        (Method::Closed | Method::Bww, [a]) => w1_step(r, *a),
        (Method::Closed, [a1, a2]) => w2_closed_form(r, *a1, *a2),
        (Method::Closed, _) => Err(meanmotion::Error::Inapplicable(format!(
            "closed forms cover at most two amplitudes, got {}",
            amps.len()
        ))),
        (Method::Bww, _) => w_bww(r, amps, quad),
        (Method::Mc, _) => {
            let seed = seed.ok_or_else(|| meanmotion::Error::InvalidInput("--seed is required with --method mc".into()))?;
            w_monte_carlo(r, amps, samples, seed)
        }
    }
}

fn formula(
    sum: &OscillatorSum,
    method: Method,
    quad: &QuadratureConfig,
    cfg: &RunConfig,
    seed: Option<u64>,
) -> Result<MeanMotionResult, CliError> {
    if method == Method::Mc && seed.is_none() {
        return Err(CliError::validation("--seed is required with --method mc"));
    }
    mean_motion_with(sum, |r, others| volume(method, r, others, quad, cfg.mc.samples, seed))
        .map_err(|e| CliError::core("mean_motion", e))
}

pub fn analyze(args: &AnalyzeArgs) -> Result<String, CliError> {
    no_csv(args.format)?;
    positive("--T", args.horizon)?;
    let file = ProblemSpecFile::read(&args.input)?;
    let (sum, spectrum) = resolve(&file.problem()?)?;
    let quad = quadrature_config(&file.config, args.tol);

    let mm = formula(&sum, args.method, &quad, &file.config, args.seed)?;
    info!("omega = {} ± {}", mm.omega, mm.omega_error);
    let zeros = count_zeros(&sum, args.horizon, &file.config.zero).map_err(|e| CliError::core("switching", e))?;
    let bound = bound_from_count(zeros.count, args.horizon, mm.omega, DEFAULT_BOUND_ALLOWANCE);

    let mut horizons = if args.horizons.is_empty() {
        vec![args.horizon]
    } else {
        args.horizons.clone()
    };
    horizons.sort_by(f64::total_cmp);
    let series = empirical_mean_motion_series(&sum, &horizons, &file.config.unwrap)
        .map_err(|e| CliError::core("mean_motion", e))?;
    let empirical = horizons
        .iter()
        .zip(series)
        .map(|(&horizon, e)| EmpiricalEntry {
            horizon,
            omega_hat: e.omega_hat,
            min_abs_z: e.min_abs_z,
            samples: e.samples,
        })
        .collect();

    let report = AnalysisReport {
        spectrum,
        oscillators: oscillator_summary(&sum),
        resonance: mm.resonance.clone(),
        mean_motion: MeanMotionSummary::from(&mm),
        zeros: ZeroSummary::new(args.horizon, &zeros, bound),
        empirical,
    };
    match args.format {
        Format::Table => Ok(report.to_table()),
        _ => to_json(&report),
    }
}

#[derive(Serialize)]
struct ConvergenceRow {
    #[serde(rename = "T")]
    horizon: f64,
    omega_hat: f64,
    omega_formula: f64,
    zeros: usize,
    zero_density_times_pi: f64,
}

pub fn convergence(args: &ConvergenceArgs) -> Result<String, CliError> {
    positive("--T-max", args.t_max)?;
    if args.points < 2 {
        return Err(CliError::validation(format!("--points must be at least 2, got {}", args.points)));
    }
    let t_min = args.t_min.unwrap_or(args.t_max / args.points as f64);
    positive("--T-min", t_min)?;
    if t_min > args.t_max {
        return Err(CliError::validation("--T-min must not exceed --T-max"));
    }
    let last = (args.points - 1) as f64;
    let horizons: Vec<f64> = (0..args.points)
        .map(|i| {
            let s = i as f64 / last;
            match args.spacing {
                Spacing::Linear => t_min + (args.t_max - t_min) * s,
                Spacing::Log => t_min * (args.t_max / t_min).powf(s),
            }
        })
        .collect();

    let file = ProblemSpecFile::read(&args.input)?;
    let (sum, _) = resolve(&file.problem()?)?;
    let quad = quadrature_config(&file.config, args.tol);
    let omega = formula(&sum, Method::Auto, &quad, &file.config, None)?.omega;
    let series = empirical_mean_motion_series(&sum, &horizons, &file.config.unwrap)
        .map_err(|e| CliError::core("mean_motion", e))?;

    let mut rows = Vec::with_capacity(horizons.len());
    for (&horizon, e) in horizons.iter().zip(&series) {
        let n = count_zeros(&sum, horizon, &file.config.zero)
            .map_err(|e| CliError::core("switching", e))?
            .count;
        rows.push(ConvergenceRow {
            horizon,
            omega_hat: e.omega_hat,
            omega_formula: omega,
            zeros: n,
            zero_density_times_pi: n as f64 * PI / horizon,
        });
    }
    if let Some(last) = rows.last() {
        eprintln!(
            "final |omega_hat - omega_formula| = {:e} at T = {}",
            (last.omega_hat - last.omega_formula).abs(),
            last.horizon
        );
    }

    match args.format {
        Format::Json => to_json(&rows),
        Format::Table => {
            let mut out = format!("{:>12} {:>14} {:>14} {:>8} {:>12}\n", "T", "omega_hat", "omega", "N", "N*pi/T");
            for r in &rows {
                let _ = writeln!(
                    out,
                    "{:>12.4} {:>14.8} {:>14.8} {:>8} {:>12.6}",
                    r.horizon, r.omega_hat, r.omega_formula, r.zeros, r.zero_density_times_pi
                );
            }
            Ok(out)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in &rows {
                w.serialize(r).map_err(|e| CliError::validation(format!("output: {e}")))?;
            }
            let bytes = w.into_inner().map_err(|e| CliError::validation(format!("output: {e}")))?;
            String::from_utf8(bytes).map_err(|e| CliError::validation(format!("output: {e}")))
        }
    }
}

pub fn wvolume(args: &WvolumeArgs) -> Result<String, CliError> {
    no_csv(args.format)?;
    let amps = AmplitudeSet::new(args.amps.clone()).map_err(|e| CliError::core("torus_volume", e))?;
    let mut quad = QuadratureConfig::default();
    if let Some(t) = args.tol {
        quad.tol = t;
    }
    quad.validate().map_err(|e| CliError::core("torus_volume", e))?;
    let res = volume(args.method, args.r, &amps, &quad, args.samples, args.seed)
        .map_err(|e| CliError::core("torus_volume", e))?;
    match args.format {
        Format::Table => Ok(format!("{:.12} ± {:.2e} ({:?})\n", res.value, res.error_estimate, res.method)),
        _ => to_json(&res),
    }
}

#[derive(Serialize)]
struct ZerosOutput {
    #[serde(rename = "T")]
    horizon: f64,
    count: usize,
    zeros: Vec<f64>,
    suspect_tangencies: Vec<f64>,
    grid_step: f64,
}

pub fn zeros(args: &ZerosArgs) -> Result<String, CliError> {
    no_csv(args.format)?;
    positive("--T", args.horizon)?;
    let sum = match &args.input {
        Some(path) => resolve(&ProblemSpecFile::read(path)?.problem()?)?.0,
        None if args.freqs.is_empty() => {
            return Err(CliError::validation("give either --input or --freqs with --amps"));
        }
        None => OscillatorSum::from_real(&args.amps, &args.freqs).map_err(|e| CliError::core("input", e))?,
    };
    let cfg = match &args.input {
        Some(path) => ProblemSpecFile::read(path)?.config.zero,
        None => Default::default(),
    };
    let res = count_zeros(&sum, args.horizon, &cfg).map_err(|e| CliError::core("switching", e))?;
    let out = ZerosOutput {
        horizon: args.horizon,
        count: res.count,
        zeros: res.zeros,
        suspect_tangencies: res.suspect_tangencies,
        grid_step: res.grid_step,
    };
    match args.format {
        Format::Table => {
            let mut text = format!("N({}) = {}\n", out.horizon, out.count);
            for z in &out.zeros {
                let _ = writeln!(text, "{z:.12}");
            }
            if !out.suspect_tangencies.is_empty() {
                let _ = writeln!(text, "suspect tangencies: {:?}", out.suspect_tangencies);
            }
            Ok(text)
        }
        _ => to_json(&out),
    }
}

#[derive(Serialize)]
struct BesselOutput {
    order: u32,
    x: f64,
    value: f64,
    abs_error_estimate: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle: Option<f64>,
}

pub fn bessel(args: &BesselArgs) -> Result<String, CliError> {
    no_csv(args.format)?;
    if !args.x.is_finite() {
        return Err(CliError::validation("--x must be finite"));
    }
    let eval = if args.order == 0 { j0_eval(args.x) } else { j1_eval(args.x) };
    let oracle = if args.oracle {
        Some(jp_integral_oracle(f64::from(args.order), args.x).map_err(|e| CliError::core("bessel", e))?)
    } else {
        None
    };
    let out = BesselOutput {
        order: args.order,
        x: args.x,
        value: eval.value,
        abs_error_estimate: eval.abs_error_estimate,
        oracle,
    };
    match args.format {
        Format::Table => {
            let mut text = format!("J{}({}) = {:.16e} ± {:.1e}\n", out.order, out.x, out.value, out.abs_error_estimate);
            if let Some(o) = out.oracle {
                let _ = writeln!(text, "oracle     = {o:.16e}");
            }
            Ok(text)
        }
        _ => to_json(&out),
    }
}

#[derive(Serialize)]
struct SimulateOutput {
    #[serde(rename = "T")]
    horizon: f64,
    h: f64,
    switch_times: Vec<f64>,
    control_flips: usize,
    points: Vec<meanmotion::switching::TrajectoryPoint>,
}

fn system_of(problem: Problem) -> Result<LinearSystem, CliError> {
    match problem {
        Problem::System(sys) => Ok(sys),
        Problem::Oscillators(_) => Err(CliError::validation(
            "simulate needs a \"system\" or \"blocks\" input; an oscillator list has no state space",
        )),
    }
}

pub fn simulate(args: &SimulateArgs) -> Result<String, CliError> {
    no_csv(args.format)?;
    positive("--T", args.horizon)?;
    if args.stride == 0 {
        return Err(CliError::validation("--stride must be at least 1"));
    }
    let sys = system_of(ProblemSpecFile::read(&args.input)?.problem()?)?;
    let h = match args.h {
        Some(h) => h,
        None => {
            let sum = extract_oscillator_sum(&sys, DEFAULT_TOL_SPEC).map_err(|e| CliError::core("spectral", e))?;
            0.01 / sum.max_abs_frequency()
        }
    };
    let x0 = if args.x0.is_empty() {
        vec![0.0; sys.dim()]
    } else {
        args.x0.clone()
    };
    let traj = simulate_bang_bang(&sys, &x0, args.horizon, h).map_err(|e| CliError::core("switching", e))?;
    let flips = traj.control_flips();
    let last = traj.points.len() - 1;
    let points = traj
        .points
        .into_iter()
        .enumerate()
        .filter(|(i, _)| i % args.stride == 0 || *i == last)
        .map(|(_, p)| p)
        .collect();
    let out = SimulateOutput {
        horizon: args.horizon,
        h,
        switch_times: traj.switch_times,
        control_flips: flips,
        points,
    };
    match args.format {
        Format::Table => {
            let mut text = format!(
                "{} switches, {} control flips\n{:>12} {:>3}  state\n",
                out.switch_times.len(),
                out.control_flips,
                "t",
                "u"
            );
            for p in &out.points {
                let state: Vec<String> = p.state.iter().map(|v| format!("{v:.8}")).collect();
                let _ = writeln!(text, "{:>12.6} {:>3}  {}", p.t, p.u, state.join(" "));
            }
            Ok(text)
        }
        _ => to_json(&out),
    }
}
