//! Command-line interface.

use std::f64::consts::FRAC_PI_2;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Args, CommandFactory, Parser, Subcommand, ValueEnum};
use qwalk_core::asymptotics::{empirical_density_compare_binned, parity_smoothed_density, WeakLimitDensity};
use qwalk_core::classical::{
    classical_limit_evolve, combined_density, combined_density_diffusion_check, diffusion_evolve, persistent_evolve,
    persistent_two_step_check, PersistentParams,
};
use qwalk_core::ctqw::{chiral_decompose, ctqw_evolve, limit_pair_evolve, CtqwParams};
use qwalk_core::dtqw::{dtqw_densities, dtqw_evolve, dtqw_evolve_momentum, initial_symmetric_entangled, DtqwParams};
use qwalk_core::highdim::{
    ctqw3d_evolve, effective_generator_3d, footnote_hamiltonian_3d, propagator_3d, zeroth_order_defect, FootnoteHamiltonian3D,
    Ordering, Scalar3DField,
};
use qwalk_core::lattice::WindowGuard;
use qwalk_core::limit::{bch_scan, coinless_propagator, coinless_spectral_equivalence, convergence_scan, scan_guard};
use qwalk_core::pauli::{eigenphases, hermitian_eigenvalues};
use qwalk_core::{ChiralProbability, Complex64, ProbabilityField, ScalarWaveField, SpinorField};
use serde_json::{json, Value};

use crate::config::merge_config_args;
use crate::error::{LabError, LabResult};
use crate::figure1::{run_figure1, Figure1Config};
use crate::io::{self, fmt_real, Surface};
use crate::report::Report;
use crate::svg::heatmap;

#[derive(Debug, Parser)]
#[command(name = "qwalk", version, about = "Lattice walk experiments", args_override_self = true)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Treat a lattice too small for the run as an error (exit code 2).
    #[arg(long, global = true)]
    pub strict: bool,
    /// Output file (a directory for `figure1`); standard output when absent.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// key = value file with default flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Clone, Args)]
#[command(group(ArgGroup::new("coin").args(["theta", "cos_theta"]).required(true)))]
pub struct Coin {
    #[arg(long, allow_negative_numbers = true)]
    pub theta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub cos_theta: Option<f64>,
}

impl Coin {
    pub fn theta(&self) -> LabResult<f64> {
        match (self.theta, self.cos_theta) {
            (Some(t), None) => Ok(t),
            (None, Some(c)) if (0.0..=1.0).contains(&c) => Ok(c.acos()),
            (None, Some(c)) => Err(LabError::Usage(format!("cos-theta must lie in [0, 1], got {c}"))),
            _ => Err(LabError::Usage("give exactly one of --theta and --cos-theta".into())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Real,
    Momentum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum System {
    /// Scalar walk on the line.
    Scalar,
    /// Two-component limit system of the coined walk.
    Pair,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ClassicalMode {
    Persistent,
    Limit,
    Diffusion,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WalkKind {
    Ctqw,
    Dtqw,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Walk3dMode {
    Defect,
    Propagator,
    Footnote,
    Generator,
    Evolve,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OrderingArg {
    Naive,
    Symmetric,
}

impl From<OrderingArg> for Ordering {
    fn from(o: OrderingArg) -> Self {
        match o {
            OrderingArg::Naive => Ordering::Naive,
            OrderingArg::Symmetric => Ordering::Symmetric,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Coined walk on a ring.
    Dtqw {
        #[command(flatten)]
        coin: Coin,
        #[arg(long)]
        steps: usize,
        #[arg(long, default_value_t = 256)]
        n_sites: usize,
        /// `delta`, `symmetric-entangled` or a spinor CSV file.
        #[arg(long, default_value = "symmetric-entangled")]
        initial: String,
        #[arg(long, value_enum, default_value_t = Method::Real)]
        method: Method,
    },
    /// Continuous-time walk, scalar or two-component limit system.
    Ctqw {
        #[arg(long)]
        gamma: f64,
        #[arg(long)]
        time: f64,
        #[arg(long, default_value_t = 256)]
        n_sites: usize,
        /// `delta`, `symmetric-entangled` (pair only) or a state CSV file.
        #[arg(long, default_value = "delta")]
        initial: String,
        #[arg(long, value_enum, default_value_t = System::Scalar)]
        system: System,
    },
    /// Distance between the coined walk and its limit system as δ shrinks.
    LimitScan {
        #[arg(long)]
        gamma: f64,
        #[arg(long)]
        time: f64,
        #[arg(long, value_delimiter = ',', required = true)]
        tau: Vec<usize>,
        #[arg(long, default_value_t = 128)]
        n_sites: usize,
        #[arg(long, default_value = "symmetric-entangled")]
        initial: String,
    },
    /// Second-order residual of the two-step expansion.
    BchScan {
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.05,0.025,0.0125")]
        delta: Vec<f64>,
        #[arg(long, default_value_t = 32)]
        k_points: usize,
    },
    /// Persistent random walk, its continuous-time limit and lattice diffusion.
    Classical {
        #[arg(long, value_enum)]
        mode: ClassicalMode,
        /// Persistence probability; alternatively `--cos-theta` gives α = cos²θ.
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        cos_theta: Option<f64>,
        #[arg(long, default_value_t = 0)]
        steps: usize,
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long)]
        time: Option<f64>,
        #[arg(long, default_value_t = 256)]
        n_sites: usize,
    },
    /// Binned comparison with the long-time density.
    Weaklimit {
        #[arg(long, value_enum)]
        walk: WalkKind,
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long)]
        time: Option<f64>,
        #[arg(long)]
        theta: Option<f64>,
        #[arg(long)]
        cos_theta: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
        /// Ring size; by default just large enough for the run.
        #[arg(long)]
        n_sites: Option<usize>,
        #[arg(long, default_value_t = 0.9)]
        interior: f64,
        #[arg(long, default_value_t = 32)]
        bins: usize,
    },
    /// Four-component walk in three dimensions.
    Walk3d {
        #[arg(long, value_enum)]
        mode: Walk3dMode,
        #[arg(long, value_enum, default_value_t = OrderingArg::Symmetric)]
        ordering: OrderingArg,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_value = "0,0,0")]
        k: Vec<f64>,
        #[arg(long, default_value_t = FRAC_PI_2)]
        theta: f64,
        #[arg(long, default_value_t = 0.01)]
        delta: f64,
        #[arg(long, default_value_t = 0.125)]
        gamma: f64,
        #[arg(long, value_delimiter = ',', default_value = "16,16,16")]
        dims: Vec<usize>,
        #[arg(long, default_value_t = 1.0)]
        time: f64,
    },
    /// Coinless even/odd walk and its spectrum against the coined walk.
    Coinless {
        #[arg(long)]
        theta: f64,
        #[arg(long, default_value_t = 16)]
        n_sites: usize,
    },
    /// Three-panel density surfaces.
    Figure1 {
        #[arg(long, default_value_t = 0.25)]
        cos_theta: f64,
        #[arg(long, default_value_t = 0.125)]
        gamma: f64,
        #[arg(long, default_value_t = 100)]
        t_max: u64,
        #[arg(long, default_value_t = 256)]
        n_sites: usize,
    },
}

/// What a subcommand produced, before it is written out.
enum Output {
    Text(String),
    Written(Vec<PathBuf>),
}

struct Context {
    strict: bool,
    format: Option<Format>,
    warnings: Vec<String>,
}

impl Context {
    fn guard(&mut self, what: &str, guard: WindowGuard) -> LabResult<bool> {
        if !guard.wraparound_risk() {
            return Ok(false);
        }
        let message = format!("{what}: {} sites, at least {} needed to avoid wraparound", guard.n_sites, guard.required_sites);
        if self.strict {
            return Err(LabError::Guard(message));
        }
        self.warnings.push(message);
        Ok(true)
    }

    fn format(&self, allowed: &[Format], default: Format) -> LabResult<Format> {
        let f = self.format.unwrap_or(default);
        if allowed.contains(&f) {
            Ok(f)
        } else {
            Err(LabError::Usage(format!("format {f:?} is not available for this command").to_lowercase()))
        }
    }
}

fn csv_text(write: impl FnOnce(&mut Vec<u8>) -> LabResult<()>) -> LabResult<String> {
    let mut buf = Vec::new();
    write(&mut buf)?;
    String::from_utf8(buf).map_err(|e| LabError::Usage(e.to_string()))
}

fn spinor_initial(spec: &str, n_sites: usize) -> LabResult<SpinorField> {
    let zero = Complex64::new(0.0, 0.0);
    match spec {
        "symmetric-entangled" => Ok(initial_symmetric_entangled(n_sites)?),
        "delta" => Ok(SpinorField::from_fn(n_sites, |n| (if n == 0 { Complex64::new(1.0, 0.0) } else { zero }, zero))?),
        path => {
            let field = io::read_spinor(fs::File::open(path)?, path)?;
            if field.n_sites() != n_sites {
                return Err(LabError::Usage(format!("{path} holds {} sites, --n-sites is {n_sites}", field.n_sites())));
            }
            Ok(field)
        }
    }
}

fn scalar_initial(spec: &str, n_sites: usize) -> LabResult<ScalarWaveField> {
    match spec {
        "delta" => Ok(ScalarWaveField::delta(n_sites, 0)?),
        "symmetric-entangled" => Err(LabError::Usage("symmetric-entangled is a two-component state; use --system pair".into())),
        path => {
            let field = io::read_scalar(fs::File::open(path)?, path)?;
            if field.n_sites() != n_sites {
                return Err(LabError::Usage(format!("{path} holds {} sites, --n-sites is {n_sites}", field.n_sites())));
            }
            Ok(field)
        }
    }
}

fn required<T>(value: Option<T>, flag: &str) -> LabResult<T> {
    value.ok_or_else(|| LabError::Usage(format!("--{flag} is required here")))
}

fn integer_times(time: f64) -> Vec<u64> {
    (0..=time.floor() as u64).collect()
}

fn run_dtqw(ctx: &mut Context, coin: &Coin, steps: usize, n_sites: usize, initial: &str, method: Method) -> LabResult<Output> {
    let params = DtqwParams::new(coin.theta()?, n_sites, steps)?;
    let start = spinor_initial(initial, n_sites)?;
    let risk = ctx.guard("dtqw", params.guard())?;
    let format = ctx.format(&[Format::Csv, Format::Json, Format::Svg], Format::Csv)?;
    if format == Format::Svg {
        let fields = dtqw_densities(&start, params.theta, steps);
        let surface = Surface::from_fields((0..=steps as u64).collect(), &fields);
        return Ok(Output::Text(heatmap(&surface, "coined walk")));
    }
    let evolved = match method {
        Method::Real => dtqw_evolve(&start, &params)?,
        Method::Momentum => dtqw_evolve_momentum(&start, &params)?,
    };
    let field = evolved.field;
    match format {
        Format::Csv => Ok(Output::Text(csv_text(|b| io::write_spinor(b, &field))?)),
        _ => {
            let rho = field.density();
            let report = Report::new()
                .config("theta", params.theta)
                .config("steps", steps as u64)
                .config("n_sites", n_sites as u64)
                .config("initial", initial)
                .config("method", format!("{method:?}").to_lowercase())
                .metric("norm", field.norm_sqr())
                .metric("mean_position", rho.mean_position())
                .metric("variance", rho.variance())
                .metric("wraparound_risk", risk);
            Ok(Output::Text(report.to_pretty()?))
        }
    }
}

fn run_ctqw(ctx: &mut Context, gamma: f64, time: f64, n_sites: usize, initial: &str, system: System) -> LabResult<Output> {
    let params = CtqwParams::new(gamma, time)?;
    let risk = ctx.guard("ctqw", params.guard(n_sites))?;
    let format = ctx.format(&[Format::Csv, Format::Json, Format::Svg], Format::Csv)?;
    match system {
        System::Scalar => {
            let start = scalar_initial(initial, n_sites)?;
            if format == Format::Svg {
                let rows = integer_times(time)
                    .into_iter()
                    .map(|t| Ok(ctqw_evolve(&start, &CtqwParams::new(gamma, t as f64)?)?.field.density()))
                    .collect::<LabResult<Vec<_>>>()?;
                return Ok(Output::Text(heatmap(&Surface::from_fields(integer_times(time), &rows), "continuous-time walk")));
            }
            let field = ctqw_evolve(&start, &params)?.field;
            if format == Format::Csv {
                return Ok(Output::Text(csv_text(|b| io::write_scalar(b, &field))?));
            }
            let rho = field.density();
            let report = Report::new()
                .config("gamma", gamma)
                .config("time", time)
                .config("n_sites", n_sites as u64)
                .config("initial", initial)
                .config("system", "scalar")
                .metric("norm", field.norm_sqr())
                .metric("variance", rho.variance())
                .metric("wraparound_risk", risk);
            Ok(Output::Text(report.to_pretty()?))
        }
        System::Pair => {
            let start = spinor_initial(initial, n_sites)?;
            if format == Format::Svg {
                let rows = integer_times(time)
                    .into_iter()
                    .map(|t| Ok(limit_pair_evolve(&start, &CtqwParams::new(gamma, t as f64)?)?.field.density()))
                    .collect::<LabResult<Vec<_>>>()?;
                return Ok(Output::Text(heatmap(&Surface::from_fields(integer_times(time), &rows), "continuous-time limit")));
            }
            let field = limit_pair_evolve(&start, &params)?.field;
            if format == Format::Csv {
                return Ok(Output::Text(csv_text(|b| io::write_spinor(b, &field))?));
            }
            let pair = chiral_decompose(&field, gamma, time)?;
            let report = Report::new()
                .config("gamma", gamma)
                .config("time", time)
                .config("n_sites", n_sites as u64)
                .config("initial", initial)
                .config("system", "pair")
                .metric("norm", field.norm_sqr())
                .metric("plus_norm", pair.plus.norm_sqr())
                .metric("minus_norm", pair.minus.norm_sqr())
                .metric("wraparound_risk", risk);
            Ok(Output::Text(report.to_pretty()?))
        }
    }
}

fn run_limit_scan(ctx: &mut Context, gamma: f64, time: f64, taus: &[usize], n_sites: usize, initial: &str) -> LabResult<Output> {
    let start = spinor_initial(initial, n_sites)?;
    let scan = convergence_scan(gamma, time, taus, &start)?;
    // the discrete walks never outrun the limit system, so one guard covers the scan
    let risk = ctx.guard("limit-scan", scan_guard(n_sites, gamma, time))?;
    let format = ctx.format(&[Format::Json, Format::Csv], Format::Json)?;
    if format == Format::Csv {
        let mut text = String::from("tau,delta,state_error\n");
        for e in &scan.entries {
            text.push_str(&format!("{},{},{}\n", e.tau, fmt_real(e.delta), fmt_real(e.state_error)));
        }
        return Ok(Output::Text(text));
    }
    let entries: Vec<Value> =
        scan.entries.iter().map(|e| json!({"tau": e.tau, "delta": e.delta, "state_error": e.state_error})).collect();
    let report = Report::new()
        .config("gamma", gamma)
        .config("time", time)
        .config("tau", taus.iter().map(|t| *t as u64).collect::<Vec<_>>())
        .config("n_sites", n_sites as u64)
        .config("initial", initial)
        .results(json!({ "entries": entries }))
        .metric("fitted_slope", scan.fitted_slope)
        .metric("strictly_decreasing", scan.strictly_decreasing())
        .metric("wraparound_risk", risk);
    Ok(Output::Text(report.to_pretty()?))
}

fn run_bch_scan(ctx: &mut Context, deltas: &[f64], k_points: usize) -> LabResult<Output> {
    let scan = bch_scan(deltas, k_points)?;
    let format = ctx.format(&[Format::Json, Format::Csv], Format::Json)?;
    if format == Format::Csv {
        let mut text = String::from("delta,mean_residual\n");
        for (d, r) in scan.deltas.iter().zip(&scan.mean_residuals) {
            text.push_str(&format!("{},{}\n", fmt_real(*d), fmt_real(*r)));
        }
        return Ok(Output::Text(text));
    }
    let report = Report::new()
        .config("delta", deltas.to_vec())
        .config("k_points", k_points as u64)
        .results(json!({ "deltas": scan.deltas, "mean_residuals": scan.mean_residuals }))
        .metric("fitted_slope", scan.fitted_slope);
    Ok(Output::Text(report.to_pretty()?))
}

#[allow(clippy::too_many_arguments)]
fn run_classical(
    ctx: &mut Context,
    mode: ClassicalMode,
    alpha: Option<f64>,
    cos_theta: Option<f64>,
    steps: usize,
    gamma: Option<f64>,
    time: Option<f64>,
    n_sites: usize,
) -> LabResult<Output> {
    let format = ctx.format(&[Format::Csv, Format::Json], Format::Csv)?;
    let start = ChiralProbability::delta_right(n_sites, 0)?;
    let mut report = Report::new().config("mode", format!("{mode:?}").to_lowercase()).config("n_sites", n_sites as u64);
    let density: ProbabilityField = match mode {
        ClassicalMode::Persistent => {
            let params = match (alpha, cos_theta) {
                (Some(a), None) => PersistentParams::new(a)?,
                (None, Some(c)) if (0.0..=1.0).contains(&c) => PersistentParams::from_coin_angle(c.acos())?,
                _ => return Err(LabError::Usage("persistent mode needs exactly one of --alpha and --cos-theta (in [0, 1])".into())),
            };
            ctx.guard("classical", WindowGuard::new(n_sites, 1.0, steps as f64))?;
            let out = persistent_evolve(&start, params.alpha(), steps)?;
            report = report
                .config("alpha", params.alpha())
                .config("steps", steps as u64)
                .metric("total", out.total())
                .metric("min_value", out.min_value())
                .metric("two_step_defect", persistent_two_step_check(&start, params.alpha())?);
            out.marginal()
        }
        ClassicalMode::Limit => {
            let (g, t) = (required(gamma, "gamma")?, required(time, "time")?);
            ctx.guard("classical", WindowGuard::new(n_sites, 2.0 * g, t))?;
            let out = classical_limit_evolve(&start, g, t)?;
            report = report
                .config("gamma", g)
                .config("time", t)
                .metric("total", out.total())
                .metric("min_value", out.min_value())
                .metric("diffusion_defect", combined_density_diffusion_check(&start, g, t)?);
            combined_density(&out)
        }
        ClassicalMode::Diffusion => {
            let (g, t) = (required(gamma, "gamma")?, required(time, "time")?);
            ctx.guard("classical", WindowGuard::new(n_sites, 2.0 * g, t))?;
            let out = diffusion_evolve(&ProbabilityField::delta(n_sites, 0)?, g, t)?;
            report = report.config("gamma", g).config("time", t).metric("total", out.total()).metric("variance", out.variance());
            out
        }
    };
    match format {
        Format::Csv => Ok(Output::Text(csv_text(|b| io::write_probability(b, &density))?)),
        _ => Ok(Output::Text(report.to_pretty()?)),
    }
}

fn even_ring_for(reach: f64) -> usize {
    let needed = 2 * reach.ceil() as usize + WindowGuard::MARGIN;
    needed.div_ceil(4) * 4
}

#[allow(clippy::too_many_arguments)]
fn run_weaklimit(
    ctx: &mut Context,
    walk: WalkKind,
    gamma: Option<f64>,
    time: Option<f64>,
    coin: Coin,
    steps: Option<usize>,
    n_sites: Option<usize>,
    interior: f64,
    bins: usize,
) -> LabResult<Output> {
    let format = ctx.format(&[Format::Json, Format::Csv], Format::Json)?;
    let (analytic, simulated, report) = match walk {
        WalkKind::Ctqw => {
            let (g, t) = (required(gamma, "gamma")?, required(time, "time")?);
            let analytic = WeakLimitDensity::ctqw(g, t)?;
            let n = n_sites.unwrap_or_else(|| even_ring_for(analytic.reach()));
            let params = CtqwParams::new(g, t)?;
            ctx.guard("weaklimit", params.guard(n))?;
            let field = ctqw_evolve(&ScalarWaveField::delta(n, 0)?, &params)?.field.density();
            (analytic, field, Report::new().config("walk", "ctqw").config("gamma", g).config("time", t).config("n_sites", n as u64))
        }
        WalkKind::Dtqw => {
            let theta = coin.theta()?;
            let tau = required(steps, "steps")?;
            let analytic = WeakLimitDensity::dtqw(theta, tau as f64 + 0.5)?;
            let n = n_sites.unwrap_or_else(|| even_ring_for(analytic.reach() + 1.0));
            let params = DtqwParams::new(theta, n, tau + 1)?;
            ctx.guard("weaklimit", params.guard())?;
            let field = parity_smoothed_density(&initial_symmetric_entangled(n)?, theta, tau);
            let report = Report::new().config("walk", "dtqw").config("theta", theta).config("steps", tau as u64).config("n_sites", n as u64);
            (analytic, field, report)
        }
    };
    if format == Format::Csv {
        let masses = analytic.site_masses(simulated.n_sites())?;
        let mut text = String::from("n,p,p_limit\n");
        let n_sites = simulated.n_sites();
        for (i, (p, q)) in simulated.values().iter().zip(masses.values()).enumerate() {
            let n = qwalk_core::lattice::site_position(n_sites, i);
            text.push_str(&format!("{n},{},{}\n", fmt_real(*p), fmt_real(*q)));
        }
        return Ok(Output::Text(text));
    }
    let cmp = empirical_density_compare_binned(&simulated, &analytic, interior, bins)?;
    let report = report
        .config("interior", interior)
        .config("bins", bins as u64)
        .metric("distance", cmp.distance)
        .metric("excluded_mass", cmp.excluded_mass)
        .metric("reach", analytic.reach());
    Ok(Output::Text(report.to_pretty()?))
}

fn matrix_json(m: &qwalk_core::pauli::Mat4) -> Value {
    let rows: Vec<Value> = (0..4).map(|r| Value::Array((0..4).map(|c| json!([m[(r, c)].re, m[(r, c)].im])).collect())).collect();
    Value::Array(rows)
}

#[allow(clippy::too_many_arguments)]
fn run_walk3d(
    ctx: &mut Context,
    mode: Walk3dMode,
    ordering: OrderingArg,
    k: &[f64],
    theta: f64,
    delta: f64,
    gamma: f64,
    dims: &[usize],
    time: f64,
) -> LabResult<Output> {
    ctx.format(&[Format::Json], Format::Json)?;
    let k: [f64; 3] = k.try_into().map_err(|_| LabError::Usage("--k takes three comma-separated values".into()))?;
    let order = Ordering::from(ordering);
    let mut report = Report::new()
        .config("mode", format!("{mode:?}").to_lowercase())
        .config("ordering", format!("{ordering:?}").to_lowercase())
        .config("k", k.to_vec());
    match mode {
        Walk3dMode::Defect => {
            report = report.metric("defect", zeroth_order_defect(k, order));
        }
        Walk3dMode::Propagator => {
            let u = propagator_3d(k, theta, order);
            report = report
                .config("theta", theta)
                .results(json!({ "matrix": matrix_json(&u.matrix) }))
                .metric("unitarity_defect", u.unitarity_defect());
        }
        Walk3dMode::Footnote => {
            let f = FootnoteHamiltonian3D::new(k, gamma);
            let h = footnote_hamiltonian_3d(k, gamma);
            report = report
                .config("gamma", gamma)
                .results(json!({ "a": f.a, "b": f.b, "matrix": matrix_json(&h.matrix), "eigenvalues": hermitian_eigenvalues(&h.to_dense()) }))
                .metric("energy", f.energy());
        }
        Walk3dMode::Generator => {
            let h = effective_generator_3d(k, delta, gamma, order)?;
            let footnote = footnote_hamiltonian_3d(k, gamma);
            report = report
                .config("delta", delta)
                .config("gamma", gamma)
                .results(json!({ "matrix": matrix_json(&h.matrix) }))
                .metric("distance_to_footnote", (h.matrix - footnote.matrix).norm());
        }
        Walk3dMode::Evolve => {
            let dims: [usize; 3] = dims.try_into().map_err(|_| LabError::Usage("--dims takes three comma-separated sizes".into()))?;
            let evolved = ctqw3d_evolve(&Scalar3DField::delta(dims, [0, 0, 0])?, gamma, time)?;
            let risk = ctx.guard("walk3d", evolved.guard)?;
            let field = evolved.field;
            report = report
                .config("dims", dims.iter().map(|d| *d as u64).collect::<Vec<_>>())
                .config("gamma", gamma)
                .config("time", time)
                .metric("norm", field.norm_sqr())
                .metric("origin_probability", field.at([0, 0, 0]).norm_sqr())
                .metric("wraparound_risk", risk);
        }
    }
    Ok(Output::Text(report.to_pretty()?))
}

fn run_coinless(ctx: &mut Context, theta: f64, n_sites: usize) -> LabResult<Output> {
    ctx.format(&[Format::Json], Format::Json)?;
    let u = coinless_propagator(theta - FRAC_PI_2, FRAC_PI_2, n_sites)?;
    let mut phases = eigenphases(&u);
    phases.sort_by(f64::total_cmp);
    let distance = coinless_spectral_equivalence(theta, n_sites)?;
    let report = Report::new()
        .config("theta", theta)
        .config("n_sites", n_sites as u64)
        .results(json!({ "eigenphases": phases }))
        .metric("spectral_distance", distance);
    Ok(Output::Text(report.to_pretty()?))
}

fn run_figure1_command(ctx: &mut Context, config: Figure1Config, output: Option<&Path>) -> LabResult<Output> {
    ctx.format(&[Format::Csv, Format::Svg, Format::Json], Format::Csv)?;
    let out = run_figure1(&config)?;
    if out.wraparound_risk {
        let speed = config.cos_theta.max(2.0 * config.gamma);
        ctx.guard("figure1", WindowGuard::new(config.n_sites, speed, config.t_max as f64))?;
    }
    let dir = output.map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("figure1"));
    Ok(Output::Written(out.write_to(&dir)?))
}

/// Runs a parsed command line. Returns the lines written to standard error.
pub fn execute(cli: Cli, stdout: &mut dyn Write) -> LabResult<Vec<String>> {
    let mut ctx = Context { strict: cli.common.strict, format: cli.common.format, warnings: Vec::new() };
    let output = cli.common.output.as_deref();
    let produced = match cli.command {
        Command::Dtqw { coin, steps, n_sites, initial, method } => run_dtqw(&mut ctx, &coin, steps, n_sites, &initial, method)?,
        Command::Ctqw { gamma, time, n_sites, initial, system } => run_ctqw(&mut ctx, gamma, time, n_sites, &initial, system)?,
        Command::LimitScan { gamma, time, tau, n_sites, initial } => run_limit_scan(&mut ctx, gamma, time, &tau, n_sites, &initial)?,
        Command::BchScan { delta, k_points } => run_bch_scan(&mut ctx, &delta, k_points)?,
        Command::Classical { mode, alpha, cos_theta, steps, gamma, time, n_sites } => {
            run_classical(&mut ctx, mode, alpha, cos_theta, steps, gamma, time, n_sites)?
        }
        Command::Weaklimit { walk, gamma, time, theta, cos_theta, steps, n_sites, interior, bins } => {
            run_weaklimit(&mut ctx, walk, gamma, time, Coin { theta, cos_theta }, steps, n_sites, interior, bins)?
        }
        Command::Walk3d { mode, ordering, k, theta, delta, gamma, dims, time } => {
            run_walk3d(&mut ctx, mode, ordering, &k, theta, delta, gamma, &dims, time)?
        }
        Command::Coinless { theta, n_sites } => run_coinless(&mut ctx, theta, n_sites)?,
        Command::Figure1 { cos_theta, gamma, t_max, n_sites } => {
            run_figure1_command(&mut ctx, Figure1Config { cos_theta, gamma, t_max, n_sites }, output)?
        }
    };
    match produced {
        Output::Text(text) => match output {
            Some(path) => fs::write(path, text)?,
            None => stdout.write_all(text.as_bytes())?,
        },
        Output::Written(paths) => {
            for p in paths {
                writeln!(stdout, "{}", p.display())?;
            }
        }
    }
    Ok(ctx.warnings.into_iter().map(|w| format!("warning: {w}")).collect())
}

pub fn subcommand_names() -> Vec<String> {
    Cli::command().get_subcommands().map(|s| s.get_name().to_string()).collect()
}

/// Full entry point: config merging, parsing, execution. Returns the exit code.
pub fn main_with(argv: Vec<String>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let names = subcommand_names();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let argv = match merge_config_args(argv, &refs) {
        Ok(a) => a,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return e.exit_code();
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(stderr, "{text}");
            } else {
                let _ = write!(stdout, "{text}");
            }
            return code;
        }
    };
    match execute(cli, stdout) {
        Ok(warnings) => {
            for w in warnings {
                let _ = writeln!(stderr, "{w}");
            }
            0
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
