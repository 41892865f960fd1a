use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use lfdecay::dynamics::Trajectory;
use lfdecay::io::{
    emit_plot_script, manifest_path, write_comparison_csv, write_csv, write_rate_csv, PlotKind, RunConfig, RunManifest,
};
use lfdecay::params::derive;
use lfdecay::scenarios::{
    departure_from_exponential, param_hash, preset, presets, ComparisonReport, ScenarioPreset, SweepAxis,
};
use lfdecay::spectrum::{gamma_bar, harmonic_amplitudes};
use lfdecay::{evolve, Error, ModelOrder, Result};

#[derive(Parser)]
#[command(name = "lfdecay", version, about = "Spontaneous decay of a two-level emitter in a strong low-frequency field")]
struct Cli {
    /// Worker threads for sweeps and comparisons (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one model and write ⟨S_z⟩ to CSV with a manifest.
    Simulate {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Write the decay rate γ̄(t)/γ over whole drive periods.
    Rate {
        #[command(flatten)]
        run: RunArgs,
        /// Samples per rate period π/ω.
        #[arg(long, default_value_t = 512)]
        per_period: usize,
    },
    /// Run two models on a shared grid and report the comparison metrics.
    Compare {
        #[command(flatten)]
        run: RunArgs,
        /// Second preset (default: the first with the standard model).
        #[arg(long)]
        against: Option<String>,
        /// Model order of the second run when no second preset is given.
        #[arg(long, default_value = "standard")]
        against_order: ModelOrder,
    },
    /// Run one simulation per value of a parameter.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        /// rabi, omega, phase or order.
        #[arg(long)]
        axis: String,
        /// Comma-separated values (rates in the config's units, phase in rad).
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<String>,
        /// Directory for the per-point CSV files.
        #[arg(long, default_value = "sweep")]
        out_dir: PathBuf,
    },
    /// List the built-in presets.
    Presets,
    /// Run every preset and verify the state invariants.
    Check,
}

#[derive(Args, Clone)]
struct RunArgs {
    /// Built-in parameter set.
    #[arg(long, conflicts_with = "config")]
    preset: Option<String>,
    /// JSON configuration (SI units) or a manifest from an earlier run.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Model: 2, 8 or standard.
    #[arg(long)]
    order: Option<ModelOrder>,
    /// Horizon in units of 1/γ.
    #[arg(long)]
    t_end: Option<f64>,
    /// Local error tolerance per step.
    #[arg(long)]
    tol: Option<f64>,
    /// Keep the coherent term in the rotated models.
    #[arg(long)]
    include_h0: bool,
    /// Output CSV path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write a gnuplot script next to the CSV.
    #[arg(long)]
    plot_script: bool,
}

impl RunArgs {
    fn resolve(&self) -> Result<(String, RunConfig)> {
        let (name, mut config) = match (&self.preset, &self.config) {
            (_, Some(path)) => (
                path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "run".into()),
                RunConfig::load(path)?,
            ),
            (Some(name), None) => (name.clone(), RunConfig::from_preset(&preset(name)?)),
            (None, None) => return Err(Error::Config("one of --preset or --config is required".into())),
        };
        if let Some(order) = self.order {
            config.order = order;
        }
        if let Some(t) = self.t_end {
            config.t_end_gamma = t;
        }
        if let Some(tol) = self.tol {
            config.tol = tol;
        }
        if self.include_h0 {
            config.include_h0 = true;
        }
        config.validate()?;
        Ok((name, config))
    }

    fn out_path(&self, name: &str, suffix: &str) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from(format!("{name}{suffix}.csv")))
    }
}

fn script_path(csv: &Path) -> PathBuf {
    let mut s = csv.as_os_str().to_owned();
    s.push(".gp");
    PathBuf::from(s)
}

fn simulate(args: &RunArgs) -> Result<()> {
    let (name, config) = args.resolve()?;
    let out = args.out_path(&name, "");
    let start = Instant::now();
    let traj = evolve(&config.params(), config.order, &config.options())?;
    traj.check_invariants()?;
    let wall = start.elapsed().as_secs_f64();
    let hash = write_csv(&traj, &out)?;
    let phash = param_hash(&config.params(), config.order, &config.options());
    RunManifest::new(&config, &traj, &phash, wall, &hash)?.write(&manifest_path(&out))?;
    if args.plot_script {
        emit_plot_script(&out, PlotKind::Inversion, &name, &script_path(&out))?;
    }
    println!(
        "simulate name={name} order={} rows={} departure={:.6} sha256={hash} out={}",
        config.order,
        traj.grid.len(),
        departure_from_exponential(&traj),
        out.display()
    );
    Ok(())
}

fn rate(args: &RunArgs, per_period: usize) -> Result<()> {
    let (name, config) = args.resolve()?;
    if !config.order.is_rotated() {
        return Err(Error::Config("the rate needs a rotated model (--order 2 or 8)".into()));
    }
    if per_period < 2 {
        return Err(Error::Config("--per-period must be at least 2".into()));
    }
    let p = config.params().scaled();
    let d = derive(&p, config.order)?;
    let spec = harmonic_amplitudes(&d, &p, config.order, &config.options().policy)?;
    let h = p.rate_period() / per_period as f64;
    let steps = (config.t_end_gamma / h).ceil() as usize;
    let grid: Vec<f64> = (0..=steps).map(|i| i as f64 * h).collect();
    let gbar: Vec<f64> = grid.iter().map(|&t| gamma_bar(t, &spec, &p)).collect();
    let out = args.out_path(&name, "_rate");
    let hash = write_rate_csv(&grid, &gbar, &out)?;
    if args.plot_script {
        emit_plot_script(&out, PlotKind::Rate, &name, &script_path(&out))?;
    }
    let mean = lfdecay::spectrum::gamma_bar_mean(&spec, &p);
    println!(
        "rate name={name} order={} rows={} period={:.9} mean={mean:.9} discarded={:.3e} sha256={hash} out={}",
        config.order,
        grid.len(),
        p.rate_period(),
        spec.discarded_weight,
        out.display()
    );
    Ok(())
}

fn as_preset(name: &str, config: &RunConfig) -> ScenarioPreset {
    ScenarioPreset {
        name: name.to_string(),
        params: config.params(),
        order: config.order,
        t_end: config.t_end_gamma,
        outputs: Vec::new(),
    }
}

fn compare(args: &RunArgs, against: Option<&str>, against_order: ModelOrder) -> Result<()> {
    let (name, config) = args.resolve()?;
    let a = as_preset(&name, &config);
    let b = match against {
        Some(other) => preset(other)?,
        None => ScenarioPreset {
            name: format!("{name}-{against_order}"),
            order: against_order,
            ..a.clone()
        },
    };
    if a.params.scaled() != b.params.scaled() {
        return Err(Error::Config(format!("`{}` and `{}` differ in drive parameters", a.name, b.name)));
    }
    let opts = config.options();
    let (pa, pb) = (a.params, b.params);
    let (ra, rb) = rayon::join(
        || evolve(&pa, a.order, &opts).and_then(checked),
        || evolve(&pb, b.order, &opts).and_then(checked),
    );
    let report = ComparisonReport::from_trajectories([a.name.clone(), b.name.clone()], &ra?, &rb?)?;
    let out = args.out_path(&name, "_compare");
    let hash = write_comparison_csv(&report, &out)?;
    let mut metrics_path = out.as_os_str().to_owned();
    metrics_path.push(".metrics.json");
    let metrics = serde_json::to_string_pretty(&report.metrics).map_err(|e| Error::Config(e.to_string()))?;
    std::fs::write(PathBuf::from(metrics_path), metrics + "\n")?;
    if args.plot_script {
        emit_plot_script(&out, PlotKind::Comparison, &format!("{} vs {}", a.name, b.name), &script_path(&out))?;
    }
    let m = &report.metrics;
    println!(
        "compare a={} b={} max_abs_diff={:.6} early_signed_diff={:.6} first_faster_early={} sha256={hash} out={}",
        a.name,
        b.name,
        m.max_abs_diff,
        m.early_signed_diff,
        report.first_faster_early(),
        out.display()
    );
    Ok(())
}

fn checked(traj: Trajectory) -> Result<Trajectory> {
    traj.check_invariants()?;
    Ok(traj)
}

fn sweep(args: &RunArgs, axis: &str, values: &[String], out_dir: &Path) -> Result<()> {
    use rayon::prelude::*;
    let (name, config) = args.resolve()?;
    let axis: SweepAxis = axis.parse()?;
    let points = values.iter().map(|v| axis.point(v)).collect::<Result<Vec<_>>>()?;
    std::fs::create_dir_all(out_dir)?;
    let base = as_preset(&name, &config);
    let opts = config.options();
    let results: Vec<Result<String>> = points
        .par_iter()
        .map(|pt| {
            let p = pt.apply(&base);
            let start = Instant::now();
            let traj = evolve(&p.params, p.order, &opts).and_then(checked)?;
            let wall = start.elapsed().as_secs_f64();
            let phash = param_hash(&p.params, p.order, &opts);
            let out = out_dir.join(format!("{name}-{phash}.csv"));
            let hash = write_csv(&traj, &out)?;
            let mut cfg = config.clone();
            cfg.rabi = p.params.rabi;
            cfg.omega = p.params.omega;
            cfg.phase = p.params.phase;
            cfg.order = p.order;
            RunManifest::new(&cfg, &traj, &phash, wall, &hash)?.write(&manifest_path(&out))?;
            Ok(format!("departure={:.6} out={}", departure_from_exponential(&traj), out.display()))
        })
        .collect();
    let mut worst: Option<Error> = None;
    for (value, r) in values.iter().zip(results) {
        match r {
            Ok(line) => println!("point value={value} status=ok {line}"),
            Err(e) => {
                println!("point value={value} status=error kind={} reason={}", e.kind(), one_line(&e));
                if worst.as_ref().map_or(true, |w| e.exit_code() > w.exit_code()) {
                    worst = Some(e);
                }
            }
        }
    }
    match worst {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn list_presets() {
    println!("name,order,t_end_gamma,x,omega0_over_omega,omega_over_gamma,eta");
    for p in presets() {
        let d = p.derived();
        println!(
            "{},{},{},{},{},{},{}",
            p.name,
            p.order,
            p.t_end,
            d.x,
            d.freq_ratio,
            p.params.omega / p.params.gamma,
            d.eta
        );
    }
}

fn check() -> Result<()> {
    let mut first: Option<Error> = None;
    for p in presets() {
        let outcome = evolve(&p.params, p.order, &p.options()).and_then(checked);
        match outcome {
            Ok(t) => {
                let w = t.worst_diagnostics();
                println!(
                    "check preset={} status=ok trace={:.2e} hermiticity={:.2e} min_eigenvalue={:.2e}",
                    p.name, w.trace, w.hermiticity, w.min_eigenvalue
                );
            }
            Err(e) => {
                println!("check preset={} status=error kind={} reason={}", p.name, e.kind(), one_line(&e));
                first.get_or_insert(e);
            }
        }
    }
    match first {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn one_line(e: &Error) -> String {
    e.to_string().replace('\n', " ")
}

fn dispatch(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Simulate { run } => simulate(run),
        Command::Rate { run, per_period } => rate(run, *per_period),
        Command::Compare {
            run,
            against,
            against_order,
        } => compare(run, against.as_deref(), *against_order),
        Command::Sweep {
            run,
            axis,
            values,
            out_dir,
        } => sweep(run, axis, values, out_dir),
        Command::Presets => {
            list_presets();
            Ok(())
        }
        Command::Check => check(),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error kind=config code=2 reason=thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let code = e.exit_code();
            eprintln!("error kind={} code={code} reason={}", e.kind(), one_line(&e));
            ExitCode::from(code as u8)
        }
    }
}
