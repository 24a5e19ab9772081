//! `ersatz`: synthesize non-stationary trajectories, estimate their
//! time-averaged information quantities and reproduce the benchmark data
//! files.
//!
//! Exit codes: 0 success, 2 usage/validation, 3 I/O or parse failure,
//! 4 numerical failure (synthesis eigenvalues, estimator degeneracy).

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ersatz_info::experiments::figures::{reproduce, Scale};
use ersatz_info::experiments::io::{write_bias_csv, write_pdf_csvs, write_sweep_csv, RunManifest};
use ersatz_info::experiments::{bias_grid, increment_pdf, run_sweep, SweepAxis, SweepPlan};
use ersatz_info::knn::ersatz::{
    ersatz_ami, ersatz_entropy, ersatz_entropy_rate, ersatz_entropy_rate_windowed,
    ersatz_entropy_windowed, normalized_entropy_rate, WindowMode,
};
use ersatz_info::knn::{EstimatorConfig, InfoEstimate, Quantity};
use ersatz_info::synth::{integrate_to_motion, synth_noise};
use ersatz_info::trajectory::{NoiseSpec, ProcessKind, Trajectory};
use ersatz_info::Error;

const OUT_DIR_ENV: &str = "ERSATZ_OUT_DIR";

#[derive(Parser)]
#[command(
    name = "ersatz",
    version,
    about = "Non-stationary process synthesis and time-averaged information estimation"
)]
struct Cli {
    /// Worker thread cap (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output directory (default: $ERSATZ_OUT_DIR or the working directory).
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Fgn,
    LognormalH1,
    LognormalH2,
    Mrw,
}

impl From<KindArg> for ProcessKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Fgn => ProcessKind::Fgn,
            KindArg::LognormalH1 => ProcessKind::LognormalH1,
            KindArg::LognormalH2 => ProcessKind::LognormalH2,
            KindArg::Mrw => ProcessKind::Mrw,
        }
    }
}

#[derive(Args)]
struct SpecArgs {
    /// Process class.
    #[arg(long, value_enum)]
    kind: KindArg,
    /// Hurst exponent of the motion, in (0, 1).
    #[arg(long)]
    hurst: f64,
    /// Samples per window; power of two, `2^N` notation accepted.
    #[arg(long, value_parser = parse_length, default_value = "2^16")]
    length: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Noise std at unit scale.
    #[arg(long, default_value_t = 1.0)]
    sigma1: f64,
    /// Intermittency coefficient (mrw).
    #[arg(long, default_value_t = 0.025)]
    c2: f64,
    /// Integral scale of the cascade in samples (mrw; default: length).
    #[arg(long = "L", value_parser = parse_length)]
    integral_scale: Option<usize>,
    /// Log-normal marginal mean (lognormal kinds).
    #[arg(long = "mu")]
    lognormal_mu: Option<f64>,
    /// Log-normal marginal std (lognormal kinds).
    #[arg(long = "sigma")]
    lognormal_sigma: Option<f64>,
}

impl SpecArgs {
    fn to_spec(&self) -> Result<NoiseSpec, Error> {
        let mut spec = match ProcessKind::from(self.kind) {
            ProcessKind::Fgn => NoiseSpec::fgn(self.hurst, self.length, self.seed),
            ProcessKind::LognormalH1 => {
                NoiseSpec::lognormal(false, self.hurst, self.length, self.seed)
            }
            ProcessKind::LognormalH2 => {
                NoiseSpec::lognormal(true, self.hurst, self.length, self.seed)
            }
            ProcessKind::Mrw => NoiseSpec::mrw(self.hurst, self.c2, self.length, self.seed),
        };
        spec.sigma1 = self.sigma1;
        if let Some(l) = self.integral_scale {
            spec.integral_scale = l;
        }
        if let Some(mu) = self.lognormal_mu {
            spec.lognormal_mu = mu;
        }
        if let Some(sigma) = self.lognormal_sigma {
            spec.lognormal_sigma = sigma;
        }
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum QuantityArg {
    Entropy,
    Ami,
    Rate,
    RateNormalized,
}

impl From<QuantityArg> for Quantity {
    fn from(q: QuantityArg) -> Self {
        match q {
            QuantityArg::Entropy => Quantity::Entropy,
            QuantityArg::Ami => Quantity::Ami,
            QuantityArg::Rate => Quantity::EntropyRate,
            QuantityArg::RateNormalized => Quantity::NormalizedEntropyRate,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum WindowModeArg {
    Average,
    Pool,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize a trajectory; writes `index,value` CSV plus a JSON spec
    /// sidecar.
    Synth {
        #[command(flatten)]
        spec: SpecArgs,
        /// Integrate the noise and write the motion.
        #[arg(long)]
        integrate: bool,
        /// Output CSV path (default: `<kind>_H<hurst>_T<length>_s<seed>.csv`).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Estimate an information quantity from a trajectory file.
    Estimate {
        /// Trajectory CSV written by `synth` (sidecar required).
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        quantity: QuantityArg,
        #[arg(long, default_value_t = 1)]
        m: usize,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = 1, value_parser = parse_length)]
        tau: usize,
        #[arg(long, default_value_t = 5)]
        k: usize,
        /// Split the record into windows of this many samples.
        #[arg(long, value_parser = parse_length)]
        window: Option<usize>,
        #[arg(long, value_enum, default_value = "average")]
        window_mode: WindowModeArg,
        /// Also append the estimate to a CSV file.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Ensemble sweep of one parameter; writes a CSV and a manifest.
    Sweep {
        #[command(flatten)]
        spec: SpecArgs,
        /// Axis: window, scale, neighbors or embedding.
        #[arg(long, value_parser = SweepAxis::parse)]
        axis: SweepAxis,
        /// Grid values: comma list and/or inclusive ranges, e.g.
        /// `1,2,4,8` or `2^10..2^16` (powers of two) or `4..18`.
        #[arg(long, value_parser = parse_grid)]
        grid: std::vec::Vec<u64>,
        #[arg(long, default_value_t = 20)]
        realizations: usize,
        /// Comma list of quantities: entropy, ami, rate, rate-normalized.
        #[arg(long, value_parser = parse_quantities, default_value = "rate")]
        quantities: std::vec::Vec<Quantity>,
        #[arg(long, default_value_t = 1)]
        m: usize,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = 1, value_parser = parse_length)]
        tau: usize,
        #[arg(long, default_value_t = 5)]
        k: usize,
        /// Estimate on the raw noise instead of the integrated motion.
        #[arg(long)]
        noise: bool,
    },
    /// Entropy-rate bias over a (k, T) grid with the collapse coordinate.
    BiasGrid {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, default_value_t = 4)]
        k_min: usize,
        #[arg(long, default_value_t = 18)]
        k_max: usize,
        /// Window grid, e.g. `2^9..2^15`.
        #[arg(long, value_parser = parse_grid, default_value = "2^9..2^15")]
        t_grid: std::vec::Vec<u64>,
        #[arg(long, default_value_t = 1)]
        m: usize,
        #[arg(long, default_value_t = 1, value_parser = parse_length)]
        tau: usize,
        #[arg(long, default_value_t = 20)]
        realizations: usize,
    },
    /// Unit-std increment histograms over a scale grid, with pairwise KS
    /// distances and flatness.
    Pdf {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, value_parser = parse_grid, default_value = "2^0..2^6")]
        tau_grid: std::vec::Vec<u64>,
        #[arg(long, default_value_t = 20)]
        realizations: usize,
    },
    /// Regenerate the data files behind one benchmark figure.
    Reproduce {
        /// Figure id, fig1a..fig11.
        figure_id: String,
        /// Publication-scale ensembles instead of desk scale.
        #[arg(long)]
        full_scale: bool,
        /// Override the ensemble size.
        #[arg(long)]
        realizations: Option<usize>,
    },
}

/// Base-10 integer, also accepting `2^N`.
fn parse_length(s: &str) -> Result<usize, String> {
    let s = s.trim();
    if let Some(exp) = s.strip_prefix("2^") {
        let e: u32 = exp.parse().map_err(|e| format!("bad exponent: {e}"))?;
        if e >= usize::BITS {
            return Err(format!("2^{e} overflows"));
        }
        Ok(1usize << e)
    } else {
        s.parse().map_err(|e| format!("{e}"))
    }
}

/// Comma-separated values and inclusive ranges. A range of `2^a..2^b`
/// expands to the powers of two in between; a plain `a..b` steps by one.
fn parse_grid(s: &str) -> Result<Vec<u64>, String> {
    let mut out = Vec::new();
    for token in s.split(',') {
        let token = token.trim();
        if token.is_empty() {
            continue;
        }
        if let Some((lo, hi)) = token.split_once("..") {
            let pow_form = lo.starts_with("2^") && hi.starts_with("2^");
            let lo = parse_length(lo)? as u64;
            let hi = parse_length(hi)? as u64;
            if lo > hi {
                return Err(format!("empty range {token}"));
            }
            if pow_form {
                let mut v = lo;
                while v <= hi {
                    out.push(v);
                    v *= 2;
                }
            } else {
                out.extend(lo..=hi);
            }
        } else {
            out.push(parse_length(token)? as u64);
        }
    }
    if out.is_empty() {
        return Err("empty grid".into());
    }
    Ok(out)
}

fn parse_quantities(s: &str) -> Result<Vec<Quantity>, String> {
    s.split(',')
        .map(|q| match q.trim() {
            "entropy" => Ok(Quantity::Entropy),
            "ami" => Ok(Quantity::Ami),
            "rate" => Ok(Quantity::EntropyRate),
            "rate-normalized" | "rate_normalized" => Ok(Quantity::NormalizedEntropyRate),
            other => Err(format!("unknown quantity `{other}`")),
        })
        .collect()
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidParameter { .. } | Error::Length(_) => 2,
        Error::Io(_) | Error::Parse(_) => 3,
        Error::Synthesis(_)
        | Error::CorrelationMapping(_)
        | Error::Degenerate(_)
        | Error::NotPositiveDefinite => 4,
    }
}

fn out_dir(cli: &Cli) -> PathBuf {
    cli.out_dir
        .clone()
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

fn print_estimate(est: &InfoEstimate) {
    println!(
        "quantity={} value_nats={:.6} m={} n={} tau={} T={} k={} seed={}",
        est.quantity, est.value, est.m, est.n, est.tau, est.window, est.k, est.seed
    );
}

fn append_estimate_csv(path: &PathBuf, est: &InfoEstimate) -> Result<(), Error> {
    use std::io::Write;
    let fresh = !path.exists();
    let mut f = std::fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)?;
    if fresh {
        writeln!(f, "quantity,value_nats,m,n,tau,T,k,seed")?;
    }
    writeln!(
        f,
        "{},{},{},{},{},{},{},{}",
        est.quantity, est.value, est.m, est.n, est.tau, est.window, est.k, est.seed
    )?;
    Ok(())
}

fn run(cli: &Cli) -> Result<(), Error> {
    let dir = out_dir(cli);
    match &cli.command {
        Command::Synth {
            spec,
            integrate,
            out,
        } => {
            let spec = spec.to_spec()?;
            let mut traj = synth_noise(&spec)?;
            if *integrate {
                traj = integrate_to_motion(&traj)?;
            }
            let path = out.clone().unwrap_or_else(|| {
                dir.join(format!(
                    "{}_H{}_T{}_s{}.csv",
                    spec.kind, spec.hurst, spec.length, spec.seed
                ))
            });
            if let Some(parent) = path.parent() {
                if !parent.as_os_str().is_empty() {
                    std::fs::create_dir_all(parent)?;
                }
            }
            traj.write_csv(&path)?;
            println!(
                "wrote {} and {}",
                path.display(),
                Trajectory::sidecar_path(&path).display()
            );
            Ok(())
        }
        Command::Estimate {
            input,
            quantity,
            m,
            n,
            tau,
            k,
            window,
            window_mode,
            csv,
        } => {
            if *m == 0 || *n == 0 || *tau == 0 {
                return Err(Error::invalid("m", "m, n and tau must be >= 1"));
            }
            let cfg = EstimatorConfig::with_k(*k);
            cfg.validate(usize::MAX)?; // k >= 1; the count check happens inside
            let traj = Trajectory::read_csv(input)?;
            let est = match (Quantity::from(*quantity), window) {
                (Quantity::Entropy, None) => ersatz_entropy(&traj, *m, *tau, &cfg)?,
                (Quantity::Ami, None) => ersatz_ami(&traj, *m, *n, *tau, &cfg)?,
                (Quantity::EntropyRate, None) => ersatz_entropy_rate(&traj, *m, *tau, &cfg)?,
                (Quantity::NormalizedEntropyRate, None) => {
                    normalized_entropy_rate(&traj, *m, *tau, &cfg)?
                }
                (q, Some(w)) => {
                    let mode = match window_mode {
                        WindowModeArg::Average => WindowMode::Average,
                        WindowModeArg::Pool => WindowMode::Pool,
                    };
                    match q {
                        Quantity::Entropy => {
                            ersatz_entropy_windowed(&traj, *w, mode, *m, *tau, &cfg)?
                        }
                        Quantity::EntropyRate => {
                            ersatz_entropy_rate_windowed(&traj, *w, mode, *m, *tau, &cfg)?
                        }
                        _ => {
                            return Err(Error::invalid(
                                "window",
                                "windowed mode supports entropy and rate",
                            ))
                        }
                    }
                }
            };
            print_estimate(&est);
            if let Some(csv) = csv {
                append_estimate_csv(csv, &est)?;
            }
            Ok(())
        }
        Command::Sweep {
            spec,
            axis,
            grid,
            realizations,
            quantities,
            m,
            n,
            tau,
            k,
            noise,
        } => {
            let template = spec.to_spec()?;
            let mut plan = SweepPlan::new(template, *axis, grid.clone());
            plan.on_motion = !noise;
            plan.realizations = *realizations;
            plan.quantities = quantities.clone();
            plan.m = *m;
            plan.n = *n;
            plan.tau = *tau;
            plan.k = *k;
            plan.validate()?;
            let start = Instant::now();
            let result = run_sweep(&plan)?;
            std::fs::create_dir_all(&dir)?;
            let csv = dir.join(format!("sweep_{}_{}.csv", plan.template.kind, plan.axis));
            write_sweep_csv(&result, &csv)?;
            let mut manifest = RunManifest::new("sweep", plan.template.seed);
            manifest.add_plan(&plan);
            manifest.files = vec![csv.file_name().unwrap().to_string_lossy().into_owned()];
            let mpath = manifest.finish(
                start.elapsed(),
                &dir,
                &format!("sweep_{}_{}_manifest.json", plan.template.kind, plan.axis),
            )?;
            println!("wrote {} and {}", csv.display(), mpath.display());
            Ok(())
        }
        Command::BiasGrid {
            spec,
            k_min,
            k_max,
            t_grid,
            m,
            tau,
            realizations,
        } => {
            if *k_min == 0 || k_min > k_max {
                return Err(Error::invalid("k_min", "need 1 <= k-min <= k-max"));
            }
            let template = spec.to_spec()?;
            let k_grid: Vec<usize> = (*k_min..=*k_max).collect();
            let start = Instant::now();
            let grid = bias_grid(&template, &k_grid, t_grid, *m, *tau, *realizations)?;
            std::fs::create_dir_all(&dir)?;
            let csv = dir.join(format!("bias_{}.csv", template.kind));
            write_bias_csv(&grid, &csv)?;
            let mut manifest = RunManifest::new("bias-grid", template.seed);
            manifest.add_plan(&serde_json::json!({
                "template": template,
                "k_grid": k_grid,
                "t_grid": t_grid,
                "m": m,
                "tau": tau,
                "realizations": realizations,
            }));
            manifest.files = vec![csv.file_name().unwrap().to_string_lossy().into_owned()];
            let mpath = manifest.finish(
                start.elapsed(),
                &dir,
                &format!("bias_{}_manifest.json", template.kind),
            )?;
            println!("wrote {} and {}", csv.display(), mpath.display());
            Ok(())
        }
        Command::Pdf {
            spec,
            tau_grid,
            realizations,
        } => {
            let template = spec.to_spec()?;
            let start = Instant::now();
            let pdf = increment_pdf(&template, tau_grid, *realizations)?;
            std::fs::create_dir_all(&dir)?;
            let stem = format!("pdf_{}", template.kind);
            let files = write_pdf_csvs(&pdf, &dir, &stem)?;
            let mut manifest = RunManifest::new("pdf", template.seed);
            manifest.add_plan(&serde_json::json!({
                "template": template,
                "tau_grid": tau_grid,
                "realizations": realizations,
            }));
            manifest.files = files
                .iter()
                .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
                .collect();
            let mpath = manifest.finish(start.elapsed(), &dir, &format!("{stem}_manifest.json"))?;
            for f in &files {
                println!("wrote {}", f.display());
            }
            println!("wrote {}", mpath.display());
            Ok(())
        }
        Command::Reproduce {
            figure_id,
            full_scale,
            realizations,
        } => {
            let scale = if *full_scale {
                Scale::Full
            } else {
                Scale::Desk
            };
            std::fs::create_dir_all(&dir)?;
            let files = reproduce(figure_id, scale, *realizations, &dir)?;
            for f in &files {
                println!("wrote {}", f.display());
            }
            Ok(())
        }
    }
}

fn main() {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        // A zero cap makes no sense; treat it as a usage error.
        if threads == 0 {
            eprintln!("error: --threads must be >= 1");
            std::process::exit(2);
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .ok();
    }
    if let Err(err) = run(&cli) {
        eprintln!("error: {err}");
        std::process::exit(exit_code(&err));
    }
}
