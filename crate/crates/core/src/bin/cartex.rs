//! Command-line front end: synthesize ground truth, corrupt it, decompose
//! observations, run benchmark scenarios, and dump per-iteration traces.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 I/O or file
//! format error, 3 numerical failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cartex::io::{read_image, write_image};
use cartex::metrics::MetricReport;
use cartex::scenario::{
    parse_noise_family, preset, rows_to_csv, run_benchmark, summaries_to_csv, BenchmarkScenario,
    Method, PhiSpec,
};
use cartex::{
    corrupt, default_ground_truth, pdhg_solve, pps_solve, snr, ssim, DecompResult, DegradationOp,
    Error, Image, NoiseSpec, Result, SolverConfig,
};

#[derive(Parser)]
#[command(name = "cartex", version, about = "cartoon + texture image decomposition")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic cartoon/texture/composite triple.
    Synth(SynthArgs),
    /// Apply a degradation operator and additive noise to an image.
    Corrupt(CorruptArgs),
    /// Decompose an observation into cartoon and texture parts.
    Decompose(DecomposeArgs),
    /// Run a benchmark scenario file and emit CSV results.
    Benchmark(BenchmarkArgs),
    /// Decompose and emit the per-iteration trace as CSV.
    Diag(DecomposeArgs),
}

#[derive(Args)]
struct SynthArgs {
    /// Side length of the square image.
    #[arg(long, default_value_t = 64)]
    size: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory; files are <prefix>.{cartoon,texture,composite}.<ext>.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    #[arg(long, default_value = "synth")]
    prefix: String,
    /// Output extension: pgm (8-bit) or ctf (lossless float).
    #[arg(long, default_value = "ctf")]
    format: String,
}

#[derive(Args)]
struct CorruptArgs {
    input: PathBuf,
    /// identity | downsample:<p> | blur:<k> | mask:<path>
    #[arg(long, default_value = "identity")]
    phi: String,
    /// student-t:<df> | cauchy | ged:<shape>
    #[arg(long, default_value = "student-t:2")]
    noise: String,
    #[arg(long, default_value_t = 0.1)]
    intensity: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output path; defaults to <input stem>.observed.<input ext>.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DecomposeArgs {
    input: PathBuf,
    /// identity | downsample:<p> | blur:<k> | mask:<path>
    #[arg(long, default_value = "identity")]
    phi: String,
    /// Seed for randomized degradation operators.
    #[arg(long, default_value_t = 0)]
    phi_seed: u64,
    /// rlrp-pps | rlrp-pdhg | clrp
    #[arg(long, default_value = "rlrp-pps")]
    method: String,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    mu: Option<f64>,
    /// Huber threshold; "inf" selects the quadratic baseline.
    #[arg(long)]
    c: Option<String>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    r: Option<f64>,
    #[arg(long)]
    s: Option<f64>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long, default_value_t = false)]
    anisotropic_tv: bool,
    /// Fail instead of rescaling step sizes that violate the step condition.
    #[arg(long, default_value_t = false)]
    no_auto_scale: bool,
    /// Clean reference for the metrics row; without it the observation is used.
    #[arg(long)]
    reference: Option<PathBuf>,
}

#[derive(Args)]
struct BenchmarkArgs {
    /// Scenario file, or a preset name: denoise, inpaint, deblur.
    scenario: String,
    /// Write the per-run CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the median/IQR summary CSV here.
    #[arg(long)]
    summary: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap handles --help / --version through this same path
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::Io(_) | Error::Format { .. } => 2,
                Error::Numerical(_) | Error::SvdFailure => 3,
                _ => 1,
            };
            ExitCode::from(code)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Synth(a) => cmd_synth(a),
        Command::Corrupt(a) => cmd_corrupt(a),
        Command::Decompose(a) => cmd_decompose(a, false),
        Command::Diag(a) => cmd_decompose(a, true),
        Command::Benchmark(a) => cmd_benchmark(a),
    }
}

fn cmd_synth(a: SynthArgs) -> Result<()> {
    let gt = default_ground_truth::<f64>(a.size, a.seed);
    for (name, img) in
        [("cartoon", &gt.cartoon), ("texture", &gt.texture), ("composite", &gt.composite)]
    {
        let path = a.out_dir.join(format!("{}.{}.{}", a.prefix, name, a.format));
        write_image(img, &path)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn default_out(input: &Path, tag: &str) -> PathBuf {
    let ext = input.extension().and_then(|e| e.to_str()).unwrap_or("ctf");
    input.with_extension(format!("{tag}.{ext}"))
}

fn cmd_corrupt(a: CorruptArgs) -> Result<()> {
    let img: Image<f64> = read_image(&a.input)?;
    let phi = PhiSpec::parse(&a.phi)?.instantiate(a.seed)?;
    let spec = NoiseSpec { family: parse_noise_family(&a.noise)?, intensity: a.intensity, seed: a.seed };
    let observed = corrupt(&img, &phi, &spec)?;
    let out = a.out.unwrap_or_else(|| default_out(&a.input, "observed"));
    write_image(&observed, &out)?;
    println!("wrote {}", out.display());
    Ok(())
}

fn build_config(a: &DecomposeArgs) -> Result<SolverConfig<f64>> {
    let mut cfg = SolverConfig::<f64>::default();
    if let Some(v) = a.tau {
        cfg.tau = v;
    }
    if let Some(v) = a.mu {
        cfg.mu = v;
    }
    if let Some(v) = &a.c {
        cfg.huber_c = if v == "inf" {
            f64::INFINITY
        } else {
            v.parse().map_err(|_| Error::Config(format!("bad value '{v}' for --c")))?
        };
    }
    if let Some(v) = a.beta {
        cfg.beta = v;
    }
    if let Some(v) = a.gamma {
        cfg.gamma = v;
    }
    if let Some(v) = a.r {
        cfg.r = v;
    }
    if let Some(v) = a.s {
        cfg.s = v;
    }
    if let Some(v) = a.sigma {
        cfg.sigma = v;
    }
    if let Some(v) = a.eta {
        cfg.eta = v;
    }
    if let Some(v) = a.eps {
        cfg.epsilon = v;
    }
    if let Some(v) = a.max_iter {
        cfg.max_iter = v;
    }
    cfg.anisotropic_tv = a.anisotropic_tv;
    cfg.auto_scale_steps = !a.no_auto_scale;
    Ok(cfg)
}

fn cmd_decompose(a: DecomposeArgs, trace_only: bool) -> Result<()> {
    let b0: Image<f64> = read_image(&a.input)?;
    let (h, w, ch) = b0.shape();
    let method = Method::parse(&a.method)?;
    let phi_spec = PhiSpec::parse(&a.phi)?;
    if method == Method::RlrpPps && phi_spec != PhiSpec::Identity {
        return Err(Error::Config("rlrp-pps requires --phi identity; use rlrp-pdhg".into()));
    }
    let phi = phi_spec.instantiate(a.phi_seed)?.materialize(h, w, ch)?;
    let mut cfg = build_config(&a)?;
    cfg.record_diagnostics = trace_only;
    if method == Method::Clrp {
        cfg.huber_c = f64::INFINITY;
    }

    let start = std::time::Instant::now();
    let result: DecompResult<f64> = match (method, &phi) {
        (Method::RlrpPps, _) | (Method::Clrp, DegradationOp::Identity) => pps_solve(&b0, &cfg)?,
        _ => pdhg_solve(&b0, &phi, &cfg)?,
    };
    let elapsed = start.elapsed().as_secs_f64();

    if trace_only {
        // tolerate a closed pipe (e.g. piping into head)
        use std::io::Write;
        let stdout = std::io::stdout();
        let mut out = stdout.lock();
        let mut emit = |line: String| writeln!(out, "{line}").is_ok();
        if !emit("iter,objective,tol,constraint_residual,diagnostic".into()) {
            return Ok(());
        }
        for (k, rec) in result.trace.iter().enumerate() {
            let diag = rec.diagnostic.map_or(String::new(), |d| format!("{d:.9e}"));
            let line = format!(
                "{},{:.9e},{:.9e},{:.9e},{}",
                k + 1,
                rec.objective,
                rec.tol,
                rec.constraint_residual,
                diag
            );
            if !emit(line) {
                break;
            }
        }
        return Ok(());
    }

    let restored = result.u.add(&result.v);
    for (tag, img) in [("u", &result.u), ("v", &result.v), ("restored", &restored)] {
        let out = default_out(&a.input, tag);
        write_image(img, &out)?;
    }
    let reference = match &a.reference {
        Some(path) => read_image(path)?,
        None => b0.clone(),
    };
    let row = MetricReport {
        image: a.input.display().to_string(),
        method: method.label().into(),
        phi: phi_spec.label(),
        noise: "unknown".into(),
        seed: a.phi_seed,
        snr_db: snr(&reference, &restored)?,
        ssim: ssim(&reference, &restored)?,
        iterations: result.iterations,
        time_s: elapsed,
    };
    println!("{}", MetricReport::CSV_HEADER);
    println!("{}", row.csv_row());
    Ok(())
}

fn cmd_benchmark(a: BenchmarkArgs) -> Result<()> {
    let text = match preset(&a.scenario) {
        Some(t) => t.to_string(),
        None => std::fs::read_to_string(&a.scenario)?,
    };
    let sc = BenchmarkScenario::parse(&text)?;
    let (rows, summaries) = run_benchmark(&sc)?;
    let csv = rows_to_csv(&rows);
    match &a.out {
        Some(path) => std::fs::write(path, &csv)?,
        None => print!("{csv}"),
    }
    let summary_csv = summaries_to_csv(&summaries);
    match &a.summary {
        Some(path) => std::fs::write(path, &summary_csv)?,
        None => {
            if a.out.is_some() {
                print!("{summary_csv}");
            } else {
                eprint!("{summary_csv}");
            }
        }
    }
    Ok(())
}
