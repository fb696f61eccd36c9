//! Benchmark scenarios: plain key=value files describing a ground truth,
//! degradation, noise family, solver methods, and seeds; the runner produces
//! one CSV row per (seed, method) plus median/IQR summary rows.

use std::path::PathBuf;
use std::time::Instant;

use crate::config::SolverConfig;
use crate::error::{Error, Result};
use crate::image::Image;
use crate::io::read_image;
use crate::metrics::{snr, ssim, MetricReport};
use crate::noise::{corrupt, NoiseFamily, NoiseSpec};
use crate::ops::{BlurKernel, DegradationOp};
use crate::pdhg::pdhg_solve;
use crate::pps::pps_solve;
use crate::synth::{compose, make_cartoon, make_texture};

/// Worker-count cap; read from the `RLRP_THREADS` environment variable.
pub const THREADS_ENV: &str = "RLRP_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Huber data term, splitting solver (identity degradation only).
    RlrpPps,
    /// Huber data term, primal-dual solver (any degradation).
    RlrpPdhg,
    /// Quadratic baseline (c = +∞); solver picked to match the degradation.
    Clrp,
}

impl Method {
    pub fn label(&self) -> &'static str {
        match self {
            Method::RlrpPps => "rlrp-pps",
            Method::RlrpPdhg => "rlrp-pdhg",
            Method::Clrp => "clrp",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "rlrp-pps" => Ok(Method::RlrpPps),
            "rlrp-pdhg" => Ok(Method::RlrpPdhg),
            "clrp" => Ok(Method::Clrp),
            other => Err(Error::Config(format!("unknown method '{other}'"))),
        }
    }
}

/// Degradation description before per-seed materialization.
#[derive(Debug, Clone, PartialEq)]
pub enum PhiSpec {
    Identity,
    Downsample { keep_probability: f64 },
    Blur { kernel_size: usize },
    MaskFile(PathBuf),
}

impl PhiSpec {
    pub fn parse(s: &str) -> Result<Self> {
        if s == "identity" {
            return Ok(PhiSpec::Identity);
        }
        if let Some(rest) = s.strip_prefix("downsample:") {
            let p: f64 = rest
                .parse()
                .map_err(|_| Error::Config(format!("bad keep probability '{rest}'")))?;
            return Ok(PhiSpec::Downsample { keep_probability: p });
        }
        if let Some(rest) = s.strip_prefix("blur:") {
            let k: usize =
                rest.parse().map_err(|_| Error::Config(format!("bad kernel size '{rest}'")))?;
            return Ok(PhiSpec::Blur { kernel_size: k });
        }
        if let Some(rest) = s.strip_prefix("mask:") {
            return Ok(PhiSpec::MaskFile(PathBuf::from(rest)));
        }
        Err(Error::Config(format!("unknown phi '{s}'")))
    }

    pub fn label(&self) -> String {
        match self {
            PhiSpec::Identity => "identity".into(),
            PhiSpec::Downsample { keep_probability } => format!("downsample:{keep_probability}"),
            PhiSpec::Blur { kernel_size } => format!("blur:{kernel_size}"),
            PhiSpec::MaskFile(p) => format!("mask:{}", p.display()),
        }
    }

    /// Instantiates the operator for one run. Random down-sampling is seeded
    /// per run so every seed sees a different (but reproducible) pattern.
    pub fn instantiate(&self, seed: u64) -> Result<DegradationOp<f64>> {
        match self {
            PhiSpec::Identity => Ok(DegradationOp::Identity),
            PhiSpec::Downsample { keep_probability } => Ok(DegradationOp::Downsample {
                keep_probability: *keep_probability,
                seed,
            }),
            PhiSpec::Blur { kernel_size } => {
                Ok(DegradationOp::Blur(BlurKernel::average(*kernel_size)))
            }
            PhiSpec::MaskFile(path) => Ok(DegradationOp::Mask(read_image(path)?)),
        }
    }
}

pub fn parse_noise_family(s: &str) -> Result<NoiseFamily> {
    if s == "cauchy" {
        return Ok(NoiseFamily::Cauchy);
    }
    if let Some(rest) = s.strip_prefix("student-t:") {
        let df: f64 =
            rest.parse().map_err(|_| Error::Config(format!("bad degrees of freedom '{rest}'")))?;
        return Ok(NoiseFamily::StudentT { df });
    }
    if let Some(rest) = s.strip_prefix("ged:") {
        let shape: f64 =
            rest.parse().map_err(|_| Error::Config(format!("bad ged shape '{rest}'")))?;
        return Ok(NoiseFamily::Ged { shape });
    }
    Err(Error::Config(format!("unknown noise family '{s}'")))
}

#[derive(Debug, Clone)]
pub struct BenchmarkScenario {
    pub name: String,
    /// Load this observation source image instead of generating one.
    pub input: Option<PathBuf>,
    pub size: usize,
    pub regions: usize,
    pub rank: usize,
    pub w_cartoon: f64,
    pub phi: PhiSpec,
    pub noise_family: NoiseFamily,
    pub noise_intensity: f64,
    /// Extra intensities for the sweep table; empty means no sweep.
    pub sweep_intensities: Vec<f64>,
    pub methods: Vec<Method>,
    pub seeds: Vec<u64>,
    pub cfg: SolverConfig<f64>,
}

impl Default for BenchmarkScenario {
    fn default() -> Self {
        Self {
            name: "scenario".into(),
            input: None,
            size: 64,
            regions: 3,
            rank: 2,
            w_cartoon: 0.7,
            phi: PhiSpec::Identity,
            noise_family: NoiseFamily::StudentT { df: 2.0 },
            noise_intensity: 0.1,
            sweep_intensities: Vec::new(),
            methods: vec![Method::RlrpPps, Method::Clrp],
            seeds: vec![1, 2, 3, 4, 5],
            cfg: SolverConfig::synthetic(),
        }
    }
}

impl BenchmarkScenario {
    /// Parses the plain `key = value` format; `[section]` headers and `#`
    /// comments are allowed and ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut sc = Self::default();
        let mut repeats: Option<usize> = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with('[') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key=value", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            let fnum = |v: &str| -> Result<f64> {
                if v == "inf" {
                    Ok(f64::INFINITY)
                } else {
                    v.parse().map_err(|_| Error::Config(format!("bad number '{v}' for {key}")))
                }
            };
            match key {
                "name" => sc.name = value.to_string(),
                "input" => sc.input = Some(PathBuf::from(value)),
                "size" => sc.size = fnum(value)? as usize,
                "regions" => sc.regions = fnum(value)? as usize,
                "rank" => sc.rank = fnum(value)? as usize,
                "w_cartoon" => sc.w_cartoon = fnum(value)?,
                "phi" => sc.phi = PhiSpec::parse(value)?,
                "noise_family" => sc.noise_family = parse_noise_family(value)?,
                "noise_intensity" => sc.noise_intensity = fnum(value)?,
                "sweep_intensities" => {
                    sc.sweep_intensities =
                        value.split(',').map(|v| fnum(v.trim())).collect::<Result<_>>()?
                }
                "methods" => {
                    sc.methods = value
                        .split(',')
                        .map(|v| Method::parse(v.trim()))
                        .collect::<Result<_>>()?
                }
                "seeds" => {
                    sc.seeds = value
                        .split(',')
                        .map(|v| {
                            v.trim().parse::<u64>().map_err(|_| {
                                Error::Config(format!("bad seed '{}'", v.trim()))
                            })
                        })
                        .collect::<Result<_>>()?
                }
                "repeats" => repeats = Some(fnum(value)? as usize),
                "tau" => sc.cfg.tau = fnum(value)?,
                "mu" => sc.cfg.mu = fnum(value)?,
                "c" => sc.cfg.huber_c = fnum(value)?,
                "beta" => sc.cfg.beta = fnum(value)?,
                "gamma" => sc.cfg.gamma = fnum(value)?,
                "r" => sc.cfg.r = fnum(value)?,
                "s" => sc.cfg.s = fnum(value)?,
                "sigma" => sc.cfg.sigma = fnum(value)?,
                "eta" => sc.cfg.eta = fnum(value)?,
                "eps" | "epsilon" => sc.cfg.epsilon = fnum(value)?,
                "max_iter" => sc.cfg.max_iter = fnum(value)? as usize,
                "anisotropic_tv" => sc.cfg.anisotropic_tv = value == "true",
                "auto_scale" => sc.cfg.auto_scale_steps = value != "false",
                other => {
                    return Err(Error::Config(format!(
                        "line {}: unknown key '{other}'",
                        lineno + 1
                    )))
                }
            }
        }
        if let Some(r) = repeats {
            if r != sc.seeds.len() {
                return Err(Error::Config(format!(
                    "repeats {} != number of seeds {}",
                    r,
                    sc.seeds.len()
                )));
            }
        }
        sc.validate()?;
        Ok(sc)
    }

    pub fn validate(&self) -> Result<()> {
        if self.methods.contains(&Method::RlrpPps) && self.phi != PhiSpec::Identity {
            return Err(Error::Config(
                "rlrp-pps requires phi = identity; use rlrp-pdhg".into(),
            ));
        }
        if self.seeds.is_empty() || self.methods.is_empty() {
            return Err(Error::Config("scenario needs at least one seed and one method".into()));
        }
        Ok(())
    }

    fn reference_for(&self, seed: u64) -> Result<Image<f64>> {
        match &self.input {
            Some(path) => read_image(path),
            None => {
                let cartoon = make_cartoon(self.size, self.size, self.regions, seed);
                let texture =
                    make_texture(self.size, self.size, self.rank, seed.wrapping_add(0x7e37));
                Ok(compose(&cartoon, &texture, self.w_cartoon)?.composite)
            }
        }
    }
}

/// Summary statistics over seeds for one (method, noise) group.
#[derive(Debug, Clone)]
pub struct SummaryRow {
    pub method: String,
    pub noise: String,
    pub median_snr_db: f64,
    pub iqr_snr_db: f64,
}

impl SummaryRow {
    pub const CSV_HEADER: &'static str = "method,noise,median_snr_db,iqr_snr_db";

    pub fn csv_row(&self) -> String {
        format!("{},{},{:.6},{:.6}", self.method, self.noise, self.median_snr_db, self.iqr_snr_db)
    }
}

fn solve_for_method(
    method: Method,
    b0: &Image<f64>,
    phi: &DegradationOp<f64>,
    cfg: &SolverConfig<f64>,
) -> Result<crate::metrics::DecompResult<f64>> {
    match method {
        Method::RlrpPps => pps_solve(b0, cfg),
        Method::RlrpPdhg => pdhg_solve(b0, phi, cfg),
        Method::Clrp => {
            let baseline = cfg.clone().quadratic_baseline();
            if matches!(phi, DegradationOp::Identity) {
                pps_solve(b0, &baseline)
            } else {
                pdhg_solve(b0, phi, &baseline)
            }
        }
    }
}

/// One seed of one scenario at one intensity: the observed-image row plus
/// one row per method. Solver failures become flagged (NaN-metric) rows
/// instead of aborting the remaining methods.
fn run_seed(sc: &BenchmarkScenario, seed: u64, intensity: f64) -> Result<Vec<MetricReport>> {
    let reference = sc.reference_for(seed)?;
    let (h, w, ch) = reference.shape();
    let phi = sc.phi.instantiate(seed)?.materialize(h, w, ch)?;
    let spec = NoiseSpec {
        family: sc.noise_family,
        intensity,
        seed: seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(1),
    };
    let b0 = corrupt(&reference, &phi, &spec)?;
    let noise_label = spec.label();

    let mut rows = Vec::new();
    rows.push(MetricReport {
        image: sc.name.clone(),
        method: "observed".into(),
        phi: sc.phi.label(),
        noise: noise_label.clone(),
        seed,
        snr_db: snr(&reference, &b0)?,
        ssim: ssim(&reference, &b0)?,
        iterations: 0,
        time_s: 0.0,
    });

    for &method in &sc.methods {
        let start = Instant::now();
        let row = match solve_for_method(method, &b0, &phi, &sc.cfg) {
            Ok(result) => {
                let restored = result.u.add(&result.v);
                MetricReport {
                    image: sc.name.clone(),
                    method: method.label().into(),
                    phi: sc.phi.label(),
                    noise: noise_label.clone(),
                    seed,
                    snr_db: snr(&reference, &restored)?,
                    ssim: ssim(&reference, &restored)?,
                    iterations: result.iterations,
                    time_s: start.elapsed().as_secs_f64(),
                }
            }
            Err(_) => MetricReport {
                image: sc.name.clone(),
                method: method.label().into(),
                phi: sc.phi.label(),
                noise: noise_label.clone(),
                seed,
                snr_db: f64::NAN,
                ssim: f64::NAN,
                iterations: 0,
                time_s: start.elapsed().as_secs_f64(),
            },
        };
        rows.push(row);
    }
    Ok(rows)
}

fn worker_cap(jobs: usize) -> usize {
    let from_env = std::env::var(THREADS_ENV).ok().and_then(|v| v.parse::<usize>().ok());
    let default = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    from_env.unwrap_or(default).clamp(1, jobs.max(1))
}

/// Runs every (intensity, seed) job, possibly on multiple worker threads,
/// and returns rows in deterministic seed order plus per-group summaries.
pub fn run_benchmark(sc: &BenchmarkScenario) -> Result<(Vec<MetricReport>, Vec<SummaryRow>)> {
    sc.validate()?;
    let mut intensities = vec![sc.noise_intensity];
    for &i in &sc.sweep_intensities {
        if !intensities.contains(&i) {
            intensities.push(i);
        }
    }
    let jobs: Vec<(f64, u64)> = intensities
        .iter()
        .flat_map(|&i| sc.seeds.iter().map(move |&s| (i, s)))
        .collect();

    let workers = worker_cap(jobs.len());
    let mut slots: Vec<Result<Vec<MetricReport>>> = Vec::with_capacity(jobs.len());
    if workers <= 1 {
        for &(intensity, seed) in &jobs {
            slots.push(run_seed(sc, seed, intensity));
        }
    } else {
        let mut out: Vec<Option<Result<Vec<MetricReport>>>> = (0..jobs.len()).map(|_| None).collect();
        let chunks: Vec<_> = out.chunks_mut(1).collect();
        let shared: std::sync::Mutex<Vec<_>> =
            std::sync::Mutex::new(chunks.into_iter().enumerate().collect::<Vec<_>>());
        std::thread::scope(|scope| {
            for _ in 0..workers {
                let shared = &shared;
                let jobs = &jobs;
                scope.spawn(move || loop {
                    let next = shared.lock().unwrap().pop();
                    let Some((idx, slot)) = next else { break };
                    let (intensity, seed) = jobs[idx];
                    slot[0] = Some(run_seed(sc, seed, intensity));
                });
            }
        });
        slots.extend(out.into_iter().map(|o| o.expect("job completed")));
    }

    let mut rows = Vec::new();
    for slot in slots {
        rows.extend(slot?);
    }

    // median / IQR of SNR per (method, noise) group, in first-seen order
    let mut groups: Vec<(String, String, Vec<f64>)> = Vec::new();
    for row in &rows {
        if row.method == "observed" || !row.snr_db.is_finite() {
            continue;
        }
        match groups.iter_mut().find(|(m, n, _)| *m == row.method && *n == row.noise) {
            Some((_, _, vals)) => vals.push(row.snr_db),
            None => groups.push((row.method.clone(), row.noise.clone(), vec![row.snr_db])),
        }
    }
    let summaries = groups
        .into_iter()
        .map(|(method, noise, mut vals)| {
            vals.sort_by(f64::total_cmp);
            SummaryRow {
                method,
                noise,
                median_snr_db: quantile(&vals, 0.5),
                iqr_snr_db: quantile(&vals, 0.75) - quantile(&vals, 0.25),
            }
        })
        .collect();
    Ok((rows, summaries))
}

/// Linear-interpolated quantile of a sorted slice.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] * (1.0 - frac) + sorted[hi] * frac
}

/// Writes the full CSV (header plus rows) as one string.
pub fn rows_to_csv(rows: &[MetricReport]) -> String {
    let mut out = String::from(MetricReport::CSV_HEADER);
    for row in rows {
        out.push('\n');
        out.push_str(&row.csv_row());
    }
    out.push('\n');
    out
}

pub fn summaries_to_csv(rows: &[SummaryRow]) -> String {
    let mut out = String::from(SummaryRow::CSV_HEADER);
    for row in rows {
        out.push('\n');
        out.push_str(&row.csv_row());
    }
    out.push('\n');
    out
}

/// Scenario text for one of the built-in presets, used by tests and as CLI
/// starting points.
pub fn preset(name: &str) -> Option<&'static str> {
    match name {
        "denoise" => Some(
            "[scenario]\nname = denoise\nsize = 64\nphi = identity\n\
             noise_family = student-t:2\nnoise_intensity = 0.1\n\
             methods = rlrp-pps, clrp\nseeds = 1,2,3,4,5\n\
             [config]\ntau = 0.1\nmu = 2\nc = 0.1\nbeta = 2\ngamma = 1.3\n\
             eps = 1e-4\nmax_iter = 300\n",
        ),
        "inpaint" => Some(
            "[scenario]\nname = inpaint\nsize = 64\nphi = downsample:0.4\n\
             noise_family = student-t:2\nnoise_intensity = 0.1\n\
             methods = rlrp-pdhg, clrp\nseeds = 1,2,3,4,5\n\
             [config]\ntau = 0.015\nmu = 0.2\nc = 0.02\nsigma = 0.4\neta = 0.4\n\
             eps = 1e-4\nmax_iter = 500\n",
        ),
        "deblur" => Some(
            "[scenario]\nname = deblur\nsize = 64\nphi = blur:4\n\
             noise_family = student-t:2\nnoise_intensity = 0.05\n\
             methods = rlrp-pdhg, clrp\nseeds = 1,2,3,4,5\n\
             [config]\ntau = 0.001\nmu = 0.1\nc = 0.03\nsigma = 0.6\neta = 0.6\n\
             eps = 1e-4\nmax_iter = 500\n",
        ),
        _ => None,
    }
}
