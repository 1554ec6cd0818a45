//! Subcommand dispatch. Exit codes: 0 success, 1 configuration error,
//! 2 estimator failure (e.g. zero tail hits), 3 invariant violation in a
//! verify mode.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use super::config::{read_points_csv, ExperimentConfig};
use super::output::{configuration_csv, profile_csv, sha256_hex, OutputDir, Sidecar};
use crate::coupling::{resample_coupling_conditioned, ResampleCoupling};
use crate::diagnostics::{
    count_b_dense, derive_r_constants, move_event_log_bound, sparse_cubes, stirling_normalized,
    trajectory_bound_check, DiagnosticsRecord, LocalStatistic, RConstants,
};
use crate::errors::Error;
use crate::estimation::{
    chebyshev_lobatto_grid, convergence_profile, estimate_log_partition_naive,
    estimate_log_partition_ti, estimate_tail_logprob, hamiltonian_variant_gap, ProfileTask,
    TailDirection, TailSampler,
};
use crate::hamiltonian::BoundaryCondition;
use crate::interaction::{InteractionKind, InteractionModel};
use crate::rng::RngStream;
use crate::sampling::{
    mcmc_canonical, sample_binomial, sample_poisson, McmcConfig,
};
use crate::score::pair_count_sr;
use crate::torus::{Configuration, TorusWindow};
use crate::Result;

#[derive(Parser)]
#[command(
    name = "gibbs-ldp",
    about = "Canonical Gibbs point processes: sampling, couplings, diagnostics and estimation",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw configurations (binomial, Poisson, or canonical MCMC) as CSV dumps
    Sample(CommonArgs),
    /// Estimate the normalized log partition function
    FreeEnergy(CommonArgs),
    /// Estimate a score-tail log probability
    Tail(CommonArgs),
    /// Verify the move-coupling trajectory bounds on conditioned couplings
    CouplingVerify(CommonArgs),
    /// Dense-point and sparse-cube diagnostics on sampled configurations
    DenseCheck(CommonArgs),
    /// Verify the boundary-Hamiltonian gap caps
    BoundaryCheck(CommonArgs),
    /// Exact normalized log P(Poisson(n) = n) along a ladder
    Stirling(CommonArgs),
    /// Estimate convergence profiles along a doubling ladder
    Convergence(CommonArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Sample(_) => "sample",
            Command::FreeEnergy(_) => "free-energy",
            Command::Tail(_) => "tail",
            Command::CouplingVerify(_) => "coupling-verify",
            Command::DenseCheck(_) => "dense-check",
            Command::BoundaryCheck(_) => "boundary-check",
            Command::Stirling(_) => "stirling",
            Command::Convergence(_) => "convergence",
        }
    }

    fn args(&self) -> &CommonArgs {
        match self {
            Command::Sample(a)
            | Command::FreeEnergy(a)
            | Command::Tail(a)
            | Command::CouplingVerify(a)
            | Command::DenseCheck(a)
            | Command::BoundaryCheck(a)
            | Command::Stirling(a)
            | Command::Convergence(a) => a,
        }
    }
}

/// Flags mirror the config keys one-to-one and override them.
#[derive(Args)]
struct CommonArgs {
    /// Config file in `key = value` format
    #[arg(long)]
    config: Option<PathBuf>,
    /// model.kind: strauss|kwise|hardcore|truncated-hardcore
    #[arg(long)]
    model: Option<String>,
    /// model.gamma for the Strauss kind
    #[arg(long)]
    gamma: Option<f64>,
    /// model.r: interaction locality radius
    #[arg(long)]
    r: Option<f64>,
    /// model.R: hard-core radius
    #[arg(long = "R")]
    hc_radius: Option<f64>,
    /// model.k for the k-wise kind
    #[arg(long)]
    k: Option<usize>,
    /// model.s_cap: truncation cap
    #[arg(long = "s-cap")]
    s_cap: Option<f64>,
    /// score.kind: neighbor-count|clique|pair-indicator|constant
    #[arg(long)]
    score: Option<String>,
    #[arg(long = "score-r")]
    score_r: Option<f64>,
    #[arg(long = "score-k")]
    score_k: Option<usize>,
    /// bc.kind: none|boundary-1|boundary-2
    #[arg(long = "bc-kind")]
    bc_kind: Option<String>,
    /// bc.points_file: headerless CSV of d-vectors
    #[arg(long = "bc-points-file")]
    bc_points_file: Option<PathBuf>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    /// window.ladder: comma-separated sizes
    #[arg(long = "n-ladder")]
    n_ladder: Option<String>,
    #[arg(long = "burn-in")]
    burn_in: Option<usize>,
    #[arg(long)]
    thin: Option<usize>,
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long)]
    replicas: Option<usize>,
    #[arg(long = "beta-nodes")]
    beta_nodes: Option<usize>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    /// task.b: `auto` (= K_r + 1) or an integer
    #[arg(long)]
    b: Option<String>,
    /// task.direction: le|lt|gt
    #[arg(long)]
    direction: Option<String>,
    /// task.a: comma-separated thresholds (negative values allowed)
    #[arg(long, allow_hyphen_values = true)]
    a: Option<String>,
    /// task.method: naive|ti
    #[arg(long)]
    method: Option<String>,
    /// task.profile: partition|tail|stirling
    #[arg(long)]
    profile: Option<String>,
    /// task.process: binomial|poisson|mcmc
    #[arg(long)]
    process: Option<String>,
    /// task.count: configurations to dump
    #[arg(long)]
    count: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    stream: Option<u64>,
    /// out.dir
    #[arg(long)]
    out: Option<PathBuf>,
}

impl CommonArgs {
    fn resolve(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::from_file(path)?,
            None => ExperimentConfig::default(),
        };
        let mut set = |key: &str, value: Option<String>| -> Result<()> {
            if let Some(v) = value {
                cfg.set(key, &v)?;
            }
            Ok(())
        };
        set("model.kind", self.model.clone())?;
        set("model.gamma", self.gamma.map(|v| v.to_string()))?;
        set("model.r", self.r.map(|v| v.to_string()))?;
        set("model.R", self.hc_radius.map(|v| v.to_string()))?;
        set("model.k", self.k.map(|v| v.to_string()))?;
        set("model.s_cap", self.s_cap.map(|v| v.to_string()))?;
        set("score.kind", self.score.clone())?;
        set("score.r", self.score_r.map(|v| v.to_string()))?;
        set("score.k", self.score_k.map(|v| v.to_string()))?;
        set("bc.kind", self.bc_kind.clone())?;
        set(
            "bc.points_file",
            self.bc_points_file
                .as_ref()
                .map(|p| p.display().to_string()),
        )?;
        set("window.lambda", self.lambda.map(|v| v.to_string()))?;
        set("window.d", self.d.map(|v| v.to_string()))?;
        set("window.n", self.n.map(|v| v.to_string()))?;
        set("window.ladder", self.n_ladder.clone())?;
        set("sampler.burn_in", self.burn_in.map(|v| v.to_string()))?;
        set("sampler.thinning", self.thin.map(|v| v.to_string()))?;
        set("sampler.samples", self.samples.map(|v| v.to_string()))?;
        set("sampler.replicas", self.replicas.map(|v| v.to_string()))?;
        set("sampler.beta_nodes", self.beta_nodes.map(|v| v.to_string()))?;
        set("task.trials", self.trials.map(|v| v.to_string()))?;
        set("task.eps", self.eps.map(|v| v.to_string()))?;
        set("task.delta", self.delta.map(|v| v.to_string()))?;
        set("task.b", self.b.clone())?;
        set("task.direction", self.direction.clone())?;
        set("task.a", self.a.clone())?;
        set("task.method", self.method.clone())?;
        set("task.profile", self.profile.clone())?;
        set("task.process", self.process.clone())?;
        set("task.count", self.count.map(|v| v.to_string()))?;
        set("seed", self.seed.map(|v| v.to_string()))?;
        set("stream", self.stream.map(|v| v.to_string()))?;
        set("out.dir", self.out.as_ref().map(|p| p.display().to_string()))?;
        Ok(cfg)
    }
}

/// Entry point used by the binary and by tests. Never panics on bad input.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // clap handles --help/--version through this path with code 0.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    init_thread_pool();
    let started = Instant::now();
    let name = cli.command.name().to_string();
    match dispatch(&cli.command, &name, started) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("gibbs-ldp {name}: error: {e}");
            e.exit_code()
        }
    }
}

/// `GIBBS_LDP_THREADS` caps worker parallelism; results do not depend on it.
fn init_thread_pool() {
    if let Ok(raw) = std::env::var("GIBBS_LDP_THREADS") {
        if let Ok(threads) = raw.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(threads.max(1))
                .build_global();
        }
    }
}

fn dispatch(command: &Command, name: &str, started: Instant) -> Result<i32> {
    let cfg = command.args().resolve()?;
    let out = OutputDir::create(PathBuf::from(cfg.get("out.dir").unwrap_or("out")).as_path())?;
    let resolved = cfg.render();
    out.write_text("config.resolved", &resolved)?;
    let seed = cfg.u64_value("seed")?;
    let stream_id = cfg.u64_value("stream")?;
    let stream = RngStream::new(seed, stream_id);

    let mut outputs: Vec<String> = vec!["config.resolved".into()];
    let mut constants: Option<RConstants> = None;
    let code = match command {
        Command::Stirling(_) => cmd_stirling(&cfg, &out, &mut outputs)?,
        Command::Sample(_) => cmd_sample(&cfg, &out, stream, &mut outputs, &mut constants)?,
        Command::FreeEnergy(_) => cmd_free_energy(&cfg, &out, stream, &mut outputs, &mut constants)?,
        Command::Tail(_) => cmd_tail(&cfg, &out, stream, &mut outputs, &mut constants)?,
        Command::CouplingVerify(_) => {
            cmd_coupling_verify(&cfg, &out, stream, &mut outputs, &mut constants)?
        }
        Command::DenseCheck(_) => cmd_dense_check(&cfg, &out, stream, &mut outputs, &mut constants)?,
        Command::BoundaryCheck(_) => {
            cmd_boundary_check(&cfg, &out, stream, &mut outputs, &mut constants)?
        }
        Command::Convergence(_) => cmd_convergence(&cfg, &out, stream, &mut outputs, &mut constants)?,
    };
    let sidecar = Sidecar {
        subcommand: name.to_string(),
        config_sha256: sha256_hex(&resolved),
        seed,
        stream: stream_id,
        wall_time_seconds: started.elapsed().as_secs_f64(),
        derived_constants: constants,
        outputs,
    };
    out.write_json("sidecar.json", &sidecar)?;
    Ok(code)
}

fn mcmc_config(cfg: &ExperimentConfig) -> Result<McmcConfig> {
    McmcConfig::new(
        cfg.usize_value("sampler.burn_in")?,
        cfg.usize_value("sampler.thinning")?,
        cfg.usize_value("sampler.samples")? .max(1),
    )
}

fn cmd_stirling(cfg: &ExperimentConfig, out: &OutputDir, outputs: &mut Vec<String>) -> Result<i32> {
    let lambda = cfg.f64_value("window.lambda")?;
    let ladder = cfg.ladder()?;
    let rows: Vec<(usize, f64, f64, u64, &str)> = ladder
        .iter()
        .map(|&n| {
            let value = stirling_normalized(n as u64, lambda);
            (n, value, 0.0, 0u64, "stirling-exact")
        })
        .collect();
    out.write_text("stirling.csv", &profile_csv(&rows))?;
    outputs.push("stirling.csv".into());
    Ok(0)
}

fn cmd_sample(
    cfg: &ExperimentConfig,
    out: &OutputDir,
    stream: RngStream,
    outputs: &mut Vec<String>,
    constants: &mut Option<RConstants>,
) -> Result<i32> {
    let w = cfg.window()?;
    let count = cfg.usize_value("task.count")?.max(1);
    let process = cfg.get("task.process").unwrap_or("binomial").to_string();
    let mut rng = stream.rng();
    let configs: Vec<Configuration> = match process.as_str() {
        "binomial" => (0..count).map(|_| sample_binomial(&w, &mut rng)).collect(),
        "poisson" => (0..count).map(|_| sample_poisson(&w, &mut rng)).collect(),
        "mcmc" => {
            let model = cfg.model()?;
            let spec = cfg.hamiltonian_spec(&model)?;
            *constants = Some(derive_r_constants(w.intensity(), w.dim(), model.radius()));
            let mut mc = mcmc_config(cfg)?;
            mc.samples = count;
            let samples = mcmc_canonical(&model, &spec, &w, &mc, &mut rng)?;
            // Pair-count autocorrelation at lag 1, reported (not certified).
            let r = model.radius();
            let counts: Vec<f64> = samples
                .iter()
                .map(|s| pair_count_sr(s, r).map(|v| v as f64))
                .collect::<Result<_>>()?;
            out.write_json("mcmc_diagnostics.json", &serde_json::json!({
                "pair_count_mean": mean(&counts),
                "pair_count_lag1_autocorr": lag1_autocorr(&counts),
                "retained_samples": counts.len(),
            }))?;
            outputs.push("mcmc_diagnostics.json".into());
            samples
        }
        other => {
            return Err(Error::ConstraintViolated(format!(
                "task.process must be binomial|poisson|mcmc, got `{other}`"
            )))
        }
    };
    for (i, c) in configs.iter().enumerate() {
        let nm = format!("sample_{i:04}.csv");
        out.write_text(&nm, &configuration_csv(c))?;
        outputs.push(nm);
    }
    Ok(0)
}

fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn lag1_autocorr(xs: &[f64]) -> f64 {
    if xs.len() < 3 {
        return 0.0;
    }
    let m = mean(xs);
    let var: f64 = xs.iter().map(|x| (x - m) * (x - m)).sum();
    if var == 0.0 {
        return 0.0;
    }
    let cov: f64 = xs.windows(2).map(|p| (p[0] - m) * (p[1] - m)).sum();
    cov / var
}

fn cmd_free_energy(
    cfg: &ExperimentConfig,
    out: &OutputDir,
    stream: RngStream,
    outputs: &mut Vec<String>,
    constants: &mut Option<RConstants>,
) -> Result<i32> {
    let w = cfg.window()?;
    let model = cfg.model()?;
    let spec = cfg.hamiltonian_spec(&model)?;
    *constants = Some(derive_r_constants(w.intensity(), w.dim(), model.radius()));
    let est = match cfg.get("task.method").unwrap_or("naive") {
        "naive" => estimate_log_partition_naive(
            &model,
            &spec,
            &w,
            cfg.u64_value("sampler.samples")?,
            cfg.usize_value("sampler.replicas")?,
            stream,
        )?,
        "ti" => {
            let grid = chebyshev_lobatto_grid(cfg.usize_value("sampler.beta_nodes")?);
            estimate_log_partition_ti(&model, &spec, &w, &grid, &mcmc_config(cfg)?, stream)?
        }
        other => {
            return Err(Error::ConstraintViolated(format!(
                "task.method must be naive|ti, got `{other}`"
            )))
        }
    };
    let rows = vec![(
        w.point_budget(),
        est.normalized,
        est.normalized_se,
        est.log_z.n_samples,
        est.log_z.method.as_str(),
    )];
    out.write_text("free_energy.csv", &profile_csv(&rows))?;
    out.write_json("free_energy.json", &est)?;
    outputs.push("free_energy.csv".into());
    outputs.push("free_energy.json".into());
    Ok(0)
}

fn cmd_tail(
    cfg: &ExperimentConfig,
    out: &OutputDir,
    stream: RngStream,
    outputs: &mut Vec<String>,
    constants: &mut Option<RConstants>,
) -> Result<i32> {
    let w = cfg.window()?;
    let model = cfg.model()?;
    let spec = cfg.hamiltonian_spec(&model)?;
    *constants = Some(derive_r_constants(w.intensity(), w.dim(), model.radius()));
    let score = cfg.score()?;
    let thresholds: Vec<f64> = cfg
        .get("task.a")
        .ok_or_else(|| Error::ConstraintViolated("missing required key `task.a`".into()))?
        .split(',')
        .map(|p| {
            p.trim().parse::<f64>().map_err(|_| Error::TypeMismatch {
                key: "task.a".into(),
                message: "expected comma-separated reals".into(),
            })
        })
        .collect::<Result<_>>()?;
    if thresholds.len() != 1 {
        return Err(Error::ConstraintViolated(
            "the CLI tail task takes exactly one score, hence one threshold".into(),
        ));
    }
    let direction = match cfg.get("task.direction").unwrap_or("le") {
        "le" => TailDirection::Le,
        "lt" => TailDirection::Lt,
        "gt" => TailDirection::Gt,
        other => {
            return Err(Error::ConstraintViolated(format!(
                "task.direction must be le|lt|gt, got `{other}`"
            )))
        }
    };
    let trivial = matches!(model.kind(), InteractionKind::Strauss { gamma } if *gamma == 1.0);
    let sampler = if trivial {
        TailSampler::Direct {
            samples: cfg.u64_value("sampler.samples")?,
        }
    } else {
        TailSampler::Mcmc(mcmc_config(cfg)?)
    };
    let est = estimate_tail_logprob(
        &model,
        &spec,
        &[score],
        &thresholds,
        direction,
        &w,
        &sampler,
        stream,
    )?;
    let rows = vec![(
        w.point_budget(),
        est.value,
        est.std_error,
        est.n_samples,
        est.method.as_str(),
    )];
    out.write_text("tail.csv", &profile_csv(&rows))?;
    out.write_json("tail.json", &est)?;
    outputs.push("tail.csv".into());
    outputs.push("tail.json".into());
    Ok(0)
}

/// Coupling dump rows: base point coordinates plus mark, replacement flag and
/// dense flag.
fn coupling_csv(c: &ResampleCoupling, dense_ids: &[usize]) -> String {
    let d = c.base().window().dim();
    let dense: std::collections::HashSet<usize> = dense_ids.iter().copied().collect();
    let mut out = String::new();
    for i in 0..d {
        if i > 0 {
            out.push(',');
        }
        let _ = write!(out, "x{i}");
    }
    out.push_str(",u_mark,replaced,dense\n");
    for i in 0..c.len() {
        for (k, v) in c.base().point(i).iter().enumerate() {
            if k > 0 {
                out.push(',');
            }
            let _ = write!(out, "{v}");
        }
        let _ = writeln!(
            out,
            ",{},{},{}",
            c.mark(i),
            u8::from(c.replaced(i)),
            u8::from(dense.contains(&i))
        );
    }
    out
}

fn cmd_coupling_verify(
    cfg: &ExperimentConfig,
    out: &OutputDir,
    stream: RngStream,
    outputs: &mut Vec<String>,
    constants: &mut Option<RConstants>,
) -> Result<i32> {
    let w = cfg.window()?;
    let model = cfg.model()?;
    if model.is_hard_core() {
        return Err(Error::ConstraintViolated(
            "the move coupling applies to finite interactions; use a truncated kind".into(),
        ));
    }
    let consts = derive_r_constants(w.intensity(), w.dim(), model.radius());
    *constants = Some(consts);
    if w.point_budget() < consts.n_r {
        return Err(Error::WindowTooSmall {
            needed: consts.n_r,
            got: w.point_budget(),
        });
    }
    let b = cfg.dense_threshold(consts.k_r)?;
    if b <= consts.k_r {
        return Err(Error::ConstraintViolated(format!(
            "task.b = {b} must exceed K_r = {}",
            consts.k_r
        )));
    }
    let eps = cfg.f64_value("task.eps")?;
    let trials = cfg.u64_value("task.trials")?;
    let mut rng = stream.rng();
    let mut checked = 0u64;
    let mut skipped_crowded = 0u64;
    let mut bounded_failures = 0u64;
    let mut increasing_failures = 0u64;
    let mut partner_dense_failures = 0u64;
    let mut min_slack = f64::INFINITY;
    for trial in 0..trials {
        let base = sample_binomial(&w, &mut rng);
        let coupling = match resample_coupling_conditioned(base, eps, b, &consts, &mut rng) {
            Ok(c) => c,
            Err(Error::DensityExceedsCubes { .. }) => {
                skipped_crowded += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        let check = trajectory_bound_check(&coupling, LocalStatistic::Interaction(&model), &consts, b)?;
        if let Some(cl) = check.bounded_clause {
            if !cl.pass {
                bounded_failures += 1;
            }
            min_slack = min_slack.min(cl.slack);
        }
        if let Some(cl) = check.increasing_clause {
            if !cl.pass {
                increasing_failures += 1;
            }
            min_slack = min_slack.min(cl.slack);
        }
        let partner_dense = count_b_dense(&coupling.partner(), consts.r, b)?.count;
        if partner_dense != 0 {
            partner_dense_failures += 1;
        }
        if trial == 0 {
            let dense = count_b_dense(coupling.base(), consts.r, b)?;
            out.write_text("coupling_0000.csv", &coupling_csv(&coupling, &dense.dense_ids))?;
            outputs.push("coupling_0000.csv".into());
        }
        checked += 1;
    }
    let violations = bounded_failures + increasing_failures + partner_dense_failures;
    let report = serde_json::json!({
        "trials": trials,
        "checked": checked,
        "skipped_dense_exceeds_cubes": skipped_crowded,
        "b": b,
        "eps": eps,
        "bounded_clause_failures": bounded_failures,
        "increasing_clause_failures": increasing_failures,
        "partner_dense_failures": partner_dense_failures,
        "min_slack": if min_slack.is_finite() { min_slack } else { 0.0 },
        "constants": consts,
    });
    out.write_json("coupling_report.json", &report)?;
    outputs.push("coupling_report.json".into());
    Ok(if violations > 0 { 3 } else { 0 })
}

fn cmd_dense_check(
    cfg: &ExperimentConfig,
    out: &OutputDir,
    stream: RngStream,
    outputs: &mut Vec<String>,
    constants: &mut Option<RConstants>,
) -> Result<i32> {
    let w = cfg.window()?;
    let r = cfg.f64_value("model.r")?;
    let consts = derive_r_constants(w.intensity(), w.dim(), r);
    *constants = Some(consts);
    if w.point_budget() < consts.n_r {
        return Err(Error::WindowTooSmall {
            needed: consts.n_r,
            got: w.point_budget(),
        });
    }
    let b = cfg.dense_threshold(consts.k_r)?;
    let eps = cfg.f64_value("task.eps")?;
    let trials = cfg.u64_value("task.trials")?.max(1);
    let mut rng = stream.rng();
    let mut sparse_violations = 0u64;
    let mut min_margin = f64::INFINITY;
    let mut first: Option<DiagnosticsRecord> = None;
    for _ in 0..trials {
        let base = sample_binomial(&w, &mut rng);
        let n_r_dense = count_b_dense(&base, r, b)?.count;
        let n_2r_dense = count_b_dense(&base, 2.0 * r, b)?.count;
        let cubes = sparse_cubes(&base, &consts)?;
        let floor = w.point_budget() as f64 * consts.a_r;
        let margin = cubes.size() as f64 - floor;
        min_margin = min_margin.min(margin);
        if margin < 0.0 {
            sparse_violations += 1;
        }
        if first.is_none() {
            let bound_log = if n_r_dense < cubes.size() && eps > 0.0 && eps < 1.0 {
                Some(move_event_log_bound(
                    n_r_dense,
                    cubes.size(),
                    eps,
                    w.point_budget(),
                    r,
                    w.intensity(),
                    w.dim(),
                )?)
            } else {
                None
            };
            let event = resample_coupling_conditioned(base.clone(), eps, b, &consts, &mut rng)
                .ok()
                .map(|c| {
                    crate::coupling::detect_event_e_move(&c, b, &consts).map(|rep| rep.holds)
                })
                .transpose()?;
            first = Some(DiagnosticsRecord {
                n: w.point_budget(),
                lambda: w.intensity(),
                d: w.dim(),
                r,
                b,
                N_r: n_r_dense,
                N_2r: n_2r_dense,
                s_n: cubes.size(),
                A_r: consts.a_r,
                K_r: consts.k_r,
                n_r: consts.n_r,
                bound_log,
                event_E: event,
            });
        }
    }
    out.write_json("dense_report.json", &first)?;
    out.write_json(
        "dense_summary.json",
        &serde_json::json!({
            "trials": trials,
            "sparse_floor_violations": sparse_violations,
            "min_margin_over_n_a_r": min_margin,
        }),
    )?;
    outputs.push("dense_report.json".into());
    outputs.push("dense_summary.json".into());
    Ok(if sparse_violations > 0 { 3 } else { 0 })
}

fn cmd_boundary_check(
    cfg: &ExperimentConfig,
    out: &OutputDir,
    stream: RngStream,
    outputs: &mut Vec<String>,
    constants: &mut Option<RConstants>,
) -> Result<i32> {
    let w = cfg.window()?;
    let model = cfg.model()?;
    *constants = Some(derive_r_constants(w.intensity(), w.dim(), model.radius()));
    let bc = match cfg.get("bc.points_file") {
        Some(file) => {
            let pts = read_points_csv(std::path::Path::new(file), w.dim())?;
            BoundaryCondition::new(&w, model.radius(), &pts)?
        }
        None => {
            // No file given: draw a Poisson boundary pattern in the annulus
            // from the run's seed.
            let mut rng = stream.substream(1 << 20).rng();
            poisson_annulus(&w, model.radius(), &mut rng)?
        }
    };
    let eps = cfg.f64_value("task.eps")?;
    let samples = cfg.u64_value("sampler.samples")?;
    let summary = hamiltonian_variant_gap(&model, &bc, &w, eps, samples, stream)?;
    out.write_json("gap_report.json", &summary)?;
    outputs.push("gap_report.json".into());
    Ok(if summary.pass() { 0 } else { 3 })
}

/// Poisson(λ) pattern in the annulus of width `width` around the window.
fn poisson_annulus<R: rand::Rng + ?Sized>(
    w: &TorusWindow,
    width: f64,
    rng: &mut R,
) -> Result<BoundaryCondition> {
    let outer = w.side() + 2.0 * width;
    let volume = outer.powi(w.dim() as i32) - w.volume();
    let mean = w.intensity() * volume;
    let count = rand_distr::Distribution::sample(
        &rand_distr::Poisson::new(mean.max(f64::MIN_POSITIVE)).expect("positive mean"),
        rng,
    ) as usize;
    let mut pts = Vec::new();
    let mut p = vec![0.0; w.dim()];
    while pts.len() < count {
        for c in p.iter_mut() {
            *c = (rng.random::<f64>() - 0.5) * outer;
        }
        if !w.contains(&p) {
            pts.push(p.clone());
        }
    }
    BoundaryCondition::new(w, width, &pts)
}

fn cmd_convergence(
    cfg: &ExperimentConfig,
    out: &OutputDir,
    stream: RngStream,
    outputs: &mut Vec<String>,
    constants: &mut Option<RConstants>,
) -> Result<i32> {
    let lambda = cfg.f64_value("window.lambda")?;
    let dim = cfg.usize_value("window.d")?;
    let ladder = cfg.ladder()?;
    let profile_kind = cfg.get("task.profile").unwrap_or("partition").to_string();
    let model = if profile_kind == "stirling" {
        InteractionModel::strauss(1.0, 0.5)? // placeholder, never evaluated
    } else {
        cfg.model()?
    };
    let spec = cfg.hamiltonian_spec(&model)?;
    if profile_kind != "stirling" {
        *constants = Some(derive_r_constants(lambda, dim, model.radius()));
    }
    let task = match profile_kind.as_str() {
        "partition" => match cfg.get("task.method").unwrap_or("naive") {
            "naive" => ProfileTask::PartitionNaive {
                samples: cfg.u64_value("sampler.samples")?,
                replicas: cfg.usize_value("sampler.replicas")?,
            },
            "ti" => ProfileTask::PartitionTi {
                beta_nodes: cfg.usize_value("sampler.beta_nodes")?,
                mcmc: mcmc_config(cfg)?,
            },
            other => {
                return Err(Error::ConstraintViolated(format!(
                    "task.method must be naive|ti, got `{other}`"
                )))
            }
        },
        "tail" => {
            let score = cfg.score()?;
            let thresholds: Vec<f64> = cfg
                .get("task.a")
                .ok_or_else(|| Error::ConstraintViolated("missing required key `task.a`".into()))?
                .split(',')
                .map(|p| {
                    p.trim().parse::<f64>().map_err(|_| Error::TypeMismatch {
                        key: "task.a".into(),
                        message: "expected comma-separated reals".into(),
                    })
                })
                .collect::<Result<_>>()?;
            ProfileTask::Tail {
                scores: vec![score],
                thresholds,
                direction: TailDirection::Le,
                sampler: TailSampler::Direct {
                    samples: cfg.u64_value("sampler.samples")?,
                },
            }
        }
        "stirling" => ProfileTask::Stirling,
        other => {
            return Err(Error::ConstraintViolated(format!(
                "task.profile must be partition|tail|stirling, got `{other}`"
            )))
        }
    };
    let profile = convergence_profile(&task, &model, &spec, lambda, dim, &ladder, stream)?;
    let rows: Vec<(usize, f64, f64, u64, &str)> = profile
        .rungs
        .iter()
        .map(|(n, e)| (*n, e.value, e.std_error, e.n_samples, e.method.as_str()))
        .collect();
    out.write_text("profile.csv", &profile_csv(&rows))?;
    out.write_json(
        "profile.json",
        &serde_json::json!({
            "diffs": profile.diffs,
            "cauchy_stat": profile.cauchy_stat,
        }),
    )?;
    outputs.push("profile.csv".into());
    outputs.push("profile.json".into());
    Ok(0)
}
