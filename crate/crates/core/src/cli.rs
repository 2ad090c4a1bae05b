//! Command-line front end. `main` only parses arguments and maps errors to
//! exit codes; everything else lives here so tests can drive it directly.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use crate::baseline::{gasp_max_m, gasp_rth, GaspParams};
use crate::config::parse_sweep_config;
use crate::error::{Error, Result};
use crate::field::MERSENNE_31;
use crate::matrix::{mat_mul, FieldMatrix};
use crate::poly::{support_degree_sum, CodeShape, EvalPoint, SchemeParams};
use crate::privacy::{coalitions, exhaustive_mi_check, perfect_privacy_check, PrivacyVerdict};
use crate::scheme::wire::{read_results, write_results, write_shares, Header};
use crate::scheme::{
    decode, encode, sample_points, sample_prefix_subset, upload_cost_bits, worker_compute,
    PartialResult, ResponseSet,
};
use crate::simulator::{
    budget_sweep, write_sweep_csv, SchemeKind, SimConfig, MAX_BUDGET, MIN_BUDGET,
};

pub const EXIT_OK: u8 = 0;
pub const EXIT_VALIDATION: u8 = 1;
pub const EXIT_RUNTIME: u8 = 2;
pub const EXIT_INCOMPLETABLE: u8 = 3;

pub const DEFAULT_TRIALS: usize = 10_000;

#[derive(Debug, Parser)]
#[command(
    name = "bipoly",
    version,
    about = "Private distributed matrix multiplication"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Encode random matrices, run every worker, decode from a random
    /// order-respecting subset and compare against the direct product.
    Demo(DemoArgs),
    /// Recovery thresholds of both schemes per upload budget.
    Thresholds(ThresholdArgs),
    /// Expected completion time per budget from a worker-class config.
    Simulate(SimulateArgs),
    /// Rank test of the mask coefficient matrices for every T-coalition.
    Privacy(PrivacyArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CodeArgs {
    #[arg(long = "K", default_value_t = 5)]
    pub k: usize,
    #[arg(long = "L", default_value_t = 5)]
    pub l: usize,
    #[arg(long = "T", default_value_t = 3)]
    pub t: usize,
    #[arg(long = "m", default_value_t = 5)]
    pub m: usize,
    #[arg(long = "N", default_value_t = 51)]
    pub n: usize,
    #[arg(long = "q", default_value_t = MERSENNE_31)]
    pub q: u64,
}

impl CodeArgs {
    fn params(&self) -> Result<SchemeParams> {
        SchemeParams::new(self.k, self.l, self.t, self.m, self.n, self.q)
    }
}

#[derive(Debug, Clone, Args)]
pub struct DemoArgs {
    #[command(flatten)]
    pub code: CodeArgs,
    #[arg(long, default_value_t = 100)]
    pub r: usize,
    #[arg(long, default_value_t = 100)]
    pub s: usize,
    #[arg(long, default_value_t = 100)]
    pub c: usize,
    #[arg(long, env = "BIPOLY_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Directory for shares.bin, results.bin and manifest.json.
    #[arg(long)]
    pub dump: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ThresholdArgs {
    #[arg(long = "K", default_value_t = 5)]
    pub k: usize,
    #[arg(long = "L", default_value_t = 5)]
    pub l: usize,
    #[arg(long = "T", default_value_t = 3)]
    pub t: usize,
    #[arg(long, value_delimiter = ',', default_values_t = MIN_BUDGET..=MAX_BUDGET)]
    pub budgets: Vec<usize>,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeChoice {
    Proposed,
    Gasp,
    Both,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    pub config: PathBuf,
    #[arg(long, value_enum, default_value_t = SchemeChoice::Both)]
    pub scheme: SchemeChoice,
    /// Overrides the config file.
    #[arg(long)]
    pub trials: Option<usize>,
    /// Overrides the config file.
    #[arg(long, env = "BIPOLY_SEED")]
    pub seed: Option<u64>,
    #[arg(long)]
    pub threads: Option<usize>,
    /// Write the CSV here (and a manifest next to it) instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct PrivacyArgs {
    #[command(flatten)]
    pub code: CodeArgs,
    /// Independent draws of evaluation points.
    #[arg(long, default_value_t = 10)]
    pub sweeps: usize,
    #[arg(long, env = "BIPOLY_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Force x_1 = 0 and give worker 2 the same point as worker 1.
    #[arg(long)]
    pub allow_degenerate: bool,
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub version: String,
    pub seed: u64,
    pub params: BTreeMap<String, Value>,
    pub outputs: Vec<String>,
}

impl RunManifest {
    fn new(subcommand: &str, seed: u64) -> Self {
        Self {
            subcommand: subcommand.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            seed,
            params: BTreeMap::new(),
            outputs: Vec::new(),
        }
    }

    fn param(&mut self, key: &str, v: impl Into<Value>) {
        self.params.insert(key.into(), v.into());
    }

    fn write(&self, path: &Path) -> Result<()> {
        let mut text =
            serde_json::to_string_pretty(self).map_err(|e| Error::Wire(e.to_string()))?;
        text.push('\n');
        fs::write(path, text)?;
        Ok(())
    }
}

/// Exit status for an error escaping [`run`].
pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Incompletable { .. } => EXIT_INCOMPLETABLE,
        Error::NotPrime(_)
        | Error::ModulusTooLarge(_)
        | Error::InvalidParams(_)
        | Error::IndivisibleDimensions { .. }
        | Error::InvalidOrder { .. }
        | Error::FieldTooSmall { .. }
        | Error::BudgetTooSmall(_)
        | Error::UnsupportedRegime(_)
        | Error::TooLargeToEnumerate(_)
        | Error::Config { .. } => EXIT_VALIDATION,
        _ => EXIT_RUNTIME,
    }
}

/// Runs one subcommand, writing its report to `out`. Returns the exit code
/// for outcomes that are not errors (a failed check is `EXIT_RUNTIME`).
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<u8> {
    match cli.command {
        Command::Demo(a) => demo(&a, out),
        Command::Thresholds(a) => thresholds(&a, out),
        Command::Simulate(a) => simulate(&a, out),
        Command::Privacy(a) => privacy(&a, out),
    }
}

fn check_divisible(r: usize, k: usize, c: usize, l: usize) -> Result<()> {
    if !r.is_multiple_of(k) {
        return Err(Error::IndivisibleDimensions {
            what: "r",
            dim: r,
            parts: k,
        });
    }
    if !c.is_multiple_of(l) {
        return Err(Error::IndivisibleDimensions {
            what: "c",
            dim: c,
            parts: l,
        });
    }
    Ok(())
}

fn demo(a: &DemoArgs, out: &mut dyn Write) -> Result<u8> {
    let p = a.code.params()?;
    let q = p.q;
    check_divisible(a.r, p.k, a.c, p.l)?;
    let header = Header::new(p, a.r, a.s, a.c)?;
    let rth = p.recovery_threshold();
    if p.n * p.m < rth {
        return Err(Error::Incompletable {
            capacity: p.n * p.m,
            threshold: rth,
        });
    }
    let shape = p.shape();

    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let ma = FieldMatrix::random(a.r, a.s, q, &mut rng);
    let mb = FieldMatrix::random(a.s, a.c, q, &mut rng);
    let enc = encode(&ma, &mb, &p, &mut rng)?;
    let results: Vec<PartialResult> = enc
        .shares
        .par_iter()
        .flat_map_iter(|sh| (0..p.m).map(move |o| worker_compute(sh, o, q)))
        .collect::<Result<_>>()?;

    let mut results_bin = Vec::new();
    write_results(&mut results_bin, &header, &results)?;
    if let Some(dir) = &a.dump {
        fs::create_dir_all(dir)?;
        let mut shares_bin = Vec::new();
        write_shares(&mut shares_bin, &header, &enc.shares)?;
        fs::write(dir.join("shares.bin"), &shares_bin)?;
        fs::write(dir.join("results.bin"), &results_bin)?;
        let mut man = RunManifest::new("demo", a.seed);
        for (key, v) in [("K", p.k), ("L", p.l), ("T", p.t), ("m", p.m), ("N", p.n)] {
            man.param(key, v);
        }
        man.param("q", p.q.q());
        for (key, v) in [("r", a.r), ("s", a.s), ("c", a.c)] {
            man.param(key, v);
        }
        man.outputs = vec!["shares.bin".into(), "results.bin".into()];
        man.write(&dir.join("manifest.json"))?;
    }
    let (_, reloaded) = read_results(&mut results_bin.as_slice())?;

    let subset = sample_prefix_subset(&ResponseSet::new(reloaded), rth, &mut rng)?;
    let workers_used = {
        let mut ids: Vec<usize> = subset.results.iter().map(|r| r.worker_id).collect();
        ids.sort_unstable();
        ids.dedup();
        ids.len()
    };
    let decoded = decode(&subset, &p)?;
    let direct = mat_mul(&ma, &mb, q)?;
    let ok = decoded.assembled == direct;

    let d = shape.failure_bound_d()?;
    writeln!(out, "field        {}", q)?;
    writeln!(
        out,
        "shape        K={} L={} T={} m={} N={}",
        p.k, p.l, p.t, p.m, p.n
    )?;
    writeln!(out, "matrices     A {}x{}, B {}x{}", a.r, a.s, a.s, a.c)?;
    writeln!(out, "threshold    {rth}")?;
    writeln!(out, "degree sum   {}", support_degree_sum(&shape.support()))?;
    writeln!(out, "bound d      {d}")?;
    writeln!(out, "upload bits  {}", upload_cost_bits(&p, a.r, a.s, a.c)?)?;
    writeln!(out, "decoded from {rth} results of {workers_used} workers")?;
    writeln!(
        out,
        "{}",
        if ok {
            "PASS"
        } else {
            "FAIL: decoded product differs"
        }
    )?;
    Ok(if ok { EXIT_OK } else { EXIT_RUNTIME })
}

fn open_output(path: &Option<PathBuf>, out: &mut dyn Write, body: &[u8]) -> Result<()> {
    match path {
        Some(p) => fs::write(p, body)?,
        None => out.write_all(body)?,
    }
    Ok(())
}

fn thresholds(a: &ThresholdArgs, out: &mut dyn Write) -> Result<u8> {
    let base = CodeShape::new(a.k, a.l, a.t, 1)?;
    let mut csv = Vec::new();
    writeln!(csv, "budget,proposed_m,proposed_rth,gasp_m,gasp_rth")?;
    for &budget in &a.budgets {
        let (pm, prth) = SchemeKind::Proposed.operating_point(budget, &base)?;
        let gm = gasp_max_m(budget)?;
        let grth = gasp_rth(&GaspParams::new(a.k, a.l, a.t, gm))?;
        writeln!(csv, "{budget},{pm},{prth},{gm},{grth}")?;
    }
    open_output(&a.out, out, &csv)?;
    if let Some(path) = &a.out {
        let mut man = RunManifest::new("thresholds", 0);
        man.param("K", a.k);
        man.param("L", a.l);
        man.param("T", a.t);
        man.param("budgets", a.budgets.clone());
        man.outputs = vec![file_name(path)];
        man.write(&manifest_path(path))?;
    }
    Ok(EXIT_OK)
}

fn file_name(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default()
}

fn manifest_path(csv: &Path) -> PathBuf {
    let mut name = csv
        .file_name()
        .map(|n| n.to_os_string())
        .unwrap_or_default();
    name.push(".manifest.json");
    csv.with_file_name(name)
}

fn simulate(a: &SimulateArgs, out: &mut dyn Write) -> Result<u8> {
    let text = fs::read_to_string(&a.config)?;
    let cfg = parse_sweep_config(&text)?;
    let trials = a.trials.or(cfg.trials).unwrap_or(DEFAULT_TRIALS);
    if trials == 0 {
        return Err(Error::InvalidParams("trials must be at least 1".into()));
    }
    let seed = a.seed.or(cfg.seed).unwrap_or(0);
    let shape = cfg.shape()?;
    let schemes: &[SchemeKind] = match a.scheme {
        SchemeChoice::Proposed => &[SchemeKind::Proposed],
        SchemeChoice::Gasp => &[SchemeKind::Gasp],
        SchemeChoice::Both => &[SchemeKind::Proposed, SchemeKind::Gasp],
    };
    let base = SimConfig {
        classes: cfg.classes.clone(),
        scheme_rth: 1,
        m: 1,
        trials,
        seed,
        task_model: cfg.task_model,
        record_trials: false,
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(a.threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::InvalidParams(e.to_string()))?;
    let mut rows = Vec::new();
    for &scheme in schemes {
        rows.extend(pool.install(|| budget_sweep(&base, &cfg.budgets, scheme, &shape))?);
    }

    let mut csv = Vec::new();
    write_sweep_csv(&mut csv, &rows)?;
    open_output(&a.out, out, &csv)?;
    if let Some(path) = &a.out {
        let mut man = RunManifest::new("simulate", seed);
        man.param("config", a.config.display().to_string());
        man.param("K", cfg.k);
        man.param("L", cfg.l);
        man.param("T", cfg.t);
        man.param("budgets", cfg.budgets.clone());
        man.param("workers", base.workers());
        man.param("trials", trials);
        man.param("task_model", cfg.task_model.to_string());
        man.param(
            "schemes",
            schemes
                .iter()
                .map(|s| s.name().to_string())
                .collect::<Vec<_>>(),
        );
        man.outputs = vec![file_name(path)];
        man.write(&manifest_path(path))?;
    }
    Ok(EXIT_OK)
}

fn describe_matrix(m: &FieldMatrix) -> String {
    (0..m.rows())
        .map(|r| format!("{:?}", m.row(r)))
        .collect::<Vec<_>>()
        .join(" ")
}

fn privacy(a: &PrivacyArgs, out: &mut dyn Write) -> Result<u8> {
    let p = a.code.params()?;
    let sets = coalitions(p.n, p.t);
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    writeln!(
        out,
        "checking {} coalitions of {} workers over {} point draws",
        sets.len(),
        p.t,
        a.sweeps
    )?;
    let mut failed = false;
    for sweep in 0..a.sweeps {
        let mut points = sample_points(&p, &mut rng)?;
        if a.allow_degenerate {
            points[0].x = 0;
            if points.len() > 1 {
                points[1] = points[0];
            }
        }
        let verdicts: Vec<(usize, PrivacyVerdict)> = sets
            .par_iter()
            .enumerate()
            .map(|(i, set)| {
                let pts: Vec<EvalPoint> = set.iter().map(|&w| points[w]).collect();
                perfect_privacy_check(&pts, &p).map(|v| (i, v))
            })
            .collect::<Result<_>>()?;
        let first_fail = verdicts.iter().find(|(_, v)| !v.passed());
        match first_fail {
            None => writeln!(out, "draw {sweep}: PASS")?,
            Some((
                i,
                PrivacyVerdict::Fail {
                    kind,
                    rank,
                    expected,
                    witness,
                },
            )) => {
                failed = true;
                let workers: Vec<usize> = sets[*i].iter().map(|w| w + 1).collect();
                let fails = verdicts.iter().filter(|(_, v)| !v.passed()).count();
                writeln!(out, "draw {sweep}: FAIL in {fails} coalitions")?;
                writeln!(
                    out,
                    "  workers {workers:?}: {kind:?}-mask matrix has rank {rank} < {expected}"
                )?;
                writeln!(out, "  witness {}", describe_matrix(witness))?;
            }
            Some(_) => unreachable!("only failures are selected"),
        }
        if sweep == 0 && p.t > 0 {
            let pts: Vec<EvalPoint> = sets[0].iter().map(|&w| points[w]).collect();
            match exhaustive_mi_check(&p, &pts, false) {
                Ok(mi) => writeln!(
                    out,
                    "  exact mutual information for workers 1..{}: {mi:.6} bits",
                    p.t
                )?,
                Err(Error::TooLargeToEnumerate(_)) => {}
                Err(e) => return Err(e),
            }
        }
    }
    writeln!(out, "{}", if failed { "FAIL" } else { "PASS" })?;
    Ok(if failed { EXIT_RUNTIME } else { EXIT_OK })
}
