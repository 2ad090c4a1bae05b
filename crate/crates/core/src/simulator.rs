//! Monte Carlo model of multi-message computation with shifted-exponential
//! sub-task times.
//!
//! Each worker runs up to `m` sub-tasks back to back and reports each result
//! the moment it finishes; communication is instantaneous. One trial ends
//! when the `scheme_rth`-th result reaches the master.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::distributions::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::baseline::{gasp_max_m, gasp_rth, GaspParams};
use crate::error::{Error, Result};
use crate::poly::CodeShape;
use crate::scheme::max_m_for_budget;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorkerClass {
    pub count: usize,
    /// Rate of the exponential part, 1/s.
    pub lambda: f64,
    /// Minimum duration of a sub-task, s.
    pub nu: f64,
}

impl WorkerClass {
    pub fn new(count: usize, lambda: f64, nu: f64) -> Result<Self> {
        if count == 0 {
            return Err(Error::InvalidParams(
                "worker class count must be positive".into(),
            ));
        }
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::InvalidParams(format!(
                "lambda must be > 0 (got {lambda})"
            )));
        }
        if !(nu.is_finite() && nu >= 0.0) {
            return Err(Error::InvalidParams(format!("nu must be >= 0 (got {nu})")));
        }
        Ok(Self { count, lambda, nu })
    }
}

/// How the durations of one worker's sub-tasks relate to each other.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TaskModel {
    /// One shifted-exponential draw per worker and trial; every sub-task of
    /// that worker takes that long.
    #[default]
    WorkerSpeed,
    /// A fresh independent draw for every sub-task.
    IidTasks,
}

impl FromStr for TaskModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "worker_speed" => Ok(Self::WorkerSpeed),
            "iid" | "iid_tasks" => Ok(Self::IidTasks),
            other => Err(Error::InvalidParams(format!(
                "unknown task model {other:?} (expected worker_speed or iid)"
            ))),
        }
    }
}

impl fmt::Display for TaskModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::WorkerSpeed => "worker_speed",
            Self::IidTasks => "iid",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub classes: Vec<WorkerClass>,
    pub scheme_rth: usize,
    pub m: usize,
    pub trials: usize,
    pub seed: u64,
    pub task_model: TaskModel,
    /// Keep every trial's completion time in [`SimResult::per_trial_times`].
    pub record_trials: bool,
}

impl SimConfig {
    pub fn workers(&self) -> usize {
        self.classes.iter().map(|c| c.count).sum()
    }

    fn validate(&self) -> Result<()> {
        if self.classes.is_empty() {
            return Err(Error::InvalidParams("no worker classes".into()));
        }
        for c in &self.classes {
            WorkerClass::new(c.count, c.lambda, c.nu)?;
        }
        if self.m == 0 || self.scheme_rth == 0 {
            return Err(Error::InvalidParams(
                "m and the threshold must be positive".into(),
            ));
        }
        if self.trials == 0 {
            return Err(Error::InvalidParams("trials must be at least 1".into()));
        }
        let capacity = self.workers() * self.m;
        if capacity < self.scheme_rth {
            return Err(Error::Incompletable {
                capacity,
                threshold: self.scheme_rth,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    pub mean_time: f64,
    /// Sample standard deviation over `sqrt(trials)`; zero for one trial.
    pub std_error: f64,
    pub completion_rate: f64,
    pub per_trial_times: Option<Vec<f64>>,
}

/// `nu + Exp(lambda)` by inverting the CDF on a draw from `(0, 1)`, so the
/// result is strictly greater than `nu`.
pub fn sample_task_time<R: Rng + ?Sized>(lambda: f64, nu: f64, rng: &mut R) -> f64 {
    let u: f64 = rng.sample(Open01);
    nu - u.ln() / lambda
}

#[derive(Debug, Clone, Copy)]
struct Event {
    time: f64,
    worker: usize,
    done: usize,
}

impl PartialEq for Event {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Event {}

impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Event {
    // min-heap on time, ties broken by worker id
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .time
            .total_cmp(&self.time)
            .then_with(|| other.worker.cmp(&self.worker))
    }
}

/// Completion time of one trial.
pub fn simulate_once<R: Rng + ?Sized>(cfg: &SimConfig, rng: &mut R) -> Result<f64> {
    cfg.validate()?;
    let workers: Vec<&WorkerClass> = cfg
        .classes
        .iter()
        .flat_map(|c| std::iter::repeat_n(c, c.count))
        .collect();
    // per-worker duration under the worker-speed model; drawn up front so the
    // stream layout does not depend on event order
    let speeds: Vec<f64> = match cfg.task_model {
        TaskModel::WorkerSpeed => workers
            .iter()
            .map(|c| sample_task_time(c.lambda, c.nu, rng))
            .collect(),
        TaskModel::IidTasks => Vec::new(),
    };
    let next_duration = |w: usize, rng: &mut R| match cfg.task_model {
        TaskModel::WorkerSpeed => speeds[w],
        TaskModel::IidTasks => sample_task_time(workers[w].lambda, workers[w].nu, rng),
    };

    let mut queue = BinaryHeap::with_capacity(workers.len());
    for w in 0..workers.len() {
        let time = next_duration(w, rng);
        queue.push(Event {
            time,
            worker: w,
            done: 1,
        });
    }
    let mut received = 0;
    while let Some(ev) = queue.pop() {
        received += 1;
        if received == cfg.scheme_rth {
            return Ok(ev.time);
        }
        if ev.done < cfg.m {
            let time = ev.time + next_duration(ev.worker, rng);
            queue.push(Event {
                time,
                worker: ev.worker,
                done: ev.done + 1,
            });
        }
    }
    unreachable!("capacity was checked against the threshold")
}

/// RNG for one trial: the seed selects the key, the trial index the stream.
pub fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

/// Mean completion time over `cfg.trials` independent trials, run in
/// parallel on the current rayon pool. Bit-identical for a given seed
/// regardless of thread count.
pub fn expected_time(cfg: &SimConfig) -> Result<SimResult> {
    cfg.validate()?;
    let times: Vec<f64> = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| simulate_once(cfg, &mut trial_rng(cfg.seed, trial)))
        .collect::<Result<_>>()?;
    let n = times.len() as f64;
    let mean = times.iter().sum::<f64>() / n;
    let std_error = if times.len() > 1 {
        let var = times.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (var / n).sqrt()
    } else {
        0.0
    };
    Ok(SimResult {
        mean_time: mean,
        std_error,
        completion_rate: 1.0,
        per_trial_times: cfg.record_trials.then_some(times),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeKind {
    Proposed,
    Gasp,
}

impl SchemeKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Proposed => "proposed",
            Self::Gasp => "gasp",
        }
    }

    /// `(m, R_th)` for a budget counted in matrix partitions per worker.
    pub fn operating_point(self, budget: usize, shape: &CodeShape) -> Result<(usize, usize)> {
        match self {
            Self::Proposed => {
                let m = max_m_for_budget(budget, shape.l)?;
                let rth = CodeShape::new(shape.k, shape.l, shape.t, m)?.recovery_threshold();
                Ok((m, rth))
            }
            Self::Gasp => {
                let m = gasp_max_m(budget)?;
                let rth = gasp_rth(&GaspParams::new(shape.k, shape.l, shape.t, m))?;
                Ok((m, rth))
            }
        }
    }
}

impl FromStr for SchemeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "proposed" => Ok(Self::Proposed),
            "gasp" => Ok(Self::Gasp),
            other => Err(Error::InvalidParams(format!(
                "unknown scheme {other:?} (expected proposed or gasp)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub scheme: SchemeKind,
    pub budget: usize,
    pub m: usize,
    pub r_th: usize,
    pub mean_time: f64,
    pub std_error: f64,
    pub trials: usize,
    pub seed: u64,
}

pub const MIN_BUDGET: usize = 2;
pub const MAX_BUDGET: usize = 10;

/// Runs [`expected_time`] at each budget's operating point. `base` supplies
/// the worker pool, trial count, seed and task model; its `m` and
/// `scheme_rth` are overwritten.
pub fn budget_sweep(
    base: &SimConfig,
    budgets: &[usize],
    scheme: SchemeKind,
    shape: &CodeShape,
) -> Result<Vec<SweepRow>> {
    budgets
        .iter()
        .map(|&budget| {
            if !(MIN_BUDGET..=MAX_BUDGET).contains(&budget) {
                return Err(Error::InvalidParams(format!(
                    "budget {budget} outside [{MIN_BUDGET}, {MAX_BUDGET}]"
                )));
            }
            let (m, r_th) = scheme.operating_point(budget, shape)?;
            let cfg = SimConfig {
                m,
                scheme_rth: r_th,
                record_trials: false,
                ..base.clone()
            };
            let res = expected_time(&cfg)?;
            Ok(SweepRow {
                scheme,
                budget,
                m,
                r_th,
                mean_time: res.mean_time,
                std_error: res.std_error,
                trials: cfg.trials,
                seed: cfg.seed,
            })
        })
        .collect()
}

pub const SWEEP_HEADER: &str = "scheme,budget,m,r_th,mean_time_s,std_err_s,trials,seed";

pub fn write_sweep_csv<W: Write>(w: &mut W, rows: &[SweepRow]) -> Result<()> {
    writeln!(w, "{SWEEP_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            r.scheme.name(),
            r.budget,
            r.m,
            r.r_th,
            format_sig(r.mean_time, 6),
            format_sig(r.std_error, 6),
            r.trials,
            r.seed
        )?;
    }
    Ok(())
}

/// `%g`-style formatting with `digits` significant digits.
pub fn format_sig(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        let mantissa = trim_fraction(mantissa);
        format!(
            "{mantissa}e{}{:02}",
            if exp < 0 { '-' } else { '+' },
            exp.abs()
        )
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_fraction(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}
