//! INI-style simulation configs.
//!
//! ```text
//! # comment
//! [scheme]
//! K = 5
//! L = 5
//! T = 3
//!
//! [budgets]
//! values = 2, 4, 6
//!
//! [class]          ; repeat once per worker class
//! count = 17
//! lambda = 2.5
//! nu = 0.4
//!
//! [simulation]     ; optional
//! trials = 10000
//! seed = 0
//! task_model = worker_speed
//! ```

use std::str::FromStr;

use crate::error::{Error, Result};
use crate::poly::CodeShape;
use crate::simulator::{TaskModel, WorkerClass};

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub k: usize,
    pub l: usize,
    pub t: usize,
    pub budgets: Vec<usize>,
    pub classes: Vec<WorkerClass>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub task_model: TaskModel,
}

impl SweepConfig {
    /// Code shape with `m = 1`; the sweep picks `m` per budget.
    pub fn shape(&self) -> Result<CodeShape> {
        CodeShape::new(self.k, self.l, self.t, 1)
    }
}

#[derive(Default)]
struct PartialClass {
    line: usize,
    count: Option<usize>,
    lambda: Option<f64>,
    nu: Option<f64>,
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    None,
    Scheme,
    Budgets,
    Class,
    Simulation,
}

fn parse_value<T: FromStr>(line: usize, key: &str, raw: &str) -> Result<T> {
    raw.parse().map_err(|_| Error::Config {
        line,
        msg: format!("cannot parse {key} = {raw:?}"),
    })
}

fn finish_class(pc: PartialClass) -> Result<WorkerClass> {
    let missing = |what: &str| Error::Config {
        line: pc.line,
        msg: format!("[class] is missing {what}"),
    };
    let count = pc.count.ok_or_else(|| missing("count"))?;
    let lambda = pc.lambda.ok_or_else(|| missing("lambda"))?;
    let nu = pc.nu.ok_or_else(|| missing("nu"))?;
    WorkerClass::new(count, lambda, nu).map_err(|e| Error::Config {
        line: pc.line,
        msg: e.to_string(),
    })
}

pub fn parse_sweep_config(text: &str) -> Result<SweepConfig> {
    let mut section = Section::None;
    let (mut k, mut l, mut t) = (None, None, None);
    let mut budgets: Option<Vec<usize>> = None;
    let mut classes = Vec::new();
    let mut current: Option<PartialClass> = None;
    let mut trials = None;
    let mut seed = None;
    let mut task_model = TaskModel::default();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw
            .split(['#', ';'])
            .next()
            .unwrap_or("")
            .trim();
        if content.is_empty() {
            continue;
        }
        if let Some(name) = content.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            if let Some(pc) = current.take() {
                classes.push(finish_class(pc)?);
            }
            section = match name.trim() {
                "scheme" => Section::Scheme,
                "budgets" => Section::Budgets,
                "class" => {
                    current = Some(PartialClass {
                        line,
                        ..Default::default()
                    });
                    Section::Class
                }
                "simulation" => Section::Simulation,
                other => {
                    return Err(Error::Config {
                        line,
                        msg: format!("unknown section [{other}]"),
                    })
                }
            };
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(Error::Config {
                line,
                msg: format!("expected key = value, got {content:?}"),
            });
        };
        let (key, value) = (key.trim(), value.trim());
        let unknown = || Error::Config {
            line,
            msg: format!("unexpected key {key:?} here"),
        };
        match section {
            Section::None => {
                return Err(Error::Config {
                    line,
                    msg: "key outside of any section".into(),
                })
            }
            Section::Scheme => match key {
                "K" => k = Some(parse_value(line, key, value)?),
                "L" => l = Some(parse_value(line, key, value)?),
                "T" => t = Some(parse_value(line, key, value)?),
                _ => return Err(unknown()),
            },
            Section::Budgets => match key {
                "values" => {
                    budgets = Some(
                        value
                            .split(',')
                            .map(|v| parse_value(line, key, v.trim()))
                            .collect::<Result<_>>()?,
                    )
                }
                _ => return Err(unknown()),
            },
            Section::Class => {
                let pc = current.as_mut().expect("class section is open");
                match key {
                    "count" => pc.count = Some(parse_value(line, key, value)?),
                    "lambda" => pc.lambda = Some(parse_value(line, key, value)?),
                    "nu" => pc.nu = Some(parse_value(line, key, value)?),
                    _ => return Err(unknown()),
                }
            }
            Section::Simulation => match key {
                "trials" => trials = Some(parse_value(line, key, value)?),
                "seed" => seed = Some(parse_value(line, key, value)?),
                "task_model" => {
                    task_model = value.parse().map_err(|e: Error| Error::Config {
                        line,
                        msg: e.to_string(),
                    })?
                }
                _ => return Err(unknown()),
            },
        }
    }
    if let Some(pc) = current.take() {
        classes.push(finish_class(pc)?);
    }

    let end = text.lines().count();
    let missing = |what: &str| Error::Config {
        line: end,
        msg: format!("missing {what}"),
    };
    let cfg = SweepConfig {
        k: k.ok_or_else(|| missing("[scheme] K"))?,
        l: l.ok_or_else(|| missing("[scheme] L"))?,
        t: t.ok_or_else(|| missing("[scheme] T"))?,
        budgets: budgets.ok_or_else(|| missing("[budgets] values"))?,
        classes,
        trials,
        seed,
        task_model,
    };
    if cfg.classes.is_empty() {
        return Err(missing("at least one [class]"));
    }
    cfg.shape().map_err(|e| Error::Config {
        line: end,
        msg: e.to_string(),
    })?;
    Ok(cfg)
}
