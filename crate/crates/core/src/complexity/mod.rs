//! Cost reports per output event and the "works in time f and space g"
//! check over a finite suite of runs.
//!
//! A passing verdict is evidence about the tested runs only: the condition
//! quantifies over every output event of an infinite-state system.

mod bound;

use std::fmt;

use num_bigint::BigUint;
use serde::Serialize;
use thiserror::Error;

pub use bound::{eval_bound, parse_bound, BoundError, BoundExpr};

use crate::causality::{build_causal_dag, causal_inputs, input_size, space_cost, time_costs, CostError, SpaceMode};
use crate::machine::{run, Policy, Run, RunStatus, ScriptedInput};
use crate::proclang::Program;
use crate::word::Word;

/// Default bound on the downset size for exact space costs.
pub const DEFAULT_EXACT_LIMIT: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CausalInput {
    pub channel: String,
    pub word: Word,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OutputRecord {
    /// 1-based step number of the output event.
    pub index: usize,
    pub channel: String,
    pub word: Word,
    pub time: u64,
    pub space: u64,
    pub space_mode: SpaceMode,
    /// Exact space was requested but the downset was over the limit.
    pub space_fallback: bool,
    pub insize: u64,
    pub inputs: Vec<CausalInput>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CostReport {
    pub status: RunStatus,
    pub steps: usize,
    pub total_weight: u64,
    pub outputs: Vec<OutputRecord>,
}

/// One record per output event of `r`, a run of `prog`. In exact mode,
/// events whose downset exceeds `limit` get their observed space cost and
/// are flagged.
pub fn cost_report(prog: &Program, r: &Run, mode: SpaceMode, limit: usize) -> Result<CostReport, CostError> {
    let d = build_causal_dag(r);
    let times = time_costs(&d);
    let mut outputs = Vec::new();
    for e in d.output_events() {
        let ev = d.event(e);
        let crate::machine::Action::Output { channel, word } = &ev.etype.action else {
            unreachable!("output events carry an output action");
        };
        let (space, space_mode, space_fallback) = match space_cost(prog, r, &d, e, mode, limit) {
            Ok(s) => (s, mode, false),
            Err(CostError::LimitExceeded { .. }) => {
                (space_cost(prog, r, &d, e, SpaceMode::Observed, limit)?, SpaceMode::Observed, true)
            }
            Err(err) => return Err(err),
        };
        outputs.push(OutputRecord {
            index: ev.index,
            channel: channel.clone(),
            word: word.clone(),
            time: times[e],
            space,
            space_mode,
            space_fallback,
            insize: input_size(&d, e)?,
            inputs: causal_inputs(&d, e)
                .into_iter()
                .map(|(channel, word)| CausalInput { channel, word })
                .collect(),
        });
    }
    Ok(CostReport {
        status: r.status.clone(),
        steps: r.steps.len(),
        total_weight: r.total_weight(),
        outputs,
    })
}

impl CostReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

fn mode_name(m: SpaceMode) -> &'static str {
    match m {
        SpaceMode::Observed => "observed",
        SpaceMode::Exact => "exact",
    }
}

impl fmt::Display for OutputRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let inputs: Vec<String> = self.inputs.iter().map(|i| format!("{}:{}", i.channel, i.word.quoted())).collect();
        let fallback = if self.space_fallback { ",fallback" } else { "" };
        write!(
            f,
            "output {} ch={} word={} time={} space={}({}{}) insize={} inputs=[{}]",
            self.index,
            self.channel,
            self.word.quoted(),
            self.time,
            self.space,
            mode_name(self.space_mode),
            fallback,
            self.insize,
            inputs.join(",")
        )
    }
}

impl fmt::Display for CostReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for o in &self.outputs {
            writeln!(f, "{o}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Quantity {
    Time,
    Space,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    /// Position of the run in the suite; 0 for a single report.
    pub run: usize,
    pub event: usize,
    pub quantity: Quantity,
    pub insize: u64,
    #[serde(serialize_with = "as_decimal")]
    pub bound: BigUint,
    pub actual: u64,
}

fn as_decimal<S: serde::Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub runs: usize,
    pub outputs_checked: usize,
    pub violations: Vec<Violation>,
}

impl Verdict {
    pub fn pass(&self) -> bool {
        self.violations.is_empty()
    }

    fn merge(mut self, other: Verdict) -> Verdict {
        self.runs += other.runs;
        self.outputs_checked += other.outputs_checked;
        self.violations.extend(other.violations);
        self
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let scope = format!("runs={} outputs={} scope=tested-runs-only", self.runs, self.outputs_checked);
        if self.pass() {
            return write!(f, "verdict pass {scope}");
        }
        write!(f, "verdict fail {scope}")?;
        for v in &self.violations {
            let q = match v.quantity {
                Quantity::Time => "time",
                Quantity::Space => "space",
            };
            write!(f, " {q}@{}:{}: {} > {}(insize={})", v.run, v.event, v.actual, v.bound, v.insize)?;
        }
        Ok(())
    }
}

/// `t(e) ≤ f(i(e))` and `s(e) ≤ g(i(e))` for every output event.
pub fn works_in(rep: &CostReport, f: &BoundExpr, g: &BoundExpr) -> Verdict {
    let mut violations = Vec::new();
    for o in &rep.outputs {
        let checks = [(Quantity::Time, o.time, f), (Quantity::Space, o.space, g)];
        for (quantity, actual, b) in checks {
            let bound = eval_bound(b, o.insize);
            if BigUint::from(actual) > bound {
                violations.push(Violation {
                    run: 0,
                    event: o.index,
                    quantity,
                    insize: o.insize,
                    bound,
                    actual,
                });
            }
        }
    }
    Verdict {
        runs: 1,
        outputs_checked: rep.outputs.len(),
        violations,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvidenceOptions {
    pub policy: Policy,
    pub step_limit: usize,
    pub space_mode: SpaceMode,
    pub exact_limit: usize,
}

impl Default for EvidenceOptions {
    fn default() -> Self {
        EvidenceOptions {
            policy: Policy::FifoTag,
            step_limit: 1_000_000,
            space_mode: SpaceMode::Observed,
            exact_limit: DEFAULT_EXACT_LIMIT,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvidenceError {
    #[error("run {run}: runtime error at tag {tag}: {message}")]
    Runtime { run: usize, tag: Word, message: String },
    #[error("run {run}: {source}")]
    Cost { run: usize, source: CostError },
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassEvidence {
    pub reports: Vec<CostReport>,
    pub verdict: Verdict,
}

/// Runs `prog` on every script of the suite, one worker thread per script,
/// and aggregates the verdicts. Runs stopped by the step limit contribute the
/// outputs they produced.
pub fn class_evidence(
    prog: &Program,
    suite: &[ScriptedInput],
    f: &BoundExpr,
    g: &BoundExpr,
    opts: EvidenceOptions,
) -> Result<ClassEvidence, EvidenceError> {
    let results: Vec<Result<CostReport, EvidenceError>> = std::thread::scope(|s| {
        let handles: Vec<_> = suite
            .iter()
            .enumerate()
            .map(|(k, script)| {
                s.spawn(move || {
                    let mut script = script.clone();
                    let r = run(prog, &mut script, opts.policy, opts.step_limit);
                    if let RunStatus::RuntimeError { tag, message } = &r.status {
                        return Err(EvidenceError::Runtime {
                            run: k,
                            tag: tag.clone(),
                            message: message.clone(),
                        });
                    }
                    cost_report(prog, &r, opts.space_mode, opts.exact_limit)
                        .map_err(|source| EvidenceError::Cost { run: k, source })
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });
    let mut reports = Vec::new();
    let mut verdict = Verdict {
        runs: 0,
        outputs_checked: 0,
        violations: Vec::new(),
    };
    for (k, res) in results.into_iter().enumerate() {
        let rep = res?;
        let mut v = works_in(&rep, f, g);
        for x in &mut v.violations {
            x.run = k;
        }
        verdict = verdict.merge(v);
        reports.push(rep);
    }
    Ok(ClassEvidence { reports, verdict })
}
