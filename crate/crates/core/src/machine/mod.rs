//! The process machine: configurations, transitions, scheduling and runs.

mod config;
mod input;
mod step;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub use config::{config_size, Configuration, ProcessorState};
pub use input::{InputProvider, ScriptError, ScriptedInput};
pub use step::{
    apply, enabled_with, first_enabled_with, step, Action, Candidate, CandidateKind, Direction, Op, RuntimeError,
    Subject, TransitionRecord,
};

use crate::proclang::Program;
use crate::word::Word;

pub fn initial_config(prog: &Program) -> Configuration {
    Configuration::initial(prog)
}

/// Candidates offered by `provider`: at most one input word per channel,
/// the provider's next one.
pub fn enabled(c: &Configuration, provider: &mut dyn InputProvider) -> Vec<Candidate> {
    enabled_with(c, |ch| provider.peek(ch).into_iter().collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Policy {
    /// Lowest tag in lexicographic order fires first.
    #[default]
    FifoTag,
    Random(u64),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum RunStatus {
    Completed,
    StepLimit,
    RuntimeError { tag: Word, message: String },
}

#[derive(Debug, Clone)]
pub struct Run {
    pub initial: Configuration,
    pub steps: Vec<TransitionRecord>,
    /// `|C_0|, …, |C_n|`; one longer than `steps`.
    pub sizes: Vec<u64>,
    pub final_config: Configuration,
    pub status: RunStatus,
}

impl Run {
    /// Every visible output, in emission order, with its 0-based step index.
    pub fn outputs(&self) -> Vec<(usize, &str, &Word)> {
        self.steps
            .iter()
            .enumerate()
            .filter_map(|(i, r)| match &r.action {
                Action::Output { channel, word } => Some((i, channel.as_str(), word)),
                _ => None,
            })
            .collect()
    }

    pub fn inputs(&self) -> Vec<(usize, &str, &Word)> {
        self.steps
            .iter()
            .enumerate()
            .filter_map(|(i, r)| match &r.action {
                Action::Input { channel, word } => Some((i, channel.as_str(), word)),
                _ => None,
            })
            .collect()
    }

    pub fn total_weight(&self) -> u64 {
        self.steps.iter().map(|r| r.weight).sum()
    }
}

/// Steps until quiescence, the step limit, or a runtime error.
pub fn run(
    prog: &Program,
    provider: &mut dyn InputProvider,
    policy: Policy,
    step_limit: usize,
) -> Run {
    run_with(prog, provider, policy, step_limit, &mut |_| {})
}

/// [`run`], calling `observe` on every transition as it is taken.
pub fn run_with(
    prog: &Program,
    provider: &mut dyn InputProvider,
    policy: Policy,
    step_limit: usize,
    observe: &mut dyn FnMut(&TransitionRecord),
) -> Run {
    let initial = Configuration::initial(prog);
    let mut c = initial.clone();
    let mut steps = Vec::new();
    let mut sizes = vec![c.size()];
    let mut rng = match policy {
        Policy::Random(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        Policy::FifoTag => None,
    };
    let status = loop {
        if steps.len() >= step_limit {
            break RunStatus::StepLimit;
        }
        let pick = match rng.as_mut() {
            Some(r) => {
                let mut cands = enabled(&c, provider);
                if cands.is_empty() {
                    None
                } else {
                    Some(cands.swap_remove(r.gen_range(0..cands.len())))
                }
            }
            None => first_enabled_with(&c, |ch| provider.peek(ch).into_iter().collect()),
        };
        let Some(pick) = pick else {
            break RunStatus::Completed;
        };
        match apply(prog, &mut c, &pick) {
            Ok(rec) => {
                if let Action::Input { channel, .. } = &rec.action {
                    provider.take(channel);
                }
                observe(&rec);
                sizes.push(rec.post_size);
                steps.push(rec);
            }
            Err(e) => {
                break RunStatus::RuntimeError {
                    tag: e.tag,
                    message: e.error.to_string(),
                }
            }
        }
    };
    Run {
        initial,
        steps,
        sizes,
        final_config: c,
        status,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReplayError {
    #[error("no processor with tag {0:?}")]
    NoProcessor(Word),
    #[error("transition of {tag:?} is not enabled")]
    NotEnabled { tag: Word },
    #[error("replayed transition differs from the record")]
    Mismatch {
        expected: Box<TransitionRecord>,
        found: Box<TransitionRecord>,
    },
    #[error(transparent)]
    Runtime(#[from] RuntimeError),
}

/// Re-executes a recorded transition on `c`. The record's tag picks the
/// processor and its input action supplies the input word.
pub fn apply_record(
    prog: &Program,
    c: &mut Configuration,
    rec: &TransitionRecord,
) -> Result<(), ReplayError> {
    if !c.procs.contains_key(&rec.tag) {
        return Err(ReplayError::NoProcessor(rec.tag.clone()));
    }
    let kind = match &rec.action {
        Action::Input { word, .. } => CandidateKind::Input(word.clone()),
        _ => CandidateKind::Fire,
    };
    let ok = enabled_with(c, |_| match &rec.action {
        Action::Input { word, .. } => vec![word.clone()],
        _ => vec![],
    })
    .into_iter()
    .any(|cand| cand.tag == rec.tag && cand.kind == kind);
    if !ok {
        return Err(ReplayError::NotEnabled {
            tag: rec.tag.clone(),
        });
    }
    let cand = Candidate {
        tag: rec.tag.clone(),
        kind,
    };
    let found = apply(prog, c, &cand)?;
    if found.op != rec.op
        || found.weight != rec.weight
        || found.subject != rec.subject
        || found.action != rec.action
    {
        return Err(ReplayError::Mismatch {
            expected: Box::new(rec.clone()),
            found: Box::new(found),
        });
    }
    Ok(())
}

/// Every configuration `C_0 … C_n` of a run, rebuilt from its records.
pub fn replay_configs(prog: &Program, run: &Run) -> Result<Vec<Configuration>, ReplayError> {
    let mut c = run.initial.clone();
    let mut out = vec![c.clone()];
    for rec in &run.steps {
        apply_record(prog, &mut c, rec)?;
        out.push(c.clone());
    }
    Ok(out)
}
