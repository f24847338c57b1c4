use std::fmt;

use serde::Serialize;

use super::config::{Configuration, ProcessorState};
use crate::proclang::{eval_bool, eval_str, Channel, Environment, EvalError, Process, Program};
use crate::word::Word;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Op {
    Nil,
    Rec,
    Snd,
    Rcv,
    Out,
    Inp,
    Cnd,
    Spn,
}

impl Op {
    pub fn is_communication(self) -> bool {
        matches!(self, Op::Snd | Op::Rcv | Op::Out | Op::Inp)
    }

    pub fn is_internal_comm(self) -> bool {
        matches!(self, Op::Snd | Op::Rcv)
    }

    pub fn is_external(self) -> bool {
        matches!(self, Op::Out | Op::Inp)
    }
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    In,
    Out,
}

/// What a communication transition touches.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Subject {
    Queue(Word),
    External { channel: String, dir: Direction },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Action {
    Tau,
    Input { channel: String, word: Word },
    Output { channel: String, word: Word },
}

impl Action {
    pub fn is_tau(&self) -> bool {
        matches!(self, Action::Tau)
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::Tau => f.write_str("tau"),
            Action::Input { channel, word } => write!(f, "{channel}?{}", word.quoted()),
            Action::Output { channel, word } => write!(f, "{channel}!{}", word.quoted()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct TransitionRecord {
    pub op: Op,
    pub tag: Word,
    pub weight: u64,
    pub subject: Option<Subject>,
    pub action: Action,
    pub post_size: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum CandidateKind {
    Fire,
    /// An input transition that would bind this word.
    Input(Word),
    /// The head construct cannot be evaluated; applying this aborts the run.
    Fault(EvalError),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Candidate {
    pub tag: Word,
    pub kind: CandidateKind,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("processor {tag:?}: {error}")]
pub struct RuntimeError {
    pub tag: Word,
    pub error: EvalError,
}

/// Candidates of `c` in tag order. `offers(channel)` lists the words the
/// environment is willing to supply on an external input channel.
pub fn enabled_with(
    c: &Configuration,
    offers: impl FnMut(&str) -> Vec<Word>,
) -> Vec<Candidate> {
    candidates(c, offers, false)
}

/// The first candidate in tag order, without evaluating the heads of the
/// processors after it.
pub fn first_enabled_with(
    c: &Configuration,
    offers: impl FnMut(&str) -> Vec<Word>,
) -> Option<Candidate> {
    candidates(c, offers, true).into_iter().next()
}

fn candidates(
    c: &Configuration,
    mut offers: impl FnMut(&str) -> Vec<Word>,
    first_only: bool,
) -> Vec<Candidate> {
    let mut out = Vec::new();
    for (tag, st) in &c.procs {
        if first_only && !out.is_empty() {
            break;
        }
        let mk = |kind| Candidate {
            tag: tag.clone(),
            kind,
        };
        match head_status(c, st) {
            Ok(Head::Ready) => out.push(mk(CandidateKind::Fire)),
            Ok(Head::Blocked) => {}
            Ok(Head::Input(ch)) => {
                out.extend(offers(ch).into_iter().map(|w| mk(CandidateKind::Input(w))))
            }
            Err(e) => out.push(mk(CandidateKind::Fault(e))),
        }
    }
    out
}

enum Head<'a> {
    Ready,
    Blocked,
    Input(&'a str),
}

fn head_status<'a>(
    c: &Configuration,
    st: &'a ProcessorState,
) -> Result<Head<'a>, EvalError> {
    let m = &st.env;
    Ok(match &*st.process {
        Process::Nil | Process::Par(..) => Head::Ready,
        Process::Call(_, args) => {
            for a in args {
                eval_str(a, m)?;
            }
            Head::Ready
        }
        Process::Send(ch, e, _) => {
            if let Channel::Internal(k) = ch {
                eval_str(k, m)?;
            }
            eval_str(e, m)?;
            Head::Ready
        }
        Process::Recv(Channel::Internal(k), _, _) => {
            let key = eval_str(k, m)?;
            if c.queues.contains_key(&key) {
                Head::Ready
            } else {
                Head::Blocked
            }
        }
        Process::Recv(Channel::ExternalIn(ch), _, _) => Head::Input(ch),
        Process::Recv(Channel::ExternalOut(_), _, _) => Head::Blocked,
        Process::Cond(b, _, _) => {
            eval_bool(b, m)?;
            Head::Ready
        }
    })
}

/// Applies one transition in place and returns its record.
///
/// Panics if the candidate's processor does not exist or the candidate does
/// not match the processor's head (e.g. `Input` for a non-input head).
pub fn apply(
    prog: &Program,
    c: &mut Configuration,
    cand: &Candidate,
) -> Result<TransitionRecord, RuntimeError> {
    let fail = |error| RuntimeError {
        tag: cand.tag.clone(),
        error,
    };
    if let CandidateKind::Fault(e) = &cand.kind {
        return Err(fail(e.clone()));
    }
    let tag = cand.tag.clone();
    let st = c.procs.remove(&tag).expect("candidate names a live processor");
    let env_before = st.env.size();
    let record = |c: &mut Configuration, op, weight, subject, action| {
        let rec = TransitionRecord {
            op,
            tag: tag.clone(),
            weight,
            subject,
            action,
            post_size: c.size,
        };
        Ok(rec)
    };
    match &*st.process {
        Process::Nil => {
            c.size -= env_before;
            record(c, Op::Nil, 1, None, Action::Tau)
        }
        Process::Call(name, args) => {
            let def = prog.def(name).expect("validated program");
            let mut env = Environment::new();
            let mut w = 1;
            for (x, a) in def.params.iter().zip(args) {
                let v = eval_str(a, &st.env).map_err(|e| restore(c, &tag, &st, e, &fail))?;
                env.insert(x.clone(), v);
                w += a.cost();
            }
            c.size = c.size - env_before + env.size();
            c.procs.insert(
                tag.clone(),
                ProcessorState {
                    process: def.body.clone(),
                    env,
                },
            );
            record(c, Op::Rec, w, None, Action::Tau)
        }
        Process::Send(ch, e, k) => {
            let v = eval_str(e, &st.env).map_err(|er| restore(c, &tag, &st, er, &fail))?;
            let (op, w, subject, action) = match ch {
                Channel::Internal(key) => {
                    let kv = eval_str(key, &st.env).map_err(|er| restore(c, &tag, &st, er, &fail))?;
                    c.size += v.len() as u64;
                    c.queues.entry(kv.clone()).or_default().push_back(v);
                    (Op::Snd, 1 + key.cost() + e.cost(), Subject::Queue(kv), Action::Tau)
                }
                Channel::ExternalOut(name) | Channel::ExternalIn(name) => (
                    Op::Out,
                    1 + e.cost(),
                    Subject::External {
                        channel: name.clone(),
                        dir: Direction::Out,
                    },
                    Action::Output {
                        channel: name.clone(),
                        word: v,
                    },
                ),
            };
            c.procs.insert(
                tag.clone(),
                ProcessorState {
                    process: k.clone(),
                    env: st.env,
                },
            );
            record(c, op, w, Some(subject), action)
        }
        Process::Recv(ch, x, k) => {
            let (op, s, w, subject, action) = match (ch, &cand.kind) {
                (Channel::Internal(key), CandidateKind::Fire) => {
                    let kv = eval_str(key, &st.env).map_err(|er| restore(c, &tag, &st, er, &fail))?;
                    let q = c.queues.get_mut(&kv).expect("receive from a nonempty queue");
                    let s = q.pop_front().expect("stored queues are nonempty");
                    if q.is_empty() {
                        c.queues.remove(&kv);
                    }
                    c.size -= s.len() as u64;
                    let w = 1 + key.cost() + s.len() as u64;
                    (Op::Rcv, s, w, Subject::Queue(kv), Action::Tau)
                }
                (Channel::ExternalIn(name), CandidateKind::Input(s)) => (
                    Op::Inp,
                    s.clone(),
                    1 + s.len() as u64,
                    Subject::External {
                        channel: name.clone(),
                        dir: Direction::In,
                    },
                    Action::Input {
                        channel: name.clone(),
                        word: s.clone(),
                    },
                ),
                _ => panic!("candidate does not match the receive prefix"),
            };
            let mut env = st.env;
            env.insert(x.clone(), s);
            c.size = c.size - env_before + env.size();
            c.procs.insert(
                tag.clone(),
                ProcessorState {
                    process: k.clone(),
                    env,
                },
            );
            record(c, op, w, Some(subject), action)
        }
        Process::Cond(b, p, q) => {
            let v = eval_bool(b, &st.env).map_err(|er| restore(c, &tag, &st, er, &fail))?;
            let next = if v { p.clone() } else { q.clone() };
            c.procs.insert(
                tag.clone(),
                ProcessorState {
                    process: next,
                    env: st.env,
                },
            );
            record(c, Op::Cnd, 1 + b.cost(), None, Action::Tau)
        }
        Process::Par(p, q) => {
            c.size += env_before;
            c.procs.insert(
                tag.child(false),
                ProcessorState {
                    process: p.clone(),
                    env: st.env.clone(),
                },
            );
            c.procs.insert(
                tag.child(true),
                ProcessorState {
                    process: q.clone(),
                    env: st.env,
                },
            );
            record(c, Op::Spn, 1 + env_before, None, Action::Tau)
        }
    }
}

fn restore(
    c: &mut Configuration,
    tag: &Word,
    st: &ProcessorState,
    e: EvalError,
    fail: &impl Fn(EvalError) -> RuntimeError,
) -> RuntimeError {
    c.procs.insert(tag.clone(), st.clone());
    fail(e)
}

/// Functional variant of [`apply`].
pub fn step(
    prog: &Program,
    c: &Configuration,
    cand: &Candidate,
) -> Result<(Configuration, TransitionRecord), RuntimeError> {
    let mut next = c.clone();
    let rec = apply(prog, &mut next, cand)?;
    Ok((next, rec))
}
