//! Causal structure of a run: event types, independence, the dependence DAG
//! and the time / space / input-size cost of events.
//!
//! Events are identified by their 0-based position in the run; `Event::index`
//! is the 1-based step number, so event `e` goes from configuration
//! `sizes[e]` to `sizes[e + 1]`.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;
use thiserror::Error;

use crate::machine::{apply_record, Action, Configuration, Op, ReplayError, Run, Subject};
use crate::proclang::Program;
use crate::word::Word;

pub const DEFAULT_EXACT_LIMIT: usize = 12;

/// `(p, l, n)` together with what the transition touches and shows.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct EventType {
    pub tag: Word,
    pub op: Op,
    pub weight: u64,
    pub subject: Option<Subject>,
    pub action: Action,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EventKind {
    Input,
    Output,
    Internal,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Event {
    pub index: usize,
    pub etype: EventType,
    pub kind: EventKind,
}

/// Whether two event types commute.
///
/// Tags must be incomparable in the prefix order: a spawned child's events
/// depend on the spawn of its parent.
pub fn independent(a: &EventType, b: &EventType) -> bool {
    if a.tag.is_prefix_of(&b.tag) || b.tag.is_prefix_of(&a.tag) {
        return false;
    }
    let (l, r) = (a.op, b.op);
    if !l.is_communication() || !r.is_communication() {
        return true;
    }
    if l.is_internal_comm() != r.is_internal_comm() {
        return true;
    }
    if l.is_internal_comm() {
        return a.subject != b.subject;
    }
    l != r || a.subject != b.subject
}

#[derive(Debug, Clone)]
pub struct CausalDag {
    events: Vec<Event>,
    /// Immediate dependencies; their transitive closure is the causal order.
    preds: Vec<Vec<usize>>,
    sizes: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CostError {
    #[error("event {event} has {size} events below it, above the limit of {limit}")]
    LimitExceeded { event: usize, size: usize, limit: usize },
    #[error("event {0} is not an output event")]
    NotAnOutput(usize),
    #[error("no event {0}")]
    NoSuchEvent(usize),
    #[error("replay failed: {0}")]
    Replay(#[from] ReplayError),
    #[error("two linearizations of the same events reach different configurations")]
    DiamondViolation,
}

/// Which transitions share a resource that makes them dependent.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Resource {
    Queue(Word),
    External(Op, String),
}

fn resource(t: &EventType) -> Option<Resource> {
    match (&t.subject, t.op) {
        (Some(Subject::Queue(k)), _) => Some(Resource::Queue(k.clone())),
        (Some(Subject::External { channel, .. }), op) => Some(Resource::External(op, channel.clone())),
        (None, _) => None,
    }
}

pub fn build_causal_dag(run: &Run) -> CausalDag {
    let mut events = Vec::with_capacity(run.steps.len());
    let mut preds = Vec::with_capacity(run.steps.len());
    let mut last_by_tag: HashMap<Word, usize> = HashMap::new();
    let mut last_by_res: HashMap<Resource, usize> = HashMap::new();
    for (i, rec) in run.steps.iter().enumerate() {
        let etype = EventType {
            tag: rec.tag.clone(),
            op: rec.op,
            weight: rec.weight,
            subject: rec.subject.clone(),
            action: rec.action.clone(),
        };
        let mut ps = Vec::with_capacity(2);
        // Dependence on the same processor, or on the spawn that created it:
        // the latest event whose tag is a prefix of this one.
        let mut prefix = rec.tag.clone();
        let mut best: Option<usize> = None;
        loop {
            if let Some(&j) = last_by_tag.get(&prefix) {
                best = best.max(Some(j));
            }
            match prefix.len() {
                0 => break,
                n => prefix = Word::from_bits(prefix.iter().take(n - 1)),
            }
        }
        ps.extend(best);
        if let Some(res) = resource(&etype) {
            if let Some(j) = last_by_res.insert(res, i) {
                if Some(j) != best {
                    ps.push(j);
                }
            }
        }
        last_by_tag.insert(rec.tag.clone(), i);
        let kind = match rec.op {
            Op::Inp => EventKind::Input,
            Op::Out => EventKind::Output,
            _ => EventKind::Internal,
        };
        events.push(Event {
            index: i + 1,
            etype,
            kind,
        });
        preds.push(ps);
    }
    CausalDag {
        events,
        preds,
        sizes: run.sizes.clone(),
    }
}

impl CausalDag {
    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn event(&self, e: usize) -> &Event {
        &self.events[e]
    }

    pub fn preds(&self, e: usize) -> &[usize] {
        &self.preds[e]
    }

    pub fn sizes(&self) -> &[u64] {
        &self.sizes
    }

    pub fn output_events(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&e| self.events[e].kind == EventKind::Output)
            .collect()
    }

    /// `{ b | b ≤ e }`, ascending.
    pub fn downset(&self, e: usize) -> Vec<usize> {
        let mut seen = vec![false; e + 1];
        let mut stack = vec![e];
        seen[e] = true;
        while let Some(x) = stack.pop() {
            for &p in &self.preds[x] {
                if !seen[p] {
                    seen[p] = true;
                    stack.push(p);
                }
            }
        }
        (0..=e).filter(|&i| seen[i]).collect()
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        a <= b && self.downset(b).binary_search(&a).is_ok()
    }

    fn check(&self, e: usize) -> Result<(), CostError> {
        if e < self.len() {
            Ok(())
        } else {
            Err(CostError::NoSuchEvent(e))
        }
    }
}

/// Time cost of every event: the heaviest chain ending at it.
pub fn time_costs(d: &CausalDag) -> Vec<u64> {
    let mut t = vec![0u64; d.len()];
    for e in 0..d.len() {
        let below = d.preds[e].iter().map(|&p| t[p]).max().unwrap_or(0);
        t[e] = below + d.events[e].etype.weight;
    }
    t
}

pub fn time_cost(d: &CausalDag, e: usize) -> u64 {
    let down = d.downset(e);
    let mut t: BTreeMap<usize, u64> = BTreeMap::new();
    for &x in &down {
        let below = d.preds[x].iter().map(|p| t[p]).max().unwrap_or(0);
        t.insert(x, below + d.events[x].etype.weight);
    }
    t[&e]
}

/// Brute force: pairwise dependence closure, then every chain with maximum `e`.
pub fn oracle_time_cost(d: &CausalDag, e: usize, limit: usize) -> Result<u64, CostError> {
    d.check(e)?;
    let types: Vec<&EventType> = d.events[..=e].iter().map(|ev| &ev.etype).collect();
    // below[j][i]: i ≤ j in the closure of "earlier and dependent"
    let n = e + 1;
    let mut below = vec![vec![false; n]; n];
    for j in 0..n {
        below[j][j] = true;
        for i in 0..j {
            if !independent(types[i], types[j]) {
                for k in 0..=i {
                    if below[i][k] {
                        below[j][k] = true;
                    }
                }
            }
        }
    }
    let down: Vec<usize> = (0..n).filter(|&i| below[e][i]).collect();
    if down.len() > limit {
        return Err(CostError::LimitExceeded {
            event: e,
            size: down.len(),
            limit,
        });
    }
    let others: Vec<usize> = down.iter().copied().filter(|&i| i != e).collect();
    let mut best = 0;
    for mask in 0u64..(1u64 << others.len()) {
        let chain: Vec<usize> = (0..others.len())
            .filter(|b| mask >> b & 1 == 1)
            .map(|b| others[b])
            .collect();
        let total = chain
            .iter()
            .all(|&a| chain.iter().all(|&b| below[a.max(b)][a.min(b)]));
        if total {
            let w: u64 = chain.iter().map(|&i| types[i].weight).sum::<u64>() + types[e].weight;
            best = best.max(w);
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SpaceMode {
    /// The run's own linearization of the downset: a lower bound.
    Observed,
    /// Maximum over every linearization of the downset.
    Exact,
}

pub fn space_cost(
    prog: &Program,
    run: &Run,
    d: &CausalDag,
    e: usize,
    mode: SpaceMode,
    limit: usize,
) -> Result<u64, CostError> {
    d.check(e)?;
    let down = d.downset(e);
    match mode {
        SpaceMode::Observed => {
            let mut c = run.initial.clone();
            let mut best = c.size();
            for &x in &down {
                apply_record(prog, &mut c, &run.steps[x])?;
                best = best.max(c.size());
            }
            Ok(best)
        }
        SpaceMode::Exact => {
            if down.len() > limit || down.len() > 63 {
                return Err(CostError::LimitExceeded {
                    event: e,
                    size: down.len(),
                    limit,
                });
            }
            exact_space(prog, run, d, &down)
        }
    }
}

/// Walks the lattice of order ideals of `down`, replaying each event on top
/// of every ideal that enables it.
fn exact_space(prog: &Program, run: &Run, d: &CausalDag, down: &[usize]) -> Result<u64, CostError> {
    let pos: HashMap<usize, usize> = down.iter().enumerate().map(|(k, &x)| (x, k)).collect();
    let need: Vec<u64> = down
        .iter()
        .map(|x| d.preds[*x].iter().fold(0u64, |m, p| m | 1 << pos[p]))
        .collect();
    let mut layer: HashMap<u64, Configuration> = HashMap::new();
    layer.insert(0, run.initial.clone());
    let mut best = run.initial.size();
    for _ in 0..down.len() {
        let mut next: HashMap<u64, Configuration> = HashMap::new();
        for (mask, c) in &layer {
            for (k, &x) in down.iter().enumerate() {
                if mask >> k & 1 == 1 || need[k] & !mask != 0 {
                    continue;
                }
                let mut c2 = c.clone();
                apply_record(prog, &mut c2, &run.steps[x])?;
                let m2 = mask | 1 << k;
                match next.get(&m2) {
                    Some(prev) if *prev != c2 => return Err(CostError::DiamondViolation),
                    Some(_) => {}
                    None => {
                        best = best.max(c2.size());
                        next.insert(m2, c2);
                    }
                }
            }
        }
        layer = next;
    }
    Ok(best)
}

/// The inputs below `e`, in run order.
pub fn causal_inputs(d: &CausalDag, e: usize) -> Vec<(String, Word)> {
    d.downset(e)
        .into_iter()
        .filter_map(|x| match &d.events[x].etype.action {
            Action::Input { channel, word } => Some((channel.clone(), word.clone())),
            _ => None,
        })
        .collect()
}

/// `Σ (|w| + 1)` over input events below the output event `e`.
pub fn input_size(d: &CausalDag, e: usize) -> Result<u64, CostError> {
    d.check(e)?;
    if d.events[e].kind != EventKind::Output {
        return Err(CostError::NotAnOutput(e));
    }
    Ok(causal_inputs(d, e)
        .iter()
        .map(|(_, w)| w.len() as u64 + 1)
        .sum())
}
