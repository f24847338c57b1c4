//! First-principles recomputation of weights, sizes, the causal order and
//! the time and space costs of events.

use procmachine::machine::{step, Action, Candidate, CandidateKind, Configuration, Op, Run, Subject, TransitionRecord};
use procmachine::proclang::{BoolExpr, Channel, Environment, Process, Program, StrExpr};
use procmachine::Word;

pub fn value(e: &StrExpr, env: &Environment) -> Word {
    match e {
        StrExpr::Var(x) => env.get(x).expect("bound").clone(),
        StrExpr::Lit(w) => w.clone(),
        StrExpr::Prepend0(e) => value(e, env).with_prefix_bit(false),
        StrExpr::Prepend1(e) => value(e, env).with_prefix_bit(true),
        StrExpr::Tail(e) => Word::from_bits(value(e, env).iter().skip(1)),
    }
}

pub fn cost(e: &StrExpr) -> u64 {
    match e {
        StrExpr::Var(_) => 1,
        StrExpr::Lit(w) => w.len() as u64 + 1,
        StrExpr::Prepend0(e) | StrExpr::Prepend1(e) | StrExpr::Tail(e) => 1 + cost(e),
    }
}

pub fn bool_cost(b: &BoolExpr) -> u64 {
    match b {
        BoolExpr::True | BoolExpr::False => 1,
        BoolExpr::IsZero(e) | BoolExpr::IsEmpty(e) => 1 + cost(e),
    }
}

pub fn env_size(env: &Environment) -> u64 {
    env.iter().map(|(_, w)| w.len() as u64 + 1).sum()
}

/// Environments plus the lengths of every queued word.
pub fn size(c: &Configuration) -> u64 {
    let envs: u64 = c.processors().values().map(|p| env_size(&p.env)).sum();
    let queues: u64 = c.queues().values().flatten().map(|w| w.len() as u64).sum();
    envs + queues
}

/// The operation and weight the record of processor `tag` must carry when it
/// fires in `c`. `word` is the word an input binds.
pub fn expected(c: &Configuration, tag: &Word, word: Option<&Word>) -> (Op, u64) {
    let st = &c.processors()[tag];
    match &*st.process {
        Process::Nil => (Op::Nil, 1),
        Process::Call(_, args) => (Op::Rec, 1 + args.iter().map(cost).sum::<u64>()),
        Process::Send(Channel::Internal(k), e, _) => (Op::Snd, 1 + cost(k) + cost(e)),
        Process::Send(_, e, _) => (Op::Out, 1 + cost(e)),
        Process::Recv(Channel::Internal(k), _, _) => {
            let key = value(k, &st.env);
            let front = c.queue(&key).and_then(|q| q.front()).expect("a receive fires on a nonempty queue");
            (Op::Rcv, 1 + cost(k) + front.len() as u64)
        }
        Process::Recv(..) => (Op::Inp, 1 + word.expect("input word").len() as u64),
        Process::Cond(b, ..) => (Op::Cnd, 1 + bool_cost(b)),
        Process::Par(..) => (Op::Spn, 1 + env_size(&st.env)),
    }
}

fn input_word(rec: &TransitionRecord) -> Option<&Word> {
    match &rec.action {
        Action::Input { word, .. } => Some(word),
        _ => None,
    }
}

pub fn candidate(rec: &TransitionRecord) -> Candidate {
    Candidate {
        tag: rec.tag.clone(),
        kind: match input_word(rec) {
            Some(w) => CandidateKind::Input(w.clone()),
            None => CandidateKind::Fire,
        },
    }
}

/// Replays every record of `r` from its initial configuration, checking op,
/// weight and post-size against [`expected`] and [`size`]. Returns the number
/// of mismatches.
pub fn weight_size_mismatches(prog: &Program, r: &Run) -> usize {
    let mut bad = usize::from(r.sizes.first() != Some(&size(&r.initial)));
    bad += usize::from(r.sizes.len() != r.steps.len() + 1);
    let mut c = r.initial.clone();
    for (k, rec) in r.steps.iter().enumerate() {
        let (op, w) = expected(&c, &rec.tag, input_word(rec));
        let (next, again) = step(prog, &c, &candidate(rec)).expect("recorded steps replay");
        let post = size(&next);
        bad += usize::from(op != rec.op || w != rec.weight || post != rec.post_size || &again != rec);
        bad += usize::from(r.sizes.get(k + 1) != Some(&post));
        c = next;
    }
    bad
}

fn comparable(a: &Word, b: &Word) -> bool {
    a.is_prefix_of(b) || b.is_prefix_of(a)
}

fn comm(op: Op) -> bool {
    matches!(op, Op::Snd | Op::Rcv | Op::Out | Op::Inp)
}

fn external_channel(s: &Option<Subject>) -> Option<&str> {
    match s {
        Some(Subject::External { channel, .. }) => Some(channel),
        _ => None,
    }
}

/// Dependence of two transitions, written out case by case.
pub fn dependent(a: &TransitionRecord, b: &TransitionRecord) -> bool {
    if comparable(&a.tag, &b.tag) {
        return true;
    }
    if !comm(a.op) || !comm(b.op) {
        return false;
    }
    let internal = |op| matches!(op, Op::Snd | Op::Rcv);
    match (internal(a.op), internal(b.op)) {
        (true, true) => a.subject == b.subject,
        (false, false) => a.op == b.op && external_channel(&a.subject) == external_channel(&b.subject),
        _ => false,
    }
}

/// `below[j][i]` iff step `i` is causally below step `j` (reflexive).
pub fn causal_order(r: &Run) -> Vec<Vec<bool>> {
    let n = r.steps.len();
    let mut below = vec![vec![false; n]; n];
    for j in 0..n {
        below[j][j] = true;
        for i in 0..j {
            if dependent(&r.steps[i], &r.steps[j]) {
                let row = below[i].clone();
                for (k, &b) in row.iter().enumerate() {
                    below[j][k] |= b;
                }
            }
        }
    }
    below
}

pub fn downset(below: &[Vec<bool>], e: usize) -> Vec<usize> {
    (0..=e).filter(|&i| below[e][i]).collect()
}

/// Heaviest totally ordered subset of the downset with maximum `e`, by
/// enumerating subsets.
pub fn chain_time(r: &Run, below: &[Vec<bool>], e: usize) -> u64 {
    let others: Vec<usize> = downset(below, e).into_iter().filter(|&i| i != e).collect();
    assert!(others.len() < 20, "too many events for enumeration");
    let mut best = 0;
    for mask in 0u32..1 << others.len() {
        let chosen: Vec<usize> = (0..others.len()).filter(|b| mask >> b & 1 == 1).map(|b| others[b]).collect();
        let chain = chosen.iter().all(|&a| chosen.iter().all(|&b| below[a.max(b)][a.min(b)]));
        if chain {
            let w: u64 = chosen.iter().map(|&i| r.steps[i].weight).sum();
            best = best.max(w + r.steps[e].weight);
        }
    }
    best
}

/// Every order of `events` compatible with `below`.
pub fn linearizations(below: &[Vec<bool>], events: &[usize]) -> Vec<Vec<usize>> {
    fn go(below: &[Vec<bool>], left: &mut Vec<usize>, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left.is_empty() {
            out.push(prefix.clone());
            return;
        }
        for k in 0..left.len() {
            let x = left[k];
            if left.iter().any(|&y| y != x && below[x][y]) {
                continue;
            }
            left.remove(k);
            prefix.push(x);
            go(below, left, prefix, out);
            prefix.pop();
            left.insert(k, x);
        }
    }
    let mut out = Vec::new();
    go(below, &mut events.to_vec(), &mut Vec::new(), &mut out);
    out
}

/// Largest configuration met along each linearization of the downset of
/// `e`, maximized over linearizations. Panics if some order does not replay
/// or the orders disagree on the final configuration.
pub fn brute_space(prog: &Program, r: &Run, below: &[Vec<bool>], e: usize) -> u64 {
    let down = downset(below, e);
    let mut best = 0;
    let mut end: Option<Configuration> = None;
    for order in linearizations(below, &down) {
        let mut c = r.initial.clone();
        let mut peak = size(&c);
        for &k in &order {
            let rec = &r.steps[k];
            let (next, got) = step(prog, &c, &candidate(rec)).expect("linearization replays");
            let post_size = got.post_size;
            assert_eq!(got, TransitionRecord { post_size, ..rec.clone() }, "replayed transition differs");
            peak = peak.max(size(&next));
            c = next;
        }
        match &end {
            Some(x) => assert_eq!(x, &c, "linearizations reach different configurations"),
            None => end = Some(c),
        }
        best = best.max(peak);
    }
    best
}
