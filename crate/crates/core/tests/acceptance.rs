//! One line per acceptance criterion, `PASS` or `FAIL` with the measured
//! figures. Constants that bound costs were measured once and are frozen
//! here; all comparisons use exact integer arithmetic.

mod common;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::time::{Duration, Instant};

use rand::Rng;

use procmachine::behavior::{explore_lts, functional_lts, weak_bisim, ExploreOptions, FiniteLts, FunTable};
use procmachine::causality::{build_causal_dag, oracle_time_cost, space_cost, time_costs, SpaceMode};
use procmachine::complexity::{cost_report, CostReport};
use procmachine::encoders::fixtures::*;
use procmachine::encoders::*;
use procmachine::machine::{
    apply, enabled_with, run, Action, Configuration, Op, Policy, Run, RunStatus, ScriptedInput, TransitionRecord,
};
use procmachine::proclang::{parse_program, Program};
use procmachine::Word;

use common::costs;
use common::gen::Gen;
use common::machines::{eval_atm, run_ram, simulate_tm};
use common::rtm::rtm_lts;

type Outcome = Result<String, String>;

const STEP_LIMIT: usize = 2_000_000;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn go(prog: &Program, script: ScriptedInput, policy: Policy) -> Run {
    let mut script = script;
    run(prog, &mut script, policy, STEP_LIMIT)
}

fn words_of(r: &Run) -> Vec<Word> {
    r.outputs().into_iter().map(|(_, _, w)| w.clone()).collect()
}

fn single(w: &Word) -> ScriptedInput {
    ScriptedInput::single("i", w.clone())
}

fn report(prog: &Program, r: &Run, mode: SpaceMode) -> Result<CostReport, String> {
    cost_report(prog, r, mode, 12).map_err(|e| e.to_string())
}

fn words_of_length(n: usize) -> Vec<Word> {
    (0..1usize << n).map(|v| Word::fixed_width(v, n)).collect()
}

/// `a/b ≤ c/d` for nonnegative integers, `b, d > 0`.
fn le(a: u64, b: u64, c: u64, d: u64) -> bool {
    (a as u128) * (d as u128) <= (c as u128) * (b as u128)
}

/// Largest of the fractions `num/den`.
fn max_ratio(xs: impl IntoIterator<Item = (u64, u64)>) -> (u64, u64) {
    xs.into_iter().fold((0, 1), |best, x| if le(best.0, best.1, x.0, x.1) { x } else { best })
}

// 1 ----------------------------------------------------------------------

fn tm_fidelity() -> Outcome {
    let start = Instant::now();
    let inputs = words_up_to(8);
    for (name, m) in [("increment", inc_tm()), ("palindrome", palindrome_tm(8))] {
        let p = encode_tm(&m).map_err(|e| e.to_string())?;
        for w in &inputs {
            let r = go(&p, single(w), Policy::FifoTag);
            let want = simulate_tm(&m, w, 100_000).output;
            ensure(r.status == RunStatus::Completed, || format!("{name} on {w:?}: {:?}", r.status))?;
            ensure(words_of(&r) == want.clone().into_iter().collect::<Vec<_>>(), || {
                format!("{name} on {w:?}: got {:?}, oracle {want:?}", words_of(&r))
            })?;
            ensure(r.steps.iter().all(|s| s.tag.is_empty() && s.op != Op::Spn), || {
                format!("{name} on {w:?}: a record has a nonempty tag")
            })?;
        }
    }
    let took = start.elapsed();
    ensure(took < Duration::from_secs(10), || format!("took {took:?}"))?;
    Ok(format!("2 machines x {} inputs agree with the simulator in {:.1?}", inputs.len(), took))
}

// 2 ----------------------------------------------------------------------

/// `t(output) / (oracle steps + input size)` at length 1, measured once. The
/// input size `|w| + 1` pays for reading the input, which the machine's own
/// step count does not include: increment halts in 3 steps at any length.
const SLOWDOWN: [(&str, u64, u64); 2] = [("increment", 259, 7), ("palindrome", 484, 5)];

fn slowdown_ratios(m: &TmSpec, lengths: std::ops::RangeInclusive<usize>) -> Result<Vec<(usize, u64, u64)>, String> {
    let p = encode_tm(m).map_err(|e| e.to_string())?;
    let mut out = Vec::new();
    for n in lengths {
        for w in words_of_length(n) {
            let r = go(&p, single(&w), Policy::FifoTag);
            let rep = report(&p, &r, SpaceMode::Observed)?;
            let t = rep.outputs.first().ok_or_else(|| format!("no output on {w:?}"))?.time;
            out.push((n, t, simulate_tm(m, &w, 100_000).steps + n as u64 + 1));
        }
    }
    Ok(out)
}

fn constant_slowdown() -> Outcome {
    let mut detail = Vec::new();
    for ((name, num, den), m) in SLOWDOWN.into_iter().zip([inc_tm(), palindrome_tm(8)]) {
        let all = slowdown_ratios(&m, 1..=8)?;
        let at_one = max_ratio(all.iter().filter(|x| x.0 == 1).map(|x| (x.1, x.2)));
        ensure(le(at_one.0, at_one.1, num, den) && le(num, den, at_one.0, at_one.1), || {
            format!("{name}: length-1 ratio is now {}/{}, frozen {num}/{den}", at_one.0, at_one.1)
        })?;
        let worst = max_ratio(all.iter().map(|x| (x.1, x.2)));
        if let Some(x) = all.iter().find(|x| !le(x.1, x.2, num, den)) {
            return Err(format!("{name}: length {} has t={} over {} steps, above {num}/{den}", x.0, x.1, x.2));
        }
        detail.push(format!("{name} C={num}/{den} (max {}/{})", worst.0, worst.1));
    }
    Ok(detail.join(", "))
}

// 3 ----------------------------------------------------------------------

/// Spawns whose second child starts by receiving put a collector next to
/// the branches; every other spawn splits two branches, whose events must
/// be pairwise incomparable. Every configuration of the computation tree,
/// final ones included, is one split. Returns the number of splits.
fn branch_splits(r: &Run, below: &[Vec<bool>]) -> Result<usize, String> {
    let first_at = |tag: &Word| r.steps.iter().find(|s| &s.tag == tag).map(|s| s.op);
    let mut splits = 0;
    for (k, s) in r.steps.iter().enumerate().filter(|(_, s)| s.op == Op::Spn) {
        if first_at(&s.tag.child(true)) == Some(Op::Rcv) {
            continue;
        }
        splits += 1;
        let side = |bit| -> Vec<usize> {
            let root = s.tag.child(bit);
            (k..r.steps.len()).filter(|&j| root.is_prefix_of(&r.steps[j].tag)).collect()
        };
        let (a, b) = (side(false), side(true));
        for &x in &a {
            for &y in &b {
                if below[x.max(y)][x.min(y)] {
                    return Err(format!("steps {x} and {y} under the split at {k} are ordered"));
                }
            }
        }
    }
    Ok(splits)
}

/// Every assignment up to 8 leaves. Above that a seeded sample of
/// `ATM_SAMPLE` assignments plus the all-0 and all-1 ones, since a
/// depth-4 run is about 6000 steps.
const ATM_SAMPLE: usize = 2048;

fn atm_assignments(leaves: usize) -> Vec<Word> {
    if leaves <= 8 {
        return words_of_length(leaves);
    }
    let mut r = common::gen::rng(3);
    let mut out = vec![Word::zeros(leaves), Word::ones(leaves)];
    out.extend((0..ATM_SAMPLE).map(|_| Word::from_bits((0..leaves).map(|_| r.gen_bool(0.5)))));
    out
}

fn atm_parallelism() -> Outcome {
    let mut runs = 0;
    let mut worst_share = (0, 1);
    for depth in 1..=4 {
        let m = and_or_atm(depth);
        let p = encode_atm(&m).map_err(|e| e.to_string())?;
        let leaves = 1usize << depth;
        for w in atm_assignments(leaves) {
            let r = go(&p, single(&w), Policy::FifoTag);
            runs += 1;
            let want = eval_atm(&m, &w).map(|b| Word::from(if b { "1" } else { "0" }));
            ensure(words_of(&r) == want.clone().into_iter().collect::<Vec<_>>(), || {
                format!("depth {depth} on {w:?}: got {:?}, evaluator {want:?}", words_of(&r))
            })?;
            if depth == 4 {
                let d = build_causal_dag(&r);
                let t = time_costs(&d);
                let out = d.output_events()[0];
                let total = r.total_weight();
                ensure(2 * t[out] < total, || format!("{w:?}: t(output)={} of total {total}", t[out]))?;
                if le(worst_share.0, worst_share.1, t[out], total) {
                    worst_share = (t[out], total);
                }
            }
        }
        // the causal check is quadratic in the run length: one assignment per depth
        let w = Word::from_bits((0..leaves).map(|k| k % 3 == 0));
        let r = go(&p, single(&w), Policy::FifoTag);
        let below = costs::causal_order(&r);
        let splits = branch_splits(&r, &below)?;
        let want = common::machines::atm_tree_size(&m, &w);
        ensure(splits == want, || format!("depth {depth}: {splits} branch splits, tree has {want}"))?;
    }
    Ok(format!(
        "{runs} runs match the evaluator; depth 4 worst t(output)/total = {}/{}",
        worst_share.0, worst_share.1
    ))
}

// 4, 5, 13 ---------------------------------------------------------------

/// Runs of random programs under random schedules, cut at `max_steps`, that
/// take at least one step.
fn random_runs(count: usize, max_steps: usize, seed: u64, allow_tail: bool) -> Vec<(Program, Run)> {
    let mut out = Vec::new();
    let mut k = 0;
    while out.len() < count {
        k += 1;
        let mut g = Gen::new(seed.wrapping_mul(1_000_003).wrapping_add(k));
        g.allow_tail = allow_tail;
        let p = g.program(10);
        let script = g.script(3);
        let mut s = script;
        let r = run(&p, &mut s, Policy::Random(k), max_steps);
        if !r.steps.is_empty() {
            out.push((p, r));
        }
    }
    out
}

fn spawns(r: &Run) -> bool {
    r.steps.iter().any(|s| s.op == Op::Spn)
}

fn time_oracle() -> Outcome {
    let runs = random_runs(200, 12, 4, true);
    let mut events = 0;
    for (n, (_, r)) in runs.iter().enumerate() {
        let d = build_causal_dag(r);
        let t = time_costs(&d);
        let below = costs::causal_order(r);
        for e in 0..r.steps.len() {
            events += 1;
            let want = costs::chain_time(r, &below, e);
            ensure(t[e] == want, || format!("program {n}, event {e}: time {} but chains give {want}", t[e]))?;
            let brute = oracle_time_cost(&d, e, 12).map_err(|x| x.to_string())?;
            ensure(brute == want, || format!("program {n}, event {e}: library oracle {brute}, test oracle {want}"))?;
            for i in 0..=e {
                ensure(d.leq(i, e) == below[e][i], || format!("program {n}: causal order differs at ({i}, {e})"))?;
            }
        }
    }
    let par = runs.iter().filter(|(_, r)| spawns(r)).count();
    Ok(format!("{} programs ({par} with spawns), {events} events, all equal", runs.len()))
}

/// Two branches that each hold a word for one call and then drop it; the
/// schedule runs them one after the other, but both words can be held at once.
const PEAKS: &str = "output o; D(x) := E<>; E() := o!\"\".0; main := (D<\"1111\"> | D<\"111\">);";

fn space_exactness() -> Outcome {
    let mut runs = random_runs(200, 8, 5, true);
    let peaks = parse_program(PEAKS).map_err(|e| e.to_string())?;
    let r = run(&peaks, &mut ScriptedInput::new(), Policy::FifoTag, 8);
    runs.push((peaks, r));
    let (mut events, mut chains, mut strict) = (0, 0, 0);
    for (n, (p, r)) in runs.iter().enumerate() {
        let d = build_causal_dag(r);
        let below = costs::causal_order(r);
        let total = (0..r.steps.len()).all(|j| (0..j).all(|i| below[j][i]));
        chains += usize::from(total);
        for e in 0..r.steps.len() {
            events += 1;
            let exact = space_cost(p, r, &d, e, SpaceMode::Exact, 12).map_err(|x| x.to_string())?;
            let observed = space_cost(p, r, &d, e, SpaceMode::Observed, 12).map_err(|x| x.to_string())?;
            let brute = costs::brute_space(p, r, &below, e);
            ensure(exact == brute, || format!("program {n}, event {e}: exact {exact}, linearizations give {brute}"))?;
            ensure(observed <= exact, || format!("program {n}, event {e}: observed {observed} > exact {exact}"))?;
            ensure(!total || observed == exact, || format!("program {n}, event {e}: chain run but {observed} != {exact}"))?;
            strict += usize::from(observed < exact);
        }
    }
    ensure(strict > 0, || "observed space never fell short of exact".into())?;
    Ok(format!(
        "{} programs, {events} events ({chains} totally ordered runs, {strict} events with observed < exact)",
        runs.len()
    ))
}

fn weight_size_exactness() -> Outcome {
    let runs = random_runs(500, 300, 13, true);
    let mut steps = 0;
    for (n, (p, r)) in runs.iter().enumerate() {
        steps += r.steps.len();
        let bad = costs::weight_size_mismatches(p, r);
        ensure(bad == 0, || format!("program {n}: {bad} mismatching records"))?;
    }
    let ops: BTreeSet<Op> = runs.iter().flat_map(|(_, r)| r.steps.iter().map(|s| s.op)).collect();
    ensure(ops.len() == 8, || format!("only {ops:?} occurred"))?;
    Ok(format!("{} programs, {steps} records recomputed, all 8 operations exercised", runs.len()))
}

// 6 ----------------------------------------------------------------------

const DIAMOND_SOURCES: [&str; 12] = [
    "output o; main := ([\"0\"]!\"1\".0 | [\"1\"]!\"0\".0 | [\"0\"]?x.o!x.0 | [\"1\"]?y.o!y.0);",
    "input i; output o; main := i?x.([\"0\"]!x.0 | [\"0\"]?y.[\"1\"]!0:y.0 | [\"1\"]?z.o!z.0);",
    "output o; main := ([\"0\"]!\"1\".[\"0\"]!\"0\".0 | [\"0\"]?x.[\"0\"]?y.o!x.o!y.0);",
    "output o, p; main := (o!\"1\".0 | p!\"0\".0 | if tt then o!\"\".0 else 0);",
    "input i, j; output o; main := (i?x.o!x.0 | j?y.[\"1\"]!y.0 | [\"1\"]?z.0);",
    "output o; A(x) := if nil x then 0 else ([x]!x.0 | A<tl x>); main := (A<\"0110\"> | [\"0\"]?a.o!a.0);",
    "output o; main := (([\"00\"]!\"1\".0 | [\"01\"]!\"0\".0) | ([\"00\"]?a.0 | [\"01\"]?b.o!b.0));",
    "input i; output o; main := (i?x.[\"1\"]!x.0 | i?y.[\"0\"]!y.0 | [\"1\"]?a.[\"0\"]?b.o!a.o!b.0);",
    "output o; B(n) := if nil n then 0 else (B<tl n> | o!n.0); main := B<\"111\">;",
    "output o; main := ((o!\"1\".0 | o!\"0\".0) | ([\"0\"]!\"\".0 | [\"0\"]?x.0));",
    "input i; output o; main := i?x.(if is0 x then [\"0\"]!x.0 else [\"1\"]!x.0 | ([\"0\"]?a.o!a.0 | [\"1\"]?b.o!b.0));",
    "output o; C(k) := ([k]!k.0 | [k]?v.o!v.0); main := (C<\"0\"> | C<\"1\"> | C<\"10\">);",
];

fn diamond_programs() -> Result<Vec<(String, Program)>, String> {
    let mut out = Vec::new();
    for (k, src) in DIAMOND_SOURCES.iter().enumerate() {
        out.push((format!("handwritten {k}"), parse_program(src).map_err(|e| format!("source {k}: {e}"))?));
    }
    let enc = |r: Result<Program, EncodeError>| r.map_err(|e| e.to_string());
    out.push(("adder circuit".into(), enc(encode_circuit(&adder_circuit()))?));
    out.push(("echo pram".into(), enc(encode_pram(&echo_pram()))?));
    out.push(("and-or atm depth 1".into(), enc(encode_atm(&and_or_atm(1)))?));
    out.push(("toggle rtm".into(), enc(encode_rtm(&toggle_rtm()))?));
    out.push(("identity server".into(), enc(serverize(&identity_program()))?));
    let h = PrefixTable::prepend_one(2);
    out.push(("online wrapper".into(), enc(online_from_offline(&h.functional_program()))?));
    out.push(("offline wrapper".into(), enc(offline_from_online(&enc(h.online_program())?))?));
    let choice = internal_choice(&Word::from("1"), vec![parse_process("o!\"0\".0")?, parse_process("o!\"1\".0")?]);
    out.push((
        "internal choice".into(),
        Program::new(Vec::<&str>::new(), ["o"], Vec::new(), choice).map_err(|e| e.to_string())?,
    ));
    Ok(out)
}

fn parse_process(src: &str) -> Result<procmachine::proclang::Process, String> {
    procmachine::proclang::parse_process(src).map_err(|e| e.to_string())
}

/// Configurations reached from the initial one, numbered, with their
/// outgoing transitions computed on demand. Runtime errors have no successor.
struct StateSpace<'a> {
    prog: &'a Program,
    index: HashMap<Configuration, usize>,
    configs: Vec<Configuration>,
    edges: Vec<Option<Vec<(TransitionRecord, usize)>>>,
}

impl<'a> StateSpace<'a> {
    fn new(prog: &'a Program) -> Self {
        let mut s = StateSpace {
            prog,
            index: HashMap::new(),
            configs: Vec::new(),
            edges: Vec::new(),
        };
        s.id(Configuration::initial(prog));
        s
    }

    fn id(&mut self, c: Configuration) -> usize {
        if let Some(&k) = self.index.get(&c) {
            return k;
        }
        self.index.insert(c.clone(), self.configs.len());
        self.configs.push(c);
        self.edges.push(None);
        self.configs.len() - 1
    }

    fn edges(&mut self, k: usize) -> Vec<(TransitionRecord, usize)> {
        if let Some(e) = &self.edges[k] {
            return e.clone();
        }
        let c = self.configs[k].clone();
        let offers = |_: &str| vec![Word::empty(), Word::from("1")];
        let mut out = Vec::new();
        for cand in enabled_with(&c, offers) {
            let mut next = c.clone();
            if let Ok(rec) = apply(self.prog, &mut next, &cand) {
                out.push((rec, self.id(next)));
            }
        }
        self.edges[k] = Some(out.clone());
        out
    }
}

fn same_type(a: &TransitionRecord, b: &TransitionRecord) -> bool {
    a.tag == b.tag && a.op == b.op && a.weight == b.weight && a.subject == b.subject && a.action == b.action
}

fn follow(edges: &[(TransitionRecord, usize)], t: &TransitionRecord) -> Option<usize> {
    edges.iter().find(|(r, _)| same_type(r, t)).map(|(_, c)| *c)
}

/// Checks the first `limit` configurations in breadth-first order for
/// determinism of each transition type, the forward diamond of independent
/// transitions and the commutation of independent consecutive ones. Returns
/// configurations checked, squares checked and violations.
fn diamond_violations(p: &Program, limit: usize) -> (usize, usize, usize) {
    let mut space = StateSpace::new(p);
    let (mut checked, mut bad) = (0, 0);
    let mut k = 0;
    while k < limit.min(space.configs.len()) {
        let out = space.edges(k);
        for (i, (a, ta)) in out.iter().enumerate() {
            for (b, tb) in &out[i + 1..] {
                if same_type(a, b) {
                    checked += 1;
                    bad += usize::from(ta != tb);
                }
                if costs::dependent(a, b) {
                    continue;
                }
                checked += 1;
                let ab = follow(&space.edges(*ta), b);
                let ba = follow(&space.edges(*tb), a);
                bad += usize::from(ab.is_none() || ab != ba);
            }
            for (b, tab) in space.edges(*ta) {
                if costs::dependent(a, &b) {
                    continue;
                }
                checked += 1;
                let swapped = follow(&out, &b).and_then(|tb| follow(&space.edges(tb), a));
                bad += usize::from(swapped != Some(tab));
            }
        }
        k += 1;
    }
    (k, checked, bad)
}

fn diamond_axioms() -> Outcome {
    let progs = diamond_programs()?;
    ensure(progs.len() == 20, || format!("{} programs", progs.len()))?;
    let (mut states, mut checks) = (0, 0);
    for (name, p) in &progs {
        ensure(p.uses_par(), || format!("{name} has no parallel composition"))?;
        let (n, checked, bad) = diamond_violations(p, 10_000);
        ensure(bad == 0, || format!("{name}: {bad} violations"))?;
        states += n;
        checks += checked;
    }
    Ok(format!("20 programs, {states} configurations, {checks} squares checked, 0 violations"))
}

// 7 ----------------------------------------------------------------------

fn function_tables() -> Vec<FunTable> {
    let domain = words_up_to(2);
    (0..1usize << domain.len())
        .map(|v| {
            let bit = |k: usize| Word::from(if v >> k & 1 == 1 { "1" } else { "0" });
            FunTable(domain.iter().enumerate().map(|(k, s)| (s.clone(), bit(k))).collect())
        })
        .collect()
}

fn functional_equality() -> Outcome {
    let tables = function_tables();
    let ltss: Vec<FiniteLts> = tables.iter().map(functional_lts).collect();
    let mut pairs = 0;
    for (a, (ta, la)) in tables.iter().zip(&ltss).enumerate() {
        for (b, (tb, lb)) in tables.iter().zip(&ltss).enumerate() {
            pairs += 1;
            let v = weak_bisim(la, lb, true).map_err(|e| e.to_string())?;
            ensure(v.equivalent == (ta == tb), || format!("tables {a} and {b}: bisimilar={}", v.equivalent))?;
        }
    }
    let mut looping = FiniteLts::new(1);
    looping.add_transition(0, Action::Tau, 0);
    let stuck = FiniteLts::new(1);
    let weak = weak_bisim(&looping, &stuck, false).map_err(|e| e.to_string())?.equivalent;
    let strict = weak_bisim(&looping, &stuck, true).map_err(|e| e.to_string())?.equivalent;
    ensure(weak && !strict, || format!("tau loop vs deadlock: weak {weak}, divergence-sensitive {strict}"))?;
    Ok(format!("{} tables, {pairs} pairs; tau loop vs deadlock weak-equal, divergence-distinct", tables.len()))
}

// 8 ----------------------------------------------------------------------

fn functional_fixtures() -> Result<Vec<(String, Program, ScriptedInput)>, String> {
    let enc = |r: Result<Program, EncodeError>| r.map_err(|e| e.to_string());
    let mut adder_in = ScriptedInput::new();
    for (k, b) in ["1", "0", "1", "1"].iter().enumerate() {
        adder_in.push(&format!("i{}", k + 1), Word::from(*b));
    }
    let s = |w: &str| single(&Word::from(w));
    Ok(vec![
        ("identity".into(), identity_program(), s("0110")),
        ("increment tm".into(), enc(encode_tm(&inc_tm()))?, s("1011")),
        ("palindrome tm".into(), enc(encode_tm(&palindrome_tm(8)))?, s("0110")),
        ("and-or atm depth 2".into(), enc(encode_atm(&and_or_atm(2)))?, s("1001")),
        ("unary add ram".into(), enc(encode_ram(&unary_add_ram()))?, s("001000")),
        ("echo pram".into(), enc(encode_pram(&echo_pram()))?, ScriptedInput::new().with("i1", &["01"]).with("i2", &["1"])),
        ("adder circuit".into(), enc(encode_circuit(&adder_circuit()))?, adder_in),
        ("prepend-one table".into(), PrefixTable::prepend_one(3).functional_program(), s("010")),
    ])
}

fn per_channel(r: &Run) -> BTreeMap<String, Vec<Word>> {
    let mut m: BTreeMap<String, Vec<Word>> = BTreeMap::new();
    for (_, ch, w) in r.outputs() {
        m.entry(ch.to_string()).or_default().push(w.clone());
    }
    m
}

fn determinacy() -> Outcome {
    let fixtures = functional_fixtures()?;
    let mut orders = BTreeSet::new();
    for (name, p, script) in &fixtures {
        let base = go(p, script.clone(), Policy::FifoTag);
        ensure(base.status == RunStatus::Completed, || format!("{name}: {:?}", base.status))?;
        let want = per_channel(&base);
        ensure(!want.is_empty(), || format!("{name}: no output"))?;
        for seed in 0..100 {
            let r = go(p, script.clone(), Policy::Random(seed));
            ensure(r.status == base.status, || format!("{name}, seed {seed}: {:?}", r.status))?;
            let got = per_channel(&r);
            ensure(got == want, || format!("{name}, seed {seed}: {got:?}, lowest-tag-first gave {want:?}"))?;
            orders.insert((name.clone(), r.steps.iter().map(|s| s.tag.clone()).collect::<Vec<_>>()));
        }
    }
    Ok(format!(
        "{} fixtures x 100 seeds agree per channel ({} distinct schedules seen)",
        fixtures.len(),
        orders.len()
    ))
}

// 11, 12 -----------------------------------------------------------------

fn small_encoders() -> Outcome {
    let ram = encode_ram(&unary_add_ram()).map_err(|e| e.to_string())?;
    let spec = unary_add_ram();
    for a in 0..=6 {
        for b in 0..=6 {
            let w = Word::zeros(a).concat(&Word::from("1")).concat(&Word::zeros(b));
            let got = words_of(&go(&ram, single(&w), Policy::FifoTag));
            let oracle = run_ram(&spec, &w, 1_000_000);
            ensure(oracle == Some(Word::zeros(a + b)), || format!("interpreter on {a}+{b}: {oracle:?}"))?;
            ensure(got == vec![Word::zeros(a + b)], || format!("ram on {a}+{b}: {got:?}"))?;
        }
    }
    let pram = encode_pram(&echo_pram()).map_err(|e| e.to_string())?;
    let mut echoes = 0;
    for x in words_up_to(2) {
        for y in words_up_to(2) {
            let script = ScriptedInput::single("i1", x.clone()).with("i2", &[&y.to_bit_string()]);
            let r = go(&pram, script, Policy::FifoTag);
            let want = BTreeMap::from([("o1".to_string(), vec![x.clone()]), ("o2".to_string(), vec![y.clone()])]);
            ensure(per_channel(&r) == want, || format!("pram on ({x:?}, {y:?}): {:?}", per_channel(&r)))?;
            echoes += 1;
        }
    }
    let adder = encode_circuit(&adder_circuit()).map_err(|e| e.to_string())?;
    for v in 0..16usize {
        let bit = |k: usize| v >> k & 1;
        let mut script = ScriptedInput::new();
        for k in 0..4 {
            script.push(&format!("i{}", k + 1), Word::from(if bit(k) == 1 { "1" } else { "0" }));
        }
        let sum = bit(0) + 2 * bit(1) + bit(2) + 2 * bit(3);
        let want: BTreeMap<String, Vec<Word>> = (0..3)
            .map(|k| (format!("o{}", k + 1), vec![Word::from(if sum >> k & 1 == 1 { "1" } else { "0" })]))
            .collect();
        let r = go(&adder, script, Policy::FifoTag);
        ensure(per_channel(&r) == want, || format!("adder on {v:04b}: {:?}", per_channel(&r)))?;
    }
    Ok(format!("ram 49 operand pairs, pram {echoes} input pairs, adder 16 inputs"))
}

fn rtm_encoding() -> Outcome {
    let m = toggle_rtm();
    ensure(m.states.len() == 3, || format!("{} states", m.states.len()))?;
    let p = encode_rtm(&m).map_err(|e| e.to_string())?;
    let direct = rtm_lts(&m, 4);
    let opts = ExploreOptions {
        state_limit: 100_000,
        visible_depth: Some(4),
    };
    let encoded = explore_lts(&p, &[], opts);
    ensure(!encoded.is_truncated(), || "state limit hit".into())?;
    let v = weak_bisim(&direct, &encoded, false).map_err(|e| e.to_string())?;
    ensure(v.equivalent, || format!("not bisimilar: {:?}", v.distinction))?;
    Ok(format!(
        "direct {} states, encoded {} states, weakly bisimilar at depth 4",
        direct.num_states(),
        encoded.num_states()
    ))
}

// 9, 10 ------------------------------------------------------------------

/// Largest measured value at input size at most `m`.
struct Curve(BTreeMap<u64, u64>);

impl Curve {
    fn new() -> Self {
        Curve(BTreeMap::new())
    }

    fn add(&mut self, size: u64, v: u64) {
        let e = self.0.entry(size).or_insert(0);
        *e = (*e).max(v);
    }

    fn at(&self, m: u64) -> u64 {
        self.0.range(..=m).map(|(_, v)| *v).max().unwrap_or(0)
    }
}

/// Time and space curves of a program's outputs, by input size.
fn curves(p: &Program, scripts: impl IntoIterator<Item = ScriptedInput>) -> Result<(Curve, Curve), String> {
    let (mut f, mut g) = (Curve::new(), Curve::new());
    for s in scripts {
        let r = go(p, s, Policy::FifoTag);
        for o in report(p, &r, SpaceMode::Observed)?.outputs {
            f.add(o.insize, o.time);
            g.add(o.insize, o.space);
        }
    }
    Ok((f, g))
}

/// A measured cost and the bound term it is compared against.
type Sample = (u64, u64);

/// The worst ratio of `samples` must be exactly the frozen `c`.
fn check_frozen(what: &str, samples: &[Sample], c: (u64, u64)) -> Result<(), String> {
    let w = max_ratio(samples.iter().copied());
    ensure(le(w.0, w.1, c.0, c.1) && le(c.0, c.1, w.0, w.1), || {
        format!("{what}: worst ratio is now {}/{}, frozen {}/{}", w.0, w.1, c.0, c.1)
    })
}

/// `C` for time and space: the worst ratios over the suite of
/// `server_theorem`, measured once and frozen.
const SERVER_C: ((u64, u64), (u64, u64)) = ((613, 595), (31, 19));

fn server_samples(
    server: &Program,
    requests: &[Word],
    f: &Curve,
    g: &Curve,
) -> Result<(Vec<Sample>, Vec<Sample>), String> {
    let mut script = ScriptedInput::new();
    for w in requests {
        script.push("i", w.clone());
    }
    let r = go(server, script, Policy::FifoTag);
    let rep = report(server, &r, SpaceMode::Observed)?;
    let m = inc_tm();
    let want: Vec<Word> = requests.iter().map(|s| simulate_tm(&m, s, 100_000).output.expect("increment halts")).collect();
    let got: Vec<Word> = rep.outputs.iter().map(|o| o.word.clone()).collect();
    ensure(got == want, || format!("requests {requests:?}: answers {got:?}, expected {want:?}"))?;
    let (mut ts, mut ss) = (Vec::new(), Vec::new());
    for (k, o) in rep.outputs.iter().enumerate() {
        ensure(o.inputs.len() == k + 1, || format!("{requests:?}: output {k} depends on {} requests", o.inputs.len()))?;
        let seen = &requests[..=k];
        let stored: u64 = seen.iter().map(|s| 1 + s.len() as u64).sum();
        let worst = |c: &Curve| seen.iter().map(|s| c.at(s.len() as u64 + 1)).max().unwrap_or(0);
        ts.push((o.time, worst(f) + stored));
        ss.push((o.space, worst(g) + stored));
    }
    Ok((ts, ss))
}

/// Three requests each: a fixed triple, then 300 seeded ones over words of
/// length at most 4.
fn server_suite() -> Vec<Vec<Word>> {
    let pool = words_up_to(4);
    let mut r = common::gen::rng(9);
    let mut out = vec![["1", "01", "110"].iter().map(|s| Word::from(*s)).collect()];
    out.extend((0..300).map(|_| (0..3).map(|_| pool[r.gen_range(0..pool.len())].clone()).collect()));
    out
}

fn server_theorem() -> Outcome {
    let plain = encode_tm(&inc_tm()).map_err(|e| e.to_string())?;
    let server = serverize(&plain).map_err(|e| e.to_string())?;
    let (f, g) = curves(&plain, words_up_to(5).iter().map(single))?;
    let suite = server_suite();
    let (mut ts, mut ss) = (Vec::new(), Vec::new());
    for reqs in &suite {
        let (t, s) = server_samples(&server, reqs, &f, &g)?;
        ts.extend(t);
        ss.extend(s);
    }
    let (ct, cs) = SERVER_C;
    check_frozen("time", &ts, ct)?;
    check_frozen("space", &ss, cs)?;
    Ok(format!(
        "{} request triples answered; C_t={}/{}, C_s={}/{} over {} outputs",
        suite.len(),
        ct.0,
        ct.1,
        cs.0,
        cs.1,
        ts.len()
    ))
}

/// Bits as the wrappers exchange them: `ε` for 0, `1` for 1.
fn bit_script(s: &Word) -> ScriptedInput {
    let mut script = ScriptedInput::new();
    for b in s.iter() {
        script.push("i", Word::from(if b { "1" } else { "" }));
    }
    script
}

fn prefix_tables() -> Vec<(String, PrefixTable)> {
    let mut r = common::gen::rng(10);
    let mut out = vec![
        ("identity".to_string(), PrefixTable::identity(4)),
        ("prepend-one".to_string(), PrefixTable::prepend_one(4)),
    ];
    out.extend((0..3).map(|k| (format!("random {k}"), PrefixTable::random_monotone(4, &mut r))));
    out
}

/// Worst ratios over all tables of `prefix_tables`, measured once: offline
/// time and space, online time and space.
const WRAPPER_C: [(u64, u64); 4] = [(96, 9), (6, 2), (66, 8), (9, 1)];

/// Cost samples of both wrappers around `h`, after checking that they
/// reproduce it.
fn wrapper_samples(h: &PrefixTable) -> Result<[Vec<Sample>; 4], String> {
    let q = h.online_program().map_err(|e| e.to_string())?;
    let p = h.functional_program();
    let off = offline_from_online(&q).map_err(|e| e.to_string())?;
    let on = online_from_offline(&p).map_err(|e| e.to_string())?;
    let inputs = words_up_to(h.depth);
    let (fq, gq) = curves(&q, inputs.iter().map(bit_script))?;
    let (fp, gp) = curves(&p, inputs.iter().map(single))?;
    let mut out: [Vec<Sample>; 4] = Default::default();
    for s in &inputs {
        let want = h.get(s).expect("table is total").clone();
        let n = s.len() as u64;
        let r = go(&off, single(s), Policy::FifoTag);
        let rep = report(&off, &r, SpaceMode::Observed)?;
        let got: Vec<Word> = rep.outputs.iter().map(|o| o.word.clone()).collect();
        ensure(got == vec![want.clone()], || format!("offline on {s:?}: {got:?}, table says {want:?}"))?;
        let o = &rep.outputs[0];
        out[0].push((o.time, (n + 1) * fq.at(2 * n)));
        out[1].push((o.space, gq.at(2 * n) + n + 1));

        let r = go(&on, bit_script(s), Policy::FifoTag);
        let rep = report(&on, &r, SpaceMode::Observed)?;
        let total = rep.outputs.iter().fold(Word::empty(), |acc, o| acc.concat(&o.word));
        ensure(total == want, || format!("online on {s:?}: emitted {total:?}, table says {want:?}"))?;
        for o in &rep.outputs {
            let k = o.inputs.len() as u64;
            out[2].push((o.time, (k + 1) * fp.at(k + 1)));
            out[3].push((o.space, gp.at(k + 1) + o.insize));
        }
    }
    Ok(out)
}

fn wrapper_theorem() -> Outcome {
    const NAMES: [&str; 4] = ["offline time", "offline space", "online time", "online space"];
    let tables = prefix_tables();
    let mut all: [Vec<Sample>; 4] = Default::default();
    for (name, h) in &tables {
        ensure(h.is_monotone(), || format!("{name} is not monotone"))?;
        let samples = wrapper_samples(h).map_err(|e| format!("{name}: {e}"))?;
        for (acc, xs) in all.iter_mut().zip(samples) {
            acc.extend(xs);
        }
    }
    let mut failures = Vec::new();
    for (j, xs) in all.iter().enumerate() {
        if let Err(e) = check_frozen(NAMES[j], xs, WRAPPER_C[j]) {
            failures.push(e);
        }
    }
    ensure(failures.is_empty(), || failures.join("; "))?;
    let cs: Vec<String> = NAMES.iter().zip(WRAPPER_C).map(|(n, c)| format!("{n} C={}/{}", c.0, c.1)).collect();
    Ok(format!("{} tables reproduced by both wrappers; {}", tables.len(), cs.join(", ")))
}

// ------------------------------------------------------------------------

fn main() {
    let criteria: [(&str, fn() -> Outcome); 13] = [
        ("tm encoding fidelity", tm_fidelity),
        ("constant slowdown", constant_slowdown),
        ("atm parallelism", atm_parallelism),
        ("time cost oracle", time_oracle),
        ("space cost exactness", space_exactness),
        ("diamond axioms", diamond_axioms),
        ("functional equality", functional_equality),
        ("determinacy", determinacy),
        ("server costs", server_theorem),
        ("wrapper costs", wrapper_theorem),
        ("ram, pram and circuit encoders", small_encoders),
        ("rtm encoding", rtm_encoding),
        ("weight and size exactness", weight_size_exactness),
    ];
    let only: Option<usize> = std::env::args().skip(1).find_map(|a| a.parse().ok());
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        if only.is_some_and(|n| n != k + 1) {
            continue;
        }
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let took = start.elapsed();
        match outcome {
            Ok(detail) => println!("criterion {:2} {name}: PASS {detail} [{took:.1?}]", k + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:2} {name}: FAIL {detail} [{took:.1?}]", k + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
