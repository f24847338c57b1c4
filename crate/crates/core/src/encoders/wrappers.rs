use std::collections::BTreeSet;
use std::sync::Arc;

use super::EncodeError;
use crate::proclang::{BoolExpr, Channel, ProcDef, Process, Program, StrExpr};
use crate::word::Word;

fn var(n: &str) -> StrExpr {
    StrExpr::var(n)
}

fn map_channels(p: &Process, f: &dyn Fn(&Channel) -> Channel) -> Process {
    match p {
        Process::Nil | Process::Call(..) => p.clone(),
        Process::Send(c, e, k) => Process::Send(f(c), e.clone(), Arc::new(map_channels(k, f))),
        Process::Recv(c, x, k) => Process::Recv(f(c), x.clone(), Arc::new(map_channels(k, f))),
        Process::Cond(b, t, e) => Process::Cond(b.clone(), Arc::new(map_channels(t, f)), Arc::new(map_channels(e, f))),
        Process::Par(a, b) => Process::Par(Arc::new(map_channels(a, f)), Arc::new(map_channels(b, f))),
    }
}

fn visit_channels(p: &Process, out: &mut Vec<Channel>) {
    match p {
        Process::Nil | Process::Call(..) => {}
        Process::Send(c, _, k) | Process::Recv(c, _, k) => {
            out.push(c.clone());
            visit_channels(k, out);
        }
        Process::Cond(_, a, b) | Process::Par(a, b) => {
            visit_channels(a, out);
            visit_channels(b, out);
        }
    }
}

/// Every channel occurrence in the program, main and definitions.
fn channels(prog: &Program) -> Vec<Channel> {
    let mut out = Vec::new();
    visit_channels(prog.main(), &mut out);
    for d in prog.defs().values() {
        visit_channels(&d.body, &mut out);
    }
    out
}

fn reads_input(p: &Process, prog: &Program) -> bool {
    let mut cs = Vec::new();
    visit_channels(p, &mut cs);
    for d in prog.defs().values() {
        visit_channels(&d.body, &mut cs);
    }
    cs.iter().any(|c| matches!(c, Channel::ExternalIn(_)))
}

/// Splits a program of the form `i?x.P` with one input and one output, where
/// `P` never reads again.
fn split_functional<'a>(prog: &'a Program, what: &str) -> Result<(&'a str, &'a Process), EncodeError> {
    let shape = || EncodeError::Invalid(format!("{what} expects `main := i?x.P` on channels i and o"));
    if prog.inputs().iter().ne(["i"].iter()) || prog.outputs().iter().ne(["o"].iter()) {
        return Err(shape());
    }
    let Process::Recv(Channel::ExternalIn(ch), x, body) = prog.main().as_ref() else {
        return Err(shape());
    };
    if ch != "i" || reads_input(body, prog) {
        return Err(shape());
    }
    Ok((x, body))
}

fn fresh_name(taken: &BTreeSet<String>, base: &str) -> String {
    (0..)
        .map(|i| if i == 0 { base.to_string() } else { format!("{base}{i}") })
        .find(|n| !taken.contains(n))
        .expect("unbounded supply of names")
}

/// Reserved `1`-prefixed keys not used literally by `prog`.
fn fresh_keys(prog: &Program, n: usize) -> Vec<Word> {
    let used: BTreeSet<Word> = channels(prog)
        .into_iter()
        .filter_map(|c| match c {
            Channel::Internal(StrExpr::Lit(w)) => Some(w),
            _ => None,
        })
        .collect();
    (0..)
        .map(|i| Word::from("110").concat(&Word::fixed_width(i, 4)))
        .filter(|k| !used.contains(k))
        .take(n)
        .collect()
}

/// `S<>` with `S() := i?x.(Body<x> | S<>)`: every request spawns its own copy
/// of the program's body. The body must not use internal queues, which the
/// copies would otherwise share.
pub fn serverize(prog: &Program) -> Result<Program, EncodeError> {
    let (x, body) = split_functional(prog, "serverize")?;
    if channels(prog).iter().any(|c| matches!(c, Channel::Internal(_))) {
        return Err(EncodeError::Invalid(
            "serverize: concurrent copies would share the program's internal queues".into(),
        ));
    }
    let taken: BTreeSet<String> = prog.defs().keys().cloned().collect();
    let body_name = fresh_name(&taken, "Body");
    let serve_name = fresh_name(&taken, "Serve");
    let mut defs: Vec<ProcDef> = prog.defs().values().cloned().collect();
    defs.push(ProcDef::new(&body_name, &[x], body.clone()));
    defs.push(ProcDef::new(
        &serve_name,
        &[],
        Process::recv(
            Channel::input("i"),
            "x",
            Process::par(
                Process::call(&body_name, vec![var("x")]),
                Process::call(&serve_name, vec![]),
            ),
        ),
    ));
    Ok(Program::new(["i"], ["o"], defs, Process::call(&serve_name, vec![]))?)
}

/// `if nil x then <on ε> else <on nonempty>` prepending one bit of a
/// reversal: `Loop<tl a, b:acc, …>` for the first bit `b` of `a`.
fn shift_bit(a: &str, call: &dyn Fn(bool) -> Process) -> Process {
    Process::cond(BoolExpr::is0(var(a)), call(false), call(true))
}

/// The functional behavior of an online process: the input word is fed to
/// it one bit at a time (`ε` for 0, `1` for 1) over an internal queue and
/// the answers are concatenated into a single output.
pub fn offline_from_online(q: &Program) -> Result<Program, EncodeError> {
    if q.inputs().iter().ne(["i"].iter()) || q.outputs().iter().ne(["o"].iter()) {
        return Err(EncodeError::Invalid("offline_from_online expects channels i and o".into()));
    }
    let keys = fresh_keys(q, 2);
    let (kin, kout) = (keys[0].clone(), keys[1].clone());
    let redirect = |c: &Channel| match c {
        Channel::ExternalIn(_) => Channel::queue(StrExpr::Lit(kin.clone())),
        Channel::ExternalOut(_) => Channel::queue(StrExpr::Lit(kout.clone())),
        c => c.clone(),
    };
    let mut defs: Vec<ProcDef> = q
        .defs()
        .values()
        .map(|d| ProcDef {
            name: d.name.clone(),
            params: d.params.clone(),
            body: Arc::new(map_channels(&d.body, &redirect)),
        })
        .collect();
    let taken: BTreeSet<String> = q.defs().keys().cloned().collect();
    let feed = fresh_name(&taken, "Feed");
    let app = fresh_name(&taken, "Append");
    let out = fresh_name(&taken, "Emit");
    let kin_ch = || Channel::queue(StrExpr::Lit(kin.clone()));
    let kout_ch = || Channel::queue(StrExpr::Lit(kout.clone()));
    let ask = |bit: &str| {
        Process::send(
            kin_ch(),
            StrExpr::lit(bit),
            Process::recv(
                kout_ch(),
                "d",
                Process::call(&app, vec![StrExpr::tl(var("x")), var("ra"), var("d")]),
            ),
        )
    };
    // Feed<x, ra>: ra is the output so far, reversed
    defs.push(ProcDef::new(
        &feed,
        &["x", "ra"],
        Process::cond(
            BoolExpr::nil(var("x")),
            Process::call(&out, vec![var("ra"), StrExpr::eps()]),
            Process::cond(BoolExpr::is0(var("x")), ask(""), ask("1")),
        ),
    ));
    defs.push(ProcDef::new(
        &app,
        &["x", "ra", "d"],
        Process::cond(
            BoolExpr::nil(var("d")),
            Process::call(&feed, vec![var("x"), var("ra")]),
            shift_bit("d", &|b| {
                Process::call(&app, vec![var("x"), StrExpr::prepend(b, var("ra")), StrExpr::tl(var("d"))])
            }),
        ),
    ));
    defs.push(ProcDef::new(
        &out,
        &["ra", "w"],
        Process::cond(
            BoolExpr::nil(var("ra")),
            Process::send(Channel::output("o"), var("w"), Process::nil()),
            shift_bit("ra", &|b| Process::call(&out, vec![StrExpr::tl(var("ra")), StrExpr::prepend(b, var("w"))])),
        ),
    ));
    let driver = Process::recv(
        Channel::input("i"),
        "x",
        Process::recv(
            kout_ch(),
            "d",
            Process::call(&app, vec![var("x"), StrExpr::eps(), var("d")]),
        ),
    );
    let main = Process::par(map_channels(q.main(), &redirect), driver);
    Ok(Program::new(["i"], ["o"], defs, main)?)
}

/// The online behavior of a functional process: after every input bit the
/// process is called afresh on the whole input so far, and only the part of
/// its answer beyond what was already emitted is output. The emitted total
/// waits in its own queue between rounds.
pub fn online_from_offline(p: &Program) -> Result<Program, EncodeError> {
    let (x, body) = split_functional(p, "online_from_offline")?;
    let keys = fresh_keys(p, 2);
    let (kout, kr) = (keys[0].clone(), keys[1].clone());
    let kout_ch = || Channel::queue(StrExpr::Lit(kout.clone()));
    let kr_ch = || Channel::queue(StrExpr::Lit(kr.clone()));
    let redirect = |c: &Channel| match c {
        Channel::ExternalOut(_) => kout_ch(),
        c => c.clone(),
    };
    let mut defs: Vec<ProcDef> = p
        .defs()
        .values()
        .map(|d| ProcDef {
            name: d.name.clone(),
            params: d.params.clone(),
            body: Arc::new(map_channels(&d.body, &redirect)),
        })
        .collect();
    let taken: BTreeSet<String> = p.defs().keys().cloned().collect();
    let body_name = fresh_name(&taken, "Body");
    let round = fresh_name(&taken, "Round");
    let diff = fresh_name(&taken, "Diff");
    defs.push(ProcDef::new(&body_name, &[x], map_channels(body, &redirect)));
    // Round<a, s, rs>: reverses rs (the input so far, last bit first) into s
    // and then calls the body on s
    let call = Process::par(
        Process::call(&body_name, vec![var("s")]),
        Process::recv(
            kout_ch(),
            "v",
            Process::recv(
                kr_ch(),
                "r",
                Process::call(&diff, vec![var("v"), var("r"), var("v"), var("rs")]),
            ),
        ),
    );
    defs.push(ProcDef::new(
        &round,
        &["a", "s", "rs"],
        Process::cond(
            BoolExpr::nil(var("a")),
            call,
            shift_bit("a", &|b| {
                Process::call(&round, vec![StrExpr::tl(var("a")), StrExpr::prepend(b, var("s")), var("rs")])
            }),
        ),
    ));
    let next = |b: bool| {
        let rs = StrExpr::prepend(b, var("rs"));
        Process::call(&round, vec![rs.clone(), StrExpr::eps(), rs])
    };
    // Diff<a, r, v, rs>: strips the emitted r off the answer a
    let emit = Process::send(
        Channel::output("o"),
        var("a"),
        Process::send(
            kr_ch(),
            var("v"),
            Process::recv(
                Channel::input("i"),
                "y",
                Process::cond(BoolExpr::nil(var("y")), next(false), next(true)),
            ),
        ),
    );
    defs.push(ProcDef::new(
        &diff,
        &["a", "r", "v", "rs"],
        Process::cond(
            BoolExpr::nil(var("r")),
            emit,
            Process::cond(
                BoolExpr::nil(var("a")),
                Process::nil(),
                Process::call(&diff, vec![StrExpr::tl(var("a")), StrExpr::tl(var("r")), var("v"), var("rs")]),
            ),
        ),
    ));
    let main = Process::send(
        kr_ch(),
        StrExpr::eps(),
        Process::call(&round, vec![StrExpr::eps(), StrExpr::eps(), StrExpr::eps()]),
    );
    Ok(Program::new(["i"], ["o"], defs, main)?)
}
