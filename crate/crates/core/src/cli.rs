use std::collections::BTreeMap;
use std::fs;
use std::io::{self, BufRead, Write};
use std::path::Path;

use procmachine::behavior::{
    explore_lts, functional_lts, weak_bisim, Distinction, ExploreOptions, FiniteLts, FunTable, Side as BSide,
};
use procmachine::causality::SpaceMode;
use procmachine::complexity::{class_evidence, cost_report, parse_bound, EvidenceOptions};
use procmachine::encoders::{
    encode_atm, encode_circuit, encode_pram, encode_ram, encode_rtm, encode_tm, AtmSpec, CircuitSpec, PramProgram,
    RamProgram, RtmSpec, TmSpec,
};
use procmachine::machine::{run_with, Action, InputProvider, Policy, RunStatus, ScriptedInput, TransitionRecord};
use procmachine::proclang::{parse_program, Program};
use procmachine::Word;

use crate::{CheckArgs, CompareArgs, EncodeArgs, Exec, ExploreArgs, Kind, ReportArgs, RunArgs, Scheduler, Space, SpaceArg};

const OK: u8 = 0;
const FAILED: u8 = 1;
const BAD_INPUT: u8 = 2;
const RUNTIME: u8 = 3;
const STEP_LIMIT: u8 = 4;
const INCONCLUSIVE: u8 = 5;

/// A diagnostic and the exit code it maps to.
struct Fail(u8, String);

type Outcome = Result<u8, Fail>;

fn finish(o: Outcome) -> u8 {
    match o {
        Ok(code) => code,
        Err(Fail(code, msg)) => {
            eprintln!("error: {msg}");
            code
        }
    }
}

fn read(path: &Path) -> Result<String, Fail> {
    fs::read_to_string(path).map_err(|e| Fail(BAD_INPUT, format!("{}: {e}", path.display())))
}

fn load_program(path: &Path) -> Result<Program, Fail> {
    parse_program(&read(path)?).map_err(|e| Fail(BAD_INPUT, format!("{}: {e}", path.display())))
}

fn load_script(path: &Path) -> Result<ScriptedInput, Fail> {
    ScriptedInput::parse(&read(path)?).map_err(|e| Fail(BAD_INPUT, format!("{}: {e}", path.display())))
}

fn policy(s: Scheduler, seed: u64) -> Policy {
    match s {
        Scheduler::Fifo => Policy::FifoTag,
        Scheduler::Random => Policy::Random(seed),
    }
}

fn space_mode(s: &Space) -> SpaceMode {
    match s.mode {
        SpaceArg::Observed => SpaceMode::Observed,
        SpaceArg::Exact => SpaceMode::Exact,
    }
}

fn status_code(s: &RunStatus) -> u8 {
    match s {
        RunStatus::Completed => OK,
        RunStatus::StepLimit => STEP_LIMIT,
        RunStatus::RuntimeError { .. } => RUNTIME,
    }
}

fn status_line(s: &RunStatus) -> String {
    match s {
        RunStatus::Completed => "completed".into(),
        RunStatus::StepLimit => "step limit reached".into(),
        RunStatus::RuntimeError { tag, message } => format!("runtime error at processor {}: {message}", tag.quoted()),
    }
}

/// Prompts on standard error for each word the machine asks for. A line is a
/// word (bare bits or quoted, empty for ε); end of input closes the channel.
struct Terminal {
    pending: BTreeMap<String, Option<Word>>,
}

impl InputProvider for Terminal {
    fn peek(&mut self, channel: &str) -> Option<Word> {
        if let Some(w) = self.pending.get(channel) {
            return w.clone();
        }
        let stdin = io::stdin();
        let word = loop {
            eprint!("{channel}? ");
            let _ = io::stderr().flush();
            let mut line = String::new();
            match stdin.lock().read_line(&mut line) {
                Ok(0) | Err(_) => break None,
                Ok(_) => match Word::parse_token(line.trim()) {
                    Ok(w) => break Some(w),
                    Err(e) => eprintln!("{e}"),
                },
            }
        };
        self.pending.insert(channel.to_string(), word.clone());
        word
    }

    fn take(&mut self, channel: &str) {
        self.pending.remove(channel);
    }
}

fn print_visible(rec: &TransitionRecord) {
    match &rec.action {
        Action::Input { channel, word } => println!("in {channel} {}", word.quoted()),
        Action::Output { channel, word } => println!("out {channel} {}", word.quoted()),
        Action::Tau => {}
    }
}

pub fn run(a: RunArgs) -> u8 {
    finish((|| {
        let prog = load_program(&a.program)?;
        let mut provider: Box<dyn InputProvider> = if a.interactive {
            Box::new(Terminal { pending: BTreeMap::new() })
        } else {
            Box::new(match &a.exec.script {
                Some(p) => load_script(p)?,
                None => ScriptedInput::new(),
            })
        };
        let r = run_with(
            &prog,
            provider.as_mut(),
            policy(a.exec.scheduler, a.exec.seed),
            a.exec.step_limit,
            &mut print_visible,
        );
        eprintln!("status: {} after {} steps", status_line(&r.status), r.steps.len());
        Ok(status_code(&r.status))
    })())
}

fn exec_run(prog: &Program, e: &Exec) -> Result<procmachine::machine::Run, Fail> {
    let mut script = match &e.script {
        Some(p) => load_script(p)?,
        None => ScriptedInput::new(),
    };
    Ok(procmachine::machine::run(prog, &mut script, policy(e.scheduler, e.seed), e.step_limit))
}

pub fn report(a: ReportArgs) -> u8 {
    finish((|| {
        let prog = load_program(&a.program)?;
        let r = exec_run(&prog, &a.exec)?;
        let rep = cost_report(&prog, &r, space_mode(&a.space), a.space.exact_limit)
            .map_err(|e| Fail(RUNTIME, e.to_string()))?;
        if a.json {
            println!("{}", rep.to_json());
        } else {
            print!("{rep}");
            println!(
                "# status={} steps={} total_weight={}",
                status_line(&rep.status),
                rep.steps,
                rep.total_weight
            );
        }
        Ok(OK)
    })())
}

pub fn check(a: CheckArgs) -> u8 {
    finish((|| {
        let prog = load_program(&a.program)?;
        let bound = |s: &str| parse_bound(s).map_err(|e| Fail(BAD_INPUT, e.to_string()));
        let (f, g) = (bound(&a.time)?, bound(&a.space)?);
        let mut paths = a.inputs.clone();
        if let Some(dir) = &a.suite {
            let entries = fs::read_dir(dir).map_err(|e| Fail(BAD_INPUT, format!("{}: {e}", dir.display())))?;
            let mut found: Vec<_> = entries
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "in"))
                .collect();
            found.sort();
            paths.extend(found);
        }
        let suite = paths.iter().map(|p| load_script(p)).collect::<Result<Vec<_>, _>>()?;
        let opts = EvidenceOptions {
            policy: policy(a.scheduler, a.seed),
            step_limit: a.step_limit,
            space_mode: space_mode(&a.space_opts),
            exact_limit: a.space_opts.exact_limit,
        };
        let ev = class_evidence(&prog, &suite, &f, &g, opts).map_err(|e| Fail(RUNTIME, e.to_string()))?;
        if a.json {
            println!("{}", serde_json::to_string_pretty(&ev).expect("evidence serializes"));
        } else {
            for (p, rep) in paths.iter().zip(&ev.reports) {
                println!("# run {}", p.display());
                print!("{rep}");
            }
            println!("{}", ev.verdict);
        }
        Ok(if ev.verdict.pass() { OK } else { FAILED })
    })())
}

pub fn encode(a: EncodeArgs) -> u8 {
    finish((|| {
        let text = read(&a.spec)?;
        let bad = |e: procmachine::encoders::EncodeError| Fail(BAD_INPUT, format!("{}: {e}", a.spec.display()));
        let prog = match a.kind {
            Kind::Tm => encode_tm(&TmSpec::parse(&text).map_err(bad)?),
            Kind::Atm => encode_atm(&AtmSpec::parse(&text).map_err(bad)?),
            Kind::Ram => encode_ram(&RamProgram::parse(&text).map_err(bad)?),
            Kind::Pram => encode_pram(&PramProgram::parse(&text).map_err(bad)?),
            Kind::Circuit => encode_circuit(&CircuitSpec::parse(&text).map_err(bad)?),
            Kind::Rtm => encode_rtm(&RtmSpec::parse(&text).map_err(bad)?),
        }
        .map_err(bad)?;
        let src = prog.to_string();
        match &a.output {
            Some(p) => fs::write(p, &src).map_err(|e| Fail(BAD_INPUT, format!("{}: {e}", p.display())))?,
            None => print!("{src}"),
        }
        Ok(OK)
    })())
}

enum Side {
    Prog(Program),
    Table(FunTable),
}

fn load_side(path: &Path) -> Result<Side, Fail> {
    if path.extension().is_some_and(|x| x == "tab") {
        let t = FunTable::parse(&read(path)?).map_err(|e| Fail(BAD_INPUT, format!("{}: {e}", path.display())))?;
        Ok(Side::Table(t))
    } else {
        load_program(path).map(Side::Prog)
    }
}

fn input_words(given: &Option<Vec<String>>, tables: &[&FunTable]) -> Result<Vec<Word>, Fail> {
    if let Some(list) = given {
        return list
            .iter()
            .map(|t| Word::parse_token(t.trim()).map_err(|e| Fail(BAD_INPUT, format!("--inputs: {e}"))))
            .collect();
    }
    let mut words: Vec<Word> = tables.iter().flat_map(|t| t.domain()).collect();
    if words.is_empty() {
        words = vec![Word::empty(), Word::from("0"), Word::from("1")];
    }
    words.sort();
    words.dedup();
    Ok(words)
}

fn lts_of(side: &Side, words: &[Word], opts: ExploreOptions) -> FiniteLts {
    match side {
        Side::Prog(p) => explore_lts(p, words, opts),
        Side::Table(t) => functional_lts(t),
    }
}

pub fn compare(a: CompareArgs) -> u8 {
    finish((|| {
        let (l, r) = (load_side(&a.left)?, load_side(&a.right)?);
        let tables: Vec<&FunTable> = [&l, &r]
            .into_iter()
            .filter_map(|s| match s {
                Side::Table(t) => Some(t),
                Side::Prog(_) => None,
            })
            .collect();
        let words = input_words(&a.inputs, &tables)?;
        let opts = ExploreOptions {
            state_limit: a.state_limit,
            visible_depth: a.depth,
        };
        let (la, lb) = (lts_of(&l, &words, opts), lts_of(&r, &words, opts));
        match weak_bisim(&la, &lb, a.div_sensitive) {
            Ok(v) if v.equivalent => {
                println!("equivalent");
                Ok(OK)
            }
            Ok(v) => {
                println!("not equivalent");
                match v.distinction {
                    Some(Distinction::Divergence { left, right, left_diverges }) => {
                        let who = if left_diverges { "left" } else { "right" };
                        println!("left state {left} and right state {right}: only the {who} one diverges");
                    }
                    Some(Distinction::Unmatched { left, right, mover, action, target }) => {
                        let who = match mover {
                            BSide::Left => "left",
                            BSide::Right => "right",
                        };
                        println!(
                            "left state {left} and right state {right}: the {who} one does {action} to {target}, unanswered"
                        );
                    }
                    None => {}
                }
                Ok(FAILED)
            }
            Err(e) => {
                println!("{e}");
                Ok(INCONCLUSIVE)
            }
        }
    })())
}

pub fn explore(a: ExploreArgs) -> u8 {
    finish((|| {
        let prog = load_program(&a.program)?;
        let words = input_words(&a.inputs, &[])?;
        let lts = explore_lts(
            &prog,
            &words,
            ExploreOptions {
                state_limit: a.state_limit,
                visible_depth: a.depth,
            },
        );
        print!("{lts}");
        Ok(OK)
    })())
}
