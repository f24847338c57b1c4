//! C interface to the process machine.
//!
//! Every fallible function returns a [`PmError`] code and writes its result
//! through an out pointer. On failure the message is kept per thread and can be
//! read with [`pm_last_error_message`]. Strings handed out by this library are
//! owned by the caller and released with [`pm_string_free`].
#![deny(unsafe_op_in_unsafe_fn)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use procmachine::causality::SpaceMode;
use procmachine::complexity::cost_report;
use procmachine::encoders::{
    encode_atm, encode_circuit, encode_pram, encode_ram, encode_rtm, encode_tm, AtmSpec, CircuitSpec, PramProgram,
    RamProgram, RtmSpec, TmSpec,
};
use procmachine::machine::{run, Policy, Run, RunStatus, ScriptedInput};
use procmachine::proclang::{parse_program, Program};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PmError {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Encode = 4,
    Cost = 5,
    OutOfRange = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PmRunStatus {
    Completed = 0,
    StepLimit = 1,
    RuntimeError = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PmKind {
    Tm = 0,
    Atm = 1,
    Ram = 2,
    Pram = 3,
    Circuit = 4,
    Rtm = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PmSpaceMode {
    Observed = 0,
    Exact = 1,
}

/// A parsed program.
pub struct PmProgram {
    program: Program,
}

/// A finished run, together with the program it ran.
pub struct PmRun {
    program: Program,
    run: Run,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(PmError, String);

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', "\\0")).expect("nul bytes replaced");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

/// Runs `f`, recording its error message and turning panics into [`PmError::Panic`].
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> PmError {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PmError::Ok,
        Ok(Err(Failure(code, msg))) => {
            set_error(msg);
            code
        }
        Err(_) => {
            set_error("internal panic".into());
            PmError::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(PmError::NullArgument, format!("{what} is null")));
    }
    // SAFETY: caller promises a nul-terminated string that outlives the call.
    unsafe { CStr::from_ptr(p) }
        .to_str()
        .map_err(|e| Failure(PmError::InvalidUtf8, format!("{what}: {e}")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    // SAFETY: non-null handles were produced by this library and not yet freed.
    unsafe { p.as_ref() }.ok_or_else(|| Failure(PmError::NullArgument, format!("{what} is null")))
}

fn out_ptr<T>(p: *mut T) -> Result<*mut T, Failure> {
    if p.is_null() {
        Err(Failure(PmError::NullArgument, "output pointer is null".into()))
    } else {
        Ok(p)
    }
}

fn to_c(s: String) -> *mut c_char {
    CString::new(s.replace('\0', "\\0")).expect("nul bytes replaced").into_raw()
}

/// Message of the last failed call on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn pm_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` is null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pm_string_free(s: *mut c_char) {
    if !s.is_null() {
        // SAFETY: produced by CString::into_raw in this crate.
        drop(unsafe { CString::from_raw(s) });
    }
}

/// # Safety
/// `source` is a nul-terminated string; `out` points to writable storage.
#[no_mangle]
pub unsafe extern "C" fn pm_program_parse(source: *const c_char, out: *mut *mut PmProgram) -> PmError {
    guard(|| {
        let out = out_ptr(out)?;
        let src = unsafe { text(source, "source") }?;
        let program = parse_program(src).map_err(|e| Failure(PmError::Parse, e.to_string()))?;
        // SAFETY: checked non-null above.
        unsafe { *out = Box::into_raw(Box::new(PmProgram { program })) };
        Ok(())
    })
}

/// # Safety
/// `p` is null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pm_program_free(p: *mut PmProgram) {
    if !p.is_null() {
        // SAFETY: produced by Box::into_raw in this crate.
        drop(unsafe { Box::from_raw(p) });
    }
}

/// Pretty-prints the program in the surface syntax.
///
/// # Safety
/// `p` is a live program handle; `out` points to writable storage.
#[no_mangle]
pub unsafe extern "C" fn pm_program_to_source(p: *const PmProgram, out: *mut *mut c_char) -> PmError {
    guard(|| {
        let out = out_ptr(out)?;
        let p = unsafe { handle(p, "program") }?;
        unsafe { *out = to_c(p.program.to_string()) };
        Ok(())
    })
}

/// Compiles a machine description of the given kind into a program.
///
/// # Safety
/// `spec` is a nul-terminated string; `out` points to writable storage.
#[no_mangle]
pub unsafe extern "C" fn pm_encode(kind: PmKind, spec: *const c_char, out: *mut *mut PmProgram) -> PmError {
    guard(|| {
        let out = out_ptr(out)?;
        let s = unsafe { text(spec, "spec") }?;
        let bad = |e: procmachine::encoders::EncodeError| Failure(PmError::Encode, e.to_string());
        let program = match kind {
            PmKind::Tm => encode_tm(&TmSpec::parse(s).map_err(bad)?),
            PmKind::Atm => encode_atm(&AtmSpec::parse(s).map_err(bad)?),
            PmKind::Ram => encode_ram(&RamProgram::parse(s).map_err(bad)?),
            PmKind::Pram => encode_pram(&PramProgram::parse(s).map_err(bad)?),
            PmKind::Circuit => encode_circuit(&CircuitSpec::parse(s).map_err(bad)?),
            PmKind::Rtm => encode_rtm(&RtmSpec::parse(s).map_err(bad)?),
        }
        .map_err(bad)?;
        unsafe { *out = Box::into_raw(Box::new(PmProgram { program })) };
        Ok(())
    })
}

/// Runs a program to completion. `script` holds lines `channel <name>: <words>`
/// and may be null for no input. `random` picks the seeded random
/// scheduler instead of lowest-tag-first.
///
/// # Safety
/// `p` is a live program handle; `script` is null or nul-terminated; `out`
/// points to writable storage.
#[no_mangle]
pub unsafe extern "C" fn pm_run_new(
    p: *const PmProgram,
    script: *const c_char,
    random: bool,
    seed: u64,
    step_limit: usize,
    out: *mut *mut PmRun,
) -> PmError {
    guard(|| {
        let out = out_ptr(out)?;
        let p = unsafe { handle(p, "program") }?;
        let mut input = if script.is_null() {
            ScriptedInput::new()
        } else {
            let s = unsafe { text(script, "script") }?;
            ScriptedInput::parse(s).map_err(|e| Failure(PmError::Parse, e.to_string()))?
        };
        let policy = if random { Policy::Random(seed) } else { Policy::FifoTag };
        let r = run(&p.program, &mut input, policy, step_limit);
        let boxed = Box::new(PmRun {
            program: p.program.clone(),
            run: r,
        });
        unsafe { *out = Box::into_raw(boxed) };
        Ok(())
    })
}

/// # Safety
/// `r` is null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pm_run_free(r: *mut PmRun) {
    if !r.is_null() {
        // SAFETY: produced by Box::into_raw in this crate.
        drop(unsafe { Box::from_raw(r) });
    }
}

/// # Safety
/// `r` is a live run handle; `out` points to writable storage.
#[no_mangle]
pub unsafe extern "C" fn pm_run_status(r: *const PmRun, out: *mut PmRunStatus) -> PmError {
    guard(|| {
        let out = out_ptr(out)?;
        let r = unsafe { handle(r, "run") }?;
        let s = match &r.run.status {
            RunStatus::Completed => PmRunStatus::Completed,
            RunStatus::StepLimit => PmRunStatus::StepLimit,
            RunStatus::RuntimeError { .. } => PmRunStatus::RuntimeError,
        };
        unsafe { *out = s };
        Ok(())
    })
}

/// Number of transitions taken.
///
/// # Safety
/// `r` is a live run handle; `out` points to writable storage.
#[no_mangle]
pub unsafe extern "C" fn pm_run_steps(r: *const PmRun, out: *mut usize) -> PmError {
    guard(|| {
        let out = out_ptr(out)?;
        let r = unsafe { handle(r, "run") }?;
        unsafe { *out = r.run.steps.len() };
        Ok(())
    })
}

/// # Safety
/// `r` is a live run handle; `out` points to writable storage.
#[no_mangle]
pub unsafe extern "C" fn pm_run_output_count(r: *const PmRun, out: *mut usize) -> PmError {
    guard(|| {
        let out = out_ptr(out)?;
        let r = unsafe { handle(r, "run") }?;
        unsafe { *out = r.run.outputs().len() };
        Ok(())
    })
}

/// Channel and word (as a bit string) of the `k`-th output, 0-based. Both
/// strings are freed with [`pm_string_free`].
///
/// # Safety
/// `r` is a live run handle; `channel` and `word` point to writable storage.
#[no_mangle]
pub unsafe extern "C" fn pm_run_output(
    r: *const PmRun,
    k: usize,
    channel: *mut *mut c_char,
    word: *mut *mut c_char,
) -> PmError {
    guard(|| {
        let (channel, word) = (out_ptr(channel)?, out_ptr(word)?);
        let r = unsafe { handle(r, "run") }?;
        let outs = r.run.outputs();
        let (_, ch, w) = outs
            .get(k)
            .ok_or_else(|| Failure(PmError::OutOfRange, format!("output {k} of {}", outs.len())))?;
        unsafe {
            *channel = to_c(ch.to_string());
            *word = to_c(w.to_bit_string());
        }
        Ok(())
    })
}

/// The cost report of the run, one line per output, as printed by `procmachine report`.
///
/// # Safety
/// `r` is a live run handle; `out` points to writable storage.
#[no_mangle]
pub unsafe extern "C" fn pm_run_report_text(
    r: *const PmRun,
    mode: PmSpaceMode,
    exact_limit: usize,
    out: *mut *mut c_char,
) -> PmError {
    guard(|| {
        let out = out_ptr(out)?;
        let r = unsafe { handle(r, "run") }?;
        let mode = match mode {
            PmSpaceMode::Observed => SpaceMode::Observed,
            PmSpaceMode::Exact => SpaceMode::Exact,
        };
        let rep = cost_report(&r.program, &r.run, mode, exact_limit).map_err(|e| Failure(PmError::Cost, e.to_string()))?;
        unsafe { *out = to_c(rep.to_string()) };
        Ok(())
    })
}
