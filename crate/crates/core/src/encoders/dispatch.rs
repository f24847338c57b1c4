use std::collections::BTreeMap;

use crate::proclang::{BoolExpr, ProcDef, Process, StrExpr};
use crate::word::Word;

/// A cascade of emptiness and first-bit tests over `key` selecting the process
/// mapped to its value, `default` for keys outside the table.
pub fn dispatch_expr(key: &StrExpr, table: &BTreeMap<Word, Process>, default: &Process) -> Process {
    let entries: Vec<(&Word, &Process)> = table.iter().collect();
    node(key.clone(), &entries, 0, default)
}

fn node(key: StrExpr, entries: &[(&Word, &Process)], depth: usize, default: &Process) -> Process {
    if entries.is_empty() {
        return default.clone();
    }
    let here = entries.iter().find(|(w, _)| w.len() == depth).map(|(_, p)| (*p).clone());
    let deeper: Vec<(&Word, &Process)> = entries.iter().filter(|(w, _)| w.len() > depth).copied().collect();
    let at_end = here.unwrap_or_else(|| default.clone());
    if deeper.is_empty() {
        return Process::cond(BoolExpr::nil(key), at_end, default.clone());
    }
    let bit = |b: bool| -> Vec<(&Word, &Process)> {
        deeper
            .iter()
            .filter(|(w, _)| w.iter().nth(depth) == Some(b))
            .copied()
            .collect()
    };
    let (zeros, ones) = (bit(false), bit(true));
    let rest = StrExpr::tl(key.clone());
    let zero_branch = node(rest.clone(), &zeros, depth + 1, default);
    let one_branch = node(rest, &ones, depth + 1, default);
    Process::cond(
        BoolExpr::nil(key.clone()),
        at_end,
        Process::cond(BoolExpr::is0(key), zero_branch, one_branch),
    )
}

/// `name(params) := <cascade over params[key]>`.
pub fn finite_dispatch(
    name: &str,
    params: &[&str],
    key: usize,
    table: &BTreeMap<Word, Process>,
    default: &Process,
) -> ProcDef {
    let body = dispatch_expr(&StrExpr::var(params[key]), table, default);
    ProcDef::new(name, params, body)
}
