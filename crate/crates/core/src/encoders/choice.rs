use std::collections::BTreeSet;

use crate::proclang::{BoolExpr, Channel, Process, StrExpr};
use crate::word::Word;

fn fresh(taken: &BTreeSet<String>, base: &str) -> String {
    (0..)
        .map(|i| if i == 0 { base.to_string() } else { format!("{base}{i}") })
        .find(|n| !taken.contains(n))
        .expect("unbounded supply of names")
}

/// Nondeterministic choice among `branches` resolved through the queue at
/// `key`: two racing senders of `0` and `1`, and a reader that takes the
/// first branch still pending on `0`, the current one on `1`. A single
/// branch is taken directly, so the choice never deadlocks.
pub fn internal_choice(key: &Word, branches: Vec<Process>) -> Process {
    let mut taken = BTreeSet::new();
    for b in &branches {
        taken.extend(b.free_vars());
    }
    let (x, y) = (fresh(&taken, "cx"), fresh(&taken, "cy"));
    let ch = || Channel::queue(StrExpr::Lit(key.clone()));
    let mut it = branches.into_iter();
    let Some(first) = it.next() else {
        return Process::nil();
    };
    it.fold(first, |rest, next| {
        let senders = Process::par(
            Process::send(ch(), StrExpr::lit("0"), Process::nil()),
            Process::send(ch(), StrExpr::lit("1"), Process::nil()),
        );
        let pick = Process::recv(
            ch(),
            &x,
            Process::recv(ch(), &y, Process::cond(BoolExpr::is0(StrExpr::var(&y)), rest, next)),
        );
        Process::par(senders, pick)
    })
}
