//! The labelled transition system of a reactive Turing machine, built
//! directly from its transition table.

use std::collections::{BTreeMap, HashMap, VecDeque};

use procmachine::behavior::FiniteLts;
use procmachine::encoders::{Move, RtmSpec};
use procmachine::machine::Action;

/// State, non-blank cells by position, head position.
type Snapshot = (usize, BTreeMap<i64, usize>, i64);

/// All behavior with at most `depth` visible actions. Actions are labelled
/// with the machine's action codes on channel `o`.
pub fn rtm_lts(m: &RtmSpec, depth: usize) -> FiniteLts {
    let mut lts = FiniteLts::new(1);
    let start: Snapshot = (m.initial, BTreeMap::new(), 0);
    let mut ids: HashMap<(Snapshot, usize), usize> = HashMap::new();
    ids.insert((start.clone(), 0), 0);
    let mut queue = VecDeque::from([(start, 0usize)]);
    while let Some((snap, d)) = queue.pop_front() {
        let from = ids[&(snap.clone(), d)];
        let (state, tape, head) = &snap;
        for t in m.trans.iter().filter(|t| t.from == *state && t.read == tape.get(head).copied()) {
            let action = match t.action {
                Some(a) => Action::Output {
                    channel: "o".into(),
                    word: m.action_code(a),
                },
                None => Action::Tau,
            };
            let nd = d + usize::from(!action.is_tau());
            if nd > depth {
                continue;
            }
            let mut cells = tape.clone();
            match t.write {
                Some(x) => cells.insert(*head, x),
                None => cells.remove(head),
            };
            let moved = match t.mv {
                Move::L => head - 1,
                Move::R => head + 1,
            };
            let key = ((t.to, cells, moved), nd);
            let to = match ids.get(&key) {
                Some(&id) => id,
                None => {
                    let id = lts.add_state();
                    ids.insert(key.clone(), id);
                    queue.push_back(key.clone());
                    id
                }
            };
            lts.add_transition(from, action, to);
        }
    }
    lts
}
