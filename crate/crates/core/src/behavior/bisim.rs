use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use super::lts::{explore_lts, ExploreOptions, FiniteLts, FunTable, StateId, functional_lts};
use crate::machine::Action;
use crate::proclang::Program;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BehaviorError {
    #[error("inconclusive: exploration was truncated at {0} state(s)")]
    Inconclusive(usize),
}

/// Tarjan's algorithm over the τ-edges. Components come out sinks first.
fn tau_sccs(n: usize, tau: &[Vec<StateId>]) -> (Vec<usize>, Vec<Vec<StateId>>) {
    const UNSEEN: usize = usize::MAX;
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comp = vec![UNSEEN; n];
    let mut comps: Vec<Vec<StateId>> = Vec::new();
    let mut counter = 0;
    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        let mut work: Vec<(StateId, usize)> = vec![(root, 0)];
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut next)) = work.last_mut() {
            if *next < tau[v].len() {
                let w = tau[v][*next];
                *next += 1;
                if index[w] == UNSEEN {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    work.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                work.pop();
                if let Some(&(u, _)) = work.last() {
                    low[u] = low[u].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut members = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w] = false;
                        comp[w] = comps.len();
                        members.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comps.push(members);
                }
            }
        }
    }
    (comp, comps)
}

fn split(lts: &FiniteLts) -> (Vec<Vec<StateId>>, Vec<Vec<(Action, StateId)>>) {
    let mut tau = vec![Vec::new(); lts.states];
    let mut vis = vec![Vec::new(); lts.states];
    for (s, a, t) in &lts.transitions {
        if a.is_tau() {
            tau[*s].push(*t);
        } else {
            vis[*s].push((a.clone(), *t));
        }
    }
    (tau, vis)
}

/// Per state: `Some(true)` divergent, `Some(false)` not, `None` unknown
/// because a truncated state is τ-reachable and no τ-cycle is.
pub fn divergence(l: &FiniteLts) -> Vec<Option<bool>> {
    let (tau, _) = split(l);
    let (comp, comps) = tau_sccs(l.states, &tau);
    let mut div = vec![false; comps.len()];
    let mut unknown = vec![false; comps.len()];
    for (c, members) in comps.iter().enumerate() {
        let cyclic = members.len() > 1 || tau[members[0]].contains(&members[0]);
        let mut d = cyclic;
        let mut u = members.iter().any(|&s| l.truncated[s]);
        for &s in members {
            for &t in &tau[s] {
                let tc = comp[t];
                if tc != c {
                    d |= div[tc];
                    u |= unknown[tc];
                }
            }
        }
        div[c] = d;
        unknown[c] = u && !d;
    }
    (0..l.states)
        .map(|s| {
            let c = comp[s];
            if div[c] {
                Some(true)
            } else if unknown[c] {
                None
            } else {
                Some(false)
            }
        })
        .collect()
}

/// States with an infinite τ-path. States of unknown status are excluded.
pub fn divergent_states(l: &FiniteLts) -> BTreeSet<StateId> {
    divergence(l)
        .into_iter()
        .enumerate()
        .filter(|(_, d)| *d == Some(true))
        .map(|(s, _)| s)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Distinction {
    /// Exactly one of the two states diverges.
    Divergence {
        left: StateId,
        right: StateId,
        left_diverges: bool,
    },
    /// `mover` performs `action` to `target`; the other state has no weak
    /// answer landing in an equivalent state.
    Unmatched {
        left: StateId,
        right: StateId,
        mover: Side,
        action: Action,
        target: StateId,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BisimVerdict {
    pub equivalent: bool,
    pub divergence_sensitive: bool,
    pub distinction: Option<Distinction>,
    left_blocks: Vec<u32>,
    right_blocks: Vec<u32>,
}

impl BisimVerdict {
    /// The largest (divergence-respecting, if requested) weak bisimulation
    /// between the two systems.
    pub fn relation(&self) -> Vec<(StateId, StateId)> {
        let mut by_block: HashMap<u32, Vec<StateId>> = HashMap::new();
        for (t, b) in self.right_blocks.iter().enumerate() {
            by_block.entry(*b).or_default().push(t);
        }
        let mut out = Vec::new();
        for (s, b) in self.left_blocks.iter().enumerate() {
            for &t in by_block.get(b).map(Vec::as_slice).unwrap_or(&[]) {
                out.push((s, t));
            }
        }
        out
    }

    pub fn related(&self, s: StateId, t: StateId) -> bool {
        self.left_blocks[s] == self.right_blocks[t]
    }
}

/// Weak bisimilarity by signature refinement on the disjoint union, with the
/// divergence condition imposed in both directions when requested.
pub fn weak_bisim(a: &FiniteLts, b: &FiniteLts, divergence_sensitive: bool) -> Result<BisimVerdict, BehaviorError> {
    let truncated = a.truncated_states().len() + b.truncated_states().len();
    if truncated > 0 {
        return Err(BehaviorError::Inconclusive(truncated));
    }
    let na = a.states;
    let n = na + b.states;
    let mut tau = vec![Vec::new(); n];
    let mut vis: Vec<Vec<(u32, StateId)>> = vec![Vec::new(); n];
    let mut actions: Vec<Action> = Vec::new();
    let mut action_id: HashMap<Action, u32> = HashMap::new();
    for (off, l) in [(0, a), (na, b)] {
        for (s, act, t) in &l.transitions {
            if act.is_tau() {
                tau[off + s].push(off + t);
            } else {
                let id = *action_id.entry(act.clone()).or_insert_with(|| {
                    actions.push(act.clone());
                    actions.len() as u32 - 1
                });
                vis[off + s].push((id, off + t));
            }
        }
    }
    let divs: Vec<bool> = divergence(a)
        .into_iter()
        .chain(divergence(b))
        .map(|d| d == Some(true))
        .collect();
    let (comp, comps) = tau_sccs(n, &tau);

    let mut block: Vec<u32> = (0..n)
        .map(|s| u32::from(divergence_sensitive && divs[s]))
        .collect();
    let mut count = block.iter().collect::<BTreeSet<_>>().len();
    let mut sigs;
    loop {
        sigs = signatures(&comps, &comp, &tau, &vis, &block);
        let mut ids: HashMap<(u32, &Vec<u32>, &Vec<(u32, u32)>), u32> = HashMap::new();
        let mut next = vec![0u32; n];
        for s in 0..n {
            let c = comp[s];
            let key = (block[s], &sigs.0[c], &sigs.1[c]);
            let fresh = ids.len() as u32;
            next[s] = *ids.entry(key).or_insert(fresh);
        }
        let new_count = ids.len();
        block = next;
        if new_count == count {
            break;
        }
        count = new_count;
    }
    sigs = signatures(&comps, &comp, &tau, &vis, &block);

    let (s0, t0) = (a.initial(), na + b.initial());
    let equivalent = block[s0] == block[t0];
    let distinction = (!equivalent).then(|| {
        if divergence_sensitive && divs[s0] != divs[t0] {
            return Distinction::Divergence {
                left: s0,
                right: b.initial(),
                left_diverges: divs[s0],
            };
        }
        let answers = |x: StateId| (&sigs.0[comp[x]], &sigs.1[comp[x]]);
        for (mover, me, other) in [(Side::Left, s0, t0), (Side::Right, t0, s0)] {
            let (tau_other, vis_other) = answers(other);
            for &m in &tau[me] {
                if tau_other.binary_search(&block[m]).is_err() {
                    return unmatched(mover, a, b, na, Action::Tau, m);
                }
            }
            for &(act, m) in &vis[me] {
                if vis_other.binary_search(&(act, block[m])).is_err() {
                    return unmatched(mover, a, b, na, actions[act as usize].clone(), m);
                }
            }
        }
        unreachable!("states in different blocks of a stable partition differ on some move")
    });
    Ok(BisimVerdict {
        equivalent,
        divergence_sensitive,
        distinction,
        left_blocks: block[..na].to_vec(),
        right_blocks: block[na..].to_vec(),
    })
}

fn unmatched(mover: Side, a: &FiniteLts, b: &FiniteLts, na: usize, action: Action, target: StateId) -> Distinction {
    Distinction::Unmatched {
        left: a.initial(),
        right: b.initial(),
        mover,
        action,
        target: if mover == Side::Left { target } else { target - na },
    }
}

/// For every τ-component: the blocks reachable by `τ*` and the pairs
/// `(action, block)` reachable by `τ* a τ*`, both sorted.
#[allow(clippy::type_complexity)]
fn signatures(
    comps: &[Vec<StateId>],
    comp: &[usize],
    tau: &[Vec<StateId>],
    vis: &[Vec<(u32, StateId)>],
    block: &[u32],
) -> (Vec<Vec<u32>>, Vec<Vec<(u32, u32)>>) {
    let mut tau_b: Vec<Vec<u32>> = vec![Vec::new(); comps.len()];
    let mut vis_b: Vec<Vec<(u32, u32)>> = vec![Vec::new(); comps.len()];
    // components are ordered sinks first, so successors are already done
    for (c, members) in comps.iter().enumerate() {
        let mut tb: BTreeSet<u32> = members.iter().map(|&s| block[s]).collect();
        for &s in members {
            for &t in &tau[s] {
                if comp[t] != c {
                    tb.extend(tau_b[comp[t]].iter().copied());
                }
            }
        }
        tau_b[c] = tb.into_iter().collect();
    }
    for (c, members) in comps.iter().enumerate() {
        let mut vb: BTreeSet<(u32, u32)> = BTreeSet::new();
        for &s in members {
            for &(act, t) in &vis[s] {
                vb.extend(tau_b[comp[t]].iter().map(|&bl| (act, bl)));
            }
            for &t in &tau[s] {
                if comp[t] != c {
                    vb.extend(vis_b[comp[t]].iter().copied());
                }
            }
        }
        vis_b[c] = vb.into_iter().collect();
    }
    (tau_b, vis_b)
}

/// Explores `prog` on the table's domain and compares it with `i(x).o<f(x)>`
/// up to divergence-sensitive weak bisimilarity.
pub fn check_functional(prog: &Program, t: &FunTable, state_limit: usize) -> Result<BisimVerdict, BehaviorError> {
    let explored = explore_lts(
        prog,
        &t.domain(),
        ExploreOptions {
            state_limit,
            visible_depth: None,
        },
    );
    weak_bisim(&explored, &functional_lts(t), true)
}
