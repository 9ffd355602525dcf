//! Reaching definitions over per-node event lists.

use std::collections::{BTreeSet, VecDeque};

/// One access performed by a CFG node, in evaluation order. `at` names the
/// finer-grained graph node the access is attributed to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Event<V, N> {
    Use { var: V, at: N },
    /// A strong definition kills every earlier definition of `var`; a weak one kills nothing.
    Def { var: V, at: N, strong: bool },
}

/// Def-use pairs `(def_at, use_at, var)`: the definition reaches the use
/// along some path with no intervening strong definition of the variable.
pub fn reaching_definitions<V, N>(succs: &[Vec<usize>], entry: usize, events: &[Vec<Event<V, N>>]) -> BTreeSet<(N, N, V)>
where
    V: Ord + Clone,
    N: Ord + Copy,
{
    let n = succs.len();
    let mut ins: Vec<BTreeSet<(V, N)>> = vec![BTreeSet::new(); n];
    let mut outs: Vec<BTreeSet<(V, N)>> = vec![BTreeSet::new(); n];
    let mut preds = vec![Vec::new(); n];
    for (u, ss) in succs.iter().enumerate() {
        for &v in ss {
            preds[v].push(u);
        }
    }
    let mut queue: VecDeque<usize> = (0..n).collect();
    let mut queued = vec![true; n];
    queued[entry] = true;
    while let Some(u) = queue.pop_front() {
        queued[u] = false;
        let mut cur: BTreeSet<(V, N)> = BTreeSet::new();
        for &p in &preds[u] {
            cur.extend(outs[p].iter().cloned());
        }
        ins[u] = cur.clone();
        transfer(&mut cur, &events[u], None);
        if cur != outs[u] {
            outs[u] = cur;
            for &s in &succs[u] {
                if !queued[s] {
                    queued[s] = true;
                    queue.push_back(s);
                }
            }
        }
    }
    let mut pairs = BTreeSet::new();
    for u in 0..n {
        let mut cur = std::mem::take(&mut ins[u]);
        transfer(&mut cur, &events[u], Some(&mut pairs));
    }
    pairs
}

fn transfer<V: Ord + Clone, N: Ord + Copy>(
    set: &mut BTreeSet<(V, N)>,
    events: &[Event<V, N>],
    mut pairs: Option<&mut BTreeSet<(N, N, V)>>,
) {
    for e in events {
        match e {
            Event::Use { var, at } => {
                if let Some(pairs) = pairs.as_deref_mut() {
                    for (v, d) in set.iter().filter(|(v, _)| v == var) {
                        pairs.insert((*d, *at, v.clone()));
                    }
                }
            }
            Event::Def { var, at, strong } => {
                if *strong {
                    set.retain(|(v, _)| v != var);
                }
                set.insert((var.clone(), *at));
            }
        }
    }
}
