//! Postdominators and control dependence.

use super::cfg::Cfg;
use std::collections::BTreeSet;

/// Immediate dominators of a graph given by successor lists, rooted at
/// `root`. Unreachable nodes get `None`; the root is its own dominator.
pub fn immediate_dominators(succs: &[Vec<usize>], root: usize) -> Vec<Option<usize>> {
    let n = succs.len();
    let mut preds = vec![Vec::new(); n];
    for (u, ss) in succs.iter().enumerate() {
        for &v in ss {
            preds[v].push(u);
        }
    }
    // Reverse postorder by iterative DFS.
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    let mut stack = vec![(root, 0usize)];
    seen[root] = true;
    while let Some((u, i)) = stack.pop() {
        if let Some(&v) = succs[u].get(i) {
            stack.push((u, i + 1));
            if !seen[v] {
                seen[v] = true;
                stack.push((v, 0));
            }
        } else {
            order.push(u);
        }
    }
    order.reverse();
    let mut rpo = vec![usize::MAX; n];
    for (i, &u) in order.iter().enumerate() {
        rpo[u] = i;
    }

    let mut idom: Vec<Option<usize>> = vec![None; n];
    idom[root] = Some(root);
    let intersect = |idom: &[Option<usize>], mut a: usize, mut b: usize| {
        while a != b {
            while rpo[a] > rpo[b] {
                a = idom[a].unwrap();
            }
            while rpo[b] > rpo[a] {
                b = idom[b].unwrap();
            }
        }
        a
    };
    let mut changed = true;
    while changed {
        changed = false;
        for &u in order.iter().skip(1) {
            let mut new = None;
            for &p in &preds[u] {
                if idom[p].is_some() {
                    new = Some(match new {
                        None => p,
                        Some(cur) => intersect(&idom, p, cur),
                    });
                }
            }
            if new.is_some() && idom[u] != new {
                idom[u] = new;
                changed = true;
            }
        }
    }
    idom
}

/// Immediate postdominators: dominators of the reversed graph rooted at `exit`.
pub fn immediate_postdominators(succs: &[Vec<usize>], exit: usize) -> Vec<Option<usize>> {
    let mut rev = vec![Vec::new(); succs.len()];
    for (u, ss) in succs.iter().enumerate() {
        for &v in ss {
            rev[v].push(u);
        }
    }
    immediate_dominators(&rev, exit)
}

/// Control dependences `(controller, dependent)` of a graph with a unique
/// entry and exit. An extra entry-to-exit edge is assumed, so every node not
/// governed by a branch depends on `entry`. A loop header depends on itself.
pub fn control_dependence_raw(succs: &[Vec<usize>], entry: usize, exit: usize) -> BTreeSet<(usize, usize)> {
    let mut aug = succs.to_vec();
    if !aug[entry].contains(&exit) {
        aug[entry].push(exit);
    }
    let ipdom = immediate_postdominators(&aug, exit);
    let mut deps = BTreeSet::new();
    for (a, ss) in aug.iter().enumerate() {
        let Some(stop) = ipdom[a] else { continue };
        for &b in ss {
            let mut runner = b;
            while runner != stop && runner != exit {
                deps.insert((a, runner));
                match ipdom[runner] {
                    Some(next) if next != runner => runner = next,
                    _ => break,
                }
            }
        }
    }
    deps
}

/// Control dependences of a method CFG, including those caused by exception edges.
pub fn control_dependence(cfg: &Cfg) -> BTreeSet<(usize, usize)> {
    control_dependence_raw(&cfg.plain_succs(), Cfg::ENTRY, Cfg::EXIT)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn straight_line_depends_on_entry() {
        // 0=entry 1=exit 2,3,4 chain
        let succs = vec![vec![2], vec![], vec![3], vec![4], vec![1]];
        let cd = control_dependence_raw(&succs, 0, 1);
        assert_eq!(cd, [(0, 2), (0, 3), (0, 4)].into());
    }

    #[test]
    fn diamond() {
        // 2 = if p, 3 = A, 4 = B, 5 = C
        let succs = vec![vec![2], vec![], vec![3, 4], vec![5], vec![5], vec![1]];
        let cd = control_dependence_raw(&succs, 0, 1);
        assert_eq!(cd, [(0, 2), (0, 5), (2, 3), (2, 4)].into());
    }

    #[test]
    fn loop_header_depends_on_itself() {
        let succs = vec![vec![2], vec![], vec![3, 1], vec![2]];
        let cd = control_dependence_raw(&succs, 0, 1);
        assert_eq!(cd, [(0, 2), (2, 2), (2, 3)].into());
    }
}
