#![allow(dead_code)]

use mergeifc::graph::cfg::Cfg;
use mergeifc::graph::control::control_dependence_raw;
use mergeifc::graph::{build_cfg, summary_edges, EdgeKind, NodeId, NodeKind, Sdg, SdgBuilder, Slot};
use mergeifc::ifc::forward_slice;
use mergeifc::lang::ir::{CallSiteId, MethodId};
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::path::{Path, PathBuf};

pub fn corpus_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

pub fn corpus_dir(name: &str) -> PathBuf {
    corpus_root().join(name)
}

// ---------------------------------------------------------------------------
// Control dependence

/// Random structured statements for the body of `T.m(int a, int b, E o)`.
fn gen_block(rng: &mut fastrand::Rng, budget: &mut usize, depth: usize, indent: usize) -> Vec<String> {
    let pad = "  ".repeat(indent);
    let mut out = Vec::new();
    let len = rng.usize(1..=3);
    for i in 0..len {
        if *budget == 0 {
            break;
        }
        *budget -= 1;
        let last = i + 1 == len;
        let choice = rng.usize(0..if depth < 3 { 9 } else { 5 });
        match choice {
            0 => out.push(format!("{pad}a = a + 1;")),
            1 => out.push(format!("{pad}b = a / 2;")),
            2 => out.push(format!("{pad}f = o.v;")),
            3 if last => out.push(format!("{pad}return;")),
            4 if last => out.push(format!("{pad}throw o;")),
            3 | 4 => out.push(format!("{pad}b = b - a;")),
            5 | 6 => {
                out.push(format!("{pad}if (a < b) {{"));
                out.extend(gen_block(rng, budget, depth + 1, indent + 1));
                if choice == 6 {
                    out.push(format!("{pad}}} else {{"));
                    out.extend(gen_block(rng, budget, depth + 1, indent + 1));
                }
                out.push(format!("{pad}}}"));
            }
            _ => {
                out.push(format!("{pad}while (b < a) {{"));
                out.extend(gen_block(rng, budget, depth + 1, indent + 1));
                out.push(format!("{pad}}}"));
            }
        }
        if matches!(choice, 3 | 4) && last {
            break;
        }
    }
    if out.is_empty() {
        out.push(format!("{pad}a = b;"));
    }
    out
}

pub fn random_method_source(rng: &mut fastrand::Rng) -> String {
    let mut budget = rng.usize(1..=12);
    let body = gen_block(rng, &mut budget, 0, 2).join("\n");
    format!("class E {{\n  int v;\n}}\nclass T {{\n  int f;\n  void m(int a, int b, E o) {{\n{body}\n  }}\n}}\n")
}

/// `y` postdominates `n` when every path from `n` to `exit` meets `y`.
fn postdominates(succs: &[Vec<usize>], exit: usize, y: usize, n: usize) -> bool {
    if y == n {
        return true;
    }
    let mut seen = vec![false; succs.len()];
    let mut stack = vec![n];
    seen[n] = true;
    while let Some(u) = stack.pop() {
        if u == exit {
            return false;
        }
        for &v in &succs[u] {
            if v != y && !seen[v] {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    true
}

/// `y` depends on `x` when some path from `x` to `y` runs through nodes
/// that `y` postdominates (after `x` itself), and `y` does not strictly
/// postdominate `x`. Computed on the graph with an added entry-to-exit edge.
pub fn cd_oracle(succs: &[Vec<usize>], entry: usize, exit: usize) -> BTreeSet<(usize, usize)> {
    let mut g = succs.to_vec();
    if !g[entry].contains(&exit) {
        g[entry].push(exit);
    }
    let n = g.len();
    let mut out = BTreeSet::new();
    for x in 0..n {
        for y in 0..n {
            if y == exit || (y != x && postdominates(&g, exit, y, x)) {
                continue;
            }
            let inside: Vec<bool> = (0..n).map(|z| postdominates(&g, exit, y, z)).collect();
            let mut seen = vec![false; n];
            let mut stack: Vec<usize> = g[x].iter().copied().filter(|&s| inside[s]).collect();
            let mut found = false;
            while let Some(u) = stack.pop() {
                if u == y {
                    found = true;
                    break;
                }
                if std::mem::replace(&mut seen[u], true) {
                    continue;
                }
                stack.extend(g[u].iter().copied().filter(|&v| inside[v]));
            }
            if found {
                out.insert((x, y));
            }
        }
    }
    out
}

#[derive(Debug, Default)]
pub struct OracleTally {
    pub checked: usize,
    pub mismatches: usize,
    pub max_nodes: usize,
}

/// Compares control dependence with the oracle on `samples` random methods,
/// with and without exception edges.
pub fn check_control_dependence(samples: usize, seed: u64) -> OracleTally {
    let mut rng = fastrand::Rng::with_seed(seed);
    let mut tally = OracleTally::default();
    while tally.checked < samples {
        let src = random_method_source(&mut rng);
        let Ok(program) = mergeifc::lang::load(&src, "random.mj") else { continue };
        let method = program.methods.iter().find(|m| m.name == "m").expect("method m");
        let cfgs = [build_cfg(method, false), build_cfg(method, true)];
        if cfgs.iter().any(|c| c.len() > 15) {
            continue;
        }
        tally.checked += 1;
        for cfg in &cfgs {
            tally.max_nodes = tally.max_nodes.max(cfg.len());
            let succs = cfg.plain_succs();
            let got = control_dependence_raw(&succs, Cfg::ENTRY, Cfg::EXIT);
            let want = cd_oracle(&succs, Cfg::ENTRY, Cfg::EXIT);
            if got != want {
                tally.mismatches += 1;
                eprintln!("control dependence mismatch on\n{src}\n got {got:?}\nwant {want:?}");
            }
        }
    }
    tally
}

// ---------------------------------------------------------------------------
// Slicing

pub struct RandomSdg {
    pub sdg: Sdg,
    pub call_sites: usize,
}

/// A random non-recursive SDG: up to three methods, each with formal-ins,
/// one formal-out and a few body nodes, and at most two call sites, each
/// calling a later method. Summary edges are added afterwards.
pub fn random_sdg(rng: &mut fastrand::Rng) -> RandomSdg {
    let methods = rng.usize(1..=3);
    let mut b = SdgBuilder::new(usize::MAX, usize::MAX);
    struct M {
        entry: NodeId,
        formal_in: Vec<NodeId>,
        formal_out: NodeId,
        body: Vec<NodeId>,
    }
    // Methods are built last to first so that callees exist before callers.
    let mut built: BTreeMap<usize, M> = BTreeMap::new();
    let mut sites_left = 2usize;
    let mut site_no = 0u32;
    let mut edges: Vec<(NodeId, NodeId, EdgeKind)> = Vec::new();
    for mi in (0..methods).rev() {
        let mid = MethodId(mi as u32);
        b.name_method(mid, format!("C.m{mi}"));
        let entry = b.add_node(NodeKind::Entry, mid, 1, None, None, "entry").unwrap();
        let formal_in: Vec<NodeId> = (0..rng.usize(1..=2))
            .map(|i| b.add_node(NodeKind::FormalIn, mid, 1, None, Some(Slot::Param(i as u32)), format!("p{i}")).unwrap())
            .collect();
        let formal_out = b.add_node(NodeKind::FormalOut, mid, 1, None, Some(Slot::Ret), "ret").unwrap();
        let mut body: Vec<NodeId> = (0..rng.usize(1..=4))
            .map(|i| {
                let kind = if rng.bool() { NodeKind::Statement } else { NodeKind::Predicate };
                b.add_node(kind, mid, 2 + i as u32, None, None, format!("s{i}")).unwrap()
            })
            .collect();
        for &f in formal_in.iter().chain([&formal_out]) {
            edges.push((entry, f, EdgeKind::ControlDep));
        }
        for &s in &body {
            edges.push((entry, s, EdgeKind::ControlDep));
        }
        let callees: Vec<usize> = (mi + 1..methods).collect();
        let calls = if callees.is_empty() { 0 } else { rng.usize(0..=sites_left.min(2)) };
        for _ in 0..calls {
            sites_left -= 1;
            let target = &built[&callees[rng.usize(0..callees.len())]];
            let site = Some(CallSiteId(site_no));
            site_no += 1;
            let line = 10 + site_no;
            let call = b.add_node(NodeKind::Call, mid, line, site, None, "call").unwrap();
            edges.push((entry, call, EdgeKind::ControlDep));
            edges.push((call, target.entry, EdgeKind::Call));
            for (i, &fi) in target.formal_in.iter().enumerate() {
                let ai = b.add_node(NodeKind::ActualIn, mid, line, site, Some(Slot::Param(i as u32)), format!("a{i}")).unwrap();
                edges.push((call, ai, EdgeKind::ControlDep));
                edges.push((ai, fi, EdgeKind::ParamIn));
                body.push(ai);
            }
            let ao = b.add_node(NodeKind::ActualOut, mid, line, site, Some(Slot::Ret), "ret").unwrap();
            edges.push((call, ao, EdgeKind::ControlDep));
            edges.push((target.formal_out, ao, EdgeKind::ParamOut));
            body.push(ao);
            body.push(call);
        }
        // Random data and control dependences inside the method.
        let sources: Vec<NodeId> = formal_in.iter().chain(&body).copied().collect();
        let targets: Vec<NodeId> = body.iter().chain([&formal_out]).copied().collect();
        for &s in &sources {
            for &t in &targets {
                if s != t && rng.u8(0..100) < 22 {
                    let kind = if rng.u8(0..4) == 0 { EdgeKind::ControlDep } else { EdgeKind::DataDep };
                    edges.push((s, t, kind));
                }
            }
        }
        built.insert(mi, M { entry, formal_in, formal_out, body });
    }
    for (f, t, k) in edges {
        b.add_edge(f, t, k).unwrap();
    }
    let mut sdg = b.finish([MethodId(0)].into());
    let summaries = summary_edges(&sdg, None).unwrap();
    sdg.add_summary_edges(summaries).unwrap();
    RandomSdg { sdg, call_sites: site_no as usize }
}

/// Nodes reachable from `start` along paths whose calls and returns are
/// properly matched, except that returns with no pending call are allowed.
/// Summary edges are ignored; states are (node, stack of pending call sites).
pub fn realizable_reach(sdg: &Sdg, start: &BTreeSet<NodeId>) -> BTreeSet<NodeId> {
    let mut seen: BTreeSet<(NodeId, Vec<NodeId>)> = BTreeSet::new();
    let mut work: VecDeque<(NodeId, Vec<NodeId>)> = start.iter().map(|&n| (n, Vec::new())).collect();
    let call_of = |n: NodeId| -> NodeId {
        let site = sdg.node(n).site;
        sdg.nodes().iter().find(|m| m.kind == NodeKind::Call && m.site == site).expect("call node").id
    };
    while let Some(state) = work.pop_front() {
        if !seen.insert(state.clone()) {
            continue;
        }
        let (n, stack) = state;
        for &(t, k) in sdg.succs(n) {
            let next = match k {
                EdgeKind::Summary => continue,
                EdgeKind::Call => {
                    let mut s = stack.clone();
                    s.push(n);
                    s
                }
                EdgeKind::ParamIn => {
                    let mut s = stack.clone();
                    s.push(call_of(n));
                    s
                }
                EdgeKind::ParamOut => match stack.last() {
                    None => Vec::new(),
                    Some(&c) if c == call_of(t) => stack[..stack.len() - 1].to_vec(),
                    Some(_) => continue,
                },
                _ => stack.clone(),
            };
            work.push_back((t, next));
        }
    }
    seen.into_iter().map(|(n, _)| n).collect()
}

/// Compares `forward_slice` with [`realizable_reach`] from random start
/// sets on `samples` random graphs.
pub fn check_slicer(samples: usize, seed: u64) -> OracleTally {
    let mut rng = fastrand::Rng::with_seed(seed);
    let mut tally = OracleTally::default();
    while tally.checked < samples {
        let g = random_sdg(&mut rng);
        let n = g.sdg.node_count();
        if n > 30 || g.call_sites > 2 {
            continue;
        }
        tally.checked += 1;
        tally.max_nodes = tally.max_nodes.max(n);
        let mut starts: Vec<BTreeSet<NodeId>> = (0..n).map(|i| BTreeSet::from([NodeId(i as u32)])).collect();
        starts.push((0..n).filter(|_| rng.bool()).map(|i| NodeId(i as u32)).collect());
        for start in starts {
            let got = forward_slice(&g.sdg, &start);
            let want = realizable_reach(&g.sdg, &start);
            if got != want {
                tally.mismatches += 1;
                eprintln!("slice mismatch from {start:?}: got {got:?} want {want:?}");
            }
        }
    }
    tally
}
