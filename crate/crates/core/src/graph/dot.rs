//! Graphviz output.

use super::sdg::Sdg;
use std::fmt::Write;

/// DOT text with node labels `kind@line method` and edges labelled by kind.
pub fn to_dot(sdg: &Sdg) -> String {
    let mut out = String::from("digraph sdg {\n");
    for n in sdg.nodes() {
        let label = format!("{}@{} {}", n.kind, n.line, sdg.method_name(n.method));
        writeln!(out, "  n{} [label=\"{}\"];", n.id.0, label.replace('"', "\\\"")).unwrap();
    }
    for e in sdg.edges() {
        writeln!(out, "  n{} -> n{} [label=\"{}\"];", e.from.0, e.to.0, e.kind).unwrap();
    }
    out.push_str("}\n");
    out
}
