//! Graphviz export of reachability graphs.

use crate::net::{Lts, Net};

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// One node per state labelled with its marking; silent edges are dashed.
/// Initial states get a double border.
pub fn to_dot(net: &Net, lts: &Lts) -> String {
    let mut s = format!("digraph {} {{\n", quote(net.name()));
    s.push_str("  node [shape=ellipse];\n");
    for (i, m) in lts.states.iter().enumerate() {
        let extra = if lts.initials.contains(&i) { ", peripheries=2" } else { "" };
        s.push_str(&format!("  n{i} [label={}{extra}];\n", quote(&net.format_marking(m))));
    }
    for (a, l, b) in &lts.edges {
        let style = if l.is_tau() { ", style=dashed" } else { "" };
        s.push_str(&format!("  n{a} -> n{b} [label={}{style}];\n", quote(&l.to_string())));
    }
    s.push_str("}\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::{reach_lts, Label, Marking, NetBuilder};

    #[test]
    fn tau_edges_dashed() {
        let mut b = NetBuilder::new("d");
        let s = b.places(&["a", "b", "c"]);
        b.transition("t", Marking::singleton(s[0]), Label::Tau, Marking::singleton(s[1]));
        b.transition("u", Marking::singleton(s[1]), Label::parse("x"), Marking::singleton(s[2]));
        let net = b.build().unwrap();
        let lts = reach_lts(&net, &[net.marking_of(&["a"])], 10, 10).unwrap();
        let dot = to_dot(&net, &lts);
        assert_eq!(dot.matches("style=dashed").count(), 1);
        assert_eq!(dot.matches(" -> ").count(), 2);
        assert!(dot.contains("label=\"a\", peripheries=2"));
    }
}
