//! Canonical single-line rendering.

use super::{DrsGraph, RoleTarget};

/// Renders `g` on one line with relative indices. Boxes follow each other in
/// order, each preceded by the relation that opened it; every concept is
/// followed by its roles.
pub fn serialize(g: &DrsGraph) -> String {
    let mut roles_of: Vec<Vec<usize>> = vec![Vec::new(); g.nodes.len()];
    for (i, r) in g.roles.iter().enumerate() {
        roles_of[r.source].push(i);
    }
    let mut out: Vec<String> = Vec::new();
    for b in 0..g.box_count {
        if b > 0 {
            if let Some(rel) = g.relations.iter().find(|r| r.source == b) {
                out.push(rel.relation.clone());
                out.push(if rel.target < b { format!("<{}", b - rel.target) } else { format!(">{}", rel.target - b) });
            }
        }
        for (node, n) in g.nodes.iter().enumerate().filter(|(_, n)| n.box_id == b) {
            out.push(n.concept.to_string());
            for &r in &roles_of[node] {
                let edge = &g.roles[r];
                out.push(edge.role.clone());
                out.push(match &edge.target {
                    RoleTarget::Node(t) if *t >= node => format!("+{}", t - node),
                    RoleTarget::Node(t) => format!("-{}", node - t),
                    RoleTarget::Literal(s) => format!("\"{}\"", s.replace('"', "\\\"")),
                    RoleTarget::Number(s) => s.clone(),
                    RoleTarget::Constant(c) => c.to_string(),
                });
            }
        }
    }
    out.join(" ")
}
