//! Random well-formed graphs and documents for fuzzing and oracle tests.

use rand::seq::IndexedRandom;
use rand::Rng;

use crate::concept::ConceptKey;
use crate::sbn::{serialize, Constant, DrsGraph, GraphBuilder, RoleTarget};

/// Shape and vocabulary of generated graphs.
#[derive(Debug, Clone)]
pub struct SynthConfig {
    pub min_nodes: usize,
    pub max_nodes: usize,
    pub max_boxes: usize,
    /// Upper bound on roles attached to one concept.
    pub max_roles_per_node: usize,
    pub concepts: Vec<ConceptKey>,
    pub roles: Vec<String>,
    pub relations: Vec<String>,
    pub literals: Vec<String>,
}

impl Default for SynthConfig {
    fn default() -> Self {
        let keys = [
            "female.n.02",
            "male.n.02",
            "person.n.01",
            "time.n.08",
            "see.v.01",
            "watch.v.01",
            "birdwatch.v.01",
            "harrier.n.03",
            "harrier.n.02",
            "hawk.n.01",
            "hobby.n.03",
            "kite.n.04",
            "entity.n.01",
            "dog.n.01",
            "golden_eagle.n.01",
            "muscular.a.01",
        ];
        let strings = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect();
        SynthConfig {
            min_nodes: 1,
            max_nodes: 8,
            max_boxes: 3,
            max_roles_per_node: 2,
            concepts: keys.iter().map(|k| k.parse().expect("valid key")).collect(),
            roles: strings(&["Agent", "Patient", "Theme", "Time", "Experiencer", "Stimulus", "Sub", "Name", "TPR", "EQU"]),
            relations: strings(&["ELABORATION", "CONTINUATION", "NEGATION", "CONTRAST", "RESULT"]),
            literals: strings(&["Mary", "Johanna", "2", "New York"]),
        }
    }
}

impl SynthConfig {
    /// Graphs with at most `max_nodes` concepts (and at least one).
    pub fn small(max_nodes: usize) -> Self {
        SynthConfig { max_nodes, max_boxes: 2, ..Self::default() }
    }
}

fn random_target<R: Rng + ?Sized>(rng: &mut R, cfg: &SynthConfig, nodes: usize) -> RoleTarget {
    match rng.random_range(0..10) {
        0..=6 => RoleTarget::Node(rng.random_range(0..nodes)),
        7 => RoleTarget::Constant(*[Constant::Now, Constant::Speaker, Constant::Hearer].choose(rng).unwrap()),
        8 if !cfg.literals.is_empty() => RoleTarget::Literal(cfg.literals.choose(rng).unwrap().clone()),
        _ => RoleTarget::Number(rng.random_range(1..100u32).to_string()),
    }
}

/// A random valid graph.
pub fn random_graph<R: Rng + ?Sized>(rng: &mut R, cfg: &SynthConfig) -> DrsGraph {
    let n = rng.random_range(cfg.min_nodes.max(1)..=cfg.max_nodes.max(cfg.min_nodes).max(1));
    let boxes = rng.random_range(1..=cfg.max_boxes.clamp(1, n));
    // Box b starts at node starts[b]; the first box starts at 0.
    let mut starts: Vec<usize> = (0..boxes - 1).map(|_| rng.random_range(0..=n)).collect();
    starts.sort_unstable();

    let mut b = GraphBuilder::new();
    let mut next_box = 0;
    for node in 0..n {
        while next_box < starts.len() && starts[next_box] == node {
            open_random_box(rng, cfg, &mut b, boxes);
            next_box += 1;
        }
        b.add_concept(cfg.concepts.choose(rng).expect("non-empty vocabulary").clone());
    }
    while next_box < starts.len() {
        open_random_box(rng, cfg, &mut b, boxes);
        next_box += 1;
    }
    for node in 0..n {
        for _ in 0..rng.random_range(0..=cfg.max_roles_per_node) {
            let role = cfg.roles.choose(rng).expect("non-empty role inventory").clone();
            b.add_role(node, role, random_target(rng, cfg, n)).expect("node exists");
        }
    }
    b.build().expect("generated graph is valid")
}

fn open_random_box<R: Rng + ?Sized>(rng: &mut R, cfg: &SynthConfig, b: &mut GraphBuilder, boxes: usize) {
    let new = b.current_box() + 1;
    let target = loop {
        let t = rng.random_range(0..boxes);
        if t != new {
            break t;
        }
    };
    let relation = cfg.relations.choose(rng).expect("non-empty relation inventory").clone();
    b.open_box(relation, target).expect("target differs from the new box");
}

/// A variant of `g`: some concepts replaced, some roles dropped or added,
/// possibly a concept appended.
pub fn perturb<R: Rng + ?Sized>(rng: &mut R, g: &DrsGraph, cfg: &SynthConfig) -> DrsGraph {
    let mut b = GraphBuilder::new();
    let mut box_of_new = Vec::new();
    let mut current = 0;
    let n = g.node_count();
    let extra = usize::from(n < cfg.max_nodes && rng.random_bool(0.3));
    for (i, node) in g.nodes().iter().enumerate() {
        while current < node.box_id {
            current += 1;
            let rel = g.relations().iter().find(|r| r.source == current).expect("box opened by a relation");
            b.open_box(rel.relation.clone(), rel.target).expect("valid in source graph");
        }
        let concept = if rng.random_bool(0.3) { cfg.concepts.choose(rng).unwrap().clone() } else { node.concept.clone() };
        box_of_new.push(b.add_concept(concept));
        debug_assert_eq!(box_of_new[i], i);
    }
    while current + 1 < g.box_count() {
        current += 1;
        let rel = g.relations().iter().find(|r| r.source == current).expect("box opened by a relation");
        b.open_box(rel.relation.clone(), rel.target).expect("valid in source graph");
    }
    if extra == 1 {
        b.add_concept(cfg.concepts.choose(rng).unwrap().clone());
    }
    let total = n + extra;
    for r in g.roles() {
        if rng.random_bool(0.2) {
            continue;
        }
        b.add_role(r.source, r.role.clone(), r.target.clone()).expect("node exists");
    }
    if total > 0 && rng.random_bool(0.3) {
        let role = cfg.roles.choose(rng).unwrap().clone();
        b.add_role(rng.random_range(0..total), role, random_target(rng, cfg, total)).expect("node exists");
    }
    b.build().expect("perturbed graph is valid")
}

/// A random well-formed document: a random graph rendered with cosmetic
/// noise (line breaks, comments, tildes, unpadded senses) that does not
/// change its meaning.
pub fn random_document<R: Rng + ?Sized>(rng: &mut R, cfg: &SynthConfig) -> String {
    let canonical = serialize(&random_graph(rng, cfg));
    let mut out = String::new();
    if rng.random_bool(0.2) {
        out.push_str("% generated\n");
    }
    let mut in_literal = false;
    for (i, token) in canonical.split(' ').enumerate() {
        // Spaces inside quoted literals are kept verbatim.
        if i > 0 {
            if in_literal {
                out.push(' ');
            } else {
                out.push_str(match rng.random_range(0..6) {
                    0 => "\n",
                    1 => "  ",
                    2 => "\t",
                    3 => " % note\n",
                    _ => " ",
                });
            }
        }
        let quotes = token.matches('"').count() - token.matches("\\\"").count();
        if quotes % 2 == 1 {
            in_literal = !in_literal;
        }
        out.push_str(&noisy_token(rng, token));
    }
    if rng.random_bool(0.3) {
        out.push('\n');
    }
    out
}

fn noisy_token<R: Rng + ?Sized>(rng: &mut R, token: &str) -> String {
    if let Ok(key) = token.parse::<ConceptKey>() {
        let lemma = if rng.random_bool(0.5) { key.lemma.replace('_', "~") } else { key.lemma.clone() };
        return if rng.random_bool(0.5) {
            format!("{lemma}.{}.{}", key.pos, key.sense)
        } else {
            format!("{lemma}.{}.{:02}", key.pos, key.sense)
        };
    }
    token.to_string()
}
