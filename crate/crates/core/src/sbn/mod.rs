//! Sequence Box Notation (SBN): a variable-free linear encoding of
//! Discourse Representation Structures.
//!
//! A document is a whitespace-separated token stream. Concepts
//! (`lemma.pos.NN`) introduce discourse referents; a role token attaches to
//! the most recently introduced concept and takes exactly one argument (a
//! relative referent index such as `-2`/`+1`, a quoted literal or a
//! constant); a discourse relation followed by a box index (`<1`) closes the
//! current box, opens a new one and links the two.
//!
//! ```
//! use rasp_core::sbn;
//!
//! let g = sbn::parse("female.n.02 Name \"Mary\" time.n.08 TPR now\nsee.v.01 Experiencer -2 Time -1").unwrap();
//! assert_eq!(g.node_count(), 3);
//! assert_eq!(sbn::serialize(&g), "female.n.02 Name \"Mary\" time.n.08 TPR now see.v.01 Experiencer -2 Time -1");
//! ```

mod lexer;
mod parser;
mod serialize;
mod triples;

use std::fmt;

use thiserror::Error;

use crate::concept::ConceptKey;

pub use lexer::{tokenize, SbnToken, TokenKind};
pub use parser::{parse, validate};
pub use serialize::serialize;
pub use triples::{concept_bag, to_triples, ConceptBag, Triple, TripleKind, TripleSet, Value, Var};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Constant {
    Now,
    Speaker,
    Hearer,
}

impl Constant {
    pub fn from_token(s: &str) -> Option<Constant> {
        match s {
            "now" => Some(Constant::Now),
            "speaker" => Some(Constant::Speaker),
            "hearer" => Some(Constant::Hearer),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Constant::Now => "now",
            Constant::Speaker => "speaker",
            Constant::Hearer => "hearer",
        }
    }
}

impl fmt::Display for Constant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Argument of a role.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RoleTarget {
    Node(usize),
    /// Quoted literal, stored unescaped.
    Literal(String),
    /// Bare unsigned number.
    Number(String),
    Constant(Constant),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConceptNode {
    pub concept: ConceptKey,
    pub box_id: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoleEdge {
    pub source: usize,
    pub role: String,
    pub target: RoleTarget,
}

/// Discourse relation from the box it opened to another box.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationEdge {
    pub source: usize,
    pub relation: String,
    pub target: usize,
}

/// A parsed meaning representation.
///
/// Node ids are dense ordinals in introduction order; boxes are numbered in
/// document order and every node sits in exactly one box. Box `b > 0` was
/// opened by the relation edge whose source is `b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DrsGraph {
    nodes: Vec<ConceptNode>,
    box_count: usize,
    roles: Vec<RoleEdge>,
    relations: Vec<RelationEdge>,
}

impl Default for DrsGraph {
    fn default() -> Self {
        DrsGraph { nodes: Vec::new(), box_count: 1, roles: Vec::new(), relations: Vec::new() }
    }
}

impl DrsGraph {
    /// A graph with a single empty box.
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn nodes(&self) -> &[ConceptNode] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn box_count(&self) -> usize {
        self.box_count
    }

    pub fn roles(&self) -> &[RoleEdge] {
        &self.roles
    }

    pub fn relations(&self) -> &[RelationEdge] {
        &self.relations
    }

    pub fn concept(&self, node: usize) -> &ConceptKey {
        &self.nodes[node].concept
    }

    pub fn concepts(&self) -> impl Iterator<Item = &ConceptKey> {
        self.nodes.iter().map(|n| &n.concept)
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty() && self.relations.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("node {0} does not exist")]
    UnknownNode(usize),
    #[error("box {0} does not exist")]
    UnknownBox(usize),
    #[error("relation of box {0} points at itself")]
    SelfRelation(usize),
}

/// Incremental construction of a [`DrsGraph`] in document order.
#[derive(Debug, Clone, Default)]
pub struct GraphBuilder {
    graph: DrsGraph,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a concept to the current (last) box and returns its node id.
    pub fn add_concept(&mut self, concept: ConceptKey) -> usize {
        let box_id = self.graph.box_count - 1;
        self.graph.nodes.push(ConceptNode { concept, box_id });
        self.graph.nodes.len() - 1
    }

    /// Role edge; a `RoleTarget::Node` may point at a node added later.
    pub fn add_role(&mut self, source: usize, role: impl Into<String>, target: RoleTarget) -> Result<(), GraphError> {
        if source >= self.graph.nodes.len() {
            return Err(GraphError::UnknownNode(source));
        }
        self.graph.roles.push(RoleEdge { source, role: role.into(), target });
        Ok(())
    }

    /// Opens a new box linked to `target` (absolute box id, may be a later
    /// box) and returns the new box id.
    pub fn open_box(&mut self, relation: impl Into<String>, target: usize) -> Result<usize, GraphError> {
        let source = self.graph.box_count;
        if target == source {
            return Err(GraphError::SelfRelation(source));
        }
        self.graph.box_count += 1;
        self.graph.relations.push(RelationEdge { source, relation: relation.into(), target });
        Ok(source)
    }

    pub fn current_box(&self) -> usize {
        self.graph.box_count - 1
    }

    pub fn node_count(&self) -> usize {
        self.graph.nodes.len()
    }

    pub fn build(mut self) -> Result<DrsGraph, GraphError> {
        let g = &self.graph;
        for edge in &g.roles {
            if let RoleTarget::Node(t) = edge.target {
                if t >= g.nodes.len() {
                    return Err(GraphError::UnknownNode(t));
                }
            }
        }
        if let Some(edge) = g.relations.iter().find(|r| r.target >= g.box_count) {
            return Err(GraphError::UnknownBox(edge.target));
        }
        // Roles are kept grouped by head, in insertion order per head.
        self.graph.roles.sort_by_key(|r| r.source);
        Ok(self.graph)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SbnError {
    #[error("empty document")]
    EmptyDocument,
    #[error("token {position}: `{token}` is not a valid SBN token")]
    Lex { position: usize, token: String },
    #[error("token {position}: role `{role}` appears before any concept")]
    RoleWithoutHead { position: usize, role: String },
    #[error("token {position}: index `{index}` does not resolve to a concept")]
    DanglingIndex { position: usize, index: String },
    #[error("token {position}: relation `{relation}` needs a box index that exists")]
    BadRelationArg { position: usize, relation: String },
    #[error("token {position}: role `{role}` has no argument")]
    TruncatedRole { position: usize, role: String },
    #[error("token {position}: role `{role}` cannot take `{found}` as argument")]
    BadRoleArgument { position: usize, role: String, found: String },
    #[error("token {position}: unexpected `{token}`")]
    UnexpectedToken { position: usize, token: String },
}
