//! Triple view of a graph and the concept multiset.

use std::collections::{BTreeMap, HashSet};

use crate::concept::ConceptKey;

use super::{Constant, DrsGraph, RoleTarget};

/// A variable of the triple view: a concept node or a box.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    Node(usize),
    Box(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Value {
    Var(Var),
    Concept(ConceptKey),
    /// Literal or number, verbatim without quotes.
    Literal(String),
    Constant(Constant),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TripleKind {
    /// `(node, instance, concept)`
    Instance,
    /// `(box, member, node)`
    Membership,
    /// Role between two nodes.
    Role,
    /// Role from a node to a literal or constant.
    Attribute,
    /// Discourse relation between two boxes.
    Relation,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Triple {
    pub kind: TripleKind,
    pub source: Var,
    pub label: String,
    pub target: Value,
}

/// Deduplicated triples in a fixed order: instances, memberships, then
/// roles and attributes in document order, then relations.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TripleSet {
    triples: Vec<Triple>,
}

impl TripleSet {
    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Triple> {
        self.triples.iter()
    }

    pub fn count(&self, kind: TripleKind) -> usize {
        self.triples.iter().filter(|t| t.kind == kind).count()
    }

    pub fn of_kind(&self, kind: TripleKind) -> impl Iterator<Item = &Triple> {
        self.triples.iter().filter(move |t| t.kind == kind)
    }

    pub fn as_slice(&self) -> &[Triple] {
        &self.triples
    }
}

impl<'a> IntoIterator for &'a TripleSet {
    type Item = &'a Triple;
    type IntoIter = std::slice::Iter<'a, Triple>;

    fn into_iter(self) -> Self::IntoIter {
        self.triples.iter()
    }
}

pub fn to_triples(g: &DrsGraph) -> TripleSet {
    let mut triples = Vec::new();
    for (i, n) in g.nodes.iter().enumerate() {
        triples.push(Triple {
            kind: TripleKind::Instance,
            source: Var::Node(i),
            label: "instance".into(),
            target: Value::Concept(n.concept.clone()),
        });
    }
    for (i, n) in g.nodes.iter().enumerate() {
        triples.push(Triple {
            kind: TripleKind::Membership,
            source: Var::Box(n.box_id),
            label: "member".into(),
            target: Value::Var(Var::Node(i)),
        });
    }
    for r in &g.roles {
        let (kind, target) = match &r.target {
            RoleTarget::Node(t) => (TripleKind::Role, Value::Var(Var::Node(*t))),
            RoleTarget::Literal(s) | RoleTarget::Number(s) => (TripleKind::Attribute, Value::Literal(s.clone())),
            RoleTarget::Constant(c) => (TripleKind::Attribute, Value::Constant(*c)),
        };
        triples.push(Triple { kind, source: Var::Node(r.source), label: r.role.clone(), target });
    }
    for r in &g.relations {
        triples.push(Triple {
            kind: TripleKind::Relation,
            source: Var::Box(r.source),
            label: r.relation.clone(),
            target: Value::Var(Var::Box(r.target)),
        });
    }
    let mut seen = HashSet::new();
    triples.retain(|t| seen.insert(t.clone()));
    TripleSet { triples }
}

/// Multiset of concepts.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConceptBag {
    counts: BTreeMap<ConceptKey, usize>,
}

impl ConceptBag {
    pub fn count(&self, key: &ConceptKey) -> usize {
        self.counts.get(key).copied().unwrap_or(0)
    }

    /// Total number of elements, with multiplicity.
    pub fn total(&self) -> usize {
        self.counts.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ConceptKey, usize)> {
        self.counts.iter().map(|(k, &n)| (k, n))
    }

    /// Size of the multiset intersection.
    pub fn overlap(&self, other: &ConceptBag) -> usize {
        self.counts.iter().map(|(k, &n)| n.min(other.count(k))).sum()
    }
}

impl<'a> FromIterator<&'a ConceptKey> for ConceptBag {
    fn from_iter<I: IntoIterator<Item = &'a ConceptKey>>(iter: I) -> Self {
        let mut counts = BTreeMap::new();
        for k in iter {
            *counts.entry(k.clone()).or_insert(0) += 1;
        }
        ConceptBag { counts }
    }
}

pub fn concept_bag(g: &DrsGraph) -> ConceptBag {
    g.concepts().collect()
}
