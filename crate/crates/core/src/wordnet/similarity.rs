//! Taxonomy depth, least common subsumer and Wu-Palmer similarity.
//!
//! Every part-of-speech family hangs under a single virtual root. Wu-Palmer
//! follows the widely used reference convention: the subsumer is the common
//! ancestor with the greatest *shortest* root distance, its depth is its
//! longest root path counted in nodes, and each synset's depth is the
//! subsumer depth plus its shortest hypernym distance to the subsumer. For
//! families without a single top concept (verbs, adjectives, adverbs) the
//! virtual root takes part in the search and counts as one level; it wins
//! ties against real roots.

use std::cmp::Ordering;
use std::collections::HashMap;

use super::{SynsetId, WordnetError, WordnetStore};
use crate::concept::{ConceptKey, Pos};
use crate::scalar::Scalar;

/// A position in the taxonomy: a real synset or the virtual root above all
/// family roots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TaxonomyNode {
    Root,
    Synset(SynsetId),
}

/// Subsumer found by the Wu-Palmer search: `None` is the virtual root.
struct Subsumer {
    node: Option<usize>,
    dist_a: u32,
    dist_b: u32,
}

impl WordnetStore {
    /// Length in nodes of the longest hypernym path from the virtual root
    /// (depth 0); family roots have depth 1.
    pub fn depth(&self, node: TaxonomyNode) -> Result<u32, WordnetError> {
        match node {
            TaxonomyNode::Root => Ok(0),
            TaxonomyNode::Synset(id) => {
                let i = self.position(id).ok_or(WordnetError::UnknownSynset(id))?;
                Ok(self.max_depth[i] + 1)
            }
        }
    }

    pub fn hypernym_ids(&self, id: SynsetId) -> Result<Vec<SynsetId>, WordnetError> {
        let i = self.position(id).ok_or(WordnetError::UnknownSynset(id))?;
        Ok(self.parents[i].iter().map(|&p| self.synsets[p].id).collect())
    }

    /// Least common subsumer as used by [`WordnetStore::wup`]. Synsets from
    /// different families meet only at the virtual root.
    pub fn lcs(&self, a: SynsetId, b: SynsetId) -> Result<TaxonomyNode, WordnetError> {
        let ia = self.position(a).ok_or(WordnetError::UnknownSynset(a))?;
        let ib = self.position(b).ok_or(WordnetError::UnknownSynset(b))?;
        if a.pos.family() != b.pos.family() {
            return Ok(TaxonomyNode::Root);
        }
        Ok(match self.subsumer(ia, ib).node {
            Some(i) => TaxonomyNode::Synset(self.synsets[i].id),
            None => TaxonomyNode::Root,
        })
    }

    /// Wu-Palmer similarity of two concepts in `[0, 1]`.
    ///
    /// Identical keys score exactly 1. Unresolvable keys and keys from
    /// different families score 0.
    pub fn wup<S: Scalar>(&self, k1: &ConceptKey, k2: &ConceptKey) -> S {
        if k1 == k2 {
            return S::one();
        }
        if k1.pos != k2.pos {
            return S::zero();
        }
        match (self.resolve(k1), self.resolve(k2)) {
            (Some(a), Some(b)) => self.wup_synsets(a.id, b.id).unwrap_or_else(|_| S::zero()),
            _ => S::zero(),
        }
    }

    pub fn wup_synsets<S: Scalar>(&self, a: SynsetId, b: SynsetId) -> Result<S, WordnetError> {
        let ia = self.position(a).ok_or(WordnetError::UnknownSynset(a))?;
        let ib = self.position(b).ok_or(WordnetError::UnknownSynset(b))?;
        if a.pos.family() != b.pos.family() {
            return Ok(S::zero());
        }
        if ia == ib {
            return Ok(S::one());
        }
        let sub = self.subsumer(ia, ib);
        let depth = match sub.node {
            Some(i) => u64::from(self.max_depth[i]) + 1,
            None => 1,
        };
        let den = u64::from(sub.dist_a) + u64::from(sub.dist_b) + 2 * depth;
        Ok(S::from_ratio(2 * depth, den))
    }

    /// Hypernym closure of `i` (including `i`) with shortest distances.
    fn closure(&self, i: usize) -> HashMap<usize, u32> {
        let mut dist = HashMap::from([(i, 0)]);
        let mut frontier = vec![i];
        let mut d = 0;
        while !frontier.is_empty() {
            d += 1;
            let mut next = Vec::new();
            for &x in &frontier {
                for &p in &self.parents[x] {
                    if let std::collections::hash_map::Entry::Vacant(e) = dist.entry(p) {
                        e.insert(d);
                        next.push(p);
                    }
                }
            }
            frontier = next;
        }
        dist
    }

    fn root_distance(&self, closure: &HashMap<usize, u32>) -> u32 {
        closure
            .iter()
            .filter(|(&i, _)| self.parents[i].is_empty())
            .map(|(_, &d)| d + 1)
            .min()
            .unwrap_or(1)
    }

    fn subsumer(&self, a: usize, b: usize) -> Subsumer {
        let ca = self.closure(a);
        let cb = self.closure(b);
        let family = self.synsets[a].id.pos.family();
        let simulate_root = family != Pos::Noun;

        let best_real = ca
            .keys()
            .filter(|i| cb.contains_key(i))
            .copied()
            .max_by(|&x, &y| self.compare_subsumers(x, y, a, b));

        let virtual_root = Subsumer { node: None, dist_a: self.root_distance(&ca), dist_b: self.root_distance(&cb) };
        match best_real {
            None => virtual_root,
            // The virtual root sits at the same shortest depth as family
            // roots and is preferred over them unless one input is the root.
            Some(i) if simulate_root && self.min_depth[i] == 0 && i != a && i != b => virtual_root,
            Some(i) => Subsumer { node: Some(i), dist_a: ca[&i], dist_b: cb[&i] },
        }
    }

    /// Ordering where the greater candidate is the better subsumer.
    fn compare_subsumers(&self, x: usize, y: usize, a: usize, b: usize) -> Ordering {
        let is_input = |i: usize| i == a || i == b;
        self.min_depth[x]
            .cmp(&self.min_depth[y])
            .then_with(|| is_input(x).cmp(&is_input(y)))
            .then_with(|| self.synsets[y].name().cmp(&self.synsets[x].name()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Exact;
    use crate::wordnet::fixture;

    fn key(s: &str) -> ConceptKey {
        s.parse().unwrap()
    }

    fn id(store: &WordnetStore, s: &str) -> SynsetId {
        store.resolve(&key(s)).unwrap().id
    }

    #[test]
    fn depth_counts_nodes_from_virtual_root() {
        let (_dir, store) = fixture::store();
        assert_eq!(store.depth(TaxonomyNode::Root).unwrap(), 0);
        assert_eq!(store.depth(TaxonomyNode::Synset(id(&store, "entity.n.01"))).unwrap(), 1);
        assert_eq!(store.depth(TaxonomyNode::Synset(id(&store, "harrier.n.03"))).unwrap(), 6);
        let eagle = id(&store, "golden_eagle.n.01");
        let hyper_max = store
            .hypernym_ids(eagle)
            .unwrap()
            .into_iter()
            .map(|h| store.depth(TaxonomyNode::Synset(h)).unwrap())
            .max()
            .unwrap();
        assert_eq!(store.depth(TaxonomyNode::Synset(eagle)).unwrap(), hyper_max + 1);
    }

    #[test]
    fn lcs_cases() {
        let (_dir, store) = fixture::store();
        let h3 = id(&store, "harrier.n.03");
        let h2 = id(&store, "harrier.n.02");
        assert_eq!(store.lcs(h3, h3).unwrap(), TaxonomyNode::Synset(h3));
        assert_eq!(store.lcs(h3, h2).unwrap(), TaxonomyNode::Synset(id(&store, "animal.n.01")));
        // `see` and `cut` root separate verb trees.
        assert_eq!(store.lcs(id(&store, "birdwatch.v.01"), id(&store, "saw.v.01")).unwrap(), TaxonomyNode::Root);
        assert_eq!(store.lcs(h3, id(&store, "see.v.01")).unwrap(), TaxonomyNode::Root);
    }

    #[test]
    fn wup_values_on_fixture() {
        let (_dir, store) = fixture::store();
        // harrier.n.03 (depth 6) vs harrier.n.02 (depth 5) under animal (depth 3):
        // 2*3 / (3 + 2 + 6)
        assert_eq!(store.wup::<Exact>(&key("harrier.n.03"), &key("harrier.n.02")), Exact::new(6, 11));
        // hobby.n.01 vs hobby.n.02 meet at entity: 2 / (2 + 3 + 2)
        assert_eq!(store.wup::<Exact>(&key("hobby.n.01"), &key("hobby.n.02")), Exact::new(2, 7));
        // Verbs from separate trees meet at the simulated root:
        // birdwatch is 3 below it, saw 2: 2 / (3 + 2 + 2)
        assert_eq!(store.wup::<Exact>(&key("birdwatch.v.01"), &key("saw.v.01")), Exact::new(2, 7));
        // Two root adjectives: 2 / (1 + 1 + 2)
        assert_eq!(store.wup::<Exact>(&key("muscular.a.01"), &key("golden.a.01")), Exact::new(1, 2));
    }

    #[test]
    fn verbs_sharing_a_root_still_meet_at_the_simulated_root() {
        let (_dir, store) = fixture::store();
        // watch and look are both directly under see; the simulated root
        // beats `see`: 2 / (2 + 2 + 2).
        assert_eq!(store.wup::<Exact>(&key("watch.v.01"), &key("look.v.01")), Exact::new(1, 3));
        // A non-root common ancestor is used as is: 2*2 / (1 + 0 + 2*2).
        assert_eq!(store.wup::<Exact>(&key("birdwatch.v.01"), &key("watch.v.01")), Exact::new(4, 5));
        // A root that is one of the inputs beats the simulated root.
        assert_eq!(store.wup::<Exact>(&key("watch.v.01"), &key("see.v.01")), Exact::new(2, 1 + 2));
    }

    #[test]
    fn wup_edge_cases() {
        let (_dir, store) = fixture::store();
        assert_eq!(store.wup::<f64>(&key("hobby.n.02"), &key("hobby.n.02")), 1.0);
        assert_eq!(store.wup::<f64>(&key("hobby.n.02"), &key("hobbyhorse.n.01")), 1.0);
        assert_eq!(store.wup::<f64>(&key("hobby.n.02"), &key("see.v.01")), 0.0);
        assert_eq!(store.wup::<f64>(&key("hobby.n.02"), &key("hobby.n.42")), 0.0);
        assert_eq!(store.wup::<f64>(&key("velvet_scooter.n.01"), &key("velvet_scooter.n.01")), 1.0);
    }

    #[test]
    fn wup_is_symmetric_and_bounded_on_fixture() {
        let (_dir, store) = fixture::store();
        let keys: Vec<ConceptKey> = store.synsets().map(|s| s.key()).collect();
        for a in &keys {
            for b in &keys {
                let ab: Exact = store.wup(a, b);
                assert_eq!(ab, store.wup(b, a), "{a} {b}");
                assert!(ab >= Exact::from_integer(0) && ab <= Exact::from_integer(1));
            }
        }
    }
}
