//! Triple matching under a variable alignment: hill climbing and an
//! exhaustive oracle.
//!
//! The objective decomposes into unary terms (a pred variable mapped to a
//! gold variable: instance, attribute and self-loop triples) and pairwise
//! terms (two mappings that together match an edge triple). Because
//! alignments are injective and triple sets are deduplicated, every pred
//! triple matches at most one gold triple, so the objective is exactly the
//! number (or, in soft mode, the weight) of matched triples.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{ConceptSimilarity, MatchMode, MatchScore, MetricsError};
use crate::sbn::{to_triples, DrsGraph, Triple, TripleKind, TripleSet, Value, Var};
use crate::scalar::Scalar;

/// Largest number of variables (concept nodes plus boxes) per graph that
/// [`brute_force_smatch`] accepts.
pub const BRUTE_FORCE_LIMIT: usize = 8;

/// Partial injective map from predicted to gold variables; nodes map to
/// nodes and boxes to boxes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alignment {
    nodes: Vec<Option<usize>>,
    boxes: Vec<Option<usize>>,
}

impl Alignment {
    /// `None` when either map is not injective.
    pub fn new(nodes: Vec<Option<usize>>, boxes: Vec<Option<usize>>) -> Option<Self> {
        let a = Alignment { nodes, boxes };
        a.is_injective().then_some(a)
    }

    /// The identity alignment of `g` onto itself.
    pub fn identity(g: &DrsGraph) -> Self {
        Alignment { nodes: (0..g.node_count()).map(Some).collect(), boxes: (0..g.box_count()).map(Some).collect() }
    }

    pub fn node(&self, pred: usize) -> Option<usize> {
        self.nodes.get(pred).copied().flatten()
    }

    pub fn box_id(&self, pred: usize) -> Option<usize> {
        self.boxes.get(pred).copied().flatten()
    }

    pub fn map(&self, v: Var) -> Option<Var> {
        match v {
            Var::Node(i) => self.node(i).map(Var::Node),
            Var::Box(i) => self.box_id(i).map(Var::Box),
        }
    }

    /// The predicted node aligned to gold node `gold`.
    pub fn pred_node_for(&self, gold: usize) -> Option<usize> {
        self.nodes.iter().position(|&g| g == Some(gold))
    }

    /// Aligned `(pred, gold)` node pairs.
    pub fn node_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.nodes.iter().enumerate().filter_map(|(p, g)| g.map(|g| (p, g)))
    }

    pub fn is_injective(&self) -> bool {
        fn injective(m: &[Option<usize>]) -> bool {
            let mut seen: Vec<usize> = m.iter().flatten().copied().collect();
            let n = seen.len();
            seen.sort_unstable();
            seen.dedup();
            seen.len() == n
        }
        injective(&self.nodes) && injective(&self.boxes)
    }
}

/// Score of one predicted triple against one gold triple under `alignment`:
/// 1 for identical triples, and in soft mode the similarity of the two
/// concepts for aligned instance triples; 0 otherwise.
pub fn score_triple<S: Scalar, C: ConceptSimilarity<S> + ?Sized>(
    pred: &Triple,
    gold: &Triple,
    alignment: &Alignment,
    mode: MatchMode,
    sim: &C,
) -> S {
    if pred.kind != gold.kind || pred.label != gold.label || alignment.map(pred.source) != Some(gold.source) {
        return S::zero();
    }
    let hit = match (&pred.target, &gold.target) {
        (Value::Var(a), Value::Var(b)) => alignment.map(*a) == Some(*b),
        (Value::Concept(a), Value::Concept(b)) => {
            return concept_score(a, b, mode, sim);
        }
        (a, b) => a == b,
    };
    if hit {
        S::one()
    } else {
        S::zero()
    }
}

fn concept_score<S: Scalar, C: ConceptSimilarity<S> + ?Sized>(
    a: &crate::concept::ConceptKey,
    b: &crate::concept::ConceptKey,
    mode: MatchMode,
    sim: &C,
) -> S {
    match mode {
        MatchMode::Hard if a == b => S::one(),
        MatchMode::Hard => S::zero(),
        MatchMode::Soft => sim.similarity(a, b),
    }
}

/// Best alignment found by hill climbing from `restarts` starting points
/// (the first greedy, the rest random with fixed seeds), and its score.
pub fn smatch<S: Scalar, C: ConceptSimilarity<S> + ?Sized>(
    pred: &DrsGraph,
    gold: &DrsGraph,
    mode: MatchMode,
    restarts: usize,
    sim: &C,
) -> (MatchScore<S>, Alignment) {
    smatch_seeded(pred, gold, mode, restarts, sim, None)
}

/// [`smatch`] with an extra starting alignment (between the same graphs)
/// climbed before the usual restarts.
pub(crate) fn smatch_seeded<S: Scalar, C: ConceptSimilarity<S> + ?Sized>(
    pred: &DrsGraph,
    gold: &DrsGraph,
    mode: MatchMode,
    restarts: usize,
    sim: &C,
    start: Option<&Alignment>,
) -> (MatchScore<S>, Alignment) {
    let problem = Problem::new(pred, gold, mode, sim);
    let ceiling = S::from_count(problem.pred_total.min(problem.gold_total));
    let mut best: Option<(S, Vec<Option<usize>>)> = None;
    let starts = start.map(|a| problem.assignment(a)).into_iter().chain(
        (0..restarts.max(1)).map(|seed| if seed == 0 { problem.greedy() } else { problem.random(seed as u64) }),
    );
    for (i, mut m) in starts.enumerate() {
        problem.climb(&mut m);
        problem.kick(&mut m, i as u64, &ceiling);
        let score = problem.total(&m);
        if best.as_ref().is_none_or(|(b, _)| score > *b) {
            best = Some((score, m));
        }
        if best.as_ref().is_some_and(|(b, _)| *b >= ceiling) {
            break;
        }
    }
    let (score, m) = best.expect("at least one restart");
    (problem.score(score), problem.alignment(&m))
}

/// Exact optimum over all partial injective alignments.
pub fn brute_force_smatch<S: Scalar, C: ConceptSimilarity<S> + ?Sized>(
    pred: &DrsGraph,
    gold: &DrsGraph,
    mode: MatchMode,
    sim: &C,
) -> Result<MatchScore<S>, MetricsError> {
    for vars in [pred.node_count() + pred.box_count(), gold.node_count() + gold.box_count()] {
        if vars > BRUTE_FORCE_LIMIT {
            return Err(MetricsError::TooLarge { vars, limit: BRUTE_FORCE_LIMIT });
        }
    }
    let problem = Problem::new(pred, gold, mode, sim);
    Ok(problem.score(problem.exhaustive()))
}

/// Variables whose value differs, with their value in `after`.
fn diff(before: &[Option<usize>], after: &[Option<usize>]) -> Vec<(usize, Option<usize>)> {
    before.iter().zip(after).enumerate().filter(|(_, (b, a))| b != a).map(|(v, (_, a))| (v, *a)).collect()
}

/// Maps `p` to `g`; a variable already mapped to `g` takes `p`'s old value.
fn swap_assign(m: &mut [Option<usize>], p: usize, g: usize) {
    if let Some(r) = m.iter().position(|&x| x == Some(g)) {
        m[r] = m[p];
    }
    m[p] = Some(g);
}

/// Pairwise term: mapping this variable's pair together with `(pred, gold)`
/// gains `weight`.
#[derive(Debug, Clone, Copy)]
struct Link<S> {
    pred: usize,
    gold: usize,
    weight: S,
}

/// Alignment objective between two triple sets. Variables are numbered
/// nodes first, then boxes.
struct Problem<S> {
    pred_nodes: usize,
    pred_vars: usize,
    gold_nodes: usize,
    gold_vars: usize,
    /// `pred_vars * gold_vars`, row-major.
    unary: Vec<S>,
    links: Vec<Vec<Link<S>>>,
    pred_total: usize,
    gold_total: usize,
}

impl<S: Scalar> Problem<S> {
    fn new<C: ConceptSimilarity<S> + ?Sized>(pred: &DrsGraph, gold: &DrsGraph, mode: MatchMode, sim: &C) -> Self {
        let tp = to_triples(pred);
        let tg = to_triples(gold);
        let pred_nodes = pred.node_count();
        let gold_nodes = gold.node_count();
        let pred_vars = pred_nodes + pred.box_count();
        let gold_vars = gold_nodes + gold.box_count();
        let mut p = Problem {
            pred_nodes,
            pred_vars,
            gold_nodes,
            gold_vars,
            unary: vec![S::zero(); pred_vars * gold_vars],
            links: vec![Vec::new(); pred_vars * gold_vars],
            pred_total: tp.len(),
            gold_total: tg.len(),
        };
        p.fill(&tp, &tg, mode, sim);
        p
    }

    fn fill<C: ConceptSimilarity<S> + ?Sized>(&mut self, tp: &TripleSet, tg: &TripleSet, mode: MatchMode, sim: &C) {
        let mut by_label: HashMap<(TripleKind, &str), Vec<&Triple>> = HashMap::new();
        for t in tg {
            by_label.entry((t.kind, t.label.as_str())).or_default().push(t);
        }
        let pv = |v: Var| match v {
            Var::Node(i) => i,
            Var::Box(i) => self.pred_nodes + i,
        };
        let gv = |v: Var| match v {
            Var::Node(i) => i,
            Var::Box(i) => self.gold_nodes + i,
        };
        let mut unary: Vec<(usize, usize, S)> = Vec::new();
        let mut pairs: Vec<(usize, usize, usize, usize)> = Vec::new();
        for t in tp {
            let Some(candidates) = by_label.get(&(t.kind, t.label.as_str())) else { continue };
            let s = pv(t.source);
            for g in candidates {
                let gs = gv(g.source);
                match (&t.target, &g.target) {
                    (Value::Concept(a), Value::Concept(b)) => {
                        let w = concept_score(a, b, mode, sim);
                        if w != S::zero() {
                            unary.push((s, gs, w));
                        }
                    }
                    (Value::Var(a), Value::Var(b)) => {
                        let (pt, gt) = (pv(*a), gv(*b));
                        match (s == pt, gs == gt) {
                            (true, true) => unary.push((s, gs, S::one())),
                            (false, false) => pairs.push((s, gs, pt, gt)),
                            _ => {}
                        }
                    }
                    (a, b) if a == b => unary.push((s, gs, S::one())),
                    _ => {}
                }
            }
        }
        for (p, g, w) in unary {
            let i = self.at(p, g);
            self.unary[i] = self.unary[i] + w;
        }
        for (p1, g1, p2, g2) in pairs {
            let i = self.at(p1, g1);
            self.links[i].push(Link { pred: p2, gold: g2, weight: S::one() });
            let j = self.at(p2, g2);
            self.links[j].push(Link { pred: p1, gold: g1, weight: S::one() });
        }
    }

    fn at(&self, p: usize, g: usize) -> usize {
        p * self.gold_vars + g
    }

    fn candidates(&self, p: usize) -> std::ops::Range<usize> {
        if p < self.pred_nodes {
            0..self.gold_nodes
        } else {
            self.gold_nodes..self.gold_vars
        }
    }

    fn same_kind(&self, p: usize, q: usize) -> bool {
        (p < self.pred_nodes) == (q < self.pred_nodes)
    }

    fn score(&self, matched: S) -> MatchScore<S> {
        MatchScore::new(matched, S::from_count(self.pred_total), S::from_count(self.gold_total))
    }

    fn alignment(&self, m: &[Option<usize>]) -> Alignment {
        let nodes = m[..self.pred_nodes].to_vec();
        let boxes = m[self.pred_nodes..].iter().map(|g| g.map(|g| g - self.gold_nodes)).collect();
        Alignment { nodes, boxes }
    }

    fn assignment(&self, a: &Alignment) -> Vec<Option<usize>> {
        let mut m: Vec<Option<usize>> = (0..self.pred_nodes).map(|p| a.node(p)).collect();
        m.extend((0..self.pred_vars - self.pred_nodes).map(|b| a.box_id(b).map(|g| g + self.gold_nodes)));
        m
    }

    fn total(&self, m: &[Option<usize>]) -> S {
        let mut s = S::zero();
        for (p, g) in m.iter().enumerate() {
            let Some(g) = *g else { continue };
            let i = self.at(p, g);
            s = s + self.unary[i];
            for l in &self.links[i] {
                if l.pred > p && m[l.pred] == Some(l.gold) {
                    s = s + l.weight;
                }
            }
        }
        s
    }

    /// Terms of the objective that involve any of `vars`, each counted once.
    fn contribution(&self, m: &[Option<usize>], vars: &[usize]) -> S {
        let mut s = S::zero();
        for &p in vars {
            let Some(g) = m[p] else { continue };
            let i = self.at(p, g);
            s = s + self.unary[i];
            for l in &self.links[i] {
                if m[l.pred] == Some(l.gold) && (!vars.contains(&l.pred) || p < l.pred) {
                    s = s + l.weight;
                }
            }
        }
        s
    }

    /// Steepest-ascent hill climbing. Moves: reassign a variable to a free
    /// gold variable or to nothing, swap two variables, and map both ends
    /// of an edge triple at once (owners of the targets are swapped out).
    /// The edge move escapes plateaus where neither mapping alone gains; it
    /// may be completed by a third variable taking a vacated gold variable.
    fn climb(&self, m: &mut [Option<usize>]) {
        loop {
            let mut best_gain = S::tolerance();
            let mut best: Option<Vec<(usize, Option<usize>)>> = None;
            let mut consider = |m: &mut [Option<usize>], changes: Vec<(usize, Option<usize>)>| {
                let gain = self.gain(m, &changes);
                if gain > best_gain {
                    best_gain = gain;
                    best = Some(changes);
                }
            };
            let mut owned = vec![false; self.gold_vars];
            for g in m.iter().flatten() {
                owned[*g] = true;
            }
            for p in 0..self.pred_vars {
                let free = self.candidates(p).filter(|&g| !owned[g]).map(Some);
                for g in free.chain(std::iter::once(None)) {
                    if g != m[p] {
                        consider(m, vec![(p, g)]);
                    }
                }
            }
            for p in 0..self.pred_vars {
                for q in p + 1..self.pred_vars {
                    if self.same_kind(p, q) && m[p] != m[q] {
                        consider(m, vec![(p, m[q]), (q, m[p])]);
                    }
                }
            }
            for p in 0..self.pred_vars {
                for q in p + 1..self.pred_vars {
                    for r in q + 1..self.pred_vars {
                        if !self.same_kind(p, q) || !self.same_kind(q, r) {
                            continue;
                        }
                        if m[p] != m[q] && m[q] != m[r] && m[p] != m[r] {
                            consider(m, vec![(p, m[q]), (q, m[r]), (r, m[p])]);
                            consider(m, vec![(p, m[r]), (q, m[p]), (r, m[q])]);
                        }
                    }
                }
            }
            for p in 0..self.pred_vars {
                for g in self.candidates(p) {
                    for l in &self.links[self.at(p, g)] {
                        if l.pred < p || (m[p] == Some(g) && m[l.pred] == Some(l.gold)) {
                            continue;
                        }
                        let mut next = m.to_vec();
                        swap_assign(&mut next, p, g);
                        swap_assign(&mut next, l.pred, l.gold);
                        let changes = diff(m, &next);
                        consider(m, changes);
                        // Let another variable take a gold variable the move vacated.
                        for h in [m[p], m[l.pred]].into_iter().flatten() {
                            if next.contains(&Some(h)) {
                                continue;
                            }
                            for v in (0..self.pred_vars).filter(|&v| v != p && v != l.pred && self.candidates(v).contains(&h)) {
                                let old = next[v];
                                next[v] = Some(h);
                                let changes = diff(m, &next);
                                consider(m, changes);
                                next[v] = old;
                            }
                        }
                    }
                }
            }
            match best {
                None => return,
                Some(changes) => {
                    for (v, g) in changes {
                        m[v] = g;
                    }
                }
            }
        }
    }

    /// Iterated local search from a local optimum: a few random two-variable
    /// jumps, each climbed again and kept only when it improves.
    fn kick(&self, m: &mut [Option<usize>], seed: u64, ceiling: &S) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6b69_636b);
        let mut score = self.total(m);
        for _ in 0..2 * self.pred_vars {
            if score >= *ceiling {
                return;
            }
            let mut next = m.to_vec();
            for _ in 0..2 {
                let p = rng.random_range(0..self.pred_vars);
                let range = self.candidates(p);
                if !range.is_empty() {
                    swap_assign(&mut next, p, rng.random_range(range));
                }
            }
            self.climb(&mut next);
            let s = self.total(&next);
            if s > score + S::tolerance() {
                score = s;
                m.copy_from_slice(&next);
            }
        }
    }

    /// Objective change from applying `changes` (left unapplied).
    fn gain(&self, m: &mut [Option<usize>], changes: &[(usize, Option<usize>)]) -> S {
        let vars: Vec<usize> = changes.iter().map(|c| c.0).collect();
        let saved: Vec<Option<usize>> = vars.iter().map(|&v| m[v]).collect();
        let before = self.contribution(m, &vars);
        for &(v, g) in changes {
            m[v] = g;
        }
        let after = self.contribution(m, &vars);
        for (&v, g) in vars.iter().zip(saved) {
            m[v] = g;
        }
        after - before
    }
    /// Nodes by descending concept score, then boxes by the edges they
    /// complete given the node map, then everything else.
    fn greedy(&self) -> Vec<Option<usize>> {
        let mut m = vec![None; self.pred_vars];
        let mut taken = vec![false; self.gold_vars];
        let mut assign = |m: &mut Vec<Option<usize>>, mut scored: Vec<(S, usize, usize)>| {
            scored.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal).then((a.1, a.2).cmp(&(b.1, b.2))));
            for (_, p, g) in scored {
                if m[p].is_none() && !taken[g] {
                    m[p] = Some(g);
                    taken[g] = true;
                }
            }
        };
        let nodes: Vec<(S, usize, usize)> = (0..self.pred_nodes)
            .flat_map(|p| self.candidates(p).map(move |g| (p, g)))
            .map(|(p, g)| (self.unary[self.at(p, g)], p, g))
            .filter(|(w, _, _)| *w > S::zero())
            .collect();
        assign(&mut m, nodes);
        let boxes: Vec<(S, usize, usize)> = (self.pred_nodes..self.pred_vars)
            .flat_map(|p| self.candidates(p).map(move |g| (p, g)))
            .map(|(p, g)| {
                let i = self.at(p, g);
                let linked = self.links[i].iter().filter(|l| m[l.pred] == Some(l.gold)).map(|l| l.weight).sum::<S>();
                (self.unary[i] + linked, p, g)
            })
            .filter(|(w, _, _)| *w > S::zero())
            .collect();
        assign(&mut m, boxes);
        // Weights are non-negative, so extending the map never loses score;
        // leftovers pair up in index order.
        for (p, slot) in m.iter_mut().enumerate() {
            if slot.is_none() {
                if let Some(g) = self.candidates(p).find(|&g| !taken[g]) {
                    *slot = Some(g);
                    taken[g] = true;
                }
            }
        }
        m
    }

    /// A random complete injective assignment.
    fn random(&self, seed: u64) -> Vec<Option<usize>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = vec![None; self.pred_vars];
        for (preds, golds) in [(0..self.pred_nodes, 0..self.gold_nodes), (self.pred_nodes..self.pred_vars, self.gold_nodes..self.gold_vars)] {
            let mut preds: Vec<usize> = preds.collect();
            let mut golds: Vec<usize> = golds.collect();
            preds.shuffle(&mut rng);
            golds.shuffle(&mut rng);
            for (p, g) in preds.into_iter().zip(golds) {
                m[p] = Some(g);
            }
        }
        m
    }

    /// Depth-first enumeration with an optimistic bound.
    fn exhaustive(&self) -> S {
        // Best possible gain of each variable counting only links to
        // earlier variables, which is when the search collects them.
        let bound: Vec<S> = (0..self.pred_vars)
            .map(|p| {
                self.candidates(p)
                    .map(|g| {
                        let i = self.at(p, g);
                        self.unary[i] + self.links[i].iter().filter(|l| l.pred < p).map(|l| l.weight).sum::<S>()
                    })
                    .fold(S::zero(), S::max)
            })
            .collect();
        let mut rest = vec![S::zero(); self.pred_vars + 1];
        for p in (0..self.pred_vars).rev() {
            rest[p] = rest[p + 1] + bound[p];
        }

        struct Search<'a, S> {
            problem: &'a Problem<S>,
            rest: Vec<S>,
            m: Vec<Option<usize>>,
            used: Vec<bool>,
            best: S,
        }
        impl<S: Scalar> Search<'_, S> {
            fn go(&mut self, p: usize, score: S) {
                if score > self.best {
                    self.best = score;
                }
                if p == self.problem.pred_vars || score + self.rest[p] <= self.best {
                    return;
                }
                for g in self.problem.candidates(p) {
                    if self.used[g] {
                        continue;
                    }
                    let i = self.problem.at(p, g);
                    let mut gain = self.problem.unary[i];
                    for l in &self.problem.links[i] {
                        if l.pred < p && self.m[l.pred] == Some(l.gold) {
                            gain = gain + l.weight;
                        }
                    }
                    self.m[p] = Some(g);
                    self.used[g] = true;
                    self.go(p + 1, score + gain);
                    self.used[g] = false;
                    self.m[p] = None;
                }
                self.go(p + 1, score);
            }
        }
        let mut search =
            Search { problem: self, rest, m: vec![None; self.pred_vars], used: vec![false; self.gold_vars], best: S::zero() };
        search.go(0, S::zero());
        search.best
    }
}
