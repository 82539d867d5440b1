//! Instances and matchings.
//!
//! Men and women are indexed by their listing order. A man's relation ranges
//! over woman indices, a woman's over man indices, and each relation's
//! universe is exactly the owner's neighborhood.

use std::collections::HashMap;
use std::sync::OnceLock;

use thiserror::Error;

use crate::prefs::{OrderClass, Relation, RelationError, RelationValue};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Men,
    Women,
}

/// A vertex of the bipartite graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Agent {
    Man(usize),
    Woman(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("malformed document: {0}")]
    Syntax(String),
    #[error("unknown agent `{0}`")]
    UnknownAgent(String),
    #[error("agent id `{0}` is used more than once")]
    DuplicateAgent(String),
    #[error("edge ({0}, {1}) is listed twice")]
    DuplicateEdge(String, String),
    #[error("edge ({0}, {1}) does not join a man and a woman")]
    NotBipartite(String, String),
    #[error("`{owner}` compares `{other}`, which is not one of its neighbors")]
    NonEdgePreference { owner: String, other: String },
    #[error("`{owner}` gives inconsistent values for the pair ({a}, {b})")]
    ConflictingPair { owner: String, a: String, b: String },
    #[error("`{owner}` compares `{agent}` with itself")]
    SelfComparison { owner: String, agent: String },
    #[error("unknown relation token `{0}`")]
    UnknownToken(String),
    #[error("matching uses ({0}, {1}), which is not an edge")]
    NotAnEdge(String, String),
    #[error("agent `{0}` appears in more than one matching pair")]
    DuplicateVertex(String),
    #[error("relation universe of `{0}` differs from its neighborhood")]
    UniverseMismatch(String),
}

/// Bipartite acceptability graph plus one relation per agent.
#[derive(Debug, Clone)]
pub struct Instance {
    men: Vec<String>,
    women: Vec<String>,
    edges: Vec<(usize, usize)>,
    edge_index: HashMap<(usize, usize), usize>,
    men_prefs: Vec<Relation>,
    women_prefs: Vec<Relation>,
    classes: OnceLock<Classes>,
}

#[derive(Debug, Clone)]
struct Classes {
    men: Vec<OrderClass>,
    women: Vec<OrderClass>,
}

impl PartialEq for Instance {
    fn eq(&self, other: &Self) -> bool {
        self.men == other.men
            && self.women == other.women
            && self.edges == other.edges
            && self.men_prefs == other.men_prefs
            && self.women_prefs == other.women_prefs
    }
}

impl Eq for Instance {}

impl Instance {
    /// Instance with all-incomparable relations. Edges are `(man, woman)`
    /// index pairs; they are stored sorted.
    pub fn new(
        men: Vec<String>,
        women: Vec<String>,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, InstanceError> {
        let mut seen = std::collections::HashSet::new();
        for id in men.iter().chain(&women) {
            if !seen.insert(id.as_str()) {
                return Err(InstanceError::DuplicateAgent(id.clone()));
            }
        }
        let mut edges: Vec<(usize, usize)> = edges.into_iter().collect();
        edges.sort_unstable();
        for pair in edges.windows(2) {
            if pair[0] == pair[1] {
                let (u, w) = pair[0];
                return Err(InstanceError::DuplicateEdge(men[u].clone(), women[w].clone()));
            }
        }
        let mut men_adj = vec![Vec::new(); men.len()];
        let mut women_adj = vec![Vec::new(); women.len()];
        for &(u, w) in &edges {
            if u >= men.len() || w >= women.len() {
                return Err(InstanceError::UnknownAgent(format!("({u}, {w})")));
            }
            men_adj[u].push(w);
            women_adj[w].push(u);
        }
        let edge_index = edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        Ok(Instance {
            men,
            women,
            edges,
            edge_index,
            men_prefs: men_adj.into_iter().map(Relation::empty).collect(),
            women_prefs: women_adj.into_iter().map(Relation::empty).collect(),
            classes: OnceLock::new(),
        })
    }

    /// Convenience constructor with generated ids `m0, m1, ...` and `w0, w1, ...`.
    pub fn with_counts(
        n_men: usize,
        n_women: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, InstanceError> {
        Instance::new(
            (0..n_men).map(|i| format!("m{i}")).collect(),
            (0..n_women).map(|i| format!("w{i}")).collect(),
            edges,
        )
    }

    pub fn n_men(&self) -> usize {
        self.men.len()
    }

    pub fn n_women(&self) -> usize {
        self.women.len()
    }

    pub fn men(&self) -> &[String] {
        &self.men
    }

    pub fn women(&self) -> &[String] {
        &self.women
    }

    pub fn man_name(&self, u: usize) -> &str {
        &self.men[u]
    }

    pub fn woman_name(&self, w: usize) -> &str {
        &self.women[w]
    }

    pub fn agent_name(&self, a: Agent) -> &str {
        match a {
            Agent::Man(u) => &self.men[u],
            Agent::Woman(w) => &self.women[w],
        }
    }

    pub fn find_man(&self, id: &str) -> Option<usize> {
        self.men.iter().position(|m| m == id)
    }

    pub fn find_woman(&self, id: &str) -> Option<usize> {
        self.women.iter().position(|w| w == id)
    }

    /// Edges in canonical `(man index, woman index)` order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_index(&self, u: usize, w: usize) -> Option<usize> {
        self.edge_index.get(&(u, w)).copied()
    }

    pub fn has_edge(&self, u: usize, w: usize) -> bool {
        self.edge_index.contains_key(&(u, w))
    }

    pub fn man_neighbors(&self, u: usize) -> &[usize] {
        self.men_prefs[u].universe()
    }

    pub fn woman_neighbors(&self, w: usize) -> &[usize] {
        self.women_prefs[w].universe()
    }

    pub fn man_relation(&self, u: usize) -> &Relation {
        &self.men_prefs[u]
    }

    pub fn woman_relation(&self, w: usize) -> &Relation {
        &self.women_prefs[w]
    }

    pub fn relation(&self, a: Agent) -> &Relation {
        match a {
            Agent::Man(u) => &self.men_prefs[u],
            Agent::Woman(w) => &self.women_prefs[w],
        }
    }

    /// Replaces a man's relation. Its universe must equal his neighborhood.
    pub fn set_man_relation(&mut self, u: usize, rel: Relation) -> Result<(), InstanceError> {
        if rel.universe() != self.men_prefs[u].universe() {
            return Err(InstanceError::UniverseMismatch(self.men[u].clone()));
        }
        self.men_prefs[u] = rel;
        self.classes = OnceLock::new();
        Ok(())
    }

    /// Replaces a woman's relation. Its universe must equal her neighborhood.
    pub fn set_woman_relation(&mut self, w: usize, rel: Relation) -> Result<(), InstanceError> {
        if rel.universe() != self.women_prefs[w].universe() {
            return Err(InstanceError::UniverseMismatch(self.women[w].clone()));
        }
        self.women_prefs[w] = rel;
        self.classes = OnceLock::new();
        Ok(())
    }

    /// Sets one pair in a man's relation.
    pub fn set_man_pref(&mut self, u: usize, a: usize, b: usize, value: RelationValue) {
        self.men_prefs[u].set(a, b, value);
        self.classes = OnceLock::new();
    }

    /// Sets one pair in a woman's relation.
    pub fn set_woman_pref(&mut self, w: usize, a: usize, b: usize, value: RelationValue) {
        self.women_prefs[w].set(a, b, value);
        self.classes = OnceLock::new();
    }

    fn classes(&self) -> &Classes {
        self.classes.get_or_init(|| Classes {
            men: self.men_prefs.iter().map(Relation::classify).collect(),
            women: self.women_prefs.iter().map(Relation::classify).collect(),
        })
    }

    pub fn man_classes(&self) -> &[OrderClass] {
        &self.classes().men
    }

    pub fn woman_classes(&self) -> &[OrderClass] {
        &self.classes().women
    }

    /// Least restrictive class on each side, `(men, women)`. An empty side
    /// counts as `Strict`.
    pub fn classify_sides(&self) -> (OrderClass, OrderClass) {
        let side = |cs: &[OrderClass]| cs.iter().copied().max().unwrap_or(OrderClass::Strict);
        (side(self.man_classes()), side(self.woman_classes()))
    }

    /// Same instance with the roles of men and women exchanged.
    pub fn transpose(&self) -> Instance {
        let mut edges: Vec<_> = self.edges.iter().map(|&(u, w)| (w, u)).collect();
        edges.sort_unstable();
        Instance {
            men: self.women.clone(),
            women: self.men.clone(),
            edge_index: edges.iter().enumerate().map(|(i, &e)| (e, i)).collect(),
            edges,
            men_prefs: self.women_prefs.clone(),
            women_prefs: self.men_prefs.clone(),
            classes: OnceLock::new(),
        }
    }

    /// Relabels men so that new man `i` is old man `order[i]`.
    pub fn permute_men(&self, order: &[usize]) -> Instance {
        assert_eq!(order.len(), self.n_men(), "order must be a permutation of the men");
        let mut new_of_old = vec![usize::MAX; order.len()];
        for (new, &old) in order.iter().enumerate() {
            new_of_old[old] = new;
        }
        assert!(new_of_old.iter().all(|&i| i != usize::MAX), "order must be a permutation");
        let edges = self.edges.iter().map(|&(u, w)| (new_of_old[u], w));
        let mut out =
            Instance::new(order.iter().map(|&old| self.men[old].clone()).collect(), self.women.clone(), edges)
                .expect("permutation preserves validity");
        for (new, &old) in order.iter().enumerate() {
            out.men_prefs[new] = self.men_prefs[old].clone();
        }
        for w in 0..self.n_women() {
            let rel = &self.women_prefs[w];
            let raw = rel.entries().into_iter().map(|(a, b, v)| (new_of_old[a], new_of_old[b], v));
            out.women_prefs[w] = Relation::from_comparisons(rel.universe().iter().map(|&u| new_of_old[u]), raw)
                .expect("relabelled relation stays consistent");
        }
        out
    }

    /// Checks that every pair of `m` is an edge.
    pub fn validate_matching(&self, m: &Matching) -> Result<(), InstanceError> {
        for &(u, w) in m.pairs() {
            if u >= self.n_men() || w >= self.n_women() || !self.has_edge(u, w) {
                let man = self.men.get(u).cloned().unwrap_or_else(|| format!("#{u}"));
                let woman = self.women.get(w).cloned().unwrap_or_else(|| format!("#{w}"));
                return Err(InstanceError::NotAnEdge(man, woman));
            }
        }
        Ok(())
    }
}

/// A set of vertex-disjoint `(man, woman)` pairs, kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Matching {
    pairs: Vec<(usize, usize)>,
}

impl Matching {
    /// Fails with the offending agent when a man or a woman appears twice.
    pub fn new(pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, Agent> {
        let mut pairs: Vec<(usize, usize)> = pairs.into_iter().collect();
        pairs.sort_unstable();
        let mut men = std::collections::HashSet::new();
        let mut women = std::collections::HashSet::new();
        for &(u, w) in &pairs {
            if !men.insert(u) {
                return Err(Agent::Man(u));
            }
            if !women.insert(w) {
                return Err(Agent::Woman(w));
            }
        }
        Ok(Matching { pairs })
    }

    pub fn empty() -> Self {
        Matching::default()
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, u: usize, w: usize) -> bool {
        self.pairs.binary_search(&(u, w)).is_ok()
    }

    pub fn partner_of_man(&self, u: usize) -> Option<usize> {
        self.pairs.iter().find(|p| p.0 == u).map(|p| p.1)
    }

    pub fn partner_of_woman(&self, w: usize) -> Option<usize> {
        self.pairs.iter().find(|p| p.1 == w).map(|p| p.0)
    }

    /// Partner lookup tables for an instance with the given side sizes.
    pub fn partners(&self, n_men: usize, n_women: usize) -> Partners {
        let mut man = vec![None; n_men];
        let mut woman = vec![None; n_women];
        for &(u, w) in &self.pairs {
            man[u] = Some(w);
            woman[w] = Some(u);
        }
        Partners { man, woman }
    }

    /// Covered vertices, men first, in index order.
    pub fn covered(&self) -> Vec<Agent> {
        let mut v: Vec<Agent> = self.pairs.iter().map(|&(u, _)| Agent::Man(u)).collect();
        let mut women: Vec<usize> = self.pairs.iter().map(|&(_, w)| w).collect();
        women.sort_unstable();
        v.extend(women.into_iter().map(Agent::Woman));
        v
    }
}

/// `M(v)` for every vertex; `None` means unmatched.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partners {
    pub man: Vec<Option<usize>>,
    pub woman: Vec<Option<usize>>,
}

impl InstanceError {
    pub(crate) fn from_relation(owner: &str, err: RelationError, name: impl Fn(usize) -> String) -> Self {
        match err {
            RelationError::ConflictingPair(a, b) => {
                InstanceError::ConflictingPair { owner: owner.to_string(), a: name(a), b: name(b) }
            }
            RelationError::UnknownAgent(a) => {
                InstanceError::NonEdgePreference { owner: owner.to_string(), other: name(a) }
            }
            RelationError::SelfComparison(a) => {
                InstanceError::SelfComparison { owner: owner.to_string(), agent: name(a) }
            }
            RelationError::UnknownToken(t) => InstanceError::UnknownToken(t),
            other => InstanceError::Syntax(other.to_string()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_by_two() -> Instance {
        let mut i = Instance::with_counts(2, 2, [(0, 0), (0, 1), (1, 0), (1, 1)]).unwrap();
        i.set_man_pref(1, 0, 1, RelationValue::StrictPref);
        i.set_woman_pref(0, 1, 0, RelationValue::StrictPref);
        i
    }

    #[test]
    fn edges_are_sorted_and_indexed() {
        let i = Instance::with_counts(2, 2, [(1, 0), (0, 1)]).unwrap();
        assert_eq!(i.edges(), &[(0, 1), (1, 0)]);
        assert_eq!(i.edge_index(1, 0), Some(1));
        assert_eq!(i.man_neighbors(0), &[1]);
        assert_eq!(i.woman_neighbors(0), &[1]);
    }

    #[test]
    fn rejects_duplicates() {
        assert!(matches!(Instance::with_counts(1, 1, [(0, 0), (0, 0)]), Err(InstanceError::DuplicateEdge(..))));
        assert!(matches!(Instance::new(vec!["a".into()], vec!["a".into()], []), Err(InstanceError::DuplicateAgent(_))));
    }

    #[test]
    fn classify_sides_takes_the_maximum() {
        let i = two_by_two();
        // m0 has an empty relation over two women: one tie
        assert_eq!(i.classify_sides(), (OrderClass::Ties, OrderClass::Ties));
        let lone = Instance::with_counts(1, 1, []).unwrap();
        assert_eq!(lone.classify_sides(), (OrderClass::Strict, OrderClass::Strict));
    }

    #[test]
    fn class_cache_is_invalidated_by_edits() {
        let mut i = two_by_two();
        assert_eq!(i.man_classes()[0], OrderClass::Ties);
        i.set_man_pref(0, 0, 1, RelationValue::BothPreferred);
        assert_eq!(i.classify_sides().0, OrderClass::Arbitrary);
    }

    #[test]
    fn transpose_twice_is_identity() {
        let i = two_by_two();
        let t = i.transpose();
        assert_eq!(t.man_relation(0), i.woman_relation(0));
        assert_eq!(t.transpose(), i);
    }

    #[test]
    fn permute_men_relabels_women_relations() {
        let i = two_by_two();
        let p = i.permute_men(&[1, 0]);
        assert_eq!(p.men(), &["m1".to_string(), "m0".to_string()]);
        // w0 preferred old m1, which is new m0
        assert!(p.woman_relation(0).prefers(0, 1));
        assert_eq!(p.permute_men(&[1, 0]), i);
    }

    #[test]
    fn matching_rejects_shared_vertices() {
        assert_eq!(Matching::new([(0, 0), (0, 1)]), Err(Agent::Man(0)));
        assert_eq!(Matching::new([(0, 1), (1, 1)]), Err(Agent::Woman(1)));
        let m = Matching::new([(1, 0), (0, 1)]).unwrap();
        assert_eq!(m.pairs(), &[(0, 1), (1, 0)]);
        assert_eq!(m.partner_of_woman(0), Some(1));
        assert!(m.contains(0, 1));
    }

    #[test]
    fn validate_matching_rejects_non_edges() {
        let i = Instance::with_counts(2, 2, [(0, 0)]).unwrap();
        assert!(i.validate_matching(&Matching::new([(0, 0)]).unwrap()).is_ok());
        assert!(matches!(i.validate_matching(&Matching::new([(1, 1)]).unwrap()), Err(InstanceError::NotAnEdge(..))));
    }
}
