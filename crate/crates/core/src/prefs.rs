//! Pairwise preference relations and their orderedness classes.
//!
//! A [`Relation`] holds one agent's comparisons over its neighbors. Every
//! unordered pair of neighbors carries one of four [`RelationValue`]s; pairs
//! that were never stated are incomparable. Agents are plain indices here;
//! [`crate::Instance`] maps them to names.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Value of an ordered pair `(a, b)` in an agent's relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelationValue {
    /// `a` is preferred to `b` and not vice versa.
    StrictPref,
    /// `b` is preferred to `a` and not vice versa.
    StrictDispref,
    /// Neither is preferred to the other.
    Incomparable,
    /// Each is preferred to the other: a declared draw.
    BothPreferred,
}

impl RelationValue {
    /// Value of the reversed pair `(b, a)`.
    pub fn mirror(self) -> Self {
        match self {
            RelationValue::StrictPref => RelationValue::StrictDispref,
            RelationValue::StrictDispref => RelationValue::StrictPref,
            other => other,
        }
    }

    pub fn token(self) -> &'static str {
        match self {
            RelationValue::StrictPref => "<",
            RelationValue::StrictDispref => ">",
            RelationValue::Incomparable => "~",
            RelationValue::BothPreferred => "||",
        }
    }

    pub fn from_token(token: &str) -> Option<Self> {
        match token {
            "<" => Some(RelationValue::StrictPref),
            ">" => Some(RelationValue::StrictDispref),
            "~" => Some(RelationValue::Incomparable),
            "||" => Some(RelationValue::BothPreferred),
            _ => None,
        }
    }
}

impl fmt::Display for RelationValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

/// The six degrees of preference orderedness, from most to least restrictive.
///
/// The derived `Ord` follows that sequence, so `Strict < Ties < ... < Arbitrary`
/// and "at most Poset" reads as `class <= OrderClass::Poset`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum OrderClass {
    Strict,
    Ties,
    Poset,
    Acyclic,
    Asymmetric,
    Arbitrary,
}

impl OrderClass {
    pub const ALL: [OrderClass; 6] = [
        OrderClass::Strict,
        OrderClass::Ties,
        OrderClass::Poset,
        OrderClass::Acyclic,
        OrderClass::Asymmetric,
        OrderClass::Arbitrary,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OrderClass::Strict => "Strict",
            OrderClass::Ties => "Ties",
            OrderClass::Poset => "Poset",
            OrderClass::Acyclic => "Acyclic",
            OrderClass::Asymmetric => "Asymmetric",
            OrderClass::Arbitrary => "Arbitrary",
        }
    }
}

impl fmt::Display for OrderClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OrderClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        OrderClass::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown preference class `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RelationError {
    #[error("pair ({0}, {1}) is given inconsistent values")]
    ConflictingPair(usize, usize),
    #[error("agent {0} is not in the relation's universe")]
    UnknownAgent(usize),
    #[error("agent {0} is compared with itself")]
    SelfComparison(usize),
    #[error("unknown relation token `{0}`")]
    UnknownToken(String),
    #[error("relation contains a preference cycle")]
    CyclicRelation,
    #[error("relation cannot be written as a list with ties")]
    NotTies,
    #[error("relation is {0}, a poset is required")]
    NotPoset(OrderClass),
}

/// Ordered blocks `N_1, ..., N_k`: members of one block are mutually
/// incomparable, and every member of an earlier block is strictly preferred
/// to every member of a later one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TieDecomposition {
    pub blocks: Vec<Vec<usize>>,
}

impl TieDecomposition {
    /// Re-expands the blocks into a relation over their union.
    pub fn to_relation(&self) -> Relation {
        Relation::from_ties(&self.blocks)
    }

    /// Block index of every agent, keyed by agent.
    pub fn rank_of(&self) -> HashMap<usize, usize> {
        self.blocks.iter().enumerate().flat_map(|(k, block)| block.iter().map(move |&a| (a, k))).collect()
    }
}

/// One agent's pairwise comparisons over its neighbors.
///
/// The universe is kept sorted by agent index, which is the tie-breaking
/// order for every deterministic operation below. Values are stored densely
/// by universe position; absent pairs read as [`RelationValue::Incomparable`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    universe: Vec<usize>,
    position: HashMap<usize, usize>,
    cells: Vec<RelationValue>,
}

impl Relation {
    /// All-incomparable relation over `universe`.
    pub fn empty(universe: impl IntoIterator<Item = usize>) -> Self {
        let mut universe: Vec<usize> = universe.into_iter().collect();
        universe.sort_unstable();
        universe.dedup();
        let position = universe.iter().enumerate().map(|(i, &a)| (a, i)).collect();
        let d = universe.len();
        Relation { universe, position, cells: vec![RelationValue::Incomparable; d * d] }
    }

    /// Builds a relation from raw comparisons, mirroring `>` entries and
    /// rejecting pairs given two inconsistent values.
    pub fn from_comparisons(
        universe: impl IntoIterator<Item = usize>,
        raw: impl IntoIterator<Item = (usize, usize, RelationValue)>,
    ) -> Result<Self, RelationError> {
        let mut rel = Relation::empty(universe);
        let d = rel.universe.len();
        let mut stated: Vec<Option<RelationValue>> = vec![None; d * d];
        for (a, b, value) in raw {
            let i = rel.position(a).ok_or(RelationError::UnknownAgent(a))?;
            let j = rel.position(b).ok_or(RelationError::UnknownAgent(b))?;
            if i == j {
                return Err(RelationError::SelfComparison(a));
            }
            let (lo, hi, value) = if i < j { (i, j, value) } else { (j, i, value.mirror()) };
            match stated[lo * d + hi] {
                Some(prev) if prev != value => {
                    return Err(RelationError::ConflictingPair(rel.universe[lo], rel.universe[hi]))
                }
                _ => stated[lo * d + hi] = Some(value),
            }
            rel.set_at(lo, hi, value);
        }
        Ok(rel)
    }

    /// Token form of [`Relation::from_comparisons`]: `"<"`, `">"`, `"~"`, `"||"`.
    pub fn normalize(
        universe: impl IntoIterator<Item = usize>,
        raw: &[(usize, usize, &str)],
    ) -> Result<Self, RelationError> {
        let parsed = raw
            .iter()
            .map(|&(a, b, tok)| {
                RelationValue::from_token(tok)
                    .map(|v| (a, b, v))
                    .ok_or_else(|| RelationError::UnknownToken(tok.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Relation::from_comparisons(universe, parsed)
    }

    /// Total strict order, best first.
    pub fn strict_order(order: &[usize]) -> Self {
        let blocks: Vec<Vec<usize>> = order.iter().map(|&a| vec![a]).collect();
        Relation::from_ties(&blocks)
    }

    /// List with ties, best block first.
    pub fn from_ties(blocks: &[Vec<usize>]) -> Self {
        let mut rel = Relation::empty(blocks.iter().flatten().copied());
        for (k, upper) in blocks.iter().enumerate() {
            for lower in &blocks[k + 1..] {
                for &a in upper {
                    for &b in lower {
                        rel.set(a, b, RelationValue::StrictPref);
                    }
                }
            }
        }
        rel
    }

    pub fn universe(&self) -> &[usize] {
        &self.universe
    }

    pub fn len(&self) -> usize {
        self.universe.len()
    }

    pub fn is_empty(&self) -> bool {
        self.universe.is_empty()
    }

    pub fn contains(&self, a: usize) -> bool {
        self.position.contains_key(&a)
    }

    pub fn position(&self, a: usize) -> Option<usize> {
        self.position.get(&a).copied()
    }

    /// Value of `(a, b)`.
    ///
    /// # Panics
    /// When either agent is outside the universe.
    pub fn compare(&self, a: usize, b: usize) -> RelationValue {
        let i = self.position[&a];
        let j = self.position[&b];
        self.compare_at(i, j)
    }

    /// Value of the pair at universe positions `(i, j)`.
    pub fn compare_at(&self, i: usize, j: usize) -> RelationValue {
        self.cells[i * self.universe.len() + j]
    }

    /// `a` strictly preferred to `b`.
    pub fn prefers(&self, a: usize, b: usize) -> bool {
        self.compare(a, b) == RelationValue::StrictPref
    }

    /// Sets the value of `(a, b)`, overwriting whatever was there.
    pub fn set(&mut self, a: usize, b: usize, value: RelationValue) {
        let i = self.position(a).unwrap_or_else(|| panic!("agent {a} not in universe"));
        let j = self.position(b).unwrap_or_else(|| panic!("agent {b} not in universe"));
        assert_ne!(i, j, "self-comparison of agent {a}");
        self.set_at(i, j, value);
    }

    fn set_at(&mut self, i: usize, j: usize, value: RelationValue) {
        let d = self.universe.len();
        self.cells[i * d + j] = value;
        self.cells[j * d + i] = value.mirror();
    }

    /// Stored (non-incomparable) pairs in canonical form: ordered by the
    /// positions of the unordered pair, strict entries oriented so the
    /// preferred agent comes first, `||` entries with the lower index first.
    pub fn entries(&self) -> Vec<(usize, usize, RelationValue)> {
        let d = self.universe.len();
        let mut out = Vec::new();
        for i in 0..d {
            for j in i + 1..d {
                let (a, b) = (self.universe[i], self.universe[j]);
                match self.compare_at(i, j) {
                    RelationValue::Incomparable => {}
                    RelationValue::StrictDispref => out.push((b, a, RelationValue::StrictPref)),
                    v => out.push((a, b, v)),
                }
            }
        }
        out
    }

    fn has_both_preferred(&self) -> bool {
        self.cells.contains(&RelationValue::BothPreferred)
    }

    /// Positions strictly dominated by position `i`.
    fn successors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        let d = self.universe.len();
        (0..d).filter(move |&j| self.cells[i * d + j] == RelationValue::StrictPref)
    }

    /// Transitive iff every successor's successors are one's own.
    fn is_transitive(&self) -> bool {
        let d = self.universe.len();
        let words = d.div_ceil(64);
        let mut rows = vec![0u64; d * words];
        for i in 0..d {
            for j in self.successors(i) {
                rows[i * words + j / 64] |= 1 << (j % 64);
            }
        }
        let row = |i: usize| &rows[i * words..(i + 1) * words];
        (0..d).all(|a| self.successors(a).all(|b| row(b).iter().zip(row(a)).all(|(x, y)| x & !y == 0)))
    }

    /// Kahn's algorithm over the strict-preference digraph, lowest position
    /// first. `||` pairs count as arcs in both directions, i.e. a 2-cycle.
    fn topological_order(&self, keep: impl Fn(usize) -> bool) -> Option<Vec<usize>> {
        let d = self.universe.len();
        let dominates = |i: usize, j: usize| {
            matches!(self.compare_at(i, j), RelationValue::StrictPref | RelationValue::BothPreferred)
        };
        let members: Vec<usize> = (0..d).filter(|&i| keep(i)).collect();
        let mut indegree = vec![0usize; d];
        for &i in &members {
            for &j in &members {
                if i != j && dominates(i, j) {
                    indegree[j] += 1;
                }
            }
        }
        let mut ready: BinaryHeap<Reverse<usize>> =
            members.iter().filter(|&&i| indegree[i] == 0).map(|&i| Reverse(i)).collect();
        let mut order = Vec::with_capacity(members.len());
        while let Some(Reverse(i)) = ready.pop() {
            order.push(i);
            for &j in &members {
                if j != i && dominates(i, j) {
                    indegree[j] -= 1;
                    if indegree[j] == 0 {
                        ready.push(Reverse(j));
                    }
                }
            }
        }
        (order.len() == members.len()).then_some(order)
    }

    pub fn is_acyclic(&self) -> bool {
        self.topological_order(|_| true).is_some()
    }

    /// Most restrictive orderedness class this relation satisfies.
    pub fn classify(&self) -> OrderClass {
        if let Ok(ties) = self.ties_decomposition() {
            return if ties.blocks.iter().all(|b| b.len() == 1) { OrderClass::Strict } else { OrderClass::Ties };
        }
        if self.has_both_preferred() {
            return OrderClass::Arbitrary;
        }
        if self.is_transitive() {
            // transitive and asymmetric, hence acyclic
            OrderClass::Poset
        } else if self.is_acyclic() {
            OrderClass::Acyclic
        } else {
            OrderClass::Asymmetric
        }
    }

    /// Total order of the universe that respects every strict preference.
    /// Ties are broken by agent index.
    pub fn linear_extension(&self) -> Result<Vec<usize>, RelationError> {
        let order = self.topological_order(|_| true).ok_or(RelationError::CyclicRelation)?;
        Ok(order.into_iter().map(|i| self.universe[i]).collect())
    }

    /// The unique list-with-ties form of this relation, if it has one.
    pub fn ties_decomposition(&self) -> Result<TieDecomposition, RelationError> {
        if self.has_both_preferred() {
            return Err(RelationError::NotTies);
        }
        let d = self.universe.len();
        // In a list with ties, a member of block i dominates exactly the
        // members of all later blocks, so the domination count orders blocks.
        let score: Vec<usize> = (0..d).map(|i| self.successors(i).count()).collect();
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by_key(|&i| (Reverse(score[i]), i));
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        let mut block_of = vec![0usize; d];
        for (k, &i) in order.iter().enumerate() {
            if k == 0 || score[order[k - 1]] != score[i] {
                blocks.push(Vec::new());
            }
            block_of[i] = blocks.len() - 1;
            blocks.last_mut().expect("pushed above").push(i);
        }
        for i in 0..d {
            for j in 0..d {
                if i == j {
                    continue;
                }
                let expected = match block_of[i].cmp(&block_of[j]) {
                    std::cmp::Ordering::Equal => RelationValue::Incomparable,
                    std::cmp::Ordering::Less => RelationValue::StrictPref,
                    std::cmp::Ordering::Greater => RelationValue::StrictDispref,
                };
                if self.compare_at(i, j) != expected {
                    return Err(RelationError::NotTies);
                }
            }
        }
        Ok(TieDecomposition {
            blocks: blocks.into_iter().map(|b| b.into_iter().map(|i| self.universe[i]).collect()).collect(),
        })
    }

    /// Members of `remaining` not dominated by any other member of
    /// `remaining`, in index order.
    pub fn maximal_elements(&self, remaining: &[usize]) -> Result<Vec<usize>, RelationError> {
        let d = self.universe.len();
        let mut keep = vec![false; d];
        for &a in remaining {
            let i = self.position(a).ok_or(RelationError::UnknownAgent(a))?;
            keep[i] = true;
        }
        if self.topological_order(|i| keep[i]).is_none() {
            return Err(RelationError::CyclicRelation);
        }
        Ok((0..d)
            .filter(|&j| keep[j] && !(0..d).any(|i| keep[i] && self.compare_at(i, j) == RelationValue::StrictPref))
            .map(|j| self.universe[j])
            .collect())
    }
}
