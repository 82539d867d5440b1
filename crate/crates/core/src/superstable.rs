//! Super stable matchings when men have partial orders and women are
//! asymmetric.
//!
//! Men propose to one maximal woman at a time. A woman accepts only a man
//! she strictly prefers to everyone who has ever proposed to her, and breaks
//! an engagement as soon as someone not worse proposes. Deleting an edge
//! removes the woman from the man's poset; the maximal women are maintained
//! through the Hasse diagram of each man's order.

use std::collections::BTreeSet;

use crate::frontier::{gate, solver_limits, SolveError};
use crate::instance::{Instance, Matching};
use crate::prefs::{OrderClass, Relation, RelationError, RelationValue};
use crate::stability::StabilityNotion;

/// Transitive reduction of a strict partial order. Vertices are positions
/// in the relation's universe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hasse {
    universe: Vec<usize>,
    succ: Vec<Vec<usize>>,
    pred_count: Vec<usize>,
}

impl Hasse {
    /// Cover arcs `(better, worse)` as agent ids.
    pub fn arcs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, s) in self.succ.iter().enumerate() {
            out.extend(s.iter().map(|&j| (self.universe[i], self.universe[j])));
        }
        out.sort_unstable();
        out
    }

    /// Targets of the virtual source: the initially maximal elements.
    pub fn sources(&self) -> Vec<usize> {
        (0..self.universe.len()).filter(|&i| self.pred_count[i] == 0).map(|i| self.universe[i]).collect()
    }
}

pub fn build_hasse(r: &Relation) -> Result<Hasse, RelationError> {
    let class = r.classify();
    if class > OrderClass::Poset {
        return Err(RelationError::NotPoset(class));
    }
    let d = r.len();
    let words = d.div_ceil(64);
    // below[i]: everything i is preferred to; above[j]: everything preferred to j
    let mut below = vec![vec![0u64; words]; d];
    let mut above = vec![vec![0u64; words]; d];
    for i in 0..d {
        for j in 0..d {
            if r.compare_at(i, j) == RelationValue::StrictPref {
                below[i][j / 64] |= 1 << (j % 64);
                above[j][i / 64] |= 1 << (i % 64);
            }
        }
    }
    let mut succ = vec![Vec::new(); d];
    let mut pred_count = vec![0; d];
    for i in 0..d {
        for j in 0..d {
            let covers =
                below[i][j / 64] >> (j % 64) & 1 == 1 && below[i].iter().zip(&above[j]).all(|(a, b)| a & b == 0);
            if covers {
                succ[i].push(j);
                pred_count[j] += 1;
            }
        }
    }
    Ok(Hasse { universe: r.universe().to_vec(), succ, pred_count })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SuperEvent {
    Propose { man: usize, woman: usize },
    Accept { man: usize, woman: usize },
    BreakEngagement { woman: usize, man: usize },
    DeleteEdge { man: usize, woman: usize },
}

impl SuperEvent {
    pub fn to_json(&self, inst: &Instance) -> serde_json::Value {
        let (tag, u, w) = match *self {
            SuperEvent::Propose { man, woman } => ("propose", man, woman),
            SuperEvent::Accept { man, woman } => ("accept", man, woman),
            SuperEvent::BreakEngagement { woman, man } => ("break_engagement", man, woman),
            SuperEvent::DeleteEdge { man, woman } => ("delete_edge", man, woman),
        };
        serde_json::json!({ "event": tag, "man": inst.man_name(u), "woman": inst.woman_name(w) })
    }
}

#[derive(Debug, Clone)]
pub struct SuperOutcome {
    pub matching: Option<Matching>,
    pub trace: Vec<SuperEvent>,
    /// Deleted edges in deletion order.
    pub deleted: Vec<(usize, usize)>,
    /// Everyone who ever proposed to each woman, in proposal order.
    pub ever_proposed: Vec<Vec<usize>>,
}

/// Per-man view of the remaining poset.
#[derive(Debug, Clone)]
struct ManPoset {
    hasse: Hasse,
    remaining_preds: Vec<usize>,
    deleted: Vec<bool>,
    proposed: Vec<bool>,
    /// Maximal, not yet proposed, not deleted: women ids.
    pending: BTreeSet<usize>,
}

impl ManPoset {
    fn new(hasse: Hasse) -> Self {
        let d = hasse.universe.len();
        let pending = hasse.sources().into_iter().collect();
        ManPoset {
            remaining_preds: hasse.pred_count.clone(),
            deleted: vec![false; d],
            proposed: vec![false; d],
            pending,
            hasse,
        }
    }

    fn pos(&self, w: usize) -> usize {
        self.hasse.universe.binary_search(&w).expect("woman in the man's universe")
    }

    fn delete(&mut self, w: usize) {
        let i = self.pos(w);
        debug_assert!(self.remaining_preds[i] == 0, "only maximal women are deleted");
        self.deleted[i] = true;
        self.pending.remove(&w);
        for k in 0..self.hasse.succ[i].len() {
            let j = self.hasse.succ[i][k];
            self.remaining_preds[j] -= 1;
            if self.remaining_preds[j] == 0 && !self.deleted[j] && !self.proposed[j] {
                self.pending.insert(self.hasse.universe[j]);
            }
        }
    }
}

/// Stepwise execution of the super stable solver.
#[derive(Debug, Clone)]
pub struct SuperRun<'a> {
    inst: &'a Instance,
    men: Vec<ManPoset>,
    engaged: Vec<Option<usize>>,
    ever_proposed: Vec<Vec<usize>>,
    deleted: Vec<(usize, usize)>,
    trace: Vec<SuperEvent>,
}

impl<'a> SuperRun<'a> {
    pub fn new(inst: &'a Instance) -> Result<Self, SolveError> {
        let (men_max, women_max) = solver_limits(StabilityNotion::Super);
        gate("super", inst.classify_sides(), men_max, women_max)?;
        let men = (0..inst.n_men())
            .map(|u| ManPoset::new(build_hasse(inst.man_relation(u)).expect("men are gated to posets")))
            .collect();
        Ok(SuperRun {
            inst,
            men,
            engaged: vec![None; inst.n_women()],
            ever_proposed: vec![Vec::new(); inst.n_women()],
            deleted: Vec::new(),
            trace: Vec::new(),
        })
    }

    /// Women still in man `u`'s poset.
    pub fn remaining(&self, u: usize) -> Vec<usize> {
        let p = &self.men[u];
        (0..p.deleted.len()).filter(|&i| !p.deleted[i]).map(|i| p.hasse.universe[i]).collect()
    }

    /// Maximal women of man `u`'s remaining poset, as maintained.
    pub fn frontier(&self, u: usize) -> Vec<usize> {
        let p = &self.men[u];
        (0..p.deleted.len())
            .filter(|&i| !p.deleted[i] && p.remaining_preds[i] == 0)
            .map(|i| p.hasse.universe[i])
            .collect()
    }

    pub fn trace(&self) -> &[SuperEvent] {
        &self.trace
    }

    fn delete_edge(&mut self, u: usize, w: usize) {
        self.men[u].delete(w);
        self.deleted.push((u, w));
        self.trace.push(SuperEvent::DeleteEdge { man: u, woman: w });
    }

    /// One proposal: the lowest-index man with a pending maximal woman
    /// proposes to the lowest such woman. Returns that edge, or `None` when
    /// no man can propose.
    pub fn step(&mut self) -> Option<(usize, usize)> {
        let u = (0..self.men.len()).find(|&u| !self.men[u].pending.is_empty())?;
        let w = self.men[u].pending.pop_first().expect("nonempty");
        let i = self.men[u].pos(w);
        self.men[u].proposed[i] = true;
        self.trace.push(SuperEvent::Propose { man: u, woman: w });
        let rel = self.inst.woman_relation(w);
        let accept = self.ever_proposed[w].iter().all(|&v| rel.compare(u, v) == RelationValue::StrictPref);
        self.ever_proposed[w].push(u);
        if let Some(v) = self.engaged[w] {
            if rel.compare(u, v) != RelationValue::StrictDispref {
                self.engaged[w] = None;
                self.trace.push(SuperEvent::BreakEngagement { woman: w, man: v });
                self.delete_edge(v, w);
            }
        }
        if accept {
            self.engaged[w] = Some(u);
            self.trace.push(SuperEvent::Accept { man: u, woman: w });
        } else {
            self.delete_edge(u, w);
        }
        Some((u, w))
    }

    pub fn finish(mut self) -> SuperOutcome {
        while self.step().is_some() {}
        let engagements: Vec<(usize, usize)> =
            self.engaged.iter().enumerate().filter_map(|(w, u)| u.map(|u| (u, w))).collect();
        let covers = (0..self.engaged.len()).all(|w| self.ever_proposed[w].is_empty() || self.engaged[w].is_some());
        let matching = if covers { Matching::new(engagements).ok() } else { None };
        SuperOutcome { matching, trace: self.trace, deleted: self.deleted, ever_proposed: self.ever_proposed }
    }
}

/// Super stable matching of a poset x asymmetric instance, or `None` when
/// none exists.
pub fn solve_super(inst: &Instance) -> Result<SuperOutcome, SolveError> {
    Ok(SuperRun::new(inst)?.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::parse_instance;
    use crate::stability::find_blocking;

    #[test]
    fn chain_is_reduced() {
        let r = Relation::normalize([0, 1, 2], &[(0, 1, "<"), (1, 2, "<"), (0, 2, "<")]).unwrap();
        let h = build_hasse(&r).unwrap();
        assert_eq!(h.arcs(), vec![(0, 1), (1, 2)]);
        assert_eq!(h.sources(), vec![0]);
    }

    #[test]
    fn antichain_has_two_sources() {
        let h = build_hasse(&Relation::empty([3, 5])).unwrap();
        assert!(h.arcs().is_empty());
        assert_eq!(h.sources(), vec![3, 5]);
    }

    #[test]
    fn intransitive_relation_is_rejected() {
        let r = Relation::normalize([0, 1, 2], &[(0, 1, "<"), (1, 2, "<")]).unwrap();
        assert_eq!(build_hasse(&r), Err(RelationError::NotPoset(OrderClass::Acyclic)));
    }

    #[test]
    fn displaced_man_moves_down() {
        let i = parse_instance(
            r#"{"men":["u1","u2"],"women":["w1","w2"],"edges":[["u1","w1"],["u1","w2"],["u2","w1"]],
            "prefs":{"u1":[["w1","w2","<"]],"w1":[["u2","u1","<"]]}}"#,
        )
        .unwrap();
        let out = solve_super(&i).unwrap();
        let m = out.matching.unwrap();
        assert_eq!(m.pairs(), &[(0, 1), (1, 0)]);
        assert_eq!(find_blocking(StabilityNotion::Super, &i, &m).unwrap(), None);
        assert_eq!(out.deleted, vec![(0, 0)]);
    }

    #[test]
    fn all_incomparable_has_none() {
        let i = Instance::with_counts(2, 2, [(0, 0), (0, 1), (1, 0), (1, 1)]).unwrap();
        assert!(solve_super(&i).unwrap().matching.is_none());
    }

    #[test]
    fn single_edge() {
        let i = Instance::with_counts(1, 1, [(0, 0)]).unwrap();
        assert_eq!(solve_super(&i).unwrap().matching.unwrap().pairs(), &[(0, 0)]);
    }

    #[test]
    fn tied_proposals_delete_both_edges() {
        // w cannot separate u1 and u2: the second proposal is refused and
        // breaks the first engagement
        let i = Instance::with_counts(2, 1, [(0, 0), (1, 0)]).unwrap();
        let mut run = SuperRun::new(&i).unwrap();
        run.step();
        run.step();
        assert!(run.remaining(0).is_empty() && run.remaining(1).is_empty());
        assert!(run.clone().finish().matching.is_none());
        assert_eq!(
            run.trace(),
            &[
                SuperEvent::Propose { man: 0, woman: 0 },
                SuperEvent::Accept { man: 0, woman: 0 },
                SuperEvent::Propose { man: 1, woman: 0 },
                SuperEvent::BreakEngagement { woman: 0, man: 0 },
                SuperEvent::DeleteEdge { man: 0, woman: 0 },
                SuperEvent::DeleteEdge { man: 1, woman: 0 },
            ]
        );
    }

    #[test]
    fn frontier_follows_deletions() {
        // u: a above b and c, b above d
        let i = parse_instance(
            r#"{"men":["u","v"],"women":["a","b","c","d"],
            "edges":[["u","a"],["u","b"],["u","c"],["u","d"],["v","a"]],
            "prefs":{"u":[["a","b","<"],["a","c","<"],["b","d","<"],["a","d","<"]],"a":[["v","u","<"]]}}"#,
        )
        .unwrap();
        let mut run = SuperRun::new(&i).unwrap();
        assert_eq!(run.frontier(0), vec![0]);
        run.step();
        run.step();
        assert_eq!(run.remaining(0), vec![1, 2, 3]);
        assert_eq!(run.frontier(0), vec![1, 2]);
        // u gets engaged to both b and c, which is not a matching
        assert!(run.finish().matching.is_none());
    }
}
