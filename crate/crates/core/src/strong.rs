//! Strongly stable matchings when men have ties and women are asymmetric.
//!
//! Each man gets a private dummy woman at the bottom of his list so that
//! every man ends up matched. Men propose along whole ties. Rejected edges
//! stay in the graph and may still carry a later proposal, but they never
//! become active again. When proposing stalls, the critical set of the
//! active graph tells which men cannot all be served; their active edges
//! are rejected and proposing resumes.

use std::collections::VecDeque;

use serde::Serialize;

use crate::bipartite::{critical_set_from, max_matching, BipartiteGraph, BipartiteMatching};
use crate::frontier::{gate, solver_limits, SolveError};
use crate::instance::{Instance, Matching};
use crate::prefs::{Relation, RelationValue};
use crate::stability::StabilityNotion;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeStatus {
    Inactive,
    Active,
    Rejected,
}

/// Solver events in execution order. Women at index `n_women + u` are the
/// dummy of man `u`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TraceEvent {
    Propose { man: usize, tie: usize, edges: Vec<(usize, usize)> },
    RejectStrict { cause: (usize, usize), rejected: (usize, usize) },
    RejectIncomparable { cause: usize, rejected: (usize, usize) },
    RejectCritical { man: usize, edges: Vec<(usize, usize)> },
    Phase2Round { critical: Vec<usize> },
}

impl TraceEvent {
    /// Edges this event rejects.
    pub fn rejected_edges(&self) -> Vec<(usize, usize)> {
        match self {
            TraceEvent::RejectStrict { rejected, .. } | TraceEvent::RejectIncomparable { rejected, .. } => {
                vec![*rejected]
            }
            TraceEvent::RejectCritical { edges, .. } => edges.clone(),
            _ => Vec::new(),
        }
    }

    pub fn to_json(&self, inst: &Instance) -> serde_json::Value {
        let man = |u: usize| inst.man_name(u).to_string();
        let woman = |w: usize| woman_label(inst, w);
        let edge = |(u, w): (usize, usize)| serde_json::json!([man(u), woman(w)]);
        match self {
            TraceEvent::Propose { man: u, tie, edges } => serde_json::json!({
                "event": "propose", "man": man(*u), "tie": tie,
                "edges": edges.iter().map(|&e| edge(e)).collect::<Vec<_>>(),
            }),
            TraceEvent::RejectStrict { cause, rejected } => serde_json::json!({
                "event": "reject_strict", "cause": edge(*cause), "rejected": edge(*rejected),
            }),
            TraceEvent::RejectIncomparable { cause, rejected } => serde_json::json!({
                "event": "reject_incomparable", "cause": man(*cause), "rejected": edge(*rejected),
            }),
            TraceEvent::RejectCritical { man: u, edges } => serde_json::json!({
                "event": "reject_critical", "man": man(*u),
                "edges": edges.iter().map(|&e| edge(e)).collect::<Vec<_>>(),
            }),
            TraceEvent::Phase2Round { critical } => serde_json::json!({
                "event": "phase2_round", "critical": critical.iter().map(|&u| man(u)).collect::<Vec<_>>(),
            }),
        }
    }
}

fn woman_label(inst: &Instance, w: usize) -> String {
    if w < inst.n_women() {
        inst.woman_name(w).to_string()
    } else {
        format!("dummy:{}", inst.man_name(w - inst.n_women()))
    }
}

#[derive(Debug, Clone)]
pub struct StrongOutcome {
    pub matching: Option<Matching>,
    pub trace: Vec<TraceEvent>,
    /// Women (dummies included) that ever had an active edge.
    pub ever_active_women: Vec<usize>,
}

/// Full solver state over the instance extended with dummy women.
#[derive(Debug, Clone)]
pub struct StrongState<'a> {
    inst: &'a Instance,
    n_women: usize,
    /// Real edges in canonical order, then one dummy edge per man.
    edges: Vec<(usize, usize)>,
    status: Vec<EdgeStatus>,
    proposed: Vec<bool>,
    /// The man's position in the woman's relation, per edge.
    woman_pos: Vec<usize>,
    /// Incomparable rejections already triggered through this edge.
    incomparable_done: Vec<bool>,
    ties: Vec<Vec<Vec<usize>>>,
    next_tie: Vec<usize>,
    proposal_tie: Vec<Option<usize>>,
    active_count: Vec<usize>,
    man_edges: Vec<Vec<usize>>,
    woman_edges: Vec<Vec<usize>>,
    ever_active: Vec<bool>,
    rejections: usize,
    trace: Vec<TraceEvent>,
}

impl<'a> StrongState<'a> {
    pub fn new(inst: &'a Instance) -> Result<Self, SolveError> {
        let (men_max, women_max) = solver_limits(StabilityNotion::Strong);
        gate("strong", inst.classify_sides(), men_max, women_max)?;
        let (n_men, n_women) = (inst.n_men(), inst.n_women());
        let mut edges = inst.edges().to_vec();
        edges.extend((0..n_men).map(|u| (u, n_women + u)));
        let mut man_edges = vec![Vec::new(); n_men];
        let mut woman_edges = vec![Vec::new(); n_women + n_men];
        let mut woman_pos = Vec::with_capacity(edges.len());
        for (e, &(u, w)) in edges.iter().enumerate() {
            man_edges[u].push(e);
            woman_edges[w].push(e);
            woman_pos.push(if w < n_women {
                inst.woman_relation(w).position(u).expect("edge endpoints are in the relation")
            } else {
                0
            });
        }
        let ties = (0..n_men)
            .map(|u| {
                let mut blocks = inst.man_relation(u).ties_decomposition().expect("men are gated to ties").blocks;
                blocks.push(vec![n_women + u]);
                blocks
            })
            .collect();
        let m = edges.len();
        Ok(StrongState {
            inst,
            n_women,
            status: vec![EdgeStatus::Inactive; m],
            proposed: vec![false; m],
            woman_pos,
            incomparable_done: vec![false; m],
            ties,
            next_tie: vec![0; n_men],
            proposal_tie: vec![None; n_men],
            active_count: vec![0; n_men],
            man_edges,
            woman_edges,
            ever_active: vec![false; n_women + n_men],
            rejections: 0,
            trace: Vec::new(),
            edges,
        })
    }

    fn n_men(&self) -> usize {
        self.inst.n_men()
    }

    fn edge_id(&self, u: usize, w: usize) -> Option<usize> {
        if w < self.n_women {
            self.inst.edge_index(u, w)
        } else if w == self.n_women + u {
            Some(self.inst.edges().len() + u)
        } else {
            None
        }
    }

    /// Status of edge `(u, w)`; `w` may be the dummy `n_women + u`.
    pub fn status(&self, u: usize, w: usize) -> Option<EdgeStatus> {
        self.edge_id(u, w).map(|e| self.status[e])
    }

    pub fn has_proposal(&self, u: usize, w: usize) -> bool {
        self.edge_id(u, w).is_some_and(|e| self.proposed[e])
    }

    pub fn active_edges(&self, u: usize) -> Vec<usize> {
        self.man_edges[u].iter().filter(|&&e| self.status[e] == EdgeStatus::Active).map(|&e| self.edges[e].1).collect()
    }

    /// The man's ties, with his dummy as the last one.
    pub fn ties(&self, u: usize) -> &[Vec<usize>] {
        &self.ties[u]
    }

    pub fn trace(&self) -> &[TraceEvent] {
        &self.trace
    }

    fn woman_compare(&self, e: usize, f: usize) -> RelationValue {
        let w = self.edges[e].1;
        if w >= self.n_women {
            return RelationValue::Incomparable;
        }
        self.inst.woman_relation(w).compare_at(self.woman_pos[e], self.woman_pos[f])
    }

    /// Marks `e` rejected; returns whether it was active.
    fn reject(&mut self, e: usize) -> bool {
        debug_assert!(self.edges[e].1 < self.n_women, "dummy edge rejected");
        let was_active = self.status[e] == EdgeStatus::Active;
        if was_active {
            self.active_count[self.edges[e].0] -= 1;
        }
        self.status[e] = EdgeStatus::Rejected;
        self.rejections += 1;
        was_active
    }

    /// Man `u` proposes along every edge of his next tie. Returns the edges
    /// (as edge ids) that carried a new proposal, or `None` when he has no
    /// tie left.
    pub fn propose_next_tie(&mut self, u: usize) -> Option<Vec<usize>> {
        let k = self.next_tie[u];
        let tie = self.ties[u].get(k)?.clone();
        self.next_tie[u] += 1;
        self.proposal_tie[u] = Some(k);
        let mut new = Vec::with_capacity(tie.len());
        for w in tie {
            let e = self.edge_id(u, w).expect("tie members are neighbors");
            self.proposed[e] = true;
            if self.status[e] == EdgeStatus::Inactive {
                self.status[e] = EdgeStatus::Active;
                self.active_count[u] += 1;
                self.ever_active[w] = true;
            }
            new.push(e);
        }
        self.trace.push(TraceEvent::Propose { man: u, tie: k, edges: new.iter().map(|&e| self.edges[e]).collect() });
        Some(new)
    }

    /// The woman of proposal edge `e` rejects every edge she ranks strictly
    /// below it.
    pub fn reject_worse(&mut self, e: usize) {
        let w = self.edges[e].1;
        for i in 0..self.woman_edges[w].len() {
            let f = self.woman_edges[w][i];
            if f != e && self.status[f] != EdgeStatus::Rejected && self.woman_compare(e, f) == RelationValue::StrictPref
            {
                self.reject(f);
                self.trace.push(TraceEvent::RejectStrict { cause: self.edges[e], rejected: self.edges[f] });
            }
        }
    }

    /// Rejects every edge incomparable to `e` at its woman; returns the men
    /// who lost an active edge.
    fn reject_incomparable(&mut self, cause: usize, e: usize, lost: &mut Vec<usize>) {
        if self.incomparable_done[e] {
            return;
        }
        self.incomparable_done[e] = true;
        let w = self.edges[e].1;
        for i in 0..self.woman_edges[w].len() {
            let f = self.woman_edges[w][i];
            if f != e
                && self.status[f] != EdgeStatus::Rejected
                && self.woman_compare(e, f) == RelationValue::Incomparable
            {
                if self.reject(f) {
                    lost.push(self.edges[f].0);
                }
                self.trace.push(TraceEvent::RejectIncomparable { cause, rejected: self.edges[f] });
            }
        }
    }

    /// The rejection cascade with every man as a starting point.
    pub fn strong_reject(&mut self) {
        self.reject_cascade(0..self.n_men());
    }

    /// The rejection cascade started from `seeds` (FIFO, no duplicates).
    pub fn reject_cascade(&mut self, seeds: impl IntoIterator<Item = usize>) {
        let mut queued = vec![false; self.n_men()];
        let mut queue = VecDeque::new();
        for u in seeds {
            if !queued[u] {
                queued[u] = true;
                queue.push_back(u);
            }
        }
        let mut lost = Vec::new();
        while let Some(u) = queue.pop_front() {
            queued[u] = false;
            match self.active_count[u] {
                1 => {
                    let e = *self.man_edges[u]
                        .iter()
                        .find(|&&e| self.status[e] == EdgeStatus::Active)
                        .expect("one active edge");
                    self.reject_incomparable(u, e, &mut lost);
                }
                0 => {
                    if let Some(k) = self.proposal_tie[u] {
                        for w in self.ties[u][k].clone() {
                            let e = self.edge_id(u, w).expect("tie members are neighbors");
                            self.reject_incomparable(u, e, &mut lost);
                        }
                    }
                }
                _ => {}
            }
            for v in lost.drain(..) {
                if !queued[v] {
                    queued[v] = true;
                    queue.push_back(v);
                }
            }
        }
    }

    /// Proposing and cascading until every man has an active edge.
    pub fn phase_one(&mut self) {
        loop {
            let free: Vec<usize> = (0..self.n_men())
                .filter(|&u| self.active_count[u] == 0 && self.next_tie[u] < self.ties[u].len())
                .collect();
            if free.is_empty() {
                return;
            }
            let mut proposals = Vec::new();
            for u in free {
                proposals.extend(self.propose_next_tie(u).expect("filtered above"));
            }
            for e in proposals {
                self.reject_worse(e);
            }
            self.strong_reject();
        }
    }

    pub fn active_graph(&self) -> BipartiteGraph {
        BipartiteGraph::from_edges(
            self.n_men(),
            self.n_women + self.n_men(),
            self.edges.iter().zip(&self.status).filter(|(_, &s)| s == EdgeStatus::Active).map(|(&e, _)| e),
        )
    }

    pub fn run(mut self) -> StrongOutcome {
        let n_men = self.n_men();
        let mut warm: Option<BipartiteMatching> = None;
        let final_matching = loop {
            self.phase_one();
            let g = self.active_graph();
            // reuse the last maximum matching unless too much has changed
            let start = warm.take().filter(|_| self.rejections < n_men.max(1)).map(|mut m| {
                for u in 0..n_men {
                    if m.left[u].is_some_and(|w| !g.has_edge(u, w)) {
                        m.unmatch_left(u);
                    }
                }
                m
            });
            let m = max_matching(&g, start.as_ref());
            self.rejections = 0;
            let critical = critical_set_from(&g, &m);
            self.trace.push(TraceEvent::Phase2Round { critical: critical.clone() });
            if critical.is_empty() {
                break m;
            }
            for &u in &critical {
                let mut rejected = Vec::new();
                for i in 0..self.man_edges[u].len() {
                    let e = self.man_edges[u][i];
                    if self.status[e] == EdgeStatus::Active {
                        self.reject(e);
                        rejected.push(self.edges[e]);
                    }
                }
                self.trace.push(TraceEvent::RejectCritical { man: u, edges: rejected });
            }
            self.strong_reject();
            warm = Some(m);
        };
        let ever_active_women: Vec<usize> = (0..self.ever_active.len()).filter(|&w| self.ever_active[w]).collect();
        let covers = ever_active_women.iter().all(|&w| final_matching.right[w].is_some());
        let matching = covers.then(|| {
            Matching::new(final_matching.pairs().filter(|&(_, w)| w < self.n_women))
                .expect("a bipartite matching is a matching")
        });
        StrongOutcome { matching, trace: self.trace, ever_active_women }
    }
}

/// Strongly stable matching of a ties x asymmetric instance, or `None` when
/// none exists.
pub fn solve_strong(inst: &Instance) -> Result<StrongOutcome, SolveError> {
    Ok(StrongState::new(inst)?.run())
}

/// Every man's list with a dummy appended as a strictly-last singleton tie.
/// Dummy `n_women + u` is named `dummy:<man>` and ranks nobody.
pub fn add_dummies(inst: &Instance) -> Result<Instance, SolveError> {
    let (men_max, women_max) = solver_limits(StabilityNotion::Strong);
    gate("strong", inst.classify_sides(), men_max, women_max)?;
    let n_women = inst.n_women();
    let mut women = inst.women().to_vec();
    women.extend((0..inst.n_men()).map(|u| woman_label(inst, n_women + u)));
    let mut edges = inst.edges().to_vec();
    edges.extend((0..inst.n_men()).map(|u| (u, n_women + u)));
    let mut out = Instance::new(inst.men().to_vec(), women, edges).expect("dummy names are fresh");
    for u in 0..inst.n_men() {
        let rel = inst.man_relation(u);
        let mut ext = Relation::empty(rel.universe().iter().copied().chain([n_women + u]));
        for (a, b, v) in rel.entries() {
            ext.set(a, b, v);
        }
        for &a in rel.universe() {
            ext.set(a, n_women + u, RelationValue::StrictPref);
        }
        out.set_man_relation(u, ext).expect("universe is the extended neighborhood");
    }
    for w in 0..n_women {
        out.set_woman_relation(w, inst.woman_relation(w).clone()).expect("unchanged neighborhood");
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::parse_instance;
    use crate::stability::find_blocking;

    fn two_by_two() -> Instance {
        parse_instance(
            r#"{"men":["u1","u2"],"women":["w1","w2"],
            "edges":[["u1","w1"],["u1","w2"],["u2","w1"],["u2","w2"]],
            "prefs":{"u2":[["w1","w2","<"]],"w1":[["u2","u1","<"]]}}"#,
        )
        .unwrap()
    }

    #[test]
    fn two_by_two_solution() {
        let i = two_by_two();
        let out = solve_strong(&i).unwrap();
        let m = out.matching.unwrap();
        assert_eq!(m.pairs(), &[(0, 1), (1, 0)]);
        assert_eq!(find_blocking(StabilityNotion::Strong, &i, &m).unwrap(), None);
    }

    #[test]
    fn cyclic_woman_has_none() {
        let i = parse_instance(
            r#"{"men":["u1","u2","u3"],"women":["w"],"edges":[["u1","w"],["u2","w"],["u3","w"]],
            "prefs":{"w":[["u1","u2","<"],["u2","u3","<"],["u3","u1","<"]]}}"#,
        )
        .unwrap();
        assert!(solve_strong(&i).unwrap().matching.is_none());
    }

    #[test]
    fn single_edge() {
        let i = Instance::with_counts(1, 1, [(0, 0)]).unwrap();
        assert_eq!(solve_strong(&i).unwrap().matching.unwrap().pairs(), &[(0, 0)]);
    }

    #[test]
    fn dummies_extend_lists() {
        let i = two_by_two();
        let d = add_dummies(&i).unwrap();
        assert_eq!(d.n_women(), 4);
        assert_eq!(d.edges().len(), 6);
        let ties = d.man_relation(0).ties_decomposition().unwrap().blocks;
        assert_eq!(ties, vec![vec![0, 1], vec![2]]);
        assert!(d.woman_relation(2).len() == 1 && d.woman_relation(2).entries().is_empty());
    }

    #[test]
    fn sole_active_edge_rejects_incomparable_rivals() {
        // u1 and u2 both propose to w, who cannot tell them apart
        let i = Instance::with_counts(2, 1, [(0, 0), (1, 0)]).unwrap();
        let mut s = StrongState::new(&i).unwrap();
        s.propose_next_tie(0);
        s.propose_next_tie(1);
        s.reject_cascade([0]);
        assert_eq!(s.status(0, 0), Some(EdgeStatus::Rejected));
        assert_eq!(s.status(1, 0), Some(EdgeStatus::Rejected));
        assert!(s.trace().iter().any(|e| matches!(e, TraceEvent::RejectIncomparable { cause: 0, .. })));
    }

    #[test]
    fn two_active_edges_trigger_nothing() {
        // u1 ties {w1, w2}; u2 also on w1, incomparable there
        let i = Instance::with_counts(2, 2, [(0, 0), (0, 1), (1, 0)]).unwrap();
        let mut s = StrongState::new(&i).unwrap();
        s.propose_next_tie(0);
        s.reject_cascade([0]);
        assert_eq!(s.status(0, 0), Some(EdgeStatus::Active));
        assert_eq!(s.status(1, 0), Some(EdgeStatus::Inactive));
    }

    #[test]
    fn empty_cascade_changes_nothing() {
        let i = two_by_two();
        let mut s = StrongState::new(&i).unwrap();
        s.propose_next_tie(0);
        let before = s.clone();
        s.reject_cascade([]);
        assert_eq!(s.status, before.status);
        assert_eq!(s.trace, before.trace);
    }

    #[test]
    fn rejected_edge_can_carry_a_proposal_without_activating() {
        // w prefers u2; u1's edge is rejected before he proposes along it
        let i = parse_instance(
            r#"{"men":["u1","u2"],"women":["w"],"edges":[["u1","w"],["u2","w"]],
            "prefs":{"w":[["u2","u1","<"]]}}"#,
        )
        .unwrap();
        let mut s = StrongState::new(&i).unwrap();
        let e = s.propose_next_tie(1).unwrap();
        s.reject_worse(e[0]);
        assert_eq!(s.status(0, 0), Some(EdgeStatus::Rejected));
        s.propose_next_tie(0);
        assert!(s.has_proposal(0, 0));
        assert_eq!(s.status(0, 0), Some(EdgeStatus::Rejected));
        let out = solve_strong(&i).unwrap();
        assert_eq!(out.matching.unwrap().pairs(), &[(1, 0)]);
    }

    #[test]
    fn trace_renders_dummy_names() {
        let i = Instance::with_counts(2, 1, [(0, 0), (1, 0)]).unwrap();
        let out = solve_strong(&i).unwrap();
        // w cannot choose between two indifferent men, so no strongly stable matching
        assert!(out.matching.is_none());
        let text: Vec<String> = out.trace.iter().map(|e| e.to_json(&i).to_string()).collect();
        assert!(text.iter().any(|t| t.contains("dummy:m0")));
    }

    #[test]
    fn poset_men_are_gated() {
        let i = parse_instance(
            r#"{"men":["u"],"women":["a","b","c"],"edges":[["u","a"],["u","b"],["u","c"]],
            "prefs":{"u":[["a","b","<"]]}}"#,
        )
        .unwrap();
        assert!(matches!(solve_strong(&i), Err(SolveError::ClassGateViolation { .. })));
    }
}
