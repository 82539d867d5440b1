//! Weakly stable matchings for acyclic preferences on both sides.
//!
//! Every acyclic relation has a linear extension. Extending all relations can
//! only add blocking edges, so a stable matching of the extended strict
//! instance (one run of man-proposing deferred acceptance) is weakly stable in
//! the original.

use std::collections::BTreeSet;

use crate::frontier::{gate, solver_limits, SolveError};
use crate::instance::{Instance, Matching};
use crate::prefs::Relation;
use crate::stability::StabilityNotion;

/// Instance with every relation replaced by a total strict order.
#[derive(Debug, Clone)]
pub struct StrictInstance {
    inst: Instance,
    men_lists: Vec<Vec<usize>>,
    women_lists: Vec<Vec<usize>>,
}

impl StrictInstance {
    /// Man `u`'s ranked list, best first.
    pub fn man_list(&self, u: usize) -> &[usize] {
        &self.men_lists[u]
    }

    pub fn woman_list(&self, w: usize) -> &[usize] {
        &self.women_lists[w]
    }

    pub fn as_instance(&self) -> &Instance {
        &self.inst
    }
}

pub fn extend_to_strict(inst: &Instance) -> Result<StrictInstance, SolveError> {
    let (men_max, women_max) = solver_limits(StabilityNotion::Weak);
    gate("weak", inst.classify_sides(), men_max, women_max)?;
    let extend = |rel: &Relation| rel.linear_extension().expect("acyclic relations have linear extensions");
    let men_lists: Vec<Vec<usize>> = (0..inst.n_men()).map(|u| extend(inst.man_relation(u))).collect();
    let women_lists: Vec<Vec<usize>> = (0..inst.n_women()).map(|w| extend(inst.woman_relation(w))).collect();
    let mut strict = inst.clone();
    for (u, list) in men_lists.iter().enumerate() {
        strict.set_man_relation(u, Relation::strict_order(list)).expect("same universe");
    }
    for (w, list) in women_lists.iter().enumerate() {
        strict.set_woman_relation(w, Relation::strict_order(list)).expect("same universe");
    }
    Ok(StrictInstance { inst: strict, men_lists, women_lists })
}

/// Man-proposing deferred acceptance on the strict extension. The lowest
/// indexed free man proposes next.
pub fn solve_weak(inst: &Instance) -> Result<Matching, SolveError> {
    let strict = extend_to_strict(inst)?;
    Ok(deferred_acceptance(&strict).0)
}

/// Returns the stable matching and the number of proposals made.
pub fn deferred_acceptance(strict: &StrictInstance) -> (Matching, usize) {
    let n_men = strict.men_lists.len();
    let n_women = strict.women_lists.len();
    let mut rank = vec![Vec::new(); n_women];
    for (w, list) in strict.women_lists.iter().enumerate() {
        let mut r = vec![usize::MAX; n_men];
        for (k, &u) in list.iter().enumerate() {
            r[u] = k;
        }
        rank[w] = r;
    }
    let mut next = vec![0usize; n_men];
    let mut holds: Vec<Option<usize>> = vec![None; n_women];
    let mut free: BTreeSet<usize> = (0..n_men).filter(|&u| !strict.men_lists[u].is_empty()).collect();
    let mut proposals = 0;
    while let Some(u) = free.pop_first() {
        let Some(&w) = strict.men_lists[u].get(next[u]) else {
            continue;
        };
        next[u] += 1;
        proposals += 1;
        match holds[w] {
            None => holds[w] = Some(u),
            Some(held) if rank[w][u] < rank[w][held] => {
                holds[w] = Some(u);
                free.insert(held);
            }
            Some(_) => {
                free.insert(u);
            }
        }
    }
    let m = Matching::new(holds.iter().enumerate().filter_map(|(w, u)| u.map(|u| (u, w))))
        .expect("each man is held by at most one woman");
    (m, proposals)
}
