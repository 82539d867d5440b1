//! Exhaustive search for stable matchings of small instances, for any
//! notion and any preference class. Used as ground truth.
//!
//! Men are decided one at a time in index order: unmatched first, then each
//! free neighbor in index order. After each decision the edges around the
//! decided man and his neighbors are rechecked, and the branch is cut when
//! one of them blocks whatever the still-undecided men do.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use thiserror::Error;

use crate::bipartite::BipartiteGraph;
use crate::instance::{Agent, Instance, Matching, Partners};
use crate::prefs::RelationValue;
use crate::stability::{find_blocking_with, partner_relation, StabilityNotion};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleLimits {
    pub max_edges: usize,
    pub max_nodes: u64,
    pub time_budget: Duration,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits { max_edges: 128, max_nodes: 50_000_000, time_budget: Duration::from_secs(60) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    /// The stable matchings found, sorted. In existence mode, just one.
    Exists(Vec<Matching>),
    NotExists,
    LimitExceeded,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleAnswer {
    pub verdict: Verdict,
    pub nodes_expanded: u64,
}

impl OracleAnswer {
    pub fn matchings(&self) -> Option<&[Matching]> {
        match &self.verdict {
            Verdict::Exists(ms) => Some(ms),
            _ => None,
        }
    }

    /// `Some(exists)` unless a limit was hit.
    pub fn exists(&self) -> Option<bool> {
        match self.verdict {
            Verdict::Exists(_) => Some(true),
            Verdict::NotExists => Some(false),
            Verdict::LimitExceeded => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("the list of matchings is empty")]
    EmptyList,
    #[error("{what} is {size}, above the limit of {max}")]
    SizeGuard { what: &'static str, size: usize, max: usize },
}

/// All stable matchings under `notion`.
pub fn enumerate_stable(inst: &Instance, notion: StabilityNotion, limits: &OracleLimits) -> OracleAnswer {
    run(inst, notion, limits, false, 1)
}

/// Stops at the first stable matching found.
pub fn exists_stable(inst: &Instance, notion: StabilityNotion, limits: &OracleLimits) -> OracleAnswer {
    run(inst, notion, limits, true, 1)
}

/// [`enumerate_stable`] (or [`exists_stable`] with `first_only`) with the
/// search split over `jobs` worker threads. Enumeration results do not
/// depend on `jobs`.
pub fn search_parallel(
    inst: &Instance,
    notion: StabilityNotion,
    limits: &OracleLimits,
    first_only: bool,
    jobs: usize,
) -> OracleAnswer {
    run(inst, notion, limits, first_only, jobs.max(1))
}

/// Every matching of the instance checked one by one, with no pruning.
/// Only for cross-checking the pruned search on tiny instances.
pub fn enumerate_unpruned(inst: &Instance, notion: StabilityNotion) -> Vec<Matching> {
    fn go(inst: &Instance, notion: StabilityNotion, k: usize, p: &mut Partners, out: &mut Vec<Matching>) {
        if k == inst.n_men() {
            if find_blocking_with(notion, inst, p).is_none() {
                out.push(to_matching(p));
            }
            return;
        }
        go(inst, notion, k + 1, p, out);
        for &w in inst.man_neighbors(k) {
            if p.woman[w].is_none() {
                p.man[k] = Some(w);
                p.woman[w] = Some(k);
                go(inst, notion, k + 1, p, out);
                p.man[k] = None;
                p.woman[w] = None;
            }
        }
    }
    let mut p = Partners { man: vec![None; inst.n_men()], woman: vec![None; inst.n_women()] };
    let mut out = Vec::new();
    go(inst, notion, 0, &mut p, &mut out);
    out.sort();
    out
}

fn to_matching(p: &Partners) -> Matching {
    Matching::new(p.man.iter().enumerate().filter_map(|(u, w)| w.map(|w| (u, w))))
        .expect("partner tables are consistent")
}

struct Shared<'a> {
    inst: &'a Instance,
    notion: StabilityNotion,
    limits: OracleLimits,
    first_only: bool,
    start: Instant,
    nodes: AtomicU64,
    stop: AtomicBool,
    limit_hit: AtomicBool,
}

struct Search<'s, 'a> {
    shared: &'s Shared<'a>,
    p: Partners,
    found: Vec<Matching>,
}

impl<'s, 'a> Search<'s, 'a> {
    fn new(shared: &'s Shared<'a>) -> Self {
        let inst = shared.inst;
        Search {
            shared,
            p: Partners { man: vec![None; inst.n_men()], woman: vec![None; inst.n_women()] },
            found: Vec::new(),
        }
    }

    /// Counts a node; false when the search must stop.
    fn enter(&self) -> bool {
        let s = self.shared;
        if s.stop.load(Ordering::Relaxed) {
            return false;
        }
        let n = s.nodes.fetch_add(1, Ordering::Relaxed) + 1;
        if n > s.limits.max_nodes || (n.is_multiple_of(1024) && s.start.elapsed() > s.limits.time_budget) {
            s.limit_hit.store(true, Ordering::Relaxed);
            s.stop.store(true, Ordering::Relaxed);
            return false;
        }
        true
    }

    /// Choices for man `k`: unmatched, then each free neighbor.
    fn options(&self, k: usize) -> Vec<Option<usize>> {
        let mut opts = vec![None];
        opts.extend(self.shared.inst.man_neighbors(k).iter().filter(|&&w| self.p.woman[w].is_none()).map(|&w| Some(w)));
        opts
    }

    fn assign(&mut self, k: usize, choice: Option<usize>) {
        self.p.man[k] = choice;
        if let Some(w) = choice {
            self.p.woman[w] = Some(k);
        }
    }

    fn unassign(&mut self, k: usize) {
        if let Some(w) = self.p.man[k].take() {
            self.p.woman[w] = None;
        }
    }

    /// Whether `(u, w)` blocks for every completion, men `0..=k` decided.
    fn certainly_blocks(&self, u: usize, w: usize, k: usize) -> bool {
        let inst = self.shared.inst;
        let notion = self.shared.notion;
        if self.p.man[u] == Some(w) {
            return false;
        }
        let su = partner_relation(inst.man_relation(u), w, self.p.man[u]);
        let rel = inst.woman_relation(w);
        match self.p.woman[w] {
            Some(v) => notion.blocking(su, rel.compare(u, v)),
            None => {
                notion.blocking(su, RelationValue::StrictPref)
                    && inst
                        .woman_neighbors(w)
                        .iter()
                        .filter(|&&v| v > k)
                        .all(|&v| notion.blocking(su, rel.compare(u, v)))
            }
        }
    }

    /// Recheck after deciding man `k`.
    fn pruned(&self, k: usize) -> bool {
        let inst = self.shared.inst;
        inst.man_neighbors(k)
            .iter()
            .any(|&w| inst.woman_neighbors(w).iter().take_while(|&&u| u <= k).any(|&u| self.certainly_blocks(u, w, k)))
    }

    fn go(&mut self, k: usize) {
        if !self.enter() {
            return;
        }
        let inst = self.shared.inst;
        if k == inst.n_men() {
            if find_blocking_with(self.shared.notion, inst, &self.p).is_none() {
                self.found.push(to_matching(&self.p));
                if self.shared.first_only {
                    self.shared.stop.store(true, Ordering::Relaxed);
                }
            }
            return;
        }
        for choice in self.options(k) {
            self.assign(k, choice);
            if !self.pruned(k) {
                self.go(k + 1);
            }
            self.unassign(k);
        }
    }

    /// Surviving decision prefixes of men `0..depth`.
    fn prefixes(&mut self, k: usize, depth: usize, out: &mut Vec<Vec<Option<usize>>>) {
        if !self.enter() {
            return;
        }
        if k == depth {
            out.push(self.p.man[..depth].to_vec());
            return;
        }
        for choice in self.options(k) {
            self.assign(k, choice);
            if !self.pruned(k) {
                self.prefixes(k + 1, depth, out);
            }
            self.unassign(k);
        }
    }
}

fn run(inst: &Instance, notion: StabilityNotion, limits: &OracleLimits, first_only: bool, jobs: usize) -> OracleAnswer {
    if inst.edges().len() > limits.max_edges {
        return OracleAnswer { verdict: Verdict::LimitExceeded, nodes_expanded: 0 };
    }
    let shared = Shared {
        inst,
        notion,
        limits: *limits,
        first_only,
        start: Instant::now(),
        nodes: AtomicU64::new(0),
        stop: AtomicBool::new(false),
        limit_hit: AtomicBool::new(false),
    };
    let mut found = if jobs == 1 {
        let mut s = Search::new(&shared);
        s.go(0);
        s.found
    } else {
        parallel(&shared, jobs)
    };
    found.sort();
    let nodes_expanded = shared.nodes.load(Ordering::Relaxed);
    let verdict = if first_only && !found.is_empty() {
        found.truncate(1);
        Verdict::Exists(found)
    } else if shared.limit_hit.load(Ordering::Relaxed) {
        Verdict::LimitExceeded
    } else if found.is_empty() {
        Verdict::NotExists
    } else {
        Verdict::Exists(found)
    };
    OracleAnswer { verdict, nodes_expanded }
}

fn parallel(shared: &Shared<'_>, jobs: usize) -> Vec<Matching> {
    // split on enough leading men to give every worker several subtrees
    let mut depth = 0;
    let mut prefixes = vec![Vec::new()];
    while depth < shared.inst.n_men() && prefixes.len() < 8 * jobs {
        depth += 1;
        prefixes.clear();
        Search::new(shared).prefixes(0, depth, &mut prefixes);
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build().expect("thread pool");
    pool.install(|| {
        prefixes
            .par_iter()
            .flat_map_iter(|prefix| {
                let mut s = Search::new(shared);
                for (k, &choice) in prefix.iter().enumerate() {
                    s.assign(k, choice);
                }
                s.go(prefix.len());
                s.found
            })
            .collect()
    })
}

/// Two matchings that cover different vertex sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RuralWitness {
    pub first: usize,
    pub second: usize,
    /// Covered by exactly one of the two.
    pub vertex: Agent,
}

/// Whether all matchings cover the same vertices. The witness compares the
/// first matching with the first one that differs.
pub fn rural_hospitals(matchings: &[Matching], inst: &Instance) -> Result<(bool, Option<RuralWitness>), OracleError> {
    let first = matchings.first().ok_or(OracleError::EmptyList)?;
    let covered = |m: &Matching| {
        let p = m.partners(inst.n_men(), inst.n_women());
        let men = (0..inst.n_men()).map(move |u| (Agent::Man(u), p.man[u].is_some()));
        let women: Vec<_> = (0..inst.n_women()).map(|w| (Agent::Woman(w), p.woman[w].is_some())).collect();
        men.chain(women).collect::<Vec<_>>()
    };
    let base = covered(first);
    for (j, m) in matchings.iter().enumerate().skip(1) {
        let other = covered(m);
        if let Some(&(vertex, _)) = base.iter().zip(&other).find(|(a, b)| a.1 != b.1).map(|(a, _)| a) {
            return Ok((false, Some(RuralWitness { first: 0, second: j, vertex })));
        }
    }
    Ok((true, None))
}

/// Smallest set of left vertices with maximum deficiency, by trying every
/// subset.
pub fn brute_critical_set(g: &BipartiteGraph) -> Result<Vec<usize>, OracleError> {
    let n = g.n_left();
    if n > 20 {
        return Err(OracleError::SizeGuard { what: "number of men", size: n, max: 20 });
    }
    if g.n_right() > 128 {
        return Err(OracleError::SizeGuard { what: "number of women", size: g.n_right(), max: 128 });
    }
    let adj: Vec<u128> = (0..n).map(|u| g.neighbors(u).iter().fold(0u128, |acc, &w| acc | 1 << w)).collect();
    let mut nbr = vec![0u128; 1 << n];
    let mut best = 0i64;
    let mut meet = 0u32;
    for mask in 1usize..1 << n {
        let low = mask.trailing_zeros() as usize;
        nbr[mask] = nbr[mask & (mask - 1)] | adj[low];
        let def = mask.count_ones() as i64 - nbr[mask].count_ones() as i64;
        if def > best {
            best = def;
            meet = mask as u32;
        } else if def == best && best > 0 {
            meet &= mask as u32;
        }
    }
    // the empty set is the only maximizer when best is 0
    Ok((0..n).filter(|&u| best > 0 && meet >> u & 1 == 1).collect())
}
