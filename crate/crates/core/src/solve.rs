//! One entry point for all three notions: classify, route across the
//! tractability frontier, run the matching solver.

use crate::frontier::{route, Cell, Route, SolveError};
use crate::instance::{Instance, Matching};
use crate::stability::StabilityNotion;
use crate::strong::solve_strong;
use crate::superstable::solve_super;
use crate::weak::solve_weak;

#[derive(Debug, Clone)]
pub struct Solution {
    pub matching: Option<Matching>,
    pub route: Route,
    /// Solver events as JSON, named after the instance that was solved (the
    /// transposed one when `route` is `Transposed`).
    pub trace: Vec<serde_json::Value>,
}

pub fn solve(inst: &Instance, notion: StabilityNotion) -> Result<Solution, SolveError> {
    let (men, women) = inst.classify_sides();
    let r = route(notion, men, women);
    let (matching, trace) = match r {
        Route::Hard => return Err(SolveError::Hard(Cell { notion, men, women })),
        Route::Direct => run(inst, notion)?,
        Route::Transposed => {
            let (m, trace) = run(&inst.transpose(), notion)?;
            let back = m.map(|m| Matching::new(m.pairs().iter().map(|&(w, u)| (u, w))).expect("still a matching"));
            (back, trace)
        }
    };
    Ok(Solution { matching, route: r, trace })
}

fn run(inst: &Instance, notion: StabilityNotion) -> Result<(Option<Matching>, Vec<serde_json::Value>), SolveError> {
    Ok(match notion {
        StabilityNotion::Weak => (Some(solve_weak(inst)?), Vec::new()),
        StabilityNotion::Strong => {
            let out = solve_strong(inst)?;
            (out.matching, out.trace.iter().map(|e| e.to_json(inst)).collect())
        }
        StabilityNotion::Super => {
            let out = solve_super(inst)?;
            (out.matching, out.trace.iter().map(|e| e.to_json(inst)).collect())
        }
    })
}
