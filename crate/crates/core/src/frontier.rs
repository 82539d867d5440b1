//! Which (men class, women class, notion) cells have a polynomial solver
//! here, and how to reach it.

use std::fmt;

use thiserror::Error;

use crate::prefs::OrderClass;
use crate::stability::StabilityNotion;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error(
        "{solver} solver needs men <= {men_max} and women <= {women_max}, \
         but the instance has men = {men}, women = {women}"
    )]
    ClassGateViolation {
        solver: &'static str,
        men: OrderClass,
        women: OrderClass,
        men_max: OrderClass,
        women_max: OrderClass,
    },
    #[error("{0} is NP-complete; no polynomial solver applies")]
    Hard(Cell),
}

pub(crate) fn gate(
    solver: &'static str,
    (men, women): (OrderClass, OrderClass),
    men_max: OrderClass,
    women_max: OrderClass,
) -> Result<(), SolveError> {
    if men <= men_max && women <= women_max {
        Ok(())
    } else {
        Err(SolveError::ClassGateViolation { solver, men, women, men_max, women_max })
    }
}

/// Route to a solver for one complexity cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    /// Run the solver on the instance as given (men propose).
    Direct,
    /// Run the solver on the transposed instance (women propose).
    Transposed,
    /// The cell is NP-complete.
    Hard,
}

/// Classification of a cell, for messages.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cell {
    pub notion: StabilityNotion,
    pub men: OrderClass,
    pub women: OrderClass,
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} stability with {} x {} preferences", self.notion, self.men, self.women)
    }
}

/// Largest classes `(proposing side, other side)` each solver accepts.
pub fn solver_limits(notion: StabilityNotion) -> (OrderClass, OrderClass) {
    match notion {
        StabilityNotion::Weak => (OrderClass::Acyclic, OrderClass::Acyclic),
        StabilityNotion::Strong => (OrderClass::Ties, OrderClass::Asymmetric),
        StabilityNotion::Super => (OrderClass::Poset, OrderClass::Asymmetric),
    }
}

/// Tractability frontier: every polynomial cell is covered by one of the
/// three solvers, possibly with the sides swapped; every other cell is
/// NP-complete.
pub fn route(notion: StabilityNotion, men: OrderClass, women: OrderClass) -> Route {
    let (proposer_max, other_max) = solver_limits(notion);
    if men <= proposer_max && women <= other_max {
        Route::Direct
    } else if women <= proposer_max && men <= other_max {
        Route::Transposed
    } else {
        Route::Hard
    }
}
