//! Stable matchings when agents state pairwise preferences.
//!
//! Each agent compares pairs of neighbors with one of four outcomes:
//! strictly better, strictly worse, incomparable, or both better. Relations
//! are classified from strict lists up to arbitrary relations, and three
//! stability notions (weak, strong, super) are decided by polynomial
//! solvers where possible. An exhaustive oracle covers everything else on
//! small instances, and [`sat`] builds the hardness gadgets.

pub mod bipartite;
pub mod frontier;
pub mod generate;
pub mod instance;
pub mod io;
pub mod oracle;
pub mod prefs;
pub mod sat;
pub mod solve;
pub mod stability;
pub mod strong;
pub mod superstable;
pub mod weak;

pub use bipartite::{critical_set, deficiency, max_matching, BipartiteGraph, DeficiencyReport};
pub use frontier::{route, Cell, Route, SolveError};
pub use generate::{generate_instance, GeneratorParams};
pub use instance::{Agent, Instance, InstanceError, Matching, Side};
pub use io::{parse_instance, parse_matching, serialize_instance, serialize_matching};
pub use oracle::{enumerate_stable, exists_stable, OracleAnswer, OracleLimits, Verdict};
pub use prefs::{OrderClass, Relation, RelationError, RelationValue};
pub use solve::{solve, Solution};
pub use stability::{blocks, find_blocking, is_stable, BlockingWitness, StabilityError, StabilityNotion};
pub use strong::solve_strong;
pub use superstable::solve_super;
pub use weak::solve_weak;
