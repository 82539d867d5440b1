//! (2,2)-E3-SAT and the two reductions from it.

pub mod formula;
pub mod gadget;

pub use formula::{
    generate_22e3, parse_dimacs, sat_brute, validate_22e3, Clause, Formula, FormulaError, Literal, Violation,
};
pub use gadget::{build_gadget, build_super_gadget, build_weak_gadget, GadgetError, GadgetInstance};
