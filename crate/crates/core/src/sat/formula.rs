//! 3-CNF formulas, DIMACS I/O, the (2,2)-E3-SAT occurrence profile and a
//! brute-force solver.

use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Variable `var` (0-based) or its negation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub var: usize,
    pub positive: bool,
}

impl Literal {
    pub fn pos(var: usize) -> Self {
        Literal { var, positive: true }
    }

    pub fn neg(var: usize) -> Self {
        Literal { var, positive: false }
    }

    /// DIMACS form: 1-based, negative when negated.
    pub fn to_dimacs(self) -> i64 {
        let v = self.var as i64 + 1;
        if self.positive {
            v
        } else {
            -v
        }
    }

    pub fn from_dimacs(lit: i64) -> Option<Self> {
        (lit != 0).then(|| Literal { var: lit.unsigned_abs() as usize - 1, positive: lit > 0 })
    }

    pub fn eval(self, assignment: &[bool]) -> bool {
        assignment[self.var] == self.positive
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

pub type Clause = [Literal; 3];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Formula {
    pub num_vars: usize,
    pub clauses: Vec<Clause>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("clause {clause} has {len} literals, expected 3")]
    ClauseArity { clause: usize, len: usize },
    #[error("(2,2)-E3-SAT needs a positive multiple of 3 variables, got {0}")]
    InfeasibleN(usize),
    #[error("{n} variables is above the brute-force limit of {max}")]
    SizeGuard { n: usize, max: usize },
    #[error("not a (2,2)-E3-SAT formula: {}", describe(.0))]
    NotTwoTwoE3(Vec<Violation>),
    #[error("the assignment does not satisfy clause {0}")]
    AssignmentNotSatisfying(usize),
    #[error("assignment has {got} values for {expected} variables")]
    AssignmentLength { expected: usize, got: usize },
}

fn describe(v: &[Violation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

/// Why a formula is not (2,2)-E3-SAT.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// Four occurrences per variable and three per clause force `3m = 4n`.
    CountMismatch {
        vars: usize,
        clauses: usize,
    },
    Profile {
        var: usize,
        positive: usize,
        negative: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::CountMismatch { vars, clauses } => {
                write!(f, "{clauses} clauses cannot hold 4 occurrences of each of {vars} variables")
            }
            Violation::Profile { var, positive, negative } => {
                write!(f, "variable {} occurs {positive} times positively and {negative} times negatively", var + 1)
            }
        }
    }
}

impl Formula {
    pub fn new(num_vars: usize, clauses: Vec<Clause>) -> Self {
        Formula { num_vars, clauses }
    }

    pub fn satisfies(&self, assignment: &[bool]) -> bool {
        self.first_unsatisfied(assignment).is_none()
    }

    pub fn first_unsatisfied(&self, assignment: &[bool]) -> Option<usize> {
        self.clauses.iter().position(|c| !c.iter().any(|l| l.eval(assignment)))
    }

    /// Position of the first true literal of clause `j`.
    pub fn first_true_literal(&self, j: usize, assignment: &[bool]) -> Option<usize> {
        self.clauses[j].iter().position(|l| l.eval(assignment))
    }

    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.num_vars, self.clauses.len());
        for c in &self.clauses {
            out.push_str(&format!("{} {} {} 0\n", c[0], c[1], c[2]));
        }
        out
    }
}

/// Reads the `p cnf n m` subset of DIMACS. Comment lines start with `c`;
/// a clause may span lines and ends with `0`.
pub fn parse_dimacs(text: &str) -> Result<Formula, FormulaError> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut current: Vec<Literal> = Vec::new();
    let syntax = |line: usize, message: String| FormulaError::Syntax { line, message };
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('c') {
            continue;
        }
        if trimmed.starts_with('%') {
            break;
        }
        if trimmed.starts_with('p') {
            if header.is_some() {
                return Err(syntax(line, "second problem line".into()));
            }
            let parts: Vec<&str> = trimmed.split_whitespace().collect();
            match parts.as_slice() {
                ["p", "cnf", n, m] => {
                    let n = n.parse().map_err(|_| syntax(line, format!("bad variable count `{n}`")))?;
                    let m = m.parse().map_err(|_| syntax(line, format!("bad clause count `{m}`")))?;
                    header = Some((n, m));
                }
                _ => return Err(syntax(line, "expected `p cnf <vars> <clauses>`".into())),
            }
            continue;
        }
        let (n, _) = header.ok_or_else(|| syntax(line, "clause before the problem line".into()))?;
        for tok in trimmed.split_whitespace() {
            let lit: i64 = tok.parse().map_err(|_| syntax(line, format!("bad literal `{tok}`")))?;
            match Literal::from_dimacs(lit) {
                None => {
                    if current.len() != 3 {
                        return Err(FormulaError::ClauseArity { clause: clauses.len() + 1, len: current.len() });
                    }
                    clauses.push([current[0], current[1], current[2]]);
                    current.clear();
                }
                Some(l) if l.var >= n => {
                    return Err(syntax(line, format!("literal {lit} exceeds the {n} declared variables")))
                }
                Some(l) => current.push(l),
            }
        }
    }
    let (n, m) = header.ok_or_else(|| syntax(0, "missing problem line".into()))?;
    if !current.is_empty() {
        return Err(syntax(text.lines().count(), "last clause is not terminated by 0".into()));
    }
    if clauses.len() != m {
        return Err(syntax(0, format!("problem line declares {m} clauses, found {}", clauses.len())));
    }
    Ok(Formula::new(n, clauses))
}

/// Empty iff every variable occurs exactly twice positively and twice
/// negatively.
pub fn validate_22e3(f: &Formula) -> Vec<Violation> {
    let mut out = Vec::new();
    if 3 * f.clauses.len() != 4 * f.num_vars {
        out.push(Violation::CountMismatch { vars: f.num_vars, clauses: f.clauses.len() });
    }
    let mut counts = vec![(0usize, 0usize); f.num_vars];
    for l in f.clauses.iter().flatten() {
        if l.positive {
            counts[l.var].0 += 1;
        } else {
            counts[l.var].1 += 1;
        }
    }
    for (var, &(positive, negative)) in counts.iter().enumerate() {
        if (positive, negative) != (2, 2) {
            out.push(Violation::Profile { var, positive, negative });
        }
    }
    out
}

/// Random (2,2)-E3-SAT formula with `4n/3` clauses and no variable twice in
/// a clause. Deterministic in `seed`.
pub fn generate_22e3(n: usize, seed: u64) -> Result<Formula, FormulaError> {
    if n < 3 || !n.is_multiple_of(3) {
        return Err(FormulaError::InfeasibleN(n));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut slots: Vec<Literal> =
        (0..n).flat_map(|v| [Literal::pos(v), Literal::pos(v), Literal::neg(v), Literal::neg(v)]).collect();
    let repeats = |slots: &[Literal], j: usize| {
        let c = &slots[3 * j..3 * j + 3];
        c[0].var == c[1].var || c[0].var == c[2].var || c[1].var == c[2].var
    };
    let m = slots.len() / 3;
    loop {
        slots.shuffle(&mut rng);
        // move literals out of bad clauses by swaps that fix both sides
        let mut budget = 50 * slots.len();
        while let Some(j) = (0..m).find(|&j| repeats(&slots, j)) {
            if budget == 0 {
                break;
            }
            budget -= 1;
            let a = 3 * j + rng.random_range(0..3);
            let b = rng.random_range(0..slots.len());
            if b / 3 == j {
                continue;
            }
            slots.swap(a, b);
            if repeats(&slots, b / 3) {
                slots.swap(a, b);
            }
        }
        if (0..m).all(|j| !repeats(&slots, j)) {
            let clauses = slots.chunks(3).map(|c| [c[0], c[1], c[2]]).collect();
            return Ok(Formula::new(n, clauses));
        }
    }
}

/// Largest formula [`sat_brute`] accepts.
pub const BRUTE_MAX_VARS: usize = 30;

/// Lexicographically first satisfying assignment (variable 1 most
/// significant, false before true), or `None`.
pub fn sat_brute(f: &Formula) -> Result<Option<Vec<bool>>, FormulaError> {
    if f.num_vars > BRUTE_MAX_VARS {
        return Err(FormulaError::SizeGuard { n: f.num_vars, max: BRUTE_MAX_VARS });
    }
    // each clause is checked once its last variable is set
    let mut closing = vec![Vec::new(); f.num_vars];
    for c in &f.clauses {
        let last = c.iter().map(|l| l.var).max().expect("three literals");
        closing[last].push(*c);
    }
    fn go(k: usize, a: &mut Vec<bool>, closing: &[Vec<Clause>]) -> bool {
        if k == closing.len() {
            return true;
        }
        for value in [false, true] {
            a[k] = value;
            if closing[k].iter().all(|c| c.iter().any(|l| l.eval(a))) && go(k + 1, a, closing) {
                return true;
            }
        }
        false
    }
    let mut a = vec![false; f.num_vars];
    Ok(go(0, &mut a, &closing).then_some(a))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_minimal() {
        let f = parse_dimacs("p cnf 1 1\n1 -1 1 0\n").unwrap();
        assert_eq!(f.num_vars, 1);
        assert_eq!(f.clauses, vec![[Literal::pos(0), Literal::neg(0), Literal::pos(0)]]);
    }

    #[test]
    fn two_literals_is_an_arity_error() {
        assert_eq!(parse_dimacs("p cnf 2 1\n1 2 0\n"), Err(FormulaError::ClauseArity { clause: 1, len: 2 }));
    }

    #[test]
    fn syntax_errors() {
        assert!(matches!(parse_dimacs("1 2 3 0\n"), Err(FormulaError::Syntax { .. })));
        assert!(matches!(parse_dimacs("p cnf 2 1\n1 2 3 0\n"), Err(FormulaError::Syntax { .. })));
        assert!(matches!(parse_dimacs("p cnf 3 2\n1 2 3 0\n"), Err(FormulaError::Syntax { .. })));
        assert!(matches!(parse_dimacs("p cnf 3 1\n1 x 3 0\n"), Err(FormulaError::Syntax { .. })));
    }

    #[test]
    fn comments_and_split_clauses() {
        let f = parse_dimacs("c hello\np cnf 3 1\n1 -2\n3 0\n").unwrap();
        assert_eq!(f.clauses.len(), 1);
    }

    #[test]
    fn dimacs_round_trip() {
        let f = generate_22e3(6, 1).unwrap();
        assert_eq!(parse_dimacs(&f.to_dimacs()).unwrap(), f);
    }

    #[test]
    fn generated_formulas_are_valid() {
        for seed in 0..20 {
            for n in [3, 6, 9, 30] {
                let f = generate_22e3(n, seed).unwrap();
                assert_eq!(f.clauses.len(), 4 * n / 3);
                assert!(validate_22e3(&f).is_empty());
                for c in &f.clauses {
                    assert!(c[0].var != c[1].var && c[0].var != c[2].var && c[1].var != c[2].var);
                }
            }
        }
        assert_eq!(generate_22e3(9, 5), generate_22e3(9, 5));
    }

    #[test]
    fn infeasible_sizes() {
        assert_eq!(generate_22e3(4, 0), Err(FormulaError::InfeasibleN(4)));
        assert_eq!(generate_22e3(0, 0), Err(FormulaError::InfeasibleN(0)));
        let one = Formula::new(1, vec![[Literal::pos(0), Literal::pos(0), Literal::neg(0)]]);
        assert!(validate_22e3(&one).contains(&Violation::CountMismatch { vars: 1, clauses: 1 }));
    }

    #[test]
    fn unbalanced_profile_is_reported() {
        let mut f = generate_22e3(3, 2).unwrap();
        let l = f.clauses[0][0];
        f.clauses[0][0] = Literal { var: l.var, positive: !l.positive };
        let v = validate_22e3(&f);
        assert_eq!(v.len(), 1);
        assert!(matches!(v[0], Violation::Profile { var, .. } if var == l.var));
    }

    #[test]
    fn brute_force() {
        assert_eq!(sat_brute(&Formula::new(2, vec![])).unwrap(), Some(vec![false, false]));
        let all_signs: Vec<Clause> = (0..8)
            .map(|s: usize| {
                let lit = |v: usize| Literal { var: v, positive: s >> v & 1 == 1 };
                [lit(0), lit(1), lit(2)]
            })
            .collect();
        assert_eq!(sat_brute(&Formula::new(3, all_signs)).unwrap(), None);
        // (x1 or x1 or x2) forces the first solution to set x2
        let f = Formula::new(2, vec![[Literal::pos(0), Literal::pos(0), Literal::pos(1)]]);
        assert_eq!(sat_brute(&f).unwrap(), Some(vec![false, true]));
        assert!(matches!(sat_brute(&Formula::new(31, vec![])), Err(FormulaError::SizeGuard { .. })));
    }

    #[test]
    fn brute_force_agrees_with_enumeration() {
        for seed in 0..30 {
            let f = generate_22e3(6, seed).unwrap();
            let first = (0..1u32 << 6)
                .map(|bits| (0..6).map(|v| bits >> (5 - v) & 1 == 1).collect::<Vec<bool>>())
                .find(|a| f.satisfies(a));
            assert_eq!(sat_brute(&f).unwrap(), first);
        }
    }
}
