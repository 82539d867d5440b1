//! Stable matching instances built from (2,2)-E3-SAT formulas: one for weak
//! stability (strict x asymmetric) and one for super stability (acyclic x
//! acyclic). The formula is satisfiable iff the instance has a stable
//! matching of the matching notion.
//!
//! Each variable is a 4-cycle t - x - f - nx, each clause a K3,3 between
//! u1..u3 and w1..w3, and u_k is joined to the literal vertex (x or nx) of
//! the clause's k-th literal.

use thiserror::Error;

use super::formula::{validate_22e3, Formula, FormulaError, Literal};
use crate::instance::{Instance, Matching};
use crate::prefs::{Relation, RelationValue};
use crate::stability::StabilityNotion;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GadgetError {
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error("no gadget for {0} stability; use weak or super")]
    UnsupportedNotion(StabilityNotion),
    #[error("matching is not of the form a stable gadget matching takes: {0}")]
    MalformedStableMatching(String),
}

/// Vertex ids of one variable gadget (men t, f; women x, nx).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VariableVertices {
    pub t: usize,
    pub f: usize,
    pub x: usize,
    pub nx: usize,
}

/// Vertex ids of one clause gadget (men u, women w).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClauseVertices {
    pub u: [usize; 3],
    pub w: [usize; 3],
}

/// The edge joining a literal occurrence to its variable gadget.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Occurrence {
    pub clause: usize,
    pub position: usize,
    pub literal: Literal,
    pub edge: (usize, usize),
}

#[derive(Debug, Clone)]
pub struct GadgetInstance {
    pub instance: Instance,
    pub formula: Formula,
    pub notion: StabilityNotion,
    pub variables: Vec<VariableVertices>,
    pub clauses: Vec<ClauseVertices>,
    pub occurrences: Vec<Occurrence>,
}

pub fn build_weak_gadget(f: &Formula) -> Result<GadgetInstance, GadgetError> {
    build_gadget(f, StabilityNotion::Weak)
}

pub fn build_super_gadget(f: &Formula) -> Result<GadgetInstance, GadgetError> {
    build_gadget(f, StabilityNotion::Super)
}

pub fn build_gadget(f: &Formula, notion: StabilityNotion) -> Result<GadgetInstance, GadgetError> {
    if notion == StabilityNotion::Strong {
        return Err(GadgetError::UnsupportedNotion(notion));
    }
    let violations = validate_22e3(f);
    if !violations.is_empty() {
        return Err(FormulaError::NotTwoTwoE3(violations).into());
    }
    let n = f.num_vars;
    let mut men = Vec::new();
    let mut women = Vec::new();
    let mut variables = Vec::with_capacity(n);
    for i in 1..=n {
        variables.push(VariableVertices { t: men.len(), f: men.len() + 1, x: women.len(), nx: women.len() + 1 });
        men.extend([format!("t{i}"), format!("f{i}")]);
        women.extend([format!("x{i}"), format!("nx{i}")]);
    }
    let mut clauses = Vec::with_capacity(f.clauses.len());
    for j in 1..=f.clauses.len() {
        let (u0, w0) = (men.len(), women.len());
        clauses.push(ClauseVertices { u: [u0, u0 + 1, u0 + 2], w: [w0, w0 + 1, w0 + 2] });
        men.extend((1..=3).map(|k| format!("c{j}u{k}")));
        women.extend((1..=3).map(|k| format!("c{j}w{k}")));
    }
    let literal_vertex = |l: Literal| if l.positive { variables[l.var].x } else { variables[l.var].nx };
    let mut edges = Vec::new();
    for v in &variables {
        edges.extend([(v.t, v.x), (v.t, v.nx), (v.f, v.x), (v.f, v.nx)]);
    }
    let mut occurrences = Vec::new();
    for (j, (c, clause)) in clauses.iter().zip(&f.clauses).enumerate() {
        for &u in &c.u {
            edges.extend(c.w.iter().map(|&w| (u, w)));
        }
        for (k, &literal) in clause.iter().enumerate() {
            let edge = (c.u[k], literal_vertex(literal));
            edges.push(edge);
            occurrences.push(Occurrence { clause: j, position: k, literal, edge });
        }
    }
    let mut inst = Instance::new(men, women, edges).expect("gadget vertices and edges are distinct");

    use RelationValue::StrictPref as P;
    let chain = |order: &[usize]| -> Vec<(usize, usize)> {
        let mut pairs = Vec::new();
        for a in 0..order.len() {
            for b in a + 1..order.len() {
                pairs.push((order[a], order[b]));
            }
        }
        pairs
    };
    let set_all = |rel: &mut Relation, pairs: &[(usize, usize)]| {
        for &(a, b) in pairs {
            rel.set(a, b, P);
        }
    };
    for v in &variables {
        inst.set_man_relation(v.t, Relation::strict_order(&[v.x, v.nx])).expect("t sees x and nx");
        inst.set_man_relation(v.f, Relation::strict_order(&[v.nx, v.x])).expect("f sees x and nx");
        for (lit, first, second) in [(v.x, v.f, v.t), (v.nx, v.t, v.f)] {
            // x: f < t; nx: t < f. Then t < u always, and u < f (weak) or
            // u ~ f (super).
            let mut rel = Relation::empty(inst.woman_neighbors(lit).iter().copied());
            rel.set(first, second, P);
            let us: Vec<usize> = rel.universe().iter().copied().filter(|&a| a != v.t && a != v.f).collect();
            for &u in &us {
                rel.set(v.t, u, P);
                if notion == StabilityNotion::Weak {
                    rel.set(u, v.f, P);
                }
            }
            inst.set_woman_relation(lit, rel).expect("neighborhood universe");
        }
    }
    for (c, occ) in clauses.iter().zip(occurrences.chunks(3)) {
        let [w1, w2, w3] = c.w;
        for k in 0..3 {
            let lit = occ[k].edge.1;
            let rel = match notion {
                StabilityNotion::Weak => Relation::strict_order(&[w3, w2, lit, w1]),
                _ => {
                    let ws = [[w1, w3, w2], [w3, w2, w1], [w2, w1, w3]][k];
                    let mut rel = Relation::empty([w1, w2, w3, lit]);
                    set_all(&mut rel, &chain(&ws));
                    set_all(&mut rel, &[(w1, lit), (w2, lit)]);
                    rel
                }
            };
            inst.set_man_relation(c.u[k], rel).expect("u sees the clause women and its literal");
        }
        if notion == StabilityNotion::Super {
            let [u1, u2, u3] = c.u;
            for (w, order) in [(w1, [u2, u3, u1]), (w2, [u1, u2, u3]), (w3, [u3, u1, u2])] {
                inst.set_woman_relation(w, Relation::strict_order(&order)).expect("w sees the clause men");
            }
        }
    }
    Ok(GadgetInstance { instance: inst, formula: f.clone(), notion, variables, clauses, occurrences })
}

impl GadgetInstance {
    /// The matching built from a satisfying assignment. Variables contribute
    /// `{t x, f nx}` when true and `{f x, t nx}` when false. In each clause
    /// the first true literal's u goes to w1 (weak) or w3 (super) and the
    /// rest of the clause is matched perfectly inside the gadget.
    pub fn assignment_to_matching(&self, assignment: &[bool]) -> Result<Matching, GadgetError> {
        let f = &self.formula;
        if assignment.len() != f.num_vars {
            return Err(FormulaError::AssignmentLength { expected: f.num_vars, got: assignment.len() }.into());
        }
        if let Some(j) = f.first_unsatisfied(assignment) {
            return Err(FormulaError::AssignmentNotSatisfying(j + 1).into());
        }
        let mut pairs = Vec::new();
        for (v, &value) in self.variables.iter().zip(assignment) {
            if value {
                pairs.extend([(v.t, v.x), (v.f, v.nx)]);
            } else {
                pairs.extend([(v.f, v.x), (v.t, v.nx)]);
            }
        }
        for (j, c) in self.clauses.iter().enumerate() {
            let k = f.first_true_literal(j, assignment).expect("assignment satisfies every clause");
            let partner: [usize; 3] = match self.notion {
                StabilityNotion::Weak => {
                    // k takes w1; the others pair with w2, w3 in order
                    let mut rest = [1, 2].into_iter();
                    std::array::from_fn(|i| if i == k { 0 } else { rest.next().expect("two left") })
                }
                _ => [[2, 1, 0], [0, 2, 1], [1, 0, 2]][k],
            };
            pairs.extend((0..3).map(|i| (c.u[i], c.w[partner[i]])));
        }
        Ok(Matching::new(pairs).expect("gadget matchings are vertex-disjoint"))
    }

    /// Reads the truth assignment off a stable matching: a variable is true
    /// iff `t x` is matched.
    pub fn extract_assignment(&self, m: &Matching) -> Result<Vec<bool>, GadgetError> {
        let inst = &self.instance;
        if let Some(o) = self.occurrences.iter().find(|o| m.contains(o.edge.0, o.edge.1)) {
            return Err(GadgetError::MalformedStableMatching(format!(
                "interconnecting edge ({}, {}) is matched",
                inst.man_name(o.edge.0),
                inst.woman_name(o.edge.1)
            )));
        }
        self.variables
            .iter()
            .enumerate()
            .map(|(i, v)| {
                if m.contains(v.t, v.x) && m.contains(v.f, v.nx) {
                    Ok(true)
                } else if m.contains(v.f, v.x) && m.contains(v.t, v.nx) {
                    Ok(false)
                } else {
                    Err(GadgetError::MalformedStableMatching(format!(
                        "variable gadget {} is not perfectly matched",
                        i + 1
                    )))
                }
            })
            .collect()
    }

    /// Vertex maps as a JSON document, by agent name.
    pub fn provenance(&self) -> serde_json::Value {
        let inst = &self.instance;
        let man = |u: usize| inst.man_name(u).to_string();
        let woman = |w: usize| inst.woman_name(w).to_string();
        serde_json::json!({
            "notion": self.notion,
            "num_vars": self.formula.num_vars,
            "variables": self.variables.iter().enumerate().map(|(i, v)| serde_json::json!({
                "var": i + 1, "t": man(v.t), "f": man(v.f), "x": woman(v.x), "nx": woman(v.nx),
            })).collect::<Vec<_>>(),
            "clauses": self.clauses.iter().enumerate().map(|(j, c)| serde_json::json!({
                "clause": j + 1,
                "u": c.u.iter().map(|&u| man(u)).collect::<Vec<_>>(),
                "w": c.w.iter().map(|&w| woman(w)).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
            "occurrences": self.occurrences.iter().map(|o| serde_json::json!({
                "clause": o.clause + 1,
                "position": o.position + 1,
                "literal": o.literal.to_dimacs(),
                "edge": [man(o.edge.0), woman(o.edge.1)],
            })).collect::<Vec<_>>(),
        })
    }
}
