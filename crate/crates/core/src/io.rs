//! JSON interchange for instances and matchings.
//!
//! Instance documents look like
//!
//! ```json
//! {"men":["u1"],"women":["w"],"edges":[["u1","w"]],"prefs":{"w":[["u1","u2","<"]]}}
//! ```
//!
//! where `"<"` means the first named neighbor is strictly preferred, and
//! `">"`, `"~"`, `"||"` are the other three relation values. Serialization is
//! canonical: agents and edges in index order, one `"<"`-oriented entry per
//! stored pair, and `prefs` always present.

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::instance::{Agent, Instance, InstanceError, Matching};
use crate::prefs::{Relation, RelationValue};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceDoc {
    men: Vec<String>,
    women: Vec<String>,
    edges: Vec<(String, String)>,
    #[serde(default)]
    prefs: IndexMap<String, Vec<(String, String, String)>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MatchingDoc {
    pairs: Vec<(String, String)>,
}

pub fn parse_instance(text: &str) -> Result<Instance, InstanceError> {
    let doc: InstanceDoc = serde_json::from_str(text).map_err(|e| InstanceError::Syntax(e.to_string()))?;
    let men_of: IndexMap<&str, usize> = doc.men.iter().enumerate().map(|(i, m)| (m.as_str(), i)).collect();
    let women_of: IndexMap<&str, usize> = doc.women.iter().enumerate().map(|(i, w)| (w.as_str(), i)).collect();

    let mut edges = Vec::with_capacity(doc.edges.len());
    for (m, w) in &doc.edges {
        match (men_of.get(m.as_str()), women_of.get(w.as_str())) {
            (Some(&u), Some(&v)) => edges.push((u, v)),
            (None, None) => return Err(InstanceError::UnknownAgent(m.clone())),
            _ if women_of.contains_key(m.as_str()) || men_of.contains_key(w.as_str()) => {
                return Err(InstanceError::NotBipartite(m.clone(), w.clone()))
            }
            (None, _) => return Err(InstanceError::UnknownAgent(m.clone())),
            (_, None) => return Err(InstanceError::UnknownAgent(w.clone())),
        }
    }
    let mut inst = Instance::new(doc.men.clone(), doc.women.clone(), edges)?;

    for (owner, raw) in &doc.prefs {
        let (agent, others) = if let Some(&u) = men_of.get(owner.as_str()) {
            (Agent::Man(u), &women_of)
        } else if let Some(&w) = women_of.get(owner.as_str()) {
            (Agent::Woman(w), &men_of)
        } else {
            return Err(InstanceError::UnknownAgent(owner.clone()));
        };
        let names: Vec<&str> = others.keys().copied().collect();
        let resolve = |id: &str| -> Result<usize, InstanceError> {
            others.get(id).copied().ok_or_else(|| {
                if men_of.contains_key(id) || women_of.contains_key(id) {
                    InstanceError::NonEdgePreference { owner: owner.clone(), other: id.to_string() }
                } else {
                    InstanceError::UnknownAgent(id.to_string())
                }
            })
        };
        let mut comparisons = Vec::with_capacity(raw.len());
        for (a, b, tok) in raw {
            let value = RelationValue::from_token(tok).ok_or_else(|| InstanceError::UnknownToken(tok.clone()))?;
            comparisons.push((resolve(a)?, resolve(b)?, value));
        }
        let universe = inst.relation(agent).universe().to_vec();
        let rel = Relation::from_comparisons(universe, comparisons)
            .map_err(|e| InstanceError::from_relation(owner, e, |i| names[i].to_string()))?;
        match agent {
            Agent::Man(u) => inst.set_man_relation(u, rel)?,
            Agent::Woman(w) => inst.set_woman_relation(w, rel)?,
        }
    }
    Ok(inst)
}

pub fn serialize_instance(inst: &Instance) -> String {
    let edges =
        inst.edges().iter().map(|&(u, w)| (inst.man_name(u).to_string(), inst.woman_name(w).to_string())).collect();
    let mut prefs = IndexMap::new();
    let mut emit = |owner: &str, rel: &Relation, other: &dyn Fn(usize) -> String| {
        let entries: Vec<(String, String, String)> =
            rel.entries().into_iter().map(|(a, b, v)| (other(a), other(b), v.token().to_string())).collect();
        if !entries.is_empty() {
            prefs.insert(owner.to_string(), entries);
        }
    };
    for u in 0..inst.n_men() {
        emit(inst.man_name(u), inst.man_relation(u), &|w| inst.woman_name(w).to_string());
    }
    for w in 0..inst.n_women() {
        emit(inst.woman_name(w), inst.woman_relation(w), &|u| inst.man_name(u).to_string());
    }
    let doc = InstanceDoc { men: inst.men().to_vec(), women: inst.women().to_vec(), edges, prefs };
    let mut out = serde_json::to_string(&doc).expect("instance documents always serialize");
    out.push('\n');
    out
}

/// Parses a matching document against `inst`, checking that every pair is
/// an edge and no agent is used twice.
pub fn parse_matching(text: &str, inst: &Instance) -> Result<Matching, InstanceError> {
    let doc: MatchingDoc = serde_json::from_str(text).map_err(|e| InstanceError::Syntax(e.to_string()))?;
    let mut pairs = Vec::with_capacity(doc.pairs.len());
    for (m, w) in &doc.pairs {
        let u = inst.find_man(m).ok_or_else(|| InstanceError::UnknownAgent(m.clone()))?;
        let v = inst.find_woman(w).ok_or_else(|| InstanceError::UnknownAgent(w.clone()))?;
        if !inst.has_edge(u, v) {
            return Err(InstanceError::NotAnEdge(m.clone(), w.clone()));
        }
        pairs.push((u, v));
    }
    Matching::new(pairs).map_err(|a| InstanceError::DuplicateVertex(inst.agent_name(a).to_string()))
}

/// Named pairs of a matching, as a JSON value.
pub fn matching_json(m: &Matching, inst: &Instance) -> serde_json::Value {
    let pairs: Vec<(String, String)> =
        m.pairs().iter().map(|&(u, w)| (inst.man_name(u).to_string(), inst.woman_name(w).to_string())).collect();
    serde_json::to_value(MatchingDoc { pairs }).expect("matching documents always serialize")
}

pub fn serialize_matching(m: &Matching, inst: &Instance) -> String {
    let mut out = matching_json(m, inst).to_string();
    out.push('\n');
    out
}
