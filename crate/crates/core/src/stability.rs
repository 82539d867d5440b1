//! Blocking edges under weak, strong and super stability.
//!
//! Each endpoint of a non-matching edge compares the candidate with its
//! current partner (or with being unmatched, which every neighbor beats).
//! The three notions differ only in which combinations of those two
//! comparisons make the edge block.
//!
//! A declared draw (`||`) is read as "strictly prefers the candidate" in all
//! three predicates. This keeps `||` and `~` interchangeable for weak
//! stability and makes `||` at least as blocking-prone as `~` for the other
//! two; no solver accepts `||` anyway, so it only matters for checking and
//! the oracle.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instance::{Instance, InstanceError, Matching, Partners};
use crate::prefs::{Relation, RelationValue};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StabilityNotion {
    Weak,
    Strong,
    Super,
}

impl StabilityNotion {
    pub const ALL: [StabilityNotion; 3] = [StabilityNotion::Weak, StabilityNotion::Strong, StabilityNotion::Super];

    pub fn name(self) -> &'static str {
        match self {
            StabilityNotion::Weak => "weak",
            StabilityNotion::Strong => "strong",
            StabilityNotion::Super => "super",
        }
    }

    /// Whether an edge whose endpoints see `man_side` and `woman_side`
    /// (candidate versus current partner) blocks under this notion.
    pub fn blocking(self, man_side: RelationValue, woman_side: RelationValue) -> bool {
        let (pu, pw) = (strictly_prefers(man_side), strictly_prefers(woman_side));
        let (nu, nw) = (not_worse(man_side), not_worse(woman_side));
        match self {
            StabilityNotion::Weak => pu && pw,
            StabilityNotion::Strong => (nu && pw) || (pu && nw),
            StabilityNotion::Super => nu && nw,
        }
    }
}

impl fmt::Display for StabilityNotion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StabilityNotion {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        StabilityNotion::ALL
            .into_iter()
            .find(|n| n.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown stability notion `{s}`"))
    }
}

fn strictly_prefers(v: RelationValue) -> bool {
    matches!(v, RelationValue::StrictPref | RelationValue::BothPreferred)
}

fn not_worse(v: RelationValue) -> bool {
    strictly_prefers(v) || v == RelationValue::Incomparable
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StabilityError {
    #[error("({0}, {1}) is not an edge of the instance")]
    EdgeNotInInstance(usize, usize),
    #[error(transparent)]
    InvalidMatching(#[from] InstanceError),
}

/// A non-matching edge that blocks under `notion`, with the two comparisons
/// that made it block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockingWitness {
    pub edge: (usize, usize),
    pub notion: StabilityNotion,
    /// Man's value of (candidate woman, his partner).
    pub man_side: RelationValue,
    /// Woman's value of (candidate man, her partner).
    pub woman_side: RelationValue,
}

impl BlockingWitness {
    pub fn to_json(&self, inst: &Instance) -> serde_json::Value {
        serde_json::json!({
            "edge": [inst.man_name(self.edge.0), inst.woman_name(self.edge.1)],
            "notion": self.notion,
            "man_side": self.man_side.token(),
            "woman_side": self.woman_side.token(),
        })
    }
}

/// How `r`'s owner compares `candidate` with its current partner.
/// Any neighbor beats being unmatched.
pub fn partner_relation(r: &Relation, candidate: usize, current: Option<usize>) -> RelationValue {
    match current {
        None => RelationValue::StrictPref,
        Some(p) => r.compare(candidate, p),
    }
}

/// Side values of edge `(u, w)` against the partners in `p`, or `None` when
/// the edge is itself matched.
pub fn side_values(inst: &Instance, p: &Partners, u: usize, w: usize) -> Option<(RelationValue, RelationValue)> {
    if p.man[u] == Some(w) {
        return None;
    }
    Some((partner_relation(inst.man_relation(u), w, p.man[u]), partner_relation(inst.woman_relation(w), u, p.woman[w])))
}

pub fn blocks(
    notion: StabilityNotion,
    inst: &Instance,
    m: &Matching,
    edge: (usize, usize),
) -> Result<bool, StabilityError> {
    let (u, w) = edge;
    if u >= inst.n_men() || w >= inst.n_women() || !inst.has_edge(u, w) {
        return Err(StabilityError::EdgeNotInInstance(u, w));
    }
    let p = m.partners(inst.n_men(), inst.n_women());
    Ok(side_values(inst, &p, u, w).is_some_and(|(su, sw)| notion.blocking(su, sw)))
}

/// First blocking edge in canonical edge order, if any.
pub fn find_blocking(
    notion: StabilityNotion,
    inst: &Instance,
    m: &Matching,
) -> Result<Option<BlockingWitness>, StabilityError> {
    inst.validate_matching(m)?;
    let p = m.partners(inst.n_men(), inst.n_women());
    Ok(find_blocking_with(notion, inst, &p))
}

pub(crate) fn find_blocking_with(notion: StabilityNotion, inst: &Instance, p: &Partners) -> Option<BlockingWitness> {
    inst.edges().iter().find_map(|&(u, w)| {
        let (su, sw) = side_values(inst, p, u, w)?;
        notion.blocking(su, sw).then_some(BlockingWitness { edge: (u, w), notion, man_side: su, woman_side: sw })
    })
}

pub fn is_stable(notion: StabilityNotion, inst: &Instance, m: &Matching) -> Result<bool, StabilityError> {
    find_blocking(notion, inst, m).map(|w| w.is_none())
}
