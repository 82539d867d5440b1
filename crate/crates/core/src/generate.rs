//! Seeded random instances with per-side orderedness classes.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::instance::Instance;
use crate::prefs::{OrderClass, Relation, RelationValue};

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorParams {
    pub men_count: usize,
    pub women_count: usize,
    pub edge_density: f64,
    pub men_class: OrderClass,
    pub women_class: OrderClass,
    pub seed: u64,
}

impl GeneratorParams {
    pub fn new(men_count: usize, women_count: usize, edge_density: f64, seed: u64) -> Self {
        GeneratorParams {
            men_count,
            women_count,
            edge_density,
            men_class: OrderClass::Strict,
            women_class: OrderClass::Strict,
            seed,
        }
    }

    pub fn classes(mut self, men: OrderClass, women: OrderClass) -> Self {
        self.men_class = men;
        self.women_class = women;
        self
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.men_count == 0 || self.women_count == 0 {
            return Err("agent counts must be positive".into());
        }
        if !(0.0..=1.0).contains(&self.edge_density) {
            return Err(format!("edge density {} is outside [0, 1]", self.edge_density));
        }
        Ok(())
    }
}

/// Random instance whose relations classify at or below the requested
/// classes. Deterministic in `params.seed`.
///
/// # Panics
/// When `params` fails [`GeneratorParams::validate`].
pub fn generate_instance(params: &GeneratorParams) -> Instance {
    params.validate().unwrap_or_else(|e| panic!("invalid generator parameters: {e}"));
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut edges = Vec::new();
    for u in 0..params.men_count {
        for w in 0..params.women_count {
            if rng.random_bool(params.edge_density) {
                edges.push((u, w));
            }
        }
    }
    let mut inst =
        Instance::with_counts(params.men_count, params.women_count, edges).expect("generated edges are distinct");
    for u in 0..params.men_count {
        let rel = random_relation(inst.man_neighbors(u), params.men_class, &mut rng);
        inst.set_man_relation(u, rel).expect("universe is the neighborhood");
    }
    for w in 0..params.women_count {
        let rel = random_relation(inst.woman_neighbors(w), params.women_class, &mut rng);
        inst.set_woman_relation(w, rel).expect("universe is the neighborhood");
    }
    inst
}

/// Random relation over `universe` of at most the given class.
pub fn random_relation<R: Rng>(universe: &[usize], class: OrderClass, rng: &mut R) -> Relation {
    let mut order = universe.to_vec();
    order.shuffle(rng);
    match class {
        OrderClass::Strict => Relation::strict_order(&order),
        OrderClass::Ties => {
            let mut blocks: Vec<Vec<usize>> = Vec::new();
            for (k, &a) in order.iter().enumerate() {
                if k == 0 || rng.random_bool(0.5) {
                    blocks.push(Vec::new());
                }
                blocks.last_mut().expect("pushed above").push(a);
            }
            Relation::from_ties(&blocks)
        }
        OrderClass::Poset | OrderClass::Acyclic => {
            // arcs only go forward in a random order, so the digraph is a DAG
            let d = order.len();
            let mut arc = vec![vec![false; d]; d];
            for i in 0..d {
                for j in i + 1..d {
                    arc[i][j] = rng.random_bool(0.5);
                }
            }
            if class == OrderClass::Poset {
                for k in 0..d {
                    for i in 0..d {
                        for j in 0..d {
                            if arc[i][k] && arc[k][j] {
                                arc[i][j] = true;
                            }
                        }
                    }
                }
            }
            let mut rel = Relation::empty(universe.iter().copied());
            for i in 0..d {
                for j in i + 1..d {
                    if arc[i][j] {
                        rel.set(order[i], order[j], RelationValue::StrictPref);
                    }
                }
            }
            rel
        }
        OrderClass::Asymmetric | OrderClass::Arbitrary => {
            let options: &[RelationValue] = if class == OrderClass::Asymmetric {
                &[RelationValue::StrictPref, RelationValue::StrictDispref, RelationValue::Incomparable]
            } else {
                &[
                    RelationValue::StrictPref,
                    RelationValue::StrictDispref,
                    RelationValue::Incomparable,
                    RelationValue::BothPreferred,
                ]
            };
            let mut rel = Relation::empty(universe.iter().copied());
            for (i, &a) in universe.iter().enumerate() {
                for &b in &universe[i + 1..] {
                    rel.set(a, b, options[rng.random_range(0..options.len())]);
                }
            }
            rel
        }
    }
}
