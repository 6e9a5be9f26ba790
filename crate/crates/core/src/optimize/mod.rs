//! Link-selection solvers, perturbation bounds and the rank-one secular
//! oracle.

mod bounds;
mod exhaustive;
mod greedy;
mod random;
mod relax;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

pub use bounds::{prop1_upper, prop2_bounds, secular_function, secular_lambda2, BoundsReport};
pub use exhaustive::{binomial, exhaustive, DEFAULT_SUBSET_LIMIT};
pub use greedy::{greedy_perturbation, GreedyOptions};
pub use random::random_baseline;
pub use relax::{project_capped_simplex, relax_and_round, RelaxOptions, RelaxedSolution};

use crate::candidates::CandidateLink;
use crate::error::Result;
use crate::graph::{algebraic_connectivity, laplacian, spectrum, Graph};
use crate::scalar::Scalar;

/// Which procedure produced a [`Selection`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Solver {
    Greedy,
    Exhaustive,
    Relax,
    Random,
}

impl fmt::Display for Solver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Solver::Greedy => "greedy",
            Solver::Exhaustive => "exhaustive",
            Solver::Relax => "relax",
            Solver::Random => "random",
        })
    }
}

impl FromStr for Solver {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "greedy" => Ok(Solver::Greedy),
            "exhaustive" => Ok(Solver::Exhaustive),
            "relax" => Ok(Solver::Relax),
            "random" => Ok(Solver::Random),
            other => Err(format!("unknown solver {other:?}")),
        }
    }
}

/// One link addition.
#[derive(Debug, Clone, PartialEq)]
pub struct Step<T> {
    pub id: usize,
    /// First-order gain w_l (v_u - v_a)^2 at the pre-step Fiedler vector.
    pub predicted: T,
    /// lambda_2 after the link was added.
    pub realized: T,
    /// The pre-step graph was disconnected, so the choice was made on
    /// realized lambda_2 rather than the first-order score.
    pub fallback: bool,
}

/// A set of chosen candidate links and its effect on lambda_2.
#[derive(Debug, Clone, PartialEq)]
pub struct Selection<T> {
    pub method: Solver,
    /// Candidate ids in the order they were added.
    pub chosen: Vec<usize>,
    pub lambda2_before: T,
    pub lambda2_after: T,
    pub per_step: Vec<Step<T>>,
    /// False only for unrepaired top-R rounding that broke a constraint.
    pub feasible: bool,
}

#[derive(Serialize)]
struct TraceLine<'a> {
    method: &'a str,
    step: usize,
    chosen_id: usize,
    predicted: f64,
    realized: f64,
}

impl<T: Scalar> Selection<T> {
    pub fn links(&self) -> usize {
        self.chosen.len()
    }

    /// lambda_2 before plus the sum of first-order predictions.
    pub fn cumulative_prop1(&self) -> T {
        self.per_step.iter().fold(self.lambda2_before, |acc, s| acc + s.predicted)
    }

    /// One JSON object per step: `{method, step, chosen_id, predicted, realized}`.
    pub fn trace_lines(&self) -> Vec<String> {
        let method = self.method.to_string();
        self.per_step
            .iter()
            .enumerate()
            .map(|(k, s)| {
                serde_json::to_string(&TraceLine {
                    method: &method,
                    step: k + 1,
                    chosen_id: s.id,
                    predicted: s.predicted.as_f64(),
                    realized: s.realized.as_f64(),
                })
                .expect("plain struct serializes")
            })
            .collect()
    }
}

/// Finds the candidate with a given id.
fn by_id<T>(cands: &[CandidateLink<T>], id: usize) -> &CandidateLink<T> {
    cands
        .iter()
        .find(|c| c.id == id)
        .expect("selection ids come from the candidate list")
}

/// Whether `g` plus the given candidate links is connected.
pub(crate) fn connected_with<T: Scalar>(g: &Graph<T>, cands: &[CandidateLink<T>], ids: &[usize]) -> bool {
    let mut aug = UnionFindLite::new(g.n_nodes());
    for e in g.edges() {
        aug.union(e.i, e.j);
    }
    for &id in ids {
        let c = by_id(cands, id);
        aug.union(c.ue_node, c.uav_node);
    }
    aug.components <= 1
}

struct UnionFindLite {
    parent: Vec<usize>,
    components: usize,
}

impl UnionFindLite {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            components: n,
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
            self.components -= 1;
        }
    }
}

/// Applies `ids` in order to the Laplacian of `g`, recording the first-order
/// prediction and realized lambda_2 of each step.
pub(crate) fn replay<T: Scalar>(g: &Graph<T>, cands: &[CandidateLink<T>], ids: &[usize]) -> Result<(Vec<Step<T>>, T)> {
    let mut l = laplacian(g);
    let mut steps = Vec::with_capacity(ids.len());
    let mut current = algebraic_connectivity(&l)?;
    for (k, &id) in ids.iter().enumerate() {
        let c = by_id(cands, id);
        let sp = spectrum(&l)?;
        let v = &sp.fiedler_vector;
        let predicted = prop1_upper(T::zero(), c.weight, v[c.ue_node], v[c.uav_node]);
        l.add_edge_in_place(c.ue_node, c.uav_node, c.weight);
        current = algebraic_connectivity(&l)?;
        steps.push(Step {
            id,
            predicted,
            realized: current,
            fallback: !connected_with(g, cands, &ids[..k]),
        });
    }
    Ok((steps, current))
}

/// Tolerance used for score ties: relative 1e-12, absolute floor 1e-12.
pub(crate) fn tie_tol<T: Scalar>(best: T) -> T {
    T::lit(1e-12) * best.abs().max(T::one())
}
