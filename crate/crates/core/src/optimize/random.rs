use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{replay, Selection, Solver};
use crate::candidates::{CandidateLink, SelectionConstraints};
use crate::error::Result;
use crate::graph::{algebraic_connectivity, laplacian, Graph};
use crate::scalar::Scalar;

/// Adds uniformly random feasible links one at a time until the budget is
/// spent or nothing feasible is left.
pub fn random_baseline<T: Scalar>(
    g: &Graph<T>,
    cands: &[CandidateLink<T>],
    constraints: &SelectionConstraints,
    seed: u64,
) -> Result<Selection<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut occ = constraints.occupancy();
    let mut chosen = Vec::new();
    loop {
        let available: Vec<&CandidateLink<T>> = cands.iter().filter(|c| occ.admits(c)).collect();
        if available.is_empty() {
            break;
        }
        let c = available[rng.gen_range(0..available.len())];
        occ.insert(c);
        chosen.push(c.id);
    }
    let lambda2_before = algebraic_connectivity(&laplacian(g))?;
    let (per_step, lambda2_after) = replay(g, cands, &chosen)?;
    Ok(Selection {
        method: Solver::Random,
        chosen,
        lambda2_before,
        lambda2_after,
        per_step,
        feasible: true,
    })
}
