use super::{replay, tie_tol, Selection, Solver};
use crate::candidates::{CandidateLink, Occupancy, SelectionConstraints};
use crate::error::{Error, Result};
use crate::graph::{algebraic_connectivity, laplacian, Graph, Laplacian};
use crate::scalar::Scalar;

/// Default cap on C(|cands|, R).
pub const DEFAULT_SUBSET_LIMIT: u128 = 2_000_000;

/// C(n, k), saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step
        acc = match acc.checked_mul((n - i) as u128) {
            Some(x) => x / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

struct Search<'a, T> {
    cands: &'a [CandidateLink<T>],
    stack: Vec<usize>,
    best: Option<(T, Vec<usize>)>,
}

impl<T: Scalar> Search<'_, T> {
    fn dfs(&mut self, occ: &mut Occupancy<'_>, l: &Laplacian<T>, start: usize) -> Result<()> {
        for k in start..self.cands.len() {
            let c = &self.cands[k];
            if !occ.admits(c) {
                continue;
            }
            let mut next = l.clone();
            next.add_edge_in_place(c.ue_node, c.uav_node, c.weight);
            occ.insert(c);
            self.stack.push(k);
            self.dfs(occ, &next, k + 1)?;
            self.stack.pop();
            occ.pop();
        }
        // only maximal selections can be optimal: lambda_2 never drops when
        // a link is added, and a non-maximal set is a prefix of one visited
        if self.cands.iter().any(|c| occ.admits(c)) {
            return Ok(());
        }
        let value = algebraic_connectivity(l)?;
        let better = match &self.best {
            None => true,
            Some((b, _)) => value > *b + tie_tol(*b),
        };
        if better {
            self.best = Some((value, self.stack.iter().map(|&k| self.cands[k].id).collect()));
        }
        Ok(())
    }
}

/// Best feasible selection by exhaustive search. Among equally good maximal
/// selections the lexicographically smallest id tuple wins. Refuses when
/// C(|cands|, R) exceeds `limit`.
pub fn exhaustive<T: Scalar>(
    g: &Graph<T>,
    cands: &[CandidateLink<T>],
    constraints: &SelectionConstraints,
    limit: u128,
) -> Result<Selection<T>> {
    let subsets = binomial(cands.len(), constraints.max_links.min(cands.len()));
    if subsets > limit {
        return Err(Error::ExplosionGuard { subsets, limit });
    }
    // ids are visited in increasing order so the first optimum found is the
    // lexicographically smallest
    let mut order: Vec<usize> = (0..cands.len()).collect();
    order.sort_by_key(|&k| cands[k].id);
    let sorted: Vec<CandidateLink<T>> = order.iter().map(|&k| cands[k].clone()).collect();

    let base = laplacian(g);
    let lambda2_before = algebraic_connectivity(&base)?;
    let mut search = Search {
        cands: &sorted,
        stack: Vec::new(),
        best: None,
    };
    search.dfs(&mut constraints.occupancy(), &base, 0)?;
    let (_, chosen) = search.best.expect("the empty selection is always visited");
    let (per_step, lambda2_after) = replay(g, cands, &chosen)?;
    Ok(Selection {
        method: Solver::Exhaustive,
        chosen,
        lambda2_before,
        lambda2_after,
        per_step,
        feasible: true,
    })
}
