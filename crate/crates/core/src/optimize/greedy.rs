use super::{by_id, connected_with, prop1_upper, tie_tol, Selection, Solver, Step};
use crate::candidates::{CandidateLink, SelectionConstraints};
use crate::error::Result;
use crate::graph::{algebraic_connectivity, criticality_from_laplacian, edge_weight, laplacian, rank_one_add, spectrum, Graph};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreedyOptions<T> {
    /// Recompute endpoint criticalities (and so candidate weights) on the
    /// current graph after every addition, with this epsilon floor.
    pub recompute_criticality: Option<T>,
}

impl<T> Default for GreedyOptions<T> {
    fn default() -> Self {
        Self {
            recompute_criticality: None,
        }
    }
}

/// Adds links one at a time, each time taking the remaining feasible
/// candidate with the largest w_l (v_u - v_a)^2 under the current Fiedler
/// vector. Ties go to the lowest id.
///
/// While the current graph is disconnected the Fiedler vector carries no
/// ranking information, so candidates are scored by the lambda_2 they would
/// actually produce instead; such steps are marked `fallback`.
pub fn greedy_perturbation<T: Scalar>(
    g: &Graph<T>,
    cands: &[CandidateLink<T>],
    constraints: &SelectionConstraints,
    opts: GreedyOptions<T>,
) -> Result<Selection<T>> {
    let mut l = laplacian(g);
    let lambda2_before = algebraic_connectivity(&l)?;
    let mut occ = constraints.occupancy();
    let mut weights: Vec<T> = cands.iter().map(|c| c.weight).collect();
    let mut chosen = Vec::new();
    let mut per_step = Vec::new();
    let mut current = lambda2_before;

    while !occ.is_full() {
        let available: Vec<usize> = (0..cands.len()).filter(|&k| occ.admits(&cands[k])).collect();
        if available.is_empty() {
            break;
        }
        let sp = spectrum(&l)?;
        let v = &sp.fiedler_vector;
        let predicted = |k: usize| prop1_upper(T::zero(), weights[k], v[cands[k].ue_node], v[cands[k].uav_node]);
        let fallback = !connected_with(g, cands, &chosen);

        let mut best: Option<(usize, T)> = None;
        for &k in &available {
            let score = if fallback {
                algebraic_connectivity(&rank_one_add(&l, cands[k].ue_node, cands[k].uav_node, weights[k])?)?
            } else {
                predicted(k)
            };
            let better = match best {
                None => true,
                Some((bk, bs)) => score > bs + tie_tol(bs) || (score >= bs - tie_tol(bs) && cands[k].id < cands[bk].id),
            };
            if better {
                best = Some((k, score));
            }
        }
        let (k, _) = best.expect("available is non-empty");
        let c = &cands[k];
        let gain = predicted(k);
        l.add_edge_in_place(c.ue_node, c.uav_node, weights[k]);
        current = algebraic_connectivity(&l)?;
        per_step.push(Step {
            id: c.id,
            predicted: gain,
            realized: current,
            fallback,
        });
        chosen.push(c.id);
        occ.insert(c);

        if let Some(eps) = opts.recompute_criticality {
            for (w, cand) in weights.iter_mut().zip(cands) {
                if occ.admits(cand) {
                    let cu = criticality_from_laplacian(&l, cand.ue_node, eps)?.value;
                    let ca = criticality_from_laplacian(&l, cand.uav_node, eps)?.value;
                    *w = edge_weight(cu, ca)?;
                }
            }
        }
    }
    debug_assert!(chosen.iter().all(|&id| by_id(cands, id).id == id));

    Ok(Selection {
        method: Solver::Greedy,
        chosen,
        lambda2_before,
        lambda2_after: current,
        per_step,
        feasible: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::NodeKind;

    // UE0 - UAV1 - UE2 path; candidate 0 closes the triangle through a
    // second UAV-like endpoint. Node kinds are irrelevant to the spectrum,
    // so the path uses UAV nodes throughout.
    fn p3() -> Graph<f64> {
        Graph::uavs_only(3, [(0, 1, 1.0), (1, 2, 1.0)]).unwrap()
    }

    #[test]
    fn closes_the_triangle() {
        let g = p3();
        let cands = vec![CandidateLink::synthetic(0, (0, 0, 0), (0, 2), 1.0)];
        let sel = greedy_perturbation(&g, &cands, &SelectionConstraints::new(1), GreedyOptions::default()).unwrap();
        assert_eq!(sel.chosen, vec![0]);
        assert!((sel.lambda2_before - 1.0).abs() < 1e-12);
        assert!((sel.per_step[0].predicted - 2.0).abs() < 1e-12);
        assert!((sel.lambda2_after - 3.0).abs() < 1e-12);
        assert!(!sel.per_step[0].fallback);
    }

    #[test]
    fn no_candidates_leaves_graph_unchanged() {
        let sel = greedy_perturbation(&p3(), &[], &SelectionConstraints::new(3), GreedyOptions::default()).unwrap();
        assert!(sel.chosen.is_empty());
        assert_eq!(sel.lambda2_after, sel.lambda2_before);
    }

    #[test]
    fn equal_scores_pick_lowest_id() {
        // P4 has an antisymmetric Fiedler vector (a, b, -b, -a), so the
        // chords (0, 2) and (1, 3) score the same
        let g = Graph::uavs_only(4, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)]).unwrap();
        let cands = vec![
            CandidateLink::synthetic(0, (0, 0, 0), (0, 2), 1.0),
            CandidateLink::synthetic(1, (1, 1, 1), (1, 3), 1.0),
        ];
        let cons = SelectionConstraints::new(1);
        for _ in 0..3 {
            let sel = greedy_perturbation(&g, &cands, &cons, GreedyOptions::default()).unwrap();
            assert_eq!(sel.chosen, vec![0]);
        }
    }

    #[test]
    fn removal_rule_respects_shared_resources() {
        let g = Graph::new(
            vec![NodeKind::Ue, NodeKind::Ue, NodeKind::Uav, NodeKind::Uav],
            [(0, 2, 1.0), (1, 3, 1.0), (2, 3, 1.0)],
        )
        .unwrap();
        // both candidates use RIS 0, only one can be chosen
        let cands = vec![
            CandidateLink::synthetic(0, (0, 0, 1), (0, 3), 1.0),
            CandidateLink::synthetic(1, (1, 0, 0), (1, 2), 1.0),
        ];
        let sel = greedy_perturbation(&g, &cands, &SelectionConstraints::new(2), GreedyOptions::default()).unwrap();
        assert_eq!(sel.chosen.len(), 1);
    }

    #[test]
    fn disconnected_start_uses_realized_scores() {
        // node 3 is isolated; only candidate 1 reconnects it
        let g = Graph::uavs_only(4, [(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        let cands = vec![
            CandidateLink::synthetic(0, (0, 0, 0), (0, 2), 1.0),
            CandidateLink::synthetic(1, (1, 1, 1), (1, 3), 1.0),
        ];
        let sel = greedy_perturbation(&g, &cands, &SelectionConstraints::new(1), GreedyOptions::default()).unwrap();
        assert_eq!(sel.chosen, vec![1]);
        assert!(sel.per_step[0].fallback);
        assert!(sel.lambda2_after > 0.0);
    }

    #[test]
    fn recomputed_weights_still_feasible() {
        let g = Graph::new(
            vec![NodeKind::Ue, NodeKind::Ue, NodeKind::Uav, NodeKind::Uav, NodeKind::Uav],
            [(0, 2, 1.0), (1, 3, 1.0), (2, 3, 1.0), (3, 4, 1.0), (2, 4, 1.0)],
        )
        .unwrap();
        let cands = vec![
            CandidateLink::synthetic(0, (0, 0, 2), (0, 4), 0.3),
            CandidateLink::synthetic(1, (1, 1, 0), (1, 2), 0.3),
            CandidateLink::synthetic(2, (1, 0, 2), (1, 4), 0.3),
        ];
        let opts = GreedyOptions {
            recompute_criticality: Some(1e-5),
        };
        let sel = greedy_perturbation(&g, &cands, &SelectionConstraints::new(2), opts).unwrap();
        assert!(!sel.chosen.is_empty());
        assert!(sel.lambda2_after >= sel.lambda2_before);
    }
}
