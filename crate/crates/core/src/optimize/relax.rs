use super::{replay, Selection, Solver};
use crate::candidates::{is_feasible, CandidateLink, SelectionConstraints};
use crate::error::Result;
use crate::graph::{algebraic_connectivity, laplacian, spectrum, Graph, Laplacian};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelaxOptions<T> {
    pub iters: usize,
    /// Stop once the projected step, divided by the step size, is shorter.
    pub tol: T,
    /// Plain top-R rounding with no feasibility repair.
    pub plain_rounding: bool,
}

impl<T: Scalar> Default for RelaxOptions<T> {
    fn default() -> Self {
        Self {
            iters: 300,
            tol: T::lit(1e-7),
            plain_rounding: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelaxedSolution<T> {
    /// Best point found, in [0, 1] with sum min(R, |z|).
    pub z: Vec<T>,
    /// lambda_2 at `z`. Vertices of the relaxed set tried during rounding
    /// count too, so this never falls below the rounded value.
    pub objective: T,
    pub iterations: usize,
    /// lambda_2 at each iterate.
    pub step_history: Vec<T>,
}

/// Euclidean projection of `y` onto {0 <= z <= 1, sum z = k}.
///
/// The projection is clamp(y - tau, 0, 1) for the tau at which the clamped
/// sum equals k. That sum is piecewise linear in tau with breakpoints
/// y_i - 1 and y_i, so one sorted sweep over the breakpoints finds tau.
pub fn project_capped_simplex<T: Scalar>(y: &[T], k: T) -> Vec<T> {
    let n = y.len();
    if k <= T::zero() {
        return vec![T::zero(); n];
    }
    if k >= T::from_usize_lossy(n) {
        return vec![T::one(); n];
    }
    // (position, +1 when a coordinate leaves the upper cap, -1 when it hits zero)
    let mut events: Vec<(T, i8)> = y.iter().flat_map(|&v| [(v - T::one(), 1), (v, -1)]).collect();
    events.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite input").then(b.1.cmp(&a.1)));

    let mut free = 0usize;
    let mut tau_prev = events[0].0;
    let mut sum = T::from_usize_lossy(n);
    let mut tau = tau_prev;
    for &(pos, kind) in &events {
        let next = sum - T::from_usize_lossy(free) * (pos - tau_prev);
        if free > 0 && next <= k {
            tau = tau_prev + (sum - k) / T::from_usize_lossy(free);
            break;
        }
        sum = next;
        tau_prev = pos;
        tau = pos;
        if kind > 0 {
            free += 1;
        } else {
            free -= 1;
        }
    }
    y.iter().map(|&v| (v - tau).max(T::zero()).min(T::one())).collect()
}

fn weighted<T: Scalar>(base: &Laplacian<T>, cands: &[CandidateLink<T>], z: &[T]) -> Laplacian<T> {
    let mut l = base.clone();
    for (c, &zl) in cands.iter().zip(z) {
        if zl > T::zero() {
            l.add_edge_in_place(c.ue_node, c.uav_node, zl * c.weight);
        }
    }
    l
}

fn indicator<T: Scalar>(n: usize, picks: impl IntoIterator<Item = usize>) -> Vec<T> {
    let mut z = vec![T::zero(); n];
    for k in picks {
        z[k] = T::one();
    }
    z
}

/// Relaxes link selection to z in [0, 1], maximizes the concave lambda_2 of
/// the z-weighted Laplacian by projected supergradient ascent, then rounds
/// the largest entries back to links.
pub fn relax_and_round<T: Scalar>(
    g: &Graph<T>,
    cands: &[CandidateLink<T>],
    constraints: &SelectionConstraints,
    opts: RelaxOptions<T>,
) -> Result<(RelaxedSolution<T>, Selection<T>)> {
    let n = cands.len();
    let base = laplacian(g);
    let lambda2_before = algebraic_connectivity(&base)?;
    let k = constraints.max_links.min(n);
    let kt = T::from_usize_lossy(k);

    let mut z = if n == 0 {
        Vec::new()
    } else {
        vec![kt / T::from_usize_lossy(n); n]
    };
    let max_w = cands.iter().map(|c| c.weight).fold(T::zero(), T::max);
    let eta0 = if max_w > T::zero() { T::one() / max_w } else { T::one() };

    let mut best_z = z.clone();
    let mut best = T::neg_infinity();
    let mut history = Vec::new();
    let mut iterations = 0;
    for it in 1..=opts.iters.max(1) {
        iterations = it;
        let sp = spectrum(&weighted(&base, cands, &z))?;
        let obj = sp.fiedler_value;
        history.push(obj);
        if obj > best {
            best = obj;
            best_z.clone_from(&z);
        }
        if n == 0 || k == n {
            break;
        }
        let v = &sp.fiedler_vector;
        let eta = eta0 / T::from_usize_lossy(it).sqrt();
        let y: Vec<T> = cands
            .iter()
            .zip(&z)
            .map(|(c, &zl)| {
                let d = v[c.ue_node] - v[c.uav_node];
                zl + eta * c.weight * d * d
            })
            .collect();
        let next = project_capped_simplex(&y, kt);
        let step = next.iter().zip(&z).map(|(a, b)| (*a - *b) * (*a - *b)).sum::<T>().sqrt();
        z = next;
        if step / eta < opts.tol {
            break;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        best_z[b]
            .partial_cmp(&best_z[a])
            .expect("finite z")
            .then(cands[a].id.cmp(&cands[b].id))
    });

    let (picks, feasible) = if opts.plain_rounding {
        let picks: Vec<usize> = order[..k].to_vec();
        let refs: Vec<&CandidateLink<T>> = picks.iter().map(|&p| &cands[p]).collect();
        let ok = is_feasible(&refs, constraints);
        (picks, ok)
    } else {
        let mut occ = constraints.occupancy();
        let mut picks = Vec::new();
        for &p in &order {
            if occ.admits(&cands[p]) {
                occ.insert(&cands[p]);
                picks.push(p);
            }
        }
        (picks, true)
    };

    // two vertices of the relaxed set: the top-k of z, and the rounded
    // selection padded with the next-largest entries
    let top_k = indicator(n, order[..k].iter().copied());
    let padded = indicator(
        n,
        picks
            .iter()
            .copied()
            .chain(order.iter().copied().filter(|p| !picks.contains(p)))
            .take(k),
    );
    for vertex in [top_k, padded] {
        let obj = algebraic_connectivity(&weighted(&base, cands, &vertex))?;
        if obj > best {
            best = obj;
            best_z = vertex;
        }
    }

    let chosen: Vec<usize> = picks.iter().map(|&p| cands[p].id).collect();
    let (per_step, lambda2_after) = replay(g, cands, &chosen)?;
    Ok((
        RelaxedSolution {
            z: best_z,
            objective: best,
            iterations,
            step_history: history,
        },
        Selection {
            method: Solver::Relax,
            chosen,
            lambda2_before,
            lambda2_after,
            per_step,
            feasible,
        },
    ))
}
