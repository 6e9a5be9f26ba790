//! Small self-checks behind `risnet verify`: known spectra, the rank-one
//! oracle, interlacing and coherent combining.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channel::{cascaded_channel, channel_ris_uav, channel_ue_ris, coherent_gain, optimal_phases};
use crate::error::Result;
use crate::graph::{algebraic_connectivity, criticality, laplacian, rank_one_add, spectrum, Graph};
use crate::optimize::{prop2_bounds, secular_function, secular_lambda2};
use crate::scenario::{distance, Point3, RadioParams};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, passed: bool, detail: String) -> Check {
    Check { name, passed, detail }
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn complete(n: usize) -> Graph<f64> {
    Graph::uavs_only(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j, 1.0)))).expect("valid")
}

/// Connected random graph: a random spanning tree plus extra edges.
pub fn random_connected_graph(rng: &mut ChaCha8Rng, n: usize, extra: usize) -> Graph<f64> {
    let mut g = Graph::uavs_only(n, std::iter::empty()).expect("valid");
    for v in 1..n {
        let u = rng.gen_range(0..v);
        g.add_edge(u, v, rng.gen_range(0.2..3.0)).expect("fresh edge");
    }
    for _ in 0..extra {
        let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if i != j && !g.has_edge(i, j) {
            g.add_edge(i, j, rng.gen_range(0.2..3.0)).expect("fresh edge");
        }
    }
    g
}

fn p3_c3() -> Result<Check> {
    let l = laplacian(&Graph::uavs_only(3, [(0, 1, 1.0), (1, 2, 1.0)])?);
    let s = spectrum(&l)?;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let vec_ok = s.fiedler_vector.iter().zip([h, 0.0, -h]).all(|(a, b)| close(*a, b, 1e-12));
    let spec_ok = s.eigenvalues.iter().zip([0.0, 1.0, 3.0]).all(|(a, b)| close(*a, b, 1e-12));
    let b = prop2_bounds(&l, &s, 1.0, 0, 2)?;
    let after = b.actual;
    let lower = b.lower.unwrap_or(f64::NAN);
    let ok = vec_ok && spec_ok && close(after, 3.0, 1e-12) && close(b.upper_prop1, 3.0, 1e-12)
        && b.upper_prop2.is_some_and(|u| close(u, 3.0, 1e-12))
        && close(lower, 1.879, 1e-3);
    Ok(check(
        "P3 spectrum and closing edge to C3",
        ok,
        format!("lambda2 1 -> {after:.6}, prop1 {:.6}, lower {lower:.6}", b.upper_prop1),
    ))
}

fn k4() -> Result<Check> {
    let g = complete(4);
    let l2 = spectrum(&laplacian(&g))?.fiedler_value;
    let c = criticality(&g, 0, 1e-5)?.value;
    Ok(check(
        "K4 connectivity and criticality",
        close(l2, 4.0, 1e-12) && close(c, 1.0 / 3.0, 1e-12),
        format!("lambda2 {l2:.6}, C {c:.6}"),
    ))
}

fn secular_figure() -> Check {
    let lam = [0.0, 2.0, 3.0, 4.0];
    let u = [0.0, 0.5f64.sqrt(), 0.5f64.sqrt(), 0.5f64.sqrt()];
    let a = secular_function(&lam, &u, 1.0, 2.5);
    let b = secular_function(&lam, &u, 1.0, 2.0 + 1e-6);
    check(
        "secular function sign change on (lambda2, lambda3)",
        close(a, 4.0 / 3.0, 1e-12) && b < 0.0,
        format!("f(2.5) = {a:.6}, f(2 + 1e-6) = {b:.3e}"),
    )
}

fn secular_random(seed: u64, trials: usize) -> Result<(Check, Check)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut worst, mut tested, mut interlace_bad) = (0.0f64, 0, 0);
    while tested < trials {
        let n = rng.gen_range(3..16);
        let extra = rng.gen_range(0..n);
        let g = random_connected_graph(&mut rng, n, extra);
        let l = laplacian(&g);
        let s = spectrum(&l)?;
        let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if i == j || s.gap() < 1e-6 {
            continue;
        }
        let w = rng.gen_range(0.05..4.0);
        let root = secular_lambda2(&s, w, i, j)?;
        let after = spectrum(&rank_one_add(&l, i, j, w)?)?;
        worst = worst.max((root - after.fiedler_value).abs());
        let lam = &s.eigenvalues;
        let mu = &after.eigenvalues;
        let ok = (1..n).all(|k| lam[k] <= mu[k] + 1e-8 && (k + 1 == n || mu[k] <= lam[k + 1] + 1e-8));
        if !ok {
            interlace_bad += 1;
        }
        tested += 1;
    }
    Ok((
        check(
            "secular root equals direct lambda2",
            worst < 1e-8,
            format!("{tested} random adds, worst gap {worst:.2e}"),
        ),
        check(
            "interlacing after rank-one add",
            interlace_bad == 0,
            format!("{interlace_bad} of {tested} violated"),
        ),
    ))
}

fn coherence(seed: u64, trials: usize) -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = RadioParams::<f64>::default();
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let ue = Point3::ground(rng.gen_range(0.0..150.0), rng.gen_range(0.0..150.0));
        let ris = Point3::new(rng.gen_range(0.0..150.0), rng.gen_range(0.0..150.0), 20.0);
        let uav = Point3::new(rng.gen_range(0.0..150.0), rng.gen_range(0.0..150.0), 50.0);
        let thetas = optimal_phases(&ue, &ris, &uav, &p)?;
        let h = cascaded_channel(&channel_ris_uav(&ris, &uav, &p)?, &thetas, &channel_ue_ris(&ue, &ris, &p)?)?;
        let want = coherent_gain(distance(&ue, &ris), distance(&ris, &uav), &p);
        worst = worst.max((h.norm() - want).abs() / want);
    }
    Ok(check(
        "coherent combining magnitude",
        worst < 1e-9,
        format!("{trials} geometries, worst relative error {worst:.2e}"),
    ))
}

/// Runs every check.
pub fn run_all() -> Result<Vec<Check>> {
    let (sec, inter) = secular_random(7, 200)?;
    let mono = {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut bad = 0;
        for _ in 0..100 {
            let n = rng.gen_range(3..12);
            let g = random_connected_graph(&mut rng, n, 2);
            let l = laplacian(&g);
            let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
            if i == j {
                continue;
            }
            let before = algebraic_connectivity(&l)?;
            let after = algebraic_connectivity(&rank_one_add(&l, i, j, rng.gen_range(0.1..2.0))?)?;
            if after < before - 1e-9 {
                bad += 1;
            }
        }
        check("lambda2 never drops on edge addition", bad == 0, format!("{bad} drops"))
    };
    Ok(vec![p3_c3()?, k4()?, secular_figure(), sec, inter, mono, coherence(3, 50)?])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_pass() {
        for c in run_all().unwrap() {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }

    #[test]
    fn random_graphs_are_connected() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            assert!(random_connected_graph(&mut rng, 9, 3).is_connected());
        }
    }
}
