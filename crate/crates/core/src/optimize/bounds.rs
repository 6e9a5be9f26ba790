use crate::error::{Error, Result};
use crate::graph::{algebraic_connectivity, rank_one_add, Laplacian, SpectralResult};
use crate::scalar::Scalar;

/// First-order bound on lambda_2 after adding an edge of weight `w` between
/// nodes whose Fiedler components are `v_u` and `v_a`.
pub fn prop1_upper<T: Scalar>(lambda2: T, w: T, v_u: T, v_a: T) -> T {
    let d = v_u - v_a;
    lambda2 + w * d * d
}

/// Second-order lower/upper bounds on lambda_2 after one edge addition,
/// together with the exact value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundsReport<T> {
    /// None when the radicand of the lower bound is negative.
    pub lower: Option<T>,
    /// None when lambda_n = lambda_2 (complete regular graphs).
    pub upper_prop2: Option<T>,
    pub upper_prop1: T,
    pub actual: T,
    /// lambda_3 - lambda_2.
    pub delta: T,
}

impl<T: Scalar> BoundsReport<T> {
    pub fn lower_violated(&self, tol: T) -> bool {
        self.lower.is_some_and(|lo| self.actual < lo - tol)
    }

    pub fn upper_violated(&self, tol: T) -> bool {
        self.upper_prop2.is_some_and(|up| self.actual > up + tol)
    }
}

/// Bounds for adding edge (i, j) with weight `w` to the Laplacian `l`, whose
/// spectrum is `sp`. The pre-update graph must be connected.
pub fn prop2_bounds<T: Scalar>(
    l: &Laplacian<T>,
    sp: &SpectralResult<T>,
    w: T,
    i: usize,
    j: usize,
) -> Result<BoundsReport<T>> {
    let n = sp.eigenvalues.len();
    if i >= n || j >= n {
        return Err(Error::NodeOutOfRange {
            index: i.max(j),
            n_nodes: n,
        });
    }
    let lambda2 = sp.fiedler_value;
    if n < 3 || lambda2.as_f64() <= T::SPECTRAL_TOL {
        return Err(Error::InvalidArgument(
            "bounds need a connected graph with at least three nodes".into(),
        ));
    }
    let v = &sp.fiedler_vector;
    let d = v[i] - v[j];
    let vua = d * d;
    let delta = sp.gap();
    let lambda_n = sp.largest();
    let two = T::lit(2.0);

    let (lower, upper_prop2) = if w == T::zero() {
        (Some(lambda2), Some(lambda2))
    } else {
        let radicand = T::lit(5.0) * w * vua - w * delta * delta + T::lit(4.0) * w * w + T::lit(4.0) * w * delta;
        let lower = (radicand >= T::zero()).then(|| lambda2 + (w * vua + delta + two * w - radicand.sqrt()) / two);
        let spread = lambda_n - lambda2;
        let upper = (spread.as_f64() > T::SPECTRAL_TOL)
            .then(|| lambda2 + w * vua / (T::one() + w * (two - vua) / spread));
        (lower, upper)
    };
    let actual = algebraic_connectivity(&rank_one_add(l, i, j, w)?)?;
    Ok(BoundsReport {
        lower,
        upper_prop2,
        upper_prop1: prop1_upper(lambda2, w, v[i], v[j]),
        actual,
        delta,
    })
}

/// 1 + w * sum_{k>=1} u_k^2 / (lambda_k - x), skipping the zero mode.
pub fn secular_function<T: Scalar>(eigenvalues: &[T], u: &[T], w: T, x: T) -> T {
    eigenvalues
        .iter()
        .zip(u)
        .skip(1)
        .fold(T::one(), |acc, (&lam, &uk)| acc + w * uk * uk / (lam - x))
}

/// lambda_2 after adding edge (i, j) with weight `w`, found as the root of
/// the secular equation in (lambda_2, lambda_3).
pub fn secular_lambda2<T: Scalar>(sp: &SpectralResult<T>, w: T, i: usize, j: usize) -> Result<T> {
    let n = sp.eigenvalues.len();
    if i >= n || j >= n {
        return Err(Error::NodeOutOfRange {
            index: i.max(j),
            n_nodes: n,
        });
    }
    if i == j {
        return Err(Error::InvalidArgument("self-loop".into()));
    }
    if w < T::zero() {
        return Err(Error::InvalidArgument(format!("negative weight {w}")));
    }
    let lam = &sp.eigenvalues;
    let q = &sp.eigenvectors;
    let u: Vec<T> = (0..n).map(|k| q[(i, k)] - q[(j, k)]).collect();
    let lambda2 = lam[1];

    let scale = lam[n - 1].abs().max(T::one());
    if n >= 3 && lam[2] - lambda2 < T::lit(1e-10) * scale {
        return Err(Error::NotSimple((lam[2] - lambda2).as_f64()));
    }
    // weight pushed onto the Fiedler mode bounds the possible shift
    if w * u[1] * u[1] < T::lit(1e-14) * scale {
        return Ok(lambda2);
    }

    let nudge = T::lit(1e-12) * scale;
    let mut lo = lambda2 + nudge;
    let mut hi = if n >= 3 {
        lam[2] - nudge
    } else {
        lambda2 + w * u.iter().map(|&x| x * x).sum::<T>() + T::one()
    };
    let f = |x: T| secular_function(lam, &u, w, x);
    if f(lo) >= T::zero() {
        return Ok(lo);
    }
    if f(hi) < T::zero() {
        // the lambda_3 pole has no weight: lambda_3 itself survives
        return Ok(lam[2]);
    }
    for _ in 0..200 {
        let mid = (lo + hi) / T::lit(2.0);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo + hi) / T::lit(2.0))
}
