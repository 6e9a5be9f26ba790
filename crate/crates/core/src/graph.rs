//! Connectivity graph, Laplacian algebra, spectra and node criticality.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::channel::{snr_uav_uav, snr_ue_uav};
use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, SymmetricEigen};
use crate::scalar::{linear_to_db, Scalar};
use crate::scenario::{distance, NodeKind, Scenario};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge<T> {
    pub i: usize,
    pub j: usize,
    pub w: T,
}

/// Undirected weighted graph over UE and UAV nodes.
///
/// Edges are stored with `i < j`; no self-loops, duplicates or UE-UE edges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Graph<T> {
    node_kinds: Vec<NodeKind>,
    edges: Vec<Edge<T>>,
}

impl<T: Scalar> Graph<T> {
    pub fn new(node_kinds: Vec<NodeKind>, edges: impl IntoIterator<Item = (usize, usize, T)>) -> Result<Self> {
        let mut g = Self {
            node_kinds,
            edges: Vec::new(),
        };
        for (i, j, w) in edges {
            g.add_edge(i, j, w)?;
        }
        Ok(g)
    }

    /// Graph whose nodes are all UAVs; handy for pure spectral work.
    pub fn uavs_only(n: usize, edges: impl IntoIterator<Item = (usize, usize, T)>) -> Result<Self> {
        Self::new(vec![NodeKind::Uav; n], edges)
    }

    pub fn add_edge(&mut self, i: usize, j: usize, w: T) -> Result<()> {
        let n = self.n_nodes();
        for index in [i, j] {
            if index >= n {
                return Err(Error::NodeOutOfRange { index, n_nodes: n });
            }
        }
        if i == j {
            return Err(Error::InvalidArgument(format!("self-loop at node {i}")));
        }
        if !(w > T::zero() && w.is_finite()) {
            return Err(Error::InvalidArgument(format!("edge ({i}, {j}) weight must be positive, got {w}")));
        }
        if self.node_kinds[i] == NodeKind::Ue && self.node_kinds[j] == NodeKind::Ue {
            return Err(Error::InvalidArgument(format!("UE-UE edge ({i}, {j})")));
        }
        let (i, j) = (i.min(j), i.max(j));
        if self.has_edge(i, j) {
            return Err(Error::InvalidArgument(format!("duplicate edge ({i}, {j})")));
        }
        self.edges.push(Edge { i, j, w });
        Ok(())
    }

    pub fn n_nodes(&self) -> usize {
        self.node_kinds.len()
    }

    pub fn edges(&self) -> &[Edge<T>] {
        &self.edges
    }

    pub fn node_kinds(&self) -> &[NodeKind] {
        &self.node_kinds
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        let (i, j) = (i.min(j), i.max(j));
        self.edges.iter().any(|e| e.i == i && e.j == j)
    }

    pub fn neighbors(&self, n: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges.iter().filter_map(move |e| {
            if e.i == n {
                Some(e.j)
            } else if e.j == n {
                Some(e.i)
            } else {
                None
            }
        })
    }

    /// Same edge set with every weight replaced by `f(edge)`.
    pub fn reweighted(&self, mut f: impl FnMut(&Edge<T>) -> T) -> Result<Self> {
        Self::new(self.node_kinds.clone(), self.edges.iter().map(|e| (e.i, e.j, f(e))))
    }

    /// Number of connected components (union-find).
    pub fn component_count(&self) -> usize {
        let mut uf = UnionFind::new(self.n_nodes());
        for e in &self.edges {
            uf.union(e.i, e.j);
        }
        uf.count()
    }

    pub fn is_connected(&self) -> bool {
        self.component_count() <= 1
    }

    /// Text export: header `V E`, then one `i j w` line per edge.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("{} {}\n", self.n_nodes(), self.edges.len());
        for e in &self.edges {
            let _ = writeln!(out, "{} {} {}", e.i, e.j, e.w);
        }
        out
    }

    /// Parses [`Graph::to_edge_list`] output. Node kinds are not part of the
    /// format; all nodes come back as UAVs.
    pub fn from_edge_list(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let parse_err = |line: usize, message: String| Error::ConfigParse { line: line + 1, message };
        let (hl, header) = lines.next().ok_or_else(|| parse_err(0, "missing header".into()))?;
        let mut it = header.split_whitespace();
        let (v, e) = match (it.next(), it.next(), it.next()) {
            (Some(v), Some(e), None) => (
                v.parse::<usize>().map_err(|x| parse_err(hl, x.to_string()))?,
                e.parse::<usize>().map_err(|x| parse_err(hl, x.to_string()))?,
            ),
            _ => return Err(parse_err(hl, format!("bad header {header:?}"))),
        };
        let mut g = Self::uavs_only(v, std::iter::empty())?;
        for (ln, line) in lines {
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 3 {
                return Err(parse_err(ln, format!("expected `i j w`, got {line:?}")));
            }
            let i = f[0].parse::<usize>().map_err(|x| parse_err(ln, x.to_string()))?;
            let j = f[1].parse::<usize>().map_err(|x| parse_err(ln, x.to_string()))?;
            let w = f[2].parse::<f64>().map_err(|x| parse_err(ln, x.to_string()))?;
            g.add_edge(i, j, T::lit(w))?;
        }
        if g.edges.len() != e {
            return Err(parse_err(hl, format!("header says {e} edges, found {}", g.edges.len())));
        }
        Ok(g)
    }

    /// Copy of the graph with node `n` and its edges removed; later nodes
    /// shift down by one.
    pub fn without_node(&self, n: usize) -> Result<Self> {
        if n >= self.n_nodes() {
            return Err(Error::NodeOutOfRange {
                index: n,
                n_nodes: self.n_nodes(),
            });
        }
        let shift = |k: usize| if k > n { k - 1 } else { k };
        let mut kinds = self.node_kinds.clone();
        kinds.remove(n);
        Ok(Self {
            node_kinds: kinds,
            edges: self
                .edges
                .iter()
                .filter(|e| e.i != n && e.j != n)
                .map(|e| Edge {
                    i: shift(e.i),
                    j: shift(e.j),
                    w: e.w,
                })
                .collect(),
        })
    }
}

struct UnionFind {
    parent: Vec<usize>,
    components: usize,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            components: n,
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
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

    fn count(&self) -> usize {
        self.components
    }
}

/// Builds the direct-link graph of a scenario with unit edge weights.
///
/// UE-UAV edges need 10 log10(SNR) >= the UE threshold, UAV-UAV edges need
/// the UAV SNR (already in dB) >= the UAV threshold.
pub fn build_graph<T: Scalar>(s: &Scenario<T>) -> Graph<T> {
    let p = &s.params;
    let kinds = (0..s.n_nodes()).map(|n| s.node_kind(n)).collect();
    let mut edges = Vec::new();
    for (u, ue) in s.ues.iter().enumerate() {
        for (a, uav) in s.uavs.iter().enumerate() {
            let ok = snr_ue_uav(distance(ue, uav), p).map_or(false, |g| linear_to_db(g) >= p.thr_ue_uav_db);
            if ok {
                edges.push((s.ue_node(u), s.uav_node(a), T::one()));
            }
        }
    }
    for a in 0..s.uav_count() {
        for b in (a + 1)..s.uav_count() {
            let ok = snr_uav_uav(distance(&s.uavs[a], &s.uavs[b]), p).map_or(false, |g| g >= p.thr_uav_uav_db);
            if ok {
                edges.push((s.uav_node(a), s.uav_node(b), T::one()));
            }
        }
    }
    Graph::new(kinds, edges).expect("scenario edges are valid by construction")
}

/// Reweights every edge to 1 / (C_i + C_j) using criticalities of `g` itself.
pub fn criticality_weighted<T: Scalar>(g: &Graph<T>, eps: T) -> Result<Graph<T>> {
    let report = criticality_report(g, eps)?;
    g.reweighted(|e| T::one() / (report.values[e.i] + report.values[e.j]))
}

/// Dense graph Laplacian.
#[derive(Debug, Clone, PartialEq)]
pub struct Laplacian<T>(pub DenseMatrix<T>);

impl<T: Scalar> Laplacian<T> {
    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn matrix(&self) -> &DenseMatrix<T> {
        &self.0
    }

    /// In-place L += w a a^T for the incidence vector of edge (i, j).
    pub fn add_edge_in_place(&mut self, i: usize, j: usize, w: T) {
        let m = &mut self.0;
        m[(i, i)] += w;
        m[(j, j)] += w;
        m[(i, j)] -= w;
        m[(j, i)] -= w;
    }
}

/// L = sum_k w_k a_k a_k^T.
pub fn laplacian<T: Scalar>(g: &Graph<T>) -> Laplacian<T> {
    let mut l = Laplacian(DenseMatrix::zeros(g.n_nodes()));
    for e in g.edges() {
        l.add_edge_in_place(e.i, e.j, e.w);
    }
    l
}

/// Returns L + w a_l a_l^T for the edge (i, j).
pub fn rank_one_add<T: Scalar>(l: &Laplacian<T>, i: usize, j: usize, w: T) -> Result<Laplacian<T>> {
    let n = l.dim();
    for index in [i, j] {
        if index >= n {
            return Err(Error::NodeOutOfRange { index, n_nodes: n });
        }
    }
    if i == j {
        return Err(Error::InvalidArgument(format!("rank-one update needs distinct nodes, got {i} twice")));
    }
    let mut out = l.clone();
    out.add_edge_in_place(i, j, w);
    Ok(out)
}

/// Full spectrum of a Laplacian with its Fiedler pair.
#[derive(Debug, Clone)]
pub struct SpectralResult<T> {
    /// Ascending.
    pub eigenvalues: Vec<T>,
    /// Column k is the unit eigenvector of `eigenvalues[k]`; column 1 carries
    /// the same sign convention as `fiedler_vector`.
    pub eigenvectors: DenseMatrix<T>,
    pub fiedler_value: T,
    pub fiedler_vector: Vec<T>,
    /// lambda_3 - lambda_2 below 1e-8: the Fiedler vector is one arbitrary
    /// member of a higher-dimensional eigenspace.
    pub degenerate: bool,
}

impl<T: Scalar> SpectralResult<T> {
    pub fn largest(&self) -> T {
        self.eigenvalues.last().copied().unwrap_or_else(T::zero)
    }

    /// lambda_3 - lambda_2, or +inf when there is no lambda_3.
    pub fn gap(&self) -> T {
        match self.eigenvalues.get(2) {
            Some(&l3) => l3 - self.fiedler_value,
            None => T::infinity(),
        }
    }
}

fn check_symmetric<T: Scalar>(m: &DenseMatrix<T>) -> Result<()> {
    let asym = m.max_asymmetry();
    if asym.as_f64() > T::SYMMETRY_TOL {
        return Err(Error::NotSymmetric(asym.as_f64()));
    }
    Ok(())
}

/// Flips `v` so its first component with |v_i| above the sign tolerance is positive.
pub fn fix_sign<T: Scalar>(v: &mut [T]) -> bool {
    let tol = T::lit(T::SIGN_TOL);
    let flip = v.iter().find(|x| x.abs() > tol).is_some_and(|&x| x < T::zero());
    if flip {
        v.iter_mut().for_each(|x| *x = -*x);
    }
    flip
}

/// Rebuilds the eigenvectors of the near-zero cluster (the null space of a
/// disconnected Laplacian) so column 0 is the constant vector and column 1
/// is orthogonal to it. The solver is free to return any basis of that
/// space, and a Fiedler vector with a constant component breaks the
/// first-order bound.
fn align_null_space<T: Scalar>(values: &[T], vectors: &mut DenseMatrix<T>) {
    let n = values.len();
    let scale = values[n - 1].abs().max(T::one());
    let tol = T::lit(T::SPECTRAL_TOL) * scale;
    let k = values.iter().take_while(|&&v| v - values[0] <= tol).count();
    if k < 2 {
        return;
    }
    let col = |m: &DenseMatrix<T>, j: usize| (0..n).map(|r| m[(r, j)]).collect::<Vec<T>>();
    let dot = |a: &[T], b: &[T]| a.iter().zip(b).map(|(x, y)| *x * *y).sum::<T>();
    let e = vec![T::one() / T::from_usize_lossy(n).sqrt(); n];
    let mut old: Vec<Vec<T>> = (0..k).map(|j| col(vectors, j)).collect();
    // the cluster column with the most weight off the constant direction
    // becomes the Fiedler vector
    let off = |q: &[T]| T::one() - dot(q, &e) * dot(q, &e);
    let lead = (0..k).fold(0, |best, j| if off(&old[j]) > off(&old[best]) { j } else { best });
    let first = old.remove(lead);
    let mut basis = vec![e];
    for q in std::iter::once(first).chain(old) {
        if basis.len() == k {
            break;
        }
        let mut u = q;
        for b in &basis {
            let c = dot(&u, b);
            u.iter_mut().zip(b).for_each(|(x, y)| *x -= c * *y);
        }
        let norm = dot(&u, &u).sqrt();
        if norm > T::lit(1e-6) {
            u.iter_mut().for_each(|x| *x /= norm);
            basis.push(u);
        }
    }
    for (j, b) in basis.iter().enumerate() {
        for (r, &x) in b.iter().enumerate() {
            vectors[(r, j)] = x;
        }
    }
}

/// A Laplacian is positive semidefinite, so eigenvalues within rounding noise
/// of zero are zero. Snapping them keeps lambda_2 of a disconnected graph at
/// exactly 0 instead of a +-1e-16 residue that comparisons would pick up.
fn snap_zeros<T: Scalar>(values: &mut [T]) {
    let n = values.len();
    let scale = values.last().map_or(T::one(), |v| v.abs().max(T::one()));
    let noise = T::epsilon() * T::lit(100.0) * T::from_usize_lossy(n) * scale;
    values.iter_mut().filter(|v| v.abs() <= noise).for_each(|v| *v = T::zero());
}

/// Eigen-decomposition of a Laplacian. Graphs with fewer than two nodes have
/// lambda_2 = 0 and a zero Fiedler vector.
pub fn spectrum<T: Scalar>(l: &Laplacian<T>) -> Result<SpectralResult<T>> {
    check_symmetric(l.matrix())?;
    let n = l.dim();
    let mut eig = SymmetricEigen::new(l.matrix())?;
    snap_zeros(&mut eig.values);
    let mut vectors = eig.vectors.clone().expect("vectors requested");
    let (fiedler_value, fiedler_vector) = if n >= 2 {
        align_null_space(&eig.values, &mut vectors);
        let mut v: Vec<T> = (0..n).map(|r| vectors[(r, 1)]).collect();
        fix_sign(&mut v);
        for (r, &x) in v.iter().enumerate() {
            vectors[(r, 1)] = x;
        }
        (eig.values[1], v)
    } else {
        (T::zero(), vec![T::zero(); n])
    };
    let degenerate = n >= 3 && (eig.values[2] - eig.values[1]).as_f64() < 1e-8;
    Ok(SpectralResult {
        eigenvalues: eig.values,
        eigenvectors: vectors,
        fiedler_value,
        fiedler_vector,
        degenerate,
    })
}

/// lambda_2 only (no eigenvectors). Zero for fewer than two nodes.
pub fn algebraic_connectivity<T: Scalar>(l: &Laplacian<T>) -> Result<T> {
    check_symmetric(l.matrix())?;
    if l.dim() < 2 {
        return Ok(T::zero());
    }
    let mut values = SymmetricEigen::values_only(l.matrix())?;
    snap_zeros(&mut values);
    Ok(values[1])
}

/// Criticality of one node: 1 / lambda_2 of the graph with the node removed,
/// with lambda_2 floored at `eps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Criticality<T> {
    pub value: T,
    pub clamped: bool,
}

pub fn criticality<T: Scalar>(g: &Graph<T>, n: usize, eps: T) -> Result<Criticality<T>> {
    let reduced = g.without_node(n)?;
    let l2 = algebraic_connectivity(&laplacian(&reduced))?;
    Ok(if l2 > eps {
        Criticality {
            value: T::one() / l2,
            clamped: false,
        }
    } else {
        Criticality {
            value: T::one() / eps,
            clamped: true,
        }
    })
}

/// Criticality of node `n` computed straight from a Laplacian: deleting row
/// and column `n` and folding the removed edge weights back out of the
/// neighbours' diagonals gives the Laplacian of the node-deleted graph.
pub fn criticality_from_laplacian<T: Scalar>(l: &Laplacian<T>, n: usize, eps: T) -> Result<Criticality<T>> {
    let dim = l.dim();
    if n >= dim {
        return Err(Error::NodeOutOfRange { index: n, n_nodes: dim });
    }
    let mut reduced = l.matrix().without(n);
    for (k, j) in (0..dim).filter(|&j| j != n).enumerate() {
        reduced[(k, k)] += l.matrix()[(n, j)];
    }
    let l2 = algebraic_connectivity(&Laplacian(reduced))?;
    Ok(if l2 > eps {
        Criticality {
            value: T::one() / l2,
            clamped: false,
        }
    } else {
        Criticality {
            value: T::one() / eps,
            clamped: true,
        }
    })
}

/// Criticalities of every node of a graph, indexed by node.
#[derive(Debug, Clone, PartialEq)]
pub struct CriticalityReport<T> {
    pub values: Vec<T>,
    pub clamped: Vec<bool>,
}

pub fn criticality_report<T: Scalar>(g: &Graph<T>, eps: T) -> Result<CriticalityReport<T>> {
    let mut values = Vec::with_capacity(g.n_nodes());
    let mut clamped = Vec::with_capacity(g.n_nodes());
    for n in 0..g.n_nodes() {
        let c = criticality(g, n, eps)?;
        values.push(c.value);
        clamped.push(c.clamped);
    }
    Ok(CriticalityReport { values, clamped })
}

/// Upper bound 1 / (lambda_2(G) - 1) on any node's criticality; +inf when
/// lambda_2(G) <= 1.
pub fn criticality_bound<T: Scalar>(lambda2: T) -> T {
    if lambda2 > T::one() {
        T::one() / (lambda2 - T::one())
    } else {
        T::infinity()
    }
}

/// Link weight 1 / (C_u + C_a).
pub fn edge_weight<T: Scalar>(c_u: T, c_a: T) -> Result<T> {
    if !(c_u > T::zero() && c_a > T::zero()) {
        return Err(Error::InvalidArgument(format!(
            "criticalities must be positive, got {c_u} and {c_a}"
        )));
    }
    Ok(T::one() / (c_u + c_a))
}
