//! Feasible UE-RIS-UAV reflected links and the matching constraints on
//! selecting them.

use std::fmt::Write as _;

use crate::channel::{optimal_phases, reflected_link, PhaseConfig};
use crate::error::Result;
use crate::graph::{edge_weight, CriticalityReport, Graph};
use crate::scalar::Scalar;
use crate::scenario::{distance, Scenario};

/// One candidate reflected link.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateLink<T> {
    /// Position in the canonical (u, r, a) lexicographic order.
    pub id: usize,
    pub ue: usize,
    pub ris: usize,
    pub uav: usize,
    /// Graph index of the UE endpoint.
    pub ue_node: usize,
    /// Graph index of the UAV endpoint.
    pub uav_node: usize,
    pub reflected_snr_db: T,
    pub weight: T,
    pub phases: PhaseConfig<T>,
}

impl<T: Scalar> CandidateLink<T> {
    /// A candidate detached from any scenario geometry; the phase vector is
    /// empty and the SNR is +inf.
    pub fn synthetic(id: usize, (ue, ris, uav): (usize, usize, usize), nodes: (usize, usize), weight: T) -> Self {
        Self {
            id,
            ue,
            ris,
            uav,
            ue_node: nodes.0,
            uav_node: nodes.1,
            reflected_snr_db: T::infinity(),
            weight,
            phases: PhaseConfig {
                thetas: Vec::new(),
                ris_index: ris,
                ue_index: ue,
                uav_index: uav,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EnumerateOptions {
    /// Also admit UAVs the UE already reaches directly.
    pub allow_redundant: bool,
}

/// Lists every (u, r, a) with `d(u, r)` within reach, `a` not directly linked
/// to `u`, and coherent reflected SNR at or above the RIS threshold. Weights
/// are 1 / (C_u + C_a). Triples with degenerate geometry (a node exactly
/// below/above the RIS) are skipped.
pub fn enumerate<T: Scalar>(
    s: &Scenario<T>,
    g: &Graph<T>,
    crits: &CriticalityReport<T>,
    opts: EnumerateOptions,
) -> Result<Vec<CandidateLink<T>>> {
    let p = &s.params;
    let mut out = Vec::new();
    for (u, ue) in s.ues.iter().enumerate() {
        let u_node = s.ue_node(u);
        for (r, ris) in s.riss.iter().enumerate() {
            if !p.within_reach(distance(ue, ris)) {
                continue;
            }
            for (a, uav) in s.uavs.iter().enumerate() {
                let a_node = s.uav_node(a);
                if !opts.allow_redundant && g.has_edge(u_node, a_node) {
                    continue;
                }
                let Ok((thetas, snr_db)) = reflected_link(ue, ris, uav, p) else {
                    continue;
                };
                if !(snr_db >= p.thr_ris_db) {
                    continue;
                }
                let weight = edge_weight(crits.values[u_node], crits.values[a_node])?;
                out.push(CandidateLink {
                    id: out.len(),
                    ue: u,
                    ris: r,
                    uav: a,
                    ue_node: u_node,
                    uav_node: a_node,
                    reflected_snr_db: snr_db,
                    weight,
                    phases: PhaseConfig {
                        thetas,
                        ris_index: r,
                        ue_index: u,
                        uav_index: a,
                    },
                });
            }
        }
    }
    Ok(out)
}

/// Recomputes coherent phases for a candidate (cheap sanity hook for callers
/// holding only ids).
pub fn phases_for<T: Scalar>(s: &Scenario<T>, c: &CandidateLink<T>) -> Result<Vec<T>> {
    optimal_phases(&s.ues[c.ue], &s.riss[c.ris], &s.uavs[c.uav], &s.params)
}

/// CSV dump `id,u,r,a,snr_db,w_l`.
pub fn to_csv<T: Scalar>(cands: &[CandidateLink<T>]) -> String {
    let mut out = String::from("id,u,r,a,snr_db,w_l\n");
    for c in cands {
        let _ = writeln!(out, "{},{},{},{},{},{}", c.id, c.ue, c.ris, c.uav, c.reflected_snr_db, c.weight);
    }
    out
}

/// Limits on a selection: at most `max_links` links, each UE, RIS and UAV
/// used once, and optionally pairwise-disjoint RIS coverage among the
/// selected UEs.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionConstraints {
    pub max_links: usize,
    pub strict_coverage: bool,
    /// Reachable RIS indices per UE; only consulted in strict mode.
    pub reachable: Vec<Vec<usize>>,
}

impl SelectionConstraints {
    pub fn new(max_links: usize) -> Self {
        Self {
            max_links,
            strict_coverage: false,
            reachable: Vec::new(),
        }
    }

    pub fn for_scenario<T: Scalar>(s: &Scenario<T>, strict_coverage: bool) -> Self {
        Self {
            max_links: s.ris_count(),
            strict_coverage,
            reachable: (0..s.ue_count()).map(|u| s.reachable_riss(u)).collect(),
        }
    }

    pub fn with_max_links(mut self, max_links: usize) -> Self {
        self.max_links = max_links;
        self
    }

    pub fn occupancy(&self) -> Occupancy<'_> {
        Occupancy {
            constraints: self,
            ues: Vec::new(),
            riss: Vec::new(),
            uavs: Vec::new(),
            covered: Vec::new(),
        }
    }
}

/// Incremental feasibility tracker for a growing selection.
#[derive(Debug, Clone)]
pub struct Occupancy<'a> {
    constraints: &'a SelectionConstraints,
    ues: Vec<usize>,
    riss: Vec<usize>,
    uavs: Vec<usize>,
    covered: Vec<usize>,
}

impl Occupancy<'_> {
    pub fn len(&self) -> usize {
        self.ues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ues.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.len() >= self.constraints.max_links
    }

    fn coverage(&self, ue: usize) -> &[usize] {
        self.constraints.reachable.get(ue).map_or(&[], Vec::as_slice)
    }

    /// Whether adding `c` keeps the selection feasible.
    pub fn admits<T>(&self, c: &CandidateLink<T>) -> bool {
        if self.is_full() || self.ues.contains(&c.ue) || self.riss.contains(&c.ris) || self.uavs.contains(&c.uav) {
            return false;
        }
        !self.constraints.strict_coverage || self.coverage(c.ue).iter().all(|r| !self.covered.contains(r))
    }

    pub fn insert<T>(&mut self, c: &CandidateLink<T>) {
        self.ues.push(c.ue);
        self.riss.push(c.ris);
        self.uavs.push(c.uav);
        if self.constraints.strict_coverage {
            let cov = self.coverage(c.ue).to_vec();
            self.covered.extend(cov);
        }
    }

    /// Undoes the most recent [`Occupancy::insert`].
    pub fn pop(&mut self) {
        if let Some(ue) = self.ues.pop() {
            self.riss.pop();
            self.uavs.pop();
            if self.constraints.strict_coverage {
                let n = self.coverage(ue).len();
                self.covered.truncate(self.covered.len() - n);
            }
        }
    }
}

/// True iff the selection respects every constraint.
pub fn is_feasible<T>(sel: &[&CandidateLink<T>], c: &SelectionConstraints) -> bool {
    let mut occ = c.occupancy();
    for link in sel {
        if !occ.admits(link) {
            return false;
        }
        occ.insert(link);
    }
    true
}
