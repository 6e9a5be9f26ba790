//! Node placement and radio parameters.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{dbm_to_watts, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point3<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Scalar> Point3<T> {
    pub fn new(x: T, y: T, z: T) -> Self {
        Self { x, y, z }
    }

    pub fn ground(x: T, y: T) -> Self {
        Self::new(x, y, T::zero())
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Distance in the horizontal (x, y) plane.
    pub fn horizontal_distance(&self, other: &Self) -> T {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Euclidean distance in meters.
pub fn distance<T: Scalar>(p: &Point3<T>, q: &Point3<T>) -> T {
    let dx = p.x - q.x;
    let dy = p.y - q.y;
    let dz = p.z - q.z;
    (dx * dx + dy * dy + dz * dz).sqrt()
}

/// Propagation and threshold parameters. Powers are linear watts, distances
/// meters, thresholds dB.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadioParams<T> {
    pub carrier_freq_hz: T,
    pub lightspeed_m_s: T,
    pub pathloss_exponent: T,
    pub ue_power_w: T,
    pub uav_power_w: T,
    pub noise_w: T,
    /// Path loss at the 1 m reference distance (linear).
    pub ref_pathloss: T,
    pub ris_rows: usize,
    pub ris_cols: usize,
    pub row_spacing_m: T,
    pub col_spacing_m: T,
    pub thr_ue_uav_db: T,
    pub thr_uav_uav_db: T,
    pub thr_ris_db: T,
    /// UE-to-RIS reach. `None` means unlimited.
    pub ris_reach_m: Option<T>,
    /// Floor applied to lambda_2 of a node-deleted graph before inverting.
    pub epsilon: T,
}

impl<T: Scalar> Default for RadioParams<T> {
    fn default() -> Self {
        Self {
            carrier_freq_hz: T::lit(3e9),
            lightspeed_m_s: T::lit(3e8),
            pathloss_exponent: T::lit(4.0),
            ue_power_w: T::lit(1.0),
            uav_power_w: T::lit(5.0),
            noise_w: dbm_to_watts(T::lit(-130.0)),
            ref_pathloss: T::lit(1e-6),
            ris_rows: 10,
            ris_cols: 10,
            row_spacing_m: T::lit(0.05),
            col_spacing_m: T::lit(0.05),
            thr_ue_uav_db: T::lit(85.0),
            thr_uav_uav_db: T::lit(80.0),
            thr_ris_db: T::lit(30.0),
            ris_reach_m: None,
            epsilon: T::lit(1e-5),
        }
    }
}

impl<T: Scalar> RadioParams<T> {
    /// Number of reflecting elements per RIS.
    pub fn elements(&self) -> usize {
        self.ris_rows * self.ris_cols
    }

    pub fn wavelength(&self) -> T {
        self.lightspeed_m_s / self.carrier_freq_hz
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("carrier_freq_hz", self.carrier_freq_hz),
            ("lightspeed_m_s", self.lightspeed_m_s),
            ("pathloss_exponent", self.pathloss_exponent),
            ("ue_power_w", self.ue_power_w),
            ("uav_power_w", self.uav_power_w),
            ("noise_w", self.noise_w),
            ("ref_pathloss", self.ref_pathloss),
            ("row_spacing_m", self.row_spacing_m),
            ("col_spacing_m", self.col_spacing_m),
            ("epsilon", self.epsilon),
        ];
        for (name, value) in positive {
            if !(value > T::zero() && value.is_finite()) {
                return Err(Error::InvalidArgument(format!("{name} must be positive, got {value}")));
            }
        }
        if let Some(reach) = self.ris_reach_m {
            if !(reach > T::zero()) {
                return Err(Error::InvalidArgument(format!("ris_reach_m must be positive, got {reach}")));
            }
        }
        if self.elements() == 0 {
            return Err(Error::InvalidArgument("RIS needs at least one element".into()));
        }
        for (name, value) in [
            ("thr_ue_uav_db", self.thr_ue_uav_db),
            ("thr_uav_uav_db", self.thr_uav_uav_db),
        ] {
            if value.is_nan() {
                return Err(Error::InvalidArgument(format!("{name} is NaN")));
            }
        }
        if self.thr_ris_db.is_nan() {
            return Err(Error::InvalidArgument("thr_ris_db is NaN".into()));
        }
        Ok(())
    }

    /// Whether a UE at distance `d` may use a RIS.
    pub fn within_reach(&self, d: T) -> bool {
        self.ris_reach_m.map_or(true, |reach| d <= reach)
    }
}

/// Kind of a graph node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NodeKind {
    Ue,
    Uav,
}

/// Immutable placement of UEs, UAVs and RISs.
///
/// Graph indices: UEs are `0..U`, UAVs are `U..U+A`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario<T> {
    pub ues: Vec<Point3<T>>,
    pub uavs: Vec<Point3<T>>,
    pub riss: Vec<Point3<T>>,
    pub params: RadioParams<T>,
    pub seed: u64,
}

/// Inputs to [`generate_random`] besides the seed and radio parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Layout<T> {
    pub ue_count: usize,
    pub uav_count: usize,
    pub ris_count: usize,
    pub area_w_m: T,
    pub area_h_m: T,
    pub uav_alt_m: T,
    pub ris_alt_m: T,
    /// Explicit RIS (x, y) coordinates. When set, its length must equal
    /// `ris_count`; otherwise RISs are placed on a grid over the area.
    pub ris_xy: Option<Vec<(T, T)>>,
}

impl<T: Scalar> Layout<T> {
    pub fn new(counts: (usize, usize, usize), area_m: (T, T), altitudes: (T, T)) -> Self {
        Self {
            ue_count: counts.0,
            uav_count: counts.1,
            ris_count: counts.2,
            area_w_m: area_m.0,
            area_h_m: area_m.1,
            uav_alt_m: altitudes.0,
            ris_alt_m: altitudes.1,
            ris_xy: None,
        }
    }
}

/// `count` points on the cell centers of a near-square grid spanning the area,
/// filled row by row.
pub fn ris_grid<T: Scalar>(count: usize, width: T, height: T) -> Vec<(T, T)> {
    if count == 0 {
        return Vec::new();
    }
    let cols = (count as f64).sqrt().ceil() as usize;
    let rows = count.div_ceil(cols);
    let half = T::lit(0.5);
    (0..count)
        .map(|k| {
            let (r, c) = (k / cols, k % cols);
            (
                (T::from_usize_lossy(c) + half) * width / T::from_usize_lossy(cols),
                (T::from_usize_lossy(r) + half) * height / T::from_usize_lossy(rows),
            )
        })
        .collect()
}

/// Draws a random scenario.
///
/// The generator is ChaCha8 seeded with `seed`. UE positions are drawn first
/// (x then y per UE), then UAV positions, each uniform over the area.
pub fn generate_random<T: Scalar>(seed: u64, layout: &Layout<T>, params: RadioParams<T>) -> Result<Scenario<T>> {
    if layout.ue_count < 1 || layout.uav_count < 1 {
        return Err(Error::InvalidArgument(format!(
            "need at least one UE and one UAV, got U={} A={}",
            layout.ue_count, layout.uav_count
        )));
    }
    let (w, h) = (layout.area_w_m, layout.area_h_m);
    if !(w > T::zero() && h > T::zero() && w.is_finite() && h.is_finite()) {
        return Err(Error::InvalidArgument(format!("area must be positive, got {w} x {h}")));
    }
    params.validate()?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (wf, hf) = (w.as_f64(), h.as_f64());
    let draw = |rng: &mut ChaCha8Rng| (T::lit(rng.gen::<f64>() * wf), T::lit(rng.gen::<f64>() * hf));

    let ues = (0..layout.ue_count)
        .map(|_| {
            let (x, y) = draw(&mut rng);
            Point3::ground(x, y)
        })
        .collect();
    let uavs = (0..layout.uav_count)
        .map(|_| {
            let (x, y) = draw(&mut rng);
            Point3::new(x, y, layout.uav_alt_m)
        })
        .collect();

    let ris_xy = match &layout.ris_xy {
        Some(xy) => {
            if xy.len() != layout.ris_count {
                return Err(Error::InvalidArgument(format!(
                    "{} RIS coordinates given for ris_count = {}",
                    xy.len(),
                    layout.ris_count
                )));
            }
            xy.clone()
        }
        None => ris_grid(layout.ris_count, w, h),
    };
    let riss = ris_xy
        .into_iter()
        .map(|(x, y)| Point3::new(x, y, layout.ris_alt_m))
        .collect();

    Scenario::new(ues, uavs, riss, params, seed)
}

impl<T: Scalar> Scenario<T> {
    pub fn new(
        ues: Vec<Point3<T>>,
        uavs: Vec<Point3<T>>,
        riss: Vec<Point3<T>>,
        params: RadioParams<T>,
        seed: u64,
    ) -> Result<Self> {
        if ues.is_empty() || uavs.is_empty() {
            return Err(Error::InvalidArgument("need at least one UE and one UAV".into()));
        }
        if !ues.iter().chain(&uavs).chain(&riss).all(Point3::is_finite) {
            return Err(Error::InvalidArgument("non-finite node position".into()));
        }
        params.validate()?;
        Ok(Self {
            ues,
            uavs,
            riss,
            params,
            seed,
        })
    }

    pub fn ue_count(&self) -> usize {
        self.ues.len()
    }

    pub fn uav_count(&self) -> usize {
        self.uavs.len()
    }

    pub fn ris_count(&self) -> usize {
        self.riss.len()
    }

    /// V = U + A.
    pub fn n_nodes(&self) -> usize {
        self.ues.len() + self.uavs.len()
    }

    pub fn ue_node(&self, u: usize) -> usize {
        u
    }

    pub fn uav_node(&self, a: usize) -> usize {
        self.ues.len() + a
    }

    pub fn node_kind(&self, node: usize) -> NodeKind {
        if node < self.ues.len() {
            NodeKind::Ue
        } else {
            NodeKind::Uav
        }
    }

    /// Position of a graph node.
    pub fn node_position(&self, node: usize) -> Point3<T> {
        match self.node_kind(node) {
            NodeKind::Ue => self.ues[node],
            NodeKind::Uav => self.uavs[node - self.ues.len()],
        }
    }

    /// RISs within reach of UE `u`, ascending.
    pub fn reachable_riss(&self, u: usize) -> Vec<usize> {
        (0..self.riss.len())
            .filter(|&r| self.params.within_reach(distance(&self.ues[u], &self.riss[r])))
            .collect()
    }
}
