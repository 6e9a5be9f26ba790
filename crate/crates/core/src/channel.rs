//! Propagation model: direct-link SNRs, RIS array responses, cascaded
//! UE-RIS-UAV channels and the coherent phase configuration.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{linear_to_db, Scalar};
use crate::scenario::{distance, Point3, RadioParams};

/// SNR of a UE-UAV link as a linear ratio: d^-alpha * p / N0.
pub fn snr_ue_uav<T: Scalar>(d: T, params: &RadioParams<T>) -> Result<T> {
    if !(d > T::zero()) {
        return Err(Error::InvalidArgument(format!("UE-UAV distance must be positive, got {d}")));
    }
    Ok(d.powf(-params.pathloss_exponent) * params.ue_power_w / params.noise_w)
}

/// Free-space path loss 20 log10(4 pi f_c d / c) in dB.
pub fn free_space_pathloss_db<T: Scalar>(d: T, params: &RadioParams<T>) -> T {
    T::lit(20.0) * (T::lit(4.0) * T::PI() * params.carrier_freq_hz * d / params.lightspeed_m_s).log10()
}

/// SNR of a UAV-UAV link in dB.
pub fn snr_uav_uav<T: Scalar>(d: T, params: &RadioParams<T>) -> Result<T> {
    if !(d > T::zero()) {
        return Err(Error::InvalidArgument(format!("UAV-UAV distance must be positive, got {d}")));
    }
    Ok(linear_to_db(params.uav_power_w) - free_space_pathloss_db(d, params) - linear_to_db(params.noise_w))
}

/// Direction terms of an array response: (row term, column term, elevation term).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Angles<T> {
    pub row: T,
    pub col: T,
    pub elev: T,
}

/// Unit-modulus steering vector of a uniform planar RIS.
///
/// Element `(m_b, m_c)` lives at index `m_b * M_c + m_c`.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrayResponse<T> {
    pub entries: Vec<Complex<T>>,
    pub angles: Angles<T>,
}

fn horizontal_guard<T: Scalar>(a: &Point3<T>, b: &Point3<T>, what: &str) -> Result<T> {
    let rho = a.horizontal_distance(b);
    if !(rho > T::zero()) {
        return Err(Error::DegenerateGeometry(format!("{what}: zero horizontal separation")));
    }
    Ok(rho)
}

/// Angles of arrival at the RIS for a signal from a UE.
pub fn angles_ue_ris<T: Scalar>(ue: &Point3<T>, ris: &Point3<T>) -> Result<Angles<T>> {
    let rho = horizontal_guard(ue, ris, "UE-RIS")?;
    Ok(Angles {
        row: (ue.y - ris.y) / rho,
        col: (ris.x - ue.x) / rho,
        elev: -ris.z / distance(ue, ris),
    })
}

/// Angles of departure from the RIS toward a UAV.
pub fn angles_ris_uav<T: Scalar>(ris: &Point3<T>, uav: &Point3<T>) -> Result<Angles<T>> {
    let rho = horizontal_guard(ris, uav, "RIS-UAV")?;
    Ok(Angles {
        row: (ris.y - uav.y) / rho,
        col: (ris.x - uav.x) / rho,
        elev: (ris.z - uav.z) / distance(ris, uav),
    })
}

/// Per-element phase progression 2 pi / lambda * (d_b m_b row + d_c m_c col) * elev.
fn element_phase<T: Scalar>(angles: &Angles<T>, m_b: usize, m_c: usize, params: &RadioParams<T>) -> T {
    let k = T::TAU() / params.wavelength();
    k * (params.row_spacing_m * T::from_usize_lossy(m_b) * angles.row
        + params.col_spacing_m * T::from_usize_lossy(m_c) * angles.col)
        * angles.elev
}

fn response_from_angles<T: Scalar>(angles: Angles<T>, params: &RadioParams<T>) -> ArrayResponse<T> {
    let mut entries = Vec::with_capacity(params.elements());
    for m_b in 0..params.ris_rows {
        for m_c in 0..params.ris_cols {
            entries.push(Complex::from_polar(T::one(), -element_phase(&angles, m_b, m_c, params)));
        }
    }
    ArrayResponse { entries, angles }
}

pub fn array_response_ue_ris<T: Scalar>(
    ue: &Point3<T>,
    ris: &Point3<T>,
    params: &RadioParams<T>,
) -> Result<ArrayResponse<T>> {
    Ok(response_from_angles(angles_ue_ris(ue, ris)?, params))
}

pub fn array_response_ris_uav<T: Scalar>(
    ris: &Point3<T>,
    uav: &Point3<T>,
    params: &RadioParams<T>,
) -> Result<ArrayResponse<T>> {
    Ok(response_from_angles(angles_ris_uav(ris, uav)?, params))
}

fn scaled<T: Scalar>(resp: ArrayResponse<T>, d: T, params: &RadioParams<T>) -> Vec<Complex<T>> {
    let gain = (params.ref_pathloss / (d * d)).sqrt();
    resp.entries.into_iter().map(|e| e * gain).collect()
}

/// LoS channel h^UR = sqrt(beta0 / d^2) * array response.
pub fn channel_ue_ris<T: Scalar>(ue: &Point3<T>, ris: &Point3<T>, params: &RadioParams<T>) -> Result<Vec<Complex<T>>> {
    let resp = array_response_ue_ris(ue, ris, params)?;
    Ok(scaled(resp, distance(ue, ris), params))
}

/// LoS channel h^RA = sqrt(beta0 / d^2) * array response.
pub fn channel_ris_uav<T: Scalar>(ris: &Point3<T>, uav: &Point3<T>, params: &RadioParams<T>) -> Result<Vec<Complex<T>>> {
    let resp = array_response_ris_uav(ris, uav, params)?;
    Ok(scaled(resp, distance(ris, uav), params))
}

/// Phase shifts of one RIS steering UE `ue_index` to UAV `uav_index`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseConfig<T> {
    /// Radians in [0, 2 pi).
    pub thetas: Vec<T>,
    pub ris_index: usize,
    pub ue_index: usize,
    pub uav_index: usize,
}

/// Wraps an angle into [0, 2 pi).
pub fn wrap_phase<T: Scalar>(theta: T) -> T {
    let tau = T::TAU();
    let mut w = theta % tau;
    if w < T::zero() {
        w += tau;
    }
    // -tiny % tau + tau can round up to exactly tau
    if w >= tau {
        w = T::zero();
    }
    w
}

/// (h^RA)^H diag(e^{j theta}) h^UR.
pub fn cascaded_channel<T: Scalar>(h_ra: &[Complex<T>], thetas: &[T], h_ur: &[Complex<T>]) -> Result<Complex<T>> {
    if h_ra.len() != thetas.len() || h_ur.len() != thetas.len() {
        return Err(Error::InvalidArgument(format!(
            "length mismatch: h_ra {}, theta {}, h_ur {}",
            h_ra.len(),
            thetas.len(),
            h_ur.len()
        )));
    }
    Ok(h_ra
        .iter()
        .zip(thetas)
        .zip(h_ur)
        .map(|((a, &t), b)| a.conj() * Complex::from_polar(T::one(), t) * b)
        .fold(Complex::new(T::zero(), T::zero()), |acc, x| acc + x))
}

/// Reflected-link SNR p |h|^2 / N0 (linear).
pub fn snr_reflected<T: Scalar>(h: Complex<T>, params: &RadioParams<T>) -> T {
    params.ue_power_w * h.norm_sqr() / params.noise_w
}

/// Phase shifts that align every element of the cascaded sum.
///
/// Element `m` contributes with phase theta_m + phi^RA_m - phi^UR_m, where
/// phi are the steering phases of the two hops; choosing
/// theta_m = phi^UR_m - phi^RA_m makes the sum fully coherent.
pub fn optimal_phases<T: Scalar>(
    ue: &Point3<T>,
    ris: &Point3<T>,
    uav: &Point3<T>,
    params: &RadioParams<T>,
) -> Result<Vec<T>> {
    let ur = angles_ue_ris(ue, ris)?;
    let ra = angles_ris_uav(ris, uav)?;
    let mut thetas = Vec::with_capacity(params.elements());
    for m_b in 0..params.ris_rows {
        for m_c in 0..params.ris_cols {
            thetas.push(wrap_phase(
                element_phase(&ur, m_b, m_c, params) - element_phase(&ra, m_b, m_c, params),
            ));
        }
    }
    Ok(thetas)
}

/// Coherent phases for a (UE, RIS, UAV) triple, tagged with indices.
pub fn phase_config<T: Scalar>(
    ue: (usize, &Point3<T>),
    ris: (usize, &Point3<T>),
    uav: (usize, &Point3<T>),
    params: &RadioParams<T>,
) -> Result<PhaseConfig<T>> {
    Ok(PhaseConfig {
        thetas: optimal_phases(ue.1, ris.1, uav.1, params)?,
        ris_index: ris.0,
        ue_index: ue.0,
        uav_index: uav.0,
    })
}

/// Magnitude reached by a perfectly coherent RIS: M beta0 / (d_UR d_RA).
pub fn coherent_gain<T: Scalar>(d_ur: T, d_ra: T, params: &RadioParams<T>) -> T {
    T::from_usize_lossy(params.elements()) * params.ref_pathloss / (d_ur * d_ra)
}

/// Evaluates one UE-RIS-UAV triple with coherent phases; returns the phases
/// and the reflected SNR in dB.
pub fn reflected_link<T: Scalar>(
    ue: &Point3<T>,
    ris: &Point3<T>,
    uav: &Point3<T>,
    params: &RadioParams<T>,
) -> Result<(Vec<T>, T)> {
    let h_ur = channel_ue_ris(ue, ris, params)?;
    let h_ra = channel_ris_uav(ris, uav, params)?;
    let thetas = optimal_phases(ue, ris, uav, params)?;
    let h = cascaded_channel(&h_ra, &thetas, &h_ur)?;
    Ok((thetas, linear_to_db(snr_reflected(h, params))))
}
