//! Exact spherical, planar and second-order (Fresnel) steering vectors.
//!
//! Every model is expressed as a per-element path-length difference
//! `r⁽ⁿ⁾ − r` relative to the array origin; the steering entry is
//! `exp(−j2π(r⁽ⁿ⁾ − r)/λ)/√N`.

use std::f64::consts::PI;

use ndarray::Array1;
use num_complex::Complex64;

use crate::error::{NfError, Result};
use crate::geometry::{dist2, ArrayGeometry, PolarPoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SteeringModel {
    ExactSpherical,
    PlanarFF,
    FresnelSecondOrder,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SteeringVector {
    pub entries: Array1<Complex64>,
    pub label: PolarPoint,
    pub model: SteeringModel,
}

impl SteeringVector {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn norm(&self) -> f64 {
        vector_norm(&self.entries)
    }

    /// `selfᴴ · other`
    pub fn inner(&self, other: &Array1<Complex64>) -> Complex64 {
        inner(&self.entries, other)
    }
}

/// `aᴴ · b`
pub fn inner(a: &Array1<Complex64>, b: &Array1<Complex64>) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

pub fn vector_norm(v: &Array1<Complex64>) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn check_user(geom: &ArrayGeometry, p: &PolarPoint) -> Result<()> {
    if !(p.r > geom.max_element_offset()) {
        return Err(NfError::DegenerateGeometry(format!(
            "user distance {} m does not clear the array (max element offset {} m)",
            p.r,
            geom.max_element_offset()
        )));
    }
    Ok(())
}

/// Per-element `r⁽ⁿ⁾ − r` under the chosen model.
pub fn path_differences(
    geom: &ArrayGeometry,
    p: &PolarPoint,
    model: SteeringModel,
) -> Result<Vec<f64>> {
    let u = p.direction();
    let elements = geom.element_positions();
    match model {
        SteeringModel::PlanarFF => Ok(elements.iter().map(|e| -(e[0] * u[0] + e[1] * u[1])).collect()),
        SteeringModel::ExactSpherical => {
            if p.is_far() {
                return Err(NfError::InvalidPoint("exact model needs a finite distance".into()));
            }
            check_user(geom, p)?;
            let user = p.position();
            elements
                .iter()
                .map(|e| {
                    let rn = dist2(user, *e);
                    if rn <= f64::EPSILON * p.r {
                        return Err(NfError::DegenerateGeometry("user coincides with an element".into()));
                    }
                    // (|e|² − 2 u·e) / (r⁽ⁿ⁾ + r) avoids cancellation at large r
                    let ee = e[0] * e[0] + e[1] * e[1];
                    let ue = user[0] * e[0] + user[1] * e[1];
                    Ok((ee - 2.0 * ue) / (rn + p.r))
                })
                .collect()
        }
        SteeringModel::FresnelSecondOrder => {
            if !p.is_far() {
                check_user(geom, p)?;
            }
            Ok(elements
                .iter()
                .map(|e| {
                    let proj = e[0] * u[0] + e[1] * u[1];
                    let ee = e[0] * e[0] + e[1] * e[1];
                    let quad = if p.is_far() { 0.0 } else { (ee - proj * proj) / (2.0 * p.r) };
                    -proj + quad
                })
                .collect())
        }
    }
}

pub fn steering(geom: &ArrayGeometry, p: PolarPoint, model: SteeringModel) -> Result<SteeringVector> {
    let lambda = geom.wavelength();
    let scale = 1.0 / (geom.num_elements() as f64).sqrt();
    let entries = path_differences(geom, &p, model)?
        .into_iter()
        .map(|delta| Complex64::from_polar(scale, -2.0 * PI * delta / lambda))
        .collect();
    Ok(SteeringVector { entries, label: p, model })
}

/// Exact spherical-wavefront steering vector.
pub fn nf_steering(geom: &ArrayGeometry, p: PolarPoint) -> Result<SteeringVector> {
    steering(geom, p, SteeringModel::ExactSpherical)
}

/// Planar-wavefront steering vector towards spatial angle `theta`.
pub fn ff_steering(geom: &ArrayGeometry, theta: f64) -> Result<SteeringVector> {
    steering(geom, PolarPoint::far(theta)?, SteeringModel::PlanarFF)
}

pub fn fresnel_steering(geom: &ArrayGeometry, p: PolarPoint) -> Result<SteeringVector> {
    steering(geom, p, SteeringModel::FresnelSecondOrder)
}

/// Largest per-element phase deviation (radians) of `model` from the exact
/// spherical model, computed from path lengths so it is not wrapped.
pub fn phase_error(geom: &ArrayGeometry, p: PolarPoint, model: SteeringModel) -> Result<f64> {
    let exact = path_differences(geom, &p, SteeringModel::ExactSpherical)?;
    let approx = path_differences(geom, &p, model)?;
    let k = 2.0 * PI / geom.wavelength();
    Ok(exact
        .iter()
        .zip(&approx)
        .map(|(a, b)| k * (a - b).abs())
        .fold(0.0, f64::max))
}

/// Element-indexed phase, unwrapped so successive differences lie in `(−π, π]`.
pub fn phase_profile(v: &SteeringVector) -> Vec<f64> {
    unwrap_phases(v.entries.iter().map(|z| z.arg()))
}

pub fn unwrap_phases(phases: impl IntoIterator<Item = f64>) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::new();
    for phase in phases {
        match out.last() {
            None => out.push(phase),
            Some(&prev) => {
                let mut step = (phase - prev).rem_euclid(2.0 * PI);
                if step > PI {
                    step -= 2.0 * PI;
                }
                out.push(prev + step);
            }
        }
    }
    out
}
