//! Far-field DFT and near-field polar-domain ULA codebooks.
//!
//! Angles follow `θ_n = (2n − N + 1)/N` for `n = 0..N`. The polar codebook
//! adds, per angle, distance rings `r_s = N²d²(1−θ²)/(2sβ²λ)` for `s = 1, 2, …`
//! down to a floor distance; ring `s = 0` is the far-field codeword.

use ndarray::Array1;
use num_complex::Complex64;

use crate::error::{NfError, Result};
use crate::geometry::{ArrayGeometry, PolarPoint};
use crate::steering::{ff_steering, inner, nf_steering};

/// Column-coherence parameter giving roughly 0.5 coherence between rings.
pub const DEFAULT_BETA: f64 = 1.6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CodebookKind {
    FarField,
    NearField,
}

impl CodebookKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            CodebookKind::FarField => "FF",
            CodebookKind::NearField => "NF",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "FF" => Some(CodebookKind::FarField),
            "NF" => Some(CodebookKind::NearField),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Codeword {
    pub weights: Array1<Complex64>,
    pub theta: f64,
    /// Focus distance, `f64::INFINITY` for a far-field beam.
    pub r: f64,
    pub angle_index: usize,
    pub ring: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    pub kind: CodebookKind,
    pub codewords: Vec<Codeword>,
    pub geometry: ArrayGeometry,
    pub beta: Option<f64>,
    pub r_floor: Option<f64>,
}

impl Codebook {
    pub fn len(&self) -> usize {
        self.codewords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codewords.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Codeword> {
        self.codewords.iter()
    }

    /// Number of rings `S_n` for each angle index.
    pub fn rings_per_angle(&self) -> Vec<usize> {
        let n = self.geometry.num_elements();
        let mut counts = vec![0; n];
        for cw in &self.codewords {
            counts[cw.angle_index] += 1;
        }
        counts
    }
}

pub fn angle_grid(num_elements: usize) -> Vec<f64> {
    let n = num_elements as f64;
    (0..num_elements).map(|i| (2.0 * i as f64 - n + 1.0) / n).collect()
}

fn ula_spacing(geom: &ArrayGeometry) -> Result<f64> {
    geom.spacing().ok_or(NfError::NotUla)
}

/// Beam towards `(theta, r)`; `r = ∞` gives the planar beam.
pub fn beam(geom: &ArrayGeometry, theta: f64, r: f64) -> Result<Array1<Complex64>> {
    if r.is_infinite() {
        Ok(ff_steering(geom, theta)?.entries)
    } else {
        Ok(nf_steering(geom, PolarPoint::new(theta, r)?)?.entries)
    }
}

pub fn build_ff_codebook(geom: &ArrayGeometry) -> Result<Codebook> {
    ula_spacing(geom)?;
    let codewords = angle_grid(geom.num_elements())
        .into_iter()
        .enumerate()
        .map(|(n, theta)| {
            Ok(Codeword { weights: ff_steering(geom, theta)?.entries, theta, r: f64::INFINITY, angle_index: n, ring: 0 })
        })
        .collect::<Result<_>>()?;
    Ok(Codebook { kind: CodebookKind::FarField, codewords, geometry: *geom, beta: None, r_floor: None })
}

/// Ring distances for one angle: `∞` followed by strictly decreasing finite
/// rings that stay at or above `r_floor`.
pub fn distance_rings(geom: &ArrayGeometry, theta: f64, beta: f64, r_floor: f64) -> Result<Vec<f64>> {
    let d = ula_spacing(geom)?;
    if !(beta > 0.0) {
        return Err(NfError::Config(format!("beta must be positive, got {beta}")));
    }
    if !(r_floor > 0.0) {
        return Err(NfError::Config(format!("r_floor must be positive, got {r_floor}")));
    }
    let n = geom.num_elements() as f64;
    let scale = n * n * d * d * (1.0 - theta * theta) / (2.0 * beta * beta * geom.wavelength());
    let mut rings = vec![f64::INFINITY];
    if scale <= 0.0 {
        return Ok(rings);
    }
    let mut s = 1.0;
    loop {
        let r = scale / s;
        if r < r_floor {
            break;
        }
        rings.push(r);
        s += 1.0;
    }
    Ok(rings)
}

pub fn build_nf_codebook(geom: &ArrayGeometry, beta: f64, r_floor: f64) -> Result<Codebook> {
    let mut codewords = Vec::new();
    for (n, theta) in angle_grid(geom.num_elements()).into_iter().enumerate() {
        for (s, r) in distance_rings(geom, theta, beta, r_floor)?.into_iter().enumerate() {
            codewords.push(Codeword { weights: beam(geom, theta, r)?, theta, r, angle_index: n, ring: s });
        }
    }
    Ok(Codebook {
        kind: CodebookKind::NearField,
        codewords,
        geometry: *geom,
        beta: Some(beta),
        r_floor: Some(r_floor),
    })
}

pub fn build_codebook(geom: &ArrayGeometry, kind: CodebookKind, beta: f64, r_floor: f64) -> Result<Codebook> {
    match kind {
        CodebookKind::FarField => build_ff_codebook(geom),
        CodebookKind::NearField => build_nf_codebook(geom, beta, r_floor),
    }
}

/// `|a(θ, r_a)ᴴ a(θ, r_b)|`.
pub fn column_coherence(geom: &ArrayGeometry, theta: f64, r_a: f64, r_b: f64) -> Result<f64> {
    let a = beam(geom, theta, r_a)?;
    let b = beam(geom, theta, r_b)?;
    Ok(inner(&a, &b).norm())
}
