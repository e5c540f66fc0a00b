//! Multipath channel composition `h(f) = (S ⊙ A(f)) · H(f)`.
//!
//! `S` is the N×K spatial non-stationarity mask, `A(f)` the spherical-wavefront
//! array manifold relative to the array origin and `H(f)` the per-path CFR at
//! the origin.

use std::f64::consts::PI;

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::error::{NfError, Result};
use crate::geometry::{dist2, norm2, ArrayGeometry, PolarPoint, SPEED_OF_LIGHT};
use crate::steering::nf_steering;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PathKind {
    LoS,
    NLoS,
}

impl PathKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            PathKind::LoS => "LoS",
            PathKind::NLoS => "NLoS",
        }
    }
}

/// One multipath component. For the LoS path `first_scatterer` is the user.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Path {
    pub amplitude: Complex64,
    pub delay: f64,
    pub first_scatterer: [f64; 2],
    pub kind: PathKind,
}

/// Contiguous run of elements seeing a path, with raised-cosine edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VisibilityRegion {
    pub center_index: usize,
    pub length: usize,
    pub edge_width: usize,
}

impl VisibilityRegion {
    /// Mask column over `n` elements. The core `[start, start+length)` is
    /// centred on `center_index` and shifted to lie inside the array; the
    /// ramps are clipped at the array ends.
    pub fn column(&self, n: usize) -> Vec<f64> {
        let len = self.length.clamp(1, n) as i64;
        let center = self.center_index.min(n - 1) as i64;
        let start = (center - (len - 1) / 2).clamp(0, n as i64 - len);
        let end = start + len - 1;
        let w = self.edge_width as i64;
        (0..n as i64)
            .map(|m| {
                let outside = if m < start {
                    start - m
                } else if m > end {
                    m - end
                } else {
                    0
                };
                if outside == 0 {
                    1.0
                } else if outside <= w {
                    0.5 * (1.0 + (PI * outside as f64 / (w + 1) as f64).cos())
                } else {
                    0.0
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SnsMask {
    pub values: Array2<f64>,
    /// Per-path provenance; `None` marks a fully visible path.
    pub regions: Vec<Option<VisibilityRegion>>,
}

impl SnsMask {
    pub fn all_visible(num_elements: usize, num_paths: usize) -> Self {
        Self {
            values: Array2::ones((num_elements, num_paths)),
            regions: vec![None; num_paths],
        }
    }

    pub fn num_elements(&self) -> usize {
        self.values.nrows()
    }

    pub fn num_paths(&self) -> usize {
        self.values.ncols()
    }

    /// Indices of elements with a nonzero entry for path `k`.
    pub fn support(&self, k: usize) -> Vec<usize> {
        self.values
            .column(k)
            .iter()
            .enumerate()
            .filter(|(_, &s)| s > 0.0)
            .map(|(m, _)| m)
            .collect()
    }
}

/// `H(f)`: `α_k·exp(−j2πfτ_k)` per path.
pub fn cfr_paths(paths: &[Path], f: f64) -> Result<Array1<Complex64>> {
    if !(f > 0.0) {
        return Err(NfError::InvalidGeometry(format!("frequency must be positive, got {f}")));
    }
    Ok(paths
        .iter()
        .map(|p| p.amplitude * Complex64::from_polar(1.0, -2.0 * PI * f * p.delay))
        .collect())
}

/// Spherical-wavefront manifold with the per-element amplitude ratio
/// `‖d_k‖/‖d_{m,k}‖`.
pub fn array_manifold(geom: &ArrayGeometry, paths: &[Path], f: f64) -> Result<Array2<Complex64>> {
    let elements = geom.element_positions();
    let mut a = Array2::zeros((elements.len(), paths.len()));
    for (k, path) in paths.iter().enumerate() {
        let dk = norm2(path.first_scatterer);
        if !(dk > 0.0) {
            return Err(NfError::DegenerateGeometry(format!("path {k} scatterer sits at the reference point")));
        }
        for (m, e) in elements.iter().enumerate() {
            let dmk = dist2(path.first_scatterer, *e);
            if dmk <= f64::EPSILON * dk {
                return Err(NfError::DegenerateGeometry(format!(
                    "path {k} scatterer coincides with element {m}"
                )));
            }
            let phase = -2.0 * PI * f * (dmk - dk) / SPEED_OF_LIGHT;
            a[[m, k]] = Complex64::from_polar(dk / dmk, phase);
        }
    }
    Ok(a)
}

/// Planar-wavefront manifold: unit amplitude, first-order distance difference
/// `−e_m·û_k` towards each first scatterer.
pub fn planar_manifold(geom: &ArrayGeometry, paths: &[Path], f: f64) -> Result<Array2<Complex64>> {
    let elements = geom.element_positions();
    let mut a = Array2::zeros((elements.len(), paths.len()));
    for (k, path) in paths.iter().enumerate() {
        let dk = norm2(path.first_scatterer);
        if !(dk > 0.0) {
            return Err(NfError::DegenerateGeometry(format!("path {k} scatterer sits at the reference point")));
        }
        let u = [path.first_scatterer[0] / dk, path.first_scatterer[1] / dk];
        for (m, e) in elements.iter().enumerate() {
            let diff = -(e[0] * u[0] + e[1] * u[1]);
            a[[m, k]] = Complex64::from_polar(1.0, -2.0 * PI * f * diff / SPEED_OF_LIGHT);
        }
    }
    Ok(a)
}

fn check_dims(n: usize, k: usize, a: &Array2<Complex64>, h: &Array1<Complex64>) -> Result<()> {
    if a.dim() != (n, k) || h.len() != k {
        return Err(NfError::DimensionMismatch(format!(
            "mask {n}x{k}, manifold {:?}, cfr {}",
            a.dim(),
            h.len()
        )));
    }
    Ok(())
}

pub fn compose_sns(s: &SnsMask, a: &Array2<Complex64>, h: &Array1<Complex64>) -> Result<Array1<Complex64>> {
    let (n, k) = s.values.dim();
    check_dims(n, k, a, h)?;
    Ok((0..n)
        .map(|m| {
            (0..k).fold(Complex64::new(0.0, 0.0), |acc, j| acc + (a[[m, j]] * s.values[[m, j]]) * h[j])
        })
        .collect())
}

/// Spatially stationary composition `A(f)·H(f)`.
pub fn compose_stationary(a: &Array2<Complex64>, h: &Array1<Complex64>) -> Result<Array1<Complex64>> {
    let (n, k) = a.dim();
    check_dims(n, k, a, h)?;
    Ok((0..n)
        .map(|m| (0..k).fold(Complex64::new(0.0, 0.0), |acc, j| acc + a[[m, j]] * h[j]))
        .collect())
}

/// LoS channel `√N·α·a(θ, r)`.
pub fn los_channel(geom: &ArrayGeometry, p: PolarPoint, alpha: Complex64) -> Result<Array1<Complex64>> {
    let a = nf_steering(geom, p)?;
    let scale = (geom.num_elements() as f64).sqrt();
    Ok(a.entries.mapv(|z| z * alpha * scale))
}

/// How the manifold is built for a realization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WavefrontModel {
    Spherical,
    Planar,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub geometry: ArrayGeometry,
    pub user: PolarPoint,
    pub frequencies: Vec<f64>,
    pub paths: Vec<Path>,
    pub mask: SnsMask,
    /// `A(f)` per frequency.
    pub manifolds: Vec<Array2<Complex64>>,
    /// `H(f)` per frequency.
    pub cfrs: Vec<Array1<Complex64>>,
    /// `h_sns(f)` per frequency.
    pub responses: Vec<Array1<Complex64>>,
}

impl ChannelRealization {
    pub fn build(
        geometry: ArrayGeometry,
        user: PolarPoint,
        paths: Vec<Path>,
        mask: SnsMask,
        frequencies: Vec<f64>,
        wavefront: WavefrontModel,
    ) -> Result<Self> {
        if frequencies.is_empty() {
            return Err(NfError::InvalidGeometry("need at least one frequency".into()));
        }
        if mask.values.dim() != (geometry.num_elements(), paths.len()) {
            return Err(NfError::DimensionMismatch(format!(
                "mask is {:?}, expected ({}, {})",
                mask.values.dim(),
                geometry.num_elements(),
                paths.len()
            )));
        }
        let mut manifolds = Vec::with_capacity(frequencies.len());
        let mut cfrs = Vec::with_capacity(frequencies.len());
        let mut responses = Vec::with_capacity(frequencies.len());
        for &f in &frequencies {
            let a = match wavefront {
                WavefrontModel::Spherical => array_manifold(&geometry, &paths, f)?,
                WavefrontModel::Planar => planar_manifold(&geometry, &paths, f)?,
            };
            let h = cfr_paths(&paths, f)?;
            responses.push(compose_sns(&mask, &a, &h)?);
            manifolds.push(a);
            cfrs.push(h);
        }
        Ok(Self { geometry, user, frequencies, paths, mask, manifolds, cfrs, responses })
    }

    /// Re-evaluate `(S ⊙ A)·H` from the stored factors.
    pub fn recompose(&self, freq_index: usize) -> Result<Array1<Complex64>> {
        compose_sns(&self.mask, &self.manifolds[freq_index], &self.cfrs[freq_index])
    }

    /// Channel at the first (centre) frequency.
    pub fn response(&self) -> &Array1<Complex64> {
        &self.responses[0]
    }
}

/// Element × delay-bin power matrix of `|S·A·α|²` at the first frequency.
pub fn compute_pdp(realization: &ChannelRealization, delay_bin: f64) -> Result<Array2<f64>> {
    if !(delay_bin > 0.0) {
        return Err(NfError::InvalidGeometry(format!("delay bin must be positive, got {delay_bin}")));
    }
    let n = realization.geometry.num_elements();
    let max_tau = realization.paths.iter().map(|p| p.delay).fold(0.0, f64::max);
    let bins = (max_tau / delay_bin).ceil() as usize + 1;
    let a = &realization.manifolds[0];
    let mut pdp = Array2::zeros((n, bins));
    for (k, path) in realization.paths.iter().enumerate() {
        let b = ((path.delay / delay_bin).floor() as usize).min(bins - 1);
        for m in 0..n {
            pdp[[m, b]] += (a[[m, k]] * realization.mask.values[[m, k]] * path.amplitude).norm_sqr();
        }
    }
    Ok(pdp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn nlos(amplitude: Complex64, delay: f64, at: [f64; 2]) -> Path {
        Path { amplitude, delay, first_scatterer: at, kind: PathKind::NLoS }
    }

    #[test]
    fn cfr_values() {
        let h = cfr_paths(&[nlos(c(1.0, 0.0), 1e-6, [1.0, 0.0])], 1e6).unwrap();
        assert_relative_eq!(h[0].re, 1.0, epsilon = 1e-12);
        assert!(h[0].im.abs() < 1e-12);

        let h = cfr_paths(&[nlos(c(0.5, 0.0), 0.0, [1.0, 0.0])], 3.7e9).unwrap();
        assert_eq!(h[0], c(0.5, 0.0));

        let h = cfr_paths(&[nlos(c(1.0, 0.0), 2.5e-7, [1.0, 0.0])], 1e6).unwrap();
        assert!(h[0].re.abs() < 1e-12);
        assert_relative_eq!(h[0].im, -1.0, epsilon = 1e-12);

        assert!(cfr_paths(&[], 1e9).unwrap().is_empty());
        assert!(cfr_paths(&[], 0.0).is_err());
    }

    #[test]
    fn manifold_amplitude_ratio() {
        // elements at y = ±7.5, scatterer at (−10, 0): ‖d_k‖ = 10, ‖d_{m,k}‖ = 12.5.
        // λ = 2.5 m makes the 2.5 m difference exactly one cycle.
        let f = SPEED_OF_LIGHT / 2.5;
        let g = ArrayGeometry::ula(2, 15.0, f).unwrap();
        let path = nlos(c(1.0, 0.0), 1e-6, [-10.0, 0.0]);
        let a = array_manifold(&g, &[path], f).unwrap();
        for m in 0..2 {
            assert_relative_eq!(a[[m, 0]].re, 0.8, epsilon = 1e-12);
            assert!(a[[m, 0]].im.abs() < 1e-12);
        }
    }

    #[test]
    fn manifold_equidistant_and_single_element() {
        let g = ArrayGeometry::ula(2, 1.0, 3e9).unwrap();
        // on the perpendicular bisector of origin and element 1 (y = 0.5)
        let path = nlos(c(1.0, 0.0), 1e-6, [3.0, 0.25]);
        let a = array_manifold(&g, &[path], 3e9).unwrap();
        assert_relative_eq!(a[[1, 0]].re, 1.0, epsilon = 1e-12);
        assert!(a[[1, 0]].im.abs() < 1e-9);

        let g1 = ArrayGeometry::ula(1, 0.01, 15e9).unwrap();
        let paths = [nlos(c(1.0, 0.0), 1e-7, [3.0, 1.0]), nlos(c(0.2, 0.1), 2e-7, [-5.0, 8.0])];
        let a = array_manifold(&g1, &paths, 15e9).unwrap();
        assert!(a.iter().all(|z| *z == c(1.0, 0.0)));
    }

    #[test]
    fn manifold_rejects_scatterer_on_element() {
        let g = ArrayGeometry::ula(3, 0.5, 3e9).unwrap();
        assert!(array_manifold(&g, &[nlos(c(1.0, 0.0), 0.0, [0.0, 0.5])], 3e9).is_err());
        assert!(array_manifold(&g, &[nlos(c(1.0, 0.0), 0.0, [0.0, 0.0])], 3e9).is_err());
    }

    #[test]
    fn manifold_ratio_tends_to_one() {
        let g = ArrayGeometry::ula_half_wavelength(64, 15e9).unwrap();
        let far = 1e4 * g.aperture();
        let path = nlos(c(1.0, 0.0), 1e-3, [far * 0.6, far * 0.8]);
        let a = array_manifold(&g, &[path], 15e9).unwrap();
        let worst = a.iter().map(|z| (z.norm() - 1.0).abs()).fold(0.0, f64::max);
        assert!(worst < 1e-3);
    }

    #[test]
    fn compose_masks() {
        let a = Array2::from_shape_vec((2, 1), vec![c(0.3, 0.4), c(-1.0, 2.0)]).unwrap();
        let h = Array1::from(vec![c(2.0, -1.0)]);
        let mut s = SnsMask::all_visible(2, 1);
        s.values[[1, 0]] = 0.0;
        let out = compose_sns(&s, &a, &h).unwrap();
        assert_eq!(out[0], a[[0, 0]] * h[0]);
        assert_eq!(out[1], c(0.0, 0.0));

        let zeros = SnsMask { values: Array2::zeros((2, 1)), regions: vec![None] };
        assert!(compose_sns(&zeros, &a, &h).unwrap().iter().all(|z| z.norm() == 0.0));

        let ones = SnsMask::all_visible(2, 1);
        assert_eq!(compose_sns(&ones, &a, &h).unwrap(), compose_stationary(&a, &h).unwrap());

        let empty = compose_stationary(&Array2::zeros((4, 0)), &Array1::zeros(0)).unwrap();
        assert_eq!(empty, Array1::<Complex64>::zeros(4));

        assert!(compose_sns(&ones, &a, &Array1::zeros(2)).is_err());
    }

    #[test]
    fn single_path_magnitudes() {
        let f = 15e9;
        let g = ArrayGeometry::ula(2, 0.3, f).unwrap();
        let path = nlos(c(0.6, -0.8), 3e-8, [4.0, 1.0]);
        let a = array_manifold(&g, &[path], f).unwrap();
        let h = compose_stationary(&a, &cfr_paths(&[path], f).unwrap()).unwrap();
        let d = 17f64.sqrt();
        // |entry m| = |α|·‖d‖/‖d_m‖ with elements at y = ∓0.15
        let d0 = (16.0f64 + 1.15 * 1.15).sqrt();
        let d1 = (16.0f64 + 0.85 * 0.85).sqrt();
        assert_relative_eq!(h[0].norm(), d / d0, max_relative = 1e-12);
        assert_relative_eq!(h[1].norm(), d / d1, max_relative = 1e-12);
    }

    #[test]
    fn los_channel_norm_and_direction() {
        let g = ArrayGeometry::ula_half_wavelength(150, 15e9).unwrap();
        let p = PolarPoint::new(0.0, 14.0).unwrap();
        let alpha = c(0.3, -0.2);
        let h = los_channel(&g, p, alpha).unwrap();
        let norm = h.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        assert_relative_eq!(norm, 150f64.sqrt() * alpha.norm(), max_relative = 1e-12);
        let a = nf_steering(&g, p).unwrap();
        let ip: Complex64 = h.iter().zip(a.entries.iter()).map(|(x, y)| x.conj() * y).sum();
        let ratio = ip / (150f64.sqrt() * alpha.conj());
        assert_relative_eq!(ratio.re, 1.0, epsilon = 1e-12);
        assert!(ratio.im.abs() < 1e-12);
        assert!(los_channel(&g, p, c(0.0, 0.0)).unwrap().iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn visibility_column_shapes() {
        let r = VisibilityRegion { center_index: 5, length: 1, edge_width: 0 };
        let col = r.column(10);
        assert_eq!(col.iter().filter(|&&v| v > 0.0).count(), 1);
        assert_eq!(col[5], 1.0);

        let r = VisibilityRegion { center_index: 1, length: 4, edge_width: 3 };
        let col = r.column(12);
        // core [0, 3], ramp 4..=6
        assert_eq!(&col[..4], &[1.0; 4]);
        assert!(col[4] > col[5] && col[5] > col[6] && col[6] > 0.0 && col[4] < 1.0);
        assert_eq!(col[7], 0.0);

        let full = VisibilityRegion { center_index: 9, length: 12, edge_width: 0 };
        assert!(full.column(12).iter().all(|&v| v == 1.0));
        let shifted = VisibilityRegion { center_index: 11, length: 4, edge_width: 0 }.column(12);
        assert_eq!(&shifted[8..], &[1.0; 4]);
    }

    #[test]
    fn pdp_bins() {
        let f = 15e9;
        let g = ArrayGeometry::ula_half_wavelength(8, f).unwrap();
        let user = PolarPoint::new(0.2, 20.0).unwrap();
        let los = Path { amplitude: c(0.5, 0.0), delay: 20.0 / SPEED_OF_LIGHT, first_scatterer: user.position(), kind: PathKind::LoS };
        let p1 = nlos(c(0.1, 0.1), 1.0e-7, [10.0, 10.0]);
        let p2 = nlos(c(0.0, 0.2), 1.04e-7, [-10.0, 12.0]);
        let paths = vec![los, p1, p2];
        let mut mask = SnsMask::all_visible(8, 3);
        mask.values[[3, 1]] = 0.0;
        let real = ChannelRealization::build(g, user, paths.clone(), mask.clone(), vec![f], WavefrontModel::Spherical).unwrap();
        let bin = 1e-8;
        let pdp = compute_pdp(&real, bin).unwrap();
        assert_eq!(pdp.ncols(), (1.04e-7f64 / bin).ceil() as usize + 1);

        // brute force: accumulate each (element, path) contribution independently
        let a = &real.manifolds[0];
        let mut oracle = Array2::<f64>::zeros(pdp.dim());
        for m in 0..8 {
            for (k, p) in paths.iter().enumerate() {
                let b = (p.delay / bin) as usize;
                oracle[[m, b]] += mask.values[[m, k]] * mask.values[[m, k]] * a[[m, k]].norm_sqr() * p.amplitude.norm_sqr();
            }
        }
        for (x, y) in pdp.iter().zip(oracle.iter()) {
            assert_relative_eq!(*x, *y, max_relative = 1e-12, epsilon = 1e-300);
        }
        // both NLoS paths share bin 10
        let nz = |m: usize| pdp.row(m).iter().filter(|&&v| v > 0.0).count();
        assert_eq!(nz(0), 2);
        assert!(pdp[[3, 10]] < pdp[[2, 10]]);
        assert!(compute_pdp(&real, 0.0).is_err());
    }
}
