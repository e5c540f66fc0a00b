//! Random drop generation: user placement, NLoS scatterers and visibility
//! regions.
//!
//! Each drop owns a ChaCha8 stream seeded from `(master_seed, drop_index)`,
//! so a drop is reproducible regardless of generation order or thread count.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channel::{ChannelRealization, Path, PathKind, SnsMask, VisibilityRegion, WavefrontModel};
use crate::error::{NfError, Result};
use crate::geometry::{dist2, norm2, ArrayGeometry, PolarPoint, SPEED_OF_LIGHT};

/// Channel model used to turn a drop into a channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChannelModel {
    /// Spherical wavefront with the drop's visibility mask.
    NfSns,
    /// Spherical wavefront, every path visible at every element.
    NfStationary,
    /// Planar wavefront, spatially stationary.
    FfPlanar,
}

impl ChannelModel {
    pub fn as_str(&self) -> &'static str {
        match self {
            ChannelModel::NfSns => "NF_SnS",
            ChannelModel::NfStationary => "NF_Stationary",
            ChannelModel::FfPlanar => "FF_Planar",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "nf_sns" => Some(ChannelModel::NfSns),
            "nf_stationary" => Some(ChannelModel::NfStationary),
            "ff_planar" => Some(ChannelModel::FfPlanar),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub geometry: ArrayGeometry,
    pub r_min: f64,
    pub r_max: f64,
    pub num_nlos_paths: usize,
    /// LoS power over total NLoS power, dB. `+∞` disables NLoS power.
    pub rice_factor_db: f64,
    /// Exponential delay-power decay constant, seconds.
    pub delay_spread: f64,
    /// Scatterer annulus radii `[ρ_min, ρ_max]`, meters.
    pub scatterer_radius: (f64, f64),
    /// Visibility-region length as a fraction of `N`, `[lo, hi] ⊂ (0, 1]`.
    pub vr_length_fraction: (f64, f64),
    pub vr_edge_fraction: f64,
    pub pathloss_exponent: f64,
    pub master_seed: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            geometry: ArrayGeometry::ula_half_wavelength(150, 15e9).expect("valid default geometry"),
            r_min: 5.0,
            r_max: 80.0,
            num_nlos_paths: 5,
            rice_factor_db: 10.0,
            delay_spread: 50e-9,
            scatterer_radius: (3.0, 60.0),
            vr_length_fraction: (0.3, 1.0),
            vr_edge_fraction: 0.05,
            pathloss_exponent: 2.0,
            master_seed: 0,
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(NfError::Config(msg));
        if !(self.r_min > 0.0 && self.r_min <= self.r_max && self.r_max.is_finite()) {
            return bad(format!("distance range [{}, {}] is invalid", self.r_min, self.r_max));
        }
        if self.r_min <= self.geometry.max_element_offset() {
            return bad(format!("r_min {} m does not clear the array", self.r_min));
        }
        if self.rice_factor_db.is_nan() || self.rice_factor_db == f64::NEG_INFINITY {
            return bad("rice_factor_db must be a number or +inf".into());
        }
        if !(self.delay_spread > 0.0) {
            return bad(format!("delay_spread must be positive, got {}", self.delay_spread));
        }
        let (rho_min, rho_max) = self.scatterer_radius;
        if !(rho_min > self.geometry.aperture() / 2.0 && rho_min <= rho_max && rho_max.is_finite()) {
            return bad(format!(
                "scatterer annulus [{rho_min}, {rho_max}] must satisfy aperture/2 < min <= max"
            ));
        }
        let (lo, hi) = self.vr_length_fraction;
        if !(lo > 0.0 && lo <= hi && hi <= 1.0) {
            return bad(format!("vr_length_fraction [{lo}, {hi}] must lie in (0, 1] with lo <= hi"));
        }
        if !(self.vr_edge_fraction >= 0.0 && self.vr_edge_fraction.is_finite()) {
            return bad(format!("vr_edge_fraction must be >= 0, got {}", self.vr_edge_fraction));
        }
        if !self.pathloss_exponent.is_finite() {
            return bad("pathloss_exponent must be finite".into());
        }
        Ok(())
    }
}

/// Per-drop seed: splitmix64 finaliser over the master seed and drop index.
pub fn drop_seed(master_seed: u64, drop_index: u64) -> u64 {
    let mut z = master_seed ^ drop_index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Drop {
    pub user: PolarPoint,
    /// LoS path first, then NLoS paths.
    pub paths: Vec<Path>,
    pub mask: SnsMask,
    pub drop_index: u64,
    pub rng_seed: u64,
}

impl Drop {
    pub fn los(&self) -> &Path {
        &self.paths[0]
    }

    /// Build the channel at the carrier frequency under `model`.
    pub fn realization(&self, geometry: &ArrayGeometry, model: ChannelModel) -> Result<ChannelRealization> {
        let (mask, wavefront) = match model {
            ChannelModel::NfSns => (self.mask.clone(), WavefrontModel::Spherical),
            ChannelModel::NfStationary => {
                (SnsMask::all_visible(geometry.num_elements(), self.paths.len()), WavefrontModel::Spherical)
            }
            ChannelModel::FfPlanar => {
                (SnsMask::all_visible(geometry.num_elements(), self.paths.len()), WavefrontModel::Planar)
            }
        };
        ChannelRealization::build(
            *geometry,
            self.user,
            self.paths.clone(),
            mask,
            vec![geometry.carrier_frequency()],
            wavefront,
        )
    }
}

/// Generate one drop. `distance = None` draws the BS–UT distance uniformly
/// from `[r_min, r_max]`.
pub fn sample_drop(cfg: &ScenarioConfig, drop_index: u64, distance: Option<f64>) -> Result<Drop> {
    cfg.validate()?;
    let seed = drop_seed(cfg.master_seed, drop_index);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let phi: f64 = rng.random_range(-FRAC_PI_2..FRAC_PI_2);
    let r = match distance {
        Some(r) => r,
        None => rng.random_range(cfg.r_min..=cfg.r_max),
    };
    let user = PolarPoint::new(phi.sin(), r)?;
    if r <= cfg.geometry.max_element_offset() {
        return Err(NfError::Config(format!("user distance {r} m does not clear the array")));
    }

    let lambda = cfg.geometry.wavelength();
    let los_gain = lambda / (4.0 * PI) * r.powf(-cfg.pathloss_exponent / 2.0);
    let los_phase: f64 = rng.random_range(0.0..2.0 * PI);
    let los = Path {
        amplitude: Complex64::from_polar(los_gain, los_phase),
        delay: r / SPEED_OF_LIGHT,
        first_scatterer: user.position(),
        kind: PathKind::LoS,
    };

    let mut paths = Vec::with_capacity(cfg.num_nlos_paths + 1);
    paths.push(los);
    paths.extend(sample_paths(cfg, &los, &mut rng));
    let mask = sample_visibility(cfg, &paths, &mut rng);

    Ok(Drop { user, paths, mask, drop_index, rng_seed: seed })
}

/// NLoS paths with single-bounce geometry and an exponential delay-power
/// profile normalised to the Ricean budget relative to `los`.
pub fn sample_paths<R: Rng + ?Sized>(cfg: &ScenarioConfig, los: &Path, rng: &mut R) -> Vec<Path> {
    let user = los.first_scatterer;
    let (rho_min, rho_max) = cfg.scatterer_radius;
    let tau0 = los.delay;

    let mut paths: Vec<(Path, f64)> = (0..cfg.num_nlos_paths)
        .map(|_| {
            let angle: f64 = rng.random_range(-PI..PI);
            let radius: f64 = rng.random_range(rho_min..=rho_max);
            let phase: f64 = rng.random_range(0.0..2.0 * PI);
            let at = [radius * angle.cos(), radius * angle.sin()];
            let delay = (norm2(at) + dist2(at, user)) / SPEED_OF_LIGHT;
            let weight = (-(delay - tau0) / cfg.delay_spread).exp();
            let path = Path {
                amplitude: Complex64::from_polar(1.0, phase),
                delay,
                first_scatterer: at,
                kind: PathKind::NLoS,
            };
            (path, weight)
        })
        .collect();

    let budget = los.amplitude.norm_sqr() * 10f64.powf(-cfg.rice_factor_db / 10.0);
    let total: f64 = paths.iter().map(|(_, w)| w).sum();
    for (path, weight) in paths.iter_mut() {
        let power = if budget > 0.0 && total > 0.0 { budget * *weight / total } else { 0.0 };
        path.amplitude *= power.sqrt();
    }
    paths.into_iter().map(|(p, _)| p).collect()
}

/// LoS column all ones; every NLoS path gets a contiguous visibility region.
pub fn sample_visibility<R: Rng + ?Sized>(cfg: &ScenarioConfig, paths: &[Path], rng: &mut R) -> SnsMask {
    let n = cfg.geometry.num_elements();
    let mut mask = SnsMask::all_visible(n, paths.len());
    let (lo, hi) = cfg.vr_length_fraction;
    let edge_width = ((n as f64 * cfg.vr_edge_fraction).round() as usize).min(n);
    for (k, path) in paths.iter().enumerate() {
        if path.kind == PathKind::LoS {
            continue;
        }
        let center_index = rng.random_range(0..n);
        let fraction: f64 = rng.random_range(lo..=hi);
        let length = ((n as f64 * fraction).round() as usize).clamp(1, n);
        let region = VisibilityRegion { center_index, length, edge_width };
        for (m, v) in region.column(n).into_iter().enumerate() {
            mask.values[[m, k]] = v;
        }
        mask.regions[k] = Some(region);
    }
    mask
}
