//! Array layouts, element coordinates and field-region boundaries.
//!
//! Coordinates live in the x–y plane. A ULA lies on the y-axis centred on the
//! origin, a UCA is centred on the origin with element `m` at angle `2πm/N`.
//! A user at spatial angle `θ = sin φ` and distance `r` sits at
//! `(r·cos φ, r·sin φ)`, so the planar phase progression across a ULA is
//! proportional to `θ`.

use crate::error::{NfError, Result};

/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 2.997_924_58e8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Layout {
    /// Uniform linear array with element spacing in meters.
    Ula { spacing: f64 },
    /// Uniform circular array with radius in meters.
    Uca { radius: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrayGeometry {
    layout: Layout,
    num_elements: usize,
    carrier_frequency: f64,
}

impl ArrayGeometry {
    pub fn new(layout: Layout, num_elements: usize, carrier_frequency: f64) -> Result<Self> {
        if num_elements == 0 {
            return Err(NfError::InvalidGeometry("array needs at least one element".into()));
        }
        if !(carrier_frequency.is_finite() && carrier_frequency > 0.0) {
            return Err(NfError::InvalidGeometry(format!(
                "carrier frequency must be positive, got {carrier_frequency}"
            )));
        }
        let size = match layout {
            Layout::Ula { spacing } => spacing,
            Layout::Uca { radius } => radius,
        };
        if !(size.is_finite() && size > 0.0) {
            return Err(NfError::InvalidGeometry(format!(
                "spacing/radius must be positive, got {size}"
            )));
        }
        Ok(Self { layout, num_elements, carrier_frequency })
    }

    pub fn ula(num_elements: usize, spacing: f64, carrier_frequency: f64) -> Result<Self> {
        Self::new(Layout::Ula { spacing }, num_elements, carrier_frequency)
    }

    /// ULA with half-wavelength spacing at the given carrier.
    pub fn ula_half_wavelength(num_elements: usize, carrier_frequency: f64) -> Result<Self> {
        let spacing = SPEED_OF_LIGHT / carrier_frequency / 2.0;
        Self::ula(num_elements, spacing, carrier_frequency)
    }

    pub fn uca(num_elements: usize, radius: f64, carrier_frequency: f64) -> Result<Self> {
        Self::new(Layout::Uca { radius }, num_elements, carrier_frequency)
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn num_elements(&self) -> usize {
        self.num_elements
    }

    pub fn carrier_frequency(&self) -> f64 {
        self.carrier_frequency
    }

    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.carrier_frequency
    }

    pub fn is_ula(&self) -> bool {
        matches!(self.layout, Layout::Ula { .. })
    }

    /// ULA element spacing, `None` for circular arrays.
    pub fn spacing(&self) -> Option<f64> {
        match self.layout {
            Layout::Ula { spacing } => Some(spacing),
            Layout::Uca { .. } => None,
        }
    }

    /// Array aperture `D`: `(N−1)·d` for a ULA, the diameter for a UCA.
    pub fn aperture(&self) -> f64 {
        match self.layout {
            Layout::Ula { spacing } => (self.num_elements - 1) as f64 * spacing,
            Layout::Uca { radius } => 2.0 * radius,
        }
    }

    pub fn element_positions(&self) -> Vec<[f64; 2]> {
        let n = self.num_elements;
        match self.layout {
            Layout::Ula { spacing } => (0..n)
                .map(|m| {
                    let delta = (2.0 * m as f64 - n as f64 + 1.0) / 2.0;
                    [0.0, delta * spacing]
                })
                .collect(),
            Layout::Uca { radius } => (0..n)
                .map(|m| {
                    let angle = 2.0 * std::f64::consts::PI * m as f64 / n as f64;
                    [radius * angle.cos(), radius * angle.sin()]
                })
                .collect(),
        }
    }

    /// Largest distance of any element from the origin.
    pub fn max_element_offset(&self) -> f64 {
        match self.layout {
            Layout::Ula { .. } => self.aperture() / 2.0,
            Layout::Uca { radius } => radius,
        }
    }

    /// Fraunhofer boundary `2·D²/λ`.
    pub fn rayleigh_distance(&self) -> f64 {
        let d = self.aperture();
        2.0 * d * d / self.wavelength()
    }

    /// Lower edge of the radiating near field, `0.62·sqrt(D³/λ)`.
    pub fn fresnel_distance(&self) -> f64 {
        let d = self.aperture();
        0.62 * (d * d * d / self.wavelength()).sqrt()
    }
}

/// A direction/distance pair. `theta` is the spatial angle `sin φ`; `r` may be
/// `f64::INFINITY` for a far-field direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarPoint {
    pub theta: f64,
    pub r: f64,
}

impl PolarPoint {
    pub fn new(theta: f64, r: f64) -> Result<Self> {
        if !(theta.abs() <= 1.0) {
            return Err(NfError::InvalidPoint(format!("|theta| must be <= 1, got {theta}")));
        }
        if !(r > 0.0) {
            return Err(NfError::InvalidPoint(format!("distance must be > 0, got {r}")));
        }
        Ok(Self { theta, r })
    }

    pub fn far(theta: f64) -> Result<Self> {
        Self::new(theta, f64::INFINITY)
    }

    /// Physical angle φ in `[−π/2, π/2]`.
    pub fn angle(&self) -> f64 {
        self.theta.asin()
    }

    pub fn is_far(&self) -> bool {
        self.r.is_infinite()
    }

    /// Unit vector towards the point.
    pub fn direction(&self) -> [f64; 2] {
        [(1.0 - self.theta * self.theta).max(0.0).sqrt(), self.theta]
    }

    /// Cartesian position; only meaningful for finite `r`.
    pub fn position(&self) -> [f64; 2] {
        let [ux, uy] = self.direction();
        [self.r * ux, self.r * uy]
    }
}

pub(crate) fn norm2(p: [f64; 2]) -> f64 {
    p[0].hypot(p[1])
}

pub(crate) fn dist2(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}
