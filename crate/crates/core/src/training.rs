//! Beam gain, exhaustive beam training and achievable rate.

use ndarray::Array1;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::codebook::{Codebook, Codeword};
use crate::error::{NfError, Result};
use crate::steering::{inner, vector_norm};

const UNIT_NORM_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainingOutcome {
    pub best_index: usize,
    /// `|h̃ᴴw|` against the unit-normalised channel.
    pub best_gain: f64,
    pub gain_db: f64,
    /// `|hᴴw|²` with the un-normalised channel.
    pub received_power: f64,
    pub codebook_size: usize,
}

impl TrainingOutcome {
    pub fn rate(&self, snr_tx: f64) -> f64 {
        rate_from_power(self.received_power, snr_tx)
    }
}

fn rate_from_power(power: f64, snr_tx: f64) -> f64 {
    (1.0 + snr_tx * power).log2()
}

/// `|h_dirᴴ w|` for a unit-norm channel direction.
pub fn beam_gain(h_dir: &Array1<Complex64>, w: &Codeword) -> Result<f64> {
    let norm = vector_norm(h_dir);
    if (norm - 1.0).abs() > UNIT_NORM_TOLERANCE {
        return Err(NfError::NonUnitChannel(norm));
    }
    check_len(h_dir, &w.weights)?;
    Ok(inner(h_dir, &w.weights).norm())
}

fn check_len(h: &Array1<Complex64>, w: &Array1<Complex64>) -> Result<()> {
    if h.len() != w.len() {
        return Err(NfError::DimensionMismatch(format!("channel has {} entries, codeword {}", h.len(), w.len())));
    }
    Ok(())
}

/// Scan every codeword; ties go to the lowest index.
pub fn exhaustive_search(h: &Array1<Complex64>, book: &Codebook) -> Result<TrainingOutcome> {
    if book.is_empty() {
        return Err(NfError::EmptyCodebook);
    }
    let norm = vector_norm(h);
    if !(norm > 0.0) {
        return Err(NfError::ZeroChannel);
    }
    let mut best_index = 0;
    let mut best_power = f64::NEG_INFINITY;
    for (i, cw) in book.iter().enumerate() {
        check_len(h, &cw.weights)?;
        let power = inner(h, &cw.weights).norm_sqr();
        if power > best_power {
            best_power = power;
            best_index = i;
        }
    }
    let best_gain = best_power.sqrt() / norm;
    Ok(TrainingOutcome {
        best_index,
        best_gain,
        gain_db: 20.0 * best_gain.log10(),
        received_power: best_power,
        codebook_size: book.len(),
    })
}

/// `log₂(1 + SNR_tx·|hᴴw|²)`.
pub fn achievable_rate(h: &Array1<Complex64>, w: &Codeword, snr_tx: f64) -> Result<f64> {
    if !(snr_tx >= 0.0) {
        return Err(NfError::Config(format!("snr_tx must be >= 0, got {snr_tx}")));
    }
    check_len(h, &w.weights)?;
    Ok(rate_from_power(inner(h, &w.weights).norm_sqr(), snr_tx))
}

/// `y = hᴴ w s + n` with `n ~ CN(0, σ²)` drawn from `rng`.
pub fn received_signal<R: Rng + ?Sized>(
    h: &Array1<Complex64>,
    w: &Codeword,
    symbol: Complex64,
    noise_var: f64,
    rng: &mut R,
) -> Result<Complex64> {
    if !(noise_var >= 0.0) {
        return Err(NfError::Config(format!("noise variance must be >= 0, got {noise_var}")));
    }
    check_len(h, &w.weights)?;
    let clean = inner(h, &w.weights) * symbol;
    if noise_var == 0.0 {
        return Ok(clean);
    }
    let sigma = (noise_var / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Ok(clean + Complex64::new(re, im) * sigma)
}
