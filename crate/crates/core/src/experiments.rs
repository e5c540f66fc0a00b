//! Monte Carlo sweeps: beam gain versus distance, achievable rate versus
//! transmit SNR, LoS phase profiles and element × delay PDPs.
//!
//! Work items are independent drops. Results are gathered in grid order, then
//! drop index, then codebook order, so output does not depend on the number
//! of worker threads.

use ndarray::Array2;
use rayon::prelude::*;

use crate::channel::compute_pdp;
use crate::codebook::{build_codebook, Codebook, CodebookKind, DEFAULT_BETA};
use crate::error::{NfError, Result};
use crate::steering::{ff_steering, nf_steering, phase_profile};
use crate::stochastic::{sample_drop, ChannelModel, ScenarioConfig};
use crate::training::{exhaustive_search, TrainingOutcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepKind {
    GainVsDistance,
    RateVsSnr,
    PhaseProfile,
    Pdp,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub kind: SweepKind,
    pub scenario: ScenarioConfig,
    /// BS–UT distances for the gain sweep, meters.
    pub distances: Vec<f64>,
    /// Transmit SNR grid for the rate sweep, dB.
    pub snrs_db: Vec<f64>,
    pub drops_per_point: usize,
    pub channel_model: ChannelModel,
    pub codebooks: Vec<CodebookKind>,
    pub beta: f64,
    pub r_floor: f64,
    pub delay_bin: f64,
    /// Distance used by the phase-profile and PDP runs.
    pub probe_distance: f64,
    /// Drop used by the phase-profile and PDP runs.
    pub probe_drop: u64,
    /// Worker threads; `None` uses the global rayon pool.
    pub threads: Option<usize>,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            kind: SweepKind::GainVsDistance,
            scenario: ScenarioConfig::default(),
            distances: (5..=80).map(f64::from).collect(),
            snrs_db: (100..=115).map(f64::from).collect(),
            drops_per_point: 100,
            channel_model: ChannelModel::NfSns,
            codebooks: vec![CodebookKind::FarField, CodebookKind::NearField],
            beta: DEFAULT_BETA,
            r_floor: 5.0,
            delay_bin: 5e-9,
            probe_distance: 14.0,
            probe_drop: 0,
            threads: None,
        }
    }
}

fn strictly_increasing(grid: &[f64]) -> bool {
    !grid.is_empty() && grid.iter().all(|v| v.is_finite()) && grid.windows(2).all(|w| w[0] < w[1])
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        self.scenario.validate()?;
        let bad = |msg: &str| Err(NfError::Config(msg.to_string()));
        match self.kind {
            SweepKind::GainVsDistance if !strictly_increasing(&self.distances) => {
                return bad("distance grid must be nonempty and strictly increasing")
            }
            SweepKind::RateVsSnr if !strictly_increasing(&self.snrs_db) => {
                return bad("SNR grid must be nonempty and strictly increasing")
            }
            _ => {}
        }
        if self.drops_per_point == 0 {
            return bad("drops_per_point must be >= 1");
        }
        if matches!(self.kind, SweepKind::GainVsDistance | SweepKind::RateVsSnr) && self.codebooks.is_empty() {
            return bad("at least one codebook is required");
        }
        if !(self.delay_bin > 0.0) {
            return bad("delay_bin must be positive");
        }
        if self.threads == Some(0) {
            return bad("threads must be >= 1");
        }
        Ok(())
    }

    fn expect(&self, kind: SweepKind) -> Result<()> {
        if self.kind != kind {
            return Err(NfError::Config(format!("sweep kind is {:?}, expected {kind:?}", self.kind)));
        }
        self.validate()
    }

    fn build_codebooks(&self) -> Result<Vec<Codebook>> {
        self.codebooks
            .iter()
            .map(|&kind| build_codebook(&self.scenario.geometry, kind, self.beta, self.r_floor))
            .collect()
    }

    fn in_pool<T: Send>(&self, work: impl FnOnce() -> T + Send) -> Result<T> {
        match self.threads {
            None => Ok(work()),
            Some(n) => {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build()
                    .map_err(|e| NfError::Config(format!("thread pool: {e}")))?;
                Ok(pool.install(work))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    /// Distance (m) or transmit SNR (dB).
    pub x: f64,
    pub drop_index: u64,
    pub channel_model: ChannelModel,
    pub codebook: CodebookKind,
    pub best_gain_db: f64,
    /// Present for rate sweeps only.
    pub rate_bps_hz: Option<f64>,
    pub best_n: usize,
    pub best_s: usize,
    pub codebook_size: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeanRow {
    pub x: f64,
    pub channel_model: ChannelModel,
    pub codebook: CodebookKind,
    pub mean_gain_db: f64,
    pub mean_rate_bps_hz: Option<f64>,
    pub drops: usize,
}

impl SweepResult {
    /// Mean over drops for every `(x, codebook)` group, in first-seen order.
    pub fn aggregate_mean(&self) -> Vec<MeanRow> {
        let mut out: Vec<(MeanRow, f64)> = Vec::new();
        for row in &self.rows {
            let slot = out
                .iter_mut()
                .rev()
                .find(|(m, _)| m.x == row.x && m.codebook == row.codebook && m.channel_model == row.channel_model);
            match slot {
                Some((m, rate_sum)) => {
                    m.mean_gain_db += row.best_gain_db;
                    *rate_sum += row.rate_bps_hz.unwrap_or(0.0);
                    m.drops += 1;
                }
                None => out.push((
                    MeanRow {
                        x: row.x,
                        channel_model: row.channel_model,
                        codebook: row.codebook,
                        mean_gain_db: row.best_gain_db,
                        mean_rate_bps_hz: row.rate_bps_hz.map(|_| 0.0),
                        drops: 1,
                    },
                    row.rate_bps_hz.unwrap_or(0.0),
                )),
            }
        }
        out.into_iter()
            .map(|(mut m, rate_sum)| {
                let n = m.drops as f64;
                m.mean_gain_db /= n;
                m.mean_rate_bps_hz = m.mean_rate_bps_hz.map(|_| rate_sum / n);
                m
            })
            .collect()
    }

    /// Mean rows for one codebook, in grid order.
    pub fn means_for(&self, codebook: CodebookKind) -> Vec<MeanRow> {
        self.aggregate_mean().into_iter().filter(|m| m.codebook == codebook).collect()
    }
}

fn outcome_row(x: f64, drop_index: u64, model: ChannelModel, book: &Codebook, out: &TrainingOutcome) -> SweepRow {
    let cw = &book.codewords[out.best_index];
    SweepRow {
        x,
        drop_index,
        channel_model: model,
        codebook: book.kind,
        best_gain_db: out.gain_db,
        rate_bps_hz: None,
        best_n: cw.angle_index,
        best_s: cw.ring,
        codebook_size: out.codebook_size,
    }
}

/// Beam gain of each codebook against the LoS steering direction at every
/// grid distance. Drop `j` at every distance shares its random direction.
pub fn run_gain_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.expect(SweepKind::GainVsDistance)?;
    let books = spec.build_codebooks()?;
    let geom = spec.scenario.geometry;
    let drops = spec.drops_per_point as u64;
    let items: Vec<(f64, u64)> =
        spec.distances.iter().flat_map(|&r| (0..drops).map(move |j| (r, j))).collect();

    let rows = spec.in_pool(|| {
        items
            .par_iter()
            .map(|&(r, j)| -> Result<Vec<SweepRow>> {
                let drop = sample_drop(&spec.scenario, j, Some(r))?;
                let h_dir = match spec.channel_model {
                    ChannelModel::NfSns | ChannelModel::NfStationary => nf_steering(&geom, drop.user)?.entries,
                    ChannelModel::FfPlanar => ff_steering(&geom, drop.user.theta)?.entries,
                };
                books
                    .iter()
                    .map(|b| Ok(outcome_row(r, j, spec.channel_model, b, &exhaustive_search(&h_dir, b)?)))
                    .collect()
            })
            .collect::<Result<Vec<_>>>()
    })??;
    Ok(SweepResult { rows: rows.into_iter().flatten().collect() })
}

/// Achievable rate of the trained beam on the full multipath channel. The
/// same drops (random distance and direction) are evaluated at every SNR.
pub fn run_rate_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.expect(SweepKind::RateVsSnr)?;
    let books = spec.build_codebooks()?;
    let geom = spec.scenario.geometry;

    let trained = spec.in_pool(|| {
        (0..spec.drops_per_point as u64)
            .into_par_iter()
            .map(|j| -> Result<Vec<(SweepRow, TrainingOutcome)>> {
                let drop = sample_drop(&spec.scenario, j, None)?;
                let real = drop.realization(&geom, spec.channel_model)?;
                let h = real.response();
                books
                    .iter()
                    .map(|b| {
                        let out = exhaustive_search(h, b)?;
                        Ok((outcome_row(f64::NAN, j, spec.channel_model, b, &out), out))
                    })
                    .collect()
            })
            .collect::<Result<Vec<_>>>()
    })??;

    // selection is SNR independent; only the rate is re-evaluated per point
    let mut rows = Vec::with_capacity(spec.snrs_db.len() * trained.len() * books.len());
    for &snr_db in &spec.snrs_db {
        let snr = 10f64.powf(snr_db / 10.0);
        for (base, out) in trained.iter().flatten() {
            rows.push(SweepRow { x: snr_db, rate_bps_hz: Some(out.rate(snr)), ..base.clone() });
        }
    }
    Ok(SweepResult { rows })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseProfileResult {
    pub element_offsets: Vec<f64>,
    pub planar: Vec<f64>,
    pub spherical: Vec<f64>,
    pub theta: f64,
    pub r: f64,
}

/// Unwrapped LoS phase across the array for the planar and spherical models.
pub fn run_phase_profile(spec: &SweepSpec) -> Result<PhaseProfileResult> {
    spec.expect(SweepKind::PhaseProfile)?;
    let geom = spec.scenario.geometry;
    let drop = sample_drop(&spec.scenario, spec.probe_drop, Some(spec.probe_distance))?;
    let planar = phase_profile(&ff_steering(&geom, drop.user.theta)?);
    let spherical = phase_profile(&nf_steering(&geom, drop.user)?);
    let element_offsets = geom.element_positions().iter().map(|p| p[1]).collect();
    Ok(PhaseProfileResult { element_offsets, planar, spherical, theta: drop.user.theta, r: drop.user.r })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PdpResult {
    pub delay_bin: f64,
    /// `(model, N × B power matrix)` for the SnS and stationary channels.
    pub maps: Vec<(ChannelModel, Array2<f64>)>,
    /// Element support of every path under each model.
    pub supports: Vec<(ChannelModel, Vec<Vec<usize>>)>,
}

pub fn run_pdp(spec: &SweepSpec) -> Result<PdpResult> {
    spec.expect(SweepKind::Pdp)?;
    let geom = spec.scenario.geometry;
    let drop = sample_drop(&spec.scenario, spec.probe_drop, Some(spec.probe_distance))?;
    let mut maps = Vec::new();
    let mut supports = Vec::new();
    for model in [ChannelModel::NfSns, ChannelModel::NfStationary] {
        let real = drop.realization(&geom, model)?;
        maps.push((model, compute_pdp(&real, spec.delay_bin)?));
        supports.push((model, (0..real.paths.len()).map(|k| real.mask.support(k)).collect()));
    }
    Ok(PdpResult { delay_bin: spec.delay_bin, maps, supports })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(kind: SweepKind) -> SweepSpec {
        let mut spec = SweepSpec { kind, drops_per_point: 6, ..Default::default() };
        spec.scenario.geometry = crate::geometry::ArrayGeometry::ula_half_wavelength(32, 15e9).unwrap();
        spec.scenario.r_min = 2.0;
        spec.distances = vec![2.0, 5.0, 9.0];
        spec.snrs_db = vec![100.0, 110.0];
        spec
    }

    #[test]
    fn gain_rows_in_order() {
        let spec = small(SweepKind::GainVsDistance);
        let res = run_gain_sweep(&spec).unwrap();
        assert_eq!(res.rows.len(), 3 * 6 * 2);
        let keys: Vec<(f64, u64, CodebookKind)> = res.rows.iter().map(|r| (r.x, r.drop_index, r.codebook)).collect();
        let mut sorted = keys.clone();
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then((a.2 as u8).cmp(&(b.2 as u8))));
        assert_eq!(keys, sorted);
        assert!(res.rows.iter().all(|r| r.best_gain_db <= 1e-12 && r.rate_bps_hz.is_none()));
        let means = res.aggregate_mean();
        assert_eq!(means.len(), 6);
        assert!(means.iter().all(|m| m.drops == 6));
    }

    #[test]
    fn rate_rows_superset() {
        let spec = small(SweepKind::RateVsSnr);
        let res = run_rate_sweep(&spec).unwrap();
        assert_eq!(res.rows.len(), 2 * 6 * 2);
        for pair in res.rows.chunks(2) {
            assert_eq!(pair[0].codebook, CodebookKind::FarField);
            assert_eq!(pair[1].codebook, CodebookKind::NearField);
            assert!(pair[1].rate_bps_hz.unwrap() >= pair[0].rate_bps_hz.unwrap());
        }
        // higher SNR never lowers the rate of the same trained beam
        let half = res.rows.len() / 2;
        for (lo, hi) in res.rows[..half].iter().zip(&res.rows[half..]) {
            assert!(hi.rate_bps_hz.unwrap() >= lo.rate_bps_hz.unwrap());
        }
    }

    #[test]
    fn kind_mismatch_and_bad_grids() {
        let spec = small(SweepKind::RateVsSnr);
        assert!(run_gain_sweep(&spec).is_err());
        let mut spec = small(SweepKind::GainVsDistance);
        spec.distances = vec![5.0, 5.0];
        assert!(run_gain_sweep(&spec).is_err());
        spec.distances.clear();
        assert!(run_gain_sweep(&spec).is_err());
        let spec = SweepSpec { drops_per_point: 0, ..small(SweepKind::GainVsDistance) };
        assert!(spec.validate().is_err());
    }

    #[test]
    fn thread_count_does_not_change_rows() {
        let mut spec = small(SweepKind::RateVsSnr);
        spec.threads = Some(1);
        let a = run_rate_sweep(&spec).unwrap();
        spec.threads = Some(4);
        let b = run_rate_sweep(&spec).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn probes() {
        let mut spec = small(SweepKind::PhaseProfile);
        spec.probe_distance = 4.0;
        let prof = run_phase_profile(&spec).unwrap();
        assert_eq!(prof.planar.len(), 32);
        assert_eq!(prof.r, 4.0);

        spec.kind = SweepKind::Pdp;
        spec.scenario.num_nlos_paths = 0;
        let pdp = run_pdp(&spec).unwrap();
        for (_, map) in &pdp.maps {
            // LoS only: one ridge
            for row in map.rows() {
                assert_eq!(row.iter().filter(|&&p| p > 0.0).count(), 1);
            }
        }
    }
}
