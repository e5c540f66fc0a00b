//! `key = value` configuration files.
//!
//! One key per line, `#` starts a comment, blank lines are ignored. Unknown or
//! repeated keys are rejected. Every key is optional and falls back to the
//! desk-scale defaults (150-element half-wavelength ULA at 15 GHz, 5–80 m).

use std::collections::HashMap;

use crate::codebook::CodebookKind;
use crate::error::{NfError, Result};
use crate::experiments::SweepSpec;
use crate::geometry::{ArrayGeometry, SPEED_OF_LIGHT};
use crate::stochastic::ChannelModel;

pub const KEYS: &[&str] = &[
    "layout",
    "num_elements",
    "carrier_frequency_hz",
    "spacing_m",
    "spacing_wavelengths",
    "radius_m",
    "r_min_m",
    "r_max_m",
    "num_nlos_paths",
    "rice_factor_db",
    "delay_spread_s",
    "scatterer_radius_min_m",
    "scatterer_radius_max_m",
    "vr_length_fraction_min",
    "vr_length_fraction_max",
    "vr_edge_fraction",
    "pathloss_exponent",
    "master_seed",
    "drops_per_point",
    "distance_start_m",
    "distance_stop_m",
    "distance_step_m",
    "snr_start_db",
    "snr_stop_db",
    "snr_step_db",
    "channel_model",
    "codebooks",
    "beta",
    "r_floor_m",
    "delay_bin_s",
    "probe_distance_m",
    "probe_drop",
    "threads",
];

fn cfg_err(msg: impl Into<String>) -> NfError {
    NfError::Config(msg.into())
}

struct Entries(HashMap<String, (usize, String)>);

impl Entries {
    fn take<T: std::str::FromStr>(&mut self, key: &str) -> Result<Option<T>> {
        match self.0.remove(key) {
            None => Ok(None),
            Some((line, raw)) => raw
                .parse()
                .map(Some)
                .map_err(|_| cfg_err(format!("line {line}: cannot parse {key} = {raw:?}"))),
        }
    }

    fn raw(&mut self, key: &str) -> Option<(usize, String)> {
        self.0.remove(key)
    }
}

/// Inclusive grid `start + i·step` while `≤ stop`.
pub fn linear_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && start.is_finite() && stop.is_finite() && start <= stop) {
        return Err(cfg_err(format!("invalid grid start={start} stop={stop} step={step}")));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| start + i as f64 * step).collect())
}

pub fn parse_config(text: &str) -> Result<SweepSpec> {
    let mut map = HashMap::new();
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| cfg_err(format!("line {lineno}: expected key = value")))?;
        let key = key.trim();
        if !KEYS.contains(&key) {
            return Err(cfg_err(format!("line {lineno}: unknown key {key:?}")));
        }
        if map.insert(key.to_string(), (lineno, value.trim().to_string())).is_some() {
            return Err(cfg_err(format!("line {lineno}: duplicate key {key:?}")));
        }
    }
    let mut e = Entries(map);
    let mut spec = SweepSpec::default();
    let defaults = spec.clone();

    let n: usize = e.take("num_elements")?.unwrap_or(defaults.scenario.geometry.num_elements());
    let fc: f64 = e.take("carrier_frequency_hz")?.unwrap_or(defaults.scenario.geometry.carrier_frequency());
    let layout = e.raw("layout").map(|(_, v)| v.to_ascii_lowercase()).unwrap_or_else(|| "ula".into());
    let spacing_m: Option<f64> = e.take("spacing_m")?;
    let spacing_wl: Option<f64> = e.take("spacing_wavelengths")?;
    let radius: Option<f64> = e.take("radius_m")?;
    let geometry = match layout.as_str() {
        "ula" => {
            if radius.is_some() {
                return Err(cfg_err("radius_m applies to layout = uca only"));
            }
            let spacing = match (spacing_m, spacing_wl) {
                (Some(_), Some(_)) => return Err(cfg_err("give spacing_m or spacing_wavelengths, not both")),
                (Some(d), None) => d,
                (None, w) => w.unwrap_or(0.5) * SPEED_OF_LIGHT / fc,
            };
            ArrayGeometry::ula(n, spacing, fc)
        }
        "uca" => {
            if spacing_m.is_some() || spacing_wl.is_some() {
                return Err(cfg_err("spacing keys apply to layout = ula only"));
            }
            ArrayGeometry::uca(n, radius.ok_or_else(|| cfg_err("layout = uca needs radius_m"))?, fc)
        }
        other => return Err(cfg_err(format!("unknown layout {other:?}"))),
    }
    .map_err(|e| cfg_err(e.to_string()))?;

    let sc = &mut spec.scenario;
    sc.geometry = geometry;
    sc.r_min = e.take("r_min_m")?.unwrap_or(sc.r_min);
    sc.r_max = e.take("r_max_m")?.unwrap_or(sc.r_max);
    sc.num_nlos_paths = e.take("num_nlos_paths")?.unwrap_or(sc.num_nlos_paths);
    sc.rice_factor_db = e.take("rice_factor_db")?.unwrap_or(sc.rice_factor_db);
    sc.delay_spread = e.take("delay_spread_s")?.unwrap_or(sc.delay_spread);
    sc.scatterer_radius.0 = e.take("scatterer_radius_min_m")?.unwrap_or(sc.scatterer_radius.0);
    sc.scatterer_radius.1 = e.take("scatterer_radius_max_m")?.unwrap_or(sc.scatterer_radius.1);
    sc.vr_length_fraction.0 = e.take("vr_length_fraction_min")?.unwrap_or(sc.vr_length_fraction.0);
    sc.vr_length_fraction.1 = e.take("vr_length_fraction_max")?.unwrap_or(sc.vr_length_fraction.1);
    sc.vr_edge_fraction = e.take("vr_edge_fraction")?.unwrap_or(sc.vr_edge_fraction);
    sc.pathloss_exponent = e.take("pathloss_exponent")?.unwrap_or(sc.pathloss_exponent);
    sc.master_seed = e.take("master_seed")?.unwrap_or(sc.master_seed);

    spec.drops_per_point = e.take("drops_per_point")?.unwrap_or(spec.drops_per_point);
    let d_start = e.take("distance_start_m")?;
    let d_stop = e.take("distance_stop_m")?;
    let d_step = e.take("distance_step_m")?;
    if d_start.is_some() || d_stop.is_some() || d_step.is_some() {
        spec.distances = linear_grid(d_start.unwrap_or(5.0), d_stop.unwrap_or(80.0), d_step.unwrap_or(1.0))?;
    }
    let s_start = e.take("snr_start_db")?;
    let s_stop = e.take("snr_stop_db")?;
    let s_step = e.take("snr_step_db")?;
    if s_start.is_some() || s_stop.is_some() || s_step.is_some() {
        spec.snrs_db = linear_grid(s_start.unwrap_or(100.0), s_stop.unwrap_or(115.0), s_step.unwrap_or(1.0))?;
    }
    if let Some((line, v)) = e.raw("channel_model") {
        spec.channel_model =
            ChannelModel::parse(&v).ok_or_else(|| cfg_err(format!("line {line}: unknown channel_model {v:?}")))?;
    }
    if let Some((line, v)) = e.raw("codebooks") {
        spec.codebooks = v
            .split(',')
            .map(|c| CodebookKind::parse(c).ok_or_else(|| cfg_err(format!("line {line}: unknown codebook {c:?}"))))
            .collect::<Result<_>>()?;
    }
    spec.beta = e.take("beta")?.unwrap_or(spec.beta);
    spec.r_floor = e.take("r_floor_m")?.unwrap_or(spec.r_floor);
    spec.delay_bin = e.take("delay_bin_s")?.unwrap_or(spec.delay_bin);
    spec.probe_distance = e.take("probe_distance_m")?.unwrap_or(spec.probe_distance);
    spec.probe_drop = e.take("probe_drop")?.unwrap_or(spec.probe_drop);
    if let Some(t) = e.take::<usize>("threads")? {
        spec.threads = Some(t);
    }
    debug_assert!(e.0.is_empty(), "unconsumed keys: {:?}", e.0.keys());

    spec.validate()?;
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn empty_config_is_default() {
        let spec = parse_config("# nothing here\n\n").unwrap();
        assert_eq!(spec, SweepSpec::default());
    }

    #[test]
    fn parses_fields() {
        let text = "\
num_elements = 64   # small array
carrier_frequency_hz = 28e9
r_min_m = 3
rice_factor_db = inf
codebooks = NF
channel_model = ff_planar
distance_start_m = 4
distance_stop_m = 10
distance_step_m = 2
master_seed = 99
threads = 3
";
        let spec = parse_config(text).unwrap();
        assert_eq!(spec.scenario.geometry.num_elements(), 64);
        assert_relative_eq!(spec.scenario.geometry.spacing().unwrap(), SPEED_OF_LIGHT / 28e9 / 2.0);
        assert!(spec.scenario.rice_factor_db.is_infinite());
        assert_eq!(spec.codebooks, vec![CodebookKind::NearField]);
        assert_eq!(spec.channel_model, ChannelModel::FfPlanar);
        assert_eq!(spec.distances, vec![4.0, 6.0, 8.0, 10.0]);
        assert_eq!(spec.scenario.master_seed, 99);
        assert_eq!(spec.threads, Some(3));
    }

    #[test]
    fn rejects_unknown_and_malformed() {
        assert!(matches!(parse_config("bogus = 1"), Err(NfError::Config(_))));
        assert!(parse_config("num_elements = many").is_err());
        assert!(parse_config("num_elements").is_err());
        assert!(parse_config("beta = 1\nbeta = 2").is_err());
        assert!(parse_config("spacing_m = 0.01\nspacing_wavelengths = 0.5").is_err());
        assert!(parse_config("layout = uca").is_err());
        assert!(parse_config("drops_per_point = 0").is_err());
        assert!(parse_config("channel_model = rayleigh").is_err());
    }

    #[test]
    fn uca_layout() {
        let spec = parse_config("layout = uca\nradius_m = 0.5\ncarrier_frequency_hz = 29e9\nnum_elements = 64\nr_min_m = 5\nscatterer_radius_min_m = 3").unwrap();
        assert!(!spec.scenario.geometry.is_ula());
        assert!((spec.scenario.geometry.rayleigh_distance() - 193.4).abs() < 0.1);
    }

    #[test]
    fn grid_endpoints() {
        assert_eq!(linear_grid(5.0, 80.0, 1.0).unwrap().len(), 76);
        assert_eq!(linear_grid(100.0, 115.0, 5.0).unwrap(), vec![100.0, 105.0, 110.0, 115.0]);
        assert!(linear_grid(1.0, 0.0, 1.0).is_err());
    }
}
