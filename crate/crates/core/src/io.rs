//! CSV emission for sweeps, codebooks, phase profiles and PDPs, plus a text
//! round-trip format for channel realizations.
//!
//! Floats are written with 17 significant digits. A realization is stored as
//! a manifold file (`element,path,S,Re(A),Im(A)`) with `paths.csv` and
//! `meta.csv` sidecars in the same directory.

use std::fs::File;
use std::io::Write;
use std::path::{Path as FsPath, PathBuf};

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::channel::{cfr_paths, compose_sns, ChannelRealization, Path, PathKind, SnsMask};
use crate::codebook::Codebook;
use crate::error::{NfError, Result};
use crate::experiments::{MeanRow, PdpResult, PhaseProfileResult, SweepResult};
use crate::geometry::{ArrayGeometry, Layout, PolarPoint};

pub const REALIZATION_FORMAT_VERSION: u32 = 1;

pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "NaN".to_string()
    } else if v > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

fn csv_err(e: csv::Error) -> NfError {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => NfError::Io(io),
        other => NfError::Format(format!("{other:?}")),
    }
}

fn writer<W: Write>(w: W, header: &[&str]) -> Result<csv::Writer<W>> {
    let mut out = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    out.write_record(header).map_err(csv_err)?;
    Ok(out)
}

fn finish<W: Write>(mut w: csv::Writer<W>) -> Result<()> {
    w.flush()?;
    Ok(())
}

pub fn write_sweep_csv<W: Write>(result: &SweepResult, w: W) -> Result<()> {
    let mut out = writer(
        w,
        &["x", "drop", "channel_model", "codebook", "best_gain_db", "rate_bps_hz", "best_n", "best_s", "codebook_size"],
    )?;
    for r in &result.rows {
        out.write_record([
            fmt_f64(r.x),
            r.drop_index.to_string(),
            r.channel_model.as_str().to_string(),
            r.codebook.as_str().to_string(),
            fmt_f64(r.best_gain_db),
            r.rate_bps_hz.map(fmt_f64).unwrap_or_default(),
            r.best_n.to_string(),
            r.best_s.to_string(),
            r.codebook_size.to_string(),
        ])
        .map_err(csv_err)?;
    }
    finish(out)
}

pub fn write_mean_csv<W: Write>(rows: &[MeanRow], w: W) -> Result<()> {
    let mut out = writer(w, &["x", "channel_model", "codebook", "mean_best_gain_db", "mean_rate_bps_hz", "drops"])?;
    for r in rows {
        out.write_record([
            fmt_f64(r.x),
            r.channel_model.as_str().to_string(),
            r.codebook.as_str().to_string(),
            fmt_f64(r.mean_gain_db),
            r.mean_rate_bps_hz.map(fmt_f64).unwrap_or_default(),
            r.drops.to_string(),
        ])
        .map_err(csv_err)?;
    }
    finish(out)
}

pub fn write_codebook_csv<W: Write>(book: &Codebook, w: W) -> Result<()> {
    let mut out = writer(w, &["n", "s", "theta", "r_m", "element", "Re(w)", "Im(w)"])?;
    for cw in book.iter() {
        for (m, z) in cw.weights.iter().enumerate() {
            out.write_record([
                cw.angle_index.to_string(),
                cw.ring.to_string(),
                fmt_f64(cw.theta),
                fmt_f64(cw.r),
                m.to_string(),
                fmt_f64(z.re),
                fmt_f64(z.im),
            ])
            .map_err(csv_err)?;
        }
    }
    finish(out)
}

pub fn write_phase_profile_csv<W: Write>(profile: &PhaseProfileResult, w: W) -> Result<()> {
    let mut out = writer(w, &["element", "offset_m", "ff_phase_rad", "nf_phase_rad"])?;
    for (m, ((y, ff), nf)) in profile
        .element_offsets
        .iter()
        .zip(&profile.planar)
        .zip(&profile.spherical)
        .enumerate()
    {
        out.write_record([m.to_string(), fmt_f64(*y), fmt_f64(*ff), fmt_f64(*nf)]).map_err(csv_err)?;
    }
    finish(out)
}

pub fn write_pdp_csv<W: Write>(pdp: &PdpResult, w: W) -> Result<()> {
    let mut out = writer(w, &["channel_model", "element", "bin", "delay_s", "power"])?;
    for (model, map) in &pdp.maps {
        for ((m, b), p) in map.indexed_iter() {
            out.write_record([
                model.as_str().to_string(),
                m.to_string(),
                b.to_string(),
                fmt_f64(b as f64 * pdp.delay_bin),
                fmt_f64(*p),
            ])
            .map_err(csv_err)?;
        }
    }
    finish(out)
}

fn sidecar(manifold_path: &FsPath, name: &str) -> PathBuf {
    manifold_path.parent().map(|d| d.join(name)).unwrap_or_else(|| PathBuf::from(name))
}

/// Write the manifold at `freq_index` plus `paths.csv` and `meta.csv`
/// beside `manifold_path`.
pub fn save_realization(real: &ChannelRealization, freq_index: usize, manifold_path: &FsPath) -> Result<()> {
    let a = real
        .manifolds
        .get(freq_index)
        .ok_or_else(|| NfError::Format(format!("no frequency index {freq_index}")))?;
    {
        let mut out = writer(File::create(manifold_path)?, &["element", "path", "S", "Re(A)", "Im(A)"])?;
        for ((m, k), z) in a.indexed_iter() {
            out.write_record([m.to_string(), k.to_string(), fmt_f64(real.mask.values[[m, k]]), fmt_f64(z.re), fmt_f64(z.im)])
                .map_err(csv_err)?;
        }
        finish(out)?;
    }
    {
        let mut out = writer(
            File::create(sidecar(manifold_path, "paths.csv"))?,
            &["k", "Re(alpha)", "Im(alpha)", "tau_s", "x_m", "y_m", "kind"],
        )?;
        for (k, p) in real.paths.iter().enumerate() {
            out.write_record([
                k.to_string(),
                fmt_f64(p.amplitude.re),
                fmt_f64(p.amplitude.im),
                fmt_f64(p.delay),
                fmt_f64(p.first_scatterer[0]),
                fmt_f64(p.first_scatterer[1]),
                p.kind.as_str().to_string(),
            ])
            .map_err(csv_err)?;
        }
        finish(out)?;
    }
    let g = &real.geometry;
    let (layout, size_key, size) = match g.layout() {
        Layout::Ula { spacing } => ("ula", "spacing_m", spacing),
        Layout::Uca { radius } => ("uca", "radius_m", radius),
    };
    let mut out = writer(File::create(sidecar(manifold_path, "meta.csv"))?, &["key", "value"])?;
    for (k, v) in [
        ("format_version", REALIZATION_FORMAT_VERSION.to_string()),
        ("layout", layout.to_string()),
        ("num_elements", g.num_elements().to_string()),
        (size_key, fmt_f64(size)),
        ("carrier_frequency_hz", fmt_f64(g.carrier_frequency())),
        ("frequency_hz", fmt_f64(real.frequencies[freq_index])),
        ("user_theta", fmt_f64(real.user.theta)),
        ("user_r_m", fmt_f64(real.user.r)),
    ] {
        out.write_record([k, v.as_str()]).map_err(csv_err)?;
    }
    finish(out)
}

fn read_rows(path: &FsPath, header: &[&str]) -> Result<Vec<csv::StringRecord>> {
    let mut rdr = csv::Reader::from_path(path).map_err(csv_err)?;
    let found = rdr.headers().map_err(csv_err)?.clone();
    if found.iter().ne(header.iter().copied()) {
        return Err(NfError::Format(format!("{}: unexpected header {:?}", path.display(), found)));
    }
    rdr.records().map(|r| r.map_err(csv_err)).collect()
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize) -> Result<T> {
    let raw = rec.get(i).ok_or_else(|| NfError::Format(format!("missing column {i}")))?;
    raw.trim().parse().map_err(|_| NfError::Format(format!("cannot parse {raw:?}")))
}

/// Read a realization written by [`save_realization`]; the CFR and response
/// are recomputed from the stored paths and factors.
pub fn load_realization(manifold_path: &FsPath) -> Result<ChannelRealization> {
    let meta_rows = read_rows(&sidecar(manifold_path, "meta.csv"), &["key", "value"])?;
    let meta = |key: &str| -> Result<String> {
        meta_rows
            .iter()
            .find(|r| r.get(0) == Some(key))
            .and_then(|r| r.get(1))
            .map(str::to_string)
            .ok_or_else(|| NfError::Format(format!("meta.csv lacks {key}")))
    };
    let num = |key: &str| -> Result<f64> {
        meta(key)?.parse().map_err(|_| NfError::Format(format!("meta.csv: bad {key}")))
    };
    let version: u32 = meta("format_version")?.parse().map_err(|_| NfError::Format("bad format_version".into()))?;
    if version != REALIZATION_FORMAT_VERSION {
        return Err(NfError::Format(format!("unsupported realization format version {version}")));
    }
    let n: usize = meta("num_elements")?.parse().map_err(|_| NfError::Format("bad num_elements".into()))?;
    let fc = num("carrier_frequency_hz")?;
    let geometry = match meta("layout")?.as_str() {
        "ula" => ArrayGeometry::ula(n, num("spacing_m")?, fc)?,
        "uca" => ArrayGeometry::uca(n, num("radius_m")?, fc)?,
        other => return Err(NfError::Format(format!("unknown layout {other}"))),
    };
    let frequency = num("frequency_hz")?;
    let user = PolarPoint::new(num("user_theta")?, num("user_r_m")?)?;

    let paths = read_rows(
        &sidecar(manifold_path, "paths.csv"),
        &["k", "Re(alpha)", "Im(alpha)", "tau_s", "x_m", "y_m", "kind"],
    )?
    .iter()
    .map(|r| {
        let kind = match r.get(6) {
            Some("LoS") => PathKind::LoS,
            Some("NLoS") => PathKind::NLoS,
            other => return Err(NfError::Format(format!("unknown path kind {other:?}"))),
        };
        Ok(Path {
            amplitude: Complex64::new(field(r, 1)?, field(r, 2)?),
            delay: field(r, 3)?,
            first_scatterer: [field(r, 4)?, field(r, 5)?],
            kind,
        })
    })
    .collect::<Result<Vec<_>>>()?;

    let k = paths.len();
    let mut s = Array2::zeros((n, k));
    let mut a = Array2::zeros((n, k));
    let rows = read_rows(manifold_path, &["element", "path", "S", "Re(A)", "Im(A)"])?;
    if rows.len() != n * k {
        return Err(NfError::Format(format!("manifold has {} rows, expected {}", rows.len(), n * k)));
    }
    for r in &rows {
        let (m, j): (usize, usize) = (field(r, 0)?, field(r, 1)?);
        if m >= n || j >= k {
            return Err(NfError::Format(format!("manifold index ({m}, {j}) out of range")));
        }
        s[[m, j]] = field(r, 2)?;
        a[[m, j]] = Complex64::new(field(r, 3)?, field(r, 4)?);
    }
    let mask = SnsMask { values: s, regions: vec![None; k] };
    let h: Array1<Complex64> = cfr_paths(&paths, frequency)?;
    let response = compose_sns(&mask, &a, &h)?;
    Ok(ChannelRealization {
        geometry,
        user,
        frequencies: vec![frequency],
        paths,
        mask,
        manifolds: vec![a],
        cfrs: vec![h],
        responses: vec![response],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format() {
        assert_eq!(fmt_f64(1.0), "1.0000000000000000e0");
        assert_eq!(fmt_f64(f64::INFINITY), "inf");
        assert_eq!(fmt_f64(f64::NAN), "NaN");
        let v = 0.1f64 + 0.2;
        assert_eq!(fmt_f64(v).parse::<f64>().unwrap(), v);
    }
}
