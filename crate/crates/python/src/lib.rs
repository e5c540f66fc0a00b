//! Python bindings: array geometry, steering vectors, codebooks, beam
//! training, stochastic drops and the Monte Carlo sweeps.

use ndarray::Array1;
use nfsim_core::codebook::{self, CodebookKind, DEFAULT_BETA};
use nfsim_core::config::parse_config;
use nfsim_core::experiments::{self, SweepKind, SweepResult, SweepSpec};
use nfsim_core::stochastic::{sample_drop, ChannelModel};
use nfsim_core::{steering, training, ArrayGeometry, NfError, PolarPoint, SteeringModel};
use num_complex::Complex64;
use pyo3::exceptions::{PyIOError, PyIndexError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn py_err(e: NfError) -> PyErr {
    match e {
        NfError::Io(e) => PyIOError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn point(theta: f64, r: Option<f64>) -> PyResult<PolarPoint> {
    match r {
        Some(r) => PolarPoint::new(theta, r),
        None => PolarPoint::far(theta),
    }
    .map_err(py_err)
}

fn parse_model(name: &str) -> PyResult<SteeringModel> {
    match name {
        "exact" => Ok(SteeringModel::ExactSpherical),
        "planar" => Ok(SteeringModel::PlanarFF),
        "fresnel" => Ok(SteeringModel::FresnelSecondOrder),
        _ => Err(PyValueError::new_err(format!("unknown steering model '{name}'"))),
    }
}

fn parse_channel_model(name: &str) -> PyResult<ChannelModel> {
    ChannelModel::parse(name).ok_or_else(|| PyValueError::new_err(format!("unknown channel model '{name}'")))
}

fn to_array(v: Vec<Complex64>) -> Array1<Complex64> {
    Array1::from_vec(v)
}

/// Antenna array with its carrier frequency.
#[pyclass(name = "Geometry", module = "nfsim", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyGeometry {
    inner: ArrayGeometry,
}

#[pymethods]
impl PyGeometry {
    /// Uniform linear array; half-wavelength spacing when `spacing_m` is omitted.
    #[staticmethod]
    #[pyo3(signature = (num_elements, carrier_frequency_hz, spacing_m=None))]
    fn ula(num_elements: usize, carrier_frequency_hz: f64, spacing_m: Option<f64>) -> PyResult<Self> {
        let inner = match spacing_m {
            Some(d) => ArrayGeometry::ula(num_elements, d, carrier_frequency_hz),
            None => ArrayGeometry::ula_half_wavelength(num_elements, carrier_frequency_hz),
        }
        .map_err(py_err)?;
        Ok(Self { inner })
    }

    /// Uniform circular array.
    #[staticmethod]
    fn uca(num_elements: usize, radius_m: f64, carrier_frequency_hz: f64) -> PyResult<Self> {
        let inner = ArrayGeometry::uca(num_elements, radius_m, carrier_frequency_hz).map_err(py_err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn num_elements(&self) -> usize {
        self.inner.num_elements()
    }

    #[getter]
    fn carrier_frequency_hz(&self) -> f64 {
        self.inner.carrier_frequency()
    }

    #[getter]
    fn wavelength(&self) -> f64 {
        self.inner.wavelength()
    }

    #[getter]
    fn spacing_m(&self) -> Option<f64> {
        self.inner.spacing()
    }

    #[getter]
    fn aperture(&self) -> f64 {
        self.inner.aperture()
    }

    fn rayleigh_distance(&self) -> f64 {
        self.inner.rayleigh_distance()
    }

    fn fresnel_distance(&self) -> f64 {
        self.inner.fresnel_distance()
    }

    fn element_positions(&self) -> Vec<(f64, f64)> {
        self.inner.element_positions().into_iter().map(|[x, y]| (x, y)).collect()
    }

    fn __repr__(&self) -> String {
        format!(
            "Geometry({:?}, num_elements={}, carrier_frequency_hz={})",
            self.inner.layout(),
            self.inner.num_elements(),
            self.inner.carrier_frequency()
        )
    }
}

/// Unit-norm steering vector; far field when `r` is omitted.
#[pyfunction]
#[pyo3(signature = (geometry, theta, r=None, model="exact"))]
fn steering_vector(geometry: &PyGeometry, theta: f64, r: Option<f64>, model: &str) -> PyResult<Vec<Complex64>> {
    let model = match (model, r) {
        ("exact", None) => SteeringModel::PlanarFF,
        _ => parse_model(model)?,
    };
    let v = steering::steering(&geometry.inner, point(theta, r)?, model).map_err(py_err)?;
    Ok(v.entries.to_vec())
}

#[pyfunction]
fn nf_steering(geometry: &PyGeometry, theta: f64, r: f64) -> PyResult<Vec<Complex64>> {
    let v = steering::nf_steering(&geometry.inner, point(theta, Some(r))?).map_err(py_err)?;
    Ok(v.entries.to_vec())
}

#[pyfunction]
fn ff_steering(geometry: &PyGeometry, theta: f64) -> PyResult<Vec<Complex64>> {
    let v = steering::ff_steering(&geometry.inner, theta).map_err(py_err)?;
    Ok(v.entries.to_vec())
}

/// Worst-case unwrapped phase deviation of `model` from the exact spherical model.
#[pyfunction]
#[pyo3(signature = (geometry, theta, r, model="planar"))]
fn phase_error(geometry: &PyGeometry, theta: f64, r: f64, model: &str) -> PyResult<f64> {
    steering::phase_error(&geometry.inner, point(theta, Some(r))?, parse_model(model)?).map_err(py_err)
}

/// Unwrapped per-element phase of a steering vector.
#[pyfunction]
#[pyo3(signature = (geometry, theta, r=None, model="exact"))]
fn phase_profile(geometry: &PyGeometry, theta: f64, r: Option<f64>, model: &str) -> PyResult<Vec<f64>> {
    let model = match (model, r) {
        ("exact", None) => SteeringModel::PlanarFF,
        _ => parse_model(model)?,
    };
    let v = steering::steering(&geometry.inner, point(theta, r)?, model).map_err(py_err)?;
    Ok(steering::phase_profile(&v))
}

/// Far-field (DFT) or near-field (polar-domain) beam codebook.
#[pyclass(name = "Codebook", module = "nfsim", frozen)]
struct PyCodebook {
    inner: codebook::Codebook,
}

#[pymethods]
impl PyCodebook {
    #[staticmethod]
    fn far_field(geometry: &PyGeometry) -> PyResult<Self> {
        let inner = codebook::build_ff_codebook(&geometry.inner).map_err(py_err)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    #[pyo3(signature = (geometry, beta=DEFAULT_BETA, r_floor_m=5.0))]
    fn near_field(geometry: &PyGeometry, beta: f64, r_floor_m: f64) -> PyResult<Self> {
        let inner = codebook::build_nf_codebook(&geometry.inner, beta, r_floor_m).map_err(py_err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn kind(&self) -> &'static str {
        self.inner.kind.as_str()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    /// `(n, s, theta, r_m)` for every codeword, `r_m = inf` for far-field beams.
    fn entries(&self) -> Vec<(usize, usize, f64, f64)> {
        self.inner.iter().map(|c| (c.angle_index, c.ring, c.theta, c.r)).collect()
    }

    fn weights(&self, index: usize) -> PyResult<Vec<Complex64>> {
        self.inner
            .codewords
            .get(index)
            .map(|c| c.weights.to_vec())
            .ok_or_else(|| PyIndexError::new_err("codeword index out of range"))
    }

    fn rings_per_angle(&self) -> Vec<usize> {
        self.inner.rings_per_angle()
    }
}

/// Rings at one angle, nearest last; the first entry is the far-field beam.
#[pyfunction]
#[pyo3(signature = (geometry, theta, beta=DEFAULT_BETA, r_floor_m=5.0))]
fn distance_rings(geometry: &PyGeometry, theta: f64, beta: f64, r_floor_m: f64) -> PyResult<Vec<f64>> {
    codebook::distance_rings(&geometry.inner, theta, beta, r_floor_m).map_err(py_err)
}

/// Exhaustive search over a codebook; returns the best index and gains.
#[pyfunction]
fn exhaustive_search<'py>(py: Python<'py>, h: Vec<Complex64>, codebook: &PyCodebook) -> PyResult<Bound<'py, PyDict>> {
    let out = training::exhaustive_search(&to_array(h), &codebook.inner).map_err(py_err)?;
    let cw = &codebook.inner.codewords[out.best_index];
    let d = PyDict::new(py);
    d.set_item("best_index", out.best_index)?;
    d.set_item("best_n", cw.angle_index)?;
    d.set_item("best_s", cw.ring)?;
    d.set_item("best_gain", out.best_gain)?;
    d.set_item("gain_db", out.gain_db)?;
    d.set_item("received_power", out.received_power)?;
    d.set_item("codebook_size", out.codebook_size)?;
    Ok(d)
}

/// `log2(1 + snr·|hᴴw|²)` for codeword `index` at linear transmit SNR.
#[pyfunction]
fn achievable_rate(h: Vec<Complex64>, codebook: &PyCodebook, index: usize, snr_tx: f64) -> PyResult<f64> {
    let cw = codebook
        .inner
        .codewords
        .get(index)
        .ok_or_else(|| PyIndexError::new_err("codeword index out of range"))?;
    training::achievable_rate(&to_array(h), cw, snr_tx).map_err(py_err)
}

/// Scenario and sweep settings parsed from `key = value` text.
#[pyclass(name = "Scenario", module = "nfsim", frozen)]
struct PyScenario {
    spec: SweepSpec,
}

fn rows_to_py<'py>(py: Python<'py>, result: &SweepResult, mean: bool) -> PyResult<Vec<Bound<'py, PyDict>>> {
    if mean {
        result
            .aggregate_mean()
            .iter()
            .map(|m| {
                let d = PyDict::new(py);
                d.set_item("x", m.x)?;
                d.set_item("channel_model", m.channel_model.as_str())?;
                d.set_item("codebook", m.codebook.as_str())?;
                d.set_item("mean_best_gain_db", m.mean_gain_db)?;
                d.set_item("mean_rate_bps_hz", m.mean_rate_bps_hz)?;
                d.set_item("drops", m.drops)?;
                Ok(d)
            })
            .collect()
    } else {
        result
            .rows
            .iter()
            .map(|r| {
                let d = PyDict::new(py);
                d.set_item("x", r.x)?;
                d.set_item("drop", r.drop_index)?;
                d.set_item("channel_model", r.channel_model.as_str())?;
                d.set_item("codebook", r.codebook.as_str())?;
                d.set_item("best_gain_db", r.best_gain_db)?;
                d.set_item("rate_bps_hz", r.rate_bps_hz)?;
                d.set_item("best_n", r.best_n)?;
                d.set_item("best_s", r.best_s)?;
                d.set_item("codebook_size", r.codebook_size)?;
                Ok(d)
            })
            .collect()
    }
}

impl PyScenario {
    fn with_kind(&self, kind: SweepKind) -> PyResult<SweepSpec> {
        let mut spec = self.spec.clone();
        spec.kind = kind;
        spec.validate().map_err(py_err)?;
        Ok(spec)
    }
}

#[pymethods]
impl PyScenario {
    #[new]
    #[pyo3(signature = (config_text="", seed=None))]
    fn new(config_text: &str, seed: Option<u64>) -> PyResult<Self> {
        let mut spec = parse_config(config_text).map_err(py_err)?;
        if let Some(seed) = seed {
            spec.scenario.master_seed = seed;
        }
        spec.scenario.validate().map_err(py_err)?;
        Ok(Self { spec })
    }

    #[getter]
    fn geometry(&self) -> PyGeometry {
        PyGeometry { inner: self.spec.scenario.geometry.clone() }
    }

    #[getter]
    fn master_seed(&self) -> u64 {
        self.spec.scenario.master_seed
    }

    /// Array response `h` of drop `drop_index`; distance is drawn when omitted.
    #[pyo3(signature = (drop_index, distance_m=None, model="NF_SnS"))]
    fn channel(&self, drop_index: u64, distance_m: Option<f64>, model: &str) -> PyResult<Vec<Complex64>> {
        let model = parse_channel_model(model)?;
        let d = sample_drop(&self.spec.scenario, drop_index, distance_m).map_err(py_err)?;
        let real = d.realization(&self.spec.scenario.geometry, model).map_err(py_err)?;
        Ok(real.response().to_vec())
    }

    /// User position `(theta, r_m)` of drop `drop_index`.
    #[pyo3(signature = (drop_index, distance_m=None))]
    fn user(&self, drop_index: u64, distance_m: Option<f64>) -> PyResult<(f64, f64)> {
        let d = sample_drop(&self.spec.scenario, drop_index, distance_m).map_err(py_err)?;
        Ok((d.user.theta, d.user.r))
    }

    #[pyo3(signature = (mean=false))]
    fn sweep_gain<'py>(&self, py: Python<'py>, mean: bool) -> PyResult<Vec<Bound<'py, PyDict>>> {
        let spec = self.with_kind(SweepKind::GainVsDistance)?;
        let result = py.detach(|| experiments::run_gain_sweep(&spec)).map_err(py_err)?;
        rows_to_py(py, &result, mean)
    }

    #[pyo3(signature = (mean=false))]
    fn sweep_rate<'py>(&self, py: Python<'py>, mean: bool) -> PyResult<Vec<Bound<'py, PyDict>>> {
        let spec = self.with_kind(SweepKind::RateVsSnr)?;
        let result = py.detach(|| experiments::run_rate_sweep(&spec)).map_err(py_err)?;
        rows_to_py(py, &result, mean)
    }

    /// `(element_offsets_m, planar_phase_rad, spherical_phase_rad)` of the probe drop's LoS.
    fn phase_profile(&self) -> PyResult<(Vec<f64>, Vec<f64>, Vec<f64>)> {
        let spec = self.with_kind(SweepKind::PhaseProfile)?;
        let p = experiments::run_phase_profile(&spec).map_err(py_err)?;
        Ok((p.element_offsets, p.planar, p.spherical))
    }

    /// Element × delay power map, one nested list per channel model.
    fn pdp(&self) -> PyResult<Vec<(String, Vec<Vec<f64>>)>> {
        let spec = self.with_kind(SweepKind::Pdp)?;
        let p = experiments::run_pdp(&spec).map_err(py_err)?;
        Ok(p.maps
            .iter()
            .map(|(m, map)| (m.as_str().to_string(), map.outer_iter().map(|row| row.to_vec()).collect()))
            .collect())
    }

    /// Codebook of `kind` ("FF" or "NF") with this scenario's beta and floor.
    fn codebook(&self, kind: &str) -> PyResult<PyCodebook> {
        let kind = CodebookKind::parse(kind).ok_or_else(|| PyValueError::new_err(format!("unknown codebook '{kind}'")))?;
        let inner = codebook::build_codebook(&self.spec.scenario.geometry, kind, self.spec.beta, self.spec.r_floor)
            .map_err(py_err)?;
        Ok(PyCodebook { inner })
    }
}

#[pymodule]
fn nfsim(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("SPEED_OF_LIGHT", nfsim_core::SPEED_OF_LIGHT)?;
    m.add("DEFAULT_BETA", DEFAULT_BETA)?;
    m.add_class::<PyGeometry>()?;
    m.add_class::<PyCodebook>()?;
    m.add_class::<PyScenario>()?;
    m.add_function(wrap_pyfunction!(steering_vector, m)?)?;
    m.add_function(wrap_pyfunction!(nf_steering, m)?)?;
    m.add_function(wrap_pyfunction!(ff_steering, m)?)?;
    m.add_function(wrap_pyfunction!(phase_error, m)?)?;
    m.add_function(wrap_pyfunction!(phase_profile, m)?)?;
    m.add_function(wrap_pyfunction!(distance_rings, m)?)?;
    m.add_function(wrap_pyfunction!(exhaustive_search, m)?)?;
    m.add_function(wrap_pyfunction!(achievable_rate, m)?)?;
    Ok(())
}
