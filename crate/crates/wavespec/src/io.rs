//! File formats: spectrum grids as JSON, Doppler spectra and experiment
//! tables as CSV, run summaries and manifests as JSON.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use wavespec_core::solver::IterationRecord;
use wavespec_core::{DopplerSpectrum, FrequencyDomain, GridGeometry, RadarParams, SpectrumGrid};

use crate::error::{Error, Result};

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io { path: path.to_path_buf(), source }
}

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> Error + '_ {
    move |source| Error::Csv { path: path.to_path_buf(), source }
}

fn json_err(path: &Path) -> impl FnOnce(serde_json::Error) -> Error + '_ {
    move |source| Error::Json { path: path.to_path_buf(), source }
}

/// Writes `bytes` to a sibling temporary file and renames it into place, so a
/// failed run never leaves a truncated output behind.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, bytes).map_err(io_err(&tmp))?;
    fs::rename(&tmp, path).map_err(io_err(path))
}

#[derive(Debug, Serialize, Deserialize)]
struct GridFile {
    n: usize,
    p_min: f64,
    p_max: f64,
    q_min: f64,
    q_max: f64,
    values: Vec<f64>,
}

pub fn grid_to_json(s: &SpectrumGrid) -> String {
    let g = s.geometry();
    let file = GridFile { n: g.n, p_min: g.p_min, p_max: g.p_max, q_min: g.q_min, q_max: g.q_max, values: s.values().to_vec() };
    serde_json::to_string(&file).expect("grid serializes")
}

pub fn grid_from_json(text: &str) -> std::result::Result<SpectrumGrid, String> {
    let file: GridFile = serde_json::from_str(text).map_err(|e| e.to_string())?;
    let geometry = GridGeometry::new(file.n, file.p_min, file.p_max, file.q_min, file.q_max).map_err(|e| e.to_string())?;
    if file.values.len() != geometry.len() {
        return Err(format!("expected {} values, found {}", geometry.len(), file.values.len()));
    }
    SpectrumGrid::from_values(geometry, file.values).map_err(|e| e.to_string())
}

pub fn write_grid(path: &Path, s: &SpectrumGrid) -> Result<()> {
    write_atomic(path, grid_to_json(s).as_bytes())
}

pub fn read_grid(path: &Path) -> Result<SpectrumGrid> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    grid_from_json(&text).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}

fn csv_bytes<T: Serialize>(rows: &[T], path: &Path) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(csv_err(path))?;
    }
    w.into_inner().map_err(|e| Error::Format(e.to_string()))
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    write_atomic(path, &csv_bytes(rows, path)?)
}

#[derive(Debug, Serialize, Deserialize)]
struct DopplerRow {
    omega_rad_s: f64,
    sigma2: f64,
}

pub fn write_doppler(path: &Path, sigma2: &DopplerSpectrum) -> Result<()> {
    let rows: Vec<DopplerRow> = sigma2
        .domain()
        .omegas()
        .iter()
        .zip(sigma2.values())
        .map(|(&omega_rad_s, &sigma2)| DopplerRow { omega_rad_s, sigma2 })
        .collect();
    if rows.is_empty() {
        // Keep the header so the file stays self-describing.
        return write_atomic(path, b"omega_rad_s,sigma2\n");
    }
    write_csv(path, &rows)
}

/// Reads a Doppler CSV. Rows outside the admissible domain are dropped with a
/// warning; the remaining samples define the frequency domain.
pub fn read_doppler(path: &Path, params: &RadarParams) -> Result<DopplerSpectrum> {
    let file = File::open(path).map_err(io_err(path))?;
    let mut reader = csv::Reader::from_reader(file);
    let headers = reader.headers().map_err(csv_err(path))?.clone();
    if headers.iter().collect::<Vec<_>>() != ["omega_rad_s", "sigma2"] {
        return Err(Error::Format(format!("{}: header must be omega_rad_s,sigma2", path.display())));
    }
    let mut rows: Vec<(f64, f64)> = Vec::new();
    let mut dropped = 0usize;
    for row in reader.deserialize::<DopplerRow>() {
        let row = row.map_err(csv_err(path))?;
        if !row.omega_rad_s.is_finite() || !row.sigma2.is_finite() {
            return Err(Error::Format(format!("{}: non-finite value at ω = {}", path.display(), row.omega_rad_s)));
        }
        if params.is_admissible_frequency(row.omega_rad_s) {
            rows.push((row.omega_rad_s, row.sigma2));
        } else {
            dropped += 1;
        }
    }
    if dropped > 0 {
        log::warn!("{}: dropped {dropped} samples outside the admissible frequency domain", path.display());
    }
    rows.sort_by(|a, b| a.0.total_cmp(&b.0));
    if rows.windows(2).any(|w| w[0].0 == w[1].0) {
        return Err(Error::Format(format!("{}: duplicate frequency samples", path.display())));
    }
    let domain = FrequencyDomain::from_samples(rows.iter().map(|r| r.0).collect(), params)?;
    Ok(DopplerSpectrum::new(domain, rows.into_iter().map(|r| r.1).collect())?)
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TraceRow {
    pub iter: usize,
    pub theta_total: f64,
    pub theta_misfit: f64,
    pub theta_tikhonov: f64,
    pub theta_sparsity: f64,
    pub step_t: f64,
    pub backtracks: usize,
    pub rel_err_pct: Option<f64>,
    pub hs_m: f64,
}

impl From<&IterationRecord> for TraceRow {
    fn from(r: &IterationRecord) -> Self {
        TraceRow {
            iter: r.iter,
            theta_total: r.theta.total,
            theta_misfit: r.theta.data_misfit,
            theta_tikhonov: r.theta.tikhonov,
            theta_sparsity: r.theta.sparsity,
            step_t: r.step,
            backtracks: r.backtracks,
            rel_err_pct: r.rel_err_pct,
            hs_m: r.hs,
        }
    }
}

pub fn write_trace(path: &Path, records: &[IterationRecord]) -> Result<()> {
    let rows: Vec<TraceRow> = records.iter().map(TraceRow::from).collect();
    write_csv(path, &rows)
}

/// One `(level, seed)` cell of a perturbation sweep.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SweepRow {
    pub level_pct: f64,
    pub seed: u64,
    pub err_init_pct: Option<f64>,
    pub err_final_pct: Option<f64>,
    pub hs_err_init_pct: Option<f64>,
    pub hs_err_final_pct: Option<f64>,
    pub iters: usize,
    pub status: String,
}

/// One row of the Doppler noise table.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct NoiseRow {
    pub noise_pct: f64,
    pub seed: u64,
    pub achieved_noise_pct: Option<f64>,
    pub spectrum_err_pct: Option<f64>,
    pub hs_err_pct: Option<f64>,
    pub iters: usize,
    pub status: String,
}

/// One `(δ, seed)` cell of the stability sweep.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct StabilityRow {
    pub delta: f64,
    pub seed: u64,
    pub lambda: f64,
    pub alpha: f64,
    pub err_final_pct: Option<f64>,
    pub hs_err_final_pct: Option<f64>,
    pub iters: usize,
    pub status: String,
}

pub fn write_rows<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    write_csv(path, rows)
}

pub fn read_rows<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let file = File::open(path).map_err(io_err(path))?;
    csv::Reader::from_reader(file).deserialize().collect::<std::result::Result<_, _>>().map_err(csv_err(path))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(json_err(path))?;
    bytes.push(b'\n');
    write_atomic(path, &bytes)
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(json_err(path))
}

/// Provenance record written next to every command's outputs.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Manifest {
    pub command: String,
    pub version: String,
    pub config_sha256: String,
    pub outputs: Vec<String>,
    /// Scalar results worth keeping with the outputs, such as achieved noise levels.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metrics: BTreeMap<String, f64>,
}

impl Manifest {
    /// Outputs are recorded by file name so manifests do not depend on where
    /// a run was placed.
    pub fn new(command: &str, config_sha256: String, outputs: &[&Path]) -> Self {
        Manifest {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config_sha256,
            outputs: outputs
                .iter()
                .map(|p| p.file_name().map_or_else(|| p.display().to_string(), |n| n.to_string_lossy().into_owned()))
                .collect(),
            metrics: BTreeMap::new(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_json_round_trip_is_exact() {
        let g = GridGeometry::new(5, -2.0, 2.0, -1.0, 3.0).unwrap();
        let s = SpectrumGrid::from_fn(g, |p, q| (p * 1.3).sin() * q.exp() / 7.0);
        let back = grid_from_json(&grid_to_json(&s)).unwrap();
        assert_eq!(back, s);
        assert_eq!(back.get(1, 4), s.values()[9]);
    }

    #[test]
    fn grid_json_rejects_bad_documents() {
        assert!(grid_from_json(r#"{"n":2,"p_min":0,"p_max":1,"q_min":0,"q_max":1,"values":[1,2,3]}"#).is_err());
        assert!(grid_from_json(r#"{"n":2,"p_min":1,"p_max":0,"q_min":0,"q_max":1,"values":[1,2,3,4]}"#).is_err());
        assert!(grid_from_json("not json").is_err());
    }

    #[test]
    fn doppler_round_trip_and_filtering() {
        let dir = tempfile::tempdir().unwrap();
        let params = RadarParams::new(0.51).unwrap();
        let domain = FrequencyDomain::symmetric(&params, 2.8, 40).unwrap();
        let values: Vec<f64> = domain.omegas().iter().map(|w| (w * 0.7).cos().abs() * 1e-3).collect();
        let sigma = DopplerSpectrum::new(domain, values).unwrap();
        let path = dir.path().join("d.csv");
        write_doppler(&path, &sigma).unwrap();
        let back = read_doppler(&path, &params).unwrap();
        assert_eq!(back.values(), sigma.values());
        assert_eq!(back.domain().omegas(), sigma.domain().omegas());

        let bragg = params.first_order_frequency();
        fs::write(&path, format!("omega_rad_s,sigma2\n{bragg},1.0\n1.0,2.0\n-1.5,3.0\n0.0,4.0\n")).unwrap();
        let filtered = read_doppler(&path, &params).unwrap();
        assert_eq!(filtered.domain().omegas(), &[-1.5, 1.0]);
        assert_eq!(filtered.values(), &[3.0, 2.0]);

        fs::write(&path, "omega,sigma2\n1.0,2.0\n").unwrap();
        assert!(read_doppler(&path, &params).is_err());
        assert!(read_doppler(&dir.path().join("missing.csv"), &params).is_err());
    }

    #[test]
    fn sweep_rows_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let rows = vec![
            SweepRow {
                level_pct: 5.0,
                seed: 1,
                err_init_pct: Some(5.0),
                err_final_pct: Some(4.0),
                hs_err_init_pct: Some(0.5),
                hs_err_final_pct: Some(0.25),
                iters: 20,
                status: "max_iterations".into(),
            },
            SweepRow {
                level_pct: 10.0,
                seed: 2,
                err_init_pct: None,
                err_final_pct: None,
                hs_err_init_pct: None,
                hs_err_final_pct: None,
                iters: 0,
                status: "failed".into(),
            },
        ];
        let path = dir.path().join("sweep.csv");
        write_rows(&path, &rows).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("level_pct,seed,err_init_pct,err_final_pct,hs_err_init_pct,hs_err_final_pct,iters,status\n"));
        assert_eq!(read_rows::<SweepRow>(&path).unwrap(), rows);
    }

    #[test]
    fn atomic_write_leaves_no_temp_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("nested/out.json");
        write_json(&path, &Manifest::new("simulate", "abc".into(), &[Path::new("x")])).unwrap();
        let names: Vec<_> = fs::read_dir(path.parent().unwrap()).unwrap().map(|e| e.unwrap().file_name()).collect();
        assert_eq!(names, ["out.json"]);
        let m: Manifest = read_json(&path).unwrap();
        assert_eq!(m.command, "simulate");
    }
}
