//! File formats: field grids, trajectories, events and run manifests.

use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::kinematics::TrajectoryHistory;
use crate::propagation::FieldSample;
use crate::units::{Dimension, UnitScale};
use crate::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "jsonl",
        }
    }
}

/// One row of a field grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridRow {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    #[serde(rename = "Ex")]
    pub ex: f64,
    #[serde(rename = "Ey")]
    pub ey: f64,
    #[serde(rename = "Ez")]
    pub ez: f64,
    #[serde(rename = "Bx")]
    pub bx: f64,
    #[serde(rename = "By")]
    pub by: f64,
    #[serde(rename = "Bz")]
    pub bz: f64,
    pub region: String,
    pub shell_count: usize,
}

impl GridRow {
    pub fn from_sample(x: &Vec3, t: f64, sample: &FieldSample) -> Self {
        let f = sample.regular;
        Self {
            t,
            x: x.x,
            y: x.y,
            z: x.z,
            ex: f.e.x,
            ey: f.e.y,
            ez: f.e.z,
            bx: f.b.x,
            by: f.b.y,
            bz: f.b.z,
            region: sample.region.label().to_string(),
            shell_count: sample.shells.len(),
        }
    }

    pub fn position(&self) -> Vec3 {
        Vec3::new(self.x, self.y, self.z)
    }

    /// Natural units to SI.
    pub fn to_si(&self, scale: &UnitScale) -> Self {
        let l = |v| scale.to_si(v, Dimension::Length);
        let e = |v| scale.to_si(v, Dimension::ElectricField);
        let b = |v| scale.to_si(v, Dimension::MagneticField);
        Self {
            t: scale.to_si(self.t, Dimension::Time),
            x: l(self.x),
            y: l(self.y),
            z: l(self.z),
            ex: e(self.ex),
            ey: e(self.ey),
            ez: e(self.ez),
            bx: b(self.bx),
            by: b(self.by),
            bz: b(self.bz),
            region: self.region.clone(),
            shell_count: self.shell_count,
        }
    }
}

pub fn write_grid<W: Write>(rows: &[GridRow], format: OutputFormat, out: W) -> Result<()> {
    match format {
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for r in rows {
                w.serialize(r)?;
            }
            w.flush()?;
        }
        OutputFormat::Json => {
            let mut out = out;
            for r in rows {
                serde_json::to_writer(&mut out, r)?;
                out.write_all(b"\n")?;
            }
            out.flush()?;
        }
    }
    Ok(())
}

pub fn read_grid<R: Read>(input: R, format: OutputFormat) -> Result<Vec<GridRow>> {
    match format {
        OutputFormat::Csv => csv::Reader::from_reader(input).deserialize().map(|r| r.map_err(Error::from)).collect(),
        OutputFormat::Json => BufReader::new(input)
            .lines()
            .filter(|l| l.as_ref().map(|s| !s.trim().is_empty()).unwrap_or(true))
            .map(|l| Ok(serde_json::from_str(&l?)?))
            .collect(),
    }
}

/// Writes `t,qx,qy,qz,px,py,pz` rows, converted to SI when `scale` is given.
pub fn write_trajectory<W: Write>(history: &TrajectoryHistory, scale: Option<&UnitScale>, out: W) -> Result<()> {
    let conv = |v: f64, d: Dimension| scale.map_or(v, |s| s.to_si(v, d));
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "qx", "qy", "qz", "px", "py", "pz"])?;
    for n in history.nodes() {
        let (q, p) = (n.q.map(|v| conv(v, Dimension::Length)), n.p.map(|v| conv(v, Dimension::Momentum)));
        let row = [conv(n.t, Dimension::Time), q.x, q.y, q.z, p.x, p.y, p.z];
        w.write_record(row.iter().map(|v| format!("{v:.17e}")))?;
    }
    w.flush()?;
    Ok(())
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestFile {
    pub name: String,
    pub sha256: String,
}

/// Written next to every run's outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config_sha256: Option<String>,
    pub units: String,
    pub tolerances: serde_json::Value,
    pub files: Vec<ManifestFile>,
}

impl Manifest {
    pub fn new(command: &str, config: Option<&[u8]>, units: &str, tolerances: serde_json::Value) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            config_sha256: config.map(sha256_hex),
            units: units.to_string(),
            tolerances,
            files: Vec::new(),
        }
    }
}

/// Collects output files of one run in a directory and records their hashes.
pub struct RunDir {
    dir: std::path::PathBuf,
    pub manifest: Manifest,
}

impl RunDir {
    pub fn create(dir: &Path, manifest: Manifest) -> Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self { dir: dir.to_path_buf(), manifest })
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        fs::write(self.dir.join(name), bytes)?;
        self.manifest.files.push(ManifestFile { name: name.to_string(), sha256: sha256_hex(bytes) });
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut bytes = serde_json::to_vec_pretty(value)?;
        bytes.push(b'\n');
        self.write(name, &bytes)
    }

    pub fn finish(self) -> Result<std::path::PathBuf> {
        let mut bytes = serde_json::to_vec_pretty(&self.manifest)?;
        bytes.push(b'\n');
        fs::write(self.dir.join("manifest.json"), bytes)?;
        Ok(self.dir)
    }
}
