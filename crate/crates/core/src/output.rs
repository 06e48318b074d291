//! Files written by a run: trajectory and diagnostics CSV, per-component SVG
//! plots, the resolved scenario and the text summary.

use crate::config::to_config_string;
use crate::diagnostics::DiagnosticSample;
use crate::field::MagnetizationField;
use crate::integrator::Trajectory;
use crate::report::RunSummary;
use crate::scenario::ScenarioConfig;
use crate::vec3::Vec3;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

#[derive(Debug, thiserror::Error)]
pub enum OutputError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{}: {source}", path.display())]
    Csv { path: PathBuf, source: csv::Error },
    #[error("{}: {reason}", path.display())]
    Format { path: PathBuf, reason: String },
    #[error("{}: plotting failed: {reason}", path.display())]
    Plot { path: PathBuf, reason: String },
}

type Result<T> = std::result::Result<T, OutputError>;

/// 17 significant digits: parses back to the identical `f64`.
fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv_writer(path: &Path) -> Result<csv::Writer<File>> {
    csv::Writer::from_path(path).map_err(|source| OutputError::Csv {
        path: path.to_path_buf(),
        source,
    })
}

/// Header `t, m1_0, m2_0, m3_0, m1_1, ...`, one row per snapshot.
pub fn write_trajectory_csv(path: &Path, traj: &Trajectory) -> Result<()> {
    let csv_err = |source| OutputError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut w = csv_writer(path)?;
    let n = traj.snapshots.first().map_or(0, |s| s.state.len());
    let mut header = vec!["t".to_string()];
    for i in 0..n {
        for c in 1..=3 {
            header.push(format!("m{c}_{i}"));
        }
    }
    w.write_record(&header).map_err(csv_err)?;
    let mut row = Vec::with_capacity(1 + 3 * n);
    for s in &traj.snapshots {
        row.clear();
        row.push(num(s.t));
        for v in s.state.iter() {
            row.extend([num(v.x), num(v.y), num(v.z)]);
        }
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush().map_err(|source| OutputError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn parse_f64(path: &Path, line: u64, s: &str) -> Result<f64> {
    s.trim().parse().map_err(|_| OutputError::Format {
        path: path.to_path_buf(),
        reason: format!("record {line}: `{s}` is not a number"),
    })
}

fn csv_reader(path: &Path) -> Result<csv::Reader<File>> {
    csv::Reader::from_path(path).map_err(|source| OutputError::Csv {
        path: path.to_path_buf(),
        source,
    })
}

/// Reads a file written by [`write_trajectory_csv`].
pub fn read_trajectory_csv(path: &Path) -> Result<Vec<(f64, MagnetizationField)>> {
    let mut r = csv_reader(path)?;
    let width = r
        .headers()
        .map_err(|source| OutputError::Csv {
            path: path.to_path_buf(),
            source,
        })?
        .len();
    if width < 4 || (width - 1) % 3 != 0 {
        return Err(OutputError::Format {
            path: path.to_path_buf(),
            reason: format!("{width} columns; expected t plus three per node"),
        });
    }
    let mut out = Vec::new();
    for (line, rec) in (1..).zip(r.records()) {
        let rec = rec.map_err(|source| OutputError::Csv {
            path: path.to_path_buf(),
            source,
        })?;
        let vals: Vec<f64> = rec.iter().map(|s| parse_f64(path, line, s)).collect::<Result<_>>()?;
        let nodes = vals[1..].chunks_exact(3).map(|c| Vec3::new(c[0], c[1], c[2])).collect();
        let m = MagnetizationField::new(nodes).map_err(|e| OutputError::Format {
            path: path.to_path_buf(),
            reason: format!("record {line}: {e}"),
        })?;
        out.push((vals[0], m));
    }
    Ok(out)
}

/// Nodal initial data: header `x,m1,m2,m3`, one row per node.
pub fn read_nodal_csv(path: &Path) -> Result<MagnetizationField> {
    let mut r = csv_reader(path)?;
    let mut nodes = Vec::new();
    for (line, rec) in (1..).zip(r.records()) {
        let rec = rec.map_err(|source| OutputError::Csv {
            path: path.to_path_buf(),
            source,
        })?;
        if rec.len() != 4 {
            return Err(OutputError::Format {
                path: path.to_path_buf(),
                reason: format!("record {line}: expected 4 fields x,m1,m2,m3"),
            });
        }
        let v: Vec<f64> = rec.iter().map(|s| parse_f64(path, line, s)).collect::<Result<_>>()?;
        nodes.push(Vec3::new(v[1], v[2], v[3]));
    }
    MagnetizationField::new(nodes).map_err(|e| OutputError::Format {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })
}

pub fn write_nodal_csv(path: &Path, length: f64, m: &MagnetizationField) -> Result<()> {
    let mut w = csv_writer(path)?;
    let n = m.len() - 1;
    let csv_err = |source| OutputError::Csv {
        path: path.to_path_buf(),
        source,
    };
    w.write_record(["x", "m1", "m2", "m3"]).map_err(csv_err)?;
    for (i, v) in m.iter().enumerate() {
        let x = length * i as f64 / n as f64;
        w.write_record([num(x), num(v.x), num(v.y), num(v.z)]).map_err(csv_err)?;
    }
    w.flush().map_err(|source| OutputError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub const DIAGNOSTICS_HEADER: [&str; 9] = [
    "t",
    "phase",
    "l2_err_sq",
    "h1_semi_sq",
    "lyap",
    "sat_drift",
    "lemma3",
    "field_dissipation",
    "rhs_norm",
];

/// One row per recorded sample; `phase` counts from 1 and
/// `field_dissipation` is empty where it does not apply.
pub fn write_diagnostics_csv(path: &Path, samples: &[DiagnosticSample]) -> Result<()> {
    let mut w = csv_writer(path)?;
    let csv_err = |source| OutputError::Csv {
        path: path.to_path_buf(),
        source,
    };
    w.write_record(DIAGNOSTICS_HEADER).map_err(csv_err)?;
    for s in samples {
        w.write_record([
            num(s.t),
            (s.phase + 1).to_string(),
            num(s.l2_err_sq),
            num(s.h1_semi_sq),
            num(s.lyap),
            num(s.sat_drift),
            num(s.lemma3),
            s.field_dissipation.map(num).unwrap_or_default(),
            num(s.rhs_norm),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|source| OutputError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    let io_err = |source| OutputError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut f = BufWriter::new(File::create(path).map_err(io_err)?);
    f.write_all(text.as_bytes()).map_err(io_err)?;
    f.flush().map_err(io_err)
}

/// Resolved scenario with a version stamp; feeding it back to `run`
/// reproduces the trajectory bit for bit.
pub fn config_echo(cfg: &ScenarioConfig) -> String {
    format!(
        "# resolved scenario, {} {}\n{}",
        env!("CARGO_PKG_NAME"),
        env!("CARGO_PKG_VERSION"),
        to_config_string(cfg)
    )
}

/// Writes everything a run produces into `cfg.output.dir` and returns the
/// paths written.
pub fn write_run(
    cfg: &ScenarioConfig,
    traj: &Trajectory,
    summary: Option<&RunSummary>,
) -> Result<Vec<PathBuf>> {
    let dir = &cfg.output.dir;
    std::fs::create_dir_all(dir).map_err(|source| OutputError::Io {
        path: dir.clone(),
        source,
    })?;
    let mut written = Vec::new();
    let path = dir.join("scenario.toml");
    write_text(&path, &config_echo(cfg))?;
    written.push(path);
    if let Some(s) = summary {
        let path = dir.join("summary.txt");
        write_text(&path, &s.to_string())?;
        written.push(path);
    }
    if cfg.output.csv {
        let path = dir.join("trajectory.csv");
        write_trajectory_csv(&path, traj)?;
        written.push(path);
        let path = dir.join("diagnostics.csv");
        write_diagnostics_csv(&path, &traj.diagnostics)?;
        written.push(path);
    }
    if cfg.output.plot && !traj.snapshots.is_empty() {
        for c in 0..3 {
            let path = dir.join(format!("m{}.svg", c + 1));
            crate::plot::component(&path, traj, cfg.physical.length, c)?;
            written.push(path);
        }
        let path = dir.join("lyapunov.svg");
        crate::plot::lyapunov(&path, traj)?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrator::Snapshot;

    fn traj() -> Trajectory {
        let m = MagnetizationField::trig(5, 1.0, 1.0).unwrap();
        let m2 = m.map(|v| Vec3::new(v.x / 3.0, v.y * std::f64::consts::PI, 1e-300));
        Trajectory {
            snapshots: vec![
                Snapshot { t: 0.0, phase: 0, state: m },
                Snapshot { t: 0.1 + 0.2, phase: 0, state: m2 },
            ],
            ..Default::default()
        }
    }

    #[test]
    fn trajectory_round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        let t = traj();
        write_trajectory_csv(&path, &t).unwrap();
        let back = read_trajectory_csv(&path).unwrap();
        assert_eq!(back.len(), 2);
        for (s, (bt, bm)) in t.snapshots.iter().zip(&back) {
            assert_eq!(s.t.to_bits(), bt.to_bits());
            for (a, b) in s.state.iter().zip(bm.iter()) {
                assert_eq!(a.to_array().map(f64::to_bits), b.to_array().map(f64::to_bits));
            }
        }
        let head = std::fs::read_to_string(&path).unwrap();
        assert!(head.starts_with("t,m1_0,m2_0,m3_0,m1_1"));
    }

    #[test]
    fn nodal_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m0.csv");
        let m = MagnetizationField::trig(7, 2.0, 1.0).unwrap();
        write_nodal_csv(&path, 2.0, &m).unwrap();
        assert_eq!(read_nodal_csv(&path).unwrap(), m);
    }

    #[test]
    fn malformed_csv_reports_record() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "t,m1_0,m2_0,m3_0,m1_1,m2_1,m3_1,m1_2,m2_2,m3_2\n0,1,0,0,1,0,0,1,0,0\n1,abc,0,0,1,0,0,1,0,0\n").unwrap();
        let e = read_trajectory_csv(&path).unwrap_err().to_string();
        assert!(e.contains("record 2"), "{e}");
    }
}
