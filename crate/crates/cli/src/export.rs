//! Plot-ready data: interface curve samples, jump-set polylines, field
//! slices and violation heatmaps.

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use anyhow::{ensure, Context, Result};
use bistair::bistaircase::BiStaircase;
use bistair::calibration2d::{pair_violation_map, CalibrationField2D};
use bistair::interface_curve::InterfaceCurve;
use bistair::io::write_csv;
use bistair::report::Manifest;
use bistair::{Interface, Polygon};
use serde::Serialize;

use crate::config::{Format, RunConfig};

/// Axes of the level-set figure.
pub const FIGURE_WINDOW: (f64, f64, f64, f64) = (-2.0, 10.0, -3.0, 4.5);
const CURVE_RANGE: (f64, f64) = (-3.0, 3.0);
const CURVE_TOL: f64 = 1e-12;
const POLYLINE_TOL: f64 = 1e-6;

#[derive(Serialize)]
struct Table<'a> {
    columns: &'a [&'a str],
    rows: &'a [Vec<f64>],
}

#[derive(Serialize)]
struct JumpSet {
    theta: f64,
    window: Polygon,
    interfaces: Vec<Interface>,
}

#[derive(Serialize)]
pub struct ExportIndex {
    pub files: Vec<PathBuf>,
    pub manifest: Manifest,
}

fn write_table(
    dir: &Path,
    stem: &str,
    columns: &[&str],
    rows: Vec<Vec<f64>>,
    format: Format,
) -> Result<PathBuf> {
    let path = dir.join(format!("{stem}.{}", format.extension()));
    let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    match format {
        Format::Csv => write_csv(BufWriter::new(file), columns, rows)?,
        Format::Json => serde_json::to_writer(
            BufWriter::new(file),
            &Table {
                columns,
                rows: &rows,
            },
        )?,
    }
    Ok(path)
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    serde_json::to_writer_pretty(BufWriter::new(file), value)?;
    Ok(())
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n)
        .map(|i| {
            if i + 1 == n {
                hi
            } else {
                lo + (hi - lo) * i as f64 / (n - 1) as f64
            }
        })
        .collect()
}

pub fn export(cfg: &RunConfig, manifest: Manifest) -> Result<ExportIndex> {
    ensure!(cfg.samples >= 1, "--samples must be at least 1");
    let dir = cfg.directory();
    std::fs::create_dir_all(&dir)
        .with_context(|| format!("creating output directory {}", dir.display()))?;
    let mut files = Vec::new();
    let (x0, x1, y0, y1) = FIGURE_WINDOW;
    let figure = Polygon::rectangle(x0, x1, y0, y1)?;
    for &theta in &cfg.theta {
        let curve = InterfaceCurve::build(theta, CURVE_TOL)?;
        let rows = curve
            .samples(CURVE_RANGE.0, CURVE_RANGE.1, cfg.samples)?
            .into_iter()
            .map(|(x, y)| vec![x, y])
            .collect();
        files.push(write_table(
            &dir,
            &format!("interface_curve_theta{theta}"),
            &["x", "f"],
            rows,
            cfg.format,
        )?);

        let interfaces = BiStaircase::canonical(curve).jump_set(&figure, POLYLINE_TOL)?;
        let path = dir.join(format!("jump_set_theta{theta}.json"));
        write_json(
            &path,
            &JumpSet {
                theta,
                window: figure.clone(),
                interfaces,
            },
        )?;
        files.push(path);

        let field = if theta == 0.0 {
            CalibrationField2D::new()
        } else {
            CalibrationField2D::exploratory(theta)?
        };
        let mut rows = Vec::new();
        for x in linspace(0.0, 1.0, cfg.grid("slices_x")) {
            for z in linspace(-3.0, 3.0, cfg.grid("slices_z")) {
                rows.push(vec![x, z, field.a(x, z), field.f(x, z)]);
            }
        }
        files.push(write_table(
            &dir,
            &format!("field_slices_theta{theta}"),
            &["x", "z", "a", "f"],
            rows,
            cfg.format,
        )?);

        let rows = pair_violation_map(&field, cfg.grid("heatmap_x"), cfg.grid("heatmap_z"), 3.0)
            .into_iter()
            .map(|r| r.to_vec())
            .collect();
        files.push(write_table(
            &dir,
            &format!("pair_violation_theta{theta}"),
            &["x", "z", "violation"],
            rows,
            cfg.format,
        )?);
    }
    let index = ExportIndex { files, manifest };
    write_json(&dir.join("index.json"), &index)?;
    Ok(index)
}
