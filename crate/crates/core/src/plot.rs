//! SVG plots: one panel per magnetization component, showing `m_c(x)` for a
//! family of snapshot times, plus the Lyapunov functional against time.

use crate::integrator::Trajectory;
use crate::output::OutputError;
use plotters::prelude::*;
use std::path::Path;

const SIZE: (u32, u32) = (720, 440);
const MAX_CURVES: usize = 12;

fn plot_err(path: &Path, e: impl std::fmt::Display) -> OutputError {
    OutputError::Plot {
        path: path.to_path_buf(),
        reason: e.to_string(),
    }
}

/// Evenly spaced snapshot indices, always including the first and last.
fn picks(n: usize) -> Vec<usize> {
    if n <= MAX_CURVES {
        return (0..n).collect();
    }
    (0..MAX_CURVES).map(|k| k * (n - 1) / (MAX_CURVES - 1)).collect()
}

/// Blue (early) to red (late).
fn shade(frac: f64) -> RGBColor {
    let f = frac.clamp(0.0, 1.0);
    RGBColor((30.0 + 200.0 * f) as u8, 60, (220.0 - 190.0 * f) as u8)
}

pub fn component(path: &Path, traj: &Trajectory, length: f64, c: usize) -> Result<(), OutputError> {
    let err = |e: &dyn std::fmt::Display| plot_err(path, e);
    let root = SVGBackend::new(path, SIZE).into_drawing_area();
    root.fill(&WHITE).map_err(|e| err(&e))?;
    let mut chart = ChartBuilder::on(&root)
        .caption(format!("m{} (x, t)", c + 1), ("sans-serif", 22))
        .margin(12)
        .x_label_area_size(40)
        .y_label_area_size(50)
        .build_cartesian_2d(0.0..length, -1.1..1.1)
        .map_err(|e| err(&e))?;
    chart
        .configure_mesh()
        .x_desc("x")
        .y_desc(format!("m{}", c + 1))
        .draw()
        .map_err(|e| err(&e))?;

    let snaps = &traj.snapshots;
    let t_end = snaps.last().map_or(1.0, |s| s.t).max(f64::MIN_POSITIVE);
    let idx = picks(snaps.len());
    for (k, &i) in idx.iter().enumerate() {
        let s = &snaps[i];
        let n = s.state.len() - 1;
        let color = shade(s.t / t_end);
        let pts = s
            .state
            .iter()
            .enumerate()
            .map(|(j, v)| (length * j as f64 / n as f64, v[c]));
        let series = chart
            .draw_series(LineSeries::new(pts, color.stroke_width(2)))
            .map_err(|e| err(&e))?;
        if k == 0 || k + 1 == idx.len() {
            series
                .label(format!("t = {:.2}", s.t))
                .legend(move |(x, y)| PathElement::new([(x, y), (x + 18, y)], color.stroke_width(2)));
        }
    }
    chart
        .configure_series_labels()
        .background_style(WHITE.mix(0.8))
        .border_style(BLACK)
        .draw()
        .map_err(|e| err(&e))?;
    root.present().map_err(|e| err(&e))
}

/// `log10` of the active Lyapunov functional; phases alternate colour.
pub fn lyapunov(path: &Path, traj: &Trajectory) -> Result<(), OutputError> {
    let err = |e: &dyn std::fmt::Display| plot_err(path, e);
    let pts: Vec<(f64, f64, usize)> = traj
        .diagnostics
        .iter()
        .filter(|s| s.lyap > 0.0)
        .map(|s| (s.t, s.lyap.log10(), s.phase))
        .collect();
    let root = SVGBackend::new(path, SIZE).into_drawing_area();
    root.fill(&WHITE).map_err(|e| err(&e))?;
    let (t0, t1) = (
        pts.first().map_or(0.0, |p| p.0),
        pts.last().map_or(1.0, |p| p.0).max(pts.first().map_or(0.0, |p| p.0) + 1e-9),
    );
    let lo = pts.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let hi = pts.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let (lo, hi) = if lo.is_finite() && hi > lo { (lo - 0.5, hi + 0.5) } else { (-1.0, 1.0) };
    let mut chart = ChartBuilder::on(&root)
        .caption("Lyapunov functional", ("sans-serif", 22))
        .margin(12)
        .x_label_area_size(40)
        .y_label_area_size(50)
        .build_cartesian_2d(t0..t1, lo..hi)
        .map_err(|e| err(&e))?;
    chart
        .configure_mesh()
        .x_desc("t")
        .y_desc("log10 V")
        .draw()
        .map_err(|e| err(&e))?;
    let palette = [RGBColor(30, 60, 220), RGBColor(220, 60, 30), RGBColor(30, 150, 60)];
    let n_phases = pts.last().map_or(0, |p| p.2 + 1);
    for ph in 0..n_phases {
        let color = palette[ph % palette.len()];
        chart
            .draw_series(LineSeries::new(
                pts.iter().filter(|p| p.2 == ph).map(|p| (p.0, p.1)),
                color.stroke_width(2),
            ))
            .map_err(|e| err(&e))?
            .label(format!("phase {}", ph + 1))
            .legend(move |(x, y)| PathElement::new([(x, y), (x + 18, y)], color.stroke_width(2)));
    }
    chart
        .configure_series_labels()
        .background_style(WHITE.mix(0.8))
        .border_style(BLACK)
        .draw()
        .map_err(|e| err(&e))?;
    root.present().map_err(|e| err(&e))
}
