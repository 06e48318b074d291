//! Per-phase summaries of a finished run.

use crate::diagnostics::{affine_bound_rate, decay_rate, sample, FitWindow};
use crate::dynamics::RhsKind;
use crate::error::Result;
use crate::integrator::{PhaseStatus, Trajectory};
use crate::scenario::Prepared;
use crate::vec3::Vec3;
use std::fmt;

/// Exponential bound `V(t) ≤ V(0) e^{-rate t}` and how well it held.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundCheck {
    pub rate: f64,
    /// `max_t V(t) / (V(0) e^{-rate (t - t0)})`; at most 1 when the bound holds exactly.
    pub worst_ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSummary {
    pub index: usize,
    pub kind: RhsKind,
    pub status: PhaseStatus,
    pub start_t: f64,
    pub end_t: f64,
    pub settle_t: Option<f64>,
    pub steps: usize,
    /// Node average of the final state and its Euclidean norm.
    pub final_mean: Vec3,
    pub final_mean_norm: f64,
    pub final_h1_semi_sq: f64,
    /// `max_i |m(x_i) − r|` at the end, for phases with a target.
    pub final_distance: Option<f64>,
    pub max_sat_drift: f64,
    pub lyap_start: f64,
    pub lyap_end: f64,
    /// Fitted exponential decay rate of the phase's Lyapunov functional.
    pub decay_rate: Option<f64>,
    pub bound: Option<BoundCheck>,
    /// Recorded intervals over which the Lyapunov functional grew by more
    /// than the integrator slack; `None` for systems without a monotone one.
    pub lyap_increases: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub name: String,
    pub dt: f64,
    pub phases: Vec<PhaseSummary>,
    pub reference_settle: Option<Vec3>,
}

/// Per-step truncation allowance for monotonicity checks.
pub fn monotone_slack(dt: f64) -> f64 {
    10.0 * dt.powi(5)
}

pub fn summarize(name: &str, prep: &Prepared, traj: &Trajectory, reference_settle: Option<Vec3>) -> Result<RunSummary> {
    let d = &prep.discretization;
    let p = &prep.physical;
    let mut phases = Vec::with_capacity(traj.phases.len());
    for rec in &traj.phases {
        let kind = rec.kind;
        let rhs0 = kind.evaluate(d, p, &rec.initial)?;
        let s0 = sample(d, p, &kind, &rec.initial, &rhs0, rec.start_t, rec.index)?;
        let mut series: Vec<(f64, f64, usize)> = vec![(rec.start_t, s0.lyap, 0)];
        let mut drift = s0.sat_drift;
        let mut last_step = 0usize;
        for (snap, diag) in traj.snapshots.iter().zip(&traj.diagnostics) {
            if snap.phase != rec.index || snap.t <= rec.start_t {
                continue;
            }
            let step = ((snap.t - rec.start_t) / traj.dt).round() as usize;
            series.push((diag.t, diag.lyap, step.saturating_sub(last_step)));
            last_step = step;
            drift = drift.max(diag.sat_drift);
        }

        let rhs1 = kind.evaluate(d, p, &rec.final_state)?;
        let s1 = sample(d, p, &kind, &rec.final_state, &rhs1, rec.end_t, rec.index)?;

        let positive: Vec<(f64, f64)> = series.iter().map(|s| (s.0, s.1)).collect();
        let decay = decay_rate(&positive, FitWindow::default()).ok();

        let bound_rate = match kind {
            RhsKind::Affine { gain, .. } => Some(affine_bound_rate(gain, p)),
            RhsKind::LinearAffine { gain, .. } => Some(2.0 * gain),
            _ => None,
        };
        let bound = bound_rate.map(|rate| BoundCheck {
            rate,
            worst_ratio: if s0.lyap > 0.0 {
                series
                    .iter()
                    .map(|&(t, v, _)| v / (s0.lyap * (-rate * (t - rec.start_t)).exp()))
                    .fold(0.0, f64::max)
            } else {
                0.0
            },
        });
        let lyap_increases = (!matches!(kind, RhsKind::Affine { .. })).then(|| {
            let slack = monotone_slack(traj.dt);
            series
                .windows(2)
                .filter(|w| w[1].1 - w[0].1 > slack * w[1].2 as f64)
                .count()
        });

        let mean = rec.final_state.node_mean();
        phases.push(PhaseSummary {
            index: rec.index,
            kind,
            status: rec.status,
            start_t: rec.start_t,
            end_t: rec.end_t,
            settle_t: rec.settle_t,
            steps: rec.steps,
            final_mean: mean,
            final_mean_norm: mean.norm(),
            final_h1_semi_sq: s1.h1_semi_sq,
            final_distance: kind.target().map(|r| rec.final_state.max_distance_to(r.vector())),
            max_sat_drift: drift.max(s1.sat_drift),
            lyap_start: s0.lyap,
            lyap_end: s1.lyap,
            decay_rate: decay,
            bound,
            lyap_increases,
        });
    }
    Ok(RunSummary {
        name: name.to_string(),
        dt: traj.dt,
        phases,
        reference_settle,
    })
}

fn v3(v: Vec3) -> String {
    format!("({:.6}, {:.6}, {:.6})", v.x, v.y, v.z)
}

impl fmt::Display for RunSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "scenario {} (dt = {:.4e})", self.name, self.dt)?;
        for ph in &self.phases {
            let status = match ph.status {
                PhaseStatus::Settled => "settled",
                PhaseStatus::Completed => "completed",
                PhaseStatus::Timeout => "TIMEOUT",
            };
            write!(f, "  phase {} [{}", ph.index + 1, ph.kind.label())?;
            if let Some(k) = ph.kind.gain() {
                write!(f, ", k = {k}")?;
            }
            if let Some(r) = ph.kind.target() {
                write!(f, ", r = {}", v3(r.vector()))?;
            }
            if let Some(a) = ph.kind.base() {
                write!(f, ", base = {}", v3(a.vector()))?;
            }
            writeln!(f, "] t = {:.3} .. {:.3}, {} steps, {status}", ph.start_t, ph.end_t, ph.steps)?;
            if let Some(ts) = ph.settle_t {
                writeln!(f, "    settle time        {ts:.3}")?;
            }
            writeln!(f, "    final mean state   {}  |mean| = {:.9}", v3(ph.final_mean), ph.final_mean_norm)?;
            writeln!(f, "    final |m_x|^2      {:.3e}", ph.final_h1_semi_sq)?;
            if let Some(dist) = ph.final_distance {
                writeln!(f, "    max |m - r|        {dist:.3e}")?;
            }
            writeln!(f, "    max saturation dev {:.3e}", ph.max_sat_drift)?;
            writeln!(f, "    Lyapunov           {:.6e} -> {:.6e}", ph.lyap_start, ph.lyap_end)?;
            if let Some(rate) = ph.decay_rate {
                writeln!(f, "    decay rate         {rate:.4}")?;
            }
            if let Some(b) = ph.bound {
                writeln!(
                    f,
                    "    bound rate         {:.4}  worst V/bound = {:.4}  (margin {:+.4})",
                    b.rate,
                    b.worst_ratio,
                    1.0 - b.worst_ratio
                )?;
            }
            if let Some(n) = ph.lyap_increases {
                if n == 0 {
                    writeln!(f, "    Lyapunov monotone  yes")?;
                } else {
                    writeln!(f, "    Lyapunov monotone  NO ({n} increases beyond slack)")?;
                }
            }
        }
        if let Some(r) = self.reference_settle {
            if let Some(first) = self.phases.first() {
                writeln!(
                    f,
                    "  quoted settle state {}  |r| = {:.3}  (measured {}, |m| = {:.9})",
                    v3(r),
                    r.norm(),
                    v3(first.final_mean),
                    first.final_mean_norm
                )?;
            }
        }
        Ok(())
    }
}
