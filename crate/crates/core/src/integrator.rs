//! Fixed-step RK4 integration of the semi-discrete systems with phase
//! chaining and settle detection.

use crate::diagnostics::{sample, DiagnosticSample};
use crate::discretization::Discretization;
use crate::dynamics::RhsKind;
use crate::error::{Error, Result};
use crate::field::{ControlLaw, MagnetizationField, PhysicalParams};
use crate::vec3::Vec3;

/// State norm beyond which a run is declared to have blown up.
pub const BLOWUP_NORM: f64 = 1e3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Projection {
    #[default]
    Off,
    /// Rescale every node to unit length after each step, for kinds whose
    /// continuous flow preserves saturation.
    Renormalize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub dt: f64,
    /// Longest time any settle-terminated phase may run.
    pub t_max: f64,
    pub projection: Projection,
    /// Discrete `L2` norm of the right-hand side below which a phase counts as settled.
    pub steady_tol: f64,
    pub record_every: usize,
}

impl IntegratorConfig {
    /// Defaults for a grid: the largest step for which RK4 stays inside its
    /// stability region on the stiffest precession/damping mode, with margin.
    pub fn for_grid(d: &Discretization, p: &PhysicalParams) -> Self {
        IntegratorConfig {
            dt: default_dt(d, p),
            t_max: 400.0,
            projection: Projection::Off,
            steady_tol: 1e-8,
            record_every: 50,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::param("dt", format!("must be finite and > 0, got {}", self.dt)));
        }
        if !(self.t_max > self.dt) || !self.t_max.is_finite() {
            return Err(Error::param("t_max", format!("must be finite and > dt, got {}", self.t_max)));
        }
        if !(self.steady_tol > 0.0) {
            return Err(Error::param("steady_tol", format!("must be > 0, got {}", self.steady_tol)));
        }
        if self.record_every == 0 {
            return Err(Error::param("record_every", "must be >= 1"));
        }
        Ok(())
    }
}

/// Default step size.
///
/// The linearized exchange operator has eigenvalues `μ (±i − ν)` with `μ` up
/// to the largest eigenvalue of `M⁻¹K`. RK4 is stable on the imaginary axis up
/// to `2√2`, but resolving the highest mode well enough to keep nodal norm
/// drift below [`SAT_TOL`](crate::field::SAT_TOL) on rough initial data needs
/// `dt · |λ_max| = 1/4`.
pub fn default_dt(d: &Discretization, p: &PhysicalParams) -> f64 {
    let mu = d.mass_kind().max_eigenvalue(d.h());
    0.25 / (mu * (1.0 + p.nu * p.nu).sqrt())
}

/// How a phase ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Termination {
    /// Run for exactly this long.
    Duration(f64),
    /// Run until the right-hand side norm drops below `steady_tol`, or `t_max`.
    Settle,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Phase {
    pub kind: RhsKind,
    pub until: Termination,
}

impl Phase {
    pub fn new(kind: RhsKind, until: Termination) -> Self {
        Phase { kind, until }
    }

    pub fn control(law: ControlLaw, until: Termination) -> Self {
        Phase::new(RhsKind::from_control(law), until)
    }
}

/// Ordered list of phases; each starts from the final state of the previous one.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlSchedule {
    phases: Vec<Phase>,
}

impl ControlSchedule {
    pub fn new(phases: Vec<Phase>) -> Result<Self> {
        if phases.is_empty() {
            return Err(Error::param("schedule", "needs at least one phase"));
        }
        for ph in &phases {
            ph.kind.validate()?;
            if let Termination::Duration(t) = ph.until {
                if !(t > 0.0) || !t.is_finite() {
                    return Err(Error::param("duration", format!("must be finite and > 0, got {t}")));
                }
            }
        }
        Ok(ControlSchedule { phases })
    }

    pub fn single(phase: Phase) -> Self {
        ControlSchedule { phases: vec![phase] }
    }

    pub fn phases(&self) -> &[Phase] {
        &self.phases
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseStatus {
    /// Settle criterion met (and the phase stopped there if settle-terminated).
    Settled,
    /// Fixed-duration phase ran to completion without settling.
    Completed,
    /// Settle-terminated phase hit `t_max`.
    Timeout,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseRecord {
    pub index: usize,
    pub kind: RhsKind,
    pub start_t: f64,
    pub end_t: f64,
    /// First time the right-hand side norm fell below `steady_tol`.
    pub settle_t: Option<f64>,
    pub status: PhaseStatus,
    pub steps: usize,
    pub initial: MagnetizationField,
    pub final_state: MagnetizationField,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub phase: usize,
    pub state: MagnetizationField,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trajectory {
    pub snapshots: Vec<Snapshot>,
    pub diagnostics: Vec<DiagnosticSample>,
    pub phases: Vec<PhaseRecord>,
    pub dt: f64,
}

impl Trajectory {
    pub fn final_state(&self) -> Option<&MagnetizationField> {
        self.snapshots.last().map(|s| &s.state)
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.snapshots.iter().map(|s| s.t)
    }

    /// Diagnostics belonging to one phase.
    pub fn phase_diagnostics(&self, phase: usize) -> impl Iterator<Item = &DiagnosticSample> {
        self.diagnostics.iter().filter(move |s| s.phase == phase)
    }
}

/// Failure of [`run`]. Blow-ups carry everything recorded up to the last
/// finite state.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Invalid(#[from] Error),
    #[error("numerical blow-up at t = {t} in phase {phase}")]
    BlowUp {
        t: f64,
        phase: usize,
        partial: Box<Trajectory>,
    },
}

/// One classical RK4 step.
pub fn step_rk4(
    d: &Discretization,
    p: &PhysicalParams,
    kind: &RhsKind,
    m: &MagnetizationField,
    dt: f64,
    projection: Projection,
) -> Result<MagnetizationField> {
    let k1 = kind.evaluate(d, p, m)?;
    step_rk4_with_k1(d, p, kind, m, &k1, dt, projection)
}

fn axpy(m: &MagnetizationField, k: &MagnetizationField, a: f64) -> MagnetizationField {
    MagnetizationField::from_vec_unchecked(
        m.iter().zip(k.iter()).map(|(x, y)| *x + *y * a).collect(),
    )
}

fn step_rk4_with_k1(
    d: &Discretization,
    p: &PhysicalParams,
    kind: &RhsKind,
    m: &MagnetizationField,
    k1: &MagnetizationField,
    dt: f64,
    projection: Projection,
) -> Result<MagnetizationField> {
    if !(dt > 0.0) {
        return Err(Error::param("dt", format!("must be > 0, got {dt}")));
    }
    let k2 = kind.evaluate(d, p, &axpy(m, k1, 0.5 * dt))?;
    let k3 = kind.evaluate(d, p, &axpy(m, &k2, 0.5 * dt))?;
    let k4 = kind.evaluate(d, p, &axpy(m, &k3, dt))?;
    let w = dt / 6.0;
    let mut next: Vec<Vec3> = Vec::with_capacity(m.len());
    for i in 0..m.len() {
        next.push(m[i] + (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * w);
    }
    let mut next = MagnetizationField::from_vec_unchecked(next);
    if projection == Projection::Renormalize && kind.preserves_saturation() {
        next.renormalize();
    }
    if let Some(i) = next.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(i));
    }
    Ok(next)
}

/// Integrates `schedule` from `m0`.
///
/// Snapshots and diagnostics are recorded at the start of the run, every
/// `record_every` steps, and at the end of each phase.
pub fn run(
    d: &Discretization,
    p: &PhysicalParams,
    schedule: &ControlSchedule,
    m0: &MagnetizationField,
    cfg: &IntegratorConfig,
) -> std::result::Result<Trajectory, RunError> {
    cfg.validate()?;
    d.check(m0)?;
    if !m0.is_finite() {
        return Err(Error::NonFinite(0).into());
    }

    let mut traj = Trajectory {
        dt: cfg.dt,
        ..Default::default()
    };
    let mut m = m0.clone();
    let mut t0 = 0.0;

    for (index, phase) in schedule.phases().iter().enumerate() {
        let kind = phase.kind;
        let (n_steps, dt) = match phase.until {
            Termination::Duration(len) => {
                let n = (len / cfg.dt).ceil().max(1.0) as usize;
                (n, len / n as f64)
            }
            Termination::Settle => ((cfg.t_max / cfg.dt).ceil() as usize, cfg.dt),
        };

        let initial = m.clone();
        let mut settle_t = None;
        let mut steps = 0usize;
        let record = |traj: &mut Trajectory, t: f64, state: &MagnetizationField, rhs: &MagnetizationField| {
            if traj.snapshots.last().is_some_and(|s| s.t >= t) {
                return Ok::<(), Error>(());
            }
            let diag = sample(d, p, &kind, state, rhs, t, index)?;
            traj.diagnostics.push(diag);
            traj.snapshots.push(Snapshot {
                t,
                phase: index,
                state: state.clone(),
            });
            Ok(())
        };

        let blow_up = |traj: Trajectory, t: f64| RunError::BlowUp {
            t,
            phase: index,
            partial: Box::new(traj),
        };

        let mut k1 = kind.evaluate(d, p, &m)?;
        let mut t = t0;
        loop {
            let rhs_norm = d.l2_norm(&k1)?;
            if settle_t.is_none() && rhs_norm < cfg.steady_tol {
                settle_t = Some(t);
            }
            let done = steps == n_steps
                || (phase.until == Termination::Settle && settle_t.is_some());
            if steps.is_multiple_of(cfg.record_every) || done {
                record(&mut traj, t, &m, &k1)?;
            }
            if done {
                break;
            }
            let next = match step_rk4_with_k1(d, p, &kind, &m, &k1, dt, cfg.projection) {
                Ok(next) => next,
                Err(Error::NonFinite(_)) => return Err(blow_up(traj, t + dt)),
                Err(e) => return Err(e.into()),
            };
            steps += 1;
            t = t0 + steps as f64 * dt;
            if d.l2_norm(&next)? > BLOWUP_NORM {
                return Err(blow_up(traj, t));
            }
            m = next;
            k1 = kind.evaluate(d, p, &m)?;
        }

        let status = match (phase.until, settle_t) {
            (_, Some(_)) => PhaseStatus::Settled,
            (Termination::Duration(_), None) => PhaseStatus::Completed,
            (Termination::Settle, None) => PhaseStatus::Timeout,
        };
        traj.phases.push(PhaseRecord {
            index,
            kind,
            start_t: t0,
            end_t: t,
            settle_t,
            status,
            steps,
            initial,
            final_state: m.clone(),
        });
        t0 = t;
    }
    Ok(traj)
}
