//! Complete description of one simulation: physics, grid, initial state,
//! control schedule, integrator settings and outputs.

use crate::discretization::{Discretization, MassKind};
use crate::error::{Error, Result};
use crate::field::{MagnetizationField, PhysicalParams, SAT_TOL};
use crate::integrator::{
    default_dt, run, ControlSchedule, IntegratorConfig, Phase, Projection, RunError, Trajectory,
};
use crate::vec3::Vec3;
use std::path::PathBuf;

#[derive(Debug, Clone, PartialEq)]
pub enum InitialCondition {
    /// `(sin 2πwx/L, cos 2πwx/L, 0)`.
    Trig { winding: f64 },
    /// The same unit vector at every node.
    Constant(Vec3),
    /// Nodal values read from a CSV file with columns `x,m1,m2,m3`.
    Nodal(PathBuf),
}

impl InitialCondition {
    pub fn build(&self, n_elements: usize, length: f64) -> Result<MagnetizationField> {
        let m = match self {
            InitialCondition::Trig { winding } => {
                if !winding.is_finite() {
                    return Err(Error::param("winding", "must be finite"));
                }
                MagnetizationField::trig(n_elements, length, *winding)?
            }
            InitialCondition::Constant(a) => MagnetizationField::constant(n_elements + 1, *a)?,
            InitialCondition::Nodal(path) => {
                let m = crate::output::read_nodal_csv(path)
                    .map_err(|e| Error::Degenerate(format!("{}: {e}", path.display())))?;
                if m.len() != n_elements + 1 {
                    return Err(Error::DimensionMismatch {
                        expected: n_elements + 1,
                        found: m.len(),
                    });
                }
                m
            }
        };
        m.check_saturated(SAT_TOL)?;
        Ok(m)
    }
}

/// Integrator settings; `dt = None` selects [`default_dt`] for the grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorSettings {
    pub dt: Option<f64>,
    pub t_max: f64,
    pub projection: Projection,
    pub steady_tol: f64,
    pub record_every: usize,
}

impl Default for IntegratorSettings {
    fn default() -> Self {
        IntegratorSettings {
            dt: None,
            t_max: 400.0,
            projection: Projection::Off,
            steady_tol: 1e-8,
            record_every: 50,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub csv: bool,
    pub plot: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub name: String,
    pub physical: PhysicalParams,
    pub n_elements: usize,
    pub mass: MassKind,
    pub initial: InitialCondition,
    pub phases: Vec<Phase>,
    pub integrator: IntegratorSettings,
    pub output: OutputConfig,
    /// Settle state quoted elsewhere for this scenario, printed next to the
    /// measured one for comparison.
    pub reference_settle: Option<Vec3>,
}

/// Everything `run` needs, validated.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub discretization: Discretization,
    pub physical: PhysicalParams,
    pub schedule: ControlSchedule,
    pub initial: MagnetizationField,
    pub integrator: IntegratorConfig,
}

impl ScenarioConfig {
    pub fn prepare(&self) -> Result<Prepared> {
        let p = PhysicalParams::new(self.physical.nu, self.physical.length)?;
        let d = Discretization::build_with(self.n_elements, p.length, self.mass)?;
        let schedule = ControlSchedule::new(self.phases.clone())?;
        let m0 = self.initial.build(self.n_elements, p.length)?;
        let s = &self.integrator;
        let cfg = IntegratorConfig {
            dt: s.dt.unwrap_or_else(|| default_dt(&d, &p)),
            t_max: s.t_max,
            projection: s.projection,
            steady_tol: s.steady_tol,
            record_every: s.record_every,
        };
        cfg.validate()?;
        Ok(Prepared {
            discretization: d,
            physical: p,
            schedule,
            initial: m0,
            integrator: cfg,
        })
    }

    pub fn run(&self) -> std::result::Result<(Prepared, Trajectory), RunError> {
        let prep = self.prepare()?;
        let traj = prep.execute()?;
        Ok((prep, traj))
    }
}

impl Prepared {
    pub fn execute(&self) -> std::result::Result<Trajectory, RunError> {
        run(
            &self.discretization,
            &self.physical,
            &self.schedule,
            &self.initial,
            &self.integrator,
        )
    }
}
