//! Property suites behind `llsim verify`.
//!
//! Every check reports the measured value next to its limit so the margin is
//! visible even when it passes. Suites are independent and run as a batch.

use crate::batch::{self, Execution};
use crate::diagnostics::{affine_bound_rate, decay_rate, lemma3_integral, lemma4_ratio, FitWindow};
use crate::discretization::{Discretization, MassKind};
use crate::dynamics::{dissipativity_gap, RhsKind};
use crate::error::Result;
use crate::field::{ControlLaw, Equilibrium, MagnetizationField, PhysicalParams};
use crate::integrator::{
    default_dt, run, step_rk4, ControlSchedule, IntegratorConfig, Phase, Projection, Termination,
};
use crate::presets;
use crate::reference;
use crate::report::monotone_slack;
use crate::sampling::{self, SweepRng};
use crate::vec3::Vec3;
use std::f64::consts::PI;
use std::fmt;
use std::time::{Duration, Instant};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    /// Small sweeps and short horizons.
    Fast,
    /// Larger sweeps, full settle runs and refinement ladders up to 96 elements.
    Full,
}

impl Level {
    fn pick<T>(self, fast: T, full: T) -> T {
        match self {
            Level::Fast => fast,
            Level::Full => full,
        }
    }

    fn ladder(self) -> &'static [usize] {
        self.pick(&[12, 24, 48], &[12, 24, 48, 96])
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Options {
    pub level: Level,
    pub seed: u64,
    pub execution: Execution,
}

/// How a measured value is compared with its limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bound {
    AtMost(f64),
    AtLeast(f64),
    Within(f64, f64),
}

impl Bound {
    fn holds(self, v: f64) -> bool {
        match self {
            Bound::AtMost(b) => v <= b,
            Bound::AtLeast(b) => v >= b,
            Bound::Within(lo, hi) => (lo..=hi).contains(&v),
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::AtMost(b) => write!(f, "<= {b:.4e}"),
            Bound::AtLeast(b) => write!(f, ">= {b:.4e}"),
            Bound::Within(lo, hi) => write!(f, "in [{lo}, {hi}]"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub value: f64,
    pub bound: Bound,
    pub passed: bool,
}

impl Check {
    fn new(suite: &'static str, name: impl Into<String>, value: f64, bound: Bound) -> Self {
        Check {
            suite,
            name: name.into(),
            value,
            bound,
            passed: value.is_finite() && bound.holds(value),
        }
    }

    fn failed(suite: &'static str, name: impl Into<String>, why: impl fmt::Display) -> Self {
        Check {
            suite,
            name: format!("{}: {why}", name.into()),
            value: f64::NAN,
            bound: Bound::AtMost(0.0),
            passed: false,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mark = if self.passed { "pass" } else { "FAIL" };
        write!(f, "{mark}  {:<14} {:<52} {:>12.4e}  {}", self.suite, self.name, self.value, self.bound)
    }
}

#[derive(Debug, Clone)]
pub struct SuiteResult {
    pub name: &'static str,
    pub checks: Vec<Check>,
    pub elapsed: Duration,
}

#[derive(Debug, Clone)]
pub struct Report {
    pub suites: Vec<SuiteResult>,
    pub elapsed: Duration,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(|s| s.checks.iter().all(|c| c.passed))
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.suites.iter().flat_map(|s| s.checks.iter()).filter(|c| !c.passed)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.suites {
            for c in &s.checks {
                writeln!(f, "{c}")?;
            }
        }
        let total: usize = self.suites.iter().map(|s| s.checks.len()).sum();
        let failed = self.failures().count();
        write!(
            f,
            "{} checks, {} failed, {:.2} s",
            total,
            failed,
            self.elapsed.as_secs_f64()
        )
    }
}

type Suite = fn(&Options) -> Vec<Check>;

const SUITES: [(&str, Suite); 9] = [
    ("orthogonality", orthogonality),
    ("fixed_points", fixed_points),
    ("oracle", oracle),
    ("lemma3", lemma3),
    ("lemma4", lemma4),
    ("dissipativity", dissipativity),
    ("affine_bound", affine_bound),
    ("linear_bounds", linear_bounds),
    ("field_lyapunov", field_lyapunov),
];

const SATURATION: (&str, Suite) = ("saturation", saturation);

pub fn suite_names(level: Level) -> Vec<&'static str> {
    let mut v: Vec<_> = SUITES.iter().map(|s| s.0).collect();
    if level == Level::Full {
        v.push(SATURATION.0);
    }
    v
}

pub fn run_all(opts: &Options) -> Report {
    let start = Instant::now();
    let mut suites: Vec<(&str, Suite)> = SUITES.to_vec();
    if opts.level == Level::Full {
        suites.push(SATURATION);
    }
    let suites = batch::map(opts.execution, &suites, |&(name, f)| {
        let t = Instant::now();
        let checks = f(opts);
        SuiteResult {
            name,
            checks,
            elapsed: t.elapsed(),
        }
    });
    Report {
        suites,
        elapsed: start.elapsed(),
    }
}

fn params() -> PhysicalParams {
    PhysicalParams { nu: 0.02, length: 1.0 }
}

fn grid(n: usize) -> Discretization {
    Discretization::build(n, 1.0).expect("valid grid")
}

fn rng(opts: &Options, salt: u64) -> SweepRng {
    sampling::rng(opts.seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Neumann-compatible smooth unit field used by the refinement ladders.
pub fn smooth_field(n: usize, variant: usize) -> MagnetizationField {
    let (a, b, c, w) = [(1.0, 0.8, 0.5, 1.2), (0.6, 0.5, -0.3, 0.9), (1.3, -0.4, 2.0, 0.7)][variant % 3];
    MagnetizationField::from_fn(n, 1.0, |x| {
        let th = a + b * (PI * x).cos();
        let ph = c + w * (2.0 * PI * x).cos();
        Vec3::new(th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos())
    })
    .expect("valid grid")
}

fn max_of(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().fold(0.0, f64::max)
}

/// Cross-product terms: the computed right-hand side is orthogonal to `m` up
/// to rounding in the inputs, measured in units of `ε |m| |H| (1 + ν |m|)`.
fn orthogonality(opts: &Options) -> Vec<Check> {
    let p = params();
    let count = opts.level.pick(200, 1000);
    let mut out = Vec::new();
    for (label, n) in [("n=12", 12usize), ("n=48", 48)] {
        let d = grid(n);
        let worst = batch::map_range(opts.execution, count, |i| {
            let mut r = rng(opts, 100 + i as u64 + 7919 * n as u64);
            let m = if i % 2 == 0 {
                sampling::rough_saturated(&mut r, n)
            } else {
                sampling::band_limited_saturated(&mut r, n, 1.0, 6)
            };
            let target = Equilibrium::new(sampling::unit(&mut r)).expect("unit");
            let gain = r_gain(&mut r);
            let w = d.weak_laplacian(&m).expect("dims");
            let mut worst = [0.0f64; 2];
            for (j, kind) in [RhsKind::Uncontrolled, RhsKind::Field { gain, target }].iter().enumerate() {
                let f = kind.evaluate(&d, &p, &m).expect("dims");
                for k in 0..m.len() {
                    let h = if j == 1 { w[k] + (target.vector() - m[k]) * gain } else { w[k] };
                    let scale = f64::EPSILON * m[k].norm() * h.norm() * (1.0 + p.nu * m[k].norm());
                    if scale > 0.0 {
                        worst[j] = worst[j].max(m[k].dot(f[k]).abs() / scale);
                    }
                }
            }
            worst
        });
        out.push(Check::new(
            "orthogonality",
            format!("uncontrolled m·f, {count} fields, {label} (ulps)"),
            max_of(worst.iter().map(|w| w[0])),
            Bound::AtMost(8.0),
        ));
        out.push(Check::new(
            "orthogonality",
            format!("field m·f, {count} fields, {label} (ulps)"),
            max_of(worst.iter().map(|w| w[1])),
            Bound::AtMost(8.0),
        ));
    }
    out
}

fn r_gain(r: &mut SweepRng) -> f64 {
    use rand::Rng;
    10f64.powf(r.random_range(-1.0..1.3))
}

fn fixed_points(opts: &Options) -> Vec<Check> {
    let p = params();
    let d = grid(12);
    let count = opts.level.pick(50, 200);
    let worst = batch::map_range(opts.execution, count, |i| {
        let mut r = rng(opts, 200 + i as u64);
        let a = Equilibrium::new(sampling::unit(&mut r)).expect("unit");
        let k = r_gain(&mut r);
        let c = MagnetizationField::constant(13, a.vector()).expect("finite");
        let kinds = [
            RhsKind::Uncontrolled,
            RhsKind::Affine { gain: k, target: a },
            RhsKind::Field { gain: k, target: a },
            RhsKind::LinearAffine { base: a, gain: k, target: a },
            RhsKind::LinearField { base: a, gain: k },
        ];
        let mut worst = 0.0f64;
        for kind in &kinds {
            let f = kind.evaluate(&d, &p, &c).expect("dims");
            worst = worst.max(max_of(f.iter().map(|v| v.max_abs())));
            let next = step_rk4(&d, &p, kind, &c, 1e-3, Projection::Off).expect("finite");
            worst = worst.max(next.max_distance_to(a.vector()));
        }
        worst
    });
    vec![Check::new(
        "fixed_points",
        format!("constant unit states, 5 systems, {count} draws"),
        max_of(worst),
        Bound::AtMost(1e-15),
    )]
}

/// Galerkin right-hand sides against a finite-difference reference on a grid
/// sixteen times finer, compared at the shared nodes.
fn oracle(opts: &Options) -> Vec<Check> {
    let p = params();
    let a = presets::r1();
    let kinds = [
        RhsKind::Uncontrolled,
        RhsKind::Affine { gain: 0.5, target: a },
        RhsKind::Field { gain: 10.0, target: a },
        RhsKind::LinearAffine { base: presets::r3(), gain: 2.0, target: a },
        RhsKind::LinearField { base: presets::r3(), gain: 2.0 },
    ];
    let ladder = opts.level.ladder();
    batch::map(opts.execution, &kinds, |kind| {
        let errs: Vec<f64> = ladder
            .iter()
            .map(|&n| {
                let d = grid(n);
                let ours = kind.evaluate(&d, &p, &smooth_field(n, 0)).expect("dims");
                let nf = 16 * n;
                let fine = reference::rhs(kind, p.nu, smooth_field(nf, 0).nodes(), 1.0 / nf as f64);
                reference::max_deviation_at_shared_nodes(&ours, &fine, 16).expect("dims")
            })
            .collect();
        let ratio = errs[errs.len() - 2] / errs[errs.len() - 1];
        Check::new(
            "oracle",
            format!("{} refinement ratio {}->{}", kind.label(), ladder[ladder.len() - 2], ladder[ladder.len() - 1]),
            ratio,
            Bound::Within(3.5, 4.5),
        )
    })
}

/// `∫ (m − r)ᵀ (m × m_xx)` vanishes: exactly (to rounding) with the lumped
/// mass, and under refinement with the consistent one.
fn lemma3(opts: &Options) -> Vec<Check> {
    let r = presets::r1().vector();
    let mut out = Vec::new();
    for mass in [MassKind::Lumped, MassKind::Consistent] {
        for v in 0..3 {
            let vals: Vec<f64> = opts
                .level
                .ladder()
                .iter()
                .map(|&n| {
                    let d = Discretization::build_with(n, 1.0, mass).expect("grid");
                    lemma3_integral(&d, &smooth_field(n, v), r).expect("dims").abs()
                })
                .collect();
            match mass {
                MassKind::Lumped => out.push(Check::new(
                    "lemma3",
                    format!("lumped, field {v}: max |integral|"),
                    max_of(vals),
                    Bound::AtMost(1e-12),
                )),
                MassKind::Consistent => {
                    let worst = vals.windows(2).map(|w| w[0] / w[1]).fold(f64::INFINITY, f64::min);
                    out.push(Check::new(
                        "lemma3",
                        format!("consistent, field {v}: min refinement ratio"),
                        worst,
                        Bound::AtLeast(3.5),
                    ));
                }
            }
        }
    }
    out
}

/// `‖m × m_x‖ ≤ 4L² ‖m × m_xx‖` on random smooth saturated fields.
fn lemma4(opts: &Options) -> Vec<Check> {
    let count = opts.level.pick(30, 100);
    let d = grid(48);
    let ratios = batch::map_range(opts.execution, count, |i| {
        let mut r = rng(opts, 400 + i as u64);
        let m = sampling::band_limited_saturated(&mut r, 48, 1.0, 5);
        lemma4_ratio(&d, &m).unwrap_or(0.0)
    });
    vec![Check::new(
        "lemma4",
        format!("max ratio over {count} band-limited fields, n=48"),
        max_of(ratios),
        Bound::AtMost(4.0),
    )]
}

/// The affine feedback term contributes exactly `−k ‖m − y‖²` to the
/// dissipativity pairing.
fn dissipativity(opts: &Options) -> Vec<Check> {
    let p = params();
    let d = grid(24);
    let count = opts.level.pick(50, 200);
    let errs = batch::map_range(opts.execution, count, |i| {
        let mut r = rng(opts, 500 + i as u64);
        let m = sampling::band_limited_saturated(&mut r, 24, 1.0, 4);
        let y = sampling::band_limited_saturated(&mut r, 24, 1.0, 4);
        let target = Equilibrium::new(sampling::unit(&mut r)).expect("unit");
        let k = r_gain(&mut r);
        let g0 = dissipativity_gap(&d, &p, &RhsKind::Uncontrolled, &m, &y).expect("dims");
        let g1 = dissipativity_gap(&d, &p, &RhsKind::Affine { gain: k, target }, &m, &y).expect("dims");
        let diff = m.zip_map(&y, |a, b| a - b).expect("dims");
        let expect = -k * d.l2_norm_sq(&diff).expect("dims");
        ((g1 - g0) - expect).abs() / (g0.abs() + expect.abs()).max(1.0)
    });
    vec![Check::new(
        "dissipativity",
        format!("affine control pairing identity, {count} pairs (rel)"),
        max_of(errs),
        Bound::AtMost(1e-12),
    )]
}

fn settle_cfg(d: &Discretization, p: &PhysicalParams) -> IntegratorConfig {
    IntegratorConfig {
        record_every: 10,
        ..IntegratorConfig::for_grid(d, p)
    }
}

/// Exponential bound `V(t) ≤ V(0) e^{−2(k − 8νL⁴)t}` on the affine closed loop.
fn affine_bound(opts: &Options) -> Vec<Check> {
    let p = params();
    let d = grid(12);
    let k = presets::AFFINE_GAIN;
    let rate = affine_bound_rate(k, &p);
    let until = opts.level.pick(Termination::Duration(15.0), Termination::Settle);
    let s = ControlSchedule::single(Phase::control(ControlLaw::affine(k, presets::r1()).expect("gain"), until));
    let m0 = MagnetizationField::trig(12, 1.0, 1.0).expect("grid");
    let traj = match run(&d, &p, &s, &m0, &settle_cfg(&d, &p)) {
        Ok(t) => t,
        Err(e) => return vec![Check::failed("affine_bound", "run", e)],
    };
    let v0 = traj.diagnostics[0].lyap;
    let worst = max_of(traj.diagnostics.iter().map(|s| s.lyap / (v0 * (-rate * s.t).exp())));
    let series: Vec<(f64, f64)> = traj.diagnostics.iter().map(|s| (s.t, s.lyap)).collect();
    let mut out = vec![Check::new(
        "affine_bound",
        "max V / (V0 exp(-0.68 t)), fig2 setup",
        worst,
        Bound::AtMost(1.05),
    )];
    match decay_rate(&series, FitWindow::default()) {
        Ok(r) => out.push(Check::new("affine_bound", "fitted decay rate of V", r, Bound::AtLeast(rate))),
        Err(e) => out.push(Check::failed("affine_bound", "fitted decay rate of V", e)),
    }
    out
}

/// Linearized systems: `‖z − r‖² ≤ e^{−2kt} ‖z₀ − r‖²` for the affine loop.
/// For the field loop `‖v‖²` is non-increasing, the mean of `r·v` is
/// conserved, and the part of `v` perpendicular to `r` obeys
/// `‖v⊥‖² ≤ e^{−2kνt} ‖v⊥(0)‖²`.
fn linear_bounds(opts: &Options) -> Vec<Check> {
    let p = params();
    let d = grid(12);
    let draws = opts.level.pick(5, 20);
    let horizon = opts.level.pick(4.0, 10.0);
    let gains = [0.1, 0.5, 2.0];
    let jobs: Vec<(usize, f64)> = (0..draws).flat_map(|i| gains.map(|k| (i, k))).collect();
    let cfg = IntegratorConfig {
        record_every: 5,
        ..IntegratorConfig::for_grid(&d, &p)
    };
    let results = batch::map(opts.execution, &jobs, |&(i, k)| -> Result<[f64; 4]> {
        let mut r = rng(opts, 600 + i as u64);
        let a = Equilibrium::new(sampling::unit(&mut r)).expect("unit");
        let target = Equilibrium::new(sampling::unit(&mut r)).expect("unit");
        let z0 = sampling::band_limited(&mut r, 12, 1.0, 4);
        let s = ControlSchedule::single(Phase::new(
            RhsKind::LinearAffine { base: a, gain: k, target },
            Termination::Duration(horizon),
        ));
        let tr = run(&d, &p, &s, &z0, &cfg).map_err(|e| crate::error::Error::Degenerate(e.to_string()))?;
        let e0 = tr.diagnostics[0].l2_err_sq;
        let affine = max_of(tr.diagnostics.iter().map(|s| s.l2_err_sq / (e0 * (-2.0 * k * s.t).exp())));

        // perturbation v0 = m − r with m saturated, so |r + v0| = 1 nodally
        let base = Equilibrium::new(sampling::unit(&mut r)).expect("unit");
        let m = sampling::band_limited_saturated(&mut r, 12, 1.0, 4);
        let v0 = m.map(|x| x - base.vector());
        let s = ControlSchedule::single(Phase::new(
            RhsKind::LinearField { base, gain: k },
            Termination::Duration(horizon),
        ));
        let tr = run(&d, &p, &s, &v0, &cfg).map_err(|e| crate::error::Error::Degenerate(e.to_string()))?;
        let slack = monotone_slack(tr.dt) * cfg.record_every as f64;
        let increases = tr
            .diagnostics
            .windows(2)
            .map(|w| w[1].lyap - w[0].lyap - slack)
            .fold(f64::NEG_INFINITY, f64::max)
            .max(0.0);
        let along = |v: &MagnetizationField| {
            let proj = v.map(|x| base.vector() * x.dot(base.vector()));
            crate::diagnostics::spatial_mean(&d, &proj).map(|c| c.dot(base.vector()))
        };
        let fin = tr.final_state().expect("recorded");
        let drift = (along(fin)? - along(&v0)?).abs();
        let perp = |v: &MagnetizationField| {
            let q = v.map(|x| x - base.vector() * x.dot(base.vector()));
            d.l2_norm_sq(&q)
        };
        let t_end = tr.phases[0].end_t;
        let perp_ratio = perp(fin)? / (perp(&v0)? * (-2.0 * k * p.nu * t_end).exp()).max(f64::MIN_POSITIVE);
        Ok([affine, increases, drift, perp_ratio])
    });
    let mut worst = [0.0f64; 4];
    for res in &results {
        match res {
            Ok(v) => {
                for j in 0..4 {
                    worst[j] = worst[j].max(v[j]);
                }
            }
            Err(e) => return vec![Check::failed("linear_bounds", "run", e)],
        }
    }
    let n = jobs.len();
    vec![
        Check::new(
            "linear_bounds",
            format!("linear affine max |z-r|^2 / bound, {n} runs"),
            worst[0],
            Bound::AtMost(1.02),
        ),
        Check::new(
            "linear_bounds",
            format!("linear field max increase of |v|^2/2, {n} runs"),
            worst[1],
            Bound::AtMost(0.0),
        ),
        Check::new(
            "linear_bounds",
            "linear field drift of mean r-component",
            worst[2],
            Bound::AtMost(1e-10),
        ),
        Check::new(
            "linear_bounds",
            "linear field |v_perp|^2 / exp(-2 k nu t) bound",
            worst[3],
            Bound::AtMost(1.02),
        ),
    ]
}

/// Field control: `k‖m − r‖² + ‖m_x‖²` non-increasing step by step and
/// `dV/dt = −2ν ‖m × (m_xx + u)‖²`.
fn field_lyapunov(opts: &Options) -> Vec<Check> {
    let p = params();
    let d = grid(12);
    let until = opts.level.pick(Termination::Duration(10.0), Termination::Settle);
    let s = ControlSchedule::single(Phase::control(
        ControlLaw::field(presets::FIELD_GAIN, presets::r1()).expect("gain"),
        until,
    ));
    let cfg = IntegratorConfig {
        record_every: 1,
        ..IntegratorConfig::for_grid(&d, &p)
    };
    let m0 = MagnetizationField::trig(12, 1.0, 1.0).expect("grid");
    let tr = match run(&d, &p, &s, &m0, &cfg) {
        Ok(t) => t,
        Err(e) => return vec![Check::failed("field_lyapunov", "run", e)],
    };
    let slack = monotone_slack(cfg.dt);
    let worst_increase = tr
        .diagnostics
        .windows(2)
        .map(|w| w[1].lyap - w[0].lyap - slack)
        .fold(f64::NEG_INFINITY, f64::max)
        .max(0.0);
    let n = tr.diagnostics.len();
    let mut worst_rel = 0.0f64;
    for i in (n / 5).max(1)..(4 * n / 5).min(n - 1) {
        let (a, b, c) = (&tr.diagnostics[i - 1], &tr.diagnostics[i], &tr.diagnostics[i + 1]);
        let dv = (c.lyap - a.lyap) / (c.t - a.t);
        let diss = b.field_dissipation.unwrap_or(f64::NAN);
        if diss > 1e-8 * b.lyap.max(1e-300) {
            worst_rel = worst_rel.max((dv / (-2.0 * diss) - 1.0).abs());
        }
    }
    vec![
        Check::new(
            "field_lyapunov",
            "max step increase of V beyond 10 dt^5, fig4 setup",
            worst_increase,
            Bound::AtMost(0.0),
        ),
        Check::new(
            "field_lyapunov",
            "dV/dt vs -2 nu |m x H|^2, middle 60% (rel)",
            worst_rel,
            Bound::AtMost(0.02),
        ),
    ]
}

/// Nodal norm drift with projection off shrinks at fourth order in `dt`.
fn saturation(opts: &Options) -> Vec<Check> {
    let p = params();
    let d = grid(12);
    let base = default_dt(&d, &p);
    let kinds = [
        RhsKind::Uncontrolled,
        RhsKind::Field { gain: presets::FIELD_GAIN, target: presets::r1() },
    ];
    batch::map(opts.execution, &kinds, |kind| {
        let drift = |dt: f64| -> std::result::Result<f64, String> {
            let cfg = IntegratorConfig {
                dt,
                record_every: 1,
                ..IntegratorConfig::for_grid(&d, &p)
            };
            let s = ControlSchedule::single(Phase::new(*kind, Termination::Duration(10.0)));
            let tr = run(&d, &p, &s, &smooth_field(12, 0), &cfg).map_err(|e| e.to_string())?;
            Ok(max_of(tr.diagnostics.iter().map(|s| s.sat_drift)))
        };
        match (drift(base), drift(base / 2.0)) {
            (Ok(a), Ok(b)) => Check::new(
                "saturation",
                format!("{} drift ratio dt -> dt/2 on [0, 10]", kind.label()),
                a / b,
                Bound::Within(12.0, 20.0),
            ),
            (Err(e), _) | (_, Err(e)) => Check::failed("saturation", kind.label(), e),
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounds() {
        assert!(Bound::AtMost(1.0).holds(1.0));
        assert!(!Bound::AtLeast(1.0).holds(0.5));
        assert!(Bound::Within(3.5, 4.5).holds(4.0));
        assert!(!Check::new("s", "nan", f64::NAN, Bound::AtMost(1.0)).passed);
    }

    #[test]
    fn smooth_fields_are_neumann_and_unit() {
        // zero end slope: the first difference at each end shrinks like h², not h
        for v in 0..3 {
            let (a, b) = (smooth_field(96, v), smooth_field(192, v));
            assert!(a.is_saturated(1e-14));
            let left = (a[1] - a[0]).norm() / (b[1] - b[0]).norm();
            let right = (a[96] - a[95]).norm() / (b[192] - b[191]).norm();
            assert!(left > 3.8 && right > 3.8, "{left} {right}");
        }
    }
}
