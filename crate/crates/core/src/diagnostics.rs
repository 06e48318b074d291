//! Lyapunov functionals, decay-rate estimation and discrete checks of the
//! integral identities used in the stability arguments.

use crate::discretization::Discretization;
use crate::dynamics::RhsKind;
use crate::error::{Error, Result};
use crate::field::{Equilibrium, MagnetizationField, PhysicalParams};
use crate::vec3::{cross, Vec3};

/// Quantities recorded alongside every snapshot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticSample {
    pub t: f64,
    pub phase: usize,
    /// `‖m − r‖²`; for uncontrolled phases `r` is the spatial mean of `m`,
    /// for the linearized field system (a perturbation) it is zero.
    pub l2_err_sq: f64,
    /// `‖m_x‖²`.
    pub h1_semi_sq: f64,
    /// Value of the Lyapunov functional that belongs to the active system.
    pub lyap: f64,
    /// `max_i | |m(x_i)| − 1 |`.
    pub sat_drift: f64,
    /// `∫ (m − r)ᵀ (m × m_xx) dx`.
    pub lemma3: f64,
    /// `ν ‖m × (m_xx + u)‖²` for the uncontrolled (`u = 0`) and field systems.
    pub field_dissipation: Option<f64>,
    /// Discrete `L2` norm of the right-hand side.
    pub rhs_norm: f64,
}

fn diff(m: &MagnetizationField, r: Vec3) -> MagnetizationField {
    m.map(|v| v - r)
}

/// `½‖m − r‖² + ½‖m_x‖²`.
pub fn lyapunov_affine(d: &Discretization, m: &MagnetizationField, r: Equilibrium) -> Result<f64> {
    let e = d.l2_norm_sq(&diff(m, r.vector()))?;
    Ok(0.5 * e + 0.5 * d.h1_seminorm_sq(m)?)
}

/// `k‖m − r‖² + ‖m_x‖²`.
pub fn lyapunov_field(
    d: &Discretization,
    m: &MagnetizationField,
    r: Equilibrium,
    gain: f64,
) -> Result<f64> {
    crate::field::check_gain(gain)?;
    let e = d.l2_norm_sq(&diff(m, r.vector()))?;
    Ok(gain * e + d.h1_seminorm_sq(m)?)
}

/// `½‖z − r‖²`.
pub fn lyapunov_l2(d: &Discretization, z: &MagnetizationField, r: Equilibrium) -> Result<f64> {
    Ok(0.5 * d.l2_norm_sq(&diff(z, r.vector()))?)
}

/// Energy of the uncontrolled system, `½‖m_x‖²`.
pub fn exchange_energy(d: &Discretization, m: &MagnetizationField) -> Result<f64> {
    Ok(0.5 * d.h1_seminorm_sq(m)?)
}

/// `∫ (m − r)ᵀ (m × m_xx) dx` with the grid's mass matrix as quadrature.
pub fn lemma3_integral(d: &Discretization, m: &MagnetizationField, r: Vec3) -> Result<f64> {
    let w = d.weak_laplacian(m)?;
    let mxw = m.zip_map(&w, cross)?;
    d.l2_inner(&diff(m, r), &mxw)
}

/// Second-order nodal first derivative: central differences inside, one-sided
/// three-point formulas at the ends.
pub fn nodal_derivative(d: &Discretization, m: &MagnetizationField) -> Result<MagnetizationField> {
    d.check(m)?;
    let n = m.len();
    let inv = 1.0 / (2.0 * d.h());
    let v = m.nodes();
    let mut out = Vec::with_capacity(n);
    out.push((v[0] * -3.0 + v[1] * 4.0 - v[2]) * inv);
    for i in 1..n - 1 {
        out.push((v[i + 1] - v[i - 1]) * inv);
    }
    out.push((v[n - 1] * 3.0 - v[n - 2] * 4.0 + v[n - 3]) * inv);
    Ok(MagnetizationField::from_vec_unchecked(out))
}

/// Denominators below this are reported as degenerate.
pub const LEMMA4_DEGENERATE: f64 = 1e-14;

/// `‖m × m_x‖ / ‖m × m_xx‖`.
pub fn lemma4_ratio(d: &Discretization, m: &MagnetizationField) -> Result<f64> {
    let mx = nodal_derivative(d, m)?;
    let w = d.weak_laplacian(m)?;
    let num = d.l2_norm(&m.zip_map(&mx, cross)?)?;
    let den = d.l2_norm(&m.zip_map(&w, cross)?)?;
    if den < LEMMA4_DEGENERATE {
        return Err(Error::Degenerate(format!("‖m × m_xx‖ = {den:e}")));
    }
    Ok(num / den)
}

/// `ν ‖m × (m_xx + u)‖²` with `u = k (r − m)`, or `u = 0` when `control` is `None`.
pub fn field_dissipation(
    d: &Discretization,
    p: &PhysicalParams,
    m: &MagnetizationField,
    control: Option<(f64, Equilibrium)>,
) -> Result<f64> {
    let w = d.weak_laplacian(m)?;
    let g = m.zip_map(&w, |mi, wi| {
        let u = match control {
            Some((k, r)) => (r.vector() - mi) * k,
            None => Vec3::ZERO,
        };
        cross(mi, wi + u)
    })?;
    Ok(p.nu * d.l2_norm_sq(&g)?)
}

/// Mass-weighted spatial mean `(1/L) ∫ m dx`.
pub fn spatial_mean(d: &Discretization, m: &MagnetizationField) -> Result<Vec3> {
    d.check(m)?;
    let mut s = Vec3::ZERO;
    for (v, w) in m.iter().zip(d.lumped_mass()) {
        s += *v * *w;
    }
    // lumped and consistent mass agree on integrals of piecewise-linear functions
    Ok(s / d.length())
}

/// Rate `2 (k − 8 ν L⁴)` from the exponential bound for the affine loop.
pub fn affine_bound_rate(gain: f64, p: &PhysicalParams) -> f64 {
    2.0 * (gain - 8.0 * p.nu * p.length.powi(4))
}

/// Builds the diagnostic sample for `m` given its already evaluated right-hand side.
pub fn sample(
    d: &Discretization,
    p: &PhysicalParams,
    kind: &RhsKind,
    m: &MagnetizationField,
    rhs: &MagnetizationField,
    t: f64,
    phase: usize,
) -> Result<DiagnosticSample> {
    let h1 = d.h1_seminorm_sq(m)?;
    let reference = match (kind, kind.target()) {
        (RhsKind::LinearField { .. }, _) => Vec3::ZERO,
        (_, Some(r)) => r.vector(),
        (_, None) => spatial_mean(d, m)?,
    };
    let l2_err_sq = d.l2_norm_sq(&diff(m, reference))?;
    let lyap = match *kind {
        RhsKind::Uncontrolled => 0.5 * h1,
        RhsKind::Affine { .. } => 0.5 * l2_err_sq + 0.5 * h1,
        RhsKind::Field { gain, .. } => gain * l2_err_sq + h1,
        RhsKind::LinearAffine { .. } | RhsKind::LinearField { .. } => 0.5 * l2_err_sq,
    };
    let field_dissipation = match *kind {
        RhsKind::Uncontrolled => Some(field_dissipation(d, p, m, None)?),
        RhsKind::Field { gain, target } => Some(field_dissipation(d, p, m, Some((gain, target)))?),
        _ => None,
    };
    Ok(DiagnosticSample {
        t,
        phase,
        l2_err_sq,
        h1_semi_sq: h1,
        lyap,
        sat_drift: m.saturation_drift(),
        lemma3: lemma3_integral(d, m, reference)?,
        field_dissipation,
        rhs_norm: d.l2_norm(rhs)?,
    })
}

/// Portion of a time series used for a decay-rate fit, as fractions of its length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitWindow {
    pub start: f64,
    pub end: f64,
}

impl Default for FitWindow {
    /// Middle 60 %.
    fn default() -> Self {
        FitWindow { start: 0.2, end: 0.8 }
    }
}

impl FitWindow {
    pub const FULL: FitWindow = FitWindow { start: 0.0, end: 1.0 };
}

pub const MIN_DECAY_SAMPLES: usize = 10;

/// Empirical exponential rate: negated least-squares slope of `ln v` against `t`.
pub fn decay_rate(samples: &[(f64, f64)], window: FitWindow) -> Result<f64> {
    if samples.len() < MIN_DECAY_SAMPLES {
        return Err(Error::TooFewSamples {
            needed: MIN_DECAY_SAMPLES,
            got: samples.len(),
        });
    }
    if !(0.0..1.0).contains(&window.start) || !(window.start < window.end && window.end <= 1.0) {
        return Err(Error::param("window", format!("invalid fractions {window:?}")));
    }
    let n = samples.len();
    let lo = (window.start * n as f64).floor() as usize;
    let hi = ((window.end * n as f64).ceil() as usize).min(n);
    if hi - lo < 3 {
        return Err(Error::TooFewSamples { needed: 3, got: hi - lo });
    }
    let mut pts = Vec::with_capacity(hi - lo);
    for (index, &(t, v)) in samples.iter().enumerate().take(hi).skip(lo) {
        if !(v > 0.0) {
            return Err(Error::NonPositive { index, value: v });
        }
        pts.push((t, v.ln()));
    }
    let k = pts.len() as f64;
    let tm = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let ym = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - tm) * (p.1 - ym)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - tm) * (p.0 - tm)).sum();
    if sxx == 0.0 {
        return Err(Error::Degenerate("all sample times coincide".into()));
    }
    Ok(-sxy / sxx)
}
