//! State and parameter types shared by the discretization, dynamics and
//! integrator modules.

use std::ops::Index;

use crate::error::{Error, Result};
use crate::vec3::Vec3;

/// Default tolerance for calling a field saturated (`| |m(x_i)| - 1 |`).
pub const SAT_TOL: f64 = 1e-6;

/// Tolerance for membership in the equilibrium set.
pub const UNIT_TOL: f64 = 1e-12;

/// Nodal values of a 3-vector field on a uniform grid over `[0, L]`.
///
/// Node `i` sits at `x_i = i * L / N` for `N = len() - 1` elements.
#[derive(Debug, Clone, PartialEq)]
pub struct MagnetizationField {
    nodes: Vec<Vec3>,
}

impl MagnetizationField {
    /// Wraps nodal values, rejecting fewer than three nodes or non-finite data.
    pub fn new(nodes: Vec<Vec3>) -> Result<Self> {
        if nodes.len() < 3 {
            return Err(Error::param("nodes", format!("need at least 3 nodes, got {}", nodes.len())));
        }
        if let Some(i) = nodes.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(MagnetizationField { nodes })
    }

    /// Internal constructor for values produced by arithmetic on valid fields.
    pub(crate) fn from_vec_unchecked(nodes: Vec<Vec3>) -> Self {
        debug_assert!(nodes.len() >= 3);
        MagnetizationField { nodes }
    }

    /// Samples `f` at the `n_elements + 1` nodes of a uniform grid on `[0, length]`.
    pub fn from_fn(n_elements: usize, length: f64, f: impl Fn(f64) -> Vec3) -> Result<Self> {
        let h = length / n_elements as f64;
        Self::new((0..=n_elements).map(|i| f(i as f64 * h)).collect())
    }

    pub fn constant(n_nodes: usize, value: Vec3) -> Result<Self> {
        Self::new(vec![value; n_nodes])
    }

    /// The winding initial condition `(sin 2πwx/L, cos 2πwx/L, 0)`.
    pub fn trig(n_elements: usize, length: f64, winding: f64) -> Result<Self> {
        let omega = 2.0 * std::f64::consts::PI * winding / length;
        Self::from_fn(n_elements, length, |x| Vec3::new((omega * x).sin(), (omega * x).cos(), 0.0))
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    #[inline]
    pub fn nodes(&self) -> &[Vec3] {
        &self.nodes
    }

    pub fn into_nodes(self) -> Vec<Vec3> {
        self.nodes
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Vec3> {
        self.nodes.iter()
    }

    pub fn is_finite(&self) -> bool {
        self.nodes.iter().all(|v| v.is_finite())
    }

    /// `max_i | |m(x_i)| - 1 |`.
    pub fn saturation_drift(&self) -> f64 {
        self.nodes
            .iter()
            .map(|v| (v.norm() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    pub fn is_saturated(&self, tol: f64) -> bool {
        self.saturation_drift() <= tol
    }

    /// Errors with the first offending node if the field is not saturated.
    pub fn check_saturated(&self, tol: f64) -> Result<()> {
        for (node, v) in self.nodes.iter().enumerate() {
            let deviation = v.norm() - 1.0;
            if deviation.abs() > tol {
                return Err(Error::NotSaturated { node, deviation });
            }
        }
        Ok(())
    }

    /// Rescales every node to unit length. Zero nodes are left untouched.
    pub fn renormalize(&mut self) {
        for v in &mut self.nodes {
            if let Some(u) = v.normalized() {
                *v = u;
            }
        }
    }

    /// `true` when every node equals the first one.
    pub fn is_constant(&self) -> bool {
        self.nodes.iter().all(|v| *v == self.nodes[0])
    }

    /// Arithmetic mean of the nodal values.
    pub fn node_mean(&self) -> Vec3 {
        let mut s = Vec3::ZERO;
        for v in &self.nodes {
            s += *v;
        }
        s / self.nodes.len() as f64
    }

    /// `max_i |m(x_i) - a|`.
    pub fn max_distance_to(&self, a: Vec3) -> f64 {
        self.nodes.iter().map(|v| (*v - a).norm()).fold(0.0, f64::max)
    }

    pub(crate) fn check_len(&self, expected: usize) -> Result<()> {
        if self.nodes.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: self.nodes.len(),
            });
        }
        Ok(())
    }

    /// Nodewise map.
    pub fn map(&self, f: impl Fn(Vec3) -> Vec3) -> Self {
        Self::from_vec_unchecked(self.nodes.iter().map(|v| f(*v)).collect())
    }

    /// Nodewise combination of two equally sized fields.
    pub fn zip_map(&self, other: &Self, f: impl Fn(Vec3, Vec3) -> Vec3) -> Result<Self> {
        other.check_len(self.len())?;
        Ok(Self::from_vec_unchecked(
            self.nodes
                .iter()
                .zip(&other.nodes)
                .map(|(a, b)| f(*a, *b))
                .collect(),
        ))
    }
}

impl Index<usize> for MagnetizationField {
    type Output = Vec3;
    fn index(&self, i: usize) -> &Vec3 {
        &self.nodes[i]
    }
}

/// A point of the equilibrium set: a constant unit vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Equilibrium(Vec3);

impl Equilibrium {
    /// Accepts `a` only if `| |a| - 1 | <= 1e-12`.
    pub fn new(a: Vec3) -> Result<Self> {
        let dev = a.norm() - 1.0;
        if !a.is_finite() || dev.abs() > UNIT_TOL {
            return Err(Error::NotUnit(a.to_array(), dev));
        }
        Ok(Equilibrium(a))
    }

    /// Normalizes `a` first; fails only for the zero vector.
    pub fn normalized(a: Vec3) -> Result<Self> {
        a.normalized()
            .map(Equilibrium)
            .ok_or_else(|| Error::Degenerate("cannot normalize the zero vector".into()))
    }

    #[inline]
    pub fn vector(self) -> Vec3 {
        self.0
    }

    /// The antipodal equilibrium `-a`.
    pub fn antipode(self) -> Self {
        Equilibrium(-self.0)
    }
}

/// Physical constants of the exchange-only model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    /// Damping parameter, `nu >= 0`.
    pub nu: f64,
    /// Domain length `L > 0`.
    pub length: f64,
}

impl PhysicalParams {
    pub fn new(nu: f64, length: f64) -> Result<Self> {
        if !(nu >= 0.0) || !nu.is_finite() {
            return Err(Error::param("nu", format!("must be finite and >= 0, got {nu}")));
        }
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::param("length", format!("must be finite and > 0, got {length}")));
        }
        Ok(PhysicalParams { nu, length })
    }
}

/// Proportional feedback law `u = k (r - m)` and how it enters the dynamics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ControlLaw {
    None,
    /// Added directly to the right-hand side.
    Affine { gain: f64, target: Equilibrium },
    /// Added to the effective field inside both cross products.
    Field { gain: f64, target: Equilibrium },
}

impl ControlLaw {
    pub fn affine(gain: f64, target: Equilibrium) -> Result<Self> {
        check_gain(gain)?;
        Ok(ControlLaw::Affine { gain, target })
    }

    pub fn field(gain: f64, target: Equilibrium) -> Result<Self> {
        check_gain(gain)?;
        Ok(ControlLaw::Field { gain, target })
    }

    pub fn target(&self) -> Option<Equilibrium> {
        match *self {
            ControlLaw::None => None,
            ControlLaw::Affine { target, .. } | ControlLaw::Field { target, .. } => Some(target),
        }
    }

    pub fn gain(&self) -> Option<f64> {
        match *self {
            ControlLaw::None => None,
            ControlLaw::Affine { gain, .. } | ControlLaw::Field { gain, .. } => Some(gain),
        }
    }
}

pub(crate) fn check_gain(gain: f64) -> Result<()> {
    if gain > 0.0 && gain.is_finite() {
        Ok(())
    } else {
        Err(Error::param("gain", format!("must be finite and > 0, got {gain}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_short_or_nonfinite_fields() {
        assert!(MagnetizationField::new(vec![Vec3::X; 2]).is_err());
        let bad = vec![Vec3::X, Vec3::new(f64::NAN, 0.0, 0.0), Vec3::X];
        assert_eq!(MagnetizationField::new(bad), Err(Error::NonFinite(1)));
    }

    #[test]
    fn equilibrium_membership() {
        assert!(Equilibrium::new(Vec3::new(0.0, -0.6, 0.0)).is_err());
        assert!(Equilibrium::new(Vec3::new(1.0 + 2e-12, 0.0, 0.0)).is_err());
        assert!(Equilibrium::new(Vec3::new(1.0 + 5e-13, 0.0, 0.0)).is_ok());
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!(Equilibrium::new(Vec3::new(-s, 0.0, s)).is_ok());
    }

    #[test]
    fn trig_field_is_saturated() {
        let m = MagnetizationField::trig(12, 1.0, 1.0).unwrap();
        assert_eq!(m.len(), 13);
        assert!(m.saturation_drift() < 1e-15);
        assert!(m.check_saturated(SAT_TOL).is_ok());
    }

    #[test]
    fn check_saturated_reports_node() {
        let mut nodes = vec![Vec3::Z; 5];
        nodes[3] = Vec3::new(0.0, 0.0, 0.9);
        let m = MagnetizationField::new(nodes).unwrap();
        match m.check_saturated(SAT_TOL) {
            Err(Error::NotSaturated { node, .. }) => assert_eq!(node, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn params_and_gains_validated() {
        assert!(PhysicalParams::new(-0.1, 1.0).is_err());
        assert!(PhysicalParams::new(0.0, 0.0).is_err());
        assert!(PhysicalParams::new(0.0, 1.0).is_ok());
        let r = Equilibrium::new(Vec3::X).unwrap();
        assert!(ControlLaw::affine(0.0, r).is_err());
        assert!(ControlLaw::field(-1.0, r).is_err());
        assert_eq!(ControlLaw::field(10.0, r).unwrap().gain(), Some(10.0));
    }
}
