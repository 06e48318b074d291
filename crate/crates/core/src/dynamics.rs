//! Semi-discrete right-hand sides.
//!
//! The nodal second derivative comes from [`Discretization::weak_laplacian`];
//! every nonlinear term is then evaluated node by node. For the uncontrolled
//! and field-controlled systems this keeps `m(x_i) · rhs(x_i) = 0` at every
//! node up to rounding, so the semi-discrete flow preserves nodal norms.

use crate::discretization::Discretization;
use crate::error::Result;
use crate::field::{check_gain, ControlLaw, Equilibrium, MagnetizationField, PhysicalParams};
use crate::vec3::{cross, Vec3};

/// Which of the five dynamical systems to evaluate, with its control data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RhsKind {
    /// `m × m_xx − ν m × (m × m_xx)`.
    Uncontrolled,
    /// Uncontrolled dynamics plus `k (r − m)`.
    Affine { gain: f64, target: Equilibrium },
    /// `m_xx + k (r − m)` as effective field inside both cross products.
    Field { gain: f64, target: Equilibrium },
    /// `ν z_xx + a × z_xx + k (r − z)` linearized about `base = a`.
    LinearAffine {
        base: Equilibrium,
        gain: f64,
        target: Equilibrium,
    },
    /// `ν v_xx + r × v_xx + k v × r − kν r × (v × r)` linearized about `base = r`.
    LinearField { base: Equilibrium, gain: f64 },
}

impl RhsKind {
    pub fn from_control(law: ControlLaw) -> Self {
        match law {
            ControlLaw::None => RhsKind::Uncontrolled,
            ControlLaw::Affine { gain, target } => RhsKind::Affine { gain, target },
            ControlLaw::Field { gain, target } => RhsKind::Field { gain, target },
        }
    }

    /// Short tag used in config files and output.
    pub fn label(&self) -> &'static str {
        match self {
            RhsKind::Uncontrolled => "none",
            RhsKind::Affine { .. } => "affine",
            RhsKind::Field { .. } => "field",
            RhsKind::LinearAffine { .. } => "linear_affine",
            RhsKind::LinearField { .. } => "linear_field",
        }
    }

    /// Whether the continuous flow keeps `|m(x)| = 1`.
    pub fn preserves_saturation(&self) -> bool {
        matches!(self, RhsKind::Uncontrolled | RhsKind::Field { .. })
    }

    pub fn gain(&self) -> Option<f64> {
        match *self {
            RhsKind::Uncontrolled => None,
            RhsKind::Affine { gain, .. }
            | RhsKind::Field { gain, .. }
            | RhsKind::LinearAffine { gain, .. }
            | RhsKind::LinearField { gain, .. } => Some(gain),
        }
    }

    /// The equilibrium the state is driven toward, if any. The linearized
    /// field system has none: its state is a perturbation of `base`.
    pub fn target(&self) -> Option<Equilibrium> {
        match *self {
            RhsKind::Affine { target, .. }
            | RhsKind::Field { target, .. }
            | RhsKind::LinearAffine { target, .. } => Some(target),
            RhsKind::Uncontrolled | RhsKind::LinearField { .. } => None,
        }
    }

    /// Linearization point of the linearized systems.
    pub fn base(&self) -> Option<Equilibrium> {
        match *self {
            RhsKind::LinearAffine { base, .. } | RhsKind::LinearField { base, .. } => Some(base),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.gain() {
            Some(k) => check_gain(k),
            None => Ok(()),
        }
    }

    pub fn evaluate(
        &self,
        d: &Discretization,
        p: &PhysicalParams,
        m: &MagnetizationField,
    ) -> Result<MagnetizationField> {
        match *self {
            RhsKind::Uncontrolled => rhs_uncontrolled(d, p, m),
            RhsKind::Affine { gain, target } => rhs_affine(d, p, m, gain, target),
            RhsKind::Field { gain, target } => rhs_field(d, p, m, gain, target),
            RhsKind::LinearAffine { base, gain, target } => {
                rhs_linear_affine(d, p, m, base, gain, target)
            }
            RhsKind::LinearField { base, gain } => rhs_linear_field(d, p, m, base, gain),
        }
    }
}

/// `m × H − ν m × (m × H)` at one node.
#[inline]
pub fn precession_damping(m: Vec3, h_eff: Vec3, nu: f64) -> Vec3 {
    let mh = cross(m, h_eff);
    mh - cross(m, mh) * nu
}

pub fn rhs_uncontrolled(
    d: &Discretization,
    p: &PhysicalParams,
    m: &MagnetizationField,
) -> Result<MagnetizationField> {
    let w = d.weak_laplacian(m)?;
    m.zip_map(&w, |mi, wi| precession_damping(mi, wi, p.nu))
}

pub fn rhs_affine(
    d: &Discretization,
    p: &PhysicalParams,
    m: &MagnetizationField,
    gain: f64,
    target: Equilibrium,
) -> Result<MagnetizationField> {
    check_gain(gain)?;
    let r = target.vector();
    let w = d.weak_laplacian(m)?;
    m.zip_map(&w, |mi, wi| precession_damping(mi, wi, p.nu) + (r - mi) * gain)
}

pub fn rhs_field(
    d: &Discretization,
    p: &PhysicalParams,
    m: &MagnetizationField,
    gain: f64,
    target: Equilibrium,
) -> Result<MagnetizationField> {
    check_gain(gain)?;
    let r = target.vector();
    let w = d.weak_laplacian(m)?;
    m.zip_map(&w, |mi, wi| {
        let u = (r - mi) * gain;
        precession_damping(mi, wi + u, p.nu)
    })
}

pub fn rhs_linear_affine(
    d: &Discretization,
    p: &PhysicalParams,
    z: &MagnetizationField,
    base: Equilibrium,
    gain: f64,
    target: Equilibrium,
) -> Result<MagnetizationField> {
    check_gain(gain)?;
    let a = base.vector();
    let r = target.vector();
    let w = d.weak_laplacian(z)?;
    z.zip_map(&w, |zi, wi| wi * p.nu + cross(a, wi) + (r - zi) * gain)
}

pub fn rhs_linear_field(
    d: &Discretization,
    p: &PhysicalParams,
    v: &MagnetizationField,
    base: Equilibrium,
    gain: f64,
) -> Result<MagnetizationField> {
    check_gain(gain)?;
    let r = base.vector();
    let w = d.weak_laplacian(v)?;
    v.zip_map(&w, |vi, wi| {
        let vxr = cross(vi, r);
        wi * p.nu + cross(r, wi) + vxr * gain - cross(r, vxr) * (gain * p.nu)
    })
}

/// `⟨F(m) − F(y), m − y⟩` in the discrete `L2` inner product.
///
/// Positive values mean the pair violates dissipativity of `F`.
pub fn dissipativity_gap(
    d: &Discretization,
    p: &PhysicalParams,
    kind: &RhsKind,
    m: &MagnetizationField,
    y: &MagnetizationField,
) -> Result<f64> {
    let fm = kind.evaluate(d, p, m)?;
    let fy = kind.evaluate(d, p, y)?;
    let df = fm.zip_map(&fy, |a, b| a - b)?;
    let dm = m.zip_map(y, |a, b| a - b)?;
    d.l2_inner(&df, &dm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::discretization::MassKind;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn setup(n: usize, nu: f64) -> (Discretization, PhysicalParams) {
        (
            Discretization::build(n, 1.0).unwrap(),
            PhysicalParams::new(nu, 1.0).unwrap(),
        )
    }

    fn eq(v: Vec3) -> Equilibrium {
        Equilibrium::new(v).unwrap()
    }

    fn r1() -> Equilibrium {
        eq(Vec3::new(-FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2))
    }

    #[test]
    fn constant_unit_fields_are_fixed_points() {
        let (d, p) = setup(12, 0.02);
        let a = Vec3::new(0.6, -0.8, 0.0);
        let m = MagnetizationField::constant(13, a).unwrap();
        assert!(rhs_uncontrolled(&d, &p, &m).unwrap().iter().all(|v| *v == Vec3::ZERO));
        let r = eq(a);
        assert!(rhs_affine(&d, &p, &m, 0.5, r).unwrap().iter().all(|v| *v == Vec3::ZERO));
        assert!(rhs_field(&d, &p, &m, 10.0, r).unwrap().iter().all(|v| *v == Vec3::ZERO));
        assert!(rhs_linear_affine(&d, &p, &m, r1(), 0.5, r)
            .unwrap()
            .iter()
            .all(|v| *v == Vec3::ZERO));
    }

    #[test]
    fn antipode_is_a_field_fixed_point() {
        let (d, p) = setup(12, 0.02);
        let r = r1();
        let m = MagnetizationField::constant(13, -r.vector()).unwrap();
        let f = rhs_field(&d, &p, &m, 10.0, r).unwrap();
        assert!(f.iter().all(|v| v.max_abs() < 1e-15));
    }

    #[test]
    fn affine_on_constant_off_target() {
        let (d, p) = setup(12, 0.02);
        let a = Vec3::Y;
        let m = MagnetizationField::constant(13, a).unwrap();
        let f = rhs_affine(&d, &p, &m, 0.5, r1()).unwrap();
        let expected = (r1().vector() - a) * 0.5;
        assert!(f.iter().all(|v| *v == expected));
    }

    #[test]
    fn affine_decomposes_exactly() {
        let (d, p) = setup(12, 0.02);
        let m0 = MagnetizationField::trig(12, 1.0, 1.0).unwrap();
        let base = rhs_uncontrolled(&d, &p, &m0).unwrap();
        let full = rhs_affine(&d, &p, &m0, 0.5, r1()).unwrap();
        for i in 0..13 {
            let u = (r1().vector() - m0[i]) * 0.5;
            assert_eq!(full[i], base[i] + u);
        }
    }

    #[test]
    fn planar_precession_is_orthogonal() {
        let (d, p) = setup(12, 0.0);
        let m = MagnetizationField::trig(12, 1.0, 1.0).unwrap();
        let w = d.weak_laplacian(&m).unwrap();
        let f = rhs_uncontrolled(&d, &p, &m).unwrap();
        for i in 0..13 {
            let scale = w[i].norm().max(1.0);
            assert!(f[i].dot(m[i]).abs() < 8.0 * f64::EPSILON * scale);
            assert!(f[i].dot(w[i]).abs() < 8.0 * f64::EPSILON * scale * scale);
        }
    }

    #[test]
    fn linear_affine_hand_expansion() {
        // nu = 0, a = z: a × w = (-w_y, w_x, 0); with z = r + eps (cos πx, 0, 0)
        let (d, p) = setup(2, 0.0);
        let a = eq(Vec3::Z);
        let r = eq(Vec3::Z);
        let eps = 1e-3;
        let z = MagnetizationField::from_fn(2, 1.0, |x| Vec3::Z + Vec3::X * (eps * (PI * x).cos())).unwrap();
        // h = 1/2, x-components (eps, 0, -eps): K f = (2 eps, 0, -2 eps), and
        // w = (-c, 0, c) solves M w = -K f with m_00 c = 2 eps.
        for (mass, m00) in [(MassKind::Lumped, 0.25), (MassKind::Consistent, 1.0 / 6.0)] {
            let d = Discretization::build_with(2, 1.0, mass).unwrap();
            let c = 2.0 * eps / m00;
            let w_x = [-c, 0.0, c];
            let f = rhs_linear_affine(&d, &p, &z, a, 0.5, r).unwrap();
            for i in 0..3 {
                let pert = z[i].x;
                let expected = Vec3::new(-0.5 * pert, w_x[i], 0.0);
                assert!((f[i] - expected).max_abs() < 1e-12, "{mass:?} node {i}: {:?} vs {expected:?}", f[i]);
            }
        }
        let _ = d;
    }

    #[test]
    fn linear_field_examples() {
        let (d, p) = setup(12, 0.02);
        let r = eq(Vec3::Z);
        let zero = MagnetizationField::constant(13, Vec3::ZERO).unwrap();
        assert!(rhs_linear_field(&d, &p, &zero, r, 10.0).unwrap().iter().all(|v| *v == Vec3::ZERO));
        let along = MagnetizationField::constant(13, Vec3::Z * -0.3).unwrap();
        assert!(rhs_linear_field(&d, &p, &along, r, 10.0).unwrap().iter().all(|v| *v == Vec3::ZERO));

        // v = r + w, w = (eps, 0, 0): k w × r − kν r × (w × r) = k(0, -eps, 0) − kν (eps, 0, 0)
        let eps = 1e-2;
        let k = 10.0;
        let v = MagnetizationField::constant(13, Vec3::new(eps, 0.0, 1.0)).unwrap();
        let f = rhs_linear_field(&d, &p, &v, r, k).unwrap();
        let expected = Vec3::new(-k * 0.02 * eps, -k * eps, 0.0);
        assert!(f.iter().all(|x| (*x - expected).max_abs() < 1e-15));
    }

    #[test]
    fn linear_affine_constant_offset() {
        let (d, p) = setup(12, 0.02);
        let z = MagnetizationField::constant(13, Vec3::new(0.1, 0.2, 0.3)).unwrap();
        let f = rhs_linear_affine(&d, &p, &z, r1(), 2.0, r1()).unwrap();
        let expected = (r1().vector() - Vec3::new(0.1, 0.2, 0.3)) * 2.0;
        assert!(f.iter().all(|v| *v == expected));
    }

    #[test]
    fn nonpositive_gain_rejected() {
        let (d, p) = setup(12, 0.02);
        let m = MagnetizationField::trig(12, 1.0, 1.0).unwrap();
        assert!(matches!(rhs_affine(&d, &p, &m, 0.0, r1()), Err(Error::InvalidParameter { .. })));
        assert!(rhs_field(&d, &p, &m, -1.0, r1()).is_err());
        assert!(rhs_linear_field(&d, &p, &m, r1(), 0.0).is_err());
    }

    #[test]
    fn dimension_mismatch_reported() {
        let (d, p) = setup(12, 0.02);
        let m = MagnetizationField::trig(10, 1.0, 1.0).unwrap();
        assert!(matches!(rhs_uncontrolled(&d, &p, &m), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn dissipativity_of_the_control_term() {
        // With y constant, F(y) = 0 and the affine part contributes exactly -k|m-y|^2
        // on top of the uncontrolled gap.
        let (d, p) = setup(24, 0.02);
        let m = MagnetizationField::trig(24, 1.0, 1.0).unwrap();
        let y = MagnetizationField::constant(25, Vec3::Z).unwrap();
        let g0 = dissipativity_gap(&d, &p, &RhsKind::Uncontrolled, &m, &y).unwrap();
        let k = 3.0;
        let ga = dissipativity_gap(&d, &p, &RhsKind::Affine { gain: k, target: r1() }, &m, &y).unwrap();
        let dm = m.zip_map(&y, |a, b| a - b).unwrap();
        let expected = g0 - k * d.l2_norm_sq(&dm).unwrap();
        assert!((ga - expected).abs() < 1e-12 * expected.abs().max(1.0));
    }
}
