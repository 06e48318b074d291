//! Finite-difference reference discretization.
//!
//! Second-order three-point Laplacian with mirrored ghost nodes for the
//! Neumann ends, and right-hand sides written out with the `BAC − CAB`
//! expansion instead of nested cross products. Used to cross-check the
//! Galerkin evaluators under refinement.

use crate::dynamics::RhsKind;
use crate::error::{Error, Result};
use crate::field::MagnetizationField;
use crate::vec3::Vec3;

pub fn laplacian(m: &[Vec3], h: f64) -> Vec<Vec3> {
    let n = m.len();
    (0..n)
        .map(|i| {
            let left = if i == 0 { m[1] } else { m[i - 1] };
            let right = if i + 1 == n { m[n - 2] } else { m[i + 1] };
            (left + right - m[i] * 2.0) / (h * h)
        })
        .collect()
}

fn cr(a: Vec3, b: Vec3) -> Vec3 {
    Vec3::new(a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x)
}

/// `m × H − ν (m (m·H) − H |m|²)`.
fn llg(m: Vec3, h: Vec3, nu: f64) -> Vec3 {
    cr(m, h) - (m * m.dot(h) - h * m.norm_sq()) * nu
}

/// Right-hand side of `kind` at every node of `m`, on a grid of spacing `h`.
pub fn rhs(kind: &RhsKind, nu: f64, m: &[Vec3], h: f64) -> Vec<Vec3> {
    let w = laplacian(m, h);
    m.iter()
        .zip(&w)
        .map(|(&mi, &wi)| match *kind {
            RhsKind::Uncontrolled => llg(mi, wi, nu),
            RhsKind::Affine { gain, target } => llg(mi, wi, nu) + (target.vector() - mi) * gain,
            RhsKind::Field { gain, target } => llg(mi, wi + (target.vector() - mi) * gain, nu),
            RhsKind::LinearAffine { base, gain, target } => {
                wi * nu + cr(base.vector(), wi) + (target.vector() - mi) * gain
            }
            RhsKind::LinearField { base, gain } => {
                let r = base.vector();
                // r × (v × r) = v |r|² − r (r·v)
                let back = mi * r.norm_sq() - r * r.dot(mi);
                wi * nu + cr(r, wi) + cr(mi, r) * gain - back * (gain * nu)
            }
        })
        .collect()
}

/// Largest nodal deviation between `coarse` (one value per coarse node) and
/// a reference computed on a grid `refine` times finer, compared at the
/// shared nodes.
pub fn max_deviation_at_shared_nodes(
    coarse: &MagnetizationField,
    fine: &[Vec3],
    refine: usize,
) -> Result<f64> {
    let expected = (coarse.len() - 1) * refine + 1;
    if fine.len() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            found: fine.len(),
        });
    }
    Ok(coarse
        .iter()
        .enumerate()
        .map(|(i, c)| (*c - fine[i * refine]).max_abs())
        .fold(0.0, f64::max))
}
