//! Linear-spline Galerkin discretization on a uniform grid with natural
//! (Neumann) boundary conditions.

use crate::error::{Error, Result};
use crate::field::MagnetizationField;
use crate::tridiag::{ThomasFactor, Tridiagonal};
use crate::vec3::Vec3;

/// Mass matrix used for the nodal second derivative and the `L2` inner product.
///
/// With the lumped (diagonal) mass, nodal evaluation of the cross-product
/// terms keeps the discrete energy identities exact: the Lyapunov functionals
/// of the controlled systems decrease step for step. The consistent mass
/// couples neighbouring nodes and loses that property.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MassKind {
    /// Row-sum lumped (diagonal) mass matrix, trapezoid weights.
    #[default]
    Lumped,
    /// Full tridiagonal hat-function mass matrix.
    Consistent,
}

impl MassKind {
    /// Largest eigenvalue of `M⁻¹K` on a grid with spacing `h`.
    pub fn max_eigenvalue(self, h: f64) -> f64 {
        match self {
            MassKind::Lumped => 4.0 / (h * h),
            MassKind::Consistent => 12.0 / (h * h),
        }
    }
}

/// Grid geometry plus assembled hat-function mass and stiffness matrices.
#[derive(Debug, Clone)]
pub struct Discretization {
    n_elements: usize,
    length: f64,
    h: f64,
    mass: Tridiagonal,
    stiffness: Tridiagonal,
    mass_factor: ThomasFactor,
    lumped: Vec<f64>,
    mass_kind: MassKind,
}

impl Discretization {
    /// Discretization with the default (lumped) mass.
    pub fn build(n_elements: usize, length: f64) -> Result<Self> {
        Self::build_with(n_elements, length, MassKind::default())
    }

    /// `mass_kind` selects the mass matrix used by [`Self::weak_laplacian`]
    /// and [`Self::l2_inner`].
    pub fn build_with(n_elements: usize, length: f64, mass_kind: MassKind) -> Result<Self> {
        if n_elements < 2 {
            return Err(Error::param("n_elements", format!("must be >= 2, got {n_elements}")));
        }
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::param("length", format!("must be finite and > 0, got {length}")));
        }
        let n = n_elements + 1;
        let h = length / n_elements as f64;

        let mut mass_diag = vec![4.0 * h / 6.0; n];
        mass_diag[0] = 2.0 * h / 6.0;
        mass_diag[n - 1] = 2.0 * h / 6.0;
        let mass_off = vec![h / 6.0; n - 1];
        let mass = Tridiagonal::new(mass_off.clone(), mass_diag, mass_off)?;

        let mut stiff_diag = vec![2.0 / h; n];
        stiff_diag[0] = 1.0 / h;
        stiff_diag[n - 1] = 1.0 / h;
        let stiff_off = vec![-1.0 / h; n - 1];
        let stiffness = Tridiagonal::new(stiff_off.clone(), stiff_diag, stiff_off)?;

        let mass_factor = mass.factor()?;
        let mut lumped = vec![h; n];
        lumped[0] = h / 2.0;
        lumped[n - 1] = h / 2.0;

        Ok(Discretization {
            n_elements,
            length,
            h,
            mass,
            stiffness,
            mass_factor,
            lumped,
            mass_kind,
        })
    }

    #[inline]
    pub fn n_elements(&self) -> usize {
        self.n_elements
    }

    #[inline]
    pub fn n_nodes(&self) -> usize {
        self.n_elements + 1
    }

    #[inline]
    pub fn length(&self) -> f64 {
        self.length
    }

    #[inline]
    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn mass_kind(&self) -> MassKind {
        self.mass_kind
    }

    /// The consistent mass matrix, whatever [`MassKind`] is active.
    pub fn mass(&self) -> &Tridiagonal {
        &self.mass
    }

    pub fn stiffness(&self) -> &Tridiagonal {
        &self.stiffness
    }

    /// Diagonal of the row-sum lumped mass matrix (trapezoid weights).
    pub fn lumped_mass(&self) -> &[f64] {
        &self.lumped
    }

    /// Node coordinates `x_i = i h`.
    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_nodes()).map(move |i| i as f64 * self.h)
    }

    pub fn check(&self, f: &MagnetizationField) -> Result<()> {
        f.check_len(self.n_nodes())
    }

    /// Nodal second derivative `w` with `M w = -K f`, solved componentwise
    /// with the active mass matrix.
    pub fn weak_laplacian(&self, f: &MagnetizationField) -> Result<MagnetizationField> {
        self.weak_laplacian_with(f, self.mass_kind)
    }

    pub fn weak_laplacian_with(
        &self,
        f: &MagnetizationField,
        mass: MassKind,
    ) -> Result<MagnetizationField> {
        self.check(f)?;
        let mut w = self.stiffness.mul_vec3(f.nodes());
        for v in &mut w {
            *v = -*v;
        }
        match mass {
            MassKind::Consistent => self.mass_factor.solve_in_place(&mut w),
            MassKind::Lumped => {
                for (v, m) in w.iter_mut().zip(&self.lumped) {
                    *v = *v / *m;
                }
            }
        }
        Ok(MagnetizationField::from_vec_unchecked(w))
    }

    /// Discrete `L2` inner product `fᵀ M g` with the active mass matrix,
    /// summed over the three components.
    pub fn l2_inner(&self, f: &MagnetizationField, g: &MagnetizationField) -> Result<f64> {
        self.check(f)?;
        self.check(g)?;
        Ok(match self.mass_kind {
            MassKind::Consistent => quadratic_form(&self.mass, f.nodes(), g.nodes()),
            MassKind::Lumped => f
                .iter()
                .zip(g.iter())
                .zip(&self.lumped)
                .map(|((a, b), w)| a.dot(*b) * w)
                .sum(),
        })
    }

    pub fn l2_norm_sq(&self, f: &MagnetizationField) -> Result<f64> {
        self.l2_inner(f, f)
    }

    pub fn l2_norm(&self, f: &MagnetizationField) -> Result<f64> {
        Ok(self.l2_norm_sq(f)?.max(0.0).sqrt())
    }

    /// `fᵀ K f`, the squared `H1` seminorm of the interpolant.
    pub fn h1_seminorm_sq(&self, f: &MagnetizationField) -> Result<f64> {
        self.check(f)?;
        // Summing squared element differences is exact for the interpolant and
        // avoids cancellation in fᵀKf.
        let inv_h = 1.0 / self.h;
        Ok(f.nodes()
            .windows(2)
            .map(|w| (w[1] - w[0]).norm_sq() * inv_h)
            .sum())
    }
}

fn quadratic_form(a: &Tridiagonal, f: &[Vec3], g: &[Vec3]) -> f64 {
    let n = a.dim();
    let mut acc = 0.0;
    for i in 0..n {
        let mut row = g[i] * a.diag[i];
        if i > 0 {
            row += g[i - 1] * a.lower[i - 1];
        }
        if i + 1 < n {
            row += g[i + 1] * a.upper[i];
        }
        acc += f[i].dot(row);
    }
    acc
}
