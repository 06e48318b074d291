//! Random fields for property sweeps.
//!
//! Band-limited fields are cosine series, so they satisfy the Neumann
//! conditions and are smooth at every resolution.

use crate::field::MagnetizationField;
use crate::vec3::Vec3;
use rand::Rng;
use std::f64::consts::PI;

/// Seeded generator used throughout the sweeps.
pub type SweepRng = rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> SweepRng {
    rand::SeedableRng::seed_from_u64(seed)
}

/// Uniform in the cube `[-1, 1]³`.
pub fn cube<R: Rng + ?Sized>(rng: &mut R) -> Vec3 {
    Vec3::new(
        rng.random_range(-1.0..=1.0),
        rng.random_range(-1.0..=1.0),
        rng.random_range(-1.0..=1.0),
    )
}

/// Uniform on the unit sphere, by rejection from the cube.
pub fn unit<R: Rng + ?Sized>(rng: &mut R) -> Vec3 {
    loop {
        let v = cube(rng);
        let n2 = v.norm_sq();
        if n2 > 1e-4 && n2 <= 1.0 {
            return v / n2.sqrt();
        }
    }
}

/// Independent random unit vector at every node. Not smooth.
pub fn rough_saturated<R: Rng + ?Sized>(rng: &mut R, n_elements: usize) -> MagnetizationField {
    let nodes = (0..=n_elements).map(|_| unit(rng)).collect();
    MagnetizationField::new(nodes).expect("unit vectors are finite")
}

/// `a₀ + Σ_{j=1..modes} a_j cos(jπx/L) / j` with coefficients uniform in the cube.
pub fn band_limited<R: Rng + ?Sized>(
    rng: &mut R,
    n_elements: usize,
    length: f64,
    modes: usize,
) -> MagnetizationField {
    let coeffs: Vec<Vec3> = (0..=modes).map(|_| cube(rng)).collect();
    MagnetizationField::from_fn(n_elements, length, |x| {
        coeffs
            .iter()
            .enumerate()
            .map(|(j, a)| {
                if j == 0 {
                    *a
                } else {
                    *a * ((j as f64 * PI * x / length).cos() / j as f64)
                }
            })
            .fold(Vec3::ZERO, |acc, v| acc + v)
    })
    .expect("grid is valid")
}

/// Nodal normalization of a band-limited field. Draws again while the raw
/// field comes close to zero anywhere, which would make the direction
/// field nearly discontinuous.
pub fn band_limited_saturated<R: Rng + ?Sized>(
    rng: &mut R,
    n_elements: usize,
    length: f64,
    modes: usize,
) -> MagnetizationField {
    loop {
        let raw = band_limited(rng, n_elements, length, modes);
        if raw.iter().all(|v| v.norm() > 0.2) {
            let mut m = raw;
            m.renormalize();
            return m;
        }
    }
}
