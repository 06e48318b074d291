//! Reference computations written independently of the library: nodal
//! trapezoid quadrature, mirrored-ghost finite differences, and the
//! right-hand sides expanded component by component.

#![allow(dead_code)]

use llcontrol::vec3::Vec3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use std::f64::consts::PI;

pub type V = [f64; 3];

pub fn v(a: Vec3) -> V {
    [a.x, a.y, a.z]
}

pub fn add(a: V, b: V) -> V {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn sub(a: V, b: V) -> V {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn scale(a: V, s: f64) -> V {
    [a[0] * s, a[1] * s, a[2] * s]
}

pub fn dot(a: V, b: V) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn norm(a: V) -> f64 {
    dot(a, a).sqrt()
}

pub fn cross(a: V, b: V) -> V {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Trapezoid weights on `n + 1` equally spaced nodes over `[0, L]`.
pub fn weights(nodes: usize, length: f64) -> Vec<f64> {
    let h = length / (nodes - 1) as f64;
    (0..nodes)
        .map(|i| if i == 0 || i == nodes - 1 { h / 2.0 } else { h })
        .collect()
}

/// `∫ |f|²` by the trapezoid rule.
pub fn l2sq(f: &[V], length: f64) -> f64 {
    weights(f.len(), length).iter().zip(f).map(|(w, a)| w * dot(*a, *a)).sum()
}

/// `∫ f·g` by the trapezoid rule.
pub fn l2dot(f: &[V], g: &[V], length: f64) -> f64 {
    weights(f.len(), length).iter().zip(f.iter().zip(g)).map(|(w, (a, b))| w * dot(*a, *b)).sum()
}

/// `∫ |f_x|²` of the piecewise-linear interpolant.
pub fn h1sq(f: &[V], length: f64) -> f64 {
    let h = length / (f.len() - 1) as f64;
    f.windows(2).map(|p| {
        let d = sub(p[1], p[0]);
        dot(d, d) / h
    }).sum()
}

/// Three-point second difference with mirrored ghost nodes at both ends.
pub fn fd_lap(f: &[V], length: f64) -> Vec<V> {
    let n = f.len();
    let h = length / (n - 1) as f64;
    (0..n)
        .map(|i| {
            let l = if i == 0 { f[1] } else { f[i - 1] };
            let r = if i == n - 1 { f[n - 2] } else { f[i + 1] };
            scale(add(sub(l, f[i]), sub(r, f[i])), 1.0 / (h * h))
        })
        .collect()
}

/// `m × H − ν m × (m × H)`, with the double product expanded as
/// `m (m·H) − H |m|²`.
pub fn llg(m: V, h: V, nu: f64) -> V {
    let mh = cross(m, h);
    let dbl = sub(scale(m, dot(m, h)), scale(h, dot(m, m)));
    sub(mh, scale(dbl, nu))
}

#[derive(Clone, Copy, Debug)]
pub enum Sys {
    Free,
    Affine { k: f64, r: V },
    Field { k: f64, r: V },
    LinAffine { a: V, k: f64, r: V },
    LinField { r: V, k: f64 },
}

pub fn rhs(sys: Sys, nu: f64, m: &[V], length: f64) -> Vec<V> {
    let w = fd_lap(m, length);
    m.iter()
        .zip(&w)
        .map(|(&mi, &wi)| match sys {
            Sys::Free => llg(mi, wi, nu),
            Sys::Affine { k, r } => add(llg(mi, wi, nu), scale(sub(r, mi), k)),
            Sys::Field { k, r } => llg(mi, add(wi, scale(sub(r, mi), k)), nu),
            Sys::LinAffine { a, k, r } => add(add(scale(wi, nu), cross(a, wi)), scale(sub(r, mi), k)),
            Sys::LinField { r, k } => {
                let rvr = sub(scale(mi, dot(r, r)), scale(r, dot(r, mi)));
                add(
                    add(scale(wi, nu), cross(r, wi)),
                    sub(scale(cross(mi, r), k), scale(rvr, k * nu)),
                )
            }
        })
        .collect()
}

pub fn sample_fn(n_elements: usize, length: f64, f: impl Fn(f64) -> V) -> Vec<V> {
    (0..=n_elements).map(|i| f(length * i as f64 / n_elements as f64)).collect()
}

/// Smooth unit fields whose derivatives vanish at both ends of `[0, 1]`.
pub fn smooth_unit(variant: usize) -> impl Fn(f64) -> V {
    let (t0, t1, p0, p1, p2) = [
        (0.9, 0.7, 0.2, 1.1, 0.0),
        (1.6, -0.5, -0.4, 0.6, 0.8),
        (0.5, 0.3, 1.0, -0.9, 0.4),
    ][variant % 3];
    move |x| {
        let th = t0 + t1 * (PI * x).cos();
        let ph = p0 + p1 * (2.0 * PI * x).cos() + p2 * (3.0 * PI * x).cos();
        [th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos()]
    }
}

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

pub fn rand_unit(r: &mut ChaCha20Rng) -> V {
    // Marsaglia's method
    loop {
        let a: f64 = r.random_range(-1.0..1.0);
        let b: f64 = r.random_range(-1.0..1.0);
        let s = a * a + b * b;
        if s < 1.0 && s > 1e-8 {
            let q = 2.0 * (1.0 - s).sqrt();
            return [a * q, b * q, 1.0 - 2.0 * s];
        }
    }
}

/// `Σ_{j ≤ modes} c_j cos(jπx)` with Gaussian-ish coefficients decaying like `1/(1+j)`.
pub fn rand_band_limited(r: &mut ChaCha20Rng, n_elements: usize, modes: usize) -> Vec<V> {
    let coeffs: Vec<V> = (0..=modes)
        .map(|j| {
            let c: V = [r.random_range(-1.0..1.0), r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)];
            scale(c, 1.0 / (1.0 + j as f64))
        })
        .collect();
    sample_fn(n_elements, 1.0, |x| {
        coeffs
            .iter()
            .enumerate()
            .fold([0.0; 3], |acc, (j, c)| add(acc, scale(*c, (j as f64 * PI * x).cos())))
    })
}

/// Band-limited direction field; redrawn until the raw field stays away from zero.
pub fn rand_saturated(r: &mut ChaCha20Rng, n_elements: usize, modes: usize) -> Vec<V> {
    loop {
        let f = rand_band_limited(r, n_elements, modes);
        if f.iter().all(|a| norm(*a) > 0.25) {
            return f.iter().map(|a| scale(*a, 1.0 / norm(*a))).collect();
        }
    }
}

pub fn to_field(f: &[V]) -> llcontrol::field::MagnetizationField {
    llcontrol::field::MagnetizationField::new(f.iter().map(|a| Vec3::new(a[0], a[1], a[2])).collect())
        .expect("finite nodes")
}

pub fn nodes(m: &llcontrol::field::MagnetizationField) -> Vec<V> {
    m.iter().map(|a| v(*a)).collect()
}

pub fn sat_dev(f: &[V]) -> f64 {
    f.iter().map(|a| (norm(*a) - 1.0).abs()).fold(0.0, f64::max)
}

pub fn max_dist(f: &[V], r: V) -> f64 {
    f.iter().map(|a| norm(sub(*a, r))).fold(0.0, f64::max)
}
