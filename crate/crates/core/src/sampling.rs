//! Random generic inputs: weight matrices, cocycles, gauges and elliptic
//! parameters. All draws come from the caller's generator.

use std::collections::BTreeMap;

use rand::Rng;

use crate::elliptic::EllipticParams;
use crate::simplicial::{coboundary, faces_of, Cochain, Face, Simplex4, SimplexComplex, Tet, Vertex};
use crate::weights::{GaugeTransform, WeightMatrix};
use crate::C64;

/// Uniform in the unit disc, rejecting `|z| < 0.05`.
pub fn disc_point<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    loop {
        let z = C64::from_polar(rng.random::<f64>().sqrt(), rng.random_range(0.0..std::f64::consts::TAU));
        if z.norm() >= 0.05 {
            return z;
        }
    }
}

/// Uniform (by area) in the annulus `0.5 ≤ |z| ≤ 1.5`.
pub fn annulus_point<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let r = (0.25 + rng.random::<f64>() * (2.25 - 0.25)).sqrt();
    C64::from_polar(r, rng.random_range(0.0..std::f64::consts::TAU))
}

pub fn random_phi<R: Rng + ?Sized>(rng: &mut R, simplex: Simplex4) -> BTreeMap<Face, C64> {
    faces_of(&simplex).into_iter().map(|f| (f, disc_point(rng))).collect()
}

pub fn random_weight_matrix<R: Rng + ?Sized>(rng: &mut R, simplex: Simplex4) -> WeightMatrix {
    WeightMatrix::from_phi(simplex, &random_phi(rng, simplex)).expect("all faces present")
}

/// A 1-cochain with annulus values on every edge of `complex`.
pub fn random_nu<R: Rng + ?Sized>(rng: &mut R, complex: &SimplexComplex) -> Cochain {
    Cochain::from_values(1, complex.edges().iter().map(|e| (e.to_vec(), annulus_point(rng)))).expect("edges are sorted")
}

/// `δν` for a random annulus-valued `ν`, hence an exact 2-cocycle.
pub fn random_cocycle<R: Rng + ?Sized>(rng: &mut R, complex: &SimplexComplex) -> Cochain {
    coboundary(&random_nu(rng, complex), complex).expect("degree 1")
}

pub fn random_gauge<R: Rng + ?Sized>(rng: &mut R, tets: &[Tet]) -> GaugeTransform {
    tets.iter().fold(GaugeTransform::new(), |g, &t| g.with_scale(t, annulus_point(rng)).expect("annulus excludes 0"))
}

/// Random elliptic data: modulus with `0.2 ≤ |k| ≤ 0.8` and coordinates
/// spread along the real axis so that differences stay away from zeros and
/// poles. Draws that land too close to a pole are redrawn.
pub fn random_elliptic_params<R: Rng + ?Sized>(rng: &mut R, vertices: &[Vertex]) -> EllipticParams {
    loop {
        let k = C64::from_polar(0.2 + 0.6 * rng.random::<f64>(), rng.random_range(0.0..std::f64::consts::TAU));
        if let Some(p) = try_coords(rng, vertices, k) {
            return p;
        }
    }
}

/// Random coordinates for a fixed modulus; gives up after 100 draws.
pub fn random_elliptic_coords<R: Rng + ?Sized>(rng: &mut R, vertices: &[Vertex], k: C64) -> Option<EllipticParams> {
    (0..100).find_map(|_| try_coords(rng, vertices, k))
}

fn try_coords<R: Rng + ?Sized>(rng: &mut R, vertices: &[Vertex], k: C64) -> Option<EllipticParams> {
    let coords = vertices
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let base = 0.35 * (i as f64 + 1.0);
            (v, C64::new(base + rng.random_range(-0.1..0.1), rng.random_range(-0.3..0.3)))
        })
        .collect();
    EllipticParams::new(k, coords).ok()
}
