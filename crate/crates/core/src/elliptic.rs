//! Jacobi elliptic functions of complex argument and modulus, and the
//! elliptic family of cocycles and weight matrices.
//!
//! The modulus is `k` throughout: `dn² + k² sn² = 1`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::simplicial::{Cochain, Simplex4, SimplexComplex, Vertex};
use crate::weights::WeightMatrix;
use crate::C64;

const MAX_LANDEN_STEPS: usize = 64;

/// `(sn, cn, dn)(u, k)` by descending Landen transformations until the
/// modulus drops below 1e-14, trigonometric (or, at `k² = 1`, hyperbolic)
/// values there, then ascent.
pub fn jacobi_sn_cn_dn(u: C64, k: C64) -> Result<(C64, C64, C64)> {
    let one = C64::new(1.0, 0.0);
    let mut moduli = Vec::new();
    let mut kk = k;
    let mut hyperbolic = false;
    for step in 0..=MAX_LANDEN_STEPS {
        if kk.norm() < 1e-14 {
            break;
        }
        if kk * kk == one {
            hyperbolic = true;
            break;
        }
        if step == MAX_LANDEN_STEPS {
            return Err(Error::Numeric(format!("Landen descent did not converge for k = {k}")));
        }
        // principal root keeps Re k' ≥ 0, so |1 + k'| ≥ 1
        let kp = (one - kk * kk).sqrt();
        kk = (one - kp) / (one + kp);
        moduli.push(kk);
    }
    let v = moduli.iter().fold(u, |v, k1| v / (one + k1));
    let (mut s, mut c, mut d) = if hyperbolic {
        let sech = one / v.cosh();
        (v.tanh(), sech, sech)
    } else {
        (v.sin(), v.cos(), one)
    };
    for k1 in moduli.iter().rev() {
        let s2 = s * s;
        let den = one + k1 * s2;
        (s, c, d) = ((one + k1) * s / den, c * d / den, (one - k1 * s2) / den);
    }
    if !(s.is_finite() && c.is_finite() && d.is_finite()) {
        return Err(Error::Numeric(format!("sn/cn/dn not finite at u = {u}, k = {k}")));
    }
    Ok((s, c, d))
}

pub fn sn(u: C64, k: C64) -> Result<C64> {
    Ok(jacobi_sn_cn_dn(u, k)?.0)
}

/// `sn / (cn dn)` at `z / 2`.
pub fn half_ratio(z: C64, k: C64) -> Result<C64> {
    let (s, c, d) = jacobi_sn_cn_dn(z / 2.0, k)?;
    Ok(s / (c * d))
}

/// Minimum allowed `|cn · dn|` at half coordinate differences.
pub const POLE_MARGIN: f64 = 1e-6;

/// Elliptic modulus and one complex coordinate per vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct EllipticParams {
    modulus: C64,
    coords: BTreeMap<Vertex, C64>,
}

impl EllipticParams {
    /// Checks that every `sn(x_i − x_j)` is finite and every
    /// `cn·dn((x_i − x_j)/2)` stays at least [`POLE_MARGIN`] from zero.
    /// Coincident coordinates are allowed.
    pub fn new(modulus: C64, coords: BTreeMap<Vertex, C64>) -> Result<Self> {
        let p = EllipticParams { modulus, coords };
        let xs: Vec<(Vertex, C64)> = p.coords.iter().map(|(v, x)| (*v, *x)).collect();
        for (a, &(vi, xi)) in xs.iter().enumerate() {
            for &(vj, xj) in &xs[a + 1..] {
                jacobi_sn_cn_dn(xi - xj, modulus)?;
                let (_, c, d) = jacobi_sn_cn_dn((xi - xj) / 2.0, modulus)?;
                if (c * d).norm() < POLE_MARGIN {
                    return Err(Error::Degenerate(format!(
                        "cn·dn vanishes at half the difference of x{vi} and x{vj}"
                    )));
                }
            }
        }
        Ok(p)
    }

    pub fn modulus(&self) -> C64 {
        self.modulus
    }

    pub fn coords(&self) -> &BTreeMap<Vertex, C64> {
        &self.coords
    }

    pub fn coord(&self, v: Vertex) -> Result<C64> {
        self.coords
            .get(&v)
            .copied()
            .ok_or_else(|| Error::InvalidCochain(format!("no elliptic coordinate for vertex {v}")))
    }
}

/// `ω_ijk = sn(x_i − x_j) sn(x_i − x_k) sn(x_j − x_k)` on every 2-face.
pub fn elliptic_cocycle(p: &EllipticParams, complex: &SimplexComplex) -> Result<Cochain> {
    let k = p.modulus;
    let mut out = Cochain::new(2)?;
    for &[i, j, l] in complex.faces() {
        let (xi, xj, xl) = (p.coord(i)?, p.coord(j)?, p.coord(l)?);
        out.set(vec![i, j, l], sn(xi - xj, k)? * sn(xi - xl, k)? * sn(xj - xl, k)?)?;
    }
    Ok(out)
}

/// `ν_ij = sn(x_i − x_j) / (k² sn x_i sn x_j)` on all increasing pairs of
/// the parameter vertices.
pub fn elliptic_primitive(p: &EllipticParams) -> Result<Cochain> {
    let k = p.modulus;
    if k.norm() == 0.0 {
        return Err(Error::Degenerate("the primitive needs a nonzero modulus".into()));
    }
    let mut sx = BTreeMap::new();
    for (&v, &x) in &p.coords {
        let s = sn(x, k)?;
        if s.norm() < 1e-12 {
            return Err(Error::Degenerate(format!("sn x{v} vanishes")));
        }
        sx.insert(v, s);
    }
    let verts: Vec<Vertex> = p.coords.keys().copied().collect();
    let mut out = Cochain::new(1)?;
    for (a, &i) in verts.iter().enumerate() {
        for &j in &verts[a + 1..] {
            let v = sn(p.coords[&i] - p.coords[&j], k)? / (k * k * sx[&i] * sx[&j]);
            out.set(vec![i, j], v)?;
        }
    }
    Ok(out)
}

/// `F[omit i, omit j] = (sn / (cn dn))((x_i − x_j) / 2)`.
pub fn elliptic_f(p: &EllipticParams, simplex: Simplex4) -> Result<WeightMatrix> {
    let mut e = [[C64::default(); 5]; 5];
    for a in 0..5 {
        for b in a + 1..5 {
            let v = half_ratio(p.coord(simplex[a])? - p.coord(simplex[b])?, p.modulus)?;
            e[a][b] = v;
            e[b][a] = -v;
        }
    }
    WeightMatrix::from_matrix(simplex, e)
}

/// `κ = −G(x1 − x3) G(x1 − x4) / (G(x2 − x3) G(x2 − x4))` with
/// `G(z) = (sn / (cn dn))(z / 2)` and `x1..x5` the simplex's coordinates.
pub fn elliptic_kappa(p: &EllipticParams, simplex: Simplex4) -> Result<C64> {
    let x = |i: usize| p.coord(simplex[i - 1]);
    let g = |a: usize, b: usize| -> Result<C64> { half_ratio(x(a)? - x(b)?, p.modulus) };
    let den = g(2, 3)? * g(2, 4)?;
    if den.norm() == 0.0 {
        return Err(Error::Degenerate("κ denominator vanishes".into()));
    }
    Ok(-g(1, 3)? * g(1, 4)? / den)
}
