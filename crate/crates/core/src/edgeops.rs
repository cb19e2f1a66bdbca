//! Edge operators of a 4-simplex weight, their coboundary normalization and
//! the resulting 2-cocycle.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grassmann::GeneratorSpace;
use crate::linalg::{self, CMatrix, DEFAULT_RANK_TOL};
use crate::operators::LinearOperator;
use crate::simplicial::{coboundary, edges_of, label, Cochain, Edge, Simplex4, SimplexComplex};
use crate::weights::WeightMatrix;
use crate::C64;

/// `(δ𝟙_v)` on edge `[j, k]`.
fn vertex_coboundary(v: u32, e: &Edge) -> f64 {
    if e[1] == v {
        1.0
    } else if e[0] == v {
        -1.0
    } else {
        0.0
    }
}

/// Divides by the entry of largest magnitude.
fn scale_by_largest(v: &[C64]) -> Vec<C64> {
    let big = v.iter().copied().fold(C64::default(), |a, z| if z.norm() > a.norm() { z } else { a });
    v.iter().map(|z| z / big).collect()
}

/// The edge operator of `edge` up to scale: the combination of rows of
/// `p + Fx` with no component on the two tetrahedra missing the edge.
/// Scaled so that its largest coefficient is 1.
pub fn raw_edge_operator(f: &WeightMatrix, edge: Edge) -> Result<LinearOperator> {
    let s = f.simplex();
    let star = crate::simplicial::star_tetrahedra(edge, &s)?;
    let space = f.space();
    let rows = f.rows_as_operators(&space)?;
    let off: Vec<usize> = f.f_order().iter().filter(|t| !star.contains(t)).map(|t| space.require(t)).collect::<Result<_>>()?;
    // columns of the constraint: β and γ at each off-star generator
    let m = CMatrix::from_fn(2 * off.len(), 5, |r, a| {
        let (b, g) = rows[a].component_at(off[r / 2]).expect("generator of the simplex");
        if r % 2 == 0 {
            b
        } else {
            g
        }
    });
    let k = linalg::nullspace(&m, DEFAULT_RANK_TOL);
    if k.ncols() != 1 {
        return Err(Error::NonGeneric {
            what: format!("edge space of {}", label(&edge)),
            expected: 1,
            found: k.ncols(),
        });
    }
    let mut d = LinearOperator::zero(&space);
    for (a, row) in rows.iter().enumerate() {
        d = d.add(&row.scale(k[(a, 0)]))?;
    }
    let coeffs = scale_by_largest(&d.coefficients());
    let mut d = LinearOperator::from_coefficients(&space, &coeffs)?;
    for &i in &off {
        d.set_component(i, C64::default(), C64::default())?;
    }
    Ok(d)
}

/// The ten edge operators of a 4-simplex, keyed by increasing edge.
#[derive(Debug, Clone)]
pub struct EdgeOperatorFamily {
    simplex: Simplex4,
    space: Arc<GeneratorSpace>,
    operators: BTreeMap<Edge, LinearOperator>,
    normalized: bool,
    overall_scale: C64,
}

impl EdgeOperatorFamily {
    pub fn new(simplex: Simplex4, operators: BTreeMap<Edge, LinearOperator>, normalized: bool) -> Result<Self> {
        let edges = edges_of(&simplex);
        if operators.len() != 10 || edges.iter().any(|e| !operators.contains_key(e)) {
            return Err(Error::InvalidCochain("an edge family needs one operator per edge".into()));
        }
        let space = operators[&edges[0]].space().clone();
        if operators.values().any(|d| **d.space() != *space) {
            return Err(Error::SpaceMismatch);
        }
        Ok(EdgeOperatorFamily {
            simplex,
            space,
            operators,
            normalized,
            overall_scale: C64::new(1.0, 0.0),
        })
    }

    pub fn simplex(&self) -> Simplex4 {
        self.simplex
    }
    pub fn space(&self) -> &Arc<GeneratorSpace> {
        &self.space
    }
    pub fn operators(&self) -> &BTreeMap<Edge, LinearOperator> {
        &self.operators
    }
    pub fn is_normalized(&self) -> bool {
        self.normalized
    }
    pub fn overall_scale(&self) -> C64 {
        self.overall_scale
    }

    pub fn operator(&self, e: &Edge) -> Result<&LinearOperator> {
        self.operators.get(e).ok_or(Error::EdgeNotInSimplex {
            edge: *e,
            simplex: self.simplex.to_vec(),
        })
    }

    /// Multiplies every operator by `c`.
    pub fn rescaled(&self, c: C64) -> Self {
        EdgeOperatorFamily {
            simplex: self.simplex,
            space: self.space.clone(),
            operators: self.operators.iter().map(|(e, d)| (*e, d.scale(c))).collect(),
            normalized: self.normalized,
            overall_scale: self.overall_scale * c,
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.operators.values().map(|d| d.max_abs()).fold(0.0, f64::max)
    }

    /// `Σ_b c_b d_b` for a 1-cochain `c`.
    pub fn combination(&self, c: &Cochain) -> Result<LinearOperator> {
        let mut d = LinearOperator::zero(&self.space);
        for (e, op) in &self.operators {
            d = d.add(&op.scale(c.get(e)))?;
        }
        Ok(d)
    }

    /// Largest coefficient of any vertex-coboundary combination relative to
    /// the family maximum.
    pub fn coboundary_residual(&self) -> Result<f64> {
        let cx = SimplexComplex::simplex(self.simplex)?;
        let mut worst: f64 = 0.0;
        for &v in &self.simplex {
            let c = coboundary(&Cochain::vertex_indicator(v), &cx)?;
            worst = worst.max(self.combination(&c)?.max_abs());
        }
        Ok(worst / self.max_abs())
    }
}

/// Raw edge operators rescaled so that every vertex coboundary maps to the
/// zero operator. The common factor is fixed by making the largest scale 1.
pub fn normalize_family(f: &WeightMatrix) -> Result<EdgeOperatorFamily> {
    let s = f.simplex();
    let edges = edges_of(&s);
    let raw: Vec<LinearOperator> = edges.iter().map(|&e| raw_edge_operator(f, e)).collect::<Result<_>>()?;
    let coeffs: Vec<Vec<C64>> = raw.iter().map(|d| d.coefficients()).collect();
    let n = coeffs[0].len();
    let m = CMatrix::from_fn(5 * n, edges.len(), |r, b| coeffs[b][r % n] * vertex_coboundary(s[r / n], &edges[b]));
    let k = linalg::nullspace(&m, DEFAULT_RANK_TOL);
    if k.ncols() != 1 {
        return Err(Error::NonGeneric {
            what: "normalization kernel".into(),
            expected: 1,
            found: k.ncols(),
        });
    }
    let lambda = scale_by_largest(&k.column(0).iter().copied().collect::<Vec<_>>());
    let ops = edges.iter().zip(raw.iter().zip(&lambda)).map(|(e, (d, l))| (*e, d.scale(*l))).collect();
    EdgeOperatorFamily::new(s, ops, true)
}

/// Basis of the edge 1-cochains `μ` with `Σ μ_b d_b = 0`, with the vertex
/// coboundaries projected out. For a generic weight one vector survives.
pub fn relation_quotient(fam: &EdgeOperatorFamily) -> Result<Vec<Cochain>> {
    if !fam.is_normalized() {
        return Err(Error::Degenerate("edge family is not normalized".into()));
    }
    let s = fam.simplex();
    let edges = edges_of(&s);
    let coeffs: Vec<Vec<C64>> = edges.iter().map(|e| fam.operators[e].coefficients()).collect();
    let n = coeffs[0].len();
    let a = CMatrix::from_fn(n, edges.len(), |r, b| coeffs[b][r]);
    let k = linalg::nullspace(&a, DEFAULT_RANK_TOL);
    if k.ncols() != 5 {
        return Err(Error::NonGeneric {
            what: "edge relation space".into(),
            expected: 5,
            found: k.ncols(),
        });
    }
    let b = CMatrix::from_fn(s.len(), edges.len(), |v, e| C64::new(vertex_coboundary(s[v], &edges[e]), 0.0));
    let q = linalg::row_space(&b, DEFAULT_RANK_TOL);
    let projected = &k - q.transpose() * (q.conjugate() * &k);
    let mut out = Vec::new();
    for j in 0..projected.ncols() {
        out.push(Cochain::from_values(1, edges.iter().enumerate().map(|(i, e)| (e.to_vec(), projected[(i, j)])))?);
    }
    out.sort_by(|x, y| y.max_abs().partial_cmp(&x.max_abs()).unwrap_or(std::cmp::Ordering::Equal));
    Ok(out)
}

/// `ω = δν` for the non-coboundary relation `ν`, divided by its largest
/// component.
pub fn extract_w_cocycle(fam: &EdgeOperatorFamily) -> Result<Cochain> {
    let quotient = relation_quotient(fam)?;
    let nu = &quotient[0];
    let cx = SimplexComplex::simplex(fam.simplex())?;
    let omega = coboundary(nu, &cx)?;
    let nu_size = nu.values().values().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if omega.max_abs() <= 1e-10 * nu_size {
        return Err(Error::Degenerate("the W-cocycle vanishes".into()));
    }
    omega.normalized()
}
