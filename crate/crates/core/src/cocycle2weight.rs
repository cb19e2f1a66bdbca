//! From a 2-cocycle on a 4-simplex back to a weight: superisotropic
//! operators, κ-type ratios and the gauge-fixed matrix `F`.

use std::collections::{BTreeMap, BTreeSet};

use crate::edgeops::{extract_w_cocycle, EdgeOperatorFamily};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, DEFAULT_RANK_TOL};
use crate::operators::LinearOperator;
use crate::simplicial::{
    cocycle_residual, edges_of, faces_of, label, omit, opposite, simplex_of_cochain, Cochain, Edge, Face, Simplex4,
    SimplexComplex, Tet,
};
use crate::weights::{WeightMatrix, CANONICAL_RATIOS};
use crate::C64;

/// Relative threshold below which a component counts as absent when
/// classifying `β_t ∂_t + γ_t x_t`.
pub const TYPE_TOL: f64 = 1e-8;

/// Largest κ rank-condition residual accepted during reconstruction.
pub const KAPPA_RESIDUAL_TOL: f64 = 1e-8;

/// One branch `√ω_s` per 2-face.
#[derive(Debug, Clone, PartialEq)]
pub struct SqrtChoice {
    roots: BTreeMap<Face, C64>,
}

fn face_values(omega: &Cochain) -> Result<(Simplex4, BTreeMap<Face, C64>)> {
    let s = simplex_of_cochain(omega)?;
    let mut out = BTreeMap::new();
    for f in faces_of(&s) {
        let w = omega.get(&f);
        if w.norm() <= 1e-300 {
            return Err(Error::Degenerate(format!("cocycle vanishes on face {}", label(&f))));
        }
        out.insert(f, w);
    }
    Ok((s, out))
}

impl SqrtChoice {
    /// Principal square roots.
    pub fn principal(omega: &Cochain) -> Result<Self> {
        let (_, w) = face_values(omega)?;
        Ok(SqrtChoice {
            roots: w.into_iter().map(|(f, z)| (f, z.sqrt())).collect(),
        })
    }

    /// Explicit roots; each must square to `ω_s` within 1e-12 relative.
    pub fn from_roots(omega: &Cochain, roots: BTreeMap<Face, C64>) -> Result<Self> {
        let (_, w) = face_values(omega)?;
        for (f, z) in &w {
            let r = roots
                .get(f)
                .ok_or_else(|| Error::BranchInconsistent(format!("no root given for face {}", label(f))))?;
            if (r * r - z).norm() > 1e-12 * z.norm() {
                return Err(Error::BranchInconsistent(format!("root on face {} does not square to ω", label(f))));
            }
        }
        Ok(SqrtChoice { roots })
    }

    /// Principal roots with the faces in `negate` taking the other branch.
    pub fn with_negated(omega: &Cochain, negate: &[Face]) -> Result<Self> {
        let mut s = Self::principal(omega)?;
        for f in negate {
            s = s.flipped(f)?;
        }
        Ok(s)
    }

    pub fn flipped(&self, f: &Face) -> Result<Self> {
        let mut out = self.clone();
        let r = out
            .roots
            .get_mut(f)
            .ok_or_else(|| Error::BranchInconsistent(format!("face {} is not in the simplex", label(f))))?;
        *r = -*r;
        Ok(out)
    }

    pub fn root(&self, f: &Face) -> C64 {
        self.roots.get(f).copied().unwrap_or_default()
    }

    pub fn roots(&self) -> &BTreeMap<Face, C64> {
        &self.roots
    }

    /// Faces whose root is not the principal one.
    pub fn negated_faces(&self) -> Vec<Face> {
        self.roots
            .iter()
            .filter(|(_, r)| {
                let p = (*r * *r).sqrt();
                (*r - p).norm() > (*r + p).norm()
            })
            .map(|(f, _)| *f)
            .collect()
    }

    /// The branch for which `f = Σ α_b d_b` has only `∂`-type components.
    ///
    /// Starting from the principal roots, the tetrahedra where `f` is `x`-type
    /// come in an even number; each consecutive pair shares a 2-face, and
    /// negating that root toggles the type on exactly those two.
    pub fn aligned(fam: &EdgeOperatorFamily, omega: &Cochain) -> Result<Self> {
        let mut choice = Self::principal(omega)?;
        let f = combine(fam, &alpha_coefficients(omega, &choice)?)?;
        let x_type: Vec<Tet> = tet_types(fam, &f)?
            .into_iter()
            .filter(|(_, ty)| *ty == ComponentType::Multiplication)
            .map(|(t, _)| t)
            .collect();
        if x_type.len() % 2 == 1 {
            return Err(Error::BranchInconsistent("odd number of x-type components".into()));
        }
        for pair in x_type.chunks(2) {
            let shared: Vec<u32> = pair[0].iter().copied().filter(|v| pair[1].contains(v)).collect();
            choice = choice.flipped(&[shared[0], shared[1], shared[2]])?;
        }
        let f = combine(fam, &alpha_coefficients(omega, &choice)?)?;
        if tet_types(fam, &f)?.iter().any(|(_, ty)| *ty != ComponentType::Derivation) {
            return Err(Error::BranchInconsistent("could not align every component with ∂".into()));
        }
        Ok(choice)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComponentType {
    /// `γ_t ≈ 0`
    Derivation,
    /// `β_t ≈ 0`
    Multiplication,
    Mixed,
}

pub fn component_type(d: &LinearOperator, i: usize, tol: f64) -> Result<ComponentType> {
    let (b, g) = d.component_at(i)?;
    Ok(if g.norm() <= tol * b.norm() && b.norm() > 0.0 {
        ComponentType::Derivation
    } else if b.norm() <= tol * g.norm() && g.norm() > 0.0 {
        ComponentType::Multiplication
    } else {
        ComponentType::Mixed
    })
}

fn tet_types(fam: &EdgeOperatorFamily, f: &LinearOperator) -> Result<Vec<(Tet, ComponentType)>> {
    fam.space()
        .labels()
        .iter()
        .enumerate()
        .map(|(i, t)| Ok((*t, component_type(f, i, TYPE_TOL)?)))
        .collect()
}

/// `α_b = ∏ √ω_s` over the three faces containing `b` and the one face
/// disjoint from it.
pub fn alpha_coefficients(omega: &Cochain, s: &SqrtChoice) -> Result<BTreeMap<Edge, C64>> {
    let (simplex, _) = face_values(omega)?;
    let mut out = BTreeMap::new();
    for e in edges_of(&simplex) {
        let mut a = C64::new(1.0, 0.0);
        for f in faces_of(&simplex) {
            let contains = f.contains(&e[0]) && f.contains(&e[1]);
            let disjoint = !f.contains(&e[0]) && !f.contains(&e[1]);
            if contains || disjoint {
                let r = s.root(&f);
                if r.norm() == 0.0 {
                    return Err(Error::Degenerate(format!("no square root on face {}", label(&f))));
                }
                a *= r;
            }
        }
        out.insert(e, a);
    }
    Ok(out)
}

fn combine(fam: &EdgeOperatorFamily, alphas: &BTreeMap<Edge, C64>) -> Result<LinearOperator> {
    let mut f = LinearOperator::zero(fam.space());
    for (e, d) in fam.operators() {
        f = f.add(&d.scale(alphas[e]))?;
    }
    Ok(f)
}

/// `α` with the signs on edges through `v` reversed.
fn flip_at(alphas: &BTreeMap<Edge, C64>, v: u32) -> BTreeMap<Edge, C64> {
    alphas.iter().map(|(e, a)| (*e, if e.contains(&v) { -a } else { *a })).collect()
}

#[derive(Debug, Clone)]
pub struct SuperisotropicOperator {
    pub operator: LinearOperator,
    pub alphas: BTreeMap<Edge, C64>,
    /// Faces whose square root is the non-principal one.
    pub negated_roots: Vec<Face>,
    /// Edges whose `α` sign was reversed relative to the base operator.
    pub flipped_edges: Vec<Edge>,
}

impl SuperisotropicOperator {
    /// `max_t |⟨f, f⟩_t| / ‖f‖²`.
    pub fn isotropy_defect(&self) -> Result<f64> {
        let n = self.operator.norm().powi(2);
        let mut worst: f64 = 0.0;
        for i in 0..self.operator.space().len() {
            worst = worst.max(self.operator.partial_scalar_product(&self.operator, i)?.norm());
        }
        Ok(worst / n)
    }
}

fn check_family_cocycle(fam: &EdgeOperatorFamily, omega: &Cochain) -> Result<()> {
    let own = extract_w_cocycle(fam)?;
    let dev = own.proportionality_residual(omega);
    if dev > 1e-8 {
        return Err(Error::CocycleMismatch(dev));
    }
    Ok(())
}

/// `f = Σ α_b d_b` for a normalized family whose W-cocycle is `ω` up to scale.
pub fn superisotropic_f(fam: &EdgeOperatorFamily, omega: &Cochain, s: &SqrtChoice) -> Result<SuperisotropicOperator> {
    check_family_cocycle(fam, omega)?;
    let alphas = alpha_coefficients(omega, s)?;
    Ok(SuperisotropicOperator {
        operator: combine(fam, &alphas)?,
        alphas,
        negated_roots: s.negated_faces(),
        flipped_edges: Vec::new(),
    })
}

/// `f^(t)`: the `α`s on edges through the vertex opposite `t` change sign.
/// With an aligned base branch the result is `∂`-type at `t` and `x`-type
/// everywhere else; any other outcome is reported as a branch inconsistency.
pub fn build_f_t(fam: &EdgeOperatorFamily, omega: &Cochain, s: &SqrtChoice, t: &Tet) -> Result<SuperisotropicOperator> {
    check_family_cocycle(fam, omega)?;
    let simplex = fam.simplex();
    let ti = fam.space().require(t)?;
    let v = opposite(&simplex, t);
    let alphas = flip_at(&alpha_coefficients(omega, s)?, v);
    let op = combine(fam, &alphas)?;
    for (i, u) in fam.space().labels().iter().enumerate() {
        let want = if i == ti { ComponentType::Derivation } else { ComponentType::Multiplication };
        if component_type(&op, i, TYPE_TOL)? != want {
            return Err(Error::BranchInconsistent(format!(
                "f^({}) has the wrong type at {}",
                label(t),
                label(u)
            )));
        }
    }
    Ok(SuperisotropicOperator {
        operator: op,
        alphas,
        negated_roots: s.negated_faces(),
        flipped_edges: edges_of(&simplex).into_iter().filter(|e| e.contains(&v)).collect(),
    })
}

/// Closed form of `κ = f^(t1)|_τ / f^(t2)|_τ` for `t1, t2, τ` the tetrahedra
/// omitting the second, first and fifth vertex: `κ = λ₊ / λ₋`.
pub fn kappa(omega: &Cochain, s: &SqrtChoice) -> Result<C64> {
    let (v, _) = face_values(omega)?;
    let o = |a: usize, b: usize, c: usize| omega.get(&[v[a - 1], v[b - 1], v[c - 1]]);
    let r = |a: usize, b: usize, c: usize| s.root(&[v[a - 1], v[b - 1], v[c - 1]]);
    let base = o(1, 2, 4) * r(1, 2, 5) * r(3, 4, 5) - o(1, 2, 3) * r(1, 2, 5) * r(3, 4, 5);
    let bracket = -r(1, 2, 3) * r(1, 3, 5) * r(2, 3, 4) * r(2, 4, 5) + r(1, 2, 4) * r(1, 3, 4) * r(1, 3, 5) * r(2, 4, 5)
        + r(1, 2, 4) * r(1, 4, 5) * r(2, 3, 4) * r(2, 3, 5)
        - r(1, 2, 3) * r(1, 3, 4) * r(1, 4, 5) * r(2, 3, 5);
    let (plus, minus) = (base + bracket, base - bracket);
    if minus.norm() <= 1e-12 * (base.norm() + bracket.norm()) {
        return Err(Error::KappaDegenerate {
            t1: omit(&v, v[1]),
            t2: omit(&v, v[0]),
            tau: omit(&v, v[4]),
        });
    }
    Ok(plus / minus)
}

/// Primitive of a cocycle on a 4-simplex: `ν` vanishes on edges at the first
/// vertex and `ν_jk = ω_{v0 jk}` otherwise.
fn primitive(simplex: &Simplex4, omega: &Cochain) -> BTreeMap<Edge, C64> {
    edges_of(simplex)
        .into_iter()
        .map(|e| {
            let v = if e[0] == simplex[0] { C64::default() } else { omega.get(&[simplex[0], e[0], e[1]]) };
            (e, v)
        })
        .collect()
}

/// `κ`-type ratio `f^(t1)|_τ / f^(t2)|_τ` from the rank condition: the
/// restrictions of both `α` vectors to the edges of `τ`, taken modulo the
/// span of the vertex coboundaries and `ν` on `τ`, must be proportional.
/// Returns the ratio and the relative residual of that proportionality.
pub fn kappa_rank(omega: &Cochain, s: &SqrtChoice, t1: &Tet, t2: &Tet, tau: &Tet) -> Result<(C64, f64)> {
    let (simplex, _) = face_values(omega)?;
    let nu = primitive(&simplex, omega);
    let base = alpha_coefficients(omega, s)?;
    let a1 = flip_at(&base, opposite(&simplex, t1));
    let a2 = flip_at(&base, opposite(&simplex, t2));
    let te = edges_of(tau);
    let mut d = CMatrix::zeros(5, te.len());
    for (r, &v) in tau.iter().enumerate() {
        for (c, e) in te.iter().enumerate() {
            d[(r, c)] = C64::new(
                if e[1] == v {
                    1.0
                } else if e[0] == v {
                    -1.0
                } else {
                    0.0
                },
                0.0,
            );
        }
    }
    for (c, e) in te.iter().enumerate() {
        d[(4, c)] = nu[e];
    }
    let y = linalg::nullspace(&d, DEFAULT_RANK_TOL);
    if y.ncols() != 2 {
        return Err(Error::NonGeneric {
            what: format!("κ rank system on {}", label(tau)),
            expected: 2,
            found: y.ncols(),
        });
    }
    let row = |a: &BTreeMap<Edge, C64>| CMatrix::from_fn(1, te.len(), |_, c| a[&te[c]]);
    let p1: Vec<C64> = (row(&a1) * &y).iter().copied().collect();
    let p2: Vec<C64> = (row(&a2) * &y).iter().copied().collect();
    let scale2: f64 = te.iter().map(|e| a2[e].norm_sqr()).sum::<f64>().sqrt();
    let n2: f64 = p2.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if n2 <= 1e-10 * scale2 {
        return Err(Error::KappaDegenerate {
            t1: *t1,
            t2: *t2,
            tau: *tau,
        });
    }
    Ok(linalg::proportionality(&p1, &p2))
}

/// Gauge-fixed `F` from `ω` using principal square roots.
pub fn reconstruct_f(omega: &Cochain) -> Result<WeightMatrix> {
    reconstruct_f_with(omega, &SqrtChoice::principal(omega)?)
}

/// Gauge-fixed `F` from `ω` and a branch choice. Each canonical double ratio
/// `F[r1,c1] F[r2,c2] / (F[r1,c2] F[r2,c1])` equals `K(c1) / K(c2)` with
/// `K(c)` the κ-type ratio of `f^(r1)` to `f^(r2)` at tetrahedron `c`.
pub fn reconstruct_f_with(omega: &Cochain, s: &SqrtChoice) -> Result<WeightMatrix> {
    let (simplex, _) = face_values(omega)?;
    let cx = SimplexComplex::simplex(simplex)?;
    let defect = cocycle_residual(omega, &cx);
    if defect > 1e-9 {
        return Err(Error::InvalidCochain(format!("not a cocycle (residual {defect:e})")));
    }
    // the closed form detects the degenerate λ₋ = 0 locus up front
    kappa(omega, s)?;
    let tets: Vec<Tet> = simplex.iter().map(|&v| omit(&simplex, v)).collect();
    let mut ratios = [C64::default(); 5];
    for (k, &((r1, r2), (c1, c2))) in CANONICAL_RATIOS.iter().enumerate() {
        let (t1, t2) = (tets[r1 - 1], tets[r2 - 1]);
        let (k1, e1) = kappa_rank(omega, s, &t1, &t2, &tets[c1 - 1])?;
        let (k2, e2) = kappa_rank(omega, s, &t1, &t2, &tets[c2 - 1])?;
        let worst = e1.max(e2);
        if worst > KAPPA_RESIDUAL_TOL {
            return Err(Error::Numeric(format!("κ rank condition residual {worst:e} for ratio {}", k + 1)));
        }
        if k2.norm() == 0.0 {
            return Err(Error::KappaDegenerate {
                t1,
                t2: t1,
                tau: tets[c2 - 1],
            });
        }
        ratios[k] = k1 / k2;
    }
    crate::weights::from_canonical_ratios(simplex, &ratios)
}

/// Faces negated relative to principal roots, as a set.
pub fn negated_set(s: &SqrtChoice) -> BTreeSet<Face> {
    s.negated_faces().into_iter().collect()
}
