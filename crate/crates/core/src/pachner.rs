//! The 3–3 move on the boundary of the 5-simplex on vertices 1..6.
//!
//! Each of the six 4-simplices gets a weight reconstructed from the
//! restriction of one cocycle `Ω`. Those weights are defined only up to
//! per-simplex factors and per-tetrahedron rescalings of the Grassmann
//! variables; [`reconcile`] fixes them so that shared tetrahedra agree, and
//! [`verify_33`] compares the two integrated sides.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::cocycle2weight::reconstruct_f;
use crate::edgeops::{extract_w_cocycle, normalize_family, EdgeOperatorFamily};
use crate::error::{Error, Result};
use crate::grassmann::{GeneratorSpace, GrassmannElement};
use crate::linalg;
use crate::operators::{annihilator_of, LinearOperator, OperatorSubspace};
use crate::simplicial::{edges_of, label, subsets, tets_of, Cochain, Edge, Simplex4, Tet};
use crate::weights::{gaussian_weight, WeightMatrix};
use crate::C64;

/// Residual thresholds for one run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Gauge consistency: loop closure, orthogonality of tetrahedron maps,
    /// agreement of inner components.
    pub consistency: f64,
    /// Final comparison of the two sides.
    pub end_to_end: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            consistency: 1e-9,
            end_to_end: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Lhs,
    Rhs,
}

/// Simplices and tetrahedra of the move.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PachnerScene {
    pub lhs: [Simplex4; 3],
    pub rhs: [Simplex4; 3],
    pub inner_lhs: [Tet; 3],
    pub inner_rhs: [Tet; 3],
    /// Boundary tetrahedra in lexicographic order.
    pub boundary: Vec<Tet>,
}

impl Default for PachnerScene {
    fn default() -> Self {
        Self::standard()
    }
}

impl PachnerScene {
    pub fn standard() -> Self {
        let inner_lhs = [[1, 2, 3, 4], [1, 2, 3, 5], [1, 2, 3, 6]];
        let inner_rhs = [[1, 4, 5, 6], [2, 4, 5, 6], [3, 4, 5, 6]];
        let boundary = tets_of(&[1, 2, 3, 4, 5, 6])
            .into_iter()
            .filter(|t| !inner_lhs.contains(t) && !inner_rhs.contains(t))
            .collect();
        PachnerScene {
            lhs: [[1, 2, 3, 4, 5], [1, 2, 3, 4, 6], [1, 2, 3, 5, 6]],
            rhs: [[1, 2, 4, 5, 6], [1, 3, 4, 5, 6], [2, 3, 4, 5, 6]],
            inner_lhs,
            inner_rhs,
            boundary,
        }
    }

    /// Left-hand simplices first, then right-hand.
    pub fn simplices(&self) -> Vec<Simplex4> {
        self.lhs.iter().chain(&self.rhs).copied().collect()
    }

    pub fn side_simplices(&self, side: Side) -> [Simplex4; 3] {
        match side {
            Side::Lhs => self.lhs,
            Side::Rhs => self.rhs,
        }
    }

    pub fn inner(&self, side: Side) -> [Tet; 3] {
        match side {
            Side::Lhs => self.inner_lhs,
            Side::Rhs => self.inner_rhs,
        }
    }

    pub fn tetrahedra(&self) -> Vec<Tet> {
        tets_of(&[1, 2, 3, 4, 5, 6])
    }

    pub fn is_inner(&self, t: &Tet) -> bool {
        self.inner_lhs.contains(t) || self.inner_rhs.contains(t)
    }

    /// The two simplices containing `t`, in [`Self::simplices`] order.
    pub fn owners(&self, t: &Tet) -> (Simplex4, Simplex4) {
        let o: Vec<Simplex4> = self.simplices().into_iter().filter(|u| t.iter().all(|v| u.contains(v))).collect();
        assert_eq!(o.len(), 2, "every tetrahedron of the 5-simplex boundary has two owners");
        (o[0], o[1])
    }

    pub fn boundary_space(&self) -> Arc<GeneratorSpace> {
        GeneratorSpace::new(self.boundary.iter().copied()).expect("distinct sorted labels")
    }

    /// Boundary plus the side's inner generators.
    pub fn side_space(&self, side: Side) -> Arc<GeneratorSpace> {
        GeneratorSpace::new(self.boundary.iter().copied().chain(self.inner(side))).expect("distinct sorted labels")
    }
}

/// Values of `Ω` on the ten 2-faces of `u`.
pub fn restrict_cocycle(omega: &Cochain, u: &Simplex4) -> Result<Cochain> {
    let r = omega.restrict(u);
    crate::simplicial::simplex_of_cochain(&r)?;
    Ok(r)
}

/// How the variable of one tetrahedron is adjusted in the weight of its
/// second owner.
#[derive(Debug, Clone, PartialEq)]
pub struct TetGauge {
    /// The simplex whose weight and operators are adjusted.
    pub simplex: Simplex4,
    /// `x_t ↦ q x_t` in that weight.
    pub scale: C64,
    pub interchange: bool,
    /// `−1` for inner tetrahedra (the `x_t` coefficients of the two owners
    /// have opposite signs), `+1` for boundary ones.
    pub sign: i32,
    /// Relative residual of the least-squares component map.
    pub fit_residual: f64,
    /// Deviation of that map from an ideal `diag(1/q, q)` or anti-diagonal.
    pub orthogonality_defect: f64,
}

#[derive(Debug, Clone)]
pub struct ReconciledWeights {
    pub scene: PachnerScene,
    pub matrices: BTreeMap<Simplex4, WeightMatrix>,
    pub families: BTreeMap<Simplex4, EdgeOperatorFamily>,
    /// Per-simplex factor `c_u` multiplying its edge operators.
    pub scales: BTreeMap<Simplex4, C64>,
    pub gauges: BTreeMap<Tet, TetGauge>,
    /// Tetrahedra used to propagate the simplex factors, in order.
    pub tree: Vec<Tet>,
    /// Closure residuals at the remaining shared tetrahedra.
    pub loop_residuals: Vec<(Tet, f64)>,
    /// Worst proportionality residual of partial products across owners.
    pub partial_product_residual: f64,
    pub tolerances: Tolerances,
}

fn components(fam: &EdgeOperatorFamily, t: &Tet) -> Result<Vec<(Edge, [C64; 2])>> {
    let i = fam.space().require(t)?;
    edges_of(t)
        .into_iter()
        .map(|e| {
            let (b, g) = fam.operator(&e)?.component_at(i)?;
            Ok((e, [b, g]))
        })
        .collect()
}

fn partial_products(c: &[(Edge, [C64; 2])]) -> Vec<C64> {
    let mut out = Vec::with_capacity(c.len() * c.len());
    for (_, a) in c {
        for (_, b) in c {
            out.push(a[0] * b[1] + a[1] * b[0]);
        }
    }
    out
}

/// Least-squares 2×2 `G` with `G w_a ≈ z_a` for all rows, and the relative
/// residual.
fn fit_map(w: &[[C64; 2]], z: &[[C64; 2]]) -> ([[C64; 2]; 2], f64) {
    let a = linalg::CMatrix::from_fn(w.len(), 2, |r, c| w[r][c]);
    let b = linalg::CMatrix::from_fn(z.len(), 2, |r, c| z[r][c]);
    let svd = a.clone().svd(true, true);
    let x = svd.solve(&b, 1e-14).expect("SVD with both factors");
    let resid = (&a * &x - &b).norm() / b.norm().max(f64::MIN_POSITIVE);
    // a x = b with rows w_aᵀ, so G = xᵀ
    ([[x[(0, 0)], x[(1, 0)]], [x[(0, 1)], x[(1, 1)]]], resid)
}

/// Weights for the six simplices from `Ω`, with default tolerances.
pub fn reconcile(omega: &Cochain) -> Result<ReconciledWeights> {
    reconcile_with(omega, Tolerances::default())
}

pub fn reconcile_with(omega: &Cochain, tol: Tolerances) -> Result<ReconciledWeights> {
    let scene = PachnerScene::standard();
    let mut matrices = BTreeMap::new();
    let mut families = BTreeMap::new();
    for u in scene.simplices() {
        let w = restrict_cocycle(omega, &u)?;
        let f = reconstruct_f(&w)?;
        let fam = normalize_family(&f)?;
        let dev = extract_w_cocycle(&fam)?.proportionality_residual(&w);
        if dev > tol.consistency {
            return Err(Error::CocycleMismatch(dev));
        }
        matrices.insert(u, f);
        families.insert(u, fam);
    }

    let tets = scene.tetrahedra();
    let sign = |t: &Tet| if scene.is_inner(t) { -1.0 } else { 1.0 };
    // μ_t with P(u1) ≈ μ_t P(u2)
    let mut mu = BTreeMap::new();
    let mut pp_res: f64 = 0.0;
    for t in &tets {
        let (u1, u2) = scene.owners(t);
        let p1 = partial_products(&components(&families[&u1], t)?);
        let p2 = partial_products(&components(&families[&u2], t)?);
        let (m, r) = linalg::proportionality(&p1, &p2);
        if m.norm() == 0.0 || !m.is_finite() {
            return Err(Error::Degenerate(format!("partial products vanish at {}", label(t))));
        }
        pp_res = pp_res.max(r);
        mu.insert(*t, m);
    }

    // c_{u2}² = c_{u1}² μ_t / σ_t along a tree grown from the first simplex,
    // always through the smallest tetrahedron on the frontier
    let simplices = scene.simplices();
    let mut c2: BTreeMap<Simplex4, C64> = BTreeMap::from([(simplices[0], C64::new(1.0, 0.0))]);
    let mut tree = Vec::new();
    while c2.len() < simplices.len() {
        let t = *tets
            .iter()
            .find(|t| {
                let (a, b) = scene.owners(t);
                c2.contains_key(&a) != c2.contains_key(&b)
            })
            .expect("the adjacency graph is connected");
        let (u1, u2) = scene.owners(&t);
        if let Some(&a) = c2.get(&u1) {
            c2.insert(u2, a * mu[&t] / sign(&t));
        } else {
            c2.insert(u1, c2[&u2] * sign(&t) / mu[&t]);
        }
        tree.push(t);
    }
    let mut loop_residuals = Vec::new();
    for t in tets.iter().filter(|t| !tree.contains(t)) {
        let (u1, u2) = scene.owners(t);
        let r = (c2[&u2] - c2[&u1] * mu[t] / sign(t)).norm() / c2[&u2].norm();
        if r > tol.consistency {
            return Err(Error::Consistency {
                tet: *t,
                simplices: (u1, u2),
                residual: r,
            });
        }
        loop_residuals.push((*t, r));
    }
    let scales: BTreeMap<Simplex4, C64> = c2.iter().map(|(u, z)| (*u, z.sqrt())).collect();

    let mut gauges = BTreeMap::new();
    for t in &tets {
        let (u1, u2) = scene.owners(t);
        let c1 = components(&families[&u1], t)?;
        let cc2 = components(&families[&u2], t)?;
        let s = sign(t);
        let w: Vec<[C64; 2]> = cc2.iter().map(|(_, v)| [v[0] * scales[&u2], v[1] * scales[&u2]]).collect();
        let z: Vec<[C64; 2]> = c1.iter().map(|(_, v)| [v[0] * scales[&u1], v[1] * scales[&u1] * s]).collect();
        let (g, fit) = fit_map(&w, &z);
        let diag = g[0][0].norm() + g[1][1].norm();
        let anti = g[0][1].norm() + g[1][0].norm();
        let (q, interchange, defect) = if anti <= 1e-6 * diag {
            let q = g[1][1];
            (q, false, (anti / diag).max((g[0][0] * q - 1.0).norm()))
        } else if diag <= 1e-6 * anti {
            let q = g[1][0];
            (q, true, (diag / anti).max((g[0][1] * q - 1.0).norm()))
        } else {
            (g[1][1], false, 1.0)
        };
        if fit > tol.consistency || defect > tol.consistency {
            return Err(Error::Consistency {
                tet: *t,
                simplices: (u1, u2),
                residual: fit.max(defect),
            });
        }
        gauges.insert(
            *t,
            TetGauge {
                simplex: u2,
                scale: q,
                interchange,
                sign: s as i32,
                fit_residual: fit,
                orthogonality_defect: defect,
            },
        );
    }
    for u in &simplices {
        let n = gauges.values().filter(|g| g.simplex == *u && g.interchange).count();
        if n % 2 == 1 {
            return Err(Error::OddInterchange(*u));
        }
    }

    Ok(ReconciledWeights {
        scene,
        matrices,
        families,
        scales,
        gauges,
        tree,
        loop_residuals,
        partial_product_residual: pp_res,
        tolerances: tol,
    })
}

impl ReconciledWeights {
    pub fn max_loop_residual(&self) -> f64 {
        self.loop_residuals.iter().map(|(_, r)| *r).fold(0.0, f64::max)
    }

    /// Weight of `u` after its tetrahedron adjustments, over its own five
    /// generators.
    pub fn adjusted_weight(&self, u: &Simplex4) -> Result<GrassmannElement> {
        let f = &self.matrices[u];
        let space = f.space();
        let mut w = gaussian_weight(f)?;
        for (t, g) in self.gauges.iter().filter(|(_, g)| g.simplex == *u) {
            let i = space.require(t)?;
            if g.interchange {
                w = w.interchange(i)?;
            }
            w = w.rescale_generator(i, g.scale)?;
        }
        Ok(w)
    }

    /// `c_u d_b^(u)` with the tetrahedron adjustments applied to its
    /// components.
    pub fn adjusted_operator(&self, u: &Simplex4, e: &Edge) -> Result<LinearOperator> {
        let fam = &self.families[u];
        let mut d = fam.operator(e)?.scale(self.scales[u]);
        for (t, g) in self.gauges.iter().filter(|(_, g)| g.simplex == *u) {
            let i = fam.space().require(t)?;
            let (b, c) = d.component_at(i)?;
            let q = g.scale;
            if g.interchange {
                d.set_component(i, c / q, b * q)?;
            } else {
                d.set_component(i, b / q, c * q)?;
            }
        }
        Ok(d)
    }
}

/// Product of the side's three adjusted weights, integrated over its inner
/// variables (first inner tetrahedron innermost), on the nine boundary
/// generators.
pub fn side_weight(rw: &ReconciledWeights, side: Side) -> Result<GrassmannElement> {
    let scene = &rw.scene;
    let space = scene.side_space(side);
    let mut prod = GrassmannElement::one(&space);
    for u in scene.side_simplices(side) {
        prod = prod.multiply(&rw.adjusted_weight(&u)?.transfer(&space)?)?;
    }
    let inner: Vec<usize> = scene.inner(side).iter().map(|t| space.require(t)).collect::<Result<_>>()?;
    prod.berezin_integral(&inner)?.project(&scene.boundary_space())
}

/// The operator on the boundary generators assembled from the side's
/// simplices containing `edge`. Components on inner tetrahedra of the two
/// owners must carry equal `β` and opposite `γ`; they are checked and
/// dropped.
pub fn compose_edge_operator(rw: &ReconciledWeights, side: Side, edge: Edge) -> Result<LinearOperator> {
    let scene = &rw.scene;
    let bspace = scene.boundary_space();
    let mut out = LinearOperator::zero(&bspace);
    let mut inner_parts: BTreeMap<Tet, Vec<(C64, C64)>> = BTreeMap::new();
    let owners: Vec<Simplex4> = scene
        .side_simplices(side)
        .into_iter()
        .filter(|u| u.contains(&edge[0]) && u.contains(&edge[1]))
        .collect();
    if owners.is_empty() || edge[0] >= edge[1] {
        return Err(Error::EdgeNotInSimplex {
            edge,
            simplex: vec![1, 2, 3, 4, 5, 6],
        });
    }
    let mut big: f64 = 0.0;
    for u in &owners {
        let d = rw.adjusted_operator(u, &edge)?;
        big = big.max(d.max_abs());
        let sp = rw.families[u].space().clone();
        for t in sp.labels().iter().filter(|t| t.contains(&edge[0]) && t.contains(&edge[1])) {
            let comp = d.component_at(sp.require(t)?)?;
            if scene.is_inner(t) {
                inner_parts.entry(*t).or_default().push(comp);
            } else {
                out.set_component(bspace.require(t)?, comp.0, comp.1)?;
            }
        }
    }
    for (t, parts) in &inner_parts {
        if parts.len() != 2 {
            return Err(Error::Consistency {
                tet: *t,
                simplices: (owners[0], owners[0]),
                residual: f64::INFINITY,
            });
        }
        let dev = (parts[0].0 - parts[1].0).norm().max((parts[0].1 + parts[1].1).norm()) / big;
        if dev > rw.tolerances.consistency {
            let (a, b) = scene.owners(t);
            return Err(Error::Consistency {
                tet: *t,
                simplices: (a, b),
                residual: dev,
            });
        }
    }
    Ok(out)
}

/// `(max_residual, const)` with `lhs ≈ const · rhs`.
pub fn verify_33(rw: &ReconciledWeights) -> Result<(f64, C64)> {
    let l = side_weight(rw, Side::Lhs)?;
    let r = side_weight(rw, Side::Rhs)?;
    compare_sides(&l, &r)
}

/// `const` at the largest right-hand coefficient and the worst relative
/// deviation of `l − const · r`.
pub fn compare_sides(l: &GrassmannElement, r: &GrassmannElement) -> Result<(f64, C64)> {
    let (k0, r0) = r
        .terms()
        .fold((0u32, C64::default()), |acc, (m, c)| if c.norm() > acc.1.norm() { (m, c) } else { acc });
    if r0.norm() == 0.0 {
        return Err(Error::Degenerate("the right-hand side vanishes".into()));
    }
    let konst = l.coeff(k0) / r0;
    let dev = l.sub(&r.scale(konst))?.max_abs();
    let lmax = l.max_abs();
    if lmax == 0.0 {
        return Err(Error::Degenerate("the left-hand side vanishes".into()));
    }
    Ok((dev / lmax, konst))
}

/// Everything a verification run reports.
#[derive(Debug, Clone)]
pub struct PachnerReport {
    pub konst: C64,
    pub max_residual: f64,
    /// Sine of the largest principal angle between the two annihilators.
    pub annihilator_angle: f64,
    pub annihilator_dims: (usize, usize),
    pub loop_residuals: Vec<(Tet, f64)>,
    pub gauges: BTreeMap<Tet, TetGauge>,
    pub scales: BTreeMap<Simplex4, C64>,
    /// Largest relative difference of composed operators across sides.
    pub composition_mismatch: f64,
    /// Dimension of the span of composed operators, per side.
    pub composition_dims: (usize, usize),
    /// Largest `|d(W)| / (|d| |W|)` over composed operators and their side.
    pub composition_annihilation: f64,
    pub partial_product_residual: f64,
}

impl PachnerReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.max_residual <= tol
            && self.annihilator_angle <= tol
            && self.composition_mismatch <= tol
            && self.konst.norm() > 1e-10
            && self.loop_residuals.iter().all(|(_, r)| *r <= tol)
            && self.annihilator_dims == (9, 9)
            && self.composition_dims == (9, 9)
    }
}

/// Runs the whole verification on a reconciled scene.
pub fn report(rw: &ReconciledWeights) -> Result<PachnerReport> {
    let scene = &rw.scene;
    let l = side_weight(rw, Side::Lhs)?;
    let r = side_weight(rw, Side::Rhs)?;
    let (max_residual, konst) = compare_sides(&l, &r)?;
    let all: Vec<usize> = (0..9).collect();
    let al = annihilator_of(&l, &all)?;
    let ar = annihilator_of(&r, &all)?;
    let annihilator_angle = al.max_principal_sine(&ar)?;

    let edges: Vec<Edge> = subsets(&[1, 2, 3, 4, 5, 6], 2).into_iter().map(|v| [v[0], v[1]]).collect();
    let mut mismatch: f64 = 0.0;
    let mut annihilation: f64 = 0.0;
    let (mut ops_l, mut ops_r) = (Vec::new(), Vec::new());
    for e in &edges {
        let dl = compose_edge_operator(rw, Side::Lhs, *e)?;
        let dr = compose_edge_operator(rw, Side::Rhs, *e)?;
        let diff = dl.add(&dr.scale(C64::new(-1.0, 0.0)))?.max_abs() / dl.max_abs().max(dr.max_abs());
        mismatch = mismatch.max(diff);
        for (d, w) in [(&dl, &l), (&dr, &r)] {
            annihilation = annihilation.max(d.apply(w)?.max_abs() / (d.max_abs() * w.max_abs()));
        }
        ops_l.push(dl);
        ops_r.push(dr);
    }
    let bspace = scene.boundary_space();
    let dims = (
        OperatorSubspace::span(&bspace, &ops_l)?.dim(),
        OperatorSubspace::span(&bspace, &ops_r)?.dim(),
    );
    Ok(PachnerReport {
        konst,
        max_residual,
        annihilator_angle,
        annihilator_dims: (al.dim(), ar.dim()),
        loop_residuals: rw.loop_residuals.clone(),
        gauges: rw.gauges.clone(),
        scales: rw.scales.clone(),
        composition_mismatch: mismatch,
        composition_dims: dims,
        composition_annihilation: annihilation,
        partial_product_residual: rw.partial_product_residual,
    })
}

/// Boundary tetrahedra arranged as rows (left simplices) × columns (right
/// simplices): entry `(i, j)` is the common tetrahedron of `lhs[i]` and
/// `rhs[j]`.
pub fn boundary_table(scene: &PachnerScene) -> [[Tet; 3]; 3] {
    let mut out = [[[0; 4]; 3]; 3];
    for (i, a) in scene.lhs.iter().enumerate() {
        for (j, b) in scene.rhs.iter().enumerate() {
            let common: Vec<u32> = a.iter().copied().filter(|v| b.contains(v)).collect();
            out[i][j] = [common[0], common[1], common[2], common[3]];
        }
    }
    out
}

/// Tetrahedra whose two owners lie on the same side.
pub fn inner_set(scene: &PachnerScene) -> BTreeSet<Tet> {
    scene.inner_lhs.iter().chain(&scene.inner_rhs).copied().collect()
}
