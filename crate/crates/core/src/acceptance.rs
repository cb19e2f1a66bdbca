//! The acceptance suite: ten criteria, each a batch of randomized checks
//! with a residual threshold. Shared by the `selftest` command and the
//! `acceptance` integration test.
//!
//! Every criterion draws from its own ChaCha8 stream (`seed`, stream =
//! criterion number), so criteria are independent of each other's draw
//! counts.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cocycle2weight::{build_f_t, kappa, kappa_rank, reconstruct_f, reconstruct_f_with, superisotropic_f, SqrtChoice};
use crate::edgeops::{extract_w_cocycle, normalize_family, raw_edge_operator};
use crate::elliptic::{elliptic_cocycle, elliptic_f, elliptic_kappa, elliptic_primitive, jacobi_sn_cn_dn, EllipticParams};
use crate::error::{Error, Result};
use crate::grassmann::{GeneratorSpace, GrassmannElement};
use crate::linalg::{self, CMatrix};
use crate::operators::{annihilator_of, isotropic_span_from_f, LinearOperator};
use crate::pachner::{reconcile, report};
use crate::sampling::{disc_point, random_cocycle, random_elliptic_params, random_gauge, random_weight_matrix};
use crate::simplicial::{
    coboundary, cocycle_residual, edges_of, faces_of, opposite, tets_of, Cochain, Edge, Face, Simplex4, SimplexComplex,
};
use crate::weights::{apply_gauge_to_f, gaussian_weight, WeightMatrix};
use crate::C64;

const S: Simplex4 = [1, 2, 3, 4, 5];
const SIX: [u32; 6] = [1, 2, 3, 4, 5, 6];

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AcceptanceConfig {
    pub seed: u64,
    /// Replaces every residual threshold when set. Rank and nonvanishing
    /// lower bounds are unaffected.
    pub tolerance: Option<f64>,
}

impl AcceptanceConfig {
    fn tol(&self, default: f64) -> f64 {
        self.tolerance.unwrap_or(default)
    }

    fn rng(&self, criterion: u64) -> ChaCha8Rng {
        let mut r = ChaCha8Rng::seed_from_u64(self.seed);
        r.set_stream(criterion);
        r
    }
}

#[derive(Debug, Clone)]
pub struct CriterionResult {
    pub id: u32,
    pub title: &'static str,
    pub passed: bool,
    pub checks: usize,
    /// Largest residual-to-threshold ratio seen.
    pub worst_ratio: f64,
    /// First failures, if any.
    pub failures: Vec<String>,
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "criterion {:>2} {} {:<28} checks {:>6}  worst residual/threshold {:.3e}",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.title,
            self.checks,
            self.worst_ratio
        )?;
        for msg in &self.failures {
            write!(f, "\n    {msg}")?;
        }
        Ok(())
    }
}

struct Tally {
    checks: usize,
    worst: f64,
    failed: usize,
    failures: Vec<String>,
}

impl Tally {
    fn new() -> Self {
        Tally {
            checks: 0,
            worst: 0.0,
            failed: 0,
            failures: Vec::new(),
        }
    }

    fn fail(&mut self, msg: String) {
        self.failed += 1;
        if self.failures.len() < 5 {
            self.failures.push(msg);
        }
    }

    /// `residual ≤ threshold`; NaN counts as failure.
    fn le(&mut self, what: &str, residual: f64, threshold: f64) {
        self.checks += 1;
        let ratio = residual / threshold;
        if ratio.is_nan() || ratio > self.worst {
            self.worst = if ratio.is_nan() { f64::INFINITY } else { ratio };
        }
        if !(residual <= threshold) {
            self.fail(format!("{what}: {residual:.3e} > {threshold:.1e}"));
        }
    }

    fn ensure(&mut self, what: &str, ok: bool) {
        self.checks += 1;
        if !ok {
            self.fail(what.to_string());
        }
    }

    /// `value ≥ bound`; the ratio recorded is `bound / value`.
    fn ge(&mut self, what: &str, value: f64, bound: f64) {
        self.checks += 1;
        let ratio = bound / value;
        if ratio.is_nan() || ratio > self.worst {
            self.worst = if ratio.is_nan() { f64::INFINITY } else { ratio };
        }
        if !(value >= bound) {
            self.fail(format!("{what}: {value:.3e} < {bound:.1e}"));
        }
    }

    fn ok<T>(&mut self, what: &str, r: Result<T>) -> Option<T> {
        self.checks += 1;
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.fail(format!("{what}: {e}"));
                None
            }
        }
    }

    fn finish(self, id: u32, title: &'static str) -> CriterionResult {
        CriterionResult {
            id,
            title,
            passed: self.failed == 0,
            checks: self.checks,
            worst_ratio: self.worst,
            failures: self.failures,
        }
    }
}

fn rel(a: &GrassmannElement, b: &GrassmannElement) -> f64 {
    let scale = a.max_abs().max(b.max_abs());
    let d = a.max_abs_diff(b).expect("same space");
    if scale > 0.0 {
        d / scale
    } else {
        d
    }
}

fn rand_c<R: Rng>(r: &mut R) -> C64 {
    C64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0))
}

/// Random element with at most `terms` monomials; `parity` restricts to
/// even (0) or odd (1) monomials.
fn random_element<R: Rng>(r: &mut R, s: &Arc<GeneratorSpace>, parity: Option<u32>, terms: usize) -> GrassmannElement {
    let n = s.len() as u32;
    let mut t = Vec::new();
    for _ in 0..terms {
        let m = r.random_range(0..1u32 << n);
        let c = rand_c(r);
        if parity.is_none_or(|p| m.count_ones() % 2 == p) {
            t.push((m, c));
        }
    }
    GrassmannElement::from_terms(s, t)
}

fn random_space<R: Rng>(r: &mut R) -> Arc<GeneratorSpace> {
    let n = r.random_range(1..=6);
    GeneratorSpace::new(tets_of(&[1, 2, 3, 4, 5, 6, 7]).into_iter().take(n)).expect("distinct labels")
}

fn parity_sign(p: u32) -> f64 {
    if p % 2 == 1 {
        -1.0
    } else {
        1.0
    }
}

pub fn grassmann_core(cfg: &AcceptanceConfig) -> CriterionResult {
    let mut r = cfg.rng(1);
    let tol = cfg.tol(1e-12);
    let mut t = Tally::new();
    for _ in 0..1000 {
        let s = random_space(&mut r);
        let n = s.len();
        let (pa, pb) = (r.random_range(0..2), r.random_range(0..2));
        let a = random_element(&mut r, &s, Some(pa), 8);
        let b = random_element(&mut r, &s, Some(pb), 8);
        let ab = a.multiply(&b).unwrap();
        let ba = b.multiply(&a).unwrap().scale(C64::new(parity_sign(pa * pb), 0.0));
        t.le("anticommutativity", rel(&ab, &ba), tol);

        let i = r.random_range(0..n);
        let lhs = ab.left_derivative(i).unwrap();
        let rhs = a
            .left_derivative(i)
            .unwrap()
            .multiply(&b)
            .unwrap()
            .add(&a.multiply(&b.left_derivative(i).unwrap()).unwrap().scale(C64::new(parity_sign(pa), 0.0)))
            .unwrap();
        t.le("left Leibniz", rel(&lhs, &rhs), tol);
        let lhs = ab.right_derivative(i).unwrap();
        let rhs = a
            .multiply(&b.right_derivative(i).unwrap())
            .unwrap()
            .add(&a.right_derivative(i).unwrap().multiply(&b).unwrap().scale(C64::new(parity_sign(pb), 0.0)))
            .unwrap();
        t.le("right Leibniz", rel(&lhs, &rhs), tol);

        // Berezin over all generators in descending order peels the last
        // factor each time: the result is the top coefficient
        let f = random_element(&mut r, &s, None, 12);
        let desc: Vec<usize> = (0..n).rev().collect();
        let top = f.berezin_integral(&desc).unwrap();
        let expect = GrassmannElement::scalar(&s, f.coeff(s.top_mask()));
        t.le("Berezin top coefficient", rel(&top, &expect), tol);
        let mut order: Vec<usize> = (0..n).collect();
        for k in (1..n).rev() {
            order.swap(k, r.random_range(0..=k));
        }
        let take = r.random_range(1..=n);
        let mut iter = f.clone();
        for &v in &order[..take] {
            iter = iter.right_derivative(v).unwrap();
        }
        t.le("Berezin iterated", rel(&f.berezin_integral(&order[..take]).unwrap(), &iter), tol);

        let q = random_element(&mut r, &s, Some(0), 8);
        let q = q.sub(&GrassmannElement::scalar(&s, q.coeff(0))).unwrap();
        let e = q.exp_even().unwrap().multiply(&q.scale(C64::new(-1.0, 0.0)).exp_even().unwrap()).unwrap();
        t.le("exp(q) exp(-q)", rel(&e, &GrassmannElement::one(&s)), tol);
    }
    t.finish(1, "Grassmann core")
}

pub fn gaussian_nullspace(cfg: &AcceptanceConfig) -> CriterionResult {
    let mut r = cfg.rng(2);
    let mut t = Tally::new();
    for _ in 0..100 {
        let f = random_weight_matrix(&mut r, S);
        let Some(w) = t.ok("weight", gaussian_weight(&f)) else { continue };
        let sp = f.space();
        for row in f.rows_as_operators(&sp).unwrap() {
            let res = row.apply(&w).unwrap().max_abs() / (w.max_abs() * row.max_abs());
            t.le("row of p + Fx annihilates", res, cfg.tol(1e-12));
        }
        let Some(ann) = t.ok("annihilator", annihilator_of(&w, &[0, 1, 2, 3, 4])) else { continue };
        t.ensure("annihilator is 5-dimensional", ann.dim() == 5);
        let span = isotropic_span_from_f(&f).unwrap();
        if let Some(a) = t.ok("principal angles", ann.max_principal_sine(&span)) {
            t.le("annihilator equals the span of p + Fx", a, cfg.tol(1e-8));
        }
    }
    t.finish(2, "Gaussian nullspace")
}

/// The edge-12 operator written out in terms of `φ`.
pub fn explicit_edge12(f: &WeightMatrix) -> LinearOperator {
    let p = |a: u32, b: u32, c: u32| f.phi(&[a, b, c]);
    let sp = f.space();
    let mut d = LinearOperator::zero(&sp);
    let at = |t: [u32; 4]| sp.require(&t).expect("tetrahedron of 12345");
    let comps = [
        (
            [1, 2, 4, 5],
            p(1, 3, 4) * p(2, 3, 5) - p(1, 3, 5) * p(2, 3, 4),
            -(p(1, 2, 4) * p(1, 3, 5) * p(2, 4, 5) - p(1, 2, 5) * p(1, 3, 4) * p(2, 4, 5) - p(1, 2, 4) * p(1, 4, 5) * p(2, 3, 5)
                + p(1, 2, 5) * p(1, 4, 5) * p(2, 3, 4)),
        ),
        (
            [1, 2, 3, 5],
            p(1, 3, 4) * p(2, 4, 5) - p(1, 4, 5) * p(2, 3, 4),
            p(1, 2, 3) * p(1, 3, 5) * p(2, 4, 5) - p(1, 2, 3) * p(1, 4, 5) * p(2, 3, 5) - p(1, 2, 5) * p(1, 3, 4) * p(2, 3, 5)
                + p(1, 2, 5) * p(1, 3, 5) * p(2, 3, 4),
        ),
        (
            [1, 2, 3, 4],
            p(1, 3, 5) * p(2, 4, 5) - p(1, 4, 5) * p(2, 3, 5),
            -(p(1, 2, 3) * p(1, 3, 4) * p(2, 4, 5) - p(1, 2, 4) * p(1, 3, 4) * p(2, 3, 5) - p(1, 2, 3) * p(1, 4, 5) * p(2, 3, 4)
                + p(1, 2, 4) * p(1, 3, 5) * p(2, 3, 4)),
        ),
    ];
    for (tet, b, g) in comps {
        d.set_component(at(tet), b, g).expect("index within space");
    }
    d
}

pub fn edge_operators(cfg: &AcceptanceConfig) -> CriterionResult {
    let mut r = cfg.rng(3);
    let mut t = Tally::new();
    for _ in 0..100 {
        let f = random_weight_matrix(&mut r, S);
        for e in edges_of(&S) {
            t.ok("edge space is one-dimensional", raw_edge_operator(&f, e));
        }
        if let Some(d) = t.ok("edge 12", raw_edge_operator(&f, [1, 2])) {
            let (_, res) = linalg::proportionality(&d.coefficients(), &explicit_edge12(&f).coefficients());
            t.le("edge 12 matches the explicit formula", res, cfg.tol(1e-10));
        }
        if let Some(fam) = t.ok("normalization kernel is one-dimensional", normalize_family(&f)) {
            t.le("vertex coboundaries vanish", fam.coboundary_residual().unwrap(), cfg.tol(1e-10));
        }
    }
    t.finish(3, "edge operators")
}

pub fn w_cocycle(cfg: &AcceptanceConfig) -> CriterionResult {
    let mut r = cfg.rng(4);
    let mut t = Tally::new();
    let cx = SimplexComplex::simplex(S).unwrap();
    for _ in 0..100 {
        let f = random_weight_matrix(&mut r, S);
        let Some(fam) = t.ok("family", normalize_family(&f)) else { continue };
        let Some(w) = t.ok("W-cocycle", extract_w_cocycle(&fam)) else { continue };
        t.le("cocycle condition", cocycle_residual(&w, &cx), cfg.tol(1e-12));
        let g = random_gauge(&mut r, &f.f_order());
        let gauged = apply_gauge_to_f(&f, &g).and_then(|fg| normalize_family(&fg)).and_then(|fam| extract_w_cocycle(&fam));
        if let Some(wg) = t.ok("gauged W-cocycle", gauged) {
            t.le("gauge invariance", w.proportionality_residual(&wg), cfg.tol(1e-9));
        }
        // relations in the tetrahedron 1234 between d12, d34 and d13
        let i = fam.space().require(&[1, 2, 3, 4]).unwrap();
        let comp = |e: Edge| fam.operator(&e).unwrap().component_at(i).unwrap();
        let om = |a: u32, b: u32, c: u32| w.get(&[a, b, c]);
        let (d12, d34, d13) = (comp([1, 2]), comp([3, 4]), comp([1, 3]));
        let den = om(1, 3, 4) - om(2, 3, 4);
        let pred = (
            -(om(1, 2, 4) * d12.0 + om(2, 3, 4) * d34.0) / den,
            -(om(1, 2, 4) * d12.1 + om(2, 3, 4) * d34.1) / den,
        );
        let size = d13.0.norm().max(d13.1.norm());
        t.le("linear relation in a tetrahedron", (pred.0 - d13.0).norm().max((pred.1 - d13.1).norm()) / size, cfg.tol(1e-9));
        let op = |e: Edge| fam.operator(&e).unwrap();
        let n12 = op([1, 2]).partial_scalar_product(op([1, 2]), i).unwrap();
        let n34 = op([3, 4]).partial_scalar_product(op([3, 4]), i).unwrap();
        let term = om(1, 2, 3) * om(1, 2, 4) * n12;
        let nd = term + om(1, 3, 4) * om(2, 3, 4) * n34;
        t.le("quadratic relation in a tetrahedron", nd.norm() / term.norm(), cfg.tol(1e-9));
    }
    t.finish(4, "W-cocycle")
}

fn f_derived_cocycle<R: Rng>(r: &mut R) -> Result<(crate::edgeops::EdgeOperatorFamily, Cochain, WeightMatrix)> {
    let f = random_weight_matrix(r, S);
    let fam = normalize_family(&f)?;
    let w = extract_w_cocycle(&fam)?;
    Ok((fam, w, f))
}

pub fn superisotropy(cfg: &AcceptanceConfig) -> CriterionResult {
    let mut r = cfg.rng(5);
    let mut t = Tally::new();
    for _ in 0..100 {
        let Some((fam, w, _)) = t.ok("setup", f_derived_cocycle(&mut r)) else { continue };
        let s = SqrtChoice::principal(&w).unwrap();
        let Some(f) = t.ok("superisotropic operator", superisotropic_f(&fam, &w, &s)) else { continue };
        t.le("isotropic at every tetrahedron", f.isotropy_defect().unwrap(), cfg.tol(1e-10));
        for tet in tets_of(&S) {
            let i = fam.space().require(&tet).unwrap();
            let pair = |x: Edge, y: Edge| {
                let d = fam.operator(&x).unwrap().scale(f.alphas[&x]).add(&fam.operator(&y).unwrap().scale(f.alphas[&y])).unwrap();
                let (b, g) = d.component_at(i).unwrap();
                [b, g]
            };
            let [a, b, c, d] = tet;
            let p = [pair([a, b], [c, d]), pair([a, c], [b, d]), pair([a, d], [b, c])];
            for x in 0..3 {
                for y in x + 1..3 {
                    t.le("paired operators proportional", linalg::proportionality(&p[x], &p[y]).1, cfg.tol(1e-9));
                }
            }
        }
        let Some(al) = t.ok("aligned branch", SqrtChoice::aligned(&fam, &w)) else { continue };
        for tet in tets_of(&S) {
            // the pattern is measured directly; build_f_t's own check is looser
            let alphas: BTreeMap<Edge, C64> = f
                .alphas
                .keys()
                .map(|e| (*e, crate::cocycle2weight::alpha_coefficients(&w, &al).unwrap()[e]))
                .map(|(e, a)| (e, if e.contains(&opposite(&S, &tet)) { -a } else { a }))
                .collect();
            let mut op = LinearOperator::zero(fam.space());
            for (e, d) in fam.operators() {
                op = op.add(&d.scale(alphas[e])).unwrap();
            }
            for (i, u) in fam.space().labels().iter().enumerate() {
                let (b, g) = op.component_at(i).unwrap();
                let off = if *u == tet { g.norm() / b.norm() } else { b.norm() / g.norm() };
                t.le("f^(t) is ∂ at t and x elsewhere", off, cfg.tol(1e-9));
            }
        }
    }
    t.finish(5, "superisotropy")
}

fn all_ones() -> Cochain {
    Cochain::from_values(2, faces_of(&S).into_iter().map(|f| (f.to_vec(), C64::new(1.0, 0.0)))).expect("sorted faces")
}

pub fn kappa_closed_form(cfg: &AcceptanceConfig) -> CriterionResult {
    let mut r = cfg.rng(6);
    let mut t = Tally::new();
    let (t1, t2, tau) = ([1, 3, 4, 5], [2, 3, 4, 5], [1, 2, 3, 4]);
    for _ in 0..100 {
        let Some((fam, w, _)) = t.ok("setup", f_derived_cocycle(&mut r)) else { continue };
        let Some(s) = t.ok("aligned branch", SqrtChoice::aligned(&fam, &w)) else { continue };
        let f1 = t.ok("f^(t1)", build_f_t(&fam, &w, &s, &t1));
        let f2 = t.ok("f^(t2)", build_f_t(&fam, &w, &s, &t2));
        let (Some(f1), Some(f2)) = (f1, f2) else { continue };
        let i = fam.space().require(&tau).unwrap();
        let (b1, g1) = f1.operator.component_at(i).unwrap();
        let (b2, g2) = f2.operator.component_at(i).unwrap();
        let (direct, res) = linalg::proportionality(&[b1, g1], &[b2, g2]);
        t.le("components at τ proportional", res, cfg.tol(1e-9));
        if let Some(k) = t.ok("closed form", kappa(&w, &s)) {
            t.le("closed form matches the direct ratio", (k - direct).norm() / direct.norm(), cfg.tol(1e-9));
        }
        if let Some((k, res)) = t.ok("rank form", kappa_rank(&w, &s, &t1, &t2, &tau)) {
            t.le("rank condition residual", res, cfg.tol(1e-9));
            t.le("rank form matches the direct ratio", (k - direct).norm() / direct.norm(), cfg.tol(1e-9));
        }
    }
    let ones = all_ones();
    let e = kappa(&ones, &SqrtChoice::principal(&ones).unwrap());
    t.ensure("all-ones cocycle raises λ₋ = 0", matches!(&e, Err(err @ Error::KappaDegenerate { .. }) if err.to_string().contains("λ₋ = 0")));
    t.finish(6, "κ closed form")
}

pub fn roundtrip(cfg: &AcceptanceConfig) -> CriterionResult {
    let mut r = cfg.rng(7);
    let mut t = Tally::new();
    for _ in 0..100 {
        let Some((fam, w, f)) = t.ok("setup", f_derived_cocycle(&mut r)) else { continue };
        let Some(s) = t.ok("aligned branch", SqrtChoice::aligned(&fam, &w)) else { continue };
        if let Some(g) = t.ok("reconstruction", reconstruct_f_with(&w, &s)) {
            let a = f.canonical_double_ratios().unwrap();
            let b = g.canonical_double_ratios().unwrap();
            for k in 0..5 {
                t.le("double ratio preserved", (a[k] - b[k]).norm() / a[k].norm(), cfg.tol(1e-8));
            }
        }
        let back = reconstruct_f(&w).and_then(|g| normalize_family(&g)).and_then(|fam| extract_w_cocycle(&fam));
        if let Some(w2) = t.ok("reverse roundtrip", back) {
            t.le("ω → F → ω up to scale", w2.proportionality_residual(&w), cfg.tol(1e-8));
        }
    }
    t.finish(7, "reconstruction roundtrip")
}

/// Modulus for identity checks: a third each of generic, tiny and
/// `k² ≈ 1`.
fn identity_modulus<R: Rng>(r: &mut R, i: usize) -> C64 {
    let phase = C64::from_polar(1.0, r.random_range(0.0..std::f64::consts::TAU));
    match i % 3 {
        0 => phase * r.random_range(0.0..1.2),
        1 => phase * 10f64.powf(r.random_range(-12.0..-3.0)),
        _ => (1.0 - phase * 10f64.powf(r.random_range(-12.0..-3.0))).sqrt(),
    }
}

pub fn elliptic(cfg: &AcceptanceConfig) -> CriterionResult {
    let mut r = cfg.rng(8);
    let mut t = Tally::new();
    for i in 0..10_000 {
        let k = identity_modulus(&mut r, i);
        let u = C64::new(r.random_range(-1.5..1.5), r.random_range(-1.0..1.0));
        let Some((s, c, d)) = t.ok("sn cn dn", jacobi_sn_cn_dn(u, k)) else { continue };
        let scale = 1.0 + s.norm_sqr() + c.norm_sqr() + d.norm_sqr();
        t.le("sn² + cn² = 1", (s * s + c * c - 1.0).norm() / scale, cfg.tol(1e-11));
        t.le("dn² + k² sn² = 1", (d * d + k * k * s * s - 1.0).norm() / scale, cfg.tol(1e-11));
    }
    let big = SimplexComplex::boundary_of_5_simplex(SIX).unwrap();
    let cx = SimplexComplex::simplex(S).unwrap();
    for _ in 0..20 {
        let p = random_elliptic_params(&mut r, &SIX);
        let w = elliptic_cocycle(&p, &big).unwrap();
        if let Some(nu) = t.ok("primitive", elliptic_primitive(&p)) {
            let dnu = coboundary(&nu, &big).unwrap();
            let dev = w.values().iter().map(|(key, v)| (dnu.get(key) - v).norm()).fold(0.0, f64::max);
            t.le("δν = ω", dev / w.max_abs(), cfg.tol(1e-10));
        }
        let ws = elliptic_cocycle(&p, &cx).unwrap();
        let fam = elliptic_f(&p, S).and_then(|f| normalize_family(&f));
        let Some(fam) = t.ok("elliptic family", fam) else { continue };
        let Some(wf) = t.ok("W-cocycle of the elliptic weight", extract_w_cocycle(&fam)) else { continue };
        t.le("W-cocycle proportional to the elliptic cocycle", wf.proportionality_residual(&ws), cfg.tol(1e-8));
        let k = SqrtChoice::aligned(&fam, &wf).and_then(|s| kappa(&wf, &s));
        if let (Some(k), Ok(ke)) = (t.ok("κ", k), elliptic_kappa(&p, S)) {
            t.le("κ product formula", (k - ke).norm() / ke.norm(), cfg.tol(1e-8));
        }
    }
    t.finish(8, "elliptic")
}

pub fn pachner_end_to_end(cfg: &AcceptanceConfig) -> CriterionResult {
    let mut r = cfg.rng(9);
    let mut t = Tally::new();
    let cx = SimplexComplex::boundary_of_5_simplex(SIX).unwrap();
    let tol = cfg.tol(1e-8);
    for run in 0..60 {
        let omega = if run < 50 {
            random_cocycle(&mut r, &cx)
        } else {
            elliptic_cocycle(&random_elliptic_params(&mut r, &SIX), &cx).unwrap()
        };
        let Some(rw) = t.ok("reconciliation", reconcile(&omega)) else { continue };
        let Some(rep) = t.ok("verification", report(&rw)) else { continue };
        for (_, x) in &rep.loop_residuals {
            t.le("loop residual", *x, tol);
        }
        t.le("composed operators agree across sides", rep.composition_mismatch, tol);
        t.ensure("composed operators span 9 dimensions", rep.composition_dims == (9, 9));
        t.le("sides proportional", rep.max_residual, tol);
        t.ge("|const|", rep.konst.norm(), 1e-10);
        t.ensure("annihilators are 9-dimensional", rep.annihilator_dims == (9, 9));
        t.le("annihilators coincide", rep.annihilator_angle, tol);
    }
    t.finish(9, "Pachner end to end")
}

/// Central differences of a holomorphic map, step `h`.
fn jacobian(f: impl Fn(&[C64]) -> Result<Vec<C64>>, at: &[C64], h: f64) -> Result<CMatrix> {
    let base = f(at)?;
    let mut j = CMatrix::zeros(base.len(), at.len());
    for c in 0..at.len() {
        let mut up = at.to_vec();
        let mut dn = at.to_vec();
        up[c] += h;
        dn[c] -= h;
        let (fu, fd) = (f(&up)?, f(&dn)?);
        for rr in 0..base.len() {
            j[(rr, c)] = (fu[rr] - fd[rr]) / (2.0 * h);
        }
    }
    Ok(j)
}

/// `σ_min / σ_max`.
fn normalized_min_singular(j: &CMatrix) -> f64 {
    let sv = linalg::singular_values(j);
    let max = sv.iter().copied().fold(0.0, f64::max);
    let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
    min / max
}

pub fn jacobian_ranks(cfg: &AcceptanceConfig) -> CriterionResult {
    let mut r = cfg.rng(10);
    let mut t = Tally::new();
    let faces: Vec<Face> = faces_of(&S);
    let ratios = |phi: &[C64]| -> Result<Vec<C64>> {
        let map: BTreeMap<Face, C64> = faces.iter().copied().zip(phi.iter().copied()).collect();
        Ok(WeightMatrix::from_phi(S, &map)?.canonical_double_ratios()?.to_vec())
    };
    for _ in 0..20 {
        let phi: Vec<C64> = (0..10).map(|_| disc_point(&mut r)).collect();
        if let Some(j) = t.ok("double-ratio Jacobian", jacobian(ratios, &phi, 1e-6)) {
            t.ge("double-ratio Jacobian σ_min/σ_max", normalized_min_singular(&j), 1e-4);
        }
    }
    let cx = SimplexComplex::simplex(S).unwrap();
    let pairs = [[2, 4], [2, 5], [3, 4], [3, 5], [4, 5]];
    let elliptic_ratios = |q: &[C64]| -> Result<Vec<C64>> {
        let mut coords = BTreeMap::from([(1, C64::default())]);
        for (i, v) in [2, 3, 4, 5].into_iter().enumerate() {
            coords.insert(v, q[i + 1]);
        }
        let w = elliptic_cocycle(&EllipticParams::new(q[0], coords)?, &cx)?;
        let w123 = w.get(&[1, 2, 3]);
        Ok(pairs.iter().map(|[j, k]| w.get(&[1, *j, *k]) / w123).collect())
    };
    for _ in 0..20 {
        let p = random_elliptic_params(&mut r, &S);
        let x1 = p.coord(1).unwrap();
        let mut q = vec![p.modulus()];
        q.extend([2, 3, 4, 5].iter().map(|&v| p.coord(v).unwrap() - x1));
        if let Some(j) = t.ok("elliptic Jacobian", jacobian(elliptic_ratios, &q, 1e-6)) {
            t.ge("elliptic Jacobian σ_min/σ_max", normalized_min_singular(&j), 1e-4);
        }
    }
    t.finish(10, "Jacobian ranks")
}

/// All ten criteria in order.
pub fn run_all(cfg: &AcceptanceConfig) -> Vec<CriterionResult> {
    CRITERIA.iter().map(|c| c(cfg)).collect()
}

pub const CRITERIA: [fn(&AcceptanceConfig) -> CriterionResult; 10] = [
    grassmann_core,
    gaussian_nullspace,
    edge_operators,
    w_cocycle,
    superisotropy,
    kappa_closed_form,
    roundtrip,
    elliptic,
    pachner_end_to_end,
    jacobian_ranks,
];
