//! Gaussian weights `W = exp Φ` of a 4-simplex, their skew matrix `F` and
//! gauge transformations.
//!
//! Matrix rows and columns use the opposite-vertex order: index `k` is the
//! tetrahedron omitting the `k`-th vertex of the sorted simplex. Since that
//! is the reverse of lexicographic order, index `k` is generator `4 - k`.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grassmann::{GeneratorSpace, GrassmannElement};
use crate::operators::LinearOperator;
use crate::simplicial::{faces_of, label, omit, permutation_sign, Face, Simplex4, Tet};
use crate::C64;

pub type Matrix5 = [[C64; 5]; 5];

/// Relative tolerance for `F + Fᵀ = 0`.
pub const SKEW_TOL: f64 = 1e-12;

/// Row/column pairs (1-based) of the five double ratios that parameterize `F`
/// modulo gauge. Each is a 4-cycle `(k, k+2) × (k+1, k+3)` mod 5, so the five
/// together contain every chord of the pentagon `F[k, k+1]` exactly once.
pub const CANONICAL_RATIOS: [((usize, usize), (usize, usize)); 5] = [
    ((1, 3), (2, 4)),
    ((2, 4), (3, 5)),
    ((3, 5), (4, 1)),
    ((4, 1), (5, 2)),
    ((5, 2), (1, 3)),
];

#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix {
    simplex: Simplex4,
    entries: Matrix5,
}

fn check_simplex(s: &Simplex4) -> Result<()> {
    if s.windows(2).all(|w| w[0] < w[1]) {
        Ok(())
    } else {
        Err(Error::InvalidCochain(format!("simplex {s:?} is not strictly increasing")))
    }
}

/// Position of vertex `v` in the simplex.
fn pos(s: &Simplex4, v: u32) -> usize {
    s.iter().position(|&x| x == v).expect("vertex of the simplex")
}

/// `(l, m, ε_{l ijk m})` for face `ijk` with `l < m` the two other vertices.
fn face_slot(s: &Simplex4, f: &Face) -> (usize, usize, f64) {
    let rest: Vec<u32> = s.iter().copied().filter(|v| !f.contains(v)).collect();
    let (l, m) = (rest[0], rest[1]);
    let eps = permutation_sign(&[l, f[0], f[1], f[2], m]).expect("distinct vertices");
    (pos(s, l), pos(s, m), eps as f64)
}

impl WeightMatrix {
    pub fn from_matrix(simplex: Simplex4, entries: Matrix5) -> Result<Self> {
        check_simplex(&simplex)?;
        let big = entries.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max);
        let mut skew: f64 = 0.0;
        for a in 0..5 {
            for b in 0..5 {
                skew = skew.max((entries[a][b] + entries[b][a]).norm());
            }
        }
        if skew > SKEW_TOL * big.max(1.0) {
            return Err(Error::NotSkew(skew));
        }
        Ok(WeightMatrix { simplex, entries })
    }

    /// Places `φ_ijk` at `F[l, m] = ε_{l ijk m} φ_ijk`, `l < m` the vertices
    /// off the face. Every face of the simplex needs a value.
    pub fn from_phi(simplex: Simplex4, phi: &BTreeMap<Face, C64>) -> Result<Self> {
        check_simplex(&simplex)?;
        let mut e = [[C64::default(); 5]; 5];
        for f in faces_of(&simplex) {
            let v = *phi
                .get(&f)
                .ok_or_else(|| Error::InvalidCochain(format!("missing φ on face {}", label(&f))))?;
            let (a, b, eps) = face_slot(&simplex, &f);
            e[a][b] = v * eps;
            e[b][a] = -v * eps;
        }
        if let Some(extra) = phi.keys().find(|f| !f.iter().all(|v| simplex.contains(v))) {
            return Err(Error::InvalidCochain(format!("face {} is not in the simplex", label(extra))));
        }
        Ok(WeightMatrix { simplex, entries: e })
    }

    pub fn simplex(&self) -> Simplex4 {
        self.simplex
    }

    pub fn entries(&self) -> &Matrix5 {
        &self.entries
    }

    pub fn entry(&self, r: usize, c: usize) -> C64 {
        self.entries[r][c]
    }

    pub fn phi(&self, f: &Face) -> C64 {
        let (a, b, eps) = face_slot(&self.simplex, f);
        self.entries[a][b] * eps
    }

    pub fn phi_map(&self) -> BTreeMap<Face, C64> {
        faces_of(&self.simplex).into_iter().map(|f| (f, self.phi(&f))).collect()
    }

    /// Tetrahedra in matrix order.
    pub fn f_order(&self) -> [Tet; 5] {
        let s = self.simplex;
        [omit(&s, s[0]), omit(&s, s[1]), omit(&s, s[2]), omit(&s, s[3]), omit(&s, s[4])]
    }

    /// The five tetrahedra of the simplex as a lexicographic generator space.
    pub fn space(&self) -> Arc<GeneratorSpace> {
        GeneratorSpace::new(self.f_order()).expect("faces of a simplex are valid labels")
    }

    /// Generator index of matrix index `k`.
    pub fn generator(k: usize) -> usize {
        4 - k
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Operators `∂_a + Σ_c F[a,c] x_c`, one per row.
    pub fn rows_as_operators(&self, space: &Arc<GeneratorSpace>) -> Result<Vec<LinearOperator>> {
        let tets = self.f_order();
        let idx: Vec<usize> = tets.iter().map(|t| space.require(t)).collect::<Result<_>>()?;
        (0..5)
            .map(|a| {
                let mut d = LinearOperator::zero(space);
                for c in 0..5 {
                    let beta = if a == c { C64::new(1.0, 0.0) } else { C64::default() };
                    d.set_component(idx[c], beta, self.entries[a][c])?;
                }
                Ok(d)
            })
            .collect()
    }

    /// The five canonical double ratios.
    pub fn canonical_double_ratios(&self) -> Result<[C64; 5]> {
        let mut out = [C64::default(); 5];
        for (k, &(rows, cols)) in CANONICAL_RATIOS.iter().enumerate() {
            out[k] = double_ratio(self, rows, cols)?;
        }
        Ok(out)
    }

    /// The gauge representative with `F[k, k+1 mod 5] = 1` for all `k`.
    pub fn gauge_fixed(&self) -> Result<Self> {
        from_canonical_ratios(self.simplex, &self.canonical_double_ratios()?)
    }
}

/// `Φ = Σ ε_{l ijk m} φ_ijk x_{ijkl} x_{ijkm}` over the ten faces.
pub fn quadratic_form(f: &WeightMatrix) -> Result<GrassmannElement> {
    let space = f.space();
    let s = f.simplex();
    let mut phi = GrassmannElement::zero(&space);
    for face in faces_of(&s) {
        let (a, b, eps) = face_slot(&s, &face);
        let (l, m) = (s[a], s[b]);
        let mut with_l: Vec<u32> = face.iter().copied().chain([l]).collect();
        let mut with_m: Vec<u32> = face.iter().copied().chain([m]).collect();
        with_l.sort_unstable();
        with_m.sort_unstable();
        let xl = GrassmannElement::generator(&space, space.require(&[with_l[0], with_l[1], with_l[2], with_l[3]])?)?;
        let xm = GrassmannElement::generator(&space, space.require(&[with_m[0], with_m[1], with_m[2], with_m[3]])?)?;
        phi = phi.add(&xl.multiply(&xm)?.scale(f.phi(&face) * eps))?;
    }
    Ok(phi)
}

/// `−½ xᵀ F x` expanded directly from the matrix.
pub fn quadratic_form_from_matrix(f: &WeightMatrix) -> Result<GrassmannElement> {
    let space = f.space();
    let mut q = GrassmannElement::zero(&space);
    for a in 0..5 {
        for b in 0..5 {
            let xa = GrassmannElement::generator(&space, WeightMatrix::generator(a))?;
            let xb = GrassmannElement::generator(&space, WeightMatrix::generator(b))?;
            q = q.add(&xa.multiply(&xb)?.scale(f.entry(a, b) * -0.5))?;
        }
    }
    Ok(q)
}

pub fn gaussian_weight(f: &WeightMatrix) -> Result<GrassmannElement> {
    quadratic_form(f)?.exp_even()
}

/// `(∂_t − x_t) W` for one tetrahedron `t` of the simplex.
pub fn odd_weight(f: &WeightMatrix, t: &Tet) -> Result<GrassmannElement> {
    let space = f.space();
    let i = space.require(t)?;
    let w = gaussian_weight(f)?;
    w.left_derivative(i)?.sub(&w.mul_generator(i)?)
}

/// Per-tetrahedron rescalings `x_t ↦ λ_t x_t` and interchange flags.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GaugeTransform {
    scales: BTreeMap<Tet, C64>,
    interchanged: BTreeSet<Tet>,
}

impl GaugeTransform {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_scale(mut self, t: Tet, lambda: C64) -> Result<Self> {
        if lambda.norm() == 0.0 {
            return Err(Error::Degenerate(format!("zero gauge scale on {}", label(&t))));
        }
        self.scales.insert(t, lambda);
        Ok(self)
    }

    pub fn with_interchange(mut self, t: Tet) -> Self {
        self.interchanged.insert(t);
        self
    }

    pub fn scale(&self, t: &Tet) -> C64 {
        self.scales.get(t).copied().unwrap_or(C64::new(1.0, 0.0))
    }

    pub fn is_interchanged(&self, t: &Tet) -> bool {
        self.interchanged.contains(t)
    }

    pub fn scales(&self) -> &BTreeMap<Tet, C64> {
        &self.scales
    }

    pub fn interchanges(&self) -> &BTreeSet<Tet> {
        &self.interchanged
    }
}

/// `A F A` with `A = diag(λ_t)`.
pub fn apply_gauge_to_f(f: &WeightMatrix, g: &GaugeTransform) -> Result<WeightMatrix> {
    if !g.interchanged.is_empty() {
        return Err(Error::InterchangeNotSupported);
    }
    let tets = f.f_order();
    let lam: Vec<C64> = tets.iter().map(|t| g.scale(t)).collect();
    let mut e = *f.entries();
    for a in 0..5 {
        for b in 0..5 {
            e[a][b] *= lam[a] * lam[b];
        }
    }
    Ok(WeightMatrix {
        simplex: f.simplex,
        entries: e,
    })
}

/// `F[r1,c1] F[r2,c2] / (F[r1,c2] F[r2,c1])`, indices 1-based.
pub fn double_ratio(f: &WeightMatrix, rows: (usize, usize), cols: (usize, usize)) -> Result<C64> {
    let idx = [rows.0, rows.1, cols.0, cols.1];
    if idx.iter().any(|&i| i == 0 || i > 5) {
        return Err(Error::Degenerate(format!("index out of range in {rows:?} × {cols:?}")));
    }
    let (r1, r2, c1, c2) = (rows.0 - 1, rows.1 - 1, cols.0 - 1, cols.1 - 1);
    let cut = 1e-12 * f.max_abs();
    for (r, c) in [(r1, c1), (r2, c2), (r1, c2), (r2, c1)] {
        if f.entry(r, c).norm() <= cut {
            return Err(Error::Degenerate(format!("entry F[{}, {}] vanishes", r + 1, c + 1)));
        }
    }
    Ok(f.entry(r1, c1) * f.entry(r2, c2) / (f.entry(r1, c2) * f.entry(r2, c1)))
}

/// The gauge-fixed `F` (`F[k, k+1] = 1`) with the given canonical ratios.
pub fn from_canonical_ratios(simplex: Simplex4, ratios: &[C64; 5]) -> Result<WeightMatrix> {
    check_simplex(&simplex)?;
    let mut e = [[C64::default(); 5]; 5];
    for k in 0..5 {
        e[k][(k + 1) % 5] = C64::new(1.0, 0.0);
        e[(k + 1) % 5][k] = C64::new(-1.0, 0.0);
    }
    for (k, &((r1, r2), (c1, c2))) in CANONICAL_RATIOS.iter().enumerate() {
        let dr = ratios[k];
        if dr.norm() == 0.0 || !dr.is_finite() {
            return Err(Error::Degenerate(format!("canonical double ratio {} is {dr}", k + 1)));
        }
        let (r1, r2, c1, c2) = (r1 - 1, r2 - 1, c1 - 1, c2 - 1);
        let v = e[r1][c1] * e[r2][c2] / (dr * e[r2][c1]);
        e[r1][c2] = v;
        e[c2][r1] = -v;
    }
    WeightMatrix::from_matrix(simplex, e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{annihilator_of, isotropic_span_from_f, OperatorSubspace};
    use crate::sampling::{random_gauge, random_weight_matrix};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const S: Simplex4 = [1, 2, 3, 4, 5];

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn matrix_placement_matches_explicit_entries() {
        let phi: BTreeMap<Face, C64> = faces_of(&S).into_iter().enumerate().map(|(i, f)| (f, c(i as f64 + 1.0))).collect();
        let f = WeightMatrix::from_phi(S, &phi).unwrap();
        assert_eq!(f.entry(0, 1), -phi[&[3, 4, 5]]);
        assert_eq!(f.entry(3, 4), -phi[&[1, 2, 3]]);
        assert_eq!(f.entry(0, 2), phi[&[2, 4, 5]]);
        assert_eq!(f.entry(1, 0), phi[&[3, 4, 5]]);
        assert_eq!(f.phi_map(), phi);
        assert_eq!(f.f_order(), [[2, 3, 4, 5], [1, 3, 4, 5], [1, 2, 4, 5], [1, 2, 3, 5], [1, 2, 3, 4]]);
    }

    #[test]
    fn non_skew_rejected() {
        let mut e = [[C64::default(); 5]; 5];
        e[0][1] = c(1.0);
        assert!(matches!(WeightMatrix::from_matrix(S, e), Err(Error::NotSkew(_))));
    }

    #[test]
    fn single_phi_quadratic_form() {
        let mut phi: BTreeMap<Face, C64> = faces_of(&S).into_iter().map(|f| (f, c(0.0))).collect();
        phi.insert([3, 4, 5], c(2.5));
        let f = WeightMatrix::from_phi(S, &phi).unwrap();
        let q = quadratic_form(&f).unwrap();
        let sp = f.space();
        let x1345 = GrassmannElement::generator(&sp, sp.require(&[1, 3, 4, 5]).unwrap()).unwrap();
        let x2345 = GrassmannElement::generator(&sp, sp.require(&[2, 3, 4, 5]).unwrap()).unwrap();
        let expect = x1345.multiply(&x2345).unwrap().scale(c(-2.5));
        assert!(q.max_abs_diff(&expect).unwrap() < 1e-15);
    }

    #[test]
    fn zero_f() {
        let f = WeightMatrix::from_matrix(S, [[C64::default(); 5]; 5]).unwrap();
        assert!(quadratic_form(&f).unwrap().is_zero());
        assert_eq!(gaussian_weight(&f).unwrap(), GrassmannElement::one(&f.space()));
        let t = [1, 2, 3, 4];
        let sp = f.space();
        let xt = GrassmannElement::generator(&sp, sp.require(&t).unwrap()).unwrap();
        assert_eq!(odd_weight(&f, &t).unwrap(), xt.scale(c(-1.0)));
    }

    #[test]
    fn quadratic_form_matches_matrix_expansion() {
        let mut r = rng(1);
        for _ in 0..20 {
            let f = random_weight_matrix(&mut r, S);
            let a = quadratic_form(&f).unwrap();
            let b = quadratic_form_from_matrix(&f).unwrap();
            assert!(a.max_abs_diff(&b).unwrap() < 1e-13);
        }
    }

    /// Oracle: the degree-4 coefficient of exp(−½xᵀFx) on the monomial
    /// omitting generator k is the Pfaffian of F with row/column k removed,
    /// up to the sign of ordering.
    #[test]
    fn top_coefficients_are_pfaffians() {
        let mut r = rng(2);
        let f = random_weight_matrix(&mut r, S);
        let w = gaussian_weight(&f).unwrap();
        let sp = f.space();
        for k in 0..5 {
            let keep: Vec<usize> = (0..5).filter(|&i| i != k).collect();
            // Pfaffian of the 4×4 principal submatrix in matrix order
            let m = |a: usize, b: usize| f.entry(keep[a], keep[b]);
            let pf = m(0, 1) * m(2, 3) - m(0, 2) * m(1, 3) + m(0, 3) * m(1, 2);
            // (−½xᵀFx)²/2 = Pf · x_{k0} x_{k1} x_{k2} x_{k3} in matrix order
            let xs: Vec<GrassmannElement> = keep.iter().map(|&i| GrassmannElement::generator(&sp, WeightMatrix::generator(i)).unwrap()).collect();
            let mono = xs[0].multiply(&xs[1]).unwrap().multiply(&xs[2]).unwrap().multiply(&xs[3]).unwrap();
            let (mask, sign) = mono.terms().next().unwrap();
            assert!((w.coeff(mask) - pf * sign).norm() < 1e-13);
        }
    }

    #[test]
    fn gaussian_weight_is_annihilated_by_rows() {
        let mut r = rng(3);
        for _ in 0..10 {
            let f = random_weight_matrix(&mut r, S);
            let w = gaussian_weight(&f).unwrap();
            let v = isotropic_span_from_f(&f).unwrap();
            assert!(v.annihilation_residual(&w).unwrap() <= 1e-12);
        }
    }

    #[test]
    fn odd_weight_annihilated_by_interchanged_span() {
        let mut r = rng(4);
        let f = random_weight_matrix(&mut r, S);
        let sp = f.space();
        for t in f.f_order() {
            let w = odd_weight(&f, &t).unwrap();
            assert_eq!(w.parity(), Some(crate::grassmann::Parity::Odd));
            let i = sp.require(&t).unwrap();
            let swapped: Vec<LinearOperator> = f
                .rows_as_operators(&sp)
                .unwrap()
                .into_iter()
                .map(|d| {
                    let (b, g) = d.component_at(i).unwrap();
                    let mut e = d.clone();
                    e.set_component(i, g, b).unwrap();
                    e
                })
                .collect();
            let v = OperatorSubspace::from_basis(&sp, swapped).unwrap();
            assert!(v.annihilation_residual(&w).unwrap() <= 1e-11);
        }
    }

    #[test]
    fn gauge_examples() {
        let mut r = rng(5);
        let f = random_weight_matrix(&mut r, S);
        assert_eq!(apply_gauge_to_f(&f, &GaugeTransform::new()).unwrap(), f);
        let g = GaugeTransform::new().with_scale([2, 3, 4, 5], c(2.0)).unwrap();
        let h = apply_gauge_to_f(&f, &g).unwrap();
        for b in 1..5 {
            assert!((h.entry(0, b) - f.entry(0, b) * 2.0).norm() < 1e-15);
            assert!((h.entry(b, 0) - f.entry(b, 0) * 2.0).norm() < 1e-15);
        }
        assert_eq!(h.entry(0, 0), c(0.0));
        let gi = GaugeTransform::new().with_interchange([1, 2, 3, 4]);
        assert_eq!(apply_gauge_to_f(&f, &gi), Err(Error::InterchangeNotSupported));
        assert!(GaugeTransform::new().with_scale([1, 2, 3, 4], c(0.0)).is_err());
    }

    #[test]
    fn gauge_covariance_of_weight() {
        let mut r = rng(6);
        for _ in 0..10 {
            let f = random_weight_matrix(&mut r, S);
            let g = random_gauge(&mut r, &f.f_order());
            let wg = gaussian_weight(&apply_gauge_to_f(&f, &g).unwrap()).unwrap();
            let sp = f.space();
            let mut w = gaussian_weight(&f).unwrap();
            for t in f.f_order() {
                w = w.rescale_generator(sp.require(&t).unwrap(), g.scale(&t)).unwrap();
            }
            assert!(wg.max_abs_diff(&w).unwrap() <= 1e-12 * w.max_abs());
        }
    }

    #[test]
    fn double_ratio_examples() {
        let mut r = rng(7);
        let f = random_weight_matrix(&mut r, S);
        let p = f.phi_map();
        let dr = double_ratio(&f, (1, 2), (4, 5)).unwrap();
        let expect = p[&[2, 3, 5]] * p[&[1, 3, 4]] / (p[&[1, 3, 5]] * p[&[2, 3, 4]]);
        assert!((dr - expect).norm() < 1e-12 * expect.norm());
        let ones: BTreeMap<Face, C64> = faces_of(&S).into_iter().map(|f| (f, c(1.0))).collect();
        let f1 = WeightMatrix::from_phi(S, &ones).unwrap();
        assert!((double_ratio(&f1, (1, 2), (4, 5)).unwrap() - c(1.0)).norm() < 1e-15);
        let mut z = [[C64::default(); 5]; 5];
        z[0][1] = c(1.0);
        z[1][0] = c(-1.0);
        let fz = WeightMatrix::from_matrix(S, z).unwrap();
        assert!(matches!(double_ratio(&fz, (1, 2), (4, 5)), Err(Error::Degenerate(_))));
    }

    #[test]
    fn double_ratios_are_gauge_invariant() {
        let mut r = rng(8);
        for _ in 0..20 {
            let f = random_weight_matrix(&mut r, S);
            let g = random_gauge(&mut r, &f.f_order());
            let a = f.canonical_double_ratios().unwrap();
            let b = apply_gauge_to_f(&f, &g).unwrap().canonical_double_ratios().unwrap();
            for k in 0..5 {
                assert!((a[k] - b[k]).norm() <= 1e-11 * a[k].norm());
            }
        }
    }

    #[test]
    fn ratios_round_trip_through_gauge_fix() {
        let mut r = rng(9);
        for _ in 0..20 {
            let f = random_weight_matrix(&mut r, S);
            let dr = f.canonical_double_ratios().unwrap();
            let g = from_canonical_ratios(S, &dr).unwrap();
            let back = g.canonical_double_ratios().unwrap();
            for k in 0..5 {
                assert!((dr[k] - back[k]).norm() <= 1e-10 * dr[k].norm());
            }
            // the gauge-fixed matrix is congruent to F by a diagonal
            let w = annihilator_of(&gaussian_weight(&g).unwrap(), &[0, 1, 2, 3, 4]).unwrap();
            assert_eq!(w.dim(), 5);
        }
    }
}
