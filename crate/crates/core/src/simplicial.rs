//! Faces of Δ⁴ and ∂Δ⁵, cochains and the coboundary.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::C64;

pub type Vertex = u32;
pub type Edge = [Vertex; 2];
pub type Face = [Vertex; 3];
pub type Tet = [Vertex; 4];
pub type Simplex4 = [Vertex; 5];

/// Compact label for a face: `1234` for small ids, `10,11,12` otherwise.
pub fn label(v: &[Vertex]) -> String {
    if v.iter().all(|&x| x < 10) {
        v.iter().map(|x| x.to_string()).collect()
    } else {
        v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
    }
}

/// All `k`-element subsets of a sorted vertex list, in lexicographic order.
pub fn subsets(vertices: &[Vertex], k: usize) -> Vec<Vec<Vertex>> {
    fn rec(v: &[Vertex], k: usize, start: usize, cur: &mut Vec<Vertex>, out: &mut Vec<Vec<Vertex>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..v.len() {
            cur.push(v[i]);
            rec(v, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(vertices, k, 0, &mut Vec::with_capacity(k), &mut out);
    out
}

pub fn edges_of(s: &[Vertex]) -> Vec<Edge> {
    subsets(s, 2).into_iter().map(|v| [v[0], v[1]]).collect()
}

pub fn faces_of(s: &[Vertex]) -> Vec<Face> {
    subsets(s, 3).into_iter().map(|v| [v[0], v[1], v[2]]).collect()
}

pub fn tets_of(s: &[Vertex]) -> Vec<Tet> {
    subsets(s, 4).into_iter().map(|v| [v[0], v[1], v[2], v[3]]).collect()
}

/// The tetrahedron of `s` that omits vertex `v`.
pub fn omit(s: &Simplex4, v: Vertex) -> Tet {
    let mut t = [0; 4];
    let mut k = 0;
    for &x in s {
        if x != v {
            t[k] = x;
            k += 1;
        }
    }
    t
}

/// The vertex of `s` not in `t`.
pub fn opposite(s: &Simplex4, t: &Tet) -> Vertex {
    *s.iter().find(|v| !t.contains(v)).expect("tetrahedron must be a face of the simplex")
}

/// Parity of `seq` relative to increasing order.
pub fn permutation_sign(seq: &[Vertex]) -> Result<i32> {
    let distinct: BTreeSet<_> = seq.iter().collect();
    if distinct.len() != seq.len() {
        return Err(Error::NotAPermutation(seq.to_vec()));
    }
    let inversions = (0..seq.len())
        .flat_map(|i| (i + 1..seq.len()).map(move |j| (i, j)))
        .filter(|&(i, j)| seq[i] > seq[j])
        .count();
    Ok(if inversions % 2 == 0 { 1 } else { -1 })
}

/// The three tetrahedra of the 4-simplex that contain `edge`.
pub fn star_tetrahedra(edge: Edge, simplex: &Simplex4) -> Result<Vec<Tet>> {
    let e = if edge[0] < edge[1] { edge } else { [edge[1], edge[0]] };
    if e[0] == e[1] || !simplex.contains(&e[0]) || !simplex.contains(&e[1]) {
        return Err(Error::EdgeNotInSimplex {
            edge,
            simplex: simplex.to_vec(),
        });
    }
    Ok(tets_of(simplex).into_iter().filter(|t| t.contains(&e[0]) && t.contains(&e[1])).collect())
}

fn check_simplex(s: &[Vertex]) -> Result<()> {
    if s.windows(2).all(|w| w[0] < w[1]) {
        Ok(())
    } else {
        Err(Error::InvalidCochain(format!("simplex {s:?} is not strictly increasing")))
    }
}

/// A pure simplicial complex given by its top simplices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplexComplex {
    vertices: Vec<Vertex>,
    top: Vec<Vec<Vertex>>,
    edges: Vec<Edge>,
    faces: Vec<Face>,
    tets: Vec<Tet>,
}

impl SimplexComplex {
    pub fn new(top: Vec<Vec<Vertex>>) -> Result<Self> {
        let mut vertices = BTreeSet::new();
        let (mut edges, mut faces, mut tets) = (BTreeSet::new(), BTreeSet::new(), BTreeSet::new());
        for s in &top {
            check_simplex(s)?;
            vertices.extend(s.iter().copied());
            edges.extend(edges_of(s));
            faces.extend(faces_of(s));
            tets.extend(tets_of(s));
        }
        Ok(SimplexComplex {
            vertices: vertices.into_iter().collect(),
            top,
            edges: edges.into_iter().collect(),
            faces: faces.into_iter().collect(),
            tets: tets.into_iter().collect(),
        })
    }

    pub fn simplex(s: Simplex4) -> Result<Self> {
        Self::new(vec![s.to_vec()])
    }

    /// The six 4-faces of the 5-simplex on `v`.
    pub fn boundary_of_5_simplex(v: [Vertex; 6]) -> Result<Self> {
        check_simplex(&v)?;
        Self::new(subsets(&v, 5))
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }
    pub fn top_simplices(&self) -> &[Vec<Vertex>] {
        &self.top
    }
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }
    pub fn faces(&self) -> &[Face] {
        &self.faces
    }
    pub fn tetrahedra(&self) -> &[Tet] {
        &self.tets
    }
}

/// A cochain of degree 0, 1 or 2, keyed by sorted vertex tuples. Missing keys
/// read as zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Cochain {
    degree: usize,
    values: BTreeMap<Vec<Vertex>, C64>,
}

impl Cochain {
    pub fn new(degree: usize) -> Result<Self> {
        if degree > 2 {
            return Err(Error::InvalidCochain(format!("degree {degree} not supported")));
        }
        Ok(Cochain {
            degree,
            values: BTreeMap::new(),
        })
    }

    pub fn from_values(degree: usize, values: impl IntoIterator<Item = (Vec<Vertex>, C64)>) -> Result<Self> {
        let mut c = Self::new(degree)?;
        for (k, v) in values {
            c.set(k, v)?;
        }
        Ok(c)
    }

    /// Indicator cochain of one vertex.
    pub fn vertex_indicator(v: Vertex) -> Self {
        Cochain {
            degree: 0,
            values: BTreeMap::from([(vec![v], C64::new(1.0, 0.0))]),
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn set(&mut self, key: Vec<Vertex>, value: C64) -> Result<()> {
        if key.len() != self.degree + 1 {
            return Err(Error::InvalidCochain(format!("key {key:?} has wrong size for degree {}", self.degree)));
        }
        check_simplex(&key)?;
        self.values.insert(key, value);
        Ok(())
    }

    pub fn get(&self, key: &[Vertex]) -> C64 {
        self.values.get(key).copied().unwrap_or_default()
    }

    pub fn contains(&self, key: &[Vertex]) -> bool {
        self.values.contains_key(key)
    }

    pub fn values(&self) -> &BTreeMap<Vec<Vertex>, C64> {
        &self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.values().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, s: C64) -> Self {
        Cochain {
            degree: self.degree,
            values: self.values.iter().map(|(k, v)| (k.clone(), v * s)).collect(),
        }
    }

    /// Divides by the component of largest magnitude (first one on ties).
    pub fn normalized(&self) -> Result<Self> {
        let big = self
            .values
            .values()
            .copied()
            .fold(C64::default(), |acc, z| if z.norm() > acc.norm() { z } else { acc });
        if big.norm() == 0.0 {
            return Err(Error::Degenerate("cannot normalise the zero cochain".into()));
        }
        Ok(self.scale(1.0 / big))
    }

    /// Keeps only the values on faces of `vertices`.
    pub fn restrict(&self, vertices: &[Vertex]) -> Self {
        Cochain {
            degree: self.degree,
            values: self
                .values
                .iter()
                .filter(|(k, _)| k.iter().all(|v| vertices.contains(v)))
                .map(|(k, v)| (k.clone(), *v))
                .collect(),
        }
    }

    /// Values on the given keys, in that order.
    pub fn vector(&self, keys: &[Vec<Vertex>]) -> Vec<C64> {
        keys.iter().map(|k| self.get(k)).collect()
    }

    /// `min_c max|a − c·b| / max|a|` with `c` the least-squares fit over the
    /// union of keys.
    pub fn proportionality_residual(&self, other: &Cochain) -> f64 {
        let keys: BTreeSet<&Vec<Vertex>> = self.values.keys().chain(other.values.keys()).collect();
        let a: Vec<C64> = keys.iter().map(|k| self.get(k)).collect();
        let b: Vec<C64> = keys.iter().map(|k| other.get(k)).collect();
        let (c, _) = crate::linalg::proportionality(&a, &b);
        let am = a.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let dev = a.iter().zip(&b).map(|(x, y)| (x - c * y).norm()).fold(0.0, f64::max);
        if am > 0.0 {
            dev / am
        } else {
            dev
        }
    }
}

/// `δc` on the faces of `complex` one dimension up.
pub fn coboundary(c: &Cochain, complex: &SimplexComplex) -> Result<Cochain> {
    match c.degree {
        0 => Cochain::from_values(
            1,
            complex.edges().iter().map(|&[i, j]| (vec![i, j], c.get(&[j]) - c.get(&[i]))),
        ),
        1 => Cochain::from_values(
            2,
            complex
                .faces()
                .iter()
                .map(|&[i, j, k]| (vec![i, j, k], c.get(&[j, k]) - c.get(&[i, k]) + c.get(&[i, j]))),
        ),
        d => Err(Error::InvalidCochain(format!("coboundary of degree {d} is not supported"))),
    }
}

/// Largest alternating sum over the tetrahedra of `complex`, relative to
/// `max|ω|`.
pub fn cocycle_residual(c: &Cochain, complex: &SimplexComplex) -> f64 {
    let scale = c.max_abs();
    let worst = complex
        .tetrahedra()
        .iter()
        .map(|&[i, j, k, l]| {
            (c.get(&[j, k, l]) - c.get(&[i, k, l]) + c.get(&[i, j, l]) - c.get(&[i, j, k])).norm()
        })
        .fold(0.0, f64::max);
    if scale > 0.0 {
        worst / scale
    } else {
        worst
    }
}

pub fn is_cocycle(c: &Cochain, complex: &SimplexComplex, tol: f64) -> bool {
    c.degree == 2 && cocycle_residual(c, complex) <= tol
}

/// The 4-simplex spanned by the keys of a degree-2 cochain, which must carry
/// a value on each of its ten faces.
pub fn simplex_of_cochain(c: &Cochain) -> Result<Simplex4> {
    if c.degree != 2 {
        return Err(Error::InvalidCochain("expected a 2-cochain".into()));
    }
    let verts: BTreeSet<Vertex> = c.values.keys().flatten().copied().collect();
    if verts.len() != 5 {
        return Err(Error::InvalidCochain(format!(
            "a 2-cochain on a 4-simplex needs 5 vertices, found {}",
            verts.len()
        )));
    }
    let v: Vec<Vertex> = verts.into_iter().collect();
    let s = [v[0], v[1], v[2], v[3], v[4]];
    if let Some(f) = faces_of(&s).into_iter().find(|f| !c.contains(f)) {
        return Err(Error::InvalidCochain(format!("missing value on face {}", label(&f))));
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const S: Simplex4 = [1, 2, 3, 4, 5];

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn degree_one_coboundary() {
        let cx = SimplexComplex::new(vec![vec![1, 2, 3]]).unwrap();
        let (a, b, cc) = (C64::new(1.0, 2.0), C64::new(-0.5, 0.0), C64::new(3.0, 1.0));
        let nu = Cochain::from_values(1, [(vec![1, 2], a), (vec![1, 3], b), (vec![2, 3], cc)]).unwrap();
        let w = coboundary(&nu, &cx).unwrap();
        assert_eq!(w.get(&[1, 2, 3]), cc - b + a);
    }

    #[test]
    fn vertex_indicator_coboundary() {
        let cx = SimplexComplex::simplex(S).unwrap();
        let d = coboundary(&Cochain::vertex_indicator(1), &cx).unwrap();
        assert_eq!(d.get(&[1, 2]), c(-1.0));
        assert_eq!(d.get(&[2, 3]), c(0.0));
        let dd = coboundary(&d, &cx).unwrap();
        assert_eq!(dd.max_abs(), 0.0);
    }

    #[test]
    fn degree_two_coboundary_rejected() {
        let cx = SimplexComplex::simplex(S).unwrap();
        let w = Cochain::new(2).unwrap();
        assert!(coboundary(&w, &cx).is_err());
        assert!(Cochain::new(3).is_err());
    }

    #[test]
    fn cocycle_examples() {
        let cx = SimplexComplex::simplex(S).unwrap();
        let ones = Cochain::from_values(2, faces_of(&S).into_iter().map(|f| (f.to_vec(), c(1.0)))).unwrap();
        assert!(is_cocycle(&ones, &cx, 1e-12));
        let single = Cochain::from_values(2, [(vec![1, 2, 3], c(1.0))]).unwrap();
        assert!(!is_cocycle(&single, &cx, 1e-12));
    }

    #[test]
    fn permutation_sign_examples() {
        assert_eq!(permutation_sign(&[1, 2, 3, 4, 5]).unwrap(), 1);
        assert_eq!(permutation_sign(&[2, 1, 3, 4, 5]).unwrap(), -1);
        assert_eq!(permutation_sign(&[4, 5, 1, 2, 3]).unwrap(), 1);
        assert!(permutation_sign(&[1, 1, 3, 4, 5]).is_err());
    }

    #[test]
    fn star_examples() {
        assert_eq!(star_tetrahedra([1, 2], &S).unwrap(), vec![[1, 2, 3, 4], [1, 2, 3, 5], [1, 2, 4, 5]]);
        assert_eq!(star_tetrahedra([4, 5], &S).unwrap(), vec![[1, 2, 4, 5], [1, 3, 4, 5], [2, 3, 4, 5]]);
        let a = star_tetrahedra([1, 2], &S).unwrap();
        let b = star_tetrahedra([3, 4], &S).unwrap();
        let common: Vec<_> = a.iter().filter(|t| b.contains(t)).collect();
        assert_eq!(common, vec![&[1, 2, 3, 4]]);
        assert!(star_tetrahedra([1, 6], &S).is_err());
    }

    #[test]
    fn star_sizes_and_opposite_edges() {
        for e in edges_of(&S) {
            let st = star_tetrahedra(e, &S).unwrap();
            assert_eq!(st.len(), 3);
            for o in edges_of(&S).into_iter().filter(|o| !o.iter().any(|v| e.contains(v))) {
                let so = star_tetrahedra(o, &S).unwrap();
                assert_eq!(st.iter().filter(|t| so.contains(t)).count(), 1);
            }
        }
    }

    #[test]
    fn boundary_of_5_simplex_counts() {
        let cx = SimplexComplex::boundary_of_5_simplex([1, 2, 3, 4, 5, 6]).unwrap();
        assert_eq!(cx.top_simplices().len(), 6);
        assert_eq!(cx.edges().len(), 15);
        assert_eq!(cx.faces().len(), 20);
        assert_eq!(cx.tetrahedra().len(), 15);
    }

    proptest! {
        #[test]
        fn dd_vanishes(vals in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 6)) {
            let cx = SimplexComplex::boundary_of_5_simplex([1, 2, 3, 4, 5, 6]).unwrap();
            let c0 = Cochain::from_values(0, vals.iter().enumerate().map(|(i, &(re, im))| (vec![i as u32 + 1], C64::new(re, im)))).unwrap();
            let dd = coboundary(&coboundary(&c0, &cx).unwrap(), &cx).unwrap();
            prop_assert!(dd.max_abs() <= 1e-14);
        }

        #[test]
        fn restrictions_of_coboundaries_are_cocycles(vals in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 15)) {
            let cx = SimplexComplex::boundary_of_5_simplex([1, 2, 3, 4, 5, 6]).unwrap();
            let nu = Cochain::from_values(1, cx.edges().iter().zip(&vals).map(|(e, &(re, im))| (e.to_vec(), C64::new(re, im)))).unwrap();
            let w = coboundary(&nu, &cx).unwrap();
            for s in cx.top_simplices() {
                let sub = SimplexComplex::new(vec![s.clone()]).unwrap();
                prop_assert!(is_cocycle(&w.restrict(s), &sub, 1e-12));
            }
        }
    }
}
