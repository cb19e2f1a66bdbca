//! Finite Grassmann algebra over ℂ with tetrahedra as generators.
//!
//! A monomial is a bitmask over the generator space; bit `i` stands for the
//! `i`-th label in lexicographic order and a set bit pattern denotes the
//! product of its generators in increasing order.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::simplicial::Tet;
use crate::C64;

/// Largest supported generator count (monomials are `u32` masks).
pub const MAX_GENERATORS: usize = 24;

/// Ordered set of tetrahedron labels indexing the Grassmann variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GeneratorSpace {
    labels: Vec<Tet>,
}

impl GeneratorSpace {
    /// Builds a space from labels in any order; they are sorted
    /// lexicographically, which fixes the canonical monomial order.
    pub fn new(labels: impl IntoIterator<Item = Tet>) -> Result<Arc<Self>> {
        let mut labels: Vec<Tet> = labels.into_iter().collect();
        for t in &labels {
            if !t.windows(2).all(|w| w[0] < w[1]) {
                return Err(Error::InvalidSpace(format!("label {t:?} is not strictly increasing")));
            }
        }
        labels.sort_unstable();
        if labels.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidSpace("duplicate label".into()));
        }
        if labels.len() > MAX_GENERATORS {
            return Err(Error::InvalidSpace(format!(
                "{} generators exceed the limit of {MAX_GENERATORS}",
                labels.len()
            )));
        }
        Ok(Arc::new(GeneratorSpace { labels }))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[Tet] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> Result<Tet> {
        self.labels.get(i).copied().ok_or(Error::GeneratorIndex(i))
    }

    pub fn index_of(&self, t: &Tet) -> Option<usize> {
        self.labels.binary_search(t).ok()
    }

    pub fn require(&self, t: &Tet) -> Result<usize> {
        self.index_of(t).ok_or(Error::UnknownGenerator(*t))
    }

    /// Mask of the full monomial `x_0 x_1 ⋯ x_{n-1}`.
    pub fn top_mask(&self) -> u32 {
        ((1u64 << self.len()) - 1) as u32
    }

    fn check(&self, i: usize) -> Result<()> {
        if i < self.len() {
            Ok(())
        } else {
            Err(Error::GeneratorIndex(i))
        }
    }
}

fn same_space(a: &Arc<GeneratorSpace>, b: &Arc<GeneratorSpace>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// Sign of concatenating the increasing sequences `a` and `b` and sorting.
fn merge_sign(a: u32, b: u32) -> f64 {
    let mut swaps = 0u32;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        swaps += (a >> j >> 1).count_ones();
        rest &= rest - 1;
    }
    if swaps.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

fn parity_sign(n: u32) -> f64 {
    if n.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

/// An element `Σ c_S x_S` of the Grassmann algebra.
#[derive(Debug, Clone, PartialEq)]
pub struct GrassmannElement {
    space: Arc<GeneratorSpace>,
    coeffs: BTreeMap<u32, C64>,
}

impl GrassmannElement {
    pub fn zero(space: &Arc<GeneratorSpace>) -> Self {
        GrassmannElement {
            space: space.clone(),
            coeffs: BTreeMap::new(),
        }
    }

    pub fn scalar(space: &Arc<GeneratorSpace>, c: C64) -> Self {
        Self::monomial(space, 0, c)
    }

    pub fn one(space: &Arc<GeneratorSpace>) -> Self {
        Self::scalar(space, C64::new(1.0, 0.0))
    }

    /// `c · x_S` for the canonical monomial with mask `mask`. Bits outside the
    /// space are rejected.
    pub fn monomial(space: &Arc<GeneratorSpace>, mask: u32, c: C64) -> Self {
        assert!(mask & !space.top_mask() == 0, "monomial mask outside the generator space");
        let mut e = Self::zero(space);
        if c != C64::new(0.0, 0.0) {
            e.coeffs.insert(mask, c);
        }
        e
    }

    pub fn generator(space: &Arc<GeneratorSpace>, i: usize) -> Result<Self> {
        space.check(i)?;
        Ok(Self::monomial(space, 1 << i, C64::new(1.0, 0.0)))
    }

    pub fn from_terms(space: &Arc<GeneratorSpace>, terms: impl IntoIterator<Item = (u32, C64)>) -> Self {
        let mut e = Self::zero(space);
        for (m, c) in terms {
            e.add_term(m, c);
        }
        e
    }

    pub fn space(&self) -> &Arc<GeneratorSpace> {
        &self.space
    }

    pub fn coeff(&self, mask: u32) -> C64 {
        self.coeffs.get(&mask).copied().unwrap_or_default()
    }

    /// Nonzero terms in increasing mask order.
    pub fn terms(&self) -> impl Iterator<Item = (u32, C64)> + '_ {
        self.coeffs.iter().map(|(&m, &c)| (m, c))
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.values().all(|c| *c == C64::new(0.0, 0.0))
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `Even`/`Odd` when every monomial has that degree parity, `None` for a
    /// mixed element. The zero element counts as even.
    pub fn parity(&self) -> Option<Parity> {
        let mut seen = None;
        for &m in self.coeffs.keys() {
            let p = if m.count_ones() % 2 == 0 { Parity::Even } else { Parity::Odd };
            match seen {
                None => seen = Some(p),
                Some(q) if q != p => return None,
                _ => {}
            }
        }
        Some(seen.unwrap_or(Parity::Even))
    }

    fn add_term(&mut self, mask: u32, c: C64) {
        if c == C64::new(0.0, 0.0) {
            return;
        }
        let slot = self.coeffs.entry(mask).or_default();
        *slot += c;
        if *slot == C64::new(0.0, 0.0) {
            self.coeffs.remove(&mask);
        }
    }

    fn check_space(&self, other: &Self) -> Result<()> {
        if same_space(&self.space, &other.space) {
            Ok(())
        } else {
            Err(Error::SpaceMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_space(other)?;
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.add_term(m, c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::from_terms(&self.space, self.terms().map(|(m, c)| (m, c * s)))
    }

    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_space(other)?;
        let mut out = Self::zero(&self.space);
        for (ma, ca) in self.terms() {
            for (mb, cb) in other.terms() {
                if ma & mb == 0 {
                    out.add_term(ma | mb, ca * cb * merge_sign(ma, mb));
                }
            }
        }
        Ok(out)
    }

    /// `x_i · f`.
    pub fn mul_generator(&self, i: usize) -> Result<Self> {
        self.space.check(i)?;
        let bit = 1u32 << i;
        Ok(Self::from_terms(
            &self.space,
            self.terms()
                .filter(|(m, _)| m & bit == 0)
                .map(|(m, c)| (m | bit, c * parity_sign((m & (bit - 1)).count_ones()))),
        ))
    }

    /// `∂_i f`: move `x_i` to the front, then drop it.
    pub fn left_derivative(&self, i: usize) -> Result<Self> {
        self.space.check(i)?;
        let bit = 1u32 << i;
        Ok(Self::from_terms(
            &self.space,
            self.terms()
                .filter(|(m, _)| m & bit != 0)
                .map(|(m, c)| (m & !bit, c * parity_sign((m & (bit - 1)).count_ones()))),
        ))
    }

    /// `f ∂⃖_i`: move `x_i` to the back, then drop it.
    pub fn right_derivative(&self, i: usize) -> Result<Self> {
        self.space.check(i)?;
        let bit = 1u32 << i;
        Ok(Self::from_terms(
            &self.space,
            self.terms()
                .filter(|(m, _)| m & bit != 0)
                .map(|(m, c)| (m & !bit, c * parity_sign((m >> i >> 1).count_ones()))),
        ))
    }

    /// Multiple Berezin integral `∫⋯∫ f dx_{v0} dx_{v1} ⋯`: the first listed
    /// variable is the innermost one and is integrated first.
    pub fn berezin_integral(&self, vars: &[usize]) -> Result<Self> {
        let mut seen = 0u32;
        for &v in vars {
            self.space.check(v)?;
            if seen & (1 << v) != 0 {
                return Err(Error::RepeatedVariable(self.space.label(v)?));
            }
            seen |= 1 << v;
        }
        let mut out = self.clone();
        for &v in vars {
            out = out.right_derivative(v)?;
        }
        Ok(out)
    }

    /// `exp q` for an even `q` without constant term, by the finite Taylor sum.
    pub fn exp_even(&self) -> Result<Self> {
        if self.coeffs.keys().any(|&m| m == 0 || m.count_ones() % 2 == 1) {
            return Err(Error::NotEvenNilpotent);
        }
        let mut sum = Self::one(&self.space);
        let mut term = Self::one(&self.space);
        for k in 1..=self.space.len() / 2 {
            term = term.multiply(self)?.scale(C64::new(1.0 / k as f64, 0.0));
            if term.is_zero() {
                break;
            }
            sum = sum.add(&term)?;
        }
        Ok(sum)
    }

    /// Substitutes `x_i ↦ λ x_i`.
    pub fn rescale_generator(&self, i: usize, lambda: C64) -> Result<Self> {
        self.space.check(i)?;
        let bit = 1u32 << i;
        Ok(Self::from_terms(
            &self.space,
            self.terms().map(|(m, c)| (m, if m & bit != 0 { c * lambda } else { c })),
        ))
    }

    /// `(∂_i + x_i) Γ_{≠i} f`, where `Γ_{≠i}` flips the sign of monomials with
    /// an odd number of generators other than `x_i`. Applying it twice gives
    /// back `f`.
    pub fn interchange(&self, i: usize) -> Result<Self> {
        self.space.check(i)?;
        let bit = 1u32 << i;
        let gamma = Self::from_terms(
            &self.space,
            self.terms().map(|(m, c)| (m, c * parity_sign((m & !bit).count_ones()))),
        );
        gamma.left_derivative(i)?.add(&gamma.mul_generator(i)?)
    }

    /// Re-expresses the element over another space that contains all the
    /// generators it uses, reordering every monomial with its sign.
    pub fn transfer(&self, target: &Arc<GeneratorSpace>) -> Result<Self> {
        let map: Vec<usize> = self
            .space
            .labels()
            .iter()
            .map(|t| target.require(t))
            .collect::<Result<_>>()?;
        let mut out = Self::zero(target);
        for (m, c) in self.terms() {
            let mut mask = 0u32;
            let mut sign = 1.0;
            let mut rest = m;
            while rest != 0 {
                let j = map[rest.trailing_zeros() as usize];
                // x_j is appended after the generators already placed
                sign *= merge_sign(mask, 1 << j);
                mask |= 1 << j;
                rest &= rest - 1;
            }
            out.add_term(mask, c * sign);
        }
        Ok(out)
    }

    /// Restriction to the subspace spanned by monomials in `target`'s
    /// generators: terms involving other generators are dropped.
    pub fn project(&self, target: &Arc<GeneratorSpace>) -> Result<Self> {
        let inside: u32 = self
            .space
            .labels()
            .iter()
            .enumerate()
            .filter(|(_, t)| target.index_of(t).is_some())
            .fold(0, |acc, (i, _)| acc | (1 << i));
        let kept = Self::from_terms(&self.space, self.terms().filter(|(m, _)| m & !inside == 0));
        let mut out = Self::zero(target);
        for (m, c) in kept.terms() {
            let labels: Vec<Tet> = (0..self.space.len()).filter(|i| m & (1 << i) != 0).map(|i| self.space.labels[i]).collect();
            let single = GeneratorSpace::new(labels)?;
            let mono = Self::monomial(&single, single.top_mask(), c);
            for (mm, cc) in mono.transfer(target)?.terms() {
                out.add_term(mm, cc);
            }
        }
        Ok(out)
    }

    /// Drops coefficients below `1e-14 ·` the largest magnitude.
    pub fn normalize(&self) -> Self {
        let cut = 1e-14 * self.max_abs();
        Self::from_terms(&self.space, self.terms().filter(|(_, c)| c.norm() >= cut && c.norm() > 0.0))
    }

    /// Dense coefficient vector of length `2ⁿ`, indexed by mask.
    pub fn to_dense(&self) -> Vec<C64> {
        let mut v = vec![C64::default(); 1usize << self.space.len()];
        for (m, c) in self.terms() {
            v[m as usize] = c;
        }
        v
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        Ok(self.sub(other)?.max_abs())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn space(n: usize) -> Arc<GeneratorSpace> {
        // n distinct sorted 4-tuples in lexicographic order
        GeneratorSpace::new((0..n as u32).map(|k| [1, 2, 3, 4 + k])).unwrap()
    }

    fn x(s: &Arc<GeneratorSpace>, i: usize) -> GrassmannElement {
        GrassmannElement::generator(s, i).unwrap()
    }

    fn mono(s: &Arc<GeneratorSpace>, idx: &[usize], k: f64) -> GrassmannElement {
        GrassmannElement::monomial(s, idx.iter().fold(0, |m, &i| m | (1 << i)), c(k))
    }

    #[test]
    fn space_validation() {
        assert!(GeneratorSpace::new(vec![[1, 2, 3, 4], [1, 2, 3, 4]]).is_err());
        assert!(GeneratorSpace::new(vec![[1, 3, 2, 4]]).is_err());
        let s = GeneratorSpace::new(vec![[2, 3, 4, 5], [1, 2, 3, 4]]).unwrap();
        assert_eq!(s.labels()[0], [1, 2, 3, 4]);
    }

    #[test]
    fn product_examples() {
        let s = space(4);
        assert_eq!(x(&s, 0).multiply(&x(&s, 1)).unwrap(), mono(&s, &[0, 1], 1.0));
        assert_eq!(x(&s, 1).multiply(&x(&s, 0)).unwrap(), mono(&s, &[0, 1], -1.0));
        let one = GrassmannElement::one(&s);
        let a = one.add(&mono(&s, &[0, 1], 1.0)).unwrap();
        let b = one.add(&mono(&s, &[2, 3], 1.0)).unwrap();
        let expect = GrassmannElement::from_terms(&s, [(0, c(1.0)), (0b0011, c(1.0)), (0b1100, c(1.0)), (0b1111, c(1.0))]);
        assert_eq!(a.multiply(&b).unwrap(), expect);
        assert!(x(&s, 2).multiply(&x(&s, 2)).unwrap().is_zero());
    }

    #[test]
    fn mismatched_spaces_error() {
        let a = GrassmannElement::one(&space(2));
        let b = GrassmannElement::one(&space(3));
        assert_eq!(a.multiply(&b), Err(Error::SpaceMismatch));
    }

    #[test]
    fn derivative_examples() {
        let s = space(3);
        let x12 = mono(&s, &[0, 1], 1.0);
        assert_eq!(x12.left_derivative(0).unwrap(), x(&s, 1));
        assert!(mono(&s, &[1, 2], 1.0).left_derivative(0).unwrap().is_zero());
        assert_eq!(x12.left_derivative(1).unwrap(), x(&s, 0).scale(c(-1.0)));
        assert_eq!(x12.right_derivative(1).unwrap(), x(&s, 0));
        assert_eq!(x12.right_derivative(0).unwrap(), x(&s, 1).scale(c(-1.0)));
        assert!(mono(&s, &[1, 2], 1.0).right_derivative(0).unwrap().is_zero());
    }

    #[test]
    fn berezin_examples() {
        let s = space(2);
        assert_eq!(x(&s, 0).berezin_integral(&[0]).unwrap(), GrassmannElement::one(&s));
        assert!(GrassmannElement::one(&s).berezin_integral(&[0]).unwrap().is_zero());
        let x21 = x(&s, 1).multiply(&x(&s, 0)).unwrap();
        assert_eq!(x21.berezin_integral(&[0, 1]).unwrap(), GrassmannElement::one(&s));
        assert_eq!(
            x21.berezin_integral(&[0, 0]),
            Err(Error::RepeatedVariable(s.label(0).unwrap()))
        );
    }

    #[test]
    fn exp_examples() {
        let s = space(4);
        let (l, m, n) = (c(2.0), c(-3.0), C64::new(0.5, 1.0));
        let q = mono(&s, &[0, 1], 1.0).scale(l)
            .add(&mono(&s, &[1, 2], 1.0).scale(m)).unwrap()
            .add(&mono(&s, &[2, 3], 1.0).scale(n)).unwrap();
        let expect = GrassmannElement::one(&s).add(&q).unwrap().add(&mono(&s, &[0, 1, 2, 3], 1.0).scale(l * n)).unwrap();
        assert!(q.exp_even().unwrap().max_abs_diff(&expect).unwrap() < 1e-15);
        assert_eq!(GrassmannElement::zero(&s).exp_even().unwrap(), GrassmannElement::one(&s));
        let q2 = mono(&s, &[0, 1], 1.0).add(&mono(&s, &[2, 3], 1.0)).unwrap();
        let e2 = GrassmannElement::from_terms(&s, [(0, c(1.0)), (0b0011, c(1.0)), (0b1100, c(1.0)), (0b1111, c(1.0))]);
        assert_eq!(q2.exp_even().unwrap(), e2);
        assert_eq!(x(&s, 0).exp_even(), Err(Error::NotEvenNilpotent));
        assert_eq!(GrassmannElement::one(&s).exp_even(), Err(Error::NotEvenNilpotent));
    }

    #[test]
    fn interchange_is_involution() {
        let s = space(3);
        let f = GrassmannElement::from_terms(&s, [(0, c(1.0)), (0b011, c(2.0)), (0b110, c(-0.5)), (0b101, c(3.0))]);
        let back = f.interchange(1).unwrap().interchange(1).unwrap();
        assert!(back.max_abs_diff(&f).unwrap() < 1e-15);
    }

    #[test]
    fn transfer_reorders_with_sign() {
        let small = GeneratorSpace::new(vec![[1, 2, 3, 5], [2, 3, 4, 5]]).unwrap();
        let big = GeneratorSpace::new(vec![[1, 2, 3, 4], [1, 2, 3, 5], [1, 2, 4, 5], [2, 3, 4, 5]]).unwrap();
        let f = GrassmannElement::monomial(&small, 0b11, c(1.0));
        let g = f.transfer(&big).unwrap();
        assert_eq!(g.coeff(0b1010), c(1.0));
        assert_eq!(g.project(&small).unwrap(), f);
    }

    fn element(n: usize, parity: Option<u32>) -> impl Strategy<Value = Vec<(u32, f64, f64)>> {
        let max = 1u32 << n;
        prop::collection::vec((0..max, -1.0..1.0f64, -1.0..1.0f64), 1..8).prop_map(move |v| {
            v.into_iter()
                .filter(|(m, _, _)| parity.is_none_or(|p| m.count_ones() % 2 == p))
                .collect()
        })
    }

    fn build(s: &Arc<GeneratorSpace>, t: &[(u32, f64, f64)]) -> GrassmannElement {
        GrassmannElement::from_terms(s, t.iter().map(|&(m, re, im)| (m, C64::new(re, im))))
    }

    proptest! {
        #[test]
        fn anticommutativity(pa in 0u32..2, pb in 0u32..2, a in element(6, None), b in element(6, None)) {
            let s = space(6);
            let fa = build(&s, &a.into_iter().filter(|t| t.0.count_ones() % 2 == pa).collect::<Vec<_>>());
            let fb = build(&s, &b.into_iter().filter(|t| t.0.count_ones() % 2 == pb).collect::<Vec<_>>());
            let sign = if pa * pb == 1 { -1.0 } else { 1.0 };
            let lhs = fa.multiply(&fb).unwrap();
            let rhs = fb.multiply(&fa).unwrap().scale(c(sign));
            prop_assert!(lhs.max_abs_diff(&rhs).unwrap() <= 1e-12 * (1.0 + lhs.max_abs()));
        }

        #[test]
        fn leibniz(p in 0u32..2, f in element(6, None), g in element(6, None), i in 0usize..6) {
            let s = space(6);
            let f = build(&s, &f.into_iter().filter(|t| t.0.count_ones() % 2 == p).collect::<Vec<_>>());
            let g = build(&s, &g);
            let eps = if p == 1 { -1.0 } else { 1.0 };
            let lhs = f.multiply(&g).unwrap().left_derivative(i).unwrap();
            let rhs = f.left_derivative(i).unwrap().multiply(&g).unwrap()
                .add(&f.multiply(&g.left_derivative(i).unwrap()).unwrap().scale(c(eps))).unwrap();
            prop_assert!(lhs.max_abs_diff(&rhs).unwrap() <= 1e-12 * (1.0 + lhs.max_abs()));
            // right analogue: (g f)∂⃖ = g (f∂⃖) + ε (g∂⃖) f
            let lhs = g.multiply(&f).unwrap().right_derivative(i).unwrap();
            let rhs = g.multiply(&f.right_derivative(i).unwrap()).unwrap()
                .add(&g.right_derivative(i).unwrap().multiply(&f).unwrap().scale(c(eps))).unwrap();
            prop_assert!(lhs.max_abs_diff(&rhs).unwrap() <= 1e-12 * (1.0 + lhs.max_abs()));
        }

        #[test]
        fn exp_inverse(q in element(6, Some(0))) {
            let s = space(6);
            let q = build(&s, &q.into_iter().filter(|t| t.0 != 0).collect::<Vec<_>>());
            let prod = q.exp_even().unwrap().multiply(&q.scale(c(-1.0)).exp_even().unwrap()).unwrap();
            prop_assert!(prod.max_abs_diff(&GrassmannElement::one(&s)).unwrap() <= 1e-12);
        }

        #[test]
        fn berezin_matches_right_derivative(m in 0u32..64, i in 0usize..6) {
            let s = space(6);
            let f = GrassmannElement::monomial(&s, m, c(1.0));
            prop_assert_eq!(f.berezin_integral(&[i]).unwrap(), f.right_derivative(i).unwrap());
        }
    }
}
