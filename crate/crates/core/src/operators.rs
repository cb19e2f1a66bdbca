//! Degree-one Clifford operators `Σ (β_t ∂_t + γ_t x_t)`, their scalar
//! product and the subspaces they span.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grassmann::{GeneratorSpace, GrassmannElement};
use crate::linalg::{self, CMatrix, DEFAULT_RANK_TOL};
use crate::weights::WeightMatrix;
use crate::C64;

pub use crate::linalg::nullspace;

#[derive(Debug, Clone, PartialEq)]
pub struct LinearOperator {
    space: Arc<GeneratorSpace>,
    beta: Vec<C64>,
    gamma: Vec<C64>,
}

impl LinearOperator {
    pub fn zero(space: &Arc<GeneratorSpace>) -> Self {
        LinearOperator {
            space: space.clone(),
            beta: vec![C64::default(); space.len()],
            gamma: vec![C64::default(); space.len()],
        }
    }

    /// `∂_i`.
    pub fn derivative(space: &Arc<GeneratorSpace>, i: usize) -> Result<Self> {
        let mut d = Self::zero(space);
        d.set_component(i, C64::new(1.0, 0.0), C64::default())?;
        Ok(d)
    }

    /// Left multiplication by `x_i`.
    pub fn multiplication(space: &Arc<GeneratorSpace>, i: usize) -> Result<Self> {
        let mut d = Self::zero(space);
        d.set_component(i, C64::default(), C64::new(1.0, 0.0))?;
        Ok(d)
    }

    /// From the `2n` coefficients laid out as all `β` then all `γ`.
    pub fn from_coefficients(space: &Arc<GeneratorSpace>, coeffs: &[C64]) -> Result<Self> {
        let n = space.len();
        if coeffs.len() != 2 * n {
            return Err(Error::Numeric(format!("expected {} coefficients, got {}", 2 * n, coeffs.len())));
        }
        Ok(LinearOperator {
            space: space.clone(),
            beta: coeffs[..n].to_vec(),
            gamma: coeffs[n..].to_vec(),
        })
    }

    pub fn space(&self) -> &Arc<GeneratorSpace> {
        &self.space
    }

    pub fn coefficients(&self) -> Vec<C64> {
        self.beta.iter().chain(&self.gamma).copied().collect()
    }

    /// `(β_i, γ_i)`.
    pub fn component_at(&self, i: usize) -> Result<(C64, C64)> {
        if i >= self.space.len() {
            return Err(Error::GeneratorIndex(i));
        }
        Ok((self.beta[i], self.gamma[i]))
    }

    pub fn set_component(&mut self, i: usize, beta: C64, gamma: C64) -> Result<()> {
        if i >= self.space.len() {
            return Err(Error::GeneratorIndex(i));
        }
        self.beta[i] = beta;
        self.gamma[i] = gamma;
        Ok(())
    }

    pub fn max_abs(&self) -> f64 {
        self.beta.iter().chain(&self.gamma).map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn norm(&self) -> f64 {
        self.beta.iter().chain(&self.gamma).map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Generators with a component above `1e-12 ·` the largest coefficient.
    pub fn support(&self) -> Vec<usize> {
        let cut = 1e-12 * self.max_abs();
        (0..self.space.len())
            .filter(|&i| self.beta[i].norm() > cut || self.gamma[i].norm() > cut)
            .collect()
    }

    pub fn scale(&self, s: C64) -> Self {
        LinearOperator {
            space: self.space.clone(),
            beta: self.beta.iter().map(|z| z * s).collect(),
            gamma: self.gamma.iter().map(|z| z * s).collect(),
        }
    }

    fn check_space(&self, other: &Arc<GeneratorSpace>) -> Result<()> {
        if Arc::ptr_eq(&self.space, other) || *self.space == **other {
            Ok(())
        } else {
            Err(Error::SpaceMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_space(&other.space)?;
        Ok(LinearOperator {
            space: self.space.clone(),
            beta: self.beta.iter().zip(&other.beta).map(|(a, b)| a + b).collect(),
            gamma: self.gamma.iter().zip(&other.gamma).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn apply(&self, f: &GrassmannElement) -> Result<GrassmannElement> {
        self.check_space(f.space())?;
        let mut out = GrassmannElement::zero(f.space());
        for i in 0..self.space.len() {
            if self.beta[i] != C64::default() {
                out = out.add(&f.left_derivative(i)?.scale(self.beta[i]))?;
            }
            if self.gamma[i] != C64::default() {
                out = out.add(&f.mul_generator(i)?.scale(self.gamma[i]))?;
            }
        }
        Ok(out)
    }

    /// `⟨d1, d2⟩_i = β¹_i γ²_i + β²_i γ¹_i`.
    pub fn partial_scalar_product(&self, other: &Self, i: usize) -> Result<C64> {
        self.check_space(&other.space)?;
        if i >= self.space.len() {
            return Err(Error::GeneratorIndex(i));
        }
        Ok(self.beta[i] * other.gamma[i] + other.beta[i] * self.gamma[i])
    }

    /// `⟨d1, d2⟩`, the scalar in `d1 d2 + d2 d1 = ⟨d1, d2⟩`.
    pub fn scalar_product(&self, other: &Self) -> Result<C64> {
        self.check_space(&other.space)?;
        (0..self.space.len()).map(|i| self.partial_scalar_product(other, i)).sum()
    }
}

/// A subspace of operators over one generator space.
#[derive(Debug, Clone)]
pub struct OperatorSubspace {
    space: Arc<GeneratorSpace>,
    basis: Vec<LinearOperator>,
}

impl OperatorSubspace {
    /// Uses `basis` as given; it must be linearly independent at 1e-10.
    pub fn from_basis(space: &Arc<GeneratorSpace>, basis: Vec<LinearOperator>) -> Result<Self> {
        for d in &basis {
            d.check_space(space)?;
        }
        let sub = OperatorSubspace {
            space: space.clone(),
            basis,
        };
        let r = linalg::rank(&sub.matrix(), DEFAULT_RANK_TOL);
        if r != sub.basis.len() {
            return Err(Error::NonGeneric {
                what: "operator basis".into(),
                expected: sub.basis.len(),
                found: r,
            });
        }
        Ok(sub)
    }

    /// Orthonormal basis of the span of `ops`, dropping dependent directions.
    pub fn span(space: &Arc<GeneratorSpace>, ops: &[LinearOperator]) -> Result<Self> {
        for d in ops {
            d.check_space(space)?;
        }
        let n = space.len();
        let m = CMatrix::from_fn(ops.len(), 2 * n, |r, c| ops[r].coefficients()[c]);
        let q = linalg::row_space(&m, DEFAULT_RANK_TOL);
        let basis = (0..q.nrows())
            .map(|r| LinearOperator::from_coefficients(space, &q.row(r).iter().copied().collect::<Vec<_>>()))
            .collect::<Result<_>>()?;
        Ok(OperatorSubspace {
            space: space.clone(),
            basis,
        })
    }

    pub fn space(&self) -> &Arc<GeneratorSpace> {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[LinearOperator] {
        &self.basis
    }

    /// Rows are basis operators, columns all `β` then all `γ`.
    pub fn matrix(&self) -> CMatrix {
        let n = self.space.len();
        let mut m = CMatrix::zeros(self.basis.len(), 2 * n);
        for (r, d) in self.basis.iter().enumerate() {
            for (c, z) in d.coefficients().into_iter().enumerate() {
                m[(r, c)] = z;
            }
        }
        m
    }

    /// Largest `|⟨d_a, d_b⟩|` over pairs of basis operators, diagonal included.
    pub fn max_scalar_product(&self) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for a in &self.basis {
            for b in &self.basis {
                worst = worst.max(a.scalar_product(b)?.norm());
            }
        }
        Ok(worst)
    }

    /// Sine of the largest principal angle to another subspace.
    pub fn max_principal_sine(&self, other: &Self) -> Result<f64> {
        if *self.space != *other.space {
            return Err(Error::SpaceMismatch);
        }
        Ok(linalg::max_principal_sine(&self.matrix(), &other.matrix()))
    }

    /// Largest coefficient of `d(w)` over the basis, relative to `max|w|`.
    pub fn annihilation_residual(&self, w: &GrassmannElement) -> Result<f64> {
        let scale = w.max_abs();
        let mut worst: f64 = 0.0;
        for d in &self.basis {
            worst = worst.max(d.apply(w)?.max_abs() / d.max_abs().max(f64::MIN_POSITIVE));
        }
        Ok(if scale > 0.0 { worst / scale } else { worst })
    }
}

/// The rows of `p + F x`: operator `a` is `∂_a + Σ_c F[a,c] x_c` with
/// rows and columns in the simplex's opposite-vertex order.
pub fn isotropic_span_from_f(f: &WeightMatrix) -> Result<OperatorSubspace> {
    let space = f.space();
    let basis = f.rows_as_operators(&space)?;
    OperatorSubspace::from_basis(&space, basis)
}

/// All operators supported on `candidates` that annihilate `w`, as the kernel
/// of `(β, γ) ↦ coefficients of d(w)`.
pub fn annihilator_of(w: &GrassmannElement, candidates: &[usize]) -> Result<OperatorSubspace> {
    annihilator_of_with_tol(w, candidates, DEFAULT_RANK_TOL)
}

pub fn annihilator_of_with_tol(w: &GrassmannElement, candidates: &[usize], tol: f64) -> Result<OperatorSubspace> {
    let space = w.space().clone();
    if w.is_zero() {
        return Err(Error::Degenerate("annihilator of the zero element".into()));
    }
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(2 * candidates.len());
    for &i in candidates {
        cols.push(w.left_derivative(i)?.to_dense());
        cols.push(w.mul_generator(i)?.to_dense());
    }
    let rows = 1usize << space.len();
    let m = CMatrix::from_fn(rows, cols.len(), |r, c| cols[c][r]);
    let k = linalg::nullspace(&m, tol);
    let mut basis = Vec::with_capacity(k.ncols());
    for j in 0..k.ncols() {
        let mut d = LinearOperator::zero(&space);
        for (slot, &i) in candidates.iter().enumerate() {
            d.set_component(i, k[(2 * slot, j)], k[(2 * slot + 1, j)])?;
        }
        basis.push(d);
    }
    Ok(OperatorSubspace { space, basis })
}
