//! Small dense complex linear algebra on top of nalgebra's SVD.
//!
//! Every rank decision in the crate goes through [`singular_values`] with a
//! tolerance relative to the largest singular value.

use nalgebra::DMatrix;

use crate::C64;

pub type CMatrix = DMatrix<C64>;

/// Relative singular-value cutoff used for kernels and ranks unless a caller
/// overrides it.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// Singular values in decreasing order together with the matching rows of
/// `Vᴴ` (n × n, one right singular vector per row, conjugated).
fn full_svd(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let (rows, cols) = m.shape();
    if cols == 0 {
        return (Vec::new(), CMatrix::zeros(0, 0));
    }
    // Zero rows do not change the kernel but make the thin SVD return a full Vᴴ.
    let padded = if rows < cols {
        let mut p = CMatrix::zeros(cols, cols);
        p.view_mut((0, 0), (rows, cols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let sv = svd.singular_values;
    let mut order: Vec<usize> = (0..sv.len()).collect();
    order.sort_by(|&a, &b| sv[b].partial_cmp(&sv[a]).unwrap_or(std::cmp::Ordering::Equal));
    let mut sorted_v = CMatrix::zeros(order.len(), cols);
    for (dst, &src) in order.iter().enumerate() {
        sorted_v.set_row(dst, &v_t.row(src));
    }
    (order.iter().map(|&i| sv[i]).collect(), sorted_v)
}

pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return Vec::new();
    }
    let mut sv: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    sv
}

fn numeric_rank(sv: &[f64], tol: f64) -> usize {
    match sv.first() {
        Some(&top) if top > 0.0 => sv.iter().filter(|&&s| s > tol * top).count(),
        _ => 0,
    }
}

pub fn rank(m: &CMatrix, tol: f64) -> usize {
    numeric_rank(&singular_values(m), tol)
}

/// Orthonormal basis of `{v : M v = 0}`, one vector per column. Singular
/// values at or below `tol · σ_max` count as zero.
pub fn nullspace(m: &CMatrix, tol: f64) -> CMatrix {
    let cols = m.ncols();
    let (sv, v_rows) = full_svd(m);
    let r = numeric_rank(&sv, tol);
    let mut k = CMatrix::zeros(cols, cols - r);
    for (j, i) in (r..cols).enumerate() {
        for c in 0..cols {
            k[(c, j)] = v_rows[(i, c)].conj();
        }
    }
    k
}

/// Orthonormal rows spanning the row space of `m`.
pub fn row_space(m: &CMatrix, tol: f64) -> CMatrix {
    let (sv, v_rows) = full_svd(m);
    let r = numeric_rank(&sv, tol);
    v_rows.rows(0, r).into_owned()
}

/// Sine of the largest principal angle between the row spaces of `a` and `b`.
///
/// Computed as the norm of the component of one orthonormal basis orthogonal
/// to the other, which stays accurate for tiny angles where `acos` does not.
/// Spaces of different dimension are reported as 1.
pub fn max_principal_sine(a: &CMatrix, b: &CMatrix) -> f64 {
    let qa = row_space(a, DEFAULT_RANK_TOL);
    let qb = row_space(b, DEFAULT_RANK_TOL);
    if qa.nrows() != qb.nrows() {
        return 1.0;
    }
    if qa.nrows() == 0 {
        return 0.0;
    }
    let one_way = |x: &CMatrix, y: &CMatrix| {
        let residual = x - x * y.adjoint() * y;
        singular_values(&residual).first().copied().unwrap_or(0.0)
    };
    one_way(&qa, &qb).max(one_way(&qb, &qa))
}

/// Least-squares `c` minimising `‖a − c·b‖`, with the relative residual
/// `‖a − c·b‖ / ‖a‖`.
pub fn proportionality(a: &[C64], b: &[C64]) -> (C64, f64) {
    let bb: f64 = b.iter().map(|z| z.norm_sqr()).sum();
    let ab: C64 = a.iter().zip(b).map(|(x, y)| y.conj() * x).sum();
    let c = if bb > 0.0 { ab / bb } else { C64::new(0.0, 0.0) };
    let an: f64 = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let rn: f64 = a
        .iter()
        .zip(b)
        .map(|(x, y)| (x - c * y).norm_sqr())
        .sum::<f64>()
        .sqrt();
    (c, if an > 0.0 { rn / an } else { rn })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn identity_has_trivial_kernel() {
        let m = CMatrix::identity(3, 3);
        assert_eq!(nullspace(&m, DEFAULT_RANK_TOL).ncols(), 0);
    }

    #[test]
    fn zero_matrix_kernel_is_everything() {
        let m = CMatrix::zeros(4, 4);
        assert_eq!(nullspace(&m, DEFAULT_RANK_TOL).ncols(), 4);
    }

    #[test]
    fn rank_one_outer_product() {
        let u = [c(1.0, 0.5), c(-0.3, 2.0), c(0.7, 0.0), c(0.0, -1.0), c(2.0, 2.0)];
        let v = [c(0.2, 0.1), c(1.0, 0.0), c(-1.0, 0.3), c(0.5, 0.5), c(0.0, 1.5)];
        let m = CMatrix::from_fn(5, 5, |i, j| u[i] * v[j]);
        // oracle: every 2×2 minor vanishes, so rank is 1
        assert_eq!(rank(&m, DEFAULT_RANK_TOL), 1);
        let k = nullspace(&m, DEFAULT_RANK_TOL);
        assert_eq!(k.ncols(), 4);
        assert!((&m * &k).camax() < 1e-13);
    }

    #[test]
    fn wide_matrix_kernel() {
        let m = CMatrix::from_row_slice(1, 3, &[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        let k = nullspace(&m, DEFAULT_RANK_TOL);
        assert_eq!(k.ncols(), 2);
        assert!((&m * &k).camax() < 1e-14);
        let gram = k.adjoint() * &k;
        assert!((gram - CMatrix::identity(2, 2)).camax() < 1e-14);
    }

    #[test]
    fn principal_sine_detects_rotation() {
        let a = CMatrix::from_row_slice(1, 2, &[c(1.0, 0.0), c(0.0, 0.0)]);
        let th: f64 = 1e-3;
        let b = CMatrix::from_row_slice(1, 2, &[c(th.cos(), 0.0), c(th.sin(), 0.0)]);
        assert!((max_principal_sine(&a, &b) - th.sin()).abs() < 1e-15);
        let b2 = CMatrix::from_row_slice(1, 2, &[c(0.0, 3.0), c(0.0, 0.0)]);
        assert!(max_principal_sine(&a, &b2) < 1e-15);
    }
}
