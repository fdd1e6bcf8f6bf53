//! Dense complex linear algebra used across the crate.
//!
//! Everything is a thin layer over `nalgebra`'s SVD: column spaces, numerical
//! rank, one-dimensional null spaces and principal angles between subspaces.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn frobenius(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_abs(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Swap operator on `C^n (x) C^n`, basis `x_i (x) x_j` at index `i * n + j`.
pub fn swap(n: usize) -> CMatrix {
    let mut p = CMatrix::zeros(n * n, n * n);
    for i in 0..n {
        for j in 0..n {
            p[(j * n + i, i * n + j)] = Complex64::new(1.0, 0.0);
        }
    }
    p
}

/// Relative reconstruction error above which a decomposition is rejected.
pub const SVD_RECON_TOL: f64 = 1e-12;

/// Thin singular value decomposition `a = u diag(s) v^H`, singular values
/// in decreasing order.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: CMatrix,
    pub singular_values: Vec<f64>,
    pub v: CMatrix,
    /// `||u diag(s) v^H - a||_F / ||a||_F` of the accepted attempt.
    pub recon_error: f64,
}

/// Unitary DFT matrix of size `n`.
fn dft(n: usize) -> CMatrix {
    let scale = 1.0 / (n as f64).sqrt();
    CMatrix::from_fn(n, n, |i, j| {
        Complex64::from_polar(scale, 2.0 * std::f64::consts::PI * ((i * j) % n) as f64 / n as f64)
    })
}

fn raw_svd(a: &CMatrix) -> (CMatrix, Vec<f64>, CMatrix) {
    let svd = a.clone().svd(true, true);
    let (u, v_t) = (svd.u.expect("requested"), svd.v_t.expect("requested"));
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let k = order.len();
    let mut uu = CMatrix::zeros(u.nrows(), k);
    let mut vv = CMatrix::zeros(v_t.ncols(), k);
    for (col, &i) in order.iter().enumerate() {
        uu.set_column(col, &u.column(i));
        vv.set_column(col, &v_t.row(i).adjoint());
    }
    (uu, order.iter().map(|&i| svd.singular_values[i]).collect(), vv)
}

fn recon_error(a: &CMatrix, u: &CMatrix, s: &[f64], v: &CMatrix) -> f64 {
    let mut us = u.clone();
    for (j, &x) in s.iter().enumerate() {
        us.column_mut(j).scale_mut(x);
    }
    let norm = frobenius(a);
    if norm == 0.0 {
        return 0.0;
    }
    frobenius(&(us * v.adjoint() - a)) / norm
}

/// SVD with a reconstruction check.
///
/// `nalgebra`'s complex SVD occasionally returns an inaccurate factorization,
/// more often at large matrix norms and clustered singular values. The input
/// is scaled to unit max-entry first; if the result still fails the check, the
/// adjoint and DFT-rotated copies (same singular values, factors related by
/// known unitaries) are tried. The most accurate attempt is returned.
///
/// Panics on non-finite input, on which the underlying iteration does not terminate.
pub fn svd(a: &CMatrix) -> Svd {
    assert!(a.iter().all(|x| x.is_finite()), "svd of a matrix with non-finite entries");
    let scale = max_abs(a);
    let (m, n) = a.shape();
    if scale == 0.0 || m == 0 || n == 0 {
        let k = m.min(n);
        return Svd {
            u: CMatrix::identity(m, k),
            singular_values: vec![0.0; k],
            v: CMatrix::identity(n, k),
            recon_error: 0.0,
        };
    }
    let b = a / Complex64::new(scale, 0.0);
    let mut best: Option<Svd> = None;
    for attempt in 0..4 {
        let (u, s, v) = match attempt {
            0 => raw_svd(&b),
            1 => {
                let (u, s, v) = raw_svd(&b.adjoint());
                (v, s, u)
            }
            2 => {
                let f = dft(n);
                let (u, s, v) = raw_svd(&(&b * &f));
                (u, s, f * v)
            }
            _ => {
                let f = dft(m);
                let (u, s, v) = raw_svd(&(&f * &b));
                (f.adjoint() * u, s, v)
            }
        };
        let err = recon_error(&b, &u, &s, &v);
        let candidate = Svd { u, singular_values: s.iter().map(|x| x * scale).collect(), v, recon_error: err };
        if err <= SVD_RECON_TOL {
            return candidate;
        }
        if best.as_ref().is_none_or(|b| err < b.recon_error) {
            best = Some(candidate);
        }
    }
    best.expect("at least one attempt")
}

/// Singular values sorted in decreasing order.
pub fn singular_values(a: &CMatrix) -> Vec<f64> {
    svd(a).singular_values
}

/// Orthonormal basis of the column space of `a`, keeping singular values
/// above `rel_cutoff * sigma_max`. Returns the basis and the full list of
/// singular values (decreasing).
pub fn column_space(a: &CMatrix, rel_cutoff: f64) -> (CMatrix, Vec<f64>) {
    let d = svd(a);
    let sigma = d.singular_values;
    let smax = sigma.first().copied().unwrap_or(0.0);
    let rank = sigma.iter().filter(|&&s| s > rel_cutoff * smax && s > 0.0).count();
    (d.u.columns(0, rank).into_owned(), sigma)
}

pub fn numerical_rank(a: &CMatrix, rel_cutoff: f64) -> usize {
    let s = singular_values(a);
    let smax = s.first().copied().unwrap_or(0.0);
    s.iter().filter(|&&x| x > rel_cutoff * smax && x > 0.0).count()
}

/// Largest principal angle between the column spans of two orthonormal
/// bases of equal dimension.
///
/// Computed as `asin` of the spectral norm of `(I - Q1 Q1^H) Q2`, which keeps
/// full relative accuracy for tiny angles (the `acos` of the smallest cosine
/// cannot resolve angles much below 1e-8).
pub fn largest_principal_angle(q1: &CMatrix, q2: &CMatrix) -> f64 {
    if q1.ncols() != q2.ncols() {
        return std::f64::consts::FRAC_PI_2;
    }
    if q1.ncols() == 0 || q1 == q2 {
        return 0.0;
    }
    let residual = q2 - q1 * (q1.adjoint() * q2);
    let s = singular_values(&residual);
    s[0].min(1.0).asin()
}

/// Null space of a (tall) matrix, assumed one-dimensional.
///
/// Returns the unit null vector together with the two smallest singular
/// values `(sigma_min, sigma_next)`.
pub fn null_vector(a: &CMatrix) -> (nalgebra::DVector<Complex64>, f64, f64) {
    assert!(a.nrows() >= a.ncols(), "null_vector expects a tall matrix");
    let d = svd(a);
    let k = d.singular_values.len();
    let next = if k >= 2 { d.singular_values[k - 2] } else { f64::INFINITY };
    (d.v.column(k - 1).into_owned(), d.singular_values[k - 1], next)
}

/// Matrix power by repeated squaring.
pub fn matrix_pow(a: &CMatrix, mut e: u64) -> CMatrix {
    let mut result = identity(a.nrows());
    let mut base = a.clone();
    while e > 0 {
        if e & 1 == 1 {
            result = &result * &base;
        }
        base = &base * &base;
        e >>= 1;
    }
    result
}
