//! The elliptic R-matrix on `V (x) V`.
//!
//! `R(z) = (1/n) e(-n(n+1)z/2) P T_k(z)` with
//! `T_k(z) = sum_{(u,v) in Z_n^2} w_{(u,v)}(-nz) I_{-k'u,v} (x) I_{-k'u,v}^-1`,
//! `I_{a,b} = h^a g^b`, `g x_i = omega^i x_i`, `h x_i = x_{i-1}` and `P` the
//! flip. The basis of `V (x) V` is `x_i (x) x_j` at index `i n + j`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::heisenberg::{intertwiner, HeisAuto, HeisRep};
use crate::linalg::{frobenius, identity, kron, max_abs, swap, CMatrix};
use crate::modcore::{act_triple, check_nk, m_prime, ModularTriple, Sl2Zn, Sl2z};
use crate::theta::{e, w_uv, ThetaParams, WIndex};

/// Entries of `B` below this fraction of `max |B|` are left out of the ratio test.
pub const RATIO_CUTOFF: f64 = 1e-10;

/// Parameters `(n, k, eta, tau)` of `R_{n,k}(z, eta | tau)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RParams {
    n: i64,
    k: i64,
    k_prime: i64,
    eta: Complex64,
    tau: Complex64,
    theta: ThetaParams,
}

impl RParams {
    pub fn new(n: i64, k: i64, eta: Complex64, tau: Complex64) -> Result<Self> {
        RParams::with_theta(n, k, eta, tau, ThetaParams::default())
    }

    pub fn with_theta(n: i64, k: i64, eta: Complex64, tau: Complex64, theta: ThetaParams) -> Result<Self> {
        let k_prime = check_nk(n, k)?;
        if !(tau.im > 0.0) {
            return Err(Error::NotInUpperHalfPlane { im: tau.im });
        }
        Ok(RParams { n, k, k_prime, eta, tau, theta })
    }

    /// Same `(n, k)` and truncation at a different point `(eta | tau)`.
    pub fn at(&self, eta: Complex64, tau: Complex64) -> Result<Self> {
        RParams::with_theta(self.n, self.k, eta, tau, self.theta)
    }

    pub fn n(&self) -> i64 {
        self.n
    }
    pub fn k(&self) -> i64 {
        self.k
    }
    pub fn k_prime(&self) -> i64 {
        self.k_prime
    }
    pub fn eta(&self) -> Complex64 {
        self.eta
    }
    pub fn tau(&self) -> Complex64 {
        self.tau
    }
    pub fn theta(&self) -> ThetaParams {
        self.theta
    }
}

fn omega_pow(e_: i64, n: i64) -> Complex64 {
    e(Complex64::new(e_.rem_euclid(n) as f64 / n as f64, 0.0))
}

/// `I_{a,b} = h^a g^b`: column `j` has `omega^{b j}` in row `j - a`.
pub fn op_i(a: i64, b: i64, n: i64) -> CMatrix {
    let mut m = CMatrix::zeros(n as usize, n as usize);
    for j in 0..n {
        m[((j - a).rem_euclid(n) as usize, j as usize)] = omega_pow(b * j, n);
    }
    m
}

/// `I_{a,b}^-1 = g^-b h^-a`: column `i` has `omega^{-b(i+a)}` in row `i + a`.
pub fn op_i_inv(a: i64, b: i64, n: i64) -> CMatrix {
    let mut m = CMatrix::zeros(n as usize, n as usize);
    for i in 0..n {
        m[((i + a).rem_euclid(n) as usize, i as usize)] = omega_pow(-b * (i + a), n);
    }
    m
}

/// The operator `T_k(z, eta | tau)`, assembled entry by entry.
pub fn t_op(p: &RParams, z: Complex64) -> Result<CMatrix> {
    let n = p.n;
    let nn = (n * n) as usize;
    let mut out = CMatrix::zeros(nn, nn);
    let arg = -z * n as f64;
    for idx in WIndex::all(n) {
        let w = w_uv(idx, arg, p.eta, p.tau, &p.theta)?;
        let a = -p.k_prime * idx.u();
        let b = idx.v();
        // (I_{a,b} (x) I_{a,b}^-1)[(c1 - a, c2 + a), (c1, c2)] = omega^{b c1} omega^{-b (c2 + a)}
        for c1 in 0..n {
            for c2 in 0..n {
                let r1 = (c1 - a).rem_euclid(n);
                let r2 = (c2 + a).rem_euclid(n);
                let val = omega_pow(b * c1 - b * (c2 + a), n);
                out[((r1 * n + r2) as usize, (c1 * n + c2) as usize)] += w * val;
            }
        }
    }
    Ok(out)
}

/// `R_{n,k}(z, eta | tau) = (1/n) e(-n(n+1)z/2) P T_k(z, eta | tau)`.
pub fn r_matrix(p: &RParams, z: Complex64) -> Result<CMatrix> {
    let n = p.n as f64;
    let scale = e(-z * (0.5 * n * (n + 1.0))) / n;
    Ok(swap(p.n as usize) * t_op(p, z)? * scale)
}

/// Relative residual of `R_12(u) R_23(u+v) R_12(v) = R_23(v) R_12(u+v) R_23(u)`.
pub fn qybe_residual(p: &RParams, u: Complex64, v: Complex64) -> Result<f64> {
    let id = identity(p.n as usize);
    let (ru, rv, ruv) = (r_matrix(p, u)?, r_matrix(p, v)?, r_matrix(p, u + v)?);
    let r12 = |r: &CMatrix| kron(r, &id);
    let r23 = |r: &CMatrix| kron(&id, r);
    let lhs = r12(&ru) * r23(&ruv) * r12(&rv);
    let rhs = r23(&rv) * r12(&ruv) * r23(&ru);
    Ok(frobenius(&(&lhs - rhs)) / frobenius(&lhs))
}

/// Result of comparing `R` at `M > (z, eta | tau)` with the `psi(M')`-conjugate
/// of `R` at `(z, eta | tau)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Equivariance {
    pub m_prime: Sl2Zn,
    /// Median of the entrywise ratio `A / B`.
    pub scalar: Complex64,
    /// Largest `|ratio - scalar| / |scalar|` over the entries used.
    pub max_deviation: f64,
    pub used: usize,
    pub total: usize,
}

/// Component-wise median, robust against a few noisy ratios.
fn complex_median(values: &[Complex64]) -> Complex64 {
    let median = |mut xs: Vec<f64>| {
        xs.sort_by(|a, b| a.total_cmp(b));
        let m = xs.len() / 2;
        if xs.len().is_multiple_of(2) {
            0.5 * (xs[m - 1] + xs[m])
        } else {
            xs[m]
        }
    };
    Complex64::new(median(values.iter().map(|z| z.re).collect()), median(values.iter().map(|z| z.im).collect()))
}

/// Checks that `A = R(M > (z, eta | tau))` is a scalar multiple of
/// `B = (psi (x) psi) R(z, eta | tau) (psi (x) psi)^-1`, where `psi` intertwines
/// the Heisenberg automorphism of `M'` on the R-matrix realization.
pub fn l_equivariance_check(p: &RParams, m: &Sl2z, z: Complex64) -> Result<Equivariance> {
    let n = p.n;
    let mp = m_prime(m, n, p.k)?;
    let rep = HeisRep::rmatrix_action(n)?;
    let psi = intertwiner(&HeisAuto::from_mod_n(&mp), &rep)?;
    let pt = act_triple(m, &ModularTriple::new(z, p.eta, p.tau)?);
    let moved = p.at(pt.eta, pt.tau())?;
    let a = r_matrix(&moved, pt.z)?;
    let big = psi.tensor_square();
    let big_inv = kron(&psi.psi_inv, &psi.psi_inv);
    let b = &big * r_matrix(p, z)? * big_inv;

    let cutoff = RATIO_CUTOFF * max_abs(&b);
    let ratios: Vec<Complex64> =
        a.iter().zip(b.iter()).filter(|(_, y)| y.norm() > cutoff).map(|(x, y)| x / y).collect();
    let total = a.len();
    if ratios.is_empty() || ratios.len() * 10 < total {
        return Err(Error::DegenerateOverlap { used: ratios.len(), total });
    }
    let scalar = complex_median(&ratios);
    let max_deviation = ratios.iter().map(|r| (r - scalar).norm() / scalar.norm()).fold(0.0, f64::max);
    Ok(Equivariance { m_prime: mp, scalar, max_deviation, used: ratios.len(), total })
}
