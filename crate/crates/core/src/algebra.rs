//! Quadratic relations of `Q_{n,k}(eta | tau)` and the modular isomorphisms.
//!
//! The relation space is the image of `R(eta, eta | tau)` in `V (x) V`. Two
//! algebras are compared by transporting one relation space with
//! `psi (x) psi` and measuring the largest principal angle to the other.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::heisenberg::{intertwiner, HeisAuto, HeisRep};
use crate::linalg::{column_space, identity, kron, largest_principal_angle, numerical_rank, CMatrix};
use crate::modcore::{m_prime, recover_sl2, reduce_mod_lattice, Sl2Zn, Sl2z};
use crate::rmatrix::{r_matrix, RParams};
use crate::sampling::torsion_distance;

/// Singular values below this fraction of the largest are treated as zero.
pub const RANK_CUTOFF: f64 = 1e-9;

/// Largest allowed distance of `u eta_1 - eta_2` from the target lattice.
pub const ETA_MATCH_TOL: f64 = 1e-8;

/// Orthonormal basis of the image of `R(eta, eta | tau)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RelationSpace {
    pub params: RParams,
    pub basis: CMatrix,
    pub singular_values: Vec<f64>,
}

impl RelationSpace {
    pub fn rank(&self) -> usize {
        self.basis.ncols()
    }

    pub fn n(&self) -> i64 {
        self.params.n()
    }
}

/// The relation space depends on `eta` only modulo `Lambda_tau`; evaluation
/// uses the reduced representative, since large `Im eta / Im tau` overflows
/// the theta quotients.
pub fn relations(p: &RParams) -> Result<RelationSpace> {
    let eta = reduce_mod_lattice(p.eta(), p.tau());
    let r = r_matrix(&p.at(eta, p.tau())?, eta)?;
    if r.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("R-matrix"));
    }
    let (basis, singular_values) = column_space(&r, RANK_CUTOFF);
    Ok(RelationSpace { params: *p, basis, singular_values })
}

/// Dimensions of the graded pieces in degrees `0..=maxdeg`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedDims {
    pub dims: Vec<usize>,
}

/// Degrees above 3 are not supported and are truncated.
pub fn graded_dims(rel: &RelationSpace, maxdeg: usize) -> GradedDims {
    let n = rel.n() as usize;
    let mut dims = vec![1, n, n * n - rel.rank(), 0];
    if maxdeg >= 3 {
        let id = identity(n);
        let left = kron(&rel.basis, &id);
        let right = kron(&id, &rel.basis);
        let mut stacked = CMatrix::zeros(n * n * n, left.ncols() + right.ncols());
        stacked.columns_mut(0, left.ncols()).copy_from(&left);
        stacked.columns_mut(left.ncols(), right.ncols()).copy_from(&right);
        dims[3] = n * n * n - numerical_rank(&stacked, RANK_CUTOFF);
    }
    dims.truncate(maxdeg.min(3) + 1);
    GradedDims { dims }
}

/// `binom(n + d - 1, d)` for `d = 0..=maxdeg`, the dimensions of a polynomial ring.
pub fn polynomial_dims(n: usize, maxdeg: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(maxdeg + 1);
    let mut b = 1usize;
    out.push(b);
    for d in 1..=maxdeg {
        b = b * (n + d - 1) / d;
        out.push(b);
    }
    out
}

/// Largest principal angle between `W` and the span of `A W`.
pub fn transported_angle(a: &CMatrix, w: &CMatrix, target: &CMatrix) -> f64 {
    let (moved, _) = column_space(&(a * w), RANK_CUTOFF);
    largest_principal_angle(&moved, target)
}

/// Largest angle between `W` and `(rho(x) (x) rho(x)) W` for `x` in `{S, T}`.
pub fn heisenberg_invariance_angle(rel: &RelationSpace, rep: &HeisRep) -> f64 {
    [rep.rho_s(), rep.rho_t()]
        .iter()
        .map(|g| transported_angle(&kron(g, g), &rel.basis, &rel.basis))
        .fold(0.0, f64::max)
}

/// Outcome of comparing the relations at `(eta | tau)` and at `M > (eta | tau)`.
#[derive(Debug, Clone, PartialEq)]
pub struct IsomReport {
    pub m: Sl2z,
    pub m_prime: Sl2Zn,
    pub rank_source: usize,
    pub rank_target: usize,
    /// Angle between `(psi (x) psi) W_1` and `W_2`.
    pub angle: f64,
    /// Angle between `(psi (x) psi)^-1 W_2` and `W_1`.
    pub reverse_angle: f64,
    /// Spectral gap of the intertwiner solve.
    pub gap: f64,
}

fn compare(source: &RelationSpace, target: &RelationSpace, m: &Sl2z) -> Result<IsomReport> {
    if source.rank() != target.rank() {
        return Err(Error::RankMismatch { left: source.rank(), right: target.rank() });
    }
    let p = source.params;
    let mp = m_prime(m, p.n(), p.k())?;
    if mp.is_identity() {
        // psi = id is an admissible intertwiner here
        let angle = largest_principal_angle(&source.basis, &target.basis);
        return Ok(IsomReport {
            m: *m,
            m_prime: mp,
            rank_source: source.rank(),
            rank_target: target.rank(),
            angle,
            reverse_angle: largest_principal_angle(&target.basis, &source.basis),
            gap: f64::INFINITY,
        });
    }
    let rep = HeisRep::rmatrix_action(p.n())?;
    let psi = intertwiner(&HeisAuto::from_mod_n(&mp), &rep)?;
    let big = psi.tensor_square();
    let big_inv = kron(&psi.psi_inv, &psi.psi_inv);
    Ok(IsomReport {
        m: *m,
        m_prime: mp,
        rank_source: source.rank(),
        rank_target: target.rank(),
        angle: transported_angle(&big, &source.basis, &target.basis),
        reverse_angle: transported_angle(&big_inv, &target.basis, &source.basis),
        gap: psi.gap,
    })
}

/// Compares the relation space at `(eta | tau)` with the one at `M > (eta | tau)`
/// through `psi(M')`.
pub fn modular_isom_check(p: &RParams, m: &Sl2z) -> Result<IsomReport> {
    let j = m.automorphy(p.tau());
    let target = p.at(p.eta() / j, m.act_tau(p.tau()))?;
    compare(&relations(p)?, &relations(&target)?, m)
}

/// Relation spaces at `(eta | tau)` and at `M > (eta | tau)` compared directly,
/// with no transport.
pub fn direct_angle(p: &RParams, m: &Sl2z) -> Result<f64> {
    let j = m.automorphy(p.tau());
    let target = p.at(p.eta() / j, m.act_tau(p.tau()))?;
    let (w1, w2) = (relations(p)?, relations(&target)?);
    if w1.rank() != w2.rank() {
        return Err(Error::RankMismatch { left: w1.rank(), right: w2.rank() });
    }
    Ok(largest_principal_angle(&w1.basis, &w2.basis))
}

#[derive(Debug, Clone, PartialEq)]
pub struct LatticeIsomReport {
    pub m: Sl2z,
    /// Distance of `u eta_1 - eta_2` from `Lambda_{tau_2}`.
    pub eta_offset: f64,
    pub isom: IsomReport,
}

/// Starting from a multiplication map `z -> u z` carrying `Lambda_{tau_1}` onto
/// `Lambda_{tau_2}` and `eta_1` to `eta_2` modulo the lattice, recovers the
/// matrix `M` and checks the relation spaces at `(eta_1 | tau_1)` and
/// `(eta_2 | tau_2)` correspond under `psi(M')`.
pub fn isom_from_lattice_iso(
    p1: &RParams,
    tau2: Complex64,
    eta2: Complex64,
    u: Complex64,
) -> Result<LatticeIsomReport> {
    let m = recover_sl2(p1.tau(), tau2, u)?;
    let eta_offset = torsion_distance(u * p1.eta() - eta2, tau2, 1);
    if eta_offset > ETA_MATCH_TOL {
        return Err(Error::EtaMismatch { distance: eta_offset });
    }
    let p2 = p1.at(eta2, tau2)?;
    let isom = compare(&relations(p1)?, &relations(&p2)?, &m)?;
    Ok(LatticeIsomReport { m, eta_offset, isom })
}
