//! The finite Heisenberg group, its `SL(2,Z)` automorphisms and intertwiners.
//!
//! Elements of the extended group are kept in the normal form
//! `T^a S^b nu^c` with `S T = T S eps` and `nu^2 = eps`. For odd `n` the
//! central generator is `nu = eps^{(n+1)/2}`, which has order `n`; for even
//! `n` it is a formal square root of `eps` of order `2n`. The `nu` exponent is
//! reduced modulo that order, so equal group elements have equal normal forms.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{frobenius, identity, kron, null_vector, singular_values, CMatrix};
use crate::modcore::{Sl2Zn, Sl2z};
use crate::theta::e;

/// Required ratio between the two smallest singular values of the Schur system.
pub const INTERTWINER_GAP: f64 = 1e6;

/// Order of `nu`: `n` for odd `n`, `2n` for even `n`.
pub fn nu_order(n: i64) -> i64 {
    if n % 2 == 0 {
        2 * n
    } else {
        n
    }
}

/// `T^t S^s nu^nu` in the extended Heisenberg group of level `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HeisElt {
    n: i64,
    t: i64,
    s: i64,
    nu: i64,
}

impl HeisElt {
    pub fn new(n: i64, t: i64, s: i64, nu: i64) -> Self {
        assert!(n >= 1, "level must be positive");
        HeisElt { n, t: t.rem_euclid(n), s: s.rem_euclid(n), nu: nu.rem_euclid(nu_order(n)) }
    }

    pub fn identity(n: i64) -> Self {
        HeisElt::new(n, 0, 0, 0)
    }

    pub fn t_gen(n: i64) -> Self {
        HeisElt::new(n, 1, 0, 0)
    }

    pub fn s_gen(n: i64) -> Self {
        HeisElt::new(n, 0, 1, 0)
    }

    pub fn nu_gen(n: i64) -> Self {
        HeisElt::new(n, 0, 0, 1)
    }

    /// `eps = [S, T] = nu^2`.
    pub fn eps(n: i64) -> Self {
        HeisElt::new(n, 0, 0, 2)
    }

    /// `J_{(u,v)} = T^u S^v`.
    pub fn j(n: i64, u: i64, v: i64) -> Self {
        HeisElt::new(n, u, v, 0)
    }

    pub fn level(&self) -> i64 {
        self.n
    }
    pub fn t_exp(&self) -> i64 {
        self.t
    }
    pub fn s_exp(&self) -> i64 {
        self.s
    }
    pub fn nu_exp(&self) -> i64 {
        self.nu
    }

    pub fn is_identity(&self) -> bool {
        self.t == 0 && self.s == 0 && self.nu == 0
    }

    fn same_level(&self, o: &HeisElt) -> Result<()> {
        if self.n != o.n {
            return Err(Error::MixedN { left: self.n, right: o.n });
        }
        Ok(())
    }

    /// `(T^a S^b nu^c)(T^a' S^b' nu^c') = T^{a+a'} S^{b+b'} nu^{c+c'+2ba'}`.
    pub fn mul(&self, o: &HeisElt) -> Result<HeisElt> {
        self.same_level(o)?;
        Ok(HeisElt::new(self.n, self.t + o.t, self.s + o.s, self.nu + o.nu + 2 * self.s * o.t))
    }

    pub fn inv(&self) -> HeisElt {
        HeisElt::new(self.n, -self.t, -self.s, -self.nu + 2 * self.t * self.s)
    }

    pub fn pow(&self, e: i64) -> HeisElt {
        let (mut base, mut k) = if e < 0 { (self.inv(), e.unsigned_abs()) } else { (*self, e as u64) };
        let mut acc = HeisElt::identity(self.n);
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base).expect("same level");
            }
            base = base.mul(&base).expect("same level");
            k >>= 1;
        }
        acc
    }

    /// `x y x^-1 y^-1`.
    pub fn commutator(&self, o: &HeisElt) -> Result<HeisElt> {
        self.mul(o)?.mul(&self.inv())?.mul(&o.inv())
    }
}

/// The automorphism `Psi_M` of the extended Heisenberg group:
/// `T^m S^r nu^c -> T^{am+br} S^{cm+dr} nu^{c + acm^2 + bdr^2 + 2bcmr}`.
///
/// Entries are kept modulo `2n`, which determines the map completely. Any
/// integer matrix with determinant `1 mod n` gives an automorphism fixing `nu`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HeisAuto {
    n: i64,
    a: i64,
    b: i64,
    c: i64,
    d: i64,
}

impl HeisAuto {
    pub fn from_sl2z(m: &Sl2z, n: i64) -> Self {
        let r = |x: i128| x.rem_euclid(2 * n as i128) as i64;
        HeisAuto { n, a: r(m.a()), b: r(m.b()), c: r(m.c()), d: r(m.d()) }
    }

    /// Uses the representatives in `[0, n)` of a matrix known only mod `n`.
    ///
    /// For even `n` this fixes the map up to the central character twist
    /// `nu^n`, which acts on every representation by a sign.
    pub fn from_mod_n(m: &Sl2Zn) -> Self {
        let [a, b, c, d] = m.entries();
        HeisAuto { n: m.modulus(), a, b, c, d }
    }

    pub fn level(&self) -> i64 {
        self.n
    }

    pub fn apply(&self, x: &HeisElt) -> Result<HeisElt> {
        if x.n != self.n {
            return Err(Error::MixedN { left: self.n, right: x.n });
        }
        let (a, b, c, d) = (self.a as i128, self.b as i128, self.c as i128, self.d as i128);
        let (m, r) = (x.t as i128, x.s as i128);
        let z = a * c * m * m + b * d * r * r + 2 * b * c * m * r;
        let order = nu_order(self.n) as i128;
        let t = (a * m + b * r).rem_euclid(self.n as i128) as i64;
        let s = (c * m + d * r).rem_euclid(self.n as i128) as i64;
        let nu = (x.nu as i128 + z).rem_euclid(order) as i64;
        Ok(HeisElt::new(self.n, t, s, nu))
    }
}

/// Which of the two standard realizations of the group on `C^n` is meant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Convention {
    /// `S x_i = omega^i x_i`, `T x_i = x_{i+1}`, `nu = -e(1/2n)`, `eps = omega`.
    Algebra,
    /// `S x_i = omega^i x_i`, `T x_i = x_{i-1}`, `nu = -e(-1/2n)`, `eps = omega^-1`.
    RMatrix,
}

/// An irreducible representation of the extended group on `C^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct HeisRep {
    n: i64,
    convention: Convention,
    rho_t: CMatrix,
    rho_s: CMatrix,
    rho_nu: Complex64,
}

impl HeisRep {
    pub fn new(n: i64, convention: Convention) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParam(format!("representation level must be at least 2, got {n}")));
        }
        let rho_nu = match convention {
            Convention::Algebra => -e(Complex64::new(0.5 / n as f64, 0.0)),
            Convention::RMatrix => -e(Complex64::new(-0.5 / n as f64, 0.0)),
        };
        let mut rep = HeisRep { n, convention, rho_t: CMatrix::zeros(0, 0), rho_s: CMatrix::zeros(0, 0), rho_nu };
        rep.rho_t = rep.monomial(1, 0);
        rep.rho_s = rep.monomial(0, 1);
        Ok(rep)
    }

    pub fn algebra_action(n: i64) -> Result<Self> {
        HeisRep::new(n, Convention::Algebra)
    }

    pub fn rmatrix_action(n: i64) -> Result<Self> {
        HeisRep::new(n, Convention::RMatrix)
    }

    pub fn level(&self) -> i64 {
        self.n
    }
    pub fn convention(&self) -> Convention {
        self.convention
    }
    pub fn rho_t(&self) -> &CMatrix {
        &self.rho_t
    }
    pub fn rho_s(&self) -> &CMatrix {
        &self.rho_s
    }
    pub fn rho_nu(&self) -> Complex64 {
        self.rho_nu
    }

    /// The matrix of `T^a S^b`: column `i` holds `omega^{b i}` in row `i +- a`.
    fn monomial(&self, a: i64, b: i64) -> CMatrix {
        let n = self.n;
        let mut m = CMatrix::zeros(n as usize, n as usize);
        for i in 0..n {
            let row = match self.convention {
                Convention::Algebra => (i + a).rem_euclid(n),
                Convention::RMatrix => (i - a).rem_euclid(n),
            };
            m[(row as usize, i as usize)] = e(Complex64::new((b * i).rem_euclid(n) as f64 / n as f64, 0.0));
        }
        m
    }

    pub fn image(&self, x: &HeisElt) -> Result<CMatrix> {
        if x.n != self.n {
            return Err(Error::MixedN { left: self.n, right: x.n });
        }
        Ok(self.monomial(x.t, x.s) * self.rho_nu.powi(x.nu as i32))
    }
}

/// Both realizations at level `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct RepPair {
    pub algebra_action: HeisRep,
    pub rmatrix_action: HeisRep,
}

pub fn rep(n: i64) -> Result<RepPair> {
    Ok(RepPair { algebra_action: HeisRep::algebra_action(n)?, rmatrix_action: HeisRep::rmatrix_action(n)? })
}

/// A solution `psi` of `rho(Psi_M(x)) psi = psi rho(x)`, normalized to
/// `||psi||_F = sqrt(n)` with the first nonzero entry of its first column real
/// and positive.
#[derive(Debug, Clone, PartialEq)]
pub struct Intertwiner {
    pub auto: HeisAuto,
    pub psi: CMatrix,
    pub psi_inv: CMatrix,
    /// `sigma_next / sigma_min` of the Schur system.
    pub gap: f64,
}

impl Intertwiner {
    /// `||rho(Psi_M(x)) psi - psi rho(x)||_F / ||psi||_F`.
    pub fn residual(&self, rep: &HeisRep, x: &HeisElt) -> Result<f64> {
        let lhs = rep.image(&self.auto.apply(x)?)? * &self.psi;
        let rhs = &self.psi * rep.image(x)?;
        Ok(frobenius(&(lhs - rhs)) / frobenius(&self.psi))
    }

    /// `psi (x) psi` acting on `V (x) V`.
    pub fn tensor_square(&self) -> CMatrix {
        kron(&self.psi, &self.psi)
    }
}

/// Solves for the intertwiner of `auto` on `rep` as the null vector of the
/// stacked system `(I (x) A_x - B_x^T (x) I) vec(psi) = 0`, `x in {T, S}`,
/// with `vec` stacking columns.
pub fn intertwiner(auto: &HeisAuto, rep: &HeisRep) -> Result<Intertwiner> {
    let n = rep.level();
    if auto.level() != n {
        return Err(Error::MixedN { left: auto.level(), right: n });
    }
    let nu = n as usize;
    let id = identity(nu);
    let mut system = CMatrix::zeros(2 * nu * nu, nu * nu);
    for (block, x) in [HeisElt::t_gen(n), HeisElt::s_gen(n)].iter().enumerate() {
        let a = rep.image(&auto.apply(x)?)?;
        let b = rep.image(x)?;
        let piece = kron(&id, &a) - kron(&b.transpose(), &id);
        system.view_mut((block * nu * nu, 0), (nu * nu, nu * nu)).copy_from(&piece);
    }
    let (v, sigma_min, sigma_next) = null_vector(&system);
    let gap = if sigma_min > 0.0 { sigma_next / sigma_min } else { f64::INFINITY };
    if !(gap > INTERTWINER_GAP) {
        let s = singular_values(&system);
        let cutoff = 1e-9 * s[0];
        let nullity = s.iter().filter(|&&x| x <= cutoff).count();
        return Err(Error::NoIntertwiner { nullity, gap });
    }
    let mut psi = CMatrix::from_column_slice(nu, nu, normalize(v).as_slice());
    psi *= Complex64::new((n as f64).sqrt() / frobenius(&psi), 0.0);
    let psi_inv = psi
        .clone()
        .try_inverse()
        .ok_or(Error::NoIntertwiner { nullity: 1, gap })?;
    Ok(Intertwiner { auto: *auto, psi, psi_inv, gap })
}

/// Rotates the phase so the first entry above the noise floor is real positive.
fn normalize(mut v: DVector<Complex64>) -> DVector<Complex64> {
    let scale = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if let Some(first) = v.iter().find(|z| z.norm() > 1e-8 * scale).copied() {
        let phase = first.conj() / first.norm();
        v *= phase;
    }
    v
}
