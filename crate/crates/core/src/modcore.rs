//! Exact arithmetic in `SL(2,Z)` and `SL(2,Z_n)`.
//!
//! Matrices are stored with `i128` entries so that Euclidean reduction of
//! matrices with entries up to `10^6` never overflows. The modular action on
//! `(z, eta | tau)` is the only floating-point operation here, apart from
//! lattice-isomorphism recovery.

use std::fmt;
use std::ops::Mul;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// An integer matrix `[[a, b], [c, d]]` with `ad - bc = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Sl2z {
    a: i128,
    b: i128,
    c: i128,
    d: i128,
}

impl Sl2z {
    pub const IDENTITY: Sl2z = Sl2z { a: 1, b: 0, c: 0, d: 1 };

    /// `X = [[0, 1], [-1, 0]]`, the order-4 generator of the amalgam presentation.
    pub const X: Sl2z = Sl2z { a: 0, b: 1, c: -1, d: 0 };
    /// `Y = [[1, 1], [-1, 0]]`, the order-6 generator of the amalgam presentation.
    pub const Y: Sl2z = Sl2z { a: 1, b: 1, c: -1, d: 0 };

    /// `S = [[0, -1], [1, 0]]`, the inversion `tau -> -1/tau`.
    pub const S: Sl2z = Sl2z { a: 0, b: -1, c: 1, d: 0 };
    /// `T = [[1, 1], [0, 1]]`, the translation `tau -> tau + 1`.
    pub const T: Sl2z = Sl2z { a: 1, b: 1, c: 0, d: 1 };

    pub const NEG_IDENTITY: Sl2z = Sl2z { a: -1, b: 0, c: 0, d: -1 };

    pub fn new(a: i128, b: i128, c: i128, d: i128) -> Result<Self> {
        let det = a * d - b * c;
        if det != 1 {
            return Err(Error::NotUnimodular { det });
        }
        Ok(Sl2z { a, b, c, d })
    }

    pub fn a(&self) -> i128 {
        self.a
    }
    pub fn b(&self) -> i128 {
        self.b
    }
    pub fn c(&self) -> i128 {
        self.c
    }
    pub fn d(&self) -> i128 {
        self.d
    }

    pub fn entries(&self) -> [i128; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn inverse(&self) -> Sl2z {
        Sl2z { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    pub fn transpose(&self) -> Sl2z {
        Sl2z { a: self.a, b: self.c, c: self.b, d: self.d }
    }

    pub fn neg(&self) -> Sl2z {
        Sl2z { a: -self.a, b: -self.b, c: -self.c, d: -self.d }
    }

    pub fn pow(&self, e: i64) -> Sl2z {
        let base = if e < 0 { self.inverse() } else { *self };
        (0..e.unsigned_abs()).fold(Sl2z::IDENTITY, |acc, _| acc * base)
    }

    pub fn is_identity(&self) -> bool {
        *self == Sl2z::IDENTITY
    }

    /// `c*tau + d`.
    pub fn automorphy(&self, tau: Complex64) -> Complex64 {
        tau * self.c as f64 + self.d as f64
    }

    /// `(a*tau + b) / (c*tau + d)`.
    pub fn act_tau(&self, tau: Complex64) -> Complex64 {
        (tau * self.a as f64 + self.b as f64) / self.automorphy(tau)
    }

    pub fn reduce(&self, n: i64) -> Sl2Zn {
        let r = |x: i128| x.rem_euclid(n as i128) as i64;
        Sl2Zn { n, a: r(self.a), b: r(self.b), c: r(self.c), d: r(self.d) }
    }
}

impl Mul for Sl2z {
    type Output = Sl2z;

    fn mul(self, o: Sl2z) -> Sl2z {
        Sl2z {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }
}

impl fmt::Display for Sl2z {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

/// A matrix over `Z_n` with determinant `1 mod n`, entries stored in `[0, n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Sl2Zn {
    n: i64,
    a: i64,
    b: i64,
    c: i64,
    d: i64,
}

impl Sl2Zn {
    pub fn new(n: i64, a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidParam(format!("modulus must be positive, got {n}")));
        }
        let m = Sl2Zn { n, a: a.rem_euclid(n), b: b.rem_euclid(n), c: c.rem_euclid(n), d: d.rem_euclid(n) };
        let det = m.det();
        if det != 1 % n {
            return Err(Error::NotUnimodularModN { det, n });
        }
        Ok(m)
    }

    pub fn identity(n: i64) -> Self {
        Sl2Zn { n, a: 1 % n, b: 0, c: 0, d: 1 % n }
    }

    pub fn modulus(&self) -> i64 {
        self.n
    }

    /// Canonical lift with entries in `[0, n)`.
    pub fn entries(&self) -> [i64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn det(&self) -> i64 {
        let n = self.n as i128;
        ((self.a as i128 * self.d as i128 - self.b as i128 * self.c as i128).rem_euclid(n)) as i64
    }

    pub fn is_identity(&self) -> bool {
        *self == Sl2Zn::identity(self.n)
    }

    pub fn try_mul(&self, o: &Sl2Zn) -> Result<Sl2Zn> {
        if self.n != o.n {
            return Err(Error::InvalidParam(format!("moduli differ: {} vs {}", self.n, o.n)));
        }
        let n = self.n as i128;
        let r = |x: i128| x.rem_euclid(n) as i64;
        let (a, b, c, d) = (self.a as i128, self.b as i128, self.c as i128, self.d as i128);
        let (e, f, g, h) = (o.a as i128, o.b as i128, o.c as i128, o.d as i128);
        Ok(Sl2Zn { n: self.n, a: r(a * e + b * g), b: r(a * f + b * h), c: r(c * e + d * g), d: r(c * f + d * h) })
    }
}

impl fmt::Display for Sl2Zn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]] mod {}", self.a, self.b, self.c, self.d, self.n)
    }
}

/// A point `(z, eta | tau)` of `C x C x H`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModularTriple {
    pub z: Complex64,
    pub eta: Complex64,
    tau: Complex64,
}

impl ModularTriple {
    pub fn new(z: Complex64, eta: Complex64, tau: Complex64) -> Result<Self> {
        if !(tau.im > 0.0) {
            return Err(Error::NotInUpperHalfPlane { im: tau.im });
        }
        Ok(ModularTriple { z, eta, tau })
    }

    pub fn tau(&self) -> Complex64 {
        self.tau
    }
}

/// Representative of `x` modulo `Z + Z tau` in the half-open fundamental
/// parallelogram spanned by `1` and `tau`.
pub fn reduce_mod_lattice(x: Complex64, tau: Complex64) -> Complex64 {
    let q = (x.im / tau.im).floor();
    let y = x - tau * q;
    y - (y.re - tau.re * y.im / tau.im).floor()
}

/// `M > (z, eta | tau) = (z/(c tau + d), eta/(c tau + d) | (a tau + b)/(c tau + d))`.
pub fn act_triple(m: &Sl2z, p: &ModularTriple) -> ModularTriple {
    let j = m.automorphy(p.tau);
    ModularTriple { z: p.z / j, eta: p.eta / j, tau: m.act_tau(p.tau) }
}

/// Generators of the amalgam presentation `SL(2,Z) = Z_4 *_{Z_2} Z_6`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Gen {
    X,
    XInv,
    Y,
    YInv,
}

impl Gen {
    pub fn matrix(self) -> Sl2z {
        match self {
            Gen::X => Sl2z::X,
            Gen::XInv => Sl2z::X.inverse(),
            Gen::Y => Sl2z::Y,
            Gen::YInv => Sl2z::Y.inverse(),
        }
    }
}

impl fmt::Display for Gen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Gen::X => "X",
            Gen::XInv => "X^-1",
            Gen::Y => "Y",
            Gen::YInv => "Y^-1",
        })
    }
}

/// A word in `X`, `Y` and their inverses, optionally multiplied by `-I`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GenWord {
    pub tokens: Vec<Gen>,
    pub negate: bool,
}

impl GenWord {
    pub fn eval(&self) -> Sl2z {
        let m = self.tokens.iter().fold(Sl2z::IDENTITY, |acc, g| acc * g.matrix());
        if self.negate {
            m.neg()
        } else {
            m
        }
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty() && !self.negate
    }
}

impl fmt::Display for GenWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        if self.negate {
            parts.push("-I".into());
        }
        parts.extend(self.tokens.iter().map(|g| g.to_string()));
        f.write_str(&parts.join(" "))
    }
}

/// One factor of a word in the `S`/`T` pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StStep {
    S,
    /// `T^q`, `q != 0`.
    T(i128),
}

impl StStep {
    pub fn matrix(self) -> Sl2z {
        match self {
            StStep::S => Sl2z::S,
            StStep::T(q) => Sl2z { a: 1, b: q, c: 0, d: 1 },
        }
    }
}

/// `M = (-I)^negate * steps[0] * steps[1] * ...` with steps in `S` and powers of `T`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StWord {
    pub steps: Vec<StStep>,
    pub negate: bool,
}

impl StWord {
    pub fn eval(&self) -> Sl2z {
        let m = self.steps.iter().fold(Sl2z::IDENTITY, |acc, s| acc * s.matrix());
        if self.negate {
            m.neg()
        } else {
            m
        }
    }
}

/// Euclidean reduction of `M` into the `S`/`T` pair: `M = T^{q_1} S T^{q_2} S ... (+-T^m)`.
pub fn st_factorization(m: &Sl2z) -> StWord {
    let (mut a, mut b, mut c, mut d) = (m.a, m.b, m.c, m.d);
    let mut steps = Vec::new();
    while c != 0 {
        let q = a.div_euclid(c);
        if q != 0 {
            steps.push(StStep::T(q));
        }
        a -= q * c;
        b -= q * d;
        // S^{-1} [[a,b],[c,d]] = [[c,d],[-a,-b]]
        steps.push(StStep::S);
        (a, b, c, d) = (c, d, -a, -b);
    }
    // now [[a, b], [0, d]] with a = d = +-1
    let negate = a == -1;
    let shift = if negate { -b } else { b };
    if shift != 0 {
        steps.push(StStep::T(shift));
    }
    StWord { steps, negate }
}

/// Decompose `M` into the amalgam generators `X`, `Y`.
///
/// The result is the reduced alternating normal form: `X` never appears
/// squared or inverted (`X^2 = -I`), and each `Y` syllable is `Y` or `Y^-1`
/// (`Y^3 = -I`). The word is deterministic and its product is exactly `M`.
pub fn decompose(m: &Sl2z) -> GenWord {
    let st = st_factorization(m);
    // S = X^-1 = -X and T = X Y^-1
    let mut negate = st.negate;
    let mut stack: Vec<Gen> = Vec::new();
    let push = |g: Gen, stack: &mut Vec<Gen>, negate: &mut bool| {
        let g = if g == Gen::XInv {
            *negate = !*negate;
            Gen::X
        } else {
            g
        };
        match (stack.last().copied(), g) {
            (Some(Gen::X), Gen::X) => {
                stack.pop();
                *negate = !*negate;
            }
            (Some(Gen::Y), Gen::YInv) | (Some(Gen::YInv), Gen::Y) => {
                stack.pop();
            }
            (Some(Gen::Y), Gen::Y) => {
                *stack.last_mut().unwrap() = Gen::YInv;
                *negate = !*negate;
            }
            (Some(Gen::YInv), Gen::YInv) => {
                *stack.last_mut().unwrap() = Gen::Y;
                *negate = !*negate;
            }
            _ => stack.push(g),
        }
    };
    for step in &st.steps {
        match *step {
            StStep::S => push(Gen::XInv, &mut stack, &mut negate),
            StStep::T(q) if q > 0 => {
                for _ in 0..q {
                    push(Gen::X, &mut stack, &mut negate);
                    push(Gen::YInv, &mut stack, &mut negate);
                }
            }
            StStep::T(q) => {
                for _ in 0..(-q) {
                    push(Gen::Y, &mut stack, &mut negate);
                    push(Gen::XInv, &mut stack, &mut negate);
                }
            }
        }
    }
    GenWord { tokens: stack, negate }
}

/// Multiplicative inverse of `k` modulo `n`.
pub fn inverse_mod(k: i64, n: i64) -> Option<i64> {
    let (mut old_r, mut r) = (k.rem_euclid(n), n);
    let (mut old_s, mut s) = (1i64, 0i64);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r == 1 {
        Some(old_s.rem_euclid(n))
    } else {
        None
    }
}

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn check_nk(n: i64, k: i64) -> Result<i64> {
    if !(n > k && k >= 1) || gcd(n, k) != 1 {
        return Err(Error::InvalidNk { n, k });
    }
    Ok(inverse_mod(k, n).expect("coprime"))
}

/// Image in `SL(2,Z_n)` of `M' = D^{-1} M^{-t} D` with `D = diag(-k, 1)`.
///
/// Exactly, `M' = [[d, c/k], [b k, a]]`; modulo `n` the entry `c/k` is `c k'`.
pub fn m_prime(m: &Sl2z, n: i64, k: i64) -> Result<Sl2Zn> {
    m_prime_mod(&m.reduce(n), k)
}

pub fn m_prime_mod(m: &Sl2Zn, k: i64) -> Result<Sl2Zn> {
    let n = m.n;
    let k_prime = check_nk(n, k)?;
    let [a, b, c, d] = m.entries();
    let mul = |x: i64, y: i64| ((x as i128 * y as i128).rem_euclid(n as i128)) as i64;
    Sl2Zn::new(n, d, mul(c, k_prime), mul(b, k), a)
}

/// Recover the unique `M` in `SL(2,Z)` with `1 = u (c tau1 + d)` and
/// `tau2 = u (a tau1 + b)`.
pub fn recover_sl2(tau1: Complex64, tau2: Complex64, u: Complex64) -> Result<Sl2z> {
    if !(tau1.im > 0.0) {
        return Err(Error::NotInUpperHalfPlane { im: tau1.im });
    }
    if !(tau2.im > 0.0) {
        return Err(Error::NotInUpperHalfPlane { im: tau2.im });
    }
    if u.norm() == 0.0 {
        return Err(Error::NotALatticeIso("u = 0".into()));
    }
    // Solve x*tau1 + y = w over the reals.
    let solve = |w: Complex64| -> (f64, f64) {
        let x = w.im / tau1.im;
        (x, w.re - x * tau1.re)
    };
    let near_int = |x: f64, what: &str| -> Result<i128> {
        let r = x.round();
        if (x - r).abs() > 1e-6 {
            return Err(Error::NotALatticeIso(format!("{what} = {x} is not an integer")));
        }
        Ok(r as i128)
    };
    let (cf, df) = solve(u.inv());
    let (af, bf) = solve(tau2 / u);
    let (a, b, c, d) = (near_int(af, "a")?, near_int(bf, "b")?, near_int(cf, "c")?, near_int(df, "d")?);
    let m = Sl2z::new(a, b, c, d).map_err(|e| Error::NotALatticeIso(e.to_string()))?;
    let tol = 1e-9 * (1.0 + tau2.norm());
    let r1 = (u * m.automorphy(tau1) - 1.0).norm();
    let r2 = (u * (tau1 * a as f64 + b as f64) - tau2).norm();
    if r1 > tol || r2 > tol {
        return Err(Error::NotALatticeIso(format!("residuals {r1:e}, {r2:e} exceed {tol:e}")));
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rejects_non_unimodular() {
        assert_eq!(Sl2z::new(1, 1, 1, 1), Err(Error::NotUnimodular { det: 0 }));
        assert!(ModularTriple::new(c(0.0, 0.0), c(0.0, 0.0), c(1.0, -0.1)).is_err());
    }

    #[test]
    fn lattice_reduction() {
        let tau = c(-0.25, 0.24);
        let x = c(-0.24, 1.78);
        let y = reduce_mod_lattice(x, tau);
        assert!((0.0..tau.im).contains(&y.im));
        let re = y.re - tau.re * y.im / tau.im;
        assert!((0.0..1.0).contains(&re));
        let t = (x - y).im / tau.im;
        let s = (x - y).re - t * tau.re;
        assert!((t - t.round()).abs() < 1e-12 && (s - s.round()).abs() < 1e-12);
    }

    #[test]
    fn act_triple_examples() {
        let p = ModularTriple::new(c(0.3, 0.0), c(0.0, 0.1), c(0.0, 1.0)).unwrap();
        assert_eq!(act_triple(&Sl2z::IDENTITY, &p), p);

        let q = act_triple(&Sl2z::S, &p);
        assert!((q.z - c(0.3, 0.0) / c(0.0, 1.0)).norm() < 1e-15);
        assert!((q.eta - c(0.1, 0.0)).norm() < 1e-15);
        assert!((q.tau() - c(0.0, 1.0)).norm() < 1e-15);

        let tau = c(0.2, 0.7);
        let p = ModularTriple::new(c(0.1, 0.2), c(0.3, 0.4), tau).unwrap();
        let q = act_triple(&Sl2z::T, &p);
        assert_eq!((q.z, q.eta), (p.z, p.eta));
        assert!((q.tau() - (tau + 1.0)).norm() < 1e-15);
    }

    #[test]
    fn decompose_examples() {
        assert!(decompose(&Sl2z::IDENTITY).is_empty());
        let x = decompose(&Sl2z::X);
        assert_eq!(x.tokens, vec![Gen::X]);
        assert!(!x.negate);
        let lower = Sl2z::new(1, 0, 1, 1).unwrap();
        assert_eq!(decompose(&lower).eval(), lower);
        assert_eq!(decompose(&Sl2z::Y).tokens, vec![Gen::Y]);
        assert_eq!(decompose(&Sl2z::NEG_IDENTITY), GenWord { tokens: vec![], negate: true });
    }

    #[test]
    fn decompose_large_entries() {
        // consecutive Fibonacci-like entries force many Euclidean steps
        let m = Sl2z::new(1_346_269, 832_040, 832_040, 514_229).unwrap();
        assert_eq!(decompose(&m).eval(), m);
        let m = Sl2z::new(1_000_000, 999_999, 1, 1).unwrap();
        assert_eq!(decompose(&m).eval(), m);
        assert_eq!(st_factorization(&m).eval(), m);
    }

    #[test]
    fn m_prime_examples() {
        assert!(m_prime(&Sl2z::IDENTITY, 5, 2).unwrap().is_identity());
        for m in -3..=3i128 {
            for (n, k) in [(5, 2), (4, 1), (7, 3), (6, 5)] {
                let lower = Sl2z::new(1, 0, m * n as i128, 1).unwrap();
                assert!(m_prime(&lower, n, k).unwrap().is_identity());
            }
        }
        // n = 5, k = 2, k' = 3: [[d, c k'], [b k, a]] = [[0, 3], [-2, 0]]
        let mp = m_prime(&Sl2z::S, 5, 2).unwrap();
        assert_eq!(mp.entries(), [0, 3, 3, 0]);
        assert_eq!(mp.det(), 1);
        assert_eq!(m_prime(&Sl2z::S, 4, 2), Err(Error::InvalidNk { n: 4, k: 2 }));
    }

    #[test]
    fn m_prime_matches_rational_conjugation() {
        // D^{-1} M^{-t} D over the rationals, scaled by k to stay integral.
        for (n, k) in [(5i64, 2i64), (7, 3), (8, 3)] {
            for m in [Sl2z::S, Sl2z::T, Sl2z::X, Sl2z::Y, Sl2z::new(2, 3, 5, 8).unwrap()] {
                let [a, b, c, d] = m.entries().map(|x| x as i64);
                // k * M' = [[k d, c], [b k^2, k a]]
                let k_mp = [k * d, c, b * k * k, k * a];
                let mp = m_prime(&m, n, k).unwrap().entries();
                for (x, y) in mp.iter().zip(k_mp) {
                    assert_eq!((x * k - y).rem_euclid(n), 0);
                }
            }
        }
    }

    #[test]
    fn m_prime_is_multiplicative_and_an_involution() {
        let ms = [Sl2z::S, Sl2z::T, Sl2z::X, Sl2z::Y, Sl2z::new(2, 3, 5, 8).unwrap(), Sl2z::new(-3, -4, 4, 5).unwrap()];
        for (n, k) in [(5i64, 2i64), (7, 3), (8, 3), (2, 1)] {
            for m in ms {
                let mp = m_prime(&m, n, k).unwrap();
                assert_eq!(m_prime_mod(&mp, k).unwrap(), m.reduce(n));
                for q in ms {
                    let prod = m_prime(&m, n, k).unwrap().try_mul(&m_prime(&q, n, k).unwrap()).unwrap();
                    assert_eq!(m_prime(&(m * q), n, k).unwrap(), prod);
                }
            }
        }
    }

    #[test]
    fn recover_examples() {
        let i = c(0.0, 1.0);
        assert_eq!(recover_sl2(i, i, c(1.0, 0.0)).unwrap(), Sl2z::IDENTITY);
        let t1 = c(0.3, 1.1);
        assert_eq!(recover_sl2(t1, -t1.inv(), t1.inv()).unwrap(), Sl2z::S);
        assert_eq!(recover_sl2(t1, t1 + 1.0, c(1.0, 0.0)).unwrap(), Sl2z::T);
        assert!(matches!(recover_sl2(t1, t1, c(0.5, 0.0)), Err(Error::NotALatticeIso(_))));
    }

    #[test]
    fn recover_matches_exhaustive_search() {
        let t1 = c(0.3, 1.1);
        let t2 = -t1.inv();
        let u = t1.inv();
        let mut found = Vec::new();
        for a in -3..=3i128 {
            for b in -3..=3i128 {
                for cc in -3..=3i128 {
                    for d in -3..=3i128 {
                        if a * d - b * cc != 1 {
                            continue;
                        }
                        let ok1 = (u * (t1 * cc as f64 + d as f64) - 1.0).norm() < 1e-12;
                        let ok2 = (u * (t1 * a as f64 + b as f64) - t2).norm() < 1e-12;
                        if ok1 && ok2 {
                            found.push(Sl2z::new(a, b, cc, d).unwrap());
                        }
                    }
                }
            }
        }
        assert_eq!(found, vec![recover_sl2(t1, t2, u).unwrap()]);
    }

    #[test]
    fn inverse_mod_basics() {
        assert_eq!(inverse_mod(2, 5), Some(3));
        assert_eq!(inverse_mod(3, 7), Some(5));
        assert_eq!(inverse_mod(2, 4), None);
    }

    fn random_matrix(seed: u64, bound: i64) -> Sl2z {
        crate::sampling::random_sl2z(&mut crate::sampling::rng_from_seed(seed), bound)
    }

    proptest::proptest! {
        #[test]
        fn prop_action_composes(s1: u64, s2: u64, zr in -1.0..1.0f64, er in -1.0..1.0f64, ei in -1.0..1.0f64) {
            let (m, q) = (random_matrix(s1, 5), random_matrix(s2, 5));
            let p = ModularTriple::new(c(zr, 0.3), c(er, ei), c(0.17, 0.93)).unwrap();
            let lhs = act_triple(&(m * q), &p);
            let rhs = act_triple(&m, &act_triple(&q, &p));
            let rel = |a: Complex64, b: Complex64| (a - b).norm() / a.norm().max(1e-300);
            proptest::prop_assert!(rel(lhs.z, rhs.z) < 1e-12);
            proptest::prop_assert!(rel(lhs.eta, rhs.eta) < 1e-12);
            proptest::prop_assert!(rel(lhs.tau(), rhs.tau()) < 1e-12);
            proptest::prop_assert!(lhs.tau().im > 0.0);
        }

        #[test]
        fn prop_decompose_round_trips(seed: u64) {
            let m = random_matrix(seed, 50);
            proptest::prop_assert_eq!(decompose(&m).eval(), m);
            proptest::prop_assert_eq!(st_factorization(&m).eval(), m);
        }

        #[test]
        fn prop_m_prime_homomorphism(s1: u64, s2: u64, pair in 0usize..4) {
            let (n, k) = [(3, 2), (5, 2), (7, 4), (8, 5)][pair];
            let (m, q) = (random_matrix(s1, 9), random_matrix(s2, 9));
            let prod = m_prime(&m, n, k).unwrap().try_mul(&m_prime(&q, n, k).unwrap()).unwrap();
            proptest::prop_assert_eq!(m_prime(&(m * q), n, k).unwrap(), prod);
            proptest::prop_assert_eq!(m_prime_mod(&m_prime(&m, n, k).unwrap(), k).unwrap(), m.reduce(n));
        }
    }
}
