//! Theta functions by truncated series.
//!
//! `vartheta(z|tau) = sum_m e(m z + m^2 tau / 2)`, the characteristic
//! variant `theta_{u,v}` and the normalized ratios `w_{(u,v)}` whose
//! behaviour under `SL(2,Z)` drives the modular properties of the R-matrix.
//!
//! [`vartheta`] first moves `z` into the strip `|Im z| <= Im(tau)/2` with the
//! quasi-periodicity in `tau` and then sums the series, so the summed terms
//! stay `O(1)`. [`vartheta_series`] sums the raw series without any reduction
//! and serves as the independent reference.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::modcore::{act_triple, st_factorization, ModularTriple, Sl2z, StStep};

/// Smallest `Im(tau)` accepted by the evaluators.
pub const MIN_IM_TAU: f64 = 0.05;

/// Relative size below which a `w` denominator is treated as a zero.
pub const SINGULAR_ETA_CUTOFF: f64 = 1e-13;

/// `e(x) = exp(2 pi i x)`.
pub fn e(x: Complex64) -> Complex64 {
    (Complex64::new(0.0, 2.0 * PI) * x).exp()
}

/// Truncation control for the theta series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaParams {
    trunc_tol: f64,
    max_terms: usize,
}

impl ThetaParams {
    pub fn new(trunc_tol: f64, max_terms: usize) -> Result<Self> {
        if !(trunc_tol > 0.0) {
            return Err(Error::InvalidParam(format!("trunc_tol must be positive, got {trunc_tol}")));
        }
        if max_terms < 8 {
            return Err(Error::InvalidParam(format!("max_terms must be at least 8, got {max_terms}")));
        }
        Ok(ThetaParams { trunc_tol, max_terms })
    }

    pub fn trunc_tol(&self) -> f64 {
        self.trunc_tol
    }

    pub fn max_terms(&self) -> usize {
        self.max_terms
    }
}

impl Default for ThetaParams {
    fn default() -> Self {
        ThetaParams { trunc_tol: 1e-14, max_terms: 512 }
    }
}

/// Real characteristic `(u, v)` of `theta_{u,v}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Characteristic {
    pub u: f64,
    pub v: f64,
}

impl Characteristic {
    pub fn new(u: f64, v: f64) -> Self {
        Characteristic { u, v }
    }

    /// `(u/n, v/n)` for an index of `Z_n^2`.
    pub fn from_index(idx: WIndex) -> Self {
        Characteristic { u: idx.u as f64 / idx.n as f64, v: idx.v as f64 / idx.n as f64 }
    }
}

/// An index `(u, v)` in `Z_n^2`, stored reduced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WIndex {
    u: i64,
    v: i64,
    n: i64,
}

impl WIndex {
    pub fn new(u: i64, v: i64, n: i64) -> Self {
        assert!(n >= 1, "modulus must be positive");
        WIndex { u: u.rem_euclid(n), v: v.rem_euclid(n), n }
    }

    pub fn u(&self) -> i64 {
        self.u
    }
    pub fn v(&self) -> i64 {
        self.v
    }
    pub fn n(&self) -> i64 {
        self.n
    }

    /// Row vector times matrix: `(u, v) M = (u a + v c, u b + v d)`.
    pub fn act(&self, m: &Sl2z) -> WIndex {
        let n = self.n as i128;
        let (u, v) = (self.u as i128, self.v as i128);
        let r = |x: i128| x.rem_euclid(n) as i64;
        WIndex { u: r(u * m.a() + v * m.c()), v: r(u * m.b() + v * m.d()), n: self.n }
    }

    pub fn all(n: i64) -> impl Iterator<Item = WIndex> {
        (0..n).flat_map(move |u| (0..n).map(move |v| WIndex { u, v, n }))
    }
}

fn check_tau(tau: Complex64) -> Result<()> {
    if !(tau.im > 0.0) {
        return Err(Error::NotInUpperHalfPlane { im: tau.im });
    }
    if tau.im < MIN_IM_TAU {
        return Err(Error::TauTooLow { im: tau.im, min: MIN_IM_TAU });
    }
    Ok(())
}

/// Half-width of the summation window.
///
/// Terms have magnitude `exp(-pi Im(tau) m^2 - 2 pi m Im(z))`; the window is
/// extended past the peak until the bound `exp(-pi Im(tau) N^2 + 2 pi N |Im z|)`
/// drops below `trunc_tol`, then padded by two terms.
fn window(z: Complex64, tau: Complex64, params: &ThetaParams) -> Result<usize> {
    let y = tau.im;
    let a = z.im.abs();
    let log_tol = params.trunc_tol.ln();
    let peak = (a / y).ceil() as usize;
    let mut n = peak.max(1);
    while -PI * y * (n * n) as f64 + 2.0 * PI * n as f64 * a >= log_tol {
        n += 1;
        if n > params.max_terms {
            return Err(Error::TruncationOverflow { cap: params.max_terms });
        }
    }
    let n = n + 2;
    if n > params.max_terms {
        return Err(Error::TruncationOverflow { cap: params.max_terms });
    }
    Ok(n)
}

/// Returns the series value and the sum of absolute values of its terms.
fn series(z: Complex64, tau: Complex64, params: &ThetaParams) -> Result<(Complex64, f64)> {
    let n = window(z, tau, params)? as i64;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut abs_sum = 0.0;
    // sum from the outside in so the small tail terms are added first
    for m in (1..=n).rev() {
        for mm in [m, -m] {
            let mf = mm as f64;
            let t = e(z * mf + tau * (0.5 * mf * mf));
            abs_sum += t.norm();
            sum += t;
        }
    }
    sum += 1.0;
    abs_sum += 1.0;
    Ok((sum, abs_sum))
}

/// Raw truncated series for `vartheta(z | tau)` with no argument reduction.
pub fn vartheta_series(z: Complex64, tau: Complex64, params: &ThetaParams) -> Result<Complex64> {
    check_tau(tau)?;
    Ok(series(z, tau, params)?.0)
}

/// `vartheta(z|tau)` together with a magnitude scale for the same value
/// (the absolute series sum times the reduction prefactor).
fn vartheta_scaled(z: Complex64, tau: Complex64, params: &ThetaParams) -> Result<(Complex64, f64)> {
    check_tau(tau)?;
    // vartheta(z) = e(-s z + s^2 tau / 2) vartheta(z - s tau)
    let s = (z.im / tau.im).round();
    let w = z - tau * s;
    let w = w - w.re.round();
    let (val, abs_sum) = series(w, tau, params)?;
    let factor = e(-z * s + tau * (0.5 * s * s));
    Ok((factor * val, factor.norm() * abs_sum))
}

pub fn vartheta(z: Complex64, tau: Complex64, params: &ThetaParams) -> Result<Complex64> {
    Ok(vartheta_scaled(z, tau, params)?.0)
}

fn theta_uv_scaled(ch: Characteristic, z: Complex64, tau: Complex64, params: &ThetaParams) -> Result<(Complex64, f64)> {
    if ch.u == 0.0 && ch.v == 0.0 {
        return vartheta_scaled(z, tau, params);
    }
    let (u, v) = (ch.u, ch.v);
    let pre = e((z + v) * u + tau * (0.5 * u * u));
    let (val, scale) = vartheta_scaled(z + tau * u + v, tau, params)?;
    Ok((pre * val, pre.norm() * scale))
}

/// `theta_{u,v}(z|tau) = e(u(z+v) + u^2 tau/2) vartheta(z + u tau + v | tau)`.
pub fn theta_uv(ch: Characteristic, z: Complex64, tau: Complex64, params: &ThetaParams) -> Result<Complex64> {
    Ok(theta_uv_scaled(ch, z, tau, params)?.0)
}

/// `w_{(u,v)}(z, eta | tau) = theta_{u/n,v/n}(z + zeta) / theta_{u/n,v/n}(zeta)`,
/// `zeta = eta + (tau + 1)/2`.
pub fn w_uv(idx: WIndex, z: Complex64, eta: Complex64, tau: Complex64, params: &ThetaParams) -> Result<Complex64> {
    let ch = Characteristic::from_index(idx);
    let zeta = eta + (tau + 1.0) * 0.5;
    let (den, scale) = theta_uv_scaled(ch, zeta, tau, params)?;
    if den.norm() < SINGULAR_ETA_CUTOFF * scale {
        return Err(Error::SingularEta { denominator: den.norm() / scale });
    }
    let num = theta_uv(ch, z + zeta, tau, params)?;
    Ok(num / den)
}

/// `w_{(u,v)}` at a modular triple.
pub fn w_at(idx: WIndex, p: &ModularTriple, params: &ThetaParams) -> Result<Complex64> {
    w_uv(idx, p.z, p.eta, p.tau(), params)
}

/// `|lhs - rhs| / (|lhs| + |rhs|)` for
/// `vartheta(z/tau | -1/tau) = sqrt(-i tau) e(z^2 / 2 tau) vartheta(z|tau)`.
pub fn jacobi_residual(z: Complex64, tau: Complex64, params: &ThetaParams) -> Result<f64> {
    let lhs = vartheta(z / tau, -tau.inv(), params)?;
    let root = (Complex64::new(0.0, -1.0) * tau).sqrt();
    let rhs = root * e(z * z / (tau * 2.0)) * vartheta(z, tau, params)?;
    Ok((lhs - rhs).norm() / (lhs.norm() + rhs.norm()))
}

/// Square root with non-negative real part; purely imaginary ties resolve
/// to the positive imaginary axis.
pub fn principal_sqrt(x: Complex64) -> Complex64 {
    let r = x.sqrt();
    if r.re < 0.0 || (r.re == 0.0 && r.im < 0.0) {
        -r
    } else {
        r
    }
}

/// The eighth root of unity in the general modular transformation of
/// `vartheta`, measured as the ratio
/// `vartheta(z/(c tau+d) | M tau) / [sqrt(c tau+d) e(c z^2 / 2(c tau+d)) vartheta(z|tau)]`.
pub fn modular_root(m: &Sl2z, z: Complex64, tau: Complex64, params: &ThetaParams) -> Result<Complex64> {
    let (ab, cd) = (m.a() * m.b(), m.c() * m.d());
    if ab % 2 != 0 || cd % 2 != 0 {
        return Err(Error::ParityViolation { ab, cd });
    }
    let j = m.automorphy(tau);
    let lhs = vartheta(z / j, m.act_tau(tau), params)?;
    let rhs = principal_sqrt(j) * e(z * z * m.c() as f64 / (j * 2.0)) * vartheta(z, tau, params)?;
    Ok(lhs / rhs)
}

/// Closed-form factor for `S = [[0,-1],[1,0]]`:
/// `w_{(u,v)S}(z,eta|tau) = f_S(z) w_{(u,v)}(S > (z,eta|tau))` with
/// `f_S(z) = e(-z^2/(2 tau) + (1/(2 tau) - 1/2 - eta/tau) z)`.
pub fn f_inversion(p: &ModularTriple) -> Complex64 {
    let (z, eta, tau) = (p.z, p.eta, p.tau());
    e(-z * z / (tau * 2.0) + ((tau * 2.0).inv() - 0.5 - eta / tau) * z)
}

/// Factor for `-I`: `w_{-(u,v)}(z,eta|tau) = e(-z) w_{(u,v)}(-z,-eta|tau)`.
pub fn f_negation(p: &ModularTriple) -> Complex64 {
    e(-p.z)
}

/// The factor `f_M` obtained by threading the generator factors through the
/// `S`/`T` word of `M`.
///
/// For `M = A B` the law composes as `f_{AB}(p) = f_B(p) f_A(B > p)`; `f_T = 1`,
/// `f_S` is [`f_inversion`] and `-I` contributes [`f_negation`].
pub fn f_from_word(m: &Sl2z, p: &ModularTriple) -> Complex64 {
    let word = st_factorization(m);
    let mut f = Complex64::new(1.0, 0.0);
    let mut point = *p;
    for step in word.steps.iter().rev() {
        if *step == StStep::S {
            f *= f_inversion(&point);
        }
        point = act_triple(&step.matrix(), &point);
    }
    if word.negate {
        f *= f_negation(&point);
    }
    f
}

/// Outcome of checking `w_{(u,v)M}(p) = f(z) w_{(u,v)}(M > p)` over all of `Z_n^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct CocycleCheck {
    /// Measured factor, the ratio at index `(0, 0)`.
    pub f: Complex64,
    /// Factor predicted from the generator word.
    pub f_word: Complex64,
    /// Largest relative spread of the ratio across indices.
    pub index_spread: f64,
    /// `|f_word - f| / |f|`.
    pub word_deviation: f64,
    /// Indices skipped because `w_{(u,v)}(M > p)` was numerically zero.
    pub skipped: usize,
}

/// Measures the transformation factor of `w` under `M` at one point and checks
/// it against every index in `Z_n^2`. The measured ratio is authoritative; the
/// word-composed value is reported alongside it.
pub fn w_transform_cocycle(m: &Sl2z, p: &ModularTriple, n: i64, params: &ThetaParams) -> Result<CocycleCheck> {
    let q = act_triple(m, p);
    let mut ratios = Vec::with_capacity((n * n) as usize);
    let mut skipped = 0;
    for idx in WIndex::all(n) {
        let lhs = w_at(idx.act(m), p, params)?;
        let rhs = w_at(idx, &q, params)?;
        if rhs.norm() < 1e-8 * (1.0 + lhs.norm()) {
            skipped += 1;
            continue;
        }
        ratios.push(lhs / rhs);
    }
    let f = w_at(WIndex::new(0, 0, n), p, params)? / w_at(WIndex::new(0, 0, n), &q, params)?;
    let index_spread = ratios.iter().map(|r| (r - f).norm() / f.norm()).fold(0.0, f64::max);
    let f_word = f_from_word(m, p);
    Ok(CocycleCheck { f, f_word, index_spread, word_deviation: (f_word - f).norm() / f.norm(), skipped })
}

/// Basis element of `Theta_n(Lambda_tau)`: the holomorphic `f` with
/// `f(z+1) = f(z)`, `f(z+tau) = -e(-n z) f(z)`, Fourier support on
/// `m = alpha mod n` and leading coefficient `c_alpha = 1`.
///
/// The coefficients follow `c_{m+n} = -e(m tau) c_m`, i.e.
/// `c_{alpha + j n} = (-1)^j e(tau (j alpha + n j (j-1)/2))`.
pub fn theta_basis(alpha: i64, n: i64, z: Complex64, tau: Complex64, params: &ThetaParams) -> Result<Complex64> {
    check_tau(tau)?;
    let alpha = alpha.rem_euclid(n);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut j: i64 = 0;
    // walk outward in both directions until terms are negligible
    for dir in [1i64, -1] {
        let mut step = if dir == 1 { 0 } else { 1 };
        loop {
            let jj = dir * step;
            let jf = jj as f64;
            let exponent = tau * (jf * alpha as f64 + n as f64 * jf * (jf - 1.0) * 0.5) + z * (alpha as f64 + jf * n as f64);
            let sign = if jj.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            let t = e(exponent) * sign;
            sum += t;
            step += 1;
            j += 1;
            if j as usize > 4 * params.max_terms {
                return Err(Error::TruncationOverflow { cap: params.max_terms });
            }
            let beyond_peak = (jf * n as f64) * tau.im * jf.signum() > 2.0 * z.im.abs() + n as f64 * tau.im;
            if beyond_peak && t.norm() < params.trunc_tol * (1.0 + sum.norm()) {
                break;
            }
        }
    }
    Ok(sum)
}
