//! Reproducible random parameters.
//!
//! All draws go through [`ChaCha8Rng`], whose output stream is fixed across
//! platforms and releases, so a seed pins down every sampled point.

use num_complex::Complex64;
use rand::Rng;
pub use rand::SeedableRng;
pub use rand_chacha::ChaCha8Rng;

use crate::modcore::Sl2z;

/// Points within this distance of low-order torsion are rejected.
pub const TORSION_MARGIN: f64 = 1e-3;

/// Exclusion radius around `(1/n) Lambda_tau`, in units of `sqrt(Im tau)`.
pub const LEVEL_MARGIN: f64 = 0.02;

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Distance from `eta` to the nearest point of `(1/order) (Z + Z tau)`.
pub fn torsion_distance(eta: Complex64, tau: Complex64, order: i64) -> f64 {
    let w = eta * order as f64;
    let y = w.im / tau.im;
    let x = w.re - y * tau.re;
    let mut best = f64::INFINITY;
    for dy in -1..=1 {
        for dx in -1..=1 {
            let l = Complex64::new(x.round() + dx as f64, 0.0) + tau * (y.round() + dy as f64);
            best = best.min((w - l).norm());
        }
    }
    best / order as f64
}

/// Whether `eta` is far enough from torsion points for the rank and
/// dimension statements to be numerically clean at level `n`.
pub fn is_generic_eta(eta: Complex64, tau: Complex64, n: i64) -> bool {
    let max_order = 12.max(n * (n - 1));
    if torsion_distance(eta, tau, n) < LEVEL_MARGIN * tau.im.sqrt() {
        return false;
    }
    (1..=max_order).all(|order| torsion_distance(eta, tau, order) >= TORSION_MARGIN)
}

/// Uniform point of the fundamental parallelogram passing [`is_generic_eta`].
pub fn sample_eta(rng: &mut impl Rng, tau: Complex64, n: i64) -> Complex64 {
    loop {
        let eta = Complex64::new(rng.gen_range(0.0..1.0), 0.0) + tau * rng.gen_range(0.0..1.0);
        if is_generic_eta(eta, tau, n) {
            return eta;
        }
    }
}

/// Like [`sample_eta`], additionally requiring genericity of `M > (eta | tau)`.
pub fn sample_eta_for(rng: &mut impl Rng, tau: Complex64, n: i64, m: &Sl2z) -> Complex64 {
    let j = m.automorphy(tau);
    let tau2 = m.act_tau(tau);
    loop {
        let eta = sample_eta(rng, tau, n);
        if is_generic_eta(eta / j, tau2, n) {
            return eta;
        }
    }
}

/// `tau` with `Re tau in [-1/2, 1/2)` and `Im tau in [0.7, 1.3)`.
pub fn sample_tau(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.gen_range(-0.5..0.5), rng.gen_range(0.7..1.3))
}

/// `tau` for which both `tau` and `M tau` stay well inside the upper half-plane.
///
/// For `c != 0` the point sits near `-d/c` at height `f/|c|`, `f in [0.8, 1.25]`,
/// so `Im(M tau)` is about `1/(|c| f)`. Theta series lose accuracy roughly like
/// `exp(-pi / (4 Im tau))`, which makes the balanced choice the best one.
pub fn conditioned_tau(rng: &mut impl Rng, m: &Sl2z) -> Complex64 {
    let (c, d) = (m.c() as f64, m.d() as f64);
    if c == 0.0 {
        return sample_tau(rng);
    }
    let f = rng.gen_range(0.8..1.25);
    let jitter = rng.gen_range(-0.2..0.2);
    Complex64::new((-d + jitter) / c, f / c.abs())
}

/// Spectral parameter with `|Re z| <= 1/2` and `|Im z| <= 0.15 Im tau`.
pub fn sample_z(rng: &mut impl Rng, tau: Complex64) -> Complex64 {
    Complex64::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.15..0.15) * tau.im)
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a.signum() * a, a.signum(), 0)
    } else {
        let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
        (g, y, x - a.div_euclid(b) * y)
    }
}

/// Random element of `SL(2,Z)` with all entries in `[-bound, bound]`.
pub fn random_sl2z(rng: &mut impl Rng, bound: i64) -> Sl2z {
    assert!(bound >= 1, "bound must be positive");
    let b = bound as i128;
    loop {
        let c = rng.gen_range(-b..=b);
        let d = rng.gen_range(-b..=b);
        let (g, x, y) = ext_gcd(d, c);
        if g != 1 {
            continue;
        }
        // a d - b c = 1 with a = x, b = -y, shifted along (c, d)
        let (a0, b0) = (x, -y);
        let valid: Vec<i128> =
            (-4 * b - 4..=4 * b + 4).filter(|t| (a0 + t * c).abs() <= b && (b0 + t * d).abs() <= b).collect();
        if valid.is_empty() {
            continue;
        }
        let t = valid[rng.gen_range(0..valid.len())];
        return Sl2z::new(a0 + t * c, b0 + t * d, c, d).expect("determinant is one by construction");
    }
}
