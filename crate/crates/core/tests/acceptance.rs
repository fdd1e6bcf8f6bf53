//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any failure.

use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::Rng;

use qnk_core::algebra::{direct_angle, graded_dims, isom_from_lattice_iso, modular_isom_check, polynomial_dims, relations};
use qnk_core::heisenberg::{intertwiner, nu_order, HeisAuto, HeisElt, HeisRep, INTERTWINER_GAP};
use qnk_core::modcore::{ModularTriple, Sl2z};
use qnk_core::rmatrix::{qybe_residual, RParams};
use qnk_core::sampling::{
    conditioned_tau, random_sl2z, rng_from_seed, sample_eta, sample_eta_for, sample_tau, sample_z, ChaCha8Rng,
};
use qnk_core::theta::{
    e, f_inversion, jacobi_residual, theta_uv, w_transform_cocycle, Characteristic, ThetaParams,
};

const PAIRS: [(i64, i64); 5] = [(2, 1), (3, 1), (3, 2), (4, 1), (5, 2)];
const SEED: u64 = 20_240_601;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn rng(offset: u64) -> ChaCha8Rng {
    rng_from_seed(SEED + offset)
}

fn jacobi() -> Outcome {
    let params = ThetaParams::default();
    let grid = [-0.93, -0.47, 0.03, 0.41, 0.87];
    let taus = [c(0.0, 1.0), c(0.0, 2.0), c(0.3, 0.9), c(-0.4, 1.2), c(0.1, 0.6)];
    let mut worst: f64 = 0.0;
    for tau in taus {
        for x in grid {
            for y in grid {
                worst = worst.max(jacobi_residual(c(x, y), tau, &params).unwrap());
            }
        }
    }
    outcome(worst < 1e-10, format!("max residual {worst:.2e} (tol 1e-10, 125 points)"))
}

fn theta_characteristics() -> Outcome {
    let params = ThetaParams::default();
    let mut rng = rng(2);
    let (mut worst_qp, mut worst_zero): (f64, f64) = (0.0, 0.0);
    for _ in 0..50 {
        let ch = Characteristic::new(rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0));
        let (s, t) = (rng.gen_range(-3..=3) as f64, rng.gen_range(-3..=3) as f64);
        let z = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let tau = sample_tau(&mut rng);
        let lhs = theta_uv(ch, z + tau * s + t, tau, &params).unwrap();
        let rhs = e(-(z + ch.v) * s - tau * (s * s / 2.0) + t * ch.u) * theta_uv(ch, z, tau, &params).unwrap();
        worst_qp = worst_qp.max((lhs - rhs).norm() / (lhs.norm() + rhs.norm()));
        let zero = (tau + 1.0) / 2.0 - (tau * ch.u + ch.v);
        worst_zero = worst_zero.max(theta_uv(ch, zero, tau, &params).unwrap().norm());
    }
    outcome(
        worst_qp < 1e-11 && worst_zero < 1e-9,
        format!("quasi-periodicity {worst_qp:.2e} (tol 1e-11), |theta| at zero {worst_zero:.2e} (tol 1e-9)"),
    )
}

fn w_transformation() -> Outcome {
    let params = ThetaParams::default();
    let mut rng = rng(3);
    // generator pair of the transformation law: inversion and translation
    let (inv, tr) = (Sl2z::S, Sl2z::T);
    let mut worst_spread: f64 = 0.0;
    let mut worst_word: f64 = 0.0;
    let mut translation: f64 = 0.0;
    let mut inversion: f64 = 0.0;
    let mut degenerate = 0;
    let mut cases = 0;
    for n in 3..=5 {
        let mut ms = vec![inv, tr, inv * tr, inv.inverse() * tr, Sl2z::X, Sl2z::Y, Sl2z::X * Sl2z::Y];
        ms.extend((0..5).map(|_| random_sl2z(&mut rng, 5)));
        for m in ms {
            let tau = conditioned_tau(&mut rng, &m);
            let eta = sample_eta_for(&mut rng, tau, n, &m);
            let p = ModularTriple::new(sample_z(&mut rng, tau), eta, tau).unwrap();
            let r = w_transform_cocycle(&m, &p, n, &params).unwrap();
            cases += 1;
            if !(r.f.norm() > 0.0 && r.f.is_finite()) || r.skipped as i64 == n * n {
                degenerate += 1;
                continue;
            }
            worst_spread = worst_spread.max(r.index_spread);
            worst_word = worst_word.max(r.word_deviation);
            if m == tr {
                translation = translation.max((r.f - 1.0).norm());
            }
            if m == inv {
                inversion = inversion.max((f_inversion(&p) - r.f).norm() / r.f.norm());
            }
        }
    }
    let pass = degenerate == 0 && worst_spread < 1e-9 && translation < 1e-9 && inversion < 1e-9 && worst_word < 1e-9;
    outcome(
        pass,
        format!(
            "{cases} cases: index spread {worst_spread:.2e}, |f_T - 1| {translation:.2e}, \
             f_S formula {inversion:.2e}, word-composed f {worst_word:.2e} (tol 1e-9), degenerate {degenerate}"
        ),
    )
}

fn heisenberg_exactness() -> Outcome {
    let mut rng = rng(4);
    let mut failures = 0usize;
    let mut check = |ok: bool| failures += usize::from(!ok);
    for _ in 0..1000 {
        let n = rng.gen_range(2..=8);
        let elt = |rng: &mut ChaCha8Rng| {
            HeisElt::new(n, rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..nu_order(n)))
        };
        let (x, y, z) = (elt(&mut rng), elt(&mut rng), elt(&mut rng));
        let one = HeisElt::identity(n);
        check(x.mul(&y).unwrap().mul(&z).unwrap() == x.mul(&y.mul(&z).unwrap()).unwrap());
        check(x.mul(&one).unwrap() == x && one.mul(&x).unwrap() == x);
        check(x.mul(&x.inv()).unwrap().is_identity() && x.inv().mul(&x).unwrap().is_identity());

        let (t, s, eps) = (HeisElt::t_gen(n), HeisElt::s_gen(n), HeisElt::eps(n));
        check(s.commutator(&t).unwrap() == eps);
        let (a, b, m) = (rng.gen_range(0..3 * n), rng.gen_range(0..3 * n), rng.gen_range(1..12));
        let sa_tb = s.pow(a).mul(&t.pow(b)).unwrap();
        let tb_sa = t.pow(b).mul(&s.pow(a)).unwrap();
        let base = t.pow(b * m).mul(&s.pow(a * m)).unwrap();
        check(sa_tb.pow(m) == base.mul(&eps.pow(m * (m + 1) / 2 * a * b)).unwrap());
        check(tb_sa.pow(m) == base.mul(&eps.pow(m * (m - 1) / 2 * a * b)).unwrap());

        let (big_n, big_m) = (random_sl2z(&mut rng, 6), random_sl2z(&mut rng, 6));
        let (pn, pm) = (HeisAuto::from_sl2z(&big_n, n), HeisAuto::from_sl2z(&big_m, n));
        let pnm = HeisAuto::from_sl2z(&(big_n * big_m), n);
        for g in [t, s, HeisElt::nu_gen(n), x] {
            check(pn.apply(&pm.apply(&g).unwrap()).unwrap() == pnm.apply(&g).unwrap());
        }
        check(pm.apply(&x.mul(&y).unwrap()).unwrap() == pm.apply(&x).unwrap().mul(&pm.apply(&y).unwrap()).unwrap());
    }
    outcome(failures == 0, format!("{failures} exact mismatches over 1000 instances, n in 2..=8"))
}

fn intertwiners() -> Outcome {
    let mut rng = rng(5);
    let (mut min_gap, mut worst_res) = (f64::INFINITY, 0.0f64);
    for n in 2..=6 {
        let rep = HeisRep::rmatrix_action(n).unwrap();
        for _ in 0..20 {
            let m = random_sl2z(&mut rng, 9);
            let psi = intertwiner(&HeisAuto::from_sl2z(&m, n), &rep).unwrap();
            min_gap = min_gap.min(psi.gap);
            for x in [HeisElt::t_gen(n), HeisElt::s_gen(n), HeisElt::nu_gen(n)] {
                worst_res = worst_res.max(psi.residual(&rep, &x).unwrap());
            }
        }
    }
    outcome(
        min_gap > INTERTWINER_GAP && worst_res < 1e-10,
        format!("min gap {min_gap:.2e} (need > 1e6), max residual {worst_res:.2e} (tol 1e-10)"),
    )
}

fn qybe() -> Outcome {
    let mut rng = rng(6);
    let mut worst: f64 = 0.0;
    for (n, k) in PAIRS {
        for _ in 0..20 {
            let tau = sample_tau(&mut rng);
            let eta = sample_eta(&mut rng, tau, n);
            let (u, v) = (sample_z(&mut rng, tau), sample_z(&mut rng, tau));
            let p = RParams::new(n, k, eta, tau).unwrap();
            worst = worst.max(qybe_residual(&p, u, v).unwrap());
        }
    }
    outcome(worst < 1e-8, format!("max residual {worst:.2e} (tol 1e-8, 100 draws)"))
}

fn main_theorem() -> Outcome {
    let mut rng = rng(7);
    let (mut worst, mut rank_errors, mut cases) = (0.0f64, 0, 0);
    for (n, k) in PAIRS {
        let mut ms = vec![Sl2z::X, Sl2z::Y, Sl2z::X * Sl2z::Y];
        ms.extend((0..5).map(|_| random_sl2z(&mut rng, 5)));
        for m in ms {
            let tau = conditioned_tau(&mut rng, &m);
            let eta = sample_eta_for(&mut rng, tau, n, &m);
            let r = modular_isom_check(&RParams::new(n, k, eta, tau).unwrap(), &m).unwrap();
            let expected = (n * (n - 1) / 2) as usize;
            rank_errors += usize::from(r.rank_source != expected || r.rank_target != expected);
            worst = worst.max(r.angle);
            cases += 1;
        }
    }
    outcome(worst < 1e-7 && rank_errors == 0, format!("{cases} cases: max angle {worst:.2e} (tol 1e-7), rank errors {rank_errors}"))
}

fn congruence() -> Outcome {
    let mut rng = rng(8);
    let mut worst: f64 = 0.0;
    for (n, k) in PAIRS {
        let m = Sl2z::new(1, 0, n as i128, 1).unwrap();
        for _ in 0..3 {
            let tau = conditioned_tau(&mut rng, &m);
            let eta = sample_eta_for(&mut rng, tau, n, &m);
            worst = worst.max(direct_angle(&RParams::new(n, k, eta, tau).unwrap(), &m).unwrap());
        }
    }
    outcome(worst < 1e-8, format!("max angle {worst:.2e} (tol 1e-8)"))
}

fn hilbert_dims() -> Outcome {
    let mut rng = rng(9);
    let mut bad = Vec::new();
    for (n, k) in PAIRS {
        for _ in 0..2 {
            let tau = sample_tau(&mut rng);
            let eta = sample_eta(&mut rng, tau, n);
            let rel = relations(&RParams::new(n, k, eta, tau).unwrap()).unwrap();
            let dims = graded_dims(&rel, 3).dims;
            if dims != polynomial_dims(n as usize, 3) {
                bad.push(format!("({n},{k}) {dims:?}"));
            }
        }
    }
    outcome(bad.is_empty(), if bad.is_empty() { "all match [1, n, n(n+1)/2, C(n+2,3)]".into() } else { bad.join("; ") })
}

fn lattice_isos() -> Outcome {
    let (eta, tau) = (c(0.11, 0.06), c(0.2, 1.1));
    let one = c(1.0, 0.0);
    let mut notes = Vec::new();
    let mut pass = true;
    for (n, k) in PAIRS {
        let p = RParams::new(n, k, eta, tau).unwrap();
        let cases = [
            (tau + 1.0, eta, one, Sl2z::T, 1e-8),
            (-tau.inv(), eta / tau, tau.inv(), Sl2z::S, 1e-7),
            (tau, eta + 1.0, one, Sl2z::IDENTITY, 1e-8),
        ];
        for (tau2, eta2, u, expected, tol) in cases {
            match isom_from_lattice_iso(&p, tau2, eta2, u) {
                Ok(r) => {
                    if r.m != expected || r.isom.angle >= tol {
                        pass = false;
                        notes.push(format!("({n},{k}) {} angle {:.2e}", r.m, r.isom.angle));
                    }
                }
                Err(err) => {
                    pass = false;
                    notes.push(format!("({n},{k}) {err}"));
                }
            }
        }
    }
    outcome(pass, if pass { "translation, inversion and eta-shift examples pass for all (n,k)".into() } else { notes.join("; ") })
}

type Criterion = (&'static str, Duration, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("jacobi-identity", Duration::from_secs(1), jacobi),
        ("theta-characteristics", Duration::from_secs(1), theta_characteristics),
        ("w-transformation", Duration::from_secs(10), w_transformation),
        ("heisenberg-exactness", Duration::from_secs(2), heisenberg_exactness),
        ("intertwiner", Duration::from_secs(10), intertwiners),
        ("qybe", Duration::from_secs(60), qybe),
        ("modular-isomorphism", Duration::from_secs(120), main_theorem),
        ("congruence-subgroup", Duration::from_secs(10), congruence),
        ("hilbert-dimensions", Duration::from_secs(30), hilbert_dims),
        ("lattice-isomorphism", Duration::from_secs(10), lattice_isos),
    ];
    let mut failed = 0;
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = run();
        let elapsed = start.elapsed();
        let within = elapsed <= *budget;
        let pass = out.pass && within;
        failed += usize::from(!pass);
        println!(
            "{} {:>2} {name}: {} [{:.2}s of {}s{}]",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            out.detail,
            elapsed.as_secs_f64(),
            budget.as_secs(),
            if within { "" } else { ", over budget" },
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
