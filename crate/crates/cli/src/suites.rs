//! Suite definitions and the runner.
//!
//! All parameters are drawn up front, sequentially, from per-suite ChaCha8
//! streams; only the evaluation runs in parallel. Each suite's stream depends
//! on the seed and the suite alone, so a suite yields the same records whether
//! it runs by itself or as part of `all`.

use std::collections::BTreeMap;
use std::time::Instant;

use num_complex::Complex64;
use qnk_core::algebra::{
    direct_angle, graded_dims, heisenberg_invariance_angle, isom_from_lattice_iso, modular_isom_check,
    relations,
};
use qnk_core::heisenberg::{intertwiner, nu_order, HeisAuto, HeisElt, HeisRep};
use qnk_core::modcore::{ModularTriple, Sl2z};
use qnk_core::rmatrix::{qybe_residual, RParams};
use qnk_core::sampling::{
    conditioned_tau, random_sl2z, rng_from_seed, sample_eta, sample_eta_for, sample_tau, sample_z, ChaCha8Rng,
};
use qnk_core::theta::{e, f_inversion, jacobi_residual, theta_uv, w_transform_cocycle, Characteristic, ThetaParams};
use rand::Rng;
use rayon::prelude::*;

use crate::config::{MatrixSource, Suite, SuiteConfig};
use crate::report::{Metric, Record, Report};

/// Checks whose tolerance can be overridden.
pub const CHECK_IDS: [&str; 13] = [
    "theta.jacobi",
    "theta.quasi_periodicity",
    "theta.zero",
    "theta.w_index_spread",
    "theta.w_factor",
    "heisenberg.exactness",
    "heisenberg.intertwiner_residual",
    "heisenberg.intertwiner_gap",
    "qybe.residual",
    "modular.angle",
    "algebra.heisenberg_invariance",
    "algebra.congruence",
    "algebra.lattice_iso",
];

pub fn default_tolerances() -> BTreeMap<&'static str, f64> {
    let tols = [1e-10, 1e-11, 1e-9, 1e-9, 1e-9, 0.0, 1e-10, 1e-6, 1e-8, 1e-7, 1e-8, 1e-8, 1e-7];
    CHECK_IDS.iter().copied().zip(tols).collect()
}

const JACOBI_TAUS: [(f64, f64); 5] = [(0.0, 1.0), (0.0, 2.0), (0.3, 0.9), (-0.4, 1.2), (0.1, 0.6)];
const JACOBI_GRID: [f64; 5] = [-0.93, -0.47, 0.03, 0.41, 0.87];
const THETA_DRAWS: usize = 10;
const HEISENBERG_INSTANCES: usize = 200;
const QYBE_DRAWS: usize = 20;
const ALGEBRA_DRAWS: usize = 2;

type Outcome = std::result::Result<f64, String>;

/// One measured quantity of a task.
struct Measure {
    check_id: &'static str,
    metric: Metric,
    value: Outcome,
    /// Expected value for rank checks; `None` uses the configured tolerance.
    expected: Option<f64>,
}

fn measure(check_id: &'static str, metric: Metric, value: Outcome) -> Measure {
    Measure { check_id, metric, value, expected: None }
}

fn rank_measure(check_id: &'static str, value: Outcome, expected: usize) -> Measure {
    Measure { check_id, metric: Metric::Rank, value, expected: Some(expected as f64) }
}

type Job = Box<dyn Fn() -> Vec<Measure> + Send + Sync>;

struct Task {
    n: Option<i64>,
    k: Option<i64>,
    eta: Option<Complex64>,
    tau: Option<Complex64>,
    matrix: Option<Sl2z>,
    job: Job,
}

impl Task {
    fn new(job: impl Fn() -> Vec<Measure> + Send + Sync + 'static) -> Self {
        Task { n: None, k: None, eta: None, tau: None, matrix: None, job: Box::new(job) }
    }
    fn nk(mut self, n: i64, k: Option<i64>) -> Self {
        (self.n, self.k) = (Some(n), k);
        self
    }
    fn point(mut self, eta: Option<Complex64>, tau: Option<Complex64>) -> Self {
        (self.eta, self.tau) = (eta, tau);
        self
    }
    fn matrix(mut self, m: Sl2z) -> Self {
        self.matrix = Some(m);
        self
    }
}

fn err(e: qnk_core::Error) -> String {
    e.to_string()
}

/// Matrices used by the suites that range over `SL(2,Z)`.
pub fn matrices(cfg: &SuiteConfig) -> Vec<Sl2z> {
    let mut rng = rng_from_seed(cfg.seed);
    match &cfg.matrices {
        MatrixSource::Default { count, bound } => {
            let mut ms = vec![Sl2z::S, Sl2z::T, Sl2z::X, Sl2z::Y, Sl2z::X * Sl2z::Y];
            ms.extend((0..*count).map(|_| random_sl2z(&mut rng, *bound)));
            ms
        }
        MatrixSource::Random { count, bound } => (0..*count).map(|_| random_sl2z(&mut rng, *bound)).collect(),
        MatrixSource::File { entries, .. } => entries
            .iter()
            .map(|[a, b, c, d]| Sl2z::new(*a, *b, *c, *d).expect("validated when parsing"))
            .collect(),
    }
}

/// Draws `tau` (and `eta`) for the `i`-th point, preferring configured values.
struct Points<'a> {
    cfg: &'a SuiteConfig,
    rng: ChaCha8Rng,
    i: usize,
}

impl<'a> Points<'a> {
    fn new(cfg: &'a SuiteConfig, suite: Suite) -> Self {
        let salt = suite as u64 + 1;
        Points { cfg, rng: rng_from_seed(cfg.seed.wrapping_add(salt.wrapping_mul(0x9e37_79b9_7f4a_7c15))), i: 0 }
    }

    /// `tau` and a generic `eta` at level `n`, conditioned on `m` when given.
    fn next(&mut self, n: i64, m: Option<&Sl2z>) -> (Complex64, Complex64) {
        let i = self.i;
        self.i += 1;
        let tau = match (self.cfg.tau.is_empty(), m) {
            (false, _) => self.cfg.tau[i % self.cfg.tau.len()],
            (true, Some(m)) => conditioned_tau(&mut self.rng, m),
            (true, None) => sample_tau(&mut self.rng),
        };
        let eta = match (self.cfg.eta.is_empty(), m) {
            (false, _) => self.cfg.eta[i % self.cfg.eta.len()],
            (true, Some(m)) => sample_eta_for(&mut self.rng, tau, n, m),
            (true, None) => sample_eta(&mut self.rng, tau, n),
        };
        (tau, eta)
    }
}

fn theta_tasks(cfg: &SuiteConfig, ms: &[Sl2z]) -> Vec<Task> {
    let mut pts = Points::new(cfg, Suite::Theta);
    let params = ThetaParams::default();
    let mut tasks = Vec::new();

    let taus: Vec<Complex64> = if cfg.tau.is_empty() {
        JACOBI_TAUS.iter().map(|&(re, im)| Complex64::new(re, im)).collect()
    } else {
        cfg.tau.clone()
    };
    for tau in taus {
        let job = move || {
            let worst = JACOBI_GRID
                .iter()
                .flat_map(|&x| JACOBI_GRID.iter().map(move |&y| Complex64::new(x, y)))
                .map(|z| jacobi_residual(z, tau, &params))
                .try_fold(0.0f64, |acc, r| r.map(|r| acc.max(r)));
            vec![measure("theta.jacobi", Metric::Residual, worst.map_err(err))]
        };
        tasks.push(Task::new(job).point(None, Some(tau)));
    }

    for _ in 0..THETA_DRAWS {
        let rng = &mut pts.rng;
        let ch = Characteristic::new(rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0));
        let (s, t) = (rng.gen_range(-3..=3) as f64, rng.gen_range(-3..=3) as f64);
        let z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let tau = if cfg.tau.is_empty() { sample_tau(rng) } else { cfg.tau[pts.i % cfg.tau.len()] };
        pts.i += 1;
        let job = move || {
            let qp = (|| {
                let lhs = theta_uv(ch, z + tau * s + t, tau, &params)?;
                let factor = e(-(z + ch.v) * s - tau * (s * s / 2.0) + t * ch.u);
                let rhs = factor * theta_uv(ch, z, tau, &params)?;
                Ok((lhs - rhs).norm() / (lhs.norm() + rhs.norm()))
            })();
            let zero = (tau + 1.0) / 2.0 - (tau * ch.u + ch.v);
            vec![
                measure("theta.quasi_periodicity", Metric::Residual, qp.map_err(err)),
                measure("theta.zero", Metric::Residual, theta_uv(ch, zero, tau, &params).map(|x| x.norm()).map_err(err)),
            ]
        };
        tasks.push(Task::new(job).point(None, Some(tau)));
    }

    for n in cfg.levels() {
        for m in ms.iter().copied() {
            let (tau, eta) = pts.next(n, Some(&m));
            let z = sample_z(&mut pts.rng, tau);
            let job = move || {
                let r = ModularTriple::new(z, eta, tau).and_then(|p| {
                    let r = w_transform_cocycle(&m, &p, n, &params)?;
                    let expected = if m == Sl2z::T {
                        Complex64::new(1.0, 0.0)
                    } else if m == Sl2z::S {
                        f_inversion(&p)
                    } else {
                        r.f_word
                    };
                    Ok((r.index_spread, (expected - r.f).norm() / r.f.norm()))
                });
                match r {
                    Ok((spread, factor)) => vec![
                        measure("theta.w_index_spread", Metric::Residual, Ok(spread)),
                        measure("theta.w_factor", Metric::Residual, Ok(factor)),
                    ],
                    Err(e) => vec![
                        measure("theta.w_index_spread", Metric::Residual, Err(err(e.clone()))),
                        measure("theta.w_factor", Metric::Residual, Err(err(e))),
                    ],
                }
            };
            tasks.push(Task::new(job).nk(n, None).point(Some(eta), Some(tau)).matrix(m));
        }
    }
    tasks
}

/// Mismatch count over random instances of the group laws, the power formulas
/// and composition of automorphisms, all in exact integer arithmetic.
fn heisenberg_mismatches(n: i64, seed: u64) -> Outcome {
    let mut rng = rng_from_seed(seed);
    let mut bad = 0usize;
    let run = |rng: &mut ChaCha8Rng, bad: &mut usize| -> qnk_core::Result<()> {
        let mut check = |ok: bool| *bad += usize::from(!ok);
        let elt = |rng: &mut ChaCha8Rng| {
            HeisElt::new(n, rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..nu_order(n)))
        };
        let (x, y, z) = (elt(rng), elt(rng), elt(rng));
        check(x.mul(&y)?.mul(&z)? == x.mul(&y.mul(&z)?)?);
        check(x.mul(&x.inv())?.is_identity());
        let (t, s, eps) = (HeisElt::t_gen(n), HeisElt::s_gen(n), HeisElt::eps(n));
        check(s.commutator(&t)? == eps);
        let (a, b, m) = (rng.gen_range(0..3 * n), rng.gen_range(0..3 * n), rng.gen_range(1..12));
        let base = t.pow(b * m).mul(&s.pow(a * m))?;
        check(s.pow(a).mul(&t.pow(b))?.pow(m) == base.mul(&eps.pow(m * (m + 1) / 2 * a * b))?);
        check(t.pow(b).mul(&s.pow(a))?.pow(m) == base.mul(&eps.pow(m * (m - 1) / 2 * a * b))?);
        let (big_n, big_m) = (random_sl2z(rng, 6), random_sl2z(rng, 6));
        let (pn, pm) = (HeisAuto::from_sl2z(&big_n, n), HeisAuto::from_sl2z(&big_m, n));
        let pnm = HeisAuto::from_sl2z(&(big_n * big_m), n);
        for g in [t, s, HeisElt::nu_gen(n), x] {
            check(pn.apply(&pm.apply(&g)?)? == pnm.apply(&g)?);
        }
        check(pm.apply(&x.mul(&y)?)? == pm.apply(&x)?.mul(&pm.apply(&y)?)?);
        Ok(())
    };
    for _ in 0..HEISENBERG_INSTANCES {
        run(&mut rng, &mut bad).map_err(err)?;
    }
    Ok(bad as f64)
}

fn heisenberg_tasks(cfg: &SuiteConfig, ms: &[Sl2z]) -> Vec<Task> {
    let mut pts = Points::new(cfg, Suite::Heisenberg);
    let mut tasks = Vec::new();
    for n in cfg.levels() {
        let seed: u64 = pts.rng.gen();
        tasks.push(
            Task::new(move || vec![measure("heisenberg.exactness", Metric::Residual, heisenberg_mismatches(n, seed))])
                .nk(n, None),
        );
        for m in ms.iter().copied() {
            let job = move || {
                let r = HeisRep::rmatrix_action(n).and_then(|rep| {
                    let psi = intertwiner(&HeisAuto::from_sl2z(&m, n), &rep)?;
                    let mut worst = 0.0f64;
                    for x in [HeisElt::t_gen(n), HeisElt::s_gen(n), HeisElt::nu_gen(n)] {
                        worst = worst.max(psi.residual(&rep, &x)?);
                    }
                    Ok((worst, psi.gap.recip()))
                });
                let (res, gap) = match r {
                    Ok((res, gap)) => (Ok(res), Ok(gap)),
                    Err(e) => (Err(err(e.clone())), Err(err(e))),
                };
                vec![
                    measure("heisenberg.intertwiner_residual", Metric::Residual, res),
                    measure("heisenberg.intertwiner_gap", Metric::Residual, gap),
                ]
            };
            tasks.push(Task::new(job).nk(n, None).matrix(m));
        }
    }
    tasks
}

fn qybe_tasks(cfg: &SuiteConfig) -> Vec<Task> {
    let mut pts = Points::new(cfg, Suite::Qybe);
    let mut tasks = Vec::new();
    for &(n, k) in &cfg.nk {
        for _ in 0..QYBE_DRAWS {
            let (tau, eta) = pts.next(n, None);
            let (u, v) = (sample_z(&mut pts.rng, tau), sample_z(&mut pts.rng, tau));
            let job = move || {
                let r = RParams::new(n, k, eta, tau).and_then(|p| qybe_residual(&p, u, v));
                vec![measure("qybe.residual", Metric::Residual, r.map_err(err))]
            };
            tasks.push(Task::new(job).nk(n, Some(k)).point(Some(eta), Some(tau)));
        }
    }
    tasks
}

fn modular_tasks(cfg: &SuiteConfig, ms: &[Sl2z]) -> Vec<Task> {
    let mut pts = Points::new(cfg, Suite::Modular);
    let mut tasks = Vec::new();
    for &(n, k) in &cfg.nk {
        let expected = (n * (n - 1) / 2) as usize;
        for m in ms.iter().copied() {
            let (tau, eta) = pts.next(n, Some(&m));
            let job = move || {
                let r = RParams::new(n, k, eta, tau).and_then(|p| modular_isom_check(&p, &m));
                match r {
                    Ok(r) => {
                        let rank = if r.rank_source == r.rank_target { r.rank_source as f64 } else { f64::NAN };
                        vec![
                            rank_measure("modular.rank", Ok(rank), expected),
                            measure("modular.angle", Metric::Angle, Ok(r.angle.max(r.reverse_angle))),
                        ]
                    }
                    Err(e) => vec![
                        rank_measure("modular.rank", Err(err(e.clone())), expected),
                        measure("modular.angle", Metric::Angle, Err(err(e))),
                    ],
                }
            };
            tasks.push(Task::new(job).nk(n, Some(k)).point(Some(eta), Some(tau)).matrix(m));
        }
    }
    tasks
}

fn binom3(n: usize) -> usize {
    (n + 2) * (n + 1) * n / 6
}

fn algebra_tasks(cfg: &SuiteConfig) -> Vec<Task> {
    let mut pts = Points::new(cfg, Suite::Algebra);
    let mut tasks = Vec::new();
    for &(n, k) in &cfg.nk {
        let nu = n as usize;
        for _ in 0..ALGEBRA_DRAWS {
            let (tau, eta) = pts.next(n, None);
            let job = move || {
                let r = RParams::new(n, k, eta, tau).and_then(|p| relations(&p)).and_then(|rel| {
                    let dims = graded_dims(&rel, 3).dims;
                    let angle = heisenberg_invariance_angle(&rel, &HeisRep::algebra_action(n)?);
                    Ok((rel.rank(), dims[3], angle))
                });
                match r {
                    Ok((rank, cubic, angle)) => vec![
                        rank_measure("algebra.relation_rank", Ok(rank as f64), nu * (nu - 1) / 2),
                        rank_measure("algebra.cubic_dim", Ok(cubic as f64), binom3(nu)),
                        measure("algebra.heisenberg_invariance", Metric::Angle, Ok(angle)),
                    ],
                    Err(e) => vec![
                        rank_measure("algebra.relation_rank", Err(err(e.clone())), nu * (nu - 1) / 2),
                        rank_measure("algebra.cubic_dim", Err(err(e.clone())), binom3(nu)),
                        measure("algebra.heisenberg_invariance", Metric::Angle, Err(err(e))),
                    ],
                }
            };
            tasks.push(Task::new(job).nk(n, Some(k)).point(Some(eta), Some(tau)));
        }

        let congruence = Sl2z::new(1, 0, n as i128, 1).expect("unimodular");
        let (tau, eta) = pts.next(n, Some(&congruence));
        let job = move || {
            let r = RParams::new(n, k, eta, tau).and_then(|p| direct_angle(&p, &congruence));
            vec![measure("algebra.congruence", Metric::Angle, r.map_err(err))]
        };
        tasks.push(Task::new(job).nk(n, Some(k)).point(Some(eta), Some(tau)).matrix(congruence));

        let (tau, eta) = pts.next(n, None);
        let one = Complex64::new(1.0, 0.0);
        let examples =
            [(Sl2z::T, tau + 1.0, eta, one), (Sl2z::S, -tau.inv(), eta / tau, tau.inv()), (Sl2z::IDENTITY, tau, eta + 1.0, one)];
        for (m, tau2, eta2, u) in examples {
            let job = move || {
                let r = RParams::new(n, k, eta, tau).and_then(|p| isom_from_lattice_iso(&p, tau2, eta2, u));
                let value = match r {
                    Ok(r) if r.m != m => Err(format!("recovered {} instead of {m}", r.m)),
                    Ok(r) => Ok(r.isom.angle.max(r.isom.reverse_angle)),
                    Err(e) => Err(err(e)),
                };
                vec![measure("algebra.lattice_iso", Metric::Angle, value)]
            };
            tasks.push(Task::new(job).nk(n, Some(k)).point(Some(eta), Some(tau)).matrix(m));
        }
    }
    tasks
}

fn tasks_for(cfg: &SuiteConfig, suite: Suite, ms: &[Sl2z]) -> Vec<Task> {
    match suite {
        Suite::Theta => theta_tasks(cfg, ms),
        Suite::Heisenberg => heisenberg_tasks(cfg, ms),
        Suite::Qybe => qybe_tasks(cfg),
        Suite::Modular => modular_tasks(cfg, ms),
        Suite::Algebra => algebra_tasks(cfg),
        Suite::All => Suite::All.expand().into_iter().flat_map(|s| tasks_for(cfg, s, ms)).collect(),
    }
}

fn evaluate(cfg: &SuiteConfig, task: &Task) -> Vec<Record> {
    let start = Instant::now();
    let measures = (task.job)();
    let wall_time = start.elapsed().as_secs_f64();
    measures
        .into_iter()
        .map(|m| {
            let tol = m.expected.unwrap_or_else(|| cfg.tol(m.check_id));
            let (value, error) = match m.value {
                Ok(v) => (v, None),
                Err(e) => (f64::NAN, Some(e)),
            };
            Record {
                check_id: m.check_id,
                n: task.n,
                k: task.k,
                eta: task.eta,
                tau: task.tau,
                matrix: task.matrix,
                metric: m.metric,
                value,
                tol,
                pass: error.is_none() && Record::judge(m.metric, value, tol),
                error,
                wall_time,
            }
        })
        .collect()
}

/// Runs the configured suite. Records come back in generation order.
pub fn run(cfg: &SuiteConfig) -> Report {
    let start = Instant::now();
    let ms = matrices(cfg);
    let tasks = tasks_for(cfg, cfg.suite, &ms);
    let records = tasks.par_iter().map(|t| evaluate(cfg, t)).collect::<Vec<_>>().concat();
    Report { records, wall_time: start.elapsed().as_secs_f64() }
}
