use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix has determinant {det}, expected 1")]
    NotUnimodular { det: i128 },

    #[error("matrix has determinant {det} mod {n}, expected 1")]
    NotUnimodularModN { det: i64, n: i64 },

    #[error("Im(tau) = {im} is not positive")]
    NotInUpperHalfPlane { im: f64 },

    #[error("Im(tau) = {im} is below the supported minimum {min}")]
    TauTooLow { im: f64, min: f64 },

    #[error("theta series needs more than {cap} terms")]
    TruncationOverflow { cap: usize },

    #[error("eta lies too close to the excluded set (denominator {denominator:e})")]
    SingularEta { denominator: f64 },

    #[error("ab and cd must both be even, got ab = {ab}, cd = {cd}")]
    ParityViolation { ab: i128, cd: i128 },

    #[error("cannot combine Heisenberg elements for n = {left} and n = {right}")]
    MixedN { left: i64, right: i64 },

    #[error("need coprime n > k >= 1, got n = {n}, k = {k}")]
    InvalidNk { n: i64, k: i64 },

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("Schur system has numerical nullity {nullity} (gap {gap:e})")]
    NoIntertwiner { nullity: usize, gap: f64 },

    #[error("multiplication by u does not map the lattices onto each other: {0}")]
    NotALatticeIso(String),

    #[error("u*eta1 - eta2 is at distance {distance:e} from the target lattice")]
    EtaMismatch { distance: f64 },

    #[error("{0} has non-finite entries")]
    NonFinite(&'static str),

    #[error("relation spaces have different ranks ({left} vs {right})")]
    RankMismatch { left: usize, right: usize },

    #[error("only {used} of {total} entries exceed the proportionality cutoff")]
    DegenerateOverlap { used: usize, total: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
