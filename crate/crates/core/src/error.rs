use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("grid {n_theta}x{n_phi} rejected: {reason}")]
    Grid {
        n_theta: usize,
        n_phi: usize,
        reason: &'static str,
    },
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("metric not positive definite at node {node}")]
    NotPositiveDefinite { node: usize },
    #[error("point at radius {radius} lies outside the chart (inner radius {inner})")]
    OutsideChart { radius: f64, inner: f64 },
    #[error("degenerate induced metric at node {node}")]
    DegenerateMetric { node: usize },
    #[error("surface is no longer a radial graph at node {node} (t = {t})")]
    GraphLost { node: usize, t: f64 },
    #[error("class bound violated at t = {t}: {bound} = {value}")]
    ClassViolation { t: f64, bound: &'static str, value: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("index {index} out of range (valid {lo}..={hi})")]
    IndexOutOfRange { index: usize, lo: usize, hi: usize },
    #[error("test function support [{a}, {b}] not inside the sampled interval [{t0}, {t1}]")]
    Support { a: f64, b: f64, t0: f64, t1: f64 },
    #[error("eigen solver failed: {0}")]
    Eigen(String),
    #[error("Moser map failed: {0}")]
    Moser(String),
    #[error("block sampling mismatch")]
    SamplingMismatch,
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
