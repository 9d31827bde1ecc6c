use thiserror::Error;

/// Everything that can go wrong across the library: bad physical inputs,
/// integrator breakdowns, and malformed scenario configurations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("rotation axis must be unit length (|axis| = {0})")]
    NonUnitAxis(f64),
    #[error("spinor has (near-)zero norm")]
    ZeroSpinor,
    #[error("rest mass must be positive (m = {0})")]
    MasslessParticle(f64),
    #[error("energy {e} leaves no kinetic headroom over rest energy + potential {floor}")]
    ForbiddenEnergy { e: f64, floor: f64 },
    #[error("initial state violates the eikonal relation (residual = {0:e})")]
    InconsistentInitialState(f64),
    #[error("momentum vanished at s = {0} (turning point); the transport law is singular there")]
    TurningPoint(f64),
    #[error("step too coarse for the precession rate at s = {s}: ds*|G| = {density} >= 0.1")]
    StepDensity { s: f64, density: f64 },
    #[error("step size underflow at s = {0}; requested tolerance unreachable")]
    StepSizeUnderflow(f64),
    #[error("no real orbit: P0^2 = {p0_sq:e} below the angular-momentum floor {floor:e}")]
    NoRealOrbit { p0_sq: f64, floor: f64 },
    #[error("curve is degenerate here (|curvature| = {0:e} < 1e-12); Frenet frame undefined")]
    DegenerateCurve(f64),
    #[error("amplitude transport needs a wavefront field (analytic Laplacian or sampled values)")]
    MissingWavefront,
    #[error("config error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
