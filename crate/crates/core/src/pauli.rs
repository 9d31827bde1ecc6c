//! Pauli algebra and SU(2) kinematics.
//!
//! Everything downstream (spin transport, polarization analogies) reduces to
//! products and exponentials of `n . sigma`. The conventions are fixed here
//! once and the rest of the crate inherits them:
//!
//! * `su2_exp(n, theta) = exp(+i theta n.sigma) = cos(theta) I + i sin(theta) n.sigma`,
//! * a spinor's Bloch vector is `<sigma>`, and applying `su2_exp(n, theta)`
//!   rotates it by `-2 theta` about `n` (right-hand rule),
//! * eigenspinors carry a deterministic global phase: the first component of
//!   non-negligible modulus is made real and positive.

use nalgebra::{Matrix2, Rotation3, Unit, Vector2, Vector3};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Two-component spinor. `[0]` is the spin-up amplitude, `[1]` spin-down.
pub type Spinor2 = Vector2<Complex64>;

const I: Complex64 = Complex64::new(0.0, 1.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

pub fn sigma_x() -> Matrix2<Complex64> {
    Matrix2::new(ZERO, ONE, ONE, ZERO)
}

pub fn sigma_y() -> Matrix2<Complex64> {
    Matrix2::new(ZERO, -I, I, ZERO)
}

pub fn sigma_z() -> Matrix2<Complex64> {
    Matrix2::new(ONE, ZERO, ZERO, -ONE)
}

/// `v . sigma` for a real coefficient vector.
pub fn dot_sigma(v: &Vector3<f64>) -> Matrix2<Complex64> {
    let (vx, vy, vz) = (v.x, v.y, v.z);
    Matrix2::new(
        Complex64::new(vz, 0.0),
        Complex64::new(vx, -vy),
        Complex64::new(vx, vy),
        Complex64::new(-vz, 0.0),
    )
}

/// `v . sigma` for a complex coefficient vector.
pub fn dot_sigma_c(v: &Vector3<Complex64>) -> Matrix2<Complex64> {
    Matrix2::new(v.z, v.x - I * v.y, v.x + I * v.y, -v.z)
}

/// Product identity `(a.sigma)(b.sigma) = (a.b) I + i (a x b).sigma`,
/// returned as coefficients `(scalar, vector)` of `(I, sigma)`.
pub fn sigma_product(a: &Vector3<f64>, b: &Vector3<f64>) -> (Complex64, Vector3<Complex64>) {
    let scalar = Complex64::new(a.dot(b), 0.0);
    let axb = a.cross(b);
    let vector = Vector3::new(I * axb.x, I * axb.y, I * axb.z);
    (scalar, vector)
}

/// An SU(2) rotation `exp(+i angle axis.sigma)` stored in axis-angle form.
#[derive(Debug, Clone, Copy)]
pub struct SpinRotor {
    pub axis: Vector3<f64>,
    pub angle: f64,
}

impl SpinRotor {
    pub fn matrix(&self) -> Matrix2<Complex64> {
        let (s, c) = self.angle.sin_cos();
        Matrix2::identity() * Complex64::new(c, 0.0) + dot_sigma(&self.axis) * Complex64::new(0.0, s)
    }

    pub fn apply(&self, u: &Spinor2) -> Spinor2 {
        let (s, c) = self.angle.sin_cos();
        let n = &self.axis;
        // (c I + i s n.sigma) u, unrolled to avoid building the matrix per step.
        let up = Complex64::new(c, s * n.z) * u[0] + Complex64::new(s * n.y, s * n.x) * u[1];
        let dn = Complex64::new(-s * n.y, s * n.x) * u[0] + Complex64::new(c, -s * n.z) * u[1];
        Spinor2::new(up, dn)
    }
}

/// `exp(+i angle n.sigma)`. The axis must be unit length to 1e-12.
pub fn su2_exp(axis: &Vector3<f64>, angle: f64) -> Result<SpinRotor> {
    let norm = axis.norm();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::NonUnitAxis(norm));
    }
    Ok(SpinRotor { axis: *axis, angle })
}

/// `exp(i v.sigma)` for an arbitrary real coefficient vector (not necessarily
/// unit): rotor about `v/|v|` by `|v|`, smoothly the identity as `v -> 0`.
pub fn su2_exp_vec(v: &Vector3<f64>) -> SpinRotor {
    let norm = v.norm();
    if norm < 1e-300 {
        SpinRotor { axis: Vector3::z(), angle: 0.0 }
    } else {
        SpinRotor { axis: v / norm, angle: norm }
    }
}

/// Bloch vector `<sigma>` of a (not necessarily normalized) spinor.
pub fn bloch(u: &Spinor2) -> Result<Vector3<f64>> {
    let n2 = u.norm_squared();
    if n2 < 1e-300 {
        return Err(Error::ZeroSpinor);
    }
    let cross = u[0].conj() * u[1];
    Ok(Vector3::new(
        2.0 * cross.re / n2,
        2.0 * cross.im / n2,
        (u[0].norm_sqr() - u[1].norm_sqr()) / n2,
    ))
}

/// `|<a|b>|` for unit-normalized inputs; insensitive to global phase.
pub fn fidelity(a: &Spinor2, b: &Spinor2) -> f64 {
    let na = a.norm();
    let nb = b.norm();
    if na < 1e-300 || nb < 1e-300 {
        return 0.0;
    }
    a.dotc(b).norm() / (na * nb)
}

/// Rephase so the first component with modulus above 1e-8 is real positive.
pub fn fix_phase(u: &Spinor2) -> Spinor2 {
    for k in 0..2 {
        let m = u[k].norm();
        if m > 1e-8 {
            let phase = u[k].conj() / m;
            return u * phase;
        }
    }
    *u
}

/// Normalized eigenspinor of `n.sigma` with eigenvalue `branch` (+1 or -1).
///
/// Built from the half-angle formulas on the branch that stays well
/// conditioned: the usual form degenerates as `n -> -z`, so within 1e-8 of
/// that pole the complementary expression is used instead.
pub fn eigenspinor(n: &Vector3<f64>, branch: i8) -> Result<Spinor2> {
    let norm = n.norm();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::NonUnitAxis(norm));
    }
    assert!(branch == 1 || branch == -1, "branch must be +1 or -1");
    // Work with the +1 eigenspinor of (b n).sigma, b = branch.
    let m = if branch == 1 { *n } else { -*n };
    let u = if (1.0 + m.z).abs() < 1e-8 {
        Spinor2::new(ZERO, ONE)
    } else {
        let denom = (2.0 * (1.0 + m.z)).sqrt();
        Spinor2::new(
            Complex64::new((1.0 + m.z) / denom, 0.0),
            Complex64::new(m.x / denom, m.y / denom),
        )
    };
    Ok(fix_phase(&u))
}

/// Axis and angles of a numerically unitary 2x2 propagator.
#[derive(Debug, Clone, Copy)]
pub struct RotorLog {
    /// Rotation axis (unit), chosen so the SO(3) angle lands in [0, pi].
    pub axis: Vector3<f64>,
    /// SU(2) exponent angle `a`: U ~ exp(i a axis.sigma), a in [0, pi/2].
    pub su2_angle: f64,
    /// Angle the Bloch vector turns through: `2a` (sense: -2a about `axis`).
    pub bloch_angle: f64,
}

/// Extract axis/angle from a propagator, removing the U(1) phase first.
///
/// The two SU(2) lifts `+-U` describe the same spin rotation; the one with
/// the smaller exponent is reported, which makes the answer unique whenever
/// the rotation is not a half turn.
pub fn rotor_log(u: &Matrix2<Complex64>) -> Result<RotorLog> {
    let det = u[(0, 0)] * u[(1, 1)] - u[(0, 1)] * u[(1, 0)];
    if det.norm() < 1e-300 {
        return Err(Error::ZeroSpinor);
    }
    let phase = det.sqrt();
    let v = u / phase; // det(v) = 1 up to rounding
    let half_tr = (v[(0, 0)] + v[(1, 1)]) * Complex64::new(0.5, 0.0);
    let mut cos_a = half_tr.re.clamp(-1.0, 1.0);
    // Components of sin(a) * axis from tr(v sigma_k) = 2 i sin(a) n_k.
    let mut sa = Vector3::new(
        ((v[(0, 1)] + v[(1, 0)]) * Complex64::new(0.5, 0.0)).im,
        ((v[(0, 1)] - v[(1, 0)]) * (I * Complex64::new(0.5, 0.0))).im,
        ((v[(0, 0)] - v[(1, 1)]) * Complex64::new(0.5, 0.0)).im,
    );
    if cos_a < 0.0 {
        // Flip to the -U lift so the exponent angle is <= pi/2.
        cos_a = -cos_a;
        sa = -sa;
    }
    let sin_a = sa.norm();
    let axis = if sin_a < 1e-15 { Vector3::z() } else { sa / sin_a };
    let a = sin_a.atan2(cos_a);
    Ok(RotorLog { axis, su2_angle: a, bloch_angle: 2.0 * a })
}

/// SO(3) rotation matching the Bloch-vector action of `su2_exp(axis, theta)`.
pub fn bloch_rotation(axis: &Vector3<f64>, theta: f64) -> Rotation3<f64> {
    Rotation3::from_axis_angle(&Unit::new_normalize(*axis), -2.0 * theta)
}
