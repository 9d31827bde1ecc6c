//! WKB spin transport along relativistic rays.
//!
//! To leading WKB order the spinor factor of the wave rides the ray and
//! precesses according to
//!
//! ```text
//!   du/ds = -i (G . sigma) u,
//!   G = (grad V x grad W) / (2 (E + m c^2 - V) |grad W|),
//! ```
//!
//! so only the component of the potential gradient transverse to the ray
//! twists the spin. Stepping multiplies exact SU(2) rotors evaluated at
//! interval midpoints: unitary by construction, second order in the step,
//! and the accumulated propagator is kept so the net rotation axis/angle can
//! be read off at the end.
//!
//! For the circle and helix geometries the transport equation integrates in
//! closed form; those rotors live here too and double as test oracles for
//! the generic stepper.

use nalgebra::{Matrix2, Vector3};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pauli::{bloch, dot_sigma, rotor_log, su2_exp_vec, RotorLog, SpinRotor, Spinor2};
use crate::potential::ScalarPotential;
use crate::ray::ArcCurve;

/// Precession generator G at a point with momentum p = grad W.
pub fn precession_generator(
    x: &Vector3<f64>,
    p: &Vector3<f64>,
    pot: &ScalarPotential,
    m: f64,
    c: f64,
    e: f64,
) -> Result<Vector3<f64>> {
    let pn = p.norm();
    if pn < 1e-12 {
        return Err(Error::TurningPoint(f64::NAN));
    }
    let denom = 2.0 * (e + m * c * c - pot.value(x)) * pn;
    Ok(pot.gradient(x).cross(p) / denom)
}

/// G(s) on a prescribed unit-speed curve, with the tangent standing in for
/// the momentum direction.
pub fn generator_on_curve(
    curve: &dyn ArcCurve,
    s: f64,
    pot: &ScalarPotential,
    m: f64,
    c: f64,
    e: f64,
) -> Vector3<f64> {
    let x = curve.position(s);
    let t = curve.tangent(s);
    pot.gradient(&x).cross(&t) / (2.0 * (e + m * c * c - pot.value(&x)))
}

/// Spin state sampled along the transport.
#[derive(Debug, Clone, Copy)]
pub struct TransportState {
    pub s: f64,
    pub u: Spinor2,
    /// Local wave amplitude. Transporting it needs wavefront curvature that a
    /// single ray does not carry (see [`amplitude_rate`]), so plain spin
    /// transport reports the unit normalization.
    pub amp: f64,
    pub bloch: Vector3<f64>,
    pub g_norm: f64,
}

pub struct TransportResult {
    pub states: Vec<TransportState>,
    /// Accumulated SU(2) propagator over the full span.
    pub propagator: Matrix2<Complex64>,
}

impl TransportResult {
    /// Net rotation axis and angle of the whole run.
    pub fn net_rotor(&self) -> Result<RotorLog> {
        rotor_log(&self.propagator)
    }

    pub fn final_spinor(&self) -> Spinor2 {
        self.states.last().expect("transport produces at least the initial state").u
    }
}

/// Transport `u_init` along `curve` from arc length 0 to `span`.
///
/// `ds` is an upper bound on the step; the actual step divides `span`
/// evenly. Each step applies `exp(-i ds G . sigma)` with G evaluated at the
/// step midpoint. Steps must resolve the precession: `ds |G| < 0.1` is
/// enforced, not assumed.
pub fn transport_spin(
    curve: &dyn ArcCurve,
    u_init: &Spinor2,
    pot: &ScalarPotential,
    m: f64,
    c: f64,
    e: f64,
    ds: f64,
    span: f64,
) -> Result<TransportResult> {
    assert!(span > 0.0 && ds > 0.0, "forward transport with a positive step");
    if u_init.norm() < 1e-300 {
        return Err(Error::ZeroSpinor);
    }
    let n = (span / ds).ceil().max(1.0) as usize;
    let h = span / n as f64;

    let mut u = *u_init;
    let mut propagator = Matrix2::<Complex64>::identity();
    let mut states = Vec::with_capacity(n + 1);

    let record = |s: f64, u: &Spinor2, g: &Vector3<f64>| -> Result<TransportState> {
        Ok(TransportState { s, u: *u, amp: 1.0, bloch: bloch(u)?, g_norm: g.norm() })
    };

    let g0 = generator_on_curve(curve, 0.0, pot, m, c, e);
    states.push(record(0.0, &u, &g0)?);

    for k in 0..n {
        let s_mid = (k as f64 + 0.5) * h;
        let g_mid = generator_on_curve(curve, s_mid, pot, m, c, e);
        let density = h * g_mid.norm();
        if density >= 0.1 {
            return Err(Error::StepDensity { s: s_mid, density });
        }
        let rotor = su2_exp_vec(&(-h * g_mid));
        u = rotor.apply(&u);
        propagator = rotor.matrix() * propagator;
        let s_next = (k + 1) as f64 * h;
        let g_here = generator_on_curve(curve, s_next, pot, m, c, e);
        states.push(record(s_next, &u, &g_here)?);
    }

    Ok(TransportResult { states, propagator })
}

/// Closed-form rotor for a circle of radius `r0` traversed counterclockwise
/// in a potential whose value on the circle is `v0` and whose outward radial
/// slope there is `-k r0` (k > 0 means the potential falls off outward):
/// `u(s) = exp(i theta sigma_z) u(0)`, `theta = k r0 s / (2 (E + m c^2 - v0))`.
pub fn circle_exact_rotor(s: f64, k: f64, r0: f64, v0: f64, m: f64, c: f64, e: f64) -> SpinRotor {
    let theta = k * r0 * s / (2.0 * (e + m * c * c - v0));
    SpinRotor { axis: Vector3::z(), angle: theta }
}

pub fn circle_exact(
    u0: &Spinor2,
    s: f64,
    k: f64,
    r0: f64,
    v0: f64,
    m: f64,
    c: f64,
    e: f64,
) -> Spinor2 {
    circle_exact_rotor(s, k, r0, v0, m, c, e).apply(u0)
}

/// The dimensionless angles controlling helix transport.
#[derive(Debug, Clone, Copy)]
pub struct HelixAngles {
    /// Transverse coupling mu = k / (sqrt(1 + Omega^2 r0^2) 2 (E + m c^2 - v0)).
    pub mu: f64,
    /// Half the azimuthal advance: delta = Omega s / (2 sqrt(1 + Omega^2 r0^2)).
    pub delta: f64,
    /// Accumulated z-rotation: theta = mu r0^2 Omega s.
    pub theta: f64,
    /// Transverse tilt: phi = mu r0 s.
    pub phi: f64,
}

pub fn helix_angles(
    s: f64,
    k: f64,
    r0: f64,
    omega: f64,
    v0: f64,
    m: f64,
    c: f64,
    e: f64,
) -> HelixAngles {
    let root = (1.0 + omega * omega * r0 * r0).sqrt();
    let mu = k / (root * 2.0 * (e + m * c * c - v0));
    HelixAngles {
        mu,
        delta: omega * s / (2.0 * root),
        theta: mu * r0 * r0 * omega * s,
        phi: mu * r0 * s,
    }
}

/// Exact transport rotor along the helix x = (r0 cos Omega z, r0 sin Omega z, z)
/// (counterclockwise, increasing z, start at (r0, 0, 0)) in a potential with
/// value `v0` and outward radial slope `-k r0` on the cylinder:
///
/// ```text
///   U(s) = exp(-i delta sigma_z) exp(i [ (delta + theta) sigma_z - phi sigma_y ])
/// ```
///
/// with the angles of [`helix_angles`]. Reduces to the circle rotor as
/// Omega -> 0 and to exp(i theta sigma_z) plus a transverse tilt of order phi
/// in general.
pub fn helix_exact_rotor(
    s: f64,
    k: f64,
    r0: f64,
    omega: f64,
    v0: f64,
    m: f64,
    c: f64,
    e: f64,
) -> Matrix2<Complex64> {
    let ang = helix_angles(s, k, r0, omega, v0, m, c, e);
    let outer = SpinRotor { axis: Vector3::z(), angle: -ang.delta };
    let inner = su2_exp_vec(&Vector3::new(0.0, -ang.phi, ang.delta + ang.theta));
    outer.matrix() * inner.matrix()
}

pub fn helix_exact(
    u0: &Spinor2,
    s: f64,
    k: f64,
    r0: f64,
    omega: f64,
    v0: f64,
    m: f64,
    c: f64,
    e: f64,
) -> Spinor2 {
    helix_exact_rotor(s, k, r0, omega, v0, m, c, e) * u0
}

/// First order in mu:
/// `U1 = I + i theta sigma_z + i phi sinc(delta) (sin(delta) sigma_x - cos(delta) sigma_y)`.
/// Operator-norm error against the exact rotor is O(mu^2).
pub fn helix_first_order_rotor(
    s: f64,
    k: f64,
    r0: f64,
    omega: f64,
    v0: f64,
    m: f64,
    c: f64,
    e: f64,
) -> Matrix2<Complex64> {
    let ang = helix_angles(s, k, r0, omega, v0, m, c, e);
    let sinc = if ang.delta.abs() < 1e-8 {
        1.0 - ang.delta * ang.delta / 6.0
    } else {
        ang.delta.sin() / ang.delta
    };
    let w = Vector3::new(
        ang.phi * sinc * ang.delta.sin(),
        -ang.phi * sinc * ang.delta.cos(),
        ang.theta,
    );
    Matrix2::identity() + dot_sigma(&w) * Complex64::new(0.0, 1.0)
}

/// Net spin-rotation angle per helix pitch, small-coupling form:
/// `pi k r0^2 / (m c^2)`.
pub fn pitch_rotation_matter(k: f64, r0: f64, m: f64, c: f64) -> f64 {
    std::f64::consts::PI * k * r0 * r0 / (m * c * c)
}

/// Harmonic specialization k = m Omega^2 v_z^2 of [`pitch_rotation_matter`]:
/// `pi Omega^2 r0^2 v_z^2 / c^2`.
pub fn pitch_rotation_matter_harmonic(omega: f64, r0: f64, v_z: f64, c: f64) -> f64 {
    std::f64::consts::PI * omega * omega * r0 * r0 * v_z * v_z / (c * c)
}

/// Wavefront information needed to transport the scalar amplitude: either an
/// analytic Laplacian of W or point samples it can be estimated from.
pub enum WavefrontField<'a> {
    AnalyticLaplacian(&'a dyn Fn(&Vector3<f64>) -> f64),
    /// Values of W near x; `scale` is a characteristic length of the field,
    /// the finite-difference step is 1e-4 times it.
    Sampled { w: &'a dyn Fn(&Vector3<f64>) -> f64, scale: f64 },
}

impl WavefrontField<'_> {
    fn laplacian(&self, x: &Vector3<f64>) -> f64 {
        match self {
            WavefrontField::AnalyticLaplacian(f) => f(x),
            WavefrontField::Sampled { w, scale } => {
                let h = 1e-4 * scale;
                let mut acc = -6.0 * w(x);
                for i in 0..3 {
                    let mut xp = *x;
                    let mut xm = *x;
                    xp[i] += h;
                    xm[i] -= h;
                    acc += w(&xp) + w(&xm);
                }
                acc / (h * h)
            }
        }
    }
}

/// Logarithmic amplitude rate d ln|phi0| / ds =
/// `-lap W / (2 |p|) - grad V . p / (2 (E + m c^2 - V) |p|)`.
pub fn amplitude_rate(
    x: &Vector3<f64>,
    p: &Vector3<f64>,
    pot: &ScalarPotential,
    m: f64,
    c: f64,
    e: f64,
    wavefront: &WavefrontField,
) -> Result<f64> {
    let pn = p.norm();
    if pn < 1e-12 {
        return Err(Error::TurningPoint(f64::NAN));
    }
    let lap = wavefront.laplacian(x);
    let grad_v = pot.gradient(x);
    Ok(-lap / (2.0 * pn) - grad_v.dot(p) / (2.0 * (e + m * c * c - pot.value(x)) * pn))
}

/// Rate of change of the Bloch vector under transport: `2 G x <sigma>`.
pub fn bloch_rate(
    x: &Vector3<f64>,
    p: &Vector3<f64>,
    pot: &ScalarPotential,
    m: f64,
    c: f64,
    e: f64,
    u: &Spinor2,
) -> Result<Vector3<f64>> {
    let g = precession_generator(x, p, pot, m, c, e)?;
    Ok(2.0 * g.cross(&bloch(u)?))
}

/// Potential used by the circle/helix scenarios: value `v0` and outward
/// radial slope `-k r0` at cylinder radius `r0`.
pub fn cylinder_potential(k: f64, r0: f64, v0: f64) -> ScalarPotential {
    ScalarPotential::Harmonic2dXy { k: -k, offset: v0 + 0.5 * k * r0 * r0 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::fidelity;
    use crate::ray::AnalyticTrajectory;
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64;

    const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn plus_x_spinor() -> Spinor2 {
        Spinor2::new(
            Complex64::new(FRAC_1_SQRT_2, 0.0),
            Complex64::new(FRAC_1_SQRT_2, 0.0),
        )
    }

    struct CircleCase {
        traj: AnalyticTrajectory,
        pot: ScalarPotential,
        k: f64,
        r0: f64,
        v0: f64,
        m: f64,
        c: f64,
        e: f64,
    }

    fn reference_circle() -> CircleCase {
        let (k, r0, v0, m, c, e) = (0.05, 1.0, 0.1, 1.0, 1.0, 1.2);
        CircleCase {
            traj: AnalyticTrajectory::Circle { r0 },
            pot: cylinder_potential(k, r0, v0),
            k,
            r0,
            v0,
            m,
            c,
            e,
        }
    }

    #[test]
    fn circle_phase_after_one_revolution() {
        let cc = reference_circle();
        let s = 2.0 * std::f64::consts::PI * cc.r0;
        let rotor = circle_exact_rotor(s, cc.k, cc.r0, cc.v0, cc.m, cc.c, cc.e);
        // k r0 s / (2 (E + m c^2 - v0)) = 0.1 pi / 4.2
        assert_abs_diff_eq!(rotor.angle, 0.1 * std::f64::consts::PI / 4.2, epsilon = 1e-15);
        assert_abs_diff_eq!(rotor.angle, 0.07479982508547127, epsilon = 1e-12);
    }

    #[test]
    fn numeric_circle_transport_matches_closed_form() {
        let cc = reference_circle();
        let span = 2.0 * std::f64::consts::PI * cc.r0;
        let u0 = plus_x_spinor();
        let result =
            transport_spin(&cc.traj, &u0, &cc.pot, cc.m, cc.c, cc.e, span / 2000.0, span).unwrap();
        let exact = circle_exact(&u0, span, cc.k, cc.r0, cc.v0, cc.m, cc.c, cc.e);
        assert!(fidelity(&result.final_spinor(), &exact) > 1.0 - 1e-12);
        // The generator is constant along the circle, so even the phase matches.
        assert!((result.final_spinor() - exact).norm() < 1e-10);
    }

    #[test]
    fn circle_transport_preserves_sigma_z_and_unit_norm() {
        let cc = reference_circle();
        let span = 10.0 * 2.0 * std::f64::consts::PI * cc.r0;
        let u0 = plus_x_spinor();
        let result =
            transport_spin(&cc.traj, &u0, &cc.pot, cc.m, cc.c, cc.e, span / 10_000.0, span)
                .unwrap();
        let mut sz_drift: f64 = 0.0;
        let mut norm_drift: f64 = 0.0;
        for st in &result.states {
            sz_drift = sz_drift.max(st.bloch.z.abs());
            norm_drift = norm_drift.max((st.u.norm() - 1.0).abs());
        }
        assert!(sz_drift < 1e-10, "sigma_z drift {sz_drift:e}");
        assert!(norm_drift < 1e-12, "unitarity drift {norm_drift:e} after 1e4 steps");
    }

    fn helix_setup(k: f64) -> (AnalyticTrajectory, ScalarPotential, f64, f64, f64, f64, f64, f64) {
        let (r0, omega, v0, m, c) = (1.0, 1.0, 0.0, 1.0, 1.0);
        // Moderately relativistic: E = gamma m c^2 + v0 at the helix speed.
        let v: f64 = 0.2;
        let gamma = 1.0 / (1.0 - v * v).sqrt();
        let e = gamma * m * c * c + v0;
        (
            AnalyticTrajectory::Helix { r0, omega },
            cylinder_potential(k, r0, v0),
            r0,
            omega,
            v0,
            m,
            c,
            e,
        )
    }

    #[test]
    fn numeric_helix_transport_matches_closed_form() {
        let k = 0.05;
        let (traj, pot, r0, omega, v0, m, c, e) = helix_setup(k);
        let span = traj.period_arc();
        let u0 = plus_x_spinor();
        let result = transport_spin(&traj, &u0, &pot, m, c, e, span / 20_000.0, span).unwrap();
        let exact = helix_exact(&u0, span, k, r0, omega, v0, m, c, e);
        let fid = fidelity(&result.final_spinor(), &exact);
        assert!(fid > 1.0 - 1e-10, "fidelity deficit {:e}", 1.0 - fid);
    }

    #[test]
    fn helix_rotor_limits_are_the_circle_and_the_straight_line() {
        let (k, r0, v0, m, c, e) = (0.05, 1.0, 0.1, 1.0, 1.0, 1.2);
        let s = 4.0;
        let theta_c = circle_exact_rotor(s, k, r0, v0, m, c, e).angle;

        // Tight winding: the helix hugs the cylinder's circular cross-section.
        let tight = helix_exact_rotor(s, k, r0, 1e4, v0, m, c, e);
        let circ = circle_exact_rotor(s, k, r0, v0, m, c, e).matrix();
        assert!((tight - circ).norm() < 1e-3 * theta_c.max(1e-6));

        // Unwound: a straight vertical line with a sideways gradient, so the
        // rotor becomes exp(-i theta_c sigma_y).
        let flat = helix_exact_rotor(s, k, r0, 1e-9, v0, m, c, e);
        let line = SpinRotor { axis: Vector3::y(), angle: -theta_c }.matrix();
        assert!((flat - line).norm() < 1e-7);

        let uu = flat.adjoint() * flat;
        assert!((uu - Matrix2::identity()).norm() < 1e-14);
    }

    #[test]
    fn first_order_error_is_quadratic_in_mu() {
        let (r0, omega, v0, m, c) = (1.0, 1.0, 0.0, 1.0, 1.0);
        let e = 1.05;
        let root: f64 = 2.0_f64.sqrt();
        let den = 2.0 * (e + m * c * c - v0);
        let traj = AnalyticTrajectory::Helix { r0, omega };
        let s = 0.4 * traj.period_arc();
        let err = |mu: f64| {
            let k = mu * root * den;
            let exact = helix_exact_rotor(s, k, r0, omega, v0, m, c, e);
            let first = helix_first_order_rotor(s, k, r0, omega, v0, m, c, e);
            (exact - first).norm()
        };
        let (e4, e3, e2) = (err(1e-4), err(1e-3), err(1e-2));
        let r43 = e3 / e4;
        let r32 = e2 / e3;
        assert!((80.0..120.0).contains(&r43), "1e-4 -> 1e-3 error ratio {r43}");
        assert!((80.0..120.0).contains(&r32), "1e-3 -> 1e-2 error ratio {r32}");
    }

    #[test]
    fn midpoint_stepping_converges_at_second_order() {
        let k = 0.4; // strong coupling so the stepping error dominates rounding
        let (traj, pot, r0, omega, v0, m, c, e) = helix_setup(k);
        let span = 0.37 * traj.period_arc();
        let u0 = plus_x_spinor();
        let exact = helix_exact(&u0, span, k, r0, omega, v0, m, c, e);
        let err = |n: usize| {
            let result = transport_spin(&traj, &u0, &pot, m, c, e, span / n as f64, span).unwrap();
            (result.final_spinor() - exact).norm()
        };
        let (e1, e2, e3) = (err(100), err(200), err(400));
        let r12 = e1 / e2;
        let r23 = e2 / e3;
        assert!((3.2..5.0).contains(&r12), "halving ratio {r12} (errors {e1:e}, {e2:e})");
        assert!((3.2..5.0).contains(&r23), "halving ratio {r23} (errors {e2:e}, {e3:e})");
    }

    #[test]
    fn doubling_c_suppresses_the_pitch_rotation_fourfold() {
        let (k, r0, omega, v0, m) = (0.05, 1.0, 1.0, 0.0, 1.0);
        let traj = AnalyticTrajectory::Helix { r0, omega };
        let span = traj.period_arc();
        let pot = cylinder_potential(k, r0, v0);
        let u0 = plus_x_spinor();
        let v = 0.2; // lab speed, held fixed while c doubles
        let angle = |c: f64| {
            let gamma = 1.0 / (1.0 - (v / c) * (v / c)).sqrt();
            let e = gamma * m * c * c + v0;
            let result = transport_spin(&traj, &u0, &pot, m, c, e, span / 4000.0, span).unwrap();
            result.net_rotor().unwrap().bloch_angle
        };
        let ratio = angle(1.0) / angle(2.0);
        assert!((ratio - 4.0).abs() < 0.02 * 4.0, "suppression ratio {ratio}");
    }

    #[test]
    fn net_rotor_on_circle_reads_back_the_bloch_angle() {
        let cc = reference_circle();
        let span = 2.0 * std::f64::consts::PI * cc.r0;
        let u0 = plus_x_spinor();
        let result =
            transport_spin(&cc.traj, &u0, &cc.pot, cc.m, cc.c, cc.e, span / 4000.0, span).unwrap();
        let log = result.net_rotor().unwrap();
        let theta = circle_exact_rotor(span, cc.k, cc.r0, cc.v0, cc.m, cc.c, cc.e).angle;
        assert!((log.axis - Vector3::z()).norm() < 1e-10);
        assert_abs_diff_eq!(log.bloch_angle, 2.0 * theta, epsilon = 1e-10);
    }

    #[test]
    fn step_density_guard_fires_on_coarse_steps() {
        let cc = reference_circle();
        // One step across ten revolutions with a deliberately huge k.
        let pot = cylinder_potential(50.0, cc.r0, cc.v0);
        let span = 2.0 * std::f64::consts::PI;
        let result = transport_spin(&cc.traj, &plus_x_spinor(), &pot, cc.m, cc.c, cc.e, span, span);
        assert!(matches!(result, Err(Error::StepDensity { .. })));
    }

    #[test]
    fn generator_needs_momentum() {
        let pot = ScalarPotential::Harmonic3d { k: 1.0, offset: 0.0 };
        let result = precession_generator(
            &Vector3::new(1.0, 0.0, 0.0),
            &Vector3::zeros(),
            &pot,
            1.0,
            1.0,
            1.5,
        );
        assert!(matches!(result, Err(Error::TurningPoint(_))));
    }

    #[test]
    fn plane_wave_amplitude_is_constant() {
        let pot = ScalarPotential::Free;
        let p = Vector3::<f64>::new(0.0, 0.0, 0.8);
        let e = (p.norm_squared() + 1.0).sqrt();
        let lap = |_: &Vector3<f64>| 0.0;
        let rate = amplitude_rate(
            &Vector3::new(0.2, 0.3, 1.0),
            &p,
            &pot,
            1.0,
            1.0,
            e,
            &WavefrontField::AnalyticLaplacian(&lap),
        )
        .unwrap();
        assert_abs_diff_eq!(rate, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn spherical_wave_amplitude_falls_like_one_over_r() {
        let pot = ScalarPotential::Free;
        let pn = 0.75;
        let x = Vector3::new(1.0, 2.0, 2.0); // r = 3
        let p = pn * x / x.norm();
        let e = (pn * pn + 1.0f64).sqrt();
        let lap = move |y: &Vector3<f64>| 2.0 * pn / y.norm();
        let rate = amplitude_rate(&x, &p, &pot, 1.0, 1.0, e, &WavefrontField::AnalyticLaplacian(&lap))
            .unwrap();
        assert_abs_diff_eq!(rate, -1.0 / 3.0, epsilon = 1e-14);

        // Same answer from sampled values of W = pn * r.
        let w = move |y: &Vector3<f64>| pn * y.norm();
        let sampled =
            amplitude_rate(&x, &p, &pot, 1.0, 1.0, e, &WavefrontField::Sampled { w: &w, scale: 1.0 })
                .unwrap();
        assert_abs_diff_eq!(sampled, -1.0 / 3.0, epsilon = 1e-7);
    }

    #[test]
    fn bloch_rate_matches_transported_finite_difference() {
        let cc = reference_circle();
        let span = 2.0 * std::f64::consts::PI * cc.r0;
        let u0 = plus_x_spinor();
        let result =
            transport_spin(&cc.traj, &u0, &cc.pot, cc.m, cc.c, cc.e, span / 20_000.0, span)
                .unwrap();
        let states = &result.states;
        let i = states.len() / 2;
        let h = states[i + 1].s - states[i].s;
        let fd = (states[i + 1].bloch - states[i - 1].bloch) / (2.0 * h);
        let x = cc.traj.position(states[i].s);
        let t = cc.traj.tangent(states[i].s);
        let pn = crate::ray::momentum_magnitude(&x, cc.e, &cc.pot, cc.m, cc.c).unwrap();
        let analytic =
            bloch_rate(&x, &(pn * t), &cc.pot, cc.m, cc.c, cc.e, &states[i].u).unwrap();
        assert!((fd - analytic).norm() < 1e-6, "fd {fd:?} vs analytic {analytic:?}");
    }
}
