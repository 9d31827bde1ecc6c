//! Relativistic ray tracing for scalar potentials.
//!
//! Characteristics of the eikonal relation |grad W|^2 = [(E - V)^2 - m^2 c^4]/c^2
//! are integrated directly in arc length s:
//!
//! ```text
//!   dx/ds = p/|p|,    dp/ds = -grad V (E - V)/(c^2 |p|),
//!   dW/ds = |p|,      dt/ds = (E - V)/(c^2 |p|),
//! ```
//!
//! which is the usual dx/dt = c^2 p/(E - V), dp/dt = -grad V reparameterized
//! so output lands on a uniform s grid straight out of the dense integrator.
//! Energy and angular momentum are conserved by the flow, never re-imposed;
//! their drift is how the integration is judged.
//!
//! `AnalyticTrajectory` provides the prescribed curves (circle, helix,
//! oscillator ellipse) that spin transport runs along when the path is given
//! rather than integrated.

use nalgebra::{SVector, Vector3};
use serde::{Deserialize, Serialize};

use crate::dopri5::{integrate_dense, OdeSystem, Tolerances};
use crate::error::{Error, Result};
use crate::potential::ScalarPotential;

/// Instantaneous ray data: arc length, coordinate time, position, momentum
/// (= grad W along the ray) and accumulated eikonal W.
#[derive(Debug, Clone, Copy)]
pub struct RayState {
    pub s: f64,
    pub t: f64,
    pub x: Vector3<f64>,
    pub p: Vector3<f64>,
    pub w: f64,
}

/// E = sqrt(c^2 |p|^2 + m^2 c^4) + V(x). Requires m > 0.
pub fn relativistic_energy(
    p: &Vector3<f64>,
    x: &Vector3<f64>,
    pot: &ScalarPotential,
    m: f64,
    c: f64,
) -> Result<f64> {
    if m <= 0.0 {
        return Err(Error::MasslessParticle(m));
    }
    Ok((c * c * p.norm_squared() + m * m * c.powi(4)).sqrt() + pot.value(x))
}

/// |grad W| consistent with energy E at position x; errors in the
/// classically forbidden region (E - V < m c^2).
pub fn momentum_magnitude(
    x: &Vector3<f64>,
    e: f64,
    pot: &ScalarPotential,
    m: f64,
    c: f64,
) -> Result<f64> {
    let kinetic = e - pot.value(x);
    let floor = m * c * c;
    if kinetic < floor {
        return Err(Error::ForbiddenEnergy { e, floor: floor + pot.value(x) });
    }
    Ok((kinetic * kinetic - floor * floor).sqrt() / c)
}

/// Dimensionless defect of the eikonal relation,
/// (|p|^2 - [(E-V)^2 - m^2 c^4]/c^2) / max(|p|^2, m^2 c^2).
pub fn eikonal_residual(
    x: &Vector3<f64>,
    p: &Vector3<f64>,
    e: f64,
    pot: &ScalarPotential,
    m: f64,
    c: f64,
) -> f64 {
    let kinetic = e - pot.value(x);
    let rhs = (kinetic * kinetic - m * m * c.powi(4)) / (c * c);
    let p2 = p.norm_squared();
    (p2 - rhs) / p2.max(m * m * c * c)
}

struct RaySystem<'a> {
    pot: &'a ScalarPotential,
    e: f64,
    c: f64,
}

// State layout: [x, y, z, px, py, pz, W, t].
impl OdeSystem<8> for RaySystem<'_> {
    fn rhs(&self, s: f64, y: &SVector<f64, 8>) -> Result<SVector<f64, 8>> {
        let x = Vector3::new(y[0], y[1], y[2]);
        let p = Vector3::new(y[3], y[4], y[5]);
        let pn = p.norm();
        if pn < 1e-12 {
            return Err(Error::TurningPoint(s));
        }
        let grad = self.pot.gradient(&x);
        let kin = self.e - self.pot.value(&x);
        let dt_ds = kin / (self.c * self.c * pn);
        let dp = -grad * dt_ds;
        let tangent = p / pn;
        Ok(SVector::<f64, 8>::from_column_slice(&[
            tangent.x, tangent.y, tangent.z, dp.x, dp.y, dp.z, pn, dt_ds,
        ]))
    }
}

/// A traced ray on a uniform arc-length grid, with enough context to
/// interpolate between samples.
pub struct RayPath {
    pub states: Vec<RayState>,
    pub e: f64,
    pub m: f64,
    pub c: f64,
    pub pot: ScalarPotential,
}

/// Integrate a ray of energy `e` from `start` over `length` units of arc
/// length, sampling every `ds_out`.
///
/// The initial state must already satisfy the eikonal relation to 1e-9;
/// anything looser means the caller's (p, E) pair describes a different ray
/// than they think.
pub fn integrate_ray(
    start: &RayState,
    pot: &ScalarPotential,
    m: f64,
    c: f64,
    e: f64,
    ds_out: f64,
    length: f64,
    tol: Tolerances,
) -> Result<RayPath> {
    if m <= 0.0 {
        return Err(Error::MasslessParticle(m));
    }
    if start.p.norm() < 1e-12 {
        return Err(Error::TurningPoint(start.s));
    }
    let residual = eikonal_residual(&start.x, &start.p, e, pot, m, c);
    if residual.abs() > 1e-9 {
        return Err(Error::InconsistentInitialState(residual));
    }
    let y0 = SVector::<f64, 8>::from_column_slice(&[
        start.x.x, start.x.y, start.x.z, start.p.x, start.p.y, start.p.z, start.w, start.t,
    ]);
    let system = RaySystem { pot, e, c };
    let samples = integrate_dense(&system, y0, start.s, start.s + length, ds_out, tol)?;
    let states = samples
        .iter()
        .map(|sm| RayState {
            s: sm.s,
            t: sm.y[7],
            x: Vector3::new(sm.y[0], sm.y[1], sm.y[2]),
            p: Vector3::new(sm.y[3], sm.y[4], sm.y[5]),
            w: sm.y[6],
        })
        .collect();
    Ok(RayPath { states, e, m, c, pot: pot.clone() })
}

/// Momentum magnitude that balances a circular orbit of radius `r0` in an
/// attractive central potential: c^2 p^2 / (E - V) = r0 V'(r0).
pub fn circular_orbit_momentum(
    pot: &ScalarPotential,
    r0: f64,
    m: f64,
    c: f64,
) -> Result<f64> {
    let x0 = Vector3::new(r0, 0.0, 0.0);
    let slope = pot.gradient(&x0).dot(&x0) / r0; // V'(r0)
    if slope <= 0.0 {
        return Err(Error::Config(format!(
            "no circular orbit: potential is not attractive at r0 = {r0} (V' = {slope})"
        )));
    }
    let f = slope * r0;
    let q = 0.5 * (f * f + (f.powi(4) + 4.0 * f * f * m * m * c.powi(4)).sqrt());
    Ok(q.sqrt() / c)
}

/// Anything that can hand out points and unit tangents by arc length.
pub trait ArcCurve {
    fn position(&self, s: f64) -> Vector3<f64>;
    fn tangent(&self, s: f64) -> Vector3<f64>;
}

impl RayPath {
    fn bracket(&self, s: f64) -> (usize, f64) {
        let n = self.states.len();
        assert!(n >= 2, "path needs at least two samples");
        let s0 = self.states[0].s;
        let h = self.states[1].s - s0;
        let mut i = (((s - s0) / h).floor() as isize).clamp(0, n as isize - 2) as usize;
        // The trailing interval can be shorter than h when the endpoint was
        // appended off-grid.
        if s > self.states[i + 1].s && i + 2 < n {
            i += 1;
        }
        (i, self.states[i + 1].s - self.states[i].s)
    }

    fn derivatives(&self, st: &RayState) -> (Vector3<f64>, Vector3<f64>) {
        let pn = st.p.norm();
        let kin = self.e - self.pot.value(&st.x);
        let dx = st.p / pn;
        let dp = -self.pot.gradient(&st.x) * (kin / (self.c * self.c * pn));
        (dx, dp)
    }
}

fn hermite(
    y0: &Vector3<f64>,
    d0: &Vector3<f64>,
    y1: &Vector3<f64>,
    d1: &Vector3<f64>,
    h: f64,
    theta: f64,
) -> Vector3<f64> {
    let t2 = theta * theta;
    let t3 = t2 * theta;
    y0 * (2.0 * t3 - 3.0 * t2 + 1.0)
        + d0 * ((t3 - 2.0 * t2 + theta) * h)
        + y1 * (-2.0 * t3 + 3.0 * t2)
        + d1 * ((t3 - t2) * h)
}

impl ArcCurve for RayPath {
    /// Cubic Hermite between samples, with the ODE supplying exact endpoint
    /// derivatives (O(ds^4) between grid points).
    fn position(&self, s: f64) -> Vector3<f64> {
        let (i, h) = self.bracket(s);
        let (a, b) = (&self.states[i], &self.states[i + 1]);
        let (da, _) = self.derivatives(a);
        let (db, _) = self.derivatives(b);
        hermite(&a.x, &da, &b.x, &db, h, (s - a.s) / h)
    }

    fn tangent(&self, s: f64) -> Vector3<f64> {
        let (i, h) = self.bracket(s);
        let (a, b) = (&self.states[i], &self.states[i + 1]);
        let (_, da) = self.derivatives(a);
        let (_, db) = self.derivatives(b);
        let p = hermite(&a.p, &da, &b.p, &db, h, (s - a.s) / h);
        p / p.norm()
    }
}

/// Prescribed curves, parameterized by arc length where that is closed-form
/// (circle, helix) and by the trigonometric phase for the ellipse.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AnalyticTrajectory {
    /// Counterclockwise circle of radius `r0` in the z = 0 plane,
    /// starting at (r0, 0, 0).
    Circle { r0: f64 },
    /// Right-handed helix x = (r0 cos Omega z, r0 sin Omega z, z) traversed
    /// with increasing z, starting at (r0, 0, 0).
    Helix { r0: f64, omega: f64 },
    /// Ellipse (a cos tau, b sin tau, 0), counterclockwise, a >= b > 0.
    Ellipse { a: f64, b: f64 },
}

impl AnalyticTrajectory {
    /// Arc length of one full revolution / pitch / circuit.
    pub fn period_arc(&self) -> f64 {
        match self {
            AnalyticTrajectory::Circle { r0 } => 2.0 * std::f64::consts::PI * r0,
            AnalyticTrajectory::Helix { r0, omega } => {
                2.0 * std::f64::consts::PI * (1.0 + omega * omega * r0 * r0).sqrt() / omega
            }
            AnalyticTrajectory::Ellipse { .. } => self.arc_from_param(2.0 * std::f64::consts::PI),
        }
    }

    /// Curve parameter reached after arc length `s` (identity for circle and
    /// helix, numeric inversion for the ellipse).
    pub fn param_at_arc(&self, s: f64) -> f64 {
        match self {
            AnalyticTrajectory::Circle { .. } | AnalyticTrajectory::Helix { .. } => s,
            AnalyticTrajectory::Ellipse { a, b } => {
                // Newton iteration on s(tau); the rate is bounded below by
                // min(a, b) so convergence is immediate from a linear guess.
                let mean_rate = self.period_arc() / (2.0 * std::f64::consts::PI);
                let mut tau = s / mean_rate;
                for _ in 0..60 {
                    let f = self.arc_from_param(tau) - s;
                    let rate = (a * a * tau.sin().powi(2) + b * b * tau.cos().powi(2)).sqrt();
                    let step = f / rate;
                    tau -= step;
                    if step.abs() < 1e-14 * (1.0 + tau.abs()) {
                        break;
                    }
                }
                tau
            }
        }
    }

    /// Arc length from parameter 0 to `tau` (ellipse quadrature; exact
    /// closed forms otherwise).
    pub fn arc_from_param(&self, tau: f64) -> f64 {
        match self {
            AnalyticTrajectory::Circle { .. } | AnalyticTrajectory::Helix { .. } => tau,
            AnalyticTrajectory::Ellipse { a, b } => {
                let rate = |u: f64| (a * a * u.sin().powi(2) + b * b * u.cos().powi(2)).sqrt();
                adaptive_simpson(&rate, 0.0, tau, 1e-13)
            }
        }
    }

    pub fn point(&self, u: f64) -> Vector3<f64> {
        match self {
            AnalyticTrajectory::Circle { r0 } => {
                let q = u / r0;
                Vector3::new(r0 * q.cos(), r0 * q.sin(), 0.0)
            }
            AnalyticTrajectory::Helix { r0, omega } => {
                let root = (1.0 + omega * omega * r0 * r0).sqrt();
                let z = u / root;
                let q = omega * z;
                Vector3::new(r0 * q.cos(), r0 * q.sin(), z)
            }
            AnalyticTrajectory::Ellipse { a, b } => Vector3::new(a * u.cos(), b * u.sin(), 0.0),
        }
    }

    pub fn d1(&self, u: f64) -> Vector3<f64> {
        match self {
            AnalyticTrajectory::Circle { r0 } => {
                let q = u / r0;
                Vector3::new(-q.sin(), q.cos(), 0.0)
            }
            AnalyticTrajectory::Helix { r0, omega } => {
                let root = (1.0 + omega * omega * r0 * r0).sqrt();
                let q = omega * u / root;
                Vector3::new(-r0 * omega * q.sin(), r0 * omega * q.cos(), 1.0) / root
            }
            AnalyticTrajectory::Ellipse { a, b } => Vector3::new(-a * u.sin(), b * u.cos(), 0.0),
        }
    }

    pub fn d2(&self, u: f64) -> Vector3<f64> {
        match self {
            AnalyticTrajectory::Circle { r0 } => {
                let q = u / r0;
                Vector3::new(-q.cos() / r0, -q.sin() / r0, 0.0)
            }
            AnalyticTrajectory::Helix { r0, omega } => {
                let root2 = 1.0 + omega * omega * r0 * r0;
                let q = omega * u / root2.sqrt();
                let w2 = omega * omega / root2;
                Vector3::new(-r0 * w2 * q.cos(), -r0 * w2 * q.sin(), 0.0)
            }
            AnalyticTrajectory::Ellipse { a, b } => Vector3::new(-a * u.cos(), -b * u.sin(), 0.0),
        }
    }

    pub fn d3(&self, u: f64) -> Vector3<f64> {
        match self {
            AnalyticTrajectory::Circle { r0 } => {
                let q = u / r0;
                Vector3::new(q.sin() / (r0 * r0), -q.cos() / (r0 * r0), 0.0)
            }
            AnalyticTrajectory::Helix { r0, omega } => {
                let root2 = 1.0 + omega * omega * r0 * r0;
                let q = omega * u / root2.sqrt();
                let w3 = omega * omega * omega / (root2 * root2.sqrt());
                Vector3::new(r0 * w3 * q.sin(), -r0 * w3 * q.cos(), 0.0)
            }
            AnalyticTrajectory::Ellipse { a, b } => Vector3::new(a * u.sin(), -b * u.cos(), 0.0),
        }
    }
}

impl ArcCurve for AnalyticTrajectory {
    fn position(&self, s: f64) -> Vector3<f64> {
        self.point(self.param_at_arc(s))
    }

    fn tangent(&self, s: f64) -> Vector3<f64> {
        let d = self.d1(self.param_at_arc(s));
        d / d.norm()
    }
}

fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(a: f64, fa: f64, b: f64, fb: f64, fm: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        fm: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = simpson(a, fa, m, fm, flm);
        let right = simpson(m, fm, b, fb, frm);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            recurse(f, a, fa, m, fm, flm, left, 0.5 * tol, depth - 1)
                + recurse(f, m, fm, b, fb, frm, right, 0.5 * tol, depth - 1)
        }
    }
    if a == b {
        return 0.0;
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = simpson(a, fa, b, fb, fm);
    recurse(f, a, fa, b, fb, fm, whole, tol, 40)
}
