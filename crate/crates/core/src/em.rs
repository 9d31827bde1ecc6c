//! Eikonal polarization transport: the electromagnetic side of the analogy.
//!
//! In an isotropic, weakly inhomogeneous medium the eikonal L obeys
//! |grad L|^2 = n^2 with n = c sqrt(eps mu), rays bend by d(grad L)/ds = grad n,
//! and the leading-order polarization obeys
//!
//! ```text
//!   du/ds = -[ (u . grad eps)/(2 eps) + (u . grad mu)/(2 mu) ] grad L / |grad L|,
//! ```
//!
//! which for a physically supported ray is exactly parallel transport of `u`
//! in the plane normal to the ray: what a spin is to a matter ray, a
//! polarization vector is to a light ray. Transversality u . grad L = 0 is
//! preserved, not enforced.
//!
//! The barber-pole comparison lives here too: the polarization of light
//! guided along a helix turns by the torsion integral 2 pi / sqrt(1 + W^2 r0^2)
//! per pitch, the matter counterpart by pi k r0^2 / (m c^2).

use nalgebra::{SVector, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dopri5::{integrate_dense, OdeSystem, Tolerances};
use crate::error::{Error, Result};
use crate::spin_transport::{pitch_rotation_matter_harmonic, WavefrontField};

/// Smooth scalar material parameter with an analytic gradient.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScalarField {
    Constant { value: f64 },
    /// base + grad . x
    Linear { base: f64, grad: [f64; 3] },
    /// (base + grad . x)^2 — lets a linear refractive index enter eps = n^2.
    SquaredLinear { base: f64, grad: [f64; 3] },
    /// base * exp(rate * (rho - rho_ref)) on cylinders rho = sqrt(x^2 + y^2).
    ExpRadialCyl { base: f64, rate: f64, rho_ref: f64 },
}

impl ScalarField {
    pub fn value(&self, x: &Vector3<f64>) -> f64 {
        match self {
            ScalarField::Constant { value } => *value,
            ScalarField::Linear { base, grad } => base + Vector3::from(*grad).dot(x),
            ScalarField::SquaredLinear { base, grad } => {
                let lin = base + Vector3::from(*grad).dot(x);
                lin * lin
            }
            ScalarField::ExpRadialCyl { base, rate, rho_ref } => {
                let rho = x.xy().norm();
                base * (rate * (rho - rho_ref)).exp()
            }
        }
    }

    pub fn gradient(&self, x: &Vector3<f64>) -> Vector3<f64> {
        match self {
            ScalarField::Constant { .. } => Vector3::zeros(),
            ScalarField::Linear { grad, .. } => Vector3::from(*grad),
            ScalarField::SquaredLinear { base, grad } => {
                let g = Vector3::from(*grad);
                2.0 * (base + g.dot(x)) * g
            }
            ScalarField::ExpRadialCyl { rate, .. } => {
                let rho = x.xy().norm();
                assert!(rho > 1e-12, "cylindrical field gradient undefined on the axis");
                self.value(x) * *rate * Vector3::new(x.x / rho, x.y / rho, 0.0)
            }
        }
    }
}

/// Isotropic medium described by permittivity and permeability fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Medium {
    pub epsilon: ScalarField,
    pub mu: ScalarField,
    pub c: f64,
}

impl Medium {
    pub fn n(&self, x: &Vector3<f64>) -> f64 {
        self.c * (self.epsilon.value(x) * self.mu.value(x)).sqrt()
    }

    /// grad n = n (grad eps / 2 eps + grad mu / 2 mu).
    pub fn grad_n(&self, x: &Vector3<f64>) -> Vector3<f64> {
        let eps = self.epsilon.value(x);
        let mu = self.mu.value(x);
        self.n(x) * (self.epsilon.gradient(x) / (2.0 * eps) + self.mu.gradient(x) / (2.0 * mu))
    }

    /// Homogeneous medium of index `n0`.
    pub fn homogeneous(n0: f64, c: f64) -> Medium {
        Medium {
            epsilon: ScalarField::Constant { value: n0 * n0 / (c * c) },
            mu: ScalarField::Constant { value: 1.0 },
            c,
        }
    }
}

/// Dimensionless defect of |grad L|^2 = n^2, normalized like its matter
/// counterpart: (|grad L|^2 - n^2) / max(|grad L|^2, n^2).
pub fn em_eikonal_residual(x: &Vector3<f64>, grad_l: &Vector3<f64>, medium: &Medium) -> f64 {
    let n2 = medium.n(x).powi(2);
    let g2 = grad_l.norm_squared();
    (g2 - n2) / g2.max(n2)
}

fn cross_rc(a: &Vector3<f64>, b: &Vector3<Complex64>) -> Vector3<Complex64> {
    Vector3::new(
        a.y * b.z - a.z * b.y,
        a.z * b.x - a.x * b.z,
        a.x * b.y - a.y * b.x,
    )
}

fn dot_rc(a: &Vector3<f64>, b: &Vector3<Complex64>) -> Complex64 {
    a.x * b.x + a.y * b.y + a.z * b.z
}

/// Polarization transport rate du/ds (see module docs). Complex-valued so
/// circular and elliptical states ride along unchanged in form.
pub fn em_polarization_rate(
    x: &Vector3<f64>,
    grad_l: &Vector3<f64>,
    u: &Vector3<Complex64>,
    medium: &Medium,
) -> Vector3<Complex64> {
    let eps = medium.epsilon.value(x);
    let mu = medium.mu.value(x);
    let coeff = dot_rc(&medium.epsilon.gradient(x), u) / (2.0 * eps)
        + dot_rc(&medium.mu.gradient(x), u) / (2.0 * mu);
    let t = grad_l / grad_l.norm();
    -Vector3::new(coeff * t.x, coeff * t.y, coeff * t.z)
}

/// The permeability term of the transport law in its raw cross-product form,
/// `[grad mu x (grad L x u)] / (2 mu |grad L|)`; expanding it with
/// a x (b x c) = b (a.c) - c (a.b) and dropping the longitudinal piece
/// (u . grad L = 0) plus the amplitude piece (the component along u) leaves
/// the mu half of [`em_polarization_rate`]. Exposed for the identity check.
pub fn mu_term_cross_form(
    x: &Vector3<f64>,
    grad_l: &Vector3<f64>,
    u: &Vector3<Complex64>,
    medium: &Medium,
) -> Vector3<Complex64> {
    let mu = medium.mu.value(x);
    let gm = medium.mu.gradient(x);
    let inner = cross_rc(grad_l, u); // grad L x u
    let outer = Vector3::new(
        Complex64::new(gm.y, 0.0) * inner.z - Complex64::new(gm.z, 0.0) * inner.y,
        Complex64::new(gm.z, 0.0) * inner.x - Complex64::new(gm.x, 0.0) * inner.z,
        Complex64::new(gm.x, 0.0) * inner.y - Complex64::new(gm.y, 0.0) * inner.x,
    );
    outer / Complex64::new(2.0 * mu * grad_l.norm(), 0.0)
}

/// Logarithmic amplitude rate along the ray:
/// `-[ lap L / (2 |grad L|) - (grad L . grad mu) / (2 mu |grad L|) ]`.
pub fn em_amplitude_rate(
    x: &Vector3<f64>,
    grad_l: &Vector3<f64>,
    medium: &Medium,
    wavefront: &WavefrontField,
) -> Result<f64> {
    let gn = grad_l.norm();
    if gn < 1e-12 {
        return Err(Error::TurningPoint(f64::NAN));
    }
    let lap = match wavefront {
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
    };
    let mu = medium.mu.value(x);
    Ok(-lap / (2.0 * gn) + grad_l.dot(&medium.mu.gradient(x)) / (2.0 * mu * gn))
}

/// Ray + polarization sample.
#[derive(Debug, Clone, Copy)]
pub struct EmState {
    pub s: f64,
    pub x: Vector3<f64>,
    /// grad L along the ray; |g| = n(x) on shell.
    pub g: Vector3<f64>,
    pub u: Vector3<Complex64>,
}

struct EmRaySystem<'a> {
    medium: &'a Medium,
}

// Layout: [x, y, z, gx, gy, gz, Re u (3), Im u (3)].
impl OdeSystem<12> for EmRaySystem<'_> {
    fn rhs(&self, s: f64, y: &SVector<f64, 12>) -> Result<SVector<f64, 12>> {
        let x = Vector3::new(y[0], y[1], y[2]);
        let g = Vector3::new(y[3], y[4], y[5]);
        let gn = g.norm();
        if gn < 1e-12 {
            return Err(Error::TurningPoint(s));
        }
        let t = g / gn;
        let dg = self.medium.grad_n(&x);
        let eps = self.medium.epsilon.value(&x);
        let mu = self.medium.mu.value(&x);
        let ge = self.medium.epsilon.gradient(&x);
        let gm = self.medium.mu.gradient(&x);
        let u_re = Vector3::new(y[6], y[7], y[8]);
        let u_im = Vector3::new(y[9], y[10], y[11]);
        let coeff_re = ge.dot(&u_re) / (2.0 * eps) + gm.dot(&u_re) / (2.0 * mu);
        let coeff_im = ge.dot(&u_im) / (2.0 * eps) + gm.dot(&u_im) / (2.0 * mu);
        let du_re = -coeff_re * t;
        let du_im = -coeff_im * t;
        Ok(SVector::<f64, 12>::from_column_slice(&[
            t.x, t.y, t.z, dg.x, dg.y, dg.z, du_re.x, du_re.y, du_re.z, du_im.x, du_im.y,
            du_im.z,
        ]))
    }
}

/// Trace a ray from `x0` along unit direction `dir` (grad L starts at
/// n(x0) dir) while transporting the polarization `u0`, sampling every
/// `ds_out` up to `length`.
pub fn trace_em_ray(
    x0: &Vector3<f64>,
    dir: &Vector3<f64>,
    u0: &Vector3<Complex64>,
    medium: &Medium,
    ds_out: f64,
    length: f64,
    tol: Tolerances,
) -> Result<Vec<EmState>> {
    let dn = dir.norm();
    if dn < 1e-12 {
        return Err(Error::Config("ray direction must be nonzero".into()));
    }
    let g0 = medium.n(x0) * dir / dn;
    let y0 = SVector::<f64, 12>::from_column_slice(&[
        x0.x, x0.y, x0.z, g0.x, g0.y, g0.z, u0.x.re, u0.y.re, u0.z.re, u0.x.im, u0.y.im, u0.z.im,
    ]);
    let system = EmRaySystem { medium };
    let samples = integrate_dense(&system, y0, 0.0, length, ds_out, tol)?;
    Ok(samples
        .iter()
        .map(|sm| EmState {
            s: sm.s,
            x: Vector3::new(sm.y[0], sm.y[1], sm.y[2]),
            g: Vector3::new(sm.y[3], sm.y[4], sm.y[5]),
            u: Vector3::new(
                Complex64::new(sm.y[6], sm.y[9]),
                Complex64::new(sm.y[7], sm.y[10]),
                Complex64::new(sm.y[8], sm.y[11]),
            ),
        })
        .collect())
}

/// Curves that expose three parametric derivatives, enough for a Frenet frame.
pub trait Curve3 {
    fn point(&self, u: f64) -> Vector3<f64>;
    fn d1(&self, u: f64) -> Vector3<f64>;
    fn d2(&self, u: f64) -> Vector3<f64>;
    fn d3(&self, u: f64) -> Vector3<f64>;
}

impl Curve3 for crate::ray::AnalyticTrajectory {
    fn point(&self, u: f64) -> Vector3<f64> {
        crate::ray::AnalyticTrajectory::point(self, u)
    }
    fn d1(&self, u: f64) -> Vector3<f64> {
        crate::ray::AnalyticTrajectory::d1(self, u)
    }
    fn d2(&self, u: f64) -> Vector3<f64> {
        crate::ray::AnalyticTrajectory::d2(self, u)
    }
    fn d3(&self, u: f64) -> Vector3<f64> {
        crate::ray::AnalyticTrajectory::d3(self, u)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct FrenetFrame {
    pub t: Vector3<f64>,
    pub n: Vector3<f64>,
    pub b: Vector3<f64>,
    pub curvature: f64,
    pub torsion: f64,
}

/// Frenet frame at curve parameter `u`, by the parameterization-invariant
/// formulas kappa = |d1 x d2| / |d1|^3, tau = (d1 x d2) . d3 / |d1 x d2|^2.
/// Straight (or locally straight) curves have no frame and are rejected.
pub fn frenet<C: Curve3 + ?Sized>(curve: &C, u: f64) -> Result<FrenetFrame> {
    let d1 = curve.d1(u);
    let d2 = curve.d2(u);
    let d3 = curve.d3(u);
    let d1n = d1.norm();
    let cross = d1.cross(&d2);
    let cn = cross.norm();
    let curvature = cn / d1n.powi(3);
    if curvature < 1e-12 {
        return Err(Error::DegenerateCurve(curvature));
    }
    let t = d1 / d1n;
    let b = cross / cn;
    let n = b.cross(&t);
    let torsion = cross.dot(&d3) / (cn * cn);
    Ok(FrenetFrame { t, n, b, curvature, torsion })
}

/// Frenet-like frame at a point of an integrated EM ray, built from the
/// medium instead of numerical differentiation: T = g/|g| and
/// kappa N = dT/ds = (grad n - (T . grad n) T)/n.
pub fn ray_frame(x: &Vector3<f64>, g: &Vector3<f64>, medium: &Medium) -> Result<FrenetFrame> {
    let gn = g.norm();
    let t = g / gn;
    let grad = medium.grad_n(x);
    let n_val = medium.n(x);
    let dt = (grad - grad.dot(&t) * t) / n_val;
    let curvature = dt.norm();
    if curvature < 1e-12 {
        return Err(Error::DegenerateCurve(curvature));
    }
    let n = dt / curvature;
    let b = t.cross(&n);
    Ok(FrenetFrame { t, n, b, curvature, torsion: f64::NAN })
}

/// Net Frenet-frame rotation of a parallel-transported polarization over one
/// helix pitch: 2 pi / sqrt(1 + Omega^2 r0^2) (the Rytov angle; the sense is
/// -torsion, i.e. clockwise in the (N, B) plane for a right-handed helix).
pub fn rytov_rotation_per_pitch(omega: f64, r0: f64) -> f64 {
    2.0 * std::f64::consts::PI / (1.0 + omega * omega * r0 * r0).sqrt()
}

/// Medium in which the reference helix (radius r0, winding Omega) is an exact
/// ray: n(rho) = n0 exp(-kappa (rho - r0)) with kappa the helix curvature, so
/// the index gradient supplies exactly the centripetal bending.
pub fn guiding_medium(n0: f64, r0: f64, omega: f64, c: f64) -> Medium {
    let kappa = r0 * omega * omega / (1.0 + omega * omega * r0 * r0);
    Medium {
        epsilon: ScalarField::ExpRadialCyl {
            base: n0 * n0 / (c * c),
            rate: -2.0 * kappa,
            rho_ref: r0,
        },
        mu: ScalarField::Constant { value: 1.0 },
        c,
    }
}

/// Unwrapped polarization angle history in the local (N, B) frame along an
/// integrated ray with real (linear) polarization.
pub fn frame_angle_history(states: &[EmState], medium: &Medium) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::with_capacity(states.len());
    let mut prev: Option<f64> = None;
    let mut offset = 0.0;
    for st in states {
        let frame = ray_frame(&st.x, &st.g, medium)?;
        let u_re = Vector3::new(st.u.x.re, st.u.y.re, st.u.z.re);
        let raw = u_re.dot(&frame.b).atan2(u_re.dot(&frame.n));
        if let Some(p) = prev {
            let mut d = raw + offset - p;
            while d > std::f64::consts::PI {
                offset -= 2.0 * std::f64::consts::PI;
                d -= 2.0 * std::f64::consts::PI;
            }
            while d < -std::f64::consts::PI {
                offset += 2.0 * std::f64::consts::PI;
                d += 2.0 * std::f64::consts::PI;
            }
        }
        let unwrapped = raw + offset;
        prev = Some(unwrapped);
        out.push((st.s, unwrapped));
    }
    Ok(out)
}

/// Dynamic counterpart of [`rytov_rotation_per_pitch`]: parallel transport in
/// the normal bundle of a prescribed curve, dv/ds = -kappa (v . N) T, which is
/// what the polarization transport law reduces to on a supported ray whose
/// index is constant along the path. Starts from v = N(0), integrates with a
/// classical fourth-order scheme, and returns the unwrapped angle swept in
/// the local (N, B) frame over `span` (expected: minus the torsion integral).
pub fn rytov_angle_dynamic(
    traj: &crate::ray::AnalyticTrajectory,
    span: f64,
    n_steps: usize,
) -> Result<f64> {
    assert!(n_steps >= 2 && span > 0.0);
    let frame_at = |s: f64| frenet(traj, traj.param_at_arc(s));
    let rate = |s: f64, v: &Vector3<f64>| -> Result<Vector3<f64>> {
        let fr = frame_at(s)?;
        Ok(-fr.curvature * v.dot(&fr.n) * fr.t)
    };
    let h = span / n_steps as f64;
    let mut v = frame_at(0.0)?.n;
    let mut psi = 0.0; // atan2(v.B, v.N) at s = 0
    for i in 0..n_steps {
        let s = i as f64 * h;
        let k1 = rate(s, &v)?;
        let k2 = rate(s + 0.5 * h, &(v + 0.5 * h * k1))?;
        let k3 = rate(s + 0.5 * h, &(v + 0.5 * h * k2))?;
        let k4 = rate(s + h, &(v + h * k3))?;
        v += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        let fr = frame_at((i + 1) as f64 * h)?;
        let raw = v.dot(&fr.b).atan2(v.dot(&fr.n));
        let mut d = raw - psi;
        while d > std::f64::consts::PI {
            d -= 2.0 * std::f64::consts::PI;
        }
        while d < -std::f64::consts::PI {
            d += 2.0 * std::f64::consts::PI;
        }
        psi += d;
    }
    Ok(psi)
}

/// Side-by-side pitch rotations for matter (harmonic helix, k = m Omega^2 v_z^2)
/// and light (Rytov) on the same geometry.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PitchComparison {
    pub matter_angle: f64,
    pub light_angle: f64,
    pub ratio: f64,
    /// The harmonic coupling the matter angle corresponds to.
    pub k_harmonic: f64,
}

pub fn compare_pitch_rotations(r0: f64, omega: f64, v_z: f64, m: f64, c: f64) -> PitchComparison {
    let matter_angle = pitch_rotation_matter_harmonic(omega, r0, v_z, c);
    let light_angle = rytov_rotation_per_pitch(omega, r0);
    PitchComparison {
        matter_angle,
        light_angle,
        ratio: matter_angle / light_angle,
        k_harmonic: m * omega * omega * v_z * v_z,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ray::{AnalyticTrajectory, ArcCurve};
    use approx::assert_abs_diff_eq;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    const TOL: Tolerances = Tolerances { rel: 1e-12, abs: 1e-14 };

    fn real_pol(v: Vector3<f64>) -> Vector3<Complex64> {
        v.map(|x| Complex64::new(x, 0.0))
    }

    #[test]
    fn homogeneous_on_shell_residual_vanishes() {
        let medium = Medium::homogeneous(1.5, 1.0);
        let g = Vector3::new(0.0, 0.9, 1.2); // |g| = 1.5
        assert_eq!(em_eikonal_residual(&Vector3::zeros(), &g, &medium), 0.0);
    }

    #[test]
    fn grin_slab_ray_stays_on_shell_and_transverse() {
        // n(x) = 1 + 0.1 x via eps = n^2, mu = 1.
        let medium = Medium {
            epsilon: ScalarField::SquaredLinear { base: 1.0, grad: [0.1, 0.0, 0.0] },
            mu: ScalarField::Constant { value: 1.0 },
            c: 1.0,
        };
        let dir = Vector3::new(0.6, 0.0, 0.8);
        let u0 = real_pol(Vector3::new(-0.8, 0.0, 0.6)); // perpendicular to dir
        let states =
            trace_em_ray(&Vector3::zeros(), &dir, &u0, &medium, 0.05, 12.0, TOL).unwrap();
        let mut residual: f64 = 0.0;
        let mut transversality: f64 = 0.0;
        let mut gz_drift: f64 = 0.0;
        let gz0 = states[0].g.z;
        for st in &states {
            residual = residual.max(em_eikonal_residual(&st.x, &st.g, &medium).abs());
            let u_re = Vector3::new(st.u.x.re, st.u.y.re, st.u.z.re);
            transversality = transversality.max(u_re.dot(&st.g).abs() / (u_re.norm() * st.g.norm()));
            gz_drift = gz_drift.max((st.g.z - gz0).abs());
        }
        assert!(residual < 1e-9, "eikonal residual {residual:e}");
        assert!(transversality < 1e-8, "transversality defect {transversality:e}");
        // The index only varies along x, so the transverse grad L components persist.
        assert!(gz_drift < 1e-11, "conserved component drifted {gz_drift:e}");
    }

    #[test]
    fn homogeneous_medium_keeps_polarization_in_the_lab_frame() {
        let medium = Medium::homogeneous(1.2, 1.0);
        let dir = Vector3::new(0.0, 0.6, 0.8);
        let u0 = real_pol(Vector3::new(1.0, 0.0, 0.0));
        let states = trace_em_ray(&Vector3::zeros(), &dir, &u0, &medium, 0.5, 40.0, TOL).unwrap();
        for st in &states {
            assert!((st.u - u0).norm() < 1e-12, "polarization moved in a uniform medium");
        }
    }

    #[test]
    fn stratified_permittivity_rate_points_along_the_ray() {
        let medium = Medium {
            epsilon: ScalarField::Linear { base: 2.0, grad: [0.0, 0.0, 0.3] },
            mu: ScalarField::Constant { value: 1.0 },
            c: 1.0,
        };
        let x = Vector3::new(0.0, 0.0, 1.0);
        let g = Vector3::new(0.0, medium.n(&x), 0.0); // ray along y
        let u = real_pol(Vector3::new(0.0, 0.0, 1.0)); // polarized along the gradient
        let rate = em_polarization_rate(&x, &g, &u, &medium);
        let eps = medium.epsilon.value(&x);
        let expected_mag = 0.3 / (2.0 * eps); // |u . grad eps| / (2 eps)
        let rate_re = Vector3::new(rate.x.re, rate.y.re, rate.z.re);
        assert!(rate_re.cross(&g).norm() < 1e-14 * rate_re.norm() * g.norm());
        assert_abs_diff_eq!(rate_re.norm(), expected_mag, epsilon = 1e-14);
    }

    #[test]
    fn mu_cross_form_matches_two_term_expansion() {
        // a x (b x c) = b (a.c) - c (a.b): with transversal u the longitudinal
        // term drops and the cross form reproduces the direct mu rate plus a
        // component along u (the amplitude piece).
        let mut rng = StdRng::seed_from_u64(7);
        let mut worst: f64 = 0.0;
        for _ in 0..1000 {
            let gm = Vector3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let g = Vector3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            if g.norm() < 0.1 {
                continue;
            }
            let u = Vector3::new(
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            );
            let medium = Medium {
                epsilon: ScalarField::Constant { value: 1.0 },
                mu: ScalarField::Linear { base: 3.0, grad: [gm.x, gm.y, gm.z] },
                c: 1.0,
            };
            let x = Vector3::zeros();
            let mu = medium.mu.value(&x);
            let cross = mu_term_cross_form(&x, &g, &u, &medium);
            let t = g / g.norm();
            // b (a.c) - c (a.b) with a = grad mu, b = grad L, c = u.
            let direct = {
                let along_g = dot_rc(&gm, &u) / Complex64::new(2.0 * mu, 0.0);
                let along_u = gm.dot(&g) / (2.0 * mu);
                Vector3::new(
                    along_g * t.x - along_u * u.x / g.norm(),
                    along_g * t.y - along_u * u.y / g.norm(),
                    along_g * t.z - along_u * u.z / g.norm(),
                )
            };
            worst = worst.max((cross - direct).norm());
        }
        assert!(worst < 1e-12, "triple-product identity violated by {worst:e}");
    }

    #[test]
    fn spherical_wave_amplitude_falls_like_one_over_r() {
        let medium = Medium::homogeneous(2.0, 1.0);
        let x = Vector3::new(2.0, 1.0, 2.0); // r = 3
        let g = medium.n(&x) * x / x.norm(); // L = n r
        let lap = |y: &Vector3<f64>| 2.0 * 2.0 / y.norm();
        let rate =
            em_amplitude_rate(&x, &g, &medium, &WavefrontField::AnalyticLaplacian(&lap)).unwrap();
        assert_abs_diff_eq!(rate, -1.0 / 3.0, epsilon = 1e-14);

        let w = |y: &Vector3<f64>| 2.0 * y.norm();
        let sampled =
            em_amplitude_rate(&x, &g, &medium, &WavefrontField::Sampled { w: &w, scale: 1.0 })
                .unwrap();
        assert_abs_diff_eq!(sampled, -1.0 / 3.0, epsilon = 1e-7);
    }

    #[test]
    fn helix_frenet_data_matches_closed_forms() {
        let (r0, omega) = (1.0, 1.0);
        let traj = AnalyticTrajectory::Helix { r0, omega };
        let frame = frenet(&traj, 1.7).unwrap();
        assert_abs_diff_eq!(frame.curvature, 0.5, epsilon = 1e-13);
        assert_abs_diff_eq!(frame.torsion, 0.5, epsilon = 1e-13);
        // N points inward on the cylinder.
        let x = traj.position(1.7);
        assert!((frame.n + Vector3::new(x.x, x.y, 0.0) / x.xy().norm()).norm() < 1e-12);

        let circle = AnalyticTrajectory::Circle { r0: 2.0 };
        let cf = frenet(&circle, 0.3).unwrap();
        assert_abs_diff_eq!(cf.curvature, 0.5, epsilon = 1e-13);
        assert_abs_diff_eq!(cf.torsion, 0.0, epsilon = 1e-13);
    }

    struct Line;
    impl Curve3 for Line {
        fn point(&self, u: f64) -> Vector3<f64> {
            Vector3::new(u, 2.0 * u, 0.0)
        }
        fn d1(&self, _u: f64) -> Vector3<f64> {
            Vector3::new(1.0, 2.0, 0.0)
        }
        fn d2(&self, _u: f64) -> Vector3<f64> {
            Vector3::zeros()
        }
        fn d3(&self, _u: f64) -> Vector3<f64> {
            Vector3::zeros()
        }
    }

    #[test]
    fn straight_curves_have_no_frenet_frame() {
        assert!(matches!(frenet(&Line, 0.5), Err(Error::DegenerateCurve(_))));
    }

    #[test]
    fn rytov_angle_for_the_unit_helix() {
        assert_abs_diff_eq!(
            rytov_rotation_per_pitch(1.0, 1.0),
            std::f64::consts::PI * std::f64::consts::SQRT_2,
            epsilon = 1e-15
        );
    }

    fn guided_helix_states(pitches: f64, samples_per_pitch: usize) -> (Vec<EmState>, Medium) {
        let (r0, omega, n0, c) = (1.0, 1.0, 1.5, 1.0);
        let medium = guiding_medium(n0, r0, omega, c);
        let traj = AnalyticTrajectory::Helix { r0, omega };
        let x0 = Vector3::new(r0, 0.0, 0.0);
        let dir = traj.tangent(0.0);
        // Start polarized along the inward normal.
        let u0 = real_pol(Vector3::new(-1.0, 0.0, 0.0));
        let span = pitches * traj.period_arc();
        let ds = traj.period_arc() / samples_per_pitch as f64;
        let states = trace_em_ray(&x0, &dir, &u0, &medium, ds, span, TOL).unwrap();
        (states, medium)
    }

    #[test]
    fn guided_ray_follows_the_helix() {
        let (states, medium) = guided_helix_states(1.0, 400);
        let mut rho_drift: f64 = 0.0;
        let mut residual: f64 = 0.0;
        for st in &states {
            rho_drift = rho_drift.max((st.x.xy().norm() - 1.0).abs());
            residual = residual.max(em_eikonal_residual(&st.x, &st.g, &medium).abs());
        }
        assert!(rho_drift < 1e-9, "ray left the guiding cylinder by {rho_drift:e}");
        assert!(residual < 1e-9);
    }

    #[test]
    fn polarization_turns_by_the_torsion_integral_per_pitch() {
        let (states, medium) = guided_helix_states(1.0, 2000);
        let history = frame_angle_history(&states, &medium).unwrap();
        let delta = history.last().unwrap().1 - history[0].1;
        let expected = -rytov_rotation_per_pitch(1.0, 1.0); // sense: -integral of torsion
        assert_abs_diff_eq!(delta, expected, epsilon = 1e-6);
    }

    #[test]
    fn transversality_is_preserved_along_the_guided_helix() {
        let (states, _) = guided_helix_states(1.0, 400);
        let mut worst: f64 = 0.0;
        for st in &states {
            let u_re = Vector3::new(st.u.x.re, st.u.y.re, st.u.z.re);
            worst = worst.max(u_re.dot(&st.g).abs() / (u_re.norm() * st.g.norm()));
        }
        assert!(worst < 1e-8, "transversality defect {worst:e}");
    }

    #[test]
    fn transport_law_equals_normal_bundle_parallel_transport() {
        let (states, medium) = guided_helix_states(0.5, 200);
        let mut worst: f64 = 0.0;
        for st in &states {
            let frame = ray_frame(&st.x, &st.g, &medium).unwrap();
            let u_re = Vector3::new(st.u.x.re, st.u.y.re, st.u.z.re);
            let rate = em_polarization_rate(&st.x, &st.g, &st.u, &medium);
            let rate_re = Vector3::new(rate.x.re, rate.y.re, rate.z.re);
            let parallel = -frame.curvature * u_re.dot(&frame.n) * frame.t;
            worst = worst.max((rate_re - parallel).norm());
        }
        assert!(worst < 1e-10, "transport law vs parallel transport: {worst:e}");
    }

    #[test]
    fn geometric_transport_agrees_with_the_guided_ray_and_the_formula() {
        let traj = AnalyticTrajectory::Helix { r0: 1.0, omega: 1.0 };
        let psi = rytov_angle_dynamic(&traj, traj.period_arc(), 4000).unwrap();
        assert_abs_diff_eq!(psi, -rytov_rotation_per_pitch(1.0, 1.0), epsilon = 1e-9);
    }

    #[test]
    fn pitch_comparison_reference_numbers() {
        let cmp = compare_pitch_rotations(1.0, 1.0, 0.1, 1.0, 1.0);
        assert_abs_diff_eq!(cmp.matter_angle, std::f64::consts::PI / 100.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            cmp.light_angle,
            std::f64::consts::PI * std::f64::consts::SQRT_2,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(cmp.ratio, 7.0710678118654755e-3, epsilon = 1e-12);
        assert_abs_diff_eq!(cmp.k_harmonic, 0.01, epsilon = 1e-15);
    }

    #[test]
    fn zero_direction_is_rejected() {
        let medium = Medium::homogeneous(1.0, 1.0);
        let result = trace_em_ray(
            &Vector3::zeros(),
            &Vector3::zeros(),
            &real_pol(Vector3::x()),
            &medium,
            0.1,
            1.0,
            TOL,
        );
        assert!(result.is_err());
    }
}
