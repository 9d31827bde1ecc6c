//! Scalar potentials with analytic gradients.
//!
//! These enter ray tracing through `-grad V` and spin transport through the
//! precession generator `grad V x grad W`. Each built-in kind carries an exact
//! gradient; `fd_gradient` is the finite-difference cross-check used by tests.
//!
//! The `offset` field adds a constant reference value, which shifts energies
//! but never forces: configurations use it to pin `V` at a working radius
//! without touching the gradient.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScalarPotential {
    /// V = 0 identically.
    Free,
    /// V = offset + k |x|^2 / 2.
    Harmonic3d {
        k: f64,
        #[serde(default)]
        offset: f64,
    },
    /// V = offset + k (x^2 + y^2) / 2, uniform along z.
    Harmonic2dXy {
        k: f64,
        #[serde(default)]
        offset: f64,
    },
    /// V = offset + coeff |x|^exponent.
    CentralRadial {
        coeff: f64,
        exponent: f64,
        #[serde(default)]
        offset: f64,
    },
}

impl ScalarPotential {
    pub fn value(&self, x: &Vector3<f64>) -> f64 {
        match self {
            ScalarPotential::Free => 0.0,
            ScalarPotential::Harmonic3d { k, offset } => offset + 0.5 * k * x.norm_squared(),
            ScalarPotential::Harmonic2dXy { k, offset } => {
                offset + 0.5 * k * (x.x * x.x + x.y * x.y)
            }
            ScalarPotential::CentralRadial { coeff, exponent, offset } => {
                offset + coeff * x.norm().powf(*exponent)
            }
        }
    }

    pub fn gradient(&self, x: &Vector3<f64>) -> Vector3<f64> {
        match self {
            ScalarPotential::Free => Vector3::zeros(),
            ScalarPotential::Harmonic3d { k, .. } => *k * x,
            ScalarPotential::Harmonic2dXy { k, .. } => Vector3::new(k * x.x, k * x.y, 0.0),
            ScalarPotential::CentralRadial { coeff, exponent, .. } => {
                let r = x.norm();
                if r == 0.0 {
                    // Smooth at the origin only for exponent >= 2; the radial
                    // slope vanishes there in every case we accept.
                    return Vector3::zeros();
                }
                coeff * exponent * r.powf(exponent - 2.0) * x
            }
        }
    }

    /// True for kinds whose gradient is everywhere parallel to the position.
    pub fn is_central(&self) -> bool {
        matches!(
            self,
            ScalarPotential::Free | ScalarPotential::Harmonic3d { .. } | ScalarPotential::CentralRadial { .. }
        )
    }
}

/// Second-order central-difference gradient, for validating analytic ones.
pub fn fd_gradient<F: Fn(&Vector3<f64>) -> f64>(f: F, x: &Vector3<f64>, h: f64) -> Vector3<f64> {
    let mut g = Vector3::zeros();
    for i in 0..3 {
        let mut xp = *x;
        let mut xm = *x;
        xp[i] += h;
        xm[i] -= h;
        g[i] = (f(&xp) - f(&xm)) / (2.0 * h);
    }
    g
}
