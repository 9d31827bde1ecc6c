//! End-to-end acceptance gate. Each numbered criterion runs at its stated
//! tolerance and prints one pass/fail line (plus one per sub-check); a
//! criterion that fails its bound fails the test rather than being relaxed.

use spinray::verify::criterion;

const SEED: u64 = 0xACCE;

fn run(n: u8, title: &str) {
    let checks = criterion(n, SEED).expect("criterion must be runnable");
    assert!(!checks.is_empty());
    let mut all = true;
    for chk in &checks {
        println!(
            "[{}] {:<24} measured {:>12.5e}  bound {:>9.1e}  {}",
            if chk.pass { "PASS" } else { "FAIL" },
            chk.id,
            chk.measured,
            chk.bound,
            chk.description
        );
        all &= chk.pass;
    }
    println!("[{}] AC{n} {title}", if all { "PASS" } else { "FAIL" });
    assert!(all, "acceptance criterion {n} ({title}) failed");
}

#[test]
fn ac1_circle_against_closed_form() {
    run(1, "circle transport matches the closed-form rotor across random parameters");
}

#[test]
fn ac2_helix_against_closed_form() {
    run(2, "helix transport matches the two-rotor closed form; first-order error is quadratic");
}

#[test]
fn ac3_per_pitch_rotation_formula() {
    run(3, "net per-pitch rotation reproduces pi k r0^2/(m c^2) about z");
}

#[test]
fn ac4_light_rotation_per_pitch() {
    run(4, "light per-pitch angle: exact formula and dynamic Frenet measurement agree");
}

#[test]
fn ac5_free_particle_constant_spin() {
    run(5, "free-particle Bloch vector is constant over a long ray");
}

#[test]
fn ac6_oscillator_discontinuity_solutions() {
    run(6, "oscillator ellipses: residual, angular momentum, and spin alignment");
}

#[test]
fn ac7_property_suite() {
    run(7, "unitarity, conservation, fixed axis, gradients, and 1/c^2 suppression");
}
