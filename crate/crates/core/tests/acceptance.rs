//! The acceptance criteria, one test each. Every test prints a single
//! PASS/FAIL line with the measured quantities.

use zakharov_core::suites::Criterion;

fn check(c: Criterion) {
    let outcome = match c.run() {
        Ok(o) => o,
        Err(e) => {
            println!("FAIL [{:>2}] {}: error: {e}", c.id(), c.name());
            panic!("criterion {} errored: {e}", c.name());
        }
    };
    println!("{outcome}");
    assert!(outcome.passed(), "{outcome}");
}

#[test]
fn c01_energy_conservation() {
    check(Criterion::EnergyConservation);
}

#[test]
fn c02_linear_dispersion() {
    check(Criterion::LinearDispersion);
}

#[test]
fn c03_flat_dn() {
    check(Criterion::FlatDn);
}

#[test]
fn c04_dn_self_adjoint() {
    check(Criterion::DnSelfAdjoint);
}

#[test]
fn c05_shape_derivative() {
    check(Criterion::ShapeDerivative);
}

#[test]
fn c06_bony_exactness() {
    check(Criterion::BonyExactness);
}

#[test]
fn c07_smoothing_kernel() {
    check(Criterion::SmoothingKernel);
}

#[test]
fn c08_paralinearization() {
    check(Criterion::Paralinearization);
}

#[test]
fn c09_hydrostatic() {
    check(Criterion::Hydrostatic);
}

#[test]
fn c10_material_derivative() {
    check(Criterion::MaterialDerivative);
}

#[test]
fn c11_steepening() {
    check(Criterion::Steepening);
}
