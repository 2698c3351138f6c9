//! Acceptance battery: each test runs one criterion end to end at its
//! stated tolerance and prints a single pass/fail line. `cargo test
//! --test acceptance` is the release gate.

use cubature::acceptance;
use cubature::Result;

fn gate(id: usize, name: &str, f: fn() -> Result<String>) {
    let t0 = std::time::Instant::now();
    let res = f();
    let millis = t0.elapsed().as_millis();
    match res {
        Ok(details) => println!("criterion {id:2} {name}: PASS ({millis} ms) {details}"),
        Err(e) => {
            println!("criterion {id:2} {name}: FAIL ({millis} ms) {e}");
            panic!("criterion {id} {name} failed: {e}");
        }
    }
}

#[test]
fn criterion_01_interval_rules() {
    gate(1, "interval-rules", acceptance::criterion_interval_rules);
}

#[test]
fn criterion_02_catalog_strengths() {
    gate(2, "catalog-strengths", acceptance::criterion_catalog_strengths);
}

#[test]
fn criterion_03_criterion_equivalence() {
    gate(3, "criterion-equivalence", acceptance::criterion_equivalence);
}

#[test]
fn criterion_04_tight_root_sets() {
    gate(4, "tight-root-sets", acceptance::criterion_tight_root_sets);
}

#[test]
fn criterion_05_two_shell_eleven() {
    gate(5, "two-shell-eleven", acceptance::criterion_two_shell_eleven);
}

#[test]
fn criterion_06_shell_modular_links() {
    gate(6, "shell-modular-links", acceptance::criterion_shell_modular_links);
}

#[test]
fn criterion_07_coefficient_scans() {
    gate(7, "coefficient-scans", acceptance::criterion_coefficient_scans);
}

#[test]
fn criterion_08_voronoi_classes() {
    gate(8, "voronoi-classes", acceptance::criterion_voronoi_classes);
}

#[test]
fn criterion_09_neighbor_machinery() {
    gate(9, "neighbor-machinery", acceptance::criterion_neighbor_machinery);
}

#[test]
fn criterion_10_markov_operators() {
    gate(10, "markov-operators", acceptance::criterion_markov_operators);
}

#[test]
fn criterion_11_support_reduction() {
    gate(11, "support-reduction", acceptance::criterion_support_reduction);
}

#[test]
fn criterion_12_potential_search() {
    gate(12, "potential-search", acceptance::criterion_potential_search);
}

#[test]
fn criterion_13_gaussian_lifts() {
    gate(13, "gaussian-lifts", acceptance::criterion_gaussian_lifts);
}

#[test]
fn criterion_14_biquadrate_demo() {
    gate(14, "biquadrate-demo", acceptance::criterion_biquadrate_demo);
}
