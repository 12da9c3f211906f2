mod common;

use common::{bessel_j, bessel_zero, rel};
use discspec_core::analysis::{hot_spot, nodal_domain_count, nodal_radii};
use discspec_core::sl_solver::{eigenfunction_in_r, solve_lowest};
use discspec_core::spectrum::assemble_spectrum;
use discspec_core::{BoundaryCondition, MetricSpec, ModeProblem};

const D: BoundaryCondition = BoundaryCondition::Dirichlet;
const N: BoundaryCondition = BoundaryCondition::Neumann;

fn lowest(spec: &MetricSpec, k: u32, bc: BoundaryCondition, n: usize, count: usize) -> Vec<discspec_core::EigenPair> {
    solve_lowest(&ModeProblem::new(spec.clone(), k, bc, n), count).unwrap()
}

#[test]
fn oracle_sanity() {
    assert!((bessel_zero(0, 1) - 2.404_825_557_695_773).abs() < 1e-12);
    assert!((bessel_zero(0, 2) - 5.520_078_110_286_311).abs() < 1e-12);
    assert!((bessel_zero(1, 1) - 3.831_705_970_207_512).abs() < 1e-12);
}

#[test]
fn flat_disc_matches_bessel_zeros() {
    let flat = MetricSpec::flat_disc();
    let j01 = bessel_zero(0, 1);
    let j11 = bessel_zero(1, 1);
    let d0 = lowest(&flat, 0, D, 4096, 1);
    assert!(rel(d0[0].lambda, j01 * j01) < 1e-4);
    let d1 = lowest(&flat, 1, D, 4096, 1);
    assert!(rel(d1[0].lambda, j11 * j11) < 1e-4);
    // radial Neumann: φ' = −√λ J₁(√λ r) vanishes at 1
    let n0 = lowest(&flat, 0, N, 4096, 2);
    assert_eq!(n0[0].lambda, 0.0);
    assert!(rel(n0[1].lambda, j11 * j11) < 1e-4);
}

#[test]
fn flat_ground_state_profile_is_j0() {
    let flat = MetricSpec::flat_disc();
    let pair = &lowest(&flat, 0, D, 4096, 1)[0];
    let samples = eigenfunction_in_r(pair, &flat, 201).unwrap();
    let j01 = bessel_zero(0, 1);
    let scale = samples.phi[0];
    let dev = samples
        .r
        .iter()
        .zip(&samples.phi)
        .map(|(&r, &phi)| (phi / scale - bessel_j(0, j01 * r)).abs())
        .fold(0.0, f64::max);
    assert!(dev < 1e-3, "{dev}");
}

#[test]
fn constant_neumann_state_is_constant_in_r() {
    let spec = MetricSpec::peaked(0.02).unwrap();
    let pair = &lowest(&spec, 0, N, 512, 1)[0];
    let samples = eigenfunction_in_r(pair, &spec, 50).unwrap();
    assert!(samples.phi.iter().all(|v| (v - samples.phi[0]).abs() < 1e-12));
}

#[test]
fn zeros_survive_the_change_of_variables() {
    let spec = MetricSpec::peaked(0.01).unwrap();
    let pair = &lowest(&spec, 0, D, 2048, 3)[2];
    let samples = eigenfunction_in_r(pair, &spec, 2001).unwrap();
    let changes = samples.phi.windows(2).filter(|w| w[0] * w[1] < 0.0).count();
    assert_eq!(changes, 2);
    assert_eq!(nodal_radii(pair, &spec).unwrap().len(), 2);
}

#[test]
fn oscillation_counts() {
    for spec in [MetricSpec::peaked(1.0).unwrap(), MetricSpec::peaked(0.01).unwrap()] {
        for k in 0..=3 {
            for bc in [D, N] {
                for pair in lowest(&spec, k, bc, 1024, 6) {
                    assert_eq!(pair.sign_changes(1e-9), pair.j - 1, "k={k} j={} {bc:?}", pair.j);
                }
            }
        }
    }
}

#[test]
fn eigenvalues_increase_in_j_and_k() {
    for spec in [MetricSpec::flat_disc(), MetricSpec::peaked(0.05).unwrap()] {
        for bc in [D, N] {
            let modes: Vec<Vec<f64>> =
                (0..=4).map(|k| lowest(&spec, k, bc, 1024, 5).iter().map(|p| p.lambda).collect()).collect();
            for k in 0..=4 {
                assert!(modes[k].windows(2).all(|w| w[0] < w[1]));
                if k < 4 {
                    assert!(modes[k].iter().zip(&modes[k + 1]).all(|(a, b)| a < b));
                }
            }
        }
    }
}

#[test]
fn neumann_below_dirichlet_per_mode() {
    for spec in [MetricSpec::flat_disc(), MetricSpec::peaked(1.0).unwrap(), MetricSpec::peaked(1e-3).unwrap()] {
        for k in 0..=3 {
            let d = lowest(&spec, k, D, 1024, 5);
            let n = lowest(&spec, k, N, 1024, 5);
            assert!(n.iter().zip(&d).all(|(a, b)| a.lambda <= b.lambda));
        }
    }
}

#[test]
fn mode_lower_bound_holds() {
    for delta in [1.0, 0.1, 1e-3, 1e-5] {
        let spec = MetricSpec::peaked(delta).unwrap();
        let alpha = spec.alpha().unwrap();
        for k in 1..=4u32 {
            for bc in [D, N] {
                let l = lowest(&spec, k, bc, 2048, 1)[0].lambda;
                assert!(l >= (k * k) as f64 / alpha, "δ={delta} k={k}");
            }
        }
    }
}

#[test]
fn peaked_ground_state_below_alpha_pi_squared() {
    let spec = MetricSpec::peaked(0.01).unwrap();
    let l = lowest(&spec, 0, D, 4096, 1)[0].lambda;
    let bound = spec.alpha().unwrap() * std::f64::consts::PI.powi(2);
    assert!(l > 0.0 && l <= bound);
    assert!((bound - 2.13854).abs() < 1e-5);
}

#[test]
fn flat_second_radial_nodal_radius() {
    let flat = MetricSpec::flat_disc();
    let pair = &lowest(&flat, 0, D, 4096, 2)[1];
    let radii = nodal_radii(pair, &flat).unwrap();
    let expected = bessel_zero(0, 1) / bessel_zero(0, 2);
    assert_eq!(radii.len(), 1);
    assert!((radii[0] - expected).abs() < 1e-4, "{radii:?} vs {expected}");
}

#[test]
fn flat_first_angular_neumann_factor_peaks_on_boundary() {
    let flat = MetricSpec::flat_disc();
    let pair = &lowest(&flat, 1, N, 2048, 1)[0];
    let hs = hot_spot(pair, &flat).unwrap();
    assert_eq!(hs.argmax_r, 1.0);
    assert!(!hs.interior_max);
    assert!(pair.psi_z().windows(2).all(|w| w[1] >= w[0]));
}

#[test]
fn courant_bound_on_assembled_spectra() {
    for spec in [MetricSpec::flat_disc(), MetricSpec::peaked(0.01).unwrap()] {
        for bc in [D, N] {
            let table = assemble_spectrum(&spec, bc, 8, 1024).unwrap();
            for entry in table.entries.iter().take(8) {
                // position of the eigenvalue's first copy
                let first = table.entries.iter().position(|e| e.value == entry.value).unwrap() + 1;
                let pair = &lowest(&spec, entry.k, bc, 1024, entry.j)[entry.j - 1];
                assert!(nodal_domain_count(pair) <= first, "{entry:?} at {first}");
            }
        }
    }
}

#[test]
fn flat_spectrum_labels() {
    let table = assemble_spectrum(&MetricSpec::flat_disc(), D, 3, 4096).unwrap();
    let j01 = bessel_zero(0, 1);
    let j11 = bessel_zero(1, 1);
    let values: Vec<f64> = table.entries.iter().take(3).map(|e| e.value).collect();
    assert!(rel(values[0], j01 * j01) < 1e-4);
    assert!(rel(values[1], j11 * j11) < 1e-4 && values[1] == values[2]);
}
