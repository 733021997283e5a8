use std::f64::consts::PI;

use approx::assert_relative_eq;
use proptest::prelude::*;
use spdc::dispersion::{DispersionSet, Polarization, BIBO_DATA};
use spdc::Error;

/// n^2 = a + b / (l^2 - c) - d l^2 with l in um, written out independently.
fn sellmeier(coef: (f64, f64, f64, f64), lambda_um: f64) -> f64 {
    let (a, b, c, d) = coef;
    let s = lambda_um * lambda_um;
    (a + b / (s - c) - d * s).sqrt()
}

const X: (f64, f64, f64, f64) = (3.0740, 0.0323, 0.0316, 0.01337);
const Y: (f64, f64, f64, f64) = (3.1685, 0.0373, 0.0346, 0.01750);
const Z: (f64, f64, f64, f64) = (3.6545, 0.0511, 0.0371, 0.0226);

#[test]
fn pump_index_at_355_nm_is_frozen() {
    let d = DispersionSet::bibo();
    assert_relative_eq!(d.index_pump(355e-9).unwrap(), 1.8478055828507043, max_relative = 1e-14);
}

#[test]
fn principal_indices_match_frozen_values() {
    let d = DispersionSet::bibo();
    let n = d.principal_indices(710e-9).unwrap();
    assert_relative_eq!(n[1], 1.7997567806185149, max_relative = 1e-14);
    assert_relative_eq!(n[2], 1.9371445948977986, max_relative = 1e-14);
    assert_relative_eq!(d.principal_indices(1500e-9).unwrap()[1], 1.7736859047289366, max_relative = 1e-14);
    assert_relative_eq!(d.principal_indices(400e-9).unwrap()[2], 2.0165984209089247, max_relative = 1e-14);
}

#[test]
fn angular_index_matches_frozen_values() {
    let d = DispersionSet::bibo();
    assert_relative_eq!(
        d.index_spdc(710e-9, 141.9f64.to_radians()).unwrap(),
        1.8485462787100473,
        max_relative = 1e-13
    );
    assert_relative_eq!(
        d.index_spdc(850e-9, 143.22f64.to_radians()).unwrap(),
        1.8367980558548025,
        max_relative = 1e-13
    );
}

#[test]
fn angular_index_endpoints_are_principal_values() {
    let d = DispersionSet::bibo();
    for l in [400e-9, 710e-9, 1200e-9] {
        let um = l * 1e6;
        assert_relative_eq!(d.index_spdc(l, 0.0).unwrap(), sellmeier(Y, um), max_relative = 1e-14);
        assert_relative_eq!(d.index_spdc(l, PI / 2.0).unwrap(), sellmeier(Z, um), max_relative = 1e-14);
        assert_relative_eq!(d.index_pump(l).unwrap(), sellmeier(X, um), max_relative = 1e-14);
    }
}

#[test]
fn out_of_range_wavelengths_are_rejected() {
    let d = DispersionSet::bibo();
    for l in [250e-9, 2600e-9] {
        assert!(matches!(d.index_pump(l), Err(Error::OutOfRange { .. })));
        assert!(matches!(d.dispersion_sample(l, 2.5, Polarization::Spdc), Err(Error::OutOfRange { .. })));
    }
    assert!(d.contains(300e-9) && d.contains(2500e-9));
}

#[test]
fn group_index_and_gvd_at_carriers() {
    let d = DispersionSet::bibo();
    let theta = 141.9f64.to_radians();
    for l in [609.6e-9, 710e-9, 850e-9] {
        let s = d.dispersion_sample(l, theta, Polarization::Spdc).unwrap();
        assert!(s.n_g > s.n, "normal dispersion: n_g {} > n {}", s.n_g, s.n);
        assert!(s.k2 > 0.0);
    }
}

#[test]
fn data_file_round_trips_through_disk() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bibo.toml");
    std::fs::write(&path, BIBO_DATA).unwrap();
    let d = DispersionSet::from_file(&path).unwrap();
    assert_eq!(d, DispersionSet::bibo());
    let bad = BIBO_DATA.replace("a = 3.0740", "a = \"three\"");
    std::fs::write(&path, bad).unwrap();
    assert!(matches!(DispersionSet::from_file(&path), Err(Error::Parse { .. })));
}

#[test]
fn swapped_coefficients_change_the_checksum() {
    let edited = BIBO_DATA.replace("d = 0.0226", "d = 0.0227");
    let d = DispersionSet::from_toml_str(&edited).unwrap();
    assert_ne!(d.checksum, DispersionSet::bibo().checksum);
    assert!(d.index_spdc(710e-9, PI / 2.0).unwrap() < DispersionSet::bibo().index_spdc(710e-9, PI / 2.0).unwrap());
}

proptest! {
    #[test]
    fn analytic_derivatives_match_finite_differences(lambda_nm in 320.0f64..2400.0, theta in 0.0f64..PI) {
        let d = DispersionSet::bibo();
        let l = lambda_nm * 1e-9;
        for pol in [Polarization::Pump, Polarization::Spdc] {
            let a = d.dispersion_sample(l, theta, pol).unwrap();
            let n = d.dispersion_sample_numeric(l, theta, pol, 1e-4).unwrap();
            prop_assert!((a.n - n.n).abs() < 1e-14);
            prop_assert!((a.n_g - n.n_g).abs() < 1e-6, "n_g {} vs {}", a.n_g, n.n_g);
            prop_assert!((a.k2 - n.k2).abs() < 1e-3 * a.k2.abs().max(1e-28));
        }
    }

    #[test]
    fn angular_index_is_pi_periodic_and_even(lambda_nm in 320.0f64..2400.0, theta in -PI..PI) {
        let d = DispersionSet::bibo();
        let l = lambda_nm * 1e-9;
        let n = d.index_spdc(l, theta).unwrap();
        prop_assert!((n - d.index_spdc(l, theta + PI).unwrap()).abs() < 1e-13);
        prop_assert!((n - d.index_spdc(l, -theta).unwrap()).abs() < 1e-13);
        let (ny, nz) = (sellmeier(Y, lambda_nm * 1e-3), sellmeier(Z, lambda_nm * 1e-3));
        prop_assert!(n >= ny.min(nz) - 1e-14 && n <= ny.max(nz) + 1e-14);
    }

    #[test]
    fn evaluation_is_pure(lambda_nm in 320.0f64..2400.0, theta in 0.0f64..PI) {
        let d = DispersionSet::bibo();
        let l = lambda_nm * 1e-9;
        let a = d.dispersion_sample(l, theta, Polarization::Spdc).unwrap();
        let b = d.dispersion_sample(l, theta, Polarization::Spdc).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn indices_decrease_with_wavelength(lambda_nm in 320.0f64..2300.0, theta in 0.0f64..PI) {
        let d = DispersionSet::bibo();
        let l = lambda_nm * 1e-9;
        prop_assert!(d.index_spdc(l, theta).unwrap() > d.index_spdc(l + 100e-9, theta).unwrap());
        prop_assert!(d.index_pump(l).unwrap() > d.index_pump(l + 100e-9).unwrap());
    }
}
