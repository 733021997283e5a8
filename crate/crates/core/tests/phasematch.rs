use approx::assert_relative_eq;
use proptest::prelude::*;
use spdc::constants::omega_from_wavelength;
use spdc::crystal::CrystalParams;
use spdc::dispersion::Polarization;
use spdc::phasematch::*;
use spdc::Error;

const PUMP: f64 = 355e-9;

fn crystal() -> CrystalParams {
    CrystalParams::bibo_default()
}

fn solve(preset: Preset, signal: f64, constraint: Constraint) -> Geometry {
    let carriers = Carriers {
        pump_wavelength: PUMP,
        signal_wavelength: signal,
    };
    solve_geometry(preset, &crystal(), carriers, constraint).unwrap()
}

fn nd() -> Geometry {
    solve(Preset::NoncollinearDegenerate, 2.0 * PUMP, Constraint::ExteriorAngle(3.04f64.to_radians()))
}

fn nn() -> Geometry {
    solve(Preset::NoncollinearNondegenerate, 850e-9, Constraint::ExteriorAngle(5.62f64.to_radians()))
}

// Tilts frozen from an independent Brent solve of the same conditions.
#[test]
fn tilts_match_independent_solve() {
    let cases = [
        (nd().theta_p, 141.89107199669698),
        (nn().theta_p, 142.3934586430466),
        (solve(Preset::CollinearNondegenerate, 850e-9, Constraint::Collinear).theta_p, 143.22371647780236),
        (solve(Preset::CollinearDegenerate, 2.0 * PUMP, Constraint::Collinear).theta_p, 142.22824361860543),
    ];
    for (got, want) in cases {
        assert!((got.to_degrees() - want).abs() < 1e-9, "{} vs {want}", got.to_degrees());
    }
    assert!((nd().theta_s.to_degrees() - 1.6439716286603487).abs() < 1e-9);
    assert!((nn().theta_s.to_degrees() - 3.0531921959712944).abs() < 1e-9);
    assert!((nn().theta_i.to_degrees() - 2.166781652495862).abs() < 1e-9);
}

#[test]
fn carrier_mismatch_vanishes() {
    let c = crystal();
    for g in [
        nd(),
        nn(),
        solve(Preset::CollinearNondegenerate, 850e-9, Constraint::Collinear),
        solve(Preset::CollinearDegenerate, 2.0 * PUMP, Constraint::Collinear),
    ] {
        let dk = phase_mismatch(&g, &c, g.omega_s0).unwrap();
        let kp = c.dispersion.wavenumber(g.omega_p, 0.0, Polarization::Pump).unwrap();
        assert!(dk.dk_y.abs() < 1e-9 * kp && dk.dk_z.abs() < 1e-9 * kp, "{dk:?}");
    }
}

#[test]
fn exterior_angle_target_is_met() {
    let g = nn();
    assert!((g.exterior_s.to_degrees() - 5.62).abs() < 1e-10);
    assert!((nd().exterior_s.to_degrees() - 3.04).abs() < 1e-10);
}

#[test]
fn degenerate_geometry_is_symmetric() {
    let g = nd();
    assert!(g.is_degenerate());
    assert_eq!(g.theta_s, g.theta_i);
    assert_eq!(g.omega_s0, g.omega_i0);
    let d = crystal().dispersion;
    let a = d.dispersion_sample(g.signal_wavelength(), g.theta_p, Polarization::Spdc).unwrap();
    let b = d.dispersion_sample(g.idler_wavelength(), g.theta_p, Polarization::Spdc).unwrap();
    assert_relative_eq!(a.n, b.n, max_relative = 1e-12);
    assert_relative_eq!(a.n_g, b.n_g, max_relative = 1e-12);
    assert_relative_eq!(a.k2, b.k2, max_relative = 1e-12);
}

#[test]
fn snell_maps_interior_to_exterior() {
    let e = exterior_angle(1.64f64.to_radians(), 1.853).unwrap();
    assert!((e.to_degrees() - 3.039).abs() < 2e-3, "{}", e.to_degrees());
    assert!(matches!(exterior_angle(0.7, 1.85), Err(Error::TotalInternalReflection(_))));
}

#[test]
fn taylor_mismatch_converges_at_third_order() {
    let c = crystal();
    for g in [nd(), solve(Preset::CollinearDegenerate, 2.0 * PUMP, Constraint::Collinear)] {
        let err = |d: f64| {
            let e = phase_mismatch(&g, &c, g.omega_s0 + d).unwrap();
            let t = taylor_mismatch_degenerate(&g, &c, g.omega_s0 + d).unwrap();
            ((e.dk_y - t.dk_y).powi(2) + (e.dk_z - t.dk_z).powi(2)).sqrt()
        };
        let d = 2e-3 * g.omega_s0;
        let slope = (err(2.0 * d) / err(d)).log2();
        assert!(slope >= 2.8, "slope {slope}");
    }
}

#[test]
fn taylor_needs_degeneracy() {
    assert!(matches!(
        taylor_mismatch_degenerate(&nn(), &crystal(), nn().omega_s0),
        Err(Error::NotDegenerate)
    ));
}

#[test]
fn degenerate_collinear_tilt_is_a_simple_root() {
    let c = crystal();
    let g = solve(Preset::CollinearDegenerate, 2.0 * PUMP, Constraint::Collinear);
    let kp = c.dispersion.wavenumber(g.omega_p, 0.0, Polarization::Pump).unwrap();
    let f = |t: f64| kp - 2.0 * c.dispersion.wavenumber(g.omega_s0, t, Polarization::Spdc).unwrap();
    let h = 1e-6;
    let slope = (f(g.theta_p + h) - f(g.theta_p - h)) / (2.0 * h);
    assert!(slope.abs() > 1e3, "df/dtheta = {slope} rad/m per rad");
    assert!(f(g.theta_p - 1e-3).signum() != f(g.theta_p + 1e-3).signum());
}

#[test]
fn preset_constraint_mismatches_are_config_errors() {
    let c = crystal();
    let deg = Carriers::degenerate(PUMP);
    let nondeg = Carriers {
        pump_wavelength: PUMP,
        signal_wavelength: 850e-9,
    };
    for (p, car, k) in [
        (Preset::CollinearDegenerate, deg, Constraint::Tilt(2.48)),
        (Preset::NoncollinearDegenerate, deg, Constraint::Collinear),
        (Preset::CollinearNondegenerate, deg, Constraint::Collinear),
        (Preset::NoncollinearDegenerate, nondeg, Constraint::Tilt(2.48)),
    ] {
        let e = solve_geometry(p, &c, car, k).unwrap_err();
        assert_eq!(e.exit_code(), 2, "{e}");
    }
}

#[test]
fn tilt_beyond_collinear_has_no_emission() {
    let e = solve_geometry(
        Preset::NoncollinearDegenerate,
        &crystal(),
        Carriers::degenerate(PUMP),
        Constraint::Tilt(150f64.to_radians()),
    )
    .unwrap_err();
    assert!(matches!(e, Error::NoEmission { .. }));
    assert_eq!(e.exit_code(), 3);
}

#[test]
fn unreachable_exterior_angle_reports_no_root() {
    let e = solve_geometry(
        Preset::NoncollinearDegenerate,
        &crystal(),
        Carriers::degenerate(PUMP),
        Constraint::ExteriorAngle(60f64.to_radians()),
    )
    .unwrap_err();
    assert!(matches!(e, Error::NoRoot { .. } | Error::AmbiguousRoot { .. }), "{e}");
}

#[test]
fn emission_curve_crossings_and_conjugate_pair() {
    let c = crystal();
    let wp = omega_from_wavelength(PUMP);
    let range = conjugate_valid_range(&c, wp);
    let t = 143f64.to_radians();
    let x = angle_crossings(&c, t, wp, 3.04f64.to_radians(), range, 4000).unwrap();
    assert_eq!(x.len(), 2);
    let sum = omega_from_wavelength(x[0]) + omega_from_wavelength(x[1]);
    assert!((sum - wp).abs() / wp > 1e-3, "noncollinear crossings are not conjugate");
    let pair = collinear_wavelengths(&c, t, wp, range, 4000).unwrap();
    assert_eq!(pair.len(), 2);
    let sum = omega_from_wavelength(pair[0]) + omega_from_wavelength(pair[1]);
    assert!((sum - wp).abs() / wp < 1e-6);
    let branches = emission_angle_curve(t, &c, wp, range, 500).unwrap();
    assert!(!branches.is_empty());
    for p in branches.iter().flatten() {
        assert!(p.exterior >= 0.0 && p.interior >= 0.0);
    }
}

#[test]
fn second_branch_of_nondegenerate_carriers() {
    let c = crystal();
    let b = second_branch(&c, &nn()).unwrap();
    let (s, i) = (b.signal_arm.unwrap() * 1e9, b.idler_arm.unwrap() * 1e9);
    assert!((s - 574.76).abs() < 0.05, "{s}");
    assert!((i - 816.46).abs() < 0.05, "{i}");
    let cn = solve(Preset::CollinearNondegenerate, 850e-9, Constraint::Collinear);
    let b = second_branch(&c, &cn).unwrap();
    assert!((b.signal_arm.unwrap() * 1e9 - 609.6).abs() < 0.01);
    assert!((b.idler_arm.unwrap() * 1e9 - 850.0).abs() < 0.01);
    assert_eq!(second_branch(&c, &nd()).unwrap(), SecondBranch::default());
}

proptest! {
    #[test]
    fn fixed_tilt_geometry_phase_matches(tilt_deg in 138.0f64..142.2, signal_nm in 650.0f64..800.0) {
        let c = crystal();
        let wp = omega_from_wavelength(PUMP);
        let ws = omega_from_wavelength(signal_nm * 1e-9);
        if let Ok(g) = geometry_at_tilt(&c, tilt_deg.to_radians(), ws, wp) {
            let dk = phase_mismatch(&g, &c, ws).unwrap();
            prop_assert!(dk.dk_y.abs() < 1e-6 && dk.dk_z.abs() < 1e-6, "{:?}", dk);
            prop_assert!((g.omega_s0 + g.omega_i0 - wp).abs() <= 1e-15 * wp);
        }
    }

    #[test]
    fn snell_round_trips(theta in 0.0f64..0.5, n in 1.0f64..2.2) {
        if let Ok(e) = exterior_angle(theta, n) {
            prop_assert!((interior_angle(e, n).unwrap() - theta).abs() < 1e-12);
        }
    }

    #[test]
    fn mismatch_is_antisymmetric_about_degeneracy(offset in 0.0f64..0.05) {
        let c = crystal();
        let g = nd();
        let d = offset * g.omega_s0;
        let a = phase_mismatch(&g, &c, g.omega_s0 + d).unwrap();
        let b = phase_mismatch(&g, &c, g.omega_s0 - d).unwrap();
        prop_assert!((a.dk_y + b.dk_y).abs() <= 1e-9 * a.dk_y.abs().max(1.0));
        prop_assert!((a.dk_z - b.dk_z).abs() <= 1e-9 * a.dk_z.abs().max(1.0));
    }
}
