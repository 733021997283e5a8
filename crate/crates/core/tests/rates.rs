mod common;

use common::*;
use proptest::prelude::*;
use spdc::cli::config::LOOSE_WAISTS_UM;
use spdc::cli::scenario::quad_options;
use spdc::numerics::quad::QuadOptions;
use spdc::rates::*;
use spdc::Arm;

#[test]
fn bandwidth_of_20_nm_at_710_nm() {
    let approx = bandwidth_nm_to_angular(710e-9, 20e-9);
    assert!(rel(approx, 7.46e13) < 0.005, "{approx:e}");
    let exact = bandwidth_exact(710e-9, 20e-9);
    assert!(rel(exact, approx) < 0.005);
}

#[test]
fn filter_shapes() {
    let th = SpectralFilter::TopHat {
        center: 1.0,
        full_width: 0.5,
        peak: 0.9,
    };
    assert_eq!(filter_transmission(&th, 1.25), 0.9);
    assert_eq!(filter_transmission(&th, 0.75), 0.9);
    assert_eq!(filter_transmission(&th, 1.25 + 1e-12), 0.0);
    let lp = SpectralFilter::LongPass { edge: 2.0, peak: 1.0 };
    assert_eq!(filter_transmission(&lp, 1.5), 1.0);
    assert_eq!(filter_transmission(&lp, 2.5), 0.0);
    let sp = SpectralFilter::ShortPass { edge: 2.0, peak: 1.0 };
    assert_eq!(filter_transmission(&sp, 2.5), 1.0);
    assert_eq!(filter_transmission(&sp, 1.5), 0.0);
    let tab = SpectralFilter::Tabulated {
        omega: vec![1.0, 2.0, 4.0],
        transmission: vec![0.0, 1.0, 0.5],
    };
    assert_eq!(filter_transmission(&tab, 1.5), 0.5);
    assert_eq!(filter_transmission(&tab, 3.0), 0.75);
    assert_eq!(filter_transmission(&tab, 0.5), 0.0);
    assert_eq!(filter_transmission(&tab, 4.5), 0.0);
    assert!(SpectralFilter::TopHat {
        center: 1.0,
        full_width: -1.0,
        peak: 1.0
    }
    .validate()
    .is_err());
    assert!(SpectralFilter::LongPass { edge: 1.0, peak: 1.5 }.validate().is_err());
}

#[test]
fn rates_are_linear_in_power_and_efficiencies() {
    let base = loose(NN);
    let r0 = rates(&base);
    let mut c = base.clone();
    c.pump_power_mw = 3.0;
    c.path_efficiency = [0.5, 0.8];
    let r1 = rates(&c);
    assert!(rel(r1.joint_rate_hz, 3.0 * 0.4 * r0.joint_rate_hz) < 1e-12);
    assert!(rel(r1.signal_singles_hz, 3.0 * 0.5 * r0.signal_singles_hz) < 1e-12);
    assert!(rel(r1.idler_singles_hz, 3.0 * 0.8 * r0.idler_singles_hz) < 1e-12);
    assert!(rel(r1.heralding_efficiency, 0.4f64.sqrt() * r0.heralding_efficiency) < 1e-12);
}

#[test]
fn degenerate_arms_are_equal() {
    for preset in [CD, ND] {
        let m = model(&loose(preset));
        let wp = m.geometry.omega_p;
        let (lo, hi) = m.window().unwrap();
        for j in 0..11 {
            let w = lo + (hi - lo) * j as f64 / 10.0;
            let a = m.densities(w).unwrap();
            let b = m.densities(wp - w).unwrap();
            assert!(rel(a.singles_idler, b.singles_signal) < 1e-9 || a.singles_idler < 1e-300);
            assert!(rel(a.joint, b.joint) < 1e-9 || a.joint < 1e-300);
        }
        let r = rates(&loose(preset));
        assert!(rel(r.signal_singles_hz, r.idler_singles_hz) < 1e-9);
    }
}

#[test]
fn singles_bound_the_joint_rate() {
    for preset in [CD, ND, CN, NN] {
        let m = model(&loose(preset));
        let (lo, hi) = m.window().unwrap();
        for j in 0..41 {
            let d = m.densities(lo + (hi - lo) * j as f64 / 40.0).unwrap();
            assert!(d.singles_signal >= d.joint * (1.0 - 1e-12));
            assert!(d.singles_idler >= d.joint * (1.0 - 1e-12));
        }
    }
}

#[test]
fn zero_width_filter_gives_zero() {
    let r = rates(&config(ND, LOOSE_WAISTS_UM, vec![top_hat_rad_s(0.0)]));
    assert_eq!(r.joint_rate_hz, 0.0);
    assert_eq!(r.heralding_efficiency, 0.0);
}

#[test]
fn wide_filter_saturates() {
    let open = rates(&loose(NN));
    let (a, b) = (
        rates(&config(NN, LOOSE_WAISTS_UM, vec![top_hat_rad_s(6e14)])),
        rates(&config(NN, LOOSE_WAISTS_UM, vec![top_hat_rad_s(8e14)])),
    );
    assert!(rel(b.joint_rate_hz, a.joint_rate_hz) < 1e-3);
    assert!(rel(b.joint_rate_hz, open.joint_rate_hz) < 1e-3);
}

#[test]
fn separate_and_shared_integrals_agree() {
    let cfg = config(ND, LOOSE_WAISTS_UM, vec![top_hat_nm(23.0)]);
    let m = model(&cfg);
    let f = cfg.filter_pair(&m.geometry);
    let opts = quad_options();
    let shared = heralding_efficiency(&m, &f, &opts).unwrap();
    let r = total_joint_rate(&m, &f, &opts).unwrap();
    let s = total_singles_rate(&m, Arm::Signal, &f.signal, &opts).unwrap();
    let i = total_singles_rate(&m, Arm::Idler, &f.idler, &opts).unwrap();
    assert!(rel(r.value, shared.joint_rate_hz) < 1e-7);
    assert!(rel(s.value, shared.signal_singles_hz) < 1e-7);
    assert!(rel(i.value, shared.idler_singles_hz) < 1e-7);
    assert!(r.error <= 1e-6 * r.value);
}

#[test]
fn node_doubling_is_self_consistent() {
    for cfg in [loose(CD), loose(NN), config(NN, LOOSE_WAISTS_UM, edge_filters(785.0, 650.0))] {
        let m = model(&cfg);
        let f = cfg.filter_pair(&m.geometry);
        let a = heralding_efficiency(&m, &f, &quad_options()).unwrap();
        let b = heralding_efficiency(
            &m,
            &f,
            &QuadOptions {
                initial_panels: 32,
                rel_tol: 1e-10,
                ..quad_options()
            },
        )
        .unwrap();
        assert!(rel(b.joint_rate_hz, a.joint_rate_hz) < 1e-7);
        assert!(rel(b.signal_singles_hz, a.signal_singles_hz) < 1e-7);
    }
}

#[test]
fn degenerate_noncollinear_spectrum_peaks_at_half_pump() {
    let m = model(&loose(ND));
    let w = m.window().unwrap();
    let s = spectra(&m, w, 2001, "").unwrap();
    let (at, _) = s.joint.peak();
    let step = (w.1 - w.0) / 2000.0;
    assert!((at - 0.5 * m.geometry.omega_p).abs() <= step);
}

#[test]
fn tight_focusing_raises_peak_density_about_threefold() {
    let peak = |cfg| {
        let m = model(&cfg);
        m.joint_spectral_rate(m.geometry.omega_s0).unwrap()
    };
    let r = peak(tight(ND)) / peak(loose(ND));
    assert!((r - 3.0).abs() <= 0.6, "{r}");
}

#[test]
fn tight_focusing_raises_rate_and_efficiency() {
    let (l, t) = (rates(&loose(ND)), rates(&tight(ND)));
    assert!(t.joint_rate_hz > l.joint_rate_hz);
    assert!(t.heralding_efficiency > l.heralding_efficiency);
}

#[test]
fn narrow_filter_pushes_tight_degenerate_efficiency_past_ninety_percent() {
    let narrow = rates(&config(ND, spdc::cli::config::TIGHT_WAISTS_UM, vec![top_hat_rad_s(2e13)]));
    let open = rates(&tight(ND));
    assert!(narrow.heralding_efficiency > 0.9);
    assert!(open.heralding_efficiency < 0.9);
}

#[test]
fn twenty_nm_filter_on_tight_nondegenerate_source() {
    // 20 nm at 710 nm, applied as one angular width to both arms
    let width = bandwidth_nm_to_angular(710e-9, 20e-9);
    let waists = spdc::cli::config::TIGHT_WAISTS_UM;
    let open = rates(&config(NN, waists, vec![]));
    let f = rates(&config(NN, waists, vec![top_hat_rad_s(width)]));
    assert!(f.heralding_efficiency > 0.9, "{}", f.heralding_efficiency);
    assert!(rel(f.joint_rate_hz, open.joint_rate_hz) < 0.05);
}

#[test]
fn spectra_report_the_truncation_increment() {
    let r = rates(&loose(ND));
    assert!(r.truncation_warning());
    assert!(r.signal_truncation_increment > 0.0);
    let r = rates(&config(ND, LOOSE_WAISTS_UM, vec![top_hat_nm(23.0)]));
    assert!(!r.truncation_warning());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn efficiency_is_bounded(
        scale in 0.5f64..1.6,
        width in 5e12f64..3e14,
        preset in prop::sample::select(vec![CD, ND, CN, NN]),
    ) {
        let w = LOOSE_WAISTS_UM.map(|x| x * scale);
        for filters in [vec![], vec![top_hat_rad_s(width)]] {
            let r = rates(&config(preset, w, filters));
            prop_assert!(r.heralding_efficiency >= 0.0 && r.heralding_efficiency <= 1.0 + 1e-3, "{}", r.heralding_efficiency);
        }
    }

    #[test]
    fn widening_a_filter_never_lowers_r_or_raises_eta(
        width in 5e12f64..2e14,
        factor in 1.05f64..3.0,
        preset in prop::sample::select(vec![ND, NN]),
    ) {
        let a = rates(&config(preset, LOOSE_WAISTS_UM, vec![top_hat_rad_s(width)]));
        let b = rates(&config(preset, LOOSE_WAISTS_UM, vec![top_hat_rad_s(width * factor)]));
        prop_assert!(b.joint_rate_hz >= a.joint_rate_hz * (1.0 - 1e-9));
        prop_assert!(b.heralding_efficiency <= a.heralding_efficiency * (1.0 + 1e-9));
    }
}
