//! Shared scenario builders for the integration tests.
#![allow(dead_code)]

use spdc::cli::config::{FilterShape, FilterSpec, ScenarioConfig, LOOSE_WAISTS_UM, TIGHT_WAISTS_UM};
use spdc::cli::scenario::{build_model, quad_options};
use spdc::phasematch::Preset;
use spdc::rates::{heralding_efficiency, RateReport, SourceModel};

pub const CD: Preset = Preset::CollinearDegenerate;
pub const ND: Preset = Preset::NoncollinearDegenerate;
pub const CN: Preset = Preset::CollinearNondegenerate;
pub const NN: Preset = Preset::NoncollinearNondegenerate;

pub fn config(preset: Preset, waists_um: [f64; 3], filters: Vec<FilterSpec>) -> ScenarioConfig {
    let mut c = ScenarioConfig::preset(preset);
    c.waists_um = Some(waists_um);
    c.filters = filters;
    c.resolve().expect("valid scenario")
}

pub fn loose(preset: Preset) -> ScenarioConfig {
    config(preset, LOOSE_WAISTS_UM, Vec::new())
}

pub fn tight(preset: Preset) -> ScenarioConfig {
    config(preset, TIGHT_WAISTS_UM, Vec::new())
}

pub fn top_hat_nm(width_nm: f64) -> FilterSpec {
    FilterSpec {
        arm: Default::default(),
        shape: FilterShape::TopHat {
            center_nm: None,
            width_nm: Some(width_nm),
            width_rad_s: None,
        },
        peak: 1.0,
    }
}

pub fn top_hat_rad_s(width: f64) -> FilterSpec {
    FilterSpec {
        arm: Default::default(),
        shape: FilterShape::TopHat {
            center_nm: None,
            width_nm: None,
            width_rad_s: Some(width),
        },
        peak: 1.0,
    }
}

/// Long-pass in the signal arm and short-pass in the idler arm.
pub fn edge_filters(signal_long_pass_nm: f64, idler_short_pass_nm: f64) -> Vec<FilterSpec> {
    vec![
        format!("signal@long-pass:{signal_long_pass_nm}").parse().unwrap(),
        format!("idler@short-pass:{idler_short_pass_nm}").parse().unwrap(),
    ]
}

pub fn model(cfg: &ScenarioConfig) -> SourceModel {
    build_model(cfg).expect("model")
}

pub fn rates(cfg: &ScenarioConfig) -> RateReport {
    let m = model(cfg);
    heralding_efficiency(&m, &cfg.filter_pair(&m.geometry), &quad_options()).expect("rates")
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}
