use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use sha2::{Digest, Sha256};

use spdc::cli::config::{FilterSpec, OutputFormat, ScenarioConfig, SweepSpec};
use spdc::cli::{load_config, run_scenario, write_outputs};
use spdc::dispersion::DispersionSet;
use spdc::phasematch::Preset;
use spdc::{Error, Result};

/// Photon-pair and singles rates and heralding efficiency for type-I SPDC.
#[derive(Debug, Parser)]
#[command(name = "spdc", disable_version_flag = true)]
struct Args {
    /// collinear-degenerate, noncollinear-degenerate, collinear-nondegenerate or noncollinear-nondegenerate
    #[arg(long)]
    preset: Option<String>,
    /// TOML scenario file; flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long = "theta-p-deg")]
    theta_p_deg: Option<f64>,
    #[arg(long = "exterior-angle-deg")]
    exterior_angle_deg: Option<f64>,
    /// Pump, signal and idler waists in um: P,S,I
    #[arg(long = "waists-um")]
    waists_um: Option<String>,
    /// top-hat:CENTER_NM:WIDTH_NM, long-pass:EDGE_NM or short-pass:EDGE_NM,
    /// optionally prefixed with signal@ or idler@; repeatable
    #[arg(long)]
    filter: Vec<String>,
    /// PARAM:START:STOP:STEPS with PARAM filter-width (rad/s), waist-scale or pump-waist-um
    #[arg(long)]
    sweep: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or json
    #[arg(long)]
    format: Option<String>,
    #[arg(long = "mode-truncation")]
    mode_truncation: Option<usize>,
    /// Worker threads for spectra and sweeps
    #[arg(long)]
    jobs: Option<usize>,
    /// Print tool and dispersion-data checksums
    #[arg(long)]
    version: bool,
}

fn parse_waists(s: &str) -> Result<[f64; 3]> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::config("waists_um", format!("`{s}` is not P,S,I")))?;
    v.try_into()
        .map_err(|_| Error::config("waists_um", format!("`{s}` needs exactly three values")))
}

fn build_config(args: &Args) -> Result<ScenarioConfig> {
    let mut cfg = match (&args.config, &args.preset) {
        (Some(path), _) => load_config(path)?,
        (None, Some(p)) => ScenarioConfig::preset(p.parse()?),
        (None, None) => return Err(Error::config("preset", "give --preset or --config")),
    };
    if let Some(p) = &args.preset {
        let p: Preset = p.parse()?;
        if p != cfg.preset {
            cfg.preset = p;
            cfg.signal_nm = None;
            cfg.theta_p_deg = None;
            cfg.exterior_angle_deg = None;
        }
    }
    match (args.theta_p_deg, args.exterior_angle_deg) {
        (Some(_), Some(_)) => {
            return Err(Error::config(
                "theta_p_deg",
                "give either --theta-p-deg or --exterior-angle-deg, not both",
            ))
        }
        (Some(t), None) => {
            cfg.theta_p_deg = Some(t);
            cfg.exterior_angle_deg = None;
        }
        (None, Some(e)) => {
            cfg.exterior_angle_deg = Some(e);
            cfg.theta_p_deg = None;
        }
        (None, None) => {}
    }
    if let Some(w) = &args.waists_um {
        cfg.waists_um = Some(parse_waists(w)?);
    }
    if !args.filter.is_empty() {
        cfg.filters = args.filter.iter().map(|f| f.parse::<FilterSpec>()).collect::<Result<_>>()?;
    }
    if let Some(s) = &args.sweep {
        cfg.sweep = Some(s.parse::<SweepSpec>()?);
    }
    if let Some(o) = &args.out {
        cfg.out_dir = Some(o.clone());
    }
    if let Some(f) = &args.format {
        cfg.format = f.parse::<OutputFormat>()?;
    }
    if let Some(n) = args.mode_truncation {
        cfg.mode_truncation = n;
    }
    cfg.resolve()
}

fn print_version() -> Result<()> {
    let exe = std::env::current_exe().map_err(|e| Error::io("<current exe>", e))?;
    let bytes = std::fs::read(&exe).map_err(|e| Error::io(&exe, e))?;
    let d = DispersionSet::bibo();
    println!("{} {}", env!("CARGO_PKG_NAME"), env!("CARGO_PKG_VERSION"));
    println!("tool sha256 {}", hex::encode(Sha256::digest(&bytes)));
    println!("dispersion {} v{} sha256 {}", d.material, d.version, d.checksum);
    Ok(())
}

fn run(args: &Args) -> Result<()> {
    if args.version {
        return print_version();
    }
    let cfg = build_config(args)?;
    let work = || -> Result<()> {
        let out = run_scenario(&cfg)?;
        let dir = cfg.out_dir.clone().unwrap_or_else(|| PathBuf::from("out"));
        let report = write_outputs(&out, &dir, cfg.format)?;
        for w in &report.warnings {
            eprintln!("warning: {w}");
        }
        let r = &report.rates;
        println!(
            "{}: theta_p {:.4} deg, R {:.6e} Hz, Rs {:.6e} Hz, Ri {:.6e} Hz, eta {:.6}",
            cfg.preset, report.geometry.theta_p_deg, r.joint_rate_hz, r.signal_singles_hz, r.idler_singles_hz, r.heralding_efficiency
        );
        println!("wrote {} files to {}", report.manifest.len() + 1, dir.display());
        Ok(())
    };
    match args.jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::config("jobs", e.to_string()))?
            .install(work),
        None => work(),
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
