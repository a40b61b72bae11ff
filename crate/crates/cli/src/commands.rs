//! The four commands: verify, decompose, simulate, scan.
//!
//! Every command is deterministic given its resolved configuration (seeds
//! included); re-running writes byte-identical files.

use crate::config::{CommandKind, GaugeCfg, InitCfg, MinimizeCfg, OutputFormat, Resolved};
use hyperspin_core::{
    continuum_scan, build_lattice, constraint_residuals, decompose_config, frame_residuals,
    heisenberg_energy, identity_suite, io, judge_conventions, max_exact_residual, metropolis_run,
    minimize, nude_chirality_map, random_config, reference_config, slope_from_rows,
    ConventionVerdict, CouplingConstant, Error, FieldMap, FieldRecords, GaugeField, Lattice,
    LatticeKind, McOptions, MinimizeOptions, ResidualReport, Result, SpinConfiguration,
};
use serde::Serialize;
use std::fs;
use std::path::Path;
use std::sync::Arc;

/// Command outcome mapped to the exit-code contract: 0 success,
/// 1 verification failure (config errors surface as `Err` and exit 2).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Success,
    VerificationFailure,
}

fn write_text(dir: &Path, name: &str, text: &str) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(name), text)?;
    Ok(())
}

fn write_report(resolved: &Resolved, stem: &str, report: &ResidualReport) -> Result<()> {
    match resolved.format {
        OutputFormat::Csv => {
            write_text(&resolved.out_dir, &format!("{stem}.csv"), &io::residual_report_csv(report))?
        }
        OutputFormat::Json => {
            let mut text = serde_json::to_string_pretty(report)?;
            text.push('\n');
            write_text(&resolved.out_dir, &format!("{stem}.json"), &text)?
        }
    }
    write_text(
        &resolved.out_dir,
        &format!("{stem}_summary.json"),
        &io::residual_report_summary_json(report),
    )
}

#[derive(Serialize)]
struct KindVerifySummary {
    kind: LatticeKind,
    samples: usize,
    max_exact_residual_canonical: f64,
    max_exact_residual_gauged: f64,
    conventions: Vec<ConventionVerdict>,
    pass: bool,
}

#[derive(Serialize)]
struct VerifySummary {
    tolerance: f64,
    seed: u64,
    kinds: Vec<KindVerifySummary>,
    pass: bool,
}

/// Runs the brute-force identity, gauge, and round-trip suites for every
/// lattice kind and judges the side-by-side conventions.
pub fn run_verify(resolved: &Resolved) -> Result<Outcome> {
    let mut kinds = Vec::new();
    let mut all_pass = true;
    for (offset, kind) in
        [LatticeKind::Chain, LatticeKind::Triangular, LatticeKind::Square].iter().enumerate()
    {
        let base = resolved.seed.wrapping_add(100 * offset as u64);
        let canonical = identity_suite(*kind, resolved.samples, base, None);
        let gauged =
            identity_suite(*kind, resolved.samples, base.wrapping_add(1), Some(base.wrapping_add(2)));
        write_report(resolved, &format!("verify_{kind}_canonical"), &canonical)?;
        write_report(resolved, &format!("verify_{kind}_gauged"), &gauged)?;

        let exact_canonical = max_exact_residual(*kind, &canonical);
        let exact_gauged = max_exact_residual(*kind, &gauged);
        let verdicts = judge_conventions(*kind, &gauged, resolved.tolerance);
        let pass = exact_canonical <= resolved.tolerance
            && exact_gauged <= resolved.tolerance
            && verdicts.iter().all(|v| v.exactly_one_closes);
        all_pass &= pass;

        println!(
            "verify {kind}: max residual {:.3e} (canonical) / {:.3e} (gauged) -> {}",
            exact_canonical,
            exact_gauged,
            if pass { "ok" } else { "FAIL" }
        );
        if !pass {
            for name in hyperspin_core::suite_exact_names(*kind) {
                let m = canonical.max_residual(name).max(gauged.max_residual(name));
                if m > resolved.tolerance {
                    println!("  {name}: max residual {m:.3e} above tolerance {:.1e}", resolved.tolerance);
                }
            }
            for v in &verdicts {
                if !v.exactly_one_closes {
                    println!(
                        "  convention pair {} / {}: max {:.3e} / {:.3e}",
                        v.variant_a, v.variant_b, v.max_a, v.max_b
                    );
                }
            }
        }
        for v in &verdicts {
            println!(
                "  convention {} vs {}: closing = {}",
                v.variant_a,
                v.variant_b,
                v.closing.as_deref().unwrap_or("neither")
            );
        }
        kinds.push(KindVerifySummary {
            kind: *kind,
            samples: resolved.samples,
            max_exact_residual_canonical: exact_canonical,
            max_exact_residual_gauged: exact_gauged,
            conventions: verdicts,
            pass,
        });
    }
    let summary =
        VerifySummary { tolerance: resolved.tolerance, seed: resolved.seed, kinds, pass: all_pass };
    let mut text = serde_json::to_string_pretty(&summary)?;
    text.push('\n');
    write_text(&resolved.out_dir, "verify_summary.json", &text)?;
    Ok(if all_pass { Outcome::Success } else { Outcome::VerificationFailure })
}

fn required_lattice(resolved: &Resolved) -> Result<Arc<Lattice>> {
    let spec = resolved
        .config
        .lattice
        .as_ref()
        .ok_or_else(|| Error::Config("a lattice section is required".into()))?;
    Ok(Arc::new(build_lattice(spec)?))
}

fn required_nu(resolved: &Resolved) -> Result<f64> {
    resolved
        .config
        .spin
        .as_ref()
        .ok_or_else(|| Error::Config("a spin section is required".into()))?
        .nu()
}

fn initial_config(
    resolved: &Resolved,
    lattice: Arc<Lattice>,
    nu: f64,
) -> Result<SpinConfiguration> {
    let init = resolved.config.init.clone().unwrap_or(InitCfg::Random);
    match init.family() {
        None => Ok(random_config(lattice, nu, resolved.seed)),
        Some(family) => reference_config(lattice, nu, &family),
    }
}

fn gauge_for(resolved: &Resolved, count: usize) -> GaugeField {
    match resolved.config.gauge.clone().unwrap_or_default() {
        GaugeCfg::Canonical => GaugeField::canonical(count),
        GaugeCfg::Random { seed } => GaugeField::random(count, seed),
    }
}

fn write_field_outputs(
    resolved: &Resolved,
    config: &SpinConfiguration,
    map: &FieldMap,
    gauge: &GaugeField,
) -> Result<()> {
    write_text(&resolved.out_dir, "lattice.json", &io::lattice_json(&config.lattice))?;
    write_text(&resolved.out_dir, "spins.json", &io::spin_config_json(config))?;
    match resolved.format {
        OutputFormat::Csv => {
            write_text(&resolved.out_dir, "fields.csv", &io::field_map_csv(map))?
        }
        OutputFormat::Json => {
            write_text(&resolved.out_dir, "fields.json", &io::field_map_json(map))?
        }
    }
    let constraints = constraint_residuals(config, gauge, resolved.parallel)?;
    write_report(resolved, "constraints", &constraints)?;
    if config.lattice.spec.kind != LatticeKind::Chain {
        let frame = frame_residuals(map)?;
        write_report(resolved, "frame", &frame)?;
    }
    let nude = nude_chirality_map(config)?;
    let mut csv = String::from("hyper_site,nude_chi\n");
    for (p, v) in nude.iter().enumerate() {
        csv.push_str(&format!("{p},{}\n", io::fmt_f64(*v)));
    }
    write_text(&resolved.out_dir, "nude_chirality.csv", &csv)?;
    Ok(())
}

/// Builds the configured state, decomposes it, and writes the field map with
/// its residual reports.
pub fn run_decompose(resolved: &Resolved) -> Result<Outcome> {
    let lattice = required_lattice(resolved)?;
    let nu = required_nu(resolved)?;
    let config = initial_config(resolved, lattice.clone(), nu)?;
    let gauge = gauge_for(resolved, lattice.hyper_sites.len());
    let map = decompose_config(&config, &gauge, resolved.parallel)?;
    write_field_outputs(resolved, &config, &map, &gauge)?;
    println!(
        "decompose {}: {} hyper-sites written to {}",
        lattice.spec.kind,
        map.records.len(),
        resolved.out_dir.display()
    );
    Ok(Outcome::Success)
}

fn mean_order_norm(map: &FieldMap) -> f64 {
    let norms: Vec<f64> = match &map.records {
        FieldRecords::Chain(records) => records.iter().map(|f| f.n.norm()).collect(),
        FieldRecords::Tri(records) => records.iter().map(|f| f.n.herm_norm2().sqrt()).collect(),
        FieldRecords::Square(records) => records.iter().map(|f| f.n.norm()).collect(),
    };
    hyperspin_core::report::pairwise_sum(&norms) / norms.len().max(1) as f64
}

#[derive(Serialize)]
struct SimulateSummary {
    kind: LatticeKind,
    sites: usize,
    coupling: f64,
    nu: f64,
    converged: Option<bool>,
    restarts: Option<usize>,
    minimize_sweeps: Option<usize>,
    metropolis_sweeps: Option<usize>,
    energy: f64,
    energy_per_site: f64,
    mean_order_norm: f64,
    max_nude_chirality: f64,
}

/// Builds the lattice, initializes the state, runs the configured dynamics,
/// and writes the final configuration, traces, fields, and reports.
pub fn run_simulate(resolved: &Resolved) -> Result<Outcome> {
    let lattice = required_lattice(resolved)?;
    let nu = required_nu(resolved)?;
    let coupling = CouplingConstant::new(resolved.config.coupling.unwrap_or(1.0))?;

    let mut config = initial_config(resolved, lattice.clone(), nu)?;
    let mut converged = None;
    let mut restarts_used = None;
    let mut minimize_sweeps = None;

    if let Some(min_cfg) = resolved.config.minimize {
        let MinimizeCfg { max_sweeps, energy_tol, restarts } = min_cfg;
        let restarts = restarts.max(1);
        let mut best: Option<(f64, SpinConfiguration, bool, usize, Vec<f64>)> = None;
        for r in 0..restarts {
            let seed = resolved.seed.wrapping_add(r as u64);
            let mut candidate = match resolved.config.init.clone().unwrap_or(InitCfg::Random) {
                InitCfg::Random => random_config(lattice.clone(), nu, seed),
                other => reference_config(
                    lattice.clone(),
                    nu,
                    &other.family().expect("non-random family"),
                )?,
            };
            let opts = MinimizeOptions { max_sweeps, energy_tol, rng_seed: seed };
            let outcome = minimize(&mut candidate, coupling, &opts)?;
            let energy = outcome.final_energy();
            if best.as_ref().is_none_or(|(e, ..)| energy < *e) {
                best = Some((
                    energy,
                    candidate,
                    outcome.converged,
                    outcome.sweeps_run,
                    outcome.energy_trace,
                ));
            }
        }
        let (_, winner, conv, sweeps, trace) = best.expect("at least one restart");
        config = winner;
        converged = Some(conv);
        restarts_used = Some(restarts);
        minimize_sweeps = Some(sweeps);
        write_text(&resolved.out_dir, "minimize_trace.csv", &io::minimize_trace_csv(&trace))?;
    }

    let mut metropolis_sweeps = None;
    if let Some(mc_cfg) = resolved.config.metropolis {
        let opts = McOptions {
            beta: mc_cfg.beta,
            sweeps: mc_cfg.sweeps,
            proposal_angle: mc_cfg.proposal_angle,
            rng_seed: resolved.seed,
        };
        let outcome = metropolis_run(&mut config, coupling, &opts)?;
        metropolis_sweeps = Some(mc_cfg.sweeps);
        write_text(
            &resolved.out_dir,
            "metropolis_trace.csv",
            &io::metropolis_trace_csv(&outcome.energy_trace, &outcome.acceptance),
        )?;
    }

    let gauge = gauge_for(resolved, lattice.hyper_sites.len());
    let map = decompose_config(&config, &gauge, resolved.parallel)?;
    write_field_outputs(resolved, &config, &map, &gauge)?;

    let energy = heisenberg_energy(&config, coupling);
    let nude = nude_chirality_map(&config)?;
    let summary = SimulateSummary {
        kind: lattice.spec.kind,
        sites: lattice.num_sites(),
        coupling: coupling.get(),
        nu,
        converged,
        restarts: restarts_used,
        minimize_sweeps,
        metropolis_sweeps,
        energy,
        energy_per_site: energy / lattice.num_sites() as f64,
        mean_order_norm: mean_order_norm(&map),
        max_nude_chirality: nude.iter().fold(0.0f64, |m, v| m.max(v.abs())),
    };
    let mut text = serde_json::to_string_pretty(&summary)?;
    text.push('\n');
    write_text(&resolved.out_dir, "summary.json", &text)?;
    println!(
        "simulate {}: energy/site {:.9}, mean |n| {:.6}",
        lattice.spec.kind, summary.energy_per_site, summary.mean_order_norm
    );
    Ok(Outcome::Success)
}

#[derive(Serialize)]
struct ScanSummary {
    kind: LatticeKind,
    extent: Vec<usize>,
    kappa: f64,
    points: usize,
    slope: f64,
}

/// Runs the step-shrinking scan and fits the log-log slope of the
/// normalization deficit.
pub fn run_scan(resolved: &Resolved) -> Result<Outcome> {
    let scan_cfg = resolved
        .config
        .scan
        .as_ref()
        .ok_or_else(|| Error::Config("a scan section is required".into()))?;
    let schedule = scan_cfg.schedule()?;
    let rows = continuum_scan(scan_cfg.kind, &scan_cfg.extent, &schedule)?;
    // the table lands on disk even when the fit below is degenerate
    write_text(&resolved.out_dir, "scan.csv", &io::scan_csv(&rows))?;
    let slope = slope_from_rows(&rows)?;
    let summary = ScanSummary {
        kind: scan_cfg.kind,
        extent: scan_cfg.extent.clone(),
        kappa: scan_cfg.kappa,
        points: rows.len(),
        slope,
    };
    let mut text = serde_json::to_string_pretty(&summary)?;
    text.push('\n');
    write_text(&resolved.out_dir, "scan_summary.json", &text)?;
    println!("scan {}: slope {:.4} over {} points", scan_cfg.kind, slope, rows.len());
    Ok(Outcome::Success)
}

/// Dispatches a resolved configuration to its command.
pub fn run(kind: CommandKind, resolved: &Resolved) -> Result<Outcome> {
    match kind {
        CommandKind::Verify => run_verify(resolved),
        CommandKind::Decompose => run_decompose(resolved),
        CommandKind::Simulate => run_simulate(resolved),
        CommandKind::Scan => run_scan(resolved),
    }
}
