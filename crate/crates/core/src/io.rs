//! File formats: JSON with stable key order, CSV with '.' decimals, LF line
//! endings, fixed column order, and 17-significant-digit floats so every
//! value survives a write/read round trip bit for bit.

use crate::decompose::{FieldMap, FieldRecords};
use crate::error::{Error, Result};
use crate::lattice::{build_lattice, Lattice, LatticeKind, LatticeSpec};
use crate::report::ResidualReport;
use crate::scaling::ScanRow;
use crate::spin::SpinConfiguration;
use crate::vec3::Vec3;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Full round-trip precision float formatting (17 significant digits).
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Lattice file: {"kind", "extent", "step", "sites", "bonds", "hyper_sites"};
/// chain sites carry one coordinate, planar lattices two.
#[derive(Serialize)]
struct LatticeFile<'a> {
    kind: LatticeKind,
    extent: &'a [usize],
    step: f64,
    sites: Vec<Vec<f64>>,
    bonds: &'a [(usize, usize)],
    hyper_sites: &'a [Vec<usize>],
}

pub fn lattice_json(lattice: &Lattice) -> String {
    let dim = lattice.spec.kind.dimension();
    let file = LatticeFile {
        kind: lattice.spec.kind,
        extent: &lattice.spec.extent,
        step: lattice.spec.step,
        sites: lattice.site_positions.iter().map(|p| p[..dim].to_vec()).collect(),
        bonds: &lattice.bonds,
        hyper_sites: &lattice.hyper_sites,
    };
    let mut out = serde_json::to_string_pretty(&file).expect("lattice serialization");
    out.push('\n');
    out
}

/// Spin configuration file, in site order.
#[derive(Serialize, Deserialize)]
struct SpinFile {
    lattice_spec: LatticeSpec,
    nu: f64,
    seed: Option<u64>,
    spins: Vec<[f64; 3]>,
}

pub fn spin_config_json(config: &SpinConfiguration) -> String {
    let file = SpinFile {
        lattice_spec: config.lattice.spec.clone(),
        nu: config.nu,
        seed: config.seed,
        spins: config.spins.iter().map(|s| s.0).collect(),
    };
    let mut out = serde_json::to_string_pretty(&file).expect("spin serialization");
    out.push('\n');
    out
}

/// Reads a spin configuration file and rebuilds its lattice.
pub fn spin_config_from_json(text: &str) -> Result<SpinConfiguration> {
    let file: SpinFile = serde_json::from_str(text)?;
    let lattice = Arc::new(build_lattice(&file.lattice_spec)?);
    if file.spins.len() != lattice.num_sites() {
        return Err(Error::SizeMismatch(format!(
            "{} spins for {} sites",
            file.spins.len(),
            lattice.num_sites()
        )));
    }
    Ok(SpinConfiguration {
        lattice,
        nu: file.nu,
        spins: file.spins.into_iter().map(Vec3).collect(),
        seed: file.seed,
    })
}

fn push_row(out: &mut String, cells: &[String]) {
    out.push_str(&cells.join(","));
    out.push('\n');
}

fn vec3_cells(v: Vec3) -> [String; 3] {
    [fmt_f64(v.0[0]), fmt_f64(v.0[1]), fmt_f64(v.0[2])]
}

/// Field map CSV. Column orders, fixed per kind:
/// chain:      hyper_site, n_{x,y,z}, l_{x,y,z}
/// triangular: hyper_site, gamma, n_re_*, n_im_*, l_*, nx_*, ny_*, nz_*,
///             chi, nude_chi
/// square:     hyper_site, gamma, n_*, d_re_*, d_im_*, l_*, nude_chi
pub fn field_map_csv(map: &FieldMap) -> String {
    let mut out = String::new();
    match &map.records {
        FieldRecords::Chain(records) => {
            push_row(
                &mut out,
                &"hyper_site,n_x,n_y,n_z,l_x,l_y,l_z"
                    .split(',')
                    .map(str::to_string)
                    .collect::<Vec<_>>(),
            );
            for (p, f) in records.iter().enumerate() {
                let mut cells = vec![p.to_string()];
                cells.extend(vec3_cells(f.n));
                cells.extend(vec3_cells(f.l));
                push_row(&mut out, &cells);
            }
        }
        FieldRecords::Tri(records) => {
            let header = "hyper_site,gamma,n_re_x,n_re_y,n_re_z,n_im_x,n_im_y,n_im_z,\
                          l_x,l_y,l_z,nx_x,nx_y,nx_z,ny_x,ny_y,ny_z,nz_x,nz_y,nz_z,chi,nude_chi";
            push_row(
                &mut out,
                &header.split(',').map(|s| s.trim().to_string()).collect::<Vec<_>>(),
            );
            for (p, f) in records.iter().enumerate() {
                let mut cells = vec![p.to_string(), fmt_f64(f.gamma)];
                cells.extend(vec3_cells(f.n.re));
                cells.extend(vec3_cells(f.n.im));
                cells.extend(vec3_cells(f.l));
                cells.extend(vec3_cells(f.nx));
                cells.extend(vec3_cells(f.ny));
                cells.extend(vec3_cells(f.nz));
                cells.push(fmt_f64(f.chi));
                cells.push(fmt_f64(f.nude_chi));
                push_row(&mut out, &cells);
            }
        }
        FieldRecords::Square(records) => {
            let header = "hyper_site,gamma,n_x,n_y,n_z,d_re_x,d_re_y,d_re_z,\
                          d_im_x,d_im_y,d_im_z,l_x,l_y,l_z,nude_chi";
            push_row(
                &mut out,
                &header.split(',').map(|s| s.trim().to_string()).collect::<Vec<_>>(),
            );
            for (p, f) in records.iter().enumerate() {
                let mut cells = vec![p.to_string(), fmt_f64(f.gamma)];
                cells.extend(vec3_cells(f.n));
                cells.extend(vec3_cells(f.d.re));
                cells.extend(vec3_cells(f.d.im));
                cells.extend(vec3_cells(f.l));
                cells.push(fmt_f64(f.nude_chi));
                push_row(&mut out, &cells);
            }
        }
    }
    out
}

#[derive(Serialize)]
struct ChainFieldJson {
    n: [f64; 3],
    l: [f64; 3],
}

#[derive(Serialize)]
struct TriFieldJson {
    gamma: f64,
    n_re: [f64; 3],
    n_im: [f64; 3],
    l: [f64; 3],
    nx: [f64; 3],
    ny: [f64; 3],
    nz: [f64; 3],
    chi: f64,
    nude_chi: f64,
}

#[derive(Serialize)]
struct SquareFieldJson {
    gamma: f64,
    n: [f64; 3],
    d_re: [f64; 3],
    d_im: [f64; 3],
    l: [f64; 3],
    nude_chi: f64,
}

#[derive(Serialize)]
#[serde(rename_all = "snake_case")]
enum FieldMapJson {
    Chain { nu: f64, records: Vec<ChainFieldJson> },
    Triangular { nu: f64, records: Vec<TriFieldJson> },
    Square { nu: f64, records: Vec<SquareFieldJson> },
}

pub fn field_map_json(map: &FieldMap) -> String {
    let body = match &map.records {
        FieldRecords::Chain(records) => FieldMapJson::Chain {
            nu: map.nu,
            records: records.iter().map(|f| ChainFieldJson { n: f.n.0, l: f.l.0 }).collect(),
        },
        FieldRecords::Tri(records) => FieldMapJson::Triangular {
            nu: map.nu,
            records: records
                .iter()
                .map(|f| TriFieldJson {
                    gamma: f.gamma,
                    n_re: f.n.re.0,
                    n_im: f.n.im.0,
                    l: f.l.0,
                    nx: f.nx.0,
                    ny: f.ny.0,
                    nz: f.nz.0,
                    chi: f.chi,
                    nude_chi: f.nude_chi,
                })
                .collect(),
        },
        FieldRecords::Square(records) => FieldMapJson::Square {
            nu: map.nu,
            records: records
                .iter()
                .map(|f| SquareFieldJson {
                    gamma: f.gamma,
                    n: f.n.0,
                    d_re: f.d.re.0,
                    d_im: f.d.im.0,
                    l: f.l.0,
                    nude_chi: f.nude_chi,
                })
                .collect(),
        },
    };
    let mut out = serde_json::to_string_pretty(&body).expect("field map serialization");
    out.push('\n');
    out
}

/// Residual report CSV: index column then one column per residual series.
pub fn residual_report_csv(report: &ResidualReport) -> String {
    let mut out = String::new();
    let mut header = vec![report.index_label.clone()];
    header.extend(report.entries.iter().map(|e| e.name.clone()));
    push_row(&mut out, &header);
    for row in 0..report.record_count() {
        let mut cells = vec![row.to_string()];
        cells.extend(report.entries.iter().map(|e| fmt_f64(e.values[row])));
        push_row(&mut out, &cells);
    }
    out
}

/// Residual report JSON summary: gauge, per-equation {max, mean, rms}, and
/// any structural violations.
pub fn residual_report_summary_json(report: &ResidualReport) -> String {
    #[derive(Serialize)]
    struct SummaryFile<'a> {
        gauge: &'a crate::report::GaugeDescriptor,
        equations: std::collections::BTreeMap<String, crate::report::Summary>,
        violations: &'a [crate::report::Violation],
    }
    let file = SummaryFile {
        gauge: &report.gauge,
        equations: report.summaries(),
        violations: &report.violations,
    };
    let mut out = serde_json::to_string_pretty(&file).expect("report serialization");
    out.push('\n');
    out
}

/// Scan CSV: k, step, s, nu, max_deficit, mean_deficit, frame_residual_max.
pub fn scan_csv(rows: &[ScanRow]) -> String {
    let mut out = String::new();
    push_row(
        &mut out,
        &"k,step,s,nu,max_deficit,mean_deficit,frame_residual_max"
            .split(',')
            .map(str::to_string)
            .collect::<Vec<_>>(),
    );
    for r in rows {
        push_row(
            &mut out,
            &[
                r.k.to_string(),
                fmt_f64(r.step),
                fmt_f64(r.s),
                fmt_f64(r.nu),
                fmt_f64(r.max_deficit),
                fmt_f64(r.mean_deficit),
                fmt_f64(r.frame_residual_max),
            ],
        );
    }
    out
}

/// Reads a scan CSV back; the inverse of `scan_csv`.
pub fn scan_from_csv(text: &str) -> Result<Vec<ScanRow>> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::Config("empty scan file".into()))?;
    if header != "k,step,s,nu,max_deficit,mean_deficit,frame_residual_max" {
        return Err(Error::Config(format!("unexpected scan header: {header}")));
    }
    let mut rows = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != 7 {
            return Err(Error::Config(format!(
                "scan line {} has {} fields, expected 7",
                lineno + 2,
                cells.len()
            )));
        }
        let field = |i: usize| -> Result<f64> {
            cells[i].parse::<f64>().map_err(|e| {
                Error::Config(format!("scan line {} field {}: {e}", lineno + 2, i + 1))
            })
        };
        rows.push(ScanRow {
            k: cells[0]
                .parse()
                .map_err(|e| Error::Config(format!("scan line {}: {e}", lineno + 2)))?,
            step: field(1)?,
            s: field(2)?,
            nu: field(3)?,
            max_deficit: field(4)?,
            mean_deficit: field(5)?,
            frame_residual_max: field(6)?,
        });
    }
    Ok(rows)
}

/// Energy trace CSV for minimization runs: sweep_index, energy.
pub fn minimize_trace_csv(trace: &[f64]) -> String {
    let mut out = String::from("sweep_index,energy\n");
    for (k, e) in trace.iter().enumerate() {
        push_row(&mut out, &[k.to_string(), fmt_f64(*e)]);
    }
    out
}

/// Energy trace CSV for Metropolis runs: sweep_index, energy, acceptance_rate.
/// The initial row carries the starting energy with an empty acceptance cell.
pub fn metropolis_trace_csv(trace: &[f64], acceptance: &[f64]) -> String {
    let mut out = String::from("sweep_index,energy,acceptance_rate\n");
    for (k, e) in trace.iter().enumerate() {
        let acc = if k == 0 {
            String::new()
        } else {
            fmt_f64(acceptance[k - 1])
        };
        push_row(&mut out, &[k.to_string(), fmt_f64(*e), acc]);
    }
    out
}
