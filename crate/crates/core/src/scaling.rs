//! Joint step-shrinking scan: hold a physical twist fixed while the lattice
//! step shrinks and the spin quantum number grows, and record how the
//! order-parameter normalization deficit and frame residuals vanish.
//!
//! The per-hyper-site misalignment angle of the twist texture scales as
//! kappa * step, so the deficit 1 - |n|^2 falls off as step^2; the log-log
//! slope fitted over the scan is the quantitative form of that statement.

use crate::decompose::{decompose_config, FieldRecords, GaugeField};
use crate::error::{Error, Result};
use crate::lattice::{build_lattice, LatticeKind, LatticeSpec};
use crate::observables::frame_residuals;
use crate::report::pairwise_sum;
use crate::spin::{reference_config, spin_length, ReferenceFamily};
use crate::vec3::Vec3;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    /// Lattice step for this point.
    pub step: f64,
    /// Spin quantum number; enters only through nu = sqrt(s(s+1)).
    pub s: f64,
}

/// Scan schedule: steps strictly decreasing, spin quantum numbers strictly
/// increasing, with a fixed physical twist. The texture family is the twist
/// texture of the lattice kind; no other family keeps a measurable physical
/// quantity fixed while the step shrinks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanSchedule {
    pub points: Vec<ScanPoint>,
    /// Twist wavenumber in radians per physical unit length.
    pub kappa: f64,
    /// Axis of the underlying staggered texture.
    pub axis: Vec3,
}

impl ScanSchedule {
    /// Steps 2^-k for k in 0..count with s_k = 2^k.
    pub fn halving(count: usize, kappa: f64, axis: Vec3) -> Self {
        let points = (0..count)
            .map(|k| ScanPoint { step: 0.5f64.powi(k as i32), s: 2.0f64.powi(k as i32) })
            .collect();
        ScanSchedule { points, kappa, axis }
    }

    pub fn validate(&self) -> Result<()> {
        if self.points.len() < 3 {
            return Err(Error::Config(format!(
                "scan schedule needs at least 3 points, got {}",
                self.points.len()
            )));
        }
        if self.points.iter().any(|p| !p.step.is_finite() || !p.s.is_finite()) {
            return Err(Error::Config("scan points must be finite".into()));
        }
        for pair in self.points.windows(2) {
            if pair[1].step >= pair[0].step {
                return Err(Error::Config("scan steps must be strictly decreasing".into()));
            }
            if pair[1].s <= pair[0].s {
                return Err(Error::Config(
                    "spin quantum numbers must be strictly increasing".into(),
                ));
            }
        }
        if !(self.kappa.is_finite()) {
            return Err(Error::Config("twist wavenumber must be finite".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub k: usize,
    pub step: f64,
    pub s: f64,
    pub nu: f64,
    pub max_deficit: f64,
    pub mean_deficit: f64,
    /// Largest frame residual; zero for the chain, which carries no frame.
    pub frame_residual_max: f64,
}

/// Runs the scan: for each point, builds the twist texture at that step and
/// spin length, decomposes it in the canonical gauge, and records the
/// normalization deficit 1 - |n|^2 and the frame residuals.
pub fn continuum_scan(
    kind: LatticeKind,
    extent: &[usize],
    schedule: &ScanSchedule,
) -> Result<Vec<ScanRow>> {
    schedule.validate()?;
    let mut rows = Vec::with_capacity(schedule.points.len());
    for (k, point) in schedule.points.iter().enumerate() {
        let spec = LatticeSpec::new(kind, extent.to_vec(), point.step);
        let lattice = Arc::new(build_lattice(&spec)?);
        let nu = spin_length(point.s)?;
        let family = ReferenceFamily::Twist { axis: schedule.axis, kappa: schedule.kappa };
        let config = reference_config(lattice.clone(), nu, &family)?;
        let gauge = GaugeField::canonical(lattice.hyper_sites.len());
        let map = decompose_config(&config, &gauge, false)?;

        let deficits: Vec<f64> = match &map.records {
            FieldRecords::Chain(records) => {
                records.iter().map(|f| 1.0 - f.n.norm2()).collect()
            }
            FieldRecords::Tri(records) => {
                records.iter().map(|f| 1.0 - f.n.herm_norm2()).collect()
            }
            FieldRecords::Square(records) => {
                records.iter().map(|f| 1.0 - f.n.norm2()).collect()
            }
        };
        let max_deficit = deficits.iter().fold(f64::MIN, |m, &d| m.max(d));
        let mean_deficit = pairwise_sum(&deficits) / deficits.len() as f64;
        let frame_residual_max = match kind {
            LatticeKind::Chain => 0.0,
            _ => frame_residuals(&map)?.max_over_all(),
        };
        rows.push(ScanRow {
            k,
            step: point.step,
            s: point.s,
            nu,
            max_deficit,
            mean_deficit,
            frame_residual_max,
        });
    }
    Ok(rows)
}

/// Least-squares slope of log(deficit) against log(step).
///
/// Points with non-positive deficit are excluded; fewer than three surviving
/// points or a flat deficit profile is an error rather than a slope.
pub fn fit_slope(points: &[(f64, f64)]) -> Result<f64> {
    let usable: Vec<(f64, f64)> = points
        .iter()
        .filter(|&&(step, deficit)| step > 0.0 && deficit > 0.0)
        .map(|&(step, deficit)| (step.ln(), deficit.ln()))
        .collect();
    if usable.len() < 3 {
        return Err(Error::DegenerateFit(format!(
            "{} usable points after excluding non-positive deficits, need 3",
            usable.len()
        )));
    }
    let n = usable.len() as f64;
    let mean_x = usable.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = usable.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = usable.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = usable.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateFit("all scan steps coincide".into()));
    }
    let syy: f64 = usable.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    if syy == 0.0 {
        return Err(Error::DegenerateFit("deficits are constant across the scan".into()));
    }
    Ok(sxy / sxx)
}

/// Slope of the max-deficit column of a scan table.
pub fn slope_from_rows(rows: &[ScanRow]) -> Result<f64> {
    let points: Vec<(f64, f64)> = rows.iter().map(|r| (r.step, r.max_deficit)).collect();
    fit_slope(&points)
}
