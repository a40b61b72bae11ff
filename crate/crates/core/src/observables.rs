//! Energies, whole-lattice constraint residuals, and the frame diagnostics
//! behind the orthonormal-trihedron and dihedron statements.

use crate::decompose::{
    decompose_config, square_consistency, tri_consistency, FieldMap, FieldRecords, GaugeField,
};
use crate::error::{Error, Result};
use crate::lattice::LatticeKind;
use crate::report::{pairwise_sum, GaugeDescriptor, ResidualReport};
use crate::spin::SpinConfiguration;
use crate::vec3::Vec3;
use rayon::prelude::*;

/// Antiferromagnetic exchange coupling, J > 0.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CouplingConstant(f64);

impl CouplingConstant {
    pub fn new(j: f64) -> Result<Self> {
        if j > 0.0 && j.is_finite() {
            Ok(CouplingConstant(j))
        } else {
            Err(Error::Domain(format!("coupling constant must be positive, got {j}")))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// E = J sum over bonds of S_i.S_j, each bond counted once.
pub fn heisenberg_energy(config: &SpinConfiguration, j: CouplingConstant) -> f64 {
    let terms: Vec<f64> = config
        .lattice
        .bonds
        .iter()
        .map(|&(a, b)| config.spins[a].dot(config.spins[b]))
        .collect();
    j.get() * pairwise_sum(&terms)
}

/// Residual column names per lattice kind, in the order they are emitted.
/// Every column is an identity that closes exactly for norm-nu spins at any
/// gauge (gauge-weighted relations are evaluated against canonical-gauge
/// fields), so anything above 1e-10 here is a build error, not physics.
pub fn constraint_names(kind: LatticeKind) -> &'static [&'static str] {
    match kind {
        LatticeKind::Chain => &["chain_norm_closure", "chain_stagger_ortho"],
        LatticeKind::Triangular => &[
            "tri_norm_closure",
            "tri_csquare_phase_squared",
            "tri_nx_closure",
            "tri_ny_closure",
            "tri_nx_ny_ortho",
            "tri_axis_spin_form",
            "tri_complex_from_frame",
            "tri_axis_sign_neg",
            "tri_chirality_scaled",
        ],
        LatticeKind::Square => &[
            "square_norm_closure",
            "square_parseval_consistency",
            "square_cross_ortho_conj",
            "square_parity_ortho_neg",
            "square_nude_consistency",
        ],
    }
}

pub(crate) fn chain_constraint_row(s0: Vec3, s1: Vec3, step: f64, nu: f64) -> Result<Vec<f64>> {
    let f = crate::decompose::chain_decompose(s0, s1, step, nu)?;
    let closure = (f.n.norm2() + step * step / (nu * nu) * f.l.norm2() - 1.0).abs();
    let ortho = f.n.dot(f.l).abs();
    Ok(vec![closure, ortho])
}

pub(crate) fn tri_constraint_row(
    spins: [Vec3; 3],
    gamma: f64,
    step: f64,
    nu: f64,
) -> Result<Vec<f64>> {
    let f = crate::decompose::tri_decompose(spins, gamma, step, nu)?;
    let c = tri_consistency(spins, gamma, step, nu)?;
    let a2 = step * step;
    let a2_nu = a2 / nu;
    let l2 = f.l.norm2();
    let norm_closure = (f.n.herm_norm2() + a2 * a2 / (nu * nu) * l2 - 1.0).abs();
    let nx_closure = (f.nx.norm2() - 1.0 + 2.0 * a2_nu * f.nx.dot(f.l) + a2 * a2 / (nu * nu) * l2).abs();
    let ny_closure = (f.ny.norm2() - 1.0 - 2.0 * a2_nu * f.nx.dot(f.l) + a2 * a2 / (nu * nu) * l2).abs();
    let xy_ortho = (f.nx.dot(f.ny) - 2.0 * a2_nu * f.ny.dot(f.l)).abs();
    Ok(vec![
        norm_closure,
        c.csquare_phase_squared,
        nx_closure,
        ny_closure,
        xy_ortho,
        c.axis_spin_form,
        c.complex_from_frame,
        c.axis_sign_neg,
        c.chirality_scaled,
    ])
}

pub(crate) fn square_constraint_row(
    spins: [Vec3; 4],
    gamma: f64,
    step: f64,
    nu: f64,
) -> Result<Vec<f64>> {
    let f = crate::decompose::square_decompose(spins, gamma, step, nu)?;
    let c = square_consistency(spins, gamma, step, nu)?;
    let a2 = step * step;
    let norm_closure =
        (f.n.norm2() + a2 * f.d.herm_norm2() + a2 * a2 / (nu * nu) * f.l.norm2() - 1.0).abs();
    Ok(vec![
        norm_closure,
        c.parseval_consistency,
        c.cross_ortho_conj,
        c.parity_ortho_neg,
        c.nude_consistency,
    ])
}

/// Evaluates every applicable constraint identity per hyper-site.
pub fn constraint_residuals(
    config: &SpinConfiguration,
    gauge: &GaugeField,
    parallel: bool,
) -> Result<ResidualReport> {
    let lattice = &config.lattice;
    let kind = lattice.spec.kind;
    let count = lattice.hyper_sites.len();
    if gauge.gamma.len() != count {
        return Err(Error::SizeMismatch(format!(
            "gauge field has {} angles for {} hyper-sites",
            gauge.gamma.len(),
            count
        )));
    }
    let step = lattice.spec.step;
    let nu = config.nu;

    let worker = |p: usize| -> Result<Vec<f64>> {
        let t = &lattice.hyper_sites[p];
        match kind {
            LatticeKind::Chain => {
                chain_constraint_row(config.spins[t[0]], config.spins[t[1]], step, nu)
            }
            LatticeKind::Triangular => tri_constraint_row(
                [config.spins[t[0]], config.spins[t[1]], config.spins[t[2]]],
                gauge.gamma[p],
                step,
                nu,
            ),
            LatticeKind::Square => square_constraint_row(
                [
                    config.spins[t[0]],
                    config.spins[t[1]],
                    config.spins[t[2]],
                    config.spins[t[3]],
                ],
                gauge.gamma[p],
                step,
                nu,
            ),
        }
    };

    let rows: Vec<Vec<f64>> = if parallel {
        (0..count).into_par_iter().map(worker).collect::<Result<_>>()?
    } else {
        (0..count).map(worker).collect::<Result<_>>()?
    };

    let names = constraint_names(kind);
    let is_canonical = gauge.gamma.iter().all(|&g| g == 0.0);
    let descriptor = if is_canonical { GaugeDescriptor::Canonical } else { GaugeDescriptor::Fixed };
    let mut report = ResidualReport::new("hyper_site", descriptor);
    for (col, name) in names.iter().enumerate() {
        report.push(name, rows.iter().map(|r| r[col]).collect());
    }
    Ok(report)
}

/// Frame diagnostics: how far the decomposed fields sit from an orthonormal
/// trihedron (triangular) or an orthogonal dihedron plus transverse staggered
/// field (square). Reported raw; thresholds belong to the caller because the
/// statements are asymptotic in the continuum limit.
pub fn frame_residuals(map: &FieldMap) -> Result<ResidualReport> {
    let mut report = ResidualReport::new("hyper_site", GaugeDescriptor::Fixed);
    match &map.records {
        FieldRecords::Chain(_) => {
            Err(Error::Unsupported("frame residuals are defined for triangular and square fields".into()))
        }
        FieldRecords::Tri(records) => {
            report.push("tri_frame_xy_ortho", records.iter().map(|f| f.nx.dot(f.ny).abs()).collect());
            report.push("tri_frame_x_norm", records.iter().map(|f| (f.nx.norm2() - 1.0).abs()).collect());
            report.push("tri_frame_y_norm", records.iter().map(|f| (f.ny.norm2() - 1.0).abs()).collect());
            report.push("tri_frame_z_norm", records.iter().map(|f| (f.nz.norm2() - 1.0).abs()).collect());
            Ok(report)
        }
        FieldRecords::Square(records) => {
            report.push(
                "square_dihedron_ortho",
                records.iter().map(|f| f.d.re.dot(f.d.im).abs()).collect(),
            );
            report.push(
                "square_dihedron_balance",
                records.iter().map(|f| (f.d.re.norm() - f.d.im.norm()).abs()).collect(),
            );
            report.push(
                "square_trihedron_n_re",
                records.iter().map(|f| f.n.dot(f.d.re).abs()).collect(),
            );
            report.push(
                "square_trihedron_n_im",
                records.iter().map(|f| f.n.dot(f.d.im).abs()).collect(),
            );
            Ok(report)
        }
    }
}

/// Nude chirality per hyper-site at the canonical gauge. For the chain this
/// is the staggered-uniform overlap n.l, identically zero for norm-nu spins.
pub fn nude_chirality_map(config: &SpinConfiguration) -> Result<Vec<f64>> {
    let gauge = GaugeField::canonical(config.lattice.hyper_sites.len());
    let map = decompose_config(config, &gauge, false)?;
    Ok(match &map.records {
        FieldRecords::Chain(records) => records.iter().map(|f| f.n.dot(f.l)).collect(),
        FieldRecords::Tri(records) => records.iter().map(|f| f.nude_chi).collect(),
        FieldRecords::Square(records) => records.iter().map(|f| f.nude_chi).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_lattice, LatticeSpec};
    use crate::spin::{random_config, reference_config, ReferenceFamily};
    use crate::vec3::Mat3;
    use std::sync::Arc;

    fn lat(kind: LatticeKind, extent: Vec<usize>) -> Arc<crate::lattice::Lattice> {
        Arc::new(build_lattice(&LatticeSpec::new(kind, extent, 1.0)).unwrap())
    }

    fn j(v: f64) -> CouplingConstant {
        CouplingConstant::new(v).unwrap()
    }

    #[test]
    fn neel_square_energy() {
        let lattice = lat(LatticeKind::Square, vec![2, 2]);
        let cfg = reference_config(lattice, 1.0, &ReferenceFamily::Neel { axis: Vec3::Z }).unwrap();
        assert!((heisenberg_energy(&cfg, j(1.0)) + 32.0).abs() < 1e-12);
    }

    #[test]
    fn ferro_chain_energy() {
        let lattice = lat(LatticeKind::Chain, vec![4]);
        let cfg = reference_config(lattice, 1.0, &ReferenceFamily::Ferro { axis: Vec3::X }).unwrap();
        assert!((heisenberg_energy(&cfg, j(1.0)) - 8.0).abs() < 1e-12);
    }

    #[test]
    fn tri120_energy() {
        let lattice = lat(LatticeKind::Triangular, vec![3, 3]);
        let cfg = reference_config(
            lattice,
            1.0,
            &ReferenceFamily::Tri120 { e1: Vec3::X, e2: Vec3::Y },
        )
        .unwrap();
        assert!((heisenberg_energy(&cfg, j(1.0)) + 40.5).abs() < 1e-10);
    }

    #[test]
    fn energy_rotation_invariance_and_extensivity() {
        let lattice = lat(LatticeKind::Square, vec![2, 3]);
        let mut cfg = random_config(lattice, 1.3, 10);
        let e0 = heisenberg_energy(&cfg, j(0.7));
        cfg.rotate_all(Mat3::rotation_about(Vec3::new(0.6, 0.8, 0.0), 1.1));
        let e1 = heisenberg_energy(&cfg, j(0.7));
        assert!((e0 - e1).abs() <= 1e-9 * e0.abs().max(1.0));

        // doubling the extent of a uniform state scales the energy exactly:
        // twice for the chain, four times for a planar lattice
        let small = lat(LatticeKind::Chain, vec![4]);
        let big = lat(LatticeKind::Chain, vec![8]);
        let e_small = heisenberg_energy(
            &reference_config(small, 1.0, &ReferenceFamily::Neel { axis: Vec3::Z }).unwrap(),
            j(1.0),
        );
        let e_big = heisenberg_energy(
            &reference_config(big, 1.0, &ReferenceFamily::Neel { axis: Vec3::Z }).unwrap(),
            j(1.0),
        );
        assert!((e_big - 2.0 * e_small).abs() < 1e-12);

        let small = lat(LatticeKind::Square, vec![2, 2]);
        let big = lat(LatticeKind::Square, vec![4, 4]);
        let e_small = heisenberg_energy(
            &reference_config(small, 1.0, &ReferenceFamily::Ferro { axis: Vec3::X }).unwrap(),
            j(1.0),
        );
        let e_big = heisenberg_energy(
            &reference_config(big, 1.0, &ReferenceFamily::Ferro { axis: Vec3::X }).unwrap(),
            j(1.0),
        );
        assert!((e_big - 4.0 * e_small).abs() < 1e-12);
    }

    #[test]
    fn constraint_suites_pass_on_random_configurations() {
        for (kind, extent) in [
            (LatticeKind::Chain, vec![8]),
            (LatticeKind::Triangular, vec![3, 3]),
            (LatticeKind::Square, vec![3, 3]),
        ] {
            let lattice = lat(kind, extent);
            let cfg = random_config(lattice.clone(), 1.0, 99);
            let canonical = GaugeField::canonical(lattice.hyper_sites.len());
            let report = constraint_residuals(&cfg, &canonical, false).unwrap();
            assert!(report.max_over_all() <= 1e-12, "{kind}: {:?}", report.summaries());

            let random_gauge = GaugeField::random(lattice.hyper_sites.len(), 5);
            let report = constraint_residuals(&cfg, &random_gauge, false).unwrap();
            assert!(report.max_over_all() <= 1e-12, "{kind} gauged: {:?}", report.summaries());
        }
    }

    #[test]
    fn constraint_suites_hold_off_unit_scale() {
        // identities are exact for any step and nu, not just the pinned suite values
        let spec = LatticeSpec::new(LatticeKind::Triangular, vec![2, 2], 0.35);
        let lattice = Arc::new(build_lattice(&spec).unwrap());
        let cfg = random_config(lattice.clone(), 2.7, 123);
        let gauge = GaugeField::random(lattice.hyper_sites.len(), 6);
        let report = constraint_residuals(&cfg, &gauge, false).unwrap();
        assert!(report.max_over_all() <= 1e-12, "{:?}", report.summaries());
    }

    #[test]
    fn tri120_frame_is_exactly_orthonormal() {
        let lattice = lat(LatticeKind::Triangular, vec![2, 2]);
        let cfg = reference_config(
            lattice.clone(),
            1.0,
            &ReferenceFamily::Tri120 { e1: Vec3::X, e2: Vec3::Y },
        )
        .unwrap();
        let gauge = GaugeField::canonical(lattice.hyper_sites.len());
        let map = decompose_config(&cfg, &gauge, false).unwrap();
        let report = frame_residuals(&map).unwrap();
        assert!(report.max_over_all() <= 1e-12);
    }

    #[test]
    fn ferro_triangular_frame_degenerates() {
        let lattice = lat(LatticeKind::Triangular, vec![2, 2]);
        let cfg =
            reference_config(lattice.clone(), 1.0, &ReferenceFamily::Ferro { axis: Vec3::Z })
                .unwrap();
        let gauge = GaugeField::canonical(lattice.hyper_sites.len());
        let map = decompose_config(&cfg, &gauge, false).unwrap();
        let report = frame_residuals(&map).unwrap();
        assert!((report.max_residual("tri_frame_x_norm") - 1.0).abs() < 1e-12);
    }

    #[test]
    fn frame_residuals_reject_chain() {
        let lattice = lat(LatticeKind::Chain, vec![4]);
        let cfg = random_config(lattice.clone(), 1.0, 1);
        let gauge = GaugeField::canonical(lattice.hyper_sites.len());
        let map = decompose_config(&cfg, &gauge, false).unwrap();
        assert!(matches!(frame_residuals(&map), Err(Error::Unsupported(_))));
    }

    #[test]
    fn nude_chirality_zero_cases() {
        let chain = lat(LatticeKind::Chain, vec![8]);
        let cfg = random_config(chain, 1.0, 33);
        for v in nude_chirality_map(&cfg).unwrap() {
            assert!(v.abs() <= 1e-12);
        }

        let tri = lat(LatticeKind::Triangular, vec![2, 2]);
        let cfg = reference_config(tri, 1.0, &ReferenceFamily::Tri120 { e1: Vec3::X, e2: Vec3::Y })
            .unwrap();
        for v in nude_chirality_map(&cfg).unwrap() {
            assert!(v.abs() <= 1e-14);
        }

        let sq = lat(LatticeKind::Square, vec![2, 2]);
        let cfg = reference_config(sq, 1.0, &ReferenceFamily::Neel { axis: Vec3::Y }).unwrap();
        for v in nude_chirality_map(&cfg).unwrap() {
            assert!(v.abs() <= 1e-14);
        }
    }

    #[test]
    fn coupling_must_be_positive() {
        assert!(CouplingConstant::new(0.0).is_err());
        assert!(CouplingConstant::new(-1.0).is_err());
    }
}
