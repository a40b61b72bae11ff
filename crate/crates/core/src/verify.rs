//! Brute-force identity suite over random hyper-sites.
//!
//! Draws tuples of random unit spins (nu = 1, step = 1), pushes them through
//! the decompositions, and reports every applicable identity residual,
//! round-trip error, and gauge-action check. The ambiguous identities are
//! reported in both variants so the suite demonstrates which convention
//! closes; `convention_pairs` lists those side-by-side columns.

use crate::decompose::{
    chain_decompose, chain_reconstruct, square_consistency, square_decompose, square_reconstruct,
    tri_consistency, tri_decompose, tri_reconstruct, SQUARE_CONSISTENCY_NAMES,
    TRI_CONSISTENCY_NAMES,
};
use crate::lattice::LatticeKind;
use crate::report::{GaugeDescriptor, ResidualReport};
use crate::spin::random_unit;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;

/// Suite scale: identities are checked at nu = 1 and step = 1, where every
/// relation is O(1) and absolute residuals are meaningful.
pub const SUITE_NU: f64 = 1.0;
pub const SUITE_STEP: f64 = 1.0;

/// Column names per kind, in emission order.
pub fn suite_names(kind: LatticeKind) -> Vec<&'static str> {
    match kind {
        LatticeKind::Chain => {
            vec!["chain_norm_closure", "chain_stagger_ortho", "chain_roundtrip"]
        }
        LatticeKind::Triangular => {
            let mut names = vec![
                "tri_norm_closure",
                "tri_nx_closure",
                "tri_ny_closure",
                "tri_nx_ny_ortho",
            ];
            names.extend(TRI_CONSISTENCY_NAMES);
            names.extend([
                "tri_roundtrip",
                "tri_gauge_chi_shift",
                "tri_gauge_nude_shift",
                "tri_gauge_real_shift",
                "tri_gauge_phase_action",
            ]);
            names
        }
        LatticeKind::Square => {
            let mut names = vec!["square_norm_closure"];
            names.extend(SQUARE_CONSISTENCY_NAMES);
            names.extend([
                "square_roundtrip",
                "square_gauge_real_shift",
                "square_gauge_phase_action",
            ]);
            names
        }
    }
}

/// Columns that must close to working precision at any gauge; anything above
/// the verification tolerance in one of these is a defect.
pub fn suite_exact_names(kind: LatticeKind) -> Vec<&'static str> {
    let failing: [&str; 5] = [
        "tri_axis_sign_pos",
        "tri_chirality_plain",
        "tri_csquare_phase_single",
        "square_cross_ortho_plain",
        "square_parity_ortho_pos",
    ];
    suite_names(kind).into_iter().filter(|n| !failing.contains(n)).collect()
}

/// The side-by-side convention columns: for each pair exactly one variant is
/// expected to close (judged on a random-gauge pass; the complex-square pair
/// coincides in the canonical gauge).
pub fn convention_pairs(kind: LatticeKind) -> &'static [(&'static str, &'static str)] {
    match kind {
        LatticeKind::Chain => &[],
        LatticeKind::Triangular => &[
            ("tri_csquare_phase_single", "tri_csquare_phase_squared"),
            ("tri_axis_sign_pos", "tri_axis_sign_neg"),
            ("tri_chirality_plain", "tri_chirality_scaled"),
        ],
        LatticeKind::Square => &[
            ("square_cross_ortho_plain", "square_cross_ortho_conj"),
            ("square_parity_ortho_pos", "square_parity_ortho_neg"),
        ],
    }
}

/// Runs the suite: `samples` random hyper-sites of the kind, either in the
/// canonical gauge or with one random angle per sample.
pub fn identity_suite(
    kind: LatticeKind,
    samples: usize,
    spin_seed: u64,
    gauge_seed: Option<u64>,
) -> ResidualReport {
    let names = suite_names(kind);
    let mut columns: Vec<Vec<f64>> = vec![Vec::with_capacity(samples); names.len()];
    let mut spin_rng = ChaCha8Rng::seed_from_u64(spin_seed);
    let mut gauge_rng = gauge_seed.map(ChaCha8Rng::seed_from_u64);
    let nu = SUITE_NU;
    let a = SUITE_STEP;

    for _ in 0..samples {
        let gamma = match &mut gauge_rng {
            Some(rng) => rng.random_range(0.0..TAU),
            None => 0.0,
        };
        let mut col = columns.iter_mut();
        let mut push = |v: f64| col.next().expect("column count matches names").push(v);

        match kind {
            LatticeKind::Chain => {
                let s0 = random_unit(&mut spin_rng) * nu;
                let s1 = random_unit(&mut spin_rng) * nu;
                let f = chain_decompose(s0, s1, a, nu).expect("norms exact by construction");
                push((f.n.norm2() + a * a / (nu * nu) * f.l.norm2() - 1.0).abs());
                push(f.n.dot(f.l).abs());
                let (r0, r1) = chain_reconstruct(&f, a, nu);
                push(r0.max_abs_diff(s0).max(r1.max_abs_diff(s1)));
            }
            LatticeKind::Triangular => {
                let spins = [
                    random_unit(&mut spin_rng) * nu,
                    random_unit(&mut spin_rng) * nu,
                    random_unit(&mut spin_rng) * nu,
                ];
                let f = tri_decompose(spins, gamma, a, nu).expect("norms exact");
                let base = tri_decompose(spins, 0.0, a, nu).expect("norms exact");
                let c = tri_consistency(spins, gamma, a, nu).expect("norms exact");
                let a2 = a * a;
                let fourth = a2 * a2 / (nu * nu);
                push((f.n.herm_norm2() + fourth * f.l.norm2() - 1.0).abs());
                push(
                    (f.nx.norm2() - 1.0 + 2.0 * a2 / nu * f.nx.dot(f.l) + fourth * f.l.norm2())
                        .abs(),
                );
                push(
                    (f.ny.norm2() - 1.0 - 2.0 * a2 / nu * f.nx.dot(f.l) + fourth * f.l.norm2())
                        .abs(),
                );
                push((f.nx.dot(f.ny) - 2.0 * a2 / nu * f.ny.dot(f.l)).abs());
                for v in c.as_array() {
                    push(v);
                }
                let back = tri_reconstruct(&f, a, nu);
                push(
                    back.iter()
                        .zip(&spins)
                        .map(|(r, s)| r.max_abs_diff(*s))
                        .fold(0.0f64, f64::max),
                );
                push((f.chi - base.chi).abs());
                push((f.nude_chi - base.nude_chi).abs());
                push(
                    f.l.max_abs_diff(base.l)
                        .max(f.nx.max_abs_diff(base.nx))
                        .max(f.ny.max_abs_diff(base.ny))
                        .max(f.nz.max_abs_diff(base.nz)),
                );
                let expected =
                    base.n.phase_mul(num_complex::Complex64::from_polar(1.0, -gamma));
                push(f.n.max_abs_diff(expected));
            }
            LatticeKind::Square => {
                let spins = [
                    random_unit(&mut spin_rng) * nu,
                    random_unit(&mut spin_rng) * nu,
                    random_unit(&mut spin_rng) * nu,
                    random_unit(&mut spin_rng) * nu,
                ];
                let f = square_decompose(spins, gamma, a, nu).expect("norms exact");
                let base = square_decompose(spins, 0.0, a, nu).expect("norms exact");
                let c = square_consistency(spins, gamma, a, nu).expect("norms exact");
                let a2 = a * a;
                push(
                    (f.n.norm2() + a2 * f.d.herm_norm2() + a2 * a2 / (nu * nu) * f.l.norm2()
                        - 1.0)
                        .abs(),
                );
                for v in c.as_array() {
                    push(v);
                }
                let back = square_reconstruct(&f, a, nu);
                push(
                    back.iter()
                        .zip(&spins)
                        .map(|(r, s)| r.max_abs_diff(*s))
                        .fold(0.0f64, f64::max),
                );
                push(f.n.max_abs_diff(base.n).max(f.l.max_abs_diff(base.l)));
                let expected =
                    base.d.phase_mul(num_complex::Complex64::from_polar(1.0, -gamma));
                push(f.d.max_abs_diff(expected));
            }
        }
    }

    let descriptor = match gauge_seed {
        Some(seed) => GaugeDescriptor::Random { seed },
        None => GaugeDescriptor::Canonical,
    };
    let mut report = ResidualReport::new("sample", descriptor);
    for (name, values) in names.iter().zip(columns) {
        report.push(name, values);
    }
    report
}

/// Outcome of judging one convention pair on a report.
#[derive(Clone, Debug, serde::Serialize)]
pub struct ConventionVerdict {
    pub variant_a: String,
    pub variant_b: String,
    pub max_a: f64,
    pub max_b: f64,
    pub exactly_one_closes: bool,
    pub closing: Option<String>,
}

/// Judges every convention pair of the kind against a tolerance.
pub fn judge_conventions(
    kind: LatticeKind,
    report: &ResidualReport,
    tolerance: f64,
) -> Vec<ConventionVerdict> {
    convention_pairs(kind)
        .iter()
        .map(|&(a, b)| {
            let max_a = report.max_residual(a);
            let max_b = report.max_residual(b);
            let a_ok = max_a <= tolerance;
            let b_ok = max_b <= tolerance;
            ConventionVerdict {
                variant_a: a.to_string(),
                variant_b: b.to_string(),
                max_a,
                max_b,
                exactly_one_closes: a_ok ^ b_ok,
                closing: match (a_ok, b_ok) {
                    (true, false) => Some(a.to_string()),
                    (false, true) => Some(b.to_string()),
                    _ => None,
                },
            }
        })
        .collect()
}

/// Largest residual over the exact (expected-to-close) columns.
pub fn max_exact_residual(kind: LatticeKind, report: &ResidualReport) -> f64 {
    suite_exact_names(kind)
        .iter()
        .map(|n| report.max_residual(n))
        .fold(0.0f64, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_suite_closes_everywhere_but_the_failing_variants() {
        for kind in [LatticeKind::Chain, LatticeKind::Triangular, LatticeKind::Square] {
            let report = identity_suite(kind, 2000, 1, None);
            assert!(
                max_exact_residual(kind, &report) <= 1e-12,
                "{kind}: {:?}",
                report.summaries()
            );
        }
    }

    #[test]
    fn gauged_suite_singles_out_one_convention_per_pair() {
        for kind in [LatticeKind::Triangular, LatticeKind::Square] {
            let report = identity_suite(kind, 2000, 2, Some(3));
            assert!(max_exact_residual(kind, &report) <= 1e-12);
            for verdict in judge_conventions(kind, &report, 1e-10) {
                assert!(
                    verdict.exactly_one_closes,
                    "{kind}: {} vs {} ({} / {})",
                    verdict.variant_a,
                    verdict.variant_b,
                    verdict.max_a,
                    verdict.max_b
                );
            }
        }
    }

    #[test]
    fn csquare_conventions_coincide_canonically() {
        let report = identity_suite(LatticeKind::Triangular, 500, 4, None);
        assert!(report.max_residual("tri_csquare_phase_single") <= 1e-12);
        assert!(report.max_residual("tri_csquare_phase_squared") <= 1e-12);
    }

    #[test]
    fn suite_is_seed_deterministic() {
        let a = identity_suite(LatticeKind::Square, 100, 9, Some(10));
        let b = identity_suite(LatticeKind::Square, 100, 9, Some(10));
        for (ea, eb) in a.entries.iter().zip(&b.entries) {
            assert_eq!(ea.values, eb.values);
        }
    }
}
