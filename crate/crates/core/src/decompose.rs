//! Forward and inverse hyper-site transforms: the local antiferromagnetic
//! degrees of freedom for each lattice kind, including the gauge phase.
//!
//! All dot products follow the index convention `a.b = sum_a a^alpha b_alpha`
//! with no conjugation unless spelled out. Complex 3-vectors are stored as
//! real/imaginary pairs. The canonical gauge is all-zero phases; identities
//! whose two sides carry different gauge weights are evaluated against the
//! canonical-gauge fields (see `TriConsistency` and `SquareConsistency`).

use crate::error::{Error, Result};
use crate::lattice::{Lattice, LatticeKind};
use crate::report::{GaugeDescriptor, ResidualReport};
use crate::spin::SpinConfiguration;
use crate::vec3::{CVec3, Vec3};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::f64::consts::{PI, SQRT_2, TAU};
use std::sync::Arc;

const SQRT3: f64 = 1.732_050_807_568_877_3;

/// Relative tolerance separating user error from floating-point drift when
/// checking the spin-length precondition.
pub const NORM_PRECONDITION_TOL: f64 = 1e-9;

fn phase(angle: f64) -> Complex64 {
    Complex64::from_polar(1.0, angle)
}

fn check_norms(spins: &[Vec3], nu: f64) -> Result<()> {
    for (k, s) in spins.iter().enumerate() {
        let norm = s.norm();
        if (norm - nu).abs() > NORM_PRECONDITION_TOL * nu {
            return Err(Error::NormPrecondition { site: k, norm, expected: nu });
        }
    }
    Ok(())
}

/// Per-hyper-site gauge angles in `[0, 2pi)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaugeField {
    pub gamma: Vec<f64>,
}

impl GaugeField {
    pub fn new(gamma: Vec<f64>) -> Result<Self> {
        if gamma.iter().any(|g| !g.is_finite()) {
            return Err(Error::Domain("gauge angles must be finite".into()));
        }
        Ok(GaugeField { gamma: gamma.into_iter().map(|g| g.rem_euclid(TAU)).collect() })
    }

    /// The canonical gauge: all phases zero.
    pub fn canonical(count: usize) -> Self {
        GaugeField { gamma: vec![0.0; count] }
    }

    /// Uniform angles in `[0, 2pi)`, reproducible from the seed.
    pub fn random(count: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        GaugeField { gamma: (0..count).map(|_| rng.random_range(0.0..TAU)).collect() }
    }

    pub fn descriptor(&self, seed: Option<u64>) -> GaugeDescriptor {
        match seed {
            Some(seed) => GaugeDescriptor::Random { seed },
            None => GaugeDescriptor::Canonical,
        }
    }
}

/// Chain fields: staggered unit-scale `n` and uniform `l` (spin/length).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChainFields {
    pub n: Vec3,
    pub l: Vec3,
}

/// Triangular fields: complex order parameter `n`, uniform `l`
/// (spin/length^2), the real frame `(nx, ny, nz)`, the chirality `chi`, the
/// nude chirality `nude_chi = nz.l`, and the gauge angle used.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TriFields {
    pub n: CVec3,
    pub l: Vec3,
    pub nx: Vec3,
    pub ny: Vec3,
    pub nz: Vec3,
    pub chi: f64,
    pub nude_chi: f64,
    pub gamma: f64,
}

/// Square fields: staggered `n`, complex dimer field `d` (1/length), uniform
/// `l` (spin/length^2), nude chirality at the stored gauge, and the gauge
/// angle used.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SquareFields {
    pub n: Vec3,
    pub d: CVec3,
    pub l: Vec3,
    pub nude_chi: f64,
    pub gamma: f64,
}

/// One field record per hyper-site of a lattice.
#[derive(Clone, Debug, PartialEq)]
pub enum FieldRecords {
    Chain(Vec<ChainFields>),
    Tri(Vec<TriFields>),
    Square(Vec<SquareFields>),
}

impl FieldRecords {
    pub fn len(&self) -> usize {
        match self {
            FieldRecords::Chain(v) => v.len(),
            FieldRecords::Tri(v) => v.len(),
            FieldRecords::Square(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Clone, Debug)]
pub struct FieldMap {
    pub lattice: Arc<Lattice>,
    pub nu: f64,
    pub records: FieldRecords,
}

/// n = (S0 - S1)/(2 nu), l = (S0 + S1)/(2 step).
pub fn chain_decompose(s0: Vec3, s1: Vec3, step: f64, nu: f64) -> Result<ChainFields> {
    check_norms(&[s0, s1], nu)?;
    Ok(ChainFields { n: (s0 - s1) * (0.5 / nu), l: (s0 + s1) * (0.5 / step) })
}

/// Inverse of `chain_decompose`: S0 = nu n + step l, S1 = -nu n + step l.
pub fn chain_reconstruct(fields: &ChainFields, step: f64, nu: f64) -> (Vec3, Vec3) {
    let stag = fields.n * nu;
    let uni = fields.l * step;
    (stag + uni, uni - stag)
}

/// Triangular forward transform at gauge angle `gamma`.
pub fn tri_decompose(spins: [Vec3; 3], gamma: f64, step: f64, nu: f64) -> Result<TriFields> {
    check_norms(&spins, nu)?;
    let [s0, s1, s2] = spins;
    let w = phase(2.0 * PI / 3.0);

    // Complex staggered sum S0 + w S1 + w^2 S2, then the gauge phase.
    let staggered = CVec3::from_real(s0)
        + CVec3::from_real(s1).phase_mul(w)
        + CVec3::from_real(s2).phase_mul(w * w);
    let n = staggered.phase_mul(phase(-gamma) * Complex64::new(SQRT_2 / (3.0 * nu), 0.0));

    let l = (s0 + s1 + s2) * (1.0 / (3.0 * step * step));
    let nx = (s0 - (s1 + s2) * 0.5) * (2.0 / (3.0 * nu));
    let ny = (s1 - s2) * ((2.0 / (3.0 * nu)) * (SQRT3 / 2.0));
    let nz = nx.cross(ny);
    let chi = s0.dot(s1.cross(s2)) * (3.0 * SQRT3 / (2.0 * nu.powi(3)));
    let nude_chi = nz.dot(l);
    Ok(TriFields { n, l, nx, ny, nz, chi, nude_chi, gamma })
}

/// Inverse triangular transform: S_j = step^2 l + sqrt2 nu Re(w^-j e^{i gamma} n).
pub fn tri_reconstruct(fields: &TriFields, step: f64, nu: f64) -> [Vec3; 3] {
    let uni = fields.l * (step * step);
    let mut out = [Vec3::ZERO; 3];
    for (j, slot) in out.iter_mut().enumerate() {
        let c = phase(fields.gamma - 2.0 * PI * j as f64 / 3.0) * Complex64::new(SQRT_2 * nu, 0.0);
        *slot = uni + fields.n.phase_mul(c).re;
    }
    out
}

/// Square forward transform at gauge angle `gamma`.
pub fn square_decompose(spins: [Vec3; 4], gamma: f64, step: f64, nu: f64) -> Result<SquareFields> {
    check_norms(&spins, nu)?;
    let [s0, s1, s2, s3] = spins;

    let n = (s0 - s1 + s2 - s3) * (1.0 / (4.0 * nu));
    // Complex sum S0 + i S1 - S2 - i S3, then the gauge phase.
    let dimer = CVec3 { re: s0 - s2, im: s1 - s3 };
    let d = dimer.phase_mul(phase(-gamma) * Complex64::new(SQRT_2 / (4.0 * step * nu), 0.0));
    let l = (s0 + s1 + s2 + s3) * (1.0 / (4.0 * step * step));
    let nude_chi = 0.5 * nu * d.dot(d).re;
    Ok(SquareFields { n, d, l, nude_chi, gamma })
}

/// Inverse square transform:
/// S_j = step^2 l + (-1)^j nu n + sqrt2 step nu Re(i^-j e^{i gamma} d).
pub fn square_reconstruct(fields: &SquareFields, step: f64, nu: f64) -> [Vec3; 4] {
    let uni = fields.l * (step * step);
    let stag = fields.n * nu;
    let mut out = [Vec3::ZERO; 4];
    for (j, slot) in out.iter_mut().enumerate() {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        let c = phase(fields.gamma - PI / 2.0 * j as f64) * Complex64::new(SQRT_2 * step * nu, 0.0);
        *slot = uni + stag * sign + fields.d.phase_mul(c).re;
    }
    out
}

/// Named residuals probing the triangular identities whose published sign or
/// phase is ambiguous, alongside the forms that close exactly.
///
/// * `axis_spin_form`: the frame axis `nz = nx x ny` against its direct spin
///   form `(2 sqrt3 / 9 nu^2) (S0xS1 + S1xS2 + S2xS0)`. Exact.
/// * `complex_from_frame`: `n` against `(1/sqrt2) e^{-i gamma}(nx + i ny)`.
///   Exact at every gauge.
/// * `axis_sign_pos` / `axis_sign_neg`: the pseudo-scalar form
///   `i (conj(n) x n)` against `+nz` and `-nz`; exactly one closes.
/// * `chirality_plain` / `chirality_scaled`: `chi` against
///   `(step^2/nu) nz.l` with unit and `27/4 = (3 sqrt3 / 2)^2` prefactors;
///   the scaled form closes.
/// * `csquare_phase_single` / `csquare_phase_squared`: the complex-square
///   relation `n.n = -2 sqrt2 (step^2/nu) e^{-i k gamma} (l.conj(n0))` with
///   `k = 1` and `k = 2`, where `conj(n0)` is the canonical-gauge conjugate
///   field. The two coincide in the canonical gauge; at a generic gauge only
///   the squared phase matches the gauge weight of the left side.
#[derive(Clone, Copy, Debug)]
pub struct TriConsistency {
    pub axis_spin_form: f64,
    pub complex_from_frame: f64,
    pub axis_sign_pos: f64,
    pub axis_sign_neg: f64,
    pub chirality_plain: f64,
    pub chirality_scaled: f64,
    pub csquare_phase_single: f64,
    pub csquare_phase_squared: f64,
}

pub const TRI_CONSISTENCY_NAMES: [&str; 8] = [
    "tri_axis_spin_form",
    "tri_complex_from_frame",
    "tri_axis_sign_pos",
    "tri_axis_sign_neg",
    "tri_chirality_plain",
    "tri_chirality_scaled",
    "tri_csquare_phase_single",
    "tri_csquare_phase_squared",
];

impl TriConsistency {
    pub fn as_array(&self) -> [f64; 8] {
        [
            self.axis_spin_form,
            self.complex_from_frame,
            self.axis_sign_pos,
            self.axis_sign_neg,
            self.chirality_plain,
            self.chirality_scaled,
            self.csquare_phase_single,
            self.csquare_phase_squared,
        ]
    }
}

pub fn tri_consistency(
    spins: [Vec3; 3],
    gamma: f64,
    step: f64,
    nu: f64,
) -> Result<TriConsistency> {
    let fields = tri_decompose(spins, gamma, step, nu)?;
    let [s0, s1, s2] = spins;
    let a2_nu = step * step / nu;

    let spin_form = (s0.cross(s1) + s1.cross(s2) + s2.cross(s0))
        * (2.0 * SQRT3 / (9.0 * nu * nu));
    let axis_spin_form = spin_form.max_abs_diff(fields.nz);

    let frame_form = CVec3 { re: fields.nx, im: fields.ny }
        .phase_mul(phase(-gamma) * Complex64::new(1.0 / SQRT_2, 0.0));
    let complex_from_frame = frame_form.max_abs_diff(fields.n);

    let pseudo = fields.n.conj().cross(fields.n).phase_mul(Complex64::new(0.0, 1.0));
    let axis_sign_pos = pseudo.max_abs_diff(CVec3::from_real(fields.nz));
    let axis_sign_neg = pseudo.max_abs_diff(CVec3::from_real(-fields.nz));

    let nzl = fields.nz.dot(fields.l);
    let chirality_plain = (fields.chi - a2_nu * nzl).abs();
    let chirality_scaled = (fields.chi - 6.75 * a2_nu * nzl).abs();

    // Canonical-gauge conjugate: conj(n0) = e^{-i gamma} conj(n).
    let n0_conj = fields.n.conj().phase_mul(phase(-gamma));
    let lhs = fields.n.dot(fields.n);
    let base = n0_conj.dot_real(fields.l) * Complex64::new(-2.0 * SQRT_2 * a2_nu, 0.0);
    let csquare_phase_single = (lhs - base * phase(-gamma)).norm();
    let csquare_phase_squared = (lhs - base * phase(-2.0 * gamma)).norm();

    Ok(TriConsistency {
        axis_spin_form,
        complex_from_frame,
        axis_sign_pos,
        axis_sign_neg,
        chirality_plain,
        chirality_scaled,
        csquare_phase_single,
        csquare_phase_squared,
    })
}

/// Single-record `ResidualReport` form of `tri_consistency`.
pub fn tri_consistency_report(
    spins: [Vec3; 3],
    gamma: f64,
    step: f64,
    nu: f64,
) -> Result<ResidualReport> {
    let c = tri_consistency(spins, gamma, step, nu)?;
    let gauge = if gamma == 0.0 { GaugeDescriptor::Canonical } else { GaugeDescriptor::Fixed };
    let mut report = ResidualReport::new("hyper_site", gauge);
    for (name, value) in TRI_CONSISTENCY_NAMES.iter().zip(c.as_array()) {
        report.push(name, vec![value]);
    }
    Ok(report)
}

/// Named residuals for the square identities; see `TriConsistency` for the
/// naming scheme.
///
/// * `parseval_consistency`: the raw four-point transform norm sum against
///   the closure computed from the decomposed fields; two routes to the same
///   number.
/// * `cross_ortho_plain` / `cross_ortho_conj`: `n.d0` against
///   `-(step^2/nu) l.d0` and `-(step^2/nu) l.conj(d0)` in the canonical
///   gauge; only the conjugated form closes.
/// * `parity_ortho_pos` / `parity_ortho_neg`: `n.l` against
///   `+-(nu/2) Re(d0.d0)`; only the negative sign closes.
/// * `nude_consistency`: the stored nude chirality against its definition
///   recomputed at the stored gauge.
#[derive(Clone, Copy, Debug)]
pub struct SquareConsistency {
    pub parseval_consistency: f64,
    pub cross_ortho_plain: f64,
    pub cross_ortho_conj: f64,
    pub parity_ortho_pos: f64,
    pub parity_ortho_neg: f64,
    pub nude_consistency: f64,
}

pub const SQUARE_CONSISTENCY_NAMES: [&str; 6] = [
    "square_parseval_consistency",
    "square_cross_ortho_plain",
    "square_cross_ortho_conj",
    "square_parity_ortho_pos",
    "square_parity_ortho_neg",
    "square_nude_consistency",
];

impl SquareConsistency {
    pub fn as_array(&self) -> [f64; 6] {
        [
            self.parseval_consistency,
            self.cross_ortho_plain,
            self.cross_ortho_conj,
            self.parity_ortho_pos,
            self.parity_ortho_neg,
            self.nude_consistency,
        ]
    }
}

pub fn square_consistency(
    spins: [Vec3; 4],
    gamma: f64,
    step: f64,
    nu: f64,
) -> Result<SquareConsistency> {
    let fields = square_decompose(spins, gamma, step, nu)?;
    let [s0, s1, s2, s3] = spins;
    let a2 = step * step;

    // Raw route: norm sums of the four-point transform computed from spins.
    let f0 = CVec3::from_real(s0 + s1 + s2 + s3);
    let f1 = CVec3 { re: s0 - s2, im: s1 - s3 };
    let f2 = CVec3::from_real(s0 - s1 + s2 - s3);
    let raw = (f0.herm_norm2() + 2.0 * f1.herm_norm2() + f2.herm_norm2()) / (16.0 * nu * nu);
    let field_form = fields.n.norm2()
        + a2 * fields.d.herm_norm2()
        + a2 * a2 / (nu * nu) * fields.l.norm2();
    let parseval_consistency = (raw - field_form).abs();

    // Canonical-gauge dimer field.
    let d0 = fields.d.phase_mul(phase(gamma));
    let n_dot_d = d0.dot_real(fields.n);
    let l_dot_d = d0.dot_real(fields.l);
    let l_dot_dc = d0.conj().dot_real(fields.l);
    let scale = Complex64::new(a2 / nu, 0.0);
    let cross_ortho_plain = (n_dot_d + scale * l_dot_d).norm();
    let cross_ortho_conj = (n_dot_d + scale * l_dot_dc).norm();

    let nl = fields.n.dot(fields.l);
    let re_dd = d0.dot(d0).re;
    let parity_ortho_pos = (nl - 0.5 * nu * re_dd).abs();
    let parity_ortho_neg = (nl + 0.5 * nu * re_dd).abs();

    let nude_consistency = (fields.nude_chi - 0.5 * nu * fields.d.dot(fields.d).re).abs();

    Ok(SquareConsistency {
        parseval_consistency,
        cross_ortho_plain,
        cross_ortho_conj,
        parity_ortho_pos,
        parity_ortho_neg,
        nude_consistency,
    })
}

/// Rewrites a tuple-local norm error to name the global site index.
fn globalize_site(err: Error, tuple: &[usize]) -> Error {
    match err {
        Error::NormPrecondition { site, norm, expected } => {
            Error::NormPrecondition { site: tuple[site], norm, expected }
        }
        other => other,
    }
}

/// Decomposes every hyper-site of a configuration at the given gauge.
pub fn decompose_config(
    config: &SpinConfiguration,
    gauge: &GaugeField,
    parallel: bool,
) -> Result<FieldMap> {
    let lattice = &config.lattice;
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

    let records = match lattice.spec.kind {
        LatticeKind::Chain => {
            let worker = |p: usize| {
                let t = &lattice.hyper_sites[p];
                chain_decompose(config.spins[t[0]], config.spins[t[1]], step, nu)
                    .map_err(|e| globalize_site(e, t))
            };
            FieldRecords::Chain(run_indexed(count, parallel, worker)?)
        }
        LatticeKind::Triangular => {
            let worker = |p: usize| {
                let t = &lattice.hyper_sites[p];
                let spins = [config.spins[t[0]], config.spins[t[1]], config.spins[t[2]]];
                tri_decompose(spins, gauge.gamma[p], step, nu)
                    .map_err(|e| globalize_site(e, t))
            };
            FieldRecords::Tri(run_indexed(count, parallel, worker)?)
        }
        LatticeKind::Square => {
            let worker = |p: usize| {
                let t = &lattice.hyper_sites[p];
                let spins = [
                    config.spins[t[0]],
                    config.spins[t[1]],
                    config.spins[t[2]],
                    config.spins[t[3]],
                ];
                square_decompose(spins, gauge.gamma[p], step, nu)
                    .map_err(|e| globalize_site(e, t))
            };
            FieldRecords::Square(run_indexed(count, parallel, worker)?)
        }
    };
    Ok(FieldMap { lattice: config.lattice.clone(), nu, records })
}

fn run_indexed<T: Send>(
    count: usize,
    parallel: bool,
    worker: impl Fn(usize) -> Result<T> + Sync + Send,
) -> Result<Vec<T>> {
    if parallel {
        (0..count).into_par_iter().map(worker).collect()
    } else {
        (0..count).map(worker).collect()
    }
}

/// Rebuilds the spin configuration from a field map; exact inverse of
/// `decompose_config` at the stored gauge.
pub fn reconstruct_config(map: &FieldMap) -> SpinConfiguration {
    let lattice = &map.lattice;
    let step = lattice.spec.step;
    let nu = map.nu;
    let mut spins = vec![Vec3::ZERO; lattice.num_sites()];
    match &map.records {
        FieldRecords::Chain(records) => {
            for (t, f) in lattice.hyper_sites.iter().zip(records) {
                let (s0, s1) = chain_reconstruct(f, step, nu);
                spins[t[0]] = s0;
                spins[t[1]] = s1;
            }
        }
        FieldRecords::Tri(records) => {
            for (t, f) in lattice.hyper_sites.iter().zip(records) {
                let s = tri_reconstruct(f, step, nu);
                for (k, &site) in t.iter().enumerate() {
                    spins[site] = s[k];
                }
            }
        }
        FieldRecords::Square(records) => {
            for (t, f) in lattice.hyper_sites.iter().zip(records) {
                let s = square_reconstruct(f, step, nu);
                for (k, &site) in t.iter().enumerate() {
                    spins[site] = s[k];
                }
            }
        }
    }
    SpinConfiguration { lattice: map.lattice.clone(), nu, spins, seed: None }
}

/// Multiplies the complex representations by `e^{-i delta_p}` and advances
/// the stored gauge angles; every real field is left untouched.
pub fn apply_gauge(map: &FieldMap, delta: &[f64]) -> Result<FieldMap> {
    if delta.len() != map.records.len() {
        return Err(Error::SizeMismatch(format!(
            "{} gauge shifts for {} hyper-sites",
            delta.len(),
            map.records.len()
        )));
    }
    let records = match &map.records {
        FieldRecords::Chain(records) => FieldRecords::Chain(records.clone()),
        FieldRecords::Tri(records) => FieldRecords::Tri(
            records
                .iter()
                .zip(delta)
                .map(|(f, &d)| TriFields {
                    n: f.n.phase_mul(phase(-d)),
                    gamma: (f.gamma + d).rem_euclid(TAU),
                    ..*f
                })
                .collect(),
        ),
        FieldRecords::Square(records) => FieldRecords::Square(
            records
                .iter()
                .zip(delta)
                .map(|(f, &d)| SquareFields {
                    d: f.d.phase_mul(phase(-d)),
                    gamma: (f.gamma + d).rem_euclid(TAU),
                    ..*f
                })
                .collect(),
        ),
    };
    Ok(FieldMap { lattice: map.lattice.clone(), nu: map.nu, records })
}
