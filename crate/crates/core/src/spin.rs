//! Classical spin configurations of uniform length and the reference states
//! (Neel, 120-degree, columnar, ferro, twisted textures, random).

use crate::error::{Error, Result};
use crate::lattice::{Lattice, LatticeKind};
use crate::report::{GaugeDescriptor, ResidualReport};
use crate::vec3::{Mat3, Vec3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use std::sync::Arc;

/// Spin quantum number; any positive real is accepted in the classical limit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpinQuantumNumber(f64);

impl SpinQuantumNumber {
    pub fn new(s: f64) -> Result<Self> {
        if s > 0.0 && s.is_finite() {
            Ok(SpinQuantumNumber(s))
        } else {
            Err(Error::Domain(format!("spin quantum number must be positive, got {s}")))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }

    /// Classical spin length sqrt(s(s+1)).
    pub fn length(self) -> f64 {
        (self.0 * (self.0 + 1.0)).sqrt()
    }
}

/// sqrt(s(s+1)) for s > 0.
pub fn spin_length(s: f64) -> Result<f64> {
    Ok(SpinQuantumNumber::new(s)?.length())
}

/// Per-site 3-vectors of common length `nu` on a shared lattice.
#[derive(Clone, Debug)]
pub struct SpinConfiguration {
    pub lattice: Arc<Lattice>,
    pub nu: f64,
    pub spins: Vec<Vec3>,
    /// Seed recorded when the configuration came from a random generator.
    pub seed: Option<u64>,
}

impl SpinConfiguration {
    /// Reports `||S_i| - nu|` per site.
    pub fn validate_norms(&self) -> ResidualReport {
        let mut report = ResidualReport::new("site", GaugeDescriptor::Canonical);
        let dev: Vec<f64> = self.spins.iter().map(|s| (s.norm() - self.nu).abs()).collect();
        report.push("spin_norm_deviation", dev);
        report
    }

    /// Applies one rotation matrix to every spin.
    pub fn rotate_all(&mut self, r: Mat3) {
        for s in &mut self.spins {
            *s = r.apply(*s);
        }
    }

    pub fn energy_per_site(&self, energy: f64) -> f64 {
        energy / self.lattice.num_sites() as f64
    }
}

/// Reference state families. The axis (or frame) is normalized on use; a
/// vanishing axis is a configuration error.
#[derive(Clone, Debug, PartialEq)]
pub enum ReferenceFamily {
    /// All spins along `axis`.
    Ferro { axis: Vec3 },
    /// Spins alternate `+axis`/`-axis` by sublattice parity (chain, square).
    Neel { axis: Vec3 },
    /// Three-sublattice state at mutual 120 degrees in the plane of
    /// `(e1, e2)` (triangular only).
    Tri120 { e1: Vec3, e2: Vec3 },
    /// Stripes: sign alternates along the second coordinate (square only).
    Columnar { axis: Vec3 },
    /// The staggered state of the kind, rotated about the axis normal to the
    /// spin plane by `kappa * x` (x the first physical coordinate).
    Twist { axis: Vec3, kappa: f64 },
}

fn unit(v: Vec3, what: &str) -> Result<Vec3> {
    v.normalized().ok_or_else(|| Error::Config(format!("{what} must be a nonzero vector")))
}

/// Deterministic unit vector orthogonal to `u`.
fn orthogonal_unit(u: Vec3) -> Vec3 {
    let pick = if u.dot(Vec3::X).abs() < 0.9 { Vec3::X } else { Vec3::Y };
    let raw = pick - u * u.dot(pick);
    raw.normalized().expect("orthogonal complement of a unit vector")
}

fn tri120_spin(nu: f64, e1: Vec3, e2: Vec3, sublattice: usize) -> Vec3 {
    let theta = 2.0 * std::f64::consts::PI * sublattice as f64 / 3.0;
    e1 * (nu * theta.cos()) + e2 * (nu * theta.sin())
}

/// Builds the requested reference state; errors when the family does not
/// apply to the lattice kind.
pub fn reference_config(
    lattice: Arc<Lattice>,
    nu: f64,
    family: &ReferenceFamily,
) -> Result<SpinConfiguration> {
    if !(nu > 0.0 && nu.is_finite()) {
        return Err(Error::Domain(format!("nu must be positive, got {nu}")));
    }
    let kind = lattice.spec.kind;
    let n = lattice.num_sites();
    let mismatch = |family: &str| {
        Err(Error::Config(format!("family {family} does not apply to the {kind} lattice")))
    };

    let spins: Vec<Vec3> = match family {
        ReferenceFamily::Ferro { axis } => {
            let u = unit(*axis, "ferro axis")?;
            (0..n).map(|_| u * nu).collect()
        }
        ReferenceFamily::Neel { axis } => {
            if kind == LatticeKind::Triangular {
                return mismatch("neel");
            }
            let u = unit(*axis, "neel axis")?;
            (0..n).map(|i| u * (nu * lattice.neel_sign(i))).collect()
        }
        ReferenceFamily::Tri120 { e1, e2 } => {
            if kind != LatticeKind::Triangular {
                return mismatch("tri120");
            }
            let f1 = unit(*e1, "tri120 frame")?;
            let raw2 = *e2 - f1 * f1.dot(*e2);
            let f2 = unit(raw2, "tri120 frame (second vector parallel to first)")?;
            (0..n).map(|i| tri120_spin(nu, f1, f2, lattice.tuple_position(i))).collect()
        }
        ReferenceFamily::Columnar { axis } => {
            if kind != LatticeKind::Square {
                return mismatch("columnar");
            }
            let u = unit(*axis, "columnar axis")?;
            (0..n).map(|i| u * (nu * lattice.row_sign(i))).collect()
        }
        ReferenceFamily::Twist { axis, kappa } => {
            let u = unit(*axis, "twist axis")?;
            let v = orthogonal_unit(u);
            let rotation_axis = u.cross(v);
            let base = match kind {
                LatticeKind::Triangular => ReferenceFamily::Tri120 { e1: u, e2: v },
                _ => ReferenceFamily::Neel { axis: u },
            };
            let untwisted = reference_config(lattice.clone(), nu, &base)?;
            let step = lattice.spec.step;
            untwisted
                .spins
                .iter()
                .enumerate()
                .map(|(i, s)| {
                    let x = lattice.site_positions[i][0] * step;
                    Mat3::rotation_about(rotation_axis, kappa * x).apply(*s)
                })
                .collect()
        }
    };

    Ok(SpinConfiguration { lattice, nu, spins, seed: None })
}

/// Uniform point on the sphere via a normalized Gaussian triple.
pub(crate) fn random_unit(rng: &mut ChaCha8Rng) -> Vec3 {
    loop {
        let v = Vec3::new(
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        );
        if let Some(u) = v.normalized() {
            if v.norm() > 1e-6 {
                return u;
            }
        }
    }
}

/// Spins i.i.d. uniform on the sphere of radius `nu`; the same seed always
/// reproduces the same configuration.
pub fn random_config(lattice: Arc<Lattice>, nu: f64, seed: u64) -> SpinConfiguration {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spins = (0..lattice.num_sites()).map(|_| random_unit(&mut rng) * nu).collect();
    SpinConfiguration { lattice, nu, spins, seed: Some(seed) }
}
