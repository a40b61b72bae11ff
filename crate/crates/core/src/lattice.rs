//! Lattice construction: sites, nearest-neighbour bonds, and the partition
//! into hyper-sites labelled by roots of unity.
//!
//! Conventions (the underlying algebra never fixes them, so they are pinned
//! here once and documented):
//!
//! * Chain: hyper-site `i` is the consecutive pair `(2i, 2i+1)` with labels
//!   `(+1, -1)`.
//! * Triangular: hyper-sites are up-pointing triangles. Hyper-cells sit on the
//!   sqrt(3) x sqrt(3) superlattice spanned by `A1 = (3/2, sqrt3/2)` and
//!   `A2 = (0, sqrt3)` (in units of the lattice step), with basis
//!   `r0 = (0,0)`, `r1 = (1,0)`, `r2 = (1/2, sqrt3/2)` listed counterclockwise
//!   from the lower-left vertex. Every site of the triangular lattice lies in
//!   exactly one up-triangle.
//! * Square: hyper-sites are 2x2 plaquettes labelled counterclockwise,
//!   `p0 = (0,0)`, `p1 = (1,0)`, `p2 = (1,1)`, `p3 = (0,1)`, so the `+1/-1`
//!   labels land on one Neel sublattice (a diagonal pair) and `+i/-i` on the
//!   other.
//!
//! Bonds are found by geometric distance matching under the periodic metric
//! rather than by index arithmetic: one code path for all three kinds, and the
//! coordination-number checks below make it self-verifying.

use crate::error::{Error, Result};
use crate::report::{GaugeDescriptor, ResidualReport, Violation, ViolationKind};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Relative tolerance for bond-distance matching, in units of the step.
pub const BOND_TOL: f64 = 1e-9;

const SQRT3: f64 = 1.732_050_807_568_877_3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LatticeKind {
    Chain,
    Triangular,
    Square,
}

impl LatticeKind {
    /// Spatial dimension of the crystal.
    pub fn dimension(self) -> usize {
        match self {
            LatticeKind::Chain => 1,
            LatticeKind::Triangular | LatticeKind::Square => 2,
        }
    }

    /// Number of sites in one hyper-site.
    pub fn hyper_site_size(self) -> usize {
        match self {
            LatticeKind::Chain => 2,
            LatticeKind::Triangular => 3,
            LatticeKind::Square => 4,
        }
    }

    /// Nearest-neighbour coordination under periodic boundaries.
    pub fn coordination(self) -> usize {
        match self {
            LatticeKind::Chain => 2,
            LatticeKind::Triangular => 6,
            LatticeKind::Square => 4,
        }
    }
}

impl std::fmt::Display for LatticeKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            LatticeKind::Chain => "chain",
            LatticeKind::Triangular => "triangular",
            LatticeKind::Square => "square",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub kind: LatticeKind,
    /// Hyper-cells per lattice direction: one entry for the chain, two for
    /// the triangular and square lattices.
    pub extent: Vec<usize>,
    /// Lattice step (edge length of the polytope) in physical units.
    pub step: f64,
    pub periodic: bool,
}

impl LatticeSpec {
    pub fn new(kind: LatticeKind, extent: Vec<usize>, step: f64) -> Self {
        LatticeSpec { kind, extent, step, periodic: true }
    }

    pub fn validate(&self) -> Result<()> {
        let want = self.kind.dimension();
        if self.extent.len() != want {
            return Err(Error::Config(format!(
                "{} lattice needs {} extent value(s), got {}",
                self.kind,
                want,
                self.extent.len()
            )));
        }
        if self.extent.iter().any(|&e| e < 2) {
            return Err(Error::Config(format!(
                "extents must be >= 2 in every direction, got {:?}",
                self.extent
            )));
        }
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::Config(format!("step must be positive, got {}", self.step)));
        }
        if !self.periodic {
            return Err(Error::Unsupported("open boundaries are not supported".into()));
        }
        Ok(())
    }

    pub fn hyper_cells(&self) -> usize {
        self.extent.iter().product()
    }
}

/// The ordered unit-modulus labels attached to the sites of one hyper-site.
#[derive(Clone, Debug)]
pub struct PolytopeRep {
    pub labels: Vec<Complex64>,
}

impl PolytopeRep {
    pub fn for_kind(kind: LatticeKind) -> Self {
        let labels = match kind {
            LatticeKind::Chain => vec![Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)],
            LatticeKind::Triangular => {
                let w = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
                vec![Complex64::new(1.0, 0.0), w, w * w]
            }
            LatticeKind::Square => vec![
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 1.0),
                Complex64::new(-1.0, 0.0),
                Complex64::new(0.0, -1.0),
            ],
        };
        PolytopeRep { labels }
    }

    /// Checks modulus one and zero sum for every label set.
    pub fn validate(&self) -> Result<()> {
        for (k, label) in self.labels.iter().enumerate() {
            if (label.norm() - 1.0).abs() > 1e-12 {
                return Err(Error::Domain(format!("label {k} has modulus {}", label.norm())));
            }
        }
        let sum: Complex64 = self.labels.iter().sum();
        if sum.norm() > 1e-12 {
            return Err(Error::Domain(format!("labels sum to {sum}, expected 0")));
        }
        Ok(())
    }
}

/// Sites, bonds, and the hyper-site partition of one finite periodic crystal.
///
/// Positions are stored in units of the step; the second coordinate is zero
/// for chains. Construction is pure and the result immutable, so a `Lattice`
/// can be shared freely across threads.
#[derive(Clone, Debug, PartialEq)]
pub struct Lattice {
    pub spec: LatticeSpec,
    pub site_positions: Vec<[f64; 2]>,
    pub bonds: Vec<(usize, usize)>,
    /// Tuple position `k` carries polytope label `k`.
    pub hyper_sites: Vec<Vec<usize>>,
    adjacency: Vec<Vec<usize>>,
}

impl Lattice {
    pub fn num_sites(&self) -> usize {
        self.site_positions.len()
    }

    pub fn neighbors(&self, site: usize) -> &[usize] {
        &self.adjacency[site]
    }

    /// Torus translation vectors in units of the step.
    pub fn torus_vectors(&self) -> Vec<[f64; 2]> {
        torus_vectors(&self.spec)
    }

    /// Shortest periodic distance between two sites, in units of the step.
    pub fn min_image_distance(&self, a: usize, b: usize) -> f64 {
        let pa = self.site_positions[a];
        let pb = self.site_positions[b];
        min_image_distance([pa[0] - pb[0], pa[1] - pb[1]], &self.torus_vectors())
    }

    /// Integer coordinates of a site; chain and square sites sit on the
    /// integer grid, triangular sites do not (second entry unused there).
    fn int_coords(&self, site: usize) -> (i64, i64) {
        let p = self.site_positions[site];
        (p[0].round() as i64, p[1].round() as i64)
    }

    /// +1/-1 alternation used by the Neel and columnar reference states.
    pub fn neel_sign(&self, site: usize) -> f64 {
        let (x, y) = self.int_coords(site);
        if (x + y).rem_euclid(2) == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// Sign alternating with the second coordinate only (square stripes).
    pub fn row_sign(&self, site: usize) -> f64 {
        let (_, y) = self.int_coords(site);
        if y.rem_euclid(2) == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// Index of the site within its hyper-site tuple; equals the basis index
    /// by construction.
    pub fn tuple_position(&self, site: usize) -> usize {
        site % self.spec.kind.hyper_site_size()
    }
}

fn torus_vectors(spec: &LatticeSpec) -> Vec<[f64; 2]> {
    match spec.kind {
        LatticeKind::Chain => vec![[2.0 * spec.extent[0] as f64, 0.0]],
        LatticeKind::Triangular => {
            let (lx, ly) = (spec.extent[0] as f64, spec.extent[1] as f64);
            vec![[1.5 * lx, 0.5 * SQRT3 * lx], [0.0, SQRT3 * ly]]
        }
        LatticeKind::Square => {
            let (lx, ly) = (spec.extent[0] as f64, spec.extent[1] as f64);
            vec![[2.0 * lx, 0.0], [0.0, 2.0 * ly]]
        }
    }
}

fn min_image_distance(delta: [f64; 2], torus: &[[f64; 2]]) -> f64 {
    let mut best = f64::INFINITY;
    let range = [-1i32, 0, 1];
    match torus.len() {
        1 => {
            for &k in &range {
                let dx = delta[0] + k as f64 * torus[0][0];
                let dy = delta[1] + k as f64 * torus[0][1];
                best = best.min((dx * dx + dy * dy).sqrt());
            }
        }
        _ => {
            for &k1 in &range {
                for &k2 in &range {
                    let dx = delta[0] + k1 as f64 * torus[0][0] + k2 as f64 * torus[1][0];
                    let dy = delta[1] + k1 as f64 * torus[0][1] + k2 as f64 * torus[1][1];
                    best = best.min((dx * dx + dy * dy).sqrt());
                }
            }
        }
    }
    best
}

/// Builds the lattice for a validated spec.
///
/// Site ordering is row-major over hyper-cells, then basis index, so the same
/// spec always produces the identical lattice byte for byte.
pub fn build_lattice(spec: &LatticeSpec) -> Result<Lattice> {
    spec.validate()?;
    let mut positions: Vec<[f64; 2]> = Vec::new();
    let mut hyper_sites: Vec<Vec<usize>> = Vec::new();

    match spec.kind {
        LatticeKind::Chain => {
            for cell in 0..spec.extent[0] {
                let base = positions.len();
                positions.push([2.0 * cell as f64, 0.0]);
                positions.push([2.0 * cell as f64 + 1.0, 0.0]);
                hyper_sites.push(vec![base, base + 1]);
            }
        }
        LatticeKind::Triangular => {
            let a1 = [1.5, 0.5 * SQRT3];
            let a2 = [0.0, SQRT3];
            let basis = [[0.0, 0.0], [1.0, 0.0], [0.5, 0.5 * SQRT3]];
            for n2 in 0..spec.extent[1] {
                for n1 in 0..spec.extent[0] {
                    let ox = n1 as f64 * a1[0] + n2 as f64 * a2[0];
                    let oy = n1 as f64 * a1[1] + n2 as f64 * a2[1];
                    let base = positions.len();
                    for r in &basis {
                        positions.push([ox + r[0], oy + r[1]]);
                    }
                    hyper_sites.push(vec![base, base + 1, base + 2]);
                }
            }
        }
        LatticeKind::Square => {
            let basis = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
            for n2 in 0..spec.extent[1] {
                for n1 in 0..spec.extent[0] {
                    let ox = 2.0 * n1 as f64;
                    let oy = 2.0 * n2 as f64;
                    let base = positions.len();
                    for r in &basis {
                        positions.push([ox + r[0], oy + r[1]]);
                    }
                    hyper_sites.push(vec![base, base + 1, base + 2, base + 3]);
                }
            }
        }
    }

    let torus = torus_vectors(spec);
    let n = positions.len();
    let mut bonds = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let delta = [positions[i][0] - positions[j][0], positions[i][1] - positions[j][1]];
            if (min_image_distance(delta, &torus) - 1.0).abs() <= BOND_TOL {
                bonds.push((i, j));
            }
        }
    }

    let mut adjacency = vec![Vec::new(); n];
    for &(i, j) in &bonds {
        adjacency[i].push(j);
        adjacency[j].push(i);
    }

    let lattice = Lattice {
        spec: spec.clone(),
        site_positions: positions,
        bonds,
        hyper_sites,
        adjacency,
    };

    // Self-check the distance builder against the analytic counts.
    let expected_bonds = lattice.num_sites() * lattice.spec.kind.coordination() / 2;
    if lattice.bonds.len() != expected_bonds {
        return Err(Error::Config(format!(
            "bond builder produced {} bonds, expected {}",
            lattice.bonds.len(),
            expected_bonds
        )));
    }
    Ok(lattice)
}

/// Checks the hyper-site partition: every site in exactly one tuple, tuples
/// of the right arity with the conventional geometry, and uniform bond
/// lengths. Problems are reported, never thrown.
pub fn validate_partition(lattice: &Lattice) -> ResidualReport {
    let mut report = ResidualReport::new("hyper_site", GaugeDescriptor::Canonical);
    let size = lattice.spec.kind.hyper_site_size();
    let torus = lattice.torus_vectors();

    let mut coverage = vec![0usize; lattice.num_sites()];
    for tuple in &lattice.hyper_sites {
        if tuple.len() != size {
            report.violations.push(Violation {
                kind: ViolationKind::LabelArity,
                detail: format!("tuple {:?} has {} sites, expected {}", tuple, tuple.len(), size),
            });
        }
        for &s in tuple {
            if s < coverage.len() {
                coverage[s] += 1;
            }
        }
    }
    for (site, &count) in coverage.iter().enumerate() {
        if count == 0 {
            report.violations.push(Violation {
                kind: ViolationKind::OrphanSite,
                detail: format!("site {site} belongs to no hyper-site"),
            });
        } else if count > 1 {
            report.violations.push(Violation {
                kind: ViolationKind::DoubleAssignment,
                detail: format!("site {site} belongs to {count} hyper-sites"),
            });
        }
    }

    let mut bond_dev = Vec::with_capacity(lattice.bonds.len());
    for &(i, j) in &lattice.bonds {
        let dev = (lattice.min_image_distance(i, j) - 1.0).abs();
        bond_dev.push(dev);
        if dev > BOND_TOL {
            report.violations.push(Violation {
                kind: ViolationKind::BondLength,
                detail: format!("bond ({i},{j}) has length deviation {dev}"),
            });
        }
    }
    report.push("bond_length_deviation", bond_dev);

    // Geometry of each complete tuple: cyclically consecutive members are
    // polytope edges (distance 1); square diagonals are sqrt(2).
    let mut geo_dev = Vec::with_capacity(lattice.hyper_sites.len());
    for (h, tuple) in lattice.hyper_sites.iter().enumerate() {
        if tuple.len() != size {
            geo_dev.push(f64::NAN);
            continue;
        }
        let mut worst = 0.0f64;
        let pair_dev = |a: usize, b: usize, want: f64| -> f64 {
            let pa = lattice.site_positions[a];
            let pb = lattice.site_positions[b];
            (min_image_distance([pa[0] - pb[0], pa[1] - pb[1]], &torus) - want).abs()
        };
        match lattice.spec.kind {
            LatticeKind::Chain => worst = worst.max(pair_dev(tuple[0], tuple[1], 1.0)),
            LatticeKind::Triangular => {
                for k in 0..3 {
                    worst = worst.max(pair_dev(tuple[k], tuple[(k + 1) % 3], 1.0));
                }
            }
            LatticeKind::Square => {
                for k in 0..4 {
                    worst = worst.max(pair_dev(tuple[k], tuple[(k + 1) % 4], 1.0));
                }
                worst = worst.max(pair_dev(tuple[0], tuple[2], std::f64::consts::SQRT_2));
                worst = worst.max(pair_dev(tuple[1], tuple[3], std::f64::consts::SQRT_2));
            }
        }
        geo_dev.push(worst);
        if worst > BOND_TOL {
            report.violations.push(Violation {
                kind: ViolationKind::Geometry,
                detail: format!("hyper-site {h} deviates from the labelled polytope by {worst}"),
            });
        }
    }
    report.push("tuple_geometry_deviation", geo_dev);
    report
}
