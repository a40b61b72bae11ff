//! Hot-path benchmarks: per-hyper-site transforms, whole-lattice
//! decomposition, and the dynamics sweeps.

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use hyperspin_core::{
    build_lattice, constraint_residuals, decompose_config, random_config, square_decompose,
    tri_decompose, CouplingConstant, GaugeField, LatticeKind, LatticeSpec, Vec3,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;
use std::hint::black_box;
use std::sync::Arc;

fn random_units(count: usize, seed: u64) -> Vec<Vec3> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| loop {
            let v = Vec3::new(
                rng.random::<f64>() * 2.0 - 1.0,
                rng.random::<f64>() * 2.0 - 1.0,
                rng.random::<f64>() * 2.0 - 1.0,
            );
            if let Some(u) = v.normalized() {
                if v.norm() <= 1.0 {
                    break u;
                }
            }
        })
        .collect()
}

fn bench_transforms(c: &mut Criterion) {
    let spins = random_units(4096, 1);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let gammas: Vec<f64> = (0..1024).map(|_| rng.random_range(0.0..TAU)).collect();

    c.bench_function("tri_decompose", |b| {
        let mut i = 0;
        b.iter(|| {
            let t = [spins[i % 4096], spins[(i + 1) % 4096], spins[(i + 2) % 4096]];
            let f = tri_decompose(black_box(t), gammas[i % 1024], 1.0, 1.0).unwrap();
            i += 3;
            black_box(f)
        })
    });

    c.bench_function("square_decompose", |b| {
        let mut i = 0;
        b.iter(|| {
            let t = [
                spins[i % 4096],
                spins[(i + 1) % 4096],
                spins[(i + 2) % 4096],
                spins[(i + 3) % 4096],
            ];
            let f = square_decompose(black_box(t), gammas[i % 1024], 1.0, 1.0).unwrap();
            i += 4;
            black_box(f)
        })
    });
}

fn bench_lattice_paths(c: &mut Criterion) {
    let lattice = Arc::new(
        build_lattice(&LatticeSpec::new(LatticeKind::Triangular, vec![8, 8], 1.0)).unwrap(),
    );
    let config = random_config(lattice.clone(), 1.0, 3);
    let gauge = GaugeField::random(lattice.hyper_sites.len(), 4);

    c.bench_function("decompose_config_tri_8x8", |b| {
        b.iter(|| black_box(decompose_config(&config, &gauge, false).unwrap()))
    });

    c.bench_function("constraint_residuals_tri_8x8", |b| {
        b.iter(|| black_box(constraint_residuals(&config, &gauge, false).unwrap()))
    });
}

fn bench_dynamics(c: &mut Criterion) {
    let lattice =
        Arc::new(build_lattice(&LatticeSpec::new(LatticeKind::Square, vec![8, 8], 1.0)).unwrap());
    let j = CouplingConstant::new(1.0).unwrap();

    c.bench_function("align_sweep_square_16x16", |b| {
        b.iter_batched(
            || (random_config(lattice.clone(), 1.0, 5), ChaCha8Rng::seed_from_u64(6)),
            |(mut cfg, mut rng)| black_box(hyperspin_core::align_sweep(&mut cfg, j, &mut rng)),
            BatchSize::SmallInput,
        )
    });

    c.bench_function("metropolis_sweep_square_16x16", |b| {
        let opts = hyperspin_core::McOptions {
            beta: 5.0,
            sweeps: 1,
            proposal_angle: 0.5,
            rng_seed: 7,
        };
        b.iter_batched(
            || (random_config(lattice.clone(), 1.0, 8), ChaCha8Rng::seed_from_u64(9)),
            |(mut cfg, mut rng)| {
                black_box(hyperspin_core::metropolis_sweep(&mut cfg, j, &opts, &mut rng))
            },
            BatchSize::SmallInput,
        )
    });
}

criterion_group!(benches, bench_transforms, bench_lattice_paths, bench_dynamics);
criterion_main!(benches);
