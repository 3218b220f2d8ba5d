//! Exact-equivalence check of the spatial indexes against a linear-scan
//! oracle over a long random insert/query interleaving.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use surfnodes::real::dist_sq;
use surfnodes::spatial::SpatialIndex;

/// Brute-force oracle mirroring the index contract: smallest squared
/// distance, ties broken by lowest insertion id, computed with the same
/// distance expression the indexes use.
struct LinearScan {
    dim: usize,
    data: Vec<f64>,
}

impl LinearScan {
    fn new(dim: usize) -> Self {
        LinearScan { dim, data: Vec::new() }
    }

    fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    fn insert(&mut self, p: &[f64]) {
        self.data.extend_from_slice(p);
    }

    fn nearest(&self, q: &[f64]) -> (u32, f64) {
        let mut best_id = 0u32;
        let mut best = f64::INFINITY;
        for (i, p) in self.data.chunks_exact(self.dim).enumerate() {
            let d2 = dist_sq(p, q);
            if d2 < best {
                best = d2;
                best_id = i as u32;
            }
        }
        (best_id, best)
    }
}

fn run_interleaving(mut index: SpatialIndex<f64>, ops: usize, seed: u64) {
    let dim = 3;
    let mut oracle = LinearScan::new(dim);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut p = [0.0f64; 3];
    let mut queries = 0u64;
    for _ in 0..ops {
        for v in p.iter_mut() {
            *v = rng.gen::<f64>() * 2.0 - 1.0;
        }
        // Mostly inserts early (so queries always have content), then an
        // even mix; occasional duplicate insertions exercise tie-breaking.
        let duplicate = oracle.len() > 0 && rng.gen::<f64>() < 0.02;
        if duplicate {
            let pick = rng.gen_range(0..oracle.len());
            p.copy_from_slice(&oracle.data[pick * dim..(pick + 1) * dim]);
        }
        if oracle.len() == 0 || rng.gen::<f64>() < 0.5 {
            index.insert(&p).unwrap();
            oracle.insert(&p);
        } else {
            let (want_id, want_d2) = oracle.nearest(&p);
            let got = index.nearest(&p).unwrap();
            assert_eq!(got.id, want_id, "neighbor id diverged from linear scan");
            assert_eq!(got.dist_sq, want_d2, "squared distance diverged from linear scan");
            queries += 1;
        }
    }
    assert!(queries > ops as u64 / 3, "interleaving degenerated: only {queries} queries");
}

#[test]
fn kdtree_matches_linear_scan_on_100k_interleavings() {
    run_interleaving(SpatialIndex::kdtree(3), 100_000, 31);
}

#[test]
fn grid_matches_linear_scan_on_100k_interleavings() {
    run_interleaving(SpatialIndex::grid(3, 0.05).unwrap(), 100_000, 32);
}

#[test]
fn nearest_distance_is_monotone_under_insertion() {
    // Inserting can only bring the nearest neighbor closer, never move it
    // away — for a fixed query probed after every insertion.
    let mut index = SpatialIndex::kdtree(2);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let q = [0.25, -0.4];
    let mut last = f64::INFINITY;
    for _ in 0..2000 {
        let p = [rng.gen::<f64>() * 4.0 - 2.0, rng.gen::<f64>() * 4.0 - 2.0];
        index.insert(&p).unwrap();
        let d = index.nearest(&q).unwrap().dist_sq;
        assert!(d <= last, "nearest distance increased after an insert");
        last = d;
    }
}
