//! Seeded random test objects: band-limited fields and smooth diffeomorphisms.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::group::LiftedDiffeo;
use crate::spectral::{Field, GridSpec};

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Largest wavenumber for which all pairwise products stay below the
/// dealiasing cutoff.
pub fn band_limit(grid: &GridSpec) -> usize {
    grid.dealias_cutoff() / 2
}

/// Random real field with modes `|k| <= max_k` and `1/k` decaying amplitudes.
pub fn band_limited_field(grid: GridSpec, max_k: usize, rng: &mut TestRng) -> Field {
    let mut modes = vec![(0, Complex64::new(rng.random_range(-1.0..1.0), 0.0))];
    for k in 1..=max_k as i64 {
        let amp = 1.0 / k as f64;
        modes.push((
            k,
            Complex64::new(rng.random_range(-amp..amp), rng.random_range(-amp..amp)),
        ));
    }
    Field::from_modes(grid, &modes).expect("max_k resolved on grid")
}

pub fn zero_mean_field(grid: GridSpec, max_k: usize, rng: &mut TestRng) -> Field {
    let f = band_limited_field(grid, max_k, rng);
    f.add_constant(-f.mean())
}

/// `x + Σ_{k<=4} a_k sin(kx + φ_k)` with `Σ k|a_k| <= 0.5`, so the derivative
/// stays in `[0.5, 1.5]`.
pub fn smooth_diffeo(grid: GridSpec, rng: &mut TestRng) -> LiftedDiffeo {
    let weights: Vec<f64> = (0..4).map(|_| rng.random_range(0.0..1.0)).collect();
    let budget = 0.5 * rng.random_range(0.3..1.0);
    let total: f64 = weights.iter().enumerate().map(|(i, w)| (i + 1) as f64 * w).sum();
    let terms: Vec<(f64, f64, f64)> = weights
        .iter()
        .enumerate()
        .map(|(i, w)| ((i + 1) as f64, w * budget / total, rng.random_range(0.0..2.0 * PI)))
        .collect();
    let p = Field::from_fn(grid, |x| terms.iter().map(|(k, a, ph)| a * (k * x + ph).sin()).sum());
    LiftedDiffeo::new(p).expect("derivative bounded below by 0.5")
}
