//! Shared inputs for the benchmarks.

use virasoro::group::LiftedDiffeo;
use virasoro::{sampling, Field, GridSpec};

pub const SIZES: [usize; 3] = [64, 256, 1024];

pub fn field(n: usize, seed: u64) -> Field {
    let g = GridSpec::new(n).expect("even size");
    sampling::band_limited_field(g, sampling::band_limit(&g), &mut sampling::rng(seed))
}

pub fn diffeos(n: usize, seed: u64) -> (LiftedDiffeo, LiftedDiffeo) {
    let g = GridSpec::new(n).expect("even size");
    let mut rng = sampling::rng(seed);
    (sampling::smooth_diffeo(g, &mut rng), sampling::smooth_diffeo(g, &mut rng))
}
