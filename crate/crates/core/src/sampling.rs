//! Deterministic sampling of points near a base point.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::ToleranceConfig;
use crate::error::{check_dim, Error, Result};
use crate::linalg::dist;
use crate::sets::{SetDesc, WORKING_HALF_WIDTH};

/// Generator for one purpose, derived from the run seed and a stream path.
pub fn rng_for(seed: u64, stream: &[u64]) -> ChaCha8Rng {
    // splitmix64 folding keeps nearby streams decorrelated.
    let mut h = seed ^ 0x9E37_79B9_7F4A_7C15;
    for s in stream {
        h = h.wrapping_add(*s).wrapping_add(0x9E37_79B9_7F4A_7C15);
        h = (h ^ (h >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        h = (h ^ (h >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        h ^= h >> 31;
    }
    ChaCha8Rng::seed_from_u64(h)
}

/// Stable numeric tag for a stream name.
pub fn stream_tag(name: &str) -> u64 {
    name.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3))
}

/// Uniform point of the ball `B(center, r)` by rejection from the cube.
pub fn ball_point(rng: &mut ChaCha8Rng, center: &[f64], r: f64) -> Vec<f64> {
    loop {
        let u: Vec<f64> = center.iter().map(|_| rng.gen_range(-1.0..=1.0)).collect();
        let n2: f64 = u.iter().map(|v| v * v).sum();
        if n2 <= 1.0 {
            return center.iter().zip(&u).map(|(c, v)| c + r * v).collect();
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Samples {
    pub points: Vec<Vec<f64>>,
    /// Fewer than the requested number of points were found.
    pub shortfall: bool,
}

/// Points of `S ∩ B(center, r)`: uniform ball points projected onto `S`, kept
/// when the projection stays in the ball. The center always comes first.
pub fn sample_near(
    s: &SetDesc,
    center: &[f64],
    r: f64,
    count: usize,
    seed: u64,
    cfg: &ToleranceConfig,
) -> Result<Samples> {
    check_dim(s.dim(), center.len())?;
    if !(r > 0.0) {
        return Err(Error::Input("sampling radius must be positive".into()));
    }
    let r = r.min(WORKING_HALF_WIDTH);
    let mut rng = rng_for(seed, &[r.to_bits(), count as u64]);
    let mut points = vec![center.to_vec()];
    let max_attempts = 50 * count + 100;
    let mut attempts = 0;
    while points.len() < count && attempts < max_attempts {
        attempts += 1;
        let y = ball_point(&mut rng, center, r);
        let proj = match s.project(&y, cfg) {
            Ok(p) => p,
            Err(Error::Numerical { .. }) => continue,
            Err(e) => return Err(e),
        };
        if let Some(p) = proj.into_iter().next() {
            if dist(&p, center) <= r * (1.0 + 1e-12) {
                points.push(p);
            }
        }
    }
    let shortfall = points.len() < count;
    Ok(Samples { points, shortfall })
}

/// Samples on geometric shells `r_max, r_max/2, ...` down to `r_min`, with
/// `per_shell` points each (the center excluded).
pub fn shell_samples(
    s: &SetDesc,
    center: &[f64],
    r_max: f64,
    r_min: f64,
    per_shell: usize,
    seed: u64,
    cfg: &ToleranceConfig,
) -> Result<Samples> {
    let mut points = Vec::new();
    let mut shortfall = false;
    let mut r = r_max;
    let mut k = 0u64;
    while r >= r_min {
        let batch = sample_near(s, center, r, per_shell + 1, seed.wrapping_add(k), cfg)?;
        shortfall |= batch.shortfall;
        points.extend(batch.points.into_iter().skip(1));
        r *= 0.5;
        k += 1;
    }
    Ok(Samples { points, shortfall })
}
