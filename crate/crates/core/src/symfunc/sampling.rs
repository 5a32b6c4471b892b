//! Seeded random sampling of points inside a cone.
//!
//! Half of the draws are rejection samples from the box `[-B, B]^n`; the
//! other half shift a box sample along `(1, …, 1)` to reach the deep
//! interior.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::cone::ConeSpec;
use super::kappa::KappaVector;
use crate::error::{Error, Result};

pub const DEFAULT_BOX: f64 = 5.0;

pub struct ConeSampler {
    cone: ConeSpec,
    half_width: f64,
    rng: ChaCha8Rng,
    flip: bool,
}

impl ConeSampler {
    pub fn new(cone: ConeSpec, half_width: f64, seed: u64) -> Self {
        ConeSampler { cone, half_width, rng: ChaCha8Rng::seed_from_u64(seed), flip: false }
    }

    fn draw(&mut self) -> Vec<f64> {
        let b = self.half_width;
        let n = self.cone.n;
        let mut x: Vec<f64> = (0..n).map(|_| self.rng.random_range(-b..b)).collect();
        self.flip = !self.flip;
        if self.flip {
            let t = self.rng.random_range(0.0..b);
            x.iter_mut().for_each(|v| *v += t);
        }
        x
    }

    /// Next point strictly inside the cone.
    pub fn next_point(&mut self) -> Result<KappaVector> {
        for _ in 0..1_000_000 {
            let x = KappaVector::new(self.draw())?;
            if self.cone.contains(&x) {
                return Ok(x);
            }
        }
        Err(Error::InvalidParameter(format!("could not sample from {}", self.cone)))
    }

    pub fn sample(&mut self, count: usize) -> Result<Vec<KappaVector>> {
        (0..count).map(|_| self.next_point()).collect()
    }
}

/// Unconstrained box samples, for containment tests between cones.
pub fn box_samples(n: usize, half_width: f64, count: usize, seed: u64) -> Vec<KappaVector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            KappaVector::new((0..n).map(|_| rng.random_range(-half_width..half_width)).collect())
                .expect("finite box sample")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn samples_are_inside_and_reproducible() {
        let cone = ConeSpec::gamma_tilde_k(5, 3).unwrap();
        let a = ConeSampler::new(cone, DEFAULT_BOX, 11).sample(200).unwrap();
        let b = ConeSampler::new(cone, DEFAULT_BOX, 11).sample(200).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(|k| cone.contains(k)));
        // samples are not confined to the positive cone
        assert!(a.iter().any(|k| k.as_slice().iter().any(|&x| x < 0.0)));
    }
}
