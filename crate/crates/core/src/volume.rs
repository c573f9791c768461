//! Ellipsoid volumes: closed forms in both normalizations, and a seeded
//! Monte Carlo estimate used as independent ground truth.
//!
//! E_a(r) = {πΣ a_i|z_i|² ≤ r} in complex n-space. Its Lebesgue measure in
//! real dimension 2n is r^n/(n!·⟨a⟩); the ∫ω^n normalization used by the
//! blow-up intersection form is n! times that, r^n/⟨a⟩.

use crate::coprime::CoprimeVector;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Convention {
    /// Lebesgue measure in real dimension 2n.
    #[serde(rename = "LEBESGUE")]
    Lebesgue,
    /// The ∫ω^n normalization: n! times the Lebesgue value.
    #[serde(rename = "TOP_POWER")]
    TopPower,
}

/// Weight vector plus capacity. Weights may be real; an ellipsoid is
/// "simple" when they are positive integers that are pairwise coprime.
#[derive(Clone, Debug, PartialEq)]
pub struct Ellipsoid {
    weights: Vec<Scalar>,
    capacity: Scalar,
}

impl Ellipsoid {
    pub fn new(weights: Vec<Scalar>, capacity: Scalar) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::invalid("ellipsoid needs at least one weight"));
        }
        if weights.iter().any(|w| !w.is_positive()) {
            return Err(Error::invalid("ellipsoid weights must be positive"));
        }
        if capacity.is_negative() {
            return Err(Error::invalid("capacity must be nonnegative"));
        }
        Ok(Ellipsoid { weights, capacity })
    }

    pub fn simple(weights: &CoprimeVector, capacity: Scalar) -> Result<Self> {
        Self::new(
            weights.entries().iter().map(Scalar::from_biguint).collect(),
            capacity,
        )
    }

    pub fn complex_dimension(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[Scalar] {
        &self.weights
    }

    pub fn capacity(&self) -> &Scalar {
        &self.capacity
    }

    /// The pairwise-coprime integer weight vector, when the weights qualify.
    pub fn simple_weights(&self) -> Option<CoprimeVector> {
        let mut entries = Vec::with_capacity(self.weights.len());
        for w in &self.weights {
            let r = w.as_exact()?;
            if !r.is_integer() {
                return None;
            }
            let int = r.to_integer();
            entries.push(int.to_biguint()?);
        }
        CoprimeVector::new(entries).ok()
    }

    pub fn weight_product(&self) -> Scalar {
        let mut acc = Scalar::from_int(1);
        for w in &self.weights {
            acc = acc.mul(w);
        }
        acc
    }
}

fn factorial(n: usize) -> BigUint {
    (1..=n as u64).map(BigUint::from).product::<BigUint>().max(BigUint::from(1u32))
}

/// r^n/(n!·⟨a⟩) for LEBESGUE, r^n/⟨a⟩ for TOP_POWER.
pub fn ellipsoid_volume_closed_form(e: &Ellipsoid, convention: Convention) -> Scalar {
    let n = e.complex_dimension();
    let base = e.capacity().powu(n as u32).div(&e.weight_product());
    match convention {
        Convention::TopPower => base,
        Convention::Lebesgue => base.div(&Scalar::from_biguint(&factorial(n))),
    }
}

/// Sum of closed-form volumes in the requested convention.
pub fn total_packing_volume(ellipsoids: &[Ellipsoid], convention: Convention) -> Result<Scalar> {
    if ellipsoids.is_empty() {
        return Err(Error::invalid("empty ellipsoid list"));
    }
    let mut total = Scalar::zero();
    for e in ellipsoids {
        total = total.add(&ellipsoid_volume_closed_form(e, convention));
    }
    Ok(total)
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct VolumeEstimate {
    pub value: f64,
    pub standard_error: f64,
    pub samples: u64,
    pub seed: u64,
    pub convention: Convention,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Rayon-parallel over sample batches; falls back to sequential when
    /// the `parallel` feature is disabled. Identical results either way.
    Parallel,
}

pub const MIN_MC_SAMPLES: u64 = 10_000;
const BATCH_SIZE: u64 = 1 << 16;

/// Uniform rejection sampling over the bounding box Π {|z_i| ≤ √(r/(π a_i))}.
///
/// Deterministic for a fixed seed: the sample stream is split into
/// fixed-size batches, each with its own counter-derived RNG, and hit
/// counts are integers, so accumulation order cannot change the result.
pub fn ellipsoid_volume_monte_carlo(
    e: &Ellipsoid,
    samples: u64,
    seed: u64,
) -> Result<VolumeEstimate> {
    let exec = if cfg!(feature = "parallel") {
        Execution::Parallel
    } else {
        Execution::Sequential
    };
    ellipsoid_volume_monte_carlo_with(e, samples, seed, exec)
}

pub fn ellipsoid_volume_monte_carlo_with(
    e: &Ellipsoid,
    samples: u64,
    seed: u64,
    execution: Execution,
) -> Result<VolumeEstimate> {
    if samples < MIN_MC_SAMPLES {
        return Err(Error::invalid(format!(
            "at least {} samples required, got {}",
            MIN_MC_SAMPLES, samples
        )));
    }
    let n = e.complex_dimension();
    let r = e.capacity().to_f64();
    if r == 0.0 {
        return Ok(VolumeEstimate {
            value: 0.0,
            standard_error: 0.0,
            samples,
            seed,
            convention: Convention::Lebesgue,
        });
    }
    let a: Vec<f64> = e.weights().iter().map(|w| w.to_f64()).collect();
    // Half-sides of the box per real coordinate pair.
    let half: Vec<f64> = a
        .iter()
        .map(|ai| (r / (std::f64::consts::PI * ai)).sqrt())
        .collect();
    let box_volume: f64 = half.iter().map(|s| (2.0 * s) * (2.0 * s)).product();

    let batches: Vec<(u64, u64)> = {
        let mut v = Vec::new();
        let mut start = 0u64;
        let mut idx = 0u64;
        while start < samples {
            let len = BATCH_SIZE.min(samples - start);
            v.push((idx, len));
            start += len;
            idx += 1;
        }
        v
    };

    let count_batch = |&(batch_idx, len): &(u64, u64)| -> u64 {
        let mut rng = batch_rng(seed, batch_idx);
        let mut hits = 0u64;
        let mut point = vec![0.0f64; 2 * n];
        for _ in 0..len {
            for (j, s) in half.iter().enumerate() {
                point[2 * j] = rng.gen_range(-s..=*s);
                point[2 * j + 1] = rng.gen_range(-s..=*s);
            }
            let h: f64 = a
                .iter()
                .enumerate()
                .map(|(j, ai)| {
                    std::f64::consts::PI
                        * ai
                        * (point[2 * j] * point[2 * j] + point[2 * j + 1] * point[2 * j + 1])
                })
                .sum();
            if h <= r {
                hits += 1;
            }
        }
        hits
    };

    let hits: u64 = match execution {
        Execution::Sequential => batches.iter().map(count_batch).sum(),
        Execution::Parallel => {
            #[cfg(feature = "parallel")]
            {
                use rayon::prelude::*;
                batches.par_iter().map(count_batch).sum()
            }
            #[cfg(not(feature = "parallel"))]
            {
                batches.iter().map(count_batch).sum()
            }
        }
    };

    let p = hits as f64 / samples as f64;
    Ok(VolumeEstimate {
        value: box_volume * p,
        standard_error: box_volume * (p * (1.0 - p) / samples as f64).sqrt(),
        samples,
        seed,
        convention: Convention::Lebesgue,
    })
}

fn batch_rng(seed: u64, batch_idx: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&batch_idx.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}
