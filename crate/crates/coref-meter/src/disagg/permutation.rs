//! Paired sign-flip permutation tests.
//!
//! Two systems are compared on the same documents; under the null
//! hypothesis the per-document pairing is exchangeable, so each iteration
//! flips a random subset of pairs and recomputes the statistic. The
//! two-sided p-value is (extreme + 1) / (iterations + 1): the observed
//! labeling counts as the identity permutation, so p is always positive.
//!
//! Iterations run in fixed-size chunks of 1024, each with its own RNG
//! substream derived from the seed and chunk index; chunk counts merge by
//! addition, so the result is identical for any thread count.

use rand::Rng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::metrics::Components;
use crate::seeding::rng_for;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PermutationError {
    #[error("paired score lists differ in length ({a} vs {b})")]
    LengthMismatch { a: usize, b: usize },
    #[error("no documents to permute")]
    Empty,
    #[error("iteration count must be at least 1")]
    ZeroIterations,
}

const CHUNK: u64 = 1024;

/// Two-sided test with the absolute mean per-document difference as the
/// statistic.
pub fn permutation_test_mean(
    a: &[f64],
    b: &[f64],
    iterations: u64,
    seed: u64,
) -> Result<f64, PermutationError> {
    check(a.len(), b.len(), iterations)?;
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let observed = mean_abs(&diffs, None);
    let extreme = count_extreme(iterations, seed, observed, |rng| {
        let signs: Vec<bool> = (0..diffs.len()).map(|_| rng.random::<bool>()).collect();
        mean_abs(&diffs, Some(&signs))
    });
    Ok(p_value(extreme, iterations))
}

/// Two-sided test with the absolute difference of micro F1 as the
/// statistic: each flip swaps a document's score components between the
/// two systems and the corpus F1 is recomputed from the summed components.
pub fn permutation_test_f1(
    a: &[Components],
    b: &[Components],
    iterations: u64,
    seed: u64,
) -> Result<f64, PermutationError> {
    check(a.len(), b.len(), iterations)?;
    let observed = f1_diff(a, b, None);
    let extreme = count_extreme(iterations, seed, observed, |rng| {
        let signs: Vec<bool> = (0..a.len()).map(|_| rng.random::<bool>()).collect();
        f1_diff(a, b, Some(&signs))
    });
    Ok(p_value(extreme, iterations))
}

fn check(a: usize, b: usize, iterations: u64) -> Result<(), PermutationError> {
    if a != b {
        return Err(PermutationError::LengthMismatch { a, b });
    }
    if a == 0 {
        return Err(PermutationError::Empty);
    }
    if iterations == 0 {
        return Err(PermutationError::ZeroIterations);
    }
    Ok(())
}

fn p_value(extreme: u64, iterations: u64) -> f64 {
    (extreme + 1) as f64 / (iterations + 1) as f64
}

fn mean_abs(diffs: &[f64], signs: Option<&[bool]>) -> f64 {
    let sum: f64 = match signs {
        None => diffs.iter().sum(),
        Some(s) => diffs.iter().zip(s).map(|(d, flip)| if *flip { -d } else { *d }).sum(),
    };
    (sum / diffs.len() as f64).abs()
}

fn f1_diff(a: &[Components], b: &[Components], signs: Option<&[bool]>) -> f64 {
    let mut ta = Components::default();
    let mut tb = Components::default();
    for i in 0..a.len() {
        let flip = signs.is_some_and(|s| s[i]);
        let (x, y) = if flip { (&b[i], &a[i]) } else { (&a[i], &b[i]) };
        ta.add(x);
        tb.add(y);
    }
    (ta.score().f1 - tb.score().f1).abs()
}

fn count_extreme(
    iterations: u64,
    seed: u64,
    observed: f64,
    stat: impl Fn(&mut ChaCha12Rng) -> f64 + Sync,
) -> u64 {
    let chunks = iterations.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|k| {
            let mut rng = rng_for(seed, &format!("permtest:chunk:{k}"));
            let lo = k * CHUNK;
            let hi = (lo + CHUNK).min(iterations);
            let mut n = 0u64;
            for _ in lo..hi {
                if stat(&mut rng) >= observed {
                    n += 1;
                }
            }
            n
        })
        .sum()
}
