//! Loop to braid word: tracking, relative phases, crossings and the
//! tau-to-sigma translation chained together.

use serde::Serialize;

use crate::braid::{exponent_sum, free_reduce, permutation_of, tau_to_sigma, BraidWord, Permutation};
use crate::error::{Error, Result};
use crate::model::Loop;
use crate::spectral::{closure_permutation, detect_crossings, relative_phases, track_bands, CrossingEvent, PhaseSeries};

pub const DEFAULT_SAMPLES: usize = 256;
pub const MIN_SAMPLES: usize = 16;

#[derive(Debug, Clone, Serialize)]
pub struct LoopBraid {
    pub phases: PhaseSeries,
    pub crossings: Vec<CrossingEvent>,
    pub word: BraidWord,
    pub reduced: BraidWord,
    pub permutation: Permutation,
    /// Where each band ends relative to the starting labels.
    pub closure: Permutation,
    pub exponent_sum: i64,
}

pub fn loop_braid(lp: &Loop, n_samples: usize) -> Result<LoopBraid> {
    if n_samples < MIN_SAMPLES {
        return Err(Error::InvalidInput(format!("need at least {MIN_SAMPLES} samples, got {n_samples}")));
    }
    let path = track_bands(lp, n_samples)?;
    let closure = closure_permutation(&path);
    let phases = relative_phases(&path)?;
    let crossings = detect_crossings(&phases)?;
    let pairs: Vec<(usize, usize)> = crossings.iter().map(|c| (c.i, c.j)).collect();
    let word = tau_to_sigma(&pairs, 3)?;
    let reduced = free_reduce(&word);
    Ok(LoopBraid {
        permutation: permutation_of(&word),
        exponent_sum: exponent_sum(&word),
        phases,
        crossings,
        word,
        reduced,
        closure,
    })
}

/// Braid word of the bands on a small circle around `center`.
pub fn local_braid(alpha: f64, center: (f64, f64), radius: f64, n_samples: usize) -> Result<BraidWord> {
    Ok(loop_braid(&Loop::new(alpha, radius, center)?, n_samples)?.word)
}
