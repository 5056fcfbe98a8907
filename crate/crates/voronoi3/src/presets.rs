//! The two shipped data presets and the search that validates the rank-three
//! one.
//!
//! The rank-two preset is the discriminant cusp form of weight 12. Its
//! symmetric-square lift fixes the coefficient table exactly, but the
//! archimedean parameters of the lift depend on embedding conventions that
//! admit several literal spellings, so instead of hard-coding one this module
//! enumerates the candidate spellings and keeps the first that drives the
//! functional-equation residual below threshold. A genuine lift leaves a
//! residual at the evaluator noise floor; every wrong spelling misses by
//! orders of magnitude, and if nothing passes the preset is refused outright.

use crate::coefficients::{sym_square_lift, CoefficientTable, GL2Form, GL3Parameters};
use crate::error::{Error, Result};
use crate::lfunctions::{functional_equation_residual, SmoothedOptions};
use crate::C64;

/// Functional-equation residual a candidate must beat to ship.
pub const CANDIDATE_THRESHOLD: f64 = 1e-6;

/// One scored archimedean candidate.
#[derive(Debug, Clone, Copy)]
pub struct CandidateScore {
    pub lambda: [C64; 3],
    pub delta: [u8; 3],
    /// Functional-equation residual at the oracle point; infinite when the
    /// evaluation itself failed.
    pub residual: f64,
}

/// The validated rank-three preset: parameters, coefficient table, and the
/// full scoreboard of the search that picked them.
#[derive(Debug, Clone)]
pub struct Gl3Preset {
    pub params: GL3Parameters,
    pub table: CoefficientTable,
    pub scores: Vec<CandidateScore>,
}

/// The discriminant cusp form preset (weight 12, spectral parameter -11/2).
pub fn delta_gl2(n_max: usize) -> Result<GL2Form> {
    GL2Form::discriminant_form(n_max)
}

/// Point where the residual oracle is sampled; off the real axis so no
/// candidate can sit near a gamma pole.
pub fn oracle_point() -> C64 {
    C64::new(0.5, 2.0)
}

/// Scores every archimedean spelling of a weight-k symmetric-square lift
/// against the coefficient table and returns the validated parameters plus
/// the scoreboard. Fails loudly when no candidate reaches the threshold,
/// which is the guard against shipping a table that is not a genuine lift.
pub fn validate_archimedean(
    table: &CoefficientTable,
    weight: u32,
    s: C64,
    opts: &SmoothedOptions,
) -> Result<(GL3Parameters, Vec<CandidateScore>)> {
    let k = (weight - 1) as f64;
    let lambdas = [
        [C64::new(k, 0.0), C64::new(0.0, 0.0), C64::new(-k, 0.0)],
        [C64::new(-k, 0.0), C64::new(0.0, 0.0), C64::new(k, 0.0)],
    ];
    // The classical lift spelling leads so it wins the noise-floor tie among
    // equivalent parity assignments (shifting a G argument by the odd integer
    // k-1 absorbs a parity flip, so six of the eight spellings share one
    // gamma product; only the middle-slot flips differ).
    let deltas = [[1, 1, 0], [0, 1, 1], [0, 0, 0], [1, 0, 1]];
    let mut scores = Vec::with_capacity(8);
    for lambda in &lambdas {
        for delta in &deltas {
            let params = GL3Parameters::new(*lambda, *delta)?;
            let residual = match functional_equation_residual(table, &params, None, s, opts) {
                Ok(rep) => rep.residual,
                Err(_) => f64::INFINITY,
            };
            scores.push(CandidateScore {
                lambda: *lambda,
                delta: *delta,
                residual,
            });
        }
    }
    let best = scores
        .iter()
        .map(|c| c.residual)
        .fold(f64::INFINITY, f64::min);
    if best.is_nan() || best >= CANDIDATE_THRESHOLD {
        return Err(Error::NoConverge(format!(
            "no archimedean candidate for the weight-{weight} symmetric-square preset \
             reaches residual {CANDIDATE_THRESHOLD:.0e} at s = {s}; best candidate leaves {best:.3e}"
        )));
    }
    // Equivalent spellings tie at the noise floor; take the first within a
    // decade of the minimum so the shipped choice is stable across rounding.
    let winner = scores
        .iter()
        .find(|c| c.residual < CANDIDATE_THRESHOLD && c.residual <= 10.0 * best)
        .expect("a sub-threshold candidate exists");
    Ok((
        GL3Parameters::new(winner.lambda, winner.delta)?,
        scores,
    ))
}

/// The symmetric-square lift of the discriminant form, with its archimedean
/// parameters validated by the functional-equation search.
pub fn sym2_delta_gl3(n_max: usize) -> Result<Gl3Preset> {
    let delta = GL2Form::discriminant_form(n_max)?;
    let (_, table) = sym_square_lift(&delta, n_max)?;
    let (params, scores) =
        validate_archimedean(&table, 12, oracle_point(), &SmoothedOptions::default())?;
    Ok(Gl3Preset {
        params,
        table,
        scores,
    })
}
