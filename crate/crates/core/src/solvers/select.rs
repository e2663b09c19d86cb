//! Output-iterate selection: the randomized rules that pick the reported
//! iterate from the stored trajectory, with the weighted law
//! `Prob(w_t^{(s)}) = gamma_t / (S Sigma_m)`.

use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::vector::WeightVector;

use super::OutputRule;

/// Draws the flat candidate index selected by `rule` over `s_total` outer
/// iterations of `gammas.len()` iterates each. `Last` needs no draw.
///
/// Candidates are laid out outer-major: index `s * (m+1) + t`.
pub fn draw_output_index(
    rule: OutputRule,
    gammas: &[f64],
    s_total: usize,
    rng: &mut RngStream,
) -> Result<Option<usize>> {
    let per_outer = gammas.len();
    let total = per_outer * s_total;
    if total == 0 {
        return Err(Error::State("no candidate iterates to select from".into()));
    }
    match rule {
        OutputRule::Last => Ok(None),
        OutputRule::UniformRandom => Ok(Some(rng.gen_index(total as u64) as usize)),
        OutputRule::WeightedRandom => {
            // weights repeat per outer iteration, so draw (s, t) separately:
            // s uniform, t proportional to gamma_t
            let s = rng.gen_index(s_total as u64) as usize;
            let sigma: f64 = gammas.iter().sum();
            let mut u = rng.gen_f64() * sigma;
            let mut t = per_outer - 1;
            for (i, g) in gammas.iter().enumerate() {
                if u < *g {
                    t = i;
                    break;
                }
                u -= g;
            }
            Ok(Some(s * per_outer + t))
        }
    }
}

/// Picks the reported iterate from the stored candidates.
pub fn select_output(
    candidates: &[WeightVector],
    gammas: &[f64],
    rule: OutputRule,
    rng: &mut RngStream,
) -> Result<WeightVector> {
    if candidates.is_empty() {
        return Err(Error::State("no candidate iterates to select from".into()));
    }
    let per_outer = gammas.len();
    debug_assert_eq!(candidates.len() % per_outer, 0);
    let s_total = candidates.len() / per_outer;
    let idx = match draw_output_index(rule, gammas, s_total, rng)? {
        None => candidates.len() - 1,
        Some(i) => i,
    };
    Ok(candidates[idx].clone())
}
