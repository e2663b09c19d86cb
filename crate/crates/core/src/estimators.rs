//! SARAH and SVRG stochastic gradient estimators with mini-batch sampling,
//! plus exact subset-enumeration oracles for the small-scale estimator
//! identities (bias, telescoping variance, mini-batch variance closed forms).

use crate::counters::Counters;
use crate::error::{Error, Result};
use crate::oracle::{full_gradient, OracleMode, ProblemOracle};
use crate::rng::RngStream;
use crate::vector::WeightVector;

/// One sampled mini-batch of component ids.
///
/// Finite-sum batches hold distinct indices drawn uniformly without
/// replacement; expectation-mode batches hold consecutive draw counters
/// (i.i.d. realizations synthesized by the oracle).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MiniBatch {
    pub ids: Vec<u64>,
}

impl MiniBatch {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }
}

/// State of the recursive SARAH estimator: the current estimate `v_t` and
/// the previous iterate it was evaluated against.
#[derive(Debug, Clone)]
pub struct SarahState {
    pub v: WeightVector,
    pub w_prev: WeightVector,
}

/// Uniform sample of `b_hat` distinct indices from `[0, n)`.
///
/// Floyd's selection: for j = n - b_hat .. n-1, draw t uniform in [0, j];
/// insert t unless already chosen, else insert j. The result is uniform over
/// all size-`b_hat` subsets; ids are returned sorted ascending so the batch
/// content alone (not the draw order) defines downstream accumulation order.
pub fn sample_minibatch(rng: &mut RngStream, n: usize, b_hat: usize) -> Result<MiniBatch> {
    if b_hat == 0 || b_hat > n {
        return Err(Error::invalid(format!(
            "batch size must satisfy 1 <= b_hat <= n, got b_hat = {b_hat}, n = {n}"
        )));
    }
    let mut ids: Vec<u64> = Vec::with_capacity(b_hat);
    for j in (n - b_hat)..n {
        let t = rng.gen_index(j as u64 + 1);
        if ids.contains(&t) {
            ids.push(j as u64);
        } else {
            ids.push(t);
        }
    }
    ids.sort_unstable();
    Ok(MiniBatch { ids })
}

/// Source of mini-batches appropriate to the oracle mode.
#[derive(Debug)]
pub enum BatchSampler {
    /// Without-replacement subsets of `[0, n)`.
    Finite { rng: RngStream, n: usize },
    /// Consecutive draw counters for i.i.d. expectation-mode sampling.
    Stream { next: u64 },
}

impl BatchSampler {
    pub fn finite(rng: RngStream, n: usize) -> Self {
        BatchSampler::Finite { rng, n }
    }

    pub fn stream() -> Self {
        BatchSampler::Stream { next: 0 }
    }

    pub fn draw(&mut self, b: usize) -> Result<MiniBatch> {
        match self {
            BatchSampler::Finite { rng, n } => sample_minibatch(rng, *n, b),
            BatchSampler::Stream { next } => {
                if b == 0 {
                    return Err(Error::invalid("batch size must be >= 1"));
                }
                let ids = (*next..*next + b as u64).collect();
                *next += b as u64;
                Ok(MiniBatch { ids })
            }
        }
    }
}

/// `(1/|ids|) sum_{i in ids} grad f_i(w)`; adds `|ids|` to `sfo`.
pub fn mean_gradient_over(
    oracle: &dyn ProblemOracle,
    w: &WeightVector,
    ids: &[u64],
    counters: &mut Counters,
) -> WeightVector {
    let mut acc = vec![0.0; oracle.dimension()];
    let inv = 1.0 / ids.len() as f64;
    for &i in ids {
        oracle.accumulate_component_gradient(w.values(), i, inv, &mut acc);
    }
    counters.add_sfo(ids.len() as u64);
    WeightVector::from_vec(acc)
}

/// Snapshot estimate `v_0 = (1/b_s) sum_{j in B_s} grad f_j(w_0)`.
///
/// With `b_s = n` in finite-sum mode the snapshot is the exact full gradient
/// (no sampling). Adds `b_s` to `sfo`.
pub fn sarah_snapshot(
    oracle: &dyn ProblemOracle,
    w0: &WeightVector,
    b_s: usize,
    sampler: &mut BatchSampler,
    counters: &mut Counters,
) -> Result<SarahState> {
    let v = match oracle.mode() {
        OracleMode::FiniteSum { n } => {
            if b_s == 0 || b_s > n {
                return Err(Error::invalid(format!(
                    "snapshot batch must satisfy 1 <= b_s <= n, got b_s = {b_s}, n = {n}"
                )));
            }
            if b_s == n {
                full_gradient(oracle, w0, counters)?
            } else {
                let batch = sampler.draw(b_s)?;
                mean_gradient_over(oracle, w0, &batch.ids, counters)
            }
        }
        OracleMode::Expectation { .. } => {
            if b_s == 0 {
                return Err(Error::invalid("snapshot batch must be >= 1"));
            }
            let batch = sampler.draw(b_s)?;
            mean_gradient_over(oracle, w0, &batch.ids, counters)
        }
    };
    Ok(SarahState { v, w_prev: w0.clone() })
}

/// Recursive SARAH step:
/// `v <- v + (1/b) sum_{i in batch} (grad f_i(w_t) - grad f_i(w_prev))`,
/// then `w_prev <- w_t`. Adds `2 * b` to `sfo`.
pub fn sarah_update(
    state: &mut SarahState,
    oracle: &dyn ProblemOracle,
    w_t: &WeightVector,
    batch: &MiniBatch,
    counters: &mut Counters,
) {
    debug_assert_eq!(w_t.len(), state.v.len());
    let inv = 1.0 / batch.len() as f64;
    let acc = state.v.values_mut();
    for &i in &batch.ids {
        oracle.accumulate_component_gradient(w_t.values(), i, inv, acc);
        oracle.accumulate_component_gradient(state.w_prev.values(), i, -inv, acc);
    }
    counters.add_sfo(2 * batch.len() as u64);
    state.w_prev = w_t.clone();
}

/// SVRG estimate anchored at a snapshot:
/// `snapshot_grad + (1/b) sum_{i in batch} (grad f_i(w_t) - grad f_i(snapshot_w))`.
/// Adds `2 * b` to `sfo`.
pub fn svrg_estimator(
    oracle: &dyn ProblemOracle,
    w_t: &WeightVector,
    snapshot_w: &WeightVector,
    snapshot_grad: &WeightVector,
    batch: &MiniBatch,
    counters: &mut Counters,
) -> WeightVector {
    let mut out = snapshot_grad.clone();
    let inv = 1.0 / batch.len() as f64;
    let acc = out.values_mut();
    for &i in &batch.ids {
        oracle.accumulate_component_gradient(w_t.values(), i, inv, acc);
        oracle.accumulate_component_gradient(snapshot_w.values(), i, -inv, acc);
    }
    counters.add_sfo(2 * batch.len() as u64);
    out
}

/// Upper bound on `n` for exact subset enumeration.
pub const ENUMERATION_LIMIT: usize = 12;

/// Visits every size-`k` subset of `[0, n)` in lexicographic order.
pub fn for_each_subset<F: FnMut(&[u64])>(n: usize, k: usize, mut f: F) {
    assert!(k >= 1 && k <= n);
    let mut idx: Vec<u64> = (0..k as u64).collect();
    loop {
        f(&idx);
        // advance to the next lexicographic combination
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] < (n - k + i) as u64 {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

pub fn binomial(n: usize, k: usize) -> u64 {
    let k = k.min(n - k);
    let mut r: u64 = 1;
    for i in 0..k {
        r = r * (n - i) as u64 / (i + 1) as u64;
    }
    r
}

/// Checks the mini-batch SARAH difference variance identity by brute force.
///
/// Returns `(enumerated, closed_form)` where `enumerated` is the exact
/// average of `||v_t - v_{t-1}||^2` over all size-`b_hat` subsets of `[0, n)`
/// and `closed_form` is
/// `n(b-1)/(b(n-1)) * ||gf(w_t) - gf(w_prev)||^2
///  + (n-b)/(b(n-1)) * (1/n) sum_i ||gf_i(w_t) - gf_i(w_prev)||^2`.
pub fn brute_force_variance(
    oracle: &dyn ProblemOracle,
    w_t: &WeightVector,
    w_prev: &WeightVector,
    b_hat: usize,
) -> Result<(f64, f64)> {
    let n = match oracle.mode() {
        OracleMode::FiniteSum { n } => n,
        OracleMode::Expectation { .. } => {
            return Err(Error::Unsupported("brute_force_variance requires FiniteSum mode".into()))
        }
    };
    if n > ENUMERATION_LIMIT {
        return Err(Error::EnumerationTooLarge { n, limit: ENUMERATION_LIMIT });
    }
    if b_hat == 0 || b_hat > n {
        return Err(Error::invalid(format!("b_hat = {b_hat} out of range for n = {n}")));
    }
    let d = oracle.dimension();

    // Per-component gradient differences grad f_i(w_t) - grad f_i(w_prev).
    let mut diffs: Vec<Vec<f64>> = Vec::with_capacity(n);
    for i in 0..n as u64 {
        let mut g = vec![0.0; d];
        oracle.accumulate_component_gradient(w_t.values(), i, 1.0, &mut g);
        oracle.accumulate_component_gradient(w_prev.values(), i, -1.0, &mut g);
        diffs.push(g);
    }

    let mut enumerated = 0.0;
    for_each_subset(n, b_hat, |subset| {
        let mut acc = vec![0.0; d];
        for &i in subset {
            for (a, b) in acc.iter_mut().zip(&diffs[i as usize]) {
                *a += b;
            }
        }
        let inv = 1.0 / b_hat as f64;
        enumerated += acc.iter().map(|v| (v * inv) * (v * inv)).sum::<f64>();
    });
    enumerated /= binomial(n, b_hat) as f64;

    let mut mean_diff = vec![0.0; d];
    let mut sum_norms = 0.0;
    for g in &diffs {
        for (a, b) in mean_diff.iter_mut().zip(g) {
            *a += b / n as f64;
        }
        sum_norms += g.iter().map(|v| v * v).sum::<f64>();
    }
    let full_term = mean_diff.iter().map(|v| v * v).sum::<f64>();

    let b = b_hat as f64;
    let nf = n as f64;
    let closed_form = if n == 1 {
        full_term
    } else {
        nf * (b - 1.0) / (b * (nf - 1.0)) * full_term
            + (nf - b) / (b * (nf - 1.0)) * (sum_norms / nf)
    };
    Ok((enumerated, closed_form))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::toy::QuadSumOracle;

    #[test]
    fn minibatch_degenerate_cases() {
        let mut rng = RngStream::new(1, 0);
        assert_eq!(sample_minibatch(&mut rng, 1, 1).unwrap().ids, vec![0]);
        assert_eq!(sample_minibatch(&mut rng, 5, 5).unwrap().ids, vec![0, 1, 2, 3, 4]);
        assert!(sample_minibatch(&mut rng, 3, 4).is_err());
        assert!(sample_minibatch(&mut rng, 3, 0).is_err());
    }

    #[test]
    fn minibatch_uniform_over_subsets() {
        // n=4, b=2: each of the 6 subsets within 1/6 +- 0.01 over 60000 draws.
        let mut rng = RngStream::new(1234, 0);
        let mut counts = std::collections::HashMap::new();
        let draws = 60_000;
        for _ in 0..draws {
            let b = sample_minibatch(&mut rng, 4, 2).unwrap();
            *counts.entry(b.ids).or_insert(0u32) += 1;
        }
        assert_eq!(counts.len(), 6);
        for (_, c) in counts {
            let freq = c as f64 / draws as f64;
            assert!((freq - 1.0 / 6.0).abs() < 0.01, "freq = {freq}");
        }
    }

    #[test]
    fn minibatch_deterministic() {
        let mut a = RngStream::new(99, 4);
        let mut b = RngStream::new(99, 4);
        for _ in 0..50 {
            assert_eq!(
                sample_minibatch(&mut a, 10, 3).unwrap(),
                sample_minibatch(&mut b, 10, 3).unwrap()
            );
        }
    }

    #[test]
    fn snapshot_full_batch_equals_full_gradient() {
        let mut rng = RngStream::new(3, 0);
        let oracle = QuadSumOracle::random(6, 4, &mut rng);
        let w0 = WeightVector::from_vec(vec![0.5, -0.25, 1.0, 2.0]);
        let mut sampler = BatchSampler::finite(RngStream::new(3, 1), 6);
        let mut c = Counters::new();
        let state = sarah_snapshot(&oracle, &w0, 6, &mut sampler, &mut c).unwrap();
        let mut c2 = Counters::new();
        let full = full_gradient(&oracle, &w0, &mut c2).unwrap();
        assert_eq!(state.v.values(), full.values());
        assert_eq!(c.sfo, 6);
    }

    #[test]
    fn snapshot_unbiased_by_enumeration() {
        // Mean of the snapshot estimator over all size-2 subsets of n=4
        // equals the full gradient exactly.
        let mut rng = RngStream::new(4, 0);
        let oracle = QuadSumOracle::random(4, 3, &mut rng);
        let w0 = WeightVector::from_vec(vec![0.7, -0.3, 0.1]);
        let mut mean = vec![0.0; 3];
        let mut count = 0u64;
        for_each_subset(4, 2, |ids| {
            let mut c = Counters::new();
            let v = mean_gradient_over(&oracle, &w0, ids, &mut c);
            for (a, b) in mean.iter_mut().zip(v.values()) {
                *a += b;
            }
            count += 1;
        });
        let mut c = Counters::new();
        let full = full_gradient(&oracle, &w0, &mut c).unwrap();
        for (a, b) in mean.iter().zip(full.values()) {
            assert!((a / count as f64 - b).abs() < 1e-12);
        }
    }

    #[test]
    fn sarah_update_no_move_no_change() {
        let mut rng = RngStream::new(5, 0);
        let oracle = QuadSumOracle::random(5, 3, &mut rng);
        let w = WeightVector::from_vec(vec![0.2, 0.4, -0.6]);
        let mut sampler = BatchSampler::finite(RngStream::new(5, 1), 5);
        let mut c = Counters::new();
        let mut state = sarah_snapshot(&oracle, &w, 5, &mut sampler, &mut c).unwrap();
        let v_before = state.v.clone();
        let batch = sampler.draw(2).unwrap();
        sarah_update(&mut state, &oracle, &w, &batch, &mut c);
        for (a, b) in state.v.values().iter().zip(v_before.values()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn sarah_update_hand_example() {
        // f_1(w) = w^2/2, f_2(w) = w. Snapshot at w0 = 1: v0 = (1 + 1)/2 = 1.
        // Step to w1 = 0.5 with batch = {0} (the quadratic component):
        // v1 = 1 + (0.5 - 1) = 0.5.
        let oracle = QuadSumOracle::scalar_quadratic_and_linear();
        let w0 = WeightVector::from_vec(vec![1.0]);
        let mut sampler = BatchSampler::finite(RngStream::new(0, 0), 2);
        let mut c = Counters::new();
        let mut state = sarah_snapshot(&oracle, &w0, 2, &mut sampler, &mut c).unwrap();
        assert!((state.v[0] - 1.0).abs() < 1e-15);
        let w1 = WeightVector::from_vec(vec![0.5]);
        sarah_update(&mut state, &oracle, &w1, &MiniBatch { ids: vec![0] }, &mut c);
        assert!((state.v[0] - 0.5).abs() < 1e-15);
        assert_eq!(c.sfo, 2 + 2);
    }

    #[test]
    fn sarah_full_batch_tracks_exact_gradient() {
        let mut rng = RngStream::new(6, 0);
        let oracle = QuadSumOracle::random(5, 3, &mut rng);
        let full_batch = MiniBatch { ids: (0..5).collect() };
        let mut w = WeightVector::from_vec(vec![0.9, -0.4, 0.3]);
        let mut sampler = BatchSampler::finite(RngStream::new(6, 1), 5);
        let mut c = Counters::new();
        let mut state = sarah_snapshot(&oracle, &w, 5, &mut sampler, &mut c).unwrap();
        for step in 0..4 {
            let mut next = w.clone();
            next.axpy(-0.1, &state.v);
            sarah_update(&mut state, &oracle, &next, &full_batch, &mut c);
            w = next;
            let mut c2 = Counters::new();
            let exact = full_gradient(&oracle, &w, &mut c2).unwrap();
            assert!(state.v.dist_sq(&exact) < 1e-24, "step {step}");
        }
    }

    #[test]
    fn svrg_properties() {
        let mut rng = RngStream::new(7, 0);
        let oracle = QuadSumOracle::random(3, 2, &mut rng);
        let snap_w = WeightVector::from_vec(vec![0.4, -0.2]);
        let mut c = Counters::new();
        let snap_g = full_gradient(&oracle, &snap_w, &mut c).unwrap();

        // At the snapshot, any batch returns the snapshot gradient.
        let batch = MiniBatch { ids: vec![1] };
        let v = svrg_estimator(&oracle, &snap_w, &snap_w, &snap_g, &batch, &mut c);
        assert!(v.dist_sq(&snap_g) < 1e-28);

        // Full batch gives the exact gradient.
        let w = WeightVector::from_vec(vec![-0.1, 0.8]);
        let full_batch = MiniBatch { ids: vec![0, 1, 2] };
        let v = svrg_estimator(&oracle, &w, &snap_w, &snap_g, &full_batch, &mut c);
        let exact = full_gradient(&oracle, &w, &mut Counters::new()).unwrap();
        assert!(v.dist_sq(&exact) < 1e-24);

        // Unbiasedness: mean over the 3 single-index batches equals the
        // exact gradient.
        let mut mean = WeightVector::zeros(2);
        for i in 0..3 {
            let v = svrg_estimator(
                &oracle,
                &w,
                &snap_w,
                &snap_g,
                &MiniBatch { ids: vec![i] },
                &mut c,
            );
            mean.axpy(1.0 / 3.0, &v);
        }
        assert!(mean.dist_sq(&exact) < 1e-24);
    }

    #[test]
    fn variance_identity_matches_enumeration() {
        let mut rng = RngStream::new(8, 0);
        let oracle = QuadSumOracle::random(5, 1, &mut rng);
        let w_t = WeightVector::from_vec(vec![0.6]);
        let w_prev = WeightVector::from_vec(vec![-0.3]);
        for b in 1..=4 {
            let (enumerated, closed) =
                brute_force_variance(&oracle, &w_t, &w_prev, b).unwrap();
            assert!((enumerated - closed).abs() <= 1e-12, "b = {b}");
        }
        // b = n: second term vanishes and both sides equal the full difference.
        let (e, c) = brute_force_variance(&oracle, &w_t, &w_prev, 5).unwrap();
        assert!((e - c).abs() <= 1e-12);
        // No movement: both sides zero.
        let (e, c) = brute_force_variance(&oracle, &w_t, &w_t, 2).unwrap();
        assert_eq!(e, 0.0);
        assert_eq!(c, 0.0);
    }

    #[test]
    fn variance_enumeration_guard() {
        let oracle = QuadSumOracle::random(13, 1, &mut RngStream::new(9, 0));
        let w = WeightVector::zeros(1);
        assert!(matches!(
            brute_force_variance(&oracle, &w, &w, 2),
            Err(Error::EnumerationTooLarge { .. })
        ));
    }

    #[test]
    fn subset_enumeration_counts() {
        for (n, k) in [(5, 2), (6, 3), (4, 4), (7, 1)] {
            let mut count = 0u64;
            for_each_subset(n, k, |s| {
                assert_eq!(s.len(), k);
                assert!(s.windows(2).all(|w| w[0] < w[1]));
                count += 1;
            });
            assert_eq!(count, binomial(n, k));
        }
    }
}
