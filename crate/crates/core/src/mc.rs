//! Monte Carlo experiments on random subspaces: the dimension-concentration
//! bounds behind `⊡`/`⊞`, and a sampled version of the subspace recursion that
//! the scalar density evolution tracks.
//!
//! Randomness is split per trial: trial `i` under master seed `s` draws from
//! ChaCha8 seeded with `s` on stream `i` (see [`trial_rng`]), so results do not
//! depend on how trials are scheduled across threads.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::channel::ChannelSpec;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::subspace::Subspace;

/// Independent stream for trial `index` under `seed`.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Integer form of `⊡`: `max(d1 + d2 − m, 0)`.
pub fn dim_boxdot(d1: usize, d2: usize, m: usize) -> usize {
    (d1 + d2).saturating_sub(m)
}

/// Integer form of `⊞`: `min(d1 + d2, m)`.
pub fn dim_boxplus(d1: usize, d2: usize, m: usize) -> usize {
    (d1 + d2).min(m)
}

/// Lower bound `1 − q^{−k − max(0, m − d1 − d2)}` on both window probabilities.
pub fn concentration_bound(q: u32, m: usize, d1: usize, d2: usize, k: usize) -> f64 {
    let slack = m.saturating_sub(d1 + d2);
    1.0 - (q as f64).powi(-((k + slack) as i32))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConcentrationReport {
    pub m: usize,
    pub q: u32,
    pub d1: usize,
    pub d2: usize,
    pub k: usize,
    pub trials: usize,
    /// `d1 ⊡ d2`; the intersection window is `[lo, lo + k)`.
    pub intersect_floor: usize,
    /// `d1 ⊞ d2`; the sum window is `(hi − k, hi]`.
    pub sum_ceiling: usize,
    pub intersect_hits: usize,
    pub sum_hits: usize,
    pub intersect_freq: f64,
    pub sum_freq: f64,
    pub bound: f64,
    /// `bound − 3·sqrt(bound·(1 − bound)/trials)`.
    pub bound_minus_3sigma: f64,
}

impl ConcentrationReport {
    pub fn within_bounds(&self) -> bool {
        self.intersect_freq >= self.bound_minus_3sigma && self.sum_freq >= self.bound_minus_3sigma
    }
}

/// Samples `trials` independent uniform pairs `V1` (dim `d1`), `V2` (dim `d2`) in
/// F_q^m and counts how often `dim(V1 ∩ V2) ∈ [d1⊡d2, d1⊡d2 + k)` and
/// `dim(V1 + V2) ∈ (d1⊞d2 − k, d1⊞d2]`.
pub fn mc_concentration(
    m: usize,
    field: Field,
    d1: usize,
    d2: usize,
    k: usize,
    trials: usize,
    seed: u64,
) -> Result<ConcentrationReport> {
    if d1 > m || d2 > m {
        return Err(Error::Domain(format!(
            "subspace dimensions ({d1}, {d2}) exceed ambient dimension {m}"
        )));
    }
    let lo = dim_boxdot(d1, d2, m);
    let hi = dim_boxplus(d1, d2, m);
    let (intersect_hits, sum_hits) = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i as u64);
            let v1 = Subspace::random(field, m, d1, &mut rng).expect("dims checked");
            let v2 = Subspace::random(field, m, d2, &mut rng).expect("dims checked");
            let di = v1.intersect(&v2).expect("same space").dim();
            let ds = v1.sum(&v2).expect("same space").dim();
            let in_i = lo <= di && di < lo + k;
            let in_s = hi < ds + k && ds <= hi;
            (in_i as usize, in_s as usize)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    let bound = concentration_bound(field.q(), m, d1, d2, k);
    let freq = |hits: usize| if trials == 0 { 0.0 } else { hits as f64 / trials as f64 };
    let sigma = if trials == 0 {
        0.0
    } else {
        (bound * (1.0 - bound) / trials as f64).sqrt()
    };
    Ok(ConcentrationReport {
        m,
        q: field.q(),
        d1,
        d2,
        k,
        trials,
        intersect_floor: lo,
        sum_ceiling: hi,
        intersect_hits,
        sum_hits,
        intersect_freq: freq(intersect_hits),
        sum_freq: freq(sum_hits),
        bound,
        bound_minus_3sigma: bound - 3.0 * sigma,
    })
}

/// Sampled subspace recursion of the regular `(dl, dr)` tree ensemble.
///
/// Keeps a population of `population` samples of the variable-to-check message
/// `V⁽ᵗ⁾`. Each new sample is `V⁽⁰⁾ ∩ U_1 ∩ … ∩ U_{dl−1}` with a fresh channel
/// subspace `V⁽⁰⁾`, where each `U` is the sum of `dr − 1` members of the previous
/// population. All `(dl−1)(dr−1)` members feeding one sample are distinct.
/// Returns the mean of `dim V⁽ᵗ⁾ / m` for `t = 0..=steps`.
#[allow(clippy::too_many_arguments)]
pub fn mc_subspace_de(
    dl: usize,
    dr: usize,
    m: usize,
    field: Field,
    eps: f64,
    steps: usize,
    population: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    if dl < 2 || dr < 2 {
        return Err(Error::Parameter(format!("degrees ({dl}, {dr}) must be at least 2")));
    }
    if population == 0 {
        return Err(Error::Parameter("population must be positive".into()));
    }
    let channel = ChannelSpec::new(field, m, eps)?;
    let noise_dim = channel.noise_dim();
    let fan_in = (dl - 1) * (dr - 1);

    let stream = |t: usize, i: usize| trial_rng(seed, ((t as u64) << 32) | i as u64);
    let mut pop: Vec<Subspace> = (0..population)
        .into_par_iter()
        .map(|i| Subspace::random(field, m, noise_dim, &mut stream(0, i)).expect("valid dim"))
        .collect();
    let mean = |pop: &[Subspace]| {
        pop.iter().map(|v| v.dim() as f64).sum::<f64>() / (pop.len() * m) as f64
    };
    let mut out = vec![mean(&pop)];

    for t in 1..=steps {
        let prev = &pop;
        let next: Vec<Subspace> = (0..population)
            .into_par_iter()
            .map(|i| {
                let mut rng = stream(t, i);
                let picks: Vec<usize> = if population >= fan_in {
                    sample(&mut rng, population, fan_in).into_vec()
                } else {
                    (0..fan_in).map(|_| rng.gen_range(0..population)).collect()
                };
                let mut v = Subspace::random(field, m, noise_dim, &mut rng).expect("valid dim");
                for group in picks.chunks(dr - 1) {
                    if v.is_zero() {
                        break;
                    }
                    let u = Subspace::sum_all(field, m, group.iter().map(|&j| &prev[j]))
                        .expect("same space");
                    v = v.intersect(&u).expect("same space");
                }
                v
            })
            .collect();
        pop = next;
        out.push(mean(&pop));
    }
    Ok(out)
}
