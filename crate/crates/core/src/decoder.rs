//! Sum-product decoding with affine-subspace messages.
//!
//! Over CD(m, ε) every sum-product message is a uniform distribution on a coset of
//! F_q^m, so a message is carried as its support. A check node solves its parity
//! equation for the target symbol (a Minkowski sum of transformed cosets) and a
//! variable node intersects the channel coset with the incoming check messages.

use std::collections::BTreeSet;

use crate::channel::ChannelOutput;
use crate::code::ParityCheckCode;
use crate::error::{Error, Result};
use crate::field::{Elem, GlMatrix};
use crate::subspace::AffineSubspace;

/// Upper bound on the number of assignments [`brute_force_marginal`] will enumerate.
pub const BRUTE_FORCE_LIMIT: u64 = 1 << 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecoderConfig {
    pub max_iterations: usize,
    /// Record the mean normalized dimension of variable-to-check messages per iteration.
    pub track_dimensions: bool,
}

impl Default for DecoderConfig {
    fn default() -> Self {
        DecoderConfig {
            max_iterations: 100,
            track_dimensions: false,
        }
    }
}

impl DecoderConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::Parameter("max_iterations must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DecodeStatus {
    /// Every a-posteriori coset is a single point.
    Decoded,
    /// Messages reached a fixed point or the iteration limit.
    Stalled,
    /// Some intersection came out empty.
    Inconsistent,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecodeResult {
    pub status: DecodeStatus,
    pub iterations: usize,
    pub decoded_word: Option<Vec<Vec<Elem>>>,
    /// Dimension of each variable's a-posteriori coset when decoding stopped.
    pub final_dims: Vec<usize>,
    pub dim_trace: Option<Vec<f64>>,
}

impl DecodeResult {
    pub fn is_success(&self) -> bool {
        self.status == DecodeStatus::Decoded
    }

    pub fn max_final_dim(&self) -> usize {
        self.final_dims.iter().copied().max().unwrap_or(0)
    }
}

/// Snapshot handed to a decoding observer after each sweep. Iteration 0 is the
/// initial state, before any check node has been processed.
pub struct Sweep<'a> {
    pub iteration: usize,
    /// Indexed by edge, in check-major order.
    pub var_to_check: &'a [AffineSubspace],
    /// Empty at iteration 0.
    pub check_to_var: &'a [AffineSubspace],
    pub posteriors: &'a [AffineSubspace],
}

/// Check-node rule: the set of `x_t` with `h_t x_t = −Σ_k h_k x_k` for `x_k` ranging
/// over the incoming cosets.
pub fn check_update(incoming: &[(&AffineSubspace, &GlMatrix)], out_coeff: &GlMatrix) -> Result<AffineSubspace> {
    let m = out_coeff.dim();
    let field = out_coeff.field();
    for (a, h) in incoming {
        if a.ambient_dim() != m || h.dim() != m || a.field() != field || h.field() != field {
            return Err(Error::Shape("check_update operands disagree on F_q^m".into()));
        }
    }
    let images: Vec<AffineSubspace> = incoming.iter().map(|(a, h)| a.image(h)).collect();
    Ok(solve_for_target(&images, out_coeff, field, m))
}

fn solve_for_target(
    transformed: &[AffineSubspace],
    out_coeff: &GlMatrix,
    field: crate::field::Field,
    m: usize,
) -> AffineSubspace {
    let s = AffineSubspace::sum_all(field, m, transformed).expect("shapes agree");
    s.neg().preimage(out_coeff)
}

/// Variable-node rule: intersection of the channel coset with every incoming
/// coset, `None` when it is empty.
pub fn var_update(channel: &AffineSubspace, incoming: &[&AffineSubspace]) -> Result<Option<AffineSubspace>> {
    let mut acc = channel.clone();
    for a in incoming {
        match acc.intersect(a)? {
            Some(next) => acc = next,
            None => return Ok(None),
        }
    }
    Ok(Some(acc))
}

/// Edge layout shared by both decoders.
struct Graph<'a> {
    code: &'a ParityCheckCode,
    /// First edge id of each check; edges of check `c` are `start[c]..start[c+1]`.
    check_start: Vec<usize>,
    edge_var: Vec<usize>,
    var_edges: Vec<Vec<usize>>,
}

impl<'a> Graph<'a> {
    fn new(code: &'a ParityCheckCode) -> Graph<'a> {
        let mut check_start = Vec::with_capacity(code.n_checks() + 1);
        let mut edge_var = Vec::with_capacity(code.n_edges());
        let mut var_edges = vec![Vec::new(); code.n_vars()];
        for row in code.checks() {
            check_start.push(edge_var.len());
            for e in row {
                var_edges[e.var].push(edge_var.len());
                edge_var.push(e.var);
            }
        }
        check_start.push(edge_var.len());
        Graph {
            code,
            check_start,
            edge_var,
            var_edges,
        }
    }

    fn coeff(&self, check: usize, e: usize) -> &GlMatrix {
        &self.code.checks()[check][e - self.check_start[check]].coeff
    }
}

fn channel_cosets(code: &ParityCheckCode, outputs: &[ChannelOutput]) -> Result<Vec<AffineSubspace>> {
    if outputs.len() != code.n_vars() {
        return Err(Error::Shape(format!(
            "{} channel outputs for {} variables",
            outputs.len(),
            code.n_vars()
        )));
    }
    for (i, o) in outputs.iter().enumerate() {
        if o.y.len() != code.m() || o.noise_space.ambient_dim() != code.m() || o.noise_space.field() != code.field() {
            return Err(Error::Shape(format!(
                "channel output {i} does not live in F_{}^{}",
                code.field().q(),
                code.m()
            )));
        }
    }
    Ok(outputs.iter().map(ChannelOutput::received_affine).collect())
}

fn mean_normalized_dim(msgs: &[AffineSubspace], m: usize) -> f64 {
    if msgs.is_empty() {
        return 0.0;
    }
    msgs.iter().map(|a| a.dim() as f64).sum::<f64>() / (msgs.len() * m) as f64
}

fn finish(
    status: DecodeStatus,
    iterations: usize,
    posteriors: &[AffineSubspace],
    trace: Option<Vec<f64>>,
) -> DecodeResult {
    let decoded_word = (status == DecodeStatus::Decoded).then(|| {
        posteriors
            .iter()
            .map(|p| p.as_point().expect("decoded").to_vec())
            .collect()
    });
    DecodeResult {
        status,
        iterations,
        decoded_word,
        final_dims: posteriors.iter().map(AffineSubspace::dim).collect(),
        dim_trace: trace,
    }
}

/// Flooding sum-product decoder.
pub fn decode(code: &ParityCheckCode, outputs: &[ChannelOutput], cfg: &DecoderConfig) -> Result<DecodeResult> {
    decode_observed(code, outputs, cfg, |_| {})
}

/// [`decode`], calling `observer` after initialization and after every sweep.
pub fn decode_observed<F>(
    code: &ParityCheckCode,
    outputs: &[ChannelOutput],
    cfg: &DecoderConfig,
    mut observer: F,
) -> Result<DecodeResult>
where
    F: FnMut(&Sweep<'_>),
{
    cfg.validate()?;
    let channel = channel_cosets(code, outputs)?;
    let graph = Graph::new(code);
    let (field, m) = (code.field(), code.m());

    let mut v2c: Vec<AffineSubspace> = graph.edge_var.iter().map(|&v| channel[v].clone()).collect();
    let mut posteriors = channel.clone();
    let mut trace = cfg.track_dimensions.then(|| vec![mean_normalized_dim(&v2c, m)]);
    observer(&Sweep {
        iteration: 0,
        var_to_check: &v2c,
        check_to_var: &[],
        posteriors: &posteriors,
    });
    if posteriors.iter().all(|p| p.dim() == 0) {
        return Ok(finish(DecodeStatus::Decoded, 0, &posteriors, trace));
    }

    let mut c2v: Vec<AffineSubspace> = v2c.clone();
    for iteration in 1..=cfg.max_iterations {
        for c in 0..code.n_checks() {
            let edges = graph.check_start[c]..graph.check_start[c + 1];
            let transformed: Vec<AffineSubspace> = edges
                .clone()
                .map(|e| v2c[e].image(graph.coeff(c, e)))
                .collect();
            for (k, e) in edges.clone().enumerate() {
                let others: Vec<AffineSubspace> = transformed
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != k)
                    .map(|(_, a)| a.clone())
                    .collect();
                c2v[e] = solve_for_target(&others, graph.coeff(c, e), field, m);
            }
        }

        let mut next = v2c.clone();
        for v in 0..code.n_vars() {
            let edges = &graph.var_edges[v];
            for &e in edges {
                let incoming: Vec<&AffineSubspace> =
                    edges.iter().filter(|&&o| o != e).map(|&o| &c2v[o]).collect();
                match var_update(&channel[v], &incoming)? {
                    Some(msg) => next[e] = msg,
                    None => return Ok(finish(DecodeStatus::Inconsistent, iteration, &posteriors, trace)),
                }
            }
            let post = match edges.first() {
                None => Some(channel[v].clone()),
                Some(&e) => next[e].intersect(&c2v[e])?,
            };
            match post {
                Some(p) => posteriors[v] = p,
                None => return Ok(finish(DecodeStatus::Inconsistent, iteration, &posteriors, trace)),
            }
        }

        if let Some(t) = trace.as_mut() {
            t.push(mean_normalized_dim(&next, m));
        }
        observer(&Sweep {
            iteration,
            var_to_check: &next,
            check_to_var: &c2v,
            posteriors: &posteriors,
        });
        if posteriors.iter().all(|p| p.dim() == 0) {
            return Ok(finish(DecodeStatus::Decoded, iteration, &posteriors, trace));
        }
        if next == v2c {
            return Ok(finish(DecodeStatus::Stalled, iteration, &posteriors, trace));
        }
        v2c = next;
    }
    Ok(finish(DecodeStatus::Stalled, cfg.max_iterations, &posteriors, trace))
}

/// Peeling decoder: a check whose variables are all fixed except one determines
/// that one through the inverse of its coefficient. Runs until no check fires.
pub fn peeling_decode(code: &ParityCheckCode, outputs: &[ChannelOutput], cfg: &DecoderConfig) -> Result<DecodeResult> {
    cfg.validate()?;
    let mut current = channel_cosets(code, outputs)?;
    let (field, m) = (code.field(), code.m());
    let mut sweeps = 0;
    let mut resolved = vec![false; code.n_checks()];
    loop {
        if current.iter().all(|a| a.dim() == 0) {
            return Ok(finish(DecodeStatus::Decoded, sweeps, &current, None));
        }
        if sweeps == cfg.max_iterations {
            return Ok(finish(DecodeStatus::Stalled, sweeps, &current, None));
        }
        sweeps += 1;
        let mut progress = false;
        for (c, row) in code.checks().iter().enumerate() {
            if resolved[c] {
                continue;
            }
            let open: Vec<usize> = (0..row.len()).filter(|&k| current[row[k].var].dim() > 0).collect();
            let mut partial = vec![0; m];
            for (k, e) in row.iter().enumerate() {
                if !open.contains(&k) {
                    let x = current[e.var].as_point().expect("fixed");
                    field.axpy(&mut partial, 1, &e.coeff.apply(x));
                }
            }
            match open.as_slice() {
                [] => {
                    resolved[c] = true;
                    if partial.iter().any(|&e| e != 0) {
                        return Ok(finish(DecodeStatus::Inconsistent, sweeps, &current, None));
                    }
                }
                [k] => {
                    let e = &row[*k];
                    let value = e.coeff.apply_inverse(&field.neg_vec(&partial));
                    if !current[e.var].contains(&value)? {
                        return Ok(finish(DecodeStatus::Inconsistent, sweeps, &current, None));
                    }
                    current[e.var] = AffineSubspace::point(field, value);
                    resolved[c] = true;
                    progress = true;
                }
                _ => {}
            }
        }
        if !progress {
            return Ok(finish(DecodeStatus::Stalled, sweeps, &current, None));
        }
    }
}

/// Exact per-variable marginal supports: the values each symbol takes over all
/// assignments from the received cosets that satisfy every check.
pub fn brute_force_marginal(code: &ParityCheckCode, outputs: &[ChannelOutput]) -> Result<Vec<BTreeSet<Vec<Elem>>>> {
    let cosets = channel_cosets(code, outputs)?;
    let q = code.field().q() as f64;
    let log_size: f64 = cosets.iter().map(|c| c.dim() as f64 * q.log2()).sum();
    if log_size > (BRUTE_FORCE_LIMIT as f64).log2() + 1e-9 {
        return Err(Error::TooLarge(format!(
            "2^{log_size:.1} assignments exceed the limit of {BRUTE_FORCE_LIMIT}"
        )));
    }
    let field = code.field();
    let m = code.m();
    let n = code.n_vars();
    let candidates: Vec<Vec<Vec<Elem>>> = cosets.iter().map(AffineSubspace::elements).collect();

    // checks become decidable once their highest-indexed variable is assigned
    let mut ready: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (c, row) in code.checks().iter().enumerate() {
        if let Some(v) = row.iter().map(|e| e.var).max() {
            ready[v].push(c);
        }
    }
    // h_{c,v} x for every edge and every candidate x of its variable
    let products: Vec<Vec<Vec<Vec<Elem>>>> = code
        .checks()
        .iter()
        .map(|row| {
            row.iter()
                .map(|e| candidates[e.var].iter().map(|x| e.coeff.apply(x)).collect())
                .collect()
        })
        .collect();

    let mut marginals = vec![BTreeSet::new(); n];
    let mut choice = vec![0usize; n];
    if n == 0 {
        return Ok(marginals);
    }

    fn satisfied(
        code: &ParityCheckCode,
        products: &[Vec<Vec<Vec<Elem>>>],
        choice: &[usize],
        c: usize,
        m: usize,
        field: crate::field::Field,
    ) -> bool {
        let mut acc = vec![0; m];
        for (k, e) in code.checks()[c].iter().enumerate() {
            field.axpy(&mut acc, 1, &products[c][k][choice[e.var]]);
        }
        acc.iter().all(|&x| x == 0)
    }

    // iterative depth-first enumeration
    let mut depth = 0usize;
    let mut next = vec![0usize; n + 1];
    loop {
        if depth == n {
            for v in 0..n {
                marginals[v].insert(candidates[v][choice[v]].clone());
            }
            depth -= 1;
            continue;
        }
        if next[depth] >= candidates[depth].len() {
            next[depth] = 0;
            if depth == 0 {
                break;
            }
            depth -= 1;
            continue;
        }
        choice[depth] = next[depth];
        next[depth] += 1;
        if ready[depth]
            .iter()
            .all(|&c| satisfied(code, &products, &choice, c, m, field))
        {
            depth += 1;
        }
    }
    Ok(marginals)
}
