#![allow(dead_code)]

use std::collections::BTreeSet;

use nbldpc::channel::{ChannelOutput, ChannelSpec};
use nbldpc::code::ParityCheckCode;
use nbldpc::decoder::{brute_force_marginal, decode_observed, DecodeResult, DecoderConfig};
use nbldpc::error::Error;
use nbldpc::field::{random_gl, Elem, Field};
use nbldpc::subspace::AffineSubspace;
use rand::Rng;

/// Random cycle-free code: each new check joins one existing variable to one or
/// two fresh ones, so the Tanner graph is a tree.
pub fn random_tree_code<R: Rng>(field: Field, m: usize, n_vars: usize, rng: &mut R) -> ParityCheckCode {
    let mut rows = Vec::new();
    let mut have = 1;
    while have < n_vars {
        let anchor = rng.gen_range(0..have);
        let fresh = rng.gen_range(1..=2).min(n_vars - have);
        let mut row = vec![(anchor, random_gl(field, m, rng))];
        for v in have..have + fresh {
            row.push((v, random_gl(field, m, rng)));
        }
        have += fresh;
        rows.push(row);
    }
    ParityCheckCode::new(field, m, n_vars, rows).unwrap()
}

pub struct TreeInstance {
    pub code: ParityCheckCode,
    pub outputs: Vec<ChannelOutput>,
    pub exact: Vec<BTreeSet<Vec<Elem>>>,
}

/// Tree instance with N ≤ 8, m ≤ 3, q ∈ {2, 3} and the all-zero codeword sent,
/// redrawn until the exhaustive marginal fits the enumeration limit.
pub fn random_tree_instance<R: Rng>(rng: &mut R) -> TreeInstance {
    loop {
        let field = Field::new(if rng.gen_bool(0.5) { 2 } else { 3 }).unwrap();
        let m = rng.gen_range(1..=3);
        let n = rng.gen_range(2..=8);
        let code = random_tree_code(field, m, n, rng);
        let eps = rng.gen_range(0..=m) as f64 / m as f64;
        let channel = ChannelSpec::new(field, m, eps).unwrap();
        let outputs = channel.transmit_word(&vec![vec![0; m]; n], rng).unwrap();
        match brute_force_marginal(&code, &outputs) {
            Ok(exact) => return TreeInstance { code, outputs, exact },
            Err(Error::TooLarge(_)) => continue,
            Err(e) => panic!("{e}"),
        }
    }
}

/// Decodes while recording every sweep's messages and posteriors.
pub struct Recorded {
    pub result: DecodeResult,
    pub posteriors: Vec<Vec<AffineSubspace>>,
    pub truth_violations: usize,
}

pub fn decode_recorded(code: &ParityCheckCode, outputs: &[ChannelOutput], cfg: &DecoderConfig) -> Recorded {
    let zero = vec![0; code.m()];
    let mut posteriors = Vec::new();
    let mut truth_violations = 0;
    let result = decode_observed(code, outputs, cfg, |s| {
        truth_violations += s
            .var_to_check
            .iter()
            .chain(s.check_to_var)
            .chain(s.posteriors)
            .filter(|a| !a.contains(&zero).unwrap())
            .count();
        posteriors.push(s.posteriors.to_vec());
    })
    .unwrap();
    Recorded {
        result,
        posteriors,
        truth_violations,
    }
}

pub fn is_affine_subset(a: &AffineSubspace, b: &AffineSubspace) -> bool {
    a.direction().is_subspace_of(b.direction()).unwrap() && b.contains(a.offset()).unwrap()
}
