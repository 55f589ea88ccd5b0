mod common;

use std::collections::BTreeSet;

use common::{decode_recorded, is_affine_subset, random_tree_instance};
use nbldpc::channel::ChannelSpec;
use nbldpc::code::{build_coupled, build_regular};
use nbldpc::decoder::{decode, peeling_decode, DecodeStatus, DecoderConfig};
use nbldpc::field::Field;
use nbldpc::mc::trial_rng;

#[test]
fn tree_posteriors_equal_exact_marginals() {
    let cfg = DecoderConfig::default();
    for i in 0..60 {
        let mut rng = trial_rng(101, i);
        let inst = random_tree_instance(&mut rng);
        let rec = decode_recorded(&inst.code, &inst.outputs, &cfg);
        assert_ne!(rec.result.status, DecodeStatus::Inconsistent);
        let last = rec.posteriors.last().unwrap();
        for (v, post) in last.iter().enumerate() {
            let spa: BTreeSet<_> = post.elements().into_iter().collect();
            assert_eq!(spa, inst.exact[v], "instance {i}, variable {v}");
        }
    }
}

#[test]
fn messages_shrink_and_keep_truth() {
    let f = Field::new(2).unwrap();
    let cfg = DecoderConfig::default();
    for (i, eps) in [0.1, 0.2, 0.25, 0.3, 0.4].into_iter().enumerate() {
        let code = build_regular(3, 6, 6, 10, f, &mut trial_rng(5, i as u64)).unwrap();
        let channel = ChannelSpec::new(f, 10, eps).unwrap();
        for t in 0..10 {
            let mut rng = trial_rng(6, ((i as u64) << 32) | t);
            let out = channel.transmit_word(&vec![vec![0; 10]; code.n_vars()], &mut rng).unwrap();
            let rec = decode_recorded(&code, &out, &cfg);
            assert_eq!(rec.truth_violations, 0);
            assert_ne!(rec.result.status, DecodeStatus::Inconsistent);
            for pair in rec.posteriors.windows(2) {
                for (now, before) in pair[1].iter().zip(&pair[0]) {
                    assert!(is_affine_subset(now, before));
                }
            }
            if rec.result.is_success() {
                assert!(rec.result.decoded_word.unwrap().iter().all(|x| x.iter().all(|&e| e == 0)));
            }
        }
    }
}

#[test]
fn peeling_never_beats_spa() {
    let f = Field::new(3).unwrap();
    let cfg = DecoderConfig::default();
    let code = build_coupled(2, 4, 4, 4, 4, f, &mut trial_rng(9, 0)).unwrap();
    for eps in [0.25, 0.5, 0.75] {
        let channel = ChannelSpec::new(f, 4, eps).unwrap();
        for t in 0..20 {
            let out = channel
                .transmit_word(&vec![vec![0; 4]; code.n_vars()], &mut trial_rng(10, t))
                .unwrap();
            let peel = peeling_decode(&code, &out, &cfg).unwrap();
            let spa = decode(&code, &out, &cfg).unwrap();
            assert_ne!(peel.status, DecodeStatus::Inconsistent);
            for (p, s) in peel.final_dims.iter().zip(&spa.final_dims) {
                assert!(*p > 0 || *s == 0);
            }
            if peel.is_success() {
                assert!(spa.is_success());
            }
        }
    }
}

#[test]
fn noiseless_channel_decodes_immediately() {
    let f = Field::new(5).unwrap();
    let code = build_regular(2, 4, 3, 3, f, &mut trial_rng(1, 0)).unwrap();
    let out = ChannelSpec::new(f, 3, 0.0)
        .unwrap()
        .transmit_word(&vec![vec![0; 3]; code.n_vars()], &mut trial_rng(1, 1))
        .unwrap();
    let r = decode(&code, &out, &DecoderConfig::default()).unwrap();
    assert_eq!(r.status, DecodeStatus::Decoded);
    assert_eq!(r.iterations, 0);
}

#[test]
fn fully_erased_channel_stalls() {
    let f = Field::new(2).unwrap();
    let code = build_regular(3, 6, 2, 4, f, &mut trial_rng(2, 0)).unwrap();
    let out = ChannelSpec::new(f, 4, 1.0)
        .unwrap()
        .transmit_word(&vec![vec![0; 4]; code.n_vars()], &mut trial_rng(2, 1))
        .unwrap();
    let r = decode(&code, &out, &DecoderConfig::default()).unwrap();
    assert_eq!(r.status, DecodeStatus::Stalled);
    assert_eq!(r.max_final_dim(), 4);
}
