use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::model::Stance;
use crate::sample::{LearningSample, SampleEdge, SampleNode, SampleSource};

fn random_sample(
    rng: &mut ChaCha8Rng,
    favour: usize,
    against: usize,
    dim: usize,
) -> LearningSample {
    let mut nodes = Vec::new();
    for i in 0..favour + against {
        nodes.push(SampleNode {
            argument: i,
            stance: if i < favour {
                Stance::Favour
            } else {
                Stance::Against
            },
            features: (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect(),
        });
    }
    let mut edges = Vec::new();
    for f in 0..favour {
        for a in favour..favour + against {
            for (s, r) in [(f, a), (a, f)] {
                edges.push(SampleEdge {
                    sender: s,
                    receiver: r,
                    features: vec![1.0; 3],
                });
            }
        }
    }
    LearningSample {
        debate_id: "t".into(),
        source: SampleSource::Naive,
        nodes,
        edges,
        global: vec![0.0; 2],
        label: if rng.random_bool(0.5) {
            Stance::Favour
        } else {
            Stance::Against
        },
    }
}

fn shape() -> GnShape {
    GnShape::new(4, 3, 2)
}

#[test]
fn probabilities_are_normalized() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let params = GnParameters::init(shape(), 3);
    for _ in 0..20 {
        let (f, a) = (rng.random_range(0..4), rng.random_range(1..4));
        let s = random_sample(&mut rng, f, a, 4);
        let p = gn_forward(&params, &s).unwrap();
        assert!((p[0] + p[1] - 1.0).abs() < 1e-9);
        assert!(p.iter().all(|&x| x > 0.0 && x < 1.0));
    }
}

#[test]
fn edge_free_samples_are_defined() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let params = GnParameters::init(shape(), 3);
    let s = random_sample(&mut rng, 3, 0, 4);
    assert!(s.edges.is_empty());
    let p = gn_forward(&params, &s).unwrap();
    assert!((p[0] + p[1] - 1.0).abs() < 1e-9);
    let (loss, grad) = gn_gradient(&params, &s, 0).unwrap();
    assert!(loss.is_finite());
    // no edges: φe receives no gradient
    assert!(grad
        .edge_mlp
        .layers
        .iter()
        .all(|l| l.weights.iter().all(|&w| w == 0.0)));
}

#[test]
fn rejects_bad_dimensions_and_empty_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let params = GnParameters::init(shape(), 3);
    let s = random_sample(&mut rng, 2, 2, 5);
    assert!(matches!(
        gn_forward(&params, &s),
        Err(crate::Error::DimensionMismatch { .. })
    ));
    let mut empty = random_sample(&mut rng, 1, 1, 4);
    empty.nodes.clear();
    empty.edges.clear();
    assert!(gn_forward(&params, &empty).is_err());
}

#[test]
fn loss_values() {
    assert!(gn_loss([1.0, 0.0], 0).abs() < 1e-12);
    assert!((gn_loss([0.5, 0.5], 1) - std::f64::consts::LN_2).abs() < 1e-12);
    assert!((gn_loss([0.9, 0.1], 1) - std::f64::consts::LN_10).abs() < 1e-12);
    // clamped, not infinite
    assert!((gn_loss([1.0, 0.0], 1) - 27.631021115928547).abs() < 1e-9);
}

#[test]
fn duplicated_sample_doubles_gradient() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let params = GnParameters::init(shape(), 5);
    let s = random_sample(&mut rng, 2, 1, 4);
    let (l1, g1) = batch_gradient(&params, &[&s]).unwrap();
    let (l2, g2) = batch_gradient(&params, &[&s, &s]).unwrap();
    assert!((l2 - 2.0 * l1).abs() < 1e-12);
    for (a, b) in g1.flat_params().iter().zip(g2.flat_params()) {
        assert!((2.0 * a - b).abs() <= 1e-12 * (1.0 + a.abs()));
    }
}

#[test]
fn zero_learning_rate_keeps_parameters() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let samples: Vec<_> = (0..4).map(|_| random_sample(&mut rng, 2, 2, 4)).collect();
    let params = GnParameters::init(shape(), 9);
    let cfg = TrainConfig {
        learning_rate: 0.0,
        epochs: 3,
        batch_size: 2,
        seed: 1,
    };
    let out = train(params.clone(), &samples, &cfg).unwrap();
    let before: Vec<u64> = params.flat_params().iter().map(|x| x.to_bits()).collect();
    let after: Vec<u64> = out
        .params
        .flat_params()
        .iter()
        .map(|x| x.to_bits())
        .collect();
    assert_eq!(before, after);
    assert_eq!(out.loss_history.len(), 3);
}

#[test]
fn config_validation() {
    let bad = TrainConfig {
        epochs: 0,
        ..TrainConfig::default()
    };
    assert!(bad.validate().is_err());
    let bad = TrainConfig {
        learning_rate: -1.0,
        ..TrainConfig::default()
    };
    assert!(bad.validate().is_err());
    assert!(TrainConfig::default().validate().is_ok());
}

#[test]
fn vote_aggregation() {
    let f = [0.8, 0.2];
    let a = [0.3, 0.7];
    assert_eq!(aggregate_votes(&[f, f, a]).unwrap().class, Stance::Favour);
    assert_eq!(aggregate_votes(&[a]).unwrap().class, Stance::Against);
    // tied vote, mean probabilities F 0.7 vs A 0.6
    let tie = aggregate_votes(&[[0.9, 0.5], [0.5, 0.7]]).unwrap();
    assert_eq!(tie.votes, [1, 1]);
    assert_eq!(tie.class, Stance::Favour);
    assert!((tie.confidence - 0.7).abs() < 1e-12);
    assert!(aggregate_votes(&[]).is_err());
}

#[test]
fn checkpoint_round_trip_is_bit_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let samples: Vec<_> = (0..3).map(|_| random_sample(&mut rng, 1, 2, 4)).collect();
    let trained = train(
        GnParameters::init(shape(), 2),
        &samples,
        &TrainConfig {
            learning_rate: 0.01,
            epochs: 2,
            ..TrainConfig::default()
        },
    )
    .unwrap()
    .params;
    let back = checkpoint_from_str(&checkpoint_to_string(&trained)).unwrap();
    let a: Vec<u64> = trained.flat_params().iter().map(|x| x.to_bits()).collect();
    let b: Vec<u64> = back.flat_params().iter().map(|x| x.to_bits()).collect();
    assert_eq!(a, b);
    assert_eq!(back.shape, trained.shape);
}

#[test]
fn checkpoint_rejects_tampered_shapes() {
    let params = GnParameters::init(
        GnShape {
            hidden: 4,
            ..shape()
        },
        0,
    );
    let text = checkpoint_to_string(&params).replacen("\"hidden\": 4", "\"hidden\": 5", 1);
    assert!(checkpoint_from_str(&text).is_err());
}

#[test]
fn untrained_loss_is_near_ln2() {
    // Balanced set: every graph appears once with each label.
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let graphs: Vec<_> = (0..20)
        .map(|_| {
            let (f, a) = (rng.random_range(1..4), rng.random_range(1..4));
            random_sample(&mut rng, f, a, 4)
        })
        .collect();
    let mut total = 0.0;
    for seed in 0..10 {
        let params = GnParameters::init(shape(), seed);
        let mut loss = 0.0;
        for g in &graphs {
            let p = gn_forward(&params, g).unwrap();
            loss += gn_loss(p, 0) + gn_loss(p, 1);
        }
        total += loss / (2.0 * graphs.len() as f64);
    }
    let mean = total / 10.0;
    let ln2 = std::f64::consts::LN_2;
    assert!((mean - ln2).abs() < 0.1 * ln2, "mean loss {mean}");
}
