//! Generators and independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use arbiter_core::encoder::DebateFramework;
use arbiter_core::framework::ArgumentationFramework;
use arbiter_core::gn::{gn_forward_trace, gn_gradient, gn_loss, GnParameters};
use arbiter_core::model::{Adu, Debate, Phase, Relation, RelationKind, Stance};
use arbiter_core::sample::{LearningSample, SampleEdge, SampleNode, SampleSource};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn random_af(rng: &mut ChaCha8Rng, n: usize, density: f64) -> ArgumentationFramework {
    let mut attacks = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if rng.random_bool(density) {
                attacks.push((a, b));
            }
        }
    }
    ArgumentationFramework::with_indexed_names(n, attacks).unwrap()
}

/// A valid debate with random topology. Inference and rephrase edges join
/// same-stance ADUs with probability `1 - cross`.
pub fn random_debate(rng: &mut ChaCha8Rng, id: &str, max_adus: usize, cross: f64) -> Debate {
    let n = rng.random_range(1..=max_adus);
    let adus: Vec<Adu> = (0..n)
        .map(|i| Adu {
            id: format!("u{i:02}"),
            text: format!("unit {i}"),
            stance: if rng.random_bool(0.5) {
                Stance::Favour
            } else {
                Stance::Against
            },
            phase: Phase::Argumentation,
        })
        .collect();
    let mut relations = Vec::new();
    let m = rng.random_range(0..=2 * n);
    for _ in 0..m {
        let s = rng.random_range(0..n);
        let t = rng.random_range(0..n);
        if s == t {
            continue;
        }
        let kind = match rng.random_range(0..3) {
            0 => RelationKind::Conflict,
            1 => RelationKind::Rephrase,
            _ => RelationKind::Inference,
        };
        if kind != RelationKind::Conflict
            && adus[s].stance != adus[t].stance
            && !rng.random_bool(cross)
        {
            continue;
        }
        relations.push(Relation {
            source: adus[s].id.clone(),
            target: adus[t].id.clone(),
            kind,
        });
    }
    Debate {
        id: id.to_string(),
        winner: Stance::Favour,
        adus,
        relations,
    }
}

/// Weakly connected components of the inference/rephrase graph, by BFS.
pub fn component_oracle(debate: &Debate) -> Vec<BTreeSet<String>> {
    let mut adj: HashMap<&str, Vec<&str>> = HashMap::new();
    for r in &debate.relations {
        if r.kind != RelationKind::Conflict {
            adj.entry(&r.source).or_default().push(&r.target);
            adj.entry(&r.target).or_default().push(&r.source);
        }
    }
    let mut seen: BTreeSet<&str> = BTreeSet::new();
    let mut out = Vec::new();
    for adu in &debate.adus {
        if !seen.insert(&adu.id) {
            continue;
        }
        let mut comp = BTreeSet::new();
        let mut queue = VecDeque::from([adu.id.as_str()]);
        while let Some(x) = queue.pop_front() {
            comp.insert(x.to_string());
            for &y in adj.get(x).into_iter().flatten() {
                if seen.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        out.push(comp);
    }
    out
}

/// Checks an encoding against the BFS components and the conflict list.
pub fn check_encoding(debate: &Debate, df: &DebateFramework) -> Result<(), String> {
    let mut expected = component_oracle(debate);
    expected.sort();
    let mut found: Vec<BTreeSet<String>> = df
        .arguments
        .iter()
        .map(|a| a.adu_ids.iter().cloned().collect())
        .collect();
    found.sort();
    if expected != found {
        return Err(format!("components differ: {expected:?} vs {found:?}"));
    }
    if df.af.len() != expected.len() {
        return Err("AF size differs from component count".into());
    }
    let owner: BTreeMap<&str, usize> = df
        .arguments
        .iter()
        .flat_map(|a| a.adu_ids.iter().map(move |u| (u.as_str(), a.id)))
        .collect();
    let witnessed: BTreeSet<(usize, usize)> = debate
        .relations
        .iter()
        .filter(|r| r.kind == RelationKind::Conflict)
        .map(|r| (owner[r.source.as_str()], owner[r.target.as_str()]))
        .collect();
    if &witnessed != df.af.attacks() {
        return Err(format!(
            "attacks {:?} not witnessed exactly by conflicts {:?}",
            df.af.attacks(),
            witnessed
        ));
    }
    for a in &df.arguments {
        let favour = a
            .adu_ids
            .iter()
            .filter(|u| debate.adu(u).unwrap().stance == Stance::Favour)
            .count();
        let majority = if 2 * favour > a.adu_ids.len() {
            Stance::Favour
        } else {
            Stance::Against
        };
        if a.stance != majority {
            return Err(format!("argument {} has stance {}", a.id, a.stance));
        }
    }
    Ok(())
}

/// True when some component has as many Favour as Against members.
pub fn has_stance_tie(debate: &Debate) -> bool {
    component_oracle(debate).iter().any(|c| {
        let favour = c
            .iter()
            .filter(|u| debate.adu(u).unwrap().stance == Stance::Favour)
            .count();
        2 * favour == c.len()
    })
}

pub fn shuffled(rng: &mut ChaCha8Rng, debate: &Debate) -> Debate {
    let mut d = debate.clone();
    d.adus.shuffle(rng);
    d.relations.shuffle(rng);
    d
}

/// Complete bipartite sample with random node features.
pub fn random_sample(
    rng: &mut ChaCha8Rng,
    favour: usize,
    against: usize,
    node_dim: usize,
    edge_dim: usize,
) -> LearningSample {
    let nodes: Vec<SampleNode> = (0..favour + against)
        .map(|i| SampleNode {
            argument: i,
            stance: if i < favour {
                Stance::Favour
            } else {
                Stance::Against
            },
            features: (0..node_dim).map(|_| rng.random_range(-1.0..1.0)).collect(),
        })
        .collect();
    let mut edges = Vec::new();
    for f in 0..favour {
        for a in favour..favour + against {
            for (sender, receiver) in [(f, a), (a, f)] {
                edges.push(SampleEdge {
                    sender,
                    receiver,
                    features: vec![1.0; edge_dim],
                });
            }
        }
    }
    LearningSample {
        debate_id: "random".into(),
        source: SampleSource::Naive,
        nodes,
        edges,
        global: vec![0.0, 0.0],
        label: if rng.random_bool(0.5) {
            Stance::Favour
        } else {
            Stance::Against
        },
    }
}

/// Reorders nodes by `node_perm` (new position -> old index) and edges by
/// `edge_perm`, rewriting edge endpoints.
pub fn permute_sample(
    s: &LearningSample,
    node_perm: &[usize],
    edge_perm: &[usize],
) -> LearningSample {
    let mut new_index = vec![0; node_perm.len()];
    for (new, &old) in node_perm.iter().enumerate() {
        new_index[old] = new;
    }
    let mut out = s.clone();
    out.nodes = node_perm.iter().map(|&i| s.nodes[i].clone()).collect();
    out.edges = edge_perm
        .iter()
        .map(|&k| {
            let e = &s.edges[k];
            SampleEdge {
                sender: new_index[e.sender],
                receiver: new_index[e.receiver],
                features: e.features.clone(),
            }
        })
        .collect();
    out
}

#[derive(Debug, Clone, Copy)]
pub struct FdReport {
    pub max_rel_error: f64,
    pub checked: usize,
    /// Coordinates whose perturbation flipped a ReLU, where the loss is not
    /// differentiable at the scale of the step.
    pub skipped: usize,
}

/// Relative error with a floor so that two vanishing gradients agree.
pub fn rel_error(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-6)
}

/// Central finite differences on the given flat parameter coordinates.
pub fn finite_difference_check(
    params: &GnParameters,
    sample: &LearningSample,
    coords: &[usize],
    step: f64,
) -> FdReport {
    let class = sample.class();
    let (_, grad) = gn_gradient(params, sample, class).unwrap();
    let analytic = grad.flat_params();
    let mut report = FdReport {
        max_rel_error: 0.0,
        checked: 0,
        skipped: 0,
    };
    for &i in coords {
        let eval = |delta: f64| {
            let mut p = params.clone();
            *p.param_mut(i) += delta;
            let trace = gn_forward_trace(&p, sample).unwrap();
            (gn_loss(trace.probs, class), trace.relu_pattern())
        };
        let (plus, pat_plus) = eval(step);
        let (minus, pat_minus) = eval(-step);
        if pat_plus != pat_minus {
            report.skipped += 1;
            continue;
        }
        let numeric = (plus - minus) / (2.0 * step);
        report.max_rel_error = report.max_rel_error.max(rel_error(analytic[i], numeric));
        report.checked += 1;
    }
    report
}

/// Coordinates covering every weight matrix and bias vector.
pub fn coordinate_sample(
    rng: &mut ChaCha8Rng,
    params: &GnParameters,
    per_tensor: usize,
) -> Vec<usize> {
    let mut coords = Vec::new();
    let mut offset = 0;
    for (_, layer) in params.layers() {
        for len in [layer.weights.len(), layer.bias.len()] {
            for _ in 0..per_tensor.min(len) {
                coords.push(offset + rng.random_range(0..len));
            }
            offset += len;
        }
    }
    coords
}
