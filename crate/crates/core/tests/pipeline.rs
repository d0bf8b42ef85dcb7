//! End-to-end attack runs on planted-partition graphs.

use nodeinject::graph::{largest_connected_component, FeatureKind};
use nodeinject::models::{train_sgc, TrainConfig};
use nodeinject::pipeline::{
    evaluate_poisoning, injection_count, run_attack, run_random_injection, AttackConfig, AttackResult,
};
use nodeinject::synthetic::{planted_partition, PlantedPartition};
use nodeinject::{make_split, DataSplit, Error, GaConfig, Graph, LabelSource, SplitRatios, Victim};

fn dataset(kind: FeatureKind, seed: u64) -> (Graph, DataSplit) {
    let g = planted_partition(&PlantedPartition {
        nodes: 240,
        classes: 4,
        p_in: 0.05,
        p_out: 0.006,
        features: 48,
        signal: 0.25,
        noise: 0.03,
        feature_kind: kind,
        seed,
    })
    .unwrap();
    let (g, _) = largest_connected_component(&g, &DataSplit::default()).unwrap();
    let split = make_split(g.num_nodes(), SplitRatios::default(), seed).unwrap();
    (g, split)
}

fn quick(seed: u64) -> AttackConfig {
    AttackConfig {
        injection_ratio: 0.05,
        ga: GaConfig {
            population_size: 12,
            max_iterations: 10,
            ..GaConfig::default()
        },
        victims: vec![Victim::Sgc, Victim::Gcn],
        seed,
        ..AttackConfig::default()
    }
}

fn check_structure(g: &Graph, result: &AttackResult, cfg: &AttackConfig) {
    let n = g.num_nodes();
    let n_in = injection_count(n, cfg.injection_ratio).unwrap();
    assert_eq!(result.injections.len(), n_in);
    assert_eq!(result.perturbed.num_nodes(), n + n_in);
    assert_eq!(result.perturbed.original_graph(), *g);
    for (i, rec) in result.injections.iter().enumerate() {
        assert_eq!(rec.injected_id, n + i);
        assert_eq!(rec.neighbors.len(), result.budget.link_budgets[i]);
        assert_eq!(result.perturbed.neighbors(n + i), &rec.neighbors[..]);
        assert!(rec.neighbors.iter().all(|&u| u < n));
        assert_eq!(rec.features.nnz() + result.summaries[i].feature_shortfall, result.budget.feature_budget);
    }
    assert_eq!(result.report.feature_range_violations, 0);
    assert!(result.report.injected_degree_membership);
    assert_eq!(result.report.non_binary_values, 0);
}

#[test]
fn attack_respects_budgets_and_leaves_originals_alone() {
    for kind in [FeatureKind::Binary, FeatureKind::Continuous] {
        let (g, split) = dataset(kind, 1);
        let cfg = quick(5);
        let result = run_attack(&g, &split, &cfg).unwrap();
        check_structure(&g, &result, &cfg);
        assert_eq!(result.accuracies.len(), 2);
    }
}

#[test]
fn ground_truth_labels_run_too() {
    let (g, split) = dataset(FeatureKind::Binary, 2);
    let cfg = AttackConfig {
        label_source: LabelSource::GroundTruth,
        ..quick(6)
    };
    let result = run_attack(&g, &split, &cfg).unwrap();
    check_structure(&g, &result, &cfg);
}

#[test]
fn runs_are_reproducible_across_worker_counts() {
    let (g, split) = dataset(FeatureKind::Continuous, 3);
    let a = run_attack(&g, &split, &AttackConfig { workers: 1, ..quick(7) }).unwrap();
    let b = run_attack(&g, &split, &AttackConfig { workers: 4, ..quick(7) }).unwrap();
    assert_eq!(a.injections, b.injections);
    assert_eq!(a.summaries, b.summaries);
    assert_eq!(a.accuracies, b.accuracies);
    assert_eq!(a.perturbed, b.perturbed);
}

#[test]
fn no_injection_means_no_accuracy_change() {
    let (g, split) = dataset(FeatureKind::Binary, 4);
    let cfg = quick(8).victim_config();
    for victim in Victim::ALL {
        let (clean, poisoned) = evaluate_poisoning(&g, &g, &split, victim, &cfg).unwrap();
        assert_eq!(clean, poisoned);
    }
}

#[test]
fn searched_neighbors_hurt_the_surrogate_more_than_random_ones() {
    let mut attack_wrong = 0.0;
    let mut random_wrong = 0.0;
    for seed in 0..3 {
        let (g, split) = dataset(FeatureKind::Binary, 10 + seed);
        let cfg = AttackConfig {
            victims: vec![],
            ..quick(seed)
        };
        let attacked = run_attack(&g, &split, &cfg).unwrap();
        let random = run_random_injection(&g, &split, &cfg).unwrap();
        // identical budgets, labels and features; only the neighbors differ
        assert_eq!(attacked.budget, random.budget);
        for (a, r) in attacked.injections.iter().zip(&random.injections) {
            assert_eq!((a.assigned_label, &a.features), (r.assigned_label, &r.features));
        }
        attack_wrong += 1.0 - attacked.surrogate_accuracy(&split).unwrap().1;
        random_wrong += 1.0 - random.surrogate_accuracy(&split).unwrap().1;
    }
    assert!(attack_wrong > random_wrong, "attack {attack_wrong} vs random {random_wrong}");
}

#[test]
fn surrogate_loss_never_increases() {
    let (g, split) = dataset(FeatureKind::Continuous, 5);
    let model = train_sgc(&g, &split, &TrainConfig::sgc_default()).unwrap();
    let h = model.loss_history();
    assert!(h.windows(2).all(|w| w[1] <= w[0]));
    assert!(h.last().unwrap() < h.first().unwrap());
}

#[test]
fn tiny_ratios_are_rejected() {
    let (g, split) = dataset(FeatureKind::Binary, 6);
    let cfg = AttackConfig {
        injection_ratio: 1e-6,
        ..quick(0)
    };
    assert!(matches!(run_attack(&g, &split, &cfg), Err(Error::InvalidArgument(_))));
    assert!(injection_count(100, 0.0).is_err());
    assert_eq!(injection_count(2485, 0.05).unwrap(), 124);
}
