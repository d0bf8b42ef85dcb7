//! Genetic search checked against dense recomputation and exhaustive enumeration.

mod common;

use std::collections::BTreeMap;

use common::*;
use ndarray::{Array2, Axis};
use nodeinject::ga::{
    evaluate_fitness, init_population, run_ga, select_candidates, Fitness, FitnessContext, GaConfig, Individual,
};
use nodeinject::graph::{inject_node, FeatureKind, FeatureRow, InjectionRecord};
use nodeinject::models::{Classifier, SgcModel};
use nodeinject::split::{make_split, DataSplit, SplitRatios};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

struct Setup {
    inst: Instance,
    surrogate: SgcModel,
    split: DataSplit,
    labels: Vec<usize>,
    row: FeatureRow,
    label: usize,
}

fn setup(r: &mut ChaCha8Rng, n: usize, p: f64) -> Setup {
    let classes = 3;
    let dim = 5;
    let inst = random_instance(r, n, p, dim, classes, FeatureKind::Continuous);
    let surrogate = SgcModel::from_weights(random_matrix(r, dim, classes, 1.0), 0);
    let split = make_split(n, SplitRatios { train: 0.2, val: 0.2, test: 0.6 }, r.gen()).unwrap();
    // reference labels deliberately differ from the ground truth in places
    let labels: Vec<usize> = (0..n).map(|_| r.gen_range(0..classes)).collect();
    let indices: Vec<usize> = (0..dim).filter(|_| r.gen_bool(0.5)).collect();
    let values = indices.iter().map(|_| r.gen_range(0.1..1.5)).collect();
    Setup {
        inst,
        surrogate,
        split,
        labels,
        row: FeatureRow { indices, values },
        label: r.gen_range(0..classes),
    }
}

impl Setup {
    fn ctx(&self) -> FitnessContext<'_> {
        FitnessContext::new(&self.surrogate, &self.inst.graph, &self.split, &self.labels, &self.row, self.label).unwrap()
    }

    fn eligible(&self) -> Vec<usize> {
        (0..self.inst.graph.num_nodes()).filter(|&v| self.labels[v] != self.label).collect()
    }

    /// Fitness from scratch: dense `Â'² X' W` on the explicitly extended graph,
    /// homophily recounted from neighbor sets.
    fn dense_fitness(&self, endpoints: &[usize]) -> (usize, f64) {
        let n = self.inst.graph.num_nodes();
        let mut edges = self.inst.edges.clone();
        edges.extend(endpoints.iter().map(|&e| (e, n)));
        let a = dense_a_hat(n + 1, &edges);
        let mut x = Array2::zeros((n + 1, self.inst.dense_x.ncols()));
        x.slice_mut(ndarray::s![..n, ..]).assign(&self.inst.dense_x);
        for (&j, &v) in self.row.indices.iter().zip(&self.row.values) {
            x[[n, j]] = v;
        }
        let logits = dense_sgc_logits(&a, &x, self.surrogate.weights());
        let wrong = self
            .split
            .test
            .iter()
            .filter(|&&v| argmax(logits.row(v).as_slice().unwrap()) != self.labels[v])
            .count();

        let before = neighbor_sets(n, &self.inst.edges);
        let after = neighbor_sets(n + 1, &edges);
        let mut labels = self.labels.clone();
        labels.push(self.label);
        let tdnh = endpoints
            .iter()
            .map(|&e| nh(&before, &self.labels, e).map_or(0.0, |b| b - nh(&after, &labels, e).unwrap()))
            .sum();
        (wrong, tdnh)
    }

    fn brute_force_best(&self, k: usize) -> (usize, f64) {
        subsets(&self.eligible(), k)
            .iter()
            .map(|s| self.dense_fitness(s))
            .fold((0, f64::NEG_INFINITY), |best, f| {
                if f.0 > best.0 || (f.0 == best.0 && f.1 > best.1) {
                    f
                } else {
                    best
                }
            })
    }
}

fn close(f: Fitness, want: (usize, f64)) -> bool {
    f.misclassified == want.0 && (f.tdnh - want.1).abs() < 1e-9
}

#[test]
fn incremental_fitness_matches_dense_recompute() {
    let mut r = rng(20);
    for _ in 0..25 {
        let n = r.gen_range(4..=12);
        let s = setup(&mut r, n, 0.25);
        let ctx = s.ctx();
        let eligible = s.eligible();
        for k in 1..=2.min(eligible.len()) {
            for endpoints in subsets(&eligible, k) {
                let got = ctx.evaluate(&endpoints);
                let want = s.dense_fitness(&endpoints);
                assert!(close(got, want), "{endpoints:?}: {got:?} vs {want:?}");
            }
        }
        // baseline: surrogate errors on the untouched graph
        let clean = s.surrogate.predict(&s.inst.graph).labels;
        let wrong = s.split.test.iter().filter(|&&v| clean[v] != s.labels[v]).count();
        assert_eq!(ctx.baseline(), wrong);
    }
}

#[test]
fn evaluation_leaves_inputs_untouched_and_is_pure() {
    let mut r = rng(21);
    let s = setup(&mut r, 12, 0.3);
    let graph_before = s.inst.graph.clone();
    let weights_before = s.surrogate.weights().clone();
    let ctx = s.ctx();
    let e = s.eligible();
    let mut pop = vec![Individual::new(vec![e[0], e[1]]), Individual::new(vec![e[0], e[1]])];
    evaluate_fitness(&mut pop, &ctx);
    assert_eq!(pop[0].fitness, pop[1].fitness);
    drop(ctx);
    assert_eq!(s.inst.graph, graph_before);
    assert_eq!(s.surrogate.weights(), &weights_before);
}

#[test]
fn far_component_endpoint_keeps_the_baseline() {
    // two components: a labelled cluster and a distant path without test nodes
    let mut r = rng(22);
    let s = setup(&mut r, 12, 0.4);
    let n = s.inst.graph.num_nodes();
    let far_edges: Vec<(usize, usize)> = (n..n + 4).zip(n + 1..n + 5).collect();
    let mut edges = s.inst.edges.clone();
    edges.extend(&far_edges);
    let mut dense = Array2::zeros((n + 5, 5));
    dense.slice_mut(ndarray::s![..n, ..]).assign(&s.inst.dense_x);
    dense.row_mut(n + 2).fill(1.0);
    let x = nodeinject::FeatureMatrix::from_dense(&dense).unwrap();
    let mut labels = s.inst.graph.labels().to_vec();
    labels.extend([0, 1, 2, 0, 1]);
    let g = nodeinject::Graph::new(n + 5, &edges, x, labels, FeatureKind::Continuous).unwrap();
    let mut reference = s.labels.clone();
    reference.extend([(s.label + 1) % 3; 5]);
    let ctx = FitnessContext::new(&s.surrogate, &g, &s.split, &reference, &s.row, s.label).unwrap();
    for far in n..n + 5 {
        assert_eq!(ctx.evaluate(&[far]).misclassified, ctx.baseline());
    }
}

#[test]
fn logits_change_only_within_three_hops() {
    let mut r = rng(23);
    let mut saw_third_hop_change = false;
    for _ in 0..30 {
        let s = setup(&mut r, 40, 0.06);
        let n = s.inst.graph.num_nodes();
        let e = s.eligible()[0];
        let rec = InjectionRecord {
            injected_id: n,
            assigned_label: s.label,
            features: s.row.clone(),
            neighbors: vec![e],
        };
        let h = inject_node(&s.inst.graph, &rec).unwrap();
        let before = s.surrogate.logits(&s.inst.graph);
        let after = s.surrogate.logits(&h);
        let mut edges = s.inst.edges.clone();
        edges.push((e, n));
        let dist = hops_from(&neighbor_sets(n + 1, &edges), n);
        for v in 0..n {
            let same = before.index_axis(Axis(0), v) == after.index_axis(Axis(0), v);
            if dist[v] > 3 {
                assert!(same, "node {v} at distance {} changed", dist[v]);
            }
            if dist[v] == 3 && !same {
                saw_third_hop_change = true;
            }
        }
    }
    // the endpoint's degree enters the normalization of its neighbors' rows,
    // which reach one hop further than the feature propagation itself
    assert!(saw_third_hop_change);
}

#[test]
fn candidate_selection_matches_exhaustive_scoring() {
    let mut r = rng(24);
    for _ in 0..20 {
        let s = setup(&mut r, 15, 0.2);
        let ctx = s.ctx();
        let mut scored: Vec<(usize, (usize, f64))> = s.eligible().into_iter().map(|v| (v, s.dense_fitness(&[v]))).collect();
        scored.sort_by(|a, b| {
            b.1 .0
                .cmp(&a.1 .0)
                .then(b.1 .1.partial_cmp(&a.1 .1).unwrap())
                .then(a.0.cmp(&b.0))
        });
        for alpha in [0.5, 1.0] {
            let keep = (alpha * scored.len() as f64).ceil() as usize;
            let got: Vec<usize> = select_candidates(&ctx, alpha).unwrap().iter().map(|c| c.node).collect();
            let want: Vec<usize> = scored[..keep].iter().map(|c| c.0).collect();
            if got != want {
                // only allowed to differ inside groups of exactly tied fitness
                let fit: BTreeMap<usize, (usize, f64)> = scored.iter().copied().collect();
                for (a, b) in got.iter().zip(&want) {
                    assert_eq!(fit[a].0, fit[b].0);
                    assert!((fit[a].1 - fit[b].1).abs() < 1e-12);
                }
            }
        }
    }
}

#[test]
fn initial_pairs_are_uniform() {
    // k = 2 over 5 candidates: 10 equally likely pairs
    let candidates = [2, 3, 5, 7, 11];
    let pop = init_population(&candidates, 2, 100, &mut rng(25)).unwrap();
    let mut counts: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    for ind in &pop {
        let mut e = ind.endpoints.clone();
        e.sort_unstable();
        *counts.entry(e).or_default() += 1;
    }
    let expected = 10.0;
    let chi2: f64 = subsets(&candidates, 2)
        .iter()
        .map(|p| {
            let o = counts.get(p).copied().unwrap_or(0) as f64;
            (o - expected).powi(2) / expected
        })
        .sum();
    // 99th percentile of chi-square with 9 degrees of freedom
    assert!(chi2 < 21.666, "chi-square {chi2}");
}

/// Candidate rate 1, a population four times the number of possible endpoint
/// sets, mutation on every individual, 50 generations.
fn exhaustive(eligible: usize, k: usize, seed: u64) -> GaConfig {
    let sets = subsets(&(0..eligible).collect::<Vec<_>>(), k).len();
    GaConfig {
        candidate_rate: 1.0,
        crossover_rate: 0.5,
        mutation_rate: 1.0,
        population_size: (4 * sets).max(2),
        max_iterations: 50,
        seed,
    }
}

#[test]
fn exhaustive_search_finds_the_brute_force_optimum() {
    let mut r = rng(26);
    let mut cases = 0;
    while cases < 25 {
        let n = r.gen_range(5..=20);
        let s = setup(&mut r, n, 0.2);
        let k = r.gen_range(1..=2);
        if s.eligible().len() < k {
            continue;
        }
        let ctx = s.ctx();
        let out = run_ga(&ctx, k, &exhaustive(s.eligible().len(), k, r.gen())).unwrap();
        let want = s.brute_force_best(k);
        assert!(close(out.best.fitness.unwrap(), want), "n={n} k={k}: {:?} vs {want:?}", out.best.fitness);
        cases += 1;
    }
}

#[test]
fn best_so_far_never_decreases() {
    let mut r = rng(27);
    let s = setup(&mut r, 20, 0.2);
    let ctx = s.ctx();
    let cfg = GaConfig {
        population_size: 6,
        max_iterations: 30,
        seed: 3,
        ..GaConfig::default()
    };
    let out = run_ga(&ctx, 3, &cfg).unwrap();
    assert_eq!(out.trace.len(), 31);
    for w in out.trace.windows(2) {
        assert!(w[1].best.rank_cmp(&w[0].best).is_ge());
    }
    assert_eq!(out.trace.last().unwrap().best, out.best.fitness.unwrap());
    assert!(out.best.endpoints.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn zero_iterations_return_the_best_initial_individual() {
    let mut r = rng(28);
    let s = setup(&mut r, 16, 0.2);
    let ctx = s.ctx();
    let cfg = GaConfig {
        population_size: 8,
        max_iterations: 0,
        seed: 9,
        ..GaConfig::default()
    };
    let out = run_ga(&ctx, 2, &cfg).unwrap();
    let pool: Vec<usize> = out.candidates.iter().map(|c| c.node).collect();
    let mut init = init_population(&pool, 2, 8, &mut nodeinject::rng::stream(9, 0)).unwrap();
    evaluate_fitness(&mut init, &ctx);
    let best = init
        .iter()
        .map(|i| i.fitness.unwrap())
        .reduce(|a, b| if b.rank_cmp(&a).is_gt() { b } else { a })
        .unwrap();
    assert_eq!(out.best.fitness.unwrap(), best);
}

#[test]
fn worker_count_does_not_change_the_result() {
    let mut r = rng(29);
    let s = setup(&mut r, 60, 0.08);
    let cfg = GaConfig {
        population_size: 16,
        max_iterations: 15,
        seed: 42,
        ..GaConfig::default()
    };
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| run_ga(&s.ctx(), 3, &cfg).unwrap())
    };
    let one = run(1);
    for threads in [2, 4, 7] {
        let many = run(threads);
        assert_eq!(one.best, many.best);
        assert_eq!(one.trace, many.trace);
    }
}
