//! Acceptance suite: one test per criterion, each printing a PASS line
//! (run with `cargo test --test acceptance -- --nocapture` to see them all).

use std::time::Instant;

use guesswork_core::active_set::{
    active_set_upper_bound, ActiveSetConfig, SaSchedule,
};
use guesswork_core::ensemble::{
    expected_cost, CostVector, CqEnsemble, GuessOrder, JointDistribution, OutcomeLabel, Povm,
};
use guesswork_core::entropic;
use guesswork_core::io::{example_ensemble, haar_basis_povm, seeded_rng, ExampleSpec};
use guesswork_core::linalg::HermitianMatrix;
use guesswork_core::solver::{
    classical_conditional_guesswork, classical_guesswork, solve_dual, solve_primal,
    solve_primal_with, verify_optimality, CertificateMode, SolverOptions,
};
use guesswork_core::strategy::{
    guess_distribution, measured_to_ordered, ordered_to_sequential, sequential_to_ordered,
    MeasuredStrategy, Strategy,
};

const BB84_VALUE: f64 = 1.7094305849579052; // (10 - sqrt(10)) / 4
const TRINE_VALUE: f64 = 1.4226497308103742; // 2 - 1/sqrt(3)
const TOL: f64 = 1e-8; // default solver tolerance

fn pass(n: usize, what: &str) {
    println!("ACCEPTANCE {n}: PASS - {what}");
}

fn bb84() -> CqEnsemble {
    example_ensemble(&ExampleSpec::Bb84).unwrap()
}

fn trine() -> CqEnsemble {
    example_ensemble(&ExampleSpec::Trine).unwrap()
}

fn classical_bb84_table() -> JointDistribution {
    JointDistribution::new(
        4,
        2,
        vec![0.25, 0.0, 0.125, 0.125, 0.125, 0.125, 0.0, 0.25],
    )
    .unwrap()
}

/// Random qubit ensemble over three letters (used by several criteria).
fn random_qubit_ensemble(seed: u64) -> CqEnsemble {
    example_ensemble(&ExampleSpec::RandomQubits { n: 3, seed }).unwrap()
}

fn light_schedule() -> SaSchedule {
    SaSchedule {
        initial_temperature: 1.0,
        decay: 0.9,
        steps_per_temperature: 20,
    }
}

#[test]
fn c01_bb84_exact_value() {
    let ens = bb84();
    let cv = CostVector::standard(4);
    let started = Instant::now();
    let sol = solve_primal(&ens, &cv).unwrap();
    let elapsed = started.elapsed().as_secs_f64();
    assert!(
        (sol.value - BB84_VALUE).abs() < 1e-6,
        "primal value {} vs {BB84_VALUE}",
        sol.value
    );
    let dual = solve_dual(&ens, &cv).unwrap();
    assert!(
        (dual.value - BB84_VALUE).abs() < 2e-6,
        "dual value {}",
        dual.value
    );
    assert!(elapsed < 10.0, "solve took {elapsed:.2}s");
    pass(1, "bb84 primal and dual match (10 - sqrt(10))/4 within 1e-6 / 2e-6, under 10 s");
}

#[test]
fn c02_trine_exact_value() {
    let sol = solve_primal(&trine(), &CostVector::standard(3)).unwrap();
    assert!(
        (sol.value - TRINE_VALUE).abs() < 1e-6,
        "trine value {}",
        sol.value
    );
    pass(2, "trine value matches 2 - 1/sqrt(3) within 1e-6");
}

#[test]
fn c03_classical_analogues() {
    // (a) the classical table needs 1.75 guesses on average
    let table_value =
        classical_conditional_guesswork(&classical_bb84_table(), &CostVector::standard(4))
            .unwrap();
    assert!((table_value - 1.75).abs() < 1e-9, "table value {table_value}");

    // (b) the family endpoints are classical and solve to 1.75
    for phi in [0.0, std::f64::consts::PI] {
        let ens = example_ensemble(&ExampleSpec::Bb84Family { phi }).unwrap();
        let sol = solve_primal(&ens, &CostVector::standard(4)).unwrap();
        assert!(
            (sol.value - 1.75).abs() < 1e-6,
            "phi = {phi}: value {}",
            sol.value
        );
    }

    // (c) trine restricted to the standard-basis measurement costs 1.5
    let ens = trine();
    let cv = CostVector::standard(3);
    let basis_povm = Povm::new(vec![
        (
            OutcomeLabel::Opaque("0".into()),
            HermitianMatrix::diag(&[1.0, 0.0]),
        ),
        (
            OutcomeLabel::Opaque("1".into()),
            HermitianMatrix::diag(&[0.0, 1.0]),
        ),
    ])
    .unwrap();
    let joint = JointDistribution::from_measurement(&ens, &basis_povm).unwrap();
    let orders: Vec<GuessOrder> = (0..2)
        .map(|y| classical_guesswork(&joint.posterior(y), &cv).unwrap().1)
        .collect();
    let measured = MeasuredStrategy::deterministic(basis_povm, orders).unwrap();
    let ordered = measured_to_ordered(&measured).unwrap();
    let cost = expected_cost(&ens, &cv, &ordered).unwrap();
    assert!((cost - 1.5).abs() < 1e-9, "standard-basis trine cost {cost}");

    pass(3, "classical analogues: table 1.75, family endpoints 1.75, basis-measured trine 1.5");
}

#[test]
fn c04_phi_sweep_shape() {
    let points = 64;
    let cv = CostVector::standard(4);
    let mut values = Vec::with_capacity(points);
    for i in 0..points {
        let phi = i as f64 * std::f64::consts::PI / (points - 1) as f64;
        let ens = example_ensemble(&ExampleSpec::Bb84Family { phi }).unwrap();
        values.push(solve_primal(&ens, &cv).unwrap().value);
    }
    // symmetric about pi/2
    for i in 0..points {
        let mirrored = values[points - 1 - i];
        assert!(
            (values[i] - mirrored).abs() <= 1e-5,
            "asymmetry at grid point {i}: {} vs {mirrored}",
            values[i]
        );
    }
    // minimum at a grid point nearest pi/2 (31 and 32 are equidistant)
    let argmin = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .unwrap()
        .0;
    assert!(
        argmin == 31 || argmin == 32,
        "minimum at grid point {argmin}"
    );
    pass(4, "64-point sweep is symmetric about pi/2 and dips at the nearest grid point");
}

#[test]
fn c05_active_set_exactness() {
    // default schedule and seed, kappa = d_B^2
    let cfg = ActiveSetConfig::default();

    let res = active_set_upper_bound(&bb84(), &CostVector::standard(4), &cfg).unwrap();
    assert!(
        (res.upper_bound - BB84_VALUE).abs() < 1e-5,
        "bb84 bound {}",
        res.upper_bound
    );

    let res = active_set_upper_bound(&trine(), &CostVector::standard(3), &cfg).unwrap();
    assert!(
        (res.upper_bound - TRINE_VALUE).abs() < 1e-5,
        "trine bound {}",
        res.upper_bound
    );

    // soundness across 50 random instances: never below the exact value
    for seed in 0..50u64 {
        let ens = random_qubit_ensemble(seed);
        let cv = CostVector::standard(3);
        let exact = solve_primal(&ens, &cv).unwrap().value;
        let cfg = ActiveSetConfig {
            sa_restarts: 8,
            sa_schedule: light_schedule(),
            rng_seed: seed,
            ..ActiveSetConfig::default()
        };
        let res = active_set_upper_bound(&ens, &cv, &cfg).unwrap();
        assert!(
            res.upper_bound >= exact - 1e-7,
            "seed {seed}: bound {} below exact {exact}",
            res.upper_bound
        );
        // anytime monotone soundness of the whole trace
        for b in &res.bound_trace {
            assert!(*b >= exact - 1e-7, "seed {seed}: trace entry {b} below exact");
        }
    }
    pass(5, "active set exact on bb84/trine at kappa = d^2; 50-seed soundness holds");
}

#[test]
fn c06_theorem_1_round_trips() {
    let mut rng = seeded_rng(99);
    for trial in 0..50u64 {
        use rand::Rng;
        let n_letters = 2 + (trial % 2) as usize; // |X| in {2, 3}
        let dim = 2 + ((trial / 2) % 2) as usize; // d_B in {2, 3}
        let ens = {
            let states = (0..n_letters)
                .map(|_| guesswork_core::io::haar_random_state(dim, &mut rng))
                .collect();
            CqEnsemble::uniform(
                (0..n_letters).map(|i| format!("x{i}")).collect(),
                states,
            )
            .unwrap()
        };
        let cv = CostVector::standard(n_letters);

        // random POVM over distinct orders: normalize random PSD matrices
        let all_orders: Vec<GuessOrder> =
            guesswork_core::ensemble::enumerate_orders(n_letters, n_letters).collect();
        let m = 2 + (rng.random_range(0..all_orders.len() - 1));
        let mut picked = all_orders;
        for i in (1..picked.len()).rev() {
            let j = rng.random_range(0..=i);
            picked.swap(i, j);
        }
        picked.truncate(m);
        picked.sort();
        let povm = random_order_povm(&picked, dim, &mut rng);

        // ordered -> sequential -> ordered preserves p(g | x) entrywise
        let seq = ordered_to_sequential(&povm, n_letters).unwrap();
        let back = sequential_to_ordered(&seq).unwrap();
        for x in 0..n_letters {
            for (label, e) in povm.outcomes() {
                let g = label.as_order().unwrap();
                let before = e.hs_inner(ens.state(x));
                let after = back
                    .outcomes()
                    .iter()
                    .find(|(l, _)| l.as_order() == Some(g))
                    .map(|(_, e2)| e2.hs_inner(ens.state(x)))
                    .unwrap_or(0.0);
                assert!(
                    (before - after).abs() < 1e-8,
                    "trial {trial}: p({:?} | x{x}) drifted {before} -> {after}",
                    g.entries()
                );
            }
        }

        // measured -> ordered preserves the expected cost to float accuracy
        let outcomes = 2 + rng.random_range(0..3);
        let mpovm = random_opaque_povm(outcomes, dim, &mut rng);
        let rows = (0..outcomes)
            .map(|_| {
                let weights: Vec<f64> =
                    (0..picked.len()).map(|_| rng.random::<f64>() + 1e-3).collect();
                let total: f64 = weights.iter().sum();
                picked
                    .iter()
                    .cloned()
                    .zip(weights.into_iter().map(|w| w / total))
                    .collect::<Vec<_>>()
            })
            .collect();
        let measured = MeasuredStrategy::new(mpovm, rows).unwrap();
        let (_, direct) =
            guess_distribution(&ens, &Strategy::Measured(measured.clone()), &cv).unwrap();
        let ordered = measured_to_ordered(&measured).unwrap();
        let via = expected_cost(&ens, &cv, &ordered).unwrap();
        let budget = 1e-12 * cv.k() as f64 * outcomes as f64;
        assert!(
            (direct - via).abs() <= budget.max(1e-13),
            "trial {trial}: cost {direct} vs {via}"
        );
    }
    pass(6, "theorem-1 compilations preserve p(g|x) entrywise (50 random instances)");
}

fn random_order_povm(
    orders: &[GuessOrder],
    dim: usize,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> Povm {
    let raw: Vec<HermitianMatrix> = (0..orders.len())
        .map(|_| {
            let s = guesswork_core::io::haar_random_state(dim, rng);
            s.scale(1.0)
        })
        .collect();
    let mut sum = HermitianMatrix::zeros(dim);
    for e in &raw {
        sum = sum.add(e);
    }
    let corr = guesswork_core::linalg::pinv_sqrt_psd(&sum, 1e-14).unwrap().to_cmatrix();
    Povm::new(
        orders
            .iter()
            .zip(raw)
            .map(|(g, e)| (OutcomeLabel::Order(g.clone()), e.conj_by(&corr)))
            .collect(),
    )
    .unwrap()
}

fn random_opaque_povm(outcomes: usize, dim: usize, rng: &mut rand_chacha::ChaCha8Rng) -> Povm {
    let raw: Vec<HermitianMatrix> = (0..outcomes)
        .map(|_| guesswork_core::io::haar_random_state(dim, rng))
        .collect();
    let mut sum = HermitianMatrix::zeros(dim);
    for e in &raw {
        sum = sum.add(e);
    }
    let corr = guesswork_core::linalg::pinv_sqrt_psd(&sum, 1e-14).unwrap().to_cmatrix();
    Povm::new(
        raw.into_iter()
            .enumerate()
            .map(|(i, e)| (OutcomeLabel::Opaque(format!("y{i}")), e.conj_by(&corr)))
            .collect(),
    )
    .unwrap()
}

#[test]
fn c07_strong_duality_and_certificates() {
    // every solved instance: primal-dual agreement within 2 tol and an
    // exhaustive certificate for all alphabets with |X|! <= 720
    let mut instances: Vec<(CqEnsemble, CostVector)> = vec![
        (bb84(), CostVector::standard(4)),
        (trine(), CostVector::standard(3)),
    ];
    for seed in [1u64, 2, 3] {
        instances.push((random_qubit_ensemble(seed), CostVector::standard(3)));
    }
    // a five-letter instance (120 orders) keeps the exhaustive scan honest
    instances.push((
        example_ensemble(&ExampleSpec::RandomQubits { n: 5, seed: 4 }).unwrap(),
        CostVector::standard(5),
    ));

    for (i, (ens, cv)) in instances.iter().enumerate() {
        let p = solve_primal(ens, cv).unwrap();
        let d = solve_dual(ens, cv).unwrap();
        assert!(
            (p.value - d.value).abs() <= 2.0 * TOL * (1.0 + p.value.abs()),
            "instance {i}: primal {} dual {}",
            p.value,
            d.value
        );
        let report = verify_optimality(ens, cv, &p, CertificateMode::Exhaustive).unwrap();
        assert!(
            report.worst_margin >= -1e-6,
            "instance {i}: certificate margin {}",
            report.worst_margin
        );
    }
    pass(7, "strong duality within 2 tol and exhaustive certificates on all instances");
}

#[test]
fn c08_entropic_sandwich() {
    // 100 random classical joints: the one-shot bracket holds
    let mut rng = seeded_rng(123);
    for trial in 0..100 {
        use rand::Rng;
        let nx = 2 + rng.random_range(0..4);
        let ny = 1 + rng.random_range(0..4);
        let mut p: Vec<f64> = (0..nx * ny).map(|_| rng.random::<f64>()).collect();
        let total: f64 = p.iter().sum();
        for v in &mut p {
            *v /= total;
        }
        let joint = JointDistribution::new(nx, ny, p).unwrap();
        let exact = classical_conditional_guesswork(&joint, &CostVector::standard(nx)).unwrap();
        let bracket = entropic::arikan_bounds(&joint).unwrap();
        assert!(
            bracket.lower <= exact + 1e-9 && exact <= bracket.upper + 1e-9,
            "trial {trial}: {exact} outside [{}, {}]",
            bracket.lower,
            bracket.upper
        );
    }

    // bb84: exp(sandwiched) <= exp(measured) for 20 random POVMs
    let ens = bb84();
    let sandwiched = entropic::sandwiched_h_half(&ens).unwrap().lower;
    let mut rng = seeded_rng(77);
    for trial in 0..20 {
        let povm = haar_basis_povm(2, &mut rng).unwrap();
        let measured = entropic::measured_conditional_entropy(&ens, &povm, 0.5).unwrap();
        assert!(
            sandwiched.exp() <= measured.exp() + 1e-6,
            "trial {trial}: exp {} vs {}",
            sandwiched.exp(),
            measured.exp()
        );
    }
    pass(8, "arikan brackets 100 classical joints; data processing holds on 20 POVMs");
}

#[test]
fn c09_property_suites() {
    let cv = CostVector::standard(3);
    let kappa_lipschitz = 3.0; // c_K for K = |X| = 3

    let mut worst_concavity = f64::INFINITY;
    let mut worst_lipschitz: f64 = 0.0;
    for trial in 0..100u64 {
        let a = random_qubit_ensemble(1000 + trial);
        let b = random_qubit_ensemble(2000 + trial);
        let t = [0.25, 0.5, 0.75][(trial % 3) as usize];

        // concavity of the value under c-q state mixing
        let ga = solve_primal(&a, &cv).unwrap().value;
        let gb = solve_primal(&b, &cv).unwrap().value;
        let mixed = a.mix(&b, t).unwrap();
        let gm = solve_primal(&mixed, &cv).unwrap().value;
        let slack = gm - (t * ga + (1.0 - t) * gb);
        worst_concavity = worst_concavity.min(slack);
        assert!(
            slack >= -5.0 * TOL,
            "trial {trial}: concavity violated by {slack:.3e}"
        );

        // Lipschitz continuity in the trace distance
        let dist = a.trace_distance(&b).unwrap();
        let diff = (ga - gb).abs();
        worst_lipschitz = worst_lipschitz.max(diff - kappa_lipschitz * dist);
        assert!(
            diff <= kappa_lipschitz * dist + 5.0 * TOL,
            "trial {trial}: |{ga} - {gb}| vs {kappa_lipschitz} * {dist}"
        );
    }

    // Pliam and Massey never exceed the exact values
    let mut rng = seeded_rng(31);
    for trial in 0..100 {
        use rand::Rng;
        let n = 3 + rng.random_range(0..4);
        let mut probs: Vec<f64> = (0..n).map(|_| rng.random::<f64>() + 1e-6).collect();
        let total: f64 = probs.iter().sum();
        for p in &mut probs {
            *p /= total;
        }
        let (exact, _) = classical_guesswork(&probs, &CostVector::standard(n)).unwrap();
        let massey = entropic::massey_bound(&probs).unwrap();
        if massey.applicable {
            assert!(massey.lower <= exact + 1e-9, "trial {trial}: massey");
        }

        let ny = 1 + rng.random_range(0..3);
        let mut joint: Vec<f64> = (0..n * ny).map(|_| rng.random::<f64>()).collect();
        let jt: f64 = joint.iter().sum();
        for v in &mut joint {
            *v /= jt;
        }
        let joint = JointDistribution::new(n, ny, joint).unwrap();
        let exact_cond =
            classical_conditional_guesswork(&joint, &CostVector::standard(n)).unwrap();
        let pliam = entropic::pliam_side_info_bound(&joint).unwrap();
        assert!(
            pliam.lower <= exact_cond + 1e-9,
            "trial {trial}: pliam {} vs {exact_cond}",
            pliam.lower
        );
    }

    // ideal 4-letter key certifies at 2.5 and the trace-distance line
    // dominates the continuity line for every positive delta
    let ideal = CqEnsemble::uniform(
        vec!["a".into(), "b".into(), "c".into(), "d".into()],
        vec![HermitianMatrix::identity(2).scale(0.5); 4],
    )
    .unwrap();
    let cert = entropic::certify_key(&ideal, 0.0).unwrap();
    assert!((cert.best_lower() - 2.5).abs() < 1e-9);
    for delta in [1e-3, 0.05, 0.2] {
        let cert = entropic::certify_key(&ideal, delta).unwrap();
        assert!(cert.pliam_lower > cert.lipschitz_lower);
    }

    pass(9, "concavity, Lipschitz, Pliam/Massey domination, and key certificate all hold");
}

#[test]
fn c10_tensor2_trine_active_set_budget() {
    // exact solves of tensor squares are out of reach by design: the
    // four-state square has 16! orders and the trine square 9!, both far
    // over the exhaustive cap; only the active set applies
    let bb84_sq = example_ensemble(&ExampleSpec::Tensor2(Box::new(ExampleSpec::Bb84))).unwrap();
    assert!(matches!(
        solve_primal_with(&bb84_sq, &CostVector::standard(16), &SolverOptions::default()),
        Err(guesswork_core::error::Error::SizeCapExceeded { .. })
    ));
    let ens = example_ensemble(&ExampleSpec::Tensor2(Box::new(ExampleSpec::Trine))).unwrap();
    let cv = CostVector::standard(9);
    assert!(matches!(
        solve_primal_with(
            &ens,
            &cv,
            &SolverOptions {
                size_cap: 50_000,
                ..SolverOptions::default()
            }
        ),
        Err(guesswork_core::error::Error::SizeCapExceeded { .. })
    ));

    let cfg = ActiveSetConfig {
        kappa: Some(8),
        t_max: 240.0,
        sa_restarts: 6,
        sa_schedule: light_schedule(),
        ..ActiveSetConfig::default()
    };
    let started = Instant::now();
    let res = active_set_upper_bound(&ens, &cv, &cfg).unwrap();
    let elapsed = started.elapsed().as_secs_f64();
    assert!(res.upper_bound.is_finite());
    // two copies are at least as hard to guess as one
    assert!(
        res.upper_bound >= TRINE_VALUE - 1e-7,
        "bound {} below the single-copy value",
        res.upper_bound
    );
    // anytime monotonicity of the bound trace
    for w in res.bound_trace.windows(2) {
        assert!(w[1] <= w[0] + 1e-9);
    }
    assert!(elapsed <= 240.0, "run took {elapsed:.1}s");
    pass(10, "tensor-2 trine active set: finite monotone bound within the 240 s budget");
}
