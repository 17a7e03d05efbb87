mod common;

use common::*;
use incentive_core::catalog::Landscape;
use incentive_core::dynamics::{Incentive, Mutation};
use incentive_core::entropy::{entropy_rate, plug_in_entropy_rate};
use incentive_core::sampler::{sample_trajectory, TrajectoryConfig};
use incentive_core::stationary::{
    check_detailed_balance, neutral_stationary, solve_stationary, DEFAULT_MAX_ITERS, DEFAULT_TOL,
};
use incentive_core::{IncentiveProcess, TransitionKernel};

fn process(n: usize, size: u32, incentive: Incentive, landscape: Landscape, mu: f64) -> IncentiveProcess {
    IncentiveProcess::new(n, size, incentive, landscape.matrix(), Mutation::Uniform(mu)).unwrap()
}

fn fermi(q: f64, beta: f64, game: Vec<Vec<f64>>) -> impl Fn(&[f64]) -> Vec<f64> {
    move |x: &[f64]| {
        game.iter()
            .zip(x)
            .map(|(row, &xi)| {
                let f: f64 = row.iter().zip(x).map(|(a, b)| a * b).sum();
                xi.powf(q) * (beta * f).exp()
            })
            .collect()
    }
}

fn rows(landscape: Landscape) -> Vec<Vec<f64>> {
    landscape.matrix().rows().map(|r| r.to_vec()).collect()
}

#[test]
fn kernel_matches_dense_construction() {
    let cases: Vec<(usize, u32, Incentive, Landscape, f64)> = vec![
        (2, 9, Incentive::Replicator { q: 1.0 }, Landscape::Moran { r: 2.0 }, 0.1),
        (2, 7, Incentive::Replicator { q: 2.0 }, Landscape::HawkDove, 0.05),
        (3, 8, Incentive::Fermi { q: 1.0, beta: 1.0 }, Landscape::Rsp { a: 1.0, b: 1.0 }, 0.2),
        (3, 6, Incentive::Fermi { q: 2.0, beta: 0.5 }, Landscape::Rsp { a: 2.0, b: -0.5 }, 0.03),
        (4, 5, Incentive::Neutral, Landscape::Neutral(4), 0.4),
    ];
    for (n, size, incentive, landscape, mu) in cases {
        let kernel = process(n, size, incentive, landscape, mu).build_kernel().unwrap();
        let lattice = kernel.lattice().unwrap().clone();
        let states = compositions(n, size);
        let game = rows(landscape);
        let dense = match incentive {
            Incentive::Replicator { q } => dense_kernel(
                &states,
                |x| {
                    game.iter()
                        .zip(x)
                        .map(|(row, &xi)| xi.powf(q) * row.iter().zip(x).map(|(a, b)| a * b).sum::<f64>())
                        .collect()
                },
                mu,
            ),
            Incentive::Fermi { q, beta } => dense_kernel(&states, fermi(q, beta, game.clone()), mu),
            _ => dense_kernel(&states, |x| x.to_vec(), mu),
        };
        for (i, a) in states.iter().enumerate() {
            let ri = lattice.rank(a).unwrap();
            for (j, b) in states.iter().enumerate() {
                let rj = lattice.rank(b).unwrap();
                assert!(
                    (kernel.get(ri, rj) - dense[i][j]).abs() < 1e-14,
                    "{a:?} -> {b:?}: {} vs {}",
                    kernel.get(ri, rj),
                    dense[i][j]
                );
            }
        }
    }
}

#[test]
fn iterative_solver_matches_dense_linear_solve() {
    let p = process(3, 10, Incentive::Fermi { q: 1.0, beta: 1.0 }, Landscape::Rsp { a: 2.0, b: 1.0 }, 0.1);
    let kernel = p.build_kernel().unwrap();
    let lattice = kernel.lattice().unwrap().clone();
    let states = compositions(3, 10);
    let dense = dense_kernel(&states, fermi(1.0, 1.0, rows(Landscape::Rsp { a: 2.0, b: 1.0 })), 0.1);
    let exact = dense_stationary(&dense);
    let s = solve_stationary(&kernel, DEFAULT_TOL, DEFAULT_MAX_ITERS).unwrap();
    for (i, a) in states.iter().enumerate() {
        let r = lattice.rank(a).unwrap();
        assert!((s.probabilities()[r] - exact[i]).abs() < 1e-9);
    }
    let report = entropy_rate(&kernel, &s).unwrap();
    let dense_rate: f64 = dense.iter().zip(&exact).map(|(row, si)| si * entropy(row)).sum();
    assert!((report.entropy_rate - dense_rate).abs() < 1e-9);

    let (balanced, violation) = check_detailed_balance(&kernel, s.probabilities(), 1e-10);
    assert!(!balanced, "RSP(2,1) should not be reversible, violation {violation}");
    assert!(violation > 1e-6);
}

#[test]
fn closed_form_matches_plain_products() {
    for (n, size, mu) in [(2, 6, 0.05), (3, 5, 0.2), (4, 4, 0.1), (3, 6, 0.4)] {
        let s = neutral_stationary(n, size, mu).unwrap();
        let lattice = incentive_core::Lattice::new(n, size).unwrap();
        let alpha = size as f64 * mu / (n as f64 - 1.0 - n as f64 * mu);
        for state in lattice.states() {
            let r = lattice.rank(state.counts()).unwrap();
            let expected = dirichlet_multinomial(state.counts(), alpha);
            assert!((s.probabilities()[r] - expected).abs() < 1e-13);
        }
    }
}

#[test]
fn rsp_stationary_is_cyclically_symmetric() {
    let kernel = process(3, 30, Incentive::Fermi { q: 1.0, beta: 1.0 }, Landscape::Rsp { a: 1.0, b: 1.0 }, 1.0 / 30.0)
        .build_kernel()
        .unwrap();
    let s = solve_stationary(&kernel, DEFAULT_TOL, DEFAULT_MAX_ITERS).unwrap();
    let lattice = kernel.lattice().unwrap();
    for state in lattice.states() {
        let c = state.counts();
        let rotated = [c[2], c[0], c[1]];
        let a = s.probabilities()[lattice.rank(c).unwrap()];
        let b = s.probabilities()[lattice.rank(&rotated).unwrap()];
        assert!((a - b).abs() < 1e-8);
    }
    let rate = entropy_rate(&kernel, &s).unwrap().entropy_rate;
    assert!((rate - 1.152).abs() < 0.005, "rate {rate}");
}

#[test]
fn long_trajectory_occupancy_matches_closed_form() {
    let kernel = process(2, 10, Incentive::Neutral, Landscape::Neutral(2), 0.1)
        .build_kernel()
        .unwrap();
    let path = sample_trajectory(&kernel, &TrajectoryConfig { start: 5, length: 1_000_000, seed: 7 }).unwrap();
    let mut occupancy = vec![0.0; kernel.len()];
    for &i in &path {
        occupancy[i] += 1.0 / path.len() as f64;
    }
    let exact = neutral_stationary(2, 10, 0.1).unwrap();
    assert!(sup_distance(&occupancy, exact.probabilities()) < 0.01);
}

#[test]
fn plug_in_estimate_of_two_state_chain() {
    let kernel = TransitionKernel::from_rows(vec![vec![(0, 0.9), (1, 0.1)], vec![(0, 0.1), (1, 0.9)]]).unwrap();
    let path = sample_trajectory(&kernel, &TrajectoryConfig { start: 0, length: 1_000_000, seed: 2024 }).unwrap();
    let estimate = plug_in_entropy_rate(&path).unwrap();
    let exact = entropy(&[0.9, 0.1]);
    assert!((exact - 0.3251).abs() < 1e-4);
    assert!((estimate - exact).abs() < 0.01, "estimate {estimate}");
}
