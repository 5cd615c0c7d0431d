//! Cross-validation of the two state backends: trajectory-averaged
//! expectations against exact density-matrix evolution, plus structural
//! invariants under long random circuits.

use nvnode_core::channel::KrausChannel;
use nvnode_core::linalg::{hadamard, rot_x, rot_y, CMatrix, C_ONE, C_ZERO};
use nvnode_core::pauli::{PauliOp, PauliString};
use nvnode_core::rng::ShotSeeder;
use nvnode_core::state::{QuantumState, StateBackend};
use rand::Rng;
use rayon::prelude::*;

#[derive(Clone)]
enum Step {
    Unitary(CMatrix, Vec<usize>),
    Channel(KrausChannel, Vec<usize>),
}

fn cnot_matrix() -> CMatrix {
    // Control on matrix bit 0, target on bit 1.
    let mut m = CMatrix::zeros(4);
    m.set(0, 0, C_ONE);
    m.set(2, 2, C_ONE);
    m.set(1, 3, C_ONE);
    m.set(3, 1, C_ONE);
    m
}

fn random_circuit(n: usize, len: usize, rng: &mut impl Rng) -> Vec<Step> {
    let mut steps = Vec::with_capacity(len);
    for _ in 0..len {
        let q = rng.gen_range(0..n);
        match rng.gen_range(0..6u8) {
            0 => steps.push(Step::Unitary(rot_x(rng.gen_range(0.0..6.2)), vec![q])),
            1 => steps.push(Step::Unitary(rot_y(rng.gen_range(0.0..6.2)), vec![q])),
            2 => steps.push(Step::Unitary(hadamard(), vec![q])),
            3 => {
                let mut t = rng.gen_range(0..n);
                while t == q {
                    t = rng.gen_range(0..n);
                }
                steps.push(Step::Unitary(cnot_matrix(), vec![q, t]));
            }
            4 => {
                let p = rng.gen_range(0.0..0.2);
                let ch = match rng.gen_range(0..3u8) {
                    0 => KrausChannel::depolarizing_1q(p).unwrap(),
                    1 => KrausChannel::bit_flip(p).unwrap(),
                    _ => KrausChannel::phase_flip(p).unwrap(),
                };
                steps.push(Step::Channel(ch, vec![q]));
            }
            _ => {
                let mut t = rng.gen_range(0..n);
                while t == q {
                    t = rng.gen_range(0..n);
                }
                let ch = KrausChannel::depolarizing_2q(rng.gen_range(0.0..0.15)).unwrap();
                steps.push(Step::Channel(ch, vec![q, t]));
            }
        }
    }
    steps
}

fn run_steps(state: &mut QuantumState, steps: &[Step], rng: &mut impl Rng) {
    for step in steps {
        match step {
            Step::Unitary(u, targets) => state.apply_unitary(u, targets).unwrap(),
            Step::Channel(ch, targets) => state.apply_channel(ch, targets, rng).unwrap(),
        }
    }
}

fn z_strings(n: usize) -> Vec<PauliString> {
    (1..1usize << n)
        .map(|mask| {
            let ops = (0..n)
                .map(|q| if (mask >> q) & 1 == 1 { PauliOp::Z } else { PauliOp::I })
                .collect();
            PauliString::new(ops)
        })
        .collect()
}

#[test]
fn trajectory_mean_matches_density_matrix() {
    let seeder = ShotSeeder::new(0xbac_e);
    let circuits = 8usize;
    let shots = 6_000u64;
    for c in 0..circuits {
        let mut build_rng = seeder.subseeder(c as u64).root_rng();
        let n = build_rng.gen_range(2..=5);
        let len = build_rng.gen_range(10..=30);
        let steps = random_circuit(n, len, &mut build_rng);

        let mut exact = QuantumState::zero(n, StateBackend::DensityMatrix);
        let mut dummy = seeder.root_rng();
        run_steps(&mut exact, &steps, &mut dummy);

        let strings = z_strings(n);
        let shot_seeder = seeder.subseeder(1000 + c as u64);
        let sums: Vec<(Vec<f64>, Vec<f64>)> = (0..shots)
            .into_par_iter()
            .map(|shot| {
                let mut rng = shot_seeder.shot_rng(shot);
                let mut state = QuantumState::zero(n, StateBackend::PureVector);
                run_steps(&mut state, &steps, &mut rng);
                let values: Vec<f64> =
                    strings.iter().map(|p| state.expectation(p).unwrap()).collect();
                let squares: Vec<f64> = values.iter().map(|v| v * v).collect();
                (values, squares)
            })
            .reduce(
                || (vec![0.0; strings.len()], vec![0.0; strings.len()]),
                |mut a, b| {
                    for i in 0..a.0.len() {
                        a.0[i] += b.0[i];
                        a.1[i] += b.1[i];
                    }
                    a
                },
            );
        for (i, p) in strings.iter().enumerate() {
            let mean = sums.0[i] / shots as f64;
            let var = (sums.1[i] / shots as f64 - mean * mean).max(0.0);
            let se = (var / shots as f64).sqrt().max(1e-9);
            let reference = exact.expectation(p).unwrap();
            assert!(
                (mean - reference).abs() <= 4.0 * se + 1e-9,
                "circuit {c}, {p}: trajectory {mean} vs exact {reference} (se {se})"
            );
        }
    }
}

#[test]
fn random_gate_fuzz_preserves_norm_and_trace() {
    let seeder = ShotSeeder::new(0xf00d);
    let mut rng = seeder.root_rng();
    let n = 4;
    let steps = random_circuit(n, 1000, &mut rng);

    let mut pure = QuantumState::zero(n, StateBackend::PureVector);
    let mut density = QuantumState::zero(n, StateBackend::DensityMatrix);
    let mut pure_rng = seeder.subseeder(1).root_rng();
    let mut density_rng = seeder.subseeder(2).root_rng();
    for (i, step) in steps.iter().enumerate() {
        match step {
            Step::Unitary(u, t) => {
                pure.apply_unitary(u, t).unwrap();
                density.apply_unitary(u, t).unwrap();
            }
            Step::Channel(ch, t) => {
                pure.apply_channel(ch, t, &mut pure_rng).unwrap();
                density.apply_channel(ch, t, &mut density_rng).unwrap();
            }
        }
        assert!((pure.norm() - 1.0).abs() < 1e-10, "norm drift at step {i}");
        assert!((density.norm() - 1.0).abs() < 1e-10, "trace drift at step {i}");
        if i % 200 == 199 {
            density.validate().unwrap();
        }
    }
    density.validate().unwrap();
}

#[test]
fn expectations_stay_bounded() {
    let seeder = ShotSeeder::new(0x5eed);
    for case in 0..30u64 {
        let mut rng = seeder.subseeder(case).root_rng();
        let n = rng.gen_range(1..=5);
        let steps = random_circuit(n, 15, &mut rng);
        let mut state = QuantumState::zero(n, StateBackend::PureVector);
        run_steps(&mut state, &steps, &mut rng);
        for p in z_strings(n) {
            let e = state.expectation(&p).unwrap();
            assert!(e * e <= 1.0 + 1e-10, "{p}: {e}");
        }
    }
}

#[test]
fn measurement_collapse_is_consistent() {
    // measure then re-measure: same outcome; expectation equals the outcome.
    let seeder = ShotSeeder::new(0xc0ffee);
    for case in 0..20u64 {
        let mut rng = seeder.subseeder(case).root_rng();
        let n = 3;
        let steps = random_circuit(n, 12, &mut rng);
        for backend in [StateBackend::PureVector, StateBackend::DensityMatrix] {
            let mut state = QuantumState::zero(n, backend);
            run_steps(&mut state, &steps, &mut rng);
            let p: PauliString = "ZZI".parse().unwrap();
            let outcome = state.measure_pauli(&p, &mut rng).unwrap();
            let e = state.expectation(&p).unwrap();
            assert!((e - outcome as f64).abs() < 1e-10);
            assert_eq!(state.measure_pauli(&p, &mut rng).unwrap(), outcome);
        }
    }
    let _ = C_ZERO;
}
