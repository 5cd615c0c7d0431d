//! Scratch probe for calibration + QEC decay behaviour (dev tool).

use nvnode_core::analysis::{binomial_sigma, fit_exponential, FitOptions, FitPoint};
use nvnode_core::calibrate::{calibrate, CalibrationTargets};
use nvnode_core::ghz::exact_witness;
use nvnode_core::noise::NoiseModel;
use nvnode_core::qec::{self, LogicalPrep, QecRunConfig};
use nvnode_core::rng::ShotSeeder;
use nvnode_core::state::StateBackend;

fn main() {
    let t0 = std::time::Instant::now();
    let targets = CalibrationTargets::default();
    let mut base = NoiseModel::default();
    if let Ok(pf) = std::env::var("PROBE_P_FLIP") {
        base.p_flip_round = pf.parse().unwrap();
    }
    let outcome = calibrate(&targets, &base).unwrap();
    println!("calibration in {:?}", t0.elapsed());
    println!("p_gate_e      = {}", outcome.noise.p_gate_e);
    println!("p_gate_ec     = {}", outcome.noise.p_gate_ec);
    println!("p_parity_map  = {}", outcome.noise.p_parity_map);
    println!("mzi_visibility= {}", outcome.noise.mzi_visibility);
    println!("observables   = {:?}", outcome.observables);
    println!("residuals     = {:?}", outcome.residuals);
    println!("within tol    = {}", outcome.within_tolerance);
    let w = exact_witness(&outcome.noise).unwrap();
    println!("F_lb exact    = {}", w.f_lb);

    // QEC decay curves at the calibrated noise.
    let mut noise = outcome.noise.clone();
    noise.herald_prob = 1.0; // probe with full statistics
    let shots = 3000u64;
    for feedback in [false, true] {
        let mut points = Vec::new();
        for m in 0..=12u16 {
            let config = QecRunConfig {
                prep: LogicalPrep::ZeroL,
                rounds: m,
                feedback,
                shots,
                backend: StateBackend::PureVector,
                injection: None,
            };
            let seeder = ShotSeeder::new(1000 + m as u64 + feedback as u64 * 100);
            let records = qec::run_qec(&config, &noise, seeder).unwrap();
            let raw = qec::outcome_populations(&records).unwrap();
            let mitigated = qec::mitigate_outcome_populations(&raw, &noise.confusion()).unwrap();
            let fid = mitigated.probs()[0];
            let hits = (fid * shots as f64).round() as u64;
            points.push(FitPoint {
                t_ms: m as f64 * noise.round_duration_ms,
                p: fid,
                sigma: binomial_sigma(hits, shots).max(1e-4),
            });
        }
        let fit = fit_exponential(
            &points,
            &FitOptions { bootstrap_resamples: 300, seed: 7, ..Default::default() },
        )
        .unwrap();
        println!(
            "feedback={feedback}: T1L = {:.2} ms  CI ({:.2}, {:.2})  p_i={:.3} p_f={:.3}",
            fit.t1l_ms, fit.ci_t1l.0, fit.ci_t1l.1, fit.p_i, fit.p_f
        );
        for pt in &points {
            print!(" {:.3}", pt.p);
        }
        println!();
    }

    // Criterion-6-like statistics: herald-limited shots.
    if std::env::var("PROBE_HERALD").is_ok() {
        let mut hnoise = outcome.noise.clone();
        hnoise.herald_prob = 0.01;
        for feedback in [false, true] {
            let mut points = Vec::new();
            for m in 0..=12u16 {
                let config = QecRunConfig {
                    prep: LogicalPrep::ZeroL,
                    rounds: m,
                    feedback,
                    shots: 100_000,
                    backend: StateBackend::PureVector,
                    injection: None,
                };
                let seeder = ShotSeeder::new(5000 + m as u64 * 2 + feedback as u64);
                let records = qec::run_qec(&config, &hnoise, seeder).unwrap();
                let raw = qec::outcome_populations(&records).unwrap();
                let n = raw.samples();
                let mit = qec::mitigate_outcome_populations(&raw, &hnoise.confusion()).unwrap();
                let fid = mit.probs()[0];
                points.push(FitPoint {
                    t_ms: m as f64 * hnoise.round_duration_ms,
                    p: fid,
                    sigma: binomial_sigma((fid * n as f64).round() as u64, n).max(1e-4),
                });
            }
            let fit = fit_exponential(
                &points,
                &FitOptions { bootstrap_resamples: 500, seed: 7, ..Default::default() },
            )
            .unwrap();
            println!(
                "herald-limited feedback={feedback}: T1L = {:.2} CI ({:.2}, {:.2})",
                fit.t1l_ms, fit.ci_t1l.0, fit.ci_t1l.1
            );
        }
    }

    // Criterion-7-like post-selection trends with the plus preparation.
    if std::env::var("PROBE_PS").is_ok() {
        let mut hnoise = outcome.noise.clone();
        hnoise.herald_prob = 0.01;
        for feedback in [true, false] {
            let mut improvements = Vec::new();
            for m in 1..=12u16 {
                let config = QecRunConfig {
                    prep: LogicalPrep::plus(),
                    rounds: m,
                    feedback,
                    shots: 400_000,
                    backend: StateBackend::PureVector,
                    injection: None,
                };
                let seeder = ShotSeeder::new(9000 + m as u64 * 2 + feedback as u64);
                let records = qec::run_qec(&config, &hnoise, seeder).unwrap();
                let ps = qec::post_select_no_error(&records).unwrap();
                let diff = ps.selected_mean - ps.all_mean;
                // diff = (1-f)(m_S - m_R): variance from the disjoint parts.
                let n_r = ps.all_n - ps.selected_n;
                let m_r = if n_r > 0 {
                    (ps.all_mean * ps.all_n as f64 - ps.selected_mean * ps.selected_n as f64)
                        / n_r as f64
                } else {
                    0.0
                };
                let v_s = (1.0 - ps.selected_mean.powi(2)).max(0.0) / ps.selected_n as f64;
                let v_r = if n_r > 0 { (1.0 - m_r.powi(2)).max(0.0) / n_r as f64 } else { 0.0 };
                let sigma = ((1.0 - ps.acceptance).powi(2) * (v_s + v_r)).sqrt().max(1e-12);
                improvements.push((m, diff, diff / sigma, ps.acceptance));
            }
            println!("feedback={feedback} post-selection:");
            for (m, diff, z, acc) in improvements {
                println!("  M={m:2}  diff={diff:+.4}  z={z:5.1}  acc={acc:.3}");
            }
        }
    }
    println!("total {:?}", t0.elapsed());
}
