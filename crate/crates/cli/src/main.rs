//! Command-line driver for the NV-node simulator.
//!
//! Subcommands: `ghz` (witness experiment), `qec` (repeated error
//! correction), `calibrate` (noise-model search) and `fit` (exponential
//! lifetime fit of tabulated decay data). All randomness flows from the
//! mandatory `--seed`; identical invocations produce byte-identical output
//! files. Exit codes: 0 success, 1 simulation/fit failure, 2 configuration
//! or parse error.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use nvnode_core::analysis::{binomial_sigma, fit_exponential, FitOptions, FitResult};
use nvnode_core::calibrate::{calibrate, CalibrationTargets};
use nvnode_core::ghz::{
    bootstrap_witness, estimate_witness, measure_joint, CoincidenceTable, JointBasis,
    WitnessResult,
};
use nvnode_core::noise::NoiseModel;
use nvnode_core::qec::{
    self, outcome_populations, post_select_no_error, LogicalPrep, QecRunConfig, ShotRecord,
};
use nvnode_core::records::{encode_binary, write_jsonl_file, ShotFileHeader};
use nvnode_core::rng::ShotSeeder;
use nvnode_core::state::StateBackend;
use nvnode_core::tables::{fmt_float, write_table};
use nvnode_core::Error as CoreError;

#[derive(Parser)]
#[command(name = "nvnode", version, about = "Diamond NV network-node simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    /// Pure-state quantum trajectories (one Kraus branch per channel).
    Trajectory,
    /// Exact density-matrix channel evolution.
    Exact,
}

impl BackendArg {
    fn to_backend(self) -> StateBackend {
        match self {
            BackendArg::Trajectory => StateBackend::PureVector,
            BackendArg::Exact => StateBackend::DensityMatrix,
        }
    }

    fn label(self) -> &'static str {
        match self {
            BackendArg::Trajectory => "trajectory",
            BackendArg::Exact => "exact",
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FeedbackArg {
    On,
    Off,
    /// Run both feedback modes over rounds 0..=M.
    Sweep,
}

#[derive(Clone, Copy, ValueEnum)]
enum PrepArg {
    Zero,
    One,
    Plus,
}

impl PrepArg {
    fn to_prep(self) -> LogicalPrep {
        match self {
            PrepArg::Zero => LogicalPrep::ZeroL,
            PrepArg::One => LogicalPrep::OneL,
            PrepArg::Plus => LogicalPrep::plus(),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum RecordsArg {
    /// JSONL for single runs, off for sweeps.
    Auto,
    Jsonl,
    Binary,
    Both,
    Off,
}

#[derive(Args)]
struct CommonArgs {
    /// Root random seed; all shot streams derive from it.
    #[arg(long)]
    seed: u64,
    /// Simulation backend.
    #[arg(long, value_enum, default_value = "trajectory")]
    backend: BackendArg,
    /// Noise calibration file (TOML); defaults to the built-in
    /// pre-calibration model.
    #[arg(long)]
    noise: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// GHZ generation and stabilizer-witness estimation.
    Ghz {
        #[command(flatten)]
        common: CommonArgs,
        /// Shots per measurement basis (split over the two run variants).
        #[arg(long, default_value_t = 20_000)]
        shots: u64,
        /// Also derive bootstrap confidence intervals for the witness terms.
        #[arg(long)]
        bootstrap: bool,
        /// Bootstrap resamples.
        #[arg(long, default_value_t = 1000)]
        resamples: usize,
    },
    /// Repeated error correction with optional real-time feedback.
    Qec {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, default_value_t = 20_000)]
        shots: u64,
        /// Error-correction rounds M (sweep mode runs 0..=M).
        #[arg(long, default_value_t = 12)]
        rounds: u16,
        #[arg(long, value_enum, default_value = "on")]
        feedback: FeedbackArg,
        #[arg(long, value_enum, default_value = "zero")]
        prep: PrepArg,
        /// Shot record output format.
        #[arg(long, value_enum, default_value = "auto")]
        records: RecordsArg,
    },
    /// Search microscopic error rates against the target observables and
    /// write a calibrated noise file.
    Calibrate {
        #[command(flatten)]
        common: CommonArgs,
        /// Per-round memory bit-flip probability carried into the output.
        #[arg(long)]
        p_flip_round: Option<f64>,
        /// Per-round memory phase-flip probability carried into the output.
        #[arg(long)]
        p_phase_round: Option<f64>,
        /// Target observables: e1,e2,e3,f_ziz,f_izz.
        #[arg(long, value_delimiter = ',', num_args = 5)]
        targets: Option<Vec<f64>>,
        /// Output noise file path (defaults to <out>/calibrated_noise.toml).
        #[arg(long)]
        out_noise: Option<PathBuf>,
    },
    /// Fit p = p_i exp(-t/T1L) + p_f to tabulated decay data.
    Fit {
        #[command(flatten)]
        common: CommonArgs,
        /// Input table with columns t_ms, p, sigma.
        #[arg(long)]
        input: PathBuf,
        /// Bootstrap resamples for the confidence intervals.
        #[arg(long, default_value_t = 1000)]
        resamples: usize,
    },
}

/// Error with an assigned process exit code.
struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn config(message: impl Into<String>) -> Self {
        CliError { code: 2, message: message.into() }
    }

    fn runtime(message: impl Into<String>) -> Self {
        CliError { code: 1, message: message.into() }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        let code = match &e {
            CoreError::Parse(_)
            | CoreError::InvalidParameter(_)
            | CoreError::InvalidNoiseModel(_)
            | CoreError::Io(_) => 2,
            _ => 1,
        };
        CliError { code, message: e.to_string() }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Ghz { common, shots, bootstrap, resamples } => {
            run_ghz(&common, shots, bootstrap, resamples)
        }
        Command::Qec { common, shots, rounds, feedback, prep, records } => {
            run_qec_cmd(&common, shots, rounds, feedback, prep, records)
        }
        Command::Calibrate { common, p_flip_round, p_phase_round, targets, out_noise } => {
            run_calibrate(&common, p_flip_round, p_phase_round, targets, out_noise)
        }
        Command::Fit { common, input, resamples } => run_fit(&common, &input, resamples),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn load_noise(common: &CommonArgs) -> Result<NoiseModel, CliError> {
    match &common.noise {
        Some(path) => NoiseModel::load(path)
            .map_err(|e| CliError::config(format!("noise file {}: {e}", path.display()))),
        None => Ok(NoiseModel::default()),
    }
}

fn prepare_out_dir(common: &CommonArgs) -> Result<(), CliError> {
    std::fs::create_dir_all(&common.out)
        .map_err(|e| CliError::config(format!("output directory: {e}")))
}

fn check_shots(shots: u64) -> Result<(), CliError> {
    if !(1..=100_000_000).contains(&shots) {
        return Err(CliError::config(format!("shots {shots} outside [1, 10^8]")));
    }
    Ok(())
}

/// Header metadata shared by every output file: the resolved configuration
/// and the full noise model.
fn base_meta(command: &str, common: &CommonArgs, noise: &NoiseModel) -> Vec<(String, String)> {
    let mut meta = vec![
        ("command".to_string(), command.to_string()),
        ("seed".to_string(), common.seed.to_string()),
        ("backend".to_string(), common.backend.label().to_string()),
        (
            "noise_file".to_string(),
            common
                .noise
                .as_ref()
                .map(|p| p.display().to_string())
                .unwrap_or_else(|| "builtin-default".to_string()),
        ),
    ];
    for line in noise.to_toml_string().lines() {
        if let Some((key, value)) = line.split_once(" = ") {
            meta.push((format!("noise.{key}"), value.to_string()));
        }
    }
    meta
}

// --- ghz ---

fn run_ghz(
    common: &CommonArgs,
    shots: u64,
    bootstrap: bool,
    resamples: usize,
) -> Result<(), CliError> {
    check_shots(shots)?;
    let noise = load_noise(common)?;
    prepare_out_dir(common)?;
    let seeder = ShotSeeder::new(common.seed);
    let backend = common.backend.to_backend();

    let mut tables = Vec::new();
    for basis in JointBasis::ALL {
        let table = measure_joint(
            basis,
            shots,
            &noise,
            seeder.subseeder(basis.index() as u64),
            backend,
        )?;
        if let Some(warning) = &table.warning {
            eprintln!("warning: {warning}");
        }
        tables.push(table);
    }
    let witness = estimate_witness(&tables)?;

    let mut meta = base_meta("ghz", common, &noise);
    meta.push(("shots_per_basis".to_string(), shots.to_string()));

    write_counts_table(&common.out.join("witness_counts.tsv"), &meta, &tables)?;
    write_witness_summary(&common.out.join("witness_summary.tsv"), &meta, &witness)?;

    if bootstrap {
        let cis = bootstrap_witness(&tables, resamples, seeder.subseeder(100))?;
        let rows: Vec<Vec<String>> = ["e1", "e2", "e3", "f_lb"]
            .iter()
            .zip(cis.iter())
            .map(|(name, (lo, hi))| {
                vec![name.to_string(), fmt_float(*lo), fmt_float(*hi)]
            })
            .collect();
        write_table(
            &common.out.join("witness_bootstrap.tsv"),
            "witness-bootstrap",
            &meta,
            &["quantity", "ci68_lo", "ci68_hi"],
            &rows,
        )?;
    }

    println!(
        "F_lb = {:.4} +- {:.4}  (e1 = {:.4}, e2 = {:.4}, e3 = {:.4})",
        witness.f_lb, witness.sigma_f_lb, witness.e1, witness.e2, witness.e3
    );
    Ok(())
}

fn write_counts_table(
    path: &Path,
    meta: &[(String, String)],
    tables: &[CoincidenceTable],
) -> Result<(), CliError> {
    let mut rows = Vec::new();
    for table in tables {
        for variant in 0..2usize {
            let normalized = table.normalized(variant);
            for bit in 0..2usize {
                for photon in 0..2usize {
                    rows.push(vec![
                        table.basis.label().to_string(),
                        ["unflipped", "flipped"][variant].to_string(),
                        bit.to_string(),
                        photon.to_string(),
                        table.counts[variant][bit][photon].to_string(),
                        table.heralded[variant].to_string(),
                        fmt_float(normalized[bit][photon]),
                    ]);
                }
            }
        }
    }
    write_table(
        path,
        "witness-counts",
        meta,
        &["basis", "variant", "electron_bit", "photon_outcome", "count", "heralded_in_variant", "normalized"],
        &rows,
    )?;
    Ok(())
}

fn write_witness_summary(
    path: &Path,
    meta: &[(String, String)],
    witness: &WitnessResult,
) -> Result<(), CliError> {
    let rows = vec![
        vec!["e1".into(), fmt_float(witness.e1), fmt_float(witness.sigma[0]), witness.coincidences[0].to_string()],
        vec!["e2".into(), fmt_float(witness.e2), fmt_float(witness.sigma[1]), witness.coincidences[1].to_string()],
        vec!["e3".into(), fmt_float(witness.e3), fmt_float(witness.sigma[2]), witness.coincidences[2].to_string()],
        vec![
            "f_lb".into(),
            fmt_float(witness.f_lb),
            fmt_float(witness.sigma_f_lb),
            witness.coincidences.iter().sum::<u64>().to_string(),
        ],
    ];
    write_table(path, "witness-summary", meta, &["quantity", "value", "sigma", "coincidences"], &rows)?;
    Ok(())
}

// --- qec ---

struct SweepRow {
    rounds: u16,
    feedback: bool,
    shots: u64,
    heralded: u64,
    fid_raw: f64,
    fid_mitigated: f64,
    sigma_fid: f64,
    zlzp_all: f64,
    zlzp_all_sigma: f64,
    zlzp_ps: f64,
    zlzp_ps_sigma: f64,
    ps_acceptance: f64,
}

fn run_qec_cmd(
    common: &CommonArgs,
    shots: u64,
    rounds: u16,
    feedback: FeedbackArg,
    prep: PrepArg,
    records_mode: RecordsArg,
) -> Result<(), CliError> {
    check_shots(shots)?;
    if rounds > 64 {
        return Err(CliError::config(format!("rounds {rounds} outside [0, 64]")));
    }
    let noise = load_noise(common)?;
    prepare_out_dir(common)?;
    let seeder = ShotSeeder::new(common.seed);
    let backend = common.backend.to_backend();
    let logical_prep = prep.to_prep();

    let mut meta = base_meta("qec", common, &noise);
    meta.push(("shots".to_string(), shots.to_string()));
    meta.push(("rounds".to_string(), rounds.to_string()));
    meta.push((
        "feedback".to_string(),
        match feedback {
            FeedbackArg::On => "on",
            FeedbackArg::Off => "off",
            FeedbackArg::Sweep => "sweep",
        }
        .to_string(),
    ));
    meta.push(("prep".to_string(), logical_prep.label().to_string()));

    let sweep = matches!(feedback, FeedbackArg::Sweep);
    let modes: Vec<bool> = match feedback {
        FeedbackArg::On => vec![true],
        FeedbackArg::Off => vec![false],
        FeedbackArg::Sweep => vec![false, true],
    };
    let m_values: Vec<u16> = if sweep { (0..=rounds).collect() } else { vec![rounds] };

    let mut rows = Vec::new();
    let mut parity_rows = Vec::new();
    let mut fit_rows = Vec::new();
    for &fb in &modes {
        let mut fit_points = Vec::new();
        for &m in &m_values {
            let config = QecRunConfig {
                prep: logical_prep,
                rounds: m,
                feedback: fb,
                shots,
                backend,
                injection: None,
            };
            let run_seeder = seeder.subseeder(1000 + 2 * m as u64 + fb as u64);
            let records = qec::run_qec(&config, &noise, run_seeder)?;
            let row = summarize_run(&records, &noise, &logical_prep, m, fb, shots)?;
            fit_points.push(nvnode_core::analysis::FitPoint {
                t_ms: m as f64 * noise.round_duration_ms,
                p: row.fid_mitigated,
                sigma: row.sigma_fid,
            });
            rows.push(row);
            if m == *m_values.last().unwrap() {
                collect_parity_decay(&records, fb, &mut parity_rows);
            }
            let wants_records = match records_mode {
                RecordsArg::Auto => !sweep,
                RecordsArg::Off => false,
                _ => true,
            };
            if wants_records {
                let suffix = if sweep { format!("_m{m}_fb{}", fb as u8) } else { String::new() };
                write_record_files(common, &meta, &records, records_mode, &suffix)?;
            }
        }
        if sweep && fit_points.len() >= 4 {
            let options = FitOptions {
                bootstrap_resamples: 1000,
                seed: seeder.subseeder(7000 + fb as u64).seed(),
                ..Default::default()
            };
            let fit = fit_exponential(&fit_points, &options)?;
            fit_rows.push(fit_row(fb, &fit));
        }
    }

    let summary_rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.rounds.to_string(),
                fmt_float(r.rounds as f64 * noise.round_duration_ms),
                (r.feedback as u8).to_string(),
                r.shots.to_string(),
                r.heralded.to_string(),
                fmt_float(r.fid_raw),
                fmt_float(r.fid_mitigated),
                fmt_float(r.sigma_fid),
                fmt_float(r.zlzp_all),
                fmt_float(r.zlzp_all_sigma),
                fmt_float(r.zlzp_ps),
                fmt_float(r.zlzp_ps_sigma),
                fmt_float(r.ps_acceptance),
            ]
        })
        .collect();
    write_table(
        &common.out.join("qec_summary.tsv"),
        "qec-summary",
        &meta,
        &[
            "m", "t_ms", "feedback", "shots", "heralded", "fid_raw", "fid_mitigated", "sigma_fid",
            "zlzp_all", "zlzp_all_sigma", "zlzp_postselected", "zlzp_postselected_sigma",
            "ps_acceptance",
        ],
        &summary_rows,
    )?;
    write_table(
        &common.out.join("parity_rounds.tsv"),
        "qec-parity-decay",
        &meta,
        &["feedback", "round", "mean_ziz", "mean_izz", "n"],
        &parity_rows,
    )?;
    if !fit_rows.is_empty() {
        write_table(
            &common.out.join("qec_fit.tsv"),
            "qec-fit",
            &meta,
            &[
                "feedback", "p_i", "t1l_ms", "p_f", "ci_p_i_lo", "ci_p_i_hi", "ci_t1l_lo",
                "ci_t1l_hi", "ci_p_f_lo", "ci_p_f_hi", "rss", "t1l_unbounded",
            ],
            &fit_rows,
        )?;
    }
    for row in &rows {
        println!(
            "M={:2} feedback={} heralded={} fid={:.4} <Z_L Z_p>={:.4} (post-selected {:.4})",
            row.rounds, row.feedback as u8, row.heralded, row.fid_mitigated, row.zlzp_all, row.zlzp_ps
        );
    }
    Ok(())
}

/// Mitigated fidelity of interest per preparation: the target-outcome
/// population for product states, the protected two-outcome population for
/// the entangled preparation.
fn fidelity_from_populations(prep: &LogicalPrep, probs: &[f64]) -> f64 {
    match prep.target_outcome() {
        Some(t) => probs[t as usize],
        None => probs[0] + probs[0b1111],
    }
}

fn summarize_run(
    records: &[ShotRecord],
    noise: &NoiseModel,
    prep: &LogicalPrep,
    rounds: u16,
    feedback: bool,
    shots: u64,
) -> Result<SweepRow, CliError> {
    let raw = outcome_populations(records)?;
    let heralded = raw.samples();
    let mitigated = qec::mitigate_outcome_populations(&raw, &noise.confusion())?;
    let fid_raw = fidelity_from_populations(prep, raw.probs());
    let fid_mitigated = fidelity_from_populations(prep, mitigated.probs());
    // Binomial scale at the mitigated point value; adequate for fit weights.
    let hits = (fid_mitigated.clamp(0.0, 1.0) * heralded as f64).round() as u64;
    let sigma_fid = binomial_sigma(hits.min(heralded), heralded).max(1e-4);
    let ps = post_select_no_error(records)?;
    Ok(SweepRow {
        rounds,
        feedback,
        shots,
        heralded,
        fid_raw,
        fid_mitigated,
        sigma_fid,
        zlzp_all: ps.all_mean,
        zlzp_all_sigma: ps.all_sigma,
        zlzp_ps: ps.selected_mean,
        zlzp_ps_sigma: ps.selected_sigma,
        ps_acceptance: ps.acceptance,
    })
}

fn collect_parity_decay(records: &[ShotRecord], feedback: bool, rows: &mut Vec<Vec<String>>) {
    let mut sums: BTreeMap<u16, (i64, i64, u64)> = BTreeMap::new();
    for record in records.iter().filter(|r| r.heralded) {
        for s in &record.syndromes {
            let entry = sums.entry(s.round).or_insert((0, 0, 0));
            entry.0 += s.ziz as i64;
            entry.1 += s.izz as i64;
            entry.2 += 1;
        }
    }
    for (round, (ziz, izz, n)) in sums {
        rows.push(vec![
            (feedback as u8).to_string(),
            round.to_string(),
            fmt_float(ziz as f64 / n as f64),
            fmt_float(izz as f64 / n as f64),
            n.to_string(),
        ]);
    }
}

fn write_record_files(
    common: &CommonArgs,
    meta: &[(String, String)],
    records: &[ShotRecord],
    mode: RecordsArg,
    suffix: &str,
) -> Result<(), CliError> {
    let mut header_meta = BTreeMap::new();
    for (k, v) in meta {
        header_meta.insert(k.clone(), v.clone());
    }
    let header = ShotFileHeader::new(header_meta);
    let write_text = matches!(mode, RecordsArg::Auto | RecordsArg::Jsonl | RecordsArg::Both);
    let write_bin = matches!(mode, RecordsArg::Binary | RecordsArg::Both);
    if write_text {
        write_jsonl_file(&common.out.join(format!("records{suffix}.jsonl")), &header, records)?;
    }
    if write_bin {
        let bytes = encode_binary(records)?;
        std::fs::write(common.out.join(format!("records{suffix}.bin")), bytes)
            .map_err(|e| CliError::runtime(format!("records{suffix}.bin: {e}")))?;
    }
    Ok(())
}

fn fit_row(feedback: bool, fit: &FitResult) -> Vec<String> {
    vec![
        (feedback as u8).to_string(),
        fmt_float(fit.p_i),
        fmt_float(fit.t1l_ms),
        fmt_float(fit.p_f),
        fmt_float(fit.ci_p_i.0),
        fmt_float(fit.ci_p_i.1),
        fmt_float(fit.ci_t1l.0),
        fmt_float(fit.ci_t1l.1),
        fmt_float(fit.ci_p_f.0),
        fmt_float(fit.ci_p_f.1),
        fmt_float(fit.rss),
        (fit.t1l_unbounded as u8).to_string(),
    ]
}

// --- calibrate ---

fn run_calibrate(
    common: &CommonArgs,
    p_flip_round: Option<f64>,
    p_phase_round: Option<f64>,
    targets: Option<Vec<f64>>,
    out_noise: Option<PathBuf>,
) -> Result<(), CliError> {
    let mut base = load_noise(common)?;
    prepare_out_dir(common)?;
    if let Some(pf) = p_flip_round {
        base.p_flip_round = pf;
    }
    if let Some(pp) = p_phase_round {
        base.p_phase_round = pp;
    }
    base.validate()?;
    let mut cal_targets = CalibrationTargets::default();
    if let Some(t) = targets {
        if t.len() != 5 {
            return Err(CliError::config("targets must be e1,e2,e3,f_ziz,f_izz".to_string()));
        }
        cal_targets.e1 = t[0];
        cal_targets.e2 = t[1];
        cal_targets.e3 = t[2];
        cal_targets.f_ziz = t[3];
        cal_targets.f_izz = t[4];
    }
    let outcome = calibrate(&cal_targets, &base)?;

    let noise_path = out_noise.unwrap_or_else(|| common.out.join("calibrated_noise.toml"));
    outcome.noise.save(&noise_path)?;

    let meta = base_meta("calibrate", common, &outcome.noise);
    let names = ["e1", "e2", "e3", "f_ziz", "f_izz"];
    let values = [
        outcome.observables.e[0],
        outcome.observables.e[1],
        outcome.observables.e[2],
        outcome.observables.f_ziz,
        outcome.observables.f_izz,
    ];
    let target_values =
        [cal_targets.e1, cal_targets.e2, cal_targets.e3, cal_targets.f_ziz, cal_targets.f_izz];
    let tolerances = [
        cal_targets.tol_e1,
        cal_targets.tol_e2,
        cal_targets.tol_e3,
        cal_targets.tol_f_ziz,
        cal_targets.tol_f_izz,
    ];
    let rows: Vec<Vec<String>> = (0..5)
        .map(|i| {
            vec![
                names[i].to_string(),
                fmt_float(target_values[i]),
                fmt_float(values[i]),
                fmt_float(outcome.residuals[i]),
                fmt_float(tolerances[i]),
            ]
        })
        .collect();
    write_table(
        &common.out.join("calibration_report.tsv"),
        "calibration-report",
        &meta,
        &["observable", "target", "achieved", "residual", "tolerance"],
        &rows,
    )?;

    println!("calibrated noise written to {}", noise_path.display());
    for i in 0..5 {
        println!(
            "  {:6} target {:.4} achieved {:.4} (residual {:+.2e})",
            names[i], target_values[i], values[i], outcome.residuals[i]
        );
    }
    if !outcome.within_tolerance {
        return Err(CliError::runtime(format!(
            "calibration residuals exceed tolerances: {:?}",
            outcome.residuals
        )));
    }
    Ok(())
}

// --- fit ---

fn run_fit(common: &CommonArgs, input: &Path, resamples: usize) -> Result<(), CliError> {
    let points = nvnode_core::tables::load_fit_points(input)
        .map_err(|e| CliError::config(format!("fit input {}: {e}", input.display())))?;
    prepare_out_dir(common)?;
    let options = FitOptions {
        bootstrap_resamples: resamples,
        seed: common.seed,
        ..Default::default()
    };
    let fit = fit_exponential(&points, &options)?;
    let noise = load_noise(common)?;
    let mut meta = base_meta("fit", common, &noise);
    meta.push(("input".to_string(), input.display().to_string()));
    meta.push(("points".to_string(), points.len().to_string()));
    write_table(
        &common.out.join("fit_result.tsv"),
        "fit-result",
        &meta,
        &[
            "p_i", "t1l_ms", "p_f", "ci_p_i_lo", "ci_p_i_hi", "ci_t1l_lo", "ci_t1l_hi",
            "ci_p_f_lo", "ci_p_f_hi", "rss", "t1l_unbounded",
        ],
        &[vec![
            fmt_float(fit.p_i),
            fmt_float(fit.t1l_ms),
            fmt_float(fit.p_f),
            fmt_float(fit.ci_p_i.0),
            fmt_float(fit.ci_p_i.1),
            fmt_float(fit.ci_t1l.0),
            fmt_float(fit.ci_t1l.1),
            fmt_float(fit.ci_p_f.0),
            fmt_float(fit.ci_p_f.1),
            fmt_float(fit.rss),
            (fit.t1l_unbounded as u8).to_string(),
        ]],
    )?;
    if fit.t1l_unbounded {
        println!("flat data: T1L unbounded, p_f = {:.4}", fit.p_f);
    } else {
        println!(
            "T1L = {:.2} ms (68% CI {:.2}..{:.2}), p_i = {:.3}, p_f = {:.3}",
            fit.t1l_ms, fit.ci_t1l.0, fit.ci_t1l.1, fit.p_i, fit.p_f
        );
    }
    Ok(())
}
