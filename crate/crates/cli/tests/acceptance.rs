//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use num_complex::Complex64;
use qikit::instrument::compose;
use qikit::instrument::diagnostics::{confusion_matrix, is_measure_and_prepare, qnd_repeatability};
use qikit::superop::{is_cp, is_tp};
use qikit::{
    assignment_fidelity, ideal_projective_instrument, ptm_from_kraus, random, vectorize, Circuit,
    PauliVector, Ptm, QuantumInstrument,
};
use qikit_cli::{CircuitFile, InstrumentFile, OutcomeEntry};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type CMatrix = DMatrix<Complex64>;
type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

// Criterion 1
const FIDELITY_TARGET: f64 = 0.99;
const FIDELITY_TOL: f64 = 0.005;
const CONFUSION_TARGET: [[f64; 2]; 2] = [[1.0, 0.02], [0.0, 0.98]];
const CONFUSION_TOL: f64 = 0.01;
const P01_TARGET: f64 = 0.02;
const P11_TARGET: f64 = 0.98;
const PROBABILITY_TOL: f64 = 0.005;
const EFFECT_TARGET: [f64; 4] = [0.5117, 0.0018, -0.0026, 0.4940];
const EFFECT_TOL: f64 = 0.0005;
const POST_MIXED_0: [f64; 4] = [1.0, 0.0, 0.02, 0.96];
const POST_MIXED_1: [f64; 4] = [1.0, 0.0, 0.0, -0.84];
const POST_TOL: f64 = 0.02;
const POST_ONE_Z_TARGET: f64 = -0.85;
const FIXTURE_DIAGNOSE_TOL: &str = "0.01";
const CRITERION_1_BUDGET: Duration = Duration::from_secs(1);
// Criteria 2, 3, 5, 7
const EXACT_TOL: f64 = 1e-10;
const QND_STATES: usize = 100;
const ORACLE_ONE_QUBIT: usize = 200;
const ORACLE_TWO_QUBIT: usize = 50;
const VALIDATE_TOL: f64 = 1e-6;
const CRITERION_3_BUDGET: Duration = Duration::from_secs(60);
// Criterion 4
const TRANSPOSE_MAX_EIGENVALUE: f64 = -0.01;
const CP_TOL: f64 = 1e-8;
const TP_CASES: usize = 100;
const TP_TOL: f64 = 1e-10;
// Criterion 6
const SHOTS: usize = 100_000;
const SIGMAS: f64 = 5.0;
const SAMPLING_SEED: u64 = 20_240_611;
const CRITERION_6_BUDGET: Duration = Duration::from_secs(30);
const SAMPLING_CIRCUITS: [&str; 5] = [
    "single_measure.json",
    "repeated_measure.json",
    "reset_feedback.json",
    "damped_chain.json",
    "bell_feedback.json",
];
// Criterion 8
const ROUNDTRIP_ENTRIES: usize = 1000;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn qikit(args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_qikit"))
        .args(args)
        .env_remove(qikit::MAX_QUBITS_ENV)
        .output()
        .map_err(|e| format!("cannot run qikit: {e}"))?;
    if !out.status.success() {
        return Err(format!(
            "qikit {args:?} exited with {:?}: {}",
            out.status.code(),
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    Ok(out.stdout)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond { Ok(()) } else { Err(msg()) }
}

fn within(what: &str, value: f64, target: f64, tol: f64) -> Result<(), String> {
    ensure((value - target).abs() <= tol, || {
        format!("{what} = {value} is not within {tol} of {target}")
    })
}

fn as_f64(v: &serde_json::Value, what: &str) -> Result<f64, String> {
    v.as_f64().ok_or_else(|| format!("{what} missing from report"))
}

fn vector(v: &serde_json::Value, what: &str) -> Result<Vec<f64>, String> {
    v.as_array()
        .ok_or_else(|| format!("{what} missing from report"))?
        .iter()
        .map(|x| as_f64(x, what))
        .collect()
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn experimental_fixture_numbers() -> Check {
    let start = Instant::now();
    let measured = fixture("paper_experimental.json");
    let path = measured.to_str().unwrap();
    let report: serde_json::Value = serde_json::from_slice(&qikit(&[
        "diagnose", path, "--tol", FIXTURE_DIAGNOSE_TOL,
    ])?)
    .map_err(|e| e.to_string())?;
    let applied: serde_json::Value =
        serde_json::from_slice(&qikit(&["apply", path, "--state", "1", "--json"])?)
            .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let r = &report["report"];

    let fidelity = as_f64(&r["assignment_fidelity"], "assignment_fidelity")?;
    within("assignment fidelity", fidelity, FIDELITY_TARGET, FIDELITY_TOL)?;
    for (k, row) in CONFUSION_TARGET.iter().enumerate() {
        let entries = vector(&r["confusion"]["entries"][k], "confusion")?;
        for (b, &target) in row.iter().enumerate() {
            within(&format!("confusion[{k}][{b}]"), entries[b], target, CONFUSION_TOL)?;
        }
    }
    let p01 = as_f64(&applied[0]["probability"], "p(0|1)")?;
    let p11 = as_f64(&applied[1]["probability"], "p(1|1)")?;
    within("p(0|1)", p01, P01_TARGET, PROBABILITY_TOL)?;
    within("p(1|1)", p11, P11_TARGET, PROBABILITY_TOL)?;
    let effect = vector(&r["effects"][0]["pauli_coefficients"], "effect 0")?;
    for (k, (&got, &want)) in effect.iter().zip(&EFFECT_TARGET).enumerate() {
        within(&format!("effect 0 coefficient {k}"), got, want, EFFECT_TOL)?;
    }
    let mut post0 = vector(&r["post_mixed_states"][0]["state"], "post-state 0")?;
    post0[2] = post0[2].abs();
    let post1 = vector(&r["post_mixed_states"][1]["state"], "post-state 1")?;
    for (label, got, want) in [("0", &post0, &POST_MIXED_0), ("1", &post1, &POST_MIXED_1)] {
        for k in 0..4 {
            within(&format!("post-state {label} component {k}"), got[k], want[k], POST_TOL)?;
        }
    }
    let z = as_f64(&applied[1]["state"][3], "post-state Z")?;
    within("post-state Z from |1>, outcome 1", z, POST_ONE_Z_TARGET, POST_TOL)?;
    ensure(elapsed < CRITERION_1_BUDGET, || format!("took {elapsed:?}"))?;
    Ok(format!(
        "F = {fidelity:.4}, p(0|1) = {p01:.4}, p(1|1) = {p11:.4}, Z = {z:.4}, {elapsed:.0?}"
    ))
}

fn ideal_exactness() -> Check {
    let instr = ideal_projective_instrument(1).map_err(|e| e.to_string())?;
    let rows: Vec<Vec<f64>> = instr
        .outcomes()
        .iter()
        .map(|o| o.branch.top_row().iter().copied().collect())
        .collect();
    ensure(rows == vec![vec![0.5, 0.0, 0.0, 0.5], vec![0.5, 0.0, 0.0, -0.5]], || {
        format!("top rows {rows:?}")
    })?;
    let confusion = confusion_matrix(&instr);
    ensure(confusion.entries == vec![vec![1.0, 0.0], vec![0.0, 1.0]], || {
        format!("confusion {:?}", confusion.entries)
    })?;
    let fidelity = assignment_fidelity(&confusion);
    ensure(fidelity == 1.0, || format!("assignment fidelity {fidelity}"))?;
    ensure(is_measure_and_prepare(&instr, 1e-6), || "not measure-and-prepare".into())?;
    let mut r = rng(2);
    let mut worst: f64 = 0.0;
    for _ in 0..QND_STATES {
        let v = vectorize(&random::density_matrix(&mut r, 1)).map_err(|e| e.to_string())?;
        let q = qnd_repeatability(&instr, &v).map_err(|e| e.to_string())?;
        worst = worst.max((q - 1.0).abs());
    }
    ensure(worst <= EXACT_TOL, || format!("QND repeatability off by {worst:e}"))?;
    Ok(format!("QND worst deviation {worst:.1e} over {QND_STATES} states"))
}

fn evolve(kraus: &[CMatrix], rho: &CMatrix) -> CMatrix {
    let d = rho.nrows();
    kraus.iter().fold(CMatrix::zeros(d, d), |acc, k| acc + k * rho * k.adjoint())
}

fn dense_vectorize(rho: &CMatrix) -> Vec<f64> {
    let n = rho.nrows().trailing_zeros() as usize;
    qikit::pauli_labels(n)
        .map(|l| (qikit::pauli_matrix(&l) * rho).trace().re)
        .collect()
}

fn oracle_case(r: &mut ChaCha8Rng, n: usize) -> Result<f64, String> {
    let outcomes = r.random_range(2..=4);
    let per = r.random_range(1..=3);
    let (instr, kraus) = random::instrument(r, n, outcomes, per);
    let report = instr.validate(VALIDATE_TOL);
    ensure(report.passed, || format!("random instrument failed validation: {:?}", report.violations))?;
    let rho = random::density_matrix(r, n);
    let v = vectorize(&rho).map_err(|e| e.to_string())?;
    let probs = instr.outcome_probabilities(&v).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for (k, ks) in kraus.iter().enumerate() {
        let out = evolve(ks, rho.matrix());
        let p = out.trace().re;
        worst = worst.max((p - probs[k]).abs());
        if p > 1e-9 {
            let expected = dense_vectorize(&out.unscale(p));
            let got = instr
                .post_measurement_state(&k.to_string(), &v)
                .map_err(|e| e.to_string())?;
            worst = worst.max(max_diff(got.as_slice(), &expected));
        }
    }
    Ok(worst)
}

fn oracle_equivalence() -> Check {
    let start = Instant::now();
    let mut r = rng(3);
    let mut worst: f64 = 0.0;
    for (n, count) in [(1, ORACLE_ONE_QUBIT), (2, ORACLE_TWO_QUBIT)] {
        for _ in 0..count {
            worst = worst.max(oracle_case(&mut r, n)?);
        }
    }
    let elapsed = start.elapsed();
    ensure(worst <= EXACT_TOL, || format!("max deviation {worst:e}"))?;
    ensure(elapsed < CRITERION_3_BUDGET, || format!("took {elapsed:?}"))?;
    Ok(format!(
        "{ORACLE_ONE_QUBIT} + {ORACLE_TWO_QUBIT} instruments, max deviation {worst:.1e}, {elapsed:.0?}"
    ))
}

fn cptp_detection() -> Check {
    #[rustfmt::skip]
    let transpose = Ptm::from_row_major(&[
        1.0, 0.0, 0.0, 0.0,
        0.0, 1.0, 0.0, 0.0,
        0.0, 0.0, -1.0, 0.0,
        0.0, 0.0, 0.0, 1.0,
    ])
    .map_err(|e| e.to_string())?;
    let check = is_cp(&transpose, CP_TOL);
    ensure(!check.is_cp && check.min_eigenvalue < TRANSPOSE_MAX_EIGENVALUE, || {
        format!("transpose map min eigenvalue {}", check.min_eigenvalue)
    })?;

    let mut r = rng(4);
    let mut agreements = 0;
    for case in 0..TP_CASES {
        let n = 1 + case % 2;
        let count = r.random_range(1..=4);
        let mut kraus = random::kraus_channel(&mut r, n, count);
        if case % 3 == 0 {
            let k = r.random_range(0..kraus.len());
            let factor = r.random_range(0.5..0.99);
            kraus[k] *= Complex64::new(factor, 0.0);
        }
        let d = 1usize << n;
        let completeness = kraus
            .iter()
            .fold(CMatrix::zeros(d, d), |acc, k| acc + k.adjoint() * k)
            - CMatrix::identity(d, d);
        let complete = completeness.iter().all(|z| z.norm() <= TP_TOL);
        let ptm = ptm_from_kraus(&kraus).map_err(|e| e.to_string())?;
        ensure(is_cp(&ptm, CP_TOL).is_cp, || format!("Kraus-built map rejected (case {case})"))?;
        let tp = is_tp(&ptm, TP_TOL);
        ensure(tp.is_tp == complete, || {
            format!("case {case}: is_tp {} but Kraus set complete = {complete}", tp.is_tp)
        })?;
        agreements += 1;
    }
    Ok(format!(
        "transpose min eigenvalue {:.3}, {agreements}/{TP_CASES} TP verdicts correct",
        check.min_eigenvalue
    ))
}

fn composition_law() -> Check {
    let mut r = rng(5);
    let mut worst: f64 = 0.0;
    for k in [2usize, 3] {
        for _ in 0..10 {
            let instruments: Vec<QuantumInstrument> =
                (0..k).map(|_| random::instrument(&mut r, 1, 2, 2).0).collect();
            let v = vectorize(&random::density_matrix(&mut r, 1)).map_err(|e| e.to_string())?;
            let mut builder = Circuit::builder(1);
            for (j, instr) in instruments.iter().enumerate() {
                builder = builder.measure(instr.clone(), &[0], format!("m{j}"));
            }
            let circuit = builder.build().map_err(|e| e.to_string())?;
            let joint = circuit
                .run_exact(&v, 0.0)
                .map_err(|e| e.to_string())?
                .joint_distribution();
            let mut composed = instruments[0].clone();
            for next in &instruments[1..] {
                composed = compose(next, &composed).map_err(|e| e.to_string())?;
            }
            ensure(composed.len() == 1 << k, || format!("{} outcomes for k = {k}", composed.len()))?;
            ensure(joint.len() == 1 << k, || format!("{} joint outcomes for k = {k}", joint.len()))?;
            let probs = composed.outcome_probabilities(&v).map_err(|e| e.to_string())?;
            for (label, p) in composed.labels().zip(probs) {
                let key: Vec<String> = label.split(',').map(String::from).collect();
                let q = joint.get(&key).copied().unwrap_or(0.0);
                worst = worst.max((p - q).abs());
            }
        }
    }
    ensure(worst <= EXACT_TOL, || format!("max deviation {worst:e}"))?;
    Ok(format!("k = 2, 3 with 4 and 8 outcomes, max deviation {worst:.1e}"))
}

fn load_circuit(name: &str) -> Result<(Circuit, PauliVector), String> {
    let path = fixture(name);
    let file = CircuitFile::parse(&std::fs::read_to_string(&path).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let circuit = file
        .to_circuit(path.parent().unwrap(), VALIDATE_TOL)
        .map_err(|e| e.to_string())?;
    let v0 = qikit_cli::states::parse_state(
        file.initial_state.as_deref().unwrap_or("0"),
        file.num_qubits,
    )
    .map_err(|e| e.to_string())?;
    Ok((circuit, v0))
}

fn sampling_statistics() -> Check {
    let start = Instant::now();
    let mut worst_z: f64 = 0.0;
    for name in SAMPLING_CIRCUITS {
        let (circuit, v0) = load_circuit(name)?;
        let exact = circuit.run_exact(&v0, 0.0).map_err(|e| e.to_string())?.joint_distribution();
        let shots = circuit.run_sampled(&v0, SHOTS, SAMPLING_SEED).map_err(|e| e.to_string())?;
        let again = circuit.run_sampled(&v0, SHOTS, SAMPLING_SEED).map_err(|e| e.to_string())?;
        ensure(shots == again, || format!("{name}: same seed gave different shots"))?;
        let mut counts: BTreeMap<Vec<String>, usize> = BTreeMap::new();
        for shot in &shots {
            let key = shot.record.iter().map(|(_, l)| l.clone()).collect();
            *counts.entry(key).or_default() += 1;
        }
        for key in counts.keys() {
            ensure(exact.contains_key(key), || format!("{name}: sampled impossible outcome {key:?}"))?;
        }
        for (key, &p) in &exact {
            let count = counts.get(key).copied().unwrap_or(0) as f64;
            let n = SHOTS as f64;
            let sigma = (n * p * (1.0 - p)).sqrt();
            let dev = (count - n * p).abs();
            if sigma > 0.0 {
                worst_z = worst_z.max(dev / sigma);
            }
            ensure(dev <= SIGMAS * sigma.max(f64::EPSILON), || {
                format!("{name}: outcome {key:?} count {count} vs expected {}", n * p)
            })?;
        }
        let circuit_path = fixture(name);
        let shots_arg = SHOTS.to_string();
        let seed_arg = SAMPLING_SEED.to_string();
        let args = [
            "simulate",
            circuit_path.to_str().unwrap(),
            "--mode",
            "sample",
            "--shots",
            &shots_arg,
            "--seed",
            &seed_arg,
        ];
        ensure(qikit(&args)? == qikit(&args)?, || format!("{name}: CLI output differs between runs"))?;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < CRITERION_6_BUDGET, || format!("took {elapsed:?}"))?;
    Ok(format!(
        "{} circuits x {SHOTS} shots, worst deviation {worst_z:.2} sigma, {elapsed:.1?}",
        SAMPLING_CIRCUITS.len()
    ))
}

fn adaptive_reset() -> Check {
    let (circuit, _) = load_circuit("reset_feedback.json")?;
    let result = circuit
        .run_exact(&PauliVector::maximally_mixed(1), qikit::sim::DEFAULT_P_MIN)
        .map_err(|e| e.to_string())?;
    let target = [1.0, 0.0, 0.0, 1.0];
    let worst = result
        .branches
        .iter()
        .map(|b| max_diff(b.state.as_slice(), &target))
        .fold(0.0, f64::max);
    ensure(result.branches.len() == 2, || format!("{} branches", result.branches.len()))?;
    ensure(worst <= EXACT_TOL, || format!("max deviation {worst:e}"))?;
    Ok(format!("{} branches reset to |0>, max deviation {worst:.1e}", result.branches.len()))
}

fn random_entry(r: &mut ChaCha8Rng) -> f64 {
    match r.random_range(0..4) {
        0 => loop {
            let x = f64::from_bits(r.random::<u64>());
            if x.is_finite() {
                break x;
            }
        },
        1 => r.random_range(-1.0..1.0),
        2 => r.random_range(-1.0..1.0) * 10f64.powi(r.random_range(-300..300)),
        _ => [0.0, -0.0, 0.5, 1.0, f64::MIN_POSITIVE, 5e-324, f64::MAX][r.random_range(0..7)],
    }
}

fn serialization_roundtrip() -> Check {
    let mut r = rng(8);
    let dir = std::env::temp_dir().join(format!("qikit-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let mut entries = 0usize;
    for case in 0..ROUNDTRIP_ENTRIES {
        let n = r.random_range(1..=2);
        let outcomes = (0..r.random_range(1..=3))
            .map(|k| OutcomeEntry {
                label: format!("o{k}"),
                ptm: (0..1usize << (4 * n)).map(|_| random_entry(&mut r)).collect(),
            })
            .collect();
        let file = InstrumentFile {
            format_version: "1".into(),
            num_qubits: n,
            pauli_order: "IXYZ-lex".into(),
            description: None,
            outcomes,
        };
        let text = file.to_json();
        let back = if case % 50 == 0 {
            let path = dir.join("roundtrip.json");
            qikit_cli::format::write_atomic(&path, text.as_bytes()).map_err(|e| e.to_string())?;
            InstrumentFile::parse(&std::fs::read_to_string(&path).map_err(|e| e.to_string())?)
        } else {
            InstrumentFile::parse(&text)
        }
        .map_err(|e| format!("case {case}: {e}"))?;
        for (a, b) in file.outcomes.iter().zip(&back.outcomes) {
            for (x, y) in a.ptm.iter().zip(&b.ptm) {
                ensure(x.to_bits() == y.to_bits(), || format!("case {case}: {x:e} read back as {y:e}"))?;
                entries += 1;
            }
        }
    }
    let _ = std::fs::remove_dir_all(&dir);
    Ok(format!("{ROUNDTRIP_ENTRIES} files, {entries} entries bit-exact"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("experimental fixture numbers", experimental_fixture_numbers),
        ("ideal-instrument exactness", ideal_exactness),
        ("oracle equivalence", oracle_equivalence),
        ("CPTP detection", cptp_detection),
        ("composition law", composition_law),
        ("sampling statistics", sampling_statistics),
        ("adaptive-circuit demo", adaptive_reset),
        ("serialization roundtrip", serialization_roundtrip),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail}", k + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {why}", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
