//! Acceptance criteria. Each criterion prints one PASS/FAIL line; the test
//! fails when any criterion fails.

use cnotm_core::canonical::{acin_form, purity_invariants, tangle, DEFAULT_TOLERANCE};
use cnotm_core::classifier::{classify_from_ghz, classify_from_zero};
use cnotm_core::oracle::{min_cnot_search, DEFAULT_THRESHOLD};
use cnotm_core::state::haar_sample_with;
use cnotm_core::synth::{
    ghz_class1_angles, ghz_class1_circuit, ghz_half_circuit, ghz_to_half_i1_angles, is_nearest_neighbor,
    prepare_from_ghz, prepare_from_zero, transform_any, two_qubit_transform, w_half_circuit,
    w_to_half_i1_angles, SynthOptions,
};
use cnotm_core::canonical::{ghz_form_amplitudes, w_form_state};
use cnotm_core::{Circuit, Gate, PureState};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};
use std::io::Write;
use std::path::Path;
use std::process::Command;

const TOL: f64 = DEFAULT_TOLERANCE;
const FLOOR: f64 = 1.0 - 1e-8;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn haar(n: usize, rng: &mut ChaCha8Rng) -> PureState {
    haar_sample_with(n, rng).unwrap()
}

fn random_lu(n: usize, rng: &mut ChaCha8Rng) -> Circuit {
    let mut c = Circuit::new();
    for q in 1..=n {
        c.push(Gate::rz(q, rng.random_range(-PI..PI)));
        c.push(Gate::ry(q, rng.random_range(-PI..PI)));
        c.push(Gate::rz(q, rng.random_range(-PI..PI)));
    }
    c
}

const PAIRS: [(usize, usize); 6] = [(1, 2), (1, 3), (2, 1), (2, 3), (3, 1), (3, 2)];

/// A state at CNOT distance `k` from `|000⟩` (k ≤ 2) or from GHZ (k ≤ 1),
/// built with `k` CNOTs between random local layers; larger `k` gives a
/// Haar-random state.
fn constructed(reference: &PureState, k: usize, rng: &mut ChaCha8Rng) -> PureState {
    let ghz = reference.amplitudes()[7].norm() > 0.5;
    if (ghz && k >= 2) || k >= 3 {
        return haar(3, rng);
    }
    let first = PAIRS[rng.random_range(0..6)];
    // the second CNOT must reach the qubit the first one left untouched
    let second = loop {
        let p = PAIRS[rng.random_range(0..6)];
        let covered = [first.0, first.1, p.0, p.1];
        if (1..=3).all(|q| covered.contains(&q)) {
            break p;
        }
    };
    let mut c = random_lu(3, rng);
    for &(ctl, tgt) in [first, second].iter().take(k) {
        c.push(Gate::cnot(ctl, tgt));
        c.append(&random_lu(3, rng));
    }
    reference.apply_circuit(&c).unwrap()
}

fn fidelity_of(source: &PureState, circuit: &Circuit, target: &PureState) -> f64 {
    source.apply_circuit(circuit).unwrap().fidelity(target).unwrap()
}

/// Schmidt angle from the purity of the first qubit, `P = 1 − sin²2φ / 2`.
fn schmidt_angle(s: &PureState) -> f64 {
    let a = s.amplitudes();
    let r00 = a[0].norm_sqr() + a[1].norm_sqr();
    let r11 = a[2].norm_sqr() + a[3].norm_sqr();
    let r01 = a[0] * a[2].conj() + a[1] * a[3].conj();
    let p = r00 * r00 + r11 * r11 + 2.0 * r01.norm_sqr();
    0.5 * (2.0 * (1.0 - p)).max(0.0).sqrt().min(1.0).asin()
}

fn criterion_1() -> Verdict {
    let mut r = rng(1);
    let opts = SynthOptions::default();
    let (mut worst, mut bad) = (1.0f64, Vec::new());
    for i in 0..200 {
        let a = haar(2, &mut r);
        // every other pair is LU-equivalent so both sides of the iff occur
        let b = if i % 2 == 0 { haar(2, &mut r) } else { a.apply_circuit(&random_lu(2, &mut r)).unwrap() };
        let out = two_qubit_transform(&a, &b, &opts).unwrap();
        let f = fidelity_of(&a, &out.circuit, &b);
        worst = worst.min(f);
        let same = (schmidt_angle(&a) - schmidt_angle(&b)).abs() <= 1e-8;
        let ok = out.cnot_count <= 1 && f >= 1.0 - 1e-10 && (out.cnot_count == 0) == same;
        if !ok {
            bad.push(i);
        }
    }
    verdict(bad.is_empty(), format!("200 pairs, worst fidelity 1-{:.1e}, failures {bad:?}", 1.0 - worst))
}

fn criterion_2() -> Verdict {
    let mut r = rng(2);
    let opts = SynthOptions::default();
    let zero = PureState::zero(3);
    let (mut worst, mut wrong_count) = (1.0f64, 0);
    for _ in 0..1000 {
        let t = haar(3, &mut r);
        let out = prepare_from_zero(&t, &opts).unwrap();
        worst = worst.min(fidelity_of(&zero, &out.circuit, &t));
        wrong_count += usize::from(out.cnot_count != 3);
    }
    let mut over = Vec::new();
    for i in 0..200 {
        let k = i % 3;
        let t = constructed(&zero, k, &mut r);
        let class = classify_from_zero(&t, TOL).unwrap().class_index;
        let out = prepare_from_zero(&t, &opts).unwrap();
        if class != k || out.cnot_count > k || fidelity_of(&zero, &out.circuit, &t) < FLOOR {
            over.push((i, k, class, out.cnot_count));
        }
    }
    verdict(
        worst >= FLOOR && wrong_count == 0 && over.is_empty(),
        format!(
            "1000 Haar targets: {wrong_count} not at 3 CNOTs, worst fidelity 1-{:.1e}; constructed failures {over:?}",
            1.0 - worst
        ),
    )
}

fn criterion_3() -> Verdict {
    let mut r = rng(3);
    let opts = SynthOptions::default();
    let ghz = PureState::ghz();
    let (mut worst, mut most) = (1.0f64, 0);
    for _ in 0..1000 {
        let t = haar(3, &mut r);
        let out = prepare_from_ghz(&t, &opts).unwrap();
        worst = worst.min(fidelity_of(&ghz, &out.circuit, &t));
        most = most.max(out.cnot_count);
    }
    verdict(worst >= FLOOR && most <= 2, format!("1000 Haar targets: max {most} CNOTs, worst fidelity 1-{:.1e}", 1.0 - worst))
}

fn any_to_any(seed: u64, nearest_neighbor: bool) -> Verdict {
    let mut r = rng(seed);
    let opts = SynthOptions { nearest_neighbor, ..Default::default() };
    let (mut worst, mut most, mut off_line) = (1.0f64, 0, 0);
    let count = if nearest_neighbor { 100 } else { 200 };
    for _ in 0..count {
        let (a, b) = (haar(3, &mut r), haar(3, &mut r));
        let out = transform_any(&a, &b, &opts).unwrap();
        worst = worst.min(fidelity_of(&a, &out.circuit, &b));
        most = most.max(out.cnot_count);
        off_line += usize::from(!is_nearest_neighbor(&out.circuit));
    }
    let line_ok = !nearest_neighbor || off_line == 0;
    verdict(
        worst >= FLOOR && most <= 4 && line_ok,
        format!(
            "{count} pairs: max {most} CNOTs, worst fidelity 1-{:.1e}{}",
            1.0 - worst,
            if nearest_neighbor { format!(", {off_line} circuits off the line") } else { String::new() }
        ),
    )
}

fn criterion_5() -> Verdict {
    let mut r = rng(5);
    let ghz = PureState::ghz();
    let mut worst_triple = 0.0f64;
    for _ in 0..100 {
        // uniform on the admissible quarter disc λ₂² + λ₃² ≤ 1/2
        let rad = FRAC_1_SQRT_2 * r.random::<f64>().sqrt();
        let ang = r.random_range(0.0..FRAC_PI_2);
        let (l2, l3) = (rad * ang.cos(), rad * ang.sin());
        let l4 = (0.5 - l2 * l2 - l3 * l3).max(0.0).sqrt();
        let mut amps = vec![num_complex::Complex64::new(0.0, 0.0); 8];
        amps[0b000].re = FRAC_1_SQRT_2;
        amps[0b101].re = l2;
        amps[0b110].re = l3;
        amps[0b111].re = l4;
        let expected = purity_invariants(&PureState::from_unnormalized(3, amps).unwrap()).unwrap();
        let (t2, t3) = ghz_class1_angles(l2, l3).unwrap();
        let got = purity_invariants(&ghz.apply_circuit(&ghz_class1_circuit(t2, t3)).unwrap()).unwrap();
        for q in 1..=3 {
            worst_triple = worst_triple.max((expected.get(q) - got.get(q)).abs());
        }
    }
    let i1 = |s: PureState| purity_invariants(&s).unwrap().get(1);
    let (mut worst_w, mut w_failed) = (0.0f64, 0);
    for _ in 0..100 {
        let (phi, xi, pp) =
            (r.random_range(0.05..FRAC_PI_2 - 0.05), r.random_range(0.05..FRAC_PI_2 - 0.05), r.random_range(0.05..FRAC_PI_2 - 0.05));
        match w_to_half_i1_angles(phi, xi, pp) {
            Ok((t1, t2)) => {
                let out = w_form_state(phi, xi, pp).apply_circuit(&w_half_circuit(t1, t2)).unwrap();
                worst_w = worst_w.max((i1(out) - 0.5).abs());
            }
            Err(_) => w_failed += 1,
        }
    }
    let (mut worst_g, mut g_failed) = (0.0f64, 0);
    for _ in 0..100 {
        let b = r.random_range(0.1..0.9);
        let xi = r.random_range(0.05..PI - 0.05);
        let phis = [0; 3].map(|_| r.random_range(0.05..FRAC_PI_2 - 0.05));
        let c = xi.cos() * phis.iter().map(|p| p.cos()).product::<f64>();
        let a = -b * c + (b * b * c * c - b * b + 1.0).sqrt();
        match ghz_to_half_i1_angles(a, b, xi, phis) {
            Ok((t1, t2, chi)) => {
                let s = PureState::from_unnormalized(3, ghz_form_amplitudes(a, b, xi, phis)).unwrap();
                worst_g = worst_g.max((i1(s.apply_circuit(&ghz_half_circuit(t1, t2, chi)).unwrap()) - 0.5).abs());
            }
            Err(_) => g_failed += 1,
        }
    }
    verdict(
        worst_triple <= 1e-9 && worst_w <= 1e-9 && worst_g <= 1e-9 && w_failed == 0 && g_failed == 0,
        format!(
            "class-1 triple error {worst_triple:.1e}; W-form |I1-1/2| {worst_w:.1e} ({w_failed} failed); \
             GHZ-form |I1-1/2| {worst_g:.1e} ({g_failed} failed)"
        ),
    )
}

fn criterion_6() -> Verdict {
    let mut r = rng(6);
    let zero = PureState::zero(3);
    let ghz = PureState::ghz();
    let mut mismatches = Vec::new();
    let mut checked = 0;
    for (reference, classes, name) in [(&zero, 4usize, "zero"), (&ghz, 3, "ghz")] {
        for k in 0..classes {
            for i in 0..25 {
                let t = constructed(reference, k, &mut r);
                let class = if name == "zero" {
                    classify_from_zero(&t, TOL).unwrap().class_index
                } else {
                    classify_from_ghz(&t, TOL).unwrap().class_index
                };
                let seed = 1000 * k as u64 + i;
                let report = min_cnot_search(reference, &t, classes - 1, DEFAULT_THRESHOLD, seed).unwrap();
                checked += 1;
                if report.verdict != Some(class) {
                    mismatches.push((name, k, i, class, report.verdict));
                }
            }
        }
    }
    verdict(mismatches.is_empty(), format!("{checked} states, mismatches {mismatches:?}"))
}

fn criterion_7() -> Verdict {
    let mut r = rng(7);
    let zero = PureState::zero(3);
    let ghz = PureState::ghz();
    let (mut worst, mut label_changes, mut acin_mismatch) = (0.0f64, 0, 0);
    for i in 0..1000 {
        let s = match i % 6 {
            0..=2 => constructed(&zero, i % 3, &mut r),
            3 => constructed(&ghz, 1, &mut r),
            4 => PureState::w().apply_circuit(&random_lu(3, &mut r)).unwrap(),
            _ => haar(3, &mut r),
        };
        let t = s.apply_circuit(&random_lu(3, &mut r)).unwrap();
        let (a, b) = (purity_invariants(&s).unwrap(), purity_invariants(&t).unwrap());
        for q in 1..=3 {
            worst = worst.max((a.get(q) - b.get(q)).abs());
        }
        worst = worst.max((tangle(&s).unwrap() - tangle(&t).unwrap()).abs());
        if !acin_form(&s).unwrap().matches(&acin_form(&t).unwrap(), 1e-8) {
            acin_mismatch += 1;
        }
        let same_zero = classify_from_zero(&s, TOL).unwrap().class_index == classify_from_zero(&t, TOL).unwrap().class_index;
        let same_ghz = classify_from_ghz(&s, TOL).unwrap().class_index == classify_from_ghz(&t, TOL).unwrap().class_index;
        label_changes += usize::from(!(same_zero && same_ghz));
    }
    let mut worst_rec = 1.0f64;
    for _ in 0..500 {
        let s = haar(3, &mut r);
        worst_rec = worst_rec.min(acin_form(&s).unwrap().reconstruct().fidelity(&s).unwrap());
    }
    verdict(
        worst <= 1e-8 && label_changes == 0 && acin_mismatch == 0 && worst_rec >= 1.0 - 1e-10,
        format!(
            "1000 trials: invariant drift {worst:.1e}, {acin_mismatch} canonical-form mismatches, \
             {label_changes} label changes; 500 reconstructions, worst fidelity 1-{:.1e}",
            1.0 - worst_rec
        ),
    )
}

fn criterion_8() -> Verdict {
    let (zero, ghz, w) = (PureState::zero(3), PureState::ghz(), PureState::w());
    let t_ghz = tangle(&ghz).unwrap();
    let t_w = tangle(&w).unwrap();
    let i_ghz = purity_invariants(&ghz).unwrap();
    let opts = SynthOptions::default();
    let synth_ghz = prepare_from_zero(&ghz, &opts).unwrap().cnot_count;
    let synth_w = prepare_from_zero(&w, &opts).unwrap().cnot_count;
    let oracle_ghz = min_cnot_search(&zero, &ghz, 3, DEFAULT_THRESHOLD, 8).unwrap().verdict;
    let oracle_w = min_cnot_search(&zero, &w, 3, DEFAULT_THRESHOLD, 8).unwrap().verdict;
    let pass = (t_ghz - 1.0).abs() <= 1e-10
        && t_w <= 1e-10
        && i_ghz.0.iter().all(|i| (i - 0.5).abs() <= 1e-12)
        && synth_ghz == 2
        && synth_w == 3
        && oracle_ghz == Some(2)
        && oracle_w == Some(3);
    verdict(
        pass,
        format!(
            "tangle GHZ {t_ghz:.12}, W {t_w:.1e}; I(GHZ) {:?}; |000>->GHZ synth {synth_ghz} oracle {oracle_ghz:?}; \
             |000>->W synth {synth_w} oracle {oracle_w:?}",
            i_ghz.0
        ),
    )
}

fn cli(dir: &Path, args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_cnotm"))
        .current_dir(dir)
        .env_remove("CNOTM_TOLERANCE")
        .args(args)
        .output()
        .expect("run cnotm");
    (out.status.code().unwrap_or(-1), out.stdout)
}

/// Every command, with `--json`, run from scratch in a fresh directory.
fn cli_matrix() -> Vec<(String, i32, Vec<u8>)> {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let mut out = Vec::new();
    let mut run = |args: &[&str]| {
        let (code, stdout) = cli(d, args);
        out.push((args.join(" "), code, stdout));
    };
    let zero = r#"{"qubits": 3, "amps": [[1,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0]]}"#;
    let ghz = r#"{"qubits": 3, "amps": [[0.7071067811865476,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0.7071067811865476,0]]}"#;
    let w = r#"{"qubits": 3, "amps": [[0,0],[0.5773502691896258,0],[0.5773502691896258,0],[0,0],[0.5773502691896258,0],[0,0],[0,0],[0,0]]}"#;
    for (name, text) in [("zero.json", zero), ("ghz.json", ghz), ("w.json", w)] {
        std::fs::write(d.join(name), text).unwrap();
    }
    for seed in ["7", "8"] {
        let (_, text) = cli(d, &["sample", "--qubits", "3", "--count", "1", "--seed", seed, "--json"]);
        let v: serde_json::Value = serde_json::from_slice(&text).unwrap();
        std::fs::write(d.join(format!("r{seed}.json")), cnotm_core::interchange::to_json(&v["states"][0])).unwrap();
    }
    run(&["sample", "--qubits", "3", "--count", "3", "--seed", "7", "--json"]);
    run(&["sample", "--qubits", "2", "--count", "2", "--seed", "1", "--json"]);
    for file in ["ghz.json", "w.json", "r7.json"] {
        run(&["classify", file, "--ref", "zero", "--json"]);
        run(&["classify", file, "--ref", "ghz", "--json"]);
        run(&["invariants", file, "--json"]);
        run(&["synth", file, "--from", "zero", "--json"]);
        run(&["synth", file, "--from", "ghz", "--json"]);
        run(&["synth", file, "--from", "zero", "--nearest-neighbor", "--json"]);
    }
    run(&["synth", "r7.json", "--from", "r8.json", "--seed", "3", "--json"]);
    run(&["synth", "r7.json", "--from", "r8.json", "--nearest-neighbor", "--seed", "3", "--json"]);
    run(&["synth", "w.json", "--from", "zero", "--circuit-out", "c.json", "--json"]);
    run(&["verify", "zero.json", "c.json", "w.json", "--json"]);
    run(&["verify", "ghz.json", "c.json", "w.json", "--json"]);
    run(&["oracle", "zero.json", "ghz.json", "--kmax", "3", "--seed", "5", "--json"]);
    run(&["oracle", "r7.json", "r8.json", "--kmax", "2", "--seed", "5", "--json"]);
    run(&["probe-max-distance", "--samples", "2", "--seed", "4", "--json"]);
    out.push(("c.json".into(), 0, std::fs::read(d.join("c.json")).unwrap()));
    out
}

fn criterion_10() -> Verdict {
    let first = cli_matrix();
    let second = cli_matrix();
    let differing: Vec<&str> =
        first.iter().zip(&second).filter(|(a, b)| a != b).map(|(a, _)| a.0.as_str()).collect();
    let invalid: Vec<&str> = first
        .iter()
        .filter(|(_, _, out)| !out.is_empty() && serde_json::from_slice::<serde_json::Value>(out).is_err())
        .map(|(cmd, _, _)| cmd.as_str())
        .collect();
    verdict(
        differing.is_empty() && invalid.is_empty() && first.len() == second.len(),
        format!("{} invocations twice: differing {differing:?}, invalid JSON {invalid:?}", first.len()),
    )
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Verdict); 10] = [
        ("two-qubit pairs need at most one CNOT", criterion_1),
        ("three CNOTs from |000>", criterion_2),
        ("two CNOTs from GHZ", criterion_3),
        ("four CNOTs any-to-any", || any_to_any(4, false)),
        ("closed-form angles", criterion_5),
        ("classifier agrees with oracle", criterion_6),
        ("local-unitary invariance", criterion_7),
        ("known points", criterion_8),
        ("four CNOTs on a line", || any_to_any(9, true)),
        ("CLI determinism", criterion_10),
    ];
    let results: Vec<(Verdict, f64)> = std::thread::scope(|scope| {
        let handles: Vec<_> = criteria
            .iter()
            .map(|&(_, f)| {
                scope.spawn(move || {
                    let start = std::time::Instant::now();
                    let v = f();
                    (v, start.elapsed().as_secs_f64())
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|_| (verdict(false, "panicked".into()), 0.0)))
            .collect()
    });
    // written to the raw handle so the lines show without --nocapture
    let mut err = std::io::stderr().lock();
    for (i, ((name, _), (v, secs))) in criteria.iter().zip(&results).enumerate() {
        let status = if v.pass { "PASS" } else { "FAIL" };
        writeln!(err, "criterion {:>2} {status}: {name} ({secs:.1}s) {}", i + 1, v.detail).unwrap();
    }
    let failed: Vec<usize> = results.iter().enumerate().filter(|(_, (v, _))| !v.pass).map(|(i, _)| i + 1).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
