//! Preparation from GHZ: one CNOT for states with a maximally mixed qubit,
//! two for everything else.

use super::angles::{
    ghz_class1_angles, ghz_class1_circuit, ghz_half_circuit, ghz_to_half_i1_angles, w_half_circuit,
    w_to_half_i1_angles,
};
use super::zero::patterns;
use super::{finish, pair_allowed, reached, template_fit, Route, SynthOptions, SynthesisResult, FIDELITY_FLOOR};
use crate::canonical::{
    bring_to_front, ghz_form, i05_form_at, inverse_map, lu_equivalent, others, purity, purity_invariants,
    schmidt_two_qubit, split_qubit, tangle, w_form, TANGLE_THRESHOLD,
};
use crate::classifier::classify_from_ghz;
use crate::error::{Error, Result};
use crate::gate::{Circuit, Gate};
use crate::linalg::align_to_zero;
use crate::state::PureState;
use nalgebra::{Matrix3, Matrix3x6, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{FRAC_PI_4, PI};

/// Accepted deviation of a post-step purity from 1/2.
const HALF_TOL: f64 = 1e-9;
/// Tolerance for matching canonical parameters of numerically built states.
const MATCH_TOL: f64 = 1e-6;

const ROOT_STARTS: usize = 8;
const ROOT_ITERATIONS: usize = 60;
/// Bloch-vector length accepted as zero.
const ROOT_TOL: f64 = 1e-10;

const PERMUTATIONS: [[usize; 3]; 6] = [[1, 2, 3], [1, 3, 2], [2, 1, 3], [2, 3, 1], [3, 1, 2], [3, 2, 1]];

/// One-CNOT circuit from GHZ to a state whose qubit `p` is maximally mixed.
fn class1_route(target: &PureState, p: usize) -> Result<Circuit> {
    let ghz = PureState::ghz();
    if let Some(map) = lu_equivalent(&ghz, target, MATCH_TOL)? {
        return Ok(map.circuit());
    }
    let relabel = bring_to_front(p);
    let form = i05_form_at(target, p, 1e-7)?;
    let (t2, t3) = ghz_class1_angles(form.lambda2, form.lambda3)?;
    let core = ghz_class1_circuit(t2, t3);
    let moved = target.permute(&relabel);
    let map = lu_equivalent(&ghz.apply_circuit(&core)?, &moved, MATCH_TOL)?
        .ok_or(Error::InvalidWitness("class-one circuit does not match the target's invariants"))?;
    let circ = core.then(&map.circuit()).relabel(&inverse_map(&relabel));
    let fidelity = reached(&ghz, &circ, target);
    if fidelity < FIDELITY_FLOOR {
        return Err(Error::VerificationFailed { fidelity });
    }
    Ok(circ)
}

/// Candidate one-CNOT steps `F` with qubit `r` of `F|ψ⟩` maximally mixed.
fn half_purity_candidates(state: &PureState, opts: &SynthOptions) -> Vec<(Circuit, usize)> {
    let mut out = Vec::new();
    let inv = match purity_invariants(state) {
        Ok(i) => i,
        Err(_) => return out,
    };
    for k in 1..=3 {
        if 1.0 - inv.get(k) > opts.tolerance {
            continue;
        }
        // |+⟩ on the separable qubit controls a flip of one Schmidt partner
        let (a, pair) = split_qubit(state, k);
        let Ok(form) = schmidt_two_qubit(&pair) else { continue };
        let (i, j) = others(k);
        for partner in [i, j] {
            let mut circ = Circuit::new();
            circ.push_unitary(k, &align_to_zero(&a));
            circ.push(Gate::ry(k, FRAC_PI_4));
            circ.push_unitary(i, &form.frame.unitaries[0].adjoint());
            circ.push_unitary(j, &form.frame.unitaries[1].adjoint());
            circ.push(Gate::cnot(k, partner));
            out.push((circ.clone(), k));
            out.push((circ, partner));
        }
    }
    let ghz_like = tangle(state).map(|t| t > TANGLE_THRESHOLD).unwrap_or(false);
    for map in &PERMUTATIONS {
        let moved = state.permute(map);
        let back = inverse_map(map);
        let step = if ghz_like {
            ghz_form(&moved).ok().and_then(|f| {
                let (t1, t2, chi) = ghz_to_half_i1_angles(f.a, f.b, f.xi, f.phis).ok()?;
                Some(f.frame.to_canonical_circuit().then(&ghz_half_circuit(t1, t2, chi)))
            })
        } else {
            w_form(&moved).ok().and_then(|f| {
                let (t1, t2) = w_to_half_i1_angles(f.phi, f.xi, f.phi_prime).ok()?;
                Some(f.frame.to_canonical_circuit().then(&w_half_circuit(t1, t2)))
            })
        };
        if let Some(circ) = step.and_then(|c| polish(&moved, &c)).or_else(|| solve_half_step(&moved)) {
            out.push((circ.relabel(&back), back[0]));
        }
    }
    out.retain(|(circ, r)| {
        let line_ok = circ.cnot_pairs().into_iter().all(|p| pair_allowed(p, opts));
        let end_ok = !opts.nearest_neighbor || *r != 2;
        let half = state
            .apply_circuit(circ)
            .map(|s| (purity(&s.single_qubit_density(*r)) - 0.5).abs() <= HALF_TOL)
            .unwrap_or(false);
        line_ok && end_ok && half
    });
    out
}

fn local_step(x: &[f64; 6]) -> Circuit {
    let mut circ = Circuit::new();
    for (q, a) in [(1, &x[..3]), (2, &x[3..])] {
        circ.push(Gate::rz(q, a[0]));
        circ.push(Gate::ry(q, a[1]));
        circ.push(Gate::rz(q, a[2]));
    }
    circ.push(Gate::cnot(1, 2));
    circ
}

/// Bloch vector of qubit 1 after [`local_step`].
fn bloch_after(state: &PureState, x: &[f64; 6]) -> Option<Vector3<f64>> {
    let rho = state.apply_circuit(&local_step(x)).ok()?.single_qubit_density(1);
    Some(Vector3::new(2.0 * rho[(0, 1)].re, -2.0 * rho[(0, 1)].im, (rho[(0, 0)] - rho[(1, 1)]).re))
}

/// Gauss-Newton on the Bloch vector of qubit 1; `I₁ = 1/2` exactly when
/// it vanishes, which keeps the convergence quadratic at the minimum of
/// the purity.
fn newton_half(state: &PureState, mut x: [f64; 6]) -> Option<[f64; 6]> {
    for _ in 0..ROOT_ITERATIONS {
        let r = bloch_after(state, &x)?;
        if r.norm() <= 1e-14 {
            break;
        }
        let mut jac = Matrix3x6::<f64>::zeros();
        for i in 0..6 {
            let mut xp = x;
            xp[i] += 1e-7;
            let mut xm = x;
            xm[i] -= 1e-7;
            jac.set_column(i, &((bloch_after(state, &xp)? - bloch_after(state, &xm)?) / 2e-7));
        }
        let jjt = jac * jac.transpose() + Matrix3::identity() * 1e-14;
        let step = jac.transpose() * jjt.try_inverse()? * r;
        for (xi, d) in x.iter_mut().zip(step.iter()) {
            *xi -= d;
        }
    }
    (bloch_after(state, &x)?.norm() <= ROOT_TOL).then_some(x)
}

/// Drives a closed-form step ending in `CNOT₁₂` onto `I₁ = 1/2` to working
/// precision; the canonical frame's `λ₁` scales with the square root of
/// the remaining purity gap.
fn polish(state: &PureState, step: &Circuit) -> Option<Circuit> {
    let (last, locals) = step.gates.split_last()?;
    if *last != Gate::cnot(1, 2) {
        return None;
    }
    let locals = Circuit::from_gates(locals.to_vec());
    let x = newton_half(&state.apply_circuit(&locals).ok()?, [0.0; 6])?;
    Some(locals.then(&local_step(&x)))
}

/// Numerical root of `I₁ = 1/2` over local rotations before `CNOT₁₂`, for
/// parameters where the closed-form angles are singular.
fn solve_half_step(state: &PureState) -> Option<Circuit> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x68616c66);
    (0..ROOT_STARTS).find_map(|_| {
        let x = newton_half(state, std::array::from_fn(|_| rng.random_range(-PI..PI)))?;
        Some(local_step(&x))
    })
}

/// A one-CNOT step leaving some qubit maximally mixed, and that qubit.
pub fn half_purity_step(state: &PureState, opts: &SynthOptions) -> Result<(Circuit, usize)> {
    half_purity_candidates(state, opts)
        .into_iter()
        .next()
        .ok_or(Error::DegenerateAngles("no half-purity step verified"))
}

fn two_step_route(target: &PureState, opts: &SynthOptions) -> Option<Circuit> {
    let ghz = PureState::ghz();
    for (step, r) in half_purity_candidates(target, opts) {
        let Ok(mid) = target.apply_circuit(&step) else { continue };
        let Ok(first) = class1_route(&mid, r) else { continue };
        let circ = first.then(&step.invert());
        if circ.cnot_pairs().into_iter().all(|p| pair_allowed(p, opts))
            && reached(&ghz, &circ, target) >= FIDELITY_FLOOR
        {
            return Some(circ);
        }
    }
    None
}

/// `GHZ → target` with as many CNOTs as the target's GHZ class.
pub fn prepare_from_ghz(target: &PureState, opts: &SynthOptions) -> Result<SynthesisResult> {
    let ghz = PureState::ghz();
    let class = classify_from_ghz(target, opts.tolerance)?;
    let constructive = match class.class_index {
        0 => lu_equivalent(&ghz, target, MATCH_TOL.max(opts.tolerance))?.map(|m| m.circuit()),
        1 => {
            let inv = purity_invariants(target)?;
            let one = (1..=3)
                .filter(|&p| (inv.get(p) - 0.5).abs() <= opts.tolerance)
                .filter(|&p| !opts.nearest_neighbor || p != 2)
                .find_map(|p| class1_route(target, p).ok());
            one.or_else(|| two_step_route(target, opts))
        }
        _ => two_step_route(target, opts),
    };
    if let Some(circ) = constructive {
        if let Ok(r) = finish(&ghz, target, circ, Route::GhzRoute) {
            return Ok(r);
        }
    }
    let mut last = Error::VerificationFailed { fidelity: 0.0 };
    for k in class.class_index..=2 {
        for pattern in patterns(k, opts) {
            match template_fit(&ghz, target, &pattern, opts) {
                Ok(r) => return Ok(r),
                Err(e) => last = e,
            }
        }
    }
    Err(last)
}
