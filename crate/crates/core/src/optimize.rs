//! Fidelity maximization over local layers interleaved with a fixed CNOT
//! pattern.
//!
//! Each local layer holds `Rz(α) Ry(β) Rz(γ)` per qubit (applied in that
//! order). The infidelity `1 − |⟨t|U(θ)s⟩|²` and its exact gradient are
//! evaluated by one forward and one backward sweep; minimization is BFGS
//! with backtracking line search, restarted from uniformly random points.

use crate::gate::{Circuit, Gate};
use crate::linalg::{inner, C64};
use crate::state::{apply_gate_unchecked, PureState};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::f64::consts::PI;

/// Ordered CNOT `(control, target)` pairs, 1-based.
pub type Pattern = Vec<(usize, usize)>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Template {
    pub qubits: usize,
    pub pattern: Pattern,
}

impl Template {
    pub fn new(qubits: usize, pattern: Pattern) -> Self {
        Template { qubits, pattern }
    }

    pub fn parameter_count(&self) -> usize {
        (self.pattern.len() + 1) * self.qubits * 3
    }

    fn layer(&self, circ: &mut Circuit, params: &[f64]) {
        for q in 0..self.qubits {
            let p = &params[3 * q..3 * q + 3];
            circ.push(Gate::rz(q + 1, p[0]));
            circ.push(Gate::ry(q + 1, p[1]));
            circ.push(Gate::rz(q + 1, p[2]));
        }
    }

    pub fn circuit(&self, params: &[f64]) -> Circuit {
        assert_eq!(params.len(), self.parameter_count());
        let width = 3 * self.qubits;
        let mut circ = Circuit::new();
        for (i, &(c, t)) in self.pattern.iter().enumerate() {
            self.layer(&mut circ, &params[i * width..(i + 1) * width]);
            circ.push(Gate::cnot(c, t));
        }
        let last = self.pattern.len();
        self.layer(&mut circ, &params[last * width..]);
        circ
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub max_iterations: usize,
    /// Stop a run once infidelity falls below this value.
    pub target: f64,
    /// Stop a run after three iterations improving by less than this
    /// fraction of the current value.
    pub stall: f64,
    /// Skip the remaining restarts once a run reaches this infidelity.
    pub early_exit: Option<f64>,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            restarts: 20,
            max_iterations: 1000,
            target: 1e-15,
            stall: 1e-12,
            early_exit: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub infidelity: f64,
    pub parameters: Vec<f64>,
    /// Index of the restart that produced the best point.
    pub restart: usize,
    pub restarts_used: usize,
    /// Infidelity reached by each executed restart.
    pub trace: Vec<f64>,
}

/// Precompiled objective for one (source, target, template) triple.
struct Objective<'a> {
    source: &'a [C64],
    target: &'a [C64],
    qubits: usize,
    /// `(gate, parameter index)`; CNOTs carry no parameter.
    ops: Vec<(Gate, Option<usize>)>,
}

impl<'a> Objective<'a> {
    fn new(source: &'a PureState, target: &'a PureState, template: &Template) -> Self {
        let zeros = vec![0.0; template.parameter_count()];
        let mut next = 0;
        let ops = template
            .circuit(&zeros)
            .gates
            .into_iter()
            .map(|g| {
                if g.is_cnot() {
                    (g, None)
                } else {
                    next += 1;
                    (g, Some(next - 1))
                }
            })
            .collect();
        Objective { source: source.amplitudes(), target: target.amplitudes(), qubits: template.qubits, ops }
    }

    fn with_angle(gate: &Gate, angle: f64) -> Gate {
        match *gate {
            Gate::Rx { qubit, .. } => Gate::rx(qubit, angle),
            Gate::Ry { qubit, .. } => Gate::ry(qubit, angle),
            Gate::Rz { qubit, .. } => Gate::rz(qubit, angle),
            Gate::Phase { qubit, .. } => Gate::phase(qubit, angle),
            g => g,
        }
    }

    fn value(&self, x: &[f64]) -> f64 {
        let mut psi = self.source.to_vec();
        for (g, idx) in &self.ops {
            let gate = idx.map_or(*g, |i| Self::with_angle(g, x[i]));
            apply_gate_unchecked(&mut psi, self.qubits, &gate);
        }
        1.0 - inner(self.target, &psi).norm_sqr()
    }

    /// Infidelity and gradient. For a factor `exp(−iθσ)` the derivative of
    /// the overlap is `⟨λ|−iσ|ψ⟩` with `ψ` the state right after the factor
    /// and `λ` the target pulled back to the same point.
    fn value_and_gradient(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        let n = self.qubits;
        let mut psi = self.source.to_vec();
        let gates: Vec<Gate> = self
            .ops
            .iter()
            .map(|(g, idx)| idx.map_or(*g, |i| Self::with_angle(g, x[i])))
            .collect();
        for g in &gates {
            apply_gate_unchecked(&mut psi, n, g);
        }
        let amp = inner(self.target, &psi);
        let mut lam = self.target.to_vec();
        let mut scratch = vec![C64::new(0.0, 0.0); psi.len()];
        for ((_, idx), gate) in self.ops.iter().zip(&gates).rev() {
            if let Some(i) = idx {
                scratch.copy_from_slice(&psi);
                apply_generator(&mut scratch, n, gate);
                let d = inner(&lam, &scratch);
                grad[*i] = -2.0 * (amp.conj() * d).re;
            }
            let inv = gate.inverse();
            apply_gate_unchecked(&mut psi, n, &inv);
            apply_gate_unchecked(&mut lam, n, &inv);
        }
        1.0 - amp.norm_sqr()
    }
}

/// `ψ ← −iσ ψ` for the generator of a rotation gate.
fn apply_generator(psi: &mut [C64], n: usize, gate: &Gate) {
    let minus_i = C64::new(0.0, -1.0);
    let (q, kind) = match *gate {
        Gate::Rx { qubit, .. } => (qubit, 0),
        Gate::Ry { qubit, .. } => (qubit, 1),
        Gate::Rz { qubit, .. } => (qubit, 2),
        _ => unreachable!("only rotations are parametrized"),
    };
    let bit = 1usize << (n - q);
    for i in 0..psi.len() {
        if i & bit != 0 {
            continue;
        }
        let (a, b) = (psi[i], psi[i | bit]);
        let (na, nb) = match kind {
            0 => (b, a),
            1 => (C64::new(0.0, -1.0) * b, C64::new(0.0, 1.0) * a),
            _ => (a, -b),
        };
        psi[i] = minus_i * na;
        psi[i | bit] = minus_i * nb;
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// BFGS from `x`, returning the final infidelity.
fn bfgs(obj: &Objective, x: &mut [f64], config: &OptimizerConfig) -> f64 {
    let n = x.len();
    let mut g = vec![0.0; n];
    let mut f = obj.value_and_gradient(x, &mut g);
    if n == 0 {
        return f;
    }
    let mut h = identity(n);
    let mut stalled = 0;
    let mut x_new = vec![0.0; n];
    let mut g_new = vec![0.0; n];
    let mut dir = vec![0.0; n];
    for _ in 0..config.max_iterations {
        if f <= config.target || dot(&g, &g).sqrt() < 1e-10 {
            break;
        }
        for i in 0..n {
            dir[i] = -dot(&h[i * n..(i + 1) * n], &g);
        }
        let mut slope = dot(&dir, &g);
        if slope >= 0.0 {
            reset(&mut h, n);
            dir.iter_mut().zip(&g).for_each(|(d, gi)| *d = -gi);
            slope = -dot(&g, &g);
        }
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..40 {
            for i in 0..n {
                x_new[i] = x[i] + step * dir[i];
            }
            let f_try = obj.value(&x_new);
            if f_try <= f + 1e-4 * step * slope {
                accepted = Some(f_try);
                break;
            }
            step *= 0.5;
        }
        let Some(_) = accepted else {
            // line search failed: restart curvature once, then give up
            if is_identity(&h, n) {
                break;
            }
            reset(&mut h, n);
            continue;
        };
        let f_new = obj.value_and_gradient(&x_new, &mut g_new);
        let s: Vec<f64> = x_new.iter().zip(x.iter()).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-300 {
            update_inverse_hessian(&mut h, &s, &y, sy, n);
        }
        let improvement = f - f_new;
        x.copy_from_slice(&x_new);
        g.copy_from_slice(&g_new);
        f = f_new;
        if improvement < config.stall * f {
            stalled += 1;
            if stalled >= 3 {
                break;
            }
        } else {
            stalled = 0;
        }
    }
    f
}

fn identity(n: usize) -> Vec<f64> {
    let mut h = vec![0.0; n * n];
    reset(&mut h, n);
    h
}

fn reset(h: &mut [f64], n: usize) {
    h.iter_mut().for_each(|v| *v = 0.0);
    for i in 0..n {
        h[i * n + i] = 1.0;
    }
}

fn is_identity(h: &[f64], n: usize) -> bool {
    (0..n).all(|i| (0..n).all(|j| h[i * n + j] == if i == j { 1.0 } else { 0.0 }))
}

/// `H ← (I − ρsyᵀ) H (I − ρysᵀ) + ρssᵀ`
fn update_inverse_hessian(h: &mut [f64], s: &[f64], y: &[f64], sy: f64, n: usize) {
    let rho = 1.0 / sy;
    let hy: Vec<f64> = (0..n).map(|i| dot(&h[i * n..(i + 1) * n], y)).collect();
    let yhy = dot(y, &hy);
    for i in 0..n {
        for j in 0..n {
            h[i * n + j] += -rho * (hy[i] * s[j] + s[i] * hy[j]) + (rho * rho * yhy + rho) * s[i] * s[j];
        }
    }
}

/// Deterministic stream per (seed, pattern, restart).
fn restart_rng(seed: u64, pattern: &[(usize, usize)], restart: usize) -> ChaCha8Rng {
    let mut h = seed ^ 0x9e37_79b9_7f4a_7c15;
    for &(c, t) in pattern {
        h = splitmix(h ^ ((c as u64) << 8 | t as u64));
    }
    h = splitmix(h ^ restart as u64);
    ChaCha8Rng::seed_from_u64(h)
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Restarts run in fixed-size batches so that early exit does not depend
/// on thread scheduling.
const BATCH: usize = 8;

/// Minimizes `1 − |⟨target|U(θ)source⟩|²` over the template's angles.
pub fn fit_template(
    source: &PureState,
    target: &PureState,
    template: &Template,
    seed: u64,
    config: &OptimizerConfig,
) -> FitResult {
    let obj = Objective::new(source, target, template);
    let n = template.parameter_count();
    let run = |r: usize| {
        let mut rng = restart_rng(seed, &template.pattern, r);
        let mut x: Vec<f64> = (0..n).map(|_| rng.random_range(-PI..PI)).collect();
        let f = bfgs(&obj, &mut x, config);
        (f.max(0.0), x)
    };
    let mut trace = Vec::new();
    let mut best: Option<(f64, usize, Vec<f64>)> = None;
    let mut done = 0;
    while done < config.restarts {
        let end = (done + BATCH).min(config.restarts);
        let batch: Vec<(f64, Vec<f64>)> = (done..end).into_par_iter().map(run).collect();
        for (offset, (f, x)) in batch.into_iter().enumerate() {
            let r = done + offset;
            trace.push(f);
            if best.as_ref().is_none_or(|(bf, _, _)| f < *bf) {
                best = Some((f, r, x));
            }
        }
        done = end;
        if let (Some(limit), Some((bf, _, _))) = (config.early_exit, &best) {
            if *bf < limit {
                break;
            }
        }
    }
    let (infidelity, restart, parameters) = best.unwrap_or((1.0, 0, vec![0.0; n]));
    FitResult { infidelity, parameters, restart, restarts_used: done, trace }
}

/// Like [`fit_template`] but starting from a given point (one run).
pub fn refine_template(
    source: &PureState,
    target: &PureState,
    template: &Template,
    start: &[f64],
    config: &OptimizerConfig,
) -> FitResult {
    let obj = Objective::new(source, target, template);
    let mut x = start.to_vec();
    let f = bfgs(&obj, &mut x, config).max(0.0);
    FitResult { infidelity: f, parameters: x, restart: 0, restarts_used: 1, trace: vec![f] }
}
