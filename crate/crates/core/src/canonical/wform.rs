//! Form `cos φ|000⟩ + sin φ|α⟩(cos φ'|10⟩ + sin φ'|01⟩)` of W-type states,
//! with `|α⟩ = cos ξ|0⟩ + sin ξ|1⟩`.

use super::span::{as_matrix, factor_product};
use super::{pencil_roots, purity_invariants, tangle, LocalFrame, PencilRoots};
use super::{DEFAULT_TOLERANCE, TANGLE_THRESHOLD};
use crate::error::{Error, Result};
use crate::linalg::{align_to_zero, inner, phase_matrix, rz_matrix, ry_matrix, zyz_angles, Mat2, Vec2, C64, ZERO};
use crate::optimize::{refine_template, OptimizerConfig, Template};
use crate::state::PureState;

/// Reconstruction infidelity above which the frame is refined numerically.
const REFINE_ABOVE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct WForm {
    pub phi: f64,
    pub xi: f64,
    pub phi_prime: f64,
    pub frame: LocalFrame,
}

impl WForm {
    pub fn canonical_state(&self) -> PureState {
        w_form_state(self.phi, self.xi, self.phi_prime)
    }

    pub fn reconstruct(&self) -> PureState {
        self.frame.apply(&self.canonical_state())
    }
}

pub fn w_form_state(phi: f64, xi: f64, phi_prime: f64) -> PureState {
    let mut amps = vec![ZERO; 8];
    let (sp, cp) = phi.sin_cos();
    let (sx, cx) = xi.sin_cos();
    let (spp, cpp) = phi_prime.sin_cos();
    amps[0b000] = C64::new(cp, 0.0);
    for (q1, w1) in [(0usize, cx), (1, sx)] {
        amps[q1 << 2 | 0b10] += C64::new(sp * w1 * cpp, 0.0);
        amps[q1 << 2 | 0b01] += C64::new(sp * w1 * spp, 0.0);
    }
    PureState::from_unnormalized(3, amps).expect("nonzero W-form state")
}

fn gram_schmidt(e1: &[C64; 4], v: &[C64; 4]) -> [C64; 4] {
    let p = inner(e1, v);
    let mut out = [ZERO; 4];
    for i in 0..4 {
        out[i] = v[i] - p * e1[i];
    }
    let n = out.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    out.map(|z| z / n)
}

pub fn w_form(state: &PureState) -> Result<WForm> {
    if tangle(state)? >= TANGLE_THRESHOLD {
        return Err(Error::NotWType("tangle above threshold"));
    }
    let inv = purity_invariants(state)?;
    if inv.0.iter().any(|&i| i >= 1.0 - DEFAULT_TOLERANCE) {
        return Err(Error::NotWType("a qubit is separable"));
    }
    let [t0, t1] = state.slices();
    let (x, y) = match pencil_roots(&t0, &t1, f64::INFINITY) {
        PencilRoots::Double(r) => r,
        PencilRoots::Two([r, _]) => r,
        PencilRoots::All => return Err(Error::NotWType("range of ρ₂₃ is all product")),
    };
    let flat = |m: &Mat2| [m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]];
    let (s0, s1) = (flat(&t0), flat(&t1));
    let mut e1 = [ZERO; 4];
    for i in 0..4 {
        e1[i] = x * s0[i] + y * s1[i];
    }
    let n1 = e1.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    e1.iter_mut().for_each(|z| *z /= n1);
    let (_, beta, gamma) = factor_product(&as_matrix(&e1));
    // the complement inside the range; pick the slice with more weight off e1
    let r0 = gram_schmidt(&e1, &s0);
    let r1 = gram_schmidt(&e1, &s1);
    let off = |s: &[C64; 4]| {
        let p = inner(&e1, s);
        s.iter().map(|z| z.norm_sqr()).sum::<f64>() - p.norm_sqr()
    };
    let e2 = if off(&s0) >= off(&s1) { r0 } else { r1 };

    // ψ = |a⟩|e1⟩ + |a'⟩|e2⟩
    let a = Vec2::new(inner(&e1, &s0), inner(&e1, &s1));
    let a2 = Vec2::new(inner(&e2, &s0), inner(&e2, &s1));

    let w2 = align_to_zero(&beta);
    let w3 = align_to_zero(&gamma);
    // χ' = (W2 ⊗ W3) e2 with |00⟩ and |11⟩ components zero
    let chi = w2 * as_matrix(&e2) * w3.transpose();
    let (c10, c01) = (chi[(1, 0)], chi[(0, 1)]);
    let w1 = align_to_zero(&a);
    let pq = w1 * a2;
    let (p, q) = (pq[0], pq[1]);
    let (p1, p2, p3) = if p.norm() > 1e-12 {
        (p.arg() - q.arg(), -(p * c10).arg(), -(p * c01).arg())
    } else {
        (0.0, -(q * c10).arg(), -(q * c01).arg())
    };
    let phi = (p.norm_sqr() + q.norm_sqr()).sqrt().atan2(a.norm());
    let xi = q.norm().atan2(p.norm());
    let phi_prime = c01.norm().atan2(c10.norm());

    let forward = [phase_matrix(p1) * w1, phase_matrix(p2) * w2, phase_matrix(p3) * w3];
    let canonical = w_form_state(phi, xi, phi_prime);
    let mut frame = LocalFrame::from_forward(&forward, &canonical, state);
    if 1.0 - frame.apply(&canonical).fidelity(state)? > REFINE_ABOVE {
        frame = refine_frame(&canonical, state, &frame)?;
    }
    Ok(WForm { phi, xi, phi_prime, frame })
}

/// Nine-angle local fit from the canonical state to the input, started at
/// the closed-form frame.
fn refine_frame(canonical: &PureState, state: &PureState, start: &LocalFrame) -> Result<LocalFrame> {
    let template = Template::new(3, vec![]);
    let x0: Vec<f64> = start
        .unitaries
        .iter()
        .flat_map(|u| {
            let (alpha, beta, gamma) = zyz_angles(u);
            // template layers apply Rz(x₀) Ry(x₁) Rz(x₂) in time order
            [gamma, beta, alpha]
        })
        .collect();
    let cfg = OptimizerConfig { target: 1e-16, ..Default::default() };
    let fit = refine_template(canonical, state, &template, &x0, &cfg);
    let unitaries: Vec<Mat2> = fit
        .parameters
        .chunks(3)
        .map(|p| rz_matrix(p[2]) * ry_matrix(p[1]) * rz_matrix(p[0]))
        .collect();
    let mut frame = LocalFrame { unitaries, global_phase: 0.0 };
    let rebuilt = frame.apply(canonical);
    frame.global_phase = rebuilt.inner(state)?.arg();
    Ok(frame)
}
