//! Two-product-term form `a|000⟩ + e^{iξ} b|αβγ⟩` of GHZ-type states.

use super::span::{as_matrix, factor_product};
use super::{product_states_in_span, require_three, tangle, LocalFrame, SpanProducts, TANGLE_THRESHOLD};
use crate::error::{Error, Result};
use crate::linalg::{align_to_zero, phase_matrix, real_qubit, wrap_angle, Mat2, Vec2, C64, ZERO};
use crate::state::PureState;
use nalgebra::Matrix2;

/// One term `coefficient · |f₁⟩|f₂⟩|f₃⟩` with unit-norm factors.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductTerm {
    pub coefficient: C64,
    pub factors: [Vec2; 3],
}

impl ProductTerm {
    fn amplitudes(&self) -> Vec<C64> {
        let [f1, f2, f3] = &self.factors;
        let mut out = vec![ZERO; 8];
        for (i, z) in out.iter_mut().enumerate() {
            *z = self.coefficient * f1[i >> 2] * f2[(i >> 1) & 1] * f3[i & 1];
        }
        out
    }
}

/// Splits a GHZ-type state into its two product terms. The decomposition
/// is unique up to term order; the term with the larger weight comes
/// first (ties go to the term with larger `|000⟩` amplitude).
pub fn two_term_decomposition(state: &PureState) -> Result<[ProductTerm; 2]> {
    require_three(state)?;
    if tangle(state)? <= TANGLE_THRESHOLD {
        return Err(Error::NotGhzType("tangle below threshold"));
    }
    let a = state.amplitudes();
    let s0 = [a[0], a[1], a[2], a[3]];
    let s1 = [a[4], a[5], a[6], a[7]];
    let products = match product_states_in_span(&s0, &s1) {
        Ok(SpanProducts::Finite(list)) if list.len() == 2 => list,
        Ok(_) | Err(Error::DependentInputs) => {
            return Err(Error::NotGhzType("range of ρ₂₃ does not hold two product states"))
        }
        Err(e) => return Err(e),
    };
    let v = [products[0].vector, products[1].vector];

    // s_i = c1_i v1 + c2_i v2, solved through the Gram system
    let dot = |x: &[C64; 4], y: &[C64; 4]| x.iter().zip(y).map(|(p, q)| p.conj() * q).sum::<C64>();
    let gram = Matrix2::new(dot(&v[0], &v[0]), dot(&v[0], &v[1]), dot(&v[1], &v[0]), dot(&v[1], &v[1]));
    let gram_inv = gram
        .try_inverse()
        .ok_or(Error::NotGhzType("product states in range are dependent"))?;
    let mut coeffs = [[ZERO; 2]; 2]; // coeffs[term][qubit-1 index]
    for (i, s) in [s0, s1].iter().enumerate() {
        let rhs = Vec2::new(dot(&v[0], s), dot(&v[1], s));
        let sol = gram_inv * rhs;
        coeffs[0][i] = sol[0];
        coeffs[1][i] = sol[1];
    }

    let mut terms: Vec<ProductTerm> = (0..2)
        .map(|t| {
            let alpha = Vec2::new(coeffs[t][0], coeffs[t][1]);
            let weight = alpha.norm();
            let (scale, beta, gamma) = factor_product(&as_matrix(&v[t]));
            ProductTerm {
                coefficient: scale * weight,
                factors: [alpha / C64::new(weight, 0.0), beta, gamma],
            }
        })
        .collect();
    let overlap = |t: &ProductTerm| t.amplitudes()[0].norm();
    let (w0, w1) = (terms[0].coefficient.norm(), terms[1].coefficient.norm());
    let swap = if (w0 - w1).abs() <= 1e-12 { overlap(&terms[1]) > overlap(&terms[0]) } else { w1 > w0 };
    if swap {
        terms.swap(0, 1);
    }
    let second = terms.pop().expect("two terms");
    let first = terms.pop().expect("two terms");
    Ok([first, second])
}

/// `a|000⟩ + e^{iξ} b|αβγ⟩` with real `|α⟩, |β⟩, |γ⟩ = cos φ_k|0⟩ + sin φ_k|1⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct GhzForm {
    pub a: f64,
    pub b: f64,
    pub xi: f64,
    /// `φ₁, φ₂, φ₃ ∈ [0, π/2]`
    pub phis: [f64; 3],
    pub frame: LocalFrame,
}

impl GhzForm {
    pub fn canonical_state(&self) -> PureState {
        ghz_form_state(self.a, self.b, self.xi, self.phis)
    }

    pub fn reconstruct(&self) -> PureState {
        self.frame.apply(&self.canonical_state())
    }

    /// `a² + b² + 2ab cos ξ cos φ₁ cos φ₂ cos φ₃ − 1`
    pub fn normalization_residual(&self) -> f64 {
        let [p1, p2, p3] = self.phis;
        self.a * self.a + self.b * self.b
            + 2.0 * self.a * self.b * self.xi.cos() * p1.cos() * p2.cos() * p3.cos()
            - 1.0
    }
}

/// The (unnormalized) state `a|000⟩ + e^{iξ} b|αβγ⟩`.
pub fn ghz_form_amplitudes(a: f64, b: f64, xi: f64, phis: [f64; 3]) -> Vec<C64> {
    let term = ProductTerm {
        coefficient: C64::from_polar(b, xi),
        factors: phis.map(real_qubit),
    };
    let mut amps = term.amplitudes();
    amps[0] += C64::new(a, 0.0);
    amps
}

pub(crate) fn ghz_form_state(a: f64, b: f64, xi: f64, phis: [f64; 3]) -> PureState {
    PureState::from_unnormalized(3, ghz_form_amplitudes(a, b, xi, phis))
        .expect("GHZ-form state is nonzero")
}

pub fn ghz_form(state: &PureState) -> Result<GhzForm> {
    let [first, second] = two_term_decomposition(state)?;
    let mut forward: Vec<Mat2> = Vec::with_capacity(3);
    let mut phis = [0.0; 3];
    let mut eta_sum = 0.0;
    for k in 0..3 {
        let w = align_to_zero(&first.factors[k]);
        let z = w * second.factors[k];
        let (fix, eta) = if z[0].norm() > 1e-12 {
            (phase_matrix(z[0].arg() - z[1].arg()), z[0].arg())
        } else {
            (phase_matrix(-z[1].arg()), 0.0)
        };
        forward.push(fix * w);
        phis[k] = z[1].norm().atan2(z[0].norm());
        eta_sum += eta;
    }
    // the first term's factors map to |0⟩ exactly, so its phase is global
    let first_phase = first.coefficient.arg()
        + first
            .factors
            .iter()
            .zip(&forward)
            .map(|(f, w)| (w * f)[0].arg())
            .sum::<f64>();
    let second_phase = second.coefficient.arg() + eta_sum;
    let a = first.coefficient.norm();
    let b = second.coefficient.norm();
    let xi = wrap_angle(second_phase - first_phase);
    let canonical = ghz_form_state(a, b, xi, phis);
    let frame = LocalFrame::from_forward(&forward, &canonical, state);
    Ok(GhzForm { a, b, xi, phis, frame })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::haar_sample;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

    #[test]
    fn ghz_reads_off() {
        let f = ghz_form(&PureState::ghz()).unwrap();
        assert!((f.a - FRAC_1_SQRT_2).abs() < 1e-12 && (f.b - FRAC_1_SQRT_2).abs() < 1e-12);
        assert!(f.xi.abs() < 1e-12);
        assert!(f.phis.iter().all(|p| (p - FRAC_PI_2).abs() < 1e-12));
    }

    #[test]
    fn w_rejected() {
        assert!(matches!(ghz_form(&PureState::w()), Err(Error::NotGhzType(_))));
        assert!(matches!(ghz_form(&PureState::zero(3)), Err(Error::NotGhzType(_))));
    }

    #[test]
    fn random_round_trip() {
        for seed in 0..300 {
            let s = haar_sample(3, seed).unwrap();
            let f = ghz_form(&s).unwrap();
            assert!(f.normalization_residual().abs() < 1e-10, "seed {seed}");
            assert!(f.reconstruct().fidelity(&s).unwrap() >= 1.0 - 1e-10, "seed {seed}");
            assert!(f.a >= f.b - 1e-12);
        }
    }

    #[test]
    fn terms_sum_to_state() {
        let s = haar_sample(3, 99).unwrap();
        let [t1, t2] = two_term_decomposition(&s).unwrap();
        let sum: Vec<C64> = t1.amplitudes().iter().zip(t2.amplitudes()).map(|(x, y)| x + y).collect();
        for (x, y) in sum.iter().zip(s.amplitudes()) {
            assert!((x - y).norm() < 1e-10);
        }
    }
}
