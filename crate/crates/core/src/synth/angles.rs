//! Closed-form rotation angles: the one-CNOT GHZ family and the steps that
//! make qubit 1 maximally mixed.
//!
//! Angles given through `tan 2θ = N/D` are taken as `θ = ½ atan(N/D)`, with
//! the alternative `θ + π/2` tried when the resulting circuit misses its
//! post-condition. `N = D = 0` leaves the angle free and `θ = 0` is used;
//! `D = 0` with `N ≠ 0` is reported as degenerate.

use crate::canonical::{ghz_form_amplitudes, purity, w_form_state};
use crate::error::{Error, Result};
use crate::gate::{Circuit, Gate};
use crate::state::PureState;
use std::f64::consts::{FRAC_PI_2, SQRT_2};

/// Magnitude below which a numerator or denominator counts as zero.
const VANISHING: f64 = 1e-12;
/// Accepted deviation of the post-step purity from 1/2.
const PURITY_TOL: f64 = 1e-9;

fn half_atan(n: f64, d: f64, what: &'static str) -> Result<f64> {
    if d.abs() <= VANISHING {
        if n.abs() <= VANISHING {
            return Ok(0.0);
        }
        return Err(Error::DegenerateAngles(what));
    }
    Ok(0.5 * (n / d).atan())
}

/// `(θ₂, θ₃)` with `CNOT₂₃ R_y⁽²⁾(θ₂) R_y⁽³⁾(θ₃)|GHZ⟩` LU-equivalent to
/// `|000⟩/√2 + λ₂|101⟩ + λ₃|110⟩ + λ₄|111⟩`.
pub fn ghz_class1_angles(lambda2: f64, lambda3: f64) -> Result<(f64, f64)> {
    let (x2, x3) = (lambda2 * SQRT_2, lambda3 * SQRT_2);
    let slack = 1e-12;
    if !(x2.abs() <= 1.0 + slack && x3.abs() <= 1.0 + slack) {
        return Err(Error::Domain("λ₂√2 and λ₃√2 must lie in [-1, 1]"));
    }
    if lambda2 * lambda2 + lambda3 * lambda3 > 0.5 + slack {
        return Err(Error::Domain("λ₂² + λ₃² must not exceed 1/2"));
    }
    Ok((0.5 * x2.clamp(-1.0, 1.0).asin(), 0.5 * x3.clamp(-1.0, 1.0).acos()))
}

/// `CNOT₂₃ R_y⁽²⁾(θ₂) R_y⁽³⁾(θ₃)` as a gate list.
pub fn ghz_class1_circuit(theta2: f64, theta3: f64) -> Circuit {
    Circuit::from_gates(vec![Gate::ry(2, theta2), Gate::ry(3, theta3), Gate::cnot(2, 3)])
}

/// `CNOT₁₂ R_y⁽¹⁾(θ₁) R_y⁽²⁾(θ₂)` as a gate list.
pub fn w_half_circuit(theta1: f64, theta2: f64) -> Circuit {
    Circuit::from_gates(vec![Gate::ry(2, theta2), Gate::ry(1, theta1), Gate::cnot(1, 2)])
}

/// `CNOT₁₂ R_x⁽¹⁾(χ) R_y⁽¹⁾(θ₁) R_y⁽²⁾(θ₂)` as a gate list.
pub fn ghz_half_circuit(theta1: f64, theta2: f64, chi: f64) -> Circuit {
    Circuit::from_gates(vec![
        Gate::ry(2, theta2),
        Gate::ry(1, theta1),
        Gate::rx(1, chi),
        Gate::cnot(1, 2),
    ])
}

fn first_qubit_purity(state: &PureState, circuit: &Circuit) -> f64 {
    let out = state.apply_circuit(circuit).expect("valid three-qubit circuit");
    purity(&out.single_qubit_density(1))
}

/// `(θ₁, θ₂)` making qubit 1 maximally mixed after [`w_half_circuit`]
/// applied to `cos φ|000⟩ + sin φ|α⟩(cos φ'|10⟩ + sin φ'|01⟩)`.
pub fn w_to_half_i1_angles(phi: f64, xi: f64, phi_prime: f64) -> Result<(f64, f64)> {
    let state = w_form_state(phi, xi, phi_prime);
    let (sp, cp) = phi.sin_cos();
    let cot2 = (cp / sp).powi(2);
    if sp.abs() <= VANISHING {
        return Err(Error::DegenerateAngles("cot φ diverges"));
    }
    let base1 = half_atan(cot2 + (2.0 * xi).cos(), (2.0 * xi).sin(), "sin 2ξ vanishes")?;
    let mut failure = Error::DegenerateAngles("no branch reaches I₁ = 1/2");
    for t1 in [base1, base1 + FRAC_PI_2] {
        let n = (xi + 2.0 * t1).sin() * phi_prime.cos() * (2.0 * phi).sin();
        let d = (2.0 * xi + 2.0 * t1).sin() * (2.0 * phi_prime).cos() * sp * sp - cp * cp * (2.0 * t1).sin();
        let base2 = match half_atan(n, d, "θ₂ denominator vanishes") {
            Ok(t) => t,
            Err(e) => {
                failure = e;
                continue;
            }
        };
        for t2 in [base2, base2 + FRAC_PI_2] {
            if (first_qubit_purity(&state, &w_half_circuit(t1, t2)) - 0.5).abs() <= PURITY_TOL {
                return Ok((t1, t2));
            }
        }
    }
    Err(failure)
}

/// `(θ₁, θ₂, χ)` making qubit 1 maximally mixed after [`ghz_half_circuit`]
/// applied to `a|000⟩ + e^{iξ} b|αβγ⟩` with real factors at angles `φ_k`.
pub fn ghz_to_half_i1_angles(a: f64, b: f64, xi: f64, phis: [f64; 3]) -> Result<(f64, f64, f64)> {
    let state = PureState::from_unnormalized(3, ghz_form_amplitudes(a, b, xi, phis))
        .map_err(|_| Error::Domain("parameters give the zero vector"))?;
    let [f1, f2, f3] = phis;
    let (a2, b2) = (a * a, b * b);
    let (s1, c1) = f1.sin_cos();
    let (s2, c2) = f2.sin_cos();
    let (s3, c3) = f3.sin_cos();

    let n1 = (b2 - b2 * b2) * (2.0 * f1).cos()
        - a2 * (a2 - 1.0 - 2.0 * b2 * c1 * c1 * (2.0 * f2).cos()
            + 2.0 * b2 * b2 * c2 * c2 * (2.0 * f1).sin().powi(2) * s3 * s3);
    let d1 = b2
        * (2.0 * f1).sin()
        * (1.0 - a2 - b2 + 2.0 * a2 * c2 * c2 * (1.0 - a2 * s3 * s3 + b2 * (2.0 * f1).cos() * s3 * s3));
    let base1 = half_atan(n1, d1, "θ₁ denominator vanishes")?;

    let mut failure = Error::DegenerateAngles("no branch reaches I₁ = 1/2");
    for t1 in [base1, base1 + FRAC_PI_2] {
        let cross = 2.0 * a * b * xi.cos() * (f1 + 2.0 * t1).sin();
        let n2 = -(b2 * (2.0 * f1 + 2.0 * t1).sin() * (2.0 * f2).sin() + cross * s2 * c3);
        let d2 = a2 * (2.0 * t1).sin() + b2 * (2.0 * f1 + 2.0 * t1).sin() * (2.0 * f2).cos() + cross * c2 * c3;
        let n3 = -(2.0 * a * b * xi.sin() * s1 * s2 * c3 * (a2 * (2.0 * t1).sin() - b2 * (2.0 * f1 + 2.0 * t1).sin()));
        let d3 = 2.0 * a * s1 * s2 * (2.0 * a * b2 * c1 * c2 + b * (a2 + b2) * xi.cos() * c3);
        let angles = half_atan(n2, d2, "θ₂ denominator vanishes")
            .and_then(|t2| half_atan(n3, d3, "χ denominator vanishes").map(|ch| (t2, ch)));
        let (base2, base_chi) = match angles {
            Ok(v) => v,
            Err(e) => {
                failure = e;
                continue;
            }
        };
        for t2 in [base2, base2 + FRAC_PI_2] {
            for chi in [base_chi, base_chi + FRAC_PI_2] {
                let circ = ghz_half_circuit(t1, t2, chi);
                if (first_qubit_purity(&state, &circ) - 0.5).abs() <= PURITY_TOL {
                    return Ok((t1, t2, chi));
                }
            }
        }
    }
    Err(failure)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::purity_invariants;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, FRAC_PI_8};

    #[test]
    fn class1_angle_examples() {
        let (t2, t3) = ghz_class1_angles(0.0, FRAC_1_SQRT_2).unwrap();
        assert!(t2.abs() < 1e-15 && t3.abs() < 1e-7);
        let (t2, _) = ghz_class1_angles(0.5, 0.1).unwrap();
        assert!((t2 - FRAC_PI_8).abs() < 1e-15);
        assert!(matches!(ghz_class1_angles(0.8, 0.0), Err(Error::Domain(_))));
        assert!(matches!(ghz_class1_angles(0.6, 0.6), Err(Error::Domain(_))));
    }

    #[test]
    fn w_special_point_needs_no_rotation() {
        for pp in [0.1, FRAC_PI_4, 1.2] {
            let (t1, t2) = w_to_half_i1_angles(FRAC_PI_2, FRAC_PI_4, pp).unwrap();
            assert!(t1.abs() < 1e-12 && t2.abs() < 1e-12, "{pp}: {t1} {t2}");
        }
    }

    #[test]
    fn w_zero_xi_is_degenerate() {
        assert!(matches!(w_to_half_i1_angles(0.7, 0.0, 0.4), Err(Error::DegenerateAngles(_))));
    }

    #[test]
    fn ghz_zero_b_is_degenerate() {
        assert!(matches!(
            ghz_to_half_i1_angles(1.0, 0.0, 0.3, [0.4, 0.5, 0.6]),
            Err(Error::DegenerateAngles(_))
        ));
    }

    #[test]
    fn ghz_generic_reaches_half() {
        let (b, xi, phis): (f64, f64, [f64; 3]) = (0.5, 1.1, [0.3, 1.0, 0.7]);
        // a fixed by normalization
        let c = xi.cos() * phis.iter().map(|p: &f64| p.cos()).product::<f64>();
        let a = -b * c + (b * b * c * c - b * b + 1.0).sqrt();
        let (t1, t2, chi) = ghz_to_half_i1_angles(a, b, xi, phis).unwrap();
        let s = PureState::from_unnormalized(3, ghz_form_amplitudes(a, b, xi, phis)).unwrap();
        let out = s.apply_circuit(&ghz_half_circuit(t1, t2, chi)).unwrap();
        assert!((purity_invariants(&out).unwrap().get(1) - 0.5).abs() < 1e-9);
    }
}
