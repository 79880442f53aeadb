use super::{finish, Route, SynthOptions, SynthesisResult};
use crate::error::{Error, Result};
use crate::optimize::{fit_template, OptimizerConfig, Pattern, Template};
use crate::state::PureState;

/// Infidelity below which a template fit counts as exact.
pub const TEMPLATE_SUCCESS: f64 = 1e-10;

/// Fits local layers around a fixed CNOT pattern so that the circuit maps
/// `source` to `target`.
pub fn template_fit(
    source: &PureState,
    target: &PureState,
    pattern: &[(usize, usize)],
    opts: &SynthOptions,
) -> Result<SynthesisResult> {
    if source.qubits() != target.qubits() {
        return Err(Error::DimensionMismatch { expected: source.dim(), actual: target.dim() });
    }
    let template = Template::new(source.qubits(), Pattern::from(pattern));
    template.circuit(&vec![0.0; template.parameter_count()]).validate(source.qubits())?;
    let config = OptimizerConfig {
        restarts: opts.restarts,
        early_exit: Some(TEMPLATE_SUCCESS),
        ..Default::default()
    };
    let fit = fit_template(source, target, &template, opts.seed, &config);
    if !(fit.infidelity < TEMPLATE_SUCCESS) {
        return Err(Error::ConvergenceFailure { best_infidelity: fit.infidelity });
    }
    finish(source, target, template.circuit(&fit.parameters), Route::TemplateFit)
}
