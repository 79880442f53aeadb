//! Numerical CNOT-distance search: every CNOT placement of each length,
//! with optimized local layers between the CNOTs.
//!
//! Verdicts are evidence from a local optimizer, not proofs. A level is
//! declared unreachable only after every pattern failed with the escalated
//! restart count.

use crate::error::{Error, Result};
use crate::optimize::{fit_template, OptimizerConfig, Pattern, Template};
use crate::state::{haar_sample_with, PureState};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Ordered qubit pairs in the order patterns are enumerated.
pub const CNOT_PAIRS: [(usize, usize); 6] = [(1, 2), (1, 3), (2, 1), (2, 3), (3, 1), (3, 2)];
pub const DEFAULT_THRESHOLD: f64 = 1e-7;
pub const DEFAULT_RESTARTS: usize = 20;
/// Restart count every pattern of a level gets before the level is
/// reported unreachable.
pub const ESCALATED_RESTARTS: usize = 100;
pub const MAX_KMAX: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct PatternResult {
    pub pattern: Pattern,
    pub best_infidelity: f64,
    pub best_parameters: Vec<f64>,
    pub restarts_used: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub source: PureState,
    pub target: PureState,
    /// Patterns in search order; a level stops at its first success.
    pub per_pattern: Vec<PatternResult>,
    /// Smallest CNOT count reaching the threshold, if any up to `k_max`.
    pub verdict: Option<usize>,
    pub k_max: usize,
    pub threshold: f64,
    pub seed: u64,
}

impl OracleReport {
    /// Best infidelity found at each searched length.
    pub fn level_minima(&self) -> Vec<(usize, f64)> {
        let mut out: Vec<(usize, f64)> = Vec::new();
        for r in &self.per_pattern {
            let k = r.pattern.len();
            match out.iter_mut().find(|(l, _)| *l == k) {
                Some((_, best)) => *best = best.min(r.best_infidelity),
                None => out.push((k, r.best_infidelity)),
            }
        }
        out
    }
}

/// All `6^k` CNOT patterns of length `k`, in lexicographic pair order.
pub fn all_patterns(k: usize) -> Vec<Pattern> {
    let mut out: Vec<Pattern> = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|p| {
                CNOT_PAIRS.iter().map(move |&q| {
                    let mut next = p.clone();
                    next.push(q);
                    next
                })
            })
            .collect();
    }
    out
}

fn config(restarts: usize, threshold: f64) -> OptimizerConfig {
    OptimizerConfig { restarts, early_exit: Some(threshold), ..Default::default() }
}

fn run_pattern(
    source: &PureState,
    target: &PureState,
    pattern: &Pattern,
    seed: u64,
    restarts: usize,
    threshold: f64,
) -> PatternResult {
    let template = Template::new(source.qubits(), pattern.clone());
    let fit = fit_template(source, target, &template, seed, &config(restarts, threshold));
    PatternResult {
        pattern: pattern.clone(),
        best_infidelity: fit.infidelity,
        best_parameters: fit.parameters,
        restarts_used: fit.restarts_used,
    }
}

/// Best infidelity over the default number of restarts for one pattern.
pub fn optimize_pattern(source: &PureState, target: &PureState, pattern: &Pattern, seed: u64) -> (f64, Vec<f64>) {
    let fit = fit_template(
        source,
        target,
        &Template::new(source.qubits(), pattern.clone()),
        seed,
        &OptimizerConfig { restarts: DEFAULT_RESTARTS, ..Default::default() },
    );
    (fit.infidelity, fit.parameters)
}

/// Smallest CNOT count, up to `k_max`, for which some pattern reaches
/// `threshold` infidelity.
pub fn min_cnot_search(
    source: &PureState,
    target: &PureState,
    k_max: usize,
    threshold: f64,
    seed: u64,
) -> Result<OracleReport> {
    if source.qubits() != target.qubits() {
        return Err(Error::DimensionMismatch { expected: source.dim(), actual: target.dim() });
    }
    if k_max > MAX_KMAX {
        return Err(Error::Domain("k_max above 5"));
    }
    let mut per_pattern = Vec::new();
    let mut verdict = None;
    'levels: for k in 0..=k_max {
        let patterns: Vec<Pattern> = all_patterns(k)
            .into_iter()
            .filter(|p| p.iter().all(|&(c, t)| c.max(t) <= source.qubits()))
            .collect();
        for restarts in [DEFAULT_RESTARTS, ESCALATED_RESTARTS] {
            let mut level = Vec::new();
            for p in &patterns {
                let r = run_pattern(source, target, p, seed, restarts, threshold);
                let hit = r.best_infidelity < threshold;
                level.push(r);
                if hit {
                    per_pattern.extend(level);
                    verdict = Some(k);
                    break 'levels;
                }
            }
            if restarts == ESCALATED_RESTARTS {
                per_pattern.extend(level);
            }
        }
    }
    Ok(OracleReport {
        source: source.clone(),
        target: target.clone(),
        per_pattern,
        verdict,
        k_max,
        threshold,
        seed,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeEntry {
    pub source: PureState,
    pub target: PureState,
    pub verdict: Option<usize>,
    pub level_minima: Vec<(usize, f64)>,
}

/// Random-pair survey of the any-to-any distance. Numerical evidence only.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeReport {
    pub entries: Vec<ProbeEntry>,
    /// Indices of pairs where no pattern with four CNOTs reached the
    /// threshold.
    pub flagged: Vec<usize>,
    pub max_verdict: Option<usize>,
    pub seed: u64,
    pub certifying: bool,
}

pub const PROBE_KMAX: usize = 4;

/// Runs [`min_cnot_search`] with `k_max = 4` on `samples` Haar-random pairs.
pub fn probe_max_distance(samples: usize, seed: u64) -> Result<ProbeReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs: Vec<(PureState, PureState)> = (0..samples)
        .map(|_| Ok((haar_sample_with(3, &mut rng)?, haar_sample_with(3, &mut rng)?)))
        .collect::<Result<_>>()?;
    probe_pairs(&pairs, seed)
}

/// [`probe_max_distance`] on given pairs.
pub fn probe_pairs(pairs: &[(PureState, PureState)], seed: u64) -> Result<ProbeReport> {
    let mut entries = Vec::new();
    let mut flagged = Vec::new();
    for (i, (a, b)) in pairs.iter().enumerate() {
        let report = min_cnot_search(a, b, PROBE_KMAX, DEFAULT_THRESHOLD, seed.wrapping_add(i as u64))?;
        if report.verdict.is_none() {
            flagged.push(i);
        }
        entries.push(ProbeEntry {
            source: a.clone(),
            target: b.clone(),
            verdict: report.verdict,
            level_minima: report.level_minima(),
        });
    }
    let max_verdict = if flagged.is_empty() { entries.iter().filter_map(|e| e.verdict).max() } else { None };
    Ok(ProbeReport { entries, flagged, max_verdict, seed, certifying: false })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gate::Gate;

    #[test]
    fn pattern_counts() {
        assert_eq!(all_patterns(0), vec![Vec::<(usize, usize)>::new()]);
        assert_eq!(all_patterns(2).len(), 36);
        assert_eq!(all_patterns(2)[1], vec![(1, 2), (1, 3)]);
    }

    #[test]
    fn trivial_and_ghz() {
        let z = PureState::zero(3);
        let (f, _) = optimize_pattern(&z, &z, &vec![], 1);
        assert!(f < 1e-12);
        let (f, _) = optimize_pattern(&z, &PureState::ghz(), &vec![(1, 2), (1, 3)], 1);
        assert!(f < 1e-10);
        let r = min_cnot_search(&z, &PureState::ghz(), 3, DEFAULT_THRESHOLD, 3).unwrap();
        assert_eq!(r.verdict, Some(2));
        // both lower levels were exhausted at the escalated count
        assert!(r.per_pattern.iter().filter(|p| p.pattern.len() == 1).all(|p| p.restarts_used == ESCALATED_RESTARTS));
    }

    #[test]
    fn product_target_is_zero() {
        let t = PureState::zero(3).apply_gate(&Gate::ry(2, 0.7)).unwrap();
        let r = min_cnot_search(&PureState::zero(3), &t, 2, DEFAULT_THRESHOLD, 0).unwrap();
        assert_eq!(r.verdict, Some(0));
        assert_eq!(r.per_pattern.len(), 1);
    }

    #[test]
    fn w_gap_at_one_cnot() {
        let (f, _) = optimize_pattern(&PureState::zero(3), &PureState::w(), &vec![(1, 2)], 5);
        assert!(f > 1e-3);
    }

    #[test]
    fn rejects_large_kmax() {
        let z = PureState::zero(3);
        assert!(matches!(min_cnot_search(&z, &z, 6, 1e-7, 0), Err(Error::Domain(_))));
    }
}
