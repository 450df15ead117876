use std::fmt;

use rand::Rng;

use super::error::QError;
use super::state::QuantumState;

/// What a measurement printed, kept in structured form so tests can
/// compare numbers rather than text.
#[derive(Clone, Debug, PartialEq)]
pub enum MeasurementReport {
    /// Born probability of every basis state and the observed outcome.
    Full { probabilities: Vec<f64>, outcome: usize },
    /// Marginal distribution of each register in `config`, in order, and
    /// the outcome the whole system collapsed to.
    Subsystems {
        config: Vec<usize>,
        marginals: Vec<Vec<f64>>,
        outcome: usize,
    },
}

impl MeasurementReport {
    pub fn outcome(&self) -> usize {
        match self {
            MeasurementReport::Full { outcome, .. } | MeasurementReport::Subsystems { outcome, .. } => {
                *outcome
            }
        }
    }
}

impl fmt::Display for MeasurementReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeasurementReport::Full {
                probabilities,
                outcome,
            } => {
                for (i, p) in probabilities.iter().enumerate() {
                    writeln!(f, "Probability of state {i} is {}", format_probability(*p))?;
                }
                writeln!(f, "System collapsed to state: {outcome}")
            }
            MeasurementReport::Subsystems {
                config, marginals, ..
            } => {
                for (s, (width, probs)) in config.iter().zip(marginals).enumerate() {
                    for (k, p) in probs.iter().enumerate() {
                        writeln!(
                            f,
                            "Probability of Subsystem{s} state {k:0width$b} is:  {}",
                            format_probability(*p)
                        )?;
                    }
                }
                Ok(())
            }
        }
    }
}

/// Short decimal form of a probability: `0.0`, `0.5`, `1.0`, otherwise up
/// to ten significant digits.
pub fn format_probability(p: f64) -> String {
    if p.abs() < 1e-10 {
        return "0.0".into();
    }
    let snapped = (p * 1e10).round() / 1e10;
    let value = if (snapped - p).abs() <= 1e-10 {
        snapped
    } else {
        let digits = 9 - p.abs().log10().floor() as i32;
        let scale = 10f64.powi(digits);
        (p * scale).round() / scale
    };
    format!("{value:?}")
}

/// Inverse-CDF sampling. Zero-probability outcomes are never chosen; ties
/// at a prefix-sum boundary go to the lower index.
pub fn sample<R: Rng + ?Sized>(probabilities: &[f64], rng: &mut R) -> usize {
    let total: f64 = probabilities.iter().sum();
    let u = rng.gen::<f64>() * total;
    let mut acc = 0.0;
    let mut last = 0;
    for (i, &p) in probabilities.iter().enumerate() {
        if p <= 0.0 {
            continue;
        }
        acc += p;
        last = i;
        if u < acc {
            return i;
        }
    }
    last
}

/// Computational-basis measurement. Reports the pre-collapse probabilities
/// and returns the collapsed basis state.
pub fn measure<R: Rng + ?Sized>(state: &QuantumState, rng: &mut R) -> (QuantumState, MeasurementReport) {
    let probabilities = state.probabilities();
    let outcome = sample(&probabilities, rng);
    let collapsed = QuantumState::basis(state.dim(), outcome).expect("outcome within dimension");
    (
        collapsed,
        MeasurementReport::Full {
            probabilities,
            outcome,
        },
    )
}

fn validate_config(state: &QuantumState, config: &[usize]) -> Result<(), QError> {
    if config.is_empty() {
        return Err(QError::ConfigError("no subsystems given".into()));
    }
    if config.contains(&0) {
        return Err(QError::ConfigError("subsystem widths must be at least 1".into()));
    }
    let sum: usize = config.iter().sum();
    if sum != state.qubits() as usize {
        return Err(QError::ConfigError(format!(
            "widths sum to {sum}, but the state has {} qubits",
            state.qubits()
        )));
    }
    Ok(())
}

/// Marginal distribution of each register. Register `i` is the `i`-th
/// group of bits counted from the most significant end of the basis label.
pub fn subsystem_marginals(state: &QuantumState, config: &[usize]) -> Result<Vec<Vec<f64>>, QError> {
    validate_config(state, config)?;
    let n = state.qubits() as usize;
    let probabilities = state.probabilities();
    let mut marginals: Vec<Vec<f64>> = config.iter().map(|&c| vec![0.0; 1 << c]).collect();
    let mut offset = 0;
    for (i, &width) in config.iter().enumerate() {
        let shift = n - offset - width;
        let mask = (1 << width) - 1;
        for (j, p) in probabilities.iter().enumerate() {
            marginals[i][(j >> shift) & mask] += p;
        }
        offset += width;
    }
    Ok(marginals)
}

/// Reports per-register marginals, then collapses the whole system as
/// [`measure`] does.
pub fn subsystems<R: Rng + ?Sized>(
    state: &QuantumState,
    config: &[usize],
    rng: &mut R,
) -> Result<(QuantumState, MeasurementReport), QError> {
    let marginals = subsystem_marginals(state, config)?;
    let (collapsed, full) = measure(state, rng);
    Ok((
        collapsed,
        MeasurementReport::Subsystems {
            config: config.to_vec(),
            marginals,
            outcome: full.outcome(),
        },
    ))
}
