use num_complex::Complex64;

use super::error::QError;

/// Tolerance on ‖v‖ accepted when a vector is taken as a quantum state.
pub const NORM_TOLERANCE: f64 = 1e-6;

/// Normalised amplitude vector over `qubits` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumState {
    amplitudes: Vec<Complex64>,
    qubits: u32,
}

pub fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt()
}

/// `log2(n)` if `n` is a power of two.
pub fn log2_exact(n: usize) -> Option<u32> {
    n.is_power_of_two().then(|| n.trailing_zeros())
}

impl QuantumState {
    /// Validates length and norm, then rescales to unit norm so that
    /// tolerated rounding does not accumulate.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self, QError> {
        let len = amplitudes.len();
        let qubits = match log2_exact(len) {
            Some(q) if q >= 1 => q,
            _ => return Err(QError::NonPowerOfTwo(len)),
        };
        let n = norm(&amplitudes);
        if (n - 1.0).abs() > NORM_TOLERANCE {
            return Err(QError::NormalizationError(n));
        }
        let amplitudes = amplitudes.into_iter().map(|a| a / n).collect();
        Ok(QuantumState { amplitudes, qubits })
    }

    /// Computational basis vector `|index⟩` of dimension `dim`.
    pub fn basis(dim: usize, index: usize) -> Result<Self, QError> {
        if index >= dim {
            return Err(QError::DimMismatch {
                expected: dim,
                found: index,
            });
        }
        let mut v = vec![Complex64::new(0.0, 0.0); dim];
        v[index] = Complex64::new(1.0, 0.0);
        QuantumState::new(v)
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn qubits(&self) -> u32 {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    /// Born probabilities `|aᵢ|²`.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(Complex64::norm_sqr).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn validation() {
        assert!(QuantumState::new(vec![c(1.0), c(0.0)]).is_ok());
        assert_eq!(
            QuantumState::new(vec![c(1.0), c(0.0), c(0.0)]),
            Err(QError::NonPowerOfTwo(3))
        );
        assert_eq!(QuantumState::new(vec![c(1.0)]), Err(QError::NonPowerOfTwo(1)));
        assert!(matches!(
            QuantumState::new(vec![c(1.0), c(1.0)]),
            Err(QError::NormalizationError(_))
        ));
    }

    #[test]
    fn renormalises_within_tolerance() {
        let s = QuantumState::new(vec![c(0.6), c(0.8 + 1e-8)]).unwrap();
        assert!((norm(s.amplitudes()) - 1.0).abs() < 1e-15);
        assert_eq!(s.qubits(), 1);
    }

    #[test]
    fn basis_states() {
        let s = QuantumState::basis(4, 2).unwrap();
        assert_eq!(s.probabilities(), vec![0.0, 0.0, 1.0, 0.0]);
        assert!(QuantumState::basis(4, 4).is_err());
    }
}
