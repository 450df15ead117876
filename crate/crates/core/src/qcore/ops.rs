use std::f64::consts::PI;

use num_complex::Complex64;

use super::error::QError;
use super::matrix::Matrix;
use super::state::log2_exact;

/// Either side of `·` and `⊗`: vectors and matrices share one set of
/// primitives at the language level.
#[derive(Clone, Debug, PartialEq)]
pub enum Operand {
    Vector(Vec<Complex64>),
    Matrix(Matrix),
}

/// `U · v`, matrix-vector multiplication.
pub fn apply(u: &Matrix, v: &[Complex64]) -> Result<Vec<Complex64>, QError> {
    u.mul_vec(v)
}

/// `U · x` where `x` is a vector (application) or a matrix (composition).
pub fn apply_operand(u: &Matrix, x: &Operand) -> Result<Operand, QError> {
    match x {
        Operand::Vector(v) => apply(u, v).map(Operand::Vector),
        Operand::Matrix(m) => u.mul(m).map(Operand::Matrix),
    }
}

/// Kronecker product of two vectors: index `i·|b| + j` holds `aᵢ·bⱼ`.
pub fn tensor(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
}

pub fn tensor_operands(a: &Operand, b: &Operand) -> Result<Operand, QError> {
    match (a, b) {
        (Operand::Vector(a), Operand::Vector(b)) => Ok(Operand::Vector(tensor(a, b))),
        (Operand::Matrix(a), Operand::Matrix(b)) => Ok(Operand::Matrix(a.kron(b))),
        _ => Err(QError::ShapeError(
            "tensor of a vector and a matrix".into(),
        )),
    }
}

/// `A ⊗ B` for square operators.
pub fn tensor_op(a: &Matrix, b: &Matrix) -> Result<Matrix, QError> {
    for m in [a, b] {
        if !m.is_square() {
            return Err(QError::ShapeError(format!(
                "tensorOp needs square operators, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
    }
    Ok(a.kron(b))
}

/// Applies `u` to `v` `times` times.
pub fn apply_n(u: &Matrix, v: &[Complex64], times: i64) -> Result<Vec<Complex64>, QError> {
    if times < 0 {
        return Err(QError::NegativeCount(times));
    }
    let mut v = v.to_vec();
    for _ in 0..times {
        v = apply(u, &v)?;
    }
    Ok(v)
}

/// Matrix generator: column `i` is `f(eᵢ)` for the standard basis
/// `e₀ … e_{dim−1}`. `f` receives the basis index alongside the vector.
pub fn generate_matrix<E: From<QError>>(
    dim: usize,
    mut f: impl FnMut(usize, Vec<Complex64>) -> Result<Vec<Complex64>, E>,
) -> Result<Matrix, E> {
    if dim == 0 {
        return Err(QError::ShapeError("generateMatrix needs a dimension of at least 1".into()).into());
    }
    let mut columns = Vec::with_capacity(dim);
    for i in 0..dim {
        let mut e = vec![Complex64::new(0.0, 0.0); dim];
        e[i] = Complex64::new(1.0, 0.0);
        columns.push(f(i, e)?);
    }
    Ok(Matrix::from_columns(&columns)?)
}

/// Reads the classical function encoded by `m`: column `x` must be the
/// basis vector `|f(x)⟩`.
pub fn decode_function(m: &Matrix) -> Result<Vec<usize>, QError> {
    for d in [m.rows(), m.cols()] {
        if log2_exact(d).is_none() {
            return Err(QError::NonPowerOfTwo(d));
        }
    }
    (0..m.cols())
        .map(|x| {
            let col = m.column(x);
            let mut hot = None;
            for (r, v) in col.iter().enumerate() {
                let is_one = (v.re - 1.0).abs() < 1e-12 && v.im.abs() < 1e-12;
                let is_zero = v.norm() < 1e-12;
                match (is_one, is_zero, hot) {
                    (true, _, None) => hot = Some(r),
                    (false, true, _) => {}
                    _ => return Err(QError::NotBasisColumns { column: x }),
                }
            }
            hot.ok_or(QError::NotBasisColumns { column: x })
        })
        .collect()
}

/// `perm[col] = row` for the oracle `|x, y⟩ ↦ |x, y ⊕ f(x)⟩`, where `|x, y⟩`
/// has index `x·2^m + y`.
pub fn oracle_permutation(m: &Matrix) -> Result<Vec<usize>, QError> {
    let f = decode_function(m)?;
    let ys = m.rows();
    let mut perm = Vec::with_capacity(f.len() * ys);
    for (x, fx) in f.iter().enumerate() {
        for y in 0..ys {
            perm.push(x * ys + (y ^ fx));
        }
    }
    Ok(perm)
}

/// Dense 0/1 form of [`oracle_permutation`].
pub fn oracle(m: &Matrix) -> Result<Matrix, QError> {
    let perm = oracle_permutation(m)?;
    let mut u = Matrix::zeros(perm.len(), perm.len());
    for (col, &row) in perm.iter().enumerate() {
        u.set(row, col, Complex64::new(1.0, 0.0));
    }
    Ok(u)
}

/// `|u⟩⟨v|`: entry `(i, j)` is `uᵢ · conj(vⱼ)`.
pub fn outer(u: &[Complex64], v: &[Complex64]) -> Result<Matrix, QError> {
    if u.len() != v.len() {
        return Err(QError::ShapeError(format!(
            "outer product of vectors of lengths {} and {}",
            u.len(),
            v.len()
        )));
    }
    if u.is_empty() {
        return Err(QError::ShapeError("outer product of empty vectors".into()));
    }
    Ok(Matrix::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj()))
}

/// Discrete Fourier transform: entry `(k, j)` is `e^{2πi·jk/N} / √N`.
pub fn qft_matrix(n: usize) -> Matrix {
    let scale = 1.0 / (n as f64).sqrt();
    Matrix::from_fn(n, n, |k, j| {
        // Reduce jk mod N first to keep the angle small.
        let angle = 2.0 * PI * ((j * k) % n) as f64 / n as f64;
        Complex64::from_polar(scale, angle)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn hadamard() -> Matrix {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Matrix::from_rows(vec![vec![c(h), c(h)], vec![c(h), c(-h)]]).unwrap()
    }

    fn close(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).norm() <= tol)
    }

    #[test]
    fn apply_examples() {
        assert_eq!(apply(&Matrix::identity(2), &[c(1.0), c(0.0)]).unwrap(), vec![c(1.0), c(0.0)]);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!(close(
            &apply(&hadamard(), &[c(1.0), c(0.0)]).unwrap(),
            &[c(h), c(h)],
            1e-15
        ));
        assert!(matches!(
            apply(&Matrix::identity(4), &[c(1.0), c(0.0)]),
            Err(QError::DimMismatch { .. })
        ));
    }

    #[test]
    fn tensor_examples() {
        assert_eq!(
            tensor(&[c(1.0), c(0.0)], &[c(0.0), c(1.0)]),
            vec![c(0.0), c(1.0), c(0.0), c(0.0)]
        );
        assert_eq!(tensor(&[c(1.0)], &[c(0.3), c(0.7)]), vec![c(0.3), c(0.7)]);
        let mixed = tensor_operands(
            &Operand::Vector(vec![c(1.0)]),
            &Operand::Matrix(Matrix::identity(2)),
        );
        assert!(matches!(mixed, Err(QError::ShapeError(_))));
    }

    #[test]
    fn tensor_op_acts_factorwise() {
        let hi = tensor_op(&hadamard(), &Matrix::identity(2)).unwrap();
        let lhs = apply(&hi, &tensor(&[c(1.0), c(0.0)], &[c(0.0), c(1.0)])).unwrap();
        let rhs = tensor(&apply(&hadamard(), &[c(1.0), c(0.0)]).unwrap(), &[c(0.0), c(1.0)]);
        assert!(close(&lhs, &rhs, 1e-15));
        assert_eq!(
            tensor_op(&Matrix::identity(2), &Matrix::identity(2)).unwrap(),
            Matrix::identity(4)
        );
        assert!(tensor_op(&Matrix::zeros(2, 4), &Matrix::identity(2)).is_err());
    }

    #[test]
    fn apply_n_examples() {
        let zero = [c(1.0), c(0.0)];
        assert!(close(&apply_n(&hadamard(), &zero, 2).unwrap(), &zero, 1e-15));
        assert_eq!(apply_n(&hadamard(), &zero, 0).unwrap(), zero.to_vec());
        assert_eq!(
            apply_n(&hadamard(), &zero, 1).unwrap(),
            apply(&hadamard(), &zero).unwrap()
        );
        assert_eq!(apply_n(&hadamard(), &zero, -1), Err(QError::NegativeCount(-1)));
    }

    #[test]
    fn generator_columns() {
        let m: Result<Matrix, QError> = generate_matrix(16, |_, v| Ok(v));
        assert_eq!(m.unwrap(), Matrix::identity(16));
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let m: Matrix = generate_matrix::<QError>(2, |_, v| Ok(vec![(v[0] + v[1]) * h, (v[0] - v[1]) * h])).unwrap();
        assert!(m.max_abs_diff(&hadamard()).unwrap() < 1e-15);
        let ragged: Result<Matrix, QError> =
            generate_matrix(2, |i, v| Ok(if i == 0 { v } else { vec![c(1.0)] }));
        assert!(matches!(ragged, Err(QError::ShapeError(_))));
    }

    #[test]
    fn indicator_generator_is_rectangular() {
        let m: Matrix = generate_matrix::<QError>(4, |i, _| {
            Ok(if i == 2 { vec![c(0.0), c(1.0)] } else { vec![c(1.0), c(0.0)] })
        })
        .unwrap();
        assert_eq!((m.rows(), m.cols()), (2, 4));
        assert_eq!(m.column(2), vec![c(0.0), c(1.0)]);
        assert_eq!(decode_function(&m).unwrap(), vec![0, 0, 1, 0]);
    }

    #[test]
    fn oracle_of_constant_zero_is_identity() {
        let m = Matrix::from_rows(vec![vec![c(1.0), c(1.0)], vec![c(0.0), c(0.0)]]).unwrap();
        assert_eq!(oracle(&m).unwrap(), Matrix::identity(4));
    }

    #[test]
    fn oracle_rejects_non_basis_columns() {
        let m = Matrix::from_rows(vec![vec![c(1.0), c(0.5)], vec![c(0.0), c(0.5)]]).unwrap();
        assert_eq!(oracle(&m), Err(QError::NotBasisColumns { column: 1 }));
        let m = Matrix::zeros(3, 2);
        assert_eq!(oracle(&m), Err(QError::NonPowerOfTwo(3)));
    }

    #[test]
    fn outer_examples() {
        let m = outer(&[c(1.0), c(0.0)], &[c(1.0), c(0.0)]).unwrap();
        assert_eq!(m.to_rows(), vec![vec![c(1.0), c(0.0)], vec![c(0.0), c(0.0)]]);
        let psi = vec![c(0.5); 4];
        let twice = outer(&psi, &psi).unwrap().scale(c(2.0));
        for i in 0..4 {
            for j in 0..4 {
                let delta = if i == j { 1.0 } else { 0.0 };
                let expected = if i == j { -0.5 } else { 0.5 };
                assert!((twice.get(i, j) - c(delta) - c(expected)).norm() < 1e-15);
            }
        }
        let v = [Complex64::new(0.0, 1.0), c(1.0)];
        assert_eq!(outer(&v, &v).unwrap().get(0, 1), Complex64::new(0.0, 1.0));
        assert!(outer(&[c(1.0)], &[c(1.0), c(0.0)]).is_err());
    }

    #[test]
    fn qft_matrix_values() {
        assert_eq!(qft_matrix(1), Matrix::identity(1));
        assert!(qft_matrix(2).max_abs_diff(&hadamard()).unwrap() < 1e-12);
        let col = apply(&qft_matrix(4), &[c(0.0), c(1.0), c(0.0), c(0.0)]).unwrap();
        let expected = [c(0.5), Complex64::new(0.0, 0.5), c(-0.5), Complex64::new(0.0, -0.5)];
        assert!(close(&col, &expected, 1e-15));
        for n in [3, 8, 16] {
            assert!(qft_matrix(n).is_unitary(1e-9));
        }
    }
}
