//! Dense complex operators with their defining invariants checked on entry.

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

/// Largest tolerated `|H[j][k] - conj(H[k][j])|` for a matrix to count as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Largest entrywise `|A[j][k] - conj(A[k][j])|`.
pub fn hermitian_deviation(m: &DMatrix<C64>) -> f64 {
    let mut worst = 0.0_f64;
    for j in 0..m.nrows() {
        for k in j..m.ncols() {
            worst = worst.max((m[(j, k)] - m[(k, j)].conj()).norm());
        }
    }
    worst
}

/// Largest entrywise deviation of `U^dagger U` from the identity.
pub fn unitarity_deviation(m: &DMatrix<C64>) -> f64 {
    let gram = m.adjoint() * m;
    let mut worst = 0.0_f64;
    for j in 0..gram.nrows() {
        for k in 0..gram.ncols() {
            let target = if j == k { 1.0 } else { 0.0 };
            worst = worst.max((gram[(j, k)] - C64::new(target, 0.0)).norm());
        }
    }
    worst
}

/// Square Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    matrix: DMatrix<C64>,
}

impl HermitianOperator {
    pub fn new(matrix: DMatrix<C64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::invalid("matrix", "must be square"));
        }
        if matrix
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::invalid("matrix", "entries must be finite"));
        }
        let deviation = hermitian_deviation(&matrix);
        if deviation > HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self { matrix })
    }

    /// Builds from the upper triangle; the lower triangle is filled in by conjugation
    /// so the result is exactly Hermitian.
    pub(crate) fn from_upper(mut matrix: DMatrix<C64>) -> Self {
        let dim = matrix.nrows();
        for j in 0..dim {
            matrix[(j, j)].im = 0.0;
            for k in (j + 1)..dim {
                matrix[(k, j)] = matrix[(j, k)].conj();
            }
        }
        Self { matrix }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.matrix[(row, col)]
    }
}

/// Square unitary matrix, typically the output of a time evolution.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryOperator {
    matrix: DMatrix<C64>,
}

impl UnitaryOperator {
    /// Checks `U^dagger U = I` to `tol`.
    pub fn new(matrix: DMatrix<C64>, tol: f64) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::invalid("matrix", "must be square"));
        }
        let deviation = unitarity_deviation(&matrix);
        if deviation.is_nan() || deviation > tol {
            return Err(Error::invalid(
                "matrix",
                format!("not unitary (deviation {deviation:e} > {tol:e})"),
            ));
        }
        Ok(Self { matrix })
    }

    pub(crate) fn new_unchecked(matrix: DMatrix<C64>) -> Self {
        debug_assert!(matrix.is_square());
        Self { matrix }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: DMatrix::identity(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.matrix[(row, col)]
    }

    pub fn apply(&self, v: &DVector<C64>) -> DVector<C64> {
        &self.matrix * v
    }

    pub fn unitarity_deviation(&self) -> f64 {
        unitarity_deviation(&self.matrix)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_hermitian() {
        let mut m = DMatrix::<C64>::zeros(2, 2);
        m[(0, 1)] = C64::new(1.0, 1.0);
        m[(1, 0)] = C64::new(1.0, 1.0);
        assert!(matches!(
            HermitianOperator::new(m),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn rejects_non_unitary() {
        let m = DMatrix::<C64>::from_element(2, 2, C64::new(1.0, 0.0));
        assert!(UnitaryOperator::new(m, 1e-10).is_err());
        assert!(UnitaryOperator::new(DMatrix::identity(3, 3), 1e-10).is_ok());
    }

    #[test]
    fn from_upper_is_exactly_hermitian() {
        let mut m = DMatrix::<C64>::zeros(3, 3);
        m[(0, 2)] = C64::new(0.3, -0.7);
        let h = HermitianOperator::from_upper(m);
        assert_eq!(h.get(2, 0), C64::new(0.3, 0.7));
        assert_eq!(hermitian_deviation(h.matrix()), 0.0);
    }
}
