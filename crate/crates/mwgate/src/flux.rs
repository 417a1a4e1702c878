//! Flux-crosstalk compensation for the bias lines.
//!
//! Each bias line threads some flux through every SQUID. Given the mutual
//! inductance matrix `M` (entry `(i, j)` is the flux into SQUID `i` per ampere
//! on line `j`), the currents that realize a target flux vector solve
//! `M·I = Φ`.

use nalgebra::{DMatrix, DVector, RealField};
use num_traits::Float;

use crate::constants::FLUX_QUANTUM;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Condition number above which a matrix is refused.
pub const MAX_CONDITION: f64 = 1e12;

/// Square mutual-inductance matrix in webers per ampere.
#[derive(Debug, Clone, PartialEq)]
pub struct InductanceMatrix<T: Real + RealField> {
    m: DMatrix<T>,
}

impl<T: Real + RealField> InductanceMatrix<T> {
    /// Builds an `n × n` matrix from row-major entries.
    pub fn from_row_major(n: usize, entries: &[T]) -> Result<Self> {
        if n == 0 || entries.len() != n * n {
            return Err(Error::InvalidArgument(format!(
                "expected {} entries for a {n}x{n} matrix, got {}",
                n * n,
                entries.len()
            )));
        }
        if entries.iter().any(|x| !Float::is_finite(*x)) {
            return Err(Error::InvalidArgument("inductance matrix has non-finite entries".into()));
        }
        Ok(Self { m: DMatrix::from_row_slice(n, n, entries) })
    }

    pub fn size(&self) -> usize {
        self.m.nrows()
    }

    pub fn get(&self, row: usize, col: usize) -> T {
        self.m[(row, col)]
    }

    pub fn as_matrix(&self) -> &DMatrix<T> {
        &self.m
    }

    /// Entries in row-major order.
    pub fn row_major(&self) -> Vec<T> {
        let n = self.size();
        (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| self.m[(i, j)]).collect()
    }

    /// Flux vector in webers produced by bias currents in amperes.
    pub fn apply(&self, currents: &[T]) -> Vec<T> {
        (&self.m * DVector::from_column_slice(currents)).iter().copied().collect()
    }
}

/// Diagnostics of an inductance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixDiagnostics<T> {
    pub determinant: T,
    /// Two-norm condition number; infinite for a singular matrix.
    pub condition: T,
    /// Per row, `|m_ii|` divided by the sum of off-diagonal magnitudes.
    pub dominance: Vec<T>,
    pub singular: bool,
}

fn condition_number<T: Real + RealField>(m: &DMatrix<T>) -> T {
    let sv = m.clone().singular_values();
    let max = sv.iter().copied().fold(T::zero(), Float::max);
    let min = sv.iter().copied().fold(<T as Float>::infinity(), Float::min);
    if min > T::zero() {
        max / min
    } else {
        <T as Float>::infinity()
    }
}

/// Reports determinant, condition number and diagonal dominance.
pub fn validate_matrix<T: Real + RealField>(m: &InductanceMatrix<T>) -> MatrixDiagnostics<T> {
    let n = m.size();
    let determinant = m.m.determinant();
    let condition = condition_number(&m.m);
    let dominance = (0..n)
        .map(|i| {
            let off = (0..n).filter(|&j| j != i).map(|j| Float::abs(m.m[(i, j)])).fold(T::zero(), |a, b| a + b);
            let diag = Float::abs(m.m[(i, i)]);
            if off > T::zero() {
                diag / off
            } else {
                <T as Float>::infinity()
            }
        })
        .collect();
    let singular = determinant == T::zero() || !(condition < T::lit(MAX_CONDITION));
    MatrixDiagnostics { determinant, condition, dominance, singular }
}

/// Converts fluxes from units of Φ0 to webers.
pub fn flux_quanta_to_webers<T: Real>(flux: &[T]) -> Vec<T> {
    flux.iter().map(|&f| f * T::lit(FLUX_QUANTUM)).collect()
}

/// Bias currents in amperes realizing `target_flux` (webers) on every SQUID.
pub fn compensation_currents<T: Real + RealField>(m: &InductanceMatrix<T>, target_flux: &[T]) -> Result<Vec<T>> {
    let n = m.size();
    if target_flux.len() != n {
        return Err(Error::InvalidArgument(format!("target has {} entries, matrix is {n}x{n}", target_flux.len())));
    }
    let condition = condition_number(&m.m);
    if !(condition < T::lit(MAX_CONDITION)) {
        return Err(Error::NonInvertible { condition: condition.to_f64_lossy() });
    }
    let lu = m.m.clone().lu();
    let rhs = DVector::from_column_slice(target_flux);
    let mut x = lu.solve(&rhs).ok_or(Error::NonInvertible { condition: condition.to_f64_lossy() })?;
    // One refinement step tightens the residual for poorly scaled inputs.
    let residual = &rhs - &m.m * &x;
    if let Some(dx) = lu.solve(&residual) {
        x += dx;
    }
    Ok(x.iter().copied().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn crosstalk(frac: f64) -> InductanceMatrix<f64> {
        let d = 2.0e-12;
        let o = frac * d;
        InductanceMatrix::from_row_major(3, &[d, o, 0.5 * o, o, 1.2 * d, o, 0.5 * o, o, 0.9 * d]).unwrap()
    }

    #[test]
    fn diagonal_matrix_decouples() {
        let m = InductanceMatrix::from_row_major(3, &[2.0, 0.0, 0.0, 0.0, 3.0, 0.0, 0.0, 0.0, 5.0]).unwrap();
        let i = compensation_currents(&m, &[2.0 * 0.7, 0.0, 0.0]).unwrap();
        assert_relative_eq!(i[0], 0.7, max_relative = 1e-15);
        assert_eq!(&i[1..], &[0.0, 0.0]);
    }

    #[test]
    fn residual_is_tiny() {
        let m = crosstalk(0.03);
        let target = flux_quanta_to_webers(&[0.31, -0.12, 0.44]);
        let i = compensation_currents(&m, &target).unwrap();
        let back = m.apply(&i);
        let scale = target.iter().map(|x| x.abs()).fold(0.0, f64::max);
        for (a, b) in back.iter().zip(&target) {
            assert!((a - b).abs() <= 1e-10 * scale);
        }
    }

    #[test]
    fn identity_diagnostics() {
        let m = InductanceMatrix::from_row_major(3, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]).unwrap();
        let d = validate_matrix(&m);
        assert_relative_eq!(d.condition, 1.0, epsilon = 1e-14);
        assert_eq!(d.determinant, 1.0);
        assert!(d.dominance.iter().all(|x| x.is_infinite()));
        assert!(!d.singular);
    }

    #[test]
    fn singular_matrix_is_flagged_and_refused() {
        let m = InductanceMatrix::from_row_major(3, &[1.0, 2.0, 3.0, 1.0, 2.0, 3.0, 0.0, 1.0, 4.0]).unwrap();
        let d = validate_matrix(&m);
        assert!(d.singular);
        assert!(d.determinant.abs() < 1e-14);
        assert!(matches!(compensation_currents(&m, &[1.0, 1.0, 1.0]), Err(Error::NonInvertible { .. })));
    }

    #[test]
    fn strong_diagonal_dominates() {
        let d = validate_matrix(&crosstalk(0.1));
        assert!(d.dominance.iter().all(|&r| r > 1.0));
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(InductanceMatrix::from_row_major(3, &[1.0; 8]).is_err());
        assert!(InductanceMatrix::from_row_major(2, &[1.0, f64::NAN, 0.0, 1.0]).is_err());
        let m = crosstalk(0.1);
        assert!(compensation_currents(&m, &[1.0, 2.0]).is_err());
    }

    #[test]
    fn linear_in_target() {
        let m = crosstalk(0.1);
        let a = [1e-15, 2e-15, -1e-15];
        let b = [-3e-16, 5e-16, 7e-16];
        let (alpha, beta) = (0.7, -1.9);
        let mix: Vec<f64> = a.iter().zip(&b).map(|(x, y)| alpha * x + beta * y).collect();
        let ia = compensation_currents(&m, &a).unwrap();
        let ib = compensation_currents(&m, &b).unwrap();
        let im = compensation_currents(&m, &mix).unwrap();
        for k in 0..3 {
            let want = alpha * ia[k] + beta * ib[k];
            assert!((im[k] - want).abs() <= 1e-10 * want.abs().max(1e-4));
        }
    }

    #[test]
    fn larger_arrays_work() {
        let n: usize = 7;
        let entries: Vec<f64> =
            (0..n * n).map(|k| if k / n == k % n { 1.0 } else { 0.05 / (1.0 + (k / n).abs_diff(k % n) as f64) }).collect();
        let m = InductanceMatrix::from_row_major(n, &entries).unwrap();
        let target: Vec<f64> = (0..n).map(|k| k as f64 * 0.1).collect();
        let back = m.apply(&compensation_currents(&m, &target).unwrap());
        for (a, b) in back.iter().zip(&target) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn single_precision_path() {
        let m = InductanceMatrix::from_row_major(2, &[2.0_f32, 0.1, 0.1, 1.0]).unwrap();
        let i = compensation_currents(&m, &[1.0_f32, 0.5]).unwrap();
        let back = m.apply(&i);
        assert!((back[0] - 1.0).abs() < 1e-5 && (back[1] - 0.5).abs() < 1e-5);
    }
}
