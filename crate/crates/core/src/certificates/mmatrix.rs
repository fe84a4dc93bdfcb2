//! Nonsingular M-matrix tests with positive witness vectors.
//!
//! A Z-matrix (all off-diagonal entries nonpositive) is a nonsingular
//! M-matrix exactly when its leading principal minors are all positive. In
//! that case the inverse is entrywise nonnegative, so `d = M^-1 * 1` is a
//! strictly positive vector with `M d = 1 > 0` componentwise; `d` is the
//! witness used to rescale Lipschitz data into strict row dominance.
//!
//! The rational path decides positivity exactly. The floating-point path
//! uses partial pivoting and treats a leading minor as "singular within
//! tolerance" when its magnitude drops below `1e-12 * max(1, norm)^k`,
//! where `norm` is the max-row-sum norm and `k` the minor order; such
//! matrices are reported as not certified rather than as an error.

use super::CertificateError;
use crate::rational::Rat;
use num_traits::{One, Signed, Zero};

/// Outcome of an M-matrix test over scalar type `T` (exact rationals or
/// `f64`).
#[derive(Debug, Clone)]
pub struct MMatrixReport<T> {
    /// Off-diagonal entries are all nonpositive.
    pub is_z_matrix: bool,
    /// Leading principal minors, orders 1..=N.
    pub leading_minors: Vec<T>,
    /// Z-pattern plus strictly positive leading minors.
    pub is_nonsingular_m: bool,
    /// Solution of `M d = 1`, present when the test succeeds; strictly
    /// positive componentwise.
    pub witness: Option<Vec<T>>,
    /// Explanation when a float test is inconclusive within tolerance.
    pub note: Option<String>,
}

fn check_square<T>(m: &[Vec<T>]) -> Result<usize, CertificateError> {
    let n = m.len();
    if n == 0 {
        return Err(CertificateError::Dimension("empty matrix".into()));
    }
    for (i, row) in m.iter().enumerate() {
        if row.len() != n {
            return Err(CertificateError::Dimension(format!(
                "row {i} has {} entries, expected {n}",
                row.len()
            )));
        }
    }
    Ok(n)
}

/// Determinant of the leading `k x k` block, exact.
fn leading_minor_exact(m: &[Vec<Rat>], k: usize) -> Rat {
    let mut a: Vec<Vec<Rat>> = m[..k].iter().map(|row| row[..k].to_vec()).collect();
    let mut det = Rat::one();
    for col in 0..k {
        let pivot_row = match (col..k).find(|&r| !a[r][col].is_zero()) {
            Some(r) => r,
            None => return Rat::zero(),
        };
        if pivot_row != col {
            a.swap(pivot_row, col);
            det = -det;
        }
        let pivot = a[col][col].clone();
        det *= &pivot;
        for row in col + 1..k {
            if a[row][col].is_zero() {
                continue;
            }
            let factor = &a[row][col] / &pivot;
            for c in col..k {
                let sub = &factor * &a[col][c];
                a[row][c] -= sub;
            }
        }
    }
    det
}

/// Solves `M d = rhs` exactly; `None` when singular.
fn solve_exact(m: &[Vec<Rat>], rhs: &[Rat]) -> Option<Vec<Rat>> {
    let n = m.len();
    let mut a: Vec<Vec<Rat>> = m.iter().map(|row| row.to_vec()).collect();
    let mut b: Vec<Rat> = rhs.to_vec();
    for col in 0..n {
        let pivot_row = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(pivot_row, col);
        b.swap(pivot_row, col);
        let pivot = a[col][col].clone();
        for row in 0..n {
            if row == col || a[row][col].is_zero() {
                continue;
            }
            let factor = &a[row][col] / &pivot;
            for c in col..n {
                let sub = &factor * &a[col][c];
                a[row][c] -= sub;
            }
            let sub = &factor * &b[col];
            b[row] -= sub;
        }
    }
    Some((0..n).map(|i| &b[i] / &a[i][i]).collect())
}

/// Exact nonsingular M-matrix test with witness extraction.
pub fn certify_m_matrix(m: &[Vec<Rat>]) -> Result<MMatrixReport<Rat>, CertificateError> {
    let n = check_square(m)?;
    let is_z_matrix = (0..n).all(|i| (0..n).all(|j| i == j || !m[i][j].is_positive()));
    let leading_minors: Vec<Rat> = (1..=n).map(|k| leading_minor_exact(m, k)).collect();
    let all_positive = leading_minors.iter().all(|d| d.is_positive());
    let is_nonsingular_m = is_z_matrix && all_positive;
    let witness = if is_nonsingular_m {
        let ones = vec![Rat::one(); n];
        let d = solve_exact(m, &ones).ok_or(CertificateError::Infeasible)?;
        for (row, v) in d.iter().enumerate() {
            if !v.is_positive() {
                return Err(CertificateError::NonPositiveWitness { row });
            }
        }
        Some(d)
    } else {
        None
    };
    Ok(MMatrixReport {
        is_z_matrix,
        leading_minors,
        is_nonsingular_m,
        witness,
        note: None,
    })
}

fn leading_minor_f64(m: &[Vec<f64>], k: usize) -> f64 {
    let mut a: Vec<Vec<f64>> = m[..k].iter().map(|row| row[..k].to_vec()).collect();
    let mut det = 1.0f64;
    for col in 0..k {
        let pivot_row = (col..k)
            .max_by(|&p, &q| a[p][col].abs().total_cmp(&a[q][col].abs()))
            .unwrap();
        if a[pivot_row][col] == 0.0 {
            return 0.0;
        }
        if pivot_row != col {
            a.swap(pivot_row, col);
            det = -det;
        }
        let pivot = a[col][col];
        det *= pivot;
        for row in col + 1..k {
            let factor = a[row][col] / pivot;
            for c in col..k {
                a[row][c] -= factor * a[col][c];
            }
        }
    }
    det
}

fn solve_f64(m: &[Vec<f64>], rhs: &[f64], pivot_floor: f64) -> Option<Vec<f64>> {
    let n = m.len();
    let mut a: Vec<Vec<f64>> = m.iter().map(|row| row.to_vec()).collect();
    let mut b = rhs.to_vec();
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&p, &q| a[p][col].abs().total_cmp(&a[q][col].abs()))
            .unwrap();
        if a[pivot_row][col].abs() <= pivot_floor {
            return None;
        }
        a.swap(pivot_row, col);
        b.swap(pivot_row, col);
        let pivot = a[col][col];
        for row in 0..n {
            if row == col {
                continue;
            }
            let factor = a[row][col] / pivot;
            if factor == 0.0 {
                continue;
            }
            for c in col..n {
                a[row][c] -= factor * a[col][c];
            }
            b[row] -= factor * b[col];
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

/// Floating-point nonsingular M-matrix test; see the module docs for the
/// singularity tolerance. Use [`certify_m_matrix`] whenever the entries are
/// available exactly.
pub fn certify_m_matrix_f64(m: &[Vec<f64>]) -> Result<MMatrixReport<f64>, CertificateError> {
    let n = check_square(m)?;
    for (i, row) in m.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            if !v.is_finite() {
                return Err(CertificateError::Domain(format!(
                    "non-finite entry {v} at ({i}, {j})"
                )));
            }
        }
    }
    let is_z_matrix = (0..n).all(|i| (0..n).all(|j| i == j || m[i][j] <= 0.0));
    let norm = m
        .iter()
        .map(|row| row.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0f64, f64::max)
        .max(1.0);
    let leading_minors: Vec<f64> = (1..=n).map(|k| leading_minor_f64(m, k)).collect();

    let mut note = None;
    let mut all_positive = true;
    for (idx, det) in leading_minors.iter().enumerate() {
        let scale = 1e-12 * norm.powi(idx as i32 + 1);
        if det.abs() <= scale {
            note = Some(format!(
                "leading minor {} = {det:.3e} is singular within tolerance {scale:.3e}",
                idx + 1
            ));
            all_positive = false;
            break;
        }
        if *det < 0.0 {
            all_positive = false;
            break;
        }
    }
    let is_nonsingular_m = is_z_matrix && all_positive;
    let witness = if is_nonsingular_m {
        match solve_f64(m, &vec![1.0; n], 1e-12 * norm) {
            Some(d) if d.iter().all(|v| *v > 0.0) => Some(d),
            Some(_) | None => {
                return Ok(MMatrixReport {
                    is_z_matrix,
                    leading_minors,
                    is_nonsingular_m: false,
                    witness: None,
                    note: Some("witness solve was inconclusive at this precision".into()),
                })
            }
        }
    } else {
        None
    };
    Ok(MMatrixReport {
        is_z_matrix,
        leading_minors,
        is_nonsingular_m,
        witness,
        note,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int};

    #[test]
    fn two_by_two_witness_matches_inverse_row_sums() {
        let m = vec![vec![rat(1, 2), rat(-1, 6)], vec![rat(-1, 2), rat(1, 3)]];
        let report = certify_m_matrix(&m).unwrap();
        assert!(report.is_z_matrix);
        assert_eq!(report.leading_minors, vec![rat(1, 2), rat(1, 12)]);
        assert!(report.is_nonsingular_m);
        assert_eq!(report.witness, Some(vec![rat_int(6), rat_int(12)]));
    }

    #[test]
    fn positive_off_diagonal_fails_z_check() {
        let m = vec![vec![rat_int(1), rat(1, 4)], vec![rat_int(0), rat_int(1)]];
        let report = certify_m_matrix(&m).unwrap();
        assert!(!report.is_z_matrix);
        assert!(!report.is_nonsingular_m);
        assert!(report.witness.is_none());
        // minors are still reported
        assert_eq!(report.leading_minors, vec![rat_int(1), rat_int(1)]);
    }

    #[test]
    fn negative_minor_fails() {
        let m = vec![vec![rat(1, 2), rat(-1, 6)], vec![rat_int(-1), rat(1, 4)]];
        // det = 1/8 - 1/6 < 0
        let report = certify_m_matrix(&m).unwrap();
        assert!(report.is_z_matrix);
        assert!(!report.is_nonsingular_m);
        assert_eq!(report.leading_minors[1], rat(1, 8) - rat(1, 6));
    }

    #[test]
    fn exact_singular_matrix_reports_zero_minor() {
        let m = vec![vec![rat_int(1), rat_int(-1)], vec![rat_int(-1), rat_int(1)]];
        let report = certify_m_matrix(&m).unwrap();
        assert_eq!(report.leading_minors[1], rat_int(0));
        assert!(!report.is_nonsingular_m);
    }

    #[test]
    fn float_path_matches_exact_on_clean_input() {
        let m = vec![vec![0.5, -1.0 / 6.0], vec![-0.5, 1.0 / 3.0]];
        let report = certify_m_matrix_f64(&m).unwrap();
        assert!(report.is_nonsingular_m);
        let d = report.witness.unwrap();
        assert!((d[0] - 6.0).abs() < 1e-9);
        assert!((d[1] - 12.0).abs() < 1e-9);
    }

    #[test]
    fn float_singular_within_tolerance_is_reported_not_raised() {
        let m = vec![vec![1.0, -1.0], vec![-1.0, 1.0 + 1e-15]];
        let report = certify_m_matrix_f64(&m).unwrap();
        assert!(!report.is_nonsingular_m);
        assert!(report.note.is_some());
    }

    #[test]
    fn shape_errors_are_rejected() {
        assert!(certify_m_matrix(&[]).is_err());
        assert!(certify_m_matrix(&[vec![rat_int(1), rat_int(0)]]).is_err());
        assert!(certify_m_matrix_f64(&[vec![f64::NAN]]).is_err());
    }

    #[test]
    fn three_by_three_diagonally_dominant_example() {
        let m = vec![
            vec![rat_int(4), rat_int(-1), rat_int(-1)],
            vec![rat_int(-2), rat_int(5), rat_int(-1)],
            vec![rat_int(0), rat_int(-3), rat_int(6)],
        ];
        let report = certify_m_matrix(&m).unwrap();
        assert!(report.is_nonsingular_m);
        let d = report.witness.unwrap();
        // verify M d = 1 exactly
        for i in 0..3 {
            let mut acc = rat_int(0);
            for j in 0..3 {
                acc += &m[i][j] * &d[j];
            }
            assert_eq!(acc, rat_int(1), "row {i}");
        }
    }
}
