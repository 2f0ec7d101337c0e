//! Positive row reduction of a pairing matrix with nonnegative off-diagonal entries.
//!
//! Only positive multiples of a pivot row are added to rows beneath it. Either some
//! pivot becomes nonnegative, and the reduced row is a nonnegative positive combination
//! of the original rows, or every pivot stays negative and no such combination exists.

use num_traits::{Signed, Zero};

use super::scalar::{normalize_weights, Scalar};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PositiveRow {
    /// Nonnegative row weights, scaled to coprime integers.
    pub weights: Vec<Scalar>,
    /// The weighted sum of the rows of the input.
    pub row: Vec<Scalar>,
}

/// Returns positive row weights producing a nonnegative row, or `None`.
///
/// The input is expected to be square with nonnegative off-diagonal entries.
pub fn rref_positive(a: &[Vec<Scalar>]) -> Option<PositiveRow> {
    let n = a.len();
    let mut m: Vec<Vec<Scalar>> = a.to_vec();
    let mut w: Vec<Vec<Scalar>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        Scalar::from_integer(1.into())
                    } else {
                        Scalar::zero()
                    }
                })
                .collect()
        })
        .collect();
    for k in 0..n {
        if !m[k][k].is_negative() {
            let weights = normalize_weights(&w[k]);
            let row = combine_rows(a, &weights);
            debug_assert!(row.iter().all(|x| !x.is_negative()));
            return Some(PositiveRow { weights, row });
        }
        let piv = -m[k][k].clone();
        for i in k + 1..n {
            if m[i][k].is_positive() {
                let f = &m[i][k] / &piv;
                let (head, tail) = m.split_at_mut(i);
                for (x, y) in tail[0].iter_mut().zip(&head[k]) {
                    *x += &f * y;
                }
                let (whead, wtail) = w.split_at_mut(i);
                for (x, y) in wtail[0].iter_mut().zip(&whead[k]) {
                    *x += &f * y;
                }
            }
        }
    }
    None
}

fn combine_rows(a: &[Vec<Scalar>], weights: &[Scalar]) -> Vec<Scalar> {
    let cols = a.first().map_or(0, Vec::len);
    let mut out = vec![Scalar::zero(); cols];
    for (row, wt) in a.iter().zip(weights) {
        if wt.is_zero() {
            continue;
        }
        for (o, x) in out.iter_mut().zip(row) {
            *o += wt * x;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::linalg::from_ints;
    use crate::kernel::scalar::int;

    #[test]
    fn two_cycle() {
        let a = from_ints(&[vec![-1, 1], vec![1, -1]]);
        let r = rref_positive(&a).unwrap();
        assert_eq!(r.weights, vec![int(1), int(1)]);
        assert_eq!(r.row, vec![int(0), int(0)]);
    }

    #[test]
    fn single_negative_entry() {
        assert_eq!(rref_positive(&from_ints(&[vec![-1]])), None);
    }

    #[test]
    fn weighted_three_cycle() {
        let a = from_ints(&[vec![-2, 0, 1], vec![0, -2, 1], vec![1, 1, -1]]);
        let r = rref_positive(&a).unwrap();
        assert_eq!(r.weights, vec![int(1), int(1), int(2)]);
        assert_eq!(r.row, vec![int(0), int(0), int(0)]);
    }

    #[test]
    fn nonsingular_m_matrix_has_no_row() {
        let a = from_ints(&[vec![-2, 1], vec![1, -2]]);
        assert_eq!(rref_positive(&a), None);
    }
}
