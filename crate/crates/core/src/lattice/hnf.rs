use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{abs_cmp, IntMatrix};
use crate::error::{Result, ToricError};

/// Row-style Hermite normal form: `transform * input == form`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HermiteForm {
    pub form: IntMatrix,
    pub transform: IntMatrix,
    /// Column index of the pivot of each nonzero row.
    pub pivots: Vec<usize>,
}

/// Row echelon form with positive pivots and entries above each pivot
/// reduced into `[0, pivot)`. Zero rows sink to the bottom.
pub fn hermite_normal_form(a: &IntMatrix) -> HermiteForm {
    let (m, n) = (a.rows(), a.cols());
    let mut h = a.clone();
    let mut t = IntMatrix::identity(m).expect("rows > 0");
    let mut pivots = Vec::new();
    let mut r = 0;

    for j in 0..n {
        if r == m {
            break;
        }
        loop {
            let best = (r..m)
                .filter(|&i| !h[(i, j)].is_zero())
                .min_by(|&x, &y| abs_cmp(&h[(x, j)], &h[(y, j)]).then(x.cmp(&y)));
            let Some(b) = best else { break };
            h.swap_rows(r, b);
            t.swap_rows(r, b);
            let mut done = true;
            for i in r + 1..m {
                if h[(i, j)].is_zero() {
                    continue;
                }
                let q = -(&h[(i, j)] / &h[(r, j)]);
                h.add_row_multiple(i, r, &q);
                t.add_row_multiple(i, r, &q);
                if !h[(i, j)].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if h[(r, j)].is_zero() {
            continue;
        }
        if h[(r, j)].is_negative() {
            h.negate_row(r);
            t.negate_row(r);
        }
        let p = h[(r, j)].clone();
        for i in 0..r {
            let q = -h[(i, j)].div_floor(&p);
            h.add_row_multiple(i, r, &q);
            t.add_row_multiple(i, r, &q);
        }
        pivots.push(j);
        r += 1;
    }

    HermiteForm {
        form: h,
        transform: t,
        pivots,
    }
}

/// Inverse of a unimodular matrix; errors if the matrix is singular or the
/// inverse is not integral.
pub fn unimodular_inverse(a: &IntMatrix) -> Result<IntMatrix> {
    let n = a.rows();
    if n != a.cols() {
        return Err(ToricError::DimensionMismatch(
            "inverse of non-square matrix".into(),
        ));
    }
    let mut aug: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            let mut row: Vec<BigRational> = a
                .row(i)
                .iter()
                .cloned()
                .map(BigRational::from_integer)
                .collect();
            row.extend((0..n).map(|j| {
                if i == j {
                    BigRational::one()
                } else {
                    BigRational::zero()
                }
            }));
            row
        })
        .collect();
    for c in 0..n {
        let p = (c..n)
            .find(|&i| !aug[i][c].is_zero())
            .ok_or_else(|| ToricError::Inconsistent("singular matrix".into()))?;
        aug.swap(c, p);
        let inv = aug[c][c].recip();
        for x in aug[c].iter_mut() {
            *x *= &inv;
        }
        for i in 0..n {
            if i != c && !aug[i][c].is_zero() {
                let f = aug[i][c].clone();
                for k in 0..2 * n {
                    let v = &f * &aug[c][k];
                    aug[i][k] -= v;
                }
            }
        }
    }
    let rows: Vec<Vec<BigInt>> = aug
        .into_iter()
        .map(|row| {
            row[n..]
                .iter()
                .map(|x| {
                    if x.is_integer() {
                        Ok(x.to_integer())
                    } else {
                        Err(ToricError::Inconsistent("matrix is not unimodular".into()))
                    }
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    IntMatrix::from_rows(&rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn hermite_of_kernel_row() {
        let a = IntMatrix::from_rows(&[vec![-1i64, -1, -1, -1]]).unwrap();
        let h = hermite_normal_form(&a);
        assert_eq!(
            h.form,
            IntMatrix::from_rows(&[vec![1i64, 1, 1, 1]]).unwrap()
        );
        assert_eq!(h.pivots, vec![0]);
    }

    #[test]
    fn inverse_roundtrip() {
        let u = IntMatrix::from_rows(&[vec![2i64, 1], vec![1, 1]]).unwrap();
        let inv = unimodular_inverse(&u).unwrap();
        assert_eq!(&u * &inv, IntMatrix::identity(2).unwrap());
        let bad = IntMatrix::from_rows(&[vec![2i64, 0], vec![0, 1]]).unwrap();
        assert!(unimodular_inverse(&bad).is_err());
    }

    proptest! {
        #[test]
        fn hermite_shape(rows in proptest::collection::vec(proptest::collection::vec(-6i64..=6, 4), 1..4)) {
            let a = IntMatrix::from_rows(&rows).unwrap();
            let h = hermite_normal_form(&a);
            prop_assert_eq!(&h.transform * &a, h.form.clone());
            prop_assert!(h.transform.determinant().unwrap().abs().is_one());
            for (r, &p) in h.pivots.iter().enumerate() {
                prop_assert!(h.form[(r, p)].is_positive());
                for i in 0..r {
                    prop_assert!(!h.form[(i, p)].is_negative());
                    prop_assert!(h.form[(i, p)] < h.form[(r, p)]);
                }
                for i in r + 1..a.rows() {
                    prop_assert!(h.form[(i, p)].is_zero());
                }
            }
            for r in h.pivots.len()..a.rows() {
                prop_assert!(h.form.row(r).iter().all(Zero::is_zero));
            }
        }
    }
}
