use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::{abs_cmp, IntMatrix};

/// `left * input * right == diagonal`, with `left`, `right` unimodular and the
/// diagonal a nonnegative divisibility chain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithForm {
    pub left: IntMatrix,
    pub diagonal: IntMatrix,
    pub right: IntMatrix,
}

impl SmithForm {
    /// Nonzero diagonal entries, in order.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        let n = self.diagonal.rows().min(self.diagonal.cols());
        (0..n)
            .map(|i| self.diagonal[(i, i)].clone())
            .filter(|d| !d.is_zero())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors().len()
    }
}

/// Smith normal form with transforms.
///
/// Pivot choice: the smallest nonzero absolute value in the active block,
/// ties broken by lowest row and then lowest column, so the transforms are
/// reproducible.
pub fn smith_normal_form(a: &IntMatrix) -> SmithForm {
    let (m, n) = (a.rows(), a.cols());
    let mut d = a.clone();
    let mut u = IntMatrix::identity(m).expect("rows > 0");
    let mut v = IntMatrix::identity(n).expect("cols > 0");

    for t in 0..m.min(n) {
        let Some((pi, pj)) = smallest_in_block(&d, t) else {
            break;
        };
        d.swap_rows(t, pi);
        u.swap_rows(t, pi);
        d.swap_cols(t, pj);
        v.swap_cols(t, pj);

        loop {
            let mut clean = true;
            for i in t + 1..m {
                if d[(i, t)].is_zero() {
                    continue;
                }
                let q = -(&d[(i, t)] / &d[(t, t)]);
                d.add_row_multiple(i, t, &q);
                u.add_row_multiple(i, t, &q);
                if !d[(i, t)].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..n {
                if d[(t, j)].is_zero() {
                    continue;
                }
                let q = -(&d[(t, j)] / &d[(t, t)]);
                d.add_col_multiple(j, t, &q);
                v.add_col_multiple(j, t, &q);
                if !d[(t, j)].is_zero() {
                    clean = false;
                }
            }

            if !clean {
                // Bring the smallest remainder in row/column t to the pivot.
                let mut best = (t, t);
                for i in t..m {
                    if !d[(i, t)].is_zero() && abs_cmp(&d[(i, t)], &d[best]).is_lt() {
                        best = (i, t);
                    }
                }
                for j in t..n {
                    if !d[(t, j)].is_zero() && abs_cmp(&d[(t, j)], &d[best]).is_lt() {
                        best = (t, j);
                    }
                }
                if best.0 != t {
                    d.swap_rows(t, best.0);
                    u.swap_rows(t, best.0);
                }
                if best.1 != t {
                    d.swap_cols(t, best.1);
                    v.swap_cols(t, best.1);
                }
                continue;
            }

            // Row and column are clear; enforce divisibility of the rest.
            let p = d[(t, t)].clone();
            let offender = (t + 1..m).find(|&i| (t + 1..n).any(|j| !(&d[(i, j)] % &p).is_zero()));
            match offender {
                Some(i) => {
                    let one = BigInt::one();
                    d.add_row_multiple(t, i, &one);
                    u.add_row_multiple(t, i, &one);
                }
                None => break,
            }
        }

        if d[(t, t)].is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
    }

    SmithForm {
        left: u,
        diagonal: d,
        right: v,
    }
}

fn smallest_in_block(d: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in t..d.rows() {
        for j in t..d.cols() {
            if d[(i, j)].is_zero() {
                continue;
            }
            match best {
                Some(b) if !abs_cmp(&d[(i, j)], &d[b]).is_lt() => {}
                _ => best = Some((i, j)),
            }
        }
    }
    best
}

/// Structure of `Z^rows / A Z^cols`: free rank and the nontrivial invariant
/// factors (each > 1, each dividing the next).
pub fn cokernel_structure(a: &IntMatrix) -> (usize, Vec<BigInt>) {
    let snf = smith_normal_form(a);
    let factors = snf.invariant_factors();
    let free = a.rows() - factors.len();
    let torsion = factors.into_iter().filter(|d| !d.is_one()).collect();
    (free, torsion)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn assert_valid(a: &IntMatrix, s: &SmithForm) {
        assert_eq!(&(&s.left * a) * &s.right, s.diagonal);
        assert!(s.left.determinant().unwrap().abs().is_one());
        assert!(s.right.determinant().unwrap().abs().is_one());
        let k = a.rows().min(a.cols());
        for i in 0..a.rows() {
            for j in 0..a.cols() {
                if i != j {
                    assert!(s.diagonal[(i, j)].is_zero());
                }
            }
        }
        for i in 0..k {
            assert!(!s.diagonal[(i, i)].is_negative());
            if i + 1 < k && !s.diagonal[(i + 1, i + 1)].is_zero() {
                assert!((&s.diagonal[(i + 1, i + 1)] % &s.diagonal[(i, i)]).is_zero());
            }
        }
    }

    #[test]
    fn identity_is_fixed() {
        let a = IntMatrix::identity(2).unwrap();
        let s = smith_normal_form(&a);
        assert_eq!(s.diagonal, a);
        assert_eq!(s.left, a);
        assert_eq!(s.right, a);
    }

    #[test]
    fn diag_2_3() {
        let a = m(&[&[2, 0], &[0, 3]]);
        let s = smith_normal_form(&a);
        assert_valid(&a, &s);
        assert_eq!(s.diagonal, m(&[&[1, 0], &[0, 6]]));
    }

    #[test]
    fn gcd_and_det() {
        let a = m(&[&[2, 4], &[6, 8]]);
        let s = smith_normal_form(&a);
        assert_valid(&a, &s);
        assert_eq!(s.diagonal, m(&[&[2, 0], &[0, 4]]));
    }

    #[test]
    fn cokernels() {
        assert_eq!(cokernel_structure(&m(&[&[0]])), (1, vec![]));
        assert_eq!(cokernel_structure(&m(&[&[2]])), (0, vec![BigInt::from(2)]));
        let p3 = m(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[-1, -1, -1]]);
        assert_eq!(cokernel_structure(&p3), (1, vec![]));
        let wp = m(&[&[1, 0, 0], &[-1, -2, -2], &[0, 1, 0], &[0, 0, 1]]);
        assert_eq!(cokernel_structure(&wp), (1, vec![]));
    }

    fn small_matrix() -> impl Strategy<Value = IntMatrix> {
        (1usize..5, 1usize..5).prop_flat_map(|(r, c)| {
            proptest::collection::vec(proptest::collection::vec(-9i64..=9, c), r)
                .prop_map(|rows| IntMatrix::from_rows(&rows).unwrap())
        })
    }

    fn unimodular(n: usize) -> impl Strategy<Value = IntMatrix> {
        proptest::collection::vec((0..n, 0..n, -3i64..=3), 0..8).prop_map(move |ops| {
            let mut u = IntMatrix::identity(n).unwrap();
            for (a, b, k) in ops {
                if a != b {
                    u.add_row_multiple(a, b, &BigInt::from(k));
                }
            }
            u
        })
    }

    proptest! {
        #[test]
        fn smith_invariants_hold(a in small_matrix()) {
            let s = smith_normal_form(&a);
            assert_valid(&a, &s);
        }

        #[test]
        fn cokernel_is_unimodular_invariant(
            (a, p, q) in small_matrix().prop_flat_map(|a| {
                let (r, c) = (a.rows(), a.cols());
                (Just(a), unimodular(r), unimodular(c))
            })
        ) {
            let b = &(&p * &a) * &q;
            prop_assert_eq!(cokernel_structure(&a), cokernel_structure(&b));
        }
    }
}
