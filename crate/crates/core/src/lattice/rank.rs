use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// Word-size prime used for the rank prescreen.
const PRESCREEN_PRIME: u64 = 2_147_483_647;

/// Rank together with how it was certified.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RankCertificate {
    pub rank: usize,
    /// True when the modular prescreen already reached full rank; the rank
    /// over Q can only be larger, so that is a proof.
    pub by_prescreen: bool,
}

/// Rank over Q of an integer matrix given as rows.
///
/// A rank computed modulo a prime is a lower bound for the rational rank, so
/// when the prescreen reaches `min(rows, cols)` the answer is exact. Otherwise
/// fraction-free elimination settles it.
pub fn exact_rank(rows: &[Vec<BigInt>]) -> RankCertificate {
    let m = rows.len();
    let n = rows.first().map_or(0, Vec::len);
    if m == 0 || n == 0 {
        return RankCertificate {
            rank: 0,
            by_prescreen: true,
        };
    }
    let p_rank = rank_mod_p(rows, PRESCREEN_PRIME);
    if p_rank == m.min(n) {
        return RankCertificate {
            rank: p_rank,
            by_prescreen: true,
        };
    }
    RankCertificate {
        rank: bareiss_rank(rows),
        by_prescreen: false,
    }
}

/// Rank over Q of a rational matrix.
pub fn rational_rank(rows: &[Vec<BigRational>]) -> usize {
    let ints: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|row| {
            let l = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            row.iter().map(|x| (x * &l).to_integer()).collect()
        })
        .collect();
    exact_rank(&ints).rank
}

fn bareiss_rank(rows: &[Vec<BigInt>]) -> usize {
    let mut a: Vec<Vec<BigInt>> = rows.to_vec();
    let m = a.len();
    let n = a[0].len();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..n {
        if r == m {
            break;
        }
        let Some(p) = (r..m).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let (top, rest) = a.split_at_mut(r + 1);
        let pivot_row = &top[r];
        let pivot = &pivot_row[c];
        for row in rest.iter_mut() {
            let factor = std::mem::take(&mut row[c]);
            for j in c + 1..n {
                let mut v = pivot * &row[j];
                if !factor.is_zero() && !pivot_row[j].is_zero() {
                    v -= &factor * &pivot_row[j];
                }
                row[j] = v / &prev;
            }
        }
        prev = a[r][c].clone();
        r += 1;
    }
    r
}

/// Rank of the matrix reduced modulo the prime `p` (< 2^32).
pub fn rank_mod_p(rows: &[Vec<BigInt>], p: u64) -> usize {
    let pb = BigInt::from(p);
    let mut a: Vec<Vec<u64>> = rows
        .iter()
        .map(|row| {
            row.iter()
                .map(|x| x.mod_floor(&pb).to_u64().expect("reduced residue fits"))
                .collect()
        })
        .collect();
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..n {
        if r == m {
            break;
        }
        let Some(piv) = (r..m).find(|&i| a[i][c] != 0) else {
            continue;
        };
        a.swap(r, piv);
        let inv = pow_mod(a[r][c], p - 2, p);
        for j in c..n {
            a[r][j] = a[r][j] * inv % p;
        }
        for i in r + 1..m {
            let f = a[i][c];
            if f == 0 {
                continue;
            }
            for j in c..n {
                a[i][j] = (a[i][j] + (p - f) * a[r][j]) % p;
            }
        }
        r += 1;
    }
    r
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

/// Solves the square system `a x = b` exactly; `None` when singular.
pub fn solve_square(a: &[Vec<BigRational>], b: &[BigRational]) -> Option<Vec<BigRational>> {
    let n = a.len();
    let mut aug: Vec<Vec<BigRational>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !aug[i][c].is_zero())?;
        aug.swap(c, p);
        let inv = aug[c][c].recip();
        for x in aug[c].iter_mut() {
            *x *= &inv;
        }
        for i in 0..n {
            if i != c && !aug[i][c].is_zero() {
                let f = aug[i][c].clone();
                for k in c..=n {
                    let v = &f * &aug[c][k];
                    aug[i][k] -= v;
                }
            }
        }
    }
    Some(
        aug.into_iter()
            .map(|mut r| r.pop().expect("augmented"))
            .collect(),
    )
}
