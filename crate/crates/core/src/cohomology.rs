//! Divisor polytopes, lattice points, and cohomology of torus-invariant
//! divisors computed chamber by chamber.
//!
//! For a character `m` let `V(m)` be the rays with `<m, u> < -a`. The degree-`m`
//! part of `H^q(O(D))` is the reduced cohomology `H~^{q-1}` of the complex of
//! subsets of `V(m)` lying in a common cone, so `h^q` is a sum over the sign
//! patterns `V` of (lattice points with pattern `V`) times a Betti number that
//! only depends on the fan.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

use crate::divisor::{DivisorClass, ToricVariety};
use crate::error::{Result, ToricError};
use crate::lattice::{coordinate_bounds, exact_rank, Halfspace};

const MAX_RAYS: usize = 16;

/// `{m : <m, normal_i> >= offset_i}` with integer data.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DivisorPolytope {
    pub dim: usize,
    pub normals: Vec<Vec<i64>>,
    pub offsets: Vec<i64>,
}

impl DivisorPolytope {
    /// `P_D = {m : <m, u_rho> >= -a_rho}`.
    pub fn of(v: &ToricVariety, coeffs: &[i64]) -> Self {
        Self {
            dim: v.dim(),
            normals: v.fan.rays.clone(),
            offsets: coeffs.iter().map(|a| -a).collect(),
        }
    }

    pub fn contains(&self, m: &[i64]) -> bool {
        self.normals
            .iter()
            .zip(&self.offsets)
            .all(|(u, &c)| dot(u, m) >= c)
    }

    fn halfspaces(&self) -> Vec<Halfspace> {
        self.normals
            .iter()
            .zip(&self.offsets)
            .map(|(u, &c)| Halfspace::from_ints(u, c))
            .collect()
    }
}

fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Integer box `[ceil(lo), floor(hi)]` per coordinate, or `None` if empty or
/// when the polyhedron is empty.
fn integer_box(dim: usize, hs: &[Halfspace]) -> Result<Option<Vec<(i64, i64)>>> {
    let Some(bounds) = coordinate_bounds(dim, hs)? else {
        return Ok(None);
    };
    let mut out = Vec::with_capacity(dim);
    for (lo, hi) in bounds {
        let lo = ceil(&lo);
        let hi = floor(&hi);
        if lo > hi {
            return Ok(None);
        }
        out.push((lo, hi));
    }
    Ok(Some(out))
}

fn ceil(x: &BigRational) -> i64 {
    let (q, r) = x.numer().div_mod_floor(x.denom());
    let q = if r == BigInt::from(0) { q } else { q + 1 };
    i64::try_from(q).expect("bound fits in i64")
}

fn floor(x: &BigRational) -> i64 {
    i64::try_from(x.numer().div_floor(x.denom())).expect("bound fits in i64")
}

/// Walks the lattice points of `{m : <c_i, m> >= b_i}` inside `bx`. The last
/// coordinate is solved as an interval, so `visit` receives a prefix and the
/// inclusive range of the last coordinate.
fn walk(cons: &[(Vec<i64>, i64)], bx: &[(i64, i64)], mut visit: impl FnMut(&[i64], i64, i64)) {
    let dim = bx.len();
    let mut point = vec![0i64; dim];
    fn rec(
        depth: usize,
        point: &mut Vec<i64>,
        cons: &[(Vec<i64>, i64)],
        bx: &[(i64, i64)],
        visit: &mut dyn FnMut(&[i64], i64, i64),
    ) {
        let dim = bx.len();
        if depth + 1 == dim {
            let (mut lo, mut hi) = bx[depth];
            for (c, b) in cons {
                let rest: i64 = (0..depth).map(|i| c[i] * point[i]).sum();
                let rhs = b - rest;
                let k = c[depth];
                if k > 0 {
                    lo = lo.max(Integer::div_ceil(&rhs, &k));
                } else if k < 0 {
                    hi = hi.min(Integer::div_floor(&rhs, &k));
                } else if rhs > 0 {
                    return;
                }
                if lo > hi {
                    return;
                }
            }
            visit(&point[..depth], lo, hi);
            return;
        }
        for x in bx[depth].0..=bx[depth].1 {
            point[depth] = x;
            rec(depth + 1, point, cons, bx, visit);
        }
    }
    rec(0, &mut point, cons, bx, &mut visit);
}

/// All lattice points of a bounded polytope, in lexicographic order.
pub fn lattice_points(p: &DivisorPolytope) -> Result<Vec<Vec<i64>>> {
    let Some(bx) = integer_box(p.dim, &p.halfspaces())? else {
        return Ok(Vec::new());
    };
    let cons: Vec<(Vec<i64>, i64)> = p
        .normals
        .iter()
        .cloned()
        .zip(p.offsets.iter().copied())
        .collect();
    let mut out = Vec::new();
    walk(&cons, &bx, |prefix, lo, hi| {
        for x in lo..=hi {
            let mut m = prefix.to_vec();
            m.push(x);
            out.push(m);
        }
    });
    Ok(out)
}

/// Number of lattice points of a bounded polytope.
pub fn lattice_point_count(p: &DivisorPolytope) -> Result<u64> {
    let Some(bx) = integer_box(p.dim, &p.halfspaces())? else {
        return Ok(0);
    };
    let cons: Vec<(Vec<i64>, i64)> = p
        .normals
        .iter()
        .cloned()
        .zip(p.offsets.iter().copied())
        .collect();
    Ok(count_in_box(&cons, &bx))
}

fn count_in_box(cons: &[(Vec<i64>, i64)], bx: &[(i64, i64)]) -> u64 {
    let mut n = 0u64;
    walk(cons, bx, |_, lo, hi| n += (hi - lo + 1) as u64);
    n
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SignChamber {
    /// Rays with `<m, u> < -a` throughout the chamber.
    pub violated: Vec<usize>,
    pub lattice_count: u64,
    /// `(q, b)`: the chamber adds `lattice_count * b` to `h^q`.
    pub contributions: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CohomologyTable {
    pub h: Vec<u64>,
    pub chambers: Vec<SignChamber>,
}

impl CohomologyTable {
    pub fn euler_characteristic(&self) -> i64 {
        self.h
            .iter()
            .enumerate()
            .map(|(q, &x)| if q % 2 == 0 { x as i64 } else { -(x as i64) })
            .sum()
    }

    pub fn higher_vanish(&self) -> bool {
        self.h[1..].iter().all(|&x| x == 0)
    }
}

/// Reduced Betti numbers of the complex of subsets of `mask` lying in some
/// maximal cone; entry `j` is the rank of `H~_{j-1}`, for `j = 0..=dim`.
fn reduced_betti(v: &ToricVariety, mask: u32) -> Vec<usize> {
    let r = v.dim();
    // faces[k] = faces with k vertices, as bitmasks
    let mut faces: Vec<Vec<u32>> = vec![Vec::new(); r + 1];
    let mut seen = HashSet::new();
    for cone in &v.fan.max_cones {
        let inside: Vec<usize> = cone
            .iter()
            .copied()
            .filter(|&i| mask >> i & 1 == 1)
            .collect();
        for sub in 0u32..(1 << inside.len()) {
            let f: u32 = inside
                .iter()
                .enumerate()
                .filter(|(j, _)| sub >> j & 1 == 1)
                .fold(0, |acc, (_, &i)| acc | 1 << i);
            if seen.insert(f) {
                faces[f.count_ones() as usize].push(f);
            }
        }
    }
    for level in faces.iter_mut() {
        level.sort_unstable();
    }
    // rank of the boundary from k-vertex faces to (k-1)-vertex faces
    let boundary_rank = |k: usize| -> usize {
        if k == 0 || faces[k].is_empty() || faces[k - 1].is_empty() {
            return 0;
        }
        let index: std::collections::HashMap<u32, usize> = faces[k - 1]
            .iter()
            .enumerate()
            .map(|(i, &f)| (f, i))
            .collect();
        let rows: Vec<Vec<BigInt>> = faces[k]
            .iter()
            .map(|&f| {
                let mut row = vec![BigInt::from(0); faces[k - 1].len()];
                let mut sign = 1i64;
                for i in 0..32 {
                    if f >> i & 1 == 1 {
                        row[index[&(f & !(1 << i))]] = BigInt::from(sign);
                        sign = -sign;
                    }
                }
                row
            })
            .collect();
        exact_rank(&rows).rank
    };
    let ranks: Vec<usize> = (0..=r + 1)
        .map(|k| if k <= r { boundary_rank(k) } else { 0 })
        .collect();
    (0..=r)
        .map(|k| faces[k].len() - ranks[k] - ranks[k + 1])
        .collect()
}

fn betti_table(v: &ToricVariety) -> Result<&Vec<Vec<usize>>> {
    let n = v.n_rays();
    if n > MAX_RAYS {
        return Err(ToricError::Unsupported(format!(
            "cohomology supports at most {MAX_RAYS} rays, got {n}"
        )));
    }
    Ok(v.betti.get_or_init(|| {
        (0u32..1 << n)
            .into_par_iter()
            .map(|mask| reduced_betti(v, mask))
            .collect()
    }))
}

/// Full cohomology table `(h^0, ..., h^r)` of `O(D)` with the chamber audit.
pub fn graded_cohomology(v: &ToricVariety, d: &DivisorClass) -> Result<CohomologyTable> {
    let table = betti_table(v)?;
    let r = v.dim();
    let n = v.n_rays();
    let a = &d.coeffs;
    let masks: Vec<u32> = (0u32..1 << n)
        .filter(|&m| table[m as usize].iter().any(|&b| b > 0))
        .collect();
    let chambers: Vec<Option<SignChamber>> = masks
        .par_iter()
        .map(|&mask| -> Result<Option<SignChamber>> {
            let cons: Vec<(Vec<i64>, i64)> = (0..n)
                .map(|i| {
                    let u = &v.fan.rays[i];
                    if mask >> i & 1 == 1 {
                        (u.iter().map(|x| -x).collect(), a[i] + 1)
                    } else {
                        (u.clone(), -a[i])
                    }
                })
                .collect();
            let hs: Vec<Halfspace> = cons
                .iter()
                .map(|(c, b)| Halfspace::from_ints(c, *b))
                .collect();
            let bx = match integer_box(r, &hs) {
                Ok(Some(bx)) => bx,
                Ok(None) => return Ok(None),
                Err(ToricError::UnboundedPolytope) => {
                    return Err(ToricError::UnboundedChamber {
                        pattern: (0..n).filter(|i| mask >> i & 1 == 1).collect(),
                    })
                }
                Err(e) => return Err(e),
            };
            let count = count_in_box(&cons, &bx);
            if count == 0 {
                return Ok(None);
            }
            let betti = &table[mask as usize];
            Ok(Some(SignChamber {
                violated: (0..n).filter(|i| mask >> i & 1 == 1).collect(),
                lattice_count: count,
                contributions: (0..=r)
                    .filter(|&q| betti[q] > 0)
                    .map(|q| (q, betti[q]))
                    .collect(),
            }))
        })
        .collect::<Result<_>>()?;
    let chambers: Vec<SignChamber> = chambers.into_iter().flatten().collect();
    let mut h = vec![0u64; r + 1];
    for c in &chambers {
        for &(q, b) in &c.contributions {
            h[q] += c.lattice_count * b as u64;
        }
    }
    Ok(CohomologyTable { h, chambers })
}

/// Just `(h^0, ..., h^r)`.
pub fn cohomology(v: &ToricVariety, d: &DivisorClass) -> Result<Vec<u64>> {
    Ok(graded_cohomology(v, d)?.h)
}

/// `h^0(O(D))`, by counting lattice points of `P_D`.
pub fn h0(v: &ToricVariety, d: &DivisorClass) -> Result<u64> {
    match lattice_point_count(&DivisorPolytope::of(v, &d.coeffs)) {
        Ok(n) => Ok(n),
        // an unbounded P_D is possible only off the effective cone edge cases;
        // fall back to the chamber computation
        Err(ToricError::UnboundedPolytope) => Ok(graded_cohomology(v, d)?.h[0]),
        Err(e) => Err(e),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DualityCheck {
    pub holds: bool,
    pub first_mismatch: Option<usize>,
    pub direct: Vec<u64>,
    /// `h^{r-q}(-D - beta_0)` listed by `q`.
    pub dual: Vec<u64>,
}

/// Compares `h^q(D)` with `h^{r-q}(K - D)` for all `q`.
pub fn serre_duality_check(v: &ToricVariety, d: &DivisorClass) -> Result<DualityCheck> {
    let direct = cohomology(v, d)?;
    let k_minus_d = v.combine(&[(-1, d), (-1, &v.anticanonical())]);
    let mut dual = cohomology(v, &k_minus_d)?;
    dual.reverse();
    let first_mismatch = (0..direct.len()).find(|&q| direct[q] != dual[q]);
    Ok(DualityCheck {
        holds: first_mismatch.is_none(),
        first_mismatch,
        direct,
        dual,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MinkowskiCheck {
    pub holds: bool,
    /// A lattice point of `P_{a1+a2}` that is not a sum.
    pub counterexample: Option<Vec<i64>>,
}

/// Whether every lattice point of `P_{a1+a2}` is a sum of lattice points of
/// `P_{a1}` and `P_{a2}`; both classes must be nef.
pub fn minkowski_decomposition_check(
    v: &ToricVariety,
    a1: &DivisorClass,
    a2: &DivisorClass,
) -> Result<MinkowskiCheck> {
    if !v.is_nef(a1) || !v.is_nef(a2) {
        return Err(ToricError::NotNef);
    }
    let sum: Vec<i64> = a1
        .coeffs
        .iter()
        .zip(&a2.coeffs)
        .map(|(x, y)| x + y)
        .collect();
    let p1 = lattice_points(&DivisorPolytope::of(v, &a1.coeffs))?;
    let p2: HashSet<Vec<i64>> = lattice_points(&DivisorPolytope::of(v, &a2.coeffs))?
        .into_iter()
        .collect();
    let p12 = lattice_points(&DivisorPolytope::of(v, &sum))?;
    let counterexample = p12.into_iter().find(|p| {
        !p1.iter().any(|q| {
            let diff: Vec<i64> = p.iter().zip(q).map(|(x, y)| x - y).collect();
            p2.contains(&diff)
        })
    });
    Ok(MinkowskiCheck {
        holds: counterexample.is_none(),
        counterexample,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fan::star_subdivision;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::sync::LazyLock;

    static P3: LazyLock<ToricVariety> =
        LazyLock::new(|| ToricVariety::new(crate::fan::tests::p3()).unwrap());
    static WP: LazyLock<ToricVariety> =
        LazyLock::new(|| ToricVariety::new(crate::fan::tests::wp1122()).unwrap());
    static P1P2: LazyLock<ToricVariety> =
        LazyLock::new(|| ToricVariety::new(crate::fan::tests::p1xp2()).unwrap());
    static BLOWUP: LazyLock<ToricVariety> = LazyLock::new(|| {
        ToricVariety::new(star_subdivision(&crate::fan::tests::p3(), &[1, 1, 0]).unwrap()).unwrap()
    });

    fn binom(n: i64, k: i64) -> u64 {
        if k < 0 || n < k {
            return 0;
        }
        (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
    }

    /// `h^q(P^k, O(d))` by the classical formulas.
    fn proj(k: i64, d: i64) -> Vec<u64> {
        let mut h = vec![0; k as usize + 1];
        if d >= 0 {
            h[0] = binom(d + k, k);
        }
        if d < -k {
            h[k as usize] = binom(-d - 1, k);
        }
        h
    }

    /// Kuenneth: `H(P^1 x P^2, O(a, b)) = H(P^1, O(a)) (x) H(P^2, O(b))`.
    fn kunneth(a: i64, b: i64) -> Vec<u64> {
        let (x, y) = (proj(1, a), proj(2, b));
        let mut h = vec![0; 4];
        for (i, xi) in x.iter().enumerate() {
            for (j, yj) in y.iter().enumerate() {
                h[i + j] += xi * yj;
            }
        }
        h
    }

    /// Exponent vectors of weighted degree `d`.
    fn brute_monomials(weights: &[i64], d: i64) -> u64 {
        fn rec(w: &[i64], d: i64) -> u64 {
            match w.split_first() {
                None => (d == 0) as u64,
                Some((&first, rest)) => (0..=d / first).map(|e| rec(rest, d - e * first)).sum(),
            }
        }
        if d < 0 {
            0
        } else {
            rec(weights, d)
        }
    }

    #[test]
    fn lattice_point_examples() {
        let p = &*P3;
        let h = p.from_class_coords(&[1]).unwrap();
        assert_eq!(
            lattice_points(&DivisorPolytope::of(p, &h.coeffs))
                .unwrap()
                .len(),
            4
        );
        let four = p.scale(4, &h);
        assert_eq!(
            lattice_point_count(&DivisorPolytope::of(p, &four.coeffs)).unwrap(),
            brute_monomials(&[1, 1, 1, 1], 4)
        );
        assert_eq!(brute_monomials(&[1, 1, 1, 1], 4), 35);
        let w = &*WP;
        let eta = w.from_class_coords(&[2]).unwrap();
        assert_eq!(
            lattice_points(&DivisorPolytope::of(w, &eta.coeffs))
                .unwrap()
                .len(),
            5
        );
        // Weil divisors too
        for d in 0..12 {
            let c = w.from_class_coords(&[d]).unwrap();
            assert_eq!(
                lattice_point_count(&DivisorPolytope::of(w, &c.coeffs)).unwrap(),
                brute_monomials(&[1, 1, 2, 2], d)
            );
        }
    }

    #[test]
    fn unbounded_polytope_is_an_error() {
        let p = DivisorPolytope {
            dim: 2,
            normals: vec![vec![1, 0], vec![0, 1]],
            offsets: vec![0, 0],
        };
        assert_eq!(lattice_points(&p), Err(ToricError::UnboundedPolytope));
        let empty = DivisorPolytope {
            dim: 1,
            normals: vec![vec![1], vec![-1]],
            offsets: vec![1, 0],
        };
        assert!(lattice_points(&empty).unwrap().is_empty());
    }

    #[test]
    fn projective_space_tables() {
        let p = &*P3;
        for d in -8..=6 {
            let c = p.from_class_coords(&[d]).unwrap();
            assert_eq!(cohomology(p, &c).unwrap(), proj(3, d), "degree {d}");
        }
        let t = graded_cohomology(p, &p.from_class_coords(&[-4]).unwrap()).unwrap();
        assert_eq!(t.h, vec![0, 0, 0, 1]);
        assert_eq!(t.chambers.len(), 1);
        assert_eq!(t.chambers[0].violated, vec![0, 1, 2, 3]);
    }

    #[test]
    fn weighted_projective_space() {
        let w = &*WP;
        // h^0 of O(d eta_0) counts weighted monomials, h^3 is dual (K = -6 eta_0)
        for d in -14..=8 {
            let c = w.from_class_coords(&[d]).unwrap();
            let h = cohomology(w, &c).unwrap();
            assert_eq!(h[0], brute_monomials(&[1, 1, 2, 2], d));
            assert_eq!(h[3], brute_monomials(&[1, 1, 2, 2], -d - 6));
            assert_eq!((h[1], h[2]), (0, 0));
        }
    }

    #[test]
    fn kunneth_oracle_on_p1xp2() {
        let v = &*P1P2;
        // class coords are (P^2 degree, P^1 degree)
        assert_eq!(v.ray_divisor(0).class_coords, vec![1, 0]);
        assert_eq!(v.ray_divisor(3).class_coords, vec![0, 1]);
        assert_eq!(
            cohomology(v, &v.from_class_coords(&[1, -2]).unwrap()).unwrap(),
            vec![0, 3, 0, 0]
        );
        for b in -5..=3 {
            for a in -4..=3 {
                let h = cohomology(v, &v.from_class_coords(&[b, a]).unwrap()).unwrap();
                assert_eq!(h, kunneth(a, b), "O({a},{b})");
            }
        }
    }

    #[test]
    fn duality_and_minkowski_examples() {
        let p = &*P3;
        let h = p.from_class_coords(&[1]).unwrap();
        assert!(serre_duality_check(p, &p.scale(2, &h)).unwrap().holds);
        let w = &*WP;
        assert!(
            serre_duality_check(w, &w.from_class_coords(&[2]).unwrap())
                .unwrap()
                .holds
        );

        assert!(
            minkowski_decomposition_check(p, &h, &p.scale(3, &h))
                .unwrap()
                .holds
        );
        assert!(
            minkowski_decomposition_check(p, &h, &p.zero())
                .unwrap()
                .holds
        );
        let v = &*P1P2;
        let h1 = v.ray_divisor(0);
        let h2 = v.ray_divisor(3);
        assert!(
            minkowski_decomposition_check(v, &v.add(&h1, &h2), &h1)
                .unwrap()
                .holds
        );
        assert_eq!(
            minkowski_decomposition_check(p, &p.scale(-1, &h), &h),
            Err(ToricError::NotNef)
        );
        // Weil classes on the weighted space are not Minkowski-decomposable
        let eta0 = w.from_class_coords(&[1]).unwrap();
        let m = minkowski_decomposition_check(w, &eta0, &eta0).unwrap();
        assert!(!m.holds);
        assert!(m.counterexample.is_some());
    }

    #[test]
    fn demazure_on_blowup_nef_classes() {
        let v = &*BLOWUP;
        let basis = v.nef_basis().unwrap().to_vec();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let (x, y) = (rng.gen_range(0..5), rng.gen_range(0..5));
            let d = v.combine(&[(x, &basis[0]), (y, &basis[1])]);
            let t = graded_cohomology(v, &d).unwrap();
            assert!(t.higher_vanish());
            assert_eq!(
                t.h[0],
                lattice_point_count(&DivisorPolytope::of(v, &d.coeffs)).unwrap()
            );
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn serre_duality_random(which in 0usize..4, coeffs in proptest::collection::vec(-4i64..=4, 5)) {
            let v: &ToricVariety = [&*P3, &*WP, &*P1P2, &*BLOWUP][which];
            let d = v.divisor(&coeffs[..v.n_rays()]).unwrap();
            let check = serre_duality_check(v, &d).unwrap();
            prop_assert!(check.holds, "{:?}", check);
        }

        #[test]
        fn representative_independence(which in 0usize..4, coeffs in proptest::collection::vec(-4i64..=4, 5), m in proptest::collection::vec(-3i64..=3, 3)) {
            let v: &ToricVariety = [&*P3, &*WP, &*P1P2, &*BLOWUP][which];
            let d = v.divisor(&coeffs[..v.n_rays()]).unwrap();
            let shift = v.principal_divisor(&m);
            let moved: Vec<i64> = d.coeffs.iter().zip(&shift).map(|(a, b)| a + b).collect();
            let e = v.divisor(&moved).unwrap();
            prop_assert_eq!(cohomology(v, &d).unwrap(), cohomology(v, &e).unwrap());
        }
    }
}
