//! Graded pieces of the Cox ring, sections, Jacobian ideals and
//! multiplication maps.

use std::collections::{BTreeMap, HashMap, HashSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cohomology::{lattice_points, DivisorPolytope};
use crate::divisor::{DivisorClass, ToricVariety};
use crate::error::{Result, ToricError};
use crate::lattice::exact_rank;

/// Monomial basis of `S_gamma`, exponents sorted lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GradedBasis {
    pub degree: DivisorClass,
    pub exponents: Vec<Vec<i64>>,
}

impl GradedBasis {
    pub fn dim(&self) -> usize {
        self.exponents.len()
    }

    fn index(&self) -> HashMap<&[i64], usize> {
        self.exponents
            .iter()
            .enumerate()
            .map(|(i, e)| (e.as_slice(), i))
            .collect()
    }
}

/// Exponent vectors `a >= 0` of class `gamma`, via `a = <m, u> + d` over the
/// lattice points `m` of `P_d` for the representative `d` of `gamma`.
pub fn graded_basis(v: &ToricVariety, gamma: &DivisorClass) -> Result<GradedBasis> {
    let d = &gamma.coeffs;
    let mut exponents: Vec<Vec<i64>> = lattice_points(&DivisorPolytope::of(v, d))?
        .into_iter()
        .map(|m| {
            v.fan
                .rays
                .iter()
                .zip(d)
                .map(|(u, a)| u.iter().zip(&m).map(|(x, y)| x * y).sum::<i64>() + a)
                .collect()
        })
        .collect();
    exponents.sort();
    Ok(GradedBasis {
        degree: gamma.clone(),
        exponents,
    })
}

/// A homogeneous element of the Cox ring with exact rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoxPolynomial {
    pub degree: DivisorClass,
    pub terms: BTreeMap<Vec<i64>, BigRational>,
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    exps: Vec<i64>,
    num: i64,
    den: i64,
}

#[derive(Serialize, Deserialize)]
struct PolyJson {
    degree: Vec<i64>,
    terms: Vec<TermJson>,
}

impl CoxPolynomial {
    /// Checks that every exponent vector is nonnegative and of class `degree`.
    pub fn new(
        v: &ToricVariety,
        degree: DivisorClass,
        terms: BTreeMap<Vec<i64>, BigRational>,
    ) -> Result<Self> {
        for e in terms.keys() {
            if e.iter().any(|&x| x < 0) {
                return Err(ToricError::Inconsistent(format!(
                    "negative exponent in {e:?}"
                )));
            }
            if v.divisor(e)? != degree {
                return Err(ToricError::Inconsistent(format!(
                    "monomial {e:?} is not of the stated degree"
                )));
            }
        }
        let terms = terms.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        Ok(Self { degree, terms })
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `d f / d x_rho`, of degree `deg f - D_rho`.
    pub fn derivative(&self, v: &ToricVariety, rho: usize) -> CoxPolynomial {
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            if e[rho] == 0 {
                continue;
            }
            let mut f = e.clone();
            f[rho] -= 1;
            terms.insert(f, c * BigRational::from_integer(e[rho].into()));
        }
        CoxPolynomial {
            degree: v.sub(&self.degree, &v.ray_divisor(rho)),
            terms,
        }
    }

    /// Serialized as `{"degree": class coordinates, "terms": [{"exps", "num", "den"}]}`.
    pub fn to_json(&self) -> serde_json::Value {
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| TermJson {
                exps: e.clone(),
                num: i64::try_from(c.numer()).expect("coefficient fits in i64"),
                den: i64::try_from(c.denom()).expect("coefficient fits in i64"),
            })
            .collect();
        serde_json::to_value(PolyJson {
            degree: self.degree.class_coords.clone(),
            terms,
        })
        .expect("polynomial serializes")
    }

    pub fn from_json(v: &ToricVariety, text: &str) -> Result<Self> {
        let p: PolyJson = serde_json::from_str(text)
            .map_err(|e| ToricError::Inconsistent(format!("bad polynomial: {e}")))?;
        let degree = v.from_class_coords(&p.degree)?;
        let mut terms = BTreeMap::new();
        for t in p.terms {
            if t.den == 0 {
                return Err(ToricError::Inconsistent("zero denominator".into()));
            }
            let c = BigRational::new(t.num.into(), t.den.into());
            *terms.entry(t.exps).or_insert_with(BigRational::zero) += c;
        }
        Self::new(v, degree, terms)
    }
}

/// Coefficients uniform in `[-9, 9] \ {0}` on every monomial of `S_beta`,
/// drawn from a ChaCha8 stream seeded with `seed`.
pub fn random_section(v: &ToricVariety, beta: &DivisorClass, seed: u64) -> Result<CoxPolynomial> {
    let basis = graded_basis(v, beta)?;
    if basis.exponents.is_empty() {
        return Err(ToricError::EmptyBasis);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let terms = basis
        .exponents
        .into_iter()
        .map(|e| {
            let mag: i64 = rng.gen_range(1..=9);
            let c = if rng.gen_bool(0.5) { mag } else { -mag };
            (e, BigRational::from_integer(c.into()))
        })
        .collect();
    Ok(CoxPolynomial {
        degree: beta.clone(),
        terms,
    })
}

/// `sum_rho x_rho^{k_rho}` with `k_rho D_rho = beta` for every ray, when such
/// powers exist.
pub fn fermat_section(v: &ToricVariety, beta: &DivisorClass) -> Result<CoxPolynomial> {
    let n = v.n_rays();
    let mut terms = BTreeMap::new();
    for rho in 0..n {
        let d = v.ray_divisor(rho);
        let k = (1..=64).find(|&k| v.scale(k, &d) == *beta).ok_or_else(|| {
            ToricError::Unsupported(format!("no power of x_{rho} has the requested degree"))
        })?;
        let mut e = vec![0i64; n];
        e[rho] = k;
        terms.insert(e, BigRational::one());
    }
    CoxPolynomial::new(v, beta.clone(), terms)
}

fn add_exps(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// Rows `monomial * d f / d x_rho` expressed in the basis of `S_gamma`.
fn jacobian_rows(
    v: &ToricVariety,
    f: &CoxPolynomial,
    target: &GradedBasis,
) -> Result<Vec<Vec<BigRational>>> {
    let idx = target.index();
    let mut rows = Vec::new();
    for rho in 0..v.n_rays() {
        let df = f.derivative(v, rho);
        if df.terms.is_empty() {
            continue;
        }
        let cofactor = v.sub(&target.degree, &df.degree);
        let mons = graded_basis(v, &cofactor)?;
        for m in &mons.exponents {
            let mut row = vec![BigRational::zero(); target.dim()];
            for (e, c) in &df.terms {
                let p = add_exps(m, e);
                let j = idx[p.as_slice()];
                row[j] += c;
            }
            rows.push(row);
        }
    }
    Ok(rows)
}

fn rational_rows_rank(rows: &[Vec<BigRational>]) -> usize {
    if rows.is_empty() || rows[0].is_empty() {
        return 0;
    }
    let ints: Vec<Vec<BigInt>> = rows
        .par_iter()
        .map(|row| {
            let l = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            row.iter().map(|x| (x * &l).to_integer()).collect()
        })
        .collect();
    exact_rank(&ints).rank
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct JacobianIdealSlice {
    pub degree: Vec<i64>,
    pub spanning_set: usize,
    pub dim: usize,
}

/// `J(f)_gamma` as a subspace of `S_gamma`.
pub fn jacobian_slice(
    v: &ToricVariety,
    f: &CoxPolynomial,
    gamma: &DivisorClass,
) -> Result<JacobianIdealSlice> {
    let target = graded_basis(v, gamma)?;
    let rows = jacobian_rows(v, f, &target)?;
    Ok(JacobianIdealSlice {
        degree: gamma.class_coords.clone(),
        spanning_set: rows.len(),
        dim: rational_rows_rank(&rows),
    })
}

/// `dim R(f)_gamma = dim S_gamma - dim J(f)_gamma`.
pub fn jacobian_ring_dimension(
    v: &ToricVariety,
    f: &CoxPolynomial,
    gamma: &DivisorClass,
) -> Result<usize> {
    let s = graded_basis(v, gamma)?.dim();
    Ok(s - jacobian_slice(v, f, gamma)?.dim)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GenericDimension {
    pub dim: usize,
    pub seeds: Vec<u64>,
    pub dims: Vec<usize>,
    pub stable: bool,
    pub note: &'static str,
}

/// `dim R(f)_gamma` for random sections of `beta`, reseeding until two
/// consecutive samples agree (at most five). Reports the minimum seen, which
/// is the generic value.
pub fn generic_jacobian_dimension(
    v: &ToricVariety,
    beta: &DivisorClass,
    gamma: &DivisorClass,
    seed: u64,
) -> Result<GenericDimension> {
    let mut seeds = Vec::new();
    let mut dims = Vec::new();
    let mut stable = false;
    for attempt in 0..5u64 {
        let s = seed.wrapping_add(attempt);
        let f = random_section(v, beta, s)?;
        let d = jacobian_ring_dimension(v, &f, gamma)?;
        seeds.push(s);
        dims.push(d);
        if dims.len() >= 2 && dims[dims.len() - 2] == d {
            stable = true;
            break;
        }
    }
    Ok(GenericDimension {
        dim: *dims.iter().min().expect("at least one sample"),
        seeds,
        dims,
        stable,
        note: "quasi-smoothness assumed (generic)",
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MultMapResult {
    pub surjective: bool,
    pub cokernel_dim: usize,
    pub target_dim: usize,
    pub modulo_jacobian: bool,
}

/// Surjectivity of `S_g1 (x) S_g2 -> S_{g1+g2}`, or of the induced map on
/// `R(f)` when `f` is given (image plus `J(f)` spans the target).
pub fn mult_map_surjective(
    v: &ToricVariety,
    f: Option<&CoxPolynomial>,
    g1: &DivisorClass,
    g2: &DivisorClass,
) -> Result<MultMapResult> {
    let b1 = graded_basis(v, g1)?;
    let b2 = graded_basis(v, g2)?;
    let target = graded_basis(v, &v.add(g1, g2))?;
    let mut hit = HashSet::new();
    for a in &b1.exponents {
        for b in &b2.exponents {
            hit.insert(add_exps(a, b));
        }
    }
    let missing: Vec<usize> = (0..target.dim())
        .filter(|&i| !hit.contains(&target.exponents[i]))
        .collect();
    let cokernel_dim = match f {
        None => missing.len(),
        Some(_) if missing.is_empty() => 0,
        Some(f) => {
            let rows = jacobian_rows(v, f, &target)?;
            let restricted: Vec<Vec<BigRational>> = rows
                .into_iter()
                .map(|r| missing.iter().map(|&j| r[j].clone()).collect())
                .collect();
            missing.len() - rational_rows_rank(&restricted)
        }
    };
    Ok(MultMapResult {
        surjective: cokernel_dim == 0,
        cokernel_dim,
        target_dim: target.dim(),
        modulo_jacobian: f.is_some(),
    })
}

/// Rank of `S_g1 (x) S_g2 -> S_{g1+g2}` (number of distinct products).
pub fn mult_map_rank(v: &ToricVariety, g1: &DivisorClass, g2: &DivisorClass) -> Result<usize> {
    let r = mult_map_surjective(v, None, g1, g2)?;
    Ok(r.target_dim - r.cokernel_dim)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cohomology::{lattice_point_count, minkowski_decomposition_check};
    use crate::fan::star_subdivision;
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

    /// Brute-force exponent vectors with sum of `w_i a_i = d`.
    fn weighted(weights: &[i64], d: i64) -> Vec<Vec<i64>> {
        if weights.is_empty() {
            return if d == 0 { vec![vec![]] } else { vec![] };
        }
        let mut out = Vec::new();
        for e in 0..=d.max(-1) / weights[0] {
            for mut rest in weighted(&weights[1..], d - e * weights[0]) {
                rest.insert(0, e);
                out.push(rest);
            }
        }
        out
    }

    #[test]
    fn bases_match_enumeration() {
        let p = &*P3;
        let mut two = weighted(&[1, 1, 1, 1], 2);
        two.sort();
        assert_eq!(
            graded_basis(p, &p.from_class_coords(&[2]).unwrap())
                .unwrap()
                .exponents,
            two
        );
        assert_eq!(two.len(), 10);
        let w = &*WP;
        for d in 0..=8 {
            let mut e = weighted(&[1, 1, 2, 2], d);
            e.sort();
            assert_eq!(
                graded_basis(w, &w.from_class_coords(&[d]).unwrap())
                    .unwrap()
                    .exponents,
                e
            );
        }
        assert_eq!(
            graded_basis(w, &w.from_class_coords(&[2]).unwrap())
                .unwrap()
                .dim(),
            5
        );
        for v in [&*P3, &*WP, &*P1P2, &*BLOWUP] {
            let b = graded_basis(v, &v.zero()).unwrap();
            assert_eq!(b.exponents, vec![vec![0; v.n_rays()]]);
        }
        assert!(graded_basis(p, &p.from_class_coords(&[-1]).unwrap())
            .unwrap()
            .exponents
            .is_empty());
    }

    #[test]
    fn basis_dimension_is_polytope_count() {
        for v in [&*P1P2, &*BLOWUP] {
            let gens = v.nef_basis().unwrap().to_vec();
            for a in 0..4 {
                for b in 0..4 {
                    let d = v.combine(&[(a, &gens[0]), (b, &gens[1])]);
                    let basis = graded_basis(v, &d).unwrap();
                    assert_eq!(
                        basis.dim() as u64,
                        lattice_point_count(&DivisorPolytope::of(v, &d.coeffs)).unwrap()
                    );
                    assert!(basis.exponents.iter().all(|e| v.divisor(e).unwrap() == d));
                }
            }
        }
    }

    #[test]
    fn fermat_quartic_jacobian() {
        let p = &*P3;
        let f = fermat_section(p, &p.from_class_coords(&[4]).unwrap()).unwrap();
        assert_eq!(f.len(), 4);
        let dim =
            |d: i64| jacobian_ring_dimension(p, &f, &p.from_class_coords(&[d]).unwrap()).unwrap();
        assert_eq!(dim(0), 1);
        assert_eq!(dim(4), 35 - 16);
        assert_eq!(dim(9), 0);
        // Hilbert series of C[x]/(x_i^3): coefficients of ((1-t^3)/(1-t))^4
        let series = [1, 4, 10, 16, 19, 16, 10, 4, 1];
        for (d, &expected) in series.iter().enumerate() {
            assert_eq!(dim(d as i64), expected, "degree {d}");
        }
    }

    #[test]
    fn multiplication_maps() {
        let p = &*P3;
        let h = |d| p.from_class_coords(&[d]).unwrap();
        let f = fermat_section(p, &h(5)).unwrap();
        assert!(
            mult_map_surjective(p, Some(&f), &h(5), &h(1))
                .unwrap()
                .surjective
        );
        assert!(
            mult_map_surjective(p, None, &h(1), &h(3))
                .unwrap()
                .surjective
        );
        assert!(
            mult_map_surjective(p, None, &h(4), &p.zero())
                .unwrap()
                .surjective
        );
        // Weil degrees on the weighted space: S_1 (x) S_1 misses x_2, x_3
        let w = &*WP;
        let r = mult_map_surjective(
            w,
            None,
            &w.from_class_coords(&[1]).unwrap(),
            &w.from_class_coords(&[1]).unwrap(),
        )
        .unwrap();
        assert_eq!((r.cokernel_dim, r.target_dim), (2, 5));
        // but modulo the Jacobian of x0^2 + x1^2 + x2 + x3 nothing is left
        let two = w.from_class_coords(&[2]).unwrap();
        let g = fermat_section(w, &two).unwrap();
        let r = mult_map_surjective(
            w,
            Some(&g),
            &w.from_class_coords(&[1]).unwrap(),
            &w.from_class_coords(&[1]).unwrap(),
        )
        .unwrap();
        assert!(r.surjective);
    }

    #[test]
    fn monomial_map_agrees_with_minkowski() {
        for v in [&*P1P2, &*BLOWUP, &*P3] {
            let gens = v.nef_basis().unwrap().to_vec();
            let classes: Vec<DivisorClass> = (0..3i64)
                .flat_map(|a| (0..3i64).map(move |b| (a, b)))
                .map(|(a, b)| {
                    let terms: Vec<(i64, &DivisorClass)> = [a, b].into_iter().zip(&gens).collect();
                    v.combine(&terms)
                })
                .collect();
            for a in &classes {
                for b in &classes {
                    let m = mult_map_surjective(v, None, a, b).unwrap().surjective;
                    assert_eq!(m, minkowski_decomposition_check(v, a, b).unwrap().holds);
                }
            }
        }
    }

    #[test]
    fn sections_are_deterministic() {
        let p = &*P3;
        let four = p.from_class_coords(&[4]).unwrap();
        let f = random_section(p, &four, 1).unwrap();
        assert_eq!(f.len(), 35);
        assert_eq!(f, random_section(p, &four, 1).unwrap());
        assert_ne!(f, random_section(p, &four, 2).unwrap());
        assert!(f.terms.values().all(|c| {
            let x = c.to_integer();
            x != BigInt::zero() && x >= BigInt::from(-9) && x <= BigInt::from(9)
        }));
        let w = &*WP;
        let b0 = w.anticanonical();
        assert_eq!(
            random_section(w, &b0, 7).unwrap().len(),
            weighted(&[1, 1, 2, 2], 6).len()
        );
        assert_eq!(weighted(&[1, 1, 2, 2], 6).len(), 30);
        assert_eq!(
            random_section(p, &p.from_class_coords(&[-1]).unwrap(), 0),
            Err(ToricError::EmptyBasis)
        );
    }

    #[test]
    fn polynomial_json_roundtrip() {
        let p = &*P3;
        let f = random_section(p, &p.from_class_coords(&[2]).unwrap(), 5).unwrap();
        let text = f.to_json().to_string();
        assert_eq!(CoxPolynomial::from_json(p, &text).unwrap(), f);
        let bad = r#"{"degree":[2],"terms":[{"exps":[1,0,0,0],"num":1,"den":1}]}"#;
        assert!(CoxPolynomial::from_json(p, bad).is_err());
    }

    #[test]
    fn generic_dimension_stabilizes() {
        let p = &*P3;
        let four = p.from_class_coords(&[4]).unwrap();
        let g = generic_jacobian_dimension(p, &four, &four, 1).unwrap();
        assert!(g.stable);
        assert_eq!(g.dim, 19);
    }
}
