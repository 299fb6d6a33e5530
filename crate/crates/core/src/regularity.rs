//! Castelnuovo-Mumford regularity of line bundles, the Oda window check and
//! the vanishing triple used by the multiplication-map arguments.

use rayon::prelude::*;
use serde::Serialize;

use crate::cohomology::{cohomology, h0, minkowski_decomposition_check};
use crate::divisor::{DivisorClass, ToricVariety};
use crate::error::{Result, ToricError};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RegularityVerdict {
    pub m: i64,
    pub passed: bool,
    /// `(q, h^q(F + (m - q) L))` for `q = 1..=r`.
    pub twists: Vec<(usize, u64)>,
    /// First `(q, class coordinates of F + (m - q) L)` with nonzero cohomology.
    pub failing_twist: Option<(usize, Vec<i64>)>,
}

fn require_ample_cartier(v: &ToricVariety, l: &DivisorClass, what: &str) -> Result<()> {
    if !v.is_cartier(l) {
        return Err(ToricError::Hypothesis(format!("{what} is not Cartier")));
    }
    if !v.is_ample(l) {
        return Err(ToricError::Hypothesis(format!("{what} is not ample")));
    }
    Ok(())
}

/// `F` is m-regular with respect to `L` when `h^q(F + (m - q) L) = 0` for
/// every `q >= 1`.
pub fn is_m_regular(
    v: &ToricVariety,
    f: &DivisorClass,
    l: &DivisorClass,
    m: i64,
) -> Result<RegularityVerdict> {
    require_ample_cartier(v, l, "reference class")?;
    if !v.is_cartier(f) {
        return Err(ToricError::Hypothesis(
            "subject class is not Cartier".into(),
        ));
    }
    let mut twists = Vec::new();
    let mut failing_twist = None;
    for q in 1..=v.dim() {
        let t = v.combine(&[(1, f), (m - q as i64, l)]);
        let h = cohomology(v, &t)?[q];
        if h != 0 && failing_twist.is_none() {
            failing_twist = Some((q, t.class_coords.clone()));
        }
        twists.push((q, h));
    }
    Ok(RegularityVerdict {
        m,
        passed: failing_twist.is_none(),
        twists,
        failing_twist,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuickCriteria {
    /// `h^0((r-1) eta - beta_0)`
    pub h0_zero_test: u64,
    /// `h^0(r eta - beta_0)`
    pub h0_minus_one_test: u64,
    pub zero_regular: bool,
    pub minus_one_regular: bool,
}

/// Regularity of an ample class with respect to itself, read off a single
/// `h^0` each.
pub fn quick_criteria(v: &ToricVariety, eta: &DivisorClass) -> Result<QuickCriteria> {
    require_ample_cartier(v, eta, "eta")?;
    let r = v.dim() as i64;
    let b0 = v.anticanonical();
    let h0_zero_test = h0(v, &v.combine(&[(r - 1, eta), (-1, &b0)]))?;
    let h0_minus_one_test = h0(v, &v.combine(&[(r, eta), (-1, &b0)]))?;
    Ok(QuickCriteria {
        h0_zero_test,
        h0_minus_one_test,
        zero_regular: h0_zero_test == 0,
        minus_one_regular: h0_minus_one_test == 0,
    })
}

/// Nef cone generators scaled to their first Cartier multiple.
pub fn cartier_nef_generators(v: &ToricVariety) -> Result<Vec<DivisorClass>> {
    let gens = v.nef_cone_generators()?;
    let index_bound = v
        .cone_multiplicity
        .iter()
        .fold(1u64, |acc, &m| num_integer::lcm(acc, m)) as i64;
    gens.iter()
        .map(|g| {
            (1..=index_bound)
                .map(|k| v.scale(k, g))
                .find(|c| v.is_cartier(c))
                .ok_or_else(|| {
                    ToricError::Inconsistent("no Cartier multiple of a nef generator".into())
                })
        })
        .collect()
}

/// All `sum c_i g_i` with `0 <= c_i <= bound`, in lexicographic order of `c`.
fn window(v: &ToricVariety, gens: &[DivisorClass], bound: i64) -> Vec<WindowClass> {
    let mut out = Vec::new();
    let mut c = vec![0i64; gens.len()];
    loop {
        let terms: Vec<(i64, &DivisorClass)> = c.iter().copied().zip(gens).collect();
        out.push((c.clone(), v.combine(&terms)));
        let mut i = gens.len();
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if c[i] < bound {
                c[i] += 1;
                c[i + 1..].iter_mut().for_each(|x| *x = 0);
                break;
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassificationRow {
    pub name: String,
    pub classes_scanned: usize,
    /// Nef-basis coordinates of the first primitive ample Cartier class found
    /// with the property, if any.
    pub zero_regular: Option<Vec<i64>>,
    pub minus_one_regular: Option<Vec<i64>>,
    pub scope: &'static str,
}

/// For each variety, scans primitive ample Cartier classes with nef-basis
/// coefficients in `0..=bound` for 0- and (-1)-regularity.
pub fn catalog_classification(
    entries: &[(&str, &ToricVariety)],
    bound: i64,
) -> Result<Vec<ClassificationRow>> {
    entries
        .iter()
        .map(|(name, v)| {
            let basis = v.nef_basis().ok_or(ToricError::EmptyBasis)?.to_vec();
            let mut row = ClassificationRow {
                name: name.to_string(),
                classes_scanned: 0,
                zero_regular: None,
                minus_one_regular: None,
                scope: "verified on window",
            };
            for (c, d) in window(v, &basis, bound) {
                if !v.is_cartier(&d) || !v.is_ample(&d) || !v.is_primitive_cartier(&d) {
                    continue;
                }
                row.classes_scanned += 1;
                let q = quick_criteria(v, &d)?;
                if q.zero_regular && row.zero_regular.is_none() {
                    row.zero_regular = Some(c.clone());
                }
                if q.minus_one_regular && row.minus_one_regular.is_none() {
                    row.minus_one_regular = Some(c);
                }
            }
            Ok(row)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OdaFailure {
    pub ample: Vec<i64>,
    pub nef: Vec<i64>,
    pub witness: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OdaWindowReport {
    pub bound: i64,
    /// Class coordinates of the Cartier nef generators spanning the window.
    pub generators: Vec<Vec<i64>>,
    pub pairs_checked: usize,
    pub failures: Vec<OdaFailure>,
    pub scope: &'static str,
}

/// A class of an Oda window with its coordinates in the generators.
type WindowClass = (Vec<i64>, DivisorClass);

/// Minkowski decomposition over every pair (ample, nef) of Cartier classes
/// whose coordinates in the Cartier nef generators lie in `0..=bound`.
pub fn oda_window_check(v: &ToricVariety, bound: i64) -> Result<OdaWindowReport> {
    let gens = cartier_nef_generators(v)?;
    let classes = window(v, &gens, bound);
    let pairs: Vec<(&WindowClass, &WindowClass)> = classes
        .iter()
        .filter(|(_, a)| v.is_ample(a))
        .flat_map(|a| classes.iter().map(move |b| (a, b)))
        .collect();
    let results: Vec<Option<OdaFailure>> = pairs
        .par_iter()
        .map(|((ca, a), (cb, b))| -> Result<Option<OdaFailure>> {
            let check = minkowski_decomposition_check(v, a, b)?;
            Ok(check.counterexample.map(|witness| OdaFailure {
                ample: ca.clone(),
                nef: cb.clone(),
                witness,
            }))
        })
        .collect::<Result<_>>()?;
    Ok(OdaWindowReport {
        bound,
        generators: gens.iter().map(|g| g.class_coords.clone()).collect(),
        pairs_checked: pairs.len(),
        failures: results.into_iter().flatten().collect(),
        scope: "verified on window",
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VanishingTriple {
    pub h1_beta_minus_eta: u64,
    pub h2_beta_minus_eta: u64,
    pub h2_beta_minus_2eta: u64,
    pub holds: bool,
    /// Sufficient condition: `beta - 2 eta` nef.
    pub beta_minus_2eta_nef: bool,
    /// Sufficient condition: `beta` 0-regular with respect to `eta` (only
    /// decided when `eta` is ample).
    pub beta_zero_regular: Option<bool>,
}

/// `h^1(beta - eta) = h^2(beta - eta) = h^2(beta - 2 eta) = 0`, together with
/// the two sufficient conditions.
pub fn vanishing_triple(
    v: &ToricVariety,
    beta: &DivisorClass,
    eta: &DivisorClass,
) -> Result<VanishingTriple> {
    if !v.is_cartier(beta) || !v.is_cartier(eta) {
        return Err(ToricError::Hypothesis(
            "beta and eta must be Cartier".into(),
        ));
    }
    let b1 = cohomology(v, &v.sub(beta, eta))?;
    let b2 = cohomology(v, &v.combine(&[(1, beta), (-2, eta)]))?;
    let beta_zero_regular = if v.is_ample(eta) {
        Some(is_m_regular(v, beta, eta, 0)?.passed)
    } else {
        None
    };
    Ok(VanishingTriple {
        h1_beta_minus_eta: b1[1],
        h2_beta_minus_eta: b1[2],
        h2_beta_minus_2eta: b2[2],
        holds: b1[1] == 0 && b1[2] == 0 && b2[2] == 0,
        beta_minus_2eta_nef: v.is_nef(&v.combine(&[(1, beta), (-2, eta)])),
        beta_zero_regular,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
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

    #[test]
    fn hyperplane_of_p3() {
        let p = &*P3;
        let h = p.from_class_coords(&[1]).unwrap();
        assert!(is_m_regular(p, &h, &h, -1).unwrap().passed);
        let q = quick_criteria(p, &h).unwrap();
        assert!(q.zero_regular && q.minus_one_regular);
        // O is 0-regular but not (-1)-regular: h^3(O(-4)) = 1
        let o = p.zero();
        assert!(is_m_regular(p, &o, &h, 0).unwrap().passed);
        let fail = is_m_regular(p, &o, &h, -1).unwrap();
        assert_eq!(fail.failing_twist, Some((3, vec![-4])));
        assert!(matches!(
            is_m_regular(p, &h, &p.zero(), 0),
            Err(ToricError::Hypothesis(_))
        ));
    }

    #[test]
    fn weighted_eta() {
        let w = &*WP;
        let eta = w.from_class_coords(&[2]).unwrap();
        assert!(is_m_regular(w, &eta, &eta, 0).unwrap().passed);
        assert!(!is_m_regular(w, &eta, &eta, -1).unwrap().passed);
        let q = quick_criteria(w, &eta).unwrap();
        assert_eq!((q.h0_zero_test, q.h0_minus_one_test), (0, 1));
    }

    #[test]
    fn blowup_family() {
        let v = &*BLOWUP;
        let h = v.divisor(&[0, 0, 1, 0, 0]).unwrap();
        let h_e = v.divisor(&[1, 0, 0, 0, 0]).unwrap();
        for s in 1..=3 {
            let eta = v.combine(&[(1, &h), (s, &h_e)]);
            assert!(is_m_regular(v, &eta, &eta, 0).unwrap().passed, "s = {s}");
            assert!(quick_criteria(v, &eta).unwrap().zero_regular);
        }
    }

    #[test]
    fn quick_criteria_match_definition() {
        for v in [&*P3, &*WP, &*P1P2, &*BLOWUP] {
            let gens = cartier_nef_generators(v).unwrap();
            for (_, d) in window(v, &gens, 3) {
                if !v.is_ample(&d) {
                    continue;
                }
                let q = quick_criteria(v, &d).unwrap();
                assert_eq!(q.zero_regular, is_m_regular(v, &d, &d, 0).unwrap().passed);
                assert_eq!(
                    q.minus_one_regular,
                    is_m_regular(v, &d, &d, -1).unwrap().passed
                );
            }
        }
    }

    #[test]
    fn regularity_is_monotone() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let vs = [&*P3, &*WP, &*P1P2, &*BLOWUP];
        for _ in 0..20 {
            let v = vs[rng.gen_range(0..vs.len())];
            let gens = cartier_nef_generators(v).unwrap();
            let l_terms: Vec<(i64, &DivisorClass)> =
                gens.iter().map(|g| (rng.gen_range(1..3), g)).collect();
            let l = v.combine(&l_terms);
            let f_terms: Vec<(i64, &DivisorClass)> =
                gens.iter().map(|g| (rng.gen_range(-3..3), g)).collect();
            let f = v.combine(&f_terms);
            let m = rng.gen_range(-2..3);
            if is_m_regular(v, &f, &l, m).unwrap().passed {
                assert!(is_m_regular(v, &f, &l, m + 1).unwrap().passed);
            }
        }
    }

    #[test]
    fn oda_windows() {
        for v in [&*P1P2, &*BLOWUP, &*WP] {
            let r = oda_window_check(v, 2).unwrap();
            assert!(r.failures.is_empty(), "{:?}", r.failures);
            assert!(r.pairs_checked > 0);
        }
        assert_eq!(
            cartier_nef_generators(&WP).unwrap()[0].class_coords,
            vec![2]
        );
    }

    #[test]
    fn triples() {
        let p = &*P3;
        let h = p.from_class_coords(&[1]).unwrap();
        let t = vanishing_triple(p, &p.scale(5, &h), &h).unwrap();
        assert!(t.holds && t.beta_minus_2eta_nef && t.beta_zero_regular == Some(true));
        let t = vanishing_triple(p, &h, &h).unwrap();
        assert!(t.holds && !t.beta_minus_2eta_nef);

        let v = &*BLOWUP;
        let eta = v
            .nef_basis()
            .unwrap()
            .iter()
            .fold(v.zero(), |acc, g| v.add(&acc, g));
        let beta = v.combine(&[(1, &v.anticanonical()), (2, &eta)]);
        let t = vanishing_triple(v, &beta, &eta).unwrap();
        assert!(t.holds && t.beta_minus_2eta_nef);
    }

    #[test]
    fn classification_window() {
        let rows = catalog_classification(
            &[
                ("p3", &P3),
                ("wp", &WP),
                ("p1xp2", &P1P2),
                ("blowup", &BLOWUP),
            ],
            4,
        )
        .unwrap();
        let minus_one: Vec<bool> = rows.iter().map(|r| r.minus_one_regular.is_some()).collect();
        assert_eq!(minus_one, vec![true, false, false, false]);
        assert!(rows.iter().all(|r| r.zero_regular.is_some()));
        assert_eq!(rows[1].zero_regular, Some(vec![2]));
    }
}
