//! The built-in catalog of threefolds with designated nef bases, a designated
//! `eta`, and literature values checked on load and by `verify_catalog`.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use crate::cox::mult_map_surjective;
use crate::divisor::{DivisorClass, ToricVariety};
use crate::error::{Result, ToricError};
use crate::fan::{star_subdivision, subsets_of_size, Fan};
use crate::nl::{enumerate_lines, line_locus_codim, nl_bounds, normal_bundle_degrees, HilbDim};
use crate::regularity::{is_m_regular, oda_window_check, quick_criteria};

pub const CATALOG_NAMES: [&str; 5] = [
    "p3",
    "wp1122",
    "blowup-p3-line",
    "p1xp2",
    "quadric-cone-resolution",
];

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExpectedLine {
    pub label: &'static str,
    /// Intersection numbers with the designated nef basis, as `(num, den)`.
    pub pairing: Vec<(i64, i64)>,
    /// Hilbert scheme dimension to use when the line meets the singular locus.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hilb_dim: Option<i64>,
    /// Splitting type of the normal bundle, larger degree first.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub normal_bundle: Option<(i64, i64)>,
}

impl ExpectedLine {
    pub fn pairing_q(&self) -> Vec<BigRational> {
        self.pairing
            .iter()
            .map(|&(n, d)| BigRational::new(BigInt::from(n), BigInt::from(d)))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Expected {
    pub picard_rank: usize,
    pub beta0_nef: Vec<i64>,
    pub eta_nef: Vec<i64>,
    pub eta_zero_regular: bool,
    pub eta_minus_one_regular: bool,
    pub fano: bool,
    pub oda: bool,
    pub lines: Vec<ExpectedLine>,
    /// `(n, lower bound)` pairs.
    pub nl_lower: Vec<(i64, i64)>,
    pub source: &'static str,
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub description: &'static str,
    pub variety: ToricVariety,
    pub basis_labels: Vec<&'static str>,
    pub eta: DivisorClass,
    pub expected: Expected,
}

fn mismatch(name: &str, detail: String) -> ToricError {
    ToricError::CatalogMismatch {
        name: name.to_string(),
        detail,
    }
}

fn p3_fan() -> Fan {
    Fan::new(
        3,
        vec![
            vec![1, 0, 0],
            vec![0, 1, 0],
            vec![0, 0, 1],
            vec![-1, -1, -1],
        ],
        subsets_of_size(&[0, 1, 2, 3], 3),
        Some("p3".into()),
    )
    .expect("static fan")
}

/// Triangle `0,1,2` in the plane, suspended by rays 3 and 4.
fn suspension(rays: Vec<Vec<i64>>, name: &str) -> Fan {
    let mut cones = Vec::new();
    for pair in subsets_of_size(&[0, 1, 2], 2) {
        for apex in [3, 4] {
            let mut c = pair.clone();
            c.push(apex);
            cones.push(c);
        }
    }
    Fan::new(3, rays, cones, Some(name.into())).expect("static fan")
}

fn line(label: &'static str, pairing: &[(i64, i64)]) -> ExpectedLine {
    ExpectedLine {
        label,
        pairing: pairing.to_vec(),
        hilb_dim: None,
        normal_bundle: None,
    }
}

struct Sheet {
    description: &'static str,
    fan: Fan,
    /// Designated nef basis as ray divisors.
    basis: Vec<(&'static str, usize)>,
    expected: Expected,
}

fn sheet(name: &str) -> Result<Sheet> {
    Ok(match name {
        "p3" => Sheet {
            description: "projective 3-space",
            fan: p3_fan(),
            basis: vec![("H", 0)],
            expected: Expected {
                picard_rank: 1,
                beta0_nef: vec![4],
                eta_nef: vec![1],
                eta_zero_regular: true,
                eta_minus_one_regular: true,
                fano: true,
                oda: true,
                lines: vec![line("line", &[(1, 1)])],
                nl_lower: (0..=4).map(|n| (n, n + 1)).collect(),
                source: "classical: degree d surfaces in P^3 with codimension bound d - 3",
            },
        },
        "wp1122" => Sheet {
            description: "weighted projective space P[1,1,2,2]",
            fan: Fan::new(
                3,
                vec![vec![1, 0, 0], vec![-1, -2, -2], vec![0, 1, 0], vec![0, 0, 1]],
                subsets_of_size(&[0, 1, 2, 3], 3),
                Some("wp1122".into()),
            )
            .expect("static fan"),
            basis: vec![("eta_0", 0)],
            expected: Expected {
                picard_rank: 1,
                beta0_nef: vec![6],
                eta_nef: vec![2],
                eta_zero_regular: true,
                eta_minus_one_regular: false,
                fano: true,
                oda: true,
                lines: vec![ExpectedLine {
                    hilb_dim: Some(3),
                    ..line("eta.eta_0", &[(1, 2)])
                }],
                nl_lower: (2..=4).map(|n| (n, n)).collect(),
                source: "weighted projective example: beta_0 = 6 eta_0 = 3 eta, eta 0-regular, dim Hilb = 3",
            },
        },
        "blowup-p3-line" => Sheet {
            description: "P^3 blown up along a line",
            fan: star_subdivision(&p3_fan(), &[1, 1, 0])?,
            basis: vec![("eta_1", 2), ("eta_2", 0)],
            expected: Expected {
                picard_rank: 2,
                beta0_nef: vec![3, 1],
                eta_nef: vec![1, 1],
                eta_zero_regular: true,
                eta_minus_one_regular: false,
                fano: true,
                oda: true,
                lines: vec![
                    ExpectedLine { normal_bundle: Some((0, -1)), ..line("l_1", &[(0, 1), (1, 1)]) },
                    ExpectedLine { normal_bundle: Some((1, 0)), ..line("l_2", &[(1, 1), (0, 1)]) },
                ],
                nl_lower: (2..=4).map(|n| (n, n)).collect(),
                source: "blow-up example: beta_0 = 3 eta_1 + eta_2, l_i.eta_j = 0 iff i = j",
            },
        },
        "p1xp2" => Sheet {
            description: "P^1 x P^2",
            fan: suspension(
                vec![vec![1, 0, 0], vec![0, 1, 0], vec![-1, -1, 0], vec![0, 0, 1], vec![0, 0, -1]],
                "p1xp2",
            ),
            basis: vec![("H_1", 0), ("H_2", 3)],
            expected: Expected {
                picard_rank: 2,
                beta0_nef: vec![3, 2],
                eta_nef: vec![1, 1],
                eta_zero_regular: true,
                eta_minus_one_regular: false,
                fano: true,
                oda: true,
                lines: vec![
                    ExpectedLine { normal_bundle: Some((0, 0)), ..line("l_1", &[(0, 1), (1, 1)]) },
                    ExpectedLine { normal_bundle: Some((1, 0)), ..line("l_2", &[(1, 1), (0, 1)]) },
                ],
                nl_lower: (2..=4).map(|n| (n, n)).collect(),
                source: "product example: H_1 from P^2, H_2 from P^1, l_1 not a line for eta = H_1 + s H_2",
            },
        },
        "quadric-cone-resolution" => Sheet {
            description: "small resolution of the cone over a quadric surface",
            fan: suspension(
                vec![vec![1, 0, 0], vec![0, 1, 0], vec![-1, -1, 0], vec![0, 0, 1], vec![1, 1, -1]],
                "quadric-cone-resolution",
            ),
            basis: vec![("eta_1", 2), ("eta_2", 3)],
            expected: Expected {
                picard_rank: 2,
                beta0_nef: vec![3, 0],
                eta_nef: vec![1, 1],
                eta_zero_regular: true,
                eta_minus_one_regular: false,
                fano: false,
                oda: true,
                lines: vec![
                    ExpectedLine { normal_bundle: Some((1, 0)), ..line("l_1", &[(1, 1), (0, 1)]) },
                    ExpectedLine { normal_bundle: Some((-1, -1)), ..line("l_2", &[(0, 1), (1, 1)]) },
                ],
                nl_lower: (2..=4).map(|n| (n, n)).collect(),
                source: "small resolution example: beta_0 = 3 eta_1, l_2 exceptional, quasi-Fano",
            },
        },
        other => return Err(ToricError::UnknownCatalog(other.to_string())),
    })
}

/// Builds and validates a catalog entry, failing if the encoding contradicts
/// the recorded Picard rank, nef cone or anticanonical class.
pub fn load_catalog(name: &str) -> Result<CatalogEntry> {
    let s = sheet(name)?;
    let name = CATALOG_NAMES
        .iter()
        .copied()
        .find(|n| *n == name)
        .expect("known");
    let mut v = ToricVariety::new(s.fan)?;
    let e = &s.expected;
    if v.picard_rank() != e.picard_rank {
        return Err(mismatch(
            name,
            format!(
                "Picard rank {} (expected {})",
                v.picard_rank(),
                e.picard_rank
            ),
        ));
    }
    let basis: Vec<DivisorClass> = s.basis.iter().map(|&(_, r)| v.ray_divisor(r)).collect();
    let gens: BTreeSet<Vec<i64>> = v
        .nef_cone_generators()?
        .into_iter()
        .map(|d| d.class_coords)
        .collect();
    let designated: BTreeSet<Vec<i64>> = basis.iter().map(|d| d.class_coords.clone()).collect();
    if gens != designated {
        return Err(mismatch(
            name,
            format!("nef cone generators {gens:?} differ from the designated basis {designated:?}"),
        ));
    }
    v.set_nef_basis(basis)?;
    let b0 = v.from_nef_coords(&e.beta0_nef)?;
    if b0 != v.anticanonical() {
        return Err(mismatch(
            name,
            format!(
                "anticanonical class is not {:?} in the nef basis",
                e.beta0_nef
            ),
        ));
    }
    let eta = v.from_nef_coords(&e.eta_nef)?;
    Ok(CatalogEntry {
        name,
        description: s.description,
        basis_labels: s.basis.iter().map(|&(l, _)| l).collect(),
        eta,
        expected: s.expected,
        variety: v,
    })
}

pub fn load_all() -> Result<Vec<CatalogEntry>> {
    CATALOG_NAMES.iter().map(|n| load_catalog(n)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub entry: &'static str,
    pub what: String,
    pub source: &'static str,
    pub expected: String,
    pub actual: String,
    pub pass: bool,
}

impl CatalogEntry {
    fn check(&self, what: impl Into<String>, expected: String, actual: String) -> Check {
        Check {
            entry: self.name,
            what: what.into(),
            source: self.expected.source,
            pass: expected == actual,
            expected,
            actual,
        }
    }

    /// The designated `eta`-lines grouped by numerical class, as pairings with
    /// the nef basis.
    pub fn line_class_set(&self) -> Result<BTreeSet<Vec<BigRational>>> {
        Ok(enumerate_lines(&self.variety, &self.eta)?
            .into_iter()
            .map(|l| l.pairing)
            .collect())
    }

    /// `beta_0 + n eta`.
    pub fn beta(&self, n: i64) -> DivisorClass {
        let v = &self.variety;
        v.combine(&[(1, &v.anticanonical()), (n, &self.eta)])
    }

    /// Runs every recorded expectation.
    pub fn verify(&self) -> Result<Vec<Check>> {
        let v = &self.variety;
        let e = &self.expected;
        let mut out = Vec::new();
        out.push(self.check(
            "Picard rank",
            e.picard_rank.to_string(),
            v.picard_rank().to_string(),
        ));
        let b0 = v.nef_coords(&v.anticanonical()).expect("nef basis is set");
        out.push(self.check(
            "beta_0 in nef basis",
            format!("{:?}", e.beta0_nef),
            format!("[{}]", b0.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")),
        ));
        let q = quick_criteria(v, &self.eta)?;
        out.push(self.check(
            "eta 0-regular",
            e.eta_zero_regular.to_string(),
            q.zero_regular.to_string(),
        ));
        out.push(self.check(
            "eta (-1)-regular",
            e.eta_minus_one_regular.to_string(),
            q.minus_one_regular.to_string(),
        ));
        let self_reg = is_m_regular(v, &self.eta, &self.eta, 0)?.passed;
        out.push(self.check(
            "eta 0-regular by definition",
            e.eta_zero_regular.to_string(),
            self_reg.to_string(),
        ));
        out.push(self.check("Fano", e.fano.to_string(), v.is_fano().to_string()));
        let oda = oda_window_check(v, 3)?;
        out.push(self.check(
            "Oda window, bound 3",
            e.oda.to_string(),
            oda.failures.is_empty().to_string(),
        ));

        let expected_lines: BTreeSet<Vec<BigRational>> =
            e.lines.iter().map(|l| l.pairing_q()).collect();
        let found = self.line_class_set()?;
        let show = |s: &BTreeSet<Vec<BigRational>>| {
            s.iter()
                .map(|p| {
                    p.iter()
                        .map(|x| x.to_string())
                        .collect::<Vec<_>>()
                        .join(",")
                })
                .collect::<Vec<_>>()
                .join(" | ")
        };
        out.push(self.check("line classes", show(&expected_lines), show(&found)));

        let lines = enumerate_lines(v, &self.eta)?;
        for el in &e.lines {
            let target = el.pairing_q();
            for l in lines.iter().filter(|l| l.pairing == target) {
                for n in 0..=2 {
                    let hilb = el.hilb_dim.map_or(HilbDim::Auto, HilbDim::Given);
                    let c = line_locus_codim(v, &self.eta, n, l.wall, hilb)?.codim;
                    out.push(self.check(
                        format!("{} locus codim, wall {}, n = {n}", el.label, l.wall),
                        (n + 1).to_string(),
                        c.to_string(),
                    ));
                }
                if let Some(nb) = el.normal_bundle {
                    let (a, b) = normal_bundle_degrees(v, l.wall)?;
                    let got = (a.max(b), a.min(b));
                    out.push(self.check(
                        format!("{} normal bundle, wall {}", el.label, l.wall),
                        format!("{nb:?}"),
                        format!("{got:?}"),
                    ));
                }
            }
        }

        for &(n, lower) in &e.nl_lower {
            let r = nl_bounds(v, &self.eta, n)?;
            let got = r.lower_bound.as_ref().map(|b| b.value);
            out.push(self.check(
                format!("NL lower bound, n = {n}"),
                format!("{:?}", Some(lower)),
                format!("{got:?}"),
            ));
            let consistent = got.is_none_or(|l| l as u64 <= r.upper_bound.value);
            out.push(self.check(
                format!("lower <= upper, n = {n}"),
                "true".into(),
                consistent.to_string(),
            ));
        }
        for n in 0..=2 {
            let beta = self.beta(n);
            if is_m_regular(v, &beta, &self.eta, 0)?.passed {
                for k in 1..=2 {
                    let m = mult_map_surjective(v, None, &beta, &v.scale(k, &self.eta))?;
                    out.push(self.check(
                        format!("S_beta x S_(k eta) surjective, n = {n}, k = {k}"),
                        "true".into(),
                        m.surjective.to_string(),
                    ));
                }
            }
        }
        Ok(out)
    }
}

/// Loads and verifies every catalog entry.
pub fn verify_catalog() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for entry in load_all()? {
        out.extend(entry.verify()?);
    }
    Ok(out)
}
