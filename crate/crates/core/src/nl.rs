//! Noether-Lefschetz codimension bounds with their hypotheses, the syzygy
//! bundle vanishing check, and invariant lines with their loci.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::cohomology::{cohomology, h0};
use crate::cox::{graded_basis, mult_map_surjective};
use crate::divisor::{DivisorClass, ToricVariety};
use crate::error::{Result, ToricError};
use crate::lattice::{rat_pairs, RatPair};
use crate::regularity::{is_m_regular, oda_window_check, quick_criteria, vanishing_triple};

/// Largest `k` for which `S_beta (x) S_{k eta}` surjectivity is checked.
const MULT_WINDOW: i64 = 3;
const ODA_BOUND: i64 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    /// Holds on the finite window that was checked; not a proof.
    UnverifiedWindow,
}

impl Status {
    fn of(b: bool) -> Self {
        if b {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    fn window(b: bool) -> Self {
        if b {
            Status::UnverifiedWindow
        } else {
            Status::Fail
        }
    }

    pub fn holds(self) -> bool {
        self != Status::Fail
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Hypothesis {
    pub name: &'static str,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Route {
    pub name: &'static str,
    pub statement: &'static str,
    pub requires: Vec<&'static str>,
    pub fired: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LowerBound {
    pub value: i64,
    /// Routes whose hypotheses all hold.
    pub routes: Vec<&'static str>,
    pub eta_regularity: &'static str,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UpperBound {
    pub value: u64,
    pub source: &'static str,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundReport {
    pub fan: String,
    pub eta: Vec<i64>,
    pub n: i64,
    pub beta: Vec<i64>,
    pub hypotheses: Vec<Hypothesis>,
    pub routes: Vec<Route>,
    pub lower_bound: Option<LowerBound>,
    pub upper_bound: UpperBound,
}

impl BoundReport {
    pub fn hypothesis(&self, name: &str) -> Option<Status> {
        self.hypotheses
            .iter()
            .find(|h| h.name == name)
            .map(|h| h.status)
    }
}

fn require_threefold(v: &ToricVariety) -> Result<()> {
    if v.dim() != 3 {
        return Err(ToricError::Unsupported(format!(
            "threefolds only, got dimension {}",
            v.dim()
        )));
    }
    Ok(())
}

/// Evaluates every route to a lower bound for the codimension of the locus
/// of surfaces in `|beta_0 + n eta|` with jumping Picard number, and the
/// upper bound `h^0(n eta)`.
pub fn nl_bounds(v: &ToricVariety, eta: &DivisorClass, n: i64) -> Result<BoundReport> {
    require_threefold(v)?;
    if n < 0 {
        return Err(ToricError::Hypothesis(format!(
            "n must be nonnegative, got {n}"
        )));
    }
    let b0 = v.anticanonical();
    if !v.is_cartier(&b0) {
        return Err(ToricError::Hypothesis(
            "anticanonical class is not Cartier (variety is not Gorenstein)".into(),
        ));
    }
    if !v.is_cartier(eta) {
        return Err(ToricError::Hypothesis("eta is not Cartier".into()));
    }
    if !v.is_ample(eta) {
        return Err(ToricError::Hypothesis("eta is not ample".into()));
    }
    if !v.is_primitive_cartier(eta) {
        return Err(ToricError::Hypothesis(
            "eta is a multiple of a Cartier class".into(),
        ));
    }
    let beta = v.combine(&[(1, &b0), (n, eta)]);
    if !v.is_ample(&beta) {
        return Err(ToricError::Hypothesis("beta is not ample".into()));
    }

    let mut hyps = vec![
        Hypothesis {
            name: "beta-cartier",
            status: Status::Pass,
            detail: None,
        },
        Hypothesis {
            name: "beta-ample",
            status: Status::Pass,
            detail: None,
        },
        Hypothesis {
            name: "eta-ample-cartier",
            status: Status::Pass,
            detail: None,
        },
        Hypothesis {
            name: "eta-primitive",
            status: Status::Pass,
            detail: None,
        },
        Hypothesis {
            name: "gorenstein",
            status: Status::Pass,
            detail: None,
        },
    ];

    let q = quick_criteria(v, eta)?;
    hyps.push(Hypothesis {
        name: "eta-zero-regular",
        status: Status::of(q.zero_regular),
        detail: Some(format!("h0(2 eta - beta_0) = {}", q.h0_zero_test)),
    });
    hyps.push(Hypothesis {
        name: "eta-minus-one-regular",
        status: Status::of(q.minus_one_regular),
        detail: Some(format!("h0(3 eta - beta_0) = {}", q.h0_minus_one_test)),
    });

    let beta_reg = is_m_regular(v, &beta, eta, 0)?;
    hyps.push(Hypothesis {
        name: "beta-zero-regular-wrt-eta",
        status: Status::of(beta_reg.passed),
        detail: beta_reg
            .failing_twist
            .as_ref()
            .map(|(q, c)| format!("h^{q} nonzero at class {c:?}")),
    });

    let mut mult_ok = true;
    let mut mult_detail = None;
    for k in 0..=MULT_WINDOW {
        let r = mult_map_surjective(v, None, &beta, &v.scale(k, eta))?;
        if !r.surjective {
            mult_ok = false;
            mult_detail = Some(format!("k = {k}: cokernel {}", r.cokernel_dim));
            break;
        }
    }
    hyps.push(Hypothesis {
        name: "multiplication-surjective",
        status: Status::window(mult_ok),
        detail: mult_detail.or(Some(format!("k = 0..={MULT_WINDOW}"))),
    });

    let triple = vanishing_triple(v, &beta, eta)?;
    hyps.push(Hypothesis {
        name: "vanishing-triple",
        status: Status::of(triple.holds),
        detail: Some(format!(
            "h1(beta-eta)={}, h2(beta-eta)={}, h2(beta-2eta)={}",
            triple.h1_beta_minus_eta, triple.h2_beta_minus_eta, triple.h2_beta_minus_2eta
        )),
    });
    hyps.push(Hypothesis {
        name: "beta-minus-2eta-nef",
        status: Status::of(triple.beta_minus_2eta_nef),
        detail: None,
    });

    let oda = oda_window_check(v, ODA_BOUND)?;
    hyps.push(Hypothesis {
        name: "oda-window",
        status: Status::window(oda.failures.is_empty()),
        detail: Some(format!("bound {ODA_BOUND}, {} pairs", oda.pairs_checked)),
    });
    hyps.push(Hypothesis {
        name: "fano",
        status: Status::of(v.is_ample(&b0)),
        detail: None,
    });
    hyps.push(Hypothesis {
        name: "n-at-least-3",
        status: Status::of(n >= 3),
        detail: None,
    });

    let holds = |name: &str| hyps.iter().any(|h| h.name == name && h.status.holds());
    let route_defs: [(&str, &str, Vec<&str>); 4] = [
        (
            "multiplication",
            "surjective Cox multiplication and the vanishing triple",
            vec!["multiplication-surjective", "vanishing-triple"],
        ),
        (
            "regularity",
            "beta is 0-regular with respect to eta",
            vec!["beta-zero-regular-wrt-eta"],
        ),
        (
            "fano",
            "Fano threefold with n >= 3",
            vec!["fano", "n-at-least-3"],
        ),
        (
            "oda",
            "Oda threefold with beta - 2 eta nef",
            vec!["oda-window", "beta-minus-2eta-nef"],
        ),
    ];
    let routes: Vec<Route> = route_defs
        .into_iter()
        .map(|(name, statement, requires)| {
            let fired = requires.iter().all(|r| holds(r));
            Route {
                name,
                statement,
                requires,
                fired,
            }
        })
        .collect();
    let fired: Vec<&'static str> = routes.iter().filter(|r| r.fired).map(|r| r.name).collect();
    let lower_bound = if fired.is_empty() {
        None
    } else if q.minus_one_regular {
        Some(LowerBound {
            value: n + 1,
            routes: fired,
            eta_regularity: "minus-one-regular",
        })
    } else if q.zero_regular {
        Some(LowerBound {
            value: n,
            routes: fired,
            eta_regularity: "zero-regular",
        })
    } else {
        None
    };
    let upper = h0(v, &v.scale(n, eta))?;
    Ok(BoundReport {
        fan: v.fan.label().to_string(),
        eta: eta.class_coords.clone(),
        n,
        beta: beta.class_coords.clone(),
        hypotheses: hyps,
        routes,
        lower_bound,
        upper_bound: UpperBound {
            value: upper,
            source: "h0(n eta), the geometric genus of the surface",
        },
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Term {
    Exact { value: u64, how: &'static str },
    Undetermined { lower: u64, upper: u64 },
}

impl Term {
    fn bounds(&self) -> (u64, u64) {
        match *self {
            Term::Exact { value, .. } => (value, value),
            Term::Undetermined { lower, upper } => (lower, upper),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SyzygyEntry {
    pub q: usize,
    pub k: i64,
    pub cokernel: Term,
    pub kernel: Term,
    /// `h^q(M_0(k eta))` when both terms are exact.
    pub value: Option<u64>,
    pub lower: u64,
    pub upper: u64,
    /// `q >= 1` and `k + q >= 1`.
    pub in_vanishing_range: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SyzygyReport {
    pub hypotheses: Vec<Hypothesis>,
    pub entries: Vec<SyzygyEntry>,
    /// `Some(true)` when the hypotheses hold and every entry in range is zero.
    pub vanishing_asserted: Option<bool>,
}

/// `h^q(M_0(k eta))` for the kernel bundle `M_0` of `S_beta (x) O -> O(beta)`
/// by chasing the long exact sequence twisted by `k eta`.
pub fn syzygy_vanishing_check(
    v: &ToricVariety,
    beta: &DivisorClass,
    eta: &DivisorClass,
    ks: &[i64],
    qs: &[usize],
) -> Result<SyzygyReport> {
    let r = v.dim();
    let s_beta = graded_basis(v, beta)?.dim() as u64;

    let mut hyps = vec![
        Hypothesis {
            name: "beta-nef-cartier",
            status: Status::of(v.is_cartier(beta) && v.is_nef(beta)),
            detail: None,
        },
        Hypothesis {
            name: "eta-ample-cartier",
            status: Status::of(v.is_cartier(eta) && v.is_ample(eta)),
            detail: None,
        },
    ];
    let eta_zero = if hyps[1].status == Status::Pass {
        quick_criteria(v, eta)?.zero_regular
    } else {
        false
    };
    hyps.push(Hypothesis {
        name: "eta-zero-regular",
        status: Status::of(eta_zero),
        detail: None,
    });
    let kmax = ks.iter().copied().max().unwrap_or(0).max(0);
    let mut mult_ok = true;
    for k in 0..=kmax {
        if !mult_map_surjective(v, None, beta, &v.scale(k, eta))?.surjective {
            mult_ok = false;
        }
    }
    hyps.push(Hypothesis {
        name: "multiplication-surjective",
        status: Status::window(mult_ok),
        detail: Some(format!("k = 0..={kmax}")),
    });

    let mut cache: BTreeMap<Vec<i64>, Vec<u64>> = BTreeMap::new();
    let mut h = |d: &DivisorClass| -> Result<Vec<u64>> {
        if let Some(t) = cache.get(&d.class_coords) {
            return Ok(t.clone());
        }
        let t = cohomology(v, d)?;
        cache.insert(d.class_coords.clone(), t.clone());
        Ok(t)
    };

    let mut entries = Vec::new();
    for &q in qs {
        if q == 0 || q > r {
            return Err(ToricError::Unsupported(format!(
                "q must be in 1..={r}, got {q}"
            )));
        }
        for &k in ks {
            let tw = v.scale(k, eta);
            let bt = v.add(beta, &tw);
            let h_tw = h(&tw)?;
            let h_bt = h(&bt)?;
            // coker of S_beta (x) H^{q-1}(k eta) -> H^{q-1}(beta + k eta)
            let cokernel = if h_bt[q - 1] == 0 {
                Term::Exact {
                    value: 0,
                    how: "target vanishes",
                }
            } else if h_tw[q - 1] == 0 {
                Term::Exact {
                    value: h_bt[q - 1],
                    how: "source vanishes",
                }
            } else if q == 1 {
                let m = mult_map_surjective(v, None, beta, &tw)?;
                Term::Exact {
                    value: m.cokernel_dim as u64,
                    how: "multiplication rank",
                }
            } else {
                Term::Undetermined {
                    lower: 0,
                    upper: h_bt[q - 1],
                }
            };
            // ker of S_beta (x) H^q(k eta) -> H^q(beta + k eta)
            let source = s_beta * h_tw[q];
            let kernel = if source == 0 {
                Term::Exact {
                    value: 0,
                    how: "source vanishes",
                }
            } else if h_bt[q] == 0 {
                Term::Exact {
                    value: source,
                    how: "target vanishes",
                }
            } else {
                Term::Undetermined {
                    lower: source.saturating_sub(h_bt[q]),
                    upper: source,
                }
            };
            let (cl, cu) = cokernel.bounds();
            let (kl, ku) = kernel.bounds();
            let value = (cl == cu && kl == ku).then_some(cl + kl);
            entries.push(SyzygyEntry {
                q,
                k,
                cokernel,
                kernel,
                value,
                lower: cl + kl,
                upper: cu + ku,
                in_vanishing_range: k + q as i64 >= 1,
            });
        }
    }
    let hyps_hold = hyps.iter().all(|h| h.status.holds());
    let vanishing_asserted = hyps_hold.then(|| {
        entries
            .iter()
            .filter(|e| e.in_vanishing_range)
            .all(|e| e.value == Some(0))
    });
    Ok(SyzygyReport {
        hypotheses: hyps,
        entries,
        vanishing_asserted,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvariantLine {
    pub wall: usize,
    /// Rays of the wall, i.e. the divisors containing the curve.
    pub face: Vec<usize>,
    /// Intersection numbers with the nef basis (or the free class basis when
    /// no nef basis is designated).
    #[serde(serialize_with = "ser_rats")]
    pub pairing: Vec<BigRational>,
    #[serde(serialize_with = "ser_rat")]
    pub eta_degree: BigRational,
    #[serde(serialize_with = "ser_rat")]
    pub beta0_degree: BigRational,
    pub in_smooth_locus: bool,
}

fn ser_rat<S: serde::Serializer>(x: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    RatPair::from(x).serialize(s)
}

fn ser_rats<S: serde::Serializer>(
    xs: &[BigRational],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    rat_pairs(xs).serialize(s)
}

fn curve_pairing(v: &ToricVariety, wall: usize) -> Vec<BigRational> {
    match v.nef_basis() {
        Some(b) => b.iter().map(|g| v.pairing(g, wall)).collect(),
        None => v.wall_pairing(wall).to_vec(),
    }
}

/// Describes the invariant curve of a wall.
pub fn invariant_curve(v: &ToricVariety, eta: &DivisorClass, wall: usize) -> InvariantLine {
    let w = &v.walls[wall];
    InvariantLine {
        wall,
        face: w.face.clone(),
        pairing: curve_pairing(v, wall),
        eta_degree: v.pairing(eta, wall),
        beta0_degree: v.pairing(&v.anticanonical(), wall),
        in_smooth_locus: v.cone_multiplicity[w.cone_a] == 1 && v.cone_multiplicity[w.cone_b] == 1,
    }
}

/// Invariant curves of `eta`-degree one.
pub fn enumerate_lines(v: &ToricVariety, eta: &DivisorClass) -> Result<Vec<InvariantLine>> {
    require_threefold(v)?;
    if !v.is_cartier(eta) || !v.is_ample(eta) {
        return Err(ToricError::Hypothesis(
            "eta must be ample and Cartier".into(),
        ));
    }
    Ok((0..v.walls.len())
        .map(|w| invariant_curve(v, eta, w))
        .filter(|l| l.eta_degree == BigRational::from_integer(1.into()))
        .collect())
}

/// Lines grouped by numerical class (their pairing vector), in order of
/// first appearance.
pub fn line_classes(lines: &[InvariantLine]) -> Vec<(Vec<BigRational>, Vec<usize>)> {
    let mut out: Vec<(Vec<BigRational>, Vec<usize>)> = Vec::new();
    for l in lines {
        match out.iter_mut().find(|(p, _)| *p == l.pairing) {
            Some((_, walls)) => walls.push(l.wall),
            None => out.push((l.pairing.clone(), vec![l.wall])),
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HilbDim {
    Auto,
    Given(i64),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LineLocus {
    pub codim: i64,
    pub beta_degree: i64,
    pub hilb_dim: i64,
    pub assumptions: Vec<&'static str>,
}

/// `codim = beta.L + 1 - dim Hilb` with `beta = beta_0 + n eta`; for a line
/// (`eta.L = 1`) this is `n + 1 + beta_0.L - dim Hilb`.
pub fn line_locus_codim(
    v: &ToricVariety,
    eta: &DivisorClass,
    n: i64,
    wall: usize,
    hilb: HilbDim,
) -> Result<LineLocus> {
    if n < 0 {
        return Err(ToricError::Hypothesis(format!(
            "n must be nonnegative, got {n}"
        )));
    }
    let curve = invariant_curve(v, eta, wall);
    let beta = v.combine(&[(1, &v.anticanonical()), (n, eta)]);
    let bdeg = v.pairing(&beta, wall);
    if !bdeg.is_integer() {
        return Err(ToricError::Inconsistent(
            "beta has fractional degree on the curve".into(),
        ));
    }
    let beta_degree = bdeg.to_integer().to_i64().expect("small degree");
    let mut assumptions = Vec::new();
    let hilb_dim = match hilb {
        HilbDim::Given(d) => {
            assumptions.push("Hilbert scheme dimension supplied by caller");
            d
        }
        HilbDim::Auto => {
            if !curve.in_smooth_locus {
                return Err(ToricError::Hypothesis(
                    "curve meets the singular locus; supply the Hilbert scheme dimension".into(),
                ));
            }
            assumptions
                .push("dim Hilb = h0(N) = beta_0.L, assuming h1(N) = 0 and h1(I_L(beta)) = 0");
            curve
                .beta0_degree
                .to_integer()
                .to_i64()
                .expect("small degree")
        }
    };
    let codim = beta_degree + 1 - hilb_dim;
    if codim < 0 {
        return Err(ToricError::Inconsistent(format!(
            "negative codimension {codim}; the Hilbert scheme dimension {hilb_dim} is too large"
        )));
    }
    Ok(LineLocus {
        codim,
        beta_degree,
        hilb_dim,
        assumptions,
    })
}

/// Splitting type `(a, b)` of the normal bundle of a wall curve between two
/// smooth cones, read from `u_a + u_b + a u_1 + b u_2 = 0`.
pub fn normal_bundle_degrees(v: &ToricVariety, wall: usize) -> Result<(i64, i64)> {
    require_threefold(v)?;
    let w = &v.walls[wall];
    if v.cone_multiplicity[w.cone_a] != 1 || v.cone_multiplicity[w.cone_b] != 1 {
        return Err(ToricError::Hypothesis(format!(
            "wall {wall} is adjacent to a singular cone"
        )));
    }
    debug_assert_eq!((w.lambda_a, w.lambda_b), (1, 1));
    let (a, b) = (w.mu[0], w.mu[1]);
    let b0 = v.pairing(&v.anticanonical(), wall);
    if b0 != BigRational::from_integer((a + b + 2).into()) {
        return Err(ToricError::Inconsistent(format!(
            "degree identity fails on wall {wall}: {a} + {b} vs {b0} - 2"
        )));
    }
    Ok((a, b))
}

/// Rank of `S_beta -> H^0(O_L(beta))`, counting monomials that do not vanish
/// on the curve (no variable of the wall), which restrict to distinct
/// characters of the curve's torus.
pub fn restriction_codim(v: &ToricVariety, wall: usize, beta: &DivisorClass) -> Result<usize> {
    let w = &v.walls[wall];
    let basis = graded_basis(v, beta)?;
    let mut seen = std::collections::BTreeSet::new();
    for e in &basis.exponents {
        if w.face.iter().all(|&r| e[r] == 0) {
            seen.insert((e[w.ray_a], e[w.ray_b]));
        }
    }
    Ok(seen.len())
}

/// Exact integer value of a rational degree, if it is one.
pub fn integer_degree(x: &BigRational) -> Option<i64> {
    if x.is_integer() {
        x.to_integer().to_i64()
    } else {
        None
    }
}
