//! Simplicial fans: structure checks, walls with their linear relations, star
//! subdivision and cone multiplicities.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, ToricError};
use crate::lattice::{content_i64, smith_normal_form, IntMatrix};

const COVERAGE_SAMPLES: usize = 1000;
const COVERAGE_RADIUS: i64 = 50;
const COVERAGE_SEED: u64 = 0x7a11_c0de;

/// A fan given by primitive rays and maximal cones (index sets into `rays`).
///
/// This is also the JSON interchange format:
/// `{"dim": 3, "rays": [[1,0,0], ...], "max_cones": [[0,1,2], ...], "name": "p3"}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fan {
    pub dim: usize,
    pub rays: Vec<Vec<i64>>,
    pub max_cones: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FanIssue {
    DuplicateRay { first: usize, second: usize },
    NonPrimitiveRay { ray: usize },
    NotSimplicial { cone: usize },
    DanglingFace { face: Vec<usize>, cone: usize },
    OvercrowdedFace { face: Vec<usize>, cones: Vec<usize> },
    Disconnected { components: usize },
    Uncovered { point: Vec<i64> },
    OverlappingCones { point: Vec<i64>, cones: Vec<usize> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FanValidation {
    pub valid: bool,
    pub issues: Vec<FanIssue>,
    /// Lattice index of each maximal cone (1 = smooth), for simplicial cones.
    pub cone_multiplicities: Vec<Option<u64>>,
    pub singular_cones: Vec<usize>,
}

/// A codimension-one cone shared by two maximal cones, with the relation
/// `lambda_a*u_a + lambda_b*u_b + sum(mu_i * u_i) = 0` among its neighbours.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Wall {
    /// Rays of the shared face, ascending.
    pub face: Vec<usize>,
    pub cone_a: usize,
    pub cone_b: usize,
    /// The ray of `cone_a` (resp. `cone_b`) off the wall.
    pub ray_a: usize,
    pub ray_b: usize,
    pub lambda_a: i64,
    pub lambda_b: i64,
    /// Aligned with `face`.
    pub mu: Vec<i64>,
}

impl Wall {
    /// Relation coefficient for every ray of the fan (zero off the wall).
    pub fn relation_on(&self, n_rays: usize) -> Vec<i64> {
        let mut c = vec![0; n_rays];
        c[self.ray_a] = self.lambda_a;
        c[self.ray_b] = self.lambda_b;
        for (&r, &m) in self.face.iter().zip(&self.mu) {
            c[r] = m;
        }
        c
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConeMultiplicity {
    pub rays: Vec<usize>,
    pub multiplicity: u64,
}

impl Fan {
    /// Builds a fan after syntactic checks (dimensions, index ranges). Use
    /// [`validate_fan`] for the structural checks.
    pub fn new(
        dim: usize,
        rays: Vec<Vec<i64>>,
        max_cones: Vec<Vec<usize>>,
        name: Option<String>,
    ) -> Result<Self> {
        let fan = Self {
            dim,
            rays,
            max_cones: max_cones
                .into_iter()
                .map(|mut c| {
                    c.sort_unstable();
                    c
                })
                .collect(),
            name,
        };
        fan.check_syntax()?;
        Ok(fan)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: Fan =
            serde_json::from_str(text).map_err(|e| ToricError::MalformedFan(e.to_string()))?;
        Fan::new(raw.dim, raw.rays, raw.max_cones, raw.name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("fan serializes")
    }

    fn check_syntax(&self) -> Result<()> {
        if self.dim < 2 {
            return Err(ToricError::MalformedFan(format!(
                "dimension must be at least 2, got {}",
                self.dim
            )));
        }
        if self.rays.is_empty() || self.max_cones.is_empty() {
            return Err(ToricError::MalformedFan("no rays or no cones".into()));
        }
        for (i, r) in self.rays.iter().enumerate() {
            if r.len() != self.dim {
                return Err(ToricError::MalformedFan(format!(
                    "ray {i} has {} coordinates, expected {}",
                    r.len(),
                    self.dim
                )));
            }
        }
        for (i, c) in self.max_cones.iter().enumerate() {
            if c.iter().any(|&k| k >= self.rays.len()) {
                return Err(ToricError::MalformedFan(format!(
                    "cone {i} references a missing ray"
                )));
            }
            if c.windows(2).any(|w| w[0] == w[1]) {
                return Err(ToricError::MalformedFan(format!("cone {i} repeats a ray")));
            }
        }
        Ok(())
    }

    pub fn n_rays(&self) -> usize {
        self.rays.len()
    }

    pub fn label(&self) -> &str {
        self.name.as_deref().unwrap_or("unnamed")
    }

    /// Rays-as-rows matrix.
    pub fn ray_matrix(&self) -> IntMatrix {
        IntMatrix::from_rows(&self.rays).expect("fan has rays")
    }

    fn cone_rows(&self, cone: &[usize]) -> Vec<Vec<i64>> {
        cone.iter().map(|&i| self.rays[i].clone()).collect()
    }

    /// Lattice index of the sublattice spanned by the given rays inside its
    /// saturation; zero when the rays are dependent.
    pub fn multiplicity(&self, cone: &[usize]) -> u64 {
        if cone.is_empty() {
            return 1;
        }
        let m = IntMatrix::from_rows(&self.cone_rows(cone)).expect("nonempty");
        let snf = smith_normal_form(&m);
        let f = snf.invariant_factors();
        if f.len() < cone.len() {
            return 0;
        }
        f.iter()
            .fold(BigInt::one(), |acc, d| acc * d)
            .to_u64()
            .expect("multiplicity fits in u64")
    }

    /// Coordinates of `v` in the ray basis of a full-dimensional simplicial
    /// cone; `None` if the cone is degenerate.
    pub fn cone_coordinates(&self, cone: &[usize], v: &[i64]) -> Option<Vec<BigRational>> {
        let n = self.dim;
        if cone.len() != n {
            return None;
        }
        // columns are the rays
        let a: Vec<Vec<BigRational>> = (0..n)
            .map(|i| {
                cone.iter()
                    .map(|&r| BigRational::from_integer(BigInt::from(self.rays[r][i])))
                    .collect()
            })
            .collect();
        let b: Vec<BigRational> = v
            .iter()
            .map(|&x| BigRational::from_integer(x.into()))
            .collect();
        crate::lattice::solve_square(&a, &b)
    }

    /// All faces of all maximal cones of dimension `k`, ascending.
    pub fn faces_of_dim(&self, k: usize) -> Vec<Vec<usize>> {
        let mut out = BTreeSet::new();
        for c in &self.max_cones {
            for s in subsets_of_size(c, k) {
                out.insert(s);
            }
        }
        out.into_iter().collect()
    }

    /// True when some maximal cone contains every ray in `rays`.
    pub fn is_face(&self, rays: &[usize]) -> bool {
        self.max_cones
            .iter()
            .any(|c| rays.iter().all(|r| c.binary_search(r).is_ok()))
    }
}

pub(crate) fn subsets_of_size(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(
        items: &[usize],
        k: usize,
        start: usize,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            if items.len() - i < k - cur.len() {
                break;
            }
            cur.push(items[i]);
            rec(items, k, i + 1, cur, out);
            cur.pop();
        }
    }
    rec(items, k, 0, &mut cur, &mut out);
    out
}

/// Integer "adjugate" of a cone: `coords(p) ~ sign * adj * p`, used for fast
/// exact sign tests while sampling.
struct ConeSigns {
    adj: Vec<Vec<i128>>,
}

impl ConeSigns {
    fn new(fan: &Fan, cone: &[usize]) -> Option<Self> {
        let n = fan.dim;
        let mut adj = vec![vec![0i128; n]; n];
        // Scale the rational inverse to an integer matrix with positive scale.
        let m = IntMatrix::from_rows(&fan.cone_rows(cone)).ok()?;
        let det = m.determinant().ok()?;
        if det.is_zero() {
            return None;
        }
        let scale = BigRational::from_integer(det.abs());
        for j in 0..n {
            let mut e = vec![0i64; n];
            e[j] = 1;
            let col = fan.cone_coordinates(cone, &e)?;
            for i in 0..n {
                let v = &col[i] * &scale;
                adj[i][j] = v.to_integer().to_i128()?;
            }
        }
        Some(Self { adj })
    }

    /// (inside closed cone, inside open cone)
    fn classify(&self, p: &[i64]) -> (bool, bool) {
        let mut closed = true;
        let mut open = true;
        for row in &self.adj {
            let v: i128 = row.iter().zip(p).map(|(a, &b)| a * b as i128).sum();
            if v < 0 {
                closed = false;
                open = false;
            } else if v == 0 {
                open = false;
            }
        }
        (closed, open)
    }
}

/// Structural validation: primitive distinct rays, simplicial cones, every
/// codimension-one face in exactly two cones, connected adjacency, and a
/// seeded sampling check for coverage and overlaps.
pub fn validate_fan(fan: &Fan) -> FanValidation {
    let mut issues = Vec::new();
    let r = fan.dim;

    let mut seen: BTreeMap<&Vec<i64>, usize> = BTreeMap::new();
    for (i, ray) in fan.rays.iter().enumerate() {
        if content_i64(ray) != 1 {
            issues.push(FanIssue::NonPrimitiveRay { ray: i });
        }
        if let Some(&first) = seen.get(ray) {
            issues.push(FanIssue::DuplicateRay { first, second: i });
        } else {
            seen.insert(ray, i);
        }
    }

    let mut mults = Vec::with_capacity(fan.max_cones.len());
    let mut simplicial = true;
    for (i, c) in fan.max_cones.iter().enumerate() {
        let m = if c.len() == r { fan.multiplicity(c) } else { 0 };
        if m == 0 {
            issues.push(FanIssue::NotSimplicial { cone: i });
            simplicial = false;
            mults.push(None);
        } else {
            mults.push(Some(m));
        }
    }
    let singular_cones = mults
        .iter()
        .enumerate()
        .filter(|(_, m)| matches!(m, Some(k) if *k > 1))
        .map(|(i, _)| i)
        .collect();

    if simplicial {
        let faces = facet_incidence(fan);
        for (face, cones) in &faces {
            match cones.len() {
                2 => {}
                1 => issues.push(FanIssue::DanglingFace {
                    face: face.clone(),
                    cone: cones[0],
                }),
                _ => issues.push(FanIssue::OvercrowdedFace {
                    face: face.clone(),
                    cones: cones.clone(),
                }),
            }
        }
        let comps = adjacency_components(fan.max_cones.len(), &faces);
        if comps > 1 {
            issues.push(FanIssue::Disconnected { components: comps });
        }

        let signs: Vec<ConeSigns> = fan
            .max_cones
            .iter()
            .map(|c| ConeSigns::new(fan, c).expect("simplicial cone"))
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(COVERAGE_SEED);
        let mut uncovered = 0;
        let mut overlaps = 0;
        let mut taken = 0;
        while taken < COVERAGE_SAMPLES {
            let p: Vec<i64> = (0..r)
                .map(|_| rng.gen_range(-COVERAGE_RADIUS..=COVERAGE_RADIUS))
                .collect();
            if p.iter().all(|&x| x == 0) {
                continue;
            }
            taken += 1;
            let mut any = false;
            let mut interiors = Vec::new();
            for (i, s) in signs.iter().enumerate() {
                let (closed, open) = s.classify(&p);
                any |= closed;
                if open {
                    interiors.push(i);
                }
            }
            // Only the first few offending points are reported.
            if !any && uncovered < 3 {
                uncovered += 1;
                issues.push(FanIssue::Uncovered { point: p.clone() });
            }
            if interiors.len() > 1 && overlaps < 3 {
                overlaps += 1;
                issues.push(FanIssue::OverlappingCones {
                    point: p,
                    cones: interiors,
                });
            }
        }
    }

    FanValidation {
        valid: issues.is_empty(),
        issues,
        cone_multiplicities: mults,
        singular_cones,
    }
}

/// Codimension-one faces with the maximal cones containing them.
fn facet_incidence(fan: &Fan) -> BTreeMap<Vec<usize>, Vec<usize>> {
    let mut faces: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    for (i, c) in fan.max_cones.iter().enumerate() {
        for f in subsets_of_size(c, fan.dim - 1) {
            faces.entry(f).or_default().push(i);
        }
    }
    faces
}

fn adjacency_components(n: usize, faces: &BTreeMap<Vec<usize>, Vec<usize>>) -> usize {
    let mut adj = vec![Vec::new(); n];
    for cones in faces.values() {
        for &a in cones {
            for &b in cones {
                if a != b {
                    adj[a].push(b);
                }
            }
        }
    }
    let mut seen = vec![false; n];
    let mut comps = 0;
    for s in 0..n {
        if seen[s] {
            continue;
        }
        comps += 1;
        seen[s] = true;
        let mut q = VecDeque::from([s]);
        while let Some(v) = q.pop_front() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    q.push_back(w);
                }
            }
        }
    }
    comps
}

/// Validates and returns an error naming the first problem.
pub fn require_valid(fan: &Fan) -> Result<FanValidation> {
    let report = validate_fan(fan);
    if let Some(issue) = report.issues.first() {
        return Err(match issue {
            FanIssue::DuplicateRay { first, second } => ToricError::DuplicateRay {
                ray: fan.rays[*first].clone(),
                first: *first,
                second: *second,
            },
            FanIssue::NonPrimitiveRay { ray } => ToricError::NonPrimitiveRay {
                index: *ray,
                ray: fan.rays[*ray].clone(),
            },
            other => ToricError::InvalidFan(format!("{other:?}")),
        });
    }
    Ok(report)
}

/// One wall per shared codimension-one face. `cone_a < cone_b`, and the
/// relation is primitive with `lambda_a, lambda_b > 0`.
pub fn walls(fan: &Fan) -> Result<Vec<Wall>> {
    let faces = facet_incidence(fan);
    let mut out = Vec::new();
    for (face, cones) in faces {
        if cones.len() != 2 {
            return Err(ToricError::InvalidFan(format!(
                "face {face:?} lies in {} maximal cones",
                cones.len()
            )));
        }
        let (ca, cb) = (cones[0].min(cones[1]), cones[0].max(cones[1]));
        let off = |c: usize| {
            *fan.max_cones[c]
                .iter()
                .find(|r| face.binary_search(r).is_err())
                .expect("cone has a ray off its facet")
        };
        let (ra, rb) = (off(ca), off(cb));
        let mut cols = vec![ra, rb];
        cols.extend(&face);
        let kernel = kernel_of_columns(fan, &cols)?;
        let mut k = kernel;
        if k[0].is_negative() {
            k.iter_mut().for_each(|x| *x = -x.clone());
        }
        if !k[0].is_positive() || !k[1].is_positive() {
            return Err(ToricError::InvalidFan(format!(
                "cones {ca} and {cb} lie on the same side of face {face:?}"
            )));
        }
        let k: Vec<i64> = k
            .iter()
            .map(|x| x.to_i64().expect("relation fits in i64"))
            .collect();
        out.push(Wall {
            face,
            cone_a: ca,
            cone_b: cb,
            ray_a: ra,
            ray_b: rb,
            lambda_a: k[0],
            lambda_b: k[1],
            mu: k[2..].to_vec(),
        });
    }
    Ok(out)
}

/// Primitive generator of the kernel of the `dim x (dim+1)` matrix whose
/// columns are the given rays (generalized cross product).
fn kernel_of_columns(fan: &Fan, cols: &[usize]) -> Result<Vec<BigInt>> {
    let n = fan.dim;
    debug_assert_eq!(cols.len(), n + 1);
    let mut k = Vec::with_capacity(n + 1);
    for skip in 0..=n {
        let rows: Vec<Vec<i64>> = (0..n)
            .map(|i| {
                cols.iter()
                    .enumerate()
                    .filter(|&(j, _)| j != skip)
                    .map(|(_, &c)| fan.rays[c][i])
                    .collect()
            })
            .collect();
        let det = IntMatrix::from_rows(&rows)?.determinant()?;
        k.push(if skip % 2 == 0 { det } else { -det });
    }
    let g = crate::lattice::content(&k);
    if g.is_zero() {
        return Err(ToricError::InvalidFan(format!(
            "rays {cols:?} are degenerate"
        )));
    }
    Ok(k.into_iter().map(|x| x / &g).collect())
}

/// Star subdivision at `new_ray`: every maximal cone containing the minimal
/// cone `tau` through `new_ray` is replaced by the cones obtained by swapping
/// one ray of `tau` for `new_ray`. The new ray is appended last.
pub fn star_subdivision(fan: &Fan, new_ray: &[i64]) -> Result<Fan> {
    if new_ray.len() != fan.dim {
        return Err(ToricError::DimensionMismatch(format!(
            "ray of length {} in dimension {}",
            new_ray.len(),
            fan.dim
        )));
    }
    if fan.rays.iter().any(|r| r == new_ray) {
        return Err(ToricError::ExistingRay(new_ray.to_vec()));
    }
    if content_i64(new_ray) != 1 {
        return Err(ToricError::NonPrimitiveRay {
            index: fan.rays.len(),
            ray: new_ray.to_vec(),
        });
    }
    let mut tau: Option<Vec<usize>> = None;
    for c in &fan.max_cones {
        let Some(coords) = fan.cone_coordinates(c, new_ray) else {
            continue;
        };
        if coords.iter().all(|x| !x.is_negative()) {
            tau = Some(
                c.iter()
                    .zip(&coords)
                    .filter(|(_, x)| x.is_positive())
                    .map(|(&r, _)| r)
                    .collect(),
            );
            break;
        }
    }
    let tau = tau.ok_or_else(|| ToricError::OutsideSupport(new_ray.to_vec()))?;
    let new_index = fan.rays.len();
    let mut cones = Vec::new();
    for c in &fan.max_cones {
        if tau.iter().all(|r| c.binary_search(r).is_ok()) {
            for t in &tau {
                let mut nc: Vec<usize> = c.iter().copied().filter(|x| x != t).collect();
                nc.push(new_index);
                nc.sort_unstable();
                cones.push(nc);
            }
        } else {
            cones.push(c.clone());
        }
    }
    let mut rays = fan.rays.clone();
    rays.push(new_ray.to_vec());
    let name = fan.name.as_ref().map(|n| format!("{n}+star"));
    let out = Fan::new(fan.dim, rays, cones, name)?;
    require_valid(&out)?;
    Ok(out)
}

/// Lattice index of every cone of the fan (all dimensions >= 1).
pub fn singular_locus_summary(fan: &Fan) -> Vec<ConeMultiplicity> {
    (1..=fan.dim)
        .flat_map(|k| fan.faces_of_dim(k))
        .map(|rays| {
            let multiplicity = fan.multiplicity(&rays);
            ConeMultiplicity { rays, multiplicity }
        })
        .collect()
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub fn p2() -> Fan {
        Fan::new(
            2,
            vec![vec![1, 0], vec![0, 1], vec![-1, -1]],
            vec![vec![0, 1], vec![1, 2], vec![0, 2]],
            Some("p2".into()),
        )
        .unwrap()
    }

    pub fn p3() -> Fan {
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
        .unwrap()
    }

    pub fn wp1122() -> Fan {
        Fan::new(
            3,
            vec![
                vec![1, 0, 0],
                vec![-1, -2, -2],
                vec![0, 1, 0],
                vec![0, 0, 1],
            ],
            subsets_of_size(&[0, 1, 2, 3], 3),
            Some("wp1122".into()),
        )
        .unwrap()
    }

    pub fn p1xp2() -> Fan {
        let mut cones = Vec::new();
        for pair in subsets_of_size(&[0, 1, 2], 2) {
            for end in [3, 4] {
                let mut c = pair.clone();
                c.push(end);
                cones.push(c);
            }
        }
        Fan::new(
            3,
            vec![
                vec![1, 0, 0],
                vec![0, 1, 0],
                vec![-1, -1, 0],
                vec![0, 0, 1],
                vec![0, 0, -1],
            ],
            cones,
            Some("p1xp2".into()),
        )
        .unwrap()
    }

    #[test]
    fn p3_is_valid_and_smooth() {
        let v = validate_fan(&p3());
        assert!(v.valid, "{:?}", v.issues);
        assert!(v.singular_cones.is_empty());
        assert!(singular_locus_summary(&p3())
            .iter()
            .all(|c| c.multiplicity == 1));
    }

    #[test]
    fn missing_cone_leaves_dangling_faces() {
        let mut f = p3();
        f.max_cones.pop();
        let v = validate_fan(&f);
        assert!(!v.valid);
        let dangling = v
            .issues
            .iter()
            .filter(|i| matches!(i, FanIssue::DanglingFace { .. }))
            .count();
        assert_eq!(dangling, 3);
        assert!(v
            .issues
            .iter()
            .any(|i| matches!(i, FanIssue::Uncovered { .. })));
    }

    #[test]
    fn weighted_projective_space_is_singular_along_a_curve() {
        let f = wp1122();
        let v = validate_fan(&f);
        assert!(v.valid, "{:?}", v.issues);
        // cones containing both e1 and (-1,-2,-2) have index 2
        assert_eq!(v.singular_cones.len(), 2);
        let summary = singular_locus_summary(&f);
        let two_cone = summary.iter().find(|c| c.rays == vec![0, 1]).unwrap();
        assert_eq!(two_cone.multiplicity, 2);
        let smooth_two = summary.iter().find(|c| c.rays == vec![2, 3]).unwrap();
        assert_eq!(smooth_two.multiplicity, 1);
        assert!(summary
            .iter()
            .filter(|c| c.rays.len() == 1)
            .all(|c| c.multiplicity == 1));
    }

    #[test]
    fn bad_rays_are_reported() {
        let mut f = p3();
        f.rays[0] = vec![2, 0, 0];
        let v = validate_fan(&f);
        assert!(v.issues.contains(&FanIssue::NonPrimitiveRay { ray: 0 }));
        let mut g = p3();
        g.rays[3] = vec![1, 0, 0];
        let v = validate_fan(&g);
        assert!(v.issues.contains(&FanIssue::DuplicateRay {
            first: 0,
            second: 3
        }));
        assert!(matches!(
            require_valid(&g),
            Err(ToricError::DuplicateRay { .. })
        ));
    }

    #[test]
    fn overlapping_cones_detected() {
        // Two copies of the positive octant's neighbourhood: add a cone that
        // overlaps an existing one.
        let mut f = p3();
        f.rays.push(vec![1, 1, 1]);
        f.max_cones.push(vec![0, 1, 4]);
        let v = validate_fan(&f);
        assert!(!v.valid);
        assert!(v.issues.iter().any(|i| matches!(
            i,
            FanIssue::OverlappingCones { .. } | FanIssue::OvercrowdedFace { .. }
        )));
    }

    #[test]
    fn wall_counts_and_relations() {
        let w2 = walls(&p2()).unwrap();
        assert_eq!(w2.len(), 3);
        for w in &w2 {
            assert_eq!((w.lambda_a, w.lambda_b, w.mu.clone()), (1, 1, vec![1]));
        }
        assert_eq!(walls(&p1xp2()).unwrap().len(), 9);
        assert_eq!(walls(&p3()).unwrap().len(), 6);
        for f in [p2(), p3(), p1xp2(), wp1122()] {
            let ws = walls(&f).unwrap();
            assert_eq!(ws.len(), f.dim * f.max_cones.len() / 2);
            for w in ws {
                let c = w.relation_on(f.n_rays());
                for i in 0..f.dim {
                    let s: i64 = (0..f.n_rays()).map(|r| c[r] * f.rays[r][i]).sum();
                    assert_eq!(s, 0);
                }
                assert!(w.lambda_a > 0 && w.lambda_b > 0);
                assert_eq!(content_i64(&c), 1);
            }
        }
    }

    #[test]
    fn star_subdivisions() {
        let b = star_subdivision(&p3(), &[1, 1, 0]).unwrap();
        assert_eq!(b.n_rays(), 5);
        assert_eq!(b.max_cones.len(), 6);
        assert!(validate_fan(&b).valid);
        let (free, torsion) = crate::lattice::cokernel_structure(&b.ray_matrix());
        assert_eq!((free, torsion.len()), (2, 0));

        let h = star_subdivision(&p2(), &[1, 1]).unwrap();
        assert_eq!((h.n_rays(), h.max_cones.len()), (4, 4));

        assert_eq!(
            star_subdivision(&p3(), &[1, 0, 0]),
            Err(ToricError::ExistingRay(vec![1, 0, 0]))
        );
        assert!(matches!(
            star_subdivision(&p3(), &[2, 2, 0]),
            Err(ToricError::NonPrimitiveRay { .. })
        ));
    }

    #[test]
    fn json_roundtrip_and_malformed() {
        let f = p1xp2();
        assert_eq!(Fan::from_json(&f.to_json()).unwrap(), f);
        assert!(Fan::from_json(r#"{"dim":3,"rays":[[1,0]],"max_cones":[[0]]}"#).is_err());
        assert!(Fan::from_json(r#"{"dim":3,"rays":[[1.5,0,0]],"max_cones":[[0]]}"#).is_err());
    }
}
