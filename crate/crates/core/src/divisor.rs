//! Class group, divisor classes, Cartier data, intersections with invariant
//! curves, and nef/Mori cones.

use std::collections::BTreeSet;
use std::hash::{Hash, Hasher};
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Result, ToricError};
use crate::fan::{require_valid, walls, Fan, Wall};
use crate::lattice::{
    hermite_normal_form, primitive_direction, smith_normal_form, solve_square, unimodular_inverse,
    IntMatrix,
};

/// `Cl = Z^rays / image(M)` with coordinates `Z^free_rank + (torsion)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassGroup {
    pub free_rank: usize,
    pub torsion: Vec<i64>,
    /// One row per coordinate (free first, then torsion), one column per ray.
    pub projection: Vec<Vec<i64>>,
    /// Ray-coefficient representative of each coordinate basis vector.
    pub lift: Vec<Vec<i64>>,
}

impl ClassGroup {
    pub fn new(fan: &Fan) -> Result<Self> {
        let n = fan.n_rays();
        let snf = smith_normal_form(&fan.ray_matrix());
        let factors = snf.invariant_factors();
        let k = factors.len();
        let linv = unimodular_inverse(&snf.left)?;
        let free_rank = n - k;

        let mut projection = Vec::new();
        let mut lift = Vec::new();
        if free_rank > 0 {
            let free_rows: Vec<Vec<BigInt>> = (k..n).map(|i| snf.left.row(i).to_vec()).collect();
            let h = hermite_normal_form(&IntMatrix::from_rows(&free_rows)?);
            let tinv = unimodular_inverse(&h.transform)?;
            for i in 0..free_rank {
                projection.push(to_i64(h.form.row(i))?);
            }
            // new lift j = sum_i (old lift i) * tinv[i][j]
            for j in 0..free_rank {
                let col: Vec<BigInt> = (0..n)
                    .map(|r| {
                        (0..free_rank)
                            .map(|i| &linv[(r, k + i)] * &tinv[(i, j)])
                            .sum::<BigInt>()
                    })
                    .collect();
                lift.push(to_i64(&col)?);
            }
        }
        let mut torsion = Vec::new();
        for (i, d) in factors.iter().enumerate() {
            if d.is_one() {
                continue;
            }
            let d64 = d
                .to_i64()
                .ok_or_else(|| ToricError::Unsupported("huge torsion".into()))?;
            torsion.push(d64);
            let row: Vec<i64> = to_i64(snf.left.row(i))?
                .into_iter()
                .map(|x| x.rem_euclid(d64))
                .collect();
            projection.push(row);
            let col: Vec<BigInt> = (0..n).map(|r| linv[(r, i)].clone()).collect();
            lift.push(to_i64(&col)?);
        }
        Ok(Self {
            free_rank,
            torsion,
            projection,
            lift,
        })
    }

    pub fn n_coords(&self) -> usize {
        self.free_rank + self.torsion.len()
    }

    pub fn project(&self, coeffs: &[i64]) -> Vec<i64> {
        self.projection
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let v: i64 = row.iter().zip(coeffs).map(|(a, b)| a * b).sum();
                if i >= self.free_rank {
                    v.rem_euclid(self.torsion[i - self.free_rank])
                } else {
                    v
                }
            })
            .collect()
    }

    pub fn representative(&self, coords: &[i64]) -> Vec<i64> {
        let n = self.lift.first().map_or(0, Vec::len);
        let mut out = vec![0i64; n];
        for (c, l) in coords.iter().zip(&self.lift) {
            for (o, x) in out.iter_mut().zip(l) {
                *o += c * x;
            }
        }
        out
    }
}

fn to_i64(v: &[BigInt]) -> Result<Vec<i64>> {
    v.iter()
        .map(|x| {
            x.to_i64()
                .ok_or_else(|| ToricError::Unsupported("class-group entry exceeds i64".into()))
        })
        .collect()
}

/// A divisor class with a representative Weil divisor. Equality and hashing
/// use only the class coordinates.
#[derive(Clone, Debug, Serialize)]
pub struct DivisorClass {
    pub coeffs: Vec<i64>,
    pub class_coords: Vec<i64>,
}

impl PartialEq for DivisorClass {
    fn eq(&self, other: &Self) -> bool {
        self.class_coords == other.class_coords
    }
}

impl Eq for DivisorClass {}

impl Hash for DivisorClass {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.class_coords.hash(state);
    }
}

/// Local data `m_sigma` with `<m_sigma, u_rho> = -a_rho` on each maximal cone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CartierData {
    pub local: Vec<Vec<BigRational>>,
    pub is_cartier: bool,
    /// First maximal cone whose `m_sigma` is not integral.
    pub obstruction: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Positivity {
    NotNef,
    NefNotAmple,
    Ample,
}

/// Extremal ray of the Mori cone, represented by invariant curves.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MoriGenerator {
    /// Primitive pairing vector against the free class-group basis.
    pub pairing: Vec<i64>,
    /// Walls whose curves span this ray.
    pub walls: Vec<usize>,
}

/// A fan with everything derived from it that the rest of the engine uses.
#[derive(Debug)]
pub struct ToricVariety {
    pub fan: Fan,
    pub class_group: ClassGroup,
    pub walls: Vec<Wall>,
    pub cone_multiplicity: Vec<u64>,
    pub wall_multiplicity: Vec<u64>,
    /// Per wall: intersection numbers with the free basis classes.
    wall_pairing: Vec<Vec<BigRational>>,
    /// Per maximal cone: inverse of the ray matrix (rays as rows).
    cone_inverse: Vec<Vec<Vec<BigRational>>>,
    nef_basis: Option<Vec<DivisorClass>>,
    pub(crate) betti: OnceLock<Vec<Vec<usize>>>,
}

impl Clone for ToricVariety {
    fn clone(&self) -> Self {
        Self {
            fan: self.fan.clone(),
            class_group: self.class_group.clone(),
            walls: self.walls.clone(),
            cone_multiplicity: self.cone_multiplicity.clone(),
            wall_multiplicity: self.wall_multiplicity.clone(),
            wall_pairing: self.wall_pairing.clone(),
            cone_inverse: self.cone_inverse.clone(),
            nef_basis: self.nef_basis.clone(),
            betti: self.betti.clone(),
        }
    }
}

impl ToricVariety {
    /// Validates the fan and precomputes class group, walls and local inverses.
    pub fn new(fan: Fan) -> Result<Self> {
        require_valid(&fan)?;
        let class_group = ClassGroup::new(&fan)?;
        let ws = walls(&fan)?;
        let cone_multiplicity = fan.max_cones.iter().map(|c| fan.multiplicity(c)).collect();
        let wall_multiplicity = ws.iter().map(|w| fan.multiplicity(&w.face)).collect();
        let cone_inverse = fan
            .max_cones
            .iter()
            .map(|c| cone_inverse(&fan, c))
            .collect::<Result<_>>()?;
        let mut v = Self {
            fan,
            class_group,
            walls: ws,
            cone_multiplicity,
            wall_multiplicity,
            wall_pairing: Vec::new(),
            cone_inverse,
            nef_basis: None,
            betti: OnceLock::new(),
        };
        v.wall_pairing = (0..v.walls.len())
            .map(|w| {
                (0..v.class_group.free_rank)
                    .map(|j| v.intersection_coeffs(&v.class_group.lift[j], w))
                    .collect()
            })
            .collect();
        if v.class_group.torsion.is_empty() && v.class_group.free_rank <= 3 {
            let gens = v.nef_cone_generators()?;
            if gens.len() == v.class_group.free_rank {
                v.nef_basis = Some(gens);
            }
        }
        Ok(v)
    }

    pub fn dim(&self) -> usize {
        self.fan.dim
    }

    pub fn n_rays(&self) -> usize {
        self.fan.n_rays()
    }

    pub fn picard_rank(&self) -> usize {
        self.class_group.free_rank
    }

    pub fn divisor(&self, coeffs: &[i64]) -> Result<DivisorClass> {
        if coeffs.len() != self.n_rays() {
            return Err(ToricError::WrongDimension {
                expected: self.n_rays(),
                found: coeffs.len(),
            });
        }
        Ok(DivisorClass {
            coeffs: coeffs.to_vec(),
            class_coords: self.class_group.project(coeffs),
        })
    }

    pub fn from_class_coords(&self, coords: &[i64]) -> Result<DivisorClass> {
        if coords.len() != self.class_group.n_coords() {
            return Err(ToricError::WrongDimension {
                expected: self.class_group.n_coords(),
                found: coords.len(),
            });
        }
        self.divisor(&self.class_group.representative(coords))
    }

    pub fn ray_divisor(&self, rho: usize) -> DivisorClass {
        let mut c = vec![0; self.n_rays()];
        c[rho] = 1;
        self.divisor(&c).expect("length matches")
    }

    pub fn zero(&self) -> DivisorClass {
        self.divisor(&vec![0; self.n_rays()])
            .expect("length matches")
    }

    /// `sum k_i * D_i`.
    pub fn combine(&self, terms: &[(i64, &DivisorClass)]) -> DivisorClass {
        let mut c = vec![0i64; self.n_rays()];
        for (k, d) in terms {
            for (o, x) in c.iter_mut().zip(&d.coeffs) {
                *o += k * x;
            }
        }
        self.divisor(&c).expect("length matches")
    }

    pub fn add(&self, a: &DivisorClass, b: &DivisorClass) -> DivisorClass {
        self.combine(&[(1, a), (1, b)])
    }

    pub fn sub(&self, a: &DivisorClass, b: &DivisorClass) -> DivisorClass {
        self.combine(&[(1, a), (-1, b)])
    }

    pub fn scale(&self, k: i64, a: &DivisorClass) -> DivisorClass {
        self.combine(&[(k, a)])
    }

    /// Anticanonical class: every ray coefficient 1.
    pub fn anticanonical(&self) -> DivisorClass {
        self.divisor(&vec![1; self.n_rays()])
            .expect("length matches")
    }

    /// Divisor of the character `m`.
    pub fn principal_divisor(&self, m: &[i64]) -> Vec<i64> {
        self.fan
            .rays
            .iter()
            .map(|u| u.iter().zip(m).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn cartier_data(&self, d: &DivisorClass) -> CartierData {
        let mut local = Vec::with_capacity(self.fan.max_cones.len());
        let mut obstruction = None;
        for i in 0..self.fan.max_cones.len() {
            let m = self.local_character(&d.coeffs, i);
            if obstruction.is_none() && m.iter().any(|x| !x.is_integer()) {
                obstruction = Some(i);
            }
            local.push(m);
        }
        CartierData {
            local,
            is_cartier: obstruction.is_none(),
            obstruction,
        }
    }

    pub fn is_cartier(&self, d: &DivisorClass) -> bool {
        (0..self.fan.max_cones.len()).all(|i| {
            self.local_character(&d.coeffs, i)
                .iter()
                .all(|x| x.is_integer())
        })
    }

    fn require_cartier(&self, d: &DivisorClass) -> Result<()> {
        match self.cartier_data(d).obstruction {
            Some(cone) => Err(ToricError::NotCartier { cone }),
            None => Ok(()),
        }
    }

    /// `m_sigma` for the cone with index `cone`.
    fn local_character(&self, coeffs: &[i64], cone: usize) -> Vec<BigRational> {
        let inv = &self.cone_inverse[cone];
        let rays = &self.fan.max_cones[cone];
        (0..self.dim())
            .map(|i| {
                rays.iter()
                    .enumerate()
                    .map(|(j, &r)| &inv[i][j] * BigRational::from_integer((-coeffs[r]).into()))
                    .sum()
            })
            .collect()
    }

    fn intersection_coeffs(&self, coeffs: &[i64], wall: usize) -> BigRational {
        let w = &self.walls[wall];
        let ma = self.local_character(coeffs, w.cone_a);
        let mb = self.local_character(coeffs, w.cone_b);
        let ub = &self.fan.rays[w.ray_b];
        let pairing: BigRational = ma
            .iter()
            .zip(&mb)
            .zip(ub)
            .map(|((a, b), &u)| (a - b) * BigRational::from_integer(u.into()))
            .sum();
        pairing
            * BigRational::new(
                BigInt::from(self.wall_multiplicity[wall]),
                BigInt::from(self.cone_multiplicity[w.cone_b]),
            )
    }

    /// `D . C_w` from the jump of the local Cartier data across the wall.
    pub fn intersection_number(&self, d: &DivisorClass, wall: usize) -> BigRational {
        self.intersection_coeffs(&d.coeffs, wall)
    }

    /// Intersection numbers of the free class-group basis with the wall curve.
    pub fn wall_pairing(&self, wall: usize) -> &[BigRational] {
        &self.wall_pairing[wall]
    }

    /// Same number as [`intersection_number`](Self::intersection_number), read
    /// off the cached pairing vector.
    pub fn pairing(&self, d: &DivisorClass, wall: usize) -> BigRational {
        self.wall_pairing[wall]
            .iter()
            .zip(&d.class_coords)
            .map(|(w, &x)| w * BigRational::from_integer(x.into()))
            .sum()
    }

    pub fn nef_ample_test(&self, d: &DivisorClass) -> Result<Positivity> {
        self.require_cartier(d)?;
        Ok(self.positivity(d))
    }

    /// Kleiman-type test without the Cartier requirement.
    pub fn positivity(&self, d: &DivisorClass) -> Positivity {
        let mut ample = true;
        for w in 0..self.walls.len() {
            let x = self.pairing(d, w);
            if x.is_negative() {
                return Positivity::NotNef;
            }
            if x.is_zero() {
                ample = false;
            }
        }
        if ample {
            Positivity::Ample
        } else {
            Positivity::NefNotAmple
        }
    }

    pub fn is_nef(&self, d: &DivisorClass) -> bool {
        self.positivity(d) != Positivity::NotNef
    }

    pub fn is_ample(&self, d: &DivisorClass) -> bool {
        self.positivity(d) == Positivity::Ample
    }

    fn require_small_free(&self) -> Result<usize> {
        let k = self.class_group.free_rank;
        if !self.class_group.torsion.is_empty() {
            return Err(ToricError::Unsupported(
                "nef cone computation needs a torsion-free class group".into(),
            ));
        }
        if k == 0 || k > 3 {
            return Err(ToricError::Unsupported(format!(
                "nef cone computation supports class-group rank 1..=3, got {k}"
            )));
        }
        Ok(k)
    }

    /// Extremal rays of the nef cone as primitive classes, sorted by class
    /// coordinates.
    pub fn nef_cone_generators(&self) -> Result<Vec<DivisorClass>> {
        let k = self.require_small_free()?;
        let rays = cone_extremal_rays(k, &self.wall_pairing);
        rays.iter()
            .map(|r| self.from_class_coords(&to_i64(r)?))
            .collect()
    }

    /// Extremal rays of the cone spanned by wall curves.
    pub fn mori_generators(&self) -> Result<Vec<MoriGenerator>> {
        let k = self.require_small_free()?;
        let nef: Vec<Vec<BigRational>> = cone_extremal_rays(k, &self.wall_pairing)
            .into_iter()
            .map(|r| r.into_iter().map(BigRational::from_integer).collect())
            .collect();
        let rays = cone_extremal_rays(k, &nef);
        rays.into_iter()
            .map(|ray| {
                let walls = (0..self.walls.len())
                    .filter(|&w| primitive_direction(&self.wall_pairing[w]).as_ref() == Some(&ray))
                    .collect();
                Ok(MoriGenerator {
                    pairing: to_i64(&ray)?,
                    walls,
                })
            })
            .collect()
    }

    /// Designated basis of the class group in which divisors are usually
    /// written (the nef generators when they form a basis).
    pub fn nef_basis(&self) -> Option<&[DivisorClass]> {
        self.nef_basis.as_deref()
    }

    pub fn set_nef_basis(&mut self, basis: Vec<DivisorClass>) -> Result<()> {
        if basis.len() != self.class_group.free_rank {
            return Err(ToricError::DimensionMismatch(format!(
                "{} basis classes for rank {}",
                basis.len(),
                self.class_group.free_rank
            )));
        }
        let rows: Vec<Vec<BigRational>> = basis
            .iter()
            .map(|b| {
                b.class_coords[..self.class_group.free_rank]
                    .iter()
                    .map(|&x| BigRational::from_integer(x.into()))
                    .collect()
            })
            .collect();
        if crate::lattice::rational_rank(&rows) != basis.len() {
            return Err(ToricError::Inconsistent(
                "basis classes are dependent".into(),
            ));
        }
        self.nef_basis = Some(basis);
        Ok(())
    }

    /// `sum c_i * basis_i`.
    pub fn from_nef_coords(&self, coords: &[i64]) -> Result<DivisorClass> {
        let basis = self.nef_basis.as_ref().ok_or(ToricError::EmptyBasis)?;
        if coords.len() != basis.len() {
            return Err(ToricError::WrongDimension {
                expected: basis.len(),
                found: coords.len(),
            });
        }
        let terms: Vec<(i64, &DivisorClass)> = coords.iter().copied().zip(basis).collect();
        Ok(self.combine(&terms))
    }

    /// Rational coordinates in the designated basis (torsion ignored).
    pub fn nef_coords(&self, d: &DivisorClass) -> Option<Vec<BigRational>> {
        let basis = self.nef_basis.as_ref()?;
        let k = self.class_group.free_rank;
        let a: Vec<Vec<BigRational>> = (0..k)
            .map(|i| {
                basis
                    .iter()
                    .map(|b| BigRational::from_integer(b.class_coords[i].into()))
                    .collect()
            })
            .collect();
        let rhs: Vec<BigRational> = d.class_coords[..k]
            .iter()
            .map(|&x| BigRational::from_integer(x.into()))
            .collect();
        solve_square(&a, &rhs)
    }

    /// True when `d` is not a proper multiple of a Cartier class.
    pub fn is_primitive_cartier(&self, d: &DivisorClass) -> bool {
        let g = crate::lattice::content_i64(&d.class_coords[..self.class_group.free_rank]);
        if g == 0 {
            return false;
        }
        (2..=g.abs()).filter(|k| g % k == 0).all(|k| {
            let coords: Vec<i64> = d
                .class_coords
                .iter()
                .take(self.class_group.free_rank)
                .map(|x| x / k)
                .collect();
            let mut full = coords;
            full.extend(std::iter::repeat_n(0, self.class_group.torsion.len()));
            let q = self.from_class_coords(&full).expect("length matches");
            // a torsion twist could still make a Cartier quotient
            !self
                .torsion_twists(&q)
                .iter()
                .any(|t| self.is_cartier(t) && self.scale(k, t) == *d)
        })
    }

    fn torsion_twists(&self, d: &DivisorClass) -> Vec<DivisorClass> {
        let mut out = vec![d.clone()];
        let f = self.class_group.free_rank;
        for (i, &t) in self.class_group.torsion.iter().enumerate() {
            let mut next = Vec::new();
            for base in &out {
                for s in 0..t {
                    let mut c = base.class_coords.clone();
                    c[f + i] = (c[f + i] + s).rem_euclid(t);
                    next.push(self.from_class_coords(&c).expect("length matches"));
                }
            }
            out = next;
        }
        out
    }

    pub fn is_gorenstein(&self) -> bool {
        self.is_cartier(&self.anticanonical())
    }

    pub fn is_fano(&self) -> bool {
        self.is_gorenstein() && self.is_ample(&self.anticanonical())
    }
}

fn cone_inverse(fan: &Fan, cone: &[usize]) -> Result<Vec<Vec<BigRational>>> {
    let n = fan.dim;
    let a: Vec<Vec<BigRational>> = cone
        .iter()
        .map(|&r| {
            fan.rays[r]
                .iter()
                .map(|&x| BigRational::from_integer(x.into()))
                .collect()
        })
        .collect();
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let e: Vec<BigRational> = (0..n)
            .map(|i| {
                if i == j {
                    BigRational::one()
                } else {
                    BigRational::zero()
                }
            })
            .collect();
        cols.push(
            solve_square(&a, &e)
                .ok_or_else(|| ToricError::InvalidFan(format!("cone {cone:?} is degenerate")))?,
        );
    }
    Ok((0..n)
        .map(|i| (0..n).map(|j| cols[j][i].clone()).collect())
        .collect())
}

/// Extremal rays (primitive, sorted, deduplicated) of the pointed cone
/// `{x in Q^k : <c, x> >= 0 for every c}`, for `k <= 3`.
pub(crate) fn cone_extremal_rays(k: usize, constraints: &[Vec<BigRational>]) -> Vec<Vec<BigInt>> {
    let nonzero: Vec<&Vec<BigRational>> = constraints
        .iter()
        .filter(|c| c.iter().any(|x| !x.is_zero()))
        .collect();
    let mut candidates: Vec<Vec<BigRational>> = Vec::new();
    match k {
        1 => {
            candidates.push(vec![BigRational::one()]);
        }
        2 => {
            for c in &nonzero {
                candidates.push(vec![-c[1].clone(), c[0].clone()]);
            }
        }
        3 => {
            for (i, a) in nonzero.iter().enumerate() {
                for b in &nonzero[i + 1..] {
                    candidates.push(vec![
                        &a[1] * &b[2] - &a[2] * &b[1],
                        &a[2] * &b[0] - &a[0] * &b[2],
                        &a[0] * &b[1] - &a[1] * &b[0],
                    ]);
                }
            }
        }
        _ => unreachable!("rank checked by caller"),
    }
    let mut out = BTreeSet::new();
    for c in candidates {
        for sign in [1i64, -1] {
            let v: Vec<BigRational> = c
                .iter()
                .map(|x| x * BigRational::from_integer(sign.into()))
                .collect();
            if v.iter().all(Zero::is_zero) {
                continue;
            }
            let ok = nonzero.iter().all(|con| {
                !con.iter()
                    .zip(&v)
                    .map(|(a, b)| a * b)
                    .sum::<BigRational>()
                    .is_negative()
            });
            if ok {
                out.insert(primitive_direction(&v).expect("nonzero"));
            }
        }
    }
    out.into_iter().collect()
}
