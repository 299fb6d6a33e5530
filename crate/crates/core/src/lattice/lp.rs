//! Exact rational simplex (Bland's rule) for feasibility and boundedness of
//! polyhedra `{x : <a_i, x> >= c_i}` with free variables.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Result, ToricError};

/// The closed halfspace `<normal, x> >= offset`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Halfspace {
    pub normal: Vec<BigRational>,
    pub offset: BigRational,
}

impl Halfspace {
    pub fn new(normal: Vec<BigRational>, offset: BigRational) -> Self {
        Self { normal, offset }
    }

    pub fn from_ints(normal: &[i64], offset: i64) -> Self {
        Self {
            normal: normal.iter().map(|&x| super::rat(x)).collect(),
            offset: super::rat(offset),
        }
    }

    pub fn contains(&self, x: &[BigRational]) -> bool {
        dot(&self.normal, x) >= self.offset
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LpStatus {
    Empty,
    BoundedNonempty,
    Unbounded,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpVerdict {
    pub status: LpStatus,
    /// A feasible point for nonempty regions.
    pub point: Option<Vec<BigRational>>,
    /// A nonzero recession direction for unbounded regions.
    pub ray: Option<Vec<BigRational>>,
}

fn dot(a: &[BigRational], b: &[BigRational]) -> BigRational {
    a.iter()
        .zip(b)
        .fold(BigRational::zero(), |acc, (x, y)| acc + x * y)
}

enum Outcome {
    Infeasible,
    Optimal {
        point: Vec<BigRational>,
    },
    Unbounded {
        point: Vec<BigRational>,
        ray: Vec<BigRational>,
    },
}

struct Tableau {
    rows: Vec<Vec<BigRational>>,
    basis: Vec<usize>,
    /// Reduced costs for maximization; last entry unused.
    obj: Vec<BigRational>,
    ncols: usize,
}

impl Tableau {
    fn pivot(&mut self, p: usize, q: usize) {
        let inv = self.rows[p][q].recip();
        for x in self.rows[p].iter_mut() {
            *x *= &inv;
        }
        let prow = self.rows[p].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == p || row[q].is_zero() {
                continue;
            }
            let f = row[q].clone();
            for (x, y) in row.iter_mut().zip(&prow) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        if !self.obj[q].is_zero() {
            let f = self.obj[q].clone();
            for (x, y) in self.obj.iter_mut().zip(&prow) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        self.basis[p] = q;
    }

    fn set_objective(&mut self, cost: &[BigRational]) {
        let mut obj: Vec<BigRational> = cost.to_vec();
        obj.push(BigRational::zero());
        for (i, row) in self.rows.iter().enumerate() {
            let cb = &cost[self.basis[i]];
            if cb.is_zero() {
                continue;
            }
            for (x, y) in obj.iter_mut().zip(row) {
                *x -= cb * y;
            }
        }
        self.obj = obj;
    }

    /// Runs Bland's rule over columns `< limit`. Returns the entering column
    /// with no blocking row when the objective is unbounded.
    fn optimize(&mut self, limit: usize) -> Option<usize> {
        let rhs = self.ncols;
        loop {
            let q = (0..limit).find(|&j| self.obj[j].is_positive())?;
            let mut best: Option<(usize, BigRational)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if !row[q].is_positive() {
                    continue;
                }
                let ratio = &row[rhs] / &row[q];
                let better = match &best {
                    None => true,
                    Some((bi, br)) => {
                        ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi])
                    }
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            match best {
                Some((p, _)) => self.pivot(p, q),
                None => return Some(q),
            }
        }
    }

    fn value_of(&self, nvars: usize) -> Vec<BigRational> {
        let mut y = vec![BigRational::zero(); nvars];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < nvars {
                y[b] = self.rows[i][self.ncols].clone();
            }
        }
        y
    }
}

/// maximize `cost . x` subject to the halfspaces, `x` free in `dim` variables.
fn solve(dim: usize, halfspaces: &[Halfspace], cost: &[BigRational]) -> Outcome {
    let k = halfspaces.len();
    // columns: x+ (dim) | x- (dim) | slack (k) | artificial (k)
    let nstd = 2 * dim + k;
    let ncols = nstd + k;
    let mut rows = Vec::with_capacity(k);
    for (i, h) in halfspaces.iter().enumerate() {
        let mut row = vec![BigRational::zero(); ncols + 1];
        for j in 0..dim {
            row[j] = h.normal[j].clone();
            row[dim + j] = -h.normal[j].clone();
        }
        row[2 * dim + i] = -BigRational::one();
        row[ncols] = h.offset.clone();
        if row[ncols].is_negative() {
            for x in row.iter_mut() {
                *x = -std::mem::take(x);
            }
        }
        row[nstd + i] = BigRational::one();
        rows.push(row);
    }
    let mut t = Tableau {
        rows,
        basis: (nstd..ncols).collect(),
        obj: Vec::new(),
        ncols,
    };

    let mut phase1 = vec![BigRational::zero(); ncols];
    for c in phase1.iter_mut().skip(nstd) {
        *c = -BigRational::one();
    }
    t.set_objective(&phase1);
    t.optimize(ncols);
    let infeas: BigRational = t
        .basis
        .iter()
        .enumerate()
        .filter(|(_, &b)| b >= nstd)
        .fold(BigRational::zero(), |acc, (i, _)| acc + &t.rows[i][ncols]);
    if infeas.is_positive() {
        return Outcome::Infeasible;
    }

    // Drive zero-valued artificials out of the basis; drop redundant rows.
    let mut i = 0;
    while i < t.rows.len() {
        if t.basis[i] >= nstd {
            if let Some(q) = (0..nstd).find(|&j| !t.rows[i][j].is_zero()) {
                t.pivot(i, q);
                i += 1;
            } else {
                t.rows.remove(i);
                t.basis.remove(i);
            }
        } else {
            i += 1;
        }
    }

    let mut phase2 = vec![BigRational::zero(); ncols];
    for j in 0..dim {
        phase2[j] = cost[j].clone();
        phase2[dim + j] = -cost[j].clone();
    }
    t.set_objective(&phase2);
    let unbounded = t.optimize(nstd);
    let y = t.value_of(nstd);
    let point: Vec<BigRational> = (0..dim).map(|j| &y[j] - &y[dim + j]).collect();
    match unbounded {
        None => Outcome::Optimal { point },
        Some(q) => {
            let mut d = vec![BigRational::zero(); nstd];
            d[q] = BigRational::one();
            for (i, &b) in t.basis.iter().enumerate() {
                if b < nstd {
                    d[b] = -t.rows[i][q].clone();
                }
            }
            let ray = (0..dim).map(|j| &d[j] - &d[dim + j]).collect();
            Outcome::Unbounded { point, ray }
        }
    }
}

fn check_dims(dim: usize, halfspaces: &[Halfspace]) -> Result<()> {
    if dim == 0 {
        return Err(ToricError::DimensionMismatch(
            "ambient dimension must be >= 1".into(),
        ));
    }
    if let Some(h) = halfspaces.iter().find(|h| h.normal.len() != dim) {
        return Err(ToricError::DimensionMismatch(format!(
            "halfspace normal of length {} in dimension {dim}",
            h.normal.len()
        )));
    }
    Ok(())
}

/// Classifies the polyhedron cut out by `halfspaces` as empty, bounded and
/// nonempty, or unbounded, with a witness point or ray.
pub fn lp_classify(dim: usize, halfspaces: &[Halfspace]) -> Result<LpVerdict> {
    check_dims(dim, halfspaces)?;
    let zero = vec![BigRational::zero(); dim];
    let point = match solve(dim, halfspaces, &zero) {
        Outcome::Infeasible => {
            return Ok(LpVerdict {
                status: LpStatus::Empty,
                point: None,
                ray: None,
            })
        }
        Outcome::Optimal { point } | Outcome::Unbounded { point, .. } => point,
    };
    for j in 0..dim {
        for sign in [1i64, -1] {
            let mut cost = zero.clone();
            cost[j] = super::rat(sign);
            if let Outcome::Unbounded { ray, .. } = solve(dim, halfspaces, &cost) {
                return Ok(LpVerdict {
                    status: LpStatus::Unbounded,
                    point: Some(point),
                    ray: Some(ray),
                });
            }
        }
    }
    Ok(LpVerdict {
        status: LpStatus::BoundedNonempty,
        point: Some(point),
        ray: None,
    })
}

/// Exact per-coordinate `(min, max)` of a polyhedron; `None` when empty.
pub fn coordinate_bounds(
    dim: usize,
    halfspaces: &[Halfspace],
) -> Result<Option<Vec<(BigRational, BigRational)>>> {
    check_dims(dim, halfspaces)?;
    let mut bounds = Vec::with_capacity(dim);
    for j in 0..dim {
        let mut pair = [BigRational::zero(), BigRational::zero()];
        for (slot, sign) in [(0usize, -1i64), (1, 1)] {
            let mut cost = vec![BigRational::zero(); dim];
            cost[j] = super::rat(sign);
            match solve(dim, halfspaces, &cost) {
                Outcome::Infeasible => return Ok(None),
                Outcome::Unbounded { .. } => return Err(ToricError::UnboundedPolytope),
                Outcome::Optimal { point } => pair[slot] = point[j].clone(),
            }
        }
        let [lo, hi] = pair;
        bounds.push((lo, hi));
    }
    Ok(Some(bounds))
}
