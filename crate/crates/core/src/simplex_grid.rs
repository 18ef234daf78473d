//! The standard n-simplex, its uniform subdivision at resolution `m`, and the
//! Freudenthal (Kuhn) triangulation of that grid.
//!
//! A grid vertex is a tuple `(k_0, ..., k_n)` of nonnegative integers with
//! `sum k_i = m`; the price point it stands for is `k / m`. Cells are never
//! stored: a [`GridCell`] is a base vertex plus a permutation of `1..=d`,
//! and its vertices are the chain `v^0 = base`, `v^t = v^{t-1} + s(perm[t])`
//! where the step `s(j)` moves one unit from coordinate `j` to `j - 1`.
//!
//! In the cumulative coordinates `y_j = k_0 + ... + k_{j-1}` the simplex
//! becomes the order region `0 <= y_1 <= ... <= y_n <= m` and a step `s(j)` is
//! the unit vector `e_j`, so cells are exactly the Kuhn simplices of unit
//! cubes that fit inside that region. There are `m^n` of them.
//!
//! All geometry is exact. Distances are measured in the max norm.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use itertools::Itertools;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{format_rational, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GridError {
    #[error("expected {expected} coordinates, found {found}")]
    WrongLength { expected: usize, found: usize },
    #[error("coordinate {index} is negative")]
    NegativeCoordinate { index: usize },
    #[error("coordinates sum to {sum}, not 1")]
    NotNormalized { sum: String },
    #[error("simplex dimension must be at least 1")]
    DimensionZero,
    #[error("resolution m must be at least 1")]
    ResolutionZero,
    #[error("{0} is not a cell of this subdivision")]
    CellOutOfRange(GridCell),
    #[error("vertex {0:?} is not a vertex of this subdivision")]
    VertexOutOfRange(Vec<u32>),
    #[error("vertex index {index} out of range for a {dim}-cell")]
    FacetIndex { index: usize, dim: usize },
}

/// A point of the standard simplex with exact rational coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BarycentricPoint {
    coords: Vec<Rational>,
}

impl BarycentricPoint {
    /// Validates `coords` as a simplex point: nonnegative, summing to exactly one.
    pub fn new(coords: Vec<Rational>) -> Result<Self, GridError> {
        if coords.len() < 2 {
            return Err(GridError::DimensionZero);
        }
        if let Some(index) = coords.iter().position(|c| c.is_negative()) {
            return Err(GridError::NegativeCoordinate { index });
        }
        let sum: Rational = coords.iter().sum();
        if !sum.is_one() {
            return Err(GridError::NotNormalized {
                sum: format_rational(&sum),
            });
        }
        Ok(Self { coords })
    }

    /// Like [`BarycentricPoint::new`], also checking the point has `n + 1` coordinates.
    pub fn with_dim(n: usize, coords: Vec<Rational>) -> Result<Self, GridError> {
        if coords.len() != n + 1 {
            return Err(GridError::WrongLength {
                expected: n + 1,
                found: coords.len(),
            });
        }
        Self::new(coords)
    }

    /// The unit vertex `e_k` of the n-simplex.
    pub fn unit(n: usize, k: usize) -> Self {
        let coords = (0..=n)
            .map(|i| if i == k { Rational::one() } else { Rational::zero() })
            .collect();
        Self { coords }
    }

    pub fn from_vertex(vertex: &GridVertex, m: u32) -> Self {
        let m = BigInt::from(m);
        let coords = vertex
            .0
            .iter()
            .map(|&k| Rational::new(BigInt::from(k), m.clone()))
            .collect();
        Self { coords }
    }

    /// Equal-weight average of simplex points.
    pub fn barycenter(points: &[BarycentricPoint]) -> Self {
        assert!(!points.is_empty(), "barycenter of no points");
        let count = Rational::from_integer(BigInt::from(points.len()));
        let dim = points[0].coords.len();
        let coords = (0..dim)
            .map(|i| points.iter().map(|p| &p.coords[i]).sum::<Rational>() / &count)
            .collect();
        Self { coords }
    }

    pub fn coords(&self) -> &[Rational] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<Rational> {
        self.coords
    }

    /// Simplex dimension `n` (one less than the coordinate count).
    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coords.iter().map(crate::scalar::Coord::to_f64).collect()
    }

    pub fn max_norm_distance(&self, other: &BarycentricPoint) -> Rational {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a - b).abs())
            .max()
            .unwrap_or_else(Rational::zero)
    }
}

impl fmt::Display for BarycentricPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.coords.iter().map(format_rational).join(", "))
    }
}

/// Integer grid coordinates `(k_0, ..., k_n)`, summing to the resolution `m`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GridVertex(pub Vec<u32>);

impl GridVertex {
    pub fn coords(&self) -> &[u32] {
        &self.0
    }

    /// Indices with a positive coordinate: the face of the simplex the vertex lies in.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().filter(|(_, &k)| k > 0).map(|(i, _)| i)
    }
}

/// One simplex of the Freudenthal triangulation.
///
/// `perm` is a permutation of `1..=d` where `d` is the cell dimension. Top
/// cells have `d = n`; path following also walks lower-dimensional cells of
/// the faces spanned by `e_0, ..., e_d`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridCell {
    pub base: GridVertex,
    pub perm: Vec<u16>,
}

impl GridCell {
    pub fn dim(&self) -> usize {
        self.perm.len()
    }
}

impl fmt::Display for GridCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{base: {:?}, perm: {:?}}}", self.base.0, self.perm)
    }
}

/// Result of crossing a cell facet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Neighbor {
    Cell(GridCell),
    /// The facet lies in a face of the simplex.
    Boundary,
}

fn binom(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * u128::from(n - i) / u128::from(i + 1);
    }
    r
}

/// Applies step `j` (one unit from coordinate `j` to `j - 1`) with sign `dir`.
fn apply_step(v: &mut [i64], j: u16, dir: i64) {
    let j = usize::from(j);
    v[j] -= dir;
    v[j - 1] += dir;
}

/// The uniform subdivision of the n-simplex into `m^n` Freudenthal cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Subdivision {
    n: usize,
    m: u32,
}

impl Subdivision {
    pub fn new(n: usize, m: u32) -> Result<Self, GridError> {
        if n == 0 {
            return Err(GridError::DimensionZero);
        }
        if m == 0 {
            return Err(GridError::ResolutionZero);
        }
        Ok(Self { n, m })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn resolution(&self) -> u32 {
        self.m
    }

    /// `m^n`, saturating at `u128::MAX`.
    pub fn cell_count(&self) -> u128 {
        u128::from(self.m)
            .checked_pow(self.n as u32)
            .unwrap_or(u128::MAX)
    }

    /// Number of grid vertices, `C(m + n, n)`.
    pub fn vertex_count(&self) -> usize {
        usize::try_from(binom(u64::from(self.m) + self.n as u64, self.n as u64))
            .expect("vertex count exceeds usize")
    }

    /// Max-norm diameter bound for every cell: `1 / m`.
    ///
    /// Two vertices of a cell differ by a run of consecutive steps, which
    /// changes each coordinate by at most one grid unit.
    pub fn mesh_diameter(&self) -> Rational {
        Rational::new(BigInt::one(), BigInt::from(self.m))
    }

    pub fn check_vertex(&self, v: &GridVertex) -> Result<(), GridError> {
        if v.0.len() != self.n + 1 || v.0.iter().map(|&k| u64::from(k)).sum::<u64>() != u64::from(self.m) {
            return Err(GridError::VertexOutOfRange(v.0.clone()));
        }
        Ok(())
    }

    /// Position of `v` in lexicographic order of all grid vertices.
    pub fn vertex_rank(&self, v: &GridVertex) -> Result<usize, GridError> {
        self.check_vertex(v)?;
        Ok(self.rank_unchecked(&v.0))
    }

    pub(crate) fn rank_unchecked(&self, k: &[u32]) -> usize {
        let mut rank: u128 = 0;
        let mut rest = u64::from(self.m);
        for (i, &ki) in k.iter().enumerate().take(self.n) {
            let q = (self.n - i) as u64;
            let ki = u64::from(ki);
            rank += binom(rest + q, q) - binom(rest - ki + q, q);
            rest -= ki;
        }
        rank as usize
    }

    /// Inverse of [`Subdivision::vertex_rank`].
    pub fn vertex_at(&self, rank: usize) -> GridVertex {
        let mut rank = rank as u128;
        let mut rest = u64::from(self.m);
        let mut k = Vec::with_capacity(self.n + 1);
        for i in 0..self.n {
            let q = (self.n - i) as u64;
            let total = binom(rest + q, q);
            let before = |x: u64| total - binom(rest - x + q, q);
            // largest x in [0, rest] with before(x) <= rank
            let (mut lo, mut hi) = (0u64, rest);
            while lo < hi {
                let mid = (lo + hi).div_ceil(2);
                if before(mid) <= rank {
                    lo = mid;
                } else {
                    hi = mid - 1;
                }
            }
            rank -= before(lo);
            rest -= lo;
            k.push(lo as u32);
        }
        k.push(rest as u32);
        GridVertex(k)
    }

    /// Advances `k` to the next vertex in lexicographic order.
    pub(crate) fn next_vertex(&self, k: &mut [u32]) -> bool {
        let n = self.n;
        let mut tail = k[n];
        for i in (0..n).rev() {
            if tail > 0 {
                k[i] += 1;
                for x in &mut k[i + 1..n] {
                    *x = 0;
                }
                k[n] = tail - 1;
                return true;
            }
            tail += k[i];
        }
        false
    }

    /// All grid vertices in lexicographic order.
    pub fn vertices(&self) -> impl Iterator<Item = GridVertex> + '_ {
        let mut current: Option<Vec<u32>> = Some(self.vertex_at(0).0);
        std::iter::from_fn(move || {
            let out = current.take()?;
            let mut next = out.clone();
            if self.next_vertex(&mut next) {
                current = Some(next);
            }
            Some(GridVertex(out))
        })
    }

    /// Vertices with ranks in `start..end`, in order.
    pub(crate) fn vertex_range(&self, start: usize, end: usize) -> Vec<GridVertex> {
        let mut out = Vec::with_capacity(end.saturating_sub(start));
        if start >= end {
            return out;
        }
        let mut k = self.vertex_at(start).0;
        out.push(GridVertex(k.clone()));
        for _ in start + 1..end {
            self.next_vertex(&mut k);
            out.push(GridVertex(k.clone()));
        }
        out
    }

    fn chain(&self, cell: &GridCell) -> Option<Vec<Vec<i64>>> {
        let mut v: Vec<i64> = cell.base.0.iter().map(|&k| i64::from(k)).collect();
        let mut out = Vec::with_capacity(cell.perm.len() + 1);
        out.push(v.clone());
        for &j in &cell.perm {
            apply_step(&mut v, j, 1);
            if v.iter().any(|&x| x < 0) {
                return None;
            }
            out.push(v.clone());
        }
        Some(out)
    }

    fn check_cell(&self, cell: &GridCell) -> Result<(), GridError> {
        let d = cell.perm.len();
        let perm_ok = d <= self.n && {
            let mut seen = vec![false; d + 1];
            cell.perm.iter().all(|&j| {
                let j = usize::from(j);
                (1..=d).contains(&j) && !std::mem::replace(&mut seen[j], true)
            })
        };
        if !perm_ok || self.check_vertex(&cell.base).is_err() {
            return Err(GridError::CellOutOfRange(cell.clone()));
        }
        Ok(())
    }

    /// Whether `cell` is a cell (of any dimension up to `n`) of this subdivision.
    pub fn contains_cell(&self, cell: &GridCell) -> bool {
        self.check_cell(cell).is_ok() && self.chain(cell).is_some()
    }

    /// The `d + 1` grid vertices of a `d`-cell, in chain order.
    pub fn cell_grid_vertices(&self, cell: &GridCell) -> Result<Vec<GridVertex>, GridError> {
        self.check_cell(cell)?;
        let chain = self
            .chain(cell)
            .ok_or_else(|| GridError::CellOutOfRange(cell.clone()))?;
        Ok(chain
            .into_iter()
            .map(|v| GridVertex(v.into_iter().map(|x| x as u32).collect()))
            .collect())
    }

    /// The cell's vertices as simplex points, each a multiple of `1/m`.
    pub fn cell_vertices(&self, cell: &GridCell) -> Result<Vec<BarycentricPoint>, GridError> {
        Ok(self
            .cell_grid_vertices(cell)?
            .iter()
            .map(|v| BarycentricPoint::from_vertex(v, self.m))
            .collect())
    }

    pub fn cell_barycenter(&self, cell: &GridCell) -> Result<BarycentricPoint, GridError> {
        Ok(BarycentricPoint::barycenter(&self.cell_vertices(cell)?))
    }

    fn permutations(&self) -> Vec<Vec<u16>> {
        (1..=self.n as u16).permutations(self.n).collect()
    }

    /// Top cells whose base is `base`, in permutation order.
    fn cells_at(&self, base: &GridVertex, perms: &[Vec<u16>]) -> Vec<GridCell> {
        perms
            .iter()
            .map(|perm| GridCell {
                base: base.clone(),
                perm: perm.clone(),
            })
            .filter(|c| self.chain(c).is_some())
            .collect()
    }

    /// All top cells in lexicographic `(base, perm)` order.
    pub fn cells(&self) -> impl Iterator<Item = GridCell> + '_ {
        let perms = self.permutations();
        self.vertices()
            .flat_map(move |base| self.cells_at(&base, &perms).into_iter())
    }

    /// Top cells with base rank in `start..end`, in lexicographic order.
    pub(crate) fn cells_in_base_range(&self, start: usize, end: usize) -> Vec<GridCell> {
        let perms = self.permutations();
        self.vertex_range(start, end)
            .iter()
            .flat_map(|b| self.cells_at(b, &perms))
            .collect()
    }

    /// Crosses the facet of `cell` opposite vertex `t`. On success returns the
    /// neighbouring cell and the index of its vertex opposite the shared facet.
    pub(crate) fn pivot(&self, cell: &GridCell, t: usize) -> Option<(GridCell, usize)> {
        let d = cell.perm.len();
        let mut base: Vec<i64> = cell.base.0.iter().map(|&k| i64::from(k)).collect();
        let mut perm = cell.perm.clone();
        let entered = if t == 0 {
            apply_step(&mut base, perm[0], 1);
            perm.rotate_left(1);
            d
        } else if t == d {
            apply_step(&mut base, perm[d - 1], -1);
            perm.rotate_right(1);
            0
        } else {
            perm.swap(t - 1, t);
            t
        };
        if base.iter().any(|&x| x < 0) {
            return None;
        }
        let next = GridCell {
            base: GridVertex(base.into_iter().map(|x| x as u32).collect()),
            perm,
        };
        self.chain(&next).map(|_| (next, entered))
    }

    /// The other cell sharing the facet opposite vertex `opposite`, or
    /// [`Neighbor::Boundary`] when that facet lies in a face of the simplex.
    pub fn neighbor(&self, cell: &GridCell, opposite: usize) -> Result<Neighbor, GridError> {
        self.check_cell(cell)?;
        if self.chain(cell).is_none() {
            return Err(GridError::CellOutOfRange(cell.clone()));
        }
        if opposite > cell.dim() {
            return Err(GridError::FacetIndex {
                index: opposite,
                dim: cell.dim(),
            });
        }
        Ok(match self.pivot(cell, opposite) {
            Some((c, _)) => Neighbor::Cell(c),
            None => Neighbor::Boundary,
        })
    }

    /// Cumulative coordinates `y_j = m * (p_0 + ... + p_{j-1})`, `j = 1..=n`.
    fn cumulative(&self, p: &[Rational]) -> Vec<Rational> {
        let m = Rational::from_integer(BigInt::from(self.m));
        let mut acc = Rational::zero();
        let mut y = Vec::with_capacity(self.n);
        for pj in &p[..self.n] {
            acc += pj;
            y.push(&acc * &m);
        }
        y
    }

    fn base_cumulative(&self, base: &GridVertex) -> Vec<i64> {
        let mut acc = 0i64;
        base.0[..self.n]
            .iter()
            .map(|&k| {
                acc += i64::from(k);
                acc
            })
            .collect()
    }

    /// Barycentric weights of `p` with respect to a top cell, or `None` if
    /// `p` is outside it.
    pub fn weights_in(&self, cell: &GridCell, p: &BarycentricPoint) -> Result<Option<Vec<Rational>>, GridError> {
        self.check_point(p)?;
        self.check_cell(cell)?;
        if cell.dim() != self.n || self.chain(cell).is_none() {
            return Err(GridError::CellOutOfRange(cell.clone()));
        }
        let y = self.cumulative(p.coords());
        let a = self.base_cumulative(&cell.base);
        let frac: Vec<Rational> = y
            .iter()
            .zip(&a)
            .map(|(yj, &aj)| yj - Rational::from_integer(BigInt::from(aj)))
            .collect();
        let ordered: Vec<&Rational> = cell.perm.iter().map(|&j| &frac[usize::from(j) - 1]).collect();
        let weights = kuhn_weights(&ordered);
        Ok(weights.iter().all(|w| !w.is_negative()).then_some(weights))
    }

    fn check_point(&self, p: &BarycentricPoint) -> Result<(), GridError> {
        if p.coords().len() != self.n + 1 {
            return Err(GridError::WrongLength {
                expected: self.n + 1,
                found: p.coords().len(),
            });
        }
        Ok(())
    }

    /// Some top cell containing `p`, with `p`'s weights in it.
    pub(crate) fn kuhn_cell(&self, p: &BarycentricPoint) -> (GridCell, Vec<Rational>) {
        let m = i64::from(self.m);
        let y = self.cumulative(p.coords());
        let mut a = Vec::with_capacity(self.n);
        let mut frac = Vec::with_capacity(self.n);
        for yj in &y {
            let floor = yj.numer().div_floor(yj.denom());
            let mut aj: i64 = i64::try_from(floor).expect("grid coordinate fits i64");
            if aj >= m {
                aj = m - 1;
            }
            frac.push(yj - Rational::from_integer(BigInt::from(aj)));
            a.push(aj);
        }
        // equal fractions: higher index steps first so y stays ordered
        let mut order: Vec<usize> = (0..self.n).collect();
        order.sort_by(|&i, &j| frac[j].cmp(&frac[i]).then(j.cmp(&i)));
        let ordered: Vec<&Rational> = order.iter().map(|&i| &frac[i]).collect();
        let weights = kuhn_weights(&ordered);
        let cell = GridCell {
            base: self.base_from_cumulative(&a),
            perm: order.iter().map(|&i| (i + 1) as u16).collect(),
        };
        (cell, weights)
    }

    fn base_from_cumulative(&self, a: &[i64]) -> GridVertex {
        let n = self.n;
        let mut k = Vec::with_capacity(n + 1);
        k.push(a[0] as u32);
        for j in 1..n {
            k.push((a[j] - a[j - 1]) as u32);
        }
        k.push((i64::from(self.m) - a[n - 1]) as u32);
        GridVertex(k)
    }

    /// The lexicographically smallest top cell containing `p`.
    pub fn locate_cell(&self, p: &BarycentricPoint) -> Result<GridCell, GridError> {
        self.check_point(p)?;
        let (start, weights) = self.kuhn_cell(p);
        if weights.iter().all(|w| !w.is_zero()) {
            return Ok(start);
        }
        // p sits on a facet: walk the star of its carrier face.
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::new();
        seen.insert(start.clone());
        queue.push_back((start, weights));
        while let Some((cell, weights)) = queue.pop_front() {
            for (t, w) in weights.iter().enumerate() {
                if !w.is_zero() {
                    continue;
                }
                if let Some((next, _)) = self.pivot(&cell, t) {
                    if seen.contains(&next) {
                        continue;
                    }
                    if let Some(nw) = self.weights_in(&next, p)? {
                        seen.insert(next.clone());
                        queue.push_back((next, nw));
                    }
                }
            }
        }
        Ok(seen.into_iter().next().expect("star is nonempty"))
    }

    /// A top cell containing the vertex `v` of the refinement at resolution
    /// `m * factor`, in integer arithmetic. Ties follow the Kuhn ordering.
    pub fn cell_of_refined_vertex(&self, v: &GridVertex, factor: u32) -> GridCell {
        let f = i64::from(factor);
        let m = i64::from(self.m);
        let mut acc = 0i64;
        let mut a = Vec::with_capacity(self.n);
        let mut frac = Vec::with_capacity(self.n);
        for &k in &v.0[..self.n] {
            acc += i64::from(k);
            let aj = (acc / f).min(m - 1);
            a.push(aj);
            frac.push(acc - aj * f);
        }
        let mut order: Vec<usize> = (0..self.n).collect();
        order.sort_by(|&i, &j| frac[j].cmp(&frac[i]).then(j.cmp(&i)));
        GridCell {
            base: self.base_from_cumulative(&a),
            perm: order.iter().map(|&i| (i + 1) as u16).collect(),
        }
    }

    /// Float point location: a top cell containing `p` and `p`'s weights in it.
    /// Ties are resolved by the Kuhn ordering, not lexicographically.
    pub fn locate_f64(&self, p: &[f64]) -> (GridCell, Vec<f64>) {
        let n = self.n;
        let m = f64::from(self.m);
        let mut y = Vec::with_capacity(n);
        let mut acc = 0.0;
        for &pj in &p[..n] {
            acc += pj.max(0.0);
            y.push((acc * m).min(m));
        }
        let mut a = Vec::with_capacity(n);
        let mut frac = Vec::with_capacity(n);
        for &yj in &y {
            let aj = (yj.floor() as i64).clamp(0, i64::from(self.m) - 1);
            a.push(aj);
            frac.push((yj - aj as f64).clamp(0.0, 1.0));
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| frac[j].total_cmp(&frac[i]).then(j.cmp(&i)));
        let mut weights = Vec::with_capacity(n + 1);
        weights.push(1.0 - frac[order[0]]);
        for t in 1..n {
            weights.push(frac[order[t - 1]] - frac[order[t]]);
        }
        weights.push(frac[order[n - 1]]);
        let cell = GridCell {
            base: self.base_from_cumulative(&a),
            perm: order.iter().map(|&i| (i + 1) as u16).collect(),
        };
        (cell, weights)
    }

    /// The `(d+1)`-cell of the face spanned by `e_0..e_{d+1}` that has the
    /// `d`-cell `cell` (lying in the face spanned by `e_0..e_d`) as its facet
    /// opposite vertex 0.
    pub(crate) fn lift(&self, cell: &GridCell) -> GridCell {
        let d = cell.dim();
        debug_assert!(d < self.n);
        let mut base: Vec<i64> = cell.base.0.iter().map(|&k| i64::from(k)).collect();
        apply_step(&mut base, (d + 1) as u16, -1);
        let mut perm = Vec::with_capacity(d + 1);
        perm.push((d + 1) as u16);
        perm.extend_from_slice(&cell.perm);
        GridCell {
            base: GridVertex(base.into_iter().map(|x| x as u32).collect()),
            perm,
        }
    }

    /// Inverse of [`Subdivision::lift`]: the facet opposite vertex 0,
    /// provided it lies in the face spanned by `e_0..e_{d-1}`.
    pub(crate) fn lower(&self, cell: &GridCell) -> Option<GridCell> {
        let d = cell.dim();
        if d == 0 || usize::from(cell.perm[0]) != d || cell.base.0[d] != 1 {
            return None;
        }
        let mut base: Vec<i64> = cell.base.0.iter().map(|&k| i64::from(k)).collect();
        apply_step(&mut base, d as u16, 1);
        Some(GridCell {
            base: GridVertex(base.into_iter().map(|x| x as u32).collect()),
            perm: cell.perm[1..].to_vec(),
        })
    }
}

/// Weights of a point in a Kuhn simplex given its fractional cumulative
/// coordinates listed in step order.
fn kuhn_weights(ordered: &[&Rational]) -> Vec<Rational> {
    let d = ordered.len();
    let mut w = Vec::with_capacity(d + 1);
    w.push(Rational::one() - ordered[0]);
    for t in 1..d {
        w.push(ordered[t - 1] - ordered[t]);
    }
    w.push(ordered[d - 1].clone());
    w
}
