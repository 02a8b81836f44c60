//! Sparse exact linear algebra.
//!
//! All elimination goes through [`Echelon`], an incremental row-echelon
//! basis keyed by leading column. Rank, kernels, particular solutions and
//! subquotient coordinates are thin layers on top of it.

use std::collections::BTreeMap;
use std::fmt;


use crate::field::Field;

/// A sparse vector: index to nonzero scalar.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SparseVec<F>(BTreeMap<usize, F>);

impl<F: Field> Default for SparseVec<F> {
    fn default() -> Self {
        Self::new()
    }
}

impl<F: fmt::Debug> fmt::Debug for SparseVec<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.0.iter()).finish()
    }
}

impl<F: Field> SparseVec<F> {
    pub fn new() -> Self {
        SparseVec(BTreeMap::new())
    }

    pub fn unit(i: usize) -> Self {
        let mut v = Self::new();
        v.0.insert(i, F::one());
        v
    }

    pub fn from_pairs<I: IntoIterator<Item = (usize, F)>>(pairs: I) -> Self {
        let mut v = Self::new();
        for (i, c) in pairs {
            v.add_at(i, c);
        }
        v
    }

    pub fn from_dense(values: &[F]) -> Self {
        Self::from_pairs(values.iter().cloned().enumerate())
    }

    pub fn to_dense(&self, len: usize) -> Vec<F> {
        let mut out = vec![F::zero(); len];
        for (&i, c) in &self.0 {
            out[i] = c.clone();
        }
        out
    }

    pub fn get(&self, i: usize) -> F {
        self.0.get(&i).cloned().unwrap_or_else(F::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.0.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &F)> + '_ {
        self.0.iter().map(|(&i, c)| (i, c))
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.keys().copied()
    }

    pub fn leading(&self) -> Option<(usize, &F)> {
        self.0.iter().next().map(|(&i, c)| (i, c))
    }

    pub fn max_index(&self) -> Option<usize> {
        self.0.keys().next_back().copied()
    }

    pub fn add_at(&mut self, i: usize, c: F) {
        if c.is_zero() {
            return;
        }
        match self.0.get_mut(&i) {
            Some(e) => {
                *e += c;
                if e.is_zero() {
                    self.0.remove(&i);
                }
            }
            None => {
                self.0.insert(i, c);
            }
        }
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, other: &SparseVec<F>, c: &F) {
        if c.is_zero() {
            return;
        }
        for (&i, v) in &other.0 {
            self.add_at(i, v.clone() * c.clone());
        }
    }

    pub fn scaled(&self, c: &F) -> SparseVec<F> {
        if c.is_zero() {
            return Self::new();
        }
        SparseVec(self.0.iter().map(|(&i, v)| (i, v.clone() * c.clone())).collect())
    }

    pub fn neg(&self) -> SparseVec<F> {
        self.scaled(&-F::one())
    }

    pub fn sum(&self, other: &SparseVec<F>) -> SparseVec<F> {
        let mut out = self.clone();
        out.add_scaled(other, &F::one());
        out
    }

    pub fn difference(&self, other: &SparseVec<F>) -> SparseVec<F> {
        let mut out = self.clone();
        out.add_scaled(other, &-F::one());
        out
    }

    /// Reindexes entries; colliding indices are summed.
    pub fn map_indices(&self, mut f: impl FnMut(usize) -> usize) -> SparseVec<F> {
        SparseVec::from_pairs(self.0.iter().map(|(&i, c)| (f(i), c.clone())))
    }

    /// Keeps entries whose index satisfies `keep`.
    pub fn filtered(&self, mut keep: impl FnMut(usize) -> bool) -> SparseVec<F> {
        SparseVec(
            self.0
                .iter()
                .filter(|(&i, _)| keep(i))
                .map(|(&i, c)| (i, c.clone()))
                .collect(),
        )
    }

    pub fn dot(&self, other: &SparseVec<F>) -> F {
        let mut acc = F::zero();
        let (small, large) = if self.nnz() <= other.nnz() {
            (self, other)
        } else {
            (other, self)
        };
        for (&i, c) in &small.0 {
            if let Some(d) = large.0.get(&i) {
                acc += c.clone() * d.clone();
            }
        }
        acc
    }

    /// The scalar `c` with `self = c * other`, if any.
    pub fn ratio_to(&self, other: &SparseVec<F>) -> Option<F> {
        if self.is_zero() && other.is_zero() {
            return Some(F::zero());
        }
        let (i, c) = other.leading()?;
        let r = self.get(i) / c.clone();
        if *self == other.scaled(&r) {
            Some(r)
        } else {
            None
        }
    }
}

/// A sparse matrix stored column by column.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix<F> {
    nrows: usize,
    columns: Vec<SparseVec<F>>,
}

impl<F: fmt::Debug> fmt::Debug for Matrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} by columns", self.nrows, self.columns.len())?;
        for (c, col) in self.columns.iter().enumerate() {
            writeln!(f, "  {c}: {col:?}")?;
        }
        Ok(())
    }
}

impl<F: Field> Matrix<F> {
    pub fn zero(nrows: usize, ncols: usize) -> Self {
        Matrix {
            nrows,
            columns: vec![SparseVec::new(); ncols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Matrix {
            nrows: n,
            columns: (0..n).map(SparseVec::unit).collect(),
        }
    }

    /// Builds from columns; panics if an entry exceeds `nrows`.
    pub fn from_columns(nrows: usize, columns: Vec<SparseVec<F>>) -> Self {
        for c in &columns {
            if let Some(m) = c.max_index() {
                assert!(m < nrows, "column entry {m} out of range for {nrows} rows");
            }
        }
        Matrix { nrows, columns }
    }

    pub fn from_triplets<I>(nrows: usize, ncols: usize, entries: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize, F)>,
    {
        let mut m = Self::zero(nrows, ncols);
        for (r, c, v) in entries {
            assert!(r < nrows && c < ncols, "triplet ({r},{c}) out of range");
            m.columns[c].add_at(r, v);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<F>]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        Self::from_triplets(
            nrows,
            ncols,
            rows.iter().enumerate().flat_map(|(r, row)| {
                row.iter().cloned().enumerate().map(move |(c, v)| (r, c, v))
            }),
        )
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, c: usize) -> &SparseVec<F> {
        &self.columns[c]
    }

    pub fn columns(&self) -> &[SparseVec<F>] {
        &self.columns
    }

    pub fn get(&self, r: usize, c: usize) -> F {
        self.columns[c].get(r)
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &F)> + '_ {
        self.columns
            .iter()
            .enumerate()
            .flat_map(|(c, col)| col.iter().map(move |(r, v)| (r, c, v)))
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(SparseVec::is_zero)
    }

    pub fn apply(&self, v: &SparseVec<F>) -> SparseVec<F> {
        let mut out = SparseVec::new();
        for (c, x) in v.iter() {
            out.add_scaled(&self.columns[c], x);
        }
        out
    }

    /// `self * other`.
    pub fn compose(&self, other: &Matrix<F>) -> Matrix<F> {
        assert_eq!(self.ncols(), other.nrows, "dimension mismatch in product");
        Matrix {
            nrows: self.nrows,
            columns: other.columns.iter().map(|c| self.apply(c)).collect(),
        }
    }

    pub fn transpose(&self) -> Matrix<F> {
        Self::from_triplets(
            self.ncols(),
            self.nrows,
            self.entries().map(|(r, c, v)| (c, r, v.clone())),
        )
    }

    pub fn scaled(&self, s: &F) -> Matrix<F> {
        Matrix {
            nrows: self.nrows,
            columns: self.columns.iter().map(|c| c.scaled(s)).collect(),
        }
    }

    pub fn sum(&self, other: &Matrix<F>) -> Matrix<F> {
        assert_eq!((self.nrows, self.ncols()), (other.nrows, other.ncols()));
        Matrix {
            nrows: self.nrows,
            columns: self
                .columns
                .iter()
                .zip(&other.columns)
                .map(|(a, b)| a.sum(b))
                .collect(),
        }
    }

    pub fn rank(&self) -> usize {
        rank(self)
    }
}

/// Incremental row-echelon basis of a subspace.
///
/// Each stored vector has leading entry 1 at its pivot column. When
/// tracking is on, every stored vector also remembers the combination of
/// inserted inputs it came from.
#[derive(Clone, Debug)]
pub struct Echelon<F> {
    rows: BTreeMap<usize, (SparseVec<F>, SparseVec<F>)>,
}

impl<F: Field> Default for Echelon<F> {
    fn default() -> Self {
        Self::new()
    }
}

impl<F: Field> Echelon<F> {
    pub fn new() -> Self {
        Echelon {
            rows: BTreeMap::new(),
        }
    }

    pub fn from_vectors<'a, I>(vectors: I) -> Self
    where
        I: IntoIterator<Item = &'a SparseVec<F>>,
    {
        let mut e = Self::new();
        for v in vectors {
            e.insert(v.clone());
        }
        e
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.keys().copied()
    }

    pub fn is_pivot(&self, col: usize) -> bool {
        self.rows.contains_key(&col)
    }

    /// Reduces `v` against the stored rows, returning the residual and the
    /// tracked combination `x` such that `v = residual + sum x_i input_i`.
    pub fn reduce_tracked(&self, mut v: SparseVec<F>) -> (SparseVec<F>, SparseVec<F>) {
        let mut combo = SparseVec::new();
        let mut start = 0usize;
        loop {
            let next = v
                .0
                .range(start..)
                .find(|(k, _)| self.rows.contains_key(k))
                .map(|(&k, c)| (k, c.clone()));
            let Some((k, c)) = next else { break };
            let (row, track) = &self.rows[&k];
            v.add_scaled(row, &-c.clone());
            combo.add_scaled(track, &c);
            start = k + 1;
        }
        (v, combo)
    }

    pub fn reduce(&self, v: SparseVec<F>) -> SparseVec<F> {
        self.reduce_tracked(v).0
    }

    pub fn contains(&self, v: &SparseVec<F>) -> bool {
        self.reduce(v.clone()).is_zero()
    }

    /// Inserts `v` (tracked as input `id`); returns the new pivot or `None`
    /// when `v` already lies in the span. On `None` the tracked kernel
    /// relation `e_id - combo` is returned through `relation`.
    pub fn insert_tracked(
        &mut self,
        v: SparseVec<F>,
        id: Option<usize>,
        relation: Option<&mut SparseVec<F>>,
    ) -> Option<usize> {
        let (res, combo) = self.reduce_tracked(v);
        let mut track = match id {
            Some(i) => SparseVec::unit(i),
            None => SparseVec::new(),
        };
        track.add_scaled(&combo, &-F::one());
        match res.leading() {
            None => {
                if let Some(rel) = relation {
                    *rel = track;
                }
                None
            }
            Some((p, lead)) => {
                let inv = lead.inverse().expect("nonzero leading entry");
                let row = res.scaled(&inv);
                let track = track.scaled(&inv);
                self.rows.insert(p, (row, track));
                Some(p)
            }
        }
    }

    pub fn insert(&mut self, v: SparseVec<F>) -> Option<usize> {
        self.insert_tracked(v, None, None)
    }
}

pub fn rank<F: Field>(m: &Matrix<F>) -> usize {
    Echelon::from_vectors(m.columns()).rank()
}

/// Basis of the right null space `{v : m v = 0}`.
pub fn kernel_basis<F: Field>(m: &Matrix<F>) -> Vec<SparseVec<F>> {
    let mut e = Echelon::new();
    let mut out = Vec::new();
    for (j, col) in m.columns().iter().enumerate() {
        let mut rel = SparseVec::new();
        if e.insert_tracked(col.clone(), Some(j), Some(&mut rel)).is_none() {
            out.push(rel);
        }
    }
    out
}

/// Column-space solver reusable across many right-hand sides.
#[derive(Clone, Debug)]
pub struct Solver<F> {
    echelon: Echelon<F>,
    nrows: usize,
}

impl<F: Field> Solver<F> {
    pub fn new(m: &Matrix<F>) -> Self {
        let mut echelon = Echelon::new();
        for (j, col) in m.columns().iter().enumerate() {
            echelon.insert_tracked(col.clone(), Some(j), None);
        }
        Solver {
            echelon,
            nrows: m.nrows(),
        }
    }

    pub fn solve(&self, rhs: &SparseVec<F>) -> Option<SparseVec<F>> {
        if let Some(mx) = rhs.max_index() {
            assert!(mx < self.nrows, "rhs longer than row count");
        }
        let (res, x) = self.echelon.reduce_tracked(rhs.clone());
        res.is_zero().then_some(x)
    }
}

/// A particular solution of `m x = rhs`, or `None` when `rhs` is not in the image.
pub fn solve<F: Field>(m: &Matrix<F>, rhs: &SparseVec<F>) -> Option<SparseVec<F>> {
    Solver::new(m).solve(rhs)
}

/// Inverse of a square matrix, if it exists.
pub fn inverse<F: Field>(m: &Matrix<F>) -> Option<Matrix<F>> {
    if m.nrows() != m.ncols() {
        return None;
    }
    let solver = Solver::new(m);
    let cols = (0..m.nrows())
        .map(|i| solver.solve(&SparseVec::unit(i)))
        .collect::<Option<Vec<_>>>()?;
    Some(Matrix::from_columns(m.ncols(), cols))
}

/// A complement of a subspace with a projection onto quotient coordinates.
#[derive(Clone, Debug)]
pub struct Quotient<F> {
    ambient_dim: usize,
    echelon: Echelon<F>,
    free_columns: Vec<usize>,
    position: BTreeMap<usize, usize>,
}

impl<F: Field> Quotient<F> {
    pub fn dim(&self) -> usize {
        self.free_columns.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// Unit vectors of the ambient space spanning a complement.
    pub fn representatives(&self) -> Vec<SparseVec<F>> {
        self.free_columns.iter().map(|&c| SparseVec::unit(c)).collect()
    }

    pub fn representative_columns(&self) -> &[usize] {
        &self.free_columns
    }

    /// Coordinates of the class of `v` in the quotient.
    pub fn project(&self, v: &SparseVec<F>) -> SparseVec<F> {
        self.echelon
            .reduce(v.clone())
            .map_indices(|c| self.position[&c])
    }

    pub fn lift(&self, coords: &SparseVec<F>) -> SparseVec<F> {
        coords.map_indices(|i| self.free_columns[i])
    }

    pub fn subspace(&self) -> &Echelon<F> {
        &self.echelon
    }
}

pub fn quotient_basis<F: Field>(ambient_dim: usize, subspace: &[SparseVec<F>]) -> Quotient<F> {
    let echelon = Echelon::from_vectors(subspace);
    let free_columns: Vec<usize> = (0..ambient_dim).filter(|&c| !echelon.is_pivot(c)).collect();
    let position = free_columns.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    Quotient {
        ambient_dim,
        echelon,
        free_columns,
        position,
    }
}

/// A subquotient `numerator / denominator` of some ambient space, with the
/// denominator contained in the numerator.
#[derive(Clone, Debug)]
pub struct Subquotient<F> {
    echelon: Echelon<F>,
    reps: Vec<SparseVec<F>>,
    rep_index: BTreeMap<usize, usize>,
}

impl<F: Field> Subquotient<F> {
    pub fn new(numerator: &[SparseVec<F>], denominator: &[SparseVec<F>]) -> Self {
        let mut echelon = Echelon::new();
        for d in denominator {
            echelon.insert(d.clone());
        }
        let mut reps = Vec::new();
        let mut rep_index = BTreeMap::new();
        for (i, v) in numerator.iter().enumerate() {
            if echelon.insert_tracked(v.clone(), Some(i), None).is_some() {
                rep_index.insert(i, reps.len());
                reps.push(v.clone());
            }
        }
        Subquotient {
            echelon,
            reps,
            rep_index,
        }
    }

    pub fn dim(&self) -> usize {
        self.reps.len()
    }

    /// Representatives of a basis, chosen among the numerator vectors.
    pub fn representatives(&self) -> &[SparseVec<F>] {
        &self.reps
    }

    /// Class coordinates of `v`; `None` if `v` is not in the numerator.
    pub fn coordinates(&self, v: &SparseVec<F>) -> Option<SparseVec<F>> {
        let (res, combo) = self.echelon.reduce_tracked(v.clone());
        res.is_zero()
            .then(|| combo.map_indices(|i| self.rep_index[&i]))
    }

    pub fn is_trivial_class(&self, v: &SparseVec<F>) -> bool {
        self.coordinates(v).is_some_and(|c| c.is_zero())
    }
}

/// Basis of the intersection of two subspaces given by spanning sets.
pub fn intersection<F: Field>(a: &[SparseVec<F>], b: &[SparseVec<F>]) -> Vec<SparseVec<F>> {
    // Kernel of [A | -B]: combinations sum x_i a_i = sum y_j b_j.
    let mut e = Echelon::new();
    let mut out = Vec::new();
    for (i, v) in a.iter().enumerate() {
        e.insert_tracked(v.clone(), Some(i), None);
    }
    let ea = Echelon::from_vectors(a);
    let mut chosen = Echelon::new();
    for (j, v) in b.iter().enumerate() {
        let mut rel = SparseVec::new();
        if e.insert_tracked(v.clone(), Some(a.len() + j), Some(&mut rel)).is_none() {
            // rel = e_{a.len()+j} - combo; the b-part lies in span(a).
            let mut w = SparseVec::new();
            for (k, c) in rel.iter() {
                if k >= a.len() {
                    w.add_scaled(&b[k - a.len()], c);
                }
            }
            debug_assert!(ea.contains(&w));
            if !w.is_zero() && chosen.insert(w.clone()).is_some() {
                out.push(w);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Rat;

    fn q(n: i64) -> Rat {
        Rat::from_i64(n)
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&Matrix::<Rat>::zero(0, 0)), 0);
        assert_eq!(rank(&Matrix::<Rat>::identity(2)), 2);
        let m = Matrix::from_rows(&[vec![q(1), q(2)], vec![q(2), q(4)]]);
        assert_eq!(rank(&m), 1);
    }

    #[test]
    fn kernel_examples() {
        assert!(kernel_basis(&Matrix::<Rat>::identity(3)).is_empty());
        assert_eq!(kernel_basis(&Matrix::<Rat>::zero(3, 3)).len(), 3);
        let m = Matrix::from_rows(&[vec![q(1), q(1)]]);
        let k = kernel_basis(&m);
        assert_eq!(k.len(), 1);
        assert!(m.apply(&k[0]).is_zero());
        assert_eq!(k[0].get(0), -k[0].get(1));
    }

    #[test]
    fn quotient_examples() {
        let qt = quotient_basis::<Rat>(2, &[SparseVec::unit(0)]);
        assert_eq!(qt.dim(), 1);
        let all = quotient_basis::<Rat>(3, &[SparseVec::unit(0), SparseVec::unit(1), SparseVec::unit(2)]);
        assert_eq!(all.dim(), 0);
        let diag = SparseVec::from_dense(&[q(1), q(1)]);
        let qt = quotient_basis(2, std::slice::from_ref(&diag));
        assert_eq!(qt.dim(), 1);
        assert!(qt.project(&diag).is_zero());
        assert!(!qt.project(&SparseVec::unit(0)).is_zero());
    }

    #[test]
    fn solve_examples() {
        let id = Matrix::<Rat>::identity(2);
        assert_eq!(solve(&id, &SparseVec::unit(0)), Some(SparseVec::unit(0)));
        assert_eq!(solve(&Matrix::<Rat>::zero(2, 2), &SparseVec::unit(1)), None);
        let m = Matrix::from_rows(&[vec![q(1), q(1)]]);
        let rhs = SparseVec::from_dense(&[q(2)]);
        let x = solve(&m, &rhs).unwrap();
        assert_eq!(m.apply(&x), rhs);
    }

    #[test]
    fn subquotient_coordinates() {
        // span{e0,e1,e2} / span{e0+e1}
        let num = vec![SparseVec::unit(0), SparseVec::unit(1), SparseVec::unit(2)];
        let den = vec![SparseVec::from_dense(&[q(1), q(1)])];
        let sq = Subquotient::new(&num, &den);
        assert_eq!(sq.dim(), 2);
        let a = sq.coordinates(&SparseVec::unit(0)).unwrap();
        let b = sq.coordinates(&SparseVec::unit(1)).unwrap();
        assert_eq!(a, b.neg());
        assert!(sq.coordinates(&SparseVec::unit(3)).is_none());
    }

    #[test]
    fn intersection_of_planes() {
        let a = vec![SparseVec::unit(0), SparseVec::unit(1)];
        let b = vec![SparseVec::unit(1), SparseVec::unit(2)];
        let i = intersection::<Rat>(&a, &b);
        assert_eq!(i.len(), 1);
        assert!(i[0].ratio_to(&SparseVec::unit(1)).is_some());
    }
}
