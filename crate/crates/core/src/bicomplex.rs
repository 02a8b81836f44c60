//! First-quadrant bicomplexes given by their bidegree blocks.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::{Matrix, SparseVec};

/// A bicomplex with blocks `(p, q)`, `p` the filtration degree and `q` the
/// internal degree. `d'` maps `(p, q) -> (p + 1, q)` and `d''` maps
/// `(p, q) -> (p, q + 1)`.
///
/// Blocks are known for `q <= qmax`. When the bicomplex is not `complete`,
/// vertical maps out of `q = qmax` are unknown, so total degrees above
/// `qmax - 1` are not trustworthy.
#[derive(Clone, Debug)]
pub struct Bicomplex<F> {
    name: String,
    pmax: usize,
    qmax: usize,
    complete: bool,
    labels: BTreeMap<(usize, usize), Vec<String>>,
    horizontal: BTreeMap<(usize, usize), Matrix<F>>,
    vertical: BTreeMap<(usize, usize), Matrix<F>>,
}

impl<F: Field> Bicomplex<F> {
    /// Empty bicomplex with the given extent; fill with [`Self::set_block`]
    /// and the differential setters.
    pub fn new(name: impl Into<String>, pmax: usize, qmax: usize, complete: bool) -> Self {
        Bicomplex {
            name: name.into(),
            pmax,
            qmax,
            complete,
            labels: BTreeMap::new(),
            horizontal: BTreeMap::new(),
            vertical: BTreeMap::new(),
        }
    }

    pub fn set_block(&mut self, p: usize, q: usize, labels: Vec<String>) {
        if !labels.is_empty() {
            self.labels.insert((p, q), labels);
        }
    }

    /// Sets `d'` out of block `(p, q)`; the matrix has `dim(p + 1, q)` rows.
    pub fn set_horizontal(&mut self, p: usize, q: usize, m: Matrix<F>) {
        debug_assert_eq!(m.ncols(), self.dim(p, q));
        debug_assert_eq!(m.nrows(), self.dim(p + 1, q));
        self.horizontal.insert((p, q), m);
    }

    /// Sets `d''` out of block `(p, q)`; the matrix has `dim(p, q + 1)` rows.
    pub fn set_vertical(&mut self, p: usize, q: usize, m: Matrix<F>) {
        debug_assert_eq!(m.ncols(), self.dim(p, q));
        debug_assert_eq!(m.nrows(), self.dim(p, q + 1));
        self.vertical.insert((p, q), m);
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn pmax(&self) -> usize {
        self.pmax
    }

    pub fn qmax(&self) -> usize {
        self.qmax
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn dim(&self, p: usize, q: usize) -> usize {
        self.labels.get(&(p, q)).map_or(0, Vec::len)
    }

    pub fn labels(&self, p: usize, q: usize) -> &[String] {
        self.labels.get(&(p, q)).map_or(&[], Vec::as_slice)
    }

    /// Nonempty blocks in `(p, q)` order.
    pub fn blocks(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.labels.keys().copied()
    }

    /// `d'` out of `(p, q)`; zero where nothing was recorded.
    pub fn horizontal(&self, p: usize, q: usize) -> Matrix<F> {
        self.horizontal
            .get(&(p, q))
            .cloned()
            .unwrap_or_else(|| Matrix::zero(self.dim(p + 1, q), self.dim(p, q)))
    }

    /// `d''` out of `(p, q)`; `None` when it lies beyond the known range.
    pub fn vertical(&self, p: usize, q: usize) -> Option<Matrix<F>> {
        if q >= self.qmax && !self.complete {
            return None;
        }
        Some(
            self.vertical
                .get(&(p, q))
                .cloned()
                .unwrap_or_else(|| Matrix::zero(self.dim(p, q + 1), self.dim(p, q))),
        )
    }

    /// Largest total degree whose cohomology is fully determined.
    pub fn trusted_total_max(&self) -> usize {
        if self.complete {
            self.pmax + self.qmax
        } else {
            self.qmax.saturating_sub(1)
        }
    }

    /// `(p, offset)` of each block in the total space of degree `k`.
    pub fn total_layout(&self, k: usize) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        let mut off = 0;
        for p in 0..=self.pmax.min(k) {
            out.push((p, off));
            off += self.dim(p, k - p);
        }
        out
    }

    pub fn total_dim(&self, k: usize) -> usize {
        (0..=self.pmax.min(k)).map(|p| self.dim(p, k - p)).sum()
    }

    /// The total differential `D = d' + d''` from degree `k` to `k + 1`.
    pub fn total_differential(&self, k: usize) -> Result<Matrix<F>> {
        let src = self.total_layout(k);
        let dst = self.total_layout(k + 1);
        let offset_of = |p: usize| dst.iter().find(|(pp, _)| *pp == p).map(|&(_, o)| o);
        let mut cols = Vec::with_capacity(self.total_dim(k));
        for &(p, _) in &src {
            let q = k - p;
            let h = self.horizontal(p, q);
            let v = self
                .vertical(p, q)
                .ok_or(Error::Overflow { degree: q + 1, bound: self.qmax })?;
            for c in 0..self.dim(p, q) {
                let mut col = SparseVec::new();
                if let Some(o) = offset_of(p + 1) {
                    col.add_scaled(&h.column(c).map_indices(|r| r + o), &F::one());
                }
                if let Some(o) = offset_of(p) {
                    col.add_scaled(&v.column(c).map_indices(|r| r + o), &F::one());
                }
                cols.push(col);
            }
        }
        Ok(Matrix::from_columns(self.total_dim(k + 1), cols))
    }

    /// Checks `d'd' = 0`, `d''d'' = 0` and `d'd'' + d''d' = 0` on every
    /// block where all maps are known.
    pub fn check_d_squared(&self) -> Result<()> {
        for p in 0..=self.pmax {
            for q in 0..=self.qmax {
                if self.dim(p, q) == 0 {
                    continue;
                }
                let h = self.horizontal(p, q);
                if !self.horizontal(p + 1, q).compose(&h).is_zero() {
                    return Err(Error::axiom("d'd' = 0", format!("block ({p},{q}) of {}", self.name)));
                }
                let Some(v) = self.vertical(p, q) else { continue };
                if let Some(v2) = self.vertical(p, q + 1) {
                    if !v2.compose(&v).is_zero() {
                        return Err(Error::axiom("d''d'' = 0", format!("block ({p},{q}) of {}", self.name)));
                    }
                }
                if let Some(vh) = self.vertical(p + 1, q) {
                    let a = vh.compose(&h);
                    let b = self.horizontal(p, q + 1).compose(&v);
                    if !a.sum(&b).is_zero() {
                        return Err(Error::axiom("d'd'' + d''d' = 0", format!("block ({p},{q}) of {}", self.name)));
                    }
                }
            }
        }
        Ok(())
    }
}

/// A map of bicomplexes given block by block, `(p, q) -> (p, q)`.
#[derive(Clone, Debug)]
pub struct BlockMap<F> {
    pub blocks: BTreeMap<(usize, usize), Matrix<F>>,
}

impl<F: Field> BlockMap<F> {
    pub fn block(&self, source: &Bicomplex<F>, target: &Bicomplex<F>, p: usize, q: usize) -> Matrix<F> {
        self.blocks
            .get(&(p, q))
            .cloned()
            .unwrap_or_else(|| Matrix::zero(target.dim(p, q), source.dim(p, q)))
    }

    /// Checks `f d' = d' f` and `f d'' = d'' f` wherever both sides are known.
    pub fn check_chain_map(&self, source: &Bicomplex<F>, target: &Bicomplex<F>) -> Result<()> {
        for (p, q) in source.blocks().collect::<Vec<_>>() {
            let f = self.block(source, target, p, q);
            let lhs = self.block(source, target, p + 1, q).compose(&source.horizontal(p, q));
            let rhs = target.horizontal(p, q).compose(&f);
            if lhs != rhs {
                return Err(Error::axiom("map commutes with d'", format!("block ({p},{q})")));
            }
            if let (Some(vs), Some(vt)) = (source.vertical(p, q), target.vertical(p, q)) {
                let lhs = self.block(source, target, p, q + 1).compose(&vs);
                let rhs = vt.compose(&f);
                if lhs != rhs {
                    return Err(Error::axiom("map commutes with d''", format!("block ({p},{q})")));
                }
            }
        }
        Ok(())
    }
}
