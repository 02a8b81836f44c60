//! Spectral sequence of a bicomplex filtered by the column degree `p`.

use std::collections::BTreeMap;

use crate::bicomplex::Bicomplex;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::{kernel_basis, Matrix, SparseVec, Subquotient};

/// One page `E_r`: dimensions, representative cocycles in the total
/// complex, and the differentials `d_r : (p, q) -> (p + r, q - r + 1)`.
#[derive(Clone, Debug)]
pub struct Page<F> {
    pub r: usize,
    pub dims: BTreeMap<(usize, usize), usize>,
    pub representatives: BTreeMap<(usize, usize), Vec<SparseVec<F>>>,
    pub differentials: BTreeMap<(usize, usize), Matrix<F>>,
    /// Entries beyond the known range of a truncated bicomplex.
    pub unknown: Vec<(usize, usize)>,
}

impl<F: Field> Page<F> {
    pub fn dim(&self, p: usize, q: usize) -> usize {
        self.dims.get(&(p, q)).copied().unwrap_or(0)
    }

    /// Total dimension in total degree `k`.
    pub fn total(&self, k: usize) -> usize {
        self.dims.iter().filter(|((p, q), _)| p + q == k).map(|(_, d)| d).sum()
    }

    /// Whether every recorded differential vanishes.
    pub fn differentials_vanish(&self) -> bool {
        self.differentials.values().all(Matrix::is_zero)
    }
}

/// Spectral-sequence engine over a fixed bicomplex. Vectors of total degree
/// `k` use the coordinates of [`Bicomplex::total_layout`].
pub struct SpectralSequence<'a, F> {
    b: &'a Bicomplex<F>,
    /// `columns[k][i]`: `D` of the `i`-th basis vector of `Tot^k`, `None` when unknown.
    columns: Vec<Vec<Option<SparseVec<F>>>>,
}

impl<'a, F: Field> SpectralSequence<'a, F> {
    pub fn new(b: &'a Bicomplex<F>) -> Self {
        let kmax = b.pmax() + b.qmax();
        let mut columns = Vec::with_capacity(kmax + 1);
        for k in 0..=kmax {
            let dst = b.total_layout(k + 1);
            let offset_of = |p: usize| dst.iter().find(|(pp, _)| *pp == p).map(|&(_, o)| o);
            let mut cols = Vec::with_capacity(b.total_dim(k));
            for (p, _) in b.total_layout(k) {
                let q = k - p;
                let h = b.horizontal(p, q);
                let v = b.vertical(p, q);
                for c in 0..b.dim(p, q) {
                    let Some(v) = &v else {
                        cols.push(None);
                        continue;
                    };
                    let mut col = SparseVec::new();
                    if let Some(o) = offset_of(p + 1) {
                        col.add_scaled(&h.column(c).map_indices(|r| r + o), &F::one());
                    }
                    if let Some(o) = offset_of(p) {
                        col.add_scaled(&v.column(c).map_indices(|r| r + o), &F::one());
                    }
                    cols.push(Some(col));
                }
            }
            columns.push(cols);
        }
        SpectralSequence { b, columns }
    }

    pub fn bicomplex(&self) -> &Bicomplex<F> {
        self.b
    }

    /// Offset in `Tot^k` of the block in column `p` (the end of the space
    /// when `p` is past the last column).
    pub fn offset(&self, k: usize, p: usize) -> usize {
        self.b
            .total_layout(k)
            .iter()
            .find(|(pp, _)| *pp == p)
            .map_or(self.b.total_dim(k), |&(_, o)| o)
    }

    /// Embeds a vector of block `(p, q)` into `Tot^{p+q}`.
    pub fn embed(&self, p: usize, q: usize, v: &SparseVec<F>) -> SparseVec<F> {
        let o = self.offset(p + q, p);
        v.map_indices(|i| i + o)
    }

    /// Component of a total vector in column `p`.
    pub fn component(&self, k: usize, p: usize, v: &SparseVec<F>) -> SparseVec<F> {
        let lo = self.offset(k, p);
        let hi = lo + self.b.dim(p, k.saturating_sub(p));
        v.filtered(|i| (lo..hi).contains(&i)).map_indices(|i| i - lo)
    }

    /// `D x` for `x` in `Tot^k`.
    pub fn apply(&self, k: usize, x: &SparseVec<F>) -> Result<SparseVec<F>> {
        let mut out = SparseVec::new();
        for (i, c) in x.iter() {
            let col = self
                .columns
                .get(k)
                .and_then(|cols| cols[i].as_ref())
                .ok_or_else(|| Error::NotDefined(format!("differential out of total degree {k}")))?;
            out.add_scaled(col, c);
        }
        Ok(out)
    }

    /// Basis of `{x in F^pmin Tot^k : D x in F^ptarget}`.
    fn filtered_cycles(&self, k: usize, pmin: usize, ptarget: usize) -> Result<Vec<SparseVec<F>>> {
        let lo = self.offset(k, pmin);
        let dim = self.b.total_dim(k);
        let row_lo = self.offset(k + 1, pmin);
        let row_hi = self.offset(k + 1, ptarget);
        // D preserves F^pmin, so only the rows in columns pmin..ptarget matter
        if row_lo >= row_hi || lo == dim {
            return Ok((lo..dim).map(SparseVec::unit).collect());
        }
        let cols = (lo..dim)
            .map(|i| {
                self.columns[k][i]
                    .as_ref()
                    .map(|c| c.filtered(|r| (row_lo..row_hi).contains(&r)).map_indices(|r| r - row_lo))
                    .ok_or_else(|| Error::NotDefined(format!("differential out of total degree {k}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let m = Matrix::from_columns(row_hi - row_lo, cols);
        Ok(kernel_basis(&m).into_iter().map(|v| v.map_indices(|i| i + lo)).collect())
    }

    /// `E_r^{p,q}` as a subquotient of `Tot^{p+q}`.
    pub fn entry(&self, r: usize, p: usize, q: usize) -> Result<Subquotient<F>> {
        let k = p + q;
        if self.b.dim(p, q) == 0 {
            return Ok(Subquotient::new(&[], &[]));
        }
        let numerator = self.filtered_cycles(k, p, p + r)?;
        let mut denominator = if r == 0 {
            let lo = self.offset(k, p + 1);
            (lo..self.b.total_dim(k)).map(SparseVec::unit).collect()
        } else {
            self.filtered_cycles(k, p + 1, p + r)?
        };
        if r >= 1 && k >= 1 {
            let pmin = (p + 1).saturating_sub(r);
            for y in self.filtered_cycles(k - 1, pmin, p)? {
                let dy = self.apply(k - 1, &y)?;
                if !dy.is_zero() {
                    denominator.push(dy);
                }
            }
        }
        Ok(Subquotient::new(&numerator, &denominator))
    }

    /// Matrix of `d_r : E_r^{p,q} -> E_r^{p+r,q-r+1}` in the bases of
    /// [`Self::entry`] representatives.
    pub fn differential(&self, r: usize, p: usize, q: usize) -> Result<Matrix<F>> {
        let source = self.entry(r, p, q)?;
        if q + 1 < r {
            return Ok(Matrix::zero(0, source.dim()));
        }
        let (tp, tq) = (p + r, q + 1 - r);
        let target = self.entry(r, tp, tq)?;
        let k = p + q;
        let cols = source
            .representatives()
            .iter()
            .map(|x| {
                let dx = self.apply(k, x)?;
                target
                    .coordinates(&dx)
                    .ok_or_else(|| Error::axiom("D maps E_r cycles to E_r cycles", format!("({p},{q}) page {r}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Matrix::from_columns(target.dim(), cols))
    }

    /// The page `E_r` over all known entries.
    pub fn page(&self, r: usize) -> Result<Page<F>> {
        let mut page = Page {
            r,
            dims: BTreeMap::new(),
            representatives: BTreeMap::new(),
            differentials: BTreeMap::new(),
            unknown: Vec::new(),
        };
        let blocks: Vec<(usize, usize)> = self.b.blocks().collect();
        for &(p, q) in &blocks {
            match self.entry(r, p, q) {
                Ok(e) => {
                    if e.dim() > 0 {
                        page.dims.insert((p, q), e.dim());
                        page.representatives.insert((p, q), e.representatives().to_vec());
                    }
                }
                Err(Error::NotDefined(_)) => page.unknown.push((p, q)),
                Err(e) => return Err(e),
            }
        }
        for &(p, q) in page.dims.clone().keys() {
            if q + 1 < r || page.dim(p + r, q + 1 - r) == 0 {
                continue;
            }
            match self.differential(r, p, q) {
                Ok(d) => {
                    page.differentials.insert((p, q), d);
                }
                Err(Error::NotDefined(_)) => {}
                Err(e) => return Err(e),
            }
        }
        Ok(page)
    }

    pub fn pages(&self, r_max: usize) -> Result<Vec<Page<F>>> {
        (0..=r_max).map(|r| self.page(r)).collect()
    }

    /// Smallest `r >= 1` such that every `d_s` with `s >= r` vanishes on
    /// the known entries, so that `E_r = E_infinity` there.
    pub fn collapse_page(&self) -> Result<usize> {
        let last = self.b.pmax().max(1);
        let mut r = last + 1;
        for s in (1..=last).rev() {
            if self.page(s)?.differentials_vanish() {
                r = s;
            } else {
                break;
            }
        }
        Ok(r)
    }

    /// `E_infinity` dimensions, i.e. the page past the last column.
    pub fn e_infinity(&self) -> Result<Page<F>> {
        self.page(self.b.pmax() + 1)
    }

    /// `dim H^k(Tot)` for every trusted total degree `k`.
    pub fn total_cohomology(&self) -> Result<Vec<usize>> {
        let kmax = self.b.trusted_total_max();
        let mut ranks = Vec::with_capacity(kmax + 1);
        for k in 0..=kmax {
            let cols = self.columns[k]
                .iter()
                .map(|c| c.clone().ok_or_else(|| Error::NotDefined(format!("total degree {k}"))))
                .collect::<Result<Vec<_>>>()?;
            ranks.push(Matrix::from_columns(self.b.total_dim(k + 1), cols).rank());
        }
        Ok((0..=kmax)
            .map(|k| self.b.total_dim(k) - ranks[k] - if k == 0 { 0 } else { ranks[k - 1] })
            .collect())
    }
}

/// Convenience: total cohomology dimensions of a bicomplex.
pub fn total_cohomology<F: Field>(b: &Bicomplex<F>) -> Result<Vec<usize>> {
    SpectralSequence::new(b).total_cohomology()
}

/// Convenience: the pages `E_0 .. E_{r_max}`.
pub fn pages<F: Field>(b: &Bicomplex<F>, r_max: usize) -> Result<Vec<Page<F>>> {
    SpectralSequence::new(b).pages(r_max)
}

/// Convenience: the collapse page.
pub fn collapse_page<F: Field>(b: &Bicomplex<F>) -> Result<usize> {
    SpectralSequence::new(b).collapse_page()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{catalog, Algebra};
    use crate::bgcomplex::{build_ag, build_c, build_ebar, build_j};
    use crate::field::Rat;
    use crate::graphs::GraphFamily;

    fn alg(name: &str) -> Algebra<Rat> {
        catalog::<Rat>(name).unwrap().into_algebra().unwrap()
    }

    fn euler(page: &Page<Rat>) -> i64 {
        page.dims.iter().map(|(&(p, q), &d)| if (p + q) % 2 == 0 { d as i64 } else { -(d as i64) }).sum()
    }

    #[test]
    fn zero_complex() {
        let c = build_c(3, &alg("point"), None).unwrap();
        assert!(total_cohomology(c.bicomplex()).unwrap().iter().all(|&d| d == 0));
    }

    #[test]
    fn single_column_collapses_at_first_page() {
        let c = build_c(2, &alg("s2"), None).unwrap();
        let ss = SpectralSequence::new(c.bicomplex());
        assert_eq!(ss.collapse_page().unwrap(), 1);
        assert_eq!(ss.page(1).unwrap().dims, ss.e_infinity().unwrap().dims);
    }

    #[test]
    fn two_point_quotient_complex_of_spheres() {
        for m in [2usize, 3, 4] {
            let e = build_ebar(2, &alg(&format!("s{m}")), None).unwrap();
            let h = total_cohomology(e.bicomplex()).unwrap();
            for (k, d) in h.iter().enumerate() {
                let want = usize::from(k == m || k == 2 * m);
                assert_eq!(*d, want, "S{m} degree {k}");
            }
        }
    }

    #[test]
    fn pages_are_consistent() {
        for name in ["s2", "t2", "cp2"] {
            let a = alg(name);
            for n in [3, 4] {
                let c = build_c(n, &a, None).unwrap();
                let ss = SpectralSequence::new(c.bicomplex());
                let total = ss.total_cohomology().unwrap();
                let pages = ss.pages(n).unwrap();
                let chi = euler(&pages[0]);
                for r in 0..pages.len() {
                    assert_eq!(euler(&pages[r]), chi, "{name} n={n} r={r}");
                    // dim E_{r+1} = dim ker d_r - rank of d_r into the entry
                    if r + 1 < pages.len() {
                        for (&(p, q), &d) in &pages[r].dims {
                            let out = pages[r].differentials.get(&(p, q)).map_or(0, Matrix::rank);
                            let incoming = if q + r >= 1 && p >= r { pages[r].differentials.get(&(p - r, q + r - 1)).map_or(0, Matrix::rank) } else { 0 };
                            assert_eq!(pages[r + 1].dim(p, q), d - out - incoming, "{name} n={n} r={r} ({p},{q})");
                        }
                    }
                }
                let inf = ss.e_infinity().unwrap();
                for (k, &h) in total.iter().enumerate() {
                    assert_eq!(inf.total(k), h, "{name} n={n} degree {k}");
                }
            }
        }
    }

    #[test]
    fn three_point_small_complex_collapses_by_second_page() {
        for name in ["s2", "s3", "t2", "cp2"] {
            let c = build_c(3, &alg(name), None).unwrap();
            assert!(collapse_page(c.bicomplex()).unwrap() <= 2, "{name}");
        }
    }

    #[test]
    fn repeated_target_ideal_is_acyclic() {
        let j = build_j(3, &alg("s2"), None).unwrap();
        assert!(total_cohomology(j.bicomplex()).unwrap().iter().all(|&d| d == 0));
    }

    #[test]
    fn small_quotient_and_full_complexes_agree() {
        for name in ["s2", "t2"] {
            let a = alg(name);
            let c = total_cohomology(build_c(3, &a, None).unwrap().bicomplex()).unwrap();
            let e = total_cohomology(build_ebar(3, &a, None).unwrap().bicomplex()).unwrap();
            let g = total_cohomology(build_ag(3, &a, GraphFamily::Full, None).unwrap().bicomplex()).unwrap();
            let len = c.len().max(e.len()).max(g.len());
            let pad = |mut v: Vec<usize>| {
                v.resize(len, 0);
                v
            };
            assert_eq!(pad(c.clone()), pad(e), "{name}");
            assert_eq!(pad(c), pad(g), "{name}");
        }
    }
}
