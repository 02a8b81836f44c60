//! The pairing between `T(n, H)` and the graph quotient complex `Ebar(n, H)`
//! for a Poincare duality algebra `H` of top degree `m`: block `(p, h)` of
//! `T` pairs with block `(p, (n - p) m - h)` of `Ebar`, `d1` is adjoint to
//! the edge differential up to a sign, and so their `E2` terms have the
//! same dimensions block by block.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::algebra::{Algebra, PoincareData};
use crate::bgcomplex::{build_ebar, BgBasisElement, BgComplex};
use crate::ctcomplex::{build_ct, CtBasisElement, CtComplex};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::{Matrix, SparseVec};
use crate::spectral::SpectralSequence;

/// Both complexes with the Poincare data needed to pair them.
pub struct Pairing<F> {
    pub ct: CtComplex<F>,
    pub ebar: BgComplex<F>,
    pd: PoincareData<F>,
}

impl<F: Field> Pairing<F> {
    pub fn new(n: usize, h: &Algebra<F>) -> Result<Self> {
        let ct = build_ct(n, h)?;
        let ebar = build_ebar(n, h, None)?;
        let pd = h.poincare_data()?;
        Ok(Pairing { ct, ebar, pd })
    }

    fn m(&self) -> usize {
        self.pd.top_degree
    }

    /// Block of `Ebar` paired with block `(p, h)` of `T`.
    pub fn partner(&self, p: usize, h: usize) -> Option<usize> {
        ((self.ct.n() - p) * self.m()).checked_sub(h)
    }

    /// Image of `b e_G` in `H^{(x) n}`: the component factors of `b` sit at
    /// the smallest vertex of their component, then the result is
    /// multiplied by the diagonal class `p*_{s,t}(delta)` of each edge in
    /// lexicographic order.
    pub fn spread(&self, e: &BgBasisElement) -> Result<SparseVec<F>> {
        let g = &self.ebar.graphs()[e.graph];
        let unit = self.ct.algebra().unit();
        let n = self.ct.n();
        let mut f = vec![unit; n];
        for (comp, &b) in g.components().iter().zip(&e.factors) {
            f[comp[0] - 1] = b;
        }
        let mut cur: SparseVec<F> = SparseVec::unit(self.ct.tensor_code(&f));
        for &(s, t) in g.edges() {
            let mut next = SparseVec::new();
            for (i, j, c) in &self.pd.diagonal {
                let mut d = vec![unit; n];
                d[s - 1] = *i;
                d[t - 1] = *j;
                let code = self.ct.tensor_code(&d);
                for (a, x) in cur.iter() {
                    for (r, y) in self.ct.tensor_product(a, code)? {
                        next.add_at(r, x.clone() * c.clone() * y);
                    }
                }
            }
            cur = next;
        }
        Ok(cur)
    }

    /// Factor-wise pairing of two basis tensors, with the Koszul sign of
    /// interleaving `(a_1 .. a_n)(b_1 .. b_n)` into `a_1 b_1 .. a_n b_n`.
    pub fn pair_tensors(&self, a: usize, b: usize) -> F {
        let alg = self.ct.algebra();
        let fa = self.ct.tensor_factors(a);
        let fb = self.ct.tensor_factors(b);
        let mut s = 0;
        for i in 0..fa.len() {
            for j in 0..i {
                s += alg.degree(fa[i]) * alg.degree(fb[j]);
            }
        }
        let mut c = F::sign(s);
        for (&x, &y) in fa.iter().zip(&fb) {
            c *= self.pd.pairing(alg, x, y);
            if c.is_zero() {
                break;
            }
        }
        c
    }

    /// `<h x_G ; b e_G'>`: zero unless `G = G'` (edges matched one to one),
    /// otherwise the pairing of `h` with the image of `b e_G` in `H^{(x) n}`.
    pub fn pair_basis(&self, w: &CtBasisElement, e: &BgBasisElement) -> Result<F> {
        let g = &self.ebar.graphs()[e.graph];
        if self.ct.monomial_edges(w.monomial) != g.edges() {
            return Ok(F::zero());
        }
        let mut c = F::zero();
        for (t, x) in self.spread(e)?.iter() {
            c += x.clone() * self.pair_tensors(w.tensor, t);
        }
        Ok(c)
    }

    /// Pairing matrix of block `(p, h)`: rows index the partner block of
    /// `Ebar`, columns the quotient coordinates of `T^{p,h}`.
    pub fn matrix(&self, p: usize, h: usize) -> Result<Matrix<F>> {
        let q = self.partner(p, h);
        let rows = q.map_or(&[][..], |q| self.ebar.basis(p, q));
        let Some(block) = self.ct.block(p, h) else {
            return Ok(Matrix::zero(rows.len(), 0));
        };
        let reps = block.quotient_basis();
        let mut triplets = Vec::new();
        for (c, w) in reps.iter().enumerate() {
            for (r, e) in rows.iter().enumerate() {
                let x = self.pair_basis(w, e)?;
                if !x.is_zero() {
                    triplets.push((r, c, x));
                }
            }
        }
        Ok(Matrix::from_triplets(rows.len(), reps.len(), triplets))
    }

    /// Whether the pairing on monomials without repeated targets kills the
    /// relations among them, so that it descends to `T^{p,h}`.
    pub fn descends(&self, p: usize, h: usize) -> Result<bool> {
        let (Some(q), Some(block)) = (self.partner(p, h), self.ct.block(p, h)) else {
            return Ok(true);
        };
        let reps = block.quotient_basis();
        for w in block.basis.iter().filter(|w| self.ct.in_r(w.monomial)) {
            let coords = block.quotient.project(&SparseVec::unit(block.index_of(w).expect("own basis")));
            for e in self.ebar.basis(p, q) {
                let mut via = F::zero();
                for (i, c) in coords.iter() {
                    via += c.clone() * self.pair_basis(&reps[i], e)?;
                }
                if via != self.pair_basis(w, e)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// The sign `s` with `P_{p-1} d1 = s d'^T P_p` on block `(p, h)`, where
    /// `d'` is the edge differential of `Ebar`. `Some(None)` if both sides
    /// vanish, `None` if neither sign works.
    pub fn adjoint_sign(&self, p: usize, h: usize) -> Result<Option<Option<i8>>> {
        if p == 0 {
            return Ok(Some(None));
        }
        let m = self.m();
        let lhs = self.matrix(p - 1, h + m)?.compose(&self.ct.d1(p, h));
        let Some(q) = self.partner(p, h) else {
            return Ok(if lhs.is_zero() { Some(None) } else { None });
        };
        let dprime = self.ebar.bicomplex().horizontal(p - 1, q);
        let rhs = dprime.transpose().compose(&self.matrix(p, h)?);
        if lhs.is_zero() && rhs.is_zero() {
            return Ok(Some(None));
        }
        if lhs == rhs {
            return Ok(Some(Some(1)));
        }
        if lhs == rhs.scaled(&-F::one()) {
            return Ok(Some(Some(-1)));
        }
        Ok(None)
    }
}

/// Per-block outcome of [`check_duality`].
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct BlockDuality {
    pub p: usize,
    pub h: usize,
    pub q: Option<usize>,
    pub ct_dim: usize,
    pub ebar_dim: usize,
    pub nondegenerate: bool,
    pub descends: bool,
    /// `None` if the adjointness fails; `Some(0)` if both sides vanish.
    pub adjoint_sign: Option<i8>,
    pub ct_e2: usize,
    pub ebar_e2: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct DualityReport {
    pub n: usize,
    pub algebra: String,
    pub blocks: Vec<BlockDuality>,
}

impl DualityReport {
    pub fn holds(&self) -> bool {
        self.blocks.iter().all(|b| {
            b.nondegenerate && b.descends && b.adjoint_sign.is_some() && b.ct_e2 == b.ebar_e2
        })
    }

    pub fn failures(&self) -> Vec<&BlockDuality> {
        self.blocks
            .iter()
            .filter(|b| !(b.nondegenerate && b.descends && b.adjoint_sign.is_some() && b.ct_e2 == b.ebar_e2))
            .collect()
    }
}

/// Checks nondegeneracy, adjointness and the `E2` dimension match for
/// every block, including blocks where one side is zero.
pub fn check_duality<F: Field>(n: usize, h: &Algebra<F>) -> Result<DualityReport> {
    if h.has_differential() {
        return Err(Error::Precondition("duality needs a formal algebra".into()));
    }
    let pairing = Pairing::new(n, h)?;
    let m = pairing.m();
    let ct_e2 = pairing.ct.e2_dims();
    let ss = SpectralSequence::new(pairing.ebar.bicomplex());
    let ebar_e2 = ss.page(2)?.dims;
    let mut keys: BTreeMap<(usize, usize), ()> = BTreeMap::new();
    for &(p, h) in pairing.ct.blocks().keys() {
        keys.insert((p, h), ());
    }
    for (p, q) in pairing.ebar.bicomplex().blocks() {
        if let Some(h) = ((n - p) * m).checked_sub(q) {
            keys.insert((p, h), ());
        }
    }
    let mut blocks = Vec::new();
    for &(p, hd) in keys.keys() {
        let q = pairing.partner(p, hd);
        let ct_dim = pairing.ct.dim(p, hd);
        let ebar_dim = q.map_or(0, |q| pairing.ebar.dim(p, q));
        let nondegenerate = ct_dim == ebar_dim && pairing.matrix(p, hd)?.rank() == ct_dim;
        let adjoint_sign = pairing.adjoint_sign(p, hd)?.map(|s| s.unwrap_or(0));
        blocks.push(BlockDuality {
            p,
            h: hd,
            q,
            ct_dim,
            ebar_dim,
            nondegenerate,
            descends: pairing.descends(p, hd)?,
            adjoint_sign,
            ct_e2: ct_e2.get(&(p, hd)).copied().unwrap_or(0),
            ebar_e2: q.map_or(0, |q| ebar_e2.get(&(p, q)).copied().unwrap_or(0)),
        });
    }
    Ok(DualityReport {
        n,
        algebra: h.name().to_string(),
        blocks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::catalog;
    use crate::field::{Fp, Rat};

    fn alg(name: &str) -> Algebra<Rat> {
        catalog::<Rat>(name).unwrap().into_algebra().unwrap()
    }

    #[test]
    fn two_points_pairing_is_perfect() {
        for name in ["s2", "s3", "cp2"] {
            let r = check_duality(2, &alg(name)).unwrap();
            assert!(r.holds(), "{name}: {:?}", r.failures());
        }
    }

    #[test]
    fn three_points() {
        for name in ["s2", "s3", "t2", "cp2"] {
            let r = check_duality(3, &alg(name)).unwrap();
            assert!(r.holds(), "{name}: {:?}", r.failures());
        }
    }

    #[test]
    fn block_dimensions_match_independent_count() {
        // dim T^{p,h} summed over h equals the number of forests with p
        // edges and distinct targets times dim H^{n-p}; cross-checked
        // against the Ebar side
        let a = alg("s2");
        let r = check_duality(3, &a).unwrap();
        let mut by_p = BTreeMap::new();
        for b in &r.blocks {
            if b.ct_dim > 0 {
                *by_p.entry(b.p).or_insert(0) += b.ct_dim;
            }
        }
        // 1 * 8, 3 * 4, 2 * 2 forests with 0, 1, 2 edges
        assert_eq!(by_p.into_iter().collect::<Vec<_>>(), vec![(0, 8), (1, 12), (2, 4)]);
    }

    #[test]
    fn missing_top_class_is_an_error() {
        let mut spec = alg("s2").spec();
        spec.top = None;
        let a = Algebra::new(spec).unwrap();
        assert_eq!(check_duality(2, &a).unwrap_err(), Error::NoTopClass);
    }

    #[test]
    fn adjoint_signs_are_recorded() {
        let r = check_duality(3, &alg("s3")).unwrap();
        assert!(r.blocks.iter().any(|b| b.adjoint_sign == Some(1) || b.adjoint_sign == Some(-1)));
    }

    #[test]
    fn prime_field() {
        let a = catalog::<Fp<5>>("cp2").unwrap().into_algebra().unwrap();
        assert!(check_duality(3, &a).unwrap().holds());
    }
}
