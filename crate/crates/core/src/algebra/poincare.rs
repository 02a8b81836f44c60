
use super::{Algebra, Element};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::{inverse, quotient_basis, Matrix, Quotient, SparseVec};

/// Poincare duality data of an algebra with a top class.
#[derive(Clone, Debug)]
pub struct PoincareData<F> {
    pub top_degree: usize,
    pub omega: usize,
    /// `dual[i]` is the dual basis element `e_i'`, with `<e_i ; e_j'> = delta_ij`.
    pub dual: Vec<Element<F>>,
    /// The diagonal class `sum_t (-1)^{|e_t'|} e_t (x) e_t'` as `(i, j, c)` triples.
    pub diagonal: Vec<(usize, usize, F)>,
}

impl<F: Field> PoincareData<F> {
    /// Coefficient of the top class in `e_i * e_j`.
    pub fn pairing(&self, alg: &Algebra<F>, i: usize, j: usize) -> F {
        if alg.degree(i) + alg.degree(j) != self.top_degree {
            return F::zero();
        }
        alg.product_basis_ref(i, j).get(self.omega)
    }
}

impl<F: Field> Algebra<F> {
    /// Dual basis and diagonal class of a Poincare duality algebra.
    pub fn poincare_data(&self) -> Result<PoincareData<F>> {
        let omega = self.top.ok_or(Error::NoTopClass)?;
        if self.has_differential() {
            return Err(Error::Precondition("Poincare data needs a zero differential".into()));
        }
        let m = self.degree(omega);
        if self.basis_in_degree(m).len() != 1 || self.max_degree() != m {
            return Err(Error::DegeneratePairing { degree: m });
        }
        let mut dual = vec![SparseVec::new(); self.dim()];
        for p in 0..=m {
            let lo = self.basis_in_degree(p);
            let hi = self.basis_in_degree(m - p);
            if lo.len() != hi.len() {
                return Err(Error::DegeneratePairing { degree: p });
            }
            if lo.is_empty() {
                continue;
            }
            // P[k][j] = <e_k ; f_j>, dual e_i' = sum_j C[i][j] f_j with C = (P^T)^{-1}
            let pm = Matrix::from_triplets(
                lo.len(),
                hi.len(),
                lo.iter().enumerate().flat_map(|(k, &ek)| {
                    hi.iter()
                        .enumerate()
                        .map(move |(j, &fj)| (k, j, self.product_basis_ref(ek, fj).get(omega)))
                }),
            );
            let c = inverse(&pm.transpose()).ok_or(Error::DegeneratePairing { degree: p })?;
            for (i, &ei) in lo.iter().enumerate() {
                dual[ei] = SparseVec::from_pairs(hi.iter().enumerate().map(|(j, &fj)| (fj, c.get(i, j))));
            }
        }
        let mut diagonal = Vec::new();
        for (t, dt) in dual.iter().enumerate() {
            let sign = F::sign(m - self.degree(t));
            for (j, c) in dt.iter() {
                diagonal.push((t, j, sign.clone() * c.clone()));
            }
        }
        Ok(PoincareData {
            top_degree: m,
            omega,
            dual,
            diagonal,
        })
    }

    /// The indecomposables `Q = A+ / (A+ . A+)`.
    pub fn indecomposables(&self) -> Indecomposables<F> {
        let mut span = vec![SparseVec::unit(self.unit)];
        let pos = self.positive_basis();
        for &i in &pos {
            for &j in &pos {
                if !self.in_range(self.degree(i) + self.degree(j)) {
                    continue;
                }
                let p = self.product_basis_ref(i, j);
                if !p.is_zero() {
                    span.push(p.clone());
                }
            }
        }
        let quotient = quotient_basis(self.dim(), &span);
        let degrees = quotient
            .representative_columns()
            .iter()
            .map(|&c| self.degree(c))
            .collect();
        Indecomposables { quotient, degrees }
    }
}

/// Indecomposable quotient with its projection.
#[derive(Clone, Debug)]
pub struct Indecomposables<F> {
    quotient: Quotient<F>,
    degrees: Vec<usize>,
}

impl<F: Field> Indecomposables<F> {
    pub fn dim(&self) -> usize {
        self.quotient.dim()
    }

    pub fn degree(&self, i: usize) -> usize {
        self.degrees[i]
    }

    /// Basis indices of the algebra whose classes form a basis of `Q`.
    pub fn representatives(&self) -> &[usize] {
        self.quotient.representative_columns()
    }

    /// Coordinates in `Q` of an element of the algebra (the unit maps to 0).
    pub fn project(&self, e: &Element<F>) -> Element<F> {
        self.quotient.project(e)
    }

    pub fn is_decomposable(&self, e: &Element<F>) -> bool {
        self.project(e).is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;
    use crate::algebra::catalog;
    use crate::field::Rat;

    fn alg(name: &str) -> Algebra<Rat> {
        catalog::<Rat>(name).unwrap().into_algebra().unwrap()
    }

    #[test]
    fn sphere_diagonal() {
        for m in [2usize, 3] {
            let s = alg(&format!("s{m}"));
            let pd = s.poincare_data().unwrap();
            // delta = w (x) 1 + (-1)^m 1 (x) w
            let mut diag = pd.diagonal.clone();
            diag.sort_by_key(|t| (t.0, t.1));
            assert_eq!(diag, vec![(0, 1, Rat::sign(m)), (1, 0, Rat::one())]);
        }
    }

    #[test]
    fn cp2_diagonal_all_positive() {
        let c = alg("cp2");
        let pd = c.poincare_data().unwrap();
        let mut diag = pd.diagonal.clone();
        diag.sort_by_key(|t| (t.0, t.1));
        assert_eq!(diag, vec![(0, 2, Rat::one()), (1, 1, Rat::one()), (2, 0, Rat::one())]);
    }

    #[test]
    fn dual_basis_multiplies_to_top() {
        for name in ["s2", "s3", "t2", "cp2", "s2xs2", "t3"] {
            let a = alg(name);
            let pd = a.poincare_data().unwrap();
            for i in 0..a.dim() {
                let p = a.multiply(&SparseVec::unit(i), &pd.dual[i]).unwrap();
                assert_eq!(p, SparseVec::unit(pd.omega), "{name} basis {i}");
            }
        }
    }

    #[test]
    fn diagonal_is_koszul_symmetric() {
        for name in ["s2", "s3", "t2", "cp2", "s2xs2", "t3"] {
            let a = alg(name);
            let pd = a.poincare_data().unwrap();
            let mut d = SparseVec::new();
            let mut flipped = SparseVec::new();
            let n = a.dim();
            for (i, j, c) in &pd.diagonal {
                d.add_at(i * n + j, c.clone());
                let s = Rat::sign(a.degree(*i) * a.degree(*j));
                flipped.add_at(j * n + i, s * c.clone());
            }
            assert_eq!(flipped, d.scaled(&Rat::sign(pd.top_degree)), "{name}");
        }
    }

    #[test]
    fn no_top_class_is_an_error() {
        let a = alg("s2").with_name("x");
        let mut spec = a.spec();
        spec.top = None;
        let b = Algebra::new(spec).unwrap();
        assert_eq!(b.poincare_data().unwrap_err(), Error::NoTopClass);
    }

    #[test]
    fn indecomposable_dimensions() {
        assert_eq!(alg("s2").indecomposables().dim(), 1);
        assert_eq!(alg("cp2").indecomposables().dim(), 1);
        assert_eq!(alg("t2").indecomposables().dim(), 2);
        assert_eq!(alg("point").indecomposables().dim(), 0);
    }
}
