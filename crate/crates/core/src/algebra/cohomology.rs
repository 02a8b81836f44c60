
use super::{format_combination, Algebra, AlgebraSpec, BasisElement, Element};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::{kernel_basis, Matrix, SparseVec, Subquotient};

/// Cohomology of a differential algebra, remembering a cocycle
/// representative for each basis class.
#[derive(Clone, Debug)]
pub struct CohomologyAlgebra<F> {
    algebra: Algebra<F>,
    model: Algebra<F>,
    representatives: Vec<Element<F>>,
    /// Per degree: cocycles modulo coboundaries, plus the offset of that
    /// degree's classes in the basis of `algebra`.
    slices: Vec<(Subquotient<F>, usize)>,
    max_degree: usize,
}

/// Cohomology of `model` in degrees `0..=max_degree`.
///
/// Needs `max_degree + 1` within the truncation bound so that cocycles in
/// the top requested degree are detected correctly.
pub fn cohomology<F: Field>(model: &Algebra<F>, max_degree: usize) -> Result<CohomologyAlgebra<F>> {
    if let Some(t) = model.truncation() {
        if max_degree + 1 > t {
            return Err(Error::Overflow {
                degree: max_degree + 1,
                bound: t,
            });
        }
    }
    let mut slices = Vec::new();
    let mut reps: Vec<Element<F>> = Vec::new();
    let mut basis = Vec::new();
    let dmatrix = |k: usize| -> Result<Matrix<F>> {
        let cols = model
            .basis_in_degree(k)
            .iter()
            .map(|&i| model.d_basis(i))
            .collect::<Result<Vec<_>>>()?;
        Ok(Matrix::from_columns(model.dim(), cols))
    };
    for k in 0..=max_degree {
        let src = model.basis_in_degree(k);
        let dk = dmatrix(k)?;
        let cycles: Vec<Element<F>> = kernel_basis(&dk)
            .into_iter()
            .map(|v| v.map_indices(|c| src[c]))
            .collect();
        let boundaries: Vec<Element<F>> = if k == 0 {
            Vec::new()
        } else {
            dmatrix(k - 1)?.columns().iter().filter(|c| !c.is_zero()).cloned().collect()
        };
        let sq = Subquotient::new(&cycles, &boundaries);
        let offset = reps.len();
        for r in sq.representatives() {
            let label = if r.nnz() == 1 && r.leading().is_some_and(|(_, c)| c.is_one()) {
                model.label(r.leading().unwrap().0).to_string()
            } else {
                format!("[{}]", format_combination(r, |i| model.label(i).to_string()))
            };
            basis.push(BasisElement { label, degree: k });
            reps.push(r.clone());
        }
        slices.push((sq, offset));
    }

    let class_of = |z: &Element<F>, k: usize| -> Option<Element<F>> {
        let (sq, off) = &slices[k];
        sq.coordinates(z).map(|c| c.map_indices(|i| i + off))
    };
    let unit_class = class_of(&SparseVec::unit(model.unit()), 0)
        .ok_or_else(|| Error::axiom("unit is a cocycle", model.label(model.unit()).to_string()))?;
    let unit = unit_class
        .leading()
        .map(|(i, _)| i)
        .ok_or_else(|| Error::axiom("unit class nonzero", String::new()))?;

    // above max_degree the result is only known to vanish when the model
    // itself is finite and ends there
    let truncation = match model.truncation() {
        Some(_) => Some(max_degree),
        None if model.max_degree() > max_degree => Some(max_degree),
        None => None,
    };
    let mut spec = AlgebraSpec::new(format!("H({})", model.name()), basis, unit);
    spec.truncation = truncation;
    let n = reps.len();
    for i in 0..n {
        for j in 0..n {
            let deg = spec.basis[i].degree + spec.basis[j].degree;
            if deg > max_degree {
                continue;
            }
            let p = model.multiply(&reps[i], &reps[j])?;
            let c = class_of(&p, deg).ok_or_else(|| Error::axiom("product of cocycles is a cocycle", format!("{i},{j}")))?;
            if !c.is_zero() {
                spec.products.push(((i, j), c));
            }
        }
    }
    if let Some(t) = model.top() {
        let k = model.degree(t);
        if k <= max_degree {
            if let Some(c) = class_of(&SparseVec::unit(t), k) {
                if c.nnz() == 1 && spec.basis.iter().filter(|b| b.degree == k).count() == 1 {
                    spec.top = c.leading().map(|(i, _)| i);
                }
            }
        }
    }
    let algebra = Algebra::new(spec)?;
    Ok(CohomologyAlgebra {
        algebra,
        model: model.clone(),
        representatives: reps,
        slices,
        max_degree,
    })
}

/// Cohomology of a model with a top class located automatically.
///
/// For a truncated model everything below the bound is computed. If the
/// highest nonzero degree `k` is one-dimensional, is followed by at least
/// one computed zero degree and carries a perfect Poincare pairing, its
/// class is taken as the top class and the cohomology is declared zero
/// above `k`. This is an assumption, not a certificate. Otherwise the
/// result stays truncated.
pub fn cohomology_with_top<F: Field>(model: &Algebra<F>) -> Result<CohomologyAlgebra<F>> {
    let bound = match model.truncation() {
        None => return cohomology(model, model.max_degree()),
        Some(t) => t,
    };
    if bound == 0 {
        return Err(Error::Precondition("truncation bound must be positive".into()));
    }
    let h = cohomology(model, bound - 1)?;
    let betti = h.betti();
    let Some(k) = betti.iter().rposition(|&b| b > 0) else {
        return Ok(h);
    };
    if betti[k] != 1 || k + 2 > bound {
        return Ok(h);
    }
    let top = h.algebra().basis_in_degree(k)[0];
    let label = h.algebra().label(top).to_string();
    let candidate = h.clone().with_top(&label)?;
    if candidate.algebra().poincare_data().is_err() {
        return Ok(h);
    }
    candidate.assume_finite()
}

impl<F: Field> CohomologyAlgebra<F> {
    pub fn algebra(&self) -> &Algebra<F> {
        &self.algebra
    }

    pub fn model(&self) -> &Algebra<F> {
        &self.model
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    /// Cocycle representing basis class `i`.
    pub fn representative(&self, i: usize) -> &Element<F> {
        &self.representatives[i]
    }

    /// A cocycle representing an arbitrary class.
    pub fn lift(&self, class: &Element<F>) -> Element<F> {
        let mut out = SparseVec::new();
        for (i, c) in class.iter() {
            out.add_scaled(&self.representatives[i], c);
        }
        out
    }

    /// Class of a homogeneous cocycle of the model; `None` if it is not a
    /// cocycle or its degree is out of range.
    pub fn class_of(&self, cocycle: &Element<F>) -> Option<Element<F>> {
        if cocycle.is_zero() {
            return Some(SparseVec::new());
        }
        let k = self.model.element_degree(cocycle)?;
        let (sq, off) = self.slices.get(k)?;
        sq.coordinates(cocycle).map(|c| c.map_indices(|i| i + off))
    }

    /// Class of a model element written as an expression, e.g. `t*x - u*y`.
    pub fn class_of_expr(&self, expr: &str) -> Result<Element<F>> {
        let z = self.model.parse_element(expr)?;
        self.class_of(&z)
            .ok_or_else(|| Error::Precondition(format!("`{expr}` is not a cocycle in range")))
    }

    /// Betti numbers in degrees `0..=max_degree`.
    pub fn betti(&self) -> Vec<usize> {
        (0..=self.max_degree)
            .map(|k| self.algebra.basis_in_degree(k).len())
            .collect()
    }

    /// A linear map from the model to the cohomology that sends cocycles to
    /// their classes and kills a complement of the cocycles, so its tensor
    /// powers compute Kunneth classes. Columns above `max_degree` are zero.
    pub fn retraction_matrix(&self) -> Result<Matrix<F>> {
        let model = &self.model;
        let mut cols = vec![SparseVec::new(); model.dim()];
        for k in 0..=self.max_degree {
            let src = model.basis_in_degree(k);
            if src.is_empty() {
                continue;
            }
            let dk = Matrix::from_columns(
                model.dim(),
                src.iter().map(|&i| model.d_basis(i)).collect::<Result<Vec<_>>>()?,
            );
            let local = |v: &Element<F>| v.map_indices(|i| src.binary_search(&i).expect("degree k"));
            let cycles: Vec<Element<F>> = kernel_basis(&dk);
            let boundaries: Vec<Element<F>> = if k == 0 {
                Vec::new()
            } else {
                let prev = model.basis_in_degree(k - 1);
                prev.iter().map(|&i| model.d_basis(i).map(|v| local(&v))).collect::<Result<Vec<_>>>()?
            };
            let (sq, off) = &self.slices[k];
            // basis of A^k: boundaries, class representatives, complement of the cycles
            let mut basis: Vec<Element<F>> = Vec::new();
            let mut echelon = crate::linalg::Echelon::new();
            for b in &boundaries {
                if echelon.insert(b.clone()).is_some() {
                    basis.push(b.clone());
                }
            }
            let nb = basis.len();
            for r in sq.representatives() {
                basis.push(local(r));
            }
            let nh = sq.dim();
            let complement = crate::linalg::quotient_basis(src.len(), &cycles);
            for &c in complement.representative_columns() {
                basis.push(SparseVec::unit(c));
            }
            let change = Matrix::from_columns(src.len(), basis);
            let inv = crate::linalg::inverse(&change)
                .ok_or_else(|| Error::axiom("cocycle splitting spans the degree", format!("degree {k}")))?;
            for (c, &gi) in src.iter().enumerate() {
                cols[gi] = SparseVec::from_pairs(
                    inv.column(c).iter().filter(|(r, _)| (nb..nb + nh).contains(r)).map(|(r, x)| (r - nb + off, x.clone())),
                );
            }
        }
        Ok(Matrix::from_columns(self.algebra.dim(), cols))
    }

    /// Declares that the cohomology vanishes above `max_degree`, e.g. once
    /// a top class has been identified there.
    pub fn assume_finite(mut self) -> Result<Self> {
        let mut spec = self.algebra.spec();
        spec.truncation = None;
        self.algebra = Algebra::new(spec)?;
        Ok(self)
    }

    /// Treats a formal algebra (zero differential) as its own cohomology.
    pub fn formal(algebra: &Algebra<F>) -> Result<Self> {
        if algebra.has_differential() {
            return Err(Error::Precondition("algebra has a nonzero differential".into()));
        }
        cohomology(algebra, algebra.max_degree())
    }

    /// Declares the top class of the cohomology by label.
    pub fn with_top(mut self, label: &str) -> Result<Self> {
        self.algebra = self.algebra.with_top(label)?;
        Ok(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{catalog, TruncatedFreeCdga};
    use crate::field::Rat;

    #[test]
    fn formal_algebra_is_its_own_cohomology() {
        for name in ["s2", "t2", "cp2", "s2xs2"] {
            let a = catalog::<Rat>(name).unwrap().into_algebra().unwrap();
            let h = CohomologyAlgebra::formal(&a).unwrap();
            assert_eq!(h.algebra().dim(), a.dim());
            assert_eq!(h.algebra().truncation(), None);
            assert_eq!(h.algebra().top().is_some(), a.top().is_some());
            for i in 0..a.dim() {
                for j in 0..a.dim() {
                    assert_eq!(h.algebra().product_basis(i, j).unwrap(), a.product_basis(i, j).unwrap());
                }
            }
        }
    }

    #[test]
    fn x_squared_exact() {
        let c = TruncatedFreeCdga::<Rat>::from_strings("xu", &[("x", 2), ("u", 3)], &[("u", "x*x")], 5).unwrap();
        let h = cohomology(c.algebra(), 3).unwrap();
        let labels: Vec<_> = h.algebra().basis().iter().map(|b| b.label.as_str()).collect();
        assert_eq!(labels, ["1", "x"]);
    }

    #[test]
    fn retraction_sends_cocycles_to_classes() {
        let stb = crate::algebra::stb_model::<Rat>(12).unwrap();
        let h = cohomology(stb.algebra(), 7).unwrap();
        let r = h.retraction_matrix().unwrap();
        let m = stb.algebra();
        for i in 0..h.algebra().dim() {
            assert_eq!(r.apply(h.representative(i)), SparseVec::unit(i));
        }
        // coboundaries go to zero
        for i in 0..m.dim() {
            if m.degree(i) < 7 {
                assert!(r.apply(&m.d_basis(i).unwrap()).is_zero());
            }
        }
        let z = m.parse_element("t*x*y - u*y*y + x*x*t - u*x*y").unwrap();
        let c = h.class_of(&z).unwrap();
        assert_eq!(r.apply(&z), c);
    }

    #[test]
    fn top_class_found_for_the_tangent_bundle_model() {
        let stb = crate::algebra::stb_model::<Rat>(14).unwrap();
        let h = cohomology_with_top(stb.algebra()).unwrap();
        assert_eq!(h.algebra().truncation(), None);
        assert_eq!(h.betti(), [1, 0, 2, 0, 0, 2, 0, 1, 0, 0, 0, 0, 0, 0]);
        assert_eq!(h.algebra().top().map(|t| h.algebra().degree(t)), Some(7));
        let default = crate::algebra::stb_model::<Rat>(12).unwrap();
        assert_eq!(cohomology_with_top(default.algebra()).unwrap().algebra().truncation(), None);
        // no zero degree seen above the last class
        let short = crate::algebra::stb_model::<Rat>(8).unwrap();
        assert!(cohomology_with_top(short.algebra()).unwrap().algebra().truncation().is_some());
    }

    #[test]
    fn needs_one_degree_of_headroom() {
        let c = TruncatedFreeCdga::<Rat>::from_strings("x", &[("x", 2)], &[], 5).unwrap();
        assert!(cohomology(c.algebra(), 5).is_err());
    }
}
