//! Finite-dimensional graded-commutative algebras presented by a basis and
//! structure constants, optionally with a differential and a top class.

mod catalog;
mod cohomology;
mod free;
mod kahler;
mod poincare;

pub use catalog::{catalog, connected_sum_model, connected_sum_with_cocycle, stb_s2xs2 as stb_model, CatalogEntry, FORMAL_CATALOG, STB_DEFAULT_BOUND};
pub use cohomology::{cohomology, cohomology_with_top, CohomologyAlgebra};
pub use free::{parse_polynomial, Polynomial, TruncatedFreeCdga};
pub use kahler::kahler_dimensions;
pub use poincare::{Indecomposables, PoincareData};

use std::collections::BTreeMap;
use std::fmt::Write as _;


use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::{quotient_basis, SparseVec};

/// A linear combination of basis elements.
pub type Element<F> = SparseVec<F>;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BasisElement {
    pub label: String,
    pub degree: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Algebra<F> {
    name: String,
    basis: Vec<BasisElement>,
    unit: usize,
    products: Vec<Element<F>>,
    differential: Option<Vec<Option<Element<F>>>>,
    top: Option<usize>,
    truncation: Option<usize>,
    by_degree: Vec<Vec<usize>>,
}

/// Raw data for [`Algebra::new`].
#[derive(Clone, Debug)]
pub struct AlgebraSpec<F> {
    pub name: String,
    pub basis: Vec<BasisElement>,
    pub unit: usize,
    /// Products of basis pairs; missing pairs default to zero, `b*a` is
    /// filled in from `a*b` by graded commutativity.
    pub products: Vec<((usize, usize), Element<F>)>,
    /// Differential on basis elements; missing entries are zero.
    pub differential: Vec<(usize, Element<F>)>,
    pub top: Option<usize>,
    /// If set, the basis spans exactly the degrees `<= truncation` of a
    /// larger algebra and anything landing above it is an overflow.
    pub truncation: Option<usize>,
}

impl<F: Field> AlgebraSpec<F> {
    pub fn new(name: impl Into<String>, basis: Vec<BasisElement>, unit: usize) -> Self {
        AlgebraSpec {
            name: name.into(),
            basis,
            unit,
            products: Vec::new(),
            differential: Vec::new(),
            top: None,
            truncation: None,
        }
    }
}

pub(crate) fn koszul(a: usize, b: usize) -> bool {
    a % 2 == 1 && b % 2 == 1
}

impl<F: Field> Algebra<F> {
    /// Builds an algebra and checks every structural axiom.
    pub fn new(spec: AlgebraSpec<F>) -> Result<Self> {
        let alg = Self::assemble(spec)?;
        alg.validate()?;
        Ok(alg)
    }

    /// Builds without running the axiom checks; used for derived algebras
    /// whose axioms follow from the construction and are tested separately.
    pub(crate) fn assemble(spec: AlgebraSpec<F>) -> Result<Self> {
        let n = spec.basis.len();
        if spec.unit >= n {
            return Err(Error::axiom("unit index in range", format!("unit={}", spec.unit)));
        }
        if spec.basis[spec.unit].degree != 0 {
            return Err(Error::axiom("unit has degree 0", spec.basis[spec.unit].label.clone()));
        }
        let mut seen = BTreeMap::new();
        for (i, b) in spec.basis.iter().enumerate() {
            if let Some(j) = seen.insert(b.label.clone(), i) {
                return Err(Error::axiom("distinct labels", format!("{j},{i} `{}`", b.label)));
            }
            if let Some(t) = spec.truncation {
                if b.degree > t {
                    return Err(Error::axiom("basis within truncation", b.label.clone()));
                }
            }
        }
        let deg = |i: usize| spec.basis[i].degree;
        let check_support = |e: &Element<F>, d: usize, what: &str| -> Result<()> {
            for k in e.indices() {
                if k >= n {
                    return Err(Error::axiom(format!("{what}: index in range"), k.to_string()));
                }
                if deg(k) != d {
                    return Err(Error::axiom(
                        "degree additivity",
                        format!("{what} has term {} of degree {} (expected {d})", spec.basis[k].label, deg(k)),
                    ));
                }
            }
            Ok(())
        };

        let mut given: BTreeMap<(usize, usize), Element<F>> = BTreeMap::new();
        for ((i, j), e) in spec.products {
            if i >= n || j >= n {
                return Err(Error::axiom("product indices in range", format!("({i},{j})")));
            }
            check_support(&e, deg(i) + deg(j), &format!("{}*{}", spec.basis[i].label, spec.basis[j].label))?;
            if given.insert((i, j), e).is_some() {
                return Err(Error::axiom("product given once", format!("({i},{j})")));
            }
        }
        let mut products = vec![SparseVec::new(); n * n];
        for i in 0..n {
            for j in 0..n {
                let value = if let Some(e) = given.get(&(i, j)) {
                    e.clone()
                } else if let Some(e) = given.get(&(j, i)) {
                    e.scaled(&F::sign(koszul(deg(i), deg(j)) as usize))
                } else if i == spec.unit {
                    SparseVec::unit(j)
                } else if j == spec.unit {
                    SparseVec::unit(i)
                } else {
                    SparseVec::new()
                };
                products[i * n + j] = value;
            }
        }

        let differential = if spec.differential.iter().all(|(_, e)| e.is_zero()) {
            None
        } else {
            let mut d: Vec<Option<Element<F>>> = (0..n)
                .map(|i| match spec.truncation {
                    Some(t) if deg(i) + 1 > t => None,
                    _ => Some(SparseVec::new()),
                })
                .collect();
            for (i, e) in spec.differential {
                if i >= n {
                    return Err(Error::axiom("differential index in range", i.to_string()));
                }
                check_support(&e, deg(i) + 1, &format!("d {}", spec.basis[i].label))?;
                if d[i].is_none() {
                    if !e.is_zero() {
                        return Err(Error::axiom("differential within truncation", spec.basis[i].label.clone()));
                    }
                } else {
                    d[i] = Some(e);
                }
            }
            Some(d)
        };

        let max_deg = spec.basis.iter().map(|b| b.degree).max().unwrap_or(0);
        let mut by_degree = vec![Vec::new(); max_deg + 1];
        for (i, b) in spec.basis.iter().enumerate() {
            by_degree[b.degree].push(i);
        }
        if let Some(t) = spec.top {
            if t >= n {
                return Err(Error::axiom("top index in range", t.to_string()));
            }
        }
        Ok(Algebra {
            name: spec.name,
            basis: spec.basis,
            unit: spec.unit,
            products,
            differential,
            top: spec.top,
            truncation: spec.truncation,
            by_degree,
        })
    }

    /// Checks unit, degree-zero, commutativity, associativity, d^2 = 0 and
    /// the Leibniz rule on all basis pairs and triples within range.
    pub fn validate(&self) -> Result<()> {
        let n = self.dim();
        let label = |i: usize| self.basis[i].label.as_str();
        if self.by_degree.first().map_or(0, |v| v.len()) != 1 {
            return Err(Error::axiom(
                "degree-0 part is spanned by the unit",
                format!("dim A^0 = {}", self.by_degree.first().map_or(0, |v| v.len())),
            ));
        }
        for i in 0..n {
            if self.product_basis(self.unit, i)? != SparseVec::unit(i)
                || self.product_basis(i, self.unit)? != SparseVec::unit(i)
            {
                return Err(Error::axiom("unit acts as identity", label(i).to_string()));
            }
        }
        for i in 0..n {
            for j in 0..n {
                if !self.in_range(self.degree(i) + self.degree(j)) {
                    continue;
                }
                let ij = self.product_basis(i, j)?;
                let ji = self.product_basis(j, i)?;
                let s = F::sign(koszul(self.degree(i), self.degree(j)) as usize);
                if ij != ji.scaled(&s) {
                    return Err(Error::axiom("graded commutativity", format!("{},{}", label(i), label(j))));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if i == self.unit || j == self.unit || k == self.unit {
                        continue;
                    }
                    if !self.in_range(self.degree(i) + self.degree(j) + self.degree(k)) {
                        continue;
                    }
                    let left = self.multiply(&self.product_basis(i, j)?, &SparseVec::unit(k))?;
                    let right = self.multiply(&SparseVec::unit(i), &self.product_basis(j, k)?)?;
                    if left != right {
                        return Err(Error::axiom(
                            "associativity",
                            format!("{},{},{}", label(i), label(j), label(k)),
                        ));
                    }
                }
            }
        }
        if self.differential.is_some() {
            for i in 0..n {
                if !self.in_range(self.degree(i) + 2) {
                    continue;
                }
                if !self.d(&self.d_basis(i)?)?.is_zero() {
                    return Err(Error::axiom("d o d = 0", label(i).to_string()));
                }
            }
            for i in 0..n {
                for j in 0..n {
                    let (di, dj) = (self.degree(i), self.degree(j));
                    if !self.in_range(di + dj + 1) {
                        continue;
                    }
                    let lhs = self.d(&self.product_basis(i, j)?)?;
                    let mut rhs = self.multiply(&self.d_basis(i)?, &SparseVec::unit(j))?;
                    rhs.add_scaled(&self.multiply(&SparseVec::unit(i), &self.d_basis(j)?)?, &F::sign(di));
                    if lhs != rhs {
                        return Err(Error::axiom("Leibniz rule", format!("{},{}", label(i), label(j))));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[BasisElement] {
        &self.basis
    }

    pub fn degree(&self, i: usize) -> usize {
        self.basis[i].degree
    }

    pub fn label(&self, i: usize) -> &str {
        &self.basis[i].label
    }

    pub fn unit(&self) -> usize {
        self.unit
    }

    pub fn top(&self) -> Option<usize> {
        self.top
    }

    pub fn truncation(&self) -> Option<usize> {
        self.truncation
    }

    pub fn max_degree(&self) -> usize {
        self.by_degree.len().saturating_sub(1)
    }

    /// Basis indices of degree `k`.
    pub fn basis_in_degree(&self, k: usize) -> &[usize] {
        self.by_degree.get(k).map_or(&[], |v| v.as_slice())
    }

    /// Positive-degree basis indices.
    pub fn positive_basis(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.degree(i) > 0).collect()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.basis.iter().position(|b| b.label == label)
    }

    /// True when degree `d` lies within the truncation bound.
    pub fn in_range(&self, d: usize) -> bool {
        self.truncation.is_none_or(|t| d <= t)
    }

    fn check_range(&self, d: usize) -> Result<()> {
        match self.truncation {
            Some(t) if d > t => Err(Error::Overflow { degree: d, bound: t }),
            _ => Ok(()),
        }
    }

    pub fn product_basis(&self, i: usize, j: usize) -> Result<Element<F>> {
        self.check_range(self.degree(i) + self.degree(j))?;
        Ok(self.products[i * self.dim() + j].clone())
    }

    pub(crate) fn product_basis_ref(&self, i: usize, j: usize) -> &Element<F> {
        &self.products[i * self.dim() + j]
    }

    /// Bilinear extension of the structure constants.
    pub fn multiply(&self, u: &Element<F>, v: &Element<F>) -> Result<Element<F>> {
        let mut out = SparseVec::new();
        for (i, a) in u.iter() {
            for (j, b) in v.iter() {
                self.check_range(self.degree(i) + self.degree(j))?;
                out.add_scaled(self.product_basis_ref(i, j), &(a.clone() * b.clone()));
            }
        }
        Ok(out)
    }

    pub fn multiply_all(&self, factors: &[Element<F>]) -> Result<Element<F>> {
        let mut acc = SparseVec::unit(self.unit);
        for f in factors {
            acc = self.multiply(&acc, f)?;
        }
        Ok(acc)
    }

    pub fn has_differential(&self) -> bool {
        self.differential.is_some()
    }

    /// The differential of a basis element (zero when there is none).
    pub fn d_basis(&self, i: usize) -> Result<Element<F>> {
        match &self.differential {
            None => Ok(SparseVec::new()),
            Some(d) => d[i].clone().ok_or(Error::Overflow {
                degree: self.degree(i) + 1,
                bound: self.truncation.unwrap_or(0),
            }),
        }
    }

    pub fn d(&self, u: &Element<F>) -> Result<Element<F>> {
        let mut out = SparseVec::new();
        if self.differential.is_none() {
            return Ok(out);
        }
        for (i, c) in u.iter() {
            out.add_scaled(&self.d_basis(i)?, c);
        }
        Ok(out)
    }

    /// Degree of a homogeneous element (`None` for zero or mixed degrees).
    pub fn element_degree(&self, u: &Element<F>) -> Option<usize> {
        let mut degs = u.indices().map(|i| self.degree(i));
        let first = degs.next()?;
        degs.all(|d| d == first).then_some(first)
    }

    pub fn with_top(mut self, label: &str) -> Result<Self> {
        let i = self.index_of(label).ok_or_else(|| Error::UnknownLabel(label.to_string()))?;
        self.top = Some(i);
        Ok(self)
    }

    /// Human-readable form, e.g. `2*a - b`.
    pub fn format_element(&self, u: &Element<F>) -> String {
        format_combination(u, |i| self.label(i).to_string())
    }

    /// Parses `c1*L1*L2 + c2*L3 - ...` where each `L` is a basis label;
    /// products of several labels are evaluated with the structure constants.
    pub fn parse_element(&self, expr: &str) -> Result<Element<F>> {
        parse_expression(expr, |factors| {
            let mut acc = SparseVec::unit(self.unit);
            for f in factors {
                let i = self.index_of(f).ok_or_else(|| Error::UnknownLabel(f.to_string()))?;
                acc = self.multiply(&acc, &SparseVec::unit(i))?;
            }
            Ok(acc)
        })
    }

    pub(crate) fn spec(&self) -> AlgebraSpec<F> {
        let n = self.dim();
        let mut products = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let p = self.product_basis_ref(i, j);
                if !p.is_zero() {
                    products.push(((i, j), p.clone()));
                }
            }
        }
        let differential = match &self.differential {
            None => Vec::new(),
            Some(d) => d
                .iter()
                .enumerate()
                .filter_map(|(i, e)| e.as_ref().filter(|e| !e.is_zero()).map(|e| (i, e.clone())))
                .collect(),
        };
        AlgebraSpec {
            name: self.name.clone(),
            basis: self.basis.clone(),
            unit: self.unit,
            products,
            differential,
            top: self.top,
            truncation: self.truncation,
        }
    }

    /// Quotient by a subspace that must be a differential ideal. The
    /// complement basis is chosen among the existing basis elements by
    /// pivot order.
    pub fn quotient_by_ideal(&self, ideal: &[Element<F>], name: impl Into<String>) -> Result<Self> {
        let q = quotient_basis(self.dim(), ideal);
        let keep = q.representative_columns().to_vec();
        let project = |e: &Element<F>| q.project(e);
        let basis: Vec<BasisElement> = keep.iter().map(|&i| self.basis[i].clone()).collect();
        let new_index = |old: usize| keep.iter().position(|&k| k == old);
        let unit = new_index(self.unit).ok_or_else(|| Error::Precondition("ideal contains the unit".into()))?;
        let mut spec = AlgebraSpec::new(name, basis, unit);
        spec.truncation = self.truncation;
        for (a, &i) in keep.iter().enumerate() {
            for (b, &j) in keep.iter().enumerate() {
                if !self.in_range(self.degree(i) + self.degree(j)) {
                    continue;
                }
                let p = project(self.product_basis_ref(i, j));
                if !p.is_zero() {
                    spec.products.push(((a, b), p));
                }
            }
            if self.differential.is_some() && self.in_range(self.degree(i) + 1) {
                let d = project(&self.d_basis(i)?);
                if !d.is_zero() {
                    spec.differential.push((a, d));
                }
            }
        }
        // closure check: the ideal must be stable under products and d
        for g in ideal {
            for i in 0..self.dim() {
                if let Some(dg) = self.element_degree(g) {
                    if !self.in_range(dg + self.degree(i)) {
                        continue;
                    }
                }
                let p = self.multiply(g, &SparseVec::unit(i))?;
                if !q.subspace().contains(&p) {
                    return Err(Error::Precondition("subspace is not an ideal".into()));
                }
            }
            if self.differential.is_some() {
                if let Ok(dg) = self.d(g) {
                    if !q.subspace().contains(&dg) {
                        return Err(Error::Precondition("ideal is not closed under d".into()));
                    }
                }
            }
        }
        spec.top = self.top.and_then(new_index);
        Algebra::new(spec)
    }
}

pub(crate) fn format_combination<F: Field>(u: &SparseVec<F>, mut name: impl FnMut(usize) -> String) -> String {
    if u.is_zero() {
        return "0".to_string();
    }
    let mut s = String::new();
    for (k, (i, c)) in u.iter().enumerate() {
        let (neg, mag) = if c.to_string().starts_with('-') {
            (true, -c.clone())
        } else {
            (false, c.clone())
        };
        if k == 0 {
            if neg {
                s.push('-');
            }
        } else {
            s.push_str(if neg { " - " } else { " + " });
        }
        if mag.is_one() {
            let _ = write!(s, "{}", name(i));
        } else {
            let _ = write!(s, "{}*{}", mag, name(i));
        }
    }
    s
}

/// Parses a signed sum of products. Each term is `[scalar*]f1*f2*...`; the
/// callback evaluates the factor list.
pub(crate) fn parse_expression<F: Field>(
    expr: &str,
    mut eval: impl FnMut(&[&str]) -> Result<Element<F>>,
) -> Result<Element<F>> {
    let bad = |m: &str| Error::Parse {
        line: 0,
        message: format!("{m} in `{expr}`"),
    };
    let mut terms: Vec<(bool, String)> = Vec::new();
    let mut cur = String::new();
    let mut neg = false;
    for ch in expr.chars() {
        match ch {
            '+' | '-' if !cur.trim().is_empty() && !cur.trim_end().ends_with('/') => {
                terms.push((neg, std::mem::take(&mut cur)));
                neg = ch == '-';
            }
            '-' if cur.trim().is_empty() => neg = !neg,
            '+' if cur.trim().is_empty() => {}
            _ => cur.push(ch),
        }
    }
    if !cur.trim().is_empty() {
        terms.push((neg, cur));
    } else if !terms.is_empty() || neg {
        return Err(bad("dangling operator"));
    }
    let mut out = SparseVec::new();
    for (neg, term) in terms {
        let parts: Vec<&str> = term.split('*').map(str::trim).collect();
        if parts.iter().any(|p| p.is_empty()) {
            return Err(bad("empty factor"));
        }
        let mut coeff = F::one();
        let mut factors = Vec::new();
        for p in parts {
            if p.starts_with(|c: char| c.is_ascii_digit()) {
                let c = F::parse_scalar(p).ok_or_else(|| bad("bad scalar"))?;
                coeff *= c;
            } else {
                factors.push(p);
            }
        }
        if neg {
            coeff = -coeff;
        }
        if coeff.is_zero() {
            continue;
        }
        let value = eval(&factors)?;
        out.add_scaled(&value, &coeff);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Rat;

    fn basis(items: &[(&str, usize)]) -> Vec<BasisElement> {
        items
            .iter()
            .map(|(l, d)| BasisElement {
                label: l.to_string(),
                degree: *d,
            })
            .collect()
    }

    fn exterior2() -> Algebra<Rat> {
        let mut spec = AlgebraSpec::new("T2", basis(&[("1", 0), ("a", 1), ("b", 1), ("ab", 2)]), 0);
        spec.products.push(((1, 2), SparseVec::unit(3)));
        Algebra::new(spec).unwrap()
    }

    #[test]
    fn commutativity_fills_missing_products() {
        let t = exterior2();
        let ba = t.multiply(&SparseVec::unit(2), &SparseVec::unit(1)).unwrap();
        assert_eq!(ba, SparseVec::unit(3).neg());
    }

    #[test]
    fn sphere_square_is_zero() {
        let s2 = Algebra::<Rat>::new(AlgebraSpec::new("S2", basis(&[("1", 0), ("w", 2)]), 0)).unwrap();
        assert!(s2.multiply(&SparseVec::unit(1), &SparseVec::unit(1)).unwrap().is_zero());
    }

    #[test]
    fn associativity_violation_detected() {
        // a*b = c, b*a = c (even), but a*(b*b) != (a*b)*b with b*b = a... make c*b nonzero only one way
        let mut spec = AlgebraSpec::new(
            "bad",
            basis(&[("1", 0), ("a", 2), ("b", 2), ("c", 4), ("e", 6)]),
            0,
        );
        spec.products.push(((1, 2), SparseVec::unit(3)));
        spec.products.push(((3, 2), SparseVec::unit(4)));
        let err = Algebra::<Rat>::new(spec).unwrap_err();
        assert!(matches!(err, Error::AxiomViolation { ref axiom, .. } if axiom == "associativity"), "{err}");
    }

    #[test]
    fn degree_zero_must_be_one_dimensional() {
        let spec = AlgebraSpec::new("bad", basis(&[("1", 0), ("z", 0)]), 0);
        assert!(Algebra::<Rat>::new(spec).is_err());
    }

    #[test]
    fn leibniz_and_square_checked() {
        let mut spec = AlgebraSpec::new("bad", basis(&[("1", 0), ("x", 2), ("u", 3), ("v", 3)]), 0);
        // d u = x but degrees do not match: 3 -> 2
        spec.differential.push((2, SparseVec::unit(1)));
        assert!(Algebra::<Rat>::new(spec).is_err());
    }

    #[test]
    fn parse_and_format() {
        let t = exterior2();
        let e = t.parse_element("2*a - 1/2*b").unwrap();
        assert_eq!(t.format_element(&e), "2*a - 1/2*b");
        let p = t.parse_element("b*a").unwrap();
        assert_eq!(t.format_element(&p), "-ab");
        assert!(t.parse_element("q").is_err());
    }
}
