use std::collections::BTreeMap;


use super::{parse_expression, Algebra, AlgebraSpec, BasisElement, Element};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::SparseVec;

/// A polynomial in the generators: list of `(coefficient, generator indices
/// in multiplication order)`.
pub type Polynomial<F> = Vec<(F, Vec<usize>)>;

/// A free graded-commutative algebra on finitely many generators, exterior
/// on odd ones and polynomial on even ones, expanded into the monomial basis
/// of all degrees up to a bound.
#[derive(Clone, Debug)]
pub struct TruncatedFreeCdga<F> {
    generators: Vec<(String, usize)>,
    bound: usize,
    exponents: Vec<Vec<u32>>,
    index: BTreeMap<Vec<u32>, usize>,
    algebra: Algebra<F>,
}

fn monomial_label(generators: &[(String, usize)], exps: &[u32]) -> String {
    let parts: Vec<String> = exps
        .iter()
        .enumerate()
        .filter(|(_, &e)| e > 0)
        .map(|(g, &e)| {
            if e == 1 {
                generators[g].0.clone()
            } else {
                format!("{}^{}", generators[g].0, e)
            }
        })
        .collect();
    if parts.is_empty() {
        "1".to_string()
    } else {
        parts.join("")
    }
}

fn enumerate_monomials(degrees: &[usize], bound: usize) -> Vec<Vec<u32>> {
    fn rec(g: usize, degrees: &[usize], left: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if g == degrees.len() {
            out.push(cur.clone());
            return;
        }
        let d = degrees[g];
        let max_e = if d % 2 == 1 { 1 } else { left / d };
        for e in 0..=max_e as u32 {
            let used = e as usize * d;
            if used > left {
                break;
            }
            cur.push(e);
            rec(g + 1, degrees, left - used, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, degrees, bound, &mut Vec::new(), &mut out);
    let deg = |m: &Vec<u32>| m.iter().zip(degrees).map(|(&e, &d)| e as usize * d).sum::<usize>();
    // by degree, then with earlier generators carrying larger exponents first
    out.sort_by(|a, b| deg(a).cmp(&deg(b)).then_with(|| b.cmp(a)));
    out
}

impl<F: Field> TruncatedFreeCdga<F> {
    /// Expands the free algebra on `generators` up to degree `bound` and
    /// extends `d` from the generators by the Leibniz rule.
    pub fn new(
        name: impl Into<String>,
        generators: Vec<(String, usize)>,
        d_on_generators: Vec<Polynomial<F>>,
        bound: usize,
    ) -> Result<Self> {
        if generators.iter().any(|(_, d)| *d == 0) {
            return Err(Error::Precondition("generators must have positive degree".into()));
        }
        if let Some((l, d)) = generators.iter().find(|(_, d)| *d > bound) {
            return Err(Error::Precondition(format!("generator {l} of degree {d} exceeds bound {bound}")));
        }
        if d_on_generators.len() != generators.len() {
            return Err(Error::Precondition("one differential per generator".into()));
        }
        let degrees: Vec<usize> = generators.iter().map(|g| g.1).collect();
        let exponents = enumerate_monomials(&degrees, bound);
        let index: BTreeMap<Vec<u32>, usize> =
            exponents.iter().enumerate().map(|(i, e)| (e.clone(), i)).collect();
        let mdeg = |m: &[u32]| m.iter().zip(&degrees).map(|(&e, &d)| e as usize * d).sum::<usize>();

        // product of monomials with Koszul sign
        let mono_product = |a: &[u32], b: &[u32]| -> Option<(Vec<u32>, bool)> {
            let mut odd_swaps = 0usize;
            let mut res = Vec::with_capacity(a.len());
            for g in 0..a.len() {
                let e = a[g] + b[g];
                if degrees[g] % 2 == 1 && e > 1 {
                    return None;
                }
                res.push(e);
                if degrees[g] % 2 == 1 && b[g] == 1 {
                    odd_swaps += (g + 1..a.len()).filter(|&h| degrees[h] % 2 == 1 && a[h] == 1).count();
                }
            }
            Some((res, odd_swaps % 2 == 1))
        };

        let basis: Vec<BasisElement> = exponents
            .iter()
            .map(|e| BasisElement {
                label: monomial_label(&generators, e),
                degree: mdeg(e),
            })
            .collect();
        let unit = index[&vec![0; generators.len()]];
        let mut spec = AlgebraSpec::new(name, basis, unit);
        spec.truncation = Some(bound);
        for (i, a) in exponents.iter().enumerate() {
            for (j, b) in exponents.iter().enumerate() {
                if mdeg(a) + mdeg(b) > bound {
                    continue;
                }
                if let Some((m, neg)) = mono_product(a, b) {
                    let c = if neg { -F::one() } else { F::one() };
                    spec.products.push(((i, j), SparseVec::from_pairs([(index[&m], c)])));
                }
            }
        }
        let product_only = Algebra::assemble(spec.clone())?;

        // differential on generators, then on monomials m = g * m'
        let gen_mono = |g: usize| {
            let mut e = vec![0u32; generators.len()];
            e[g] = 1;
            index[&e]
        };
        let mut d_gen = Vec::with_capacity(generators.len());
        for (g, poly) in d_on_generators.iter().enumerate() {
            let mut acc = SparseVec::new();
            for (c, factors) in poly {
                let elems: Vec<Element<F>> = factors.iter().map(|&f| SparseVec::unit(gen_mono(f))).collect();
                acc.add_scaled(&product_only.multiply_all(&elems)?, c);
            }
            if let Some(k) = acc.indices().find(|&k| product_only.degree(k) != degrees[g] + 1) {
                return Err(Error::axiom(
                    "differential raises degree by 1",
                    format!("d {} has term {}", generators[g].0, product_only.label(k)),
                ));
            }
            d_gen.push(acc);
        }
        let mut d_mono: Vec<Option<Element<F>>> = vec![None; exponents.len()];
        for (i, e) in exponents.iter().enumerate() {
            let deg = mdeg(e);
            if deg + 1 > bound {
                continue;
            }
            let Some(g) = e.iter().position(|&x| x > 0) else {
                d_mono[i] = Some(SparseVec::new());
                continue;
            };
            let mut rest = e.clone();
            rest[g] -= 1;
            let rest_i = index[&rest];
            let d_rest = d_mono[rest_i].clone().expect("lower degree computed first");
            // d(g m') = d(g) m' + (-1)^{|g|} g d(m')
            let mut v = product_only.multiply(&d_gen[g], &SparseVec::unit(rest_i))?;
            let tail = product_only.multiply(&SparseVec::unit(gen_mono(g)), &d_rest)?;
            v.add_scaled(&tail, &F::sign(degrees[g]));
            d_mono[i] = Some(v);
        }
        spec.differential = d_mono
            .into_iter()
            .enumerate()
            .filter_map(|(i, d)| d.filter(|d| !d.is_zero()).map(|d| (i, d)))
            .collect();
        let algebra = Algebra::new(spec)?;
        Ok(TruncatedFreeCdga {
            generators,
            bound,
            exponents,
            index,
            algebra,
        })
    }

    /// Builds from string differentials such as `("u", "x*x")`.
    pub fn from_strings(name: &str, generators: &[(&str, usize)], differentials: &[(&str, &str)], bound: usize) -> Result<Self> {
        let gens: Vec<(String, usize)> = generators.iter().map(|(l, d)| (l.to_string(), *d)).collect();
        let mut polys: Vec<Polynomial<F>> = vec![Vec::new(); gens.len()];
        for (g, expr) in differentials {
            let gi = gens
                .iter()
                .position(|(l, _)| l == g)
                .ok_or_else(|| Error::UnknownLabel(g.to_string()))?;
            polys[gi] = parse_polynomial(expr, &gens)?;
        }
        Self::new(name, gens, polys, bound)
    }

    pub fn generators(&self) -> &[(String, usize)] {
        &self.generators
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn algebra(&self) -> &Algebra<F> {
        &self.algebra
    }

    pub fn into_algebra(self) -> Algebra<F> {
        self.algebra
    }

    pub fn monomial_index(&self, exponents: &[u32]) -> Option<usize> {
        self.index.get(exponents).copied()
    }

    pub fn exponents(&self, i: usize) -> &[u32] {
        &self.exponents[i]
    }

    /// `d` of each generator as a polynomial in the generators, e.g. to
    /// re-expand the model with another bound.
    pub fn generator_polynomials(&self) -> Vec<Polynomial<F>> {
        self.generator_differentials()
            .iter()
            .map(|d| {
                d.iter()
                    .map(|(i, c)| {
                        let factors = self.exponents[i]
                            .iter()
                            .enumerate()
                            .flat_map(|(g, &e)| std::iter::repeat_n(g, e as usize))
                            .collect();
                        (c.clone(), factors)
                    })
                    .collect()
            })
            .collect()
    }

    /// Polynomial giving `d` of each generator, read back from the expansion.
    pub fn generator_differentials(&self) -> Vec<Element<F>> {
        (0..self.generators.len())
            .map(|g| {
                let mut e = vec![0u32; self.generators.len()];
                e[g] = 1;
                self.algebra.d_basis(self.index[&e]).unwrap_or_default()
            })
            .collect()
    }
}

/// Parses a polynomial in generator labels, e.g. `x*y - 2*u*t`.
pub fn parse_polynomial<F: Field>(expr: &str, generators: &[(String, usize)]) -> Result<Polynomial<F>> {
    let mut out: Polynomial<F> = Vec::new();
    // parse_expression evaluates each term through the callback; record the
    // factor lists by encoding each term as its own basis index
    let mut terms: Vec<Vec<usize>> = Vec::new();
    let encoded = parse_expression::<F>(expr, |factors| {
        let idx = factors
            .iter()
            .map(|f| {
                generators
                    .iter()
                    .position(|(l, _)| l == f)
                    .ok_or_else(|| Error::UnknownLabel(f.to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        terms.push(idx);
        Ok(SparseVec::unit(terms.len() - 1))
    })?;
    for (i, factors) in terms.into_iter().enumerate() {
        let c = encoded.get(i);
        if !c.is_zero() {
            out.push((c, factors));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Rat;

    #[test]
    fn re_expansion_with_another_bound() {
        let c = crate::algebra::stb_model::<Rat>(8).unwrap();
        let wider = TruncatedFreeCdga::new("stb", c.generators().to_vec(), c.generator_polynomials(), 12).unwrap();
        assert_eq!(wider.algebra().basis(), crate::algebra::stb_model::<Rat>(12).unwrap().algebra().basis());
        assert_eq!(wider.generator_differentials(), crate::algebra::stb_model::<Rat>(12).unwrap().generator_differentials());
    }

    #[test]
    fn single_odd_generator() {
        let c = TruncatedFreeCdga::<Rat>::from_strings("e", &[("e", 3)], &[], 5).unwrap();
        let labels: Vec<_> = c.algebra().basis().iter().map(|b| b.label.as_str()).collect();
        assert_eq!(labels, ["1", "e"]);
    }

    #[test]
    fn single_even_generator() {
        let c = TruncatedFreeCdga::<Rat>::from_strings("x", &[("x", 2)], &[], 5).unwrap();
        let labels: Vec<_> = c.algebra().basis().iter().map(|b| b.label.as_str()).collect();
        assert_eq!(labels, ["1", "x", "x^2"]);
    }

    #[test]
    fn overflow_is_an_error() {
        let c = TruncatedFreeCdga::<Rat>::from_strings("x", &[("x", 2)], &[], 5).unwrap();
        let a = c.algebra();
        let x2 = SparseVec::unit(a.index_of("x^2").unwrap());
        let x = SparseVec::unit(a.index_of("x").unwrap());
        assert!(matches!(a.multiply(&x2, &x), Err(Error::Overflow { degree: 6, bound: 5 })));
    }

    #[test]
    fn five_generator_model_degree_five_slice() {
        let c = TruncatedFreeCdga::<Rat>::from_strings(
            "stb",
            &[("x", 2), ("y", 2), ("u", 3), ("v", 3), ("t", 3)],
            &[("u", "x*x"), ("v", "y*y"), ("t", "x*y")],
            8,
        )
        .unwrap();
        let a = c.algebra();
        // deg 5: ux, uy, vx, vy, tx, ty
        assert_eq!(a.basis_in_degree(5).len(), 6);
        assert_eq!(a.basis_in_degree(3).len(), 3);
        // d(t x) = x^2 y via Leibniz
        let tx = a.parse_element("t*x").unwrap();
        assert_eq!(a.d(&tx).unwrap(), a.parse_element("x*x*y").unwrap());
        // d(u v) = x^2 v - u y^2
        let uv = a.parse_element("u*v").unwrap();
        assert_eq!(a.d(&uv).unwrap(), a.parse_element("x*x*v - u*y*y").unwrap());
    }

    #[test]
    fn odd_generators_anticommute() {
        let c = TruncatedFreeCdga::<Rat>::from_strings("uv", &[("u", 3), ("v", 3)], &[], 6).unwrap();
        let a = c.algebra();
        let uv = a.parse_element("u*v").unwrap();
        let vu = a.parse_element("v*u").unwrap();
        assert_eq!(uv, vu.neg());
        assert!(a.parse_element("u*u").unwrap().is_zero());
    }
}
