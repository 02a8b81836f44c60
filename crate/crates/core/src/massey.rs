//! Triple and matrix Massey products, the closed formula for `d2` on
//! `C(4, H)`, and the residual-class test for a nonzero `d2`.

use rand::Rng;
use serde::Serialize;

use crate::algebra::{format_combination, Algebra, CohomologyAlgebra, Element, Indecomposables};
use crate::bgcomplex::{BgBasisElement, BgComplex, BgKind};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::graphs::Graph;
use crate::linalg::{kernel_basis, Echelon, Matrix, Solver, SparseVec};

/// Element of `H (x) H`, indexed by `i * dim H + j`.
pub type Tensor<F> = SparseVec<F>;

/// Massey product data: the defining system, the cocycle it produces and
/// its class with indeterminacy.
#[derive(Clone, Debug)]
pub struct MasseyResult<F> {
    /// `d x_j = (L B)_j`.
    pub x: Vec<Element<F>>,
    /// `d y_i = (B C)_i`.
    pub y: Vec<Element<F>>,
    /// `sum_j x_j c_j - sum_i (-1)^{|a_i|} a_i y_i`.
    pub representative: Element<F>,
    pub degree: usize,
    /// Class in `H`.
    pub class: Element<F>,
    /// Spanning set of the indeterminacy in `H`.
    pub indeterminacy: Vec<Element<F>>,
    /// Image of the class in the indecomposables `Q(H)`.
    pub residual: Element<F>,
}

/// Cached coboundary solvers for a model together with its cohomology.
pub struct MasseyContext<'a, F> {
    h: &'a CohomologyAlgebra<F>,
    /// `solvers[k]` solves `d x = z` for `z` of degree `k`.
    solvers: Vec<Option<(Vec<usize>, Solver<F>)>>,
    q: Indecomposables<F>,
}

impl<'a, F: Field> MasseyContext<'a, F> {
    pub fn new(h: &'a CohomologyAlgebra<F>) -> Result<Self> {
        let model = h.model();
        let top = model.truncation().unwrap_or(model.max_degree());
        let mut solvers = vec![None];
        for k in 1..=top {
            let src = model.basis_in_degree(k - 1).to_vec();
            let cols = src.iter().map(|&i| model.d_basis(i)).collect::<Result<Vec<_>>>();
            // the differential out of the top degree may overflow the truncation
            solvers.push(cols.ok().map(|c| (src, Solver::new(&Matrix::from_columns(model.dim(), c)))));
        }
        Ok(MasseyContext {
            h,
            solvers,
            q: h.algebra().indecomposables(),
        })
    }

    pub fn cohomology(&self) -> &CohomologyAlgebra<F> {
        self.h
    }

    pub fn indecomposables(&self) -> &Indecomposables<F> {
        &self.q
    }

    fn model(&self) -> &Algebra<F> {
        self.h.model()
    }

    /// A cochain `x` of degree `k - 1` with `d x = z`.
    fn solve_d(&self, z: &Element<F>, k: usize) -> Result<Element<F>> {
        if z.is_zero() {
            return Ok(SparseVec::new());
        }
        let bound = self.solvers.len();
        let (src, solver) = self
            .solvers
            .get(k)
            .and_then(Option::as_ref)
            .ok_or(Error::Overflow { degree: k, bound })?;
        let x = solver
            .solve(z)
            .ok_or_else(|| Error::NotDefined(format!("{} is not a coboundary", self.model().format_element(z))))?;
        Ok(x.map_indices(|i| src[i]))
    }

    /// Cocycles of degree `k`, for perturbing a defining system.
    fn cocycles(&self, k: usize) -> Result<Vec<Element<F>>> {
        let model = self.model();
        let src = model.basis_in_degree(k);
        let cols = src.iter().map(|&i| model.d_basis(i)).collect::<Result<Vec<_>>>()?;
        let m = Matrix::from_columns(model.dim(), cols);
        Ok(kernel_basis(&m).into_iter().map(|v| v.map_indices(|i| src[i])).collect())
    }

    fn class_degree(&self, c: &Element<F>) -> Result<usize> {
        if c.is_zero() {
            return Err(Error::Precondition("Massey entries must be nonzero classes".into()));
        }
        self.h
            .algebra()
            .element_degree(c)
            .ok_or_else(|| Error::Precondition("Massey entries must be homogeneous".into()))
    }

    /// Class of a cocycle of degree `k`; zero above the computed range when
    /// the cohomology is known to vanish there.
    fn class_of(&self, z: &Element<F>, k: usize) -> Result<Element<F>> {
        if k > self.h.max_degree() {
            return match self.h.algebra().truncation() {
                None => Ok(SparseVec::new()),
                Some(t) => Err(Error::Overflow { degree: k, bound: t }),
            };
        }
        self.h
            .class_of(z)
            .ok_or_else(|| Error::axiom("Massey representative is a cocycle", self.model().format_element(z)))
    }

    /// `<L, B, C>` for a row `L`, an `r x s` matrix `B` and a column `C` of
    /// homogeneous classes.
    pub fn matrix_massey(&self, l: &[Element<F>], b: &[Vec<Element<F>>], c: &[Element<F>]) -> Result<MasseyResult<F>> {
        self.matrix_massey_perturbed(l, b, c, None::<&mut rand_chacha::ChaCha8Rng>)
    }

    /// As [`Self::matrix_massey`], adding random cocycles to the defining
    /// system when `rng` is given.
    pub fn matrix_massey_perturbed<R: Rng>(
        &self,
        l: &[Element<F>],
        b: &[Vec<Element<F>>],
        c: &[Element<F>],
        mut rng: Option<&mut R>,
    ) -> Result<MasseyResult<F>> {
        let (r, s) = (l.len(), c.len());
        if r == 0 || s == 0 || b.len() != r || b.iter().any(|row| row.len() != s) {
            return Err(Error::Precondition(format!("shapes: L 1x{r}, B {}x?, C {s}x1", b.len())));
        }
        let model = self.model();
        let ha = self.h.algebra();
        let dl = l.iter().map(|e| self.class_degree(e)).collect::<Result<Vec<_>>>()?;
        let dc = c.iter().map(|e| self.class_degree(e)).collect::<Result<Vec<_>>>()?;
        let db = b
            .iter()
            .map(|row| row.iter().map(|e| self.class_degree(e)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let degree = dl[0] + db[0][0] + dc[0] - 1;
        for i in 0..r {
            for j in 0..s {
                if dl[i] + db[i][j] + dc[j] - 1 != degree {
                    return Err(Error::Precondition("Massey entries have inconsistent degrees".into()));
                }
            }
        }
        let la: Vec<Element<F>> = l.iter().map(|e| self.h.lift(e)).collect();
        let ca: Vec<Element<F>> = c.iter().map(|e| self.h.lift(e)).collect();
        let ba: Vec<Vec<Element<F>>> = b.iter().map(|row| row.iter().map(|e| self.h.lift(e)).collect()).collect();
        let mut x = Vec::with_capacity(s);
        for j in 0..s {
            let mut lb = SparseVec::new();
            for i in 0..r {
                lb = lb.sum(&model.multiply(&la[i], &ba[i][j])?);
            }
            let k = dl[0] + db[0][j];
            let mut xj = self.solve_d(&lb, k)?;
            if let Some(rng) = rng.as_deref_mut() {
                perturb(&mut xj, &self.cocycles(k - 1)?, rng);
            }
            x.push(xj);
        }
        let mut y = Vec::with_capacity(r);
        for i in 0..r {
            let mut bc = SparseVec::new();
            for j in 0..s {
                bc = bc.sum(&model.multiply(&ba[i][j], &ca[j])?);
            }
            let k = db[i][0] + dc[0];
            let mut yi = self.solve_d(&bc, k)?;
            if let Some(rng) = rng.as_deref_mut() {
                perturb(&mut yi, &self.cocycles(k - 1)?, rng);
            }
            y.push(yi);
        }
        let mut rep = SparseVec::new();
        for j in 0..s {
            rep = rep.sum(&model.multiply(&x[j], &ca[j])?);
        }
        for i in 0..r {
            let t = model.multiply(&la[i], &y[i])?;
            rep.add_scaled(&t, &-F::sign(dl[i]));
        }
        if !model.d(&rep)?.is_zero() {
            return Err(Error::axiom("d(Massey representative) = 0", model.format_element(&rep)));
        }
        let class = self.class_of(&rep, degree)?;
        let mut indeterminacy = Echelon::new();
        let mut span = Vec::new();
        let mut push = |v: Element<F>| {
            if !v.is_zero() && indeterminacy.insert(v.clone()).is_some() {
                span.push(v);
            }
        };
        if degree <= self.h.max_degree() {
            for i in 0..r {
                for &g in ha.basis_in_degree(degree - dl[i]) {
                    push(ha.multiply(&l[i], &SparseVec::unit(g))?);
                }
            }
            for j in 0..s {
                for &g in ha.basis_in_degree(degree - dc[j]) {
                    push(ha.multiply(&SparseVec::unit(g), &c[j])?);
                }
            }
        }
        let residual = self.q.project(&class);
        Ok(MasseyResult {
            x,
            y,
            representative: rep,
            degree,
            class,
            indeterminacy: span,
            residual,
        })
    }

    /// `<a, b, c>`.
    pub fn triple(&self, a: &Element<F>, b: &Element<F>, c: &Element<F>) -> Result<MasseyResult<F>> {
        self.matrix_massey(std::slice::from_ref(a), &[vec![b.clone()]], std::slice::from_ref(c))
    }

    /// Whether `u - v` lies in the span of `indeterminacy`.
    pub fn equal_modulo(&self, u: &Element<F>, v: &Element<F>, indeterminacy: &[Element<F>]) -> bool {
        Echelon::from_vectors(indeterminacy).contains(&u.difference(v))
    }

    /// Closed formula for `d2([a (x) b (x) c (x) d])` on the two tags, as
    /// elements of `H (x) H+`.
    pub fn d2_star(&self, quad: [&Element<F>; 4]) -> Result<E2TwoElement<F>> {
        let ha = self.h.algebra();
        let [a, b, c, d] = quad;
        let degs = quad.iter().map(|e| self.class_degree(e)).collect::<Result<Vec<_>>>()?;
        for i in 0..4 {
            for j in i + 1..4 {
                if !ha.multiply(quad[i], quad[j])?.is_zero() {
                    return Err(Error::Precondition(format!("product of entries {} and {} is nonzero", i + 1, j + 1)));
                }
            }
        }
        let (da, db, dc, dd) = (degs[0], degs[1], degs[2], degs[3]);
        let m = |x: &Element<F>, y: &Element<F>, z: &Element<F>| -> Result<Element<F>> { Ok(self.triple(x, y, z)?.class) };
        let dim = ha.dim();
        let mut e23e34 = SparseVec::new();
        add_tensor(&mut e23e34, dim, a, &m(b, c, d)?, F::sign(da));
        add_tensor(&mut e23e34, dim, &m(a, b, c)?, d, F::one());
        add_tensor(&mut e23e34, dim, &m(b, a, d)?, c, F::sign(dc * da * db));
        add_tensor(&mut e23e34, dim, &m(a, d, c)?, b, -F::sign(db * dc + db * dd + dc * dd));
        let mut e23e24 = SparseVec::new();
        add_tensor(&mut e23e24, dim, a, &m(c, b, d)?, F::sign(da + db * dc));
        add_tensor(&mut e23e24, dim, &m(a, c, b)?, d, F::sign(db * dc));
        add_tensor(&mut e23e24, dim, &m(c, a, d)?, b, F::sign(db * dc + db * dd + da * dc));
        add_tensor(&mut e23e24, dim, &m(a, d, b)?, c, -F::sign(db * dd + dd * dc));
        Ok(E2TwoElement { e23e34, e23e24 })
    }

    /// `d2_star` extended linearly over a sum of quadruples.
    pub fn d2_star_sum(&self, terms: &[(F, [Element<F>; 4])]) -> Result<E2TwoElement<F>> {
        let mut out = E2TwoElement {
            e23e34: SparseVec::new(),
            e23e24: SparseVec::new(),
        };
        for (c, q) in terms {
            let v = self.d2_star([&q[0], &q[1], &q[2], &q[3]])?;
            out.e23e34.add_scaled(&v.e23e34, c);
            out.e23e24.add_scaled(&v.e23e24, c);
        }
        Ok(out)
    }

    /// Image of each tag under `H (x) H+ -> (k (x) Q) + (Q (x) Q)` followed
    /// by `psi = 1 + tau`, `tau(a (x) b) = -(-1)^{|a||b|} b (x) a`.
    pub fn obstruction_residual(&self, v: &E2TwoElement<F>) -> ObstructionResidual<F> {
        let e23e34 = self.residual(&v.e23e34);
        let e23e24 = self.residual(&v.e23e24);
        let nonzero = !(e23e34.is_zero() && e23e24.is_zero());
        ObstructionResidual { e23e34, e23e24, nonzero }
    }

    fn residual(&self, t: &Tensor<F>) -> Residual<F> {
        let ha = self.h.algebra();
        let dim = ha.dim();
        let dq = self.q.dim();
        let mut unit_part = SparseVec::new();
        let mut pairs = SparseVec::new();
        for (idx, c) in t.iter() {
            let (i, j) = (idx / dim, idx % dim);
            if j == ha.unit() {
                continue;
            }
            let qj = self.q.project(&SparseVec::unit(j));
            if i == ha.unit() {
                unit_part.add_scaled(&qj, c);
                continue;
            }
            let qi = self.q.project(&SparseVec::unit(i));
            for (u, cu) in qi.iter() {
                for (w, cw) in qj.iter() {
                    pairs.add_at(u * dq + w, c.clone() * cu.clone() * cw.clone());
                }
            }
        }
        let mut psi = SparseVec::new();
        for (idx, c) in pairs.iter() {
            let (u, w) = (idx / dq, idx % dq);
            psi.add_at(idx, c.clone());
            let s = -F::sign(self.q.degree(u) * self.q.degree(w));
            psi.add_at(w * dq + u, s * c.clone());
        }
        Residual {
            unit_part,
            pair_part: psi,
        }
    }

    /// Quadruples of indecomposable basis classes with vanishing pairwise
    /// products whose `d2` has a nonzero residual. With `first`, only
    /// quadruples starting with that basis class are searched.
    pub fn noncollapse_witnesses(&self, first: Option<usize>) -> Result<Vec<Witness<F>>> {
        let reps: Vec<usize> = self.q.representatives().to_vec();
        let ha = self.h.algebra();
        let zero = |i: usize, j: usize| ha.product_basis(i, j).map(|p| p.is_zero()).unwrap_or(false);
        let mut out = Vec::new();
        let firsts: Vec<usize> = match first {
            Some(f) => vec![f],
            None => reps.clone(),
        };
        for &a in &firsts {
            for &b in &reps {
                if !zero(a, b) {
                    continue;
                }
                for &c in &reps {
                    if !zero(a, c) || !zero(b, c) {
                        continue;
                    }
                    for &d in &reps {
                        if !zero(a, d) || !zero(b, d) || !zero(c, d) {
                            continue;
                        }
                        let q = [a, b, c, d].map(SparseVec::unit);
                        let v = match self.d2_star([&q[0], &q[1], &q[2], &q[3]]) {
                            Ok(v) => v,
                            Err(Error::NotDefined(_) | Error::Overflow { .. }) => continue,
                            Err(e) => return Err(e),
                        };
                        let residual = self.obstruction_residual(&v);
                        if residual.nonzero {
                            out.push(Witness {
                                quadruple: [a, b, c, d],
                                value: v,
                                residual,
                            });
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn format_tensor(&self, t: &Tensor<F>) -> String {
        let ha = self.h.algebra();
        let dim = ha.dim();
        format_combination(t, |idx| format!("{}⊗{}", bracket(ha.label(idx / dim)), bracket(ha.label(idx % dim))))
    }

    pub fn format_residual(&self, r: &Residual<F>) -> String {
        let ha = self.h.algebra();
        let reps = self.q.representatives();
        let dq = self.q.dim();
        format!(
            "k⊗Q: {}; (Q⊗Q): {}",
            format_combination(&r.unit_part, |u| format!("1⊗{}", bracket(ha.label(reps[u])))),
            format_combination(&r.pair_part, |idx| format!(
                "{}⊗{}",
                bracket(ha.label(reps[idx / dq])),
                bracket(ha.label(reps[idx % dq]))
            ))
        )
    }
}

fn bracket(label: &str) -> String {
    if label.starts_with('[') {
        label.to_string()
    } else {
        format!("[{label}]")
    }
}

fn add_tensor<F: Field>(out: &mut Tensor<F>, dim: usize, u: &Element<F>, v: &Element<F>, c: F) {
    for (i, x) in u.iter() {
        for (j, y) in v.iter() {
            out.add_at(i * dim + j, c.clone() * x.clone() * y.clone());
        }
    }
}

fn perturb<F: Field, R: Rng>(x: &mut Element<F>, kernel: &[Element<F>], rng: &mut R) {
    for k in kernel {
        let c = F::from_i64(rng.gen_range(-3..=3));
        x.add_scaled(k, &c);
    }
}

/// The two tagged components of a `d2` value in `E2^{2,*}` of `C(4, H)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct E2TwoElement<F> {
    pub e23e34: Tensor<F>,
    pub e23e24: Tensor<F>,
}

/// Residual of one tag: the `k (x) Q` part and the `psi`-image in `Q (x) Q`
/// (indexed `u * dim Q + w`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Residual<F> {
    pub unit_part: SparseVec<F>,
    pub pair_part: SparseVec<F>,
}

impl<F: Field> Residual<F> {
    pub fn is_zero(&self) -> bool {
        self.unit_part.is_zero() && self.pair_part.is_zero()
    }

    pub fn scaled(&self, c: &F) -> Self {
        Residual {
            unit_part: self.unit_part.scaled(c),
            pair_part: self.pair_part.scaled(c),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObstructionResidual<F> {
    pub e23e34: Residual<F>,
    pub e23e24: Residual<F>,
    /// Nonzero in `E2^{2,*}`.
    pub nonzero: bool,
}

impl<F: Field> ObstructionResidual<F> {
    /// `s` in `{1, -1}` with `self = s * other` on both tags.
    pub fn sign_relative_to(&self, other: &Self) -> Option<i8> {
        for (s, c) in [(1i8, F::one()), (-1, -F::one())] {
            if self.e23e34 == other.e23e34.scaled(&c) && self.e23e24 == other.e23e24.scaled(&c) {
                return Some(s);
            }
        }
        None
    }
}

#[derive(Clone, Debug)]
pub struct Witness<F> {
    /// Basis indices of the cohomology.
    pub quadruple: [usize; 4],
    pub value: E2TwoElement<F>,
    pub residual: ObstructionResidual<F>,
}

/// Summary of the `d2` comparison, with tensors printed.
#[derive(Clone, Debug, Serialize)]
pub struct D2Summary {
    pub e23e34: String,
    pub e23e24: String,
    pub residual_e23e34: String,
    pub residual_e23e24: String,
    pub nonzero: bool,
}

impl<F: Field> MasseyContext<'_, F> {
    pub fn summarize(&self, v: &E2TwoElement<F>) -> D2Summary {
        let r = self.obstruction_residual(v);
        D2Summary {
            e23e34: self.format_tensor(&v.e23e34),
            e23e24: self.format_tensor(&v.e23e24),
            residual_e23e34: self.format_residual(&r.e23e34),
            residual_e23e24: self.format_residual(&r.e23e24),
            nonzero: r.nonzero,
        }
    }
}

/// `d2` of `[a (x) b (x) c (x) d]` computed on the chain level of
/// `C(4, model)`: `v = a (x) b (x) c (x) d`, solve `d'' w = -d' v`, and read
/// off `d' w` on the two graphs with two edges, mapped to `H (x) H` by a
/// retraction of the model onto its cohomology.
pub fn zigzag_d2<F: Field>(c: &BgComplex<F>, h: &CohomologyAlgebra<F>, quad: [&Element<F>; 4]) -> Result<E2TwoElement<F>> {
    if c.n() != 4 || c.kind() != BgKind::Small {
        return Err(Error::Precondition("zig-zag d2 needs C(4, A)".into()));
    }
    let model = c.algebra();
    let lifts: Vec<Element<F>> = quad.iter().map(|e| h.lift(e)).collect();
    let q: usize = lifts
        .iter()
        .map(|z| model.element_degree(z).ok_or_else(|| Error::Precondition("inhomogeneous entry".into())))
        .sum::<Result<usize>>()?;
    let discrete = c
        .graph_index(&Graph::discrete(4))
        .ok_or_else(|| Error::Precondition("no discrete graph".into()))?;
    let mut terms: Vec<(Vec<usize>, F)> = vec![(Vec::new(), F::one())];
    for z in &lifts {
        let mut next = Vec::new();
        for (f, x) in &terms {
            for (i, y) in z.iter() {
                let mut g = f.clone();
                g.push(i);
                next.push((g, x.clone() * y.clone()));
            }
        }
        terms = next;
    }
    let mut v = SparseVec::new();
    for (factors, x) in terms {
        let e = BgBasisElement { graph: discrete, factors };
        let idx = c
            .index_of(&e)
            .ok_or_else(|| Error::Overflow { degree: q, bound: c.bicomplex().qmax() })?;
        v.add_at(idx, x);
    }
    let b = c.bicomplex();
    let dv = b.horizontal(0, q).apply(&v);
    let vert = b
        .vertical(1, q - 1)
        .ok_or_else(|| Error::NotDefined(format!("vertical map at (1,{}) is outside the computed range", q - 1)))?;
    let w = Solver::new(&vert)
        .solve(&dv.neg())
        .ok_or_else(|| Error::NotDefined("the element does not survive to E2".into()))?;
    let out = b.horizontal(1, q - 1).apply(&w);
    let r = h.retraction_matrix()?;
    let dim = h.algebra().dim();
    let mut e23e34 = SparseVec::new();
    let mut e23e24 = SparseVec::new();
    for (i, x) in out.iter() {
        let e = &c.basis(2, q - 1)[i];
        let target = match c.graphs()[e.graph].edges() {
            [(2, 3), (3, 4)] => &mut e23e34,
            [(2, 3), (2, 4)] => &mut e23e24,
            other => return Err(Error::axiom("two-edge graphs of C(4) are e23e24, e23e34", format!("{other:?}"))),
        };
        add_tensor(target, dim, r.column(e.factors[0]), &r.column(e.factors[1]).scaled(x), F::one());
    }
    Ok(E2TwoElement { e23e34, e23e24 })
}
