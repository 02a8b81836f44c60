use super::{Algebra, AlgebraSpec, BasisElement, Element, TruncatedFreeCdga};
use crate::error::{Error, Result};

use crate::field::Field;
use crate::linalg::SparseVec;

/// Default truncation bound of the sphere-tangent-bundle model.
pub const STB_DEFAULT_BOUND: usize = 12;

#[derive(Clone, Debug)]
pub enum CatalogEntry<F> {
    Algebra(Algebra<F>),
    Free(TruncatedFreeCdga<F>),
}

impl<F: Field> CatalogEntry<F> {
    /// The underlying algebra (the expanded model for free entries).
    pub fn into_algebra(self) -> Result<Algebra<F>> {
        Ok(match self {
            CatalogEntry::Algebra(a) => a,
            CatalogEntry::Free(c) => c.into_algebra(),
        })
    }

    pub fn algebra(&self) -> &Algebra<F> {
        match self {
            CatalogEntry::Algebra(a) => a,
            CatalogEntry::Free(c) => c.algebra(),
        }
    }
}

fn be(label: &str, degree: usize) -> BasisElement {
    BasisElement {
        label: label.to_string(),
        degree,
    }
}

pub fn point<F: Field>() -> Algebra<F> {
    let mut spec = AlgebraSpec::new("point", vec![be("1", 0)], 0);
    spec.top = Some(0);
    Algebra::new(spec).expect("point")
}

pub fn sphere<F: Field>(m: usize) -> Result<Algebra<F>> {
    if m == 0 {
        return Err(Error::Precondition("sphere dimension must be positive".into()));
    }
    let mut spec = AlgebraSpec::new(format!("S{m}"), vec![be("1", 0), be("w", m)], 0);
    spec.top = Some(1);
    Algebra::new(spec)
}

/// Exterior algebra on `k` generators of degree 1: cohomology of the torus `T^k`.
pub fn torus<F: Field>(k: usize) -> Result<Algebra<F>> {
    if k == 0 || k > 6 {
        return Err(Error::Precondition("torus rank must lie in 1..=6".into()));
    }
    let names: Vec<char> = "abcdef".chars().collect();
    let mut subsets: Vec<u32> = (0..(1u32 << k)).collect();
    subsets.sort_by_key(|s| (s.count_ones(), s.reverse_bits()));
    let label = |s: u32| -> String {
        if s == 0 {
            "1".into()
        } else {
            (0..k).filter(|i| s >> i & 1 == 1).map(|i| names[i]).collect()
        }
    };
    let basis: Vec<BasisElement> = subsets.iter().map(|&s| be(&label(s), s.count_ones() as usize)).collect();
    let pos = |s: u32| subsets.iter().position(|&t| t == s).unwrap();
    let mut spec = AlgebraSpec::new(format!("T{k}"), basis, 0);
    for &a in &subsets {
        for &b in &subsets {
            if a & b != 0 {
                continue;
            }
            // sign of merging: pairs (i in a, j in b) with i > j
            let inversions: u32 = (0..k).filter(|i| a >> i & 1 == 1).map(|i| (b & ((1u32 << i) - 1)).count_ones()).sum();
            spec.products.push(((pos(a), pos(b)), SparseVec::from_pairs([(pos(a | b), F::sign(inversions as usize))])));
        }
    }
    spec.top = Some(pos((1u32 << k) - 1));
    Algebra::new(spec)
}

pub fn cp2<F: Field>() -> Algebra<F> {
    let mut spec = AlgebraSpec::new("CP2", vec![be("1", 0), be("h", 2), be("h^2", 4)], 0);
    spec.products.push(((1, 1), SparseVec::unit(2)));
    spec.top = Some(2);
    Algebra::new(spec).expect("cp2")
}

pub fn s2xs2<F: Field>() -> Algebra<F> {
    let mut spec = AlgebraSpec::new("S2xS2", vec![be("1", 0), be("a", 2), be("b", 2), be("ab", 4)], 0);
    spec.products.push(((1, 2), SparseVec::unit(3)));
    spec.top = Some(3);
    Algebra::new(spec).expect("s2xs2")
}

/// Sullivan model of the unit sphere tangent bundle of `S^2 x S^2`:
/// `x, y` in degree 2, `u, v, t` in degree 3, `du = x^2`, `dv = y^2`, `dt = xy`.
pub fn stb_s2xs2<F: Field>(bound: usize) -> Result<TruncatedFreeCdga<F>> {
    TruncatedFreeCdga::from_strings(
        "stb_s2xs2",
        &[("x", 2), ("y", 2), ("u", 3), ("v", 3), ("t", 3)],
        &[("u", "x*x"), ("v", "y*y"), ("t", "x*y")],
        bound,
    )
}

/// Model of `M # (S^2 x S^{m-2})` from a model of `M` with top class in degree `m`.
pub fn connected_sum_model<F: Field>(a: &Algebra<F>, m: usize) -> Result<Algebra<F>> {
    let omega = a.top().ok_or(Error::NoTopClass)?;
    if a.degree(omega) != m {
        return Err(Error::Precondition(format!("top class has degree {}, not {m}", a.degree(omega))));
    }
    connected_sum_with_cocycle(a, &SparseVec::unit(omega), m)
}

/// Fibre product `A x_k (x, y)/(x^2, y^2)` with `|x| = 2`, `|y| = m - 2`,
/// divided by the ideal generated by `omega - xy`. `omega` is a cocycle of
/// degree `m` representing the fundamental class.
pub fn connected_sum_with_cocycle<F: Field>(a: &Algebra<F>, omega: &Element<F>, m: usize) -> Result<Algebra<F>> {
    if m < 5 {
        return Err(Error::Precondition(format!("connected sum with S2 x S{} needs m >= 5", m as i64 - 2)));
    }
    if a.element_degree(omega) != Some(m) || !a.d(omega)?.is_zero() {
        return Err(Error::Precondition("omega must be a degree-m cocycle".into()));
    }
    let (xl, yl, xyl) = fresh_labels(a);
    // basis order: xy first so it is the one eliminated, then A, then x, y
    let na = a.dim();
    // xy comes first so that it is the element eliminated by the quotient;
    // the rest is ordered by degree
    let mut order: Vec<(usize, usize)> = (0..na).map(|i| (a.degree(i), i)).collect();
    order.push((2, na));
    order.push((m - 2, na + 1));
    order.sort();
    let mut position = vec![0; na + 2];
    for (p, &(_, i)) in order.iter().enumerate() {
        position[i] = p + 1;
    }
    let xy = 0;
    let shift = |i: usize| position[i];
    let (x, y) = (position[na], position[na + 1]);
    let mut basis = vec![be(&xyl, m)];
    for &(d, i) in &order {
        basis.push(if i < na {
            a.basis()[i].clone()
        } else if i == na {
            be(&xl, d)
        } else {
            be(&yl, d)
        });
    }
    let mut spec = AlgebraSpec::new(format!("{}#S2xS{}", a.name(), m - 2), basis, shift(a.unit()));
    spec.truncation = a.truncation();
    for i in 0..na {
        for j in 0..na {
            if !a.in_range(a.degree(i) + a.degree(j)) {
                continue;
            }
            let p = a.product_basis_ref(i, j);
            if !p.is_zero() {
                spec.products.push(((shift(i), shift(j)), p.map_indices(shift)));
            }
        }
        if a.has_differential() && a.in_range(a.degree(i) + 1) {
            let d = a.d_basis(i)?;
            if !d.is_zero() {
                spec.differential.push((shift(i), d.map_indices(shift)));
            }
        }
    }
    spec.products.push(((x, y), SparseVec::unit(xy)));
    spec.top = a.top().map(shift);
    let fibre = Algebra::new(spec)?;

    let mut ideal = vec![{
        let mut g = omega.map_indices(shift);
        g.add_at(xy, -F::one());
        g
    }];
    for i in a.positive_basis() {
        if a.in_range(m + a.degree(i)) {
            let p = a.multiply(omega, &SparseVec::unit(i))?;
            if !p.is_zero() {
                ideal.push(p.map_indices(shift));
            }
        }
    }
    fibre.quotient_by_ideal(&ideal, format!("{}#S2xS{}", a.name(), m - 2))
}

fn fresh_labels<F: Field>(a: &Algebra<F>) -> (String, String, String) {
    let mut k = 0;
    loop {
        let suffix = if k == 0 { String::new() } else { k.to_string() };
        let (x, y) = (format!("s{suffix}"), format!("r{suffix}"));
        let xy = format!("{x}{y}");
        if a.index_of(&x).is_none() && a.index_of(&y).is_none() && a.index_of(&xy).is_none() {
            return (x, y, xy);
        }
        k += 1;
    }
}

/// Looks up a catalog entry by name.
///
/// Names: `point`, `s<m>` (sphere), `t<k>` (torus), `cp2`, `s2xs2`,
/// `stb_s2xs2` or `stb_s2xs2:<bound>`, and `s<m>#s2xs<m-2>` connected sums.
pub fn catalog<F: Field>(name: &str) -> Result<CatalogEntry<F>> {
    let unknown = || Error::UnknownCatalog(name.to_string());
    let lower = name.trim().to_ascii_lowercase();
    if let Some((base, _other)) = lower.split_once('#') {
        let a = catalog::<F>(base)?.into_algebra()?;
        let top = a.top().ok_or(Error::NoTopClass)?;
        let m = a.degree(top);
        let expected = format!("s2xs{}", m.saturating_sub(2));
        if _other != expected {
            return Err(unknown());
        }
        return Ok(CatalogEntry::Algebra(connected_sum_model(&a, m)?));
    }
    match lower.as_str() {
        "point" | "pt" | "k" => return Ok(CatalogEntry::Algebra(point())),
        "cp2" => return Ok(CatalogEntry::Algebra(cp2())),
        "s2xs2" => return Ok(CatalogEntry::Algebra(s2xs2())),
        "stb_s2xs2" => return Ok(CatalogEntry::Free(stb_s2xs2(STB_DEFAULT_BOUND)?)),
        _ => {}
    }
    if let Some(b) = lower.strip_prefix("stb_s2xs2:") {
        let bound = b.parse().map_err(|_| unknown())?;
        return Ok(CatalogEntry::Free(stb_s2xs2(bound)?));
    }
    if let Some(rest) = lower.strip_prefix("sphere") {
        let m = rest.trim_matches(|c| c == '(' || c == ')').parse().map_err(|_| unknown())?;
        return Ok(CatalogEntry::Algebra(sphere(m)?));
    }
    if let Some(m) = lower.strip_prefix('s').and_then(|r| r.parse::<usize>().ok()) {
        return Ok(CatalogEntry::Algebra(sphere(m)?));
    }
    if let Some(k) = lower.strip_prefix('t').and_then(|r| r.parse::<usize>().ok()) {
        return Ok(CatalogEntry::Algebra(torus(k)?));
    }
    Err(unknown())
}

/// Names of the formal catalog algebras used by the verification suites.
pub const FORMAL_CATALOG: &[&str] = &["s2", "s3", "t2", "cp2"];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::cohomology;
    use crate::field::Rat;

    #[test]
    fn simple_entries() {
        assert_eq!(catalog::<Rat>("point").unwrap().algebra().dim(), 1);
        let s2 = catalog::<Rat>("s2").unwrap().into_algebra().unwrap();
        assert_eq!(s2.dim(), 2);
        assert_eq!(s2.degree(1), 2);
        assert_eq!(catalog::<Rat>("t2").unwrap().algebra().dim(), 4);
        assert_eq!(catalog::<Rat>("t3").unwrap().algebra().dim(), 8);
        assert!(catalog::<Rat>("klein").is_err());
    }

    #[test]
    fn stb_generators() {
        let CatalogEntry::Free(c) = catalog::<Rat>("stb_s2xs2").unwrap() else {
            panic!("expected a free model")
        };
        let gens: Vec<_> = c.generators().iter().map(|(l, d)| (l.as_str(), *d)).collect();
        assert_eq!(gens, [("x", 2), ("y", 2), ("u", 3), ("v", 3), ("t", 3)]);
        let a = c.algebra();
        let d = c.generator_differentials();
        assert_eq!(d[2], a.parse_element("x*x").unwrap());
        assert_eq!(d[3], a.parse_element("y*y").unwrap());
        assert_eq!(d[4], a.parse_element("x*y").unwrap());
    }

    #[test]
    fn connected_sum_betti_numbers() {
        let s5 = sphere::<Rat>(5).unwrap();
        let n = connected_sum_model(&s5, 5).unwrap();
        let mut betti = vec![0; 6];
        for b in n.basis() {
            betti[b.degree] += 1;
        }
        assert_eq!(betti, [1, 0, 1, 1, 0, 1]);
        assert_eq!(n.label(n.unit()), "1");
        // the top class is the product of the two new classes
        let pd = n.poincare_data().unwrap();
        let xy = n.parse_element("s*r").unwrap();
        assert_eq!(xy, SparseVec::unit(pd.omega));
    }

    #[test]
    fn connected_sum_rejects_small_dimension() {
        let s4 = sphere::<Rat>(4).unwrap();
        assert!(connected_sum_model(&s4, 4).is_err());
    }

    #[test]
    fn stb_betti_numbers() {
        for bound in [8, 10, 12] {
            let c = stb_s2xs2::<Rat>(bound).unwrap();
            let h = cohomology(c.algebra(), 7).unwrap();
            assert_eq!(h.betti(), [1, 0, 2, 0, 0, 2, 0, 1], "bound {bound}");
        }
    }
}
