use super::{Algebra, Element};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::{kernel_basis, Echelon, Matrix, SparseVec};

/// Product on `A (x) A`: `(a (x) b)(c (x) d) = (-1)^{|b||c|} ac (x) bd`,
/// with `a (x) b` stored at index `a * dim + b`.
pub fn tensor_square_product<F: Field>(a: &Algebra<F>, u: &Element<F>, v: &Element<F>) -> Result<Element<F>> {
    let n = a.dim();
    let mut out = SparseVec::new();
    for (p, cu) in u.iter() {
        let (i, j) = (p / n, p % n);
        for (q, cv) in v.iter() {
            let (k, l) = (q / n, q % n);
            let left = a.product_basis(i, k)?;
            let right = a.product_basis(j, l)?;
            if left.is_zero() || right.is_zero() {
                continue;
            }
            let c = F::sign(a.degree(j) * a.degree(k)) * cu.clone() * cv.clone();
            for (s, ls) in left.iter() {
                for (t, rt) in right.iter() {
                    out.add_at(s * n + t, c.clone() * ls.clone() * rt.clone());
                }
            }
        }
    }
    Ok(out)
}

/// Dimensions of the Kahler differentials `I / I^2`, where `I` is the kernel
/// of multiplication `A (x) A -> A`, indexed by internal degree
/// (`a (x) 1 - 1 (x) a` has the degree of `a`).
pub fn kahler_dimensions<F: Field>(a: &Algebra<F>) -> Result<Vec<usize>> {
    if a.truncation().is_some() || a.has_differential() {
        return Err(Error::Precondition("Kahler differentials need a finite algebra with zero differential".into()));
    }
    let n = a.dim();
    let top = a.max_degree();
    let mut dims = vec![0; 2 * top + 1];
    let mut ideal: Vec<(usize, Element<F>)> = Vec::new();
    for k in 0..=2 * top {
        // multiplication restricted to the degree-k slice of A (x) A
        let slice: Vec<usize> = (0..n * n)
            .filter(|&p| a.degree(p / n) + a.degree(p % n) == k)
            .collect();
        let cols = slice
            .iter()
            .map(|&p| a.product_basis(p / n, p % n))
            .collect::<Result<Vec<_>>>()?;
        for v in kernel_basis(&Matrix::from_columns(n, cols)) {
            ideal.push((k, v.map_indices(|c| slice[c])));
        }
    }
    let mut squares: Vec<Echelon<F>> = (0..=2 * top).map(|_| Echelon::new()).collect();
    for (ku, u) in &ideal {
        for (kv, v) in &ideal {
            if ku + kv > 2 * top {
                continue;
            }
            let p = tensor_square_product(a, u, v)?;
            if !p.is_zero() {
                squares[ku + kv].insert(p);
            }
        }
    }
    for (k, _) in &ideal {
        dims[*k] += 1;
    }
    for (k, e) in squares.iter().enumerate() {
        dims[k] -= e.rank();
    }
    while dims.len() > 1 && dims.last() == Some(&0) {
        dims.pop();
    }
    Ok(dims)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::catalog;
    use crate::field::Rat;

    fn dims(name: &str) -> Vec<usize> {
        kahler_dimensions(&catalog::<Rat>(name).unwrap().into_algebra().unwrap()).unwrap()
    }

    #[test]
    fn point_has_no_differentials() {
        assert_eq!(dims("point"), [0]);
    }

    #[test]
    fn even_sphere() {
        // k[w]/w^2 with |w| = 2: Omega^1 = A dw / (2w dw), so only dw survives
        assert_eq!(dims("s2"), [0, 0, 1]);
    }

    #[test]
    fn odd_sphere() {
        // |w| odd: w^2 = 0 imposes nothing, Omega^1 is free on dw
        assert_eq!(dims("s3"), [0, 0, 0, 1, 0, 0, 1]);
    }

    #[test]
    fn truncated_polynomial_in_odd_characteristic() {
        // k[h]/h^3: Omega^1 = A dh / (3h^2 dh), dims in degrees 2 and 4
        assert_eq!(dims("cp2"), [0, 0, 1, 0, 1]);
    }
}
