use proptest::prelude::*;

use confseq::algebra::{catalog, CatalogEntry, CohomologyAlgebra, TruncatedFreeCdga};
use confseq::bgcomplex::build_c;
use confseq::field::{Field, Fp, Rat};
use confseq::format;
use confseq::linalg::{inverse, kernel_basis, rank, solve, Matrix};
use confseq::massey::MasseyContext;

fn matrix<F: Field>(rows: &[Vec<i64>]) -> Matrix<F> {
    Matrix::from_rows(&rows.iter().map(|r| r.iter().map(|&x| F::from_i64(x)).collect()).collect::<Vec<_>>())
}

fn arb_rows() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..7, 1usize..7).prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(-3i64..=3, c), r))
}

fn linear_laws<F: Field>(rows: &[Vec<i64>]) -> Result<(), TestCaseError> {
    let m = matrix::<F>(rows);
    let k = kernel_basis(&m);
    prop_assert_eq!(rank(&m) + k.len(), m.ncols());
    prop_assert_eq!(rank(&m), rank(&m.transpose()));
    for v in &k {
        prop_assert!(m.apply(v).is_zero());
    }
    // a vector in the image is solvable and the solution maps back onto it
    let target = m.apply(&confseq::linalg::SparseVec::from_dense(&vec![F::one(); m.ncols()]));
    let x = solve(&m, &target).expect("image vector is solvable");
    prop_assert_eq!(m.apply(&x), target);
    if m.nrows() == m.ncols() {
        match inverse(&m) {
            Some(inv) => prop_assert_eq!(inv.compose(&m), Matrix::identity(m.ncols())),
            None => prop_assert!(rank(&m) < m.ncols()),
        }
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn linear_algebra_over_q(rows in arb_rows()) {
        linear_laws::<Rat>(&rows)?;
    }

    #[test]
    fn linear_algebra_over_f7(rows in arb_rows()) {
        linear_laws::<Fp<7>>(&rows)?;
    }

    #[test]
    fn prime_field_inverses(a in 1i64..101) {
        let x = Fp::<101>::from_i64(a);
        prop_assert_eq!(x * x.inverse().unwrap(), Fp::<101>::from_i64(1));
    }

    #[test]
    fn free_models_survive_a_text_round_trip(
        degrees in prop::collection::vec(1usize..5, 1..4),
        bound in 4usize..9,
    ) {
        let names = ["a", "b", "c", "e"];
        let gens: Vec<(String, usize)> = degrees.iter().enumerate().map(|(i, &d)| (names[i].to_string(), d)).collect();
        let c = TruncatedFreeCdga::<Rat>::new("rand", gens, vec![Vec::new(); degrees.len()], bound).unwrap();
        let entry = CatalogEntry::Free(c);
        let text = format::write(&entry);
        let back = format::parse::<Rat>(&text).unwrap();
        prop_assert_eq!(back.algebra(), entry.algebra());
        // and the expanded algebra as a plain basis file
        let plain = format::write_algebra(entry.algebra());
        let reparsed = format::parse::<Rat>(&plain).unwrap();
        prop_assert_eq!(reparsed.algebra(), entry.algebra());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn graph_complexes_square_to_zero(idx in 0usize..5, n in 2usize..=4) {
        let name = ["s2", "s3", "t2", "cp2", "s2xs2"][idx];
        let a = catalog::<Rat>(name).unwrap().into_algebra().unwrap();
        let c = build_c(n, &a, None).unwrap();
        prop_assert!(c.bicomplex().check_d_squared().is_ok());
    }

    /// Products of formal algebras are formal: every d2 obstruction vanishes.
    #[test]
    fn formal_obstructions_vanish(idx in 0usize..4, q in prop::array::uniform4(0usize..4)) {
        let name = ["s2", "t2", "cp2", "s2xs2"][idx];
        let a = catalog::<Rat>(name).unwrap().into_algebra().unwrap();
        let h = CohomologyAlgebra::formal(&a).unwrap();
        let ctx = MasseyContext::new(&h).unwrap();
        let pos = h.algebra().positive_basis();
        let e: Vec<_> = q.iter().map(|&i| confseq::linalg::SparseVec::unit(pos[i % pos.len()])).collect();
        if let Ok(v) = ctx.d2_star([&e[0], &e[1], &e[2], &e[3]]) {
            prop_assert!(!ctx.obstruction_residual(&v).nonzero);
        }
    }
}
