//! Line-oriented text format for algebras.
//!
//! ```text
//! # comment
//! algebra S2            |  cdga-free stb
//! field Q               |  field Q
//! basis 1 degree 0      |  generator x degree 2
//! basis w degree 2      |  generator u degree 3
//! unit 1                |  d u = x*x
//! top w                 |  truncate 12
//! product w w = 0       |  end
//! d A = ...
//! truncate N
//! end
//! ```
//!
//! Missing products are zero, `b*a` is filled in from `a*b`, and products
//! with the unit are implied.

use std::fmt::Write as _;

use crate::algebra::{
    format_combination, parse_expression, parse_polynomial, Algebra, AlgebraSpec, BasisElement, CatalogEntry, Element,
    TruncatedFreeCdga,
};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::SparseVec;

fn perr(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Re-tags a line-less parse error from the expression parser.
fn at_line(line: usize) -> impl Fn(Error) -> Error {
    move |e| match e {
        Error::Parse { line: 0, message } => Error::Parse { line, message },
        other => other,
    }
}

fn valid_label(s: &str) -> bool {
    !s.is_empty()
        && !s.contains(|c: char| c.is_whitespace() || "*+-=/#".contains(c))
        && (s == "1" || !s.starts_with(|c: char| c.is_ascii_digit()))
}

/// `degree D` after a label.
fn parse_degree(line: usize, toks: &[&str]) -> Result<usize> {
    match toks {
        ["degree", d] => d.parse().map_err(|_| perr(line, format!("bad degree `{d}`"))),
        _ => Err(perr(line, "expected `degree D`")),
    }
}

fn check_field<F: Field>(line: usize, name: &str) -> Result<()> {
    let ok = match name {
        "Q" => F::characteristic() == 0,
        "Fp" => F::characteristic() != 0,
        other => other == F::field_name(),
    };
    if ok {
        Ok(())
    } else {
        Err(perr(line, format!("file is over {name}, requested field is {}", F::field_name())))
    }
}

#[derive(Default)]
struct Raw {
    free: bool,
    name: String,
    basis: Vec<(usize, String, usize)>,
    unit: Option<(usize, String)>,
    top: Option<(usize, String)>,
    products: Vec<(usize, String, String, String)>,
    diffs: Vec<(usize, String, String)>,
    truncate: Option<usize>,
}

fn read_raw<F: Field>(text: &str) -> Result<Raw> {
    let mut raw = Raw::default();
    let mut header = false;
    let mut ended = false;
    for (k, full) in text.lines().enumerate() {
        let line = k + 1;
        let s = full.trim();
        if s.is_empty() || s.starts_with('#') {
            continue;
        }
        if ended {
            return Err(perr(line, "content after `end`"));
        }
        let (head, rest) = s.split_once(char::is_whitespace).unwrap_or((s, ""));
        let rest = rest.trim();
        if !header {
            match head {
                "algebra" | "cdga-free" if !rest.is_empty() => {
                    raw.free = head == "cdga-free";
                    raw.name = rest.to_string();
                    header = true;
                    continue;
                }
                _ => return Err(perr(line, "expected `algebra NAME` or `cdga-free NAME`")),
            }
        }
        let toks: Vec<&str> = rest.split_whitespace().collect();
        match head {
            "field" => check_field::<F>(line, rest)?,
            "basis" | "generator" => {
                if (head == "generator") != raw.free {
                    return Err(perr(line, format!("`{head}` not allowed in this form")));
                }
                let (label, tail) = toks.split_first().ok_or_else(|| perr(line, "missing label"))?;
                if !valid_label(label) {
                    return Err(perr(line, format!("bad label `{label}`")));
                }
                if raw.basis.iter().any(|(_, l, _)| l == label) {
                    return Err(perr(line, format!("duplicate label `{label}`")));
                }
                raw.basis.push((line, label.to_string(), parse_degree(line, tail)?));
            }
            "unit" | "top" if !raw.free && toks.len() == 1 => {
                let slot = if head == "unit" { &mut raw.unit } else { &mut raw.top };
                if slot.replace((line, toks[0].to_string())).is_some() {
                    return Err(perr(line, format!("`{head}` given twice")));
                }
            }
            "product" if !raw.free => {
                let (lhs, rhs) = rest.split_once('=').ok_or_else(|| perr(line, "expected `product A B = ...`"))?;
                match lhs.split_whitespace().collect::<Vec<_>>()[..] {
                    [a, b] => raw.products.push((line, a.to_string(), b.to_string(), rhs.trim().to_string())),
                    _ => return Err(perr(line, "expected two factors")),
                }
            }
            "d" => {
                let (lhs, rhs) = rest.split_once('=').ok_or_else(|| perr(line, "expected `d A = ...`"))?;
                raw.diffs.push((line, lhs.trim().to_string(), rhs.trim().to_string()));
            }
            "truncate" => {
                let n = rest.parse().map_err(|_| perr(line, format!("bad bound `{rest}`")))?;
                if raw.truncate.replace(n).is_some() {
                    return Err(perr(line, "`truncate` given twice"));
                }
            }
            "end" => ended = true,
            _ => return Err(perr(line, format!("unexpected `{head}`"))),
        }
    }
    if !header {
        return Err(perr(0, "empty file"));
    }
    if !ended {
        return Err(perr(text.lines().count(), "missing `end`"));
    }
    Ok(raw)
}

/// Parses an algebra file; free-form files are expanded up to `truncate`.
pub fn parse<F: Field>(text: &str) -> Result<CatalogEntry<F>> {
    let raw = read_raw::<F>(text)?;
    if raw.free {
        parse_free(raw)
    } else {
        parse_basis(raw).map(CatalogEntry::Algebra)
    }
}

fn parse_free<F: Field>(raw: Raw) -> Result<CatalogEntry<F>> {
    let bound = raw.truncate.ok_or_else(|| perr(0, "free form needs `truncate N`"))?;
    let gens: Vec<(String, usize)> = raw.basis.iter().map(|(_, l, d)| (l.clone(), *d)).collect();
    let mut polys = vec![Vec::new(); gens.len()];
    for (line, g, expr) in &raw.diffs {
        let gi = gens.iter().position(|(l, _)| l == g).ok_or_else(|| perr(*line, format!("unknown generator `{g}`")))?;
        if !polys[gi].is_empty() {
            return Err(perr(*line, format!("`d {g}` given twice")));
        }
        polys[gi] = parse_polynomial(expr, &gens).map_err(at_line(*line))?;
    }
    TruncatedFreeCdga::new(raw.name, gens, polys, bound).map(CatalogEntry::Free)
}

fn parse_basis<F: Field>(raw: Raw) -> Result<Algebra<F>> {
    let labels: Vec<&str> = raw.basis.iter().map(|(_, l, _)| l.as_str()).collect();
    let find = |line: usize, l: &str| labels.iter().position(|&x| x == l).ok_or_else(|| perr(line, format!("unknown label `{l}`")));
    let (uline, ulabel) = raw.unit.clone().ok_or_else(|| perr(0, "missing `unit`"))?;
    let unit = find(uline, &ulabel)?;
    // a bare scalar term stands for a multiple of the unit
    let combination = |line: usize, expr: &str| -> Result<Element<F>> {
        parse_expression(expr, |factors| match factors {
            [] => Ok(SparseVec::unit(unit)),
            [l] => find(line, l).map(SparseVec::unit),
            _ => Err(perr(line, "products are not allowed on the right-hand side")),
        })
        .map_err(at_line(line))
    };
    let basis = raw
        .basis
        .iter()
        .map(|(_, l, d)| BasisElement {
            label: l.clone(),
            degree: *d,
        })
        .collect();
    let mut spec = AlgebraSpec::new(raw.name.clone(), basis, unit);
    for (line, a, b, rhs) in &raw.products {
        let e = combination(*line, rhs)?;
        spec.products.push(((find(*line, a)?, find(*line, b)?), e));
    }
    for (line, a, rhs) in &raw.diffs {
        spec.differential.push((find(*line, a)?, combination(*line, rhs)?));
    }
    if let Some((line, l)) = &raw.top {
        spec.top = Some(find(*line, l)?);
    }
    spec.truncation = raw.truncate;
    Algebra::new(spec)
}

fn field_line<F: Field>() -> String {
    format!("field {}\n", F::field_name())
}

/// Writes an algebra in the basis form; parsing the text gives it back.
pub fn write_algebra<F: Field>(a: &Algebra<F>) -> String {
    let mut s = format!("algebra {}\n", a.name());
    s.push_str(&field_line::<F>());
    for b in a.basis() {
        let _ = writeln!(s, "basis {} degree {}", b.label, b.degree);
    }
    let _ = writeln!(s, "unit {}", a.label(a.unit()));
    if let Some(t) = a.top() {
        let _ = writeln!(s, "top {}", a.label(t));
    }
    let u = a.unit();
    for i in 0..a.dim() {
        for j in i..a.dim() {
            if i == u || j == u {
                continue;
            }
            match a.product_basis(i, j) {
                Ok(p) if !p.is_zero() => {
                    let _ = writeln!(s, "product {} {} = {}", a.label(i), a.label(j), a.format_element(&p));
                }
                _ => {}
            }
        }
    }
    if a.has_differential() {
        for i in 0..a.dim() {
            if let Ok(d) = a.d_basis(i) {
                if !d.is_zero() {
                    let _ = writeln!(s, "d {} = {}", a.label(i), a.format_element(&d));
                }
            }
        }
    }
    if let Some(t) = a.truncation() {
        let _ = writeln!(s, "truncate {t}");
    }
    s.push_str("end\n");
    s
}

/// Writes a free model by its generators and their differentials.
pub fn write_free<F: Field>(c: &TruncatedFreeCdga<F>) -> String {
    let gens = c.generators();
    let mut s = format!("cdga-free {}\n", c.algebra().name());
    s.push_str(&field_line::<F>());
    for (l, d) in gens {
        let _ = writeln!(s, "generator {l} degree {d}");
    }
    for (g, d) in c.generator_differentials().iter().enumerate() {
        if d.is_zero() {
            continue;
        }
        let monomial = |i: usize| {
            let factors: Vec<&str> = c
                .exponents(i)
                .iter()
                .enumerate()
                .flat_map(|(k, &e)| std::iter::repeat_n(gens[k].0.as_str(), e as usize))
                .collect();
            if factors.is_empty() {
                "1".to_string()
            } else {
                factors.join("*")
            }
        };
        let _ = writeln!(s, "d {} = {}", gens[g].0, format_combination(d, monomial));
    }
    let _ = writeln!(s, "truncate {}", c.bound());
    s.push_str("end\n");
    s
}

pub fn write<F: Field>(entry: &CatalogEntry<F>) -> String {
    match entry {
        CatalogEntry::Algebra(a) => write_algebra(a),
        CatalogEntry::Free(c) => write_free(c),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::catalog;
    use crate::field::{Fp, Rat};

    const SPHERE: &str = "algebra S2\nfield Q\nbasis 1 degree 0\nbasis w degree 2\nunit 1\ntop w\nend\n";

    #[test]
    fn sphere_file() {
        let a = match parse::<Rat>(SPHERE).unwrap() {
            CatalogEntry::Algebra(a) => a,
            _ => panic!(),
        };
        assert_eq!(a.dim(), 2);
        assert_eq!(a.top(), Some(1));
        assert!(a.product_basis(1, 1).unwrap().is_zero());
    }

    #[test]
    fn mirrored_product_is_filled_in() {
        let text = "algebra T2\nbasis 1 degree 0\nbasis a degree 1\nbasis b degree 1\nbasis ab degree 2\nunit 1\nproduct a b = ab\ntop ab\nend";
        let a = parse::<Rat>(text).unwrap().into_algebra().unwrap();
        let ba = a.product_basis(2, 1).unwrap();
        assert_eq!(a.format_element(&ba), "-ab");
    }

    #[test]
    fn broken_associativity_is_rejected() {
        let text = "algebra bad\nbasis 1 degree 0\nbasis a degree 2\nbasis b degree 2\nbasis c degree 4\nbasis d degree 6\n\
                    unit 1\nproduct a b = c\nproduct a c = d\nend";
        match parse::<Rat>(text) {
            Err(Error::AxiomViolation { axiom, .. }) => assert_eq!(axiom, "associativity"),
            other => panic!("{other:?}"),
        }
        let text = "algebra bad\nbasis 1 degree 0\nbasis a degree 2\nbasis b degree 4\nbasis c degree 6\nunit 1\n\
                    product a a = b\nproduct a b = c\nproduct b a = 2*c\nend";
        assert!(matches!(parse::<Rat>(text), Err(Error::AxiomViolation { .. })));
    }

    #[test]
    fn free_form_model() {
        let text = "cdga-free stb\nfield Q\ngenerator x degree 2\ngenerator y degree 2\ngenerator u degree 3\n\
                    generator v degree 3\ngenerator t degree 3\nd u = x*x\nd v = y*y\nd t = x*y\ntruncate 12\nend\n";
        let c = match parse::<Rat>(text).unwrap() {
            CatalogEntry::Free(c) => c,
            _ => panic!(),
        };
        let reference = catalog::<Rat>("stb_s2xs2").unwrap();
        assert_eq!(c.algebra().basis(), reference.algebra().basis());
        for (g, d) in [("x", 2), ("u", 3), ("t", 3)] {
            let i = c.algebra().index_of(g).unwrap();
            assert_eq!(c.algebra().degree(i), d);
        }
    }

    #[test]
    fn errors_carry_line_numbers() {
        let text = "algebra S2\nbasis 1 degree 0\nbasis w degree two\nunit 1\nend";
        assert_eq!(
            parse::<Rat>(text).unwrap_err(),
            Error::Parse {
                line: 3,
                message: "bad degree `two`".into()
            }
        );
        let text = "algebra S2\nbasis 1 degree 0\nbasis w degree 2\nbasis w degree 2\nunit 1\nend";
        assert!(matches!(parse::<Rat>(text), Err(Error::Parse { line: 4, .. })));
        let text = "algebra S2\nbasis 1 degree 0\nbasis w degree 2\nunit 1\nproduct w w = 3*z\nend";
        assert!(matches!(parse::<Rat>(text), Err(Error::Parse { line: 5, .. })));
        assert!(matches!(parse::<Rat>("algebra x\nbasis 1 degree 0\nunit 1\n"), Err(Error::Parse { .. })));
    }

    #[test]
    fn field_must_match() {
        assert!(parse::<Fp<5>>(SPHERE).is_err());
        assert!(parse::<Fp<5>>(&SPHERE.replace("field Q", "field F5")).is_ok());
        assert!(parse::<Fp<5>>(&SPHERE.replace("field Q", "field F7")).is_err());
    }

    #[test]
    fn catalog_round_trip() {
        for name in ["point", "s2", "s3", "t2", "t3", "cp2", "s2xs2", "s5#s2xs3", "stb_s2xs2"] {
            let e = catalog::<Rat>(name).unwrap();
            let text = write(&e);
            let back = parse::<Rat>(&text).unwrap_or_else(|err| panic!("{name}: {err}\n{text}"));
            assert_eq!(back.algebra(), e.algebra(), "{name}");
            assert_eq!(write(&back), text);
        }
    }

    #[test]
    fn round_trip_over_prime_field() {
        let e = catalog::<Fp<3>>("cp2").unwrap();
        let back = parse::<Fp<3>>(&write(&e)).unwrap();
        assert_eq!(back.algebra(), e.algebra());
    }
}
