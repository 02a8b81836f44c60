//! Named verification suites with structured pass/fail output.

use std::fmt::Write as _;
use std::time::Instant;

use serde::Serialize;

use crate::algebra::{kahler_dimensions, Algebra, CohomologyAlgebra};
use crate::bgcomplex::{build_ag, build_c, build_ebar, build_j, phi_bar};
use crate::ctcomplex::build_ct;
use crate::duality::check_duality;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::graphs::{enumerate, GraphFamily};
use crate::linalg::rank;
use crate::massey::MasseyContext;
use crate::spectral::{collapse_page, total_cohomology, SpectralSequence};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Inputs {
    pub algebra: String,
    pub n: Option<usize>,
    pub field: String,
}

/// One asserted equality `lhs = rhs`, optionally located at a block.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Evidence {
    pub p: Option<usize>,
    pub q: Option<usize>,
    pub quantity: String,
    pub lhs: i64,
    pub rhs: i64,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub inputs: Inputs,
    pub verdict: Verdict,
    pub blocks: Vec<Evidence>,
    pub notes: Vec<String>,
    pub duration_ms: u64,
}

impl CheckReport {
    fn new<F: Field>(check: &str, algebra: &str, n: Option<usize>) -> Self {
        CheckReport {
            check: check.to_string(),
            inputs: Inputs {
                algebra: algebra.to_string(),
                n,
                field: F::field_name(),
            },
            verdict: Verdict::Pass,
            blocks: Vec::new(),
            notes: Vec::new(),
            duration_ms: 0,
        }
    }

    fn expect(&mut self, p: Option<usize>, q: Option<usize>, quantity: impl Into<String>, lhs: usize, rhs: usize) {
        self.expect_when(p, q, quantity, lhs, rhs, lhs == rhs);
    }

    fn expect_when(&mut self, p: Option<usize>, q: Option<usize>, quantity: impl Into<String>, lhs: usize, rhs: usize, ok: bool) {
        if !ok {
            self.verdict = Verdict::Fail;
        }
        self.blocks.push(Evidence {
            p,
            q,
            quantity: quantity.into(),
            lhs: lhs as i64,
            rhs: rhs as i64,
            ok,
        });
    }

    /// Records a boolean condition as `1 = 1` or `0 = 1`.
    fn require(&mut self, quantity: impl Into<String>, ok: bool) {
        self.expect(None, None, quantity, ok as usize, 1);
    }

    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    fn finish(mut self, start: Instant) -> Self {
        self.duration_ms = start.elapsed().as_millis() as u64;
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// The report with its timing zeroed, for byte-for-byte comparisons.
    pub fn without_timing(&self) -> Self {
        CheckReport {
            duration_ms: 0,
            ..self.clone()
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_table(&self) -> String {
        let mut s = String::new();
        let n = self.inputs.n.map_or(String::new(), |n| format!(" n={n}"));
        let _ = writeln!(
            s,
            "{} [{}{} over {}]: {} ({} ms)",
            self.check, self.inputs.algebra, n, self.inputs.field, self.verdict, self.duration_ms
        );
        let _ = writeln!(s, "  {:>4} {:>4}  {:<40} {:>8} {:>8}  ok", "p", "q", "quantity", "lhs", "rhs");
        let pos = |x: Option<usize>| x.map_or("-".to_string(), |v| v.to_string());
        for e in &self.blocks {
            let _ = writeln!(
                s,
                "  {:>4} {:>4}  {:<40} {:>8} {:>8}  {}",
                pos(e.p),
                pos(e.q),
                e.quantity,
                e.lhs,
                e.rhs,
                if e.ok { "yes" } else { "NO" }
            );
        }
        for note in &self.notes {
            let _ = writeln!(s, "  note: {note}");
        }
        s
    }
}

fn compare_totals(r: &mut CheckReport, what: &str, a: &[usize], b: &[usize]) {
    let k = a.len().min(b.len());
    for (i, (x, y)) in a.iter().zip(b).take(k).enumerate() {
        r.expect(None, Some(i), format!("{what} H^{i}"), *x, *y);
    }
}

/// The complex over graphs with a repeated target is acyclic, and the
/// complex over all graphs has the cohomology of its quotient.
pub fn check_ideal_acyclic<F: Field>(h: &Algebra<F>, n: usize) -> Result<CheckReport> {
    let start = Instant::now();
    let mut r = CheckReport::new::<F>("ideal-acyclic", h.name(), Some(n));
    let j = build_j(n, h, None)?;
    for (k, d) in total_cohomology(j.bicomplex())?.iter().enumerate() {
        r.expect(None, Some(k), format!("J: H^{k}(Tot)"), *d, 0);
    }
    let full = build_ag(n, h, GraphFamily::Full, None)?;
    let ebar = build_ebar(n, h, None)?;
    compare_totals(&mut r, "E vs Ebar:", &total_cohomology(full.bicomplex())?, &total_cohomology(ebar.bicomplex())?);
    Ok(r.finish(start))
}

/// The comparison map `C(n, A) -> Ebar(n, A)` is an injective chain map
/// killed by every `e_1r` and induces equal total cohomology.
pub fn check_comparison<F: Field>(a: &Algebra<F>, n: usize, qmax: Option<usize>) -> Result<CheckReport> {
    let start = Instant::now();
    let mut r = CheckReport::new::<F>("comparison", a.name(), Some(n));
    let c = build_c(n, a, qmax)?;
    let e = build_ebar(n, a, qmax)?;
    let phi = phi_bar(&c, &e)?;
    r.require("chain map", phi.check_chain_map(c.bicomplex(), e.bicomplex()).is_ok());
    for (&(p, q), m) in &phi.blocks {
        r.expect(Some(p), Some(q), "rank phi = dim C", m.rank(), c.dim(p, q));
        let mut killed = true;
        for s in 2..=n {
            if p < e.bicomplex().pmax() {
                killed &= e.edge_multiplication(p, q, 1, s)?.compose(m).is_zero();
            }
        }
        r.expect(Some(p), Some(q), "e_1r * phi = 0", killed as usize, 1);
    }
    compare_totals(&mut r, "C vs Ebar:", &total_cohomology(c.bicomplex())?, &total_cohomology(e.bicomplex())?);
    if !c.bicomplex().is_complete() {
        r.note(format!(
            "truncated model: totals compared up to degree {}",
            c.bicomplex().trusted_total_max()
        ));
    }
    Ok(r.finish(start))
}

fn require_formal<F: Field>(h: &Algebra<F>) -> Result<()> {
    if h.has_differential() {
        return Err(Error::Precondition("the check needs a formal algebra".into()));
    }
    h.poincare_data().map(|_| ())
}

/// Both spectral sequences collapse at `E2` for `n <= 3`.
///
/// For the Leray side `E_infinity` is a subquotient of `E2`, so the
/// sequence collapses there exactly when `dim E2` equals the total rank of
/// the cohomology it converges to, computed from `C(n, H)`.
pub fn check_collapse<F: Field>(h: &Algebra<F>, n: usize) -> Result<CheckReport> {
    let start = Instant::now();
    let mut r = CheckReport::new::<F>("collapse", h.name(), Some(n));
    if n > 3 {
        return Err(Error::OutOfRange { n, min: 1, max: 3 });
    }
    require_formal(h)?;
    let c = build_c(n, h, None)?;
    let e = build_ebar(n, h, None)?;
    let cp = collapse_page(c.bicomplex())?;
    let ep = collapse_page(e.bicomplex())?;
    r.expect_when(None, None, "collapse page of C(n,H) <= 2", cp, 2, cp <= 2);
    r.expect_when(None, None, "collapse page of Ebar(n,H) <= 2", ep, 2, ep <= 2);
    let ct = build_ct(n, h)?;
    let e2: usize = ct.e2_dims().values().sum();
    let total: usize = total_cohomology(c.bicomplex())?.iter().sum();
    r.expect(None, None, "dim E2(CT) = total rank", e2, total);
    Ok(r.finish(start))
}

/// `C(4, A)` has only columns `p = 0, 1, 2`, so `E3 = E_infinity`.
pub fn check_e3_structure<F: Field>(a: &Algebra<F>, qmax: Option<usize>) -> Result<CheckReport> {
    let start = Instant::now();
    let mut r = CheckReport::new::<F>("e3-structure", a.name(), Some(4));
    let c = build_c(4, a, qmax)?;
    r.expect(None, None, "columns of C(4,A)", c.bicomplex().pmax() + 1, 3);
    let ss = SpectralSequence::new(c.bicomplex());
    let e3 = ss.page(3)?;
    let einf = ss.e_infinity()?;
    for (&(p, q), &d) in &e3.dims {
        if !einf.unknown.contains(&(p, q)) {
            r.expect(Some(p), Some(q), "dim E3 = dim E_inf", d, einf.dim(p, q));
        }
    }
    r.require("d3 vanishes", e3.differentials_vanish());
    Ok(r.finish(start))
}

/// Kernel and cokernel of `d1` on `C(3, H)`: the total cohomology splits as
/// `ker d1` plus the shifted cokernel, and the cokernel is the module of
/// Kahler differentials.
pub fn check_kahler_three<F: Field>(h: &Algebra<F>) -> Result<CheckReport> {
    let start = Instant::now();
    let mut r = CheckReport::new::<F>("kahler-three", h.name(), Some(3));
    require_formal(h)?;
    let m = h.poincare_data()?.top_degree;
    let c = build_c(3, h, None)?;
    let b = c.bicomplex();
    let qmax = b.qmax();
    let mut ker = vec![0; qmax + 1];
    let mut coker = vec![0; qmax + 1];
    for q in 0..=qmax {
        let d = b.horizontal(0, q);
        let rk = rank(&d);
        ker[q] = b.dim(0, q) - rk;
        coker[q] = b.dim(1, q) - rk;
    }
    let total = total_cohomology(b)?;
    for (k, &t) in total.iter().enumerate() {
        let rhs = ker.get(k).copied().unwrap_or(0) + if k >= 1 { coker.get(k - 1).copied().unwrap_or(0) } else { 0 };
        r.expect(None, Some(k), format!("H^{k} = ker^{k} + coker^{}", k.saturating_sub(1)), t, rhs);
    }
    let omega = kahler_dimensions(h)?;
    for q in 0..=qmax.max(omega.len().saturating_sub(1)) {
        r.expect(Some(1), Some(q), "coker d1 = Kahler differentials", coker.get(q).copied().unwrap_or(0), omega.get(q).copied().unwrap_or(0));
    }
    r.note(format!(
        "grading dictionary: column-1 internal degree q is total degree q+1 of C(3,H) and Lefschetz-dual degree {}-q of H^*(F(M,3)); ker d1 in degree k is dual degree {}-k",
        3 * m as i64 - 1,
        3 * m
    ));
    r.note("only slice dimensions are asserted; the degree shifts above are bookkeeping");
    Ok(r.finish(start))
}

/// `dim E2^{2,q}(C(4, H)) = 2 dim (Kahler differentials)_q`: one copy on
/// each of the graphs `e23e24` and `e23e34` (read as a direct sum).
pub fn check_kahler_four<F: Field>(h: &Algebra<F>) -> Result<CheckReport> {
    let start = Instant::now();
    let mut r = CheckReport::new::<F>("kahler-four", h.name(), Some(4));
    require_formal(h)?;
    let c = build_c(4, h, None)?;
    let ss = SpectralSequence::new(c.bicomplex());
    let e2 = ss.page(2)?;
    let omega = kahler_dimensions(h)?;
    let qmax = c.bicomplex().qmax().max(omega.len());
    for q in 0..=qmax {
        r.expect(Some(2), Some(q), "E2^{2,q} = 2 dim Omega_q", e2.dim(2, q), 2 * omega.get(q).copied().unwrap_or(0));
    }
    Ok(r.finish(start))
}

/// Perfect pairing, adjointness with block-constant signs and `E2`
/// dimension duality between the Leray complex and `Ebar(n, H)`.
pub fn check_pairing<F: Field>(h: &Algebra<F>, n: usize) -> Result<CheckReport> {
    let start = Instant::now();
    let mut r = CheckReport::new::<F>("pairing", h.name(), Some(n));
    let d = check_duality(n, h)?;
    for b in &d.blocks {
        let (p, hd) = (Some(b.p), Some(b.h));
        r.expect(p, hd, "dim T = dim Ebar (partner)", b.ct_dim, b.ebar_dim);
        r.expect(p, hd, "pairing nondegenerate", b.nondegenerate as usize, 1);
        r.expect(p, hd, "pairing descends to T", b.descends as usize, 1);
        r.expect(p, hd, "adjoint with block sign", b.adjoint_sign.is_some() as usize, 1);
        r.expect(p, hd, "dim E2(CT) = dim E2(Ebar)", b.ct_e2, b.ebar_e2);
    }
    let signs: Vec<String> = d
        .blocks
        .iter()
        .filter_map(|b| match b.adjoint_sign {
            Some(s) if s != 0 => Some(format!("({},{}):{:+}", b.p, b.h, s)),
            _ => None,
        })
        .collect();
    r.note(format!("block (p,h) of T pairs with block (p,(n-p)m-h) of Ebar; adjoint signs {}", signs.join(" ")));
    Ok(r.finish(start))
}

/// For a formal algebra no quadruple gives a nonzero residual and `C(4, H)`
/// collapses at `E2`.
pub fn check_formality<F: Field>(h: &Algebra<F>) -> Result<CheckReport> {
    let start = Instant::now();
    let mut r = CheckReport::new::<F>("formality", h.name(), Some(4));
    require_formal(h)?;
    let coh = CohomologyAlgebra::formal(h)?;
    let ctx = MasseyContext::new(&coh)?;
    let witnesses = ctx.noncollapse_witnesses(None)?;
    r.expect(None, None, "non-collapse witnesses", witnesses.len(), 0);
    let c = build_c(4, h, None)?;
    let cp = collapse_page(c.bicomplex())?;
    r.expect_when(None, None, "collapse page of C(4,H) <= 2", cp, 2, cp <= 2);
    Ok(r.finish(start))
}

/// Counting anchors: `C(n, k) = 0` for `2 <= n <= 6`, `F(S^m, 2)` has total rank 2, and the
/// graph families have `n!` and `(n-1)!` members.
pub fn check_anchors() -> Result<CheckReport> {
    use crate::algebra::catalog;
    use crate::field::Rat;
    let start = Instant::now();
    let mut r = CheckReport::new::<Rat>("anchors", "catalog", None);
    let point = catalog::<Rat>("point")?.into_algebra()?;
    for n in 2..=6 {
        let c = build_c(n, &point, None)?;
        let dim: usize = c.bicomplex().blocks().map(|(p, q)| c.dim(p, q)).sum();
        r.expect(None, None, format!("dim C({n},k)"), dim, 0);
    }
    for m in 2..=4 {
        let s = catalog::<Rat>(&format!("s{m}"))?.into_algebra()?;
        let c = build_c(2, &s, None)?;
        let total: usize = total_cohomology(c.bicomplex())?.iter().sum();
        r.expect(None, None, format!("total rank C(2,H(S^{m}))"), total, 2);
    }
    let mut fact = 1;
    for n in 1..=6 {
        let prev = fact;
        fact *= n;
        r.expect(None, None, format!("|graphs without repeated target on {n}|"), enumerate(n, GraphFamily::NoDupTarget)?.len(), fact);
        r.expect(None, None, format!("|graphs with vertex 1 isolated on {n}|"), enumerate(n, GraphFamily::HFamily)?.len(), prev);
    }
    Ok(r.finish(start))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::catalog;
    use crate::field::Rat;

    fn alg(name: &str) -> Algebra<Rat> {
        catalog::<Rat>(name).unwrap().into_algebra().unwrap()
    }

    #[test]
    fn ideal_acyclic_small_cases() {
        for (name, n) in [("s2", 3), ("t2", 3), ("point", 3)] {
            let r = check_ideal_acyclic(&alg(name), n).unwrap();
            assert!(r.passed(), "{}", r.to_table());
        }
    }

    #[test]
    fn comparison_small_cases() {
        for name in ["s2", "cp2"] {
            let r = check_comparison(&alg(name), 3, None).unwrap();
            assert!(r.passed(), "{}", r.to_table());
        }
    }

    #[test]
    fn collapse_small_cases() {
        for (name, n) in [("s2", 3), ("t2", 3), ("s3", 2)] {
            let r = check_collapse(&alg(name), n).unwrap();
            assert!(r.passed(), "{}", r.to_table());
        }
        assert!(check_collapse(&alg("s2"), 4).is_err());
    }

    #[test]
    fn kahler_three_cases() {
        for name in ["s2", "s3", "point", "cp2", "t2"] {
            let r = check_kahler_three(&alg(name)).unwrap();
            assert!(r.passed(), "{}", r.to_table());
        }
    }

    #[test]
    fn kahler_four_cases() {
        for name in ["s2", "s3", "t2", "cp2", "point"] {
            let r = check_kahler_four(&alg(name)).unwrap();
            assert!(r.passed(), "{}", r.to_table());
        }
    }

    #[test]
    fn pairing_report() {
        let r = check_pairing(&alg("s3"), 3).unwrap();
        assert!(r.passed(), "{}", r.to_table());
        assert!(r.notes[0].contains("(n-p)m-h"));
    }

    #[test]
    fn anchors() {
        let r = check_anchors().unwrap();
        assert!(r.passed(), "{}", r.to_table());
    }

    #[test]
    fn json_has_stable_keys() {
        let r = check_kahler_three(&alg("s2")).unwrap().without_timing();
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        for key in ["check", "inputs", "verdict", "blocks", "duration_ms"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert_eq!(v["verdict"], "PASS");
        assert_eq!(r.to_json(), check_kahler_three(&alg("s2")).unwrap().without_timing().to_json());
    }

    #[test]
    fn failing_evidence_sets_verdict() {
        let mut r = CheckReport::new::<Rat>("x", "y", None);
        r.expect(None, None, "a", 1, 2);
        assert_eq!(r.verdict, Verdict::Fail);
        assert!(r.to_table().contains("NO"));
    }
}
