//! Command-line front end.

use std::fmt::Write as _;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use serde::Serialize;

use confseq::algebra::{catalog, cohomology_with_top, Algebra, CatalogEntry, CohomologyAlgebra, TruncatedFreeCdga};
use confseq::bgcomplex::{build_ag, build_c, build_ebar, build_j, BgComplex};
use confseq::ctcomplex::build_ct;
use confseq::graphs::GraphFamily;
use confseq::massey::{zigzag_d2, MasseyContext};
use confseq::reports::{self, CheckReport};
use confseq::spectral::{total_cohomology, SpectralSequence};
use confseq::{format, Error, Field, Fp, Rat, Result};

#[derive(Parser)]
#[command(name = "confseq", version, about = "Spectral sequences for configuration spaces over exact fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Source {
    /// Algebra file.
    #[arg(long, conflicts_with = "catalog")]
    input: Option<std::path::PathBuf>,
    /// Catalog name, e.g. s2, t2, cp2, s2xs2, stb_s2xs2.
    #[arg(long)]
    catalog: Option<String>,
    /// Q, Fp (= F32003) or F<p> for p in 2, 3, 5, 7, 11, 13, 32003.
    #[arg(long, default_value = "Q")]
    field: String,
    #[arg(long, value_enum, default_value_t = OutputFormat::Table)]
    format: OutputFormat,
    /// Expansion bound for free models.
    #[arg(long)]
    truncate: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Table,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ComplexKind {
    /// C(n, A), graphs with vertex 1 isolated.
    C,
    /// Quotient over graphs without repeated targets.
    Ebar,
    /// All graphs.
    E,
    /// Ideal of graphs with a repeated target.
    J,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    /// The repeated-target ideal is acyclic.
    #[value(alias = "prop1")]
    IdealAcyclic,
    /// C(n, A) embeds in Ebar(n, A) with equal cohomology.
    #[value(alias = "prop3")]
    Comparison,
    /// Both spectral sequences collapse at E2 (n <= 3).
    #[value(alias = "thm2")]
    Collapse,
    /// E3 = E_infinity for C(4, A).
    #[value(alias = "e3-structure")]
    E3,
    /// d1 of C(3, H) against Kahler differentials.
    #[value(alias = "prop5")]
    KahlerThree,
    /// E2^{2,*} of C(4, H) against Kahler differentials.
    #[value(alias = "prop6")]
    KahlerFour,
    /// Pairing between the Leray complex and Ebar(n, H).
    #[value(alias = "theorem1")]
    Pairing,
    Formality,
    Anchors,
}

#[derive(Subcommand)]
enum Command {
    /// Dimensions of one page of the spectral sequence of a graph complex.
    Pages {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        page: usize,
        #[arg(long, value_enum, default_value_t = ComplexKind::C)]
        complex: ComplexKind,
        /// Largest internal degree to build.
        #[arg(long)]
        qmax: Option<usize>,
    },
    /// E2 dimensions of the Leray complex of the cohomology.
    CtE2 {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        n: usize,
    },
    /// Total cohomology of a graph complex.
    Total {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = ComplexKind::C)]
        complex: ComplexKind,
        #[arg(long)]
        qmax: Option<usize>,
    },
    /// Run a verification suite.
    Check {
        #[arg(value_enum)]
        suite: Suite,
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        qmax: Option<usize>,
        /// Report duration_ms as 0, for byte-identical output.
        #[arg(long)]
        no_timing: bool,
    },
    /// Triple Massey product of three cocycles, given as model expressions.
    Massey {
        #[command(flatten)]
        source: Source,
        /// Perturb the defining system with this seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(num_args = 3, required = true)]
        classes: Vec<String>,
    },
    /// d2 of a four-fold tensor in E2^{0,*} of C(4, H).
    D2 {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 4)]
        n: usize,
        /// Also compute d2 by a zig-zag on C(4, model) up to this internal degree.
        #[arg(long)]
        zigzag: Option<usize>,
        #[arg(num_args = 4, required = true)]
        classes: Vec<String>,
    },
    /// List catalog names, or print one entry as an algebra file.
    Catalog {
        #[command(flatten)]
        source: Source,
    },
}

impl Command {
    fn source(&self) -> &Source {
        match self {
            Command::Pages { source, .. }
            | Command::CtE2 { source, .. }
            | Command::Total { source, .. }
            | Command::Check { source, .. }
            | Command::Massey { source, .. }
            | Command::D2 { source, .. }
            | Command::Catalog { source } => source,
        }
    }
}

/// What a command produced: text for the chosen format and whether a
/// verdict failed.
struct Outcome {
    text: String,
    failed: bool,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome { text, failed: false }
    }
}

const CATALOG_NAMES: &[&str] = &[
    "point", "s<m>", "t<k>", "cp2", "s2xs2", "stb_s2xs2", "stb_s2xs2:<bound>", "s<m>#s2xs<m-2>",
];

fn load<F: Field>(source: &Source) -> Result<CatalogEntry<F>> {
    let entry = match (&source.input, &source.catalog) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::Precondition(format!("{}: {e}", path.display())))?;
            format::parse(&text)?
        }
        (None, Some(name)) => catalog(name)?,
        (None, None) => return Err(Error::Precondition("give --input FILE or --catalog NAME".into())),
    };
    match (entry, source.truncate) {
        (CatalogEntry::Free(c), Some(bound)) => {
            let gens = c.generators().to_vec();
            let polys = c.generator_polynomials();
            Ok(CatalogEntry::Free(TruncatedFreeCdga::new(c.algebra().name(), gens, polys, bound)?))
        }
        (entry, _) => Ok(entry),
    }
}

/// The cohomology, as its own formal algebra when there is no differential.
fn cohomology_of<F: Field>(a: &Algebra<F>) -> Result<CohomologyAlgebra<F>> {
    if a.has_differential() {
        cohomology_with_top(a)
    } else {
        CohomologyAlgebra::formal(a)
    }
}

fn check_n(n: usize, max: usize) -> Result<usize> {
    if n == 0 || n > max {
        return Err(Error::OutOfRange { n, min: 1, max });
    }
    Ok(n)
}

fn build<F: Field>(kind: ComplexKind, n: usize, a: &Algebra<F>, qmax: Option<usize>) -> Result<BgComplex<F>> {
    let n = check_n(n, 4)?;
    match kind {
        ComplexKind::C => build_c(n, a, qmax),
        ComplexKind::Ebar => build_ebar(n, a, qmax),
        ComplexKind::E => build_ag(n, a, GraphFamily::Full, qmax),
        ComplexKind::J => build_j(n, a, qmax),
    }
}

#[derive(Serialize)]
struct Inputs {
    algebra: String,
    n: Option<usize>,
    field: String,
}

fn inputs<F: Field>(a: &Algebra<F>, n: Option<usize>) -> Inputs {
    Inputs {
        algebra: a.name().to_string(),
        n,
        field: F::field_name(),
    }
}

#[derive(Serialize)]
struct DimEntry {
    p: usize,
    q: usize,
    dim: usize,
}

#[derive(Serialize)]
struct PageOutput {
    command: &'static str,
    inputs: Inputs,
    complex: String,
    page: usize,
    blocks: Vec<DimEntry>,
    unknown: Vec<(usize, usize)>,
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("output serializes");
    s.push('\n');
    s
}

fn dim_table(title: &str, second: &str, blocks: &[DimEntry], unknown: &[(usize, usize)]) -> String {
    let mut s = format!("{title}\n  {:>4} {:>4} {:>6}\n", "p", second, "dim");
    for b in blocks {
        let _ = writeln!(s, "  {:>4} {:>4} {:>6}", b.p, b.q, b.dim);
    }
    if !unknown.is_empty() {
        let cells: Vec<String> = unknown.iter().map(|(p, q)| format!("({p},{q})")).collect();
        let _ = writeln!(s, "  unknown (degrees beyond the truncation): {}", cells.join(" "));
    }
    s
}

fn pages<F: Field>(source: &Source, n: usize, r: usize, kind: ComplexKind, qmax: Option<usize>) -> Result<Outcome> {
    if r == 0 {
        return Err(Error::Precondition("pages start at r = 1".into()));
    }
    let a = load::<F>(source)?.into_algebra()?;
    let c = build(kind, n, &a, qmax)?;
    let page = SpectralSequence::new(c.bicomplex()).page(r)?;
    let blocks: Vec<DimEntry> = page.dims.iter().filter(|(_, &d)| d > 0).map(|(&(p, q), &dim)| DimEntry { p, q, dim }).collect();
    let out = PageOutput {
        command: "pages",
        inputs: inputs(&a, Some(n)),
        complex: c.bicomplex().name().to_string(),
        page: r,
        blocks,
        unknown: page.unknown.clone(),
    };
    Ok(Outcome::ok(match source.format {
        OutputFormat::Json => json(&out),
        OutputFormat::Table => dim_table(
            &format!("E{r} of {} over {} (nonzero entries)", out.complex, out.inputs.field),
            "q",
            &out.blocks,
            &out.unknown,
        ),
    }))
}

fn ct_e2<F: Field>(source: &Source, n: usize) -> Result<Outcome> {
    let model = load::<F>(source)?.into_algebra()?;
    let h = cohomology_of(&model)?;
    let ct = build_ct(check_n(n, confseq::ctcomplex::MAX_POINTS)?, h.algebra())?;
    let blocks: Vec<DimEntry> = ct.e2_dims().into_iter().filter(|&(_, d)| d > 0).map(|((p, q), dim)| DimEntry { p, q, dim }).collect();
    let out = PageOutput {
        command: "ct-e2",
        inputs: inputs(&model, Some(n)),
        complex: format!("T({n}, H)"),
        page: 2,
        blocks,
        unknown: Vec::new(),
    };
    Ok(Outcome::ok(match source.format {
        OutputFormat::Json => json(&out),
        OutputFormat::Table => dim_table(
            &format!("E2 of T({n}, H({})) over {} by (p, H-degree h)", model.name(), out.inputs.field),
            "h",
            &out.blocks,
            &[],
        ),
    }))
}

#[derive(Serialize)]
struct TotalOutput {
    command: &'static str,
    inputs: Inputs,
    complex: String,
    /// Trusted up to this total degree.
    trusted_up_to: usize,
    dims: Vec<usize>,
}

fn total<F: Field>(source: &Source, n: usize, kind: ComplexKind, qmax: Option<usize>) -> Result<Outcome> {
    let a = load::<F>(source)?.into_algebra()?;
    let c = build(kind, n, &a, qmax)?;
    let dims = total_cohomology(c.bicomplex())?;
    let out = TotalOutput {
        command: "total",
        inputs: inputs(&a, Some(n)),
        complex: c.bicomplex().name().to_string(),
        trusted_up_to: c.bicomplex().trusted_total_max(),
        dims,
    };
    Ok(Outcome::ok(match source.format {
        OutputFormat::Json => json(&out),
        OutputFormat::Table => {
            let mut s = format!("total cohomology of {} over {}\n", out.complex, out.inputs.field);
            for (k, d) in out.dims.iter().enumerate() {
                let _ = writeln!(s, "  H^{k:<3} {d}");
            }
            s
        }
    }))
}

fn check<F: Field>(suite: Suite, source: &Source, n: Option<usize>, qmax: Option<usize>, no_timing: bool) -> Result<Outcome> {
    let report: CheckReport = if suite == Suite::Anchors {
        reports::check_anchors()?
    } else {
        let model = load::<F>(source)?.into_algebra()?;
        let need_n = |default: usize| n.unwrap_or(default);
        match suite {
            Suite::Comparison => reports::check_comparison(&model, check_n(need_n(3), 4)?, qmax)?,
            Suite::E3 => reports::check_e3_structure(&model, qmax)?,
            _ => {
                let h = cohomology_of(&model)?;
                let h = h.algebra();
                match suite {
                    Suite::IdealAcyclic => reports::check_ideal_acyclic(h, check_n(need_n(3), 4)?)?,
                    Suite::Collapse => reports::check_collapse(h, check_n(need_n(3), 3)?)?,
                    Suite::KahlerThree => reports::check_kahler_three(h)?,
                    Suite::KahlerFour => reports::check_kahler_four(h)?,
                    Suite::Pairing => reports::check_pairing(h, check_n(need_n(3), confseq::ctcomplex::MAX_POINTS)?)?,
                    Suite::Formality => reports::check_formality(h)?,
                    Suite::Comparison | Suite::E3 | Suite::Anchors => unreachable!(),
                }
            }
        }
    };
    let report = if no_timing { report.without_timing() } else { report };
    let text = match source.format {
        OutputFormat::Json => format!("{}\n", report.to_json()),
        OutputFormat::Table => report.to_table(),
    };
    Ok(Outcome {
        text,
        failed: !report.passed(),
    })
}

fn parse_classes<F: Field>(h: &CohomologyAlgebra<F>, exprs: &[String]) -> Result<Vec<confseq::algebra::Element<F>>> {
    exprs.iter().map(|e| h.class_of_expr(e)).collect()
}

#[derive(Serialize)]
struct MasseyOutput {
    command: &'static str,
    inputs: Inputs,
    arguments: Vec<String>,
    degree: usize,
    class: String,
    representative: String,
    indeterminacy: Vec<String>,
}

fn massey<F: Field>(source: &Source, seed: Option<u64>, exprs: &[String]) -> Result<Outcome> {
    let model = load::<F>(source)?.into_algebra()?;
    let h = cohomology_of(&model)?;
    let ctx = MasseyContext::new(&h)?;
    let c = parse_classes(&h, exprs)?;
    let result = match seed {
        None => ctx.triple(&c[0], &c[1], &c[2])?,
        Some(s) => {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(s);
            ctx.matrix_massey_perturbed(&c[0..1], &[vec![c[1].clone()]], &c[2..3], Some(&mut rng))?
        }
    };
    let ha = h.algebra();
    let out = MasseyOutput {
        command: "massey",
        inputs: inputs(&model, None),
        arguments: exprs.to_vec(),
        degree: result.degree,
        class: ha.format_element(&result.class),
        representative: model.format_element(&result.representative),
        indeterminacy: result.indeterminacy.iter().map(|v| ha.format_element(v)).collect(),
    };
    Ok(Outcome::ok(match source.format {
        OutputFormat::Json => json(&out),
        OutputFormat::Table => {
            let ind = if out.indeterminacy.is_empty() {
                "0".to_string()
            } else {
                format!("span{{{}}}", out.indeterminacy.join(", "))
            };
            format!(
                "<{}> in degree {}\n  class          {}\n  representative {}\n  indeterminacy  {}\n",
                exprs.join(", "),
                out.degree,
                out.class,
                out.representative,
                ind
            )
        }
    }))
}

#[derive(Serialize)]
struct D2Output {
    command: &'static str,
    inputs: Inputs,
    arguments: Vec<String>,
    formula: confseq::massey::D2Summary,
    zigzag: Option<confseq::massey::D2Summary>,
    /// Sign relating the zig-zag residual to the formula residual.
    zigzag_sign: Option<i8>,
    verdict: String,
}

fn d2<F: Field>(source: &Source, n: usize, zigzag: Option<usize>, exprs: &[String]) -> Result<Outcome> {
    if n != 4 {
        return Err(Error::OutOfRange { n, min: 4, max: 4 });
    }
    let model = load::<F>(source)?.into_algebra()?;
    let h = cohomology_of(&model)?;
    let ctx = MasseyContext::new(&h)?;
    let c = parse_classes(&h, exprs)?;
    let quad = [&c[0], &c[1], &c[2], &c[3]];
    let value = ctx.d2_star(quad)?;
    let formula = ctx.summarize(&value);
    let (zz, sign) = match zigzag {
        None => (None, None),
        Some(q) => {
            let cx = build_c(4, &model, Some(q))?;
            let z = zigzag_d2(&cx, &h, quad)?;
            let sign = ctx.obstruction_residual(&z).sign_relative_to(&ctx.obstruction_residual(&value));
            (Some(ctx.summarize(&z)), sign)
        }
    };
    let verdict = if formula.nonzero { "nonzero in E2^{2,*}" } else { "zero in E2^{2,*}" }.to_string();
    let out = D2Output {
        command: "d2",
        inputs: inputs(&model, Some(4)),
        arguments: exprs.to_vec(),
        formula,
        zigzag: zz,
        zigzag_sign: sign,
        verdict,
    };
    Ok(Outcome::ok(match source.format {
        OutputFormat::Json => json(&out),
        OutputFormat::Table => {
            let mut s = format!("d2 [{}] in E2^{{2,*}} of C(4, H({}))\n", exprs.join(" ⊗ "), model.name());
            let f = &out.formula;
            let _ = writeln!(s, "  e23e34: {}", f.e23e34);
            let _ = writeln!(s, "  e23e24: {}", f.e23e24);
            let _ = writeln!(s, "  residual e23e34: {}", f.residual_e23e34);
            let _ = writeln!(s, "  residual e23e24: {}", f.residual_e23e24);
            if let Some(z) = &out.zigzag {
                let _ = writeln!(s, "  zig-zag e23e34: {}", z.e23e34);
                let _ = writeln!(s, "  zig-zag e23e24: {}", z.e23e24);
                let sign = match out.zigzag_sign {
                    Some(1) => "agrees with the formula".to_string(),
                    Some(s) => format!("agrees with the formula up to sign {s:+}"),
                    None => "DISAGREES with the formula".to_string(),
                };
                let _ = writeln!(s, "  zig-zag residual {sign}");
            }
            let _ = writeln!(s, "  verdict: {}", out.verdict);
            s
        }
    }))
}

fn catalog_cmd<F: Field>(source: &Source) -> Result<Outcome> {
    if source.catalog.is_none() && source.input.is_none() {
        let mut s = String::from("catalog names:\n");
        for name in CATALOG_NAMES {
            let _ = writeln!(s, "  {name}");
        }
        return Ok(Outcome::ok(s));
    }
    Ok(Outcome::ok(format::write(&load::<F>(source)?)))
}

fn run<F: Field>(command: &Command) -> Result<Outcome> {
    match command {
        Command::Pages { source, n, page, complex, qmax } => pages::<F>(source, *n, *page, *complex, *qmax),
        Command::CtE2 { source, n } => ct_e2::<F>(source, *n),
        Command::Total { source, n, complex, qmax } => total::<F>(source, *n, *complex, *qmax),
        Command::Check { suite, source, n, qmax, no_timing } => check::<F>(*suite, source, *n, *qmax, *no_timing),
        Command::Massey { source, seed, classes } => massey::<F>(source, *seed, classes),
        Command::D2 { source, n, zigzag, classes } => d2::<F>(source, *n, *zigzag, classes),
        Command::Catalog { source } => catalog_cmd::<F>(source),
    }
}

fn dispatch(command: &Command) -> Result<Outcome> {
    match command.source().field.to_ascii_uppercase().as_str() {
        "Q" => run::<Rat>(command),
        "FP" | "F32003" => run::<Fp<32003>>(command),
        "F2" => run::<Fp<2>>(command),
        "F3" => run::<Fp<3>>(command),
        "F5" => run::<Fp<5>>(command),
        "F7" => run::<Fp<7>>(command),
        "F11" => run::<Fp<11>>(command),
        "F13" => run::<Fp<13>>(command),
        other => Err(Error::Precondition(format!("unsupported field `{other}`"))),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli.command) {
        Ok(out) => {
            print!("{}", out.text);
            if out.failed {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
