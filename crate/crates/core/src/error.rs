use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("axiom violated: {axiom} (witnesses: {witnesses})")]
    AxiomViolation { axiom: String, witnesses: String },

    #[error("product or differential lands in degree {degree}, above the truncation bound {bound}")]
    Overflow { degree: usize, bound: usize },

    #[error("Poincare pairing is degenerate in degree {degree}")]
    DegeneratePairing { degree: usize },

    #[error("algebra has no top class")]
    NoTopClass,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unknown catalog entry `{0}`")]
    UnknownCatalog(String),

    #[error("unknown basis label `{0}`")]
    UnknownLabel(String),

    #[error("Massey product not defined: {0}")]
    NotDefined(String),

    #[error("presentations disagree: {0}")]
    Mismatch(String),

    #[error("n = {n} outside the supported range {min}..={max}")]
    OutOfRange { n: usize, min: usize, max: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn axiom(axiom: impl Into<String>, witnesses: impl Into<String>) -> Self {
        Error::AxiomViolation {
            axiom: axiom.into(),
            witnesses: witnesses.into(),
        }
    }
}
