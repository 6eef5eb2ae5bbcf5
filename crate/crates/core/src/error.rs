use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// The atom table is not the table of a relation algebra.
    #[error("invalid atom structure: {0}")]
    InvalidStructure(String),
    /// Names, indices or widths are out of range.
    #[error("malformed atom structure: {0}")]
    Malformed(String),
    #[error("elements belong to different algebras")]
    AlgebraMismatch,
    #[error("element width {width} does not fit an algebra with {atoms} atoms")]
    WidthMismatch { width: u32, atoms: usize },
    #[error("too many atoms: {0} (limit is 30)")]
    TooManyAtoms(usize),
    #[error("relations over different bases ({0} vs {1})")]
    BaseMismatch(usize, usize),
    #[error("relation is not an equivalence relation")]
    NotEquivalence,
    #[error("size limit exceeded: {0}")]
    SizeLimit(String),
    #[error("carrier is not closed: {0}")]
    NotClosed(String),
    #[error("ideal is improper (contains 1)")]
    ImproperIdeal,
    #[error("kernel is not maximal (quotient is not simple)")]
    KernelNotMaximal,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("q = {0} is too small: lines carry only two points, so a <= a;a fails")]
    QTooSmall(u64),
    #[error("bad parameters: {0}")]
    BadParameters(String),
    #[error("algebra is not simple; decompose it into simple factors first")]
    NotSimple,
    #[error("invalid certificate: {0}")]
    InvalidCertificate(String),
    #[error("line {line}: {msg}")]
    Format { line: usize, msg: String },
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("search space too large: {required} assignments exceeds cap {cap}")]
    SearchSpaceTooLarge { required: u128, cap: u128 },
}
