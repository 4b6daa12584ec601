use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid category: {0}")]
    InvalidCategory(String),
    #[error("invalid functor: {0}")]
    InvalidFunctor(String),
    #[error("invalid natural transformation: {0}")]
    InvalidTransformation(String),
    #[error("invalid subcategory: {0}")]
    InvalidSubcategory(String),
    #[error("search budget of {0} candidate assignments exceeded")]
    BudgetExceeded(u64),
    #[error("missing lifts: {0}")]
    MissingLifts(String),
    #[error("missing cartesian lifts: {0}")]
    MissingCartesianLifts(String),
    #[error("invalid triple: {0}")]
    InvalidTriple(String),
    #[error("base mismatch: {0}")]
    BaseMismatch(String),
    #[error("not a cocartesian fibration: {0}")]
    NotCocartesian(String),
    #[error("not an orthofibration: {0}")]
    NotOrtho(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("missing left adjoint: {0}")]
    MissingLeftAdjoint(String),
    #[error("not a Segal object: {0}")]
    NotSegal(String),
    #[error("incoherent lax structure: {0}")]
    IncoherentLaxStructure(String),
    #[error("incoherent diagram: {0}")]
    IncoherentDiagram(String),
    #[error("invalid diagram: {0}")]
    InvalidDiagram(String),
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}
