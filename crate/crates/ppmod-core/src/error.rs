use thiserror::Error;

/// Errors surfaced by group construction, linear algebra and classification.
#[derive(Debug, Error)]
pub enum Error {
    #[error("group order {order} exceeds the configured cap {cap}")]
    OrderCap { order: usize, cap: usize },

    #[error("module dimension {dim} exceeds the configured cap {cap}")]
    DimCap { dim: usize, cap: usize },

    #[error("invalid permutation: {0}")]
    BadPerm(String),

    #[error("invalid group specification: {0}")]
    BadGroupSpec(String),

    #[error("unknown built-in group `{0}`")]
    UnknownGroup(String),

    #[error("unknown module specification `{0}`")]
    UnknownModule(String),

    #[error("the given elements do not form a subgroup of the ambient group")]
    NotASubgroup,

    #[error("subgroup is not normal in the ambient group")]
    NotNormal,

    #[error("subgroup is not a p-group for p = {0}")]
    NotPGroup(u32),

    #[error("{0} is not prime")]
    NotPrime(u32),

    #[error("field construction failed: {0}")]
    FieldConstruction(String),

    #[error("failed to split a decomposable module within the retry budget")]
    SplitFailure,

    #[error("module is not a p-permutation module: {0}")]
    NotPPermutation(String),

    #[error("matrix is singular where an invertible matrix was required")]
    Singular,

    #[error("map is not a group isomorphism: {0}")]
    BadIsomorphism(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
