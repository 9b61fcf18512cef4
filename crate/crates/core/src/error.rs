use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("grid dimension {0} out of range [{1}, {2}]")]
    DimensionOutOfRange(usize, usize, usize),
    #[error("total area must be positive, got {0}")]
    NonPositiveArea(f64),
    #[error("fields live on different meshes")]
    MeshMismatch,
    #[error("expression parse error at byte {offset}: {message}")]
    ExprParse { offset: usize, message: String },
    #[error("unknown variable `{0}` for {1} mesh")]
    UnknownVariable(String, &'static str),
    #[error("expression evaluates to a non-finite value at vertex {0}")]
    NonFiniteValue(usize),
    #[error("field has non-finite values")]
    NonFiniteField,
    #[error("region is empty")]
    EmptyRegion,
    #[error("region complement is empty")]
    EmptyComplement,
    #[error("region is not solid (connected with connected complement)")]
    NotSolid,
    #[error("tree point does not lie on the contour tree")]
    PointOffTree,
    #[error("simple quasi-measures require a sphere (genus 0) mesh")]
    RequiresSphere,
    #[error("odd-points measure needs an odd number >= 3 of distinct vertices, got {0}")]
    BadSupportCount(usize),
    #[error("support vertex {0} out of bounds")]
    SupportOutOfBounds(usize),
    #[error("no tree point satisfies the median condition")]
    NoMedian,
    #[error("convex combination weights must be nonnegative and sum to 1, got sum {0}")]
    BadWeights(f64),
    #[error("quasi-state is not simple")]
    NotSimple,
    #[error("raster resolution {0} out of range [{1}, {2}]")]
    ResolutionOutOfRange(usize, usize, usize),
    #[error("perturbation budget epsilon must be positive, got {0}")]
    BadEpsilon(f64),
    #[error("base bracket does not attain 1 on the probe region (max {0})")]
    ProbePrecondition(f64),
    #[error("invalid run configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
