use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate point: imaginary part {0:e} is not positive")]
    DegeneratePoint(f64),
    #[error("matrix has non-positive determinant {0:e}")]
    BadDeterminant(f64),
    #[error("boundary point (0, 0) is not a projective point")]
    DegenerateBoundaryPoint,
    #[error("geodesic endpoints coincide")]
    DegenerateGeodesic,
    #[error("trace {0} is within tolerance of 2 but the matrix is far from parabolic")]
    AmbiguousClass(f64),
    #[error("isometry is not hyperbolic (|trace| = {0})")]
    NotHyperbolic(f64),
    #[error("points coincide")]
    CoincidentPoints,
    #[error("geodesics coincide as unoriented curves")]
    CoincidentGeodesics,
    #[error("point lies {0:e} away from the geodesic")]
    PointNotOnGeodesic(f64),
    #[error("side lengths ({0}, {1}, {2}) do not form a triangle")]
    NotATriangle(f64, f64, f64),
    #[error("axes do not intersect transversally")]
    AxesDisjoint,
    #[error("letter index {index} is outside the {rank}-generator alphabet")]
    BadLetter { index: usize, rank: usize },
    #[error("cannot parse word {0:?}: letters must be a-z or A-Z")]
    ParseWord(String),
    #[error("word {0:?} must be nontrivial and cyclically reduced")]
    NotCyclicallyReduced(String),
    #[error("degenerate surface parameters: {0}")]
    DegenerateParams(String),
    #[error("representation is not discrete: trace of the commutator is {0}")]
    NotDiscrete(f64),
    #[error("surface has no distinguished simple curve")]
    NoDistinguishedCurve,
    #[error("closed geodesics of {0} and {1} share a primitive root")]
    NonPrimitiveCollision(String, String),
    #[error("distinct lifts cross the axis at parameters {0} and {1}; perturb the metric")]
    TriplePoint(f64, f64),
    #[error("near-tangential crossing (|det| = {0:e})")]
    TangentDegenerate(f64),
    #[error("intersection search did not stabilize below radius {0}")]
    NoStabilization(usize),
    #[error("tracked crossing for conjugator {0:?} lost at s = {1}")]
    TrackingLost(String, f64),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NoStabilization(_) => 3,
            Error::TriplePoint(..)
            | Error::TangentDegenerate(_)
            | Error::AmbiguousClass(_)
            | Error::TrackingLost(..)
            | Error::DegeneratePoint(_) => 4,
            _ => 2,
        }
    }
}
