use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("degenerate displacement: u + t*v has zero norm")]
    DegenerateDisplacement,
    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),
    #[error("points {i} and {j} overlap: separation {angle} below {limit}")]
    Overlap {
        i: usize,
        j: usize,
        angle: f64,
        limit: f64,
    },
    #[error("edge ({i}, {j}) joins antipodal points; tangent undefined")]
    DegenerateEdge { i: usize, j: usize },
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("infeasible move: {0}")]
    InfeasibleMove(String),
    #[error("ambiguous matching: {0}")]
    Matching(String),
    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
