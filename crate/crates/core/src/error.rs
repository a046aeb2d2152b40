use thiserror::Error;

/// Errors raised anywhere in the toolkit.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("polynomial {0:#x} is not irreducible over GF(2)")]
    PolynomialNotIrreducible(u32),
    #[error("bad degree: {0}")]
    BadDegree(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("{m} does not divide the extension degree {n}")]
    BadSubfield { n: u32, m: u32 },

    #[error("matrices live over different fields")]
    FieldMismatch,
    #[error("bad shape: {0}")]
    BadShape(String),
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("linear system has no solution")]
    NoSolution,

    #[error("group exceeds the order cap of {cap}")]
    GroupTooLarge { cap: usize },
    #[error("not a group: {0}")]
    NotAGroup(String),
    #[error("subgroup is not normal")]
    NotNormal,
    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("theta has order {order}; it must be odd and different from 1")]
    BadTheta { order: u32 },
    #[error("bad epsilon: {0}")]
    BadEpsilon(String),

    #[error("map is not a homomorphism: {0}")]
    NotAHomomorphism(String),
    #[error("map is not bijective")]
    NotBijective,
    #[error("group of order {order} with {gens} generators is too large for brute-force search")]
    TooLargeForBruteForce { order: usize, gens: usize },

    #[error("subspace is not invariant under the action")]
    NotInvariant,
    #[error("isomorphism search was inconclusive")]
    Unknown,

    #[error("bad format: {0}")]
    BadFormat(String),
    #[error("generator {0} does not preserve the symplectic form")]
    NotSymplectic(usize),
    #[error("not found: {0}")]
    NotFound(String),
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
