use thiserror::Error;

#[derive(Debug, Error)]
pub enum QsvError {
    #[error("invalid context: {0}")]
    InvalidContext(String),
    #[error("q-shifted factorial ({a};q)_{k} has a vanishing reciprocal factor")]
    DivisionByVanishingFactor { a: String, k: i64 },
    #[error("{what} did not converge within {max_terms} terms")]
    MaxTermsExceeded { what: &'static str, max_terms: usize },
    #[error("theta function evaluated at zero")]
    ZeroArgument,
    #[error("degenerate draw: {0}")]
    DegenerateDraw(String),
    #[error("constraint violated: {0}")]
    ConstraintViolated(String),
    #[error("series does not converge: {0}")]
    NonConvergent(String),
    #[error("lower parameter {0} lies in q^(-n) and produces a pole")]
    LowerParameterPole(String),
    #[error("bilateral series failed to certify decay in the {0} direction")]
    NonConvergentBilateral(&'static str),
    #[error("very-well-poised parameter makes 1-a vanish")]
    SpecialParameterDegenerate,
    #[error("no circle separates the inward poles (max modulus {inside_max:e}) from the outward poles (min modulus {outside_min:e})")]
    NoSeparatingContour { inside_max: f64, outside_min: f64 },
    #[error("trapezoid rule did not converge with {nodes} nodes (change {change:e})")]
    QuadratureNonconvergent { nodes: usize, change: f64 },
    #[error("bilateral sum over x did not converge within |x| <= {0}")]
    BilateralSumNonconvergent(i64),
    #[error("evaluation point hits a pole: {0}")]
    PoleHit(String),
    #[error("auxiliary parameters are degenerate: {0}")]
    DegenerateAuxiliary(String),
    #[error("function has poles excluded by this representation: {0}")]
    PoleConditionViolated(String),
    #[error("denominator vanishes: {0}")]
    DenominatorPole(String),
    #[error("index out of range: {0}")]
    InvalidIndex(String),
    #[error("parameter sampling exhausted after {0} attempts")]
    SamplingExhausted(usize),
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, QsvError>;
