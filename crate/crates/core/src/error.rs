use thiserror::Error;

/// Errors raised by the ring, field, automorphism and certificate layers.
///
/// Every variant carries a stable machine-readable code (see [`Error::code`])
/// so that front ends can report failures without matching on messages.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("the defining polynomial is zero")]
    ZeroPolynomial,
    #[error("the defining polynomial must have degree at least 1")]
    ConstantPolynomial,
    #[error("the defining polynomial has a repeated root: gcd(p, p') = {gcd}")]
    RepeatedRoot { gcd: String },
    #[error("division by the zero polynomial")]
    DivisionByZeroPolynomial,
    #[error("chart element does not descend to the surface: coefficient of x^{exponent} is not divisible by p^{power}")]
    NotOnSurface { exponent: i64, power: u32 },
    #[error("vector field is not tangent to the surface: y*X + x*Y - p'(z)*Z = {defect}")]
    NotTangent { defect: String },
    #[error("vector field is not volume preserving")]
    NotVolumePreserving,
    #[error("the dx-component of the interior product has a nonzero residue at x = 0")]
    ResidueObstruction,
    #[error("point ({x}, {y}, {z}) does not lie on the surface")]
    PointNotOnSurface { x: String, y: String, z: String },
    #[error("vector field is not locally nilpotent within {bound} iterations")]
    NotNilpotent { bound: usize },
    #[error("degree gate: {0}")]
    DegreeGate(String),
    #[error("invalid generator: {0}")]
    InvalidGenerator(String),
    #[error("word is not a composition of shears: {0}")]
    NotAShearWord(String),
    #[error("potential is not a Lie combination of LNDs (absolute-term remainder {remainder})")]
    NotInLieAlgebra { remainder: String },
    #[error("no shears-only certificate found within potential degree {max_degree}")]
    SearchExhausted { max_degree: u32 },
    #[error("expression is not a left-nested bracket of shear fields")]
    MalformedNesting,
    #[error("operation requires the surface xy = z^2 - 1, got p = {p}")]
    WrongSurface { p: String },
    #[error("target monomial z^{z}*{var}^{power} has even total degree")]
    ParityViolation { z: u32, var: char, power: u32 },
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("negative exponent at position {position}")]
    NegativeExponent { position: usize },
    #[error("malformed certificate: {0}")]
    Certificate(String),
    #[error("internal invariant violated: {0}")]
    InternalInvariantViolation(String),
}

impl Error {
    /// Stable identifier for the error kind.
    pub fn code(&self) -> &'static str {
        match self {
            Error::ZeroPolynomial => "zero_polynomial",
            Error::ConstantPolynomial => "constant_polynomial",
            Error::RepeatedRoot { .. } => "repeated_root",
            Error::DivisionByZeroPolynomial => "division_by_zero_polynomial",
            Error::NotOnSurface { .. } => "not_on_surface",
            Error::NotTangent { .. } => "not_tangent",
            Error::NotVolumePreserving => "not_volume_preserving",
            Error::ResidueObstruction => "residue_obstruction",
            Error::PointNotOnSurface { .. } => "point_not_on_surface",
            Error::NotNilpotent { .. } => "not_nilpotent",
            Error::DegreeGate(_) => "degree_gate",
            Error::InvalidGenerator(_) => "invalid_generator",
            Error::NotAShearWord(_) => "not_a_shear_word",
            Error::NotInLieAlgebra { .. } => "not_in_lie_algebra",
            Error::SearchExhausted { .. } => "search_exhausted",
            Error::MalformedNesting => "malformed_nesting",
            Error::WrongSurface { .. } => "wrong_surface",
            Error::ParityViolation { .. } => "parity_violation",
            Error::Syntax { .. } => "syntax_error",
            Error::NegativeExponent { .. } => "negative_exponent",
            Error::Certificate(_) => "malformed_certificate",
            Error::InternalInvariantViolation(_) => "internal_invariant_violation",
        }
    }

    pub fn is_internal(&self) -> bool {
        matches!(
            self,
            Error::InternalInvariantViolation(_) | Error::ResidueObstruction
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
