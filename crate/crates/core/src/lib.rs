pub mod automorphism;
pub mod chart;
pub mod error;
pub mod fields;
pub mod flow;
pub mod membership;
pub mod rational;
pub mod parse;
mod span;
pub mod surface;
pub mod unipoly;
pub mod z2;

pub use automorphism::{AutoGenerator, PolynomialAutomorphism, ZDegree};
pub use chart::ChartElement;
pub use error::{Error, Result};
pub use membership::{BracketExpression, BracketType, Certificate, Leaf, MembershipVerdict, SpanningFamily};
pub use flow::{FlowMap, ParamPoly, ShearKind};
pub use fields::{AlgebraicVectorField, ChartOneForm, LndVerdict, Potential, DEFAULT_LND_BOUND};
pub use rational::Rational;
pub use surface::{FormalPoly, Monomial, Surface, SurfacePolynomial};
pub use unipoly::UniPoly;
pub use z2::{Z2Grading, Z2Report, Z2Row};
