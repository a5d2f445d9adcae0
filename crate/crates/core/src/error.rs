use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("not divisible by p: {0}")]
    NotDivisible(String),
    #[error("homomorphisms do not agree modulo p on variable `{0}`")]
    NotLiftPair(String),
    #[error("log variable `{var}` maps to {image}, which is not a log monomial times a unit")]
    LogViolation { var: String, image: String },
    #[error("{0} is not a unit")]
    NotUnit(String),
    #[error("Higgs field is not nilpotent within exponent {bound}")]
    NotNilpotent { bound: usize },
    #[error("Higgs field components {0} and {1} do not commute")]
    NotCommuting(usize, usize),
    #[error("exponent {exponent} exceeds the allowed bound {bound} (p = {p}){}", location_suffix(.location))]
    ExponentTooLarge { exponent: usize, bound: usize, p: u64, location: Option<String> },
    #[error("{r}! is not invertible modulo {p}")]
    FactorialNotInvertible { r: usize, p: u64 },
    #[error("matrix is not nilpotent of order {order}")]
    NotNilpotentEnough { order: usize },
    #[error("cocycle condition fails on {0}")]
    CocycleFailure(String),
    #[error("Higgs fields are not intertwined on overlap {0}")]
    HiggsMismatch(String),
    #[error("connection matrices are not gauge compatible on overlap {0}")]
    GaugeMismatch(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("not a Frobenius lift: {0}")]
    NotAFrobeniusLift(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

fn location_suffix(loc: &Option<String>) -> String {
    match loc {
        Some(l) => format!(" at {l}"),
        None => String::new(),
    }
}

impl Error {
    /// Attaches a location to errors that carry one.
    pub fn at(self, loc: impl Into<String>) -> Self {
        match self {
            Error::ExponentTooLarge { exponent, bound, p, location: None } => {
                Error::ExponentTooLarge { exponent, bound, p, location: Some(loc.into()) }
            }
            Error::Invalid(msg) => Error::Invalid(format!("{}: {msg}", loc.into())),
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
