use alloc::string::String;
use alloc::vec::Vec;

use crate::series::Exponent;

/// Errors raised by the core pipeline.
///
/// Cone and facet indices are 0-based; the `Display` output shows them
/// 1-based, matching the input format.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("ray {} is not primitive", .0 + 1)]
    NonPrimitiveRay(usize),
    #[error("cone {} is not smooth", one_based(.0))]
    NotSmooth(Vec<usize>),
    #[error("facet {} does not lie in exactly two maximal cones", one_based(.0))]
    NotComplete(Vec<usize>),
    #[error("basis matrix is not Gale dual to the rays")]
    NotGaleDual,
    #[error("basis matrix is not surjective over the integers")]
    NotSurjectiveOverZ,
    #[error("basis vector {} is not nef over cone {}", .a + 1, one_based(.cone))]
    BasisNotNef { a: usize, cone: Vec<usize> },
    #[error("bundle weights must be nonnegative (bundle {}, entry {})", .j + 1, .a + 1)]
    NegativeBundleWeight { j: usize, a: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("zero divisor in the constant term")]
    ZeroDivisor,
    #[error("constant term is not invertible")]
    SingularConstantTerm,
    #[error("logarithmic derivatives disagree at {d} (directions {}, {})", .a + 1, .b + 1)]
    Inconsistent { d: Exponent, a: usize, b: usize },
    #[error("series to integrate has a nonzero constant term in direction {}", .0 + 1)]
    NonzeroConstant(usize),
    #[error("bundle {} has negative degree on class {d:?}", .j + 1)]
    NegativeBundleDegree { j: usize, d: Vec<i64> },
    #[error("pairing is not polynomial in hbar at {0}")]
    NonPolynomialPairing(Exponent),
    #[error("gauge-fixed connection {} keeps hbar at {d}", .a + 1)]
    ResidualHbar { a: usize, d: Exponent },
    #[error("degree of q{} is negative", .0 + 1)]
    NefViolated(usize),
    #[error("connection {} maps the unit outside degrees 0 and 2 at {d}", .a + 1)]
    ColumnNotInSpan { a: usize, d: Exponent },
    #[error("gauge does not act on the unit by a scalar at {0}")]
    GaugeNotScalar(Exponent),
    #[error("flat connection {} does not send the unit to its generator at {d}", .a + 1)]
    CompatibilityFailed { a: usize, d: Exponent },
    #[error("canonical J-function has wrong asymptotics at {0}")]
    AsymptoticsFailed(Exponent),
    #[error("hbar exponent exceeded the expected bound")]
    RunawayExpansion,
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

fn one_based(v: &[usize]) -> String {
    use core::fmt::Write;
    let mut s = String::from("{");
    for (i, x) in v.iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        let _ = write!(s, "{}", x + 1);
    }
    s.push('}');
    s
}

/// Broad classification used to choose process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Input,
    Validation,
    Invariant,
    Nef,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        use Error::*;
        match self {
            NonPrimitiveRay(_)
            | NotSmooth(_)
            | NotComplete(_)
            | NotGaleDual
            | NotSurjectiveOverZ
            | BasisNotNef { .. }
            | NegativeBundleWeight { .. } => ErrorKind::Validation,
            NefViolated(_) => ErrorKind::Nef,
            DimensionMismatch(_) | InvalidInput(_) => ErrorKind::Input,
            _ => ErrorKind::Invariant,
        }
    }
}

pub type Result<T> = core::result::Result<T, Error>;
