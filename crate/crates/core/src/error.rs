use alloc::vec::Vec;
use core::fmt;

/// A parameter condition that failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Violation {
    AlphaAboveMinusOne,
    BetaAboveMinusOne,
    GammaAboveMinusOne,
    AlphaBetaGap,
    MPositive,
    NPositive,
    MNGap,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Violation::AlphaAboveMinusOne => "alpha > -1",
            Violation::BetaAboveMinusOne => "beta > -1",
            Violation::GammaAboveMinusOne => "gamma > -1",
            Violation::AlphaBetaGap => "|alpha - beta| < 1",
            Violation::MPositive => "M >= 1",
            Violation::NPositive => "N >= 1",
            Violation::MNGap => "|M - N| < M*N",
        })
    }
}

pub(crate) struct ViolationList<'a>(pub &'a [Violation]);

impl fmt::Display for ViolationList<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameters: violated {}", ViolationList(.0))]
    InvalidParameters(Vec<Violation>),
    #[error("coefficient index {index} out of range (have {available})")]
    IndexOutOfRange { index: usize, available: usize },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("expected probability of state {state} is zero")]
    ZeroExpectedCell { state: usize },
    #[error("observed state {state} lies outside the exact support")]
    SupportMismatch { state: usize },
    #[error("sample of size {total} is too small (need at least {min})")]
    TooFewSamples { total: u64, min: u64 },
    #[error("recursion coefficient a_{index} is zero")]
    DegenerateRecursion { index: usize },
}
