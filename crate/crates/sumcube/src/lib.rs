//! Verified pipeline showing that the fixed point of the morphism
//! 0→03, 1→43, 3→1, 4→01 over {0, 1, 3, 4} contains no additive cube —
//! no three consecutive blocks of equal length and equal sum.
//!
//! The crate re-derives every constant and finite set the argument rests
//! on, in validated ball arithmetic with decisive comparisons:
//!
//! - [`word`]: the morphism, its fixed point, Parikh bookkeeping and the
//!   two-sided variant;
//! - [`ball`] / [`spectral`]: midpoint–radius arithmetic and certified
//!   eigendata of the incidence matrix;
//! - [`bounds`]: the walk-vector set, the eigencoordinate bound constants
//!   and the finite difference-vector set they induce;
//! - [`graph`]: the template graph with its start set and the exhaustive
//!   reachability search whose emptiness result is the proof;
//! - [`oracle`]: paper-independent brute-force additive-power detection
//!   and backtracking searches over arbitrary integer alphabets;
//! - [`certificate`]: reproducible JSON/CSV records of every run.

pub mod ball;
pub mod bounds;
pub mod certificate;
pub mod graph;
pub mod oracle;
pub mod spectral;
pub mod word;

use thiserror::Error as ThisError;

/// Errors across the pipeline. Precision-related variants indicate a
/// comparison or enclosure the ball arithmetic could not certify; they
/// abort the computation rather than guess.
#[derive(Debug, ThisError)]
pub enum Error {
    #[error("letter value {0} is not in the alphabet {{0, 1, 3, 4}}")]
    BadLetter(u8),
    #[error("character {0:?} is not a digit")]
    BadWord(char),
    #[error("morphism images must be nonempty")]
    ErasingMorphism,
    #[error("image of 0 must begin with 0")]
    NotProlongable,

    #[error("undecided ball comparison: {context}")]
    Undecided { context: String },
    #[error("division by a ball containing zero")]
    DivisorContainsZero,
    #[error("square root of a ball below zero (hi = {hi})")]
    NegativeSqrt { hi: f64 },
    #[error("{what}: radius {radius:e} exceeds budget {budget:e}")]
    PrecisionExceeded {
        what: String,
        radius: f64,
        budget: f64,
    },
    #[error("no decisive sign change on [{lo}, {hi}]")]
    NoBracket { lo: f64, hi: f64 },
    #[error("interval Newton failed to contract on [{lo}, {hi}]")]
    NoContraction { lo: f64, hi: f64 },

    #[error("set membership undecided for vector {vector}")]
    UndecidedMembership { vector: word::Vec4 },
    #[error("relaxed enumeration bound {relaxed} is not above the certified constant")]
    BoundNotRelaxed { relaxed: f64 },
    #[error("start template outside the search universe: {0}")]
    StartOutsideUniverse(String),
    #[error("template reachable by construction was not found in the search: {0}")]
    UnreachableTemplate(String),
    #[error("search depth exceeded the configured ceiling {ceiling}")]
    DepthCeiling { ceiling: usize },
    #[error("word contains letters outside the declared alphabet")]
    LetterOutsideAlphabet,
    #[error("alphabet must be nonempty with distinct letters")]
    BadAlphabet,
    #[error("cannot parse word component {0:?}")]
    WordParse(String),
}

pub use ball::{Ball, BallCmp, CBall};
pub use word::{parikh, two_sided_window, FixedPoint, IncidenceMatrix, Letter, Morphism, Vec4, Word};
