use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("malformed number `{0}`")]
    Number(String),
    #[error("`{0}` is not a dyadic rational")]
    NotDyadic(String),
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown name `{0}`")]
    UnknownName(String),
    #[error("invalid IFS file: {0}")]
    Ifs(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SetError {
    #[error("operation requires a nonempty set")]
    Empty,
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("scale factor must be positive")]
    NonPositiveScale,
    #[error("IFS needs at least one anchor")]
    NoAnchors,
    #[error("anchor {0} lies outside the cube [-1,1]^m")]
    AnchorOutsideCube(usize),
}

/// A search loop ran past the configured effort ceiling.
///
/// Stands in for divergence: operations whose precondition fails would
/// otherwise never return.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("effort ceiling {ceiling} exhausted")]
pub struct EffortExhausted {
    pub ceiling: u32,
}
