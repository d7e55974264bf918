use alloc::string::String;

/// Errors raised by the algebra, representation and Fock-space layers.
///
/// Check failures are never reported through this type; they are entries in
/// the various report structs.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("width mismatch: {left} vs {right}")]
    WidthMismatch { left: usize, right: usize },

    #[error("loop parameter mismatch between operands")]
    LambdaMismatch,

    #[error("resource limit exceeded: {what} = {value} > {limit}")]
    ResourceLimit { what: &'static str, value: usize, limit: usize },

    #[error("generator index {index} out of range for {name} at width {width}")]
    IndexOutOfRange { name: &'static str, index: usize, width: usize },

    #[error("singular parameter: {0}")]
    SingularParameter(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("unsupported diagram feature: {0}")]
    Unsupported(String),

    #[error("structural error: {0}")]
    Structural(String),

    #[error("consistency error: {0}")]
    Consistency(String),

    #[error("invalid diagram: {0}")]
    InvalidDiagram(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = core::result::Result<T, Error>;
