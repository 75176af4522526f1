use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("invalid morphism: {0}")]
    InvalidMorphism(String),
    #[error("morphisms are not composable: {0}")]
    NotComposable(String),
    #[error("invalid tree: {0}")]
    InvalidTree(String),
    #[error("{key} is not a generator of {instance}: {reason}")]
    NotAGenerator {
        instance: String,
        key: String,
        reason: String,
    },
    #[error("coefficient ring mismatch: {0}")]
    Ring(String),
    #[error("instance is not connected: {0}")]
    NotConnected(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unknown instance: {0}")]
    UnknownInstance(String),
    #[error("unsupported operation: {0}")]
    Unsupported(String),
    #[error("invalid category: {0}")]
    InvalidCategory(String),
}

pub type Result<T> = std::result::Result<T, Error>;
