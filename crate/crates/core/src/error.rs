use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// `a12^L · a12^R <= 0`: orbits cannot cross the separation line in both directions.
    #[error("no canonical form: a12_L * a12_R = {product} is not positive")]
    Canonicalization { product: f64 },

    #[error("outside the admissible domain: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("contract violated: {0}")]
    Contract(String),

    #[error("orbit does not return to the separation line")]
    NoReturn,

    #[error("non-transversal contact with the separation line at t = {t}, y = {y}")]
    Tangency { t: f64, y: f64 },

    #[error("orbit reaches the sliding interval at y = {y}")]
    SlidingEncountered { y: f64 },
}
