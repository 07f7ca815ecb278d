//! Towers of purely inseparable degree-p extensions over rational function
//! fields, element arithmetic, and semilinear linear algebra over them.

mod element;
mod kernel;
mod linsolve;
mod span;
mod tower;
mod value;

pub(crate) use element::common_tower as common_tower_of;
pub use element::TowerElement;
pub(crate) use kernel::{greedy_independent, kernel_values, pivot_profile, ppower_span_rank_values};
pub use kernel::{ppower_span_rank, semilinear_kernel, ElementVector};
pub(crate) use linsolve::independent_subset;
pub(crate) use span::{in_span, intersection_values};
pub use span::{span_intersection, span_membership};
pub use tower::{FieldTower, RootSpec};
pub use value::Value;

use crate::polyring::PolyError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TowerError {
    #[error("elements belong to unrelated towers")]
    TowerMismatch,
    #[error("name `{0}` is already used in this tower")]
    DuplicateName(String),
    #[error("`{0}` is not a valid identifier")]
    InvalidName(String),
    #[error("unknown variable or root `{0}`")]
    UnknownName(String),
    #[error("radicand is zero")]
    ZeroRadicand,
    #[error("radicand {0} is already a p-th power")]
    AlreadyPthPower(String),
    #[error("empty input")]
    EmptyInput,
    #[error("vectors have different lengths")]
    LengthMismatch,
    #[error(transparent)]
    Poly(#[from] PolyError),
}
