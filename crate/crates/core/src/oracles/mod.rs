//! Closed-form solutions used as ground truth.

mod burgers;
mod erfc;
mod logistic;

pub use burgers::burgers_exact;
pub use erfc::{erf, erfc, erfcx, ln_erfc};
pub use logistic::{logistic_exact, LogisticParams};
