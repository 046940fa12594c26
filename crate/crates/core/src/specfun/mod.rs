//! Overflow-safe special-function primitives.

mod eft;
mod gamma;
mod hyper;
mod signed_log;

pub use eft::{compensated_sum, two_prod, two_sum, Expansion, ExtendedReal};
pub use gamma::{factorial_signed, gamma_signed, ln_gamma, poch_signed};
pub use hyper::{
    hyp2f1_at_minus_one, hyp2f1_series, hyp2f1_terminating, hyp4f3_terminating, hyp_terminating,
    HypValue, Precision, RELIABILITY_THRESHOLD,
};
pub use signed_log::SignedLog;
