//! Special functions: reciprocal gamma, Wright and Mittag-Leffler functions,
//! and the Wright-function decay envelope.

pub mod decay;
pub mod gamma;
pub mod mittag;
pub mod series;
pub mod wright;

pub use decay::{decay_bound, decay_sigma, DecayBound};
pub use gamma::{gamma, ln_gamma, recip_gamma, sinpi};
pub use mittag::mittag_leffler;
pub use series::{neumaier_sum, CompensatedSum, SeriesStatus, SeriesValue, CANCELLATION_GUARD};
pub use wright::{gen_wright, wright_phi, GenWrightParams, WrightParams};
