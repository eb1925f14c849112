//! Causal structure learning driven by quantitative argumentation over
//! conditional-independence tests.
//!
//! The pipeline has two data-facing entry points: [`qacd::qacd_discover`]
//! aggregates independence arguments through a dialectical fixed point and
//! returns a CPDAG, while [`pc::pc_discover`] runs the order-stable PC
//! baseline. Both consume any [`ci::CiProvider`], so they run unchanged on
//! sampled data (chi-square tests) or on a ground-truth network
//! (d-separation oracle).

pub mod bn;
pub mod ci;
pub mod graph;
pub mod metrics;
pub mod pc;
pub mod qacd;
pub mod util;
