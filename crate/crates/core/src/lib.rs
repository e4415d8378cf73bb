//! Fast polar codes.
//!
//! A polar code construction in which every length-16 segment of the
//! u-domain is decodable by a one-shot pattern decoder, together with a
//! pattern-based fast successive-cancellation decoder that runs in either
//! double precision or saturating fixed-point arithmetic.
//!
//! Module map:
//!
//! - [`llr`], [`pattern`], [`code`]: shared domain types.
//! - [`construction`]: reliability orders, segment classification and rate
//!   re-allocation.
//! - [`bch`]: GF(16) arithmetic and the two grafted extended BCH codes.
//! - [`encoder`]: polar transform and full fast-polar encoding.
//! - [`decoder`]: node decoders, the parallel minimum search and the tree
//!   traversal.
//! - [`oracle`]: brute-force references used by the test suites.
//! - [`analysis`]: static traversal-cost accounting and tree export.
//! - [`simulation`]: AWGN channel, quantization front-end and BLER harness.

pub mod analysis;
pub mod bch;
pub mod code;
pub mod construction;
pub mod decoder;
pub mod encoder;
mod error;
pub mod llr;
pub mod oracle;
pub mod pattern;
pub mod simulation;

pub use code::{CodeSpec, FastPolarCode, Layout, SEGMENT_LEN};
pub use error::{Error, Result};
pub use llr::{hard_decision, QuantizedLlr};
pub use pattern::{PatternTag, SegmentPattern};
