//! Degrees-of-freedom workbench for K-user MISO interference channels whose
//! receivers switch between preset antenna modes.
//!
//! The crate computes linear sum-DoF upper bounds, builds blind interference
//! alignment schemes (binary beamforming vectors plus preset-mode patterns) and
//! checks them by exact rank computation over random integer channels.

pub mod alignment;
pub mod bounds;
pub mod converse;
pub mod error;
pub mod linalg;
pub mod lp;
pub mod model;
pub mod scheme_io;
pub mod synth;
pub mod verifier;

pub use error::{BiaError, Result};
pub use model::{
    AlignmentSet, AntennaId, CellularConfig, ChannelRealization, Direction, Scheme, SymbolId,
    SystemConfig, Violation,
};
pub use num_rational::{BigRational, Rational64};

/// Fixed-point rendering with six digits after the decimal point, rounded half
/// away from zero.
pub fn decimal(r: Rational64) -> String {
    let num = *r.numer() as i128;
    let den = *r.denom() as i128;
    let scaled = num * 1_000_000;
    let q = (2 * scaled + den.signum() * scaled.signum() * den) / (2 * den);
    let sign = if q < 0 { "-" } else { "" };
    let q = q.abs();
    format!("{sign}{}.{:06}", q / 1_000_000, q % 1_000_000)
}

/// `num/den`, or just `num` when the denominator is one.
pub fn fraction(r: Rational64) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}
