//! Doppler-resilient complementary waveform design.
//!
//! A pulse train alternates the two sequences of a Golay pair according to
//! a transmit order `s` and weights received pulses by `w`. Range sidelobes
//! at Doppler `theta` scale with `F(theta) = sum s_m w_m exp(j theta m)`,
//! so placing high-order zeros of `F` at chosen Doppler shifts blanks the
//! range sidelobes there. This crate designs `(s, w)` under such null
//! constraints while keeping `w` close to a window template, and evaluates
//! the resulting composite ambiguity function.
//!
//! Modules, bottom-up:
//!
//! - [`sequences`]: Golay pairs, ACFs, PTM and standard orders, windows.
//! - [`nullspec`]: annihilating polynomial, convolution matrix, constraint
//!   basis, and the partitioning quadratic form.
//! - [`sdp`]: interior-point solver for the unit-diagonal SDP relaxation.
//! - [`design`]: randomized rounding, amplitude recovery, the full design
//!   pipeline, and the PTM / binomial / uniform baselines.
//! - [`analysis`]: CAF, PRSL, RSBA, DMBR, PDSL, NAG.
//! - [`document`]: versioned JSON design documents and verification.

pub mod analysis;
pub mod design;
pub mod document;
pub mod error;
pub mod linalg;
pub mod nullspec;
pub mod sdp;
pub mod sequences;

pub use error::{Error, Result};

/// Deterministic 64-bit seed derivation (SplitMix64 finalizer over the
/// master seed and a tag), used to give independent jobs their own seeds.
pub fn derive_seed(master: u64, tag: u64) -> u64 {
    let mut z = master ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
