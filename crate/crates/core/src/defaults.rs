//! Committed constants. Each was fitted once with the harness and is
//! mirrored in `configs/defaults.json`; the other files under `configs/`
//! reproduce the fits.

use crate::bounds::TailEnvelope;
use crate::moments::BinMomentConstants;

/// Sample-size constant of the uniformity tester.
pub const TESTER_C: f64 = 2.5;

/// Sample-size constant of relative-error collision estimation.
pub const ENTROPY_C: f64 = 6.0;

/// Sub-runs in the median arm of a boosting comparison.
pub const BOOST_K: u32 = 9;

/// Constant of the symmetric-difference moment bound.
pub const SYMM_DIFF_C: f64 = 1.0;

/// Constants of the bin-moment bound. The smallest common value on the
/// fitting grid is about 1.99.
pub const BIN_MOMENT: BinMomentConstants = BinMomentConstants { c1: 2.5, c2: 2.5 };

/// Tail-envelope constants fitted by `configs/calibrate_tail.json`.
pub const TAIL_ENVELOPE: TailEnvelope = TailEnvelope {
    c_out: 1.0,
    c_sq: 0.116_626_845_052_433_27,
    c_lin: 0.116_626_845_052_433_27,
    c_heavy: 0.116_626_845_052_433_27,
};

pub fn tail_envelope() -> TailEnvelope {
    TAIL_ENVELOPE
}
