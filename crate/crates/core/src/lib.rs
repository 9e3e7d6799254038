//! Collision-probability estimation over large discrete alphabets.
//!
//! * [`distribution`] builds pmfs and draws seeded i.i.d. histograms.
//! * [`estimator`] computes the collision estimator, the uniformity tester
//!   and collision-entropy estimates.
//! * [`bounds`] evaluates sub-gamma tails and the estimator's tail envelope.
//! * [`moments`] holds exact moment oracles and the moment bounds they check.
//! * [`harness`] runs reproducible Monte Carlo and exact-enumeration experiments.
//! * [`cli`] is the command-line front end used by the `collision` binary.
//!
//! ```
//! use collision::distribution::{uniform, sample_histogram, SampleSeed};
//! use collision::estimator::{estimate_from_histogram, uniformity_test, Decision};
//!
//! let pmf = uniform(10_000).unwrap();
//! let hist = sample_histogram(&pmf, 2_000, SampleSeed::new(7, 0)).unwrap();
//! let est = estimate_from_histogram(&hist).unwrap();
//! assert!(est.q_hat < 1e-3);
//! let verdict = uniformity_test(&hist, 10_000, 0.5).unwrap();
//! assert_eq!(verdict.decision, Decision::Uniform);
//! ```

pub mod bounds;
pub mod cli;
pub mod defaults;
pub mod distribution;
pub mod error;
pub mod estimator;
pub mod harness;
pub mod moments;
pub mod numeric;

pub use error::{Error, Result};
