//! Numerical toolkit for mutual-information independence testing and
//! sparsity-boosted Bayesian network scoring.
//!
//! The library computes Type-II-error probabilities ("beta-values") of the
//! mutual-information independence test, exactly by enumerating type classes
//! and approximately by importance-sampled Monte Carlo integration. Beta-values
//! are cached in interpolation tables and consumed by a network scoring
//! function that rewards absent edges by the evidence for independence.
//! Closed-form sample-complexity calculators and a study of the KL geometry
//! of the independence region round out the API.
//!
//! Modules, bottom up:
//!
//! - [`simplex`]: distributions on k x l contingency tables, entropy, KL
//!   divergence, mutual information, product projections, and the
//!   one-parameter constant-marginal paths used everywhere else.
//! - [`typespace`]: enumeration of frequency-count vectors (type classes) via
//!   a prefix tree, with exact multinomial emission probabilities.
//! - [`stepcdf`]: step-function CDFs over mutual-information values; exact
//!   beta-value computation by full enumeration, serial or partitioned.
//! - [`mcint`]: Monte Carlo estimation of beta-values with an importance
//!   sampling plan tuned to the acceptance region.
//! - [`betatable`]: interpolation tables of log beta-values over a grid of
//!   sample sizes and normalized KL coordinates, with file persistence.
//! - [`bayesnet`]: DAGs over binary variables, forward sampling, empirical
//!   counts, conditional pair tables, and separating-set machinery.
//! - [`score`]: the sparsity-boosted scoring function and an exhaustive
//!   small-n structure learner.
//! - [`bounds`]: closed-form sample-complexity and tail-bound calculators.
//! - [`iproj`]: numerical study of the KL-nearest independent distributions
//!   and the threshold where the nearest point splits in two.

#![warn(missing_docs)]

pub mod bayesnet;
pub mod betatable;
pub mod bounds;
pub mod iproj;
pub mod mcint;
mod numeric;
pub mod score;
pub mod simplex;
pub mod stepcdf;
pub mod typespace;

/// Errors reported by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument lies outside an operation's mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// Persisted data is malformed.
    #[error("parse error: {0}")]
    Parse(String),
    /// An underlying I/O operation failed.
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Builds a domain error from anything displayable.
    pub fn domain(msg: impl std::fmt::Display) -> Self {
        Error::Domain(msg.to_string())
    }
}

/// Formats a float with 17 significant digits, enough for exact round-trip
/// through text.
pub fn sig17(x: f64) -> String {
    format!("{x:.16e}")
}

#[cfg(test)]
mod tests {
    use super::sig17;

    #[test]
    fn sig17_round_trips() {
        for &x in &[0.0, 1.0, -2.5, 0.1 + 0.2, 1e-300, 6.02214076e23, std::f64::consts::LN_2] {
            let parsed: f64 = sig17(x).parse().unwrap();
            assert_eq!(parsed.to_bits(), x.to_bits());
        }
    }
}
