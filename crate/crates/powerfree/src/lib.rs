//! Exact computation toolkit for power-free values of multivariate integer
//! polynomials.
//!
//! The crate computes, with exact arithmetic throughout:
//!
//! * k-free counts `N_{F,k}(B)` over integer boxes and over prime inputs
//!   ([`counting`]);
//! * local root densities `rho_F(m)`, the prime-input variant `rho*_F`, and
//!   univariate densities with Hensel-lifted prime-power counts
//!   ([`local_density`]);
//! * truncated Euler products for the leading constants `C_{F,k}` and
//!   `C'_{F,k}` ([`euler_product`]);
//! * the simple-sieve decomposition `N1/N2/N3`, the Möbius main-term
//!   estimator, and codimension-2 congruence counts ([`sieve`]);
//! * determinant-method parameters: Newton polyhedron maxima, exponent sets,
//!   the parameter `W`, monomial matrices and dyadic counts ([`detmethod`]);
//! * an experiment harness with CSV/JSON reports ([`experiment`]).
//!
//! Polynomials are sparse exact-integer objects ([`polynomial::MultiPoly`]);
//! boxes are symmetric integer ranges ([`polynomial::LatticeBox`]).

pub mod arith;
pub mod counting;
pub mod detmethod;
pub mod error;
pub mod euler_product;
pub mod experiment;
pub mod local_density;
mod modp;
pub mod polynomial;
mod scan;
pub mod sieve;

pub use error::{Error, Result};
pub use polynomial::{LatticeBox, MultiPoly};

/// Work limits for enumeration-style operations.
///
/// `tuples` bounds residue enumerations (density computations); `points`
/// bounds lattice-point scans (counting and sieving). Checked before work
/// starts so an over-budget request fails fast.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub tuples: u64,
    pub points: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            tuples: 100_000_000,
            points: 1_000_000_000,
        }
    }
}

impl Budget {
    pub fn uniform(limit: u64) -> Self {
        Budget {
            tuples: limit,
            points: limit,
        }
    }

    pub(crate) fn check_tuples(&self, required: u128) -> Result<()> {
        if required > self.tuples as u128 {
            Err(Error::BudgetExceeded {
                required,
                budget: self.tuples,
            })
        } else {
            Ok(())
        }
    }

    pub(crate) fn check_points(&self, required: u128) -> Result<()> {
        if required > self.points as u128 {
            Err(Error::BudgetExceeded {
                required,
                budget: self.points,
            })
        } else {
            Ok(())
        }
    }
}
