//! Harvesting small prime power residues through reciprocity polynomials.
//!
//! For an odd prime p, each supported case pairs a polynomial f with a
//! window (x, Q] such that any prime q dividing some f(n), n <= x, outside
//! a short exclusion list, is certified a k-th power residue mod p by a
//! reciprocity criterion. The pipeline has four stages:
//!
//! 1. build: represent p (Cornacchia descent or a binary quadratic form)
//!    and assemble the case's polynomial ([`residue_polys`]).
//! 2. harvest: factor f(1), ..., f(x) and collect one witness per prime
//!    power division event ([`residue_polys::collect_witnesses`]).
//! 3. certify: recheck every harvested prime against the direct order
//!    test, plus exact log-sum and root-count oracles ([`oracle`]).
//! 4. audit: evaluate the counting thresholds, validity regimes, and the
//!    final inequality chains at the run's actual (p, epsilon)
//!    ([`bound_audit`]).
//!
//! Supporting layers: [`numtheory`] (primality, sieving, Jacobi symbols,
//! modular square roots, Hensel lifting), [`poly`] (integer polynomials),
//! [`representations`] (Cornacchia and quadratic forms), and [`xreal`]
//! (192-bit reals and exact small rationals).

pub mod bound_audit;
pub mod numtheory;
pub mod oracle;
pub mod poly;
pub mod representations;
pub mod residue_polys;
pub mod xreal;

pub use numtheory::PrimeModulus;
pub use xreal::{Ratio, Real};
