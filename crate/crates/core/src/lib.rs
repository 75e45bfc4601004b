//! Adaptive-depth fermionic classical shadows.
//!
//! Random brickwork matchgate circuits of tunable depth are used as the
//! measurement primitive of a classical-shadow protocol for fermionic
//! observables. The crate contains the Majorana algebra, the circuit layer,
//! two simulation backends (dense state vector and Gaussian covariance),
//! several engines for the shadow-channel eigenvalues, the estimator itself,
//! the depth recommender and the experiment drivers behind the CLI.

pub mod alpha;
pub mod depth;
pub mod error;
pub mod experiments;
pub mod gaussian;
pub mod majorana;
pub mod matchgate;
pub mod pfaffian;
pub mod rng;
pub mod shadow;
pub mod statevector;

pub use error::{Error, Result};
pub use gaussian::CovarianceMatrix;
pub use majorana::{FermionObservable, MajoranaString, Pauli, PauliString};
pub use matchgate::{BrickworkCircuit, Gate, GlobalOrthogonal, OrthogonalBlock};
pub use statevector::StateVector;
