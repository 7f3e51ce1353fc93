//! Exact linear algebra over the integers and rationals for log-linear
//! (toric) statistical models, plus the Markov-chain machinery that sits on
//! top of it: toric Markov chains, reversibility checks and reversible
//! parameterizations.
//!
//! The crate is organized bottom-up:
//!
//! * [`matrix`] — arbitrary-precision integer matrices, Hermite normal form,
//!   saturated integer kernels, rational rank/determinant.
//! * [`lattice`] — Hilbert bases of `{y >= 0 : K y = 0}` by completion, Graver
//!   bases by conformal completion, the conformal order itself.
//! * [`amodel`] — monomial models `q(x;t) = prod_i t_i^{A_i(x)}` with a base
//!   measure, their binomial invariants, parameter confounding, model
//!   equivalence, monoid closures and faces.
//! * [`design`] — the model's support as a design in `Z^m`, monomial bases by
//!   Buchberger-Moller elimination, exact indicator polynomials and moments
//!   through the action of `f(t d/dt)` on the partition function.
//! * [`graph`], [`tmc`] — transition graphs, trajectory counts, realizability
//!   (Euler conditions), toric Markov chain densities, homogeneity, transfer
//!   matrix partition functions and expected counts.
//! * [`cycles`], [`reversible`] — elementary cycle enumeration and trajectory
//!   decomposition, Kolmogorov's criterion, detailed balance solving, the
//!   cocycle matrix, the edge/cut parameterization of reversible kernels,
//!   Metropolis-style constructions and path-reversal divergence.
//! * [`json`], [`cli`] — the file formats and the `toricmc` command line tool.
//!
//! ```
//! use toricmc::amodel::AModel;
//! use toricmc::matrix::IntMatrix;
//!
//! // Binomial-type model on {0,..,5}: q(x;t) = t0 * t1^x, mu(x) = C(5,x).
//! let a = IntMatrix::from_i64_rows(&[vec![1; 6], vec![0, 1, 2, 3, 4, 5]]).unwrap();
//! let model = AModel::with_binomial_weights(a).unwrap();
//! assert_eq!(model.kernel_basis().vectors().len(), 4);
//! let h = model.closure(1_000_000).unwrap();
//! assert_eq!(h.matrix().rows(), 3); // all-ones row plus the two extreme rays
//! ```

pub mod amodel;
pub mod cli;
pub mod cycles;
pub mod design;
pub mod error;
pub mod graph;
pub mod json;
pub mod lattice;
pub mod matrix;
pub mod reversible;
pub mod tmc;

pub use amodel::{AModel, Binomial, Density};
pub use cycles::{Cycle, CycleCensus};
pub use design::{Design, PolyOnDesign, TermOrder};
pub use error::{Error, Result};
pub use graph::{Realizability, Trajectory, TransitionCount, TransitionGraph};
pub use lattice::{GraverElement, HilbertBasis, LatticeBasis, DEFAULT_MAX_CANDIDATES};
pub use matrix::IntMatrix;
pub use reversible::{Combiner, KolmogorovVerdict, ReversibleParam};
pub use tmc::{Homogeneity, TmcParam};
