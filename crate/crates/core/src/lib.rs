//! Exact solving of structured polynomial systems on unirational varieties
//! given by a Khovanskii basis.
//!
//! The pipeline: build the Khovanskii–Macaulay matrix of the system in a working
//! degree, compute its kernel exactly, form commuting multiplication matrices,
//! and read the solutions off a joint eigenvector basis.

pub mod catalog;
pub mod eigen;
pub mod field;
pub mod hilbert;
pub mod khov;
pub mod km;
pub mod linalg;
pub mod par;
pub mod poly;
pub mod solver;

pub use field::{Field, FieldSpec, PrimeField, Rationals};
pub use khov::{GradedBasis, GradedSupport, KhovanskiiReport, Parameterization, SubductionResult};
pub use km::{km_matrix, km_shape, CoefficientForm, EquationSpec, KMMatrix, StructuredSystem};
pub use num_complex::Complex64;
pub use poly::{Exponents, MultiPoly, WeightOrder};
pub use solver::{solve, KernelBasis, MultiplicationSystem, SolutionSet, SolveOptions};
