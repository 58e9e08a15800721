//! Exact construction, verification and refutation of cloning processes on
//! linear symplectic spaces, with a finite-dimensional quantum counterpart
//! and a categorical diagram checker covering both.
//!
//! The classical side runs entirely in exact rational arithmetic; the quantum
//! side and the numerical probe use `f64`.

pub mod category;
pub mod cloning;
pub mod error;
pub mod form;
pub mod matrix;
pub mod probe;
pub mod quantum;
pub mod random;
pub mod rational;

pub use category::{
    check_cloning_diagram, check_traditional_diagram, CloningDiagram, DiagramReport, HilbertInstance, HilbertSpace,
    Readout, StateCheck, StateSample, SymmetricMonoidal, SympArrow, SymplecticInstance,
};
pub use cloning::{
    basic_cloner, general_cloner, product_cloner, readout_solver, shuffle_permutation, size_witness, standard_cloner,
    trivial_cloner, verify_cloning, CloningFailure, CloningProcess, DefectEntry, ReadoutOutcome, SizeCandidate,
    SizeWitness, Verdict, VerificationReport,
};
pub use error::{Error, Result};
pub use form::{darboux_basis, direct_sum, form_kernel, is_symplectic_map, standard_form, symplectic_defect, SkewForm};
pub use matrix::RatMatrix;
pub use probe::{clone_residual_probe, ProbeResult};
pub use quantum::{basis_cloner, kron, refute_cloning, ComplexMatrix, ComplexVector, Refutation, ISOMETRY_TOL};
pub use rational::{format_rational, int, parse_rational, rat, Rational};
