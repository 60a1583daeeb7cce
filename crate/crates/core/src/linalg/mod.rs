//! Exact dense and sparse linear algebra over ℚ and ℚ(i).

mod echelon;
mod ldl;
mod mat;
mod quotient;
mod sparse;

pub use echelon::{free_columns, inverse, kernel, rank, rref, solve, Subspace};
pub use ldl::{ldl_certify_psd, quadratic_form, LdlCertificate, PsdViolation};
pub use mat::{add, axpy, conj, first_difference, fmt_vector, hdot, is_zero, scale, sub, unit, zeros, Mat, Vector};
pub use quotient::{quotient, sparse_from_dense, Quotient, SparseEchelon, SparseVec};
pub use sparse::SparseMat;
