//! Exact arithmetic over F2: polynomials, truncated series and graded linear algebra.

pub mod laurent;
pub mod linalg;
pub mod poly;
pub mod series;
pub mod vars;

pub use laurent::{invert_f, ESeries, InverseTable};
pub use linalg::{
    graded_quotient_dim, graded_slice_rank, monomials_of_degree, BitRow, Echelon, MonomialIndex,
};
pub use poly::{F2Poly, Monomial, TruncCtx};
pub use series::PowerSeries;
pub use vars::VarTable;
