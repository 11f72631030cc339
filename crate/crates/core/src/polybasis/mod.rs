//! Polynomial bases and the Λ operator of a weighted-sum-of-squares cone.

mod basis;
mod lambda;

pub use basis::{
    chebyshev_mul, chebyshev_table, graded_lex, product_in, Basis, BasisId, BasisKind, Exponent,
    Poly,
};
pub use lambda::{basis_product_expand, build_lambda, ConeSpec, LambdaOp, PolyVec};

