//! Jets, closed-form descriptors, pointwise tensors and tensor fields.

pub mod expr;
pub mod field;
pub mod jet;
pub mod point;
pub mod tensor;

pub use expr::{Expr, Vars};
pub use field::{
    bracket_jets, constant_field, d_coeffs, exterior_derivative, exterior_derivative_twice, lie_bracket,
    lie_bracket_jet, ExprField, TensorField,
};
pub use jet::{ComplexJet2, Differentiable, Jet1, JetAlgebra, Linear, C, I, ONE, ZERO};
pub use point::{conj_index, ChartPoint};
pub use tensor::{Slot, TensorValue};
