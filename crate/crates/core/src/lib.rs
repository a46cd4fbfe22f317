//! Homogeneous descriptions of complex hyperbolic space `CH(n)` at the Lie
//! algebra level: `su(n,1)` in the second hermitian form, equivariant maps
//! realizing holonomy algebras, canonical connections, Kähler homogeneous
//! structure tensors and their classification.

pub mod classify;
pub mod conngeo;
pub mod error;
pub mod homdesc;
pub mod ktensor;
pub mod linalg;
pub mod matlie;
pub mod tol;

pub use classify::{
    algebraic_class, cross_validate, numeric_class, ClassLabel, CrossValidation, Evidence, Pattern, Support,
};
pub use conngeo::{ConnectionData, Frame, TangentVector};
pub use error::{Error, Result};
pub use homdesc::{
    assemble_modules, construct_phi, special_phi_linear, validate_spec, HolonomySpec, ModuleAssembly, PhiMap,
    SpecialKind, Variant, Violation,
};
pub use ktensor::{KDecomposition, KTensor};
pub use matlie::{CartanPair, IwasawaBasis, SuMatrix};
pub use tol::Tolerances;
