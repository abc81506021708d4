//! Twisted complexes over a finite strictly unital A-infinity category.

mod category;
mod object;
mod ops;
mod reduce;

pub use category::{AInfCategory, MAX_HOM_DIM};
pub use object::{
    h_product, hf, hom_complex, is_cocycle, mu1, mu_tw, validate_mc, compose2, Components,
    DeltaEntry, HProduct, HomBasis, HomComplex, TwMorphism, TwObject, TwObjectSpec,
};
pub use ops::{
    build_tn, check_spherical, coevaluation, cone, epsilon, evaluation, evaluation_identity,
    hat_chain, hom_module_left, hom_module_right, twist, untwist,
};
pub use reduce::{quotient, reduce, Subcomplex};
