//! Modules over the representation ring `R(S^1) = Z[σ, σ^{-1}]`.

mod laurent;
mod module;

pub use laurent::{cyclotomic_divisibility, in_cyclic_ideal, poly_mul, poly_reduce, stab_equiv_check, LaurentPoly};
pub use module::{
    ao, compare_actions_by_mao, is_injective, mao, mod_augmentation_map, phi_connecting_map, quotient_mod_in,
    stable_sigma_fixed, torsion_kernel_stabilization, xi_iota_maps, Injectivity, ModuleElement, Order, RModule,
    StableFixed, Summand, Truncation, XiIota,
};
