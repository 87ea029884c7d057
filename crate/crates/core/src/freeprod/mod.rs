//! Reduced free products of finite-dimensional filtered algebras: component
//! algebras given by structure tensors, the reduced word basis, the product
//! of words, the cell decomposition of blocks and the free-product bound.

mod algebra;
mod block;
mod cells;
mod words;

pub use algebra::{
    component_from_cyclic, component_haagerup_constant, component_table, trivial_component, ComponentAlgebra,
    ComponentConstant, DeclaredConstant, GradeRatio, Provenance, MAX_SEARCH_DIM,
};
pub use block::{
    cell_structure, component_bounds, cross_validate_group, dihedral_free_product, fp_block, free_block_table,
    free_product_check, word_to_element, CellStructure, CellSummary, ComponentBound, CrossValidation, FreeBlockTable,
    FreeProductCheck, BOUND_SLACK, ENTRY_TOL, NORM_TOL,
};
pub use cells::{check_triple, classify_cell, cell_form_holds, CellLabel};
pub use words::{FreeProduct, FreeVector, FreeWord, Letter, BASIS_BUDGET};
