//! Reference elements, quadrature, global function spaces and discrete fields.

mod basis;
mod field;
pub mod quadrature;
mod space;

use std::sync::Arc;

pub use basis::{reference_basis, scalar_nodes, Continuity, ElementFamily, ElementKind, ReferenceBasis, ValueRank};
pub use field::{DiscreteField, FieldValue};
pub use quadrature::{quadrature, QuadratureRule};
pub use space::{DofNode, FunctionSpace, ScalarShapes, VectorShapes};

use crate::mesh::Mesh;
use crate::Result;

/// Builds the global space of `family` on `mesh`.
pub fn build_space(mesh: &Arc<Mesh>, family: ElementFamily) -> Result<Arc<FunctionSpace>> {
    FunctionSpace::new(mesh.clone(), family).map(Arc::new)
}
