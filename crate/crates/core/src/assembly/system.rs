use std::ops::Range;
use std::sync::Arc;

use super::sparse::{CsrMatrix, Triplet};
use crate::fe::{DiscreteField, ElementFamily, ElementKind, FunctionSpace, ValueRank};
use crate::mesh::{BoundaryTag, Mesh};
use crate::{Error, Point, Result};

/// Velocity–pressure pairing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Discretisation {
    /// P2 velocity, P1 pressure.
    TaylorHood,
    /// P1 plus cubic bubble velocity, P1 pressure.
    Mini,
    /// P1 plus edge-normal bubbles velocity, P0 pressure.
    BernardiRaugel,
}

impl Discretisation {
    pub fn velocity_kind(self) -> ElementKind {
        match self {
            Discretisation::TaylorHood => ElementKind::P2,
            Discretisation::Mini => ElementKind::P1Bubble,
            Discretisation::BernardiRaugel => ElementKind::BernardiRaugel,
        }
    }

    pub fn pressure_kind(self) -> ElementKind {
        match self {
            Discretisation::BernardiRaugel => ElementKind::DG0,
            _ => ElementKind::P1,
        }
    }

    /// Expected convergence order in the energy-type norms.
    pub fn order(self) -> usize {
        match self {
            Discretisation::TaylorHood => 2,
            _ => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Discretisation::TaylorHood => "taylor-hood",
            Discretisation::Mini => "mini",
            Discretisation::BernardiRaugel => "bernardi-raugel",
        }
    }
}

/// Offsets of the `[velocity | vorticity | pressure | multiplier]` blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockIndex {
    pub vorticity: usize,
    pub pressure: usize,
    pub multiplier: usize,
    pub size: usize,
}

impl BlockIndex {
    pub fn velocity_range(&self) -> Range<usize> {
        0..self.vorticity
    }

    pub fn vorticity_range(&self) -> Range<usize> {
        self.vorticity..self.pressure
    }

    pub fn pressure_range(&self) -> Range<usize> {
        self.pressure..self.multiplier
    }
}

/// The three discrete spaces of the mixed problem, on one mesh.
#[derive(Debug, Clone)]
pub struct MixedSpaces {
    pub velocity: Arc<FunctionSpace>,
    pub vorticity: Arc<FunctionSpace>,
    pub pressure: Arc<FunctionSpace>,
}

fn same_mesh(a: &Arc<Mesh>, b: &Arc<Mesh>) -> bool {
    Arc::ptr_eq(a, b) || (a.cells == b.cells && a.vertices == b.vertices)
}

impl MixedSpaces {
    pub fn new(velocity: Arc<FunctionSpace>, vorticity: Arc<FunctionSpace>, pressure: Arc<FunctionSpace>) -> Result<Self> {
        if !same_mesh(velocity.mesh(), vorticity.mesh()) || !same_mesh(velocity.mesh(), pressure.mesh()) {
            return Err(Error::Usage("velocity, vorticity and pressure spaces live on different meshes".into()));
        }
        if velocity.family().rank != ValueRank::Vector2 {
            return Err(Error::Usage("velocity space must be vector valued".into()));
        }
        if vorticity.is_vector() || pressure.is_vector() {
            return Err(Error::Usage("vorticity and pressure spaces must be scalar".into()));
        }
        Ok(MixedSpaces { velocity, vorticity, pressure })
    }

    /// Standard stack of `disc` with the given vorticity element.
    pub fn build(mesh: &Arc<Mesh>, disc: Discretisation, vorticity: ElementKind) -> Result<Self> {
        let v = FunctionSpace::new(mesh.clone(), ElementFamily::vector(disc.velocity_kind()))?;
        let w = FunctionSpace::new(mesh.clone(), ElementFamily::scalar(vorticity))?;
        let q = FunctionSpace::new(mesh.clone(), ElementFamily::scalar(disc.pressure_kind()))?;
        Self::new(Arc::new(v), Arc::new(w), Arc::new(q))
    }

    pub fn mesh(&self) -> &Arc<Mesh> {
        self.velocity.mesh()
    }

    pub fn block_index(&self) -> BlockIndex {
        let vorticity = self.velocity.n_dofs();
        let pressure = vorticity + self.vorticity.n_dofs();
        let multiplier = pressure + self.pressure.n_dofs();
        BlockIndex { vorticity, pressure, multiplier, size: multiplier + 1 }
    }

    /// Total unknowns including the multiplier.
    pub fn n_dofs(&self) -> usize {
        self.block_index().size
    }

    /// `2·(velocity degree) + 2`.
    pub fn default_degree(&self) -> usize {
        2 * self.velocity.family().degree() + 2
    }

    /// Splits a solution vector into its three fields and the multiplier.
    pub fn split(&self, x: &[f64]) -> Result<(DiscreteField, DiscreteField, DiscreteField, f64)> {
        let b = self.block_index();
        if x.len() != b.size {
            return Err(Error::InvalidArgument(format!("vector of length {} for {} unknowns", x.len(), b.size)));
        }
        Ok((
            DiscreteField::from_coefficients(self.velocity.clone(), x[b.velocity_range()].to_vec())?,
            DiscreteField::from_coefficients(self.vorticity.clone(), x[b.vorticity_range()].to_vec())?,
            DiscreteField::from_coefficients(self.pressure.clone(), x[b.pressure_range()].to_vec())?,
            x[b.multiplier],
        ))
    }

    /// Concatenates fields into one vector with a zero multiplier.
    pub fn concat(&self, u: &DiscreteField, w: &DiscreteField, p: &DiscreteField) -> Result<Vec<f64>> {
        let b = self.block_index();
        if u.coefficients().len() != b.vorticity
            || w.coefficients().len() != b.pressure - b.vorticity
            || p.coefficients().len() != b.multiplier - b.pressure
        {
            return Err(Error::Usage("fields do not belong to these spaces".into()));
        }
        let mut x = Vec::with_capacity(b.size);
        x.extend_from_slice(u.coefficients());
        x.extend_from_slice(w.coefficients());
        x.extend_from_slice(p.coefficients());
        x.push(0.0);
        Ok(x)
    }
}

/// Sparse saddle-point system and right-hand side.
#[derive(Debug, Clone, PartialEq)]
pub struct AssembledSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
    pub block_index: BlockIndex,
    pub bc_applied: bool,
}

impl AssembledSystem {
    /// Imposes Dirichlet data `g` on the velocity DOFs of `space`.
    ///
    /// Constrained rows and columns are replaced by identity; their coupling
    /// is moved to the right-hand side.
    pub fn apply_dirichlet(self, space: &FunctionSpace, g: &dyn Fn(BoundaryTag, Point) -> [f64; 2]) -> Result<Self> {
        if space.n_dofs() != self.block_index.vorticity {
            return Err(Error::Usage("Dirichlet space is not the velocity space of this system".into()));
        }
        let values = space.boundary_values(g);
        self.apply_constraints(&values)
    }

    /// Same as [`apply_dirichlet`](Self::apply_dirichlet) with explicit `(dof, value)` pairs.
    pub fn apply_constraints(mut self, values: &[(usize, f64)]) -> Result<Self> {
        if self.bc_applied {
            return Err(Error::Usage("Dirichlet conditions already applied".into()));
        }
        let n = self.matrix.nrows();
        let mut fixed = vec![false; n];
        let mut lift = vec![0.0; n];
        for &(d, v) in values {
            if d >= n {
                return Err(Error::InvalidArgument(format!("constrained DOF {d} out of range")));
            }
            fixed[d] = true;
            lift[d] = v;
        }
        let shift = self.matrix.matvec(&lift);
        for i in 0..n {
            if fixed[i] {
                self.rhs[i] = lift[i];
            } else {
                self.rhs[i] -= shift[i];
            }
        }
        let kept = self.matrix.filter(|r, c| !fixed[r] && !fixed[c]);
        let mut triplets = kept.to_triplets();
        triplets.extend((0..n).filter(|&i| fixed[i]).map(|i| Triplet::new(i, i, 1.0)));
        self.matrix = CsrMatrix::from_triplets(n, n, &triplets);
        self.bc_applied = true;
        Ok(self)
    }
}
