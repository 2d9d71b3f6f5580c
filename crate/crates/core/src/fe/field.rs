use std::sync::Arc;

use super::space::{FunctionSpace, ScalarShapes, VectorShapes};
use crate::{Error, Point, Result};

/// Coefficient vector bound to a function space.
#[derive(Debug, Clone)]
pub struct DiscreteField {
    space: Arc<FunctionSpace>,
    coefficients: Vec<f64>,
}

/// Value and first derivatives of a field at a point of a cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FieldValue {
    Scalar { value: f64, gradient: [f64; 2] },
    /// `gradient[i][j] = ∂_j v_i`; `curl = ∂x v2 − ∂y v1`, `div = ∂x v1 + ∂y v2`.
    Vector { value: [f64; 2], gradient: [[f64; 2]; 2], curl: f64, div: f64 },
}

impl FieldValue {
    pub fn scalar(&self) -> Result<f64> {
        match self {
            FieldValue::Scalar { value, .. } => Ok(*value),
            _ => Err(Error::Usage("scalar value requested from a vector field".into())),
        }
    }

    pub fn vector(&self) -> Result<[f64; 2]> {
        match self {
            FieldValue::Vector { value, .. } => Ok(*value),
            _ => Err(Error::Usage("vector value requested from a scalar field".into())),
        }
    }

    pub fn curl2d(&self) -> Result<f64> {
        match self {
            FieldValue::Vector { curl, .. } => Ok(*curl),
            _ => Err(Error::Usage("curl of a scalar field is not a scalar".into())),
        }
    }

    pub fn div2d(&self) -> Result<f64> {
        match self {
            FieldValue::Vector { div, .. } => Ok(*div),
            _ => Err(Error::Usage("divergence of a scalar field".into())),
        }
    }
}

impl DiscreteField {
    pub fn zeros(space: Arc<FunctionSpace>) -> Self {
        let n = space.n_dofs();
        DiscreteField { space, coefficients: vec![0.0; n] }
    }

    pub fn from_coefficients(space: Arc<FunctionSpace>, coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.len() != space.n_dofs() {
            return Err(Error::InvalidArgument(format!(
                "{} coefficients for a space with {} DOFs",
                coefficients.len(),
                space.n_dofs()
            )));
        }
        Ok(DiscreteField { space, coefficients })
    }

    /// Nodal interpolant of a scalar function.
    pub fn interpolate_scalar(space: Arc<FunctionSpace>, f: impl Fn(Point) -> f64) -> Result<Self> {
        if space.is_vector() {
            return Err(Error::Usage("scalar interpolation into a vector space".into()));
        }
        let coefficients = space.interpolate_components(&|x| [f(x), 0.0]);
        Ok(DiscreteField { space, coefficients })
    }

    /// Nodal interpolant of a vector function. Bubble DOFs reproduce the
    /// centroid value (MINI) or the edge normal flux (Bernardi–Raugel).
    pub fn interpolate_vector(space: Arc<FunctionSpace>, f: impl Fn(Point) -> [f64; 2]) -> Result<Self> {
        if !space.is_vector() {
            return Err(Error::Usage("vector interpolation into a scalar space".into()));
        }
        let coefficients = space.interpolate_components(&f);
        Ok(DiscreteField { space, coefficients })
    }

    pub fn space(&self) -> &Arc<FunctionSpace> {
        &self.space
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn coefficients_mut(&mut self) -> &mut [f64] {
        &mut self.coefficients
    }

    pub fn into_coefficients(self) -> Vec<f64> {
        self.coefficients
    }

    /// Evaluates the field at reference point `xi` of `cell`.
    pub fn eval_cell(&self, cell: usize, xi: Point) -> Result<FieldValue> {
        let mesh = self.space.mesh();
        if cell >= mesh.n_cells() {
            return Err(Error::InvalidArgument(format!("cell index {cell} out of range")));
        }
        if xi[0] < -1e-12 || xi[1] < -1e-12 || xi[0] + xi[1] > 1.0 + 1e-12 {
            return Err(Error::Domain(format!("{xi:?} is outside the reference triangle")));
        }
        let geom = mesh.cell_geometry(cell)?;
        let dofs = self.space.cell_dofs(cell);
        if self.space.is_vector() {
            let mut shapes = VectorShapes::default();
            self.space.vector_shapes(cell, &geom, xi, &mut shapes);
            Ok(self.combine_vector(dofs, &shapes))
        } else {
            let mut shapes = ScalarShapes::default();
            self.space.scalar_shapes(&geom, xi, &mut shapes);
            Ok(self.combine_scalar(dofs, &shapes))
        }
    }

    #[inline]
    pub(crate) fn combine_scalar(&self, dofs: &[usize], shapes: &ScalarShapes) -> FieldValue {
        let mut value = 0.0;
        let mut gradient = [0.0; 2];
        for (k, &d) in dofs.iter().enumerate() {
            let c = self.coefficients[d];
            value += c * shapes.values[k];
            gradient[0] += c * shapes.gradients[k][0];
            gradient[1] += c * shapes.gradients[k][1];
        }
        FieldValue::Scalar { value, gradient }
    }

    #[inline]
    pub(crate) fn combine_vector(&self, dofs: &[usize], shapes: &VectorShapes) -> FieldValue {
        let mut value = [0.0; 2];
        let mut gradient = [[0.0; 2]; 2];
        for (k, &d) in dofs.iter().enumerate() {
            let c = self.coefficients[d];
            for i in 0..2 {
                value[i] += c * shapes.values[k][i];
                for j in 0..2 {
                    gradient[i][j] += c * shapes.gradients[k][i][j];
                }
            }
        }
        FieldValue::Vector {
            value,
            gradient,
            curl: gradient[1][0] - gradient[0][1],
            div: gradient[0][0] + gradient[1][1],
        }
    }
}
