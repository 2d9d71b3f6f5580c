//! Local shape functions on the reference triangle `{(0,0), (1,0), (0,1)}`.
//!
//! Barycentric coordinates are `λ0 = 1 − ξ − η`, `λ1 = ξ`, `λ2 = η`. Local
//! edge `i` is the edge opposite local vertex `i`.

use crate::{Error, Point, Result};

/// Polynomial family of a finite element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ElementKind {
    P1,
    P2,
    /// Linear Lagrange plus the cubic bubble `λ0 λ1 λ2`.
    P1Bubble,
    /// Componentwise P1 plus one edge-normal quadratic bubble per edge.
    BernardiRaugel,
    DG0,
    DG1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Continuity {
    Continuous,
    Discontinuous,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ValueRank {
    Scalar,
    Vector2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ElementFamily {
    pub kind: ElementKind,
    pub rank: ValueRank,
}

impl ElementFamily {
    pub const fn scalar(kind: ElementKind) -> Self {
        ElementFamily { kind, rank: ValueRank::Scalar }
    }

    pub const fn vector(kind: ElementKind) -> Self {
        ElementFamily { kind, rank: ValueRank::Vector2 }
    }

    pub fn continuity(&self) -> Continuity {
        match self.kind {
            ElementKind::DG0 | ElementKind::DG1 => Continuity::Discontinuous,
            _ => Continuity::Continuous,
        }
    }

    /// Highest polynomial degree of the local space.
    pub fn degree(&self) -> usize {
        match self.kind {
            ElementKind::DG0 => 0,
            ElementKind::P1 | ElementKind::DG1 => 1,
            ElementKind::P2 | ElementKind::BernardiRaugel => 2,
            ElementKind::P1Bubble => 3,
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if self.kind == ElementKind::BernardiRaugel && self.rank == ValueRank::Scalar {
            return Err(Error::InvalidArgument(
                "Bernardi–Raugel is a vector-valued element".into(),
            ));
        }
        Ok(())
    }
}

/// Number of scalar shape functions of a kind (Bernardi–Raugel excluded).
pub(crate) fn scalar_count(kind: ElementKind) -> usize {
    match kind {
        ElementKind::DG0 => 1,
        ElementKind::P1 | ElementKind::DG1 => 3,
        ElementKind::P1Bubble => 4,
        ElementKind::P2 => 6,
        ElementKind::BernardiRaugel => 3,
    }
}

/// Shape-function values and reference gradients at one point.
#[derive(Debug, Clone, PartialEq)]
pub enum ReferenceBasis {
    Scalar { values: Vec<f64>, gradients: Vec<[f64; 2]> },
    /// `gradients[k][i][j] = ∂_j (φ_k)_i`.
    Vector { values: Vec<[f64; 2]>, gradients: Vec<[[f64; 2]; 2]> },
}

const REF_TOL: f64 = 1e-12;

fn check_reference_point(xi: Point) -> Result<()> {
    let [x, y] = xi;
    if x < -REF_TOL || y < -REF_TOL || x + y > 1.0 + REF_TOL || !x.is_finite() || !y.is_finite() {
        return Err(Error::Domain(format!("{xi:?} is outside the reference triangle")));
    }
    Ok(())
}

pub(crate) fn barycentric(xi: Point) -> [f64; 3] {
    [1.0 - xi[0] - xi[1], xi[0], xi[1]]
}

/// Reference gradients of the barycentric coordinates.
pub(crate) const BARY_GRAD: [[f64; 2]; 3] = [[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]];

/// Outward unit normals of the reference triangle, by local edge.
const REF_NORMALS: [[f64; 2]; 3] = [
    [std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2],
    [-1.0, 0.0],
    [0.0, -1.0],
];

/// Evaluates scalar shape functions into `values`/`gradients` (cleared first).
/// No domain check; used on quadrature and nodal points.
pub(crate) fn eval_scalar(kind: ElementKind, xi: Point, values: &mut Vec<f64>, gradients: &mut Vec<[f64; 2]>) {
    values.clear();
    gradients.clear();
    let l = barycentric(xi);
    let g = BARY_GRAD;
    match kind {
        ElementKind::DG0 => {
            values.push(1.0);
            gradients.push([0.0, 0.0]);
        }
        ElementKind::P1 | ElementKind::DG1 | ElementKind::BernardiRaugel => {
            values.extend_from_slice(&l);
            gradients.extend_from_slice(&g);
        }
        ElementKind::P1Bubble => {
            values.extend_from_slice(&l);
            gradients.extend_from_slice(&g);
            values.push(l[0] * l[1] * l[2]);
            gradients.push(std::array::from_fn(|d| {
                g[0][d] * l[1] * l[2] + l[0] * g[1][d] * l[2] + l[0] * l[1] * g[2][d]
            }));
        }
        ElementKind::P2 => {
            for i in 0..3 {
                values.push(l[i] * (2.0 * l[i] - 1.0));
                gradients.push(std::array::from_fn(|d| (4.0 * l[i] - 1.0) * g[i][d]));
            }
            for i in 0..3 {
                let (j, k) = ((i + 1) % 3, (i + 2) % 3);
                values.push(4.0 * l[j] * l[k]);
                gradients.push(std::array::from_fn(|d| 4.0 * (g[j][d] * l[k] + l[j] * g[k][d])));
            }
        }
    }
}

/// Values and reference gradients of every local shape function of `family`
/// at the reference point `xi`.
///
/// Vector-valued Lagrange families are listed component-major: all scalar
/// functions times `e_x`, then all times `e_y`. Bernardi–Raugel appends the
/// three edge bubbles `λ_j λ_k n_i` using the reference outward normals.
pub fn reference_basis(family: ElementFamily, xi: Point) -> Result<ReferenceBasis> {
    family.validate()?;
    check_reference_point(xi)?;
    let mut sv = Vec::new();
    let mut sg = Vec::new();
    eval_scalar(family.kind, xi, &mut sv, &mut sg);
    match family.rank {
        ValueRank::Scalar => Ok(ReferenceBasis::Scalar { values: sv, gradients: sg }),
        ValueRank::Vector2 => {
            let mut values = Vec::new();
            let mut gradients = Vec::new();
            for comp in 0..2 {
                for (v, g) in sv.iter().zip(&sg) {
                    let mut val = [0.0; 2];
                    val[comp] = *v;
                    let mut grad = [[0.0; 2]; 2];
                    grad[comp] = *g;
                    values.push(val);
                    gradients.push(grad);
                }
            }
            if family.kind == ElementKind::BernardiRaugel {
                let l = barycentric(xi);
                for (i, n) in REF_NORMALS.iter().enumerate() {
                    let (j, k) = ((i + 1) % 3, (i + 2) % 3);
                    let b = l[j] * l[k];
                    let db: [f64; 2] =
                        std::array::from_fn(|d| BARY_GRAD[j][d] * l[k] + l[j] * BARY_GRAD[k][d]);
                    values.push([b * n[0], b * n[1]]);
                    gradients.push([[n[0] * db[0], n[0] * db[1]], [n[1] * db[0], n[1] * db[1]]]);
                }
            }
            Ok(ReferenceBasis::Vector { values, gradients })
        }
    }
}

/// Reference coordinates of the Lagrange nodes of a scalar kind, in local order.
/// The P1Bubble bubble node is the centroid.
pub fn scalar_nodes(kind: ElementKind) -> Vec<Point> {
    let verts = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
    match kind {
        ElementKind::DG0 => vec![[1.0 / 3.0, 1.0 / 3.0]],
        ElementKind::P1 | ElementKind::DG1 | ElementKind::BernardiRaugel => verts.to_vec(),
        ElementKind::P1Bubble => {
            let mut v = verts.to_vec();
            v.push([1.0 / 3.0, 1.0 / 3.0]);
            v
        }
        ElementKind::P2 => {
            let mut v = verts.to_vec();
            for i in 0..3 {
                let (j, k) = ((i + 1) % 3, (i + 2) % 3);
                v.push([0.5 * (verts[j][0] + verts[k][0]), 0.5 * (verts[j][1] + verts[k][1])]);
            }
            v
        }
    }
}
