use std::sync::Arc;

use super::basis::{barycentric, eval_scalar, scalar_count, ElementFamily, ElementKind, ValueRank, BARY_GRAD};
use super::quadrature::GAUSS3_UNIT;
use crate::mesh::{BoundaryTag, CellGeometry, Mesh};
use crate::{Point, Result};

/// What a global degree of freedom is attached to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DofNode {
    /// Lagrange value at a mesh vertex, for component `comp`.
    Vertex { vertex: usize, comp: usize },
    /// Lagrange value at an edge midpoint (P2).
    EdgeMidpoint { edge: usize, comp: usize },
    /// Coefficient of the cell bubble `λ0 λ1 λ2`.
    Bubble { cell: usize, comp: usize },
    /// Coefficient of the Bernardi–Raugel bubble `λ_a λ_b n_e` of an edge.
    EdgeNormal { edge: usize },
    /// Discontinuous node: cell centroid (DG0) or local vertex `local` (DG1).
    CellPoint { cell: usize, local: usize },
}

/// Global finite element space on a mesh.
#[derive(Debug, Clone)]
pub struct FunctionSpace {
    mesh: Arc<Mesh>,
    family: ElementFamily,
    n_local: usize,
    cell_dofs: Vec<usize>,
    nodes: Vec<DofNode>,
    dirichlet_dofs: Vec<usize>,
}

/// Physical shape functions of one cell at one point.
#[derive(Debug, Clone, Default)]
pub struct ScalarShapes {
    pub values: Vec<f64>,
    pub gradients: Vec<[f64; 2]>,
    ref_gradients: Vec<[f64; 2]>,
}

/// Physical vector shape functions; `gradients[k][i][j] = ∂_j (φ_k)_i`.
#[derive(Debug, Clone, Default)]
pub struct VectorShapes {
    pub values: Vec<[f64; 2]>,
    pub gradients: Vec<[[f64; 2]; 2]>,
    scalar: ScalarShapes,
}

impl VectorShapes {
    #[inline]
    pub fn curl(&self, k: usize) -> f64 {
        self.gradients[k][1][0] - self.gradients[k][0][1]
    }

    #[inline]
    pub fn div(&self, k: usize) -> f64 {
        self.gradients[k][0][0] + self.gradients[k][1][1]
    }
}

impl FunctionSpace {
    /// Builds the global numbering of `family` on `mesh`.
    ///
    /// Vector Lagrange spaces number component-major (all x-DOFs, then all
    /// y-DOFs). For vector spaces every DOF with a nonzero boundary trace is
    /// collected as a Dirichlet DOF.
    pub fn new(mesh: Arc<Mesh>, family: ElementFamily) -> Result<FunctionSpace> {
        family.validate()?;
        let nv = mesh.n_vertices();
        let ne = mesh.n_edges();
        let nc = mesh.n_cells();
        let ns_local = scalar_count(family.kind);

        // Scalar numbering shared by both components of Lagrange vector spaces.
        let mut scalar_nodes: Vec<DofNode> = Vec::new();
        let mut scalar_cell_dofs: Vec<usize> = Vec::with_capacity(nc * ns_local);
        match family.kind {
            ElementKind::P1 | ElementKind::P2 | ElementKind::P1Bubble | ElementKind::BernardiRaugel => {
                scalar_nodes.extend((0..nv).map(|v| DofNode::Vertex { vertex: v, comp: 0 }));
                if family.kind == ElementKind::P2 {
                    scalar_nodes.extend((0..ne).map(|e| DofNode::EdgeMidpoint { edge: e, comp: 0 }));
                }
                if family.kind == ElementKind::P1Bubble {
                    scalar_nodes.extend((0..nc).map(|c| DofNode::Bubble { cell: c, comp: 0 }));
                }
                for c in 0..nc {
                    scalar_cell_dofs.extend_from_slice(&mesh.cells[c]);
                    match family.kind {
                        ElementKind::P2 => scalar_cell_dofs.extend(mesh.cell_edges[c].iter().map(|e| nv + e)),
                        ElementKind::P1Bubble => scalar_cell_dofs.push(nv + c),
                        _ => {}
                    }
                }
            }
            ElementKind::DG0 => {
                scalar_nodes.extend((0..nc).map(|c| DofNode::CellPoint { cell: c, local: 0 }));
                scalar_cell_dofs.extend(0..nc);
            }
            ElementKind::DG1 => {
                for c in 0..nc {
                    for k in 0..3 {
                        scalar_nodes.push(DofNode::CellPoint { cell: c, local: k });
                        scalar_cell_dofs.push(3 * c + k);
                    }
                }
            }
        }
        let n_scalar = scalar_nodes.len();

        let (n_local, cell_dofs, nodes) = match family.rank {
            ValueRank::Scalar => (ns_local, scalar_cell_dofs, scalar_nodes),
            ValueRank::Vector2 => {
                let mut nodes = Vec::with_capacity(2 * n_scalar + ne);
                for comp in 0..2 {
                    nodes.extend(scalar_nodes.iter().map(|n| with_comp(*n, comp)));
                }
                let br = family.kind == ElementKind::BernardiRaugel;
                if br {
                    nodes.extend((0..ne).map(|e| DofNode::EdgeNormal { edge: e }));
                }
                let n_local = 2 * ns_local + if br { 3 } else { 0 };
                let mut cell_dofs = Vec::with_capacity(nc * n_local);
                for c in 0..nc {
                    let local = &scalar_cell_dofs[c * ns_local..(c + 1) * ns_local];
                    for comp in 0..2 {
                        cell_dofs.extend(local.iter().map(|s| comp * n_scalar + s));
                    }
                    if br {
                        cell_dofs.extend(mesh.cell_edges[c].iter().map(|e| 2 * n_scalar + e));
                    }
                }
                (n_local, cell_dofs, nodes)
            }
        };

        let dirichlet_dofs = if family.rank == ValueRank::Vector2 {
            let on_boundary: Vec<bool> = {
                let mut b = vec![false; nv];
                for &e in mesh.boundary_tags.keys() {
                    for v in mesh.edges[e].vertices {
                        b[v] = true;
                    }
                }
                b
            };
            nodes
                .iter()
                .enumerate()
                .filter(|(_, n)| match **n {
                    DofNode::Vertex { vertex, .. } => on_boundary[vertex],
                    DofNode::EdgeMidpoint { edge, .. } | DofNode::EdgeNormal { edge } => {
                        mesh.edges[edge].is_boundary()
                    }
                    _ => false,
                })
                .map(|(i, _)| i)
                .collect()
        } else {
            Vec::new()
        };

        Ok(FunctionSpace { mesh, family, n_local, cell_dofs, nodes, dirichlet_dofs })
    }

    pub fn mesh(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    pub fn family(&self) -> ElementFamily {
        self.family
    }

    pub fn n_dofs(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_local(&self) -> usize {
        self.n_local
    }

    /// Global indices of the local DOFs of `cell`, in local basis order.
    #[inline]
    pub fn cell_dofs(&self, cell: usize) -> &[usize] {
        &self.cell_dofs[cell * self.n_local..(cell + 1) * self.n_local]
    }

    pub fn nodes(&self) -> &[DofNode] {
        &self.nodes
    }

    /// Sorted DOFs constrained by a velocity Dirichlet condition.
    pub fn dirichlet_dofs(&self) -> &[usize] {
        &self.dirichlet_dofs
    }

    pub fn is_vector(&self) -> bool {
        self.family.rank == ValueRank::Vector2
    }

    /// Physical scalar shape functions at reference point `xi` of a cell.
    pub fn scalar_shapes(&self, geom: &CellGeometry, xi: Point, out: &mut ScalarShapes) {
        debug_assert!(!self.is_vector());
        eval_scalar(self.family.kind, xi, &mut out.values, &mut out.ref_gradients);
        out.gradients.clear();
        out.gradients.extend(out.ref_gradients.iter().map(|g| geom.push_gradient(*g)));
    }

    /// Physical vector shape functions at reference point `xi` of `cell`.
    pub fn vector_shapes(&self, cell: usize, geom: &CellGeometry, xi: Point, out: &mut VectorShapes) {
        debug_assert!(self.is_vector());
        eval_scalar(self.family.kind, xi, &mut out.scalar.values, &mut out.scalar.ref_gradients);
        out.values.clear();
        out.gradients.clear();
        for comp in 0..2 {
            for (v, g) in out.scalar.values.iter().zip(&out.scalar.ref_gradients) {
                let g = geom.push_gradient(*g);
                let mut val = [0.0; 2];
                val[comp] = *v;
                let mut grad = [[0.0; 2]; 2];
                grad[comp] = g;
                out.values.push(val);
                out.gradients.push(grad);
            }
        }
        if self.family.kind == ElementKind::BernardiRaugel {
            let l = barycentric(xi);
            let gl = BARY_GRAD.map(|g| geom.push_gradient(g));
            for (i, &edge) in self.mesh.cell_edges[cell].iter().enumerate() {
                let n = self.mesh.edge_normal(edge);
                let (j, k) = ((i + 1) % 3, (i + 2) % 3);
                let b = l[j] * l[k];
                let db = [gl[j][0] * l[k] + l[j] * gl[k][0], gl[j][1] * l[k] + l[j] * gl[k][1]];
                out.values.push([b * n[0], b * n[1]]);
                out.gradients.push([[n[0] * db[0], n[0] * db[1]], [n[1] * db[0], n[1] * db[1]]]);
            }
        }
    }

    /// Prescribed values of the Dirichlet DOFs for boundary data `g(tag, x)`.
    ///
    /// Corner vertices take the value of the highest-priority tag in
    /// [`BoundaryTag::APPLY_ORDER`], so the top lid wins at the top corners.
    pub fn boundary_values(&self, g: &dyn Fn(BoundaryTag, Point) -> [f64; 2]) -> Vec<(usize, f64)> {
        let mesh = &*self.mesh;
        let vertex_tags = mesh.boundary_vertex_tags();
        let vertex_value = |v: usize| -> [f64; 2] {
            let tag = *vertex_tags[v].iter().max_by_key(|t| t.priority()).expect("boundary vertex");
            g(tag, mesh.vertices[v])
        };
        self.dirichlet_dofs
            .iter()
            .map(|&dof| {
                let value = match self.nodes[dof] {
                    DofNode::Vertex { vertex, comp } => vertex_value(vertex)[comp],
                    DofNode::EdgeMidpoint { edge, comp } => {
                        let tag = mesh.boundary_tags[&edge];
                        g(tag, self.edge_point(edge, 0.5))[comp]
                    }
                    DofNode::EdgeNormal { edge } => {
                        let tag = mesh.boundary_tags[&edge];
                        let [a, b] = mesh.edges[edge].vertices;
                        self.edge_normal_coefficient(edge, vertex_value(a), vertex_value(b), &|x| g(tag, x))
                    }
                    _ => unreachable!("only boundary-trace DOFs are constrained"),
                };
                (dof, value)
            })
            .collect()
    }

    /// Nodal interpolant of a vector function; scalar spaces use component 0.
    pub(crate) fn interpolate_components(&self, f: &dyn Fn(Point) -> [f64; 2]) -> Vec<f64> {
        let mesh = &*self.mesh;
        let mut coef = vec![0.0; self.n_dofs()];
        let mut vertex_cache: Vec<Option<[f64; 2]>> = vec![None; mesh.n_vertices()];
        let mut at_vertex = |v: usize| *vertex_cache[v].get_or_insert_with(|| f(mesh.vertices[v]));
        // Lagrange nodes first; bubble coefficients depend on the P1 part.
        for (dof, node) in self.nodes.iter().enumerate() {
            coef[dof] = match *node {
                DofNode::Vertex { vertex, comp } => at_vertex(vertex)[comp],
                DofNode::EdgeMidpoint { edge, comp } => f(self.edge_point(edge, 0.5))[comp],
                DofNode::CellPoint { cell, local } => {
                    let x = if self.family.kind == ElementKind::DG0 {
                        centroid(mesh, cell)
                    } else {
                        mesh.vertices[mesh.cells[cell][local]]
                    };
                    f(x)[0]
                }
                DofNode::Bubble { cell, comp } => {
                    let linear: f64 = mesh.cells[cell].iter().map(|&v| at_vertex(v)[comp]).sum::<f64>() / 3.0;
                    (f(centroid(mesh, cell))[comp] - linear) * 27.0
                }
                DofNode::EdgeNormal { edge } => {
                    let [a, b] = mesh.edges[edge].vertices;
                    self.edge_normal_coefficient(edge, at_vertex(a), at_vertex(b), f)
                }
            };
        }
        coef
    }

    /// Bubble coefficient preserving the normal flux of `f` through an edge
    /// beyond the linear interpolant of the endpoint values `fa`, `fb`.
    fn edge_normal_coefficient(&self, edge: usize, fa: [f64; 2], fb: [f64; 2], f: &dyn Fn(Point) -> [f64; 2]) -> f64 {
        let n = self.mesh.edge_normal(edge);
        let len = self.mesh.edge_length(edge);
        let flux: f64 = GAUSS3_UNIT
            .iter()
            .map(|&(t, w)| {
                let fx = f(self.edge_point(edge, t));
                let lin = [(1.0 - t) * fa[0] + t * fb[0], (1.0 - t) * fa[1] + t * fb[1]];
                w * ((fx[0] - lin[0]) * n[0] + (fx[1] - lin[1]) * n[1])
            })
            .sum::<f64>()
            * len;
        // ∫_e λ_a λ_b ds = |e| / 6
        flux / (len / 6.0)
    }

    fn edge_point(&self, edge: usize, t: f64) -> Point {
        let [a, b] = self.mesh.edges[edge].vertices;
        let (pa, pb) = (self.mesh.vertices[a], self.mesh.vertices[b]);
        [(1.0 - t) * pa[0] + t * pb[0], (1.0 - t) * pa[1] + t * pb[1]]
    }
}

fn with_comp(node: DofNode, comp: usize) -> DofNode {
    match node {
        DofNode::Vertex { vertex, .. } => DofNode::Vertex { vertex, comp },
        DofNode::EdgeMidpoint { edge, .. } => DofNode::EdgeMidpoint { edge, comp },
        DofNode::Bubble { cell, .. } => DofNode::Bubble { cell, comp },
        other => other,
    }
}

fn centroid(mesh: &Mesh, cell: usize) -> Point {
    let p = mesh.cell_points(cell);
    [(p[0][0] + p[1][0] + p[2][0]) / 3.0, (p[0][1] + p[1][1] + p[2][1]) / 3.0]
}
