//! Structured triangulations of axis-aligned rectangles.
//!
//! Every sub-rectangle is split along its lower-left to upper-right diagonal.
//! Vertices are numbered lexicographically (x fastest), cells row-major, and
//! edges in order of first appearance while sweeping the cells, so two builds
//! with the same arguments are identical.

use std::collections::HashMap;

use crate::{Error, Point, Result};

/// Side of the bounding rectangle an edge lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundaryTag {
    Bottom,
    Right,
    Top,
    Left,
}

impl BoundaryTag {
    /// Order in which boundary data is applied; later tags overwrite earlier
    /// ones at shared corner vertices, so `Top` wins.
    pub const APPLY_ORDER: [BoundaryTag; 4] = [
        BoundaryTag::Bottom,
        BoundaryTag::Right,
        BoundaryTag::Left,
        BoundaryTag::Top,
    ];

    pub fn priority(self) -> usize {
        Self::APPLY_ORDER.iter().position(|&t| t == self).unwrap()
    }
}

/// Axis-aligned rectangle `(x0, y0) × (x1, y1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Rect {
    pub const UNIT: Rect = Rect { x0: 0.0, y0: 0.0, x1: 1.0, y1: 1.0 };

    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Rect { x0, y0, x1, y1 }
    }

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }
}

/// An edge, stored with its vertex indices in increasing order.
#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub vertices: [usize; 2],
    /// First incident cell, and the second one for interior edges.
    pub cells: [Option<usize>; 2],
}

impl Edge {
    pub fn is_boundary(&self) -> bool {
        self.cells[1].is_none()
    }
}

/// Affine map from the reference triangle `{(0,0), (1,0), (0,1)}` onto a cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellGeometry {
    pub origin: Point,
    /// `jacobian[i][j] = ∂x_i/∂ξ_j`.
    pub jacobian: [[f64; 2]; 2],
    pub inverse_transpose: [[f64; 2]; 2],
    pub det: f64,
    pub area: f64,
}

impl CellGeometry {
    /// Physical point of the reference coordinates `xi`.
    pub fn map(&self, xi: Point) -> Point {
        let j = &self.jacobian;
        [
            self.origin[0] + j[0][0] * xi[0] + j[0][1] * xi[1],
            self.origin[1] + j[1][0] * xi[0] + j[1][1] * xi[1],
        ]
    }

    /// Physical gradient from a reference gradient.
    #[inline]
    pub fn push_gradient(&self, g: [f64; 2]) -> [f64; 2] {
        let k = &self.inverse_transpose;
        [k[0][0] * g[0] + k[0][1] * g[1], k[1][0] * g[0] + k[1][1] * g[1]]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub vertices: Vec<Point>,
    /// Counterclockwise vertex triples.
    pub cells: Vec<[usize; 3]>,
    pub edges: Vec<Edge>,
    /// Local edge `i` of a cell is the one opposite its local vertex `i`.
    pub cell_edges: Vec<[usize; 3]>,
    pub boundary_tags: HashMap<usize, BoundaryTag>,
    /// Largest cell diameter.
    pub h: f64,
    pub nx: usize,
    pub ny: usize,
    pub rect: Rect,
}

impl Mesh {
    /// Splits `rect` into `nx × ny` sub-rectangles, two triangles each.
    pub fn build_structured(nx: usize, ny: usize, rect: Rect) -> Result<Mesh> {
        if nx == 0 || ny == 0 {
            return Err(Error::InvalidArgument(format!(
                "subdivisions must be positive, got {nx}×{ny}"
            )));
        }
        if !(rect.x1 > rect.x0 && rect.y1 > rect.y0) {
            return Err(Error::InvalidArgument(format!("degenerate rectangle {rect:?}")));
        }

        let dx = rect.width() / nx as f64;
        let dy = rect.height() / ny as f64;
        let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
        for j in 0..=ny {
            // Pin the last row/column to the exact rectangle bounds.
            let y = if j == ny { rect.y1 } else { rect.y0 + j as f64 * dy };
            for i in 0..=nx {
                let x = if i == nx { rect.x1 } else { rect.x0 + i as f64 * dx };
                vertices.push([x, y]);
            }
        }

        let vid = |i: usize, j: usize| j * (nx + 1) + i;
        let mut cells = Vec::with_capacity(2 * nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                let v00 = vid(i, j);
                let v10 = vid(i + 1, j);
                let v11 = vid(i + 1, j + 1);
                let v01 = vid(i, j + 1);
                cells.push([v00, v10, v11]);
                cells.push([v00, v11, v01]);
            }
        }

        let mut edge_index: HashMap<[usize; 2], usize> = HashMap::new();
        let mut edges: Vec<Edge> = Vec::new();
        let mut cell_edges = Vec::with_capacity(cells.len());
        for (c, tri) in cells.iter().enumerate() {
            let mut local = [0usize; 3];
            for (k, slot) in local.iter_mut().enumerate() {
                let a = tri[(k + 1) % 3];
                let b = tri[(k + 2) % 3];
                let key = [a.min(b), a.max(b)];
                let e = *edge_index.entry(key).or_insert_with(|| {
                    edges.push(Edge { vertices: key, cells: [None, None] });
                    edges.len() - 1
                });
                let slots = &mut edges[e].cells;
                if slots[0].is_none() {
                    slots[0] = Some(c);
                } else {
                    slots[1] = Some(c);
                }
                *slot = e;
            }
            cell_edges.push(local);
        }

        let mut boundary_tags = HashMap::new();
        for (e, edge) in edges.iter().enumerate() {
            if !edge.is_boundary() {
                continue;
            }
            let [a, b] = edge.vertices.map(|v| vertices[v]);
            let tag = if a[1] == rect.y0 && b[1] == rect.y0 {
                BoundaryTag::Bottom
            } else if a[1] == rect.y1 && b[1] == rect.y1 {
                BoundaryTag::Top
            } else if a[0] == rect.x0 && b[0] == rect.x0 {
                BoundaryTag::Left
            } else {
                BoundaryTag::Right
            };
            boundary_tags.insert(e, tag);
        }

        let mut mesh = Mesh {
            vertices,
            cells,
            edges,
            cell_edges,
            boundary_tags,
            h: 0.0,
            nx,
            ny,
            rect,
        };
        mesh.h = (0..mesh.cells.len()).map(|c| mesh.cell_diameter(c)).fold(0.0, f64::max);
        Ok(mesh)
    }

    /// Structured mesh of twice the resolution in each direction.
    pub fn refine_uniform(&self) -> Mesh {
        Mesh::build_structured(2 * self.nx, 2 * self.ny, self.rect)
            .expect("refining a valid structured mesh")
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn cell_points(&self, cell: usize) -> [Point; 3] {
        self.cells[cell].map(|v| self.vertices[v])
    }

    pub fn cell_diameter(&self, cell: usize) -> f64 {
        let p = self.cell_points(cell);
        (0..3)
            .map(|k| dist(p[k], p[(k + 1) % 3]))
            .fold(0.0, f64::max)
    }

    pub fn signed_area(&self, cell: usize) -> f64 {
        let [a, b, c] = self.cell_points(cell);
        0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
    }

    pub fn edge_length(&self, edge: usize) -> f64 {
        let [a, b] = self.edges[edge].vertices;
        dist(self.vertices[a], self.vertices[b])
    }

    /// Unit normal of an edge with a mesh-global orientation: the tangent from
    /// the lower to the higher vertex index, rotated clockwise.
    pub fn edge_normal(&self, edge: usize) -> [f64; 2] {
        let [a, b] = self.edges[edge].vertices;
        let (pa, pb) = (self.vertices[a], self.vertices[b]);
        let t = [pb[0] - pa[0], pb[1] - pa[1]];
        let len = (t[0] * t[0] + t[1] * t[1]).sqrt();
        [t[1] / len, -t[0] / len]
    }

    pub fn cell_geometry(&self, cell: usize) -> Result<CellGeometry> {
        if cell >= self.cells.len() {
            return Err(Error::InvalidArgument(format!("cell index {cell} out of range")));
        }
        geometry_of(self.cell_points(cell))
    }

    /// Tags of the boundary edges touching `vertex`.
    pub fn vertex_tags(&self, vertex: usize) -> Vec<BoundaryTag> {
        self.boundary_vertex_tags()[vertex].clone()
    }

    /// For every vertex, the tags of its incident boundary edges (sorted, deduplicated).
    pub fn boundary_vertex_tags(&self) -> Vec<Vec<BoundaryTag>> {
        let mut tags = vec![Vec::new(); self.vertices.len()];
        let mut sorted: Vec<_> = self.boundary_tags.iter().collect();
        sorted.sort();
        for (&e, &tag) in sorted {
            for v in self.edges[e].vertices {
                if !tags[v].contains(&tag) {
                    tags[v].push(tag);
                }
            }
        }
        for t in &mut tags {
            t.sort();
        }
        tags
    }
}

/// Affine geometry of the triangle with the given vertices.
pub fn geometry_of(p: [Point; 3]) -> Result<CellGeometry> {
    let jacobian = [
        [p[1][0] - p[0][0], p[2][0] - p[0][0]],
        [p[1][1] - p[0][1], p[2][1] - p[0][1]],
    ];
    let det = jacobian[0][0] * jacobian[1][1] - jacobian[0][1] * jacobian[1][0];
    let scale = jacobian.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    if det.abs() <= 1e-14 * scale * scale || scale == 0.0 {
        return Err(Error::Geometry(format!("zero-area cell {p:?}")));
    }
    let inverse_transpose = [
        [jacobian[1][1] / det, -jacobian[1][0] / det],
        [-jacobian[0][1] / det, jacobian[0][0] / det],
    ];
    Ok(CellGeometry { origin: p[0], jacobian, inverse_transpose, det, area: 0.5 * det.abs() })
}

fn dist(a: Point, b: Point) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}
