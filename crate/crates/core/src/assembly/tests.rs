use std::f64::consts::PI;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::fe::{quadrature, DiscreteField, ElementFamily, ElementKind, FunctionSpace};
use crate::mesh::{BoundaryTag, Mesh, Rect};
use crate::{Error, Point};

fn mesh(n: usize) -> Arc<Mesh> {
    Arc::new(Mesh::build_structured(n, n, Rect::UNIT).unwrap())
}

fn th(n: usize) -> MixedSpaces {
    MixedSpaces::build(&mesh(n), Discretisation::TaylorHood, ElementKind::DG1).unwrap()
}

fn example_like() -> ProblemCoefficients {
    let (n0, n1) = (0.1, 1.0);
    ProblemCoefficients::builder()
        .viscosity(
            move |x: Point| n0 + (n1 - n0) * (PI * x[0] * x[1]).cos().powi(2),
            move |x: Point| {
                let s = -2.0 * PI * (n1 - n0) * (PI * x[0] * x[1]).cos() * (PI * x[0] * x[1]).sin();
                [s * x[1], s * x[0]]
            },
            n0,
            n1,
        )
        .brinkman(move |x: Point| (n0 + (n1 - n0) * (PI * x[0] * x[1]).cos().powi(2)) / 0.1, 1.0, 10.0)
        .augmentation(2.0 / 3.0 * n0 * 0.999, n0 / 2.0)
        .forcing(|x| [x[1], 1.0 - x[0]])
        .build()
        .unwrap()
}

fn random_zero_trace(space: &FunctionSpace, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut x: Vec<f64> = (0..space.n_dofs()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    for &d in space.dirichlet_dofs() {
        x[d] = 0.0;
    }
    x
}

#[test]
fn dimensions_and_multiplier_structure() {
    let sp = th(2);
    let sys = assemble_oseen(&sp, &example_like(), None).unwrap();
    let b = sys.block_index;
    assert_eq!(b.size, 84);
    assert_eq!(sys.matrix.nrows(), 84);
    let (cols, vals) = sys.matrix.row(b.multiplier);
    assert!(cols.iter().all(|c| b.pressure_range().contains(c)));
    assert_eq!(sys.matrix.get(b.multiplier, b.multiplier), 0.0);
    // (1, 1) over the unit square.
    assert!((vals.iter().sum::<f64>() - 1.0).abs() < 1e-13);
    for c in b.pressure_range() {
        assert_eq!(sys.matrix.get(c, b.multiplier), sys.matrix.get(b.multiplier, c));
    }
    assert!(!sys.bc_applied);
}

#[test]
fn load_vector_integrates_forcing() {
    let sp = th(3);
    let c = ProblemCoefficients::builder().forcing(|_| [1.0, -2.0]).pressure_mean(0.25).build().unwrap();
    let sys = assemble_oseen(&sp, &c, None).unwrap();
    let nx = sp.velocity.n_dofs() / 2;
    let sx: f64 = sys.rhs[..nx].iter().sum();
    let sy: f64 = sys.rhs[nx..2 * nx].iter().sum();
    assert!((sx - 1.0).abs() < 1e-13 && (sy + 2.0).abs() < 1e-13);
    assert_eq!(sys.rhs[sys.block_index.multiplier], 0.25);
    assert!(sys.rhs[sys.block_index.vorticity..sys.block_index.multiplier].iter().all(|&v| v == 0.0));
}

#[test]
fn zero_data_gives_zero_rhs() {
    let sp = th(2);
    let c = ProblemCoefficients::builder()
        .viscosity(|_| 0.5, |_| [0.0, 0.0], 0.5, 0.5)
        .brinkman(|_| 0.0, 0.0, 0.0)
        .augmentation(0.0, 0.0)
        .build_unchecked();
    let sys = assemble_oseen(&sp, &c, None).unwrap().apply_dirichlet(&sp.velocity, &|_, _| [0.0, 0.0]).unwrap();
    assert!(sys.rhs.iter().all(|&v| v == 0.0));
}

/// Gradients of the barycentric coordinates of a triangle, computed from
/// the vertex coordinates.
fn bary_gradients(p: [Point; 3]) -> ([[f64; 2]; 3], f64) {
    let twice = (p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]);
    let mut g = [[0.0; 2]; 3];
    for i in 0..3 {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        g[i] = [(p[j][1] - p[k][1]) / twice, (p[k][0] - p[j][0]) / twice];
    }
    (g, twice.abs() / 2.0)
}

#[test]
fn p1_augmentation_block_is_outer_product() {
    let m = mesh(1);
    let v = Arc::new(FunctionSpace::new(m.clone(), ElementFamily::vector(ElementKind::P1)).unwrap());
    let w = Arc::new(FunctionSpace::new(m.clone(), ElementFamily::scalar(ElementKind::DG0)).unwrap());
    let q = Arc::new(FunctionSpace::new(m.clone(), ElementFamily::scalar(ElementKind::DG0)).unwrap());
    let sp = MixedSpaces::new(v, w, q).unwrap();
    let (k1, k2) = (0.3, 0.7);
    let c = ProblemCoefficients::builder().brinkman(|_| 0.0, 0.0, 0.0).augmentation(k1, k2).build_unchecked();
    let sys = Assembler::new(&sp, &c).unwrap().oseen(None).unwrap();
    let nv = m.n_vertices();
    let mut expected = vec![vec![0.0; 2 * nv]; 2 * nv];
    for (cell, tri) in m.cells.iter().enumerate() {
        let (g, area) = bary_gradients(m.cell_points(cell));
        let mut dofs = Vec::new();
        let mut curl = Vec::new();
        let mut div = Vec::new();
        for comp in 0..2 {
            for (i, &vtx) in tri.iter().enumerate() {
                dofs.push(comp * nv + vtx);
                curl.push(if comp == 0 { -g[i][1] } else { g[i][0] });
                div.push(g[i][comp]);
            }
        }
        for a in 0..6 {
            for b in 0..6 {
                expected[dofs[a]][dofs[b]] += area * (k1 * curl[a] * curl[b] + k2 * div[a] * div[b]);
            }
        }
    }
    for (i, row) in expected.iter().enumerate() {
        for (j, e) in row.iter().enumerate() {
            assert!((sys.matrix.get(i, j) - e).abs() < 1e-13, "({i},{j})");
        }
    }
}

#[test]
fn coupling_blocks_are_exact_transposes() {
    let sp = th(4);
    let c = ProblemCoefficients::builder()
        .viscosity(|x| 1.0 + x[0] * x[1], |_| [0.0, 0.0], 1.0, 2.0)
        .augmentation(0.0, 0.3)
        .build_unchecked();
    let beta = DiscreteField::interpolate_vector(sp.velocity.clone(), |x| [x[1], -x[0]]).unwrap();
    let sys = Assembler::new(&sp, &c).unwrap().oseen(Some(&beta)).unwrap();
    let b = sys.block_index;
    for r in b.velocity_range() {
        let (cols, vals) = sys.matrix.row(r);
        for (&col, &v) in cols.iter().zip(vals) {
            if b.vorticity_range().contains(&col) {
                assert_eq!(v, -sys.matrix.get(col, r));
            }
            if b.pressure_range().contains(&col) {
                assert_eq!(v, sys.matrix.get(col, r));
            }
        }
    }
}

#[test]
fn dirichlet_rows_become_identity() {
    let sp = th(3);
    let sys = assemble_oseen(&sp, &example_like(), None).unwrap();
    let sys = sys.apply_dirichlet(&sp.velocity, &|_, _| [0.0, 0.0]).unwrap();
    assert!(sys.bc_applied);
    for &d in sp.velocity.dirichlet_dofs() {
        let (cols, vals) = sys.matrix.row(d);
        assert_eq!(cols, &[d]);
        assert_eq!(vals, &[1.0]);
        assert_eq!(sys.rhs[d], 0.0);
        assert_eq!(sys.matrix.transpose().row(d).0, &[d]);
    }
    let again = sys.apply_dirichlet(&sp.velocity, &|_, _| [0.0, 0.0]);
    assert!(matches!(again, Err(Error::Usage(_))));
}

#[test]
fn lid_wins_at_top_corners() {
    let m = Arc::new(Mesh::build_structured(4, 2, Rect::new(0.0, 0.0, 2.0, 1.0)).unwrap());
    let sp = MixedSpaces::build(&m, Discretisation::Mini, ElementKind::P1).unwrap();
    let c = ProblemCoefficients::constant(0.002, 0.02, 0.001, 0.001).unwrap();
    let lid = |tag: BoundaryTag, _: Point| if tag == BoundaryTag::Top { [1.0, 0.0] } else { [0.0, 0.0] };
    let sys = assemble_oseen(&sp, &c, None).unwrap().apply_dirichlet(&sp.velocity, &lid).unwrap();
    for (vtx, p) in m.vertices.iter().enumerate() {
        if p[1] == 1.0 {
            assert_eq!(sys.rhs[vtx], 1.0, "vertex {p:?}");
        }
        if p[1] == 0.0 {
            assert_eq!(sys.rhs[vtx], 0.0);
        }
    }
}

#[test]
fn elimination_keeps_stokes_block_symmetric() {
    let sp = th(4);
    let c = ProblemCoefficients::builder()
        .viscosity(|x| 1.0 + 0.5 * x[0], |_| [0.0, 0.0], 1.0, 1.5)
        .augmentation(0.4, 0.5)
        .build_unchecked();
    let g = |_: BoundaryTag, x: Point| [x[1], x[0] * x[0]];
    let sys = assemble_oseen(&sp, &c, None).unwrap().apply_dirichlet(&sp.velocity, &g).unwrap();
    let n = sp.velocity.n_dofs();
    let a = sys.matrix.submatrix(0..n, 0..n);
    let at = a.transpose();
    for r in 0..n {
        let (cols, vals) = a.row(r);
        for (&col, &v) in cols.iter().zip(vals) {
            assert!((v - at.get(r, col)).abs() <= 1e-13 * (1.0 + v.abs()));
        }
    }
}

#[test]
fn mismatched_meshes_are_rejected() {
    let v = Arc::new(FunctionSpace::new(mesh(2), ElementFamily::vector(ElementKind::P2)).unwrap());
    let w = Arc::new(FunctionSpace::new(mesh(4), ElementFamily::scalar(ElementKind::DG1)).unwrap());
    let q = Arc::new(FunctionSpace::new(mesh(2), ElementFamily::scalar(ElementKind::P1)).unwrap());
    assert!(matches!(MixedSpaces::new(v.clone(), w, q.clone()), Err(Error::Usage(_))));
    assert!(matches!(MixedSpaces::new(q.clone(), q.clone(), q), Err(Error::Usage(_))));
}

#[test]
fn viscosity_outside_bounds_is_reported() {
    let sp = th(2);
    let c = ProblemCoefficients::builder().viscosity(|x| 1.0 + x[0], |_| [1.0, 0.0], 1.0, 1.5).build().unwrap();
    assert!(matches!(assemble_oseen(&sp, &c, None), Err(Error::Configuration(_))));
}

#[test]
fn gram_matrix_examples() {
    let sp = th(4);
    let g = assemble_gram_x(&sp).unwrap();
    let n = sp.block_index().pressure;
    let embed = |f: &DiscreteField| {
        let mut x = vec![0.0; n];
        x[..f.coefficients().len()].copy_from_slice(f.coefficients());
        x
    };
    let one = DiscreteField::interpolate_vector(sp.velocity.clone(), |_| [1.0, 0.0]).unwrap();
    let x = embed(&one);
    assert!((g.bilinear(&x, &x) - 1.0).abs() < 1e-13);
    let shear = DiscreteField::interpolate_vector(sp.velocity.clone(), |p| [p[1], 0.0]).unwrap();
    let x = embed(&shear);
    assert!((g.bilinear(&x, &x) - 4.0 / 3.0).abs() < 1e-13);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        assert!(g.bilinear(&x, &x) > 0.0);
    }
}

#[test]
fn parallel_and_serial_assembly_agree_bitwise() {
    let sp = th(8);
    let c = example_like();
    let beta = DiscreteField::interpolate_vector(sp.velocity.clone(), |x| [x[0].sin(), x[1] * x[0]]).unwrap();
    let par = Assembler::new(&sp, &c).unwrap().oseen(Some(&beta)).unwrap();
    let ser = Assembler::new(&sp, &c).unwrap().serial().oseen(Some(&beta)).unwrap();
    let again = Assembler::new(&sp, &c).unwrap().oseen(Some(&beta)).unwrap();
    assert_eq!(par, ser);
    assert_eq!(par, again);
}

#[test]
fn newton_at_zero_is_the_stokes_system() {
    let sp = th(3);
    let c = example_like();
    let zero = vec![0.0; sp.n_dofs()];
    let (jac, res) = assemble_newton(&sp, &c, &zero).unwrap();
    let stokes = assemble_oseen(&sp, &c, None).unwrap();
    assert_eq!(jac.matrix, stokes.matrix);
    let mut expected = stokes.rhs.clone();
    for &d in sp.velocity.dirichlet_dofs() {
        expected[d] = 0.0;
    }
    assert_eq!(res, expected);
}

#[test]
fn jacobian_matches_finite_differences() {
    let sp = th(3);
    let c = example_like();
    let asm = Assembler::new(&sp, &c).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let x: Vec<f64> = (0..sp.n_dofs()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let delta: Vec<f64> = (0..sp.n_dofs()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let (jac, r0) = asm.newton(&x).unwrap();
    let jd = jac.matrix.matvec(&delta);
    let mut fixed = vec![false; x.len()];
    for &d in sp.velocity.dirichlet_dofs() {
        fixed[d] = true;
    }
    let remainder = |eps: f64| {
        let xe: Vec<f64> = x.iter().zip(&delta).map(|(a, b)| a + eps * b).collect();
        let re = asm.residual(&xe).unwrap();
        (0..x.len()).filter(|&i| !fixed[i]).map(|i| (re[i] - r0[i] + eps * jd[i]).abs()).fold(0.0, f64::max)
    };
    let (e3, e4) = (remainder(1e-3), remainder(1e-4));
    // Quadratic remainder: a tenfold smaller step shrinks it a hundredfold.
    assert!(e3 > 0.0 && (e3 / e4 - 100.0).abs() < 5.0, "{e3} {e4}");
}

#[test]
fn convection_satisfies_skew_pairing() {
    let sp = th(4);
    let c = ProblemCoefficients::builder().augmentation(0.3, 0.3).build_unchecked();
    let beta_fn = |x: Point| [x[0] * x[0] - x[1], x[0] * x[1] + 0.5];
    let beta = DiscreteField::interpolate_vector(sp.velocity.clone(), beta_fn).unwrap();
    let asm = Assembler::new(&sp, &c).unwrap();
    let with = asm.oseen(Some(&beta)).unwrap().matrix;
    let without = asm.oseen(None).unwrap().matrix;
    let n = sp.velocity.n_dofs();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let u = random_zero_trace(&sp.velocity, &mut rng);
    let v = random_zero_trace(&sp.velocity, &mut rng);
    let conv = |test: &[f64], trial: &[f64]| {
        let mut a = vec![0.0; sp.n_dofs()];
        let mut b = vec![0.0; sp.n_dofs()];
        a[..n].copy_from_slice(test);
        b[..n].copy_from_slice(trial);
        with.bilinear(&a, &b) - without.bilinear(&a, &b)
    };
    let uf = DiscreteField::from_coefficients(sp.velocity.clone(), u.clone()).unwrap();
    let vf = DiscreteField::from_coefficients(sp.velocity.clone(), v.clone()).unwrap();
    let rule = quadrature(6).unwrap();
    let mut div_term = 0.0;
    for cell in 0..sp.mesh().n_cells() {
        let geom = sp.mesh().cell_geometry(cell).unwrap();
        for (xi, w) in rule.iter() {
            let a = uf.eval_cell(cell, xi).unwrap().vector().unwrap();
            let b = vf.eval_cell(cell, xi).unwrap().vector().unwrap();
            let d = beta.eval_cell(cell, xi).unwrap().div2d().unwrap();
            div_term += w * geom.det.abs() * d * (a[0] * b[0] + a[1] * b[1]);
        }
    }
    let (nuv, nvu) = (conv(&v, &u), conv(&u, &v));
    let scale = nuv.abs() + nvu.abs() + div_term.abs();
    assert!((nuv + nvu + div_term).abs() <= 1e-10 * scale, "{nuv} {nvu} {div_term}");
}

#[test]
fn augmented_form_is_coercive_on_samples() {
    let sp = th(4);
    let sys = assemble_oseen(&sp, &example_like(), None).unwrap();
    let b = sys.block_index;
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..100 {
        let mut x = vec![0.0; b.size];
        x[..b.vorticity].copy_from_slice(&random_zero_trace(&sp.velocity, &mut rng));
        for v in &mut x[b.vorticity_range()] {
            *v = rng.gen_range(-1.0..1.0);
        }
        assert!(sys.matrix.bilinear(&x, &x) > 0.0);
    }
}
