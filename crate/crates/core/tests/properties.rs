use std::sync::Arc;

use proptest::prelude::*;
use vvp_core::assembly::{CsrMatrix, Triplet};
use vvp_core::fe::{reference_basis, DiscreteField, ElementFamily, ElementKind, FunctionSpace, ReferenceBasis};
use vvp_core::mesh::{Mesh, Rect};
use vvp_core::verify::eoc;

fn reference_point() -> impl Strategy<Value = [f64; 2]> {
    (0.0..1.0f64, 0.0..1.0f64).prop_map(|(a, b)| if a + b <= 1.0 { [a, b] } else { [1.0 - a, 1.0 - b] })
}

proptest! {
    #[test]
    fn lagrange_bases_sum_to_one(xi in reference_point()) {
        for kind in [ElementKind::P1, ElementKind::P2, ElementKind::DG1] {
            let ReferenceBasis::Scalar { values, .. } = reference_basis(ElementFamily::scalar(kind), xi).unwrap() else {
                unreachable!()
            };
            prop_assert!((values.iter().sum::<f64>() - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn csr_matches_dense_accumulation(entries in prop::collection::vec((0usize..6, 0usize..5, -10.0..10.0f64), 0..60)) {
        let triplets: Vec<Triplet> = entries.iter().map(|&(r, c, v)| Triplet::new(r, c, v)).collect();
        let m = CsrMatrix::from_triplets(6, 5, &triplets);
        let mut dense = [[0.0f64; 5]; 6];
        for &(r, c, v) in &entries {
            dense[r][c] += v;
        }
        for r in 0..6 {
            for c in 0..5 {
                prop_assert!((m.get(r, c) - dense[r][c]).abs() < 1e-12);
            }
        }
        prop_assert_eq!(m.transpose().transpose(), m);
    }

    #[test]
    fn eoc_of_power_law_recovers_exponent(c in 0.01..100.0f64, s in 0.5..4.0f64, h0 in 0.1..1.0f64) {
        let hs = [h0, h0 / 2.0, h0 / 4.0];
        let e: Vec<f64> = hs.iter().map(|h| c * h.powf(s)).collect();
        for r in eoc(&e, &hs).unwrap() {
            prop_assert!((r - s).abs() < 1e-10);
        }
    }

    #[test]
    fn affine_fields_are_reproduced(a in -2.0..2.0f64, b in -2.0..2.0f64, c in -2.0..2.0f64, cell in 0usize..18, xi in reference_point()) {
        let mesh = Arc::new(Mesh::build_structured(3, 3, Rect::UNIT).unwrap());
        let f = move |x: [f64; 2]| [a + b * x[0], c * x[1] - a * x[0]];
        for kind in [ElementKind::P2, ElementKind::P1Bubble, ElementKind::BernardiRaugel] {
            let space = Arc::new(FunctionSpace::new(mesh.clone(), ElementFamily::vector(kind)).unwrap());
            let field = DiscreteField::interpolate_vector(space, f).unwrap();
            let v = field.eval_cell(cell, xi).unwrap();
            let x = mesh.cell_geometry(cell).unwrap().map(xi);
            let e = f(x);
            let got = v.vector().unwrap();
            prop_assert!((got[0] - e[0]).abs() < 1e-12 && (got[1] - e[1]).abs() < 1e-12);
            prop_assert!((v.div2d().unwrap() - (b + c)).abs() < 1e-12);
            prop_assert!((v.curl2d().unwrap() + a).abs() < 1e-12);
        }
    }
}
