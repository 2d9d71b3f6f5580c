//! Symmetric quadrature rules on the reference triangle.
//!
//! Rules are stored as orbits of the triangle's symmetry group in barycentric
//! coordinates; weights sum to the reference area 1/2 and are all positive.
//! Nodes were fitted to the exact monomial moments in double precision.

use crate::{Error, Point, Result};

/// Highest polynomial degree integrated exactly by an available rule.
pub const MAX_DEGREE: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    /// Reference coordinates `(ξ, η)`.
    pub points: Vec<Point>,
    pub weights: Vec<f64>,
    pub degree: usize,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Point, f64)> + '_ {
        self.points.iter().copied().zip(self.weights.iter().copied())
    }
}

#[derive(Debug, Clone, Copy)]
enum Orbit {
    /// Centroid with its weight.
    Centroid(f64),
    /// `(a, a, 1 − 2a)` and permutations (3 points).
    Pair(f64, f64),
    /// `(a, b, 1 − a − b)` and all permutations (6 points).
    Scalene(f64, f64, f64),
}

/// Smallest available rule exact for polynomials of total degree `degree`.
pub fn quadrature(degree: usize) -> Result<QuadratureRule> {
    let (exact, orbits) = match degree {
        0 | 1 => (1, DEGREE_1),
        2 => (2, DEGREE_2),
        3 | 4 => (4, DEGREE_4),
        5 => (5, DEGREE_5),
        6 => (6, DEGREE_6),
        7 | 8 => (8, DEGREE_8),
        9 => (9, DEGREE_9),
        10 => (10, DEGREE_10),
        11 | 12 => (12, DEGREE_12),
        _ => {
            return Err(Error::Capability(format!(
                "no triangle rule of degree {degree} (maximum {MAX_DEGREE})"
            )))
        }
    };
    let mut points = Vec::new();
    let mut weights = Vec::new();
    let mut push = |l: [f64; 3], w: f64| {
        points.push([l[1], l[2]]);
        weights.push(w);
    };
    for orbit in orbits {
        match *orbit {
            Orbit::Centroid(w) => push([1.0 / 3.0; 3], w),
            Orbit::Pair(a, w) => {
                let b = 1.0 - 2.0 * a;
                push([a, a, b], w);
                push([a, b, a], w);
                push([b, a, a], w);
            }
            Orbit::Scalene(a, b, w) => {
                let c = 1.0 - a - b;
                for l in [[a, b, c], [a, c, b], [b, a, c], [b, c, a], [c, a, b], [c, b, a]] {
                    push(l, w);
                }
            }
        }
    }
    Ok(QuadratureRule { points, weights, degree: exact })
}

/// Gauss–Legendre rule on `[0, 1]` with three points (exact to degree 5).
pub(crate) const GAUSS3_UNIT: [(f64, f64); 3] = [
    (0.1127016653792583, 5.0 / 18.0),
    (0.5, 8.0 / 18.0),
    (0.8872983346207417, 5.0 / 18.0),
];

const DEGREE_1: &[Orbit] = &[
    Orbit::Centroid(0.5),
];
const DEGREE_2: &[Orbit] = &[
    Orbit::Pair(1.0 / 6.0, 1.0 / 6.0),
];
const DEGREE_4: &[Orbit] = &[
    Orbit::Pair(0.09157621350977088, 0.05497587182766106),
    Orbit::Pair(0.44594849091596483, 0.1116907948390056),
];
const DEGREE_5: &[Orbit] = &[
    Orbit::Centroid(0.11250000000000275),
    Orbit::Pair(0.10128650732345652, 0.06296959027241374),
    Orbit::Pair(0.47014206410511605, 0.06619707639425201),
];
const DEGREE_6: &[Orbit] = &[
    Orbit::Pair(0.24928674517090335, 0.058393137863195554),
    Orbit::Pair(0.06308901449150395, 0.025422453185104592),
    Orbit::Scalene(0.3103524510337903, 0.6365024991213979, 0.041425537809183254),
];
const DEGREE_8: &[Orbit] = &[
    Orbit::Centroid(0.07215780383887245),
    Orbit::Pair(0.1705693077517308, 0.0516086852673635),
    Orbit::Pair(0.459292588292697, 0.0475458171336553),
    Orbit::Pair(0.050547228317032414, 0.016229248811601073),
    Orbit::Scalene(0.008394777409914797, 0.2631128296347287, 0.013615157087211319),
];
const DEGREE_9: &[Orbit] = &[
    Orbit::Centroid(0.048567898141113855),
    Orbit::Pair(0.04472951339447097, 0.012788837829358989),
    Orbit::Pair(0.4370895914925343, 0.03891377050231148),
    Orbit::Pair(0.4896825191984942, 0.01566735011379336),
    Orbit::Pair(0.1882035356188656, 0.03982386946361134),
    Orbit::Scalene(0.7411985987844845, 0.22196298916085572, 0.021641769688610105),
];
const DEGREE_10: &[Orbit] = &[
    Orbit::Centroid(0.04540899519301221),
    Orbit::Pair(0.4855776333843585, 0.018362978877765748),
    Orbit::Pair(0.10948157548419542, 0.022660529717590364),
    Orbit::Scalene(0.1417072194123357, 0.30793983876416076, 0.03637895842322291),
    Orbit::Scalene(0.025003534761824136, 0.24667256063796483, 0.014163621265167875),
    Orbit::Scalene(0.009540815400352134, 0.06680325101125491, 0.00471083348176246),
];
const DEGREE_12: &[Orbit] = &[
    Orbit::Pair(0.4882173898779508, 0.012865533180627149),
    Orbit::Pair(0.43972439243367584, 0.021846272036862492),
    Orbit::Pair(0.27121038500508093, 0.03142911214149716),
    Orbit::Pair(0.12757614654683433, 0.017398056807243687),
    Orbit::Pair(0.02131735023291418, 0.003083130474908329),
    Orbit::Scalene(0.11534349458931015, 0.27571327140013463, 0.020185778747289208),
    Orbit::Scalene(0.022838332393766526, 0.28132558031193716, 0.011178386679075804),
    Orbit::Scalene(0.02573405067462492, 0.11625191536183595, 0.008658115586398911),
];
#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: u32) -> f64 {
        (1..=n).map(f64::from).product()
    }

    /// ∫ x^a y^b over the reference triangle = a! b! / (a + b + 2)!.
    fn monomial(a: u32, b: u32) -> f64 {
        factorial(a) * factorial(b) / factorial(a + b + 2)
    }

    #[test]
    fn exact_on_all_monomials() {
        for degree in 0..=MAX_DEGREE {
            let rule = quadrature(degree).unwrap();
            assert!(rule.degree >= degree);
            assert!(rule.weights.iter().all(|&w| w > 0.0));
            assert!(rule.points.iter().all(|p| p[0] >= 0.0 && p[1] >= 0.0 && p[0] + p[1] <= 1.0));
            for a in 0..=rule.degree as u32 {
                for b in 0..=(rule.degree as u32 - a) {
                    let q: f64 = rule.iter().map(|(p, w)| w * p[0].powi(a as i32) * p[1].powi(b as i32)).sum();
                    let exact = monomial(a, b);
                    assert!((q - exact).abs() < 1e-14, "degree {degree}: x^{a} y^{b}: {q} vs {exact}");
                }
            }
        }
    }

    #[test]
    fn documented_examples() {
        let area: f64 = quadrature(1).unwrap().weights.iter().sum();
        assert!((area - 0.5).abs() < 1e-15);
        let r2 = quadrature(2).unwrap();
        let s: f64 = r2.iter().map(|(p, w)| w * (p[0] + p[1])).sum();
        assert!((s - 1.0 / 3.0).abs() < 1e-15);
        let r4 = quadrature(4).unwrap();
        let s: f64 = r4.iter().map(|(p, w)| w * p[0] * p[0] * p[1] * p[1]).sum();
        assert!((s - 1.0 / 180.0).abs() < 1e-15);
    }

    #[test]
    fn too_high_degree() {
        assert!(matches!(quadrature(MAX_DEGREE + 1), Err(Error::Capability(_))));
    }
}
