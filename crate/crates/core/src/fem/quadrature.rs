use crate::mesh::Point;

/// A quadrature rule on the reference triangle (barycentric points) or the
/// reference segment (single parameter in `[0, 1]`).
///
/// Weights are normalized to sum to one; multiply by the element measure.
#[derive(Clone, Debug, PartialEq)]
pub struct Quadrature<P> {
    pub points: Vec<P>,
    pub weights: Vec<f64>,
    /// Highest total polynomial degree integrated exactly.
    pub degree: usize,
}

pub type TriangleRule = Quadrature<[f64; 3]>;
pub type EdgeRule = Quadrature<f64>;

/// Six-point symmetric rule, exact for degree 4.
pub fn triangle_rule() -> TriangleRule {
    const A1: f64 = 0.445_948_490_915_965;
    const W1: f64 = 0.223_381_589_678_011;
    const A2: f64 = 0.091_576_213_509_771;
    const W2: f64 = 0.109_951_743_655_322;
    let orbit = |a: f64| {
        let b = 1.0 - 2.0 * a;
        [[a, a, b], [a, b, a], [b, a, a]]
    };
    let mut points = Vec::with_capacity(6);
    let mut weights = Vec::with_capacity(6);
    for (a, w) in [(A1, W1), (A2, W2)] {
        points.extend(orbit(a));
        weights.extend([w; 3]);
    }
    Quadrature {
        points,
        weights,
        degree: 4,
    }
}

/// Two-point Gauss-Legendre rule on `[0, 1]`, exact for degree 3.
pub fn edge_rule() -> EdgeRule {
    let d = 0.5 / 3f64.sqrt();
    Quadrature {
        points: vec![0.5 - d, 0.5 + d],
        weights: vec![0.5, 0.5],
        degree: 3,
    }
}

/// Physical point of barycentric coordinates `l` in triangle `tri`.
pub fn barycentric_point(tri: &[Point; 3], l: [f64; 3]) -> Point {
    [
        l[0] * tri[0][0] + l[1] * tri[1][0] + l[2] * tri[2][0],
        l[0] * tri[0][1] + l[1] * tri[1][1] + l[2] * tri[2][1],
    ]
}
