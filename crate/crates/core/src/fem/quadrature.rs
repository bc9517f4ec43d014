//! Triangle and edge quadrature rules.

/// 6-point rule exact for degree-4 polynomials: barycentric coordinates and
/// weights normalized to sum to one.
pub const TRI_POINTS: [[f64; 3]; 6] = {
    const A1: f64 = 0.445948490915964886318329253883;
    const B1: f64 = 1.0 - 2.0 * A1;
    const A2: f64 = 0.091_576_213_509_770_74;
    const B2: f64 = 1.0 - 2.0 * A2;
    [
        [A1, A1, B1],
        [A1, B1, A1],
        [B1, A1, A1],
        [A2, A2, B2],
        [A2, B2, A2],
        [B2, A2, A2],
    ]
};

pub const TRI_WEIGHTS: [f64; 6] = {
    const W1: f64 = 0.223_381_589_678_011_47;
    const W2: f64 = 0.109_951_743_655_321_87;
    [W1, W1, W1, W2, W2, W2]
};

pub const NQ: usize = 6;

/// 3-point Gauss–Legendre rule on [0, 1]: (position, weight).
pub const EDGE_RULE: [(f64, f64); 3] = {
    const D: f64 = 0.387298334620741688697581063579; // sqrt(3/5)/2
    [
        (0.5 - D, 5.0 / 18.0),
        (0.5, 8.0 / 18.0),
        (0.5 + D, 5.0 / 18.0),
    ]
};
