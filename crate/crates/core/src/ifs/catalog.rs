//! Standard self-similar sets used in examples and tests.

use crate::num::{Rational, Real};

use super::{IfsSystem, Similarity};

fn q(p: i128, d: i128) -> Real {
    Real::Exact(Rational::new(p, d))
}

fn shift(ratio: Real, t: [Real; 2]) -> Similarity {
    Similarity::planar(ratio, q(0, 1), false, t).expect("valid ratio")
}

/// Triangle with vertices (0,0), (1,0), (1/2, √3/2).
pub fn sierpinski_triangle() -> IfsSystem {
    let h = q(1, 2);
    IfsSystem::new(vec![
        shift(h, [q(0, 1), q(0, 1)]),
        shift(h, [q(1, 2), q(0, 1)]),
        shift(h, [q(1, 4), Real::Float(3f64.sqrt() / 4.0)]),
    ])
    .expect("contractive")
}

/// The 8-map carpet on the unit square, maps ordered row by row.
pub fn sierpinski_carpet() -> IfsSystem {
    let third = q(1, 3);
    let mut maps = Vec::new();
    for j in 0..3 {
        for i in 0..3 {
            if (i, j) != (1, 1) {
                maps.push(shift(third, [q(i, 3), q(j, 3)]));
            }
        }
    }
    IfsSystem::new(maps).expect("contractive")
}

/// Middle-third Cantor set on the x axis of the plane.
pub fn cantor_planar() -> IfsSystem {
    disconnected_pair()
}

/// Two maps of ratio 1/3 with translations (0,0) and (2/3,0).
pub fn disconnected_pair() -> IfsSystem {
    IfsSystem::new(vec![shift(q(1, 3), [q(0, 1), q(0, 1)]), shift(q(1, 3), [q(2, 3), q(0, 1)])])
        .expect("contractive")
}

/// Middle-third Cantor set in R^1.
pub fn cantor_line() -> IfsSystem {
    IfsSystem::new(vec![
        Similarity::linear1d(q(1, 3), false, q(0, 1)).expect("valid"),
        Similarity::linear1d(q(1, 3), false, q(2, 3)).expect("valid"),
    ])
    .expect("contractive")
}

/// Unit square as four half-size copies.
pub fn filled_square() -> IfsSystem {
    let h = q(1, 2);
    IfsSystem::new(vec![
        shift(h, [q(0, 1), q(0, 1)]),
        shift(h, [q(1, 2), q(0, 1)]),
        shift(h, [q(0, 1), q(1, 2)]),
        shift(h, [q(1, 2), q(1, 2)]),
    ])
    .expect("contractive")
}

/// Unit segment [0,1] x {0} as two half-size copies.
pub fn unit_segment() -> IfsSystem {
    IfsSystem::new(vec![shift(q(1, 2), [q(0, 1), q(0, 1)]), shift(q(1, 2), [q(1, 2), q(0, 1)])])
        .expect("contractive")
}

/// Ratio-1/2 maps of the line with the given translations.
pub fn line_halves(translations: &[Real]) -> IfsSystem {
    IfsSystem::new(
        translations
            .iter()
            .map(|t| Similarity::linear1d(q(1, 2), false, *t).expect("valid"))
            .collect(),
    )
    .expect("contractive")
}
