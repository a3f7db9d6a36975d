use permea_core::covers::{outer_boundary, LoopResult, Rect};
use proptest::prelude::*;

/// A chain of grid squares, each overlapping the previous one.
fn chain() -> impl Strategy<Value = Vec<Rect>> {
    prop::collection::vec((-1i32..=1, -1i32..=1, 1i32..=3), 1..25).prop_map(|steps| {
        let mut out: Vec<Rect> = Vec::new();
        let (mut x, mut y) = (0i32, 0i32);
        for (dx, dy, s) in steps {
            if let Some(prev) = out.last() {
                // stay inside the previous square so the two overlap
                let side = (prev.side() * 8.0) as i32;
                x += dx.clamp(0, side - 1);
                y += dy.clamp(0, side - 1);
            }
            let q = |v: i32| v as f64 / 8.0;
            out.push(Rect { lo: [q(x), q(y)], hi: [q(x + s), q(y + s)] });
        }
        out
    })
}

fn as_loop(vertices: Vec<[f64; 2]>) -> LoopResult {
    LoopResult {
        n: 1,
        vertices,
        length: 0.0,
        bound: 0.0,
        contacts: Vec::new(),
        h_radius: 0.0,
        squares: 0,
        provenance: String::new(),
    }
}

proptest! {
    #[test]
    fn outer_boundary_surrounds_every_square(rects in chain()) {
        let v = outer_boundary(&rects).unwrap();
        prop_assert!(v.len() >= 5);
        prop_assert_eq!(v.first(), v.last());
        let perimeter: f64 = v.windows(2).map(|w| (w[1][0] - w[0][0]).abs() + (w[1][1] - w[0][1]).abs()).sum();
        let total: f64 = rects.iter().map(|r| r.perimeter()).sum();
        prop_assert!(perimeter <= total + 1e-9);
        for w in v.windows(2) {
            // rectilinear
            prop_assert!(w[0][0] == w[1][0] || w[0][1] == w[1][1]);
        }
        let lp = as_loop(v);
        prop_assert!(lp.is_simple());
        for r in &rects {
            let c = [(r.lo[0] + r.hi[0]) / 2.0, (r.lo[1] + r.hi[1]) / 2.0];
            prop_assert!(lp.encloses(c), "center {:?} outside", c);
        }
    }
}

#[test]
fn single_square_is_its_own_boundary() {
    let v = outer_boundary(&[Rect { lo: [0.0, 0.0], hi: [1.0, 1.0] }]).unwrap();
    assert_eq!(v.len(), 5);
    let lp = as_loop(v);
    assert!(lp.encloses([0.5, 0.5]));
    assert!(!lp.encloses([1.5, 0.5]));
}
