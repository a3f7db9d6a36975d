use permea_core::geom::{path_length, Cell, CellSet, Dim, Norm, Point, PolyPath, Resolution};
use permea_core::permeability::{
    angle_excess, cone_witness, count_intersections, repair_path, witness_path, PermeabilityError, WitnessOptions,
};
use proptest::prelude::*;

fn cells(level: u32, it: &[(i64, i64)]) -> CellSet {
    CellSet::from_cells(Dim::TWO, Resolution::dyadic(level), "random", it.iter().map(|&(i, j)| Cell::xy(i, j)))
}

/// Random cells inside the unit square at side 1/16.
fn blobs() -> impl Strategy<Value = Vec<(i64, i64)>> {
    prop::collection::vec((0i64..16, 0i64..16), 0..60)
}

fn outside() -> impl Strategy<Value = [f64; 2]> {
    (-0.4f64..-0.05, -0.2f64..1.2).prop_map(|(x, y)| [x, y])
}

fn far_side() -> impl Strategy<Value = [f64; 2]> {
    (1.05f64..1.4, -0.2f64..1.2).prop_map(|(x, y)| [x, y])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn witness_avoids_cells_without_crossings(set in blobs(), a in outside(), b in far_side()) {
        let k = cells(4, &set);
        let opts = WitnessOptions { crossing_cells: 0, level: None };
        let (x, y) = (Point::xy(a[0], a[1]), Point::xy(b[0], b[1]));
        match witness_path(&k, &x, &y, 0.5, &Norm::Euclidean, &opts) {
            Ok(w) => {
                prop_assert_eq!(w.intersection_components, 0);
                prop_assert_eq!(count_intersections(&w.path(), &k).unwrap().count, 0);
                prop_assert!(w.length + 1e-12 >= w.distance);
                prop_assert_eq!(w.vertices[0], a);
                prop_assert_eq!(*w.vertices.last().unwrap(), b);
            }
            Err(PermeabilityError::NoPath(_)) => {}
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }

    #[test]
    fn repair_accounting_is_consistent(set in blobs(), a in outside(), b in far_side()) {
        let k = cells(4, &set);
        let straight = PolyPath::from_xy(&[a, b]).unwrap();
        let r = repair_path(&straight, &k, 2.0, 0.1).unwrap();
        let path = r.path();
        prop_assert!((path.euclid_len() - r.repaired_length).abs() <= 1e-9);
        prop_assert!((straight.euclid_len() - r.original_length).abs() <= 1e-12);
        let before = count_intersections(&straight, &k).unwrap();
        prop_assert_eq!(r.components_before, before.count);
        prop_assert!((r.covered_length - before.covered_length).abs() <= 1e-12);
        prop_assert_eq!(r.components_after, count_intersections(&path, &k).unwrap().count);
        let budget = r.original_length + r.c * r.covered_length + r.delta;
        prop_assert_eq!(r.within_budget, r.repaired_length <= budget * (1.0 + 1e-12));
        if !r.partial {
            prop_assert_eq!(r.components_after, 0);
        }
        prop_assert_eq!(r.vertices[0], a);
        prop_assert_eq!(*r.vertices.last().unwrap(), b);
    }

    #[test]
    fn cone_witness_respects_its_bound(set in blobs(), a in outside(), b in far_side(), delta in 0.05f64..0.6) {
        let k = cells(4, &set);
        let (x, y) = (Point::xy(a[0], a[1]), Point::xy(b[0], b[1]));
        match cone_witness(&k, &x, &y, delta, 256, &Norm::Euclidean) {
            Ok(w) => {
                let l = x.euclid_dist(&y);
                prop_assert_eq!(w.vertices.len(), 3);
                prop_assert!(w.length <= (l * l + 4.0 * delta * delta).sqrt() * (1.0 + 1e-12));
                let mid = [(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0];
                let off = ((w.vertices[1][0] - mid[0]).powi(2) + (w.vertices[1][1] - mid[1]).powi(2)).sqrt();
                prop_assert!(off <= delta * (1.0 + 1e-12));
                prop_assert_eq!(w.intersection_components, 0);
            }
            Err(PermeabilityError::NotFound { attempts }) => prop_assert_eq!(attempts, 256),
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }

    #[test]
    fn lengths_dominate_distances(pts in prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 2..8), p in 1.0f64..6.0) {
        let v: Vec<[f64; 2]> = pts.iter().map(|&(x, y)| [x, y]).collect();
        let path = PolyPath::from_xy(&v).unwrap();
        let (s, e) = (v[0], *v.last().unwrap());
        let d = [e[0] - s[0], e[1] - s[1]];
        for norm in [Norm::Euclidean, Norm::taxicab(), Norm::sup(), Norm::p(p).unwrap()] {
            let len = path_length(&path, &norm).unwrap().value;
            prop_assert!(len + 1e-9 >= norm.eval(&d));
        }
    }

    #[test]
    fn straight_paths_have_no_angle_excess(x in -2.0f64..2.0, y in -2.0f64..2.0, t in 0.1f64..3.0, theta in 0.0f64..std::f64::consts::TAU) {
        let z = [theta.cos(), theta.sin()];
        let path = PolyPath::from_xy(&[[x, y], [x + t * z[0] / 2.0, y + t * z[1] / 2.0], [x + t * z[0], y + t * z[1]]]).unwrap();
        let e = angle_excess(&path, &Point::xy(z[0], z[1]), 1e-6, &Norm::Euclidean).unwrap();
        prop_assert_eq!(e, 0.0);
    }
}

#[test]
fn blocked_wall_gives_no_path() {
    let wall: Vec<(i64, i64)> = (-40..40).map(|j| (8, j)).collect();
    let k = cells(4, &wall);
    let opts = WitnessOptions { crossing_cells: 0, level: None };
    let r = witness_path(&k, &Point::xy(0.1, 0.5), &Point::xy(0.9, 0.5), 0.2, &Norm::Euclidean, &opts);
    assert!(matches!(r, Err(PermeabilityError::NoPath(_))));
    let thin = WitnessOptions { crossing_cells: 1, level: None };
    let w = witness_path(&k, &Point::xy(0.1, 0.5), &Point::xy(0.9, 0.5), 0.2, &Norm::Euclidean, &thin).unwrap();
    assert_eq!(w.intersection_components, 1);
}
