//! Acceptance checks. Each test prints one `PASS`/`FAIL` line with its measured values.

use std::f64::consts::SQRT_2;
use std::process::Command;
use std::time::{Duration, Instant};

use num_rational::BigRational;
use permea_core::covers::{
    box_counts, box_dimension, contacts_near, cover_sequence, nagata_cover, select_delta_k, surrounding_loop, CoverPiece,
};
use permea_core::geom::{path_length, Dim, Norm, Point, PolyPath, Resolution};
use permea_core::ifs::{approximate, catalog, IfsSystem};
use permea_core::neighbors::{
    contact_points, intersection_points, neighbor_closure, pairwise_finiteness, ClosureParams, IntersectionSet, NeighborClosure,
    PairVerdict,
};
use permea_core::num::Rational;
use permea_core::obstacles::{
    bmc_cells, bmc_pattern, bmc_window_check, cantor_level, extrude, min_crossing_variation, svc_level, theta_squares,
    Axis, WindowCheck,
};
use permea_core::permeability::{angle_excess, repair_path, witness_path, WitnessOptions};
use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_permea");

const CARPET_DIM_TOL: f64 = 0.06;
const SQUARE_DIM_TOL: f64 = 0.05;
const CANTOR_DIM_TOL: f64 = 0.05;
const DIM_RUNTIME: Duration = Duration::from_secs(20);
const MIDPOINT_TOL: f64 = 1e-6;
const EXTENT_RATIO: (f64, f64) = (0.8, 1.2);
const SVC_LEVELS: u32 = 12;
const BMC_CELLS: usize = 216;
const BMC_WINDOWS: usize = 228;
const SEGMENT_DIAGONALS: f64 = 2.0;
const TRIANGLE_DELTA_FRACTION: f64 = 0.07;
/// Level-independent cap on intersection components for the triangle profile.
const TRIANGLE_COMPONENT_CAP: usize = 9;
const BMC_EXCESS_FRACTION: f64 = 0.5;
const THETA_DELTA: f64 = 0.05;
const LOOP_PROBES: usize = 1000;
const NAGATA_SCALES: [f64; 3] = [0.5, 0.25, 0.1];
const NORM_SEQUENCES: usize = 50;
const NORM_FACTOR: f64 = 10.0;
const STAIRCASE_GAIN: f64 = 0.05;

fn report(name: &str, result: Result<String, String>) {
    match result {
        Ok(detail) => println!("PASS {name}: {detail}"),
        Err(detail) => {
            println!("FAIL {name}: {detail}");
            panic!("{name} failed: {detail}");
        }
    }
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn permea(args: &[&str]) -> (i32, Vec<u8>) {
    let o = Command::new(BIN).args(args).output().expect("binary runs");
    (o.status.code().unwrap_or(-1), o.stdout)
}

fn permea_json(args: &[&str]) -> Result<Value, String> {
    let (code, out) = permea(args);
    if code != 0 {
        return Err(format!("permea {} exited {code}", args.join(" ")));
    }
    serde_json::from_slice(&out).map_err(|e| e.to_string())
}

fn triangle_setup() -> (IfsSystem, NeighborClosure, IntersectionSet) {
    let tri = catalog::sierpinski_triangle();
    let closure = neighbor_closure(&tri, ClosureParams { eps: 0.0, level: 4, max_maps: 5000 }).unwrap();
    let h = intersection_points(&tri, &closure, 1e-6).unwrap();
    (tri, closure, h)
}

#[test]
fn box_dimension_matches_similarity_dimension() {
    report("box dimension", box_dimension_check());
}

fn box_dimension_check() -> Result<String, String> {
    let start = Instant::now();
    let cases = [
        ("carpet", catalog::sierpinski_carpet(), 8f64.ln() / 3f64.ln(), CARPET_DIM_TOL),
        ("square", catalog::filled_square(), 2.0, SQUARE_DIM_TOL),
        ("cantor", catalog::cantor_line(), 2f64.ln() / 3f64.ln(), CANTOR_DIM_TOL),
    ];
    let mut out = Vec::new();
    for (name, ifs, oracle, tol) in cases {
        let counts = box_counts(&ifs, 1..=6).map_err(|e| e.to_string())?;
        let est = box_dimension(&counts).map_err(|e| e.to_string())?.estimate;
        check((est - oracle).abs() <= tol, || format!("{name}: {est:.4} vs {oracle:.4} ± {tol}"))?;
        out.push(format!("{name} {est:.4}"));
    }
    let took = start.elapsed();
    check(took < DIM_RUNTIME, || format!("took {took:?}"))?;
    Ok(format!("{} in {:.1?}", out.join(", "), took))
}

#[test]
fn triangle_is_finite_type() {
    report("finite type", finite_type_check());
}

fn finite_type_check() -> Result<String, String> {
    let tri = catalog::sierpinski_triangle();
    let at = |level| neighbor_closure(&tri, ClosureParams { eps: 0.0, level, max_maps: 5000 }).unwrap();
    let (c4, c6) = (at(4), at(6));
    check(c4.is_stabilized() && c6.is_stabilized(), || "closure did not stabilize".into())?;
    check(c4.same_maps(&c6), || format!("{} maps at level 4, {} at level 6", c4.len(), c6.len()))?;

    // fixed points by iteration; H is the vertex set, the level-1 contacts are the side midpoints
    let fixed: Vec<[f64; 3]> = tri
        .maps()
        .iter()
        .map(|f| (0..200).fold([0.3, 0.3, 0.0], |x, _| f.apply_array(&x)))
        .collect();
    let near = |set: &IntersectionSet, p: [f64; 2]| {
        set.points.iter().map(|e| ((e.center.x() - p[0]).powi(2) + (e.center.y() - p[1]).powi(2)).sqrt()).fold(f64::INFINITY, f64::min)
    };
    let h = intersection_points(&tri, &c4, 1e-6).map_err(|e| e.to_string())?;
    check(h.is_certified_finite(), || format!("H status {:?}", h.status))?;
    check(h.points.len() == 3, || format!("|H| = {}", h.points.len()))?;
    for f in &fixed {
        let d = near(&h, [f[0], f[1]]);
        check(d <= MIDPOINT_TOL, || format!("fixed point {f:?} is {d:e} from H"))?;
    }
    for i in 0..fixed.len() {
        for j in i + 1..fixed.len() {
            let m = [(fixed[i][0] + fixed[j][0]) / 2.0, (fixed[i][1] + fixed[j][1]) / 2.0];
            let c = contact_points(&tri, i + 1, j + 1, 1e-6).map_err(|e| e.to_string())?;
            check(c.points.len() == 1, || format!("pieces {i}, {j} meet in {} clusters", c.points.len()))?;
            let d = near(&c, m);
            check(d <= MIDPOINT_TOL, || format!("midpoint {m:?} is {d:e} from the contact of pieces {i}, {j}"))?;
        }
    }

    let carpet = catalog::sierpinski_carpet();
    let t: Vec<[f64; 3]> = carpet.maps().iter().map(|f| f.translation()).collect();
    let third = 1.0 / 3.0;
    let adjacent = |i: usize, j: usize| {
        let (dx, dy) = ((t[i][0] - t[j][0]).abs(), (t[i][1] - t[j][1]).abs());
        ((dx - third).abs() < 1e-12 && dy < 1e-12) || ((dy - third).abs() < 1e-12 && dx < 1e-12)
    };
    let pairs = pairwise_finiteness(&carpet, 3..=6).map_err(|e| e.to_string())?;
    let mut edges = 0;
    for p in pairs.iter().filter(|p| adjacent(p.i - 1, p.j - 1)) {
        edges += 1;
        check(p.verdict == PairVerdict::SuspectedInfinite, || format!("pair ({}, {}) is {:?}", p.i, p.j, p.verdict))?;
        for r in &p.ratios {
            check(EXTENT_RATIO.0 <= *r && *r <= EXTENT_RATIO.1, || format!("pair ({}, {}) ratio {r}", p.i, p.j))?;
        }
    }
    check(edges == 8, || format!("{edges} edge-adjacent pairs"))?;
    Ok(format!("{} maps, |H| = 3 at the vertices, contacts at the midpoints, {edges} carpet edges suspected-infinite", c4.len()))
}

#[test]
fn svc_measure_is_exact() {
    report("svc measure", svc_check());
}

fn svc_check() -> Result<String, String> {
    let mut prev = svc_level(0).map_err(|e| e.to_string())?;
    for n in 0..=SVC_LEVELS {
        let f = svc_level(n).map_err(|e| e.to_string())?;
        let want = Rational::new(1, 2) + Rational::new(1, 1i128 << (n + 1));
        check(f.measure() == want, || format!("level {n}: measure {} vs {want}", f.measure()))?;
        check(f.is_well_formed() && f.is_nested_in(&prev), || format!("level {n} is not nested"))?;
        prev = f;
    }
    Ok(format!("levels 0..={SVC_LEVELS} exact and nested"))
}

#[test]
fn bmc_combinatorics() {
    report("bmc combinatorics", bmc_check());
}

fn bmc_check() -> Result<String, String> {
    let p = bmc_pattern();
    check(p.len() == BMC_CELLS, || format!("|R| = {}", p.len()))?;
    let w = bmc_window_check(&p).map_err(|e| e.to_string())?;
    check(w == WindowCheck::Pass { windows: BMC_WINDOWS }, || format!("{w:?}"))?;
    for l in 1..=4 {
        let m = bmc_cells(&p, l).map_err(|e| e.to_string())?.measure();
        let want = Rational::new(9, 20).pow(l as i32);
        check(m == want, || format!("level {l}: {m} vs {want}"))?;
    }
    Ok(format!("|R| = {BMC_CELLS}, {BMC_WINDOWS} windows, measures (9/20)^l"))
}

#[test]
fn segment_obstacle_profile() {
    report("segment profile", segment_check());
}

fn segment_check() -> Result<String, String> {
    let line = cantor_level(0).map_err(|e| e.to_string())?;
    let half = Rational::new(1, 2);
    let (x, y) = (Point::xy(0.3, 0.1), Point::xy(0.7, 0.9));
    let mut out = Vec::new();
    for level in 3..=8 {
        let res = Resolution::dyadic(level);
        let k = extrude(&line, Axis::X, (half, half), res).map_err(|e| e.to_string())?;
        let w = witness_path(&k, &x, &y, 0.1, &Norm::Euclidean, &WitnessOptions::default()).map_err(|e| e.to_string())?;
        let cap = SEGMENT_DIAGONALS * res.diagonal(Dim::TWO);
        check(w.excess <= cap, || format!("level {level}: excess {} > {cap}", w.excess))?;
        check(w.intersection_components <= 1, || format!("level {level}: {} components", w.intersection_components))?;
        out.push(format!("{:.2e}", w.excess));
    }
    Ok(format!("excess by level {}", out.join(" ")))
}

#[test]
fn triangle_profile() {
    report("triangle profile", triangle_profile_check());
}

fn triangle_profile_check() -> Result<String, String> {
    let delta = TRIANGLE_DELTA_FRACTION * 1.4;
    let d = format!("{delta}");
    let v = permea_json(&["path", "sierpinski-triangle", "--from", "-0.2,0.3", "--to", "1.2,0.3", "--delta", &d, "--levels", "3..8"])?;
    let mut out = Vec::new();
    for l in v["levels"].as_array().unwrap() {
        let level = &l["level"];
        check(l["outcome"] == "found", || format!("level {level}: {}", l["reason"]))?;
        let excess = l["excess"].as_f64().unwrap();
        let comps = l["intersection_components"].as_u64().unwrap() as usize;
        check(excess <= delta, || format!("level {level}: excess {excess} > {delta}"))?;
        check(comps <= TRIANGLE_COMPONENT_CAP, || format!("level {level}: {comps} components"))?;
        out.push(format!("{excess:.4}/{comps}"));
    }
    check(out.len() == 6, || format!("{} levels", out.len()))?;
    Ok(format!("excess/components by level {}", out.join(" ")))
}

#[test]
fn bmc_impermeability_signature() {
    report("bmc signature", bmc_signature_check());
}

fn bmc_signature_check() -> Result<String, String> {
    let p = bmc_pattern();
    let v = permea_json(&["path", "bmc", "--from", "-0.05,1", "--to", "1.05,1", "--delta", "0.25", "--levels", "1,2", "--crossing", "0"])?;
    let mut out = Vec::new();
    for (k, l) in [1u32, 2].into_iter().enumerate() {
        let bound = min_crossing_variation(&p, l).map_err(|e| e.to_string())?.variation();
        let bound = bound.ok_or_else(|| format!("level {l}: crossing blocked"))?;
        let b = permea_core::num::to_f64(&bound);
        check(b > 0.0, || format!("level {l}: bound {bound}"))?;
        let entry = &v["levels"][k];
        let excess = entry["excess"].as_f64().ok_or_else(|| format!("level {l}: no witness"))?;
        check(excess >= BMC_EXCESS_FRACTION * b, || format!("level {l}: excess {excess} < half of {b}"))?;
        out.push(format!("l={l} bound {bound} excess {excess:.3}"));
    }
    Ok(out.join(", "))
}

#[test]
fn theta_squares_repair() {
    report("theta repair", theta_check());
}

fn theta_check() -> Result<String, String> {
    let pairs = [([-0.1, -0.1], [1.1, 1.1]), ([-0.1, 0.3], [1.1, 0.8]), ([0.1, 0.05], [0.9, 0.95])];
    let mut worst: f64 = f64::NEG_INFINITY;
    for n in 1..=5 {
        let ts = theta_squares(n, Resolution::dyadic(2 * n + 2)).map_err(|e| e.to_string())?;
        for (a, b) in pairs {
            let path = PolyPath::from_xy(&[a, b]).map_err(|e| e.to_string())?;
            let r = repair_path(&path, &ts.cells, SQRT_2, THETA_DELTA).map_err(|e| e.to_string())?;
            let cap = SQRT_2 * path.euclid_len() + THETA_DELTA;
            check(r.repaired_length <= cap, || format!("level {n} {a:?}->{b:?}: {} > {cap}", r.repaired_length))?;
            worst = worst.max(r.repaired_length / cap);
        }
    }
    Ok(format!("worst length / (√2‖y−x‖ + δ) = {worst:.3}"))
}

#[test]
fn triangle_cover_sequence_and_loop() {
    report("cover sequence", cover_check());
}

fn cover_check() -> Result<String, String> {
    let (tri, closure, h) = triangle_setup();
    let dk = select_delta_k(&tri, &closure, &h, 0.5).map_err(|e| e.to_string())?;
    let seq = cover_sequence(&tri, &h, &dk, 3).map_err(|e| e.to_string())?;
    check(!seq.c_grows, || "#P_n still growing".into())?;
    for layer in &seq.layers {
        check(layer.pieces.len() <= seq.c, || format!("n = {}: #P_n = {} > c = {}", layer.n, layer.pieces.len(), seq.c))?;
        check(layer.boundary_length <= layer.bound, || format!("n = {}: {} > {}", layer.n, layer.boundary_length, layer.bound))?;
    }

    let alpha = surrounding_loop(&seq, 2).map_err(|e| e.to_string())?;
    let v = &alpha.vertices;
    check(v.first() == v.last() && v.len() >= 5, || "loop is not closed".into())?;
    check(alpha.is_simple(), || "loop is not simple".into())?;
    let delta = dk.delta_f64();
    let centers = h.centers();
    let k8 = approximate(&tri, &tri.level_rho(8), Resolution::dyadic(10)).map_err(|e| e.to_string())?;
    let contacts = alpha.contacts_with(&k8);
    check(contacts_near(&contacts, &centers, delta), || "loop meets K away from H".into())?;
    let near_h = |p: [f64; 2]| centers.iter().any(|x| (p[0] - x.x()).abs().max((p[1] - x.y()).abs()) <= delta);
    let pieces = tri.pieces_of_length(8);
    let step = pieces.len() / LOOP_PROBES;
    let mut probes = 0;
    for piece in pieces.iter().step_by(step).take(LOOP_PROBES) {
        let p = [piece.center[0], piece.center[1]];
        check(alpha.encloses(p) || near_h(p), || format!("probe {p:?} outside the loop and away from H"))?;
        probes += 1;
    }
    check(probes == LOOP_PROBES, || format!("{probes} probes"))?;
    let sizes: Vec<usize> = seq.layers.iter().map(|l| l.pieces.len()).collect();
    Ok(format!("c = {}, #P_n = {sizes:?}, loop of {} vertices, {} contacts", seq.c, v.len(), contacts.len()))
}

fn exact(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite")
}

#[test]
fn nagata_covers() {
    report("nagata cover", nagata_check());
}

fn nagata_check() -> Result<String, String> {
    let (tri, closure, h) = triangle_setup();
    let eps = 0.5;
    let mut out = Vec::new();
    for s in NAGATA_SCALES {
        let cover = nagata_cover(&tri, &closure, &h, s, eps).map_err(|e| e.to_string())?.map_err(|f| format!("{f:?}"))?;
        check(cover.families.len() == 2, || format!("{} families", cover.families.len()))?;
        let r_min = tri.r_min().to_f64();
        let eps_n = (eps / cover.diameter).min(cover.z_min_distance.map_or(f64::INFINITY, |z| 0.99 * z / cover.diameter));
        let c1 = eps_n * r_min / 8.0;
        check(cover.c1 == c1, || format!("c1 = {} vs {c1}", cover.c1))?;
        check(cover.c == cover.c2.map_or(c1, |c2| c1.min(c2)), || "c is not min(c1, c2)".into())?;
        let required = cover.c * s;
        for fam in &cover.families {
            for p in &fam.pieces {
                check(p.diameter_bound(cover.diameter) <= s, || format!("{} piece wider than {s}", fam.name))?;
            }
            if let Some(m) = fam.min_distance {
                check(m >= required, || format!("{}: {m} < {required}", fam.name))?;
            }
        }
        // ball family again, exactly: |c_i - c_j| >= r_i + r_j + cs
        let balls: Vec<([f64; 2], f64)> = cover.families[0]
            .pieces
            .iter()
            .filter_map(|p| match p {
                CoverPiece::Ball { center, radius, .. } => Some((*center, *radius)),
                CoverPiece::Piece { .. } => None,
            })
            .collect();
        let req = exact(required);
        for (i, (ci, ri)) in balls.iter().enumerate() {
            for (cj, rj) in &balls[i + 1..] {
                let dx = exact(ci[0]) - exact(cj[0]);
                let dy = exact(ci[1]) - exact(cj[1]);
                let gap = exact(*ri) + exact(*rj) + &req;
                check(&dx * &dx + &dy * &dy >= &gap * &gap, || format!("s = {s}: balls at {ci:?} and {cj:?} too close"))?;
            }
        }
        out.push(format!("s={s} c={:.3e} balls={}", cover.c, balls.len()));
    }

    let pair = catalog::disconnected_pair();
    let pc = neighbor_closure(&pair, ClosureParams::default()).map_err(|e| e.to_string())?;
    let ph = intersection_points(&pair, &pc, 1e-6).map_err(|e| e.to_string())?;
    let cover = nagata_cover(&pair, &pc, &ph, 0.25, eps).map_err(|e| e.to_string())?.map_err(|f| format!("{f:?}"))?;
    check(cover.families[0].pieces.is_empty(), || format!("U_1 has {} members", cover.families[0].pieces.len()))?;
    out.push("disconnected pair U_1 = ∅".into());
    Ok(out.join(", "))
}

/// Zigzag from 0 to `z` with turns of `phi` and an out-and-back spur of length `spur`.
fn zigzag(z: [f64; 2], segments: usize, phi: f64, spur: f64) -> Vec<[f64; 2]> {
    let len = (z[0] * z[0] + z[1] * z[1]).sqrt();
    let u = [z[0] / len, z[1] / len];
    let step = len / (segments as f64 * phi.cos());
    let mut p = [0.0, 0.0];
    let mut v = vec![p];
    for k in 0..segments {
        let a = if k % 2 == 0 { phi } else { -phi };
        let d = [u[0] * a.cos() - u[1] * a.sin(), u[0] * a.sin() + u[1] * a.cos()];
        p = [p[0] + step * d[0], p[1] + step * d[1]];
        v.push(p);
        if k == segments / 2 && spur > 0.0 {
            let side = [p[0] - u[1] * spur / 2.0, p[1] + u[0] * spur / 2.0];
            v.push(side);
            v.push(p);
        }
    }
    let last = v.len() - 1;
    v[last] = z;
    v
}

#[test]
fn norm_diagnostic() {
    report("norm diagnostic", norm_check());
}

fn norm_check() -> Result<String, String> {
    let norms = [Norm::Euclidean, Norm::taxicab(), Norm::sup()];
    let golden = 0.5 * (5f64.sqrt() - 1.0);
    let mut worst: f64 = 0.0;
    for s in 0..NORM_SEQUENCES {
        let theta = 2.0 * std::f64::consts::PI * ((s as f64 * golden) % 1.0);
        let r = 0.5 + 2.5 * ((s as f64 * 0.37) % 1.0);
        let z = [r * theta.cos(), r * theta.sin()];
        let zp = Point::xy(z[0], z[1]);
        for n in 1..=8 {
            let eps = 0.5f64.powi(n);
            let path = PolyPath::from_xy(&zigzag(z, 2 * (s % 7) + 4, eps / 2.0, eps * eps)).map_err(|e| e.to_string())?;
            let excess = angle_excess(&path, &zp, eps, &Norm::Euclidean).map_err(|e| e.to_string())?;
            check(excess <= 2.0 * eps * eps, || format!("sequence {s}, n = {n}: angle excess {excess}"))?;
            for norm in &norms {
                let len = path_length(&path, norm).map_err(|e| e.to_string())?.value;
                let gap = (len - norm.eval(&z)).abs();
                check(gap <= NORM_FACTOR * eps, || format!("sequence {s}, n = {n}, {}: gap {gap} > {}", norm.name(), NORM_FACTOR * eps))?;
                worst = worst.max(gap / eps);
            }
        }
    }

    let mut least = f64::INFINITY;
    for s in 0..NORM_SEQUENCES {
        let theta = (15.0 + 60.0 * s as f64 / (NORM_SEQUENCES - 1) as f64).to_radians();
        let z = [theta.cos(), theta.sin()];
        let zp = Point::xy(z[0], z[1]);
        for steps in [4usize, 16, 64, 256] {
            let mut v = vec![[0.0, 0.0]];
            for k in 0..steps {
                let t = (k + 1) as f64 / steps as f64;
                v.push([z[0] * t, v.last().unwrap()[1]]);
                v.push([z[0] * t, z[1] * t]);
            }
            let path = PolyPath::from_xy(&v).map_err(|e| e.to_string())?;
            let l1 = path_length(&path, &Norm::taxicab()).map_err(|e| e.to_string())?.value;
            check((l1 - Norm::taxicab().eval(&z)).abs() <= 1e-12, || format!("staircase {s} is not a 1-norm geodesic"))?;
            let excess = angle_excess(&path, &zp, 0.1, &Norm::Euclidean).map_err(|e| e.to_string())?;
            check(excess >= 0.5, || format!("staircase {s}: angle excess {excess}"))?;
            let eu = path_length(&path, &Norm::Euclidean).map_err(|e| e.to_string())?.value;
            check(eu >= (1.0 + STAIRCASE_GAIN), || format!("staircase {s}: Euclidean length {eu}"))?;
            least = least.min(eu);
        }
    }
    Ok(format!("worst gap / ε_n = {worst:.3}, least staircase length {least:.4}"))
}

#[test]
fn cli_runs_are_deterministic() {
    report("determinism", determinism_check());
}

fn determinism_check() -> Result<String, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let svg = |tag: &str| dir.path().join(format!("{tag}.svg")).to_str().unwrap().to_string();
    let mut runs: Vec<(String, Vec<String>, Option<String>)> = Vec::new();
    let analyze_args = ["--pair-levels", "3..4", "--cover-layers", "1"];
    for ifs in ["sierpinski-triangle", "sierpinski-carpet", "filled-square", "unit-segment", "cantor-dust", "cantor-line"] {
        let mut a = vec!["analyze".to_string(), ifs.to_string()];
        a.extend(analyze_args.iter().map(|s| s.to_string()));
        runs.push((ifs.into(), a, None));
    }
    let obstacles = [
        ("sierpinski-triangle", "-0.2,0.3", "1.2,0.3", "3,4"),
        ("sierpinski-carpet", "-0.1,0.5", "1.1,0.5", "1,2"),
        ("filled-square", "-0.1,0.5", "1.1,0.5", "1"),
        ("cantor-dust", "-0.1,0.5", "1.1,0.5", "2,3"),
        ("bmc", "-0.05,1", "1.05,1", "1"),
        ("bmc-full", "-0.05,1", "1.05,1", "1"),
        ("bmc-empty", "-0.05,1", "1.05,1", "1"),
        ("cantor", "-0.1,0.5", "1.1,0.5", "2,3"),
        ("svc", "-0.1,0.5", "1.1,0.5", "2,3"),
        ("theta-squares", "-0.1,0.3", "1.1,0.3", "2,3"),
    ];
    for (name, from, to, levels) in obstacles {
        let tag = format!("path-{name}");
        let a = ["path", name, "--from", from, "--to", to, "--delta", "0.1", "--levels", levels, "--svg", &svg(&tag)];
        runs.push((tag.clone(), a.iter().map(|s| s.to_string()).collect(), Some(svg(&tag))));
    }
    for pattern in ["bmc", "bmc-full", "bmc-empty"] {
        let a = ["carpet", "--pattern", pattern, "--check-window", "--crossing-level", "1"];
        runs.push((format!("carpet-{pattern}"), a.iter().map(|s| s.to_string()).collect(), None));
    }
    for scene in ["triangle-loop", "bmc", "theta-squares"] {
        let tag = format!("scene-{scene}");
        let a = ["render".to_string(), format!("scene:{scene}"), "--svg".to_string(), svg(&tag)];
        runs.push((tag.clone(), a.to_vec(), Some(svg(&tag))));
    }
    for (tag, args, out) in &runs {
        let args: Vec<&str> = args.iter().map(|s| s.as_str()).collect();
        let first = permea(&args);
        let first_svg = out.as_ref().map(|p| std::fs::read(p).unwrap_or_default());
        let second = permea(&args);
        let second_svg = out.as_ref().map(|p| std::fs::read(p).unwrap_or_default());
        check(first == second, || format!("{tag}: stdout or exit code differs"))?;
        check(first_svg == second_svg, || format!("{tag}: SVG differs"))?;
        check(!(first.1.is_empty() && first_svg.as_ref().is_none_or(|s| s.is_empty())), || format!("{tag}: no output"))?;
    }
    Ok(format!("{} commands repeated byte-identically", runs.len()))
}
