//! Branch-and-bound lower bounds on distances between pieces of attractors.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::geom::dist;
use crate::ifs::{IfsSystem, Similarity};

/// Open ball whose points are removed from a piece set.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Hole {
    pub center: [f64; 3],
    pub radius: f64,
}

#[derive(Clone, Debug)]
struct Node {
    map: Similarity,
    center: [f64; 3],
    radius: f64,
}

/// `frame(K)` minus a few open balls, explored through piece balls.
pub(crate) struct PieceSet<'a> {
    ifs: &'a IfsSystem,
    anchor: [f64; 3],
    frame: Similarity,
    holes: Vec<Hole>,
}

/// Work budget exhausted; carries the smallest piece radius reached.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct OutOfBudget(pub f64);

impl<'a> PieceSet<'a> {
    pub fn new(ifs: &'a IfsSystem, frame: Similarity, holes: Vec<Hole>) -> PieceSet<'a> {
        PieceSet { ifs, anchor: ifs.ball().center.array(), frame: frame.float_only(), holes }
    }

    fn node(&self, map: Similarity) -> Node {
        Node { center: map.apply_array(&self.anchor), radius: map.ratio() * self.ifs.ball().radius, map }
    }

    fn root(&self) -> Option<Node> {
        let n = self.node(self.frame);
        (!self.dropped(&n)).then_some(n)
    }

    fn children(&self, n: &Node) -> Vec<Node> {
        self.ifs
            .maps()
            .iter()
            .map(|f| self.node(n.map.compose(&f.float_only())))
            .filter(|c| !self.dropped(c))
            .collect()
    }

    fn dropped(&self, n: &Node) -> bool {
        self.holes.iter().any(|h| dist(&n.center, &h.center) + n.radius < h.radius)
    }

    /// The anchor image is a point of `K`; it counts when it avoids the holes.
    fn center_inside(&self, n: &Node) -> bool {
        self.holes.iter().all(|h| dist(&n.center, &h.center) >= h.radius)
    }
}

struct Entry {
    lb: f64,
    a: Node,
    b: Node,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.lb == other.lb
    }
}
impl Eq for Entry {}
impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other.lb.total_cmp(&self.lb)
    }
}

/// Lower bound on `dist(A, B)`, tight to `rel_tol`; `+inf` when a side is empty.
pub(crate) fn set_distance_lb(
    a: &PieceSet<'_>,
    b: &PieceSet<'_>,
    rel_tol: f64,
    abs_tol: f64,
    budget: usize,
) -> Result<f64, OutOfBudget> {
    let (Some(ra), Some(rb)) = (a.root(), b.root()) else {
        return Ok(f64::INFINITY);
    };
    let mut ub = f64::INFINITY;
    let mut heap = BinaryHeap::new();
    let push = |heap: &mut BinaryHeap<Entry>, ub: &mut f64, x: Node, y: Node| {
        let d = dist(&x.center, &y.center);
        if a.center_inside(&x) && b.center_inside(&y) {
            *ub = ub.min(d);
        }
        let lb = (d - x.radius - y.radius).max(0.0);
        if lb < *ub {
            heap.push(Entry { lb, a: x, b: y });
        }
    };
    push(&mut heap, &mut ub, ra, rb);
    let mut pops = 0;
    while let Some(Entry { lb, a: x, b: y }) = heap.pop() {
        if lb >= ub {
            continue;
        }
        if lb >= ub * (1.0 - rel_tol) || (x.radius <= abs_tol && y.radius <= abs_tol) {
            return Ok(lb);
        }
        pops += 1;
        if pops > budget {
            return Err(OutOfBudget(x.radius.min(y.radius)));
        }
        if x.radius >= y.radius {
            for c in a.children(&x) {
                push(&mut heap, &mut ub, c, y.clone());
            }
        } else {
            for c in b.children(&y) {
                push(&mut heap, &mut ub, x.clone(), c);
            }
        }
    }
    Ok(ub)
}

/// Lower bound on `dist(p, A)`.
pub(crate) fn point_distance_lb(
    a: &PieceSet<'_>,
    p: &[f64; 3],
    rel_tol: f64,
    abs_tol: f64,
    budget: usize,
) -> Result<f64, OutOfBudget> {
    let point = Node { map: Similarity::identity(a.ifs.dim()), center: *p, radius: 0.0 };
    let Some(root) = a.root() else { return Ok(f64::INFINITY) };
    let mut ub = f64::INFINITY;
    let mut heap = BinaryHeap::new();
    let push = |heap: &mut BinaryHeap<Entry>, ub: &mut f64, x: Node| {
        let d = dist(&x.center, p);
        if a.center_inside(&x) {
            *ub = ub.min(d);
        }
        let lb = (d - x.radius).max(0.0);
        if lb < *ub {
            heap.push(Entry { lb, a: x, b: point.clone() });
        }
    };
    push(&mut heap, &mut ub, root);
    let mut pops = 0;
    while let Some(Entry { lb, a: x, .. }) = heap.pop() {
        if lb >= ub {
            continue;
        }
        if lb >= ub * (1.0 - rel_tol) || x.radius <= abs_tol {
            return Ok(lb);
        }
        pops += 1;
        if pops > budget {
            return Err(OutOfBudget(x.radius));
        }
        for c in a.children(&x) {
            push(&mut heap, &mut ub, c);
        }
    }
    Ok(ub)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ifs::catalog;

    #[test]
    fn disjoint_cantor_halves() {
        let ifs = catalog::disconnected_pair();
        let a = PieceSet::new(&ifs, ifs.maps()[0], Vec::new());
        let b = PieceSet::new(&ifs, ifs.maps()[1], Vec::new());
        let d = set_distance_lb(&a, &b, 1e-3, 1e-12, 100_000).unwrap();
        assert!(d <= 1.0 / 3.0 + 1e-12 && d > 0.33);
    }

    #[test]
    fn point_to_segment() {
        let ifs = catalog::unit_segment();
        let id = Similarity::identity(ifs.dim());
        let a = PieceSet::new(&ifs, id, Vec::new());
        let d = point_distance_lb(&a, &[0.5, 0.25, 0.0], 1e-4, 1e-12, 100_000).unwrap();
        assert!(d <= 0.25 && d > 0.2499);
    }
}
