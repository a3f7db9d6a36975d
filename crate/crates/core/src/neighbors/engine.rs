//! Ball-pair refinement shared by overlap tests, intersection points and
//! pairwise screening.

use crate::geom::dist;
use crate::ifs::{IfsSystem, Similarity, Word};

/// One side of a pair search: the pieces of `frame(K)`, fattened by `eps`.
#[derive(Clone, Debug)]
pub(crate) struct Side {
    pub frame: Similarity,
    pub eps: f64,
}

#[derive(Clone, Debug)]
pub(crate) struct Node {
    pub word: Word,
    pub map: Similarity,
    /// Ratio of `f_w` alone, without the frame.
    pub sr: f64,
    pub center: [f64; 3],
    pub radius: f64,
}

pub(crate) struct PairEngine<'a> {
    ifs: &'a IfsSystem,
    pub a: Side,
    pub b: Side,
    anchor: [f64; 3],
    pad: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Capped;

impl<'a> PairEngine<'a> {
    pub fn new(ifs: &'a IfsSystem, a: Side, b: Side) -> PairEngine<'a> {
        let anchor = ifs.ball().center.array();
        let scale = 1.0 + anchor.iter().fold(0.0f64, |m, x| m.max(x.abs())) + ifs.ball().radius;
        let big = a.frame.ratio().max(b.frame.ratio()).max(1.0);
        let shift = a
            .frame
            .translation()
            .iter()
            .chain(b.frame.translation().iter())
            .fold(0.0f64, |m, x| m.max(x.abs()));
        PairEngine {
            ifs,
            a: Side { frame: a.frame.float_only(), eps: a.eps },
            b: Side { frame: b.frame.float_only(), eps: b.eps },
            anchor,
            pad: 1e-11 * (scale * big + shift),
        }
    }

    pub fn ifs(&self) -> &IfsSystem {
        self.ifs
    }

    pub fn root(&self, side: &Side) -> Node {
        Node {
            word: Word::empty(),
            map: side.frame,
            sr: 1.0,
            center: side.frame.apply_array(&self.anchor),
            radius: side.frame.ratio() * self.ifs.ball().radius,
        }
    }

    pub fn roots(&self) -> (Node, Node) {
        (self.root(&self.a), self.root(&self.b))
    }

    pub fn children(&self, node: &Node) -> Vec<Node> {
        let maps = self.ifs.maps();
        maps.iter()
            .enumerate()
            .map(|(i, f)| {
                let map = node.map.compose(&f.float_only());
                Node {
                    word: node.word.child(i),
                    center: map.apply_array(&self.anchor),
                    radius: map.ratio() * self.ifs.ball().radius,
                    sr: node.sr * f.ratio(),
                    map,
                }
            })
            .collect()
    }

    /// Whether the fattened balls can meet.
    pub fn close(&self, x: &Node, y: &Node) -> bool {
        dist(&x.center, &y.center) <= x.radius + y.radius + self.a.eps + self.b.eps + self.pad
    }

    fn done(sr: f64, rho: f64) -> bool {
        sr <= rho * (1.0 + 1e-12)
    }

    /// Whether some pair of level-`rho` pieces has meeting fattened balls.
    pub fn any_overlap(&self, rho: f64) -> bool {
        let (ra, rb) = self.roots();
        let mut stack = vec![(ra, rb)];
        while let Some((x, y)) = stack.pop() {
            if !self.close(&x, &y) {
                continue;
            }
            let (dx, dy) = (Self::done(x.sr, rho), Self::done(y.sr, rho));
            if dx && dy {
                return true;
            }
            let split_x = !dx && (dy || x.radius >= y.radius);
            if split_x {
                for c in self.children(&x).into_iter().rev() {
                    stack.push((c, y.clone()));
                }
            } else {
                for c in self.children(&y).into_iter().rev() {
                    stack.push((x.clone(), c));
                }
            }
        }
        false
    }

    /// Refines `pairs` until both sides are at scale `rho`, dropping separated pairs.
    pub fn refine(&self, pairs: Vec<(Node, Node)>, rho: f64, cap: usize) -> Result<Vec<(Node, Node)>, Capped> {
        let mut out = Vec::new();
        let mut stack: Vec<(Node, Node)> = pairs.into_iter().rev().collect();
        while let Some((x, y)) = stack.pop() {
            if !self.close(&x, &y) {
                continue;
            }
            let (dx, dy) = (Self::done(x.sr, rho), Self::done(y.sr, rho));
            if dx && dy {
                out.push((x, y));
                if out.len() > cap {
                    return Err(Capped);
                }
                continue;
            }
            if stack.len() > 4 * cap {
                return Err(Capped);
            }
            let split_x = !dx && (dy || x.radius >= y.radius);
            if split_x {
                for c in self.children(&x).into_iter().rev() {
                    stack.push((c, y.clone()));
                }
            } else {
                for c in self.children(&y).into_iter().rev() {
                    stack.push((x.clone(), c));
                }
            }
        }
        Ok(out)
    }
}

/// A group of nearby pairs, summarized by its a-side balls.
#[derive(Clone, Debug)]
pub(crate) struct Cluster {
    pub lo: [f64; 3],
    pub hi: [f64; 3],
    pub max_radius: f64,
    pub size: usize,
}

impl Cluster {
    pub fn center(&self) -> [f64; 3] {
        [
            0.5 * (self.lo[0] + self.hi[0]),
            0.5 * (self.lo[1] + self.hi[1]),
            0.5 * (self.lo[2] + self.hi[2]),
        ]
    }

    /// Radius of a ball around [`Cluster::center`] holding every a-side ball.
    pub fn enclosure_radius(&self) -> f64 {
        0.5 * dist(&self.lo, &self.hi) + self.max_radius
    }

    /// Diameter of the union of the balls' bounding box.
    pub fn extent(&self) -> f64 {
        dist(&self.lo, &self.hi) + 2.0 * self.max_radius
    }
}

/// Union-find clustering; balls join when their centers are within twice the radii sum.
pub(crate) fn cluster_balls(balls: &[([f64; 3], f64)]) -> Vec<Cluster> {
    let n = balls.len();
    if n == 0 {
        return Vec::new();
    }
    let rmax = balls.iter().fold(0.0f64, |m, b| m.max(b.1));
    let cell = (4.0 * rmax).max(1e-300);
    let key = |p: &[f64; 3]| {
        [
            (p[0] / cell).floor() as i64,
            (p[1] / cell).floor() as i64,
            (p[2] / cell).floor() as i64,
        ]
    };
    let mut grid: std::collections::HashMap<[i64; 3], Vec<usize>> = std::collections::HashMap::new();
    for (i, b) in balls.iter().enumerate() {
        grid.entry(key(&b.0)).or_default().push(i);
    }
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for (i, b) in balls.iter().enumerate() {
        let k = key(&b.0);
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    if let Some(v) = grid.get(&[k[0] + dx, k[1] + dy, k[2] + dz]) {
                        for &j in v {
                            if j > i && dist(&b.0, &balls[j].0) <= 2.0 * (b.1 + balls[j].1) {
                                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                                if ri != rj {
                                    parent[ri.max(rj)] = ri.min(rj);
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    let mut by_root: std::collections::BTreeMap<usize, Cluster> = std::collections::BTreeMap::new();
    for (i, b) in balls.iter().enumerate() {
        let r = find(&mut parent, i);
        let c = by_root.entry(r).or_insert(Cluster { lo: b.0, hi: b.0, max_radius: 0.0, size: 0 });
        for k in 0..3 {
            c.lo[k] = c.lo[k].min(b.0[k]);
            c.hi[k] = c.hi[k].max(b.0[k]);
        }
        c.max_radius = c.max_radius.max(b.1);
        c.size += 1;
    }
    by_root.into_values().collect()
}

/// a-side balls of the pairs, deduplicated by word.
pub(crate) fn a_balls(pairs: &[(Node, Node)]) -> Vec<([f64; 3], f64)> {
    let mut seen = std::collections::BTreeMap::new();
    for (x, _) in pairs {
        seen.entry(x.word.clone()).or_insert((x.center, x.radius));
    }
    seen.into_values().collect()
}
