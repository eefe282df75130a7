//! Bounding volume hierarchy over axis-aligned boxes.
//!
//! The tree stores item indices only; callers resolve exact geometry through
//! closures, so the same structure accelerates nearest-facet queries and
//! point-in-cell lookups.

use nalgebra::SVector;

type P<const D: usize> = SVector<f64, D>;

const LEAF_SIZE: usize = 8;

struct Node<const D: usize> {
    lo: P<D>,
    hi: P<D>,
    /// Internal nodes: index of the right child, the left child is `self + 1`.
    /// Leaves: `usize::MAX`.
    right: usize,
    start: usize,
    count: usize,
}

pub struct Bvh<const D: usize> {
    nodes: Vec<Node<D>>,
    order: Vec<usize>,
    boxes: Vec<(P<D>, P<D>)>,
}

fn box_union<const D: usize>(lo: &mut P<D>, hi: &mut P<D>, b: &(P<D>, P<D>)) {
    for k in 0..D {
        lo[k] = lo[k].min(b.0[k]);
        hi[k] = hi[k].max(b.1[k]);
    }
}

fn box_distance<const D: usize>(q: &P<D>, lo: &P<D>, hi: &P<D>) -> f64 {
    let mut acc = 0.0;
    for k in 0..D {
        let d = (lo[k] - q[k]).max(q[k] - hi[k]).max(0.0);
        acc += d * d;
    }
    acc.sqrt()
}

impl<const D: usize> Bvh<D> {
    /// Builds the tree over one bounding box per item. Items are split at the
    /// centroid median of the widest axis.
    pub fn build(bboxes: &[(P<D>, P<D>)]) -> Self {
        assert!(!bboxes.is_empty(), "bvh over empty item set");
        let mut order: Vec<usize> = (0..bboxes.len()).collect();
        let mut nodes = Vec::with_capacity(2 * bboxes.len() / LEAF_SIZE + 1);
        Self::build_range(&mut nodes, bboxes, &mut order, 0);
        Bvh { nodes, order, boxes: bboxes.to_vec() }
    }

    fn build_range(
        nodes: &mut Vec<Node<D>>,
        bboxes: &[(P<D>, P<D>)],
        order: &mut [usize],
        start: usize,
    ) -> usize {
        let mut lo = P::<D>::from_element(f64::INFINITY);
        let mut hi = P::<D>::from_element(f64::NEG_INFINITY);
        for &i in order.iter() {
            box_union(&mut lo, &mut hi, &bboxes[i]);
        }
        let idx = nodes.len();
        nodes.push(Node { lo, hi, right: usize::MAX, start, count: order.len() });
        if order.len() <= LEAF_SIZE {
            return idx;
        }
        let mut axis = 0;
        for k in 1..D {
            if hi[k] - lo[k] > hi[axis] - lo[axis] {
                axis = k;
            }
        }
        let mid = order.len() / 2;
        order.select_nth_unstable_by(mid, |&a, &b| {
            let ca = bboxes[a].0[axis] + bboxes[a].1[axis];
            let cb = bboxes[b].0[axis] + bboxes[b].1[axis];
            ca.partial_cmp(&cb).unwrap()
        });
        let (left, right) = order.split_at_mut(mid);
        Self::build_range(nodes, bboxes, left, start);
        let right_idx = Self::build_range(nodes, bboxes, right, start + mid);
        nodes[idx].right = right_idx;
        idx
    }

    /// Index and distance of the item nearest to `q`. `dist` must return the
    /// exact distance from `q` to the item with the given original index.
    pub fn nearest(&self, q: &P<D>, dist: &impl Fn(usize) -> f64) -> (usize, f64) {
        let mut best = (usize::MAX, f64::INFINITY);
        self.nearest_rec(0, q, dist, &mut best);
        best
    }

    fn nearest_rec(
        &self,
        node: usize,
        q: &P<D>,
        dist: &impl Fn(usize) -> f64,
        best: &mut (usize, f64),
    ) {
        let n = &self.nodes[node];
        if n.right == usize::MAX {
            for &i in &self.order[n.start..n.start + n.count] {
                let d = dist(i);
                if d < best.1 {
                    *best = (i, d);
                }
            }
            return;
        }
        let (l, r) = (node + 1, n.right);
        let dl = box_distance(q, &self.nodes[l].lo, &self.nodes[l].hi);
        let dr = box_distance(q, &self.nodes[r].lo, &self.nodes[r].hi);
        let ordered = if dl <= dr { [(l, dl), (r, dr)] } else { [(r, dr), (l, dl)] };
        for (child, d) in ordered {
            if d < best.1 {
                self.nearest_rec(child, q, dist, best);
            }
        }
    }

    /// Visits items whose bounding box contains `q` until the visitor returns
    /// true; returns whether it did.
    pub fn find_containing(&self, q: &P<D>, visit: &mut impl FnMut(usize) -> bool) -> bool {
        self.find_rec(0, q, visit)
    }

    fn find_rec(&self, node: usize, q: &P<D>, visit: &mut impl FnMut(usize) -> bool) -> bool {
        let n = &self.nodes[node];
        for k in 0..D {
            if q[k] < n.lo[k] || q[k] > n.hi[k] {
                return false;
            }
        }
        if n.right == usize::MAX {
            for &i in &self.order[n.start..n.start + n.count] {
                let b = &self.boxes[i];
                if (0..D).all(|k| b.0[k] <= q[k] && q[k] <= b.1[k]) && visit(i) {
                    return true;
                }
            }
            return false;
        }
        self.find_rec(node + 1, q, visit) || self.find_rec(n.right, q, visit)
    }
}
