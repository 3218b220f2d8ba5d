//! Self-balancing incremental k-d tree.
//!
//! Plain leaf insertion is the textbook choice for incremental k-d trees,
//! but it inherits the binary-search-tree pathology: correlated insertion
//! orders produce chains. The advancing-front generator is exactly such an
//! order — on curves it emits nodes in monotone coordinate order, which
//! degrades a rebuild-free tree to Θ(N) depth and the whole run to Θ(N²).
//!
//! This tree therefore uses weight-balanced ("scapegoat") partial rebuilds:
//! when an insert lands deeper than log_{1/α}(N), the lowest α-unbalanced
//! ancestor is rebuilt into a perfectly balanced subtree. Rebuilds are rare
//! and touch only the offending subtree, giving amortized O(log N) inserts
//! and guaranteed O(log N) depth for *any* insertion order, with fully
//! deterministic structure (median splits, ties by insertion id).

use crate::error::{Error, Result};
use crate::real::Real;
use crate::spatial::{closer, Neighbor, PointStore};

const NIL: u32 = u32::MAX;

/// Weight-balance factor: a node is rebuilt when one child's subtree exceeds
/// this fraction of its own. Values closer to 1 rebuild less often but allow
/// deeper trees; 0.7 is a conventional middle ground.
const ALPHA: f64 = 0.7;

#[derive(Clone, Copy, Debug)]
struct Node {
    left: u32,
    right: u32,
    /// Subtree size including this node.
    size: u32,
}

/// Incremental k-d tree over d-dimensional points. Splitting axis cycles
/// with depth; node i stores point id i.
#[derive(Clone, Debug)]
pub struct KdTree<R> {
    points: PointStore<R>,
    nodes: Vec<Node>,
    root: u32,
}

impl<R: Real> KdTree<R> {
    /// Empty tree over `dim`-dimensional points.
    pub fn new(dim: usize) -> Self {
        assert!(dim >= 1, "dimension must be at least 1");
        KdTree { points: PointStore::new(dim), nodes: Vec::new(), root: NIL }
    }

    /// Builds a tree from a batch of points (insertion ids 0..N in order).
    /// O(N log N): one balanced build rather than N incremental inserts.
    pub fn build(dim: usize, points: &[&[R]]) -> Result<Self> {
        let mut tree = KdTree::new(dim);
        for p in points {
            if p.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: p.len() });
            }
            tree.points.push(p);
            tree.nodes.push(Node { left: NIL, right: NIL, size: 1 });
        }
        let mut ids: Vec<u32> = (0..points.len() as u32).collect();
        tree.root = tree.build_subtree(&mut ids, 0);
        Ok(tree)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Stored coordinates of a point by insertion id.
    pub fn point(&self, id: u32) -> &[R] {
        self.points.get(id)
    }

    fn axis(&self, depth: usize) -> usize {
        depth % self.points.dim()
    }

    /// Maximum tolerated depth for the current size: ⌊log_{1/α}(N)⌋.
    fn depth_limit(&self) -> usize {
        let n = self.len().max(1) as f64;
        (n.ln() / (1.0 / ALPHA).ln()).floor() as usize
    }

    fn subtree_size(&self, node: u32) -> u32 {
        if node == NIL { 0 } else { self.nodes[node as usize].size }
    }

    /// Inserts a point; returns its insertion id.
    pub fn insert(&mut self, p: &[R]) -> Result<u32> {
        if p.len() != self.points.dim() {
            return Err(Error::DimensionMismatch { expected: self.points.dim(), got: p.len() });
        }
        let id = self.points.push(p);
        self.nodes.push(Node { left: NIL, right: NIL, size: 1 });
        if self.root == NIL {
            self.root = id;
            return Ok(id);
        }
        // Walk down to the leaf position, recording the path.
        let mut path: Vec<u32> = Vec::with_capacity(self.depth_limit() + 2);
        let mut cur = self.root;
        loop {
            path.push(cur);
            let axis = self.axis(path.len() - 1);
            let go_left = p[axis] < self.points.get(cur)[axis];
            let next = if go_left { self.nodes[cur as usize].left } else { self.nodes[cur as usize].right };
            if next == NIL {
                if go_left {
                    self.nodes[cur as usize].left = id;
                } else {
                    self.nodes[cur as usize].right = id;
                }
                break;
            }
            cur = next;
        }
        for &n in &path {
            self.nodes[n as usize].size += 1;
        }
        // Depth of the new leaf is path.len(); rebuild the lowest
        // α-unbalanced ancestor if the insert landed too deep.
        if path.len() > self.depth_limit() {
            path.push(id);
            let mut child_size = 1u32;
            for k in (0..path.len() - 1).rev() {
                let node_size = self.nodes[path[k] as usize].size;
                if f64::from(child_size) > ALPHA * f64::from(node_size) {
                    let parent = if k == 0 { NIL } else { path[k - 1] };
                    self.rebuild(path[k], parent, k);
                    break;
                }
                child_size = node_size;
            }
        }
        Ok(id)
    }

    /// Rebuilds the subtree rooted at `node` (at tree depth `depth`) into
    /// perfect balance and splices it back under `parent`.
    fn rebuild(&mut self, node: u32, parent: u32, depth: usize) {
        let mut ids = Vec::with_capacity(self.subtree_size(node) as usize);
        self.collect(node, &mut ids);
        let new_root = self.build_subtree(&mut ids, depth);
        if parent == NIL {
            self.root = new_root;
        } else {
            let pn = &mut self.nodes[parent as usize];
            if pn.left == node {
                pn.left = new_root;
            } else {
                debug_assert_eq!(pn.right, node);
                pn.right = new_root;
            }
        }
    }

    /// Collects all point ids in a subtree (iteratively; rebuilds can touch
    /// large subtrees).
    fn collect(&self, node: u32, out: &mut Vec<u32>) {
        let mut stack = vec![node];
        while let Some(n) = stack.pop() {
            if n == NIL {
                continue;
            }
            out.push(n);
            stack.push(self.nodes[n as usize].left);
            stack.push(self.nodes[n as usize].right);
        }
    }

    /// Builds a balanced subtree over `ids` for a subtree starting at tree
    /// depth `depth`; returns its root. Median split on the depth's axis via
    /// order-statistic selection (O(N log N) overall); ties ordered by
    /// insertion id, so the resulting tree is the same regardless of the
    /// input order of `ids`.
    fn build_subtree(&mut self, ids: &mut [u32], depth: usize) -> u32 {
        if ids.is_empty() {
            return NIL;
        }
        let axis = self.axis(depth);
        let mid = ids.len() / 2;
        let size = ids.len() as u32;
        ids.select_nth_unstable_by(mid, |&a, &b| {
            let (ca, cb) = (self.points.get(a)[axis], self.points.get(b)[axis]);
            ca.partial_cmp(&cb)
                .expect("non-finite coordinate in k-d tree")
                .then(a.cmp(&b))
        });
        let root = ids[mid];
        let (lo, rest) = ids.split_at_mut(mid);
        let left = self.build_subtree(lo, depth + 1);
        let right = self.build_subtree(&mut rest[1..], depth + 1);
        self.nodes[root as usize] = Node { left, right, size };
        root
    }

    /// Exact nearest stored point; ties broken by lowest insertion id.
    pub fn nearest(&self, q: &[R]) -> Result<Neighbor<R>> {
        if self.is_empty() {
            return Err(Error::EmptyIndex);
        }
        if q.len() != self.points.dim() {
            return Err(Error::DimensionMismatch { expected: self.points.dim(), got: q.len() });
        }
        let mut best: Option<Neighbor<R>> = None;
        self.search(self.root, 0, q, &mut best, None);
        Ok(best.expect("nonempty tree yields a nearest point"))
    }

    /// Exact nearest stored point with `dist_sq` strictly below `bound_sq`;
    /// `None` when no stored point is that close. The bound prunes the
    /// search, so generation-style existence checks stay cheap.
    pub fn nearest_below(&self, q: &[R], bound_sq: R) -> Option<Neighbor<R>> {
        debug_assert_eq!(q.len(), self.points.dim());
        if self.root == NIL {
            return None;
        }
        let mut best: Option<Neighbor<R>> = None;
        self.search(self.root, 0, q, &mut best, Some(bound_sq));
        best
    }

    /// Branch-and-bound descent. `best` holds the incumbent; `cap` is an
    /// exclusive upper bound on interesting distances (candidates at or
    /// beyond it are ignored even before an incumbent exists).
    fn search(
        &self,
        node: u32,
        depth: usize,
        q: &[R],
        best: &mut Option<Neighbor<R>>,
        cap: Option<R>,
    ) {
        let d2 = self.points.dist_sq_to(node, q);
        let admissible = match (cap, &*best) {
            (Some(c), _) if d2 >= c => false,
            (_, Some(b)) => closer(d2, node, b.dist_sq, b.id),
            (_, None) => true,
        };
        if admissible {
            *best = Some(Neighbor { id: node, dist_sq: d2 });
        }
        let axis = self.axis(depth);
        let pivot = self.points.get(node)[axis];
        let delta = q[axis] - pivot;
        let (near, far) = if q[axis] < pivot {
            (self.nodes[node as usize].left, self.nodes[node as usize].right)
        } else {
            (self.nodes[node as usize].right, self.nodes[node as usize].left)
        };
        if near != NIL {
            self.search(near, depth + 1, q, best, cap);
        }
        if far != NIL {
            // The far half-space is worth visiting while the axis distance
            // does not already exceed the incumbent (ties included: an
            // equally distant point there may carry a lower id) or the cap.
            let axis_d2 = delta * delta;
            let within_best = best.as_ref().map_or(true, |b| axis_d2 <= b.dist_sq);
            let within_cap = cap.map_or(true, |c| axis_d2 < c);
            if within_best && within_cap {
                self.search(far, depth + 1, q, best, cap);
            }
        }
    }

    /// The `k` nearest stored points in ascending (dist_sq, id) order.
    /// Returns all points when fewer than `k` are stored.
    pub fn knn(&self, q: &[R], k: usize) -> Vec<Neighbor<R>> {
        let mut heap: Vec<Neighbor<R>> = Vec::with_capacity(k + 1);
        if k > 0 && self.root != NIL {
            self.knn_search(self.root, 0, q, k, &mut heap);
        }
        heap.sort_unstable_by(|a, b| {
            a.dist_sq
                .partial_cmp(&b.dist_sq)
                .expect("non-finite distance in k-d tree")
                .then(a.id.cmp(&b.id))
        });
        heap
    }

    fn knn_search(&self, node: u32, depth: usize, q: &[R], k: usize, heap: &mut Vec<Neighbor<R>>) {
        let d2 = self.points.dist_sq_to(node, q);
        // `heap` is a simple max-at-position-computed set: with k ≤ a few
        // dozen (c-nearest statistics), linear maintenance beats a real heap.
        if heap.len() < k {
            heap.push(Neighbor { id: node, dist_sq: d2 });
        } else if let Some((worst_at, worst)) = self.worst_entry(heap) {
            if closer(d2, node, worst.dist_sq, worst.id) {
                heap[worst_at] = Neighbor { id: node, dist_sq: d2 };
            }
        }
        let axis = self.axis(depth);
        let pivot = self.points.get(node)[axis];
        let delta = q[axis] - pivot;
        let (near, far) = if q[axis] < pivot {
            (self.nodes[node as usize].left, self.nodes[node as usize].right)
        } else {
            (self.nodes[node as usize].right, self.nodes[node as usize].left)
        };
        if near != NIL {
            self.knn_search(near, depth + 1, q, k, heap);
        }
        if far != NIL {
            let axis_d2 = delta * delta;
            let must_visit = heap.len() < k
                || self
                    .worst_entry(heap)
                    .map_or(true, |(_, w)| axis_d2 <= w.dist_sq);
            if must_visit {
                self.knn_search(far, depth + 1, q, k, heap);
            }
        }
    }

    fn worst_entry(&self, heap: &[Neighbor<R>]) -> Option<(usize, Neighbor<R>)> {
        let mut worst: Option<(usize, Neighbor<R>)> = None;
        for (i, n) in heap.iter().enumerate() {
            let replace = match &worst {
                Some((_, w)) => closer(w.dist_sq, w.id, n.dist_sq, n.id),
                None => true,
            };
            if replace {
                worst = Some((i, *n));
            }
        }
        worst
    }

    /// Depth of the deepest node — exposed for balance diagnostics/tests.
    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], n: u32) -> usize {
            if n == NIL {
                return 0;
            }
            1 + walk(nodes, nodes[n as usize].left).max(walk(nodes, nodes[n as usize].right))
        }
        walk(&self.nodes, self.root)
    }
}
