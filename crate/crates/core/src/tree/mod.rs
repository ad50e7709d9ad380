//! The Gray-Hilbert tree generated by a point cloud.
//!
//! Every internal node splits one coordinate in half. Blocks of `n`
//! consecutive levels form one subdivision of a hypercube; the coordinate
//! labelling each level inside a block comes from the block's
//! [`TransformState`], and the two children of a node are stored in curve
//! order. A pre-order walk therefore visits leaves in the order of the
//! static curve.

mod export;

use std::fmt;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::cloud::PointCloud;
use crate::curve::{self, Scheme, TransformState};
use crate::error::{Error, Result};

pub use export::{NodeKind, NodeRecord, TreeDocument};

/// Bits per coordinate used when no limit is given: the full mantissa of a
/// normalized double.
pub const DEFAULT_MAX_BITS: u32 = 52;

const NONE: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BucketStatus {
    Empty,
    Filled,
    Underfilled,
    Overfilled,
}

impl BucketStatus {
    pub fn classify(count: usize, capacity: usize) -> Self {
        use std::cmp::Ordering::*;
        match (count, count.cmp(&capacity)) {
            (0, _) => BucketStatus::Empty,
            (_, Equal) => BucketStatus::Filled,
            (_, Less) => BucketStatus::Underfilled,
            (_, Greater) => BucketStatus::Overfilled,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            BucketStatus::Empty => "empty",
            BucketStatus::Filled => "filled",
            BucketStatus::Underfilled => "underfilled",
            BucketStatus::Overfilled => "overfilled",
        }
    }
}

impl fmt::Display for BucketStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy)]
struct Node {
    /// Pre-order id of the second child; the first child is always `id + 1`.
    second: u32,
    start: u32,
    len: u32,
    /// Index into `blocks` for nodes that open a block.
    block: u32,
    depth: u16,
    axis: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Block {
    lead: u8,
    mask: u64,
}

/// Read-only view of one node.
#[derive(Debug, Clone, Copy)]
pub struct NodeRef<'a> {
    tree: &'a ScaledTree,
    id: usize,
}

impl<'a> NodeRef<'a> {
    pub fn id(&self) -> usize {
        self.id
    }

    fn raw(&self) -> &'a Node {
        &self.tree.nodes[self.id]
    }

    pub fn is_leaf(&self) -> bool {
        self.raw().second == NONE
    }

    /// Number of single-coordinate splits between the root and this node.
    pub fn depth(&self) -> usize {
        self.raw().depth as usize
    }

    /// Coordinate split at this node; `None` for leaves.
    pub fn axis(&self) -> Option<usize> {
        (!self.is_leaf()).then(|| self.raw().axis as usize)
    }

    /// Children in curve order.
    pub fn children(&self) -> Option<[NodeRef<'a>; 2]> {
        (!self.is_leaf()).then(|| {
            [
                self.tree.node(self.id + 1),
                self.tree.node(self.raw().second as usize),
            ]
        })
    }

    /// Number of points in the subtree.
    pub fn count(&self) -> usize {
        self.raw().len as usize
    }

    pub fn status(&self) -> BucketStatus {
        BucketStatus::classify(self.count(), self.tree.capacity)
    }

    /// Row indices of the subtree's points in curve order.
    pub fn rows(&self) -> &'a [u32] {
        let n = self.raw();
        &self.tree.order[n.start as usize..(n.start + n.len) as usize]
    }

    /// Transform of the block opened at this node, if any.
    pub fn block_state(&self) -> Option<TransformState> {
        let b = self.raw().block;
        (b != NONE).then(|| {
            let block = self.tree.blocks[b as usize];
            TransformState::for_block(
                self.tree.scheme,
                block.lead as usize,
                block.mask,
                self.tree.n,
            )
            .expect("block state built from a valid dimension")
        })
    }
}

/// Leaf tallies of a tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeafCounts {
    pub leaves: usize,
    pub non_empty: usize,
    pub overfilled: usize,
}

/// The scaled index: smallest subtree of the Gray-Hilbert tree whose leaves
/// hold at most `capacity` points, except at the depth limit.
#[derive(Debug, Clone)]
pub struct ScaledTree {
    n: usize,
    capacity: usize,
    scheme: Scheme,
    max_bits: u32,
    nodes: Vec<Node>,
    blocks: Vec<Block>,
    order: Vec<u32>,
    ids: Vec<u64>,
}

struct Task {
    start: u32,
    len: u32,
    depth: u16,
    block: Block,
    /// Child choices made so far inside the current block.
    prefix: u64,
    parent: u32,
}

/// Level-to-coordinate tables for every possible leading coordinate.
struct Orientation {
    n: usize,
    perms: Vec<Vec<usize>>,
}

impl Orientation {
    fn new(n: usize, scheme: Scheme) -> Result<Self> {
        let perms = (0..n)
            .map(|d| curve::scheme_permutation(scheme, d, n))
            .collect::<Result<_>>()?;
        Ok(Orientation { n, perms })
    }

    fn axis(&self, block: Block, level: usize) -> usize {
        self.perms[block.lead as usize][self.n - 1 - level]
    }

    /// Block entered after choosing child `digit` of `block`.
    fn next(&self, block: Block, digit: u64) -> Block {
        let perm = &self.perms[block.lead as usize];
        let (entry, dir) = curve::child_frame(digit, self.n);
        let mut mask = block.mask;
        for (j, &axis) in perm.iter().enumerate() {
            mask ^= ((entry >> j) & 1) << axis;
        }
        Block {
            lead: perm[dir] as u8,
            mask,
        }
    }

    fn root(&self) -> Block {
        Block {
            lead: (self.n - 1) as u8,
            mask: 0,
        }
    }
}

struct Partitioner<'a> {
    grid: &'a [u64],
    n: usize,
    max_bits: u32,
    orient: &'a Orientation,
}

impl Partitioner<'_> {
    /// Splits `rows` at `depth`; returns the size of the first half in curve
    /// order together with the split axis.
    fn split(&self, rows: &mut [u32], depth: usize, block: Block, prefix: u64) -> (usize, usize) {
        let level = depth % self.n;
        let axis = self.orient.axis(block, level);
        let shift = self.max_bits - 1 - (depth / self.n) as u32;
        // inside a block the first child repeats the previous Gray bit
        let word_bit = if level == 0 { 0 } else { prefix & 1 };
        let first = word_bit ^ ((block.mask >> axis) & 1);
        let mut i = 0;
        for j in 0..rows.len() {
            let r = rows[j] as usize;
            if (self.grid[r * self.n + axis] >> shift) & 1 == first {
                rows.swap(i, j);
                i += 1;
            }
        }
        (i, axis)
    }

    fn descend(&self, depth: usize, block: Block, prefix: u64, choice: u64) -> (Block, u64) {
        let prefix = if depth.is_multiple_of(self.n) { 0 } else { prefix };
        let prefix = (prefix << 1) | choice;
        if (depth + 1).is_multiple_of(self.n) {
            (self.orient.next(block, prefix), 0)
        } else {
            (block, prefix)
        }
    }

    fn exhausted(&self, depth: usize) -> bool {
        depth >= self.n * self.max_bits as usize
    }

    /// Puts a bucket into full curve order, breaking exact ties by id.
    fn order_bucket(&self, rows: &mut [u32], depth: usize, block: Block, prefix: u64, ids: &[u64]) {
        let mut stack = vec![(0usize, rows.len(), depth, block, prefix)];
        while let Some((start, len, depth, block, prefix)) = stack.pop() {
            if len <= 1 {
                continue;
            }
            let slice = &mut rows[start..start + len];
            if self.exhausted(depth) {
                slice.sort_unstable_by_key(|&r| ids[r as usize]);
                continue;
            }
            let (half, _) = self.split(slice, depth, block, prefix);
            for (choice, s, l) in [(0, start, half), (1, start + half, len - half)] {
                let (b, p) = self.descend(depth, block, prefix, choice);
                stack.push((s, l, depth + 1, b, p));
            }
        }
    }
}

/// Builds the scaled tree of `cloud` for bucket capacity `capacity`.
///
/// Coordinates are resolved to `max_bits` binary digits; a node at that
/// depth becomes a leaf whatever its count, so duplicate points end in an
/// overfilled leaf.
pub fn build_scaled(
    cloud: &PointCloud,
    capacity: usize,
    scheme: Scheme,
    max_bits: u32,
) -> Result<ScaledTree> {
    if cloud.is_empty() {
        return Err(Error::EmptyCloud);
    }
    if capacity == 0 {
        return Err(Error::ZeroCapacity);
    }
    let n = cloud.dim();
    if !(1..=64).contains(&max_bits) || n * max_bits as usize > u16::MAX as usize {
        return Err(Error::InvalidParameter(format!(
            "max bits {max_bits} unsupported in dimension {n}"
        )));
    }
    if cloud.len() >= NONE as usize {
        return Err(Error::InvalidParameter(format!(
            "{} points exceed the index width",
            cloud.len()
        )));
    }

    let orient = Orientation::new(n, scheme)?;
    let grid = cloud.quantize(max_bits);
    let part = Partitioner {
        grid: &grid,
        n,
        max_bits,
        orient: &orient,
    };
    let mut order: Vec<u32> = (0..cloud.len() as u32).collect();
    let mut nodes: Vec<Node> = Vec::new();
    let mut blocks = Vec::new();
    let mut stack = vec![Task {
        start: 0,
        len: cloud.len() as u32,
        depth: 0,
        block: orient.root(),
        prefix: 0,
        parent: NONE,
    }];

    while let Some(task) = stack.pop() {
        let id = nodes.len() as u32;
        if task.parent != NONE {
            nodes[task.parent as usize].second = id;
        }
        let depth = task.depth as usize;
        let block = if depth.is_multiple_of(n) {
            blocks.push(task.block);
            (blocks.len() - 1) as u32
        } else {
            NONE
        };
        let rows = &mut order[task.start as usize..(task.start + task.len) as usize];
        let mut node = Node {
            second: NONE,
            start: task.start,
            len: task.len,
            block,
            depth: task.depth,
            axis: 0,
        };

        if task.len as usize <= capacity || part.exhausted(depth) {
            part.order_bucket(rows, depth, task.block, task.prefix, cloud.ids());
            nodes.push(node);
            continue;
        }

        let (half, axis) = part.split(rows, depth, task.block, task.prefix);
        node.axis = axis as u8;
        nodes.push(node);
        let half = half as u32;
        let children = [
            (1, task.start + half, task.len - half, id),
            (0, task.start, half, NONE),
        ];
        for (choice, start, len, parent) in children {
            let (block, prefix) = part.descend(depth, task.block, task.prefix, choice);
            stack.push(Task {
                start,
                len,
                depth: task.depth + 1,
                block,
                prefix,
                parent,
            });
        }
    }

    Ok(ScaledTree {
        n,
        capacity,
        scheme,
        max_bits,
        nodes,
        blocks,
        order,
        ids: cloud.ids().to_vec(),
    })
}

impl ScaledTree {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn max_bits(&self) -> u32 {
        self.max_bits
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn point_count(&self) -> usize {
        self.order.len()
    }

    pub fn root(&self) -> NodeRef<'_> {
        self.node(0)
    }

    pub fn node(&self, id: usize) -> NodeRef<'_> {
        assert!(id < self.nodes.len(), "node {id} out of range");
        NodeRef { tree: self, id }
    }

    /// Nodes in pre-order.
    pub fn nodes(&self) -> impl Iterator<Item = NodeRef<'_>> + '_ {
        (0..self.nodes.len()).map(move |id| NodeRef { tree: self, id })
    }

    pub fn leaves(&self) -> impl Iterator<Item = NodeRef<'_>> + '_ {
        self.nodes().filter(|n| n.is_leaf())
    }

    pub fn id_of_row(&self, row: u32) -> u64 {
        self.ids[row as usize]
    }

    pub fn leaf_counts(&self) -> LeafCounts {
        let mut counts = LeafCounts {
            leaves: 0,
            non_empty: 0,
            overfilled: 0,
        };
        for leaf in self.leaves() {
            counts.leaves += 1;
            match leaf.status() {
                BucketStatus::Empty => {}
                BucketStatus::Overfilled => {
                    counts.non_empty += 1;
                    counts.overfilled += 1;
                }
                _ => counts.non_empty += 1,
            }
        }
        counts
    }

    /// `(point id, leaf ordinal)` in curve order. Ordinals count every leaf,
    /// empty ones included, in pre-order.
    pub fn preorder_index(&self) -> Vec<(u64, usize)> {
        let mut out = Vec::with_capacity(self.order.len());
        for (ordinal, leaf) in self.leaves().enumerate() {
            out.extend(leaf.rows().iter().map(|&r| (self.id_of_row(r), ordinal)));
        }
        out
    }

    /// Point ids in curve order.
    pub fn ordered_ids(&self) -> Vec<u64> {
        self.order.iter().map(|&r| self.id_of_row(r)).collect()
    }

    /// Sizes of the non-empty leaf buckets in pre-order.
    pub fn leaf_occupancies(&self) -> Vec<usize> {
        self.leaves()
            .map(|l| l.count())
            .filter(|&c| c > 0)
            .collect()
    }

    /// Maximum depth of any node.
    pub fn height(&self) -> usize {
        self.nodes.iter().map(|n| n.depth as usize).max().unwrap_or(0)
    }
}

/// Occupancy of the full static tree at iteration `k`, computed from the
/// depth-`k` cell histogram; the `2^(nk)` leaves are never materialized.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StaticProfile {
    pub n: usize,
    pub k: u32,
    pub non_empty: usize,
    pub overfilled: usize,
    /// Point count of every non-empty cell, in cell order.
    #[serde(skip)]
    pub cell_counts: Vec<usize>,
}

impl StaticProfile {
    pub fn log2_total_leaves(&self) -> u64 {
        self.n as u64 * u64::from(self.k)
    }

    pub fn total_leaves(&self) -> BigUint {
        BigUint::from(1u8) << self.log2_total_leaves()
    }

    pub fn total_leaves_f64(&self) -> f64 {
        2f64.powf(self.log2_total_leaves() as f64)
    }
}

/// Groups the cloud by depth-`k` cells. The cells do not depend on the
/// curve orientation, so no scheme is needed.
pub fn static_profile(cloud: &PointCloud, k: u32, capacity: usize) -> Result<StaticProfile> {
    if cloud.is_empty() {
        return Err(Error::EmptyCloud);
    }
    if capacity == 0 {
        return Err(Error::ZeroCapacity);
    }
    if k > 64 {
        return Err(Error::InvalidParameter(format!("k = {k} exceeds 64")));
    }
    let n = cloud.dim();
    let grid = cloud.quantize(k);
    let cell_counts = if n * k as usize <= 128 {
        let mut packed: Vec<u128> = grid
            .chunks_exact(n)
            .map(|c| c.iter().fold(0u128, |acc, &v| (acc << k) | u128::from(v)))
            .collect();
        packed.sort_unstable();
        run_lengths(&packed)
    } else {
        let mut rows: Vec<&[u64]> = grid.chunks_exact(n).collect();
        rows.sort_unstable();
        run_lengths(&rows)
    };
    Ok(StaticProfile {
        n,
        k,
        non_empty: cell_counts.len(),
        overfilled: cell_counts.iter().filter(|&&c| c > capacity).count(),
        cell_counts,
    })
}

fn run_lengths<T: PartialEq>(sorted: &[T]) -> Vec<usize> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < sorted.len() {
        let j = i + sorted[i..].iter().take_while(|v| **v == sorted[i]).count();
        out.push(j - i);
        i = j;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{encode_key, point_to_cell};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn orthants() -> PointCloud {
        // ids deliberately out of curve order
        PointCloud::new(
            2,
            vec![0.75, 0.75, 0.25, 0.25, 0.25, 0.75, 0.75, 0.25],
            vec![10, 11, 12, 13],
        )
        .unwrap()
    }

    fn random_cloud(seed: u64, n: usize, len: usize) -> PointCloud {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coords = (0..n * len).map(|_| rng.gen::<f64>()).collect();
        PointCloud::from_rows(n, coords).unwrap()
    }

    fn key_sorted(cloud: &PointCloud, scheme: Scheme, bits: u32) -> Vec<u64> {
        let mut keyed: Vec<_> = (0..cloud.len())
            .map(|i| {
                let cell = point_to_cell(cloud.point(i), bits).unwrap();
                (encode_key(&cell, scheme), cloud.id(i))
            })
            .collect();
        keyed.sort();
        keyed.into_iter().map(|(_, id)| id).collect()
    }

    #[test]
    fn bucket_classification() {
        assert_eq!(BucketStatus::classify(0, 3), BucketStatus::Empty);
        assert_eq!(BucketStatus::classify(3, 3), BucketStatus::Filled);
        assert_eq!(BucketStatus::classify(2, 3), BucketStatus::Underfilled);
        assert_eq!(BucketStatus::classify(4, 3), BucketStatus::Overfilled);
    }

    #[test]
    fn single_point_is_a_single_leaf() {
        let cloud = PointCloud::from_rows(3, vec![0.3, 0.2, 0.9]).unwrap();
        for s in [1, 5] {
            let tree = build_scaled(&cloud, s, Scheme::Ring, DEFAULT_MAX_BITS).unwrap();
            assert_eq!(tree.node_count(), 1);
            assert!(tree.root().is_leaf());
            assert_eq!(tree.preorder_index(), vec![(0, 0)]);
        }
    }

    #[test]
    fn orthant_points_fill_a_depth_two_tree() {
        for scheme in Scheme::ALL {
            let tree = build_scaled(&orthants(), 1, scheme, DEFAULT_MAX_BITS).unwrap();
            assert_eq!(tree.node_count(), 7);
            let leaves: Vec<_> = tree.leaves().collect();
            assert_eq!(leaves.len(), 4);
            assert!(leaves.iter().all(|l| l.depth() == 2 && l.status() == BucketStatus::Filled));
            // lower-left, lower-right, upper-right, upper-left
            assert_eq!(tree.ordered_ids(), vec![11, 13, 10, 12]);
            assert_eq!(tree.root().axis(), Some(1));
            assert_eq!(tree.leaf_occupancies(), vec![1, 1, 1, 1]);
        }
    }

    #[test]
    fn empty_cloud_and_zero_capacity_fail() {
        let empty = PointCloud::from_rows(2, vec![]).unwrap();
        assert!(matches!(
            build_scaled(&empty, 1, Scheme::Ring, 52),
            Err(Error::EmptyCloud)
        ));
        assert!(matches!(
            build_scaled(&orthants(), 0, Scheme::Ring, 52),
            Err(Error::ZeroCapacity)
        ));
    }

    #[test]
    fn random_cloud_respects_capacity_and_minimality() {
        let cloud = random_cloud(3, 3, 1000);
        let tree = build_scaled(&cloud, 4, Scheme::Bubble, DEFAULT_MAX_BITS).unwrap();
        for node in tree.nodes() {
            if node.is_leaf() {
                assert!(node.count() <= 4);
            } else {
                assert!(node.count() > 4);
                let [a, b] = node.children().unwrap();
                assert_eq!(a.count() + b.count(), node.count());
                assert_eq!(a.depth(), node.depth() + 1);
            }
        }
        assert_eq!(tree.leaf_occupancies().iter().sum::<usize>(), 1000);
    }

    #[test]
    fn duplicates_stop_at_the_depth_limit() {
        let cloud = PointCloud::from_rows(2, [0.3, 0.6].repeat(5)).unwrap();
        let tree = build_scaled(&cloud, 1, Scheme::Ring, 6).unwrap();
        let counts = tree.leaf_counts();
        assert_eq!(counts.non_empty, 1);
        assert_eq!(counts.overfilled, 1);
        assert_eq!(counts.leaves, 13);
        assert_eq!(tree.height(), 12);
        assert_eq!(tree.ordered_ids(), vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn block_states_open_every_n_levels() {
        let cloud = random_cloud(5, 3, 200);
        let tree = build_scaled(&cloud, 1, Scheme::Ring, DEFAULT_MAX_BITS).unwrap();
        assert_eq!(tree.root().block_state(), Some(TransformState::identity(3).unwrap()));
        for node in tree.nodes() {
            assert_eq!(node.block_state().is_some(), node.depth() % 3 == 0);
            if let (Some(state), Some(axis)) = (node.block_state(), node.axis()) {
                assert_eq!(state.lead_axis(), axis);
            }
        }
    }

    #[test]
    fn order_matches_key_sort() {
        for (seed, n) in [(1u64, 2usize), (2, 3), (3, 4), (4, 1)] {
            let cloud = random_cloud(seed, n, 600);
            for scheme in Scheme::ALL {
                let expected = key_sorted(&cloud, scheme, 52);
                for s in [1, 2, 4, 1000] {
                    let tree = build_scaled(&cloud, s, scheme, 52).unwrap();
                    assert_eq!(tree.ordered_ids(), expected, "n={n} s={s} {scheme}");
                }
            }
        }
    }

    #[test]
    fn leaf_ordinals_increase() {
        let tree = build_scaled(&random_cloud(9, 2, 300), 2, Scheme::Ring, 52).unwrap();
        let idx = tree.preorder_index();
        assert!(idx.windows(2).all(|w| w[0].1 <= w[1].1));
        assert_eq!(idx.len(), 300);
    }

    #[test]
    fn fewer_leaves_for_larger_capacity() {
        let cloud = random_cloud(11, 3, 2000);
        let mut prev = usize::MAX;
        for s in [1, 2, 3, 4, 8, 16, 64] {
            let leaves = build_scaled(&cloud, s, Scheme::Bubble, 52).unwrap().leaf_counts().leaves;
            assert!(leaves <= prev);
            prev = leaves;
        }
    }

    #[test]
    fn static_profile_examples() {
        let p = static_profile(&orthants(), 1, 1).unwrap();
        assert_eq!((p.total_leaves(), p.non_empty, p.overfilled), (4u8.into(), 4, 0));
        let dup = PointCloud::from_rows(2, [0.4, 0.1].repeat(10)).unwrap();
        let p = static_profile(&dup, 3, 1).unwrap();
        assert_eq!((p.total_leaves(), p.non_empty, p.overfilled), (64u8.into(), 1, 1));
    }

    #[test]
    fn static_profile_matches_histogram() {
        let cloud = random_cloud(21, 3, 500);
        let mut hist = [0usize; 64];
        for p in cloud.points() {
            let c: Vec<usize> = p.iter().map(|x| (x * 4.0) as usize).collect();
            hist[c[0] * 16 + c[1] * 4 + c[2]] += 1;
        }
        for s in [1, 4, 9] {
            let prof = static_profile(&cloud, 2, s).unwrap();
            assert_eq!(prof.non_empty, hist.iter().filter(|&&h| h > 0).count());
            assert_eq!(prof.overfilled, hist.iter().filter(|&&h| h > s).count());
        }
        // unpacked path
        let wide = random_cloud(22, 9, 300);
        let prof = static_profile(&wide, 15, 1).unwrap();
        assert_eq!(prof.non_empty, 300);
        assert_eq!(prof.log2_total_leaves(), 135);
    }
}
