//! Static 3-d tree over palette colors with exact integer distances.

use super::palette::Rgb;

struct Node {
    point: [i32; 3],
    item: usize,
    axis: usize,
    left: Option<usize>,
    right: Option<usize>,
}

pub(super) struct KdTree {
    nodes: Vec<Node>,
    root: Option<usize>,
}

impl KdTree {
    pub fn build(points: &[Rgb]) -> Self {
        let mut items: Vec<usize> = (0..points.len()).collect();
        let mut tree = KdTree { nodes: Vec::with_capacity(points.len()), root: None };
        tree.root = tree.build_rec(points, &mut items, 0);
        tree
    }

    fn build_rec(&mut self, points: &[Rgb], items: &mut [usize], depth: usize) -> Option<usize> {
        if items.is_empty() {
            return None;
        }
        let axis = depth % 3;
        items.sort_by_key(|&i| (points[i].channel(axis), i));
        let mid = items.len() / 2;
        let item = items[mid];
        let (lo, rest) = items.split_at_mut(mid);
        let left = self.build_rec(points, lo, depth + 1);
        let right = self.build_rec(points, &mut rest[1..], depth + 1);
        self.nodes.push(Node { point: points[item].as_array(), item, axis, left, right });
        Some(self.nodes.len() - 1)
    }

    /// Index of the closest point. Among equidistant points the one that
    /// `prefer(a, b)` ranks first wins, so results match a linear scan.
    pub fn nearest(&self, query: Rgb, prefer: impl Fn(usize, usize) -> bool) -> Option<usize> {
        let q = query.as_array();
        let mut best: Option<(i32, usize)> = None;
        if let Some(root) = self.root {
            self.search(root, &q, &prefer, &mut best);
        }
        best.map(|(_, item)| item)
    }

    fn search(
        &self,
        node: usize,
        q: &[i32; 3],
        prefer: &impl Fn(usize, usize) -> bool,
        best: &mut Option<(i32, usize)>,
    ) {
        let n = &self.nodes[node];
        let d: i32 = (0..3).map(|k| (n.point[k] - q[k]).pow(2)).sum();
        let better = match *best {
            None => true,
            Some((bd, bi)) => d < bd || (d == bd && prefer(n.item, bi)),
        };
        if better {
            *best = Some((d, n.item));
        }

        let diff = q[n.axis] - n.point[n.axis];
        let (near, far) = if diff < 0 { (n.left, n.right) } else { (n.right, n.left) };
        if let Some(c) = near {
            self.search(c, q, prefer, best);
        }
        // equal distance must still be explored for tie-breaking
        if let Some(c) = far {
            if best.is_none_or(|(bd, _)| diff * diff <= bd) {
                self.search(c, q, prefer, best);
            }
        }
    }
}
