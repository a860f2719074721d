use crate::error::{Error, Result};
use crate::geom::{segment_hits_triangle, Aabb, Point};
use crate::mesh::SceneMesh;

/// Maximum number of triangles stored in a leaf.
pub const LEAF_SIZE: usize = 8;

/// Intersections closer than this to either segment endpoint are ignored.
pub const ENDPOINT_GUARD: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NodeKind {
    /// Range `start..start + count` of [`OcclusionIndex::leaf_order`].
    Leaf { start: u32, count: u32 },
    Inner { left: u32, right: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BvhNode {
    pub bounds: Aabb,
    pub kind: NodeKind,
}

/// Bounding-volume hierarchy over the scene triangles. Immutable after build.
#[derive(Debug, Clone, Default)]
pub struct OcclusionIndex {
    triangles: Vec<[Point; 3]>,
    nodes: Vec<BvhNode>,
    order: Vec<u32>,
}

impl OcclusionIndex {
    pub fn build(mesh: &SceneMesh) -> Self {
        let triangles: Vec<[Point; 3]> = (0..mesh.triangle_count()).map(|i| mesh.triangle(i)).collect();
        Self::from_triangles(triangles)
    }

    pub fn from_triangles(triangles: Vec<[Point; 3]>) -> Self {
        let mut index = OcclusionIndex {
            order: (0..triangles.len() as u32).collect(),
            triangles,
            nodes: Vec::new(),
        };
        if !index.triangles.is_empty() {
            let centroids: Vec<Point> = index
                .triangles
                .iter()
                .map(|t| Point::from((t[0].coords + t[1].coords + t[2].coords) / 3.0))
                .collect();
            let n = index.order.len();
            index.build_node(&centroids, 0, n);
        }
        index
    }

    fn build_node(&mut self, centroids: &[Point], start: usize, end: usize) -> u32 {
        let slot = self.nodes.len();
        let bounds = Aabb::from_points(
            self.order[start..end]
                .iter()
                .flat_map(|&t| self.triangles[t as usize].iter()),
        );
        self.nodes.push(BvhNode {
            bounds,
            kind: NodeKind::Leaf {
                start: start as u32,
                count: (end - start) as u32,
            },
        });
        if end - start <= LEAF_SIZE {
            return slot as u32;
        }
        let axis = Aabb::from_points(self.order[start..end].iter().map(|&t| &centroids[t as usize]))
            .longest_axis();
        let mid = start + (end - start) / 2;
        self.order[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
            centroids[a as usize][axis]
                .total_cmp(&centroids[b as usize][axis])
                .then(a.cmp(&b))
        });
        let left = self.build_node(centroids, start, mid);
        let right = self.build_node(centroids, mid, end);
        self.nodes[slot].kind = NodeKind::Inner { left, right };
        slot as u32
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    pub fn triangles(&self) -> &[[Point; 3]] {
        &self.triangles
    }

    /// Nodes in build order; the root is node 0.
    pub fn nodes(&self) -> &[BvhNode] {
        &self.nodes
    }

    /// Triangle ids referenced by the leaves.
    pub fn leaf_order(&self) -> &[u32] {
        &self.order
    }

    /// True iff no triangle meets the segment `(a, b)` away from its endpoints.
    pub fn segment_clear(&self, a: &Point, b: &Point) -> Result<bool> {
        let Some((dir, t0, t1)) = guarded_range(a, b)? else {
            return Ok(true);
        };
        if self.nodes.is_empty() {
            return Ok(true);
        }
        let mut stack = vec![0u32];
        while let Some(id) = stack.pop() {
            let node = &self.nodes[id as usize];
            if !node.bounds.intersects_segment(a, &dir, t0, t1) {
                continue;
            }
            match node.kind {
                NodeKind::Leaf { start, count } => {
                    let ids = &self.order[start as usize..(start + count) as usize];
                    if ids
                        .iter()
                        .any(|&t| segment_hits_triangle(a, &dir, t0, t1, &self.triangles[t as usize]))
                    {
                        return Ok(false);
                    }
                }
                NodeKind::Inner { left, right } => {
                    stack.push(right);
                    stack.push(left);
                }
            }
        }
        Ok(true)
    }

    /// Same contract as [`segment_clear`](Self::segment_clear), testing every triangle.
    pub fn segment_clear_exhaustive(&self, a: &Point, b: &Point) -> Result<bool> {
        let Some((dir, t0, t1)) = guarded_range(a, b)? else {
            return Ok(true);
        };
        Ok(!self
            .triangles
            .iter()
            .any(|t| segment_hits_triangle(a, &dir, t0, t1, t)))
    }
}

type Guarded = Option<(crate::geom::Vector, f64, f64)>;

fn guarded_range(a: &Point, b: &Point) -> Result<Guarded> {
    if !a.iter().chain(b.iter()).all(|c| c.is_finite()) {
        return Err(Error::param("segment", "endpoints must be finite"));
    }
    let dir = b - a;
    let len = dir.norm();
    if len == 0.0 {
        return Err(Error::param("segment", "endpoints coincide"));
    }
    let g = ENDPOINT_GUARD / len;
    if g >= 0.5 {
        return Ok(None);
    }
    Ok(Some((dir, g, 1.0 - g)))
}
