//! Surface sampling, farthest point sampling, kNN label propagation, and
//! per-triangle majority voting — the bridge between mesh segmentations and
//! point-cloud predictions.

use crate::assets::{PartLabel, PartSegmentation};
use crate::geometry::{Pt3, TriMesh, Vec3};
use crate::{Error, Result};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::path::Path;

/// Sentinel instance index meaning "base / unlabeled".
pub const BASE_INSTANCE: u32 = u32::MAX;

/// Default confidence used when base competes in votes.
pub const BASE_CONFIDENCE: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct InstanceInfo {
    pub id: String,
    pub label: PartLabel,
    pub confidence: f64,
}

/// Per-point instance assignment over a shared instance table. Points not in
/// any instance carry [`BASE_INSTANCE`].
#[derive(Debug, Clone, PartialEq)]
pub struct PointLabels {
    pub instances: Vec<InstanceInfo>,
    pub per_point: Vec<u32>,
}

/// Point cloud sampled from a mesh surface. Parallel arrays, one entry per
/// point; `source_triangle` ties each point back to the triangle it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledPointCloud {
    pub positions: Vec<Pt3>,
    pub normals: Vec<Vec3>,
    pub source_triangle: Vec<usize>,
    pub labels: Option<PointLabels>,
}

impl SampledPointCloud {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Keep only the points at `indices` (in the given order).
    pub fn select(&self, indices: &[usize]) -> SampledPointCloud {
        SampledPointCloud {
            positions: indices.iter().map(|&i| self.positions[i]).collect(),
            normals: indices.iter().map(|&i| self.normals[i]).collect(),
            source_triangle: indices.iter().map(|&i| self.source_triangle[i]).collect(),
            labels: self.labels.as_ref().map(|l| PointLabels {
                instances: l.instances.clone(),
                per_point: indices.iter().map(|&i| l.per_point[i]).collect(),
            }),
        }
    }

    /// Attach labels from a triangle segmentation via `source_triangle`.
    pub fn label_from_segmentation(&mut self, seg: &PartSegmentation, triangle_count: usize) {
        let owner = seg.owner_of(triangle_count);
        let instances = seg
            .parts
            .iter()
            .map(|p| InstanceInfo {
                id: p.id.clone(),
                label: p.label,
                confidence: p.confidence,
            })
            .collect();
        let per_point = self
            .source_triangle
            .iter()
            .map(|&t| owner[t].map(|p| p as u32).unwrap_or(BASE_INSTANCE))
            .collect();
        self.labels = Some(PointLabels {
            instances,
            per_point,
        });
    }
}

/// Draw `n` points area-proportionally with uniform barycentric coordinates;
/// optionally append every mesh vertex (source = lowest incident triangle)
/// so no triangle can end up unsampled. Deterministic in `seed`.
pub fn sample_surface(
    mesh: &TriMesh,
    n: usize,
    include_vertices: bool,
    seed: u64,
) -> Result<SampledPointCloud> {
    if mesh.is_empty() {
        return Err(Error::EmptyMesh);
    }
    let areas = mesh.triangle_areas();
    let mut cumulative = Vec::with_capacity(areas.len());
    let mut total = 0.0;
    for &a in &areas {
        total += a;
        cumulative.push(total);
    }
    if total <= 0.0 && n > 0 {
        return Err(Error::DegenerateMesh);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cloud = SampledPointCloud {
        positions: Vec::with_capacity(n),
        normals: Vec::with_capacity(n),
        source_triangle: Vec::with_capacity(n),
        labels: None,
    };
    for _ in 0..n {
        let u = rng.random::<f64>() * total;
        let t = cumulative.partition_point(|&c| c <= u).min(areas.len() - 1);
        let [a, b, c] = mesh.triangle_vertices(t);
        // Uniform barycentric via the square-root trick.
        let r1 = rng.random::<f64>().sqrt();
        let r2 = rng.random::<f64>();
        let p = a * (1.0 - r1) + (b.coords * (1.0 - r2) + c.coords * r2) * r1;
        cloud.positions.push(Pt3::from(p.coords));
        cloud.normals.push(mesh.face_normal(t));
        cloud.source_triangle.push(t);
    }
    if include_vertices {
        let mut incident = vec![usize::MAX; mesh.vertices.len()];
        for (t, tri) in mesh.triangles.iter().enumerate().rev() {
            for &v in tri {
                incident[v as usize] = t;
            }
        }
        for (v, &t) in incident.iter().enumerate() {
            if t == usize::MAX {
                continue; // isolated vertex
            }
            cloud.positions.push(mesh.vertices[v]);
            cloud.normals.push(mesh.face_normal(t));
            cloud.source_triangle.push(t);
        }
    }
    Ok(cloud)
}

/// Training-style sampling: `per_part` points from each part (and the base),
/// labeled by construction. Zero-area regions are skipped with a warning.
pub fn sample_per_part(
    mesh: &TriMesh,
    seg: &PartSegmentation,
    per_part: usize,
    include_vertices: bool,
    seed: u64,
) -> Result<SampledPointCloud> {
    let mut cloud = SampledPointCloud {
        positions: Vec::new(),
        normals: Vec::new(),
        source_triangle: Vec::new(),
        labels: None,
    };
    let mut per_point: Vec<u32> = Vec::new();
    let regions: Vec<(u32, Vec<usize>)> = seg
        .parts
        .iter()
        .enumerate()
        .map(|(i, p)| (i as u32, p.triangle_ids.iter().copied().collect()))
        .chain(std::iter::once((
            BASE_INSTANCE,
            seg.base_triangles.iter().copied().collect(),
        )))
        .collect();
    for (ri, (inst, tris)) in regions.iter().enumerate() {
        if tris.is_empty() {
            continue;
        }
        let sub = mesh.submesh(tris.iter().copied());
        if sub.total_area() <= 0.0 {
            log::warn!("skipping zero-area region {inst} during per-part sampling");
            continue;
        }
        let part_cloud = sample_surface(&sub, per_part, include_vertices, seed ^ ri as u64)?;
        per_point.extend(std::iter::repeat(*inst).take(part_cloud.len()));
        // Remap submesh triangle ids back to the parent mesh.
        cloud
            .source_triangle
            .extend(part_cloud.source_triangle.iter().map(|&t| tris[t]));
        cloud.positions.extend(part_cloud.positions);
        cloud.normals.extend(part_cloud.normals);
    }
    cloud.labels = Some(PointLabels {
        instances: seg
            .parts
            .iter()
            .map(|p| InstanceInfo {
                id: p.id.clone(),
                label: p.label,
                confidence: p.confidence,
            })
            .collect(),
        per_point,
    });
    Ok(cloud)
}

/// A contiguous run of spatially sorted points with a bounding box, the
/// running maximum of the points' squared distances to the selected set, and
/// the point attaining it (lowest original index on ties).
struct FpsBlock {
    start: usize,
    end: usize,
    lo: Vec3,
    hi: Vec3,
    max_d2: f64,
    best: usize,
}

impl FpsBlock {
    /// Squared distance from `p` to the block's bounding box; zero inside.
    fn dist2(&self, p: Pt3) -> f64 {
        let mut d2 = 0.0;
        for k in 0..3 {
            let v = p.coords[k].clamp(self.lo[k], self.hi[k]) - p.coords[k];
            d2 += v * v;
        }
        d2
    }
}

/// Greedy max-min farthest point sampling. Starts at the point farthest from
/// the centroid; each pick maximizes distance to the selected set. Ties break
/// to the lowest index.
///
/// Identical picks to the O(n·m) linear scan, accelerated by grouping
/// spatially sorted points into fixed blocks: a block whose bounding box is
/// farther from the new point than its current maximum cannot contain any
/// distance that shrinks, so it is skipped entirely.
pub fn farthest_point_sample(points: &[Pt3], m: usize) -> Result<Vec<usize>> {
    let n = points.len();
    if m > n {
        return Err(Error::InvalidCount {
            requested: m,
            available: n,
        });
    }
    if m == 0 {
        return Ok(Vec::new());
    }
    let centroid = Pt3::from(points.iter().map(|p| p.coords).sum::<Vec3>() / n as f64);
    let first = argmax_dist(points, |i| (points[i] - centroid).norm_squared());
    let mut selected = Vec::with_capacity(m);
    selected.push(first);

    // Sort point indices along a coarse grid curve so blocks are compact.
    let bounds = crate::geometry::Aabb::from_points(points.iter().copied());
    let extent = (bounds.max - bounds.min).map(|v| v.max(1e-12));
    let cell = |p: &Pt3| -> (u32, u32, u32) {
        let q = |k: usize| (((p.coords[k] - bounds.min[k]) / extent[k] * 63.0) as u32).min(63);
        (q(0), q(1), q(2))
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| (cell(&points[i]), i));
    let sorted: Vec<Pt3> = order.iter().map(|&i| points[i]).collect();

    const BLOCK: usize = 512;
    let mut min_d2: Vec<f64> = sorted
        .par_iter()
        .map(|p| (p - points[first]).norm_squared())
        .collect();
    let mut blocks: Vec<FpsBlock> = (0..n)
        .step_by(BLOCK)
        .map(|start| {
            let end = (start + BLOCK).min(n);
            let mut lo = Vec3::from_element(f64::INFINITY);
            let mut hi = -lo;
            for p in &sorted[start..end] {
                lo = lo.inf(&p.coords);
                hi = hi.sup(&p.coords);
            }
            let mut b = FpsBlock {
                start,
                end,
                lo,
                hi,
                max_d2: 0.0,
                best: start,
            };
            refresh_block(&mut b, &min_d2, &order);
            b
        })
        .collect();

    while selected.len() < m {
        // Argmax over block maxima: highest distance, lowest original index.
        let top = blocks
            .iter()
            .map(|b| (b.max_d2, order[b.best]))
            .max_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(b.1.cmp(&a.1)))
            .expect("at least one block");
        selected.push(top.1);
        let np = points[top.1];
        for b in &mut blocks {
            if b.dist2(np) >= b.max_d2 {
                continue; // no distance in this block can shrink
            }
            for i in b.start..b.end {
                let d = (sorted[i] - np).norm_squared();
                if d < min_d2[i] {
                    min_d2[i] = d;
                }
            }
            refresh_block(b, &min_d2, &order);
        }
    }
    Ok(selected)
}

fn refresh_block(b: &mut FpsBlock, min_d2: &[f64], order: &[usize]) {
    let mut best = b.start;
    for i in b.start + 1..b.end {
        if min_d2[i] > min_d2[best] || (min_d2[i] == min_d2[best] && order[i] < order[best]) {
            best = i;
        }
    }
    b.max_d2 = min_d2[best];
    b.best = best;
}

fn argmax_dist(points: &[Pt3], score: impl Fn(usize) -> f64 + Sync) -> usize {
    (0..points.len())
        .into_par_iter()
        .map(|i| (score(i), i))
        .reduce(
            || (f64::NEG_INFINITY, usize::MAX),
            |a, b| {
                if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
                    b
                } else {
                    a
                }
            },
        )
        .1
}

/// Assign each query point the majority instance among its `k` nearest
/// labeled points. Ties break by smaller mean distance, then lower instance
/// index. Returns per-query instance indices into `labeled`'s table.
pub fn knn_propagate(
    labeled: &SampledPointCloud,
    query: &SampledPointCloud,
    k: usize,
) -> Result<Vec<u32>> {
    let labels = labeled
        .labels
        .as_ref()
        .ok_or(Error::EmptyInput("labeled cloud has no labels"))?;
    if labeled.is_empty() {
        return Err(Error::EmptyInput("labeled cloud is empty"));
    }
    let k = k.min(labeled.len());
    let tree = KdTree::build(&labeled.positions);
    Ok(query
        .positions
        .par_iter()
        .map(|&q| {
            let neighbors = tree.k_nearest(q, k);
            vote_instance(&neighbors, &labels.per_point)
        })
        .collect())
}

/// Majority vote over (distance, point index) neighbors.
fn vote_instance(neighbors: &[(f64, usize)], per_point: &[u32]) -> u32 {
    // (count, sum of distances) per instance present among the neighbors.
    let mut tally: Vec<(u32, usize, f64)> = Vec::with_capacity(neighbors.len());
    for &(d, i) in neighbors {
        let inst = per_point[i];
        match tally.iter_mut().find(|(x, _, _)| *x == inst) {
            Some(e) => {
                e.1 += 1;
                e.2 += d;
            }
            None => tally.push((inst, 1, d)),
        }
    }
    tally
        .into_iter()
        .min_by(|a, b| {
            b.1.cmp(&a.1) // more votes first
                .then((a.2 / a.1 as f64).partial_cmp(&(b.2 / b.1 as f64)).unwrap())
                .then(a.0.cmp(&b.0))
        })
        .map(|(inst, _, _)| inst)
        .unwrap_or(BASE_INSTANCE)
}

/// Majority vote per triangle over a labeled cloud's points. Ties go to the
/// higher summed confidence, then to base. Every triangle must have at least
/// one point (guaranteed when vertices were included at sampling time).
pub fn triangle_vote(mesh: &TriMesh, labeled: &SampledPointCloud) -> Result<Vec<u32>> {
    let labels = labeled
        .labels
        .as_ref()
        .ok_or(Error::EmptyInput("labeled cloud has no labels"))?;
    let conf_of = |inst: u32| -> f64 {
        if inst == BASE_INSTANCE {
            BASE_CONFIDENCE
        } else {
            labels.instances[inst as usize].confidence
        }
    };
    let mut votes: Vec<Vec<(u32, usize)>> = vec![Vec::new(); mesh.triangles.len()];
    for (pi, &t) in labeled.source_triangle.iter().enumerate() {
        let inst = labels.per_point[pi];
        match votes[t].iter_mut().find(|(x, _)| *x == inst) {
            Some(e) => e.1 += 1,
            None => votes[t].push((inst, 1)),
        }
    }
    let mut out = Vec::with_capacity(mesh.triangles.len());
    for (t, tally) in votes.iter().enumerate() {
        if tally.is_empty() {
            return Err(Error::UncoveredTriangle(t));
        }
        let winner = tally
            .iter()
            .min_by(|a, b| {
                b.1.cmp(&a.1)
                    .then(
                        (b.1 as f64 * conf_of(b.0))
                            .partial_cmp(&(a.1 as f64 * conf_of(a.0)))
                            .unwrap(),
                    )
                    // Final tie: prefer base (the conservative choice).
                    .then(b.0.cmp(&a.0))
            })
            .unwrap()
            .0;
        out.push(winner);
    }
    Ok(out)
}

// ---------------------------------------------------------------- kd-tree

/// Static kd-tree over points; median-split, leaf size 16.
struct KdTree<'a> {
    points: &'a [Pt3],
    /// Flattened nodes: leaf stores (start, len) into `order`; inner stores
    /// split axis/value and child offsets.
    nodes: Vec<KdNode>,
    order: Vec<u32>,
}

enum KdNode {
    Leaf {
        start: u32,
        len: u32,
    },
    Inner {
        axis: u8,
        split: f64,
        left: u32,
        right: u32,
    },
}

const KD_LEAF: usize = 16;

impl<'a> KdTree<'a> {
    fn build(points: &'a [Pt3]) -> Self {
        let mut order: Vec<u32> = (0..points.len() as u32).collect();
        let mut nodes = Vec::new();
        nodes.push(KdNode::Leaf { start: 0, len: 0 });
        Self::build_node(points, &mut nodes, 0, &mut order, 0, points.len());
        KdTree {
            points,
            nodes,
            order,
        }
    }

    fn build_node(
        points: &[Pt3],
        nodes: &mut Vec<KdNode>,
        node: usize,
        order: &mut [u32],
        offset: usize,
        len: usize,
    ) {
        if len <= KD_LEAF {
            nodes[node] = KdNode::Leaf {
                start: offset as u32,
                len: len as u32,
            };
            return;
        }
        let slice = &mut order[offset..offset + len];
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for &i in slice.iter() {
            let p = points[i as usize];
            for k in 0..3 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        let axis = (0..3).max_by(|&a, &b| (hi[a] - lo[a]).partial_cmp(&(hi[b] - lo[b])).unwrap()).unwrap();
        let mid = len / 2;
        slice.select_nth_unstable_by(mid, |&a, &b| {
            points[a as usize][axis]
                .partial_cmp(&points[b as usize][axis])
                .unwrap()
                .then(a.cmp(&b))
        });
        let split = points[slice[mid] as usize][axis];
        let left = nodes.len() as u32;
        nodes.push(KdNode::Leaf { start: 0, len: 0 });
        nodes.push(KdNode::Leaf { start: 0, len: 0 });
        nodes[node] = KdNode::Inner {
            axis: axis as u8,
            split,
            left,
            right: left + 1,
        };
        Self::build_node(points, nodes, left as usize, order, offset, mid);
        Self::build_node(points, nodes, left as usize + 1, order, offset + mid, len - mid);
    }

    /// k nearest neighbors as (distance, point index), sorted ascending by
    /// (distance, index) so results are deterministic under exact ties.
    fn k_nearest(&self, q: Pt3, k: usize) -> Vec<(f64, usize)> {
        let mut heap: Vec<(f64, usize)> = Vec::with_capacity(k + 1);
        self.search(0, q, k, &mut heap);
        heap.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
        for e in &mut heap {
            e.0 = e.0.sqrt();
        }
        heap
    }

    fn search(&self, node: usize, q: Pt3, k: usize, heap: &mut Vec<(f64, usize)>) {
        match &self.nodes[node] {
            KdNode::Leaf { start, len } => {
                for &i in &self.order[*start as usize..(*start + *len) as usize] {
                    let d2 = (self.points[i as usize] - q).norm_squared();
                    if heap.len() < k {
                        heap.push((d2, i as usize));
                        if heap.len() == k {
                            heap.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(b.1.cmp(&a.1)));
                        }
                    } else if (d2, i as usize) < heap[0] {
                        heap[0] = (d2, i as usize);
                        // Restore "worst first" order.
                        let mut j = 0;
                        while j + 1 < heap.len() && heap[j] < heap[j + 1] {
                            heap.swap(j, j + 1);
                            j += 1;
                        }
                    }
                }
            }
            KdNode::Inner {
                axis,
                split,
                left,
                right,
            } => {
                let delta = q[*axis as usize] - split;
                let (near, far) = if delta < 0.0 {
                    (*left, *right)
                } else {
                    (*right, *left)
                };
                self.search(near as usize, q, k, heap);
                if heap.len() < k || delta * delta <= heap[0].0 {
                    self.search(far as usize, q, k, heap);
                }
            }
        }
    }
}

// ---------------------------------------------------------------- PLY I/O

/// Binary little-endian PLY with x,y,z,nx,ny,nz (double) and
/// source_triangle (int). Round-trips bit-exact.
pub fn save_cloud_ply(path: &Path, cloud: &SampledPointCloud) -> Result<()> {
    use std::io::Write;
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "ply")?;
    writeln!(w, "format binary_little_endian 1.0")?;
    writeln!(w, "element vertex {}", cloud.len())?;
    for p in ["x", "y", "z", "nx", "ny", "nz"] {
        writeln!(w, "property double {p}")?;
    }
    writeln!(w, "property int source_triangle")?;
    writeln!(w, "end_header")?;
    for i in 0..cloud.len() {
        for k in 0..3 {
            w.write_all(&cloud.positions[i][k].to_le_bytes())?;
        }
        for k in 0..3 {
            w.write_all(&cloud.normals[i][k].to_le_bytes())?;
        }
        w.write_all(&(cloud.source_triangle[i] as i32).to_le_bytes())?;
    }
    Ok(())
}

pub fn load_cloud_ply(path: &Path) -> Result<SampledPointCloud> {
    let ply = crate::assets::read_ply(path)?;
    let (names, rows) = ply.element("vertex").ok_or_else(|| Error::Parse {
        path: path.to_path_buf(),
        reason: "no vertex element".into(),
    })?;
    let col = |n: &str| -> Result<usize> {
        names.iter().position(|s| s == n).ok_or_else(|| Error::Parse {
            path: path.to_path_buf(),
            reason: format!("missing property {n:?}"),
        })
    };
    let idx: Vec<usize> = ["x", "y", "z", "nx", "ny", "nz", "source_triangle"]
        .iter()
        .map(|n| col(n))
        .collect::<Result<_>>()?;
    let mut cloud = SampledPointCloud {
        positions: Vec::with_capacity(rows.len()),
        normals: Vec::with_capacity(rows.len()),
        source_triangle: Vec::with_capacity(rows.len()),
        labels: None,
    };
    for r in rows {
        cloud
            .positions
            .push(Pt3::new(r[idx[0]][0], r[idx[1]][0], r[idx[2]][0]));
        cloud
            .normals
            .push(Vec3::new(r[idx[3]][0], r[idx[4]][0], r[idx[5]][0]));
        cloud.source_triangle.push(r[idx[6]][0] as usize);
    }
    Ok(cloud)
}
