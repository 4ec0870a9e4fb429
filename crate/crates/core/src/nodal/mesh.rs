//! Zero-level extraction with union–find labelling.
//!
//! `n = 3`: every grid cube is split into the six Kuhn tetrahedra along its
//! main diagonal, `(0,0,0) → (1,1,1)` through one vertex per axis
//! permutation. The split is the same in every cube, so neighbouring cubes
//! cut shared faces along the same diagonal and the piecewise linear zero
//! set is a closed 2-manifold away from unsampled cells; no ambiguity
//! table is needed. A tetrahedron with one vertex of the minority sign
//! contributes a triangle, one with two of each sign a quadrilateral split
//! into two triangles. Cubes are processed one slab at a time, so only two
//! planes of values are held in memory.
//!
//! `n = 2`: every cell is split into triangles and each triangle with a
//! sign change contributes one segment.
//!
//! Iso-vertices live on grid edges and are shared by all cells around the
//! edge. Exact zeros at nodes are replaced by `2^{−40}` times the larger
//! magnitude of the two neighbours along the first axis (or `2^{−40}` if
//! both vanish), so the classification of every node is strict.

use std::collections::HashMap;

use crate::error::{Error, Result};

use super::grid::{node_position, GridGeometry, GridScan};
use super::{classify_counts, NodalComponent, NodalComponents};

const NONE: u32 = u32::MAX;

/// Positions kept per component for shell comparisons.
pub(crate) const MAX_SAMPLES: usize = 4096;

/// Kuhn tetrahedra as paths through the cube corners (bit 0 = x, 1 = y,
/// 2 = z).
const KUHN: [[usize; 4]; 6] = [
    [0, 1, 3, 7],
    [0, 1, 5, 7],
    [0, 2, 3, 7],
    [0, 2, 6, 7],
    [0, 4, 5, 7],
    [0, 4, 6, 7],
];

pub(crate) struct MeshBuilder {
    dim: usize,
    pos: Vec<[f64; 3]>,
    parent: Vec<u32>,
    rank: Vec<u8>,
    faces: Vec<u32>,
    cells: Vec<u32>,
    signed: Vec<f64>,
    unsigned: Vec<f64>,
}

impl MeshBuilder {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            pos: Vec::new(),
            parent: Vec::new(),
            rank: Vec::new(),
            faces: Vec::new(),
            cells: Vec::new(),
            signed: Vec::new(),
            unsigned: Vec::new(),
        }
    }

    fn add_vertex(&mut self, p: [f64; 3]) -> Result<u32> {
        let id = self.pos.len();
        if id >= NONE as usize {
            return Err(Error::MemoryBudget {
                required: id as u64 + 1,
                budget: NONE as u64,
                suggested: f64::NAN,
            });
        }
        self.pos.push(p);
        self.parent.push(id as u32);
        self.rank.push(0);
        self.faces.push(0);
        self.cells.push(0);
        self.signed.push(0.0);
        self.unsigned.push(0.0);
        Ok(id as u32)
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let up = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = up;
            x = up;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        let (hi, lo) = if self.rank[ra as usize] >= self.rank[rb as usize] {
            (ra, rb)
        } else {
            (rb, ra)
        };
        self.parent[lo as usize] = hi;
        if self.rank[hi as usize] == self.rank[lo as usize] {
            self.rank[hi as usize] += 1;
        }
    }

    /// Triangle oriented so its normal points along `toward` (into the
    /// positive region); accumulates the solid angle it subtends at the
    /// origin.
    fn add_triangle(&mut self, mut t: [u32; 3], toward: [f64; 3]) {
        let [a, mut b, mut c] = t.map(|i| self.pos[i as usize]);
        if dot(cross(sub(b, a), sub(c, a)), toward) < 0.0 {
            std::mem::swap(&mut b, &mut c);
            t.swap(1, 2);
        }
        let (la, lb, lc) = (norm(a), norm(b), norm(c));
        let num = dot(a, cross(b, c));
        let den = la * lb * lc + dot(a, b) * lc + dot(a, c) * lb + dot(b, c) * la;
        let omega = 2.0 * num.atan2(den);
        self.record(t[0], omega);
        self.union(t[0], t[1]);
        self.union(t[0], t[2]);
    }

    /// Segment oriented with the positive region on its right; accumulates
    /// the angle it subtends at the origin.
    fn add_segment(&mut self, mut s: [u32; 2], toward: [f64; 3]) {
        let [a, b] = s.map(|i| self.pos[i as usize]);
        let d = sub(b, a);
        if d[1] * toward[0] - d[0] * toward[1] < 0.0 {
            s.swap(0, 1);
        }
        let [a, b] = s.map(|i| self.pos[i as usize]);
        let angle = (a[0] * b[1] - a[1] * b[0]).atan2(a[0] * b[0] + a[1] * b[1]);
        self.record(s[0], angle);
        self.union(s[0], s[1]);
    }

    fn record(&mut self, v: u32, angle: f64) {
        let v = v as usize;
        self.signed[v] += angle;
        self.unsigned[v] += angle.abs();
        self.faces[v] += 1;
    }

    /// Groups vertices into components. A component is compact when it
    /// keeps a distance `spacing` from the outer (and inner) scan boundary.
    pub fn finish(mut self, radius: f64, inner_radius: f64, spacing: f64) -> NodalComponents {
        let count = self.pos.len();
        let mut slot = vec![NONE; count];
        let mut acc: Vec<Acc> = Vec::new();
        let mut member_of = vec![0u32; count];
        for v in 0..count {
            let root = self.find(v as u32) as usize;
            if slot[root] == NONE {
                slot[root] = acc.len() as u32;
                acc.push(Acc::default());
            }
            let k = slot[root];
            member_of[v] = k;
            let a = &mut acc[k as usize];
            let r = norm(self.pos[v]);
            a.r_min = if a.vertices == 0 { r } else { a.r_min.min(r) };
            a.r_max = a.r_max.max(r);
            a.sum_r += r;
            a.vertices += 1;
            a.faces += self.faces[v] as usize;
            a.cells += self.cells[v] as usize;
            a.signed += self.signed[v];
            a.unsigned += self.unsigned[v];
        }
        let mut seen = vec![0usize; acc.len()];
        let mut samples: Vec<Vec<[f64; 3]>> = vec![Vec::new(); acc.len()];
        for v in 0..count {
            let k = member_of[v] as usize;
            let stride = acc[k].vertices.div_ceil(MAX_SAMPLES);
            if seen[k] % stride == 0 {
                samples[k].push(self.pos[v]);
            }
            seen[k] += 1;
        }
        let mut components: Vec<NodalComponent> = acc
            .into_iter()
            .zip(samples)
            .map(|(a, samples)| {
                let compact = a.r_max < radius - spacing && (inner_radius == 0.0 || a.r_min > inner_radius + spacing);
                let (topology, euler_char) = classify_counts(self.dim, compact, a.vertices, a.faces);
                NodalComponent {
                    id: 0,
                    dim: self.dim,
                    r_min: a.r_min,
                    r_max: a.r_max,
                    mean_radius: a.sum_r / a.vertices as f64,
                    vertex_count: a.vertices,
                    face_count: a.faces,
                    cell_count: a.cells,
                    compact,
                    euler_char,
                    topology,
                    signed_angle: a.signed,
                    total_angle: a.unsigned,
                    spacing,
                    samples,
                }
            })
            .collect();
        components.sort_by(|a, b| {
            a.r_min
                .total_cmp(&b.r_min)
                .then(a.r_max.total_cmp(&b.r_max))
                .then(a.vertex_count.cmp(&b.vertex_count))
        });
        for (i, c) in components.iter_mut().enumerate() {
            c.id = i;
        }
        NodalComponents {
            dim: self.dim,
            radius,
            inner_radius,
            spacing,
            components,
        }
    }
}

#[derive(Default)]
struct Acc {
    r_min: f64,
    r_max: f64,
    sum_r: f64,
    vertices: usize,
    faces: usize,
    cells: usize,
    signed: f64,
    unsigned: f64,
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn norm(a: [f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

fn lerp(pa: [f64; 3], pb: [f64; 3], va: f64, vb: f64) -> [f64; 3] {
    let t = va / (va - vb);
    [
        pa[0] + t * (pb[0] - pa[0]),
        pa[1] + t * (pb[1] - pa[1]),
        pa[2] + t * (pb[2] - pa[2]),
    ]
}

/// Replaces exact zeros in a row-major block of `width`-long rows.
pub(crate) fn perturb_zeros(values: &mut [f64], width: usize) {
    for idx in 0..values.len() {
        if values[idx] == 0.0 {
            let col = idx % width;
            let mut scale: f64 = 0.0;
            if col > 0 && values[idx - 1].is_finite() {
                scale = scale.max(values[idx - 1].abs());
            }
            if col + 1 < width && idx + 1 < values.len() && values[idx + 1].is_finite() {
                scale = scale.max(values[idx + 1].abs());
            }
            values[idx] = f64::powi(2.0, -40) * if scale > 0.0 { scale } else { 1.0 };
        }
    }
}

/// Marching tetrahedra over a cube of `nodes³` grid nodes with spacing
/// `h`, centred at the origin. `fill(k, plane)` writes the values of plane
/// `k` (first axis fastest); `NaN` marks unsampled nodes.
pub(crate) fn march_cartesian3<F>(nodes: usize, h: f64, mut fill: F, builder: &mut MeshBuilder) -> Result<()>
where
    F: FnMut(usize, &mut [f64]) -> Result<()>,
{
    let np = nodes * nodes;
    let centre = (nodes - 1) as f64 / 2.0;
    let coord = |i: usize| (i as f64 - centre) * h;
    let mut lo = vec![0.0; np];
    let mut hi = vec![0.0; np];
    fill(0, &mut lo)?;
    perturb_zeros(&mut lo, nodes);
    let mut e_lo = vec![NONE; 3 * np];
    let mut e_hi = vec![NONE; 3 * np];
    let mut e_slab = vec![NONE; 4 * np];
    for k in 0..nodes - 1 {
        fill(k + 1, &mut hi)?;
        perturb_zeros(&mut hi, nodes);
        e_hi.fill(NONE);
        e_slab.fill(NONE);
        let mut slab = Slab {
            nodes,
            k,
            coord: &coord,
            e_lo: &mut e_lo,
            e_hi: &mut e_hi,
            e_slab: &mut e_slab,
        };
        for j in 0..nodes - 1 {
            for i in 0..nodes - 1 {
                let mut v = [0.0; 8];
                for (corner, value) in v.iter_mut().enumerate() {
                    let plane = if corner & 4 == 0 { &lo } else { &hi };
                    *value = plane[(j + ((corner >> 1) & 1)) * nodes + i + (corner & 1)];
                }
                if v.iter().any(|x| x.is_nan()) {
                    continue;
                }
                let positive = v.iter().filter(|x| **x > 0.0).count();
                if positive == 0 || positive == 8 {
                    continue;
                }
                let mut first = NONE;
                for tet in &KUHN {
                    slab.march_tet(builder, i, j, tet, &v, &mut first)?;
                }
                if first != NONE {
                    builder.cells[first as usize] += 1;
                }
            }
        }
        std::mem::swap(&mut lo, &mut hi);
        std::mem::swap(&mut e_lo, &mut e_hi);
    }
    Ok(())
}

struct Slab<'a, C: Fn(usize) -> f64> {
    nodes: usize,
    k: usize,
    coord: &'a C,
    e_lo: &'a mut [u32],
    e_hi: &'a mut [u32],
    e_slab: &'a mut [u32],
}

impl<C: Fn(usize) -> f64> Slab<'_, C> {
    fn corner_position(&self, i: usize, j: usize, corner: usize) -> [f64; 3] {
        [
            (self.coord)(i + (corner & 1)),
            (self.coord)(j + ((corner >> 1) & 1)),
            (self.coord)(self.k + (corner >> 2)),
        ]
    }

    /// Iso-vertex on the edge from corner `a` to corner `b ⊃ a` of cube
    /// `(i, j)`.
    fn vertex(&mut self, builder: &mut MeshBuilder, i: usize, j: usize, a: usize, b: usize, v: &[f64; 8]) -> Result<u32> {
        let d = a ^ b;
        let node = (j + ((a >> 1) & 1)) * self.nodes + i + (a & 1);
        let p = lerp(self.corner_position(i, j, a), self.corner_position(i, j, b), v[a], v[b]);
        let slot = if d & 4 == 0 {
            let dir = match d {
                1 => 0,
                2 => 1,
                _ => 2,
            };
            let edges = if a & 4 == 0 { &mut *self.e_lo } else { &mut *self.e_hi };
            &mut edges[3 * node + dir]
        } else {
            &mut self.e_slab[4 * node + (d & 3)]
        };
        if *slot == NONE {
            *slot = builder.add_vertex(p)?;
        }
        Ok(*slot)
    }

    fn march_tet(
        &mut self,
        builder: &mut MeshBuilder,
        i: usize,
        j: usize,
        tet: &[usize; 4],
        v: &[f64; 8],
        first: &mut u32,
    ) -> Result<()> {
        let pos: Vec<usize> = (0..4).filter(|&p| v[tet[p]] > 0.0).collect();
        let neg: Vec<usize> = (0..4).filter(|&p| v[tet[p]] <= 0.0).collect();
        // corners along the path are nested, so the earlier one is the base
        let edge = |p: usize, q: usize| (tet[p.min(q)], tet[p.max(q)]);
        let mut tris: Vec<([(usize, usize); 3], (usize, usize))> = Vec::new();
        match pos.len() {
            1 | 3 => {
                let (odd, rest) = if pos.len() == 1 { (pos[0], &neg) } else { (neg[0], &pos) };
                let e = [edge(odd, rest[0]), edge(odd, rest[1]), edge(odd, rest[2])];
                let (pp, pn) = if pos.len() == 1 { (odd, rest[0]) } else { (rest[0], odd) };
                tris.push((e, (tet[pp], tet[pn])));
            }
            2 => {
                let (a, b, c, d) = (pos[0], pos[1], neg[0], neg[1]);
                let (ac, ad, bd, bc) = (edge(a, c), edge(a, d), edge(b, d), edge(b, c));
                tris.push(([ac, ad, bd], (tet[a], tet[c])));
                tris.push(([ac, bd, bc], (tet[a], tet[c])));
            }
            _ => return Ok(()),
        }
        for (edges, (cp, cn)) in tris {
            let mut ids = [0u32; 3];
            for (id, (a, b)) in ids.iter_mut().zip(edges) {
                *id = self.vertex(builder, i, j, a, b, v)?;
            }
            if *first == NONE {
                *first = ids[0];
            }
            let toward = sub(self.corner_position(i, j, cp), self.corner_position(i, j, cn));
            builder.add_triangle(ids, toward);
        }
        Ok(())
    }
}

/// Marching triangles over a planar scan.
pub(crate) fn march_planar(scan: &GridScan, builder: &mut MeshBuilder) -> Result<()> {
    let geometry = scan.geometry();
    let mut values = scan.values().to_vec();
    let width = match geometry {
        GridGeometry::Cartesian { nodes, .. } => nodes,
        GridGeometry::Polar { angles, .. } => angles,
    };
    perturb_zeros(&mut values, width);
    let mut edges: HashMap<u64, u32> = HashMap::new();
    let mut cell = |tris: &[[usize; 3]], builder: &mut MeshBuilder| -> Result<()> {
        let mut first = NONE;
        for t in tris {
            let v = t.map(|i| values[i]);
            if v.iter().any(|x| x.is_nan()) {
                continue;
            }
            let positive: Vec<usize> = (0..3).filter(|&p| v[p] > 0.0).collect();
            let odd = match positive.len() {
                1 => positive[0],
                2 => (0..3).find(|p| !positive.contains(p)).unwrap_or(0),
                _ => continue,
            };
            let others = [(odd + 1) % 3, (odd + 2) % 3];
            let mut ids = [0u32; 2];
            for (id, o) in ids.iter_mut().zip(others) {
                let (a, b) = (t[odd].min(t[o]), t[odd].max(t[o]));
                let key = ((a as u64) << 32) | b as u64;
                *id = match edges.get(&key) {
                    Some(&id) => id,
                    None => {
                        let p = lerp(
                            node_position(2, &geometry, a),
                            node_position(2, &geometry, b),
                            values[a],
                            values[b],
                        );
                        let id = builder.add_vertex(p)?;
                        edges.insert(key, id);
                        id
                    }
                };
            }
            if first == NONE {
                first = ids[0];
            }
            let po = node_position(2, &geometry, t[odd]);
            let pm = node_position(2, &geometry, t[others[0]]);
            let away = sub(po, pm);
            let toward = if v[odd] > 0.0 { away } else { sub(pm, po) };
            builder.add_segment(ids, toward);
        }
        if first != NONE {
            builder.cells[first as usize] += 1;
        }
        Ok(())
    };
    match geometry {
        GridGeometry::Cartesian { nodes, .. } => {
            for j in 0..nodes - 1 {
                for i in 0..nodes - 1 {
                    let c00 = j * nodes + i;
                    let (c10, c01, c11) = (c00 + 1, c00 + nodes, c00 + nodes + 1);
                    cell(&[[c00, c10, c11], [c00, c11, c01]], builder)?;
                }
            }
        }
        GridGeometry::Polar { rings, angles, .. } => {
            let at = |ring: usize, j: usize| 1 + (ring - 1) * angles + j % angles;
            for j in 0..angles {
                cell(&[[0, at(1, j), at(1, j + 1)]], builder)?;
            }
            for ring in 1..rings {
                for j in 0..angles {
                    let (a, b) = (at(ring, j), at(ring, j + 1));
                    let (c, d) = (at(ring + 1, j + 1), at(ring + 1, j));
                    cell(&[[a, b, c], [a, c, d]], builder)?;
                }
            }
        }
    }
    Ok(())
}
