//! Sampled values of `u` on a grid and the versioned grid dump.
//!
//! A scan covers the ball of radius `R` (or the annulus `R_in ≤ |x| ≤ R`)
//! with a margin of `2h`; nodes outside that region hold `NaN` and the
//! cells touching them are skipped by the extraction.

use std::f64::consts::PI;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{combine, EvalScratch, WaveField};
use crate::harmonics::Direction;

/// Memory allowed for a stored scan unless configured otherwise (1 GiB).
pub const DEFAULT_MEMORY_BUDGET: u64 = 1 << 30;

/// Default spacing `π/20`.
pub const DEFAULT_SPACING: f64 = PI / 20.0;

const MAGIC: &str = "monowave-grid";
const VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GeometryKind {
    Cartesian,
    /// Rings around the origin (`n = 2` only).
    Polar,
}

impl GeometryKind {
    /// Polar for `n = 2`, Cartesian for `n = 3`.
    pub fn default_for(n: usize) -> Self {
        if n == 2 {
            GeometryKind::Polar
        } else {
            GeometryKind::Cartesian
        }
    }
}

/// Node layout of a scan.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GridGeometry {
    /// `nodes` per axis at coordinates `(i − (nodes − 1)/2)·h`.
    Cartesian { h: f64, nodes: usize },
    /// The origin followed by `rings` circles of radius `i·dr`
    /// (`i = 1..=rings`), each with `angles` nodes at `φ = 2πj/angles`.
    Polar { dr: f64, rings: usize, angles: usize },
}

impl GridGeometry {
    pub fn node_count(&self, n: usize) -> u64 {
        match *self {
            GridGeometry::Cartesian { nodes, .. } => (nodes as u64).pow(n as u32),
            GridGeometry::Polar { rings, angles, .. } => 1 + rings as u64 * angles as u64,
        }
    }

    /// Largest distance between neighbouring nodes.
    pub fn spacing(&self) -> f64 {
        match *self {
            GridGeometry::Cartesian { h, .. } => h,
            GridGeometry::Polar { dr, rings, angles } => {
                dr.max(2.0 * PI * dr * rings as f64 / angles as f64)
            }
        }
    }

    fn check(&self, n: usize) -> Result<()> {
        match *self {
            GridGeometry::Cartesian { h, nodes } => {
                if !(h > 0.0 && h.is_finite()) || nodes < 2 {
                    return Err(Error::invalid("Cartesian grid needs h > 0 and at least 2 nodes"));
                }
            }
            GridGeometry::Polar { dr, rings, angles } => {
                if n != 2 {
                    return Err(Error::invalid("polar grids are planar"));
                }
                if !(dr > 0.0 && dr.is_finite()) || rings < 1 || angles < 3 {
                    return Err(Error::invalid("polar grid needs dr > 0, a ring and 3 angles"));
                }
            }
        }
        Ok(())
    }
}

/// What to scan.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanSpec {
    pub radius: f64,
    /// Inner radius of an annulus; `0` scans the whole ball.
    pub inner_radius: f64,
    pub h: f64,
    pub geometry: GeometryKind,
    pub memory_budget: u64,
}

impl ScanSpec {
    pub fn ball(n: usize, radius: f64, h: f64) -> Self {
        Self {
            radius,
            inner_radius: 0.0,
            h,
            geometry: GeometryKind::default_for(n),
            memory_budget: DEFAULT_MEMORY_BUDGET,
        }
    }

    pub fn annulus(n: usize, inner_radius: f64, radius: f64, h: f64) -> Self {
        Self {
            inner_radius,
            ..Self::ball(n, radius, h)
        }
    }

    pub fn with_geometry(mut self, geometry: GeometryKind) -> Self {
        self.geometry = geometry;
        self
    }

    pub fn with_budget(mut self, bytes: u64) -> Self {
        self.memory_budget = bytes;
        self
    }

    fn validate(&self, n: usize) -> Result<()> {
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(Error::invalid(format!("scan radius must be positive, got {}", self.radius)));
        }
        if !(self.h > 0.0 && self.h <= self.radius) {
            return Err(Error::invalid(format!("spacing must lie in (0, R], got {}", self.h)));
        }
        if !(self.inner_radius >= 0.0 && self.inner_radius < self.radius) {
            return Err(Error::invalid("inner radius must lie in [0, R)"));
        }
        if self.geometry == GeometryKind::Polar && n != 2 {
            return Err(Error::invalid("polar grids are planar"));
        }
        Ok(())
    }

    /// Node layout for dimension `n`.
    pub fn layout(&self, n: usize) -> Result<GridGeometry> {
        self.validate(n)?;
        Ok(layout_for(self.geometry, self.radius, self.h))
    }

    /// Bytes needed to store the scan.
    pub fn required_bytes(&self, n: usize) -> Result<u64> {
        Ok(8 * self.layout(n)?.node_count(n))
    }

    /// Estimated peak bytes of a streamed three-dimensional extraction:
    /// two value planes with their edge tables, plus a mesh of about
    /// `2 / h²` vertices per unit volume at 70 bytes each.
    pub fn streaming_bytes(&self) -> Result<u64> {
        let GridGeometry::Cartesian { h, nodes } = self.layout(3)? else {
            return Err(Error::invalid("three-dimensional scans must be Cartesian"));
        };
        Ok(streaming_estimate(nodes, h, self.radius, self.inner_radius))
    }

    /// Fails with [`Error::MemoryBudget`] when a streamed extraction would
    /// not fit.
    pub fn check_streaming_budget(&self) -> Result<()> {
        let required = self.streaming_bytes()?;
        if required <= self.memory_budget {
            return Ok(());
        }
        let mut h = self.h;
        while h < self.radius {
            h *= 1.05;
            let GridGeometry::Cartesian { nodes, .. } = layout_for(GeometryKind::Cartesian, self.radius, h) else {
                unreachable!()
            };
            if streaming_estimate(nodes, h, self.radius, self.inner_radius) <= self.memory_budget {
                break;
            }
        }
        Err(Error::MemoryBudget {
            required,
            budget: self.memory_budget,
            suggested: h,
        })
    }

    /// A spacing whose scan fits the budget.
    fn suggested_spacing(&self, n: usize) -> f64 {
        let nodes = (self.memory_budget / 8) as f64;
        let extent = 2.0 * (self.radius + 2.0 * self.h);
        let mut h = match self.geometry {
            GeometryKind::Cartesian => extent / (nodes.powf(1.0 / n as f64) - 1.0).max(1.0),
            GeometryKind::Polar => (2.0 * PI * (self.radius + 2.0 * self.h).powi(2) / nodes).sqrt(),
        };
        while h < self.radius && 8 * layout_for(self.geometry, self.radius, h).node_count(n) > self.memory_budget {
            h *= 1.05;
        }
        h
    }
}

fn streaming_estimate(nodes: usize, h: f64, radius: f64, inner: f64) -> u64 {
    let plane = (nodes * nodes) as f64;
    let volume = 4.0 / 3.0 * PI * (radius.powi(3) - inner.powi(3));
    let vertices = 2.0 * volume / (h * h);
    (56.0 * plane + 70.0 * vertices) as u64
}

fn layout_for(kind: GeometryKind, radius: f64, h: f64) -> GridGeometry {
    let reach = radius + 2.0 * h;
    match kind {
        GeometryKind::Cartesian => GridGeometry::Cartesian {
            h,
            nodes: 2 * (reach / h).ceil() as usize + 1,
        },
        GeometryKind::Polar => GridGeometry::Polar {
            dr: h,
            rings: (reach / h).ceil() as usize,
            angles: ((2.0 * PI * reach / h).ceil() as usize).max(8),
        },
    }
}

/// Provenance recorded with a scan.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ScanMetadata {
    pub seed: u64,
    /// Schedule descriptor, or empty for hand-built coefficients.
    pub schedule: String,
}

impl ScanMetadata {
    pub fn of_field(field: &WaveField) -> Self {
        let c = field.coeffs();
        Self {
            seed: c.seed(),
            schedule: c.schedule().map(|s| s.descriptor()).unwrap_or_default(),
        }
    }
}

/// A stored scan.
#[derive(Clone, Debug, PartialEq)]
pub struct GridScan {
    n: usize,
    radius: f64,
    inner_radius: f64,
    geometry: GridGeometry,
    values: Vec<f64>,
    metadata: ScanMetadata,
}

impl GridScan {
    /// Wraps externally computed node values (`NaN` marks unsampled nodes).
    /// Cartesian values are ordered with the first axis fastest.
    pub fn from_values(
        n: usize,
        radius: f64,
        inner_radius: f64,
        geometry: GridGeometry,
        values: Vec<f64>,
        metadata: ScanMetadata,
    ) -> Result<Self> {
        if n != 2 && n != 3 {
            return Err(Error::UnsupportedDimension(n));
        }
        geometry.check(n)?;
        if !(radius > 0.0) || !(inner_radius >= 0.0 && inner_radius < radius) {
            return Err(Error::invalid("need 0 <= inner radius < radius"));
        }
        if values.len() as u64 != geometry.node_count(n) {
            return Err(Error::invalid(format!(
                "{} values for a grid of {} nodes",
                values.len(),
                geometry.node_count(n)
            )));
        }
        Ok(Self {
            n,
            radius,
            inner_radius,
            geometry,
            values,
            metadata,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn inner_radius(&self) -> f64 {
        self.inner_radius
    }

    pub fn geometry(&self) -> GridGeometry {
        self.geometry
    }

    pub fn spacing(&self) -> f64 {
        self.geometry.spacing()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn metadata(&self) -> &ScanMetadata {
        &self.metadata
    }

    /// Position of node `index`.
    pub fn node_position(&self, index: usize) -> [f64; 3] {
        node_position(self.n, &self.geometry, index)
    }

    /// Writes the dump: a text header line, the node count as a
    /// little-endian `u64`, then the values as little-endian `f64`.
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        let geom = match self.geometry {
            GridGeometry::Cartesian { h, nodes } => {
                format!("geometry=cartesian h={:016x} nodes={nodes}", h.to_bits())
            }
            GridGeometry::Polar { dr, rings, angles } => format!(
                "geometry=polar dr={:016x} rings={rings} angles={angles}",
                dr.to_bits()
            ),
        };
        writeln!(
            w,
            "{MAGIC} {VERSION} n={} radius={:016x} inner={:016x} {geom} seed={} schedule={}",
            self.n,
            self.radius.to_bits(),
            self.inner_radius.to_bits(),
            self.metadata.seed,
            self.metadata.schedule
        )?;
        w.write_all(&(self.values.len() as u64).to_le_bytes())?;
        let mut buf = Vec::with_capacity(8 * 4096);
        for chunk in self.values.chunks(4096) {
            buf.clear();
            for v in chunk {
                buf.extend_from_slice(&v.to_le_bytes());
            }
            w.write_all(&buf)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self> {
        let mut header = Vec::new();
        let mut byte = [0u8; 1];
        loop {
            r.read_exact(&mut byte)?;
            if byte[0] == b'\n' {
                break;
            }
            header.push(byte[0]);
            if header.len() > 1 << 20 {
                return Err(Error::Format("grid header too long".into()));
            }
        }
        let header = String::from_utf8(header).map_err(|_| Error::Format("grid header is not UTF-8".into()))?;
        let (head, schedule) = header
            .split_once(" schedule=")
            .ok_or_else(|| Error::Format("grid header lacks a schedule field".into()))?;
        let mut words = head.split_whitespace();
        if words.next() != Some(MAGIC) {
            return Err(Error::Format("not a grid dump".into()));
        }
        let version: u32 = parse_word(words.next())?;
        if version != VERSION {
            return Err(Error::Format(format!("unsupported grid dump version {version}")));
        }
        let mut field = |key: &str| -> Result<String> {
            let w = words
                .next()
                .ok_or_else(|| Error::Format(format!("missing {key}")))?;
            w.strip_prefix(&format!("{key}="))
                .map(str::to_string)
                .ok_or_else(|| Error::Format(format!("expected {key}=, got {w}")))
        };
        let n: usize = parse_word(Some(&field("n")?))?;
        let radius = parse_bits(&field("radius")?)?;
        let inner = parse_bits(&field("inner")?)?;
        let geometry = match field("geometry")?.as_str() {
            "cartesian" => GridGeometry::Cartesian {
                h: parse_bits(&field("h")?)?,
                nodes: parse_word(Some(&field("nodes")?))?,
            },
            "polar" => GridGeometry::Polar {
                dr: parse_bits(&field("dr")?)?,
                rings: parse_word(Some(&field("rings")?))?,
                angles: parse_word(Some(&field("angles")?))?,
            },
            other => return Err(Error::Format(format!("unknown geometry {other}"))),
        };
        let seed: u64 = parse_word(Some(&field("seed")?))?;
        let mut len = [0u8; 8];
        r.read_exact(&mut len)?;
        let len = u64::from_le_bytes(len);
        geometry.check(n)?;
        if len != geometry.node_count(n) {
            return Err(Error::Format("value count does not match the grid".into()));
        }
        let mut values = Vec::with_capacity(len as usize);
        let mut buf = [0u8; 8];
        for _ in 0..len {
            r.read_exact(&mut buf)?;
            values.push(f64::from_le_bytes(buf));
        }
        Self::from_values(
            n,
            radius,
            inner,
            geometry,
            values,
            ScanMetadata {
                seed,
                schedule: schedule.to_string(),
            },
        )
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        self.write_to(BufWriter::new(File::create(path)?))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::read_from(BufReader::new(File::open(path)?))
    }
}

fn parse_word<T: std::str::FromStr>(w: Option<&str>) -> Result<T> {
    let w = w.ok_or_else(|| Error::Format("truncated grid header".into()))?;
    w.parse().map_err(|_| Error::Format(format!("bad header value {w}")))
}

fn parse_bits(w: &str) -> Result<f64> {
    u64::from_str_radix(w, 16)
        .map(f64::from_bits)
        .map_err(|_| Error::Format(format!("bad float bits {w}")))
}

pub(crate) fn node_position(n: usize, geometry: &GridGeometry, index: usize) -> [f64; 3] {
    match *geometry {
        GridGeometry::Cartesian { h, nodes } => {
            let c = (nodes - 1) as f64 / 2.0;
            let i = index % nodes;
            let j = (index / nodes) % nodes;
            let k = if n == 3 { index / (nodes * nodes) } else { 0 };
            let z = if n == 3 { (k as f64 - c) * h } else { 0.0 };
            [(i as f64 - c) * h, (j as f64 - c) * h, z]
        }
        GridGeometry::Polar { dr, angles, .. } => {
            if index == 0 {
                return [0.0; 3];
            }
            let ring = (index - 1) / angles + 1;
            let j = (index - 1) % angles;
            let r = ring as f64 * dr;
            let (s, c) = (2.0 * PI * j as f64 / angles as f64).sin_cos();
            [r * c, r * s, 0.0]
        }
    }
}

/// Which nodes are evaluated: `R_in − 2h ≤ |x| ≤ R + 2h`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Region {
    pub inner: f64,
    pub outer: f64,
    pub h: f64,
}

impl Region {
    pub fn contains(&self, r: f64) -> bool {
        r <= self.outer + 2.0 * self.h && (self.inner == 0.0 || r >= self.inner - 2.0 * self.h)
    }
}

/// Evaluates `u` at the given Cartesian nodes of one row or plane.
pub(crate) struct CartesianSampler<'a> {
    pub field: &'a WaveField,
    pub region: Region,
    pub h: f64,
    pub nodes: usize,
}

impl CartesianSampler<'_> {
    /// Values on the plane `z = (k − c)h` (`n = 3`) or the whole grid
    /// (`n = 2`, `k` ignored), first axis fastest.
    pub fn fill(&self, k: usize, out: &mut [f64]) -> Result<()> {
        let n = self.field.dim();
        let nodes = self.nodes;
        let c = (nodes - 1) as f64 / 2.0;
        let z = if n == 3 { (k as f64 - c) * self.h } else { 0.0 };
        out.par_chunks_mut(nodes)
            .enumerate()
            .try_for_each_init(EvalScratch::default, |scratch, (j, row)| -> Result<()> {
                let y = (j as f64 - c) * self.h;
                for (i, v) in row.iter_mut().enumerate() {
                    let x = (i as f64 - c) * self.h;
                    *v = self.eval(n, [x, y, z], scratch)?;
                }
                Ok(())
            })
    }

    fn eval(&self, n: usize, p: [f64; 3], scratch: &mut EvalScratch) -> Result<f64> {
        let r = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
        if !self.region.contains(r) {
            return Ok(f64::NAN);
        }
        let dir = if r == 0.0 {
            if n == 2 {
                Direction::planar(0.0)
            } else {
                Direction::spatial(0.0, 0.0)
            }
        } else {
            Direction::from_cartesian(&p[..n])?
        };
        self.field.eval_series_with(r, &dir, scratch)
    }
}

/// Scans the ball of radius `radius` with spacing `h`, default geometry and
/// memory budget.
pub fn scan_field(field: &WaveField, radius: f64, h: f64) -> Result<GridScan> {
    scan_field_with(field, &ScanSpec::ball(field.dim(), radius, h))
}

/// Scans according to `spec`, failing when the stored scan would exceed
/// the memory budget.
pub fn scan_field_with(field: &WaveField, spec: &ScanSpec) -> Result<GridScan> {
    let n = field.dim();
    let geometry = spec.layout(n)?;
    let required = spec.required_bytes(n)?;
    if required > spec.memory_budget {
        return Err(Error::MemoryBudget {
            required,
            budget: spec.memory_budget,
            suggested: spec.suggested_spacing(n),
        });
    }
    let region = Region {
        inner: spec.inner_radius,
        outer: spec.radius,
        h: spec.h,
    };
    let values = match geometry {
        GridGeometry::Cartesian { h, nodes } => {
            let sampler = CartesianSampler {
                field,
                region,
                h,
                nodes,
            };
            let plane = nodes * nodes;
            let mut values = vec![0.0; geometry.node_count(n) as usize];
            if n == 2 {
                sampler.fill(0, &mut values)?;
            } else {
                for (k, chunk) in values.chunks_mut(plane).enumerate() {
                    sampler.fill(k, chunk)?;
                }
            }
            values
        }
        GridGeometry::Polar { dr, rings, angles } => polar_values(field, region, dr, rings, angles)?,
    };
    GridScan::from_values(
        n,
        spec.radius,
        spec.inner_radius,
        geometry,
        values,
        ScanMetadata::of_field(field),
    )
}

/// `u` on a polar grid, using the separation `u = Σ_l A_l(φ) g_l(r)`.
fn polar_values(field: &WaveField, region: Region, dr: f64, rings: usize, angles: usize) -> Result<Vec<f64>> {
    let mut table = Vec::with_capacity(angles);
    let mut scratch = Vec::new();
    for j in 0..angles {
        let mut a = Vec::new();
        field.angular_parts(&Direction::planar(2.0 * PI * j as f64 / angles as f64), &mut scratch, &mut a)?;
        table.push(a);
    }
    let origin = {
        let mut g = Vec::new();
        field.radial_parts(0.0, &mut g)?;
        combine(&table[0], &g)
    };
    let mut values = vec![0.0; 1 + rings * angles];
    values[0] = origin;
    values[1..]
        .par_chunks_mut(angles)
        .enumerate()
        .try_for_each_init(Vec::new, |g, (i, ring)| -> Result<()> {
            let r = (i + 1) as f64 * dr;
            if !region.contains(r) {
                ring.iter_mut().for_each(|v| *v = f64::NAN);
                return Ok(());
            }
            field.radial_parts(r, g)?;
            for (v, a) in ring.iter_mut().zip(&table) {
                *v = combine(a, g);
            }
            Ok(())
        })?;
    Ok(values)
}
