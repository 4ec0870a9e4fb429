//! Nodal components of `u` inside balls: scanning, extraction, topology,
//! counts, shell predictions and the annulus connectivity probe.

mod grid;
mod mesh;
mod probe;
mod shells;

use std::f64::consts::PI;
use std::fmt::Write as _;

pub use grid::{
    scan_field, scan_field_with, GeometryKind, GridGeometry, GridScan, ScanMetadata, ScanSpec,
    DEFAULT_MEMORY_BUDGET, DEFAULT_SPACING,
};
pub use probe::{crossing_count, noncompact_connectivity_probe, ProbeReport};
pub use shells::{
    match_shells, predicted_shells, PhaseMap, ShellMatch, ShellPrediction, ShellReport,
};

use crate::error::{Error, Result};
use crate::field::WaveField;
use crate::stats::linear_fit;

use grid::{CartesianSampler, Region};
use mesh::{march_cartesian3, march_planar, MeshBuilder};

/// Topological type of a nodal component.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Topology {
    Circle,
    Sphere,
    Torus,
    /// Closed surface of genus `g ≥ 2`.
    Genus(u32),
    /// Touches the scan boundary.
    Noncompact,
    /// The mesh counts do not describe a closed manifold.
    Unresolved,
}

impl Topology {
    pub fn label(&self) -> String {
        match self {
            Topology::Circle => "circle".into(),
            Topology::Sphere => "sphere".into(),
            Topology::Torus => "torus".into(),
            Topology::Genus(g) => format!("genus_{g}"),
            Topology::Noncompact => "noncompact".into(),
            Topology::Unresolved => "unresolved".into(),
        }
    }

    /// Circle in the plane, sphere in space.
    pub fn is_sphere(&self) -> bool {
        matches!(self, Topology::Circle | Topology::Sphere)
    }
}

/// One connected piece of the extracted zero set.
#[derive(Clone, Debug, PartialEq)]
pub struct NodalComponent {
    pub id: usize,
    pub dim: usize,
    pub r_min: f64,
    pub r_max: f64,
    /// Mean radius of the mesh vertices.
    pub mean_radius: f64,
    pub vertex_count: usize,
    /// Triangles (`n = 3`) or segments (`n = 2`).
    pub face_count: usize,
    /// Grid cells crossed by the component.
    pub cell_count: usize,
    pub compact: bool,
    /// `V − F/2` of the closed triangle mesh (`n = 3`).
    pub euler_char: Option<i64>,
    pub topology: Topology,
    /// Oriented angle (solid angle for `n = 3`) subtended at the origin.
    pub signed_angle: f64,
    /// Sum of the unsigned angles of the faces.
    pub total_angle: f64,
    /// Grid spacing of the scan.
    pub spacing: f64,
    /// Up to a few thousand mesh vertices, evenly thinned.
    pub samples: Vec<[f64; 3]>,
}

impl NodalComponent {
    /// Whether every cell of the component lies inside `B_{R−h}`.
    pub fn contained_in(&self, radius: f64) -> bool {
        self.compact && self.r_max < radius - self.spacing
    }
}

/// Components of one scan.
#[derive(Clone, Debug, PartialEq)]
pub struct NodalComponents {
    pub dim: usize,
    pub radius: f64,
    pub inner_radius: f64,
    pub spacing: f64,
    pub components: Vec<NodalComponent>,
}

impl NodalComponents {
    pub fn compact(&self) -> impl Iterator<Item = &NodalComponent> {
        self.components.iter().filter(|c| c.compact)
    }

    /// One row per component: id, r_min, r_max, mean radius, compact,
    /// topology, χ, cells, vertices, faces, graph over a sphere.
    pub fn to_tsv(&self) -> String {
        let mut s = String::from("id\tr_min\tr_max\tmean_radius\tcompact\ttopology\tchi\tcells\tvertices\tfaces\tgraph\n");
        for c in &self.components {
            let chi = c.euler_char.map(|x| x.to_string()).unwrap_or_else(|| "-".into());
            let _ = writeln!(
                s,
                "{}\t{:.6}\t{:.6}\t{:.6}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                c.id,
                c.r_min,
                c.r_max,
                c.mean_radius,
                c.compact,
                c.topology.label(),
                chi,
                c.cell_count,
                c.vertex_count,
                c.face_count,
                graph_over_sphere_check(c)
            );
        }
        s
    }
}

pub(crate) fn classify_counts(dim: usize, compact: bool, vertices: usize, faces: usize) -> (Topology, Option<i64>) {
    if dim == 2 {
        let t = if !compact {
            Topology::Noncompact
        } else if faces == vertices {
            Topology::Circle
        } else {
            Topology::Unresolved
        };
        return (t, None);
    }
    let chi = (faces % 2 == 0).then(|| vertices as i64 - faces as i64 / 2);
    let t = match (compact, chi) {
        (false, _) => Topology::Noncompact,
        (true, Some(2)) => Topology::Sphere,
        (true, Some(0)) => Topology::Torus,
        (true, Some(x)) if x < 0 && x % 2 == 0 => Topology::Genus(((2 - x) / 2) as u32),
        _ => Topology::Unresolved,
    };
    (t, chi)
}

/// Topological label of a component (`Noncompact` when it touches the scan
/// boundary).
pub fn classify_topology(component: &NodalComponent) -> Topology {
    classify_counts(component.dim, component.compact, component.vertex_count, component.face_count).0
}

/// Components of a stored scan.
pub fn extract_components(scan: &GridScan) -> Result<NodalComponents> {
    let n = scan.dim();
    let mut builder = MeshBuilder::new(n);
    match (n, scan.geometry()) {
        (3, GridGeometry::Cartesian { h, nodes }) => {
            let plane = nodes * nodes;
            let values = scan.values();
            march_cartesian3(
                nodes,
                h,
                |k, out| {
                    out.copy_from_slice(&values[k * plane..(k + 1) * plane]);
                    Ok(())
                },
                &mut builder,
            )?;
        }
        (2, _) => march_planar(scan, &mut builder)?,
        _ => return Err(Error::invalid("three-dimensional scans must be Cartesian")),
    }
    Ok(builder.finish(scan.radius(), scan.inner_radius(), scan.spacing()))
}

/// Components of `u` over `spec` without storing the scan: planes are
/// evaluated on demand for `n = 3`; planar scans are stored as usual.
pub fn extract_from_field(field: &WaveField, spec: &ScanSpec) -> Result<NodalComponents> {
    let n = field.dim();
    if n == 2 {
        return extract_components(&scan_field_with(field, spec)?);
    }
    let GridGeometry::Cartesian { h, nodes } = spec.layout(n)? else {
        return Err(Error::invalid("three-dimensional scans must be Cartesian"));
    };
    spec.check_streaming_budget()?;
    let sampler = CartesianSampler {
        field,
        region: Region {
            inner: spec.inner_radius,
            outer: spec.radius,
            h,
        },
        h,
        nodes,
    };
    let mut builder = MeshBuilder::new(n);
    march_cartesian3(nodes, h, |k, out| sampler.fill(k, out), &mut builder)?;
    Ok(builder.finish(spec.radius, spec.inner_radius, h))
}

/// `N_u(R)` split by topology.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct BallCount {
    pub total: usize,
    /// Circles (`n = 2`) or spheres (`n = 3`).
    pub sphere: usize,
    pub other: usize,
    /// Components touching the scan boundary.
    pub noncompact: usize,
}

/// Counts the components contained in `B_R`, `R` at most the scan radius.
pub fn count_in_ball(set: &NodalComponents, radius: f64) -> Result<BallCount> {
    if !(radius > 0.0 && radius <= set.radius) {
        return Err(Error::invalid(format!(
            "count radius {radius} must lie in (0, {}]",
            set.radius
        )));
    }
    let mut count = BallCount::default();
    for c in &set.components {
        if !c.compact {
            count.noncompact += 1;
        } else if c.contained_in(radius) {
            count.total += 1;
            if c.topology.is_sphere() {
                count.sphere += 1;
            } else {
                count.other += 1;
            }
        }
    }
    Ok(count)
}

/// Whether a compact component is crossed exactly once by every ray from
/// the origin: the faces subtend the full angle (`2π` or `4π`) and all with
/// the same orientation, up to 1%.
pub fn graph_over_sphere_check(component: &NodalComponent) -> bool {
    if !component.compact {
        return false;
    }
    let full = if component.dim == 2 { 2.0 * PI } else { 4.0 * PI };
    let s = component.signed_angle.abs();
    s >= 0.99 * full && component.total_angle - s <= 0.01 * full
}

/// Least-squares slope of `N` against `R`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SlopeEstimate {
    pub slope: f64,
    pub intercept: f64,
    /// 95% interval from the residuals.
    pub confidence_interval: (f64, f64),
}

/// Fits `N(R) ≈ a + b R`; needs at least 5 radii spanning a factor 3.
pub fn slope_estimate(table: &[(f64, f64)]) -> Result<SlopeEstimate> {
    let lo = table.iter().map(|t| t.0).fold(f64::INFINITY, f64::min);
    let hi = table.iter().map(|t| t.0).fold(0.0, f64::max);
    if table.len() < 5 || !(lo > 0.0) || hi < 3.0 * lo {
        return Err(Error::invalid(
            "slope estimate needs at least 5 positive radii spanning a factor of 3",
        ));
    }
    let x: Vec<f64> = table.iter().map(|t| t.0).collect();
    let y: Vec<f64> = table.iter().map(|t| t.1).collect();
    let fit = linear_fit(&x, &y)?;
    Ok(SlopeEstimate {
        slope: fit.slope,
        intercept: fit.intercept,
        confidence_interval: fit.slope_ci,
    })
}
