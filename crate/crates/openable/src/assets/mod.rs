//! Asset I/O: meshes (OBJ/PLY/GLB), part annotations, prediction files, and
//! URDF export.

mod annotation;
mod mesh_io;
mod urdf;

pub use annotation::{load_annotation, save_annotation};
pub use mesh_io::{load_mesh, save_mesh};
pub(crate) use mesh_io::read_ply;
pub use urdf::{export_urdf, import_urdf_joints, UrdfJoint};

use crate::geometry::{Frame, Pt3, TriMesh, Vec3};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// Semantic part label. `Base` is the static remainder, never openable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PartLabel {
    Drawer,
    Door,
    Lid,
    Base,
}

impl PartLabel {
    pub fn is_openable(self) -> bool {
        self != PartLabel::Base
    }

    pub fn as_str(self) -> &'static str {
        match self {
            PartLabel::Drawer => "drawer",
            PartLabel::Door => "door",
            PartLabel::Lid => "lid",
            PartLabel::Base => "base",
        }
    }

    pub const OPENABLE: [PartLabel; 3] = [PartLabel::Drawer, PartLabel::Door, PartLabel::Lid];
}

impl std::str::FromStr for PartLabel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "drawer" => Ok(PartLabel::Drawer),
            "door" => Ok(PartLabel::Door),
            "lid" => Ok(PartLabel::Lid),
            "base" => Ok(PartLabel::Base),
            other => Err(Error::Schema(format!("unknown part label {other:?}"))),
        }
    }
}

impl std::fmt::Display for PartLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MotionType {
    Prismatic,
    Revolute,
}

/// Motion parameters: type, unit axis, and (revolute only) a point on the
/// rotation axis. Range is meters for prismatic, radians for revolute.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MotionSpec {
    #[serde(rename = "type")]
    pub motion_type: MotionType,
    pub axis: Vec3,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub origin: Option<Pt3>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub range: Option<[f64; 2]>,
}

impl MotionSpec {
    pub fn prismatic(axis: Vec3, range: Option<[f64; 2]>) -> Self {
        MotionSpec {
            motion_type: MotionType::Prismatic,
            axis,
            origin: None,
            range,
        }
    }

    pub fn revolute(axis: Vec3, origin: Pt3, range: Option<[f64; 2]>) -> Self {
        MotionSpec {
            motion_type: MotionType::Revolute,
            axis,
            origin: Some(origin),
            range,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if (self.axis.norm() - 1.0).abs() > 1e-6 {
            return Err(Error::InvalidMotion);
        }
        match self.motion_type {
            MotionType::Revolute if self.origin.is_none() => Err(Error::InvalidMotion),
            MotionType::Prismatic if self.origin.is_some() => Err(Error::InvalidMotion),
            _ => Ok(()),
        }
    }
}

/// One predicted or annotated part: a set of mesh triangles plus metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct PartInstance {
    pub id: String,
    pub label: PartLabel,
    pub triangle_ids: BTreeSet<usize>,
    pub confidence: f64,
    pub motion: Option<MotionSpec>,
}

/// Partition of a mesh's triangles into openable parts and base.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PartSegmentation {
    pub parts: Vec<PartInstance>,
    pub base_triangles: BTreeSet<usize>,
}

impl PartSegmentation {
    /// Build from parts alone; base is the complement. Rejects overlapping
    /// claims and out-of-range indices.
    pub fn from_parts(parts: Vec<PartInstance>, triangle_count: usize) -> Result<Self> {
        let mut owner: Vec<Option<usize>> = vec![None; triangle_count];
        for (pi, part) in parts.iter().enumerate() {
            for &t in &part.triangle_ids {
                if t >= triangle_count {
                    return Err(Error::IndexOutOfRange {
                        index: t,
                        count: triangle_count,
                    });
                }
                if let Some(prev) = owner[t] {
                    return Err(Error::Overlap {
                        triangle: t,
                        first: parts[prev].id.clone(),
                        second: part.id.clone(),
                    });
                }
                owner[t] = Some(pi);
            }
        }
        let base_triangles = owner
            .iter()
            .enumerate()
            .filter(|(_, o)| o.is_none())
            .map(|(t, _)| t)
            .collect();
        Ok(PartSegmentation {
            parts,
            base_triangles,
        })
    }

    /// Check the partition invariant against a mesh of `triangle_count`.
    pub fn validate(&self, triangle_count: usize) -> Result<()> {
        let mut seen = vec![false; triangle_count];
        let mut mark = |t: usize, id: &str| -> Result<()> {
            if t >= triangle_count {
                return Err(Error::IndexOutOfRange {
                    index: t,
                    count: triangle_count,
                });
            }
            if seen[t] {
                return Err(Error::Overlap {
                    triangle: t,
                    first: String::from("(earlier claim)"),
                    second: id.to_string(),
                });
            }
            seen[t] = true;
            Ok(())
        };
        for part in &self.parts {
            if part.triangle_ids.is_empty() {
                return Err(Error::Schema(format!("part {:?} has no triangles", part.id)));
            }
            for &t in &part.triangle_ids {
                mark(t, &part.id)?;
            }
        }
        for &t in &self.base_triangles {
            mark(t, "base")?;
        }
        if let Some(t) = seen.iter().position(|&s| !s) {
            return Err(Error::Schema(format!(
                "triangle {t} belongs to neither a part nor base"
            )));
        }
        Ok(())
    }

    /// Per-triangle owner: `Some(part index)` or `None` for base.
    pub fn owner_of(&self, triangle_count: usize) -> Vec<Option<usize>> {
        let mut owner = vec![None; triangle_count];
        for (pi, part) in self.parts.iter().enumerate() {
            for &t in &part.triangle_ids {
                owner[t] = Some(pi);
            }
        }
        owner
    }
}

/// A movable part of an assembled object.
#[derive(Debug, Clone)]
pub struct ArticulatedPart {
    pub mesh: TriMesh,
    pub label: PartLabel,
    pub motion: MotionSpec,
}

/// Final assembly: static base plus movable parts, all in one frame.
#[derive(Debug, Clone)]
pub struct ArticulatedObject {
    pub base: TriMesh,
    pub parts: Vec<ArticulatedPart>,
    pub frame: Frame,
}

impl ArticulatedObject {
    pub fn validate(&self) -> Result<()> {
        for p in &self.parts {
            if p.mesh.is_empty() {
                return Err(Error::EmptyMesh);
            }
            p.motion.validate()?;
        }
        Ok(())
    }
}

/// Point-cloud instance prediction file: indexes into a paired point cloud.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PointCloudPrediction {
    pub points: usize,
    pub instances: Vec<PointCloudInstance>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PointCloudInstance {
    pub label: PartLabel,
    pub confidence: f64,
    pub point_ids: Vec<usize>,
}

/// Per-view 2D instance prediction file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ViewPrediction {
    pub view_id: String,
    pub masks: Vec<ViewMaskRecord>,
}

/// One 2D mask. `pixels` is run-length encoded row-major, alternating runs
/// starting with background.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ViewMaskRecord {
    pub label: PartLabel,
    pub confidence: f64,
    pub pixels: Vec<usize>,
    pub width: usize,
    pub height: usize,
}

impl ViewMaskRecord {
    /// Decode to a row-major boolean bitmap of width × height.
    pub fn decode(&self) -> Result<Vec<bool>> {
        let total = self.width * self.height;
        let mut out = Vec::with_capacity(total);
        let mut fg = false;
        for &run in &self.pixels {
            out.extend(std::iter::repeat(fg).take(run));
            fg = !fg;
        }
        if out.len() != total {
            return Err(Error::Schema(format!(
                "mask RLE decodes to {} pixels, expected {}",
                out.len(),
                total
            )));
        }
        Ok(out)
    }

    /// Encode a row-major bitmap.
    pub fn encode(bitmap: &[bool]) -> Vec<usize> {
        let mut runs = Vec::new();
        let mut fg = false;
        let mut count = 0usize;
        for &b in bitmap {
            if b == fg {
                count += 1;
            } else {
                runs.push(count);
                fg = b;
                count = 1;
            }
        }
        runs.push(count);
        runs
    }
}

pub fn load_json<T: serde::de::DeserializeOwned>(path: &std::path::Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })
}

pub fn save_json<T: Serialize>(path: &std::path::Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text)?;
    Ok(())
}
