//! Part annotation JSON: the normative schema for both ground truth and
//! predictions.
//!
//! ```json
//! {
//!   "frame": {"up": [0,0,1], "front": [1,0,0]},
//!   "parts": [
//!     {"id": "d1", "label": "drawer", "triangles": [0,1,2], "confidence": 1.0,
//!      "motion": {"type": "prismatic", "axis": [1,0,0], "range": [0, 0.4]}}
//!   ]
//! }
//! ```
//!
//! Triangles listed in no part belong to the base. `frame` is optional and
//! defaults to z-up, x-front.

use super::{MotionSpec, PartInstance, PartLabel, PartSegmentation};
use crate::geometry::{Frame, TriMesh, Vec3};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Serialize, Deserialize)]
struct AnnotationFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    frame: Option<FrameRecord>,
    parts: Vec<PartRecord>,
}

#[derive(Serialize, Deserialize)]
struct FrameRecord {
    up: [f64; 3],
    front: [f64; 3],
}

#[derive(Serialize, Deserialize)]
struct PartRecord {
    id: String,
    label: PartLabel,
    triangles: Vec<usize>,
    confidence: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    motion: Option<MotionSpec>,
}

pub fn load_annotation(path: &Path, mesh: &TriMesh) -> Result<(PartSegmentation, Frame)> {
    let file: AnnotationFile = super::load_json(path)?;
    let frame = match file.frame {
        Some(f) => Frame::new(Vec3::from(f.up), Vec3::from(f.front)),
        None => Frame::canonical(),
    };
    let mut parts = Vec::with_capacity(file.parts.len());
    for rec in file.parts {
        if rec.label == PartLabel::Base {
            return Err(Error::Schema(format!(
                "part {:?} uses label 'base'; base triangles are implicit",
                rec.id
            )));
        }
        if let Some(m) = &rec.motion {
            m.validate().map_err(|_| {
                Error::Schema(format!("part {:?} has an invalid motion spec", rec.id))
            })?;
        }
        parts.push(PartInstance {
            id: rec.id,
            label: rec.label,
            triangle_ids: rec.triangles.into_iter().collect(),
            confidence: rec.confidence,
            motion: rec.motion,
        });
    }
    let seg = PartSegmentation::from_parts(parts, mesh.triangles.len())?;
    seg.validate(mesh.triangles.len())?;
    Ok((seg, frame))
}

pub fn save_annotation(path: &Path, seg: &PartSegmentation, frame: &Frame) -> Result<()> {
    let file = AnnotationFile {
        frame: Some(FrameRecord {
            up: frame.up.into(),
            front: frame.front.into(),
        }),
        parts: seg
            .parts
            .iter()
            .map(|p| PartRecord {
                id: p.id.clone(),
                label: p.label,
                triangles: p.triangle_ids.iter().copied().collect(),
                confidence: p.confidence,
                motion: p.motion,
            })
            .collect(),
    };
    super::save_json(path, &file)
}
