//! Batch orchestration: run segmentation (loaded or fused), motion
//! prediction, and interior completion over a directory of meshes, exporting
//! articulated objects plus a machine-readable manifest.

use crate::assets::{
    load_annotation, load_json, load_mesh, save_json, ArticulatedObject, ArticulatedPart,
    PartSegmentation, PointCloudPrediction, ViewPrediction,
};
use crate::config::PipelineConfig;
use crate::geometry::Frame;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// Environment variable holding the default worker count.
pub const WORKERS_ENV: &str = "OPENABLE_WORKERS";

/// Where each object's segmentation comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SegSource {
    /// `<stem>.json` annotation files with authoritative part assignments.
    Gt,
    /// `<stem>.views.json` per-view 2D mask predictions, fused by rendering.
    ViewPred,
    /// `<stem>.pc.json` point-cloud instance predictions, fused by sampling.
    PcPred,
}

impl std::str::FromStr for SegSource {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gt" => Ok(SegSource::Gt),
            "view-pred" => Ok(SegSource::ViewPred),
            "pc-pred" => Ok(SegSource::PcPred),
            other => Err(Error::Config(format!(
                "unknown segmentation source {other:?} (expected gt, view-pred, or pc-pred)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectOutcome {
    pub name: String,
    pub ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub outputs: Vec<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub succeeded: usize,
    pub failed: usize,
    pub objects: Vec<ObjectOutcome>,
}

fn mesh_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| {
            matches!(
                p.extension().and_then(|e| e.to_str()),
                Some("obj" | "ply" | "glb" | "gltf")
            )
        })
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(Error::EmptyInput("no mesh files in input directory"));
    }
    Ok(files)
}

/// Load or fuse the segmentation for one mesh.
pub fn obtain_segmentation(
    mesh_path: &Path,
    mesh: &crate::geometry::TriMesh,
    source: SegSource,
    config: &PipelineConfig,
) -> Result<(PartSegmentation, Frame)> {
    let sidecar = |suffix: &str| {
        let stem = mesh_path.file_stem().and_then(|s| s.to_str()).unwrap_or("");
        mesh_path.with_file_name(format!("{stem}{suffix}"))
    };
    match source {
        SegSource::Gt => load_annotation(&sidecar(".json"), mesh),
        SegSource::ViewPred => {
            let preds: Vec<ViewPrediction> = load_json(&sidecar(".views.json"))?;
            let frame = Frame::canonical();
            let cameras = crate::fusion::default_camera_rig(&mesh.aabb(), &frame);
            if preds.len() != cameras.len() {
                return Err(Error::ShapeMismatch(format!(
                    "{} view predictions for {} cameras",
                    preds.len(),
                    cameras.len()
                )));
            }
            let maps = crate::fusion::render_index_maps(
                mesh,
                &cameras,
                config.fusion_resolution,
                config.fusion_resolution,
            )?;
            let mut masks = Vec::new();
            for (map, pred) in maps.iter().zip(&preds) {
                masks.extend(crate::fusion::lift_view_masks(
                    map,
                    pred,
                    config.confidence_threshold,
                )?);
            }
            Ok((crate::fusion::reconcile_view_masks(&masks, mesh)?, frame))
        }
        SegSource::PcPred => {
            let pred: PointCloudPrediction = load_json(&sidecar(".pc.json"))?;
            let cloud = crate::sampling::sample_surface(
                mesh,
                config.sample_points,
                true,
                config.seed,
            )?;
            if pred.points != cloud.len() {
                return Err(Error::ShapeMismatch(format!(
                    "prediction covers {} points but the sampled cloud has {}",
                    pred.points,
                    cloud.len()
                )));
            }
            Ok((
                crate::fusion::reconcile_pc_masks(&pred.instances, &cloud, mesh)?,
                Frame::canonical(),
            ))
        }
    }
}

/// Segmentation → motion → interior completion → URDF export for one object.
fn process_object(
    mesh_path: &Path,
    source: SegSource,
    out_dir: &Path,
    config: &PipelineConfig,
) -> Result<Vec<PathBuf>> {
    let name = mesh_path
        .file_stem()
        .and_then(|s| s.to_str())
        .ok_or_else(|| Error::Config(format!("bad mesh path {mesh_path:?}")))?;
    let mesh = load_mesh(mesh_path)?;
    log::info!("{name}: loaded mesh ({} triangles)", mesh.triangles.len());
    let (seg, frame) = obtain_segmentation(mesh_path, &mesh, source, config)?;
    log::info!("{name}: segmentation with {} parts", seg.parts.len());
    let with_motion = crate::motion::predict_motion(
        &seg,
        &mesh,
        &frame,
        &crate::motion::MotionTypeStats::default(),
    )?;
    log::info!("{name}: motion predicted");
    let mut parts = Vec::new();
    for p in &with_motion.parts {
        let Some(motion) = p.motion.clone() else {
            log::warn!("{name}: part {} has no motion, excluded from export", p.id);
            continue;
        };
        parts.push(ArticulatedPart {
            mesh: mesh.submesh(p.triangle_ids.iter().copied()),
            label: p.label,
            motion,
        });
    }
    let obj = ArticulatedObject {
        base: mesh.submesh(with_motion.base_triangles.iter().copied()),
        parts,
        frame,
    };
    let completed = crate::interior::complete_interiors(&obj)?;
    log::info!("{name}: interiors completed");
    let obj_dir = out_dir.join(name);
    std::fs::create_dir_all(&obj_dir)?;
    let mut outputs = crate::assets::export_urdf(&completed, &obj_dir)?;
    let seg_path = obj_dir.join("segmentation.json");
    crate::assets::save_annotation(&seg_path, &with_motion, &frame)?;
    outputs.push(seg_path);
    log::info!("{name}: exported {} files", outputs.len());
    // Manifest paths are relative to the output directory so reruns into
    // different directories produce identical manifests.
    Ok(outputs
        .into_iter()
        .map(|p| p.strip_prefix(out_dir).map(PathBuf::from).unwrap_or(p))
        .collect())
}

/// Run the full pipeline over a directory. Per-object failures are isolated
/// and recorded in the manifest; the manifest is also written to
/// `out_dir/manifest.json`.
pub fn run_pipeline(
    mesh_dir: &Path,
    source: SegSource,
    out_dir: &Path,
    config: &PipelineConfig,
) -> Result<Manifest> {
    config.validate()?;
    std::fs::create_dir_all(out_dir)?;
    let files = mesh_files(mesh_dir)?;
    use rayon::prelude::*;
    let mut objects: Vec<ObjectOutcome> = files
        .par_iter()
        .map(|path| {
            let name = path
                .file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or("<invalid>")
                .to_string();
            match process_object(path, source, out_dir, config) {
                Ok(outputs) => ObjectOutcome {
                    name,
                    ok: true,
                    error: None,
                    outputs,
                },
                Err(e) => {
                    log::error!("{name}: failed: {e}");
                    ObjectOutcome {
                        name,
                        ok: false,
                        error: Some(e.to_string()),
                        outputs: Vec::new(),
                    }
                }
            }
        })
        .collect();
    objects.sort_by(|a, b| a.name.cmp(&b.name));
    let manifest = Manifest {
        succeeded: objects.iter().filter(|o| o.ok).count(),
        failed: objects.iter().filter(|o| !o.ok).count(),
        objects,
    };
    save_json(&out_dir.join("manifest.json"), &manifest)?;
    Ok(manifest)
}
