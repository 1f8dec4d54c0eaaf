//! Toolkit for enhancing static 3D furniture meshes into articulated objects
//! with openable parts (drawers, doors, lids).
//!
//! The pipeline has three stages, each usable on its own:
//!
//! 1. **Part segmentation fusion** ([`fusion`]): project per-view or
//!    per-point-cloud instance predictions onto the mesh and reconcile
//!    overlapping masks into a per-triangle part segmentation.
//! 2. **Motion prediction** ([`motion`]): a geometric heuristic that assigns
//!    each openable part a motion type, axis, and (for hinged parts) origin,
//!    using gravity-aligned bounding boxes, base alignment, and handle
//!    detection.
//! 3. **Interior completion** ([`interior`]): synthesize drawer bodies by ray
//!    probing the cavity behind each drawer front, so parts look plausible
//!    when opened. The same module can also strip hidden interior geometry
//!    and add missing countertops to manufacture scan-like asset variants.
//!
//! Supporting modules: [`geometry`] (meshes, BVH ray casting, oriented boxes,
//! 3D GIoU), [`sampling`] (surface sampling, farthest point sampling, kNN
//! label propagation, per-triangle voting), [`assets`] (mesh and annotation
//! I/O, URDF export), [`metrics`] (the full evaluation suite: IoU matching,
//! P/R/F1, motion metrics, CA/NCA/ARI, OC-cost), and [`pipeline`] (batch
//! orchestration).
//!
//! See the `examples/` directory for one runnable example per capability;
//! every example builds its own procedural fixture via [`fixtures`] so no
//! external data is needed.

pub mod assets;
pub mod config;
pub mod fixtures;
pub mod fusion;
pub mod geometry;
pub mod interior;
pub mod metrics;
pub mod motion;
pub mod pipeline;
pub mod sampling;

use std::path::PathBuf;

/// Errors produced by any stage of the toolkit.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("mesh has no triangles")]
    EmptyMesh,
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
    #[error("ray direction is not unit length (|d| = {0})")]
    InvalidDirection(f64),
    #[error("both boxes have zero volume")]
    ZeroVolume,
    #[error("failed to parse {path}: {reason}")]
    Parse { path: PathBuf, reason: String },
    #[error("face with {0} vertices is not supported (triangles and quads only)")]
    UnsupportedFace(usize),
    #[error("triangle index {index} out of range for mesh with {count} triangles")]
    IndexOutOfRange { index: usize, count: usize },
    #[error("triangle {triangle} claimed by both part {first} and part {second}")]
    Overlap {
        triangle: usize,
        first: String,
        second: String,
    },
    #[error("annotation schema error: {0}")]
    Schema(String),
    #[error("mesh has zero total surface area")]
    DegenerateMesh,
    #[error("requested {requested} samples from a set of {available}")]
    InvalidCount { requested: usize, available: usize },
    #[error("triangle {0} received no sample points")]
    UncoveredTriangle(usize),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("invalid camera: {0}")]
    InvalidCamera(String),
    #[error("part label 'base' is not openable")]
    NotOpenable,
    #[error("part bounding box face has zero extent")]
    DegenerateBox,
    #[error("motion spec is missing a valid axis")]
    InvalidMotion,
    #[error("drawer depth {depth} too small for wall thickness {thickness}")]
    DepthTooSmall { depth: f64, thickness: f64 },
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
