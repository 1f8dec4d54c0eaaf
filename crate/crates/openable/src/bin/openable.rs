//! Command-line front end. Every subcommand is a thin wrapper over the
//! library; see the crate documentation and `examples/` for the API.

use clap::{Args, Parser, Subcommand};
use openable::assets::{
    load_annotation, load_json, load_mesh, save_annotation, save_json, save_mesh,
    ArticulatedObject, ArticulatedPart, PointCloudPrediction, ViewPrediction,
};
use openable::config::PipelineConfig;
use openable::geometry::Frame;
use openable::pipeline::{run_pipeline, SegSource, WORKERS_ENV};
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "openable", version, about = "Articulate static furniture meshes: segmentation fusion, motion prediction, interior completion, evaluation")]
struct Cli {
    /// Path to a JSON config file; flags override individual fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct MeshArg {
    /// Input mesh (.obj, .ply, .glb, .gltf).
    #[arg(long)]
    mesh: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a labeled point cloud from a mesh and write it as PLY.
    Sample {
        #[command(flatten)]
        mesh: MeshArg,
        /// Part annotation used to label the samples.
        #[arg(long)]
        annotation: Option<PathBuf>,
        /// Output point cloud (.ply).
        #[arg(long)]
        out: PathBuf,
        /// Surface samples before downsampling.
        #[arg(long)]
        points: Option<usize>,
        /// Farthest-point subset size (0 disables downsampling).
        #[arg(long)]
        fps: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Fuse per-view 2D mask predictions into a part segmentation.
    FuseViews {
        #[command(flatten)]
        mesh: MeshArg,
        /// Per-view predictions (JSON array, one entry per camera).
        #[arg(long)]
        views: PathBuf,
        /// Output annotation (JSON).
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        threshold: Option<f64>,
        #[arg(long)]
        resolution: Option<usize>,
    },
    /// Fuse point-cloud instance predictions into a part segmentation.
    FusePc {
        #[command(flatten)]
        mesh: MeshArg,
        /// Point-cloud prediction file (JSON).
        #[arg(long)]
        pc: PathBuf,
        /// Output annotation (JSON).
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        points: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Predict motion type, axis, and origin for every openable part.
    PredictMotion {
        #[command(flatten)]
        mesh: MeshArg,
        /// Part annotation (motions are ignored and re-predicted).
        #[arg(long)]
        annotation: PathBuf,
        /// Output annotation with motions filled in (JSON).
        #[arg(long)]
        out: PathBuf,
    },
    /// Synthesize drawer bodies behind drawer fronts and export the result.
    CompleteInterior {
        #[command(flatten)]
        mesh: MeshArg,
        /// Part annotation with motions.
        #[arg(long)]
        annotation: PathBuf,
        /// Output directory (URDF plus meshes).
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Remove mesh segments that are invisible from all outside views.
    StripInterior {
        #[command(flatten)]
        mesh: MeshArg,
        /// Output mesh.
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        views: Option<usize>,
        #[arg(long)]
        resolution: Option<usize>,
    },
    /// Add a countertop slab when the top of the object is mostly open.
    AddCountertop {
        #[command(flatten)]
        mesh: MeshArg,
        /// Output mesh.
        #[arg(long)]
        out: PathBuf,
    },
    /// Score predicted annotations against ground truth.
    Evaluate {
        /// Directory with meshes and ground-truth `<stem>.json` annotations.
        #[arg(long)]
        gt_dir: PathBuf,
        /// Directory with predicted `<stem>.json` annotations.
        #[arg(long)]
        pred_dir: PathBuf,
        /// Output report (JSON).
        #[arg(long)]
        out: PathBuf,
        /// Optional markdown summary table.
        #[arg(long)]
        table: Option<PathBuf>,
    },
    /// Export an annotated mesh as a URDF articulated object.
    ExportUrdf {
        #[command(flatten)]
        mesh: MeshArg,
        /// Part annotation with motions.
        #[arg(long)]
        annotation: PathBuf,
        /// Output directory.
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Run segmentation, motion prediction, completion, and export in batch.
    Pipeline {
        /// Directory of input meshes with per-mesh sidecar files.
        #[arg(long)]
        mesh_dir: PathBuf,
        /// Segmentation source: gt, view-pred, or pc-pred.
        #[arg(long, default_value = "gt")]
        source: SegSource,
        /// Output directory.
        #[arg(long)]
        out_dir: PathBuf,
    },
}

/// Build the articulated object described by a mesh plus annotation; parts
/// without a motion spec are re-predicted first.
fn assemble(
    mesh_path: &std::path::Path,
    annotation: &std::path::Path,
) -> openable::Result<ArticulatedObject> {
    let mesh = load_mesh(mesh_path)?;
    let (seg, frame) = load_annotation(annotation, &mesh)?;
    let seg = if seg.parts.iter().all(|p| p.motion.is_some()) {
        seg
    } else {
        openable::motion::predict_motion(
            &seg,
            &mesh,
            &frame,
            &openable::motion::MotionTypeStats::default(),
        )?
    };
    let mut parts = Vec::new();
    for p in &seg.parts {
        let Some(motion) = p.motion.clone() else {
            log::warn!("part {} has no motion; skipped", p.id);
            continue;
        };
        parts.push(ArticulatedPart {
            mesh: mesh.submesh(p.triangle_ids.iter().copied()),
            label: p.label,
            motion,
        });
    }
    Ok(ArticulatedObject {
        base: mesh.submesh(seg.base_triangles.iter().copied()),
        parts,
        frame,
    })
}

fn run(cli: Cli) -> openable::Result<()> {
    let mut cfg = match &cli.config {
        Some(p) => PipelineConfig::load(p)?,
        None => PipelineConfig::default(),
    };
    match cli.command {
        Command::Sample {
            mesh,
            annotation,
            out,
            points,
            fps,
            seed,
        } => {
            if let Some(v) = points {
                cfg.sample_points = v;
            }
            if let Some(v) = fps {
                cfg.fps_points = v;
            }
            if let Some(v) = seed {
                cfg.seed = v;
            }
            let m = load_mesh(&mesh.mesh)?;
            let mut cloud =
                openable::sampling::sample_surface(&m, cfg.sample_points, true, cfg.seed)?;
            if let Some(ann) = annotation {
                let (seg, _) = load_annotation(&ann, &m)?;
                cloud.label_from_segmentation(&seg, m.triangles.len());
            }
            if cfg.fps_points > 0 && cfg.fps_points < cloud.len() {
                let keep =
                    openable::sampling::farthest_point_sample(&cloud.positions, cfg.fps_points)?;
                cloud = cloud.select(&keep);
            }
            openable::sampling::save_cloud_ply(&out, &cloud)?;
            println!("wrote {} points to {}", cloud.len(), out.display());
        }
        Command::FuseViews {
            mesh,
            views,
            out,
            threshold,
            resolution,
        } => {
            if let Some(v) = threshold {
                cfg.confidence_threshold = v;
            }
            if let Some(v) = resolution {
                cfg.fusion_resolution = v;
            }
            cfg.validate()?;
            let m = load_mesh(&mesh.mesh)?;
            let frame = Frame::canonical();
            let cameras = openable::fusion::default_camera_rig(&m.aabb(), &frame);
            let preds: Vec<ViewPrediction> = load_json(&views)?;
            if preds.len() != cameras.len() {
                return Err(openable::Error::ShapeMismatch(format!(
                    "{} view predictions for {} cameras",
                    preds.len(),
                    cameras.len()
                )));
            }
            let maps = openable::fusion::render_index_maps(
                &m,
                &cameras,
                cfg.fusion_resolution,
                cfg.fusion_resolution,
            )?;
            let mut masks = Vec::new();
            for (map, pred) in maps.iter().zip(&preds) {
                masks.extend(openable::fusion::lift_view_masks(
                    map,
                    pred,
                    cfg.confidence_threshold,
                )?);
            }
            let seg = openable::fusion::reconcile_view_masks(&masks, &m)?;
            save_annotation(&out, &seg, &frame)?;
            println!("fused {} parts into {}", seg.parts.len(), out.display());
        }
        Command::FusePc {
            mesh,
            pc,
            out,
            points,
            seed,
        } => {
            if let Some(v) = points {
                cfg.sample_points = v;
            }
            if let Some(v) = seed {
                cfg.seed = v;
            }
            let m = load_mesh(&mesh.mesh)?;
            let pred: PointCloudPrediction = load_json(&pc)?;
            let cloud =
                openable::sampling::sample_surface(&m, cfg.sample_points, true, cfg.seed)?;
            if pred.points != cloud.len() {
                return Err(openable::Error::ShapeMismatch(format!(
                    "prediction covers {} points but the sampled cloud has {}",
                    pred.points,
                    cloud.len()
                )));
            }
            let seg = openable::fusion::reconcile_pc_masks(&pred.instances, &cloud, &m)?;
            save_annotation(&out, &seg, &Frame::canonical())?;
            println!("fused {} parts into {}", seg.parts.len(), out.display());
        }
        Command::PredictMotion {
            mesh,
            annotation,
            out,
        } => {
            let m = load_mesh(&mesh.mesh)?;
            let (seg, frame) = load_annotation(&annotation, &m)?;
            let seg = openable::motion::predict_motion(
                &seg,
                &m,
                &frame,
                &openable::motion::MotionTypeStats::default(),
            )?;
            save_annotation(&out, &seg, &frame)?;
            let n = seg.parts.iter().filter(|p| p.motion.is_some()).count();
            println!(
                "predicted motion for {n}/{} parts into {}",
                seg.parts.len(),
                out.display()
            );
        }
        Command::CompleteInterior {
            mesh,
            annotation,
            out_dir,
        } => {
            let obj = assemble(&mesh.mesh, &annotation)?;
            let completed = openable::interior::complete_interiors(&obj)?;
            let files = openable::assets::export_urdf(&completed, &out_dir)?;
            println!("wrote {} files to {}", files.len(), out_dir.display());
        }
        Command::StripInterior {
            mesh,
            out,
            views,
            resolution,
        } => {
            if let Some(v) = views {
                cfg.strip_views = v;
            }
            if let Some(v) = resolution {
                cfg.strip_resolution = v;
            }
            cfg.validate()?;
            let m = load_mesh(&mesh.mesh)?;
            let stripped = openable::interior::strip_interior(
                &m,
                cfg.strip_views,
                (cfg.strip_resolution, cfg.strip_resolution),
            )?;
            save_mesh(&out, &stripped)?;
            println!(
                "kept {}/{} triangles into {}",
                stripped.triangles.len(),
                m.triangles.len(),
                out.display()
            );
        }
        Command::AddCountertop { mesh, out } => {
            let m = load_mesh(&mesh.mesh)?;
            let with_top = openable::interior::add_countertop(&m, &Frame::canonical())?;
            save_mesh(&out, &with_top)?;
            let added = with_top.triangles.len() - m.triangles.len();
            println!("added {added} triangles into {}", out.display());
        }
        Command::Evaluate {
            gt_dir,
            pred_dir,
            out,
            table,
        } => {
            let mut objects = Vec::new();
            let mut entries: Vec<PathBuf> = std::fs::read_dir(&gt_dir)?
                .filter_map(|e| e.ok())
                .map(|e| e.path())
                .filter(|p| {
                    matches!(
                        p.extension().and_then(|e| e.to_str()),
                        Some("obj" | "ply" | "glb" | "gltf")
                    )
                })
                .collect();
            entries.sort();
            for mesh_path in entries {
                let stem = mesh_path
                    .file_stem()
                    .and_then(|s| s.to_str())
                    .unwrap_or_default()
                    .to_string();
                let m = load_mesh(&mesh_path)?;
                let (gt, _) = load_annotation(&gt_dir.join(format!("{stem}.json")), &m)?;
                let (pred, _) = load_annotation(&pred_dir.join(format!("{stem}.json")), &m)?;
                objects.push(openable::metrics::EvalObject {
                    name: stem,
                    mesh: m,
                    gt,
                    pred,
                });
            }
            let report = openable::metrics::evaluate(&objects, &cfg.metric_config())?;
            save_json(&out, &report)?;
            let rendered = openable::metrics::render_table(&report);
            if let Some(t) = table {
                std::fs::write(&t, &rendered)?;
            }
            print!("{rendered}");
        }
        Command::ExportUrdf {
            mesh,
            annotation,
            out_dir,
        } => {
            let obj = assemble(&mesh.mesh, &annotation)?;
            let files = openable::assets::export_urdf(&obj, &out_dir)?;
            println!("wrote {} files to {}", files.len(), out_dir.display());
        }
        Command::Pipeline {
            mesh_dir,
            source,
            out_dir,
        } => {
            let manifest = run_pipeline(&mesh_dir, source, &out_dir, &cfg)?;
            println!(
                "{} succeeded, {} failed; manifest at {}",
                manifest.succeeded,
                manifest.failed,
                out_dir.join("manifest.json").display()
            );
            for o in manifest.objects.iter().filter(|o| !o.ok) {
                eprintln!("  {}: {}", o.name, o.error.as_deref().unwrap_or("unknown"));
            }
        }
    }
    Ok(())
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    if let Ok(n) = std::env::var(WORKERS_ENV) {
        match n.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => eprintln!("ignoring invalid {WORKERS_ENV}={n}"),
        }
    }
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
