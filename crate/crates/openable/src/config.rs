//! Pipeline configuration: every tunable threshold in one serializable
//! struct, with defaults matching the reference constants used throughout
//! the library.

use crate::metrics::MetricConfig;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::path::Path;

/// All pipeline knobs. `Default` reproduces the library's built-in constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    /// View masks below this confidence are dropped before reconciliation.
    pub confidence_threshold: f64,
    /// Area-weighted IoU above which two masks merge into one part.
    pub merge_iou: f64,
    /// Surface samples drawn before downsampling.
    pub sample_points: usize,
    /// Farthest-point subset size.
    pub fps_points: usize,
    /// Neighbors for label propagation.
    pub knn_k: usize,
    /// Camera count for view fusion.
    pub fusion_views: usize,
    /// Render resolution (square) for view fusion.
    pub fusion_resolution: usize,
    /// View count for interior stripping.
    pub strip_views: usize,
    /// Render resolution (square) for interior stripping.
    pub strip_resolution: usize,
    /// Depth bins for handle detection.
    pub bins: usize,
    /// Corner-drawer margin on the center/side depth ratio.
    pub corner_margin: f64,
    /// IoU threshold for part matching in evaluation.
    pub iou_threshold: f64,
    /// Axis tolerance (degrees) for the +MA criterion.
    pub axis_tol_deg: f64,
    /// Origin tolerance (fraction of GT part diagonal) for +MAO.
    pub origin_tol_frac: f64,
    /// Optimal-transport localization/classification mix.
    pub oc_lambda: f64,
    /// Dummy-bin transport cost.
    pub oc_beta: f64,
    /// RNG seed for sampling.
    pub seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            confidence_threshold: crate::fusion::CONFIDENCE_THRESHOLD,
            merge_iou: crate::fusion::MERGE_IOU,
            sample_points: 1_000_000,
            fps_points: 20_000,
            knn_k: 3,
            fusion_views: 3,
            fusion_resolution: 256,
            strip_views: 64,
            strip_resolution: 512,
            bins: crate::motion::HANDLE_BINS,
            corner_margin: crate::interior::CORNER_MARGIN,
            iou_threshold: crate::metrics::IOU_THRESHOLD,
            axis_tol_deg: crate::metrics::AXIS_TOL_DEG,
            origin_tol_frac: crate::metrics::ORIGIN_TOL_FRAC,
            oc_lambda: crate::metrics::OC_LAMBDA,
            oc_beta: crate::metrics::OC_BETA,
            seed: 0,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        let checks = [
            ("confidence_threshold", self.confidence_threshold, 0.0, 1.0),
            ("merge_iou", self.merge_iou, 0.0, 1.0),
            ("corner_margin", self.corner_margin, 1.0, 10.0),
            ("iou_threshold", self.iou_threshold, 0.0, 1.0),
            ("axis_tol_deg", self.axis_tol_deg, 0.0, 90.0),
            ("origin_tol_frac", self.origin_tol_frac, 0.0, 10.0),
            ("oc_lambda", self.oc_lambda, 0.0, 1.0),
            ("oc_beta", self.oc_beta, 0.0, 10.0),
        ];
        for (name, v, lo, hi) in checks {
            if !(lo..=hi).contains(&v) || !v.is_finite() {
                return Err(Error::Config(format!("{name} = {v} outside [{lo}, {hi}]")));
            }
        }
        for (name, v) in [
            ("sample_points", self.sample_points),
            ("fps_points", self.fps_points),
            ("knn_k", self.knn_k),
            ("fusion_views", self.fusion_views),
            ("fusion_resolution", self.fusion_resolution),
            ("strip_resolution", self.strip_resolution),
            ("bins", self.bins),
        ] {
            if v == 0 {
                return Err(Error::Config(format!("{name} must be positive")));
            }
        }
        if self.strip_views < 4 {
            return Err(Error::Config(format!(
                "strip_views must be at least 4, got {}",
                self.strip_views
            )));
        }
        if self.fps_points > self.sample_points {
            return Err(Error::Config(format!(
                "fps_points {} exceeds sample_points {}",
                self.fps_points, self.sample_points
            )));
        }
        Ok(())
    }

    pub fn metric_config(&self) -> MetricConfig {
        MetricConfig {
            iou_threshold: self.iou_threshold,
            axis_tol_deg: self.axis_tol_deg,
            origin_tol_frac: self.origin_tol_frac,
            oc_lambda: self.oc_lambda,
            oc_beta: self.oc_beta,
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let cfg: PipelineConfig = crate::assets::load_json(path)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        crate::assets::save_json(path, self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_reference_constants() {
        let c = PipelineConfig::default();
        assert_eq!(c.confidence_threshold, 0.9);
        assert_eq!(c.merge_iou, 0.8);
        assert_eq!(c.sample_points, 1_000_000);
        assert_eq!(c.fps_points, 20_000);
        assert_eq!(c.knn_k, 3);
        assert_eq!(c.fusion_views, 3);
        assert_eq!(c.strip_views, 64);
        assert_eq!(c.strip_resolution, 512);
        assert_eq!(c.bins, 32);
        assert_eq!(c.corner_margin, 1.25);
        assert_eq!(c.iou_threshold, 0.5);
        assert_eq!(c.axis_tol_deg, 5.0);
        assert_eq!(c.origin_tol_frac, 0.1);
        assert_eq!(c.oc_lambda, 0.5);
        assert_eq!(c.oc_beta, 0.6);
        c.validate().unwrap();
    }

    #[test]
    fn round_trips_through_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("config.json");
        let c = PipelineConfig::default();
        c.save(&path).unwrap();
        let back = PipelineConfig::load(&path).unwrap();
        assert_eq!(c, back);
    }

    #[test]
    fn rejects_out_of_range() {
        let mut c = PipelineConfig::default();
        c.confidence_threshold = 1.5;
        assert!(matches!(c.validate(), Err(Error::Config(_))));
        let mut c = PipelineConfig::default();
        c.strip_views = 2;
        assert!(c.validate().is_err());
        let mut c = PipelineConfig::default();
        c.fps_points = c.sample_points + 1;
        assert!(c.validate().is_err());
    }

    #[test]
    fn rejects_unknown_fields() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("config.json");
        std::fs::write(&path, r#"{"confidence_threshold": 0.9, "typo_field": 1}"#).unwrap();
        assert!(PipelineConfig::load(&path).is_err());
    }
}
