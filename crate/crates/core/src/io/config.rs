//! Flat TOML configuration covering every tunable of the pipeline.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::eval::DEFAULT_IOU_THRESHOLD;
use crate::labelgen::{
    GaussianTemplate, DEFAULT_LINK_WIDTH_RATIO, DEFAULT_SIGMA_RATIO, DEFAULT_TEMPLATE_SIDE,
};
use crate::postproc::{
    gaussian_expand_ratio, PostprocConfig, Thresholds, DEFAULT_MERGE_GAP_RATIO,
    DEFAULT_MIN_COMPONENT_PX, DEFAULT_OUTER_EXTEND_RATIO, DEFAULT_TAU_A, DEFAULT_TAU_R,
};
use crate::weaksup::{
    SplitConfig, DEFAULT_CROP_HEIGHT, DEFAULT_MARKER_THRESHOLD, DEFAULT_REGION_FLOOR,
};

use super::{read_bytes, IoError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub template_side: usize,
    pub sigma_ratio: f64,
    pub link_width_ratio: f64,
    pub tau_r: f64,
    pub tau_a: f64,
    pub min_component_px: usize,
    pub box_expand_ratio: f64,
    pub outer_extend_ratio: f64,
    pub merge_gap_ratio: f64,
    pub marker_threshold: f32,
    pub region_floor: f32,
    pub crop_height: usize,
    pub iou_threshold: f64,
    /// Worker threads; 0 picks the number of CPUs.
    pub workers: usize,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            template_side: DEFAULT_TEMPLATE_SIDE,
            sigma_ratio: DEFAULT_SIGMA_RATIO,
            link_width_ratio: DEFAULT_LINK_WIDTH_RATIO,
            tau_r: DEFAULT_TAU_R,
            tau_a: DEFAULT_TAU_A,
            min_component_px: DEFAULT_MIN_COMPONENT_PX,
            box_expand_ratio: gaussian_expand_ratio(DEFAULT_SIGMA_RATIO, DEFAULT_TAU_R),
            outer_extend_ratio: DEFAULT_OUTER_EXTEND_RATIO,
            merge_gap_ratio: DEFAULT_MERGE_GAP_RATIO,
            marker_threshold: DEFAULT_MARKER_THRESHOLD,
            region_floor: DEFAULT_REGION_FLOOR,
            crop_height: DEFAULT_CROP_HEIGHT,
            iou_threshold: DEFAULT_IOU_THRESHOLD,
            workers: 0,
        }
    }
}

impl Config {
    /// Parses a TOML document; missing keys keep their defaults.
    pub fn from_toml(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    pub fn load(path: &Path) -> Result<Self, IoError> {
        let bytes = read_bytes(path)?;
        let text = String::from_utf8(bytes).map_err(|e| IoError::malformed(path, e.to_string()))?;
        Self::from_toml(&text).map_err(|m| IoError::malformed(path, m))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn template(&self) -> Result<GaussianTemplate> {
        GaussianTemplate::new(self.template_side, self.sigma_ratio)
    }

    pub fn postproc(&self) -> Result<PostprocConfig> {
        Ok(PostprocConfig {
            thresholds: Thresholds::new(self.tau_r, self.tau_a)?,
            min_component_px: self.min_component_px,
            box_expand_ratio: self.box_expand_ratio,
            outer_extend_ratio: self.outer_extend_ratio,
        })
    }

    pub fn split(&self) -> SplitConfig {
        SplitConfig {
            marker_threshold: self.marker_threshold,
            region_floor: self.region_floor,
            crop_height: self.crop_height,
        }
    }
}
