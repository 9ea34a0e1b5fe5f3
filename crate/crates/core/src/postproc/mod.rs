//! Turns predicted region/affinity score maps into word detections.
//!
//! The quad path is binarize, label 8-connected components, fit one
//! minimum-area rectangle per component. There is no suppression step, so
//! the number of boxes always equals the number of retained components.

mod ccl;
mod merge;
mod polygon;
mod rectify;

pub use ccl::{binarize, connected_components, BinaryMap, LabeledComponents};
pub use merge::merge_line_boxes;
pub use polygon::{expand_polygon, polygon_from_region};
pub use rectify::{rectify_polygon, Rectified};

use crate::error::{Error, Result};
use crate::geometry::{min_area_rect, Point, QuadBox, TextPolygon};
use crate::labelgen::DEFAULT_SIGMA_RATIO;
use crate::scoremap::ScoreMap;

pub const DEFAULT_TAU_R: f64 = 0.4;
pub const DEFAULT_TAU_A: f64 = 0.4;
pub const DEFAULT_MIN_COMPONENT_PX: usize = 10;
pub const DEFAULT_OUTER_EXTEND_RATIO: f64 = 0.5;
pub const DEFAULT_MERGE_GAP_RATIO: f64 = 1.0;

/// Region and affinity thresholds, each strictly inside `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    tau_r: f64,
    tau_a: f64,
}

impl Thresholds {
    pub fn new(tau_r: f64, tau_a: f64) -> Result<Self> {
        for (name, v) in [("tau_r", tau_r), ("tau_a", tau_a)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be in (0, 1), got {v}"
                )));
            }
        }
        Ok(Self { tau_r, tau_a })
    }

    pub fn tau_r(&self) -> f64 {
        self.tau_r
    }

    pub fn tau_a(&self) -> f64 {
        self.tau_a
    }
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            tau_r: DEFAULT_TAU_R,
            tau_a: DEFAULT_TAU_A,
        }
    }
}

/// Outward margin, as a fraction of a box's short side, that grows the
/// `tau`-level set of a warped Gaussian back to the full character box.
///
/// A template with `sigma = sigma_ratio * side` crosses `tau` at
/// `k = 2 * sigma_ratio * sqrt(2 ln(1 / tau))` of the half-side, so the
/// thresholded blob is the box scaled by `k` and needs `(1/k - 1) / 2` of its
/// short side on every edge.
pub fn gaussian_expand_ratio(sigma_ratio: f64, tau: f64) -> f64 {
    if !(tau > 0.0 && tau < 1.0) || sigma_ratio <= 0.0 {
        return 0.0;
    }
    let k = 2.0 * sigma_ratio * (2.0 * (1.0 / tau).ln()).sqrt();
    if k >= 1.0 {
        0.0
    } else {
        0.5 * (1.0 / k - 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PostprocConfig {
    pub thresholds: Thresholds,
    /// Components with fewer pixels are dropped.
    pub min_component_px: usize,
    /// Outward margin applied to each fitted rectangle, relative to its short side.
    pub box_expand_ratio: f64,
    /// How far the outermost polygon lines move outward, relative to the
    /// median spacing between lines.
    pub outer_extend_ratio: f64,
}

impl Default for PostprocConfig {
    fn default() -> Self {
        Self {
            thresholds: Thresholds::default(),
            min_component_px: DEFAULT_MIN_COMPONENT_PX,
            box_expand_ratio: gaussian_expand_ratio(DEFAULT_SIGMA_RATIO, DEFAULT_TAU_R),
            outer_extend_ratio: DEFAULT_OUTER_EXTEND_RATIO,
        }
    }
}

/// Minimum-area rectangle over the pixel centers of a component. Only the
/// leftmost and rightmost pixel of each row can lie on the hull.
pub fn component_rect(pixels: &[(usize, usize)]) -> Result<QuadBox> {
    let mut extremes: Vec<Point> = Vec::new();
    let mut rows: std::collections::BTreeMap<usize, (usize, usize)> =
        std::collections::BTreeMap::new();
    for &(x, y) in pixels {
        rows.entry(y)
            .and_modify(|(lo, hi)| {
                *lo = (*lo).min(x);
                *hi = (*hi).max(x);
            })
            .or_insert((x, x));
    }
    for (y, (lo, hi)) in rows {
        extremes.push(Point::new(lo as f64 + 0.5, y as f64 + 0.5));
        if hi != lo {
            extremes.push(Point::new(hi as f64 + 0.5, y as f64 + 0.5));
        }
    }
    min_area_rect(&extremes)
}

/// Grows a rectangle outward by `margin` pixels on every edge.
pub fn grow_rect(rect: &QuadBox, margin: f64) -> QuadBox {
    let c = rect.corners();
    let center = rect.center();
    let e1 = c[1] - c[0];
    let e2 = c[3] - c[0];
    let u = e1
        .normalized()
        .or_else(|| e2.normalized().map(|v| -v.perp()))
        .unwrap_or(Point::new(1.0, 0.0));
    let v = e2.normalized().unwrap_or_else(|| u.perp());
    let a = 0.5 * e1.norm() + margin;
    let b = 0.5 * e2.norm() + margin;
    QuadBox::canonical([
        center - u * a - v * b,
        center + u * a - v * b,
        center + u * a + v * b,
        center - u * a + v * b,
    ])
}

/// Grows a rectangle outward by `ratio * short side` on every edge.
///
/// Rectangles thinner than one pixel are padded to cover their pixels.
pub fn expand_rect(rect: &QuadBox, ratio: f64) -> QuadBox {
    let c = rect.corners();
    let short = c[0].distance(c[1]).min(c[0].distance(c[3]));
    let mut margin = ratio.max(0.0) * short;
    if short < 1.0 {
        margin = margin.max(0.5);
    }
    grow_rect(rect, margin)
}

/// Connected components of the binarized maps that pass the size filter.
pub fn retained_components(
    region: &ScoreMap,
    affinity: &ScoreMap,
    cfg: &PostprocConfig,
) -> Result<Vec<Vec<(usize, usize)>>> {
    let m = binarize(region, affinity, &cfg.thresholds)?;
    let labels = connected_components(&m);
    Ok(labels
        .iter()
        .filter(|(_, px)| px.len() >= cfg.min_component_px)
        .map(|(_, px)| px.to_vec())
        .collect())
}

/// One expanded minimum-area rectangle per retained component.
pub fn quad_boxes(
    region: &ScoreMap,
    affinity: &ScoreMap,
    cfg: &PostprocConfig,
) -> Result<Vec<QuadBox>> {
    retained_components(region, affinity, cfg)?
        .iter()
        .map(|px| component_rect(px).map(|r| expand_rect(&r, cfg.box_expand_ratio)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DetectMode {
    #[default]
    Quad,
    Poly,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Detection {
    Quad(QuadBox),
    Polygon(TextPolygon),
}

impl Detection {
    pub fn points(&self) -> Vec<Point> {
        match self {
            Detection::Quad(q) => q.corners().to_vec(),
            Detection::Polygon(p) => p.points().to_vec(),
        }
    }
}

/// Full detection pass. In polygon mode, components that cannot produce a
/// polygon (single characters, degenerate shapes) are emitted as quads.
/// Polygons follow the thresholded component and are not grown; see
/// [`expand_polygon`] for that. Polygons come first, then quads, each in
/// component order. `merge_gap_ratio` enables line merging of quad
/// detections.
pub fn detect(
    region: &ScoreMap,
    affinity: &ScoreMap,
    mode: DetectMode,
    merge_gap_ratio: Option<f64>,
    cfg: &PostprocConfig,
) -> Result<Vec<Detection>> {
    let components = retained_components(region, affinity, cfg)?;
    let mut quads = Vec::new();
    let mut out = Vec::new();
    for px in &components {
        let rect = expand_rect(&component_rect(px)?, cfg.box_expand_ratio);
        if mode == DetectMode::Poly {
            if let Ok(poly) = polygon_from_region(region, px, cfg) {
                out.push(Detection::Polygon(poly));
                continue;
            }
        }
        quads.push(rect);
    }
    if let Some(gap) = merge_gap_ratio {
        quads = merge_line_boxes(&quads, gap);
    }
    out.extend(quads.into_iter().map(Detection::Quad));
    Ok(out)
}
