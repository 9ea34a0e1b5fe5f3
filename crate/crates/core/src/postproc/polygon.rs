//! Polygon generation for curved text.
//!
//! The component is scanned one pixel at a time along the major axis of its
//! minimum-area rectangle. Each scan column contributes its peak region
//! score; peaks of that profile along the scan direction mark character
//! centers and become the local maxima lines. The lines are set to a common
//! length, turned perpendicular to the center line through their centers,
//! and the two outermost lines are pushed outward along the center line.

use crate::error::{Error, Result};
use crate::geometry::{Point, TextPolygon};
use crate::scoremap::ScoreMap;

use super::{component_rect, PostprocConfig};

/// Component membership over the component's bounding box.
struct Mask {
    x0: usize,
    y0: usize,
    w: usize,
    h: usize,
    bits: Vec<bool>,
}

impl Mask {
    fn new(pixels: &[(usize, usize)]) -> Self {
        let x0 = pixels.iter().map(|p| p.0).min().unwrap_or(0);
        let y0 = pixels.iter().map(|p| p.1).min().unwrap_or(0);
        let x1 = pixels.iter().map(|p| p.0).max().unwrap_or(0);
        let y1 = pixels.iter().map(|p| p.1).max().unwrap_or(0);
        let (w, h) = (x1 - x0 + 1, y1 - y0 + 1);
        let mut bits = vec![false; w * h];
        for &(x, y) in pixels {
            bits[(y - y0) * w + (x - x0)] = true;
        }
        Self { x0, y0, w, h, bits }
    }

    fn contains(&self, p: Point) -> bool {
        let (fx, fy) = (p.x.floor(), p.y.floor());
        if fx < self.x0 as f64 || fy < self.y0 as f64 {
            return false;
        }
        let (x, y) = (fx as usize - self.x0, fy as usize - self.y0);
        x < self.w && y < self.h && self.bits[y * self.w + x]
    }
}

fn center_of(px: (usize, usize)) -> Point {
    Point::new(px.0 as f64 + 0.5, px.1 as f64 + 0.5)
}

/// Distance from `from` along `dir` to the last sample still inside the mask.
fn run_extent(mask: &Mask, from: Point, dir: Point, limit: f64) -> f64 {
    const STEP: f64 = 0.25;
    let mut last = 0.0;
    let mut s = STEP;
    while s <= limit {
        if !mask.contains(from + dir * s) {
            break;
        }
        last = s;
        s += STEP;
    }
    last
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Sub-pixel center of a character peak: score-weighted centroid of the
/// component pixels near `seed` that reach 80% of the peak score.
fn refine_peak(
    region: &ScoreMap,
    mask: &Mask,
    seed: (usize, usize),
    peak: f32,
    radius: f64,
) -> Point {
    let c = center_of(seed);
    let floor = 0.8 * peak as f64;
    let r = radius.ceil() as i64;
    let (mut sw, mut sx, mut sy) = (0.0, 0.0, 0.0);
    for dy in -r..=r {
        for dx in -r..=r {
            let x = seed.0 as i64 + dx;
            let y = seed.1 as i64 + dy;
            if x < 0 || y < 0 || x >= region.width() as i64 || y >= region.height() as i64 {
                continue;
            }
            let p = center_of((x as usize, y as usize));
            if p.distance(c) > radius || !mask.contains(p) {
                continue;
            }
            let w = region.get(x as usize, y as usize) as f64 - floor;
            if w > 0.0 {
                sw += w;
                sx += w * p.x;
                sy += w * p.y;
            }
        }
    }
    if sw > 0.0 {
        Point::new(sx / sw, sy / sw)
    } else {
        c
    }
}

/// Builds a text polygon for one connected component.
///
/// Fails with [`Error::TooFewMaxima`] when fewer than two local maxima
/// lines exist; callers fall back to the component's quad box.
pub fn polygon_from_region(
    region: &ScoreMap,
    pixels: &[(usize, usize)],
    cfg: &PostprocConfig,
) -> Result<TextPolygon> {
    if pixels.is_empty() {
        return Err(Error::DegenerateInput("empty component".into()));
    }
    if let Some(&(x, y)) = pixels
        .iter()
        .find(|&&(x, y)| x >= region.width() || y >= region.height())
    {
        return Err(Error::InvalidParameter(format!(
            "component pixel ({x}, {y}) outside the map"
        )));
    }
    let mask = Mask::new(pixels);
    let rect = component_rect(pixels)?;
    let c = rect.corners();
    let (e1, e2) = (c[1] - c[0], c[3] - c[0]);
    let major = if e1.norm() >= e2.norm() { e1 } else { e2 };
    let mut u = major.normalized().unwrap_or(Point::new(1.0, 0.0));
    if u.x < -1e-9 || (u.x.abs() <= 1e-9 && u.y < 0.0) {
        u = -u;
    }
    let thickness = e1.norm().min(e2.norm()) + 1.0;
    let origin = rect.center();

    // column profile: peak score per 1-px scan step along u
    let proj: Vec<f64> = pixels
        .iter()
        .map(|&p| (center_of(p) - origin).dot(u))
        .collect();
    let tmin = proj.iter().copied().fold(f64::INFINITY, f64::min);
    let tmax = proj.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let steps = (tmax - tmin).floor() as usize + 1;
    let mut profile: Vec<Option<(f32, usize)>> = vec![None; steps];
    for (i, (&px, &t)) in pixels.iter().zip(&proj).enumerate() {
        let k = ((t - tmin).floor() as usize).min(steps - 1);
        let s = region.get(px.0, px.1);
        if profile[k].is_none_or(|(best, _)| s > best) {
            profile[k] = Some((s, i));
        }
    }

    let window = ((0.3 * thickness).ceil() as usize).max(1);
    let tau = cfg.thresholds.tau_r() as f32;
    let value = |k: usize| profile[k].map_or(-1.0, |(s, _)| s);
    let mut peaks: Vec<usize> = Vec::new();
    for k in 0..steps {
        let v = value(k);
        if v <= tau {
            continue;
        }
        let before = k.saturating_sub(window)..k;
        let after = (k + 1)..(k + window + 1).min(steps);
        if before.into_iter().all(|j| value(j) < v) && after.into_iter().all(|j| value(j) <= v) {
            peaks.push(k);
        }
    }
    if peaks.len() < 2 {
        return Err(Error::TooFewMaxima(peaks.len()));
    }

    let radius = (0.35 * thickness).max(1.5);
    let mut centers: Vec<Point> = peaks
        .iter()
        .map(|&k| {
            let (s, i) = profile[k].expect("peak columns are populated");
            refine_peak(region, &mask, pixels[i], s, radius)
        })
        .collect();

    let n = centers.len();
    let tangents: Vec<Point> = (0..n)
        .map(|j| {
            let prev = centers[j.saturating_sub(1)];
            let next = centers[(j + 1).min(n - 1)];
            (next - prev).normalized().unwrap_or(u)
        })
        .collect();

    let limit = 2.0 * (e1.norm() + e2.norm()) + 2.0;
    let length = centers
        .iter()
        .zip(&tangents)
        .map(|(&c, t)| {
            let nrm = t.perp();
            run_extent(&mask, c, nrm, limit) + run_extent(&mask, c, -nrm, limit)
        })
        .fold(0.0, f64::max);
    let half = 0.5 * length.max(1.0);

    let mut gaps: Vec<f64> = centers.windows(2).map(|w| w[0].distance(w[1])).collect();
    let spacing = median(&mut gaps);
    centers[0] = centers[0] - tangents[0] * (cfg.outer_extend_ratio * spacing);
    centers[n - 1] = centers[n - 1] + tangents[n - 1] * (cfg.outer_extend_ratio * spacing);

    let top: Vec<Point> = centers
        .iter()
        .zip(&tangents)
        .map(|(&c, t)| c - t.perp() * half)
        .collect();
    let bottom: Vec<Point> = centers
        .iter()
        .zip(&tangents)
        .map(|(&c, t)| c + t.perp() * half)
        .collect();
    TextPolygon::from_edges(&top, &bottom)
}

/// Grows a polygon by `ratio * thickness` across and along its center line,
/// where thickness is the mean distance between paired control points.
pub fn expand_polygon(poly: &TextPolygon, ratio: f64) -> Result<TextPolygon> {
    let top = poly.top_edge();
    let bottom = poly.bottom_edge();
    let n = top.len();
    let thickness = top
        .iter()
        .zip(&bottom)
        .map(|(a, b)| a.distance(*b))
        .sum::<f64>()
        / n as f64;
    let margin = ratio.max(0.0) * thickness;
    let centers: Vec<Point> = top
        .iter()
        .zip(&bottom)
        .map(|(a, b)| a.midpoint(*b))
        .collect();
    let lead = (centers[0] - centers[1]).normalized().unwrap_or_default() * margin;
    let tail = (centers[n - 1] - centers[n - 2])
        .normalized()
        .unwrap_or_default()
        * margin;
    let mut new_top = Vec::with_capacity(n);
    let mut new_bottom = Vec::with_capacity(n);
    for j in 0..n {
        let shift = if j == 0 {
            lead
        } else if j == n - 1 {
            tail
        } else {
            Point::default()
        };
        let across = (top[j] - centers[j]).normalized().unwrap_or_default() * margin;
        new_top.push(top[j] + across + shift);
        new_bottom.push(bottom[j] - across + shift);
    }
    TextPolygon::from_edges(&new_top, &new_bottom)
}
