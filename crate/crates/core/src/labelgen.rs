//! Region, affinity and link ground-truth rendering.
//!
//! Character boxes are filled by warping one isotropic Gaussian template
//! into each box with a perspective map; affinity boxes join consecutive
//! characters of a word. Overlapping contributions are combined with a
//! per-pixel maximum so every map stays in `[0, 1]`.

use crate::error::{Error, Result};
use crate::geometry::{PerspectiveMap, Point, QuadBox, TextPolygon};
use crate::scoremap::ScoreMap;

pub const DEFAULT_TEMPLATE_SIDE: usize = 512;
pub const DEFAULT_SIGMA_RATIO: f64 = 0.25;
pub const DEFAULT_LINK_WIDTH_RATIO: f64 = 0.5;

/// Warped values below this are written as 0.
pub const SPARSE_FLOOR: f32 = 1e-4;

/// Square isotropic Gaussian with its peak (exactly 1) at pixel
/// `(side / 2, side / 2)`.
#[derive(Debug, Clone)]
pub struct GaussianTemplate {
    side: usize,
    sigma: f64,
    map: ScoreMap,
}

impl GaussianTemplate {
    pub fn new(side: usize, sigma_ratio: f64) -> Result<Self> {
        if side == 0 {
            return Err(Error::InvalidParameter(
                "template side must be positive".into(),
            ));
        }
        if !(sigma_ratio > 0.0 && sigma_ratio <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "sigma ratio must be in (0, 1], got {sigma_ratio}"
            )));
        }
        let sigma = sigma_ratio * side as f64;
        let c = (side / 2) as f64;
        let denom = 2.0 * sigma * sigma;
        let map = ScoreMap::from_fn(side, side, |x, y| {
            let dx = x as f64 - c;
            let dy = y as f64 - c;
            (-(dx * dx + dy * dy) / denom).exp() as f32
        })?;
        Ok(Self { side, sigma, map })
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn map(&self) -> &ScoreMap {
        &self.map
    }

    /// Template square in its own continuous coordinates.
    pub fn footprint(&self) -> [Point; 4] {
        let s = self.side as f64;
        [
            Point::new(0.0, 0.0),
            Point::new(s, 0.0),
            Point::new(s, s),
            Point::new(0.0, s),
        ]
    }
}

impl Default for GaussianTemplate {
    fn default() -> Self {
        Self::new(DEFAULT_TEMPLATE_SIDE, DEFAULT_SIGMA_RATIO)
            .expect("default template parameters are valid")
    }
}

pub fn make_gaussian_template(side: usize, sigma_ratio: f64) -> Result<GaussianTemplate> {
    GaussianTemplate::new(side, sigma_ratio)
}

fn diagonal_intersection(q: &QuadBox) -> Result<Point> {
    let (tl, tr, br, bl) = (
        q.top_left(),
        q.top_right(),
        q.bottom_right(),
        q.bottom_left(),
    );
    let d1 = br - tl;
    let d2 = bl - tr;
    let denom = d1.cross(d2);
    if denom.abs() <= 1e-12 * d1.norm().max(1.0) * d2.norm().max(1.0) {
        return Err(Error::DegenerateQuad("parallel diagonals".into()));
    }
    let s = (tr - tl).cross(d2) / denom;
    Ok(tl + d1 * s)
}

/// Centroids of the upper `(TL, TR, X)` and lower `(BL, BR, X)` triangles
/// cut by the diagonals, `X` being the diagonal intersection.
fn triangle_centroids(q: &QuadBox) -> Result<(Point, Point)> {
    let scale = q.width().max(q.height()).max(1.0);
    if q.area() <= 1e-9 * scale * scale {
        return Err(Error::DegenerateQuad(
            "character box has near-zero area".into(),
        ));
    }
    let x = diagonal_intersection(q)?;
    let upper = (q.top_left() + q.top_right() + x) / 3.0;
    let lower = (q.bottom_left() + q.bottom_right() + x) / 3.0;
    Ok((upper, lower))
}

/// Affinity box between two adjacent characters of one word.
pub fn affinity_box(a: &QuadBox, b: &QuadBox) -> Result<QuadBox> {
    let (ua, la) = triangle_centroids(a)?;
    let (ub, lb) = triangle_centroids(b)?;
    QuadBox::new([ua, ub, lb, la])
}

/// Affinity boxes for each consecutive pair of characters in one word.
pub fn affinity_boxes(chars: &[QuadBox]) -> Result<Vec<QuadBox>> {
    chars
        .windows(2)
        .map(|w| affinity_box(&w[0], &w[1]))
        .collect()
}

/// A rendered map plus the number of boxes skipped as degenerate.
#[derive(Debug, Clone)]
pub struct RenderedMap {
    pub map: ScoreMap,
    pub skipped: usize,
}

/// Warps the template into every box and max-combines the results.
pub fn render_score_map(
    boxes: &[QuadBox],
    template: &GaussianTemplate,
    width: usize,
    height: usize,
) -> Result<RenderedMap> {
    let mut map = ScoreMap::new(width, height)?;
    let mut skipped = 0;
    for quad in boxes {
        if warp_template(&mut map, quad, template).is_err() {
            skipped += 1;
        }
    }
    Ok(RenderedMap { map, skipped })
}

/// Inclusive pixel index range whose centers fall in `[lo, hi]`, clipped to `[0, n)`.
pub(crate) fn pixel_span(lo: f64, hi: f64, n: usize) -> Option<(usize, usize)> {
    let first = (lo - 0.5 - 1e-9).ceil().max(0.0);
    let last = (hi - 0.5 + 1e-9).floor().min(n as f64 - 1.0);
    (first <= last).then_some((first as usize, last as usize))
}

fn warp_template(canvas: &mut ScoreMap, quad: &QuadBox, template: &GaussianTemplate) -> Result<()> {
    let to_template = PerspectiveMap::solve(quad.corners(), &template.footprint())?;
    let (x0, y0, x1, y1) = quad.bounds();
    let Some((i0, i1)) = pixel_span(x0, x1, canvas.width()) else {
        return Ok(());
    };
    let Some((j0, j1)) = pixel_span(y0, y1, canvas.height()) else {
        return Ok(());
    };
    let side = template.side() as f64;
    let eps = 1e-9 * side;
    for j in j0..=j1 {
        for i in i0..=i1 {
            let Some(t) = to_template.map_point(Point::new(i as f64 + 0.5, j as f64 + 0.5)) else {
                continue;
            };
            if t.x < -eps || t.y < -eps || t.x > side + eps || t.y > side + eps {
                continue;
            }
            let v = template
                .map()
                .sample_bilinear(t.x.clamp(0.0, side), t.y.clamp(0.0, side));
            if v >= SPARSE_FLOOR {
                canvas.max_assign(i, j, v);
            }
        }
    }
    Ok(())
}

/// Region map for a set of character boxes.
pub fn render_region_map(
    chars: &[QuadBox],
    template: &GaussianTemplate,
    width: usize,
    height: usize,
) -> Result<RenderedMap> {
    render_score_map(chars, template, width, height)
}

/// Affinity map for a set of words, each given as its characters in
/// reading order. No affinity is generated across word boundaries.
pub fn render_affinity_map(
    words: &[Vec<QuadBox>],
    template: &GaussianTemplate,
    width: usize,
    height: usize,
) -> Result<RenderedMap> {
    let mut boxes = Vec::new();
    let mut skipped = 0;
    for chars in words {
        for pair in chars.windows(2) {
            match affinity_box(&pair[0], &pair[1]) {
                Ok(b) => boxes.push(b),
                Err(_) => skipped += 1,
            }
        }
    }
    let mut rendered = render_score_map(&boxes, template, width, height)?;
    rendered.skipped += skipped;
    Ok(rendered)
}

/// Link ground truth: binary strokes joining the centers of paired control
/// points, each stroke as thick as `link_width_ratio` times the local pair
/// distance.
pub fn render_link_gt(
    polygons: &[TextPolygon],
    width: usize,
    height: usize,
    link_width_ratio: f64,
) -> Result<ScoreMap> {
    if !(link_width_ratio > 0.0 && link_width_ratio.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "link width ratio must be positive, got {link_width_ratio}"
        )));
    }
    let mut map = ScoreMap::new(width, height)?;
    for poly in polygons {
        let top = poly.top_edge();
        let bottom = poly.bottom_edge();
        let centers: Vec<Point> = top
            .iter()
            .zip(&bottom)
            .map(|(a, b)| a.midpoint(*b))
            .collect();
        let widths: Vec<f64> = top
            .iter()
            .zip(&bottom)
            .map(|(a, b)| link_width_ratio * a.distance(*b))
            .collect();
        for k in 0..centers.len() - 1 {
            draw_tapered_segment(
                &mut map,
                centers[k],
                centers[k + 1],
                widths[k],
                widths[k + 1],
            );
        }
        for k in 1..centers.len() - 1 {
            draw_disk(&mut map, centers[k], 0.5 * widths[k]);
        }
    }
    Ok(map)
}

/// Flat-capped stroke whose width varies linearly from `w0` to `w1`.
fn draw_tapered_segment(map: &mut ScoreMap, a: Point, b: Point, w0: f64, w1: f64) {
    let d = b - a;
    let len = d.norm();
    if len == 0.0 {
        return;
    }
    let pad = 0.5 * w0.max(w1);
    let Some((i0, i1)) = pixel_span(a.x.min(b.x) - pad, a.x.max(b.x) + pad, map.width()) else {
        return;
    };
    let Some((j0, j1)) = pixel_span(a.y.min(b.y) - pad, a.y.max(b.y) + pad, map.height()) else {
        return;
    };
    let len2 = len * len;
    for j in j0..=j1 {
        for i in i0..=i1 {
            let p = Point::new(i as f64 + 0.5, j as f64 + 0.5) - a;
            let s = p.dot(d) / len2;
            if !(0.0..=1.0).contains(&s) {
                continue;
            }
            let half = 0.5 * (w0 + (w1 - w0) * s);
            if d.cross(p).abs() / len <= half {
                map.set(i, j, 1.0);
            }
        }
    }
}

fn draw_disk(map: &mut ScoreMap, c: Point, r: f64) {
    let Some((i0, i1)) = pixel_span(c.x - r, c.x + r, map.width()) else {
        return;
    };
    let Some((j0, j1)) = pixel_span(c.y - r, c.y + r, map.height()) else {
        return;
    };
    for j in j0..=j1 {
        for i in i0..=i1 {
            if Point::new(i as f64 + 0.5, j as f64 + 0.5).distance(c) <= r {
                map.set(i, j, 1.0);
            }
        }
    }
}
