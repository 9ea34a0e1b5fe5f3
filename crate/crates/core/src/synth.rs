//! Random synthetic scenes with exact character geometry, for demos and
//! round-trip testing.

use rand::Rng;

use crate::error::Result;
use crate::geometry::{intersection_area, Point, QuadBox, TextPolygon};
use crate::io::{AnnotationFile, PolygonRecord, WordRecord};
use crate::labelgen::{render_affinity_map, render_region_map, GaussianTemplate};
use crate::postproc::grow_rect;
use crate::scoremap::ScoreMap;

const ALPHABET: &[u8] = b"ABCDEFGHJKLMNPQRSTUVWXYZabdefghkmnqrt0123456789";

#[derive(Debug, Clone, PartialEq)]
pub struct SceneParams {
    pub words: (usize, usize),
    pub chars_per_word: (usize, usize),
    pub char_height: (f64, f64),
    /// Character width as a fraction of its height.
    pub char_aspect: (f64, f64),
    /// Gap between characters as a fraction of the height.
    pub max_gap: f64,
    pub max_rotation_deg: f64,
    pub canvas: (usize, usize),
}

impl Default for SceneParams {
    fn default() -> Self {
        Self {
            words: (1, 8),
            chars_per_word: (1, 10),
            char_height: (14.0, 22.0),
            char_aspect: (0.7, 1.0),
            max_gap: 0.1,
            max_rotation_deg: 45.0,
            canvas: (512, 640),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthWord {
    pub text: String,
    pub quad: QuadBox,
    pub chars: Vec<QuadBox>,
    /// Set for curved words.
    pub polygon: Option<TextPolygon>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub width: usize,
    pub height: usize,
    pub words: Vec<SynthWord>,
}

fn random_text(rng: &mut impl Rng, n: usize) -> String {
    (0..n)
        .map(|_| ALPHABET[rng.gen_range(0..ALPHABET.len())] as char)
        .collect()
}

/// A straight word of `widths.len()` characters laid out at `angle` from
/// `origin` (its top-left corner).
pub fn straight_word(
    origin: Point,
    angle: f64,
    height: f64,
    widths: &[f64],
    gaps: &[f64],
    text: String,
) -> Result<SynthWord> {
    let u = Point::new(angle.cos(), angle.sin());
    let v = u.perp();
    let mut chars = Vec::with_capacity(widths.len());
    let mut x = 0.0;
    for (i, &w) in widths.iter().enumerate() {
        let a = origin + u * x;
        chars.push(QuadBox::new([
            a,
            a + u * w,
            a + u * w + v * height,
            a + v * height,
        ])?);
        x += w + gaps.get(i).copied().unwrap_or(0.0);
    }
    let total = x - gaps.get(widths.len() - 1).copied().unwrap_or(0.0);
    let quad = QuadBox::new([
        origin,
        origin + u * total,
        origin + u * total + v * height,
        origin + v * height,
    ])?;
    Ok(SynthWord {
        text,
        quad,
        chars,
        polygon: None,
    })
}

/// A word bent along the upper part of a circle around `center`; the
/// character centers sit at `radius`.
pub fn arc_word(
    center: Point,
    radius: f64,
    height: f64,
    widths: &[f64],
    gap: f64,
    text: String,
) -> Result<SynthWord> {
    let normal = |phi: f64| Point::new(phi.sin(), -phi.cos());
    let tangent = |phi: f64| Point::new(phi.cos(), phi.sin());
    let span: f64 = (widths.iter().sum::<f64>() + gap * (widths.len() as f64 - 1.0)) / radius;
    let mut phi = -0.5 * span;
    let mut bounds = vec![phi];
    let mut chars = Vec::with_capacity(widths.len());
    for &w in widths {
        let mid = phi + 0.5 * w / radius;
        let (t, n) = (tangent(mid), normal(mid));
        let m = center + n * radius;
        let hw = t * (0.5 * w);
        let hh = n * (0.5 * height);
        chars.push(QuadBox::new([
            m - hw + hh,
            m + hw + hh,
            m + hw - hh,
            m - hw - hh,
        ])?);
        phi += (w + gap) / radius;
        bounds.push(phi - gap / radius);
    }
    let top: Vec<Point> = bounds
        .iter()
        .map(|&p| center + normal(p) * (radius + 0.5 * height))
        .collect();
    let bottom: Vec<Point> = bounds
        .iter()
        .map(|&p| center + normal(p) * (radius - 0.5 * height))
        .collect();
    let polygon = TextPolygon::from_edges(&top, &bottom)?;
    let corners: Vec<Point> = chars.iter().flat_map(|c| c.corners().to_vec()).collect();
    let quad = crate::geometry::min_area_rect(&corners)?;
    Ok(SynthWord {
        text,
        quad,
        chars,
        polygon: Some(polygon),
    })
}

fn overlaps(a: &QuadBox, b: &QuadBox) -> bool {
    intersection_area(a.corners(), b.corners()) > 0.0
}

/// Draws a random scene. Words keep a clearance of one character height
/// from each other and from the canvas border.
pub fn random_scene(rng: &mut impl Rng, params: &SceneParams) -> Scene {
    let width = rng.gen_range(params.canvas.0..=params.canvas.1);
    let height = rng.gen_range(params.canvas.0..=params.canvas.1);
    let n_words = rng.gen_range(params.words.0..=params.words.1);
    let frame =
        QuadBox::axis_aligned(0.0, 0.0, width as f64, height as f64).expect("positive canvas");
    let mut words: Vec<SynthWord> = Vec::new();
    let mut keep_out: Vec<QuadBox> = Vec::new();
    for _ in 0..n_words {
        let n = rng.gen_range(params.chars_per_word.0..=params.chars_per_word.1);
        let h = rng.gen_range(params.char_height.0..=params.char_height.1);
        let widths: Vec<f64> = (0..n)
            .map(|_| h * rng.gen_range(params.char_aspect.0..=params.char_aspect.1))
            .collect();
        let gaps: Vec<f64> = (0..n.saturating_sub(1))
            .map(|_| h * rng.gen_range(0.0..=params.max_gap))
            .collect();
        let text = random_text(rng, n);
        for _ in 0..200 {
            let r = params.max_rotation_deg.to_radians();
            let angle = if r > 0.0 { rng.gen_range(-r..r) } else { 0.0 };
            let origin = Point::new(
                rng.gen_range(0.0..width as f64),
                rng.gen_range(0.0..height as f64),
            );
            let Ok(word) = straight_word(origin, angle, h, &widths, &gaps, text.clone()) else {
                continue;
            };
            let inside = word.quad.corners().iter().all(|&p| {
                let (x0, y0, x1, y1) = frame.bounds();
                p.x >= x0 + h && p.y >= y0 + h && p.x <= x1 - h && p.y <= y1 - h
            });
            if !inside {
                continue;
            }
            let padded = grow_rect(&word.quad, 0.5 * h);
            if keep_out.iter().any(|k| overlaps(k, &padded)) {
                continue;
            }
            keep_out.push(padded);
            words.push(word);
            break;
        }
    }
    Scene {
        width,
        height,
        words,
    }
}

/// A scene holding a single curved word.
pub fn random_arc_scene(rng: &mut impl Rng) -> Scene {
    let (width, height) = (320usize, 240usize);
    let n = rng.gen_range(5..=8);
    let h = rng.gen_range(18.0..22.0);
    let widths: Vec<f64> = (0..n).map(|_| h * rng.gen_range(0.75..0.95)).collect();
    let radius = rng.gen_range(90.0..130.0);
    let center = Point::new(width as f64 / 2.0, 60.0 + radius);
    let text = random_text(rng, n);
    let word = arc_word(center, radius, h, &widths, 0.05 * h, text).expect("arc word is valid");
    Scene {
        width,
        height,
        words: vec![word],
    }
}

impl Scene {
    pub fn char_boxes(&self) -> Vec<Vec<QuadBox>> {
        self.words.iter().map(|w| w.chars.clone()).collect()
    }

    /// Ground-truth region and affinity maps.
    pub fn render(&self, template: &GaussianTemplate) -> Result<(ScoreMap, ScoreMap)> {
        let per_word = self.char_boxes();
        let flat: Vec<QuadBox> = per_word.iter().flatten().copied().collect();
        let region = render_region_map(&flat, template, self.width, self.height)?.map;
        let affinity = render_affinity_map(&per_word, template, self.width, self.height)?.map;
        Ok((region, affinity))
    }

    /// Annotation with character boxes: straight words as quad records,
    /// curved words as polygon records.
    pub fn annotation(&self) -> AnnotationFile {
        let mut a = AnnotationFile::new(self.width, self.height);
        for w in &self.words {
            let chars = Some(w.chars.iter().map(|c| c.to_flat().to_vec()).collect());
            match &w.polygon {
                Some(p) => a.polygons.push(PolygonRecord {
                    points: p.points().iter().flat_map(|q| [q.x, q.y]).collect(),
                    transcription: Some(w.text.clone()),
                    dont_care: false,
                    chars,
                }),
                None => a.words.push(WordRecord {
                    quad: w.quad.to_flat().to_vec(),
                    transcription: Some(w.text.clone()),
                    dont_care: false,
                    chars,
                }),
            }
        }
        a
    }
}
