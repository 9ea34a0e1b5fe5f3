//! Character-level pseudo ground truth from word-level annotations.
//!
//! A word is rectified to a fixed-height crop, the predicted region score on
//! that crop is split into characters with a marker-based watershed, and the
//! character boxes are mapped back into the image. The agreement between the
//! detected character count and the transcription length gives the word's
//! confidence, which weights the training loss per pixel.

mod watershed;

pub use watershed::marker_watershed;

use crate::error::{Error, Result};
use crate::geometry::{PerspectiveMap, Point, QuadBox};
use crate::labelgen::{pixel_span, render_affinity_map, render_region_map, GaussianTemplate};
use crate::postproc::{component_rect, connected_components, grow_rect, BinaryMap};
use crate::scoremap::ScoreMap;

pub const DEFAULT_MARKER_THRESHOLD: f32 = 0.6;
pub const DEFAULT_REGION_FLOOR: f32 = 0.2;
pub const DEFAULT_CROP_HEIGHT: usize = 64;

/// Splits below this confidence are replaced by the equal-width split.
pub const FALLBACK_BELOW: f64 = 0.5;
/// Confidence assigned to equal-width splits.
pub const FALLBACK_CONFIDENCE: f64 = 0.5;

/// A word-level annotation.
#[derive(Debug, Clone, PartialEq)]
pub struct WordAnnotation {
    pub quad: QuadBox,
    pub transcription: Option<String>,
    pub dont_care: bool,
}

impl WordAnnotation {
    pub fn new(quad: QuadBox, transcription: Option<String>, dont_care: bool) -> Self {
        Self {
            quad,
            transcription,
            dont_care,
        }
    }

    /// Character count of the transcription, whitespace excluded.
    pub fn length(&self) -> Option<usize> {
        self.transcription
            .as_ref()
            .map(|t| t.chars().filter(|c| !c.is_whitespace()).count())
    }

    fn required_length(&self) -> Result<usize> {
        let l = self.length().ok_or(Error::MissingTranscription)?;
        if l == 0 {
            return Err(Error::InvalidLength(0));
        }
        Ok(l)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CharSplitResult {
    /// Character boxes in image coordinates. Watershed splits are sorted
    /// left to right in the rectified crop; no alignment with the
    /// transcription is implied.
    pub char_boxes: Vec<QuadBox>,
    pub detected_count: usize,
    pub confidence: f64,
}

impl CharSplitResult {
    fn empty(confidence: f64) -> Self {
        Self {
            char_boxes: Vec::new(),
            detected_count: 0,
            confidence,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitConfig {
    /// Connected regions at or above this score seed the watershed.
    pub marker_threshold: f32,
    /// Pixels below this score never join a basin.
    pub region_floor: f32,
    /// Height of the rectified word crop.
    pub crop_height: usize,
}

impl Default for SplitConfig {
    fn default() -> Self {
        Self {
            marker_threshold: DEFAULT_MARKER_THRESHOLD,
            region_floor: DEFAULT_REGION_FLOOR,
            crop_height: DEFAULT_CROP_HEIGHT,
        }
    }
}

/// `(l - min(l, |l - l_c|)) / l`.
pub fn confidence_score(l: usize, l_c: usize) -> Result<f64> {
    if l < 1 {
        return Err(Error::InvalidLength(l));
    }
    let diff = l.abs_diff(l_c);
    Ok((l - l.min(diff)) as f64 / l as f64)
}

/// Corners of a `width x height` crop in crop coordinates.
pub fn crop_frame(width: usize, height: usize) -> [Point; 4] {
    let (w, h) = (width as f64, height as f64);
    [
        Point::new(0.0, 0.0),
        Point::new(w, 0.0),
        Point::new(w, h),
        Point::new(0.0, h),
    ]
}

/// Geometry of a rectified word crop.
#[derive(Debug, Clone, Copy)]
pub struct WordRectification {
    pub width: usize,
    pub height: usize,
    /// Image coordinates to crop coordinates.
    pub to_crop: PerspectiveMap,
    /// Crop coordinates to image coordinates.
    pub to_image: PerspectiveMap,
}

/// Perspective rectification of a word quad to a `crop_height`-tall
/// rectangle whose width keeps the quad's aspect ratio.
pub fn rectify_word(quad: &QuadBox, crop_height: usize) -> Result<WordRectification> {
    if crop_height == 0 {
        return Err(Error::InvalidParameter(
            "crop height must be positive".into(),
        ));
    }
    let aspect = quad.width() / quad.height();
    let width = ((crop_height as f64 * aspect).round() as usize).max(1);
    let frame = crop_frame(width, crop_height);
    let to_image = PerspectiveMap::solve(&frame, quad.corners())?;
    Ok(WordRectification {
        width,
        height: crop_height,
        to_crop: to_image.inverse()?,
        to_image,
    })
}

/// Samples `map` over the rectified word quad.
pub fn crop_word(map: &ScoreMap, quad: &QuadBox, crop_height: usize) -> Result<ScoreMap> {
    let r = rectify_word(quad, crop_height)?;
    let mut out = ScoreMap::new(r.width, r.height)?;
    for y in 0..r.height {
        for x in 0..r.width {
            let p = r
                .to_image
                .apply(Point::new(x as f64 + 0.5, y as f64 + 0.5))?;
            out.set(x, y, map.sample_bilinear(p.x, p.y));
        }
    }
    Ok(out)
}

/// Splits a rectified word crop into characters by watershed.
///
/// An all-background crop (nothing above the floor, or no marker) yields no
/// boxes and confidence 0.
pub fn split_characters(
    crop: &ScoreMap,
    word: &WordAnnotation,
    cfg: &SplitConfig,
) -> Result<CharSplitResult> {
    let l = word.required_length()?;
    let (w, h) = crop.dims();
    let markers = connected_components(&BinaryMap::from_fn(w, h, |x, y| {
        let s = crop.get(x, y);
        s >= cfg.marker_threshold && s >= cfg.region_floor
    }));
    if markers.count() == 0 {
        return Ok(CharSplitResult::empty(confidence_score(l, 0)?));
    }
    let labels = marker_watershed(crop, &markers, cfg.region_floor);

    let mut basins: Vec<Vec<(usize, usize)>> = vec![Vec::new(); markers.count()];
    for y in 0..h {
        for x in 0..w {
            let label = labels[y * w + x];
            if label != 0 {
                basins[label as usize - 1].push((x, y));
            }
        }
    }

    let to_image = PerspectiveMap::solve(&crop_frame(w, h), word.quad.corners())?;
    let mut boxes: Vec<(f64, QuadBox)> = Vec::with_capacity(basins.len());
    for basin in &basins {
        // pixel-center rectangle grown to the pixel edges
        let rect = grow_rect(&component_rect(basin)?, 0.5);
        let key = rect.center().x;
        let mut corners = [Point::default(); 4];
        for (dst, src) in corners.iter_mut().zip(rect.corners()) {
            *dst = to_image.apply(*src)?;
        }
        boxes.push((key, QuadBox::new(corners)?));
    }
    boxes.sort_by(|a, b| a.0.total_cmp(&b.0));

    let detected_count = boxes.len();
    Ok(CharSplitResult {
        char_boxes: boxes.into_iter().map(|(_, b)| b).collect(),
        detected_count,
        confidence: confidence_score(l, detected_count)?,
    })
}

/// `(a * (n - i) + b * i) / n`, exact at both ends.
fn edge_point(a: Point, b: Point, i: usize, n: usize) -> Point {
    if i == 0 {
        a
    } else if i == n {
        b
    } else {
        let (wa, wb, n) = ((n - i) as f64, i as f64, n as f64);
        Point::new((a.x * wa + b.x * wb) / n, (a.y * wa + b.y * wb) / n)
    }
}

/// Equal-width split along the top and bottom edges, confidence 0.5.
pub fn fallback_split(word: &WordAnnotation) -> Result<CharSplitResult> {
    let l = word.required_length()?;
    let q = &word.quad;
    let (tl, tr, br, bl) = (
        q.top_left(),
        q.top_right(),
        q.bottom_right(),
        q.bottom_left(),
    );
    let char_boxes = (0..l)
        .map(|i| {
            QuadBox::new([
                edge_point(tl, tr, i, l),
                edge_point(tl, tr, i + 1, l),
                edge_point(bl, br, i + 1, l),
                edge_point(bl, br, i, l),
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CharSplitResult {
        char_boxes,
        detected_count: l,
        confidence: FALLBACK_CONFIDENCE,
    })
}

/// Outcome of pseudo-labelling one word.
#[derive(Debug, Clone, PartialEq)]
pub struct PseudoLabel {
    pub chars: CharSplitResult,
    /// Transcription length `l(w)`; 0 for don't-care words without text.
    pub word_length: usize,
    /// Characters found by the watershed before any fallback.
    pub split_count: usize,
    pub fallback: bool,
}

/// Watershed split with the low-confidence fallback; don't-care words get
/// no boxes and confidence 0.
pub fn pseudo_gt_for_word(
    crop: &ScoreMap,
    word: &WordAnnotation,
    cfg: &SplitConfig,
) -> Result<PseudoLabel> {
    if word.dont_care {
        return Ok(PseudoLabel {
            chars: CharSplitResult::empty(0.0),
            word_length: word.length().unwrap_or(0),
            split_count: 0,
            fallback: false,
        });
    }
    let split = split_characters(crop, word, cfg)?;
    let word_length = word.required_length()?;
    let split_count = split.detected_count;
    if split.confidence < FALLBACK_BELOW {
        return Ok(PseudoLabel {
            chars: fallback_split(word)?,
            word_length,
            split_count,
            fallback: true,
        });
    }
    Ok(PseudoLabel {
        chars: split,
        word_length,
        split_count,
        fallback: false,
    })
}

/// Per-pixel confidence: a word's confidence inside its quad, 1 elsewhere,
/// and the minimum where words overlap. Confidences are clamped into `[0, 1]`.
pub fn build_confidence_map(
    words: &[(QuadBox, f64)],
    width: usize,
    height: usize,
) -> Result<ScoreMap> {
    let mut map = ScoreMap::filled(width, height, 1.0)?;
    for (quad, conf) in words {
        let (x0, y0, x1, y1) = quad.bounds();
        let (Some((i0, i1)), Some((j0, j1))) =
            (pixel_span(x0, x1, width), pixel_span(y0, y1, height))
        else {
            continue;
        };
        for j in j0..=j1 {
            for i in i0..=i1 {
                if quad.contains(Point::new(i as f64 + 0.5, j as f64 + 0.5)) {
                    map.min_assign(i, j, *conf as f32);
                }
            }
        }
    }
    Ok(map)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Loss {
    /// Sum over all pixels.
    pub sum: f64,
    /// `sum / (width * height)`.
    pub mean: f64,
}

/// Confidence-weighted squared error over region and affinity maps.
pub fn weighted_loss(
    pred_region: &ScoreMap,
    pred_affinity: &ScoreMap,
    gt_region: &ScoreMap,
    gt_affinity: &ScoreMap,
    confidence: &ScoreMap,
) -> Result<Loss> {
    for other in [pred_affinity, gt_region, gt_affinity, confidence] {
        pred_region.ensure_same_dims(other)?;
    }
    let sum: f64 = pred_region
        .values()
        .iter()
        .zip(pred_affinity.values())
        .zip(gt_region.values())
        .zip(gt_affinity.values())
        .zip(confidence.values())
        .map(|((((&r, &a), &rs), &as_), &c)| {
            let dr = r as f64 - rs as f64;
            let da = a as f64 - as_ as f64;
            c as f64 * (dr * dr + da * da)
        })
        .sum();
    let n = pred_region.values().len() as f64;
    Ok(Loss { sum, mean: sum / n })
}

/// Pseudo ground truth for one image.
#[derive(Debug, Clone)]
pub struct PseudoGtImage {
    pub region: ScoreMap,
    pub affinity: ScoreMap,
    pub confidence: ScoreMap,
    pub labels: Vec<PseudoLabel>,
}

/// Pseudo-labels every word of an image from a predicted region map and
/// renders the resulting region, affinity and confidence maps.
pub fn pseudo_gt_for_image(
    words: &[WordAnnotation],
    predicted_region: &ScoreMap,
    template: &GaussianTemplate,
    cfg: &SplitConfig,
) -> Result<PseudoGtImage> {
    let (w, h) = predicted_region.dims();
    let labels = words
        .iter()
        .map(|word| {
            if word.dont_care {
                return pseudo_gt_for_word(predicted_region, word, cfg);
            }
            let crop = crop_word(predicted_region, &word.quad, cfg.crop_height)?;
            pseudo_gt_for_word(&crop, word, cfg)
        })
        .collect::<Result<Vec<_>>>()?;

    let per_word: Vec<Vec<QuadBox>> = labels.iter().map(|l| l.chars.char_boxes.clone()).collect();
    let all_chars: Vec<QuadBox> = per_word.iter().flatten().copied().collect();
    let region = render_region_map(&all_chars, template, w, h)?.map;
    let affinity = render_affinity_map(&per_word, template, w, h)?.map;
    let weights: Vec<(QuadBox, f64)> = words
        .iter()
        .zip(&labels)
        .map(|(word, label)| (word.quad, label.chars.confidence))
        .collect();
    let confidence = build_confidence_map(&weights, w, h)?;
    Ok(PseudoGtImage {
        region,
        affinity,
        confidence,
        labels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::polygon_area;

    fn word(x0: f64, y0: f64, x1: f64, y1: f64, text: &str) -> WordAnnotation {
        WordAnnotation::new(
            QuadBox::axis_aligned(x0, y0, x1, y1).unwrap(),
            Some(text.into()),
            false,
        )
    }

    #[test]
    fn confidence_examples() {
        assert_eq!(confidence_score(5, 5).unwrap(), 1.0);
        assert_eq!(confidence_score(6, 4).unwrap(), 4.0 / 6.0);
        assert_eq!(confidence_score(5, 0).unwrap(), 0.0);
        assert_eq!(confidence_score(3, 9).unwrap(), 0.0);
        assert_eq!(confidence_score(0, 1), Err(Error::InvalidLength(0)));
    }

    #[test]
    fn length_ignores_whitespace() {
        assert_eq!(word(0.0, 0.0, 4.0, 1.0, " a b\tc ").length(), Some(3));
        let w = WordAnnotation::new(
            QuadBox::axis_aligned(0.0, 0.0, 1.0, 1.0).unwrap(),
            None,
            true,
        );
        assert_eq!(w.length(), None);
    }

    #[test]
    fn fallback_equal_widths() {
        let r = fallback_split(&word(0.0, 0.0, 10.0, 2.0, "abcde")).unwrap();
        assert_eq!(r.detected_count, 5);
        assert_eq!(r.confidence, 0.5);
        for (i, b) in r.char_boxes.iter().enumerate() {
            let x = 2.0 * i as f64;
            assert_eq!(b.bounds(), (x, 0.0, x + 2.0, 2.0));
        }
    }

    #[test]
    fn fallback_single_char_is_the_word() {
        let w = word(1.5, 2.0, 7.25, 9.0, "x");
        let r = fallback_split(&w).unwrap();
        assert_eq!(r.char_boxes, vec![w.quad]);
        assert_eq!(r.confidence, 0.5);
    }

    #[test]
    fn fallback_trapezoid_shares_midpoint_edge() {
        let quad = QuadBox::new([
            Point::new(0.0, 0.0),
            Point::new(8.0, 1.0),
            Point::new(10.0, 5.0),
            Point::new(-2.0, 4.0),
        ])
        .unwrap();
        let w = WordAnnotation::new(quad, Some("ab".into()), false);
        let r = fallback_split(&w).unwrap();
        let top_mid = quad.top_left().midpoint(quad.top_right());
        let bottom_mid = quad.bottom_left().midpoint(quad.bottom_right());
        let (a, b) = (&r.char_boxes[0], &r.char_boxes[1]);
        assert!(a.corners().contains(&top_mid) && a.corners().contains(&bottom_mid));
        assert!(b.corners().contains(&top_mid) && b.corners().contains(&bottom_mid));
        let total = polygon_area(a.corners()) + polygon_area(b.corners());
        assert!((total - quad.area()).abs() < 1e-9);
    }

    #[test]
    fn fallback_needs_transcription() {
        let w = WordAnnotation::new(
            QuadBox::axis_aligned(0.0, 0.0, 1.0, 1.0).unwrap(),
            None,
            false,
        );
        assert_eq!(fallback_split(&w), Err(Error::MissingTranscription));
    }

    #[test]
    fn empty_crop_gives_zero_confidence() {
        let crop = ScoreMap::new(64, 16).unwrap();
        let r = split_characters(
            &crop,
            &word(0.0, 0.0, 40.0, 10.0, "abcd"),
            &SplitConfig::default(),
        )
        .unwrap();
        assert_eq!(r.detected_count, 0);
        assert_eq!(r.confidence, 0.0);
        assert!(r.char_boxes.is_empty());
    }

    #[test]
    fn dont_care_gets_nothing() {
        let mut w = word(0.0, 0.0, 40.0, 10.0, "abcd");
        w.dont_care = true;
        let crop = ScoreMap::filled(8, 8, 1.0).unwrap();
        let r = pseudo_gt_for_word(&crop, &w, &SplitConfig::default()).unwrap();
        assert_eq!(r.chars.confidence, 0.0);
        assert!(r.chars.char_boxes.is_empty());
        assert!(!r.fallback);
    }

    #[test]
    fn confidence_map_branches() {
        let none = build_confidence_map(&[], 5, 4).unwrap();
        assert!(none.values().iter().all(|&v| v == 1.0));

        let a = QuadBox::axis_aligned(0.0, 0.0, 6.0, 4.0).unwrap();
        let b = QuadBox::axis_aligned(4.0, 0.0, 10.0, 4.0).unwrap();
        let m = build_confidence_map(&[(a, 0.4), (b, 0.9)], 12, 6).unwrap();
        assert_eq!(m.get(1, 1), 0.4);
        assert_eq!(m.get(4, 1), 0.4);
        assert_eq!(m.get(5, 1), 0.4);
        assert_eq!(m.get(8, 1), 0.9);
        assert_eq!(m.get(11, 1), 1.0);
        assert_eq!(m.get(1, 5), 1.0);
    }

    #[test]
    fn loss_single_pixel() {
        let one = ScoreMap::filled(1, 1, 1.0).unwrap();
        let zero = ScoreMap::new(1, 1).unwrap();
        let half = ScoreMap::filled(1, 1, 0.5).unwrap();
        let l = weighted_loss(&half, &zero, &zero, &zero, &one).unwrap();
        assert_eq!(l.sum, 0.25);
        assert_eq!(l.mean, 0.25);
        assert_eq!(
            weighted_loss(&half, &zero, &half, &zero, &one).unwrap().sum,
            0.0
        );
    }

    #[test]
    fn loss_is_linear_in_confidence() {
        let pr = ScoreMap::from_fn(4, 3, |x, y| (x * 3 + y) as f32 / 16.0).unwrap();
        let pa = ScoreMap::from_fn(4, 3, |x, _| x as f32 / 8.0).unwrap();
        let z = ScoreMap::new(4, 3).unwrap();
        let c1 = ScoreMap::filled(4, 3, 0.25).unwrap();
        let c2 = ScoreMap::filled(4, 3, 0.5).unwrap();
        let l1 = weighted_loss(&pr, &pa, &z, &z, &c1).unwrap().sum;
        let l2 = weighted_loss(&pr, &pa, &z, &z, &c2).unwrap().sum;
        assert_eq!(l2, 2.0 * l1);
    }

    #[test]
    fn loss_dimension_mismatch() {
        let a = ScoreMap::new(2, 2).unwrap();
        let b = ScoreMap::new(2, 3).unwrap();
        assert!(matches!(
            weighted_loss(&a, &a, &a, &a, &b),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
