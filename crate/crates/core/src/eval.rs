//! Word-level detection scoring with one-to-one IoU matching.

use serde::Serialize;

use crate::geometry::{polygon_iou, Point};

pub const DEFAULT_IOU_THRESHOLD: f64 = 0.5;

/// A ground-truth word region.
#[derive(Debug, Clone, PartialEq)]
pub struct GtRegion {
    pub points: Vec<Point>,
    pub dont_care: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MatchPair {
    pub gt: usize,
    pub det: usize,
    pub iou: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatchResult {
    pub pairs: Vec<MatchPair>,
    /// Countable ground truths left unmatched.
    pub unmatched_gts: Vec<usize>,
    /// Counted detections left unmatched.
    pub unmatched_dets: Vec<usize>,
    /// Detections dropped because they cover a don't-care region.
    pub ignored_dets: Vec<usize>,
    pub recall: f64,
    pub precision: f64,
    pub hmean: f64,
}

/// Aggregate counts; combining images adds them.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Counts {
    pub matched: usize,
    pub gts: usize,
    pub dets: usize,
}

impl Counts {
    pub fn merge(self, other: Counts) -> Counts {
        Counts {
            matched: self.matched + other.matched,
            gts: self.gts + other.gts,
            dets: self.dets + other.dets,
        }
    }

    /// Recall, precision and h-mean. No countable ground truth gives recall
    /// 1; no counted detection gives precision 1.
    pub fn scores(&self) -> (f64, f64, f64) {
        let (m, g, d) = (self.matched as f64, self.gts as f64, self.dets as f64);
        let recall = if self.gts == 0 { 1.0 } else { m / g };
        let precision = if self.dets == 0 { 1.0 } else { m / d };
        let hmean = if self.gts > 0 && self.dets > 0 {
            // same value as 2PR/(P+R) without the intermediate rounding
            2.0 * m / (g + d)
        } else if recall + precision > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        (recall, precision, hmean)
    }
}

impl MatchResult {
    pub fn counts(&self) -> Counts {
        Counts {
            matched: self.pairs.len(),
            gts: self.pairs.len() + self.unmatched_gts.len(),
            dets: self.pairs.len() + self.unmatched_dets.len(),
        }
    }
}

fn iou(a: &[Point], b: &[Point]) -> f64 {
    polygon_iou(a, b).unwrap_or(0.0)
}

/// Greedy one-to-one matching in descending IoU order, ties broken by
/// `(gt index, det index)`. Invalid polygons overlap nothing.
pub fn match_detections(gts: &[GtRegion], dets: &[Vec<Point>], iou_threshold: f64) -> MatchResult {
    let table: Vec<Vec<f64>> = gts
        .iter()
        .map(|g| dets.iter().map(|d| iou(&g.points, d)).collect())
        .collect();

    // a detection is ignored when its best-overlapping gt is don't-care
    let mut ignored = vec![false; dets.len()];
    for (j, flag) in ignored.iter_mut().enumerate() {
        let mut best: Option<(usize, f64)> = None;
        for (i, row) in table.iter().enumerate() {
            if best.is_none_or(|(_, b)| row[j] > b) {
                best = Some((i, row[j]));
            }
        }
        if let Some((i, v)) = best {
            *flag = gts[i].dont_care && v > iou_threshold;
        }
    }

    let mut candidates: Vec<MatchPair> = Vec::new();
    for (i, row) in table.iter().enumerate() {
        if gts[i].dont_care {
            continue;
        }
        for (j, &v) in row.iter().enumerate() {
            if !ignored[j] && v >= iou_threshold && v > 0.0 {
                candidates.push(MatchPair {
                    gt: i,
                    det: j,
                    iou: v,
                });
            }
        }
    }
    candidates.sort_by(|a, b| {
        b.iou
            .total_cmp(&a.iou)
            .then(a.gt.cmp(&b.gt))
            .then(a.det.cmp(&b.det))
    });

    let mut gt_used = vec![false; gts.len()];
    let mut det_used = vec![false; dets.len()];
    let mut pairs = Vec::new();
    for c in candidates {
        if gt_used[c.gt] || det_used[c.det] {
            continue;
        }
        gt_used[c.gt] = true;
        det_used[c.det] = true;
        pairs.push(c);
    }
    pairs.sort_by_key(|p| p.gt);

    let unmatched_gts = (0..gts.len())
        .filter(|&i| !gts[i].dont_care && !gt_used[i])
        .collect();
    let unmatched_dets = (0..dets.len())
        .filter(|&j| !ignored[j] && !det_used[j])
        .collect();
    let ignored_dets = (0..dets.len()).filter(|&j| ignored[j]).collect();
    let mut result = MatchResult {
        pairs,
        unmatched_gts,
        unmatched_dets,
        ignored_dets,
        recall: 0.0,
        precision: 0.0,
        hmean: 0.0,
    };
    (result.recall, result.precision, result.hmean) = result.counts().scores();
    result
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square(x: f64, y: f64, s: f64) -> Vec<Point> {
        vec![
            Point::new(x, y),
            Point::new(x + s, y),
            Point::new(x + s, y + s),
            Point::new(x, y + s),
        ]
    }

    fn gt(points: Vec<Point>, dont_care: bool) -> GtRegion {
        GtRegion { points, dont_care }
    }

    #[test]
    fn identical_sets_score_one() {
        let g = vec![
            gt(square(0.0, 0.0, 10.0), false),
            gt(square(20.0, 0.0, 10.0), false),
        ];
        let d: Vec<_> = g.iter().map(|g| g.points.clone()).collect();
        let r = match_detections(&g, &d, 0.5);
        assert_eq!((r.recall, r.precision, r.hmean), (1.0, 1.0, 1.0));
    }

    #[test]
    fn one_of_two_found() {
        let g = vec![
            gt(square(0.0, 0.0, 10.0), false),
            gt(square(20.0, 0.0, 10.0), false),
        ];
        let r = match_detections(&g, &[square(0.0, 0.0, 10.0)], 0.5);
        assert_eq!(r.recall, 0.5);
        assert_eq!(r.precision, 1.0);
        assert_eq!(r.hmean, 2.0 / 3.0);
    }

    #[test]
    fn dont_care_only() {
        let g = vec![gt(square(0.0, 0.0, 10.0), true)];
        let r = match_detections(&g, &[square(0.0, 0.0, 10.0)], 0.5);
        assert_eq!(r.ignored_dets, vec![0]);
        assert_eq!((r.recall, r.precision, r.hmean), (1.0, 1.0, 1.0));
    }

    #[test]
    fn nothing_at_all() {
        let r = match_detections(&[], &[], 0.5);
        assert_eq!((r.recall, r.precision), (1.0, 1.0));
        let r = match_detections(&[gt(square(0.0, 0.0, 1.0), false)], &[], 0.5);
        assert_eq!((r.recall, r.precision, r.hmean), (0.0, 1.0, 0.0));
    }

    #[test]
    fn one_det_matches_at_most_one_gt() {
        let g = vec![
            gt(square(0.0, 0.0, 10.0), false),
            gt(square(0.0, 0.0, 10.0), false),
        ];
        let r = match_detections(&g, &[square(0.0, 0.0, 10.0)], 0.5);
        assert_eq!(r.pairs.len(), 1);
        assert_eq!(r.pairs[0].gt, 0);
        assert_eq!(r.unmatched_gts, vec![1]);
    }

    #[test]
    fn below_threshold_is_unmatched() {
        let g = vec![gt(square(0.0, 0.0, 10.0), false)];
        // IoU = 50 / 150
        let r = match_detections(&g, &[square(5.0, 0.0, 10.0)], 0.5);
        assert!(r.pairs.is_empty());
        assert_eq!(r.precision, 0.0);
        assert_eq!(r.hmean, 0.0);
    }
}
