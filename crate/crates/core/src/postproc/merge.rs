//! Line-level merging of word boxes for datasets annotated per text line.

use crate::geometry::{min_area_rect, Point, QuadBox};

/// `b` continues the line of `a` to its right: the gap between the right
/// side of `a` and the left side of `b` is below `gap_ratio * min height`
/// and the centers are offset by less than half the smaller height across
/// the reading direction.
fn continues_line(a: &QuadBox, b: &QuadBox, gap_ratio: f64) -> bool {
    let Some(u) = (a.top_right() - a.top_left()).normalized() else {
        return false;
    };
    let v = u.perp();
    let h = a.height().min(b.height());
    let shift = b.center() - a.center();
    if shift.dot(u) <= 0.0 {
        return false;
    }
    let right_a = a.top_right().midpoint(a.bottom_right());
    let left_b = b.top_left().midpoint(b.bottom_left());
    let gap = (left_b - right_a).dot(u);
    gap < gap_ratio * h && shift.dot(v).abs() < 0.5 * h
}

/// Repeatedly merges the first mergeable pair (in index order) into the
/// minimum-area rectangle of both boxes until no pair qualifies.
///
/// A non-positive `gap_ratio` leaves the boxes untouched.
pub fn merge_line_boxes(boxes: &[QuadBox], gap_ratio: f64) -> Vec<QuadBox> {
    let mut out = boxes.to_vec();
    if gap_ratio.is_nan() || gap_ratio <= 0.0 {
        return out;
    }
    'outer: loop {
        for i in 0..out.len() {
            for j in (i + 1)..out.len() {
                let (a, b) = (&out[i], &out[j]);
                if continues_line(a, b, gap_ratio) || continues_line(b, a, gap_ratio) {
                    let corners: Vec<Point> =
                        a.corners().iter().chain(b.corners()).copied().collect();
                    if let Ok(merged) = min_area_rect(&corners) {
                        out[i] = merged;
                        out.remove(j);
                        continue 'outer;
                    }
                }
            }
        }
        break;
    }
    out
}
