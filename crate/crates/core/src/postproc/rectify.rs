//! Piecewise-perspective straightening of curved text polygons.

use crate::error::{Error, Result};
use crate::geometry::{PerspectiveMap, Point, TextPolygon};
use crate::scoremap::ScoreMap;

#[derive(Debug, Clone)]
pub struct Rectified {
    pub map: ScoreMap,
    /// Output width of each strip, left to right.
    pub strip_widths: Vec<usize>,
}

/// Warps each strip between consecutive control-point pairs onto an
/// axis-aligned strip of height `out_height` and concatenates the strips.
///
/// Strip widths follow the center-line length of each strip, scaled by
/// `out_height / mean pair distance` so the aspect ratio is preserved.
pub fn rectify_polygon(
    source: &ScoreMap,
    poly: &TextPolygon,
    out_height: usize,
) -> Result<Rectified> {
    if out_height == 0 {
        return Err(Error::InvalidParameter(
            "output height must be positive".into(),
        ));
    }
    let top = poly.top_edge();
    let bottom = poly.bottom_edge();
    let n = top.len();
    let thickness = top
        .iter()
        .zip(&bottom)
        .map(|(a, b)| a.distance(*b))
        .sum::<f64>()
        / n as f64;
    if thickness <= 1e-9 {
        return Err(Error::DegenerateStrip(0));
    }
    let scale = out_height as f64 / thickness;
    let mids: Vec<Point> = top
        .iter()
        .zip(&bottom)
        .map(|(a, b)| a.midpoint(*b))
        .collect();
    let strip_widths: Vec<usize> = mids
        .windows(2)
        .map(|w| ((w[0].distance(w[1]) * scale).round() as usize).max(1))
        .collect();

    let total: usize = strip_widths.iter().sum();
    let mut out = ScoreMap::new(total, out_height)?;
    let h = out_height as f64;
    let mut x0 = 0usize;
    for (j, &w) in strip_widths.iter().enumerate() {
        let left = x0 as f64;
        let right = (x0 + w) as f64;
        let rect = [
            Point::new(left, 0.0),
            Point::new(right, 0.0),
            Point::new(right, h),
            Point::new(left, h),
        ];
        let quad = [top[j], top[j + 1], bottom[j + 1], bottom[j]];
        let to_source =
            PerspectiveMap::solve(&rect, &quad).map_err(|_| Error::DegenerateStrip(j))?;
        for y in 0..out_height {
            for x in x0..x0 + w {
                let p = to_source
                    .map_point(Point::new(x as f64 + 0.5, y as f64 + 0.5))
                    .ok_or(Error::DegenerateStrip(j))?;
                out.set(x, y, source.sample_bilinear(p.x, p.y));
            }
        }
        x0 += w;
    }
    Ok(Rectified {
        map: out,
        strip_widths,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gradient(w: usize, h: usize) -> ScoreMap {
        ScoreMap::from_fn(w, h, |x, y| (x as f32 * 0.011 + y as f32 * 0.017).fract()).unwrap()
    }

    #[test]
    fn rectangle_is_identity() {
        let src = gradient(64, 40);
        let poly = TextPolygon::new(vec![
            Point::new(10.0, 5.0),
            Point::new(50.0, 5.0),
            Point::new(50.0, 25.0),
            Point::new(10.0, 25.0),
        ])
        .unwrap();
        let r = rectify_polygon(&src, &poly, 20).unwrap();
        assert_eq!(r.map.dims(), (40, 20));
        for y in 0..20 {
            for x in 0..40 {
                let d = (r.map.get(x, y) - src.get(x + 10, y + 5)).abs();
                assert!(d <= 2.0 / 255.0, "({x},{y}) diff {d}");
            }
        }
    }

    #[test]
    fn strip_widths_follow_center_line_lengths() {
        let src = gradient(128, 128);
        // bent polygon: a 30 px horizontal strip then a 60 px diagonal-ish strip, thickness 10
        let top = [
            Point::new(10.0, 20.0),
            Point::new(40.0, 20.0),
            Point::new(88.0, 56.0),
        ];
        let bottom = [
            Point::new(10.0, 30.0),
            Point::new(40.0, 30.0),
            Point::new(82.0, 64.0),
        ];
        let poly = TextPolygon::from_edges(&top, &bottom).unwrap();
        let r = rectify_polygon(&src, &poly, 10).unwrap();
        let m: Vec<Point> = top
            .iter()
            .zip(&bottom)
            .map(|(a, b)| a.midpoint(*b))
            .collect();
        let thick = top
            .iter()
            .zip(&bottom)
            .map(|(a, b)| a.distance(*b))
            .sum::<f64>()
            / 3.0;
        let want: Vec<usize> = m
            .windows(2)
            .map(|w| (w[0].distance(w[1]) * 10.0 / thick).round() as usize)
            .collect();
        assert_eq!(r.strip_widths, want);
        assert_eq!(r.map.width(), want.iter().sum::<usize>());
    }

    #[test]
    fn zero_height_is_rejected() {
        let src = gradient(8, 8);
        let poly = TextPolygon::new(vec![
            Point::new(1.0, 1.0),
            Point::new(6.0, 1.0),
            Point::new(6.0, 6.0),
            Point::new(1.0, 6.0),
        ])
        .unwrap();
        assert!(rectify_polygon(&src, &poly, 0).is_err());
    }
}
