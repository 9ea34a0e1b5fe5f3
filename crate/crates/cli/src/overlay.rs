//! PNG overlays: score heatmaps with detections drawn on top.

use std::io::Cursor;

use craft_core::postproc::Detection;
use craft_core::ScoreMap;
use image::{ImageFormat, Rgb, RgbImage};
use imageproc::drawing::draw_line_segment_mut;

const QUAD_COLOR: Rgb<u8> = Rgb([255, 230, 0]);
const POLY_COLOR: Rgb<u8> = Rgb([0, 220, 255]);

/// Region score in red, affinity in green, detections outlined.
pub fn render_overlay(
    region: &ScoreMap,
    affinity: &ScoreMap,
    dets: &[Detection],
) -> Result<Vec<u8>, image::ImageError> {
    let (w, h) = region.dims();
    let mut img = RgbImage::from_fn(w as u32, h as u32, |x, y| {
        let r = region.get(x as usize, y as usize);
        let a = if affinity.dims() == (w, h) {
            affinity.get(x as usize, y as usize)
        } else {
            0.0
        };
        Rgb([(r * 255.0).round() as u8, (a * 200.0).round() as u8, 24])
    });
    for d in dets {
        let color = match d {
            Detection::Quad(_) => QUAD_COLOR,
            Detection::Polygon(_) => POLY_COLOR,
        };
        let pts = d.points();
        for i in 0..pts.len() {
            let (a, b) = (pts[i], pts[(i + 1) % pts.len()]);
            draw_line_segment_mut(
                &mut img,
                (a.x as f32, a.y as f32),
                (b.x as f32, b.y as f32),
                color,
            );
        }
    }
    let mut buf = Cursor::new(Vec::new());
    img.write_to(&mut buf, ImageFormat::Png)?;
    Ok(buf.into_inner())
}
