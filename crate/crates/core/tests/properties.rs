use craft_core::eval::{match_detections, GtRegion};
use craft_core::geometry::{
    min_area_rect, polygon_area, polygon_iou, PerspectiveMap, Point, QuadBox,
};
use craft_core::io::{decode_score_map, encode_score_map};
use craft_core::labelgen::{render_region_map, GaussianTemplate};
use craft_core::postproc::{binarize, Thresholds};
use craft_core::weaksup::{confidence_score, fallback_split, WordAnnotation};
use craft_core::ScoreMap;
use proptest::prelude::*;

fn point() -> impl Strategy<Value = Point> {
    (-100.0..100.0f64, -100.0..100.0f64).prop_map(|(x, y)| Point::new(x, y))
}

/// A convex quad: a rotated rectangle with jittered corners.
fn quad() -> impl Strategy<Value = QuadBox> {
    (
        point(),
        5.0..60.0f64,
        5.0..60.0f64,
        -1.0..1.0f64,
        prop::array::uniform8(-1.5..1.5f64),
    )
        .prop_filter_map("valid quad", |(c, w, h, angle, jitter)| {
            let u = Point::new(angle.cos(), angle.sin());
            let v = u.perp();
            let corners = [
                c - u * w - v * h + Point::new(jitter[0], jitter[1]),
                c + u * w - v * h + Point::new(jitter[2], jitter[3]),
                c + u * w + v * h + Point::new(jitter[4], jitter[5]),
                c - u * w + v * h + Point::new(jitter[6], jitter[7]),
            ];
            QuadBox::new(corners).ok()
        })
}

proptest! {
    #[test]
    fn homography_maps_corners(a in quad(), b in quad()) {
        let m = PerspectiveMap::solve(a.corners(), b.corners()).unwrap();
        for (s, d) in a.corners().iter().zip(b.corners()) {
            let p = m.apply(*s).unwrap();
            prop_assert!(p.distance(*d) < 1e-6);
        }
    }

    #[test]
    fn iou_symmetric_and_bounded(a in quad(), b in quad()) {
        let x = polygon_iou(a.corners(), b.corners()).unwrap();
        let y = polygon_iou(b.corners(), a.corners()).unwrap();
        prop_assert_eq!(x, y);
        prop_assert!((0.0..=1.0).contains(&x));
        prop_assert!((polygon_iou(a.corners(), a.corners()).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn min_rect_no_larger_than_bounding_box(pts in prop::collection::vec(point(), 3..40)) {
        let r = min_area_rect(&pts).unwrap();
        let (x0, x1) = pts.iter().fold((f64::MAX, f64::MIN), |(a, b), p| (a.min(p.x), b.max(p.x)));
        let (y0, y1) = pts.iter().fold((f64::MAX, f64::MIN), |(a, b), p| (a.min(p.y), b.max(p.y)));
        prop_assert!(polygon_area(r.corners()) <= (x1 - x0) * (y1 - y0) + 1e-9);
    }

    #[test]
    fn confidence_in_unit_interval(l in 1usize..500, lc in 0usize..1000) {
        let s = confidence_score(l, lc).unwrap();
        prop_assert!((0.0..=1.0).contains(&s));
        prop_assert_eq!(s == 1.0, l == lc);
    }

    #[test]
    fn fallback_partitions_the_word(q in quad(), l in 1usize..12) {
        let w = WordAnnotation::new(q, Some("x".repeat(l)), false);
        let r = fallback_split(&w).unwrap();
        prop_assert_eq!(r.char_boxes.len(), l);
        let sum: f64 = r.char_boxes.iter().map(|b| b.area()).sum();
        prop_assert!((sum - q.area()).abs() < 1e-6 * q.area());
        prop_assert_eq!(r.confidence, 0.5);
    }

    #[test]
    fn rendering_ignores_box_order(seed in 0u64..1000) {
        let boxes: Vec<QuadBox> = (0..4)
            .map(|i| {
                let x = (seed as f64 * 0.37 + 9.0 * i as f64) % 40.0;
                QuadBox::axis_aligned(x, 3.0 + i as f64, x + 8.0, 13.0 + i as f64).unwrap()
            })
            .collect();
        let t = GaussianTemplate::new(32, 0.25).unwrap();
        let a = render_region_map(&boxes, &t, 56, 24).unwrap().map;
        let mut rev = boxes.clone();
        rev.reverse();
        let b = render_region_map(&rev, &t, 56, 24).unwrap().map;
        prop_assert_eq!(a, b);
    }

    #[test]
    fn binarize_is_monotone(vals in prop::collection::vec(0.0..=1.0f32, 48), t1 in 0.05..0.9f64, dt in 0.0..0.09f64) {
        let region = ScoreMap::from_vec(8, 6, vals.clone()).unwrap();
        let affinity = ScoreMap::from_vec(6, 8, vals).unwrap().transposed();
        let lo = binarize(&region, &affinity, &Thresholds::new(t1, t1).unwrap()).unwrap();
        let hi = binarize(&region, &affinity, &Thresholds::new(t1 + dt, t1 + dt).unwrap()).unwrap();
        for y in 0..6 {
            for x in 0..8 {
                prop_assert!(!hi.get(x, y) || lo.get(x, y));
            }
        }
    }

    #[test]
    fn score_map_files_are_bit_identical(w in 1usize..20, h in 1usize..20, seed in any::<u32>()) {
        let m = ScoreMap::from_fn(w, h, |x, y| {
            let v = (x as u32).wrapping_mul(2654435761).wrapping_add((y as u32) ^ seed);
            (v % 10007) as f32 / 10006.0
        }).unwrap();
        let bytes = encode_score_map(&m);
        prop_assert_eq!(bytes.len(), 12 + 4 * w * h);
        let back = decode_score_map(&bytes).unwrap();
        prop_assert_eq!(encode_score_map(&back), bytes);
    }

    #[test]
    fn eval_ignores_detection_order(n in 1usize..6, shift in 0usize..6) {
        let gts: Vec<GtRegion> = (0..n)
            .map(|i| GtRegion { points: QuadBox::axis_aligned(12.0 * i as f64, 0.0, 12.0 * i as f64 + 10.0, 10.0).unwrap().corners().to_vec(), dont_care: i == 0 })
            .collect();
        let mut dets: Vec<Vec<Point>> = (0..n)
            .map(|i| QuadBox::axis_aligned(12.0 * i as f64 + 1.0, 0.0, 12.0 * i as f64 + 11.0, 10.0).unwrap().corners().to_vec())
            .collect();
        let a = match_detections(&gts, &dets, 0.5);
        dets.rotate_left(shift % n);
        let b = match_detections(&gts, &dets, 0.5);
        prop_assert_eq!((a.recall, a.precision, a.hmean), (b.recall, b.precision, b.hmean));
        prop_assert!(a.pairs.len() <= n);
    }
}

proptest! {
    #[test]
    fn quad_boxes_contain_their_pixels(vals in prop::collection::vec(0.0..=1.0f32, 24 * 16)) {
        use craft_core::postproc::{component_rect, expand_rect, retained_components, PostprocConfig};
        let region = ScoreMap::from_vec(24, 16, vals).unwrap();
        let affinity = ScoreMap::new(24, 16).unwrap();
        let cfg = PostprocConfig::default();
        for px in retained_components(&region, &affinity, &cfg).unwrap() {
            let rect = expand_rect(&component_rect(&px).unwrap(), cfg.box_expand_ratio);
            let c = rect.corners();
            for &(x, y) in &px {
                let p = Point::new(x as f64 + 0.5, y as f64 + 0.5);
                for k in 0..4 {
                    let (a, b) = (c[k], c[(k + 1) % 4]);
                    // signed distance to the edge line, positive inside
                    let d = (b - a).cross(p - a) / (b - a).norm();
                    prop_assert!(d >= -0.5, "pixel ({}, {}) is {} px outside", x, y, -d);
                }
            }
        }
    }
}
