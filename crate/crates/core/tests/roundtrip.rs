//! Synthetic scenes through label generation and back.

use craft_core::eval::{match_detections, GtRegion};
use craft_core::geometry::polygon_iou;
use craft_core::labelgen::GaussianTemplate;
use craft_core::postproc::{detect, quad_boxes, DetectMode, Detection, PostprocConfig};
use craft_core::synth::{random_arc_scene, random_scene, SceneParams};
use craft_core::weaksup::{crop_word, pseudo_gt_for_word, SplitConfig, WordAnnotation};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn template() -> GaussianTemplate {
    GaussianTemplate::new(64, 0.25).unwrap()
}

#[test]
fn detected_quads_recover_every_word() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let t = template();
    let cfg = PostprocConfig::default();
    for scene_idx in 0..25 {
        let scene = random_scene(&mut rng, &SceneParams::default());
        let (region, affinity) = scene.render(&t).unwrap();
        let boxes = quad_boxes(&region, &affinity, &cfg).unwrap();
        assert_eq!(boxes.len(), scene.words.len(), "scene {scene_idx}");
        for w in &scene.words {
            let best = boxes
                .iter()
                .map(|b| polygon_iou(b.corners(), w.quad.corners()).unwrap())
                .fold(0.0, f64::max);
            assert!(best >= 0.5, "scene {scene_idx}: best IoU {best}");
        }
    }
}

#[test]
fn gt_crops_split_into_the_right_count() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let t = template();
    let split = SplitConfig::default();
    let (mut total, mut exact) = (0, 0);
    for _ in 0..20 {
        let scene = random_scene(&mut rng, &SceneParams::default());
        let (region, _) = scene.render(&t).unwrap();
        for w in &scene.words {
            let word = WordAnnotation::new(w.quad, Some(w.text.clone()), false);
            let crop = crop_word(&region, &w.quad, split.crop_height).unwrap();
            let label = pseudo_gt_for_word(&crop, &word, &split).unwrap();
            total += 1;
            if label.split_count == w.chars.len() {
                exact += 1;
                assert_eq!(label.chars.confidence, 1.0);
            } else {
                assert!(label.fallback || label.chars.confidence >= 0.5);
            }
        }
    }
    assert!(exact as f64 >= 0.99 * total as f64, "{exact}/{total}");
}

#[test]
fn arc_words_become_polygons() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let t = template();
    for _ in 0..5 {
        let scene = random_arc_scene(&mut rng);
        let (region, affinity) = scene.render(&t).unwrap();
        let dets = detect(
            &region,
            &affinity,
            DetectMode::Poly,
            None,
            &PostprocConfig::default(),
        )
        .unwrap();
        assert_eq!(dets.len(), 1);
        let Detection::Polygon(poly) = &dets[0] else {
            panic!("expected a polygon, got {:?}", dets[0]);
        };
        assert_eq!(poly.points().len() % 2, 0);
        let gt = scene.words[0].polygon.as_ref().unwrap();
        let r = match_detections(
            &[GtRegion {
                points: gt.points().to_vec(),
                dont_care: false,
            }],
            &[poly.points().to_vec()],
            0.5,
        );
        assert_eq!(r.pairs.len(), 1, "IoU too low");
    }
}

#[test]
fn four_character_word_gives_one_tight_box() {
    use craft_core::geometry::{min_area_rect, Point, QuadBox};
    use craft_core::labelgen::{render_affinity_map, render_region_map};

    let chars: Vec<QuadBox> = (0..4)
        .map(|i| {
            let x = 20.0 + 18.0 * i as f64;
            QuadBox::axis_aligned(x, 20.0, x + 18.0, 40.0).unwrap()
        })
        .collect();
    let t = GaussianTemplate::default();
    let region = render_region_map(&chars, &t, 120, 60).unwrap().map;
    let affinity = render_affinity_map(std::slice::from_ref(&chars), &t, 120, 60)
        .unwrap()
        .map;
    let boxes = quad_boxes(&region, &affinity, &PostprocConfig::default()).unwrap();
    assert_eq!(boxes.len(), 1);
    let corners: Vec<Point> = chars.iter().flat_map(|c| c.corners().to_vec()).collect();
    let hull_rect = min_area_rect(&corners).unwrap();
    let iou = polygon_iou(boxes[0].corners(), hull_rect.corners()).unwrap();
    assert!(iou >= 0.8, "IoU {iou}");
}
