//! Subcommand implementations. Images are processed on a worker pool and
//! their outputs written afterwards in input order.

use std::fs;
use std::path::{Path, PathBuf};

use craft_core::eval::{match_detections, Counts};
use craft_core::geometry::QuadBox;
use craft_core::io::encode_score_map;
use craft_core::io::{read_score_map, AnnotationFile, Config};
use craft_core::labelgen::{render_affinity_map, render_link_gt, render_region_map};
use craft_core::postproc::{detect, DetectMode, Detection};
use craft_core::synth::{random_arc_scene, random_scene, SceneParams};
use craft_core::weaksup::pseudo_gt_for_image;
use log::{info, warn};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use crate::args::Mode;
use crate::error::{CliError, CliResult};
use crate::overlay::render_overlay;

/// Files produced for one image, written after all images are processed.
struct ImageOutput {
    files: Vec<(PathBuf, Vec<u8>)>,
    summary: String,
}

fn parallel<T: Sync, R: Send>(
    workers: usize,
    items: &[T],
    f: impl Fn(&T) -> CliResult<R> + Sync,
) -> CliResult<Vec<R>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::input(format!("cannot start worker pool: {e}")))?;
    let results: Vec<CliResult<R>> = pool.install(|| items.par_iter().map(&f).collect());
    results.into_iter().collect()
}

fn write_outputs(outputs: Vec<ImageOutput>) -> CliResult<()> {
    for out in outputs {
        for (path, bytes) in &out.files {
            fs::write(path, bytes)
                .map_err(|e| CliError::Output(format!("cannot write {}: {e}", path.display())))?;
        }
        info!("{}", out.summary);
    }
    Ok(())
}

fn ensure_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir)
        .map_err(|e| CliError::Output(format!("cannot create {}: {e}", dir.display())))
}

/// Files in `dir` whose names end with `suffix`, sorted, with the stem
/// (name minus suffix).
fn list_with_suffix(dir: &Path, suffix: &str) -> CliResult<Vec<(String, PathBuf)>> {
    let entries = fs::read_dir(dir)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", dir.display())))?;
    let mut out = Vec::new();
    for entry in entries {
        let entry =
            entry.map_err(|e| CliError::input(format!("cannot read {}: {e}", dir.display())))?;
        let name = entry.file_name().to_string_lossy().into_owned();
        if let Some(stem) = name.strip_suffix(suffix) {
            if !stem.is_empty() && entry.path().is_file() {
                out.push((stem.to_string(), entry.path()));
            }
        }
    }
    out.sort();
    Ok(out)
}

fn csm(out: &Path, stem: &str, kind: &str, map: &craft_core::ScoreMap) -> (PathBuf, Vec<u8>) {
    (
        out.join(format!("{stem}_{kind}.csm")),
        encode_score_map(map),
    )
}

fn core_err(path: &Path, e: craft_core::Error) -> CliError {
    CliError::input(format!("{}: {e}", path.display()))
}

pub fn labelgen(cfg: &Config, annotations: &Path, out: &Path, link: bool) -> CliResult<()> {
    let inputs = list_with_suffix(annotations, ".json")?;
    let template = cfg.template().map_err(CliError::input)?;
    ensure_dir(out)?;
    let outputs = parallel(cfg.workers, &inputs, |(stem, path)| {
        let ann = AnnotationFile::load(path)?;
        let mut per_word: Vec<Vec<QuadBox>> = Vec::new();
        let groups = ann
            .character_boxes()
            .map_err(|m| CliError::input(format!("{}: {m}", path.display())))?;
        for (i, (chars, dont_care)) in groups.into_iter().enumerate() {
            if dont_care {
                continue;
            }
            let chars = chars.ok_or_else(|| {
                let record = if i < ann.words.len() {
                    format!("words[{i}]")
                } else {
                    format!("polygons[{}]", i - ann.words.len())
                };
                CliError::input(format!(
                    "{}: {record}.chars: character boxes required",
                    path.display()
                ))
            })?;
            per_word.push(chars);
        }
        let flat: Vec<QuadBox> = per_word.iter().flatten().copied().collect();
        let (w, h) = (ann.width, ann.height);
        let region = render_region_map(&flat, &template, w, h).map_err(|e| core_err(path, e))?;
        let affinity =
            render_affinity_map(&per_word, &template, w, h).map_err(|e| core_err(path, e))?;
        let mut files = vec![
            csm(out, stem, "region", &region.map),
            csm(out, stem, "affinity", &affinity.map),
        ];
        if link {
            let polys = ann.text_polygons().map_err(CliError::input)?;
            let map = render_link_gt(&polys, w, h, cfg.link_width_ratio)
                .map_err(|e| core_err(path, e))?;
            files.push(csm(out, stem, "link", &map));
        }
        let skipped = region.skipped + affinity.skipped;
        Ok(ImageOutput {
            files,
            summary: format!(
                "{stem}: {} words, {} characters, {skipped} skipped boxes",
                per_word.len(),
                flat.len()
            ),
        })
    })?;
    write_outputs(outputs)
}

pub fn pseudo_gt(cfg: &Config, annotations: &Path, pred: &Path, out: &Path) -> CliResult<()> {
    let inputs = list_with_suffix(annotations, ".json")?;
    let template = cfg.template().map_err(CliError::input)?;
    let split = cfg.split();
    ensure_dir(out)?;
    let outputs = parallel(cfg.workers, &inputs, |(stem, path)| {
        let ann = AnnotationFile::load(path)?;
        let words = ann.word_annotations().map_err(CliError::input)?;
        let pred_path = pred.join(format!("{stem}_region.csm"));
        let predicted = read_score_map(&pred_path)?;
        if predicted.dims() != (ann.width, ann.height) {
            return Err(CliError::input(format!(
                "{}: map is {}x{}, annotation says {}x{}",
                pred_path.display(),
                predicted.width(),
                predicted.height(),
                ann.width,
                ann.height
            )));
        }
        let result = pseudo_gt_for_image(&words, &predicted, &template, &split)
            .map_err(|e| core_err(path, e))?;
        let manifest: Vec<_> = words
            .iter()
            .zip(&result.labels)
            .enumerate()
            .map(|(i, (w, l))| {
                json!({
                    "index": i,
                    "transcription": w.transcription,
                    "dont_care": w.dont_care,
                    "l": l.word_length,
                    "l_c": l.split_count,
                    "s_conf": l.chars.confidence,
                    "fallback": l.fallback,
                    "chars": l.chars.char_boxes.iter().map(|b| b.to_flat().to_vec()).collect::<Vec<_>>(),
                })
            })
            .collect();
        let mut manifest = serde_json::to_string_pretty(&json!({ "words": manifest }))
            .expect("manifest serializes");
        manifest.push('\n');
        let fallbacks = result.labels.iter().filter(|l| l.fallback).count();
        Ok(ImageOutput {
            files: vec![
                csm(out, stem, "region", &result.region),
                csm(out, stem, "affinity", &result.affinity),
                csm(out, stem, "confidence", &result.confidence),
                (
                    out.join(format!("{stem}_manifest.json")),
                    manifest.into_bytes(),
                ),
            ],
            summary: format!("{stem}: {} words, {fallbacks} fallback splits", words.len()),
        })
    })?;
    write_outputs(outputs)
}

pub struct DetectOptions {
    pub mode: Mode,
    pub merge_lines: bool,
    pub link: bool,
    pub overlay: bool,
}

pub fn detect_cmd(cfg: &Config, maps: &Path, out: &Path, opts: &DetectOptions) -> CliResult<()> {
    let inputs = list_with_suffix(maps, "_region.csm")?;
    let post = cfg.postproc().map_err(CliError::input)?;
    let mode = match opts.mode {
        Mode::Quad => DetectMode::Quad,
        Mode::Poly => DetectMode::Poly,
    };
    let merge = opts.merge_lines.then_some(cfg.merge_gap_ratio);
    let second = if opts.link { "link" } else { "affinity" };
    ensure_dir(out)?;
    let outputs = parallel(cfg.workers, &inputs, |(stem, region_path)| {
        let region = read_score_map(region_path)?;
        let affinity = read_score_map(&maps.join(format!("{stem}_{second}.csm")))?;
        let dets =
            detect(&region, &affinity, mode, merge, &post).map_err(|e| core_err(region_path, e))?;
        let mut ann = AnnotationFile::new(region.width(), region.height());
        for d in &dets {
            match d {
                Detection::Quad(q) => ann.push_quad(q, None, false),
                Detection::Polygon(p) => ann.push_polygon(p, None, false),
            }
        }
        let mut files = vec![(out.join(format!("{stem}.json")), ann.to_json().into_bytes())];
        if opts.overlay {
            let png = render_overlay(&region, &affinity, &dets)
                .map_err(|e| CliError::Output(format!("{stem}: cannot encode overlay: {e}")))?;
            files.push((out.join(format!("{stem}.png")), png));
        }
        Ok(ImageOutput {
            files,
            summary: format!("{stem}: {} detections", dets.len()),
        })
    })?;
    write_outputs(outputs)
}

pub fn eval(cfg: &Config, gt: &Path, det: &Path, out: Option<&Path>) -> CliResult<()> {
    let pairs: Vec<(String, PathBuf, PathBuf)> = if gt.is_dir() {
        list_with_suffix(gt, ".json")?
            .into_iter()
            .map(|(stem, path)| {
                let d = det.join(format!("{stem}.json"));
                (stem, path, d)
            })
            .collect()
    } else {
        let name = gt
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        vec![(name, gt.to_path_buf(), det.to_path_buf())]
    };
    let thr = cfg.iou_threshold;
    if !(thr > 0.0 && thr < 1.0) {
        return Err(CliError::input(format!(
            "IoU threshold must lie in (0, 1), got {thr}"
        )));
    }

    let per_image = parallel(cfg.workers, &pairs, |(stem, gt_path, det_path)| {
        let gts = AnnotationFile::load(gt_path)?
            .regions()
            .map_err(|m| CliError::input(format!("{}: {m}", gt_path.display())))?;
        let dets = if det_path.exists() || !gt.is_dir() {
            let d = AnnotationFile::load(det_path)?;
            d.regions()
                .map_err(|m| CliError::input(format!("{}: {m}", det_path.display())))?
                .into_iter()
                .map(|r| r.points)
                .collect()
        } else {
            warn!("{stem}: no detection file, scoring as empty");
            Vec::new()
        };
        Ok((stem.clone(), match_detections(&gts, &dets, thr)))
    })?;

    let mut total = Counts::default();
    let mut images = Vec::new();
    for (stem, r) in &per_image {
        let c = r.counts();
        total = total.merge(c);
        images.push(json!({
            "image": stem,
            "recall": r.recall,
            "precision": r.precision,
            "hmean": r.hmean,
            "matched": c.matched,
            "gts": c.gts,
            "dets": c.dets,
            "ignored_dets": r.ignored_dets.len(),
        }));
    }
    let (recall, precision, hmean) = total.scores();
    let summary = json!({
        "protocol": format!("iou>={thr}"),
        "recall": recall,
        "precision": precision,
        "hmean": hmean,
        "matched": total.matched,
        "gts": total.gts,
        "dets": total.dets,
        "images": images,
    });
    let mut text = serde_json::to_string_pretty(&summary).expect("summary serializes");
    text.push('\n');
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::Output(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    info!(
        "R {recall:.4} P {precision:.4} H {hmean:.4} over {} images",
        per_image.len()
    );
    Ok(())
}

pub fn synth(cfg: &Config, out: &Path, count: usize, seed: u64, arc: bool) -> CliResult<()> {
    let template = cfg.template().map_err(CliError::input)?;
    ensure_dir(out)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scenes: Vec<_> = (0..count)
        .map(|_| {
            if arc {
                random_arc_scene(&mut rng)
            } else {
                random_scene(&mut rng, &SceneParams::default())
            }
        })
        .collect();
    let indexed: Vec<(usize, _)> = scenes.into_iter().enumerate().collect();
    let outputs = parallel(cfg.workers, &indexed, |(i, scene)| {
        let stem = format!("scene_{i:04}");
        let (region, affinity) = scene.render(&template).map_err(CliError::input)?;
        Ok(ImageOutput {
            files: vec![
                (
                    out.join(format!("{stem}.json")),
                    scene.annotation().to_json().into_bytes(),
                ),
                csm(out, &stem, "region", &region),
                csm(out, &stem, "affinity", &affinity),
            ],
            summary: format!("{stem}: {} words", scene.words.len()),
        })
    })?;
    write_outputs(outputs)
}
