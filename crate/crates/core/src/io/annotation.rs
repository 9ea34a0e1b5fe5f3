//! JSON annotation and detection files.
//!
//! ```json
//! {
//!   "width": 640, "height": 480,
//!   "words": [{"quad": [x1, y1, x2, y2, x3, y3, x4, y4],
//!              "transcription": "text", "dont_care": false,
//!              "chars": [[x1, y1, ..., y4], ...]}],
//!   "polygons": [{"points": [x1, y1, ..., xk, yk],
//!                 "transcription": null, "dont_care": false,
//!                 "chars": [[x1, y1, ..., y4], ...]}]
//! }
//! ```
//!
//! `chars` is optional on both record kinds. Detection files use the same layout with null
//! transcriptions.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::eval::GtRegion;
use crate::geometry::{Point, QuadBox, TextPolygon};
use crate::weaksup::WordAnnotation;

use super::{read_bytes, write_bytes, IoError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WordRecord {
    pub quad: Vec<f64>,
    #[serde(default)]
    pub transcription: Option<String>,
    #[serde(default)]
    pub dont_care: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chars: Option<CharRecords>,
}

pub type CharRecords = Vec<Vec<f64>>;

/// Character boxes of one text instance (if listed) and its don't-care flag.
pub type CharGroup = (Option<Vec<QuadBox>>, bool);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolygonRecord {
    pub points: Vec<f64>,
    #[serde(default)]
    pub transcription: Option<String>,
    #[serde(default)]
    pub dont_care: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chars: Option<CharRecords>,
}

/// Raw file contents; [`AnnotationFile::validate`] checks geometry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnnotationFile {
    pub width: usize,
    pub height: usize,
    #[serde(default)]
    pub words: Vec<WordRecord>,
    #[serde(default)]
    pub polygons: Vec<PolygonRecord>,
}

fn quad_at(coords: &[f64], path: &str) -> Result<QuadBox, String> {
    if coords.len() != 8 {
        return Err(format!(
            "{path}: expected 8 coordinates, got {}",
            coords.len()
        ));
    }
    QuadBox::from_flat(coords).map_err(|e| format!("{path}: {e}"))
}

fn polygon_at(coords: &[f64], path: &str) -> Result<TextPolygon, String> {
    if coords.len() < 8 || !coords.len().is_multiple_of(4) {
        return Err(format!(
            "{path}: expected an even number (>= 4) of points, got {} coordinates",
            coords.len()
        ));
    }
    let pts = coords
        .chunks_exact(2)
        .map(|c| Point::new(c[0], c[1]))
        .collect();
    TextPolygon::new(pts).map_err(|e| format!("{path}: {e}"))
}

impl AnnotationFile {
    pub fn new(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            words: Vec::new(),
            polygons: Vec::new(),
        }
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let file: AnnotationFile = serde_json::from_str(text).map_err(|e| e.to_string())?;
        file.validate()?;
        Ok(file)
    }

    pub fn load(path: &Path) -> Result<Self, IoError> {
        let bytes = read_bytes(path)?;
        let text =
            std::str::from_utf8(&bytes).map_err(|e| IoError::malformed(path, e.to_string()))?;
        Self::parse(text).map_err(|m| IoError::malformed(path, m))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("annotation serializes");
        s.push('\n');
        s
    }

    pub fn save(&self, path: &Path) -> Result<(), IoError> {
        write_bytes(path, self.to_json().as_bytes())
    }

    /// Checks every record; the error names the first offending record,
    /// e.g. `words[2].quad: expected 8 coordinates, got 7`.
    pub fn validate(&self) -> Result<(), String> {
        if self.width == 0 || self.height == 0 {
            return Err(format!(
                "image size {}x{} must be positive",
                self.width, self.height
            ));
        }
        self.word_annotations()?;
        self.character_boxes()?;
        self.text_polygons()?;
        Ok(())
    }

    pub fn word_annotations(&self) -> Result<Vec<WordAnnotation>, String> {
        self.words
            .iter()
            .enumerate()
            .map(|(i, w)| {
                let quad = quad_at(&w.quad, &format!("words[{i}].quad"))?;
                Ok(WordAnnotation::new(
                    quad,
                    w.transcription.clone(),
                    w.dont_care,
                ))
            })
            .collect()
    }

    /// Character boxes of every text instance, words first and then
    /// polygons, with the instance's don't-care flag. `None` marks an
    /// instance without a `chars` list.
    pub fn character_boxes(&self) -> Result<Vec<CharGroup>, String> {
        let words = self.words.iter().map(|w| (&w.chars, w.dont_care, "words"));
        let polys = self
            .polygons
            .iter()
            .map(|p| (&p.chars, p.dont_care, "polygons"));
        let mut index = (0usize, 0usize);
        words
            .chain(polys)
            .map(|(chars, dont_care, kind)| {
                let i = if kind == "words" {
                    &mut index.0
                } else {
                    &mut index.1
                };
                let at = *i;
                *i += 1;
                let boxes = chars
                    .as_ref()
                    .map(|chars| {
                        chars
                            .iter()
                            .enumerate()
                            .map(|(k, c)| quad_at(c, &format!("{kind}[{at}].chars[{k}]")))
                            .collect::<Result<Vec<_>, _>>()
                    })
                    .transpose()?;
                Ok((boxes, dont_care))
            })
            .collect()
    }

    pub fn text_polygons(&self) -> Result<Vec<TextPolygon>, String> {
        self.polygons
            .iter()
            .enumerate()
            .map(|(i, p)| polygon_at(&p.points, &format!("polygons[{i}].points")))
            .collect()
    }

    /// Every word quad and polygon as an evaluation region.
    pub fn regions(&self) -> Result<Vec<GtRegion>, String> {
        let mut out: Vec<GtRegion> = self
            .word_annotations()?
            .into_iter()
            .map(|w| GtRegion {
                points: w.quad.corners().to_vec(),
                dont_care: w.dont_care,
            })
            .collect();
        for (poly, rec) in self.text_polygons()?.into_iter().zip(&self.polygons) {
            out.push(GtRegion {
                points: poly.points().to_vec(),
                dont_care: rec.dont_care,
            });
        }
        Ok(out)
    }

    pub fn push_quad(&mut self, quad: &QuadBox, transcription: Option<String>, dont_care: bool) {
        self.words.push(WordRecord {
            quad: quad.to_flat().to_vec(),
            transcription,
            dont_care,
            chars: None,
        });
    }

    pub fn push_polygon(
        &mut self,
        poly: &TextPolygon,
        transcription: Option<String>,
        dont_care: bool,
    ) {
        self.polygons.push(PolygonRecord {
            points: poly.points().iter().flat_map(|p| [p.x, p.y]).collect(),
            transcription,
            dont_care,
            chars: None,
        });
    }
}
