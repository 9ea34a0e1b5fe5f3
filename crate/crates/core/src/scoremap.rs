//! Dense single-channel score grids.

use crate::error::{Error, Result};

/// Row-major grid of scores in `[0, 1]`, top-left origin.
///
/// Holds region, affinity, link and confidence maps alike.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreMap {
    width: usize,
    height: usize,
    values: Vec<f32>,
}

impl ScoreMap {
    /// All-zero map.
    pub fn new(width: usize, height: usize) -> Result<Self> {
        Self::filled(width, height, 0.0)
    }

    pub fn filled(width: usize, height: usize, value: f32) -> Result<Self> {
        check_dims(width, height)?;
        check_value(value)?;
        Ok(Self {
            width,
            height,
            values: vec![value; width * height],
        })
    }

    pub fn from_vec(width: usize, height: usize, values: Vec<f32>) -> Result<Self> {
        check_dims(width, height)?;
        if values.len() != width * height {
            return Err(Error::InvalidParameter(format!(
                "{} values for a {width}x{height} map",
                values.len()
            )));
        }
        values.iter().try_for_each(|&v| check_value(v))?;
        Ok(Self {
            width,
            height,
            values,
        })
    }

    /// Builds a map by evaluating `f(x, y)` at every pixel; results are
    /// clamped into `[0, 1]`.
    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> f32,
    ) -> Result<Self> {
        check_dims(width, height)?;
        let mut values = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                values.push(clamp_unit(f(x, y)));
            }
        }
        Ok(Self {
            width,
            height,
            values,
        })
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn values(&self) -> &[f32] {
        &self.values
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f32 {
        self.values[y * self.width + x]
    }

    /// Stores `value` clamped into `[0, 1]` (NaN becomes 0).
    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: f32) {
        self.values[y * self.width + x] = clamp_unit(value);
    }

    /// Raises the pixel to `value` if that is larger.
    #[inline]
    pub fn max_assign(&mut self, x: usize, y: usize, value: f32) {
        let v = &mut self.values[y * self.width + x];
        let value = clamp_unit(value);
        if value > *v {
            *v = value;
        }
    }

    /// Lowers the pixel to `value` if that is smaller.
    #[inline]
    pub fn min_assign(&mut self, x: usize, y: usize, value: f32) {
        let v = &mut self.values[y * self.width + x];
        let value = clamp_unit(value);
        if value < *v {
            *v = value;
        }
    }

    pub fn max_value(&self) -> f32 {
        self.values.iter().copied().fold(0.0, f32::max)
    }

    pub fn ensure_same_dims(&self, other: &ScoreMap) -> Result<()> {
        if self.dims() != other.dims() {
            return Err(Error::DimensionMismatch {
                expected: self.dims(),
                actual: other.dims(),
            });
        }
        Ok(())
    }

    /// Bilinear sample at continuous position `(x, y)` where pixel centers
    /// sit at half-integers. Positions inside the map footprint
    /// `[0, w] x [0, h]` but beyond the outer pixel centers replicate the
    /// border; positions outside the footprint read 0.
    pub fn sample_bilinear(&self, x: f64, y: f64) -> f32 {
        let (w, h) = (self.width as f64, self.height as f64);
        if !(x >= 0.0 && y >= 0.0 && x <= w && y <= h) {
            return 0.0;
        }
        let fx = (x - 0.5).clamp(0.0, w - 1.0);
        let fy = (y - 0.5).clamp(0.0, h - 1.0);
        let x0 = fx.floor() as usize;
        let y0 = fy.floor() as usize;
        let x1 = (x0 + 1).min(self.width - 1);
        let y1 = (y0 + 1).min(self.height - 1);
        let tx = fx - x0 as f64;
        let ty = fy - y0 as f64;
        let top = self.get(x0, y0) as f64 * (1.0 - tx) + self.get(x1, y0) as f64 * tx;
        let bottom = self.get(x0, y1) as f64 * (1.0 - tx) + self.get(x1, y1) as f64 * tx;
        (top * (1.0 - ty) + bottom * ty) as f32
    }

    /// Map with rows and columns swapped.
    pub fn transposed(&self) -> ScoreMap {
        let mut out = vec![0.0; self.values.len()];
        for y in 0..self.height {
            for x in 0..self.width {
                out[x * self.height + y] = self.get(x, y);
            }
        }
        ScoreMap {
            width: self.height,
            height: self.width,
            values: out,
        }
    }
}

#[inline]
fn clamp_unit(v: f32) -> f32 {
    if v.is_nan() {
        0.0
    } else {
        v.clamp(0.0, 1.0)
    }
}

fn check_dims(width: usize, height: usize) -> Result<()> {
    if width == 0 || height == 0 {
        return Err(Error::InvalidParameter(format!(
            "map dimensions must be >= 1, got {width}x{height}"
        )));
    }
    Ok(())
}

fn check_value(v: f32) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::InvalidParameter(format!("score {v} outside [0, 1]")));
    }
    Ok(())
}
