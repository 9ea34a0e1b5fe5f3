//! Binary maps and 8-connected component labeling.

use crate::error::Result;
use crate::scoremap::ScoreMap;

use super::Thresholds;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMap {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl BinaryMap {
    pub fn new(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            bits: vec![false; width * height],
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut bits = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                bits.push(f(x, y));
            }
        }
        Self {
            width,
            height,
            bits,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: bool) {
        self.bits[y * self.width + x] = v;
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }
}

/// `M(p) = [S_r(p) > tau_r] or [S_a(p) > tau_a]`, strict on both sides.
pub fn binarize(region: &ScoreMap, affinity: &ScoreMap, t: &Thresholds) -> Result<BinaryMap> {
    region.ensure_same_dims(affinity)?;
    let (tr, ta) = (t.tau_r() as f32, t.tau_a() as f32);
    Ok(BinaryMap::from_fn(
        region.width(),
        region.height(),
        |x, y| region.get(x, y) > tr || affinity.get(x, y) > ta,
    ))
}

/// Label grid (0 = background) with labels `1..=count` assigned in the
/// raster order of each component's first pixel.
#[derive(Debug, Clone)]
pub struct LabeledComponents {
    width: usize,
    height: usize,
    labels: Vec<u32>,
    components: Vec<Vec<(usize, usize)>>,
}

impl LabeledComponents {
    pub fn count(&self) -> usize {
        self.components.len()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn label(&self, x: usize, y: usize) -> u32 {
        self.labels[y * self.width + x]
    }

    /// Pixels of component `label` (1-based) in raster order.
    pub fn pixels(&self, label: u32) -> &[(usize, usize)] {
        &self.components[label as usize - 1]
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, &[(usize, usize)])> {
        self.components
            .iter()
            .enumerate()
            .map(|(i, px)| (i as u32 + 1, px.as_slice()))
    }
}

fn find(parent: &mut [u32], mut x: u32) -> u32 {
    while parent[x as usize] != x {
        let p = parent[x as usize];
        parent[x as usize] = parent[p as usize];
        x = p;
    }
    x
}

fn union(parent: &mut [u32], a: u32, b: u32) -> u32 {
    let (ra, rb) = (find(parent, a), find(parent, b));
    let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
    parent[hi as usize] = lo;
    lo
}

/// Two-pass union-find labeling with 8-connectivity.
pub fn connected_components(m: &BinaryMap) -> LabeledComponents {
    let (w, h) = (m.width, m.height);
    let mut provisional = vec![0u32; w * h];
    // index 0 unused so provisional label 0 can mean background
    let mut parent: Vec<u32> = vec![0];

    for y in 0..h {
        for x in 0..w {
            if !m.get(x, y) {
                continue;
            }
            let mut label = 0u32;
            let mut neighbours = [0u32; 4];
            if x > 0 {
                neighbours[0] = provisional[y * w + x - 1];
            }
            if y > 0 {
                let row = (y - 1) * w;
                if x > 0 {
                    neighbours[1] = provisional[row + x - 1];
                }
                neighbours[2] = provisional[row + x];
                if x + 1 < w {
                    neighbours[3] = provisional[row + x + 1];
                }
            }
            for &n in neighbours.iter().filter(|&&n| n != 0) {
                label = if label == 0 {
                    find(&mut parent, n)
                } else {
                    union(&mut parent, label, n)
                };
            }
            if label == 0 {
                label = parent.len() as u32;
                parent.push(label);
            }
            provisional[y * w + x] = label;
        }
    }

    let mut remap = vec![0u32; parent.len()];
    let mut labels = vec![0u32; w * h];
    let mut components: Vec<Vec<(usize, usize)>> = Vec::new();
    for y in 0..h {
        for x in 0..w {
            let p = provisional[y * w + x];
            if p == 0 {
                continue;
            }
            let root = find(&mut parent, p) as usize;
            if remap[root] == 0 {
                components.push(Vec::new());
                remap[root] = components.len() as u32;
            }
            let label = remap[root];
            labels[y * w + x] = label;
            components[label as usize - 1].push((x, y));
        }
    }

    LabeledComponents {
        width: w,
        height: h,
        labels,
        components,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn from_rows(rows: &[&str]) -> BinaryMap {
        let h = rows.len();
        let w = rows[0].len();
        BinaryMap::from_fn(w, h, |x, y| rows[y].as_bytes()[x] == b'#')
    }

    /// Independent stack flood fill used as the reference labeling.
    fn flood_fill_count(m: &BinaryMap) -> usize {
        let mut seen = vec![false; m.width() * m.height()];
        let mut count = 0;
        for sy in 0..m.height() {
            for sx in 0..m.width() {
                if !m.get(sx, sy) || seen[sy * m.width() + sx] {
                    continue;
                }
                count += 1;
                let mut stack = vec![(sx, sy)];
                seen[sy * m.width() + sx] = true;
                while let Some((x, y)) = stack.pop() {
                    for dy in -1i64..=1 {
                        for dx in -1i64..=1 {
                            let nx = x as i64 + dx;
                            let ny = y as i64 + dy;
                            if nx < 0 || ny < 0 || nx >= m.width() as i64 || ny >= m.height() as i64
                            {
                                continue;
                            }
                            let (nx, ny) = (nx as usize, ny as usize);
                            if m.get(nx, ny) && !seen[ny * m.width() + nx] {
                                seen[ny * m.width() + nx] = true;
                                stack.push((nx, ny));
                            }
                        }
                    }
                }
            }
        }
        count
    }

    #[test]
    fn empty_map_has_no_components() {
        let c = connected_components(&BinaryMap::new(5, 4));
        assert_eq!(c.count(), 0);
    }

    #[test]
    fn diagonal_pixels_join() {
        let m = from_rows(&["#.", ".#"]);
        assert_eq!(flood_fill_count(&m), 1);
        let c = connected_components(&m);
        assert_eq!(c.count(), 1);
        assert_eq!(c.label(1, 1), 1);
    }

    #[test]
    fn checkerboard_is_one_component() {
        let m = BinaryMap::from_fn(4, 4, |x, y| (x + y) % 2 == 0);
        assert_eq!(flood_fill_count(&m), 1);
        assert_eq!(connected_components(&m).count(), 1);
    }

    #[test]
    fn labels_follow_first_encounter_order() {
        // the U shape's two arms are discovered first but merge later
        let m = from_rows(&["#.#..#", "#.#...", "###..#"]);
        let c = connected_components(&m);
        assert_eq!(c.count(), 3);
        assert_eq!(c.label(0, 0), 1);
        assert_eq!(c.label(2, 0), 1);
        assert_eq!(c.label(5, 0), 2);
        assert_eq!(c.label(5, 2), 3);
        assert_eq!(c.pixels(1).len(), 7);
    }

    #[test]
    fn matches_flood_fill_on_noise() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let m = BinaryMap::from_fn(23, 17, |_, _| rng.gen_bool(0.4));
            let c = connected_components(&m);
            assert_eq!(c.count(), flood_fill_count(&m));
            let total: usize = c.iter().map(|(_, px)| px.len()).sum();
            assert_eq!(total, m.count_ones());
        }
    }
}
