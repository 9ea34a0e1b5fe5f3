//! Marker-based watershed by priority flooding.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::postproc::LabeledComponents;
use crate::scoremap::ScoreMap;

/// Floods the inverted score map from `markers`, highest score first.
///
/// Pixels below `floor` are never labeled. Each flooded pixel takes the label
/// of the neighbour it was reached from; equal scores are processed in
/// insertion order, so the result is deterministic. Returns a row-major
/// label grid (0 = unassigned).
pub fn marker_watershed(score: &ScoreMap, markers: &LabeledComponents, floor: f32) -> Vec<u32> {
    let (w, h) = score.dims();
    debug_assert_eq!((markers.width(), markers.height()), (w, h));
    let mut labels = vec![0u32; w * h];
    let mut queued = vec![false; w * h];
    // scores are non-negative, so their bit patterns order like the values
    let mut heap: BinaryHeap<(u32, Reverse<u64>, usize)> = BinaryHeap::new();
    let mut seq = 0u64;

    for (label, pixels) in markers.iter() {
        for &(x, y) in pixels {
            let i = y * w + x;
            labels[i] = label;
            queued[i] = true;
            heap.push((score.get(x, y).to_bits(), Reverse(seq), i));
            seq += 1;
        }
    }

    while let Some((_, _, i)) = heap.pop() {
        let (x, y) = (i % w, i / w);
        let label = labels[i];
        let neighbours = [
            (x > 0).then(|| i - 1),
            (x + 1 < w).then(|| i + 1),
            (y > 0).then(|| i - w),
            (y + 1 < h).then(|| i + w),
        ];
        for j in neighbours.into_iter().flatten() {
            if queued[j] {
                continue;
            }
            let s = score.values()[j];
            if s < floor {
                continue;
            }
            queued[j] = true;
            labels[j] = label;
            heap.push((s.to_bits(), Reverse(seq), j));
            seq += 1;
        }
    }
    labels
}
