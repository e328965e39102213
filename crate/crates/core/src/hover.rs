//! Instance separation from horizontal/vertical center-of-mass distance maps.
//!
//! Sobel responses of the two maps peak where neighboring instances meet;
//! thresholding that edge energy inside the probability mask yields one marker
//! per nucleus, and a priority flood over the energy grows the markers back to
//! the full mask.

use crate::error::{Error, Result};
use crate::raster::{connected_components, BinaryGrid, Connectivity, LabelMap, ScalarField};
use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Per-instance normalized offsets from the instance's center of mass.
#[derive(Debug, Clone, PartialEq)]
pub struct HoVerMaps {
    pub horizontal: ScalarField,
    pub vertical: ScalarField,
}

impl HoVerMaps {
    pub fn new(horizontal: ScalarField, vertical: ScalarField) -> Result<Self> {
        horizontal.require_same_dims("horizontal map", &vertical, "vertical map")?;
        Ok(HoVerMaps {
            horizontal,
            vertical,
        })
    }

    pub fn dims(&self) -> (usize, usize) {
        self.horizontal.dims()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PostprocessConfig {
    pub prob_threshold: f64,
    /// Marker pixels must have edge energy below this.
    pub edge_threshold: f64,
    /// Marker components smaller than this many pixels are dropped.
    pub min_marker_size: usize,
}

impl PostprocessConfig {
    pub fn validated(self) -> Result<Self> {
        if !(self.prob_threshold > 0.0 && self.prob_threshold < 1.0) {
            return Err(Error::validation(format!(
                "prob_threshold must lie in (0, 1), got {}",
                self.prob_threshold
            )));
        }
        if !(self.edge_threshold > 0.0 && self.edge_threshold < 1.0) {
            return Err(Error::validation(format!(
                "edge threshold must lie in (0, 1), got {}",
                self.edge_threshold
            )));
        }
        Ok(self)
    }
}

impl Default for PostprocessConfig {
    fn default() -> Self {
        PostprocessConfig {
            prob_threshold: 0.5,
            edge_threshold: 0.4,
            min_marker_size: 10,
        }
    }
}

pub fn hover_from_labels(labels: &LabelMap) -> HoVerMaps {
    let w = labels.width();
    let n = labels.max_label() as usize + 1;
    let mut count = vec![0usize; n];
    let mut sum_x = vec![0.0f64; n];
    let mut sum_y = vec![0.0f64; n];
    for (i, &l) in labels.cells().iter().enumerate() {
        if l != 0 {
            count[l as usize] += 1;
            sum_x[l as usize] += (i % w) as f64;
            sum_y[l as usize] += (i / w) as f64;
        }
    }
    let center: Vec<(f64, f64)> = (0..n)
        .map(|l| {
            if count[l] == 0 {
                (0.0, 0.0)
            } else {
                (sum_x[l] / count[l] as f64, sum_y[l] / count[l] as f64)
            }
        })
        .collect();
    let mut reach = vec![(0.0f64, 0.0f64); n];
    for (i, &l) in labels.cells().iter().enumerate() {
        if l != 0 {
            let (cx, cy) = center[l as usize];
            let r = &mut reach[l as usize];
            r.0 = r.0.max(((i % w) as f64 - cx).abs());
            r.1 = r.1.max(((i / w) as f64 - cy).abs());
        }
    }
    let normalized = |d: f64, r: f64| if r > 0.0 { d / r } else { 0.0 };
    let mut horizontal = Vec::with_capacity(labels.len());
    let mut vertical = Vec::with_capacity(labels.len());
    for (i, &l) in labels.cells().iter().enumerate() {
        if l == 0 {
            horizontal.push(0.0);
            vertical.push(0.0);
        } else {
            let (cx, cy) = center[l as usize];
            let (rx, ry) = reach[l as usize];
            horizontal.push(normalized((i % w) as f64 - cx, rx));
            vertical.push(normalized((i / w) as f64 - cy, ry));
        }
    }
    HoVerMaps {
        horizontal: labels.with_cells(horizontal),
        vertical: labels.with_cells(vertical),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

/// 3×3 Sobel correlation with replicated borders.
///
/// `Axis::X` uses `[[-1, 0, 1], [-2, 0, 2], [-1, 0, 1]]`; `Axis::Y` its transpose.
pub fn sobel(field: &ScalarField, axis: Axis) -> ScalarField {
    const SMOOTH: [f64; 3] = [1.0, 2.0, 1.0];
    const DIFF: [f64; 3] = [-1.0, 0.0, 1.0];
    let (w, h) = field.dims();
    let at = |x: i64, y: i64| {
        let x = x.clamp(0, w as i64 - 1) as usize;
        let y = y.clamp(0, h as i64 - 1) as usize;
        field.get(x, y)
    };
    let mut out = Vec::with_capacity(field.len());
    for y in 0..h as i64 {
        for x in 0..w as i64 {
            let mut acc = 0.0;
            for j in 0..3 {
                for i in 0..3 {
                    let k = match axis {
                        Axis::X => SMOOTH[j] * DIFF[i],
                        Axis::Y => DIFF[j] * SMOOTH[i],
                    };
                    if k != 0.0 {
                        acc += k * at(x + i as i64 - 1, y + j as i64 - 1);
                    }
                }
            }
            out.push(acc);
        }
    }
    field.with_cells(out)
}

fn min_max_normalized(field: &ScalarField) -> ScalarField {
    let (lo, hi) = field
        .cells()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let span = hi - lo;
    field.with_cells(
        field
            .cells()
            .iter()
            .map(|&v| if span > 0.0 { (v - lo) / span } else { 0.0 })
            .collect(),
    )
}

/// `max(norm|∂h/∂x|, norm|∂v/∂y|)` with per-image min-max normalization.
pub fn edge_energy(maps: &HoVerMaps) -> ScalarField {
    let sx = min_max_normalized(&sobel(&maps.horizontal, Axis::X).map(|v| v.abs()).unwrap());
    let sy = min_max_normalized(&sobel(&maps.vertical, Axis::Y).map(|v| v.abs()).unwrap());
    sx.with_cells(
        sx.cells()
            .iter()
            .zip(sy.cells())
            .map(|(&a, &b)| a.max(b))
            .collect(),
    )
}

/// Confident pixels whose whole 3×3 neighbourhood is below the edge threshold,
/// grouped 8-connected, small groups dropped.
///
/// The 3×3 test thickens one-pixel energy ridges so diagonal steps along a
/// seam cannot join the markers of two touching instances.
pub fn extract_markers(prob: &ScalarField, energy: &ScalarField, cfg: &PostprocessConfig) -> Result<LabelMap> {
    let cfg = cfg.validated()?;
    prob.require_same_dims("probability map", energy, "edge energy")?;
    let (w, h) = prob.dims();
    let calm = |x: usize, y: usize| {
        (-1i64..=1).all(|dy| {
            (-1i64..=1).all(|dx| {
                energy
                    .get_signed(x as i64 + dx, y as i64 + dy)
                    .is_none_or(|e| e < cfg.edge_threshold)
            })
        })
    };
    let seeds = BinaryGrid::from_fn(w, h, |x, y| prob.get(x, y) > cfg.prob_threshold && calm(x, y))?;
    let components = connected_components(&seeds, Connectivity::Eight);
    let mut sizes = vec![0usize; components.max_label() as usize + 1];
    for &l in components.cells() {
        sizes[l as usize] += 1;
    }
    let kept = components.with_cells(
        components
            .cells()
            .iter()
            .map(|&l| if l != 0 && sizes[l as usize] >= cfg.min_marker_size { l } else { 0 })
            .collect(),
    );
    Ok(kept.relabel_compact())
}

#[derive(PartialEq)]
struct Entry {
    energy: f64,
    seq: u64,
    index: usize,
}

impl Eq for Entry {}

impl Ord for Entry {
    // reversed: BinaryHeap pops the lowest (energy, seq)
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .energy
            .total_cmp(&self.energy)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Marker-controlled priority flood over `fg` with 4-adjacency.
///
/// Ties in energy pop in insertion order. Foreground pixels the flood cannot
/// reach are grouped 4-connected and appended as new labels after the largest
/// marker label.
pub fn watershed(energy: &ScalarField, markers: &LabelMap, fg: &BinaryGrid) -> Result<LabelMap> {
    energy.require_same_dims("edge energy", markers, "markers")?;
    energy.require_same_dims("edge energy", fg, "foreground")?;
    let (w, h) = fg.dims();
    if let Some(i) = markers
        .cells()
        .iter()
        .zip(fg.cells())
        .position(|(&m, &f)| m != 0 && !f)
    {
        return Err(Error::validation(format!(
            "marker at ({}, {}) lies outside the foreground",
            i % w,
            i / w
        )));
    }

    let mut out = markers.cells().to_vec();
    let e = energy.cells();
    let mut heap = BinaryHeap::new();
    let mut seq = 0u64;
    for (i, &m) in out.iter().enumerate() {
        if m != 0 {
            heap.push(Entry { energy: e[i], seq, index: i });
            seq += 1;
        }
    }
    while let Some(Entry { index, .. }) = heap.pop() {
        let (x, y) = (index % w, index / w);
        let label = out[index];
        let neighbors = [
            (y > 0).then(|| index - w),
            (x > 0).then(|| index - 1),
            (x + 1 < w).then(|| index + 1),
            (y + 1 < h).then(|| index + w),
        ];
        for n in neighbors.into_iter().flatten() {
            if fg.cells()[n] && out[n] == 0 {
                out[n] = label;
                heap.push(Entry { energy: e[n], seq, index: n });
                seq += 1;
            }
        }
    }

    let leftover = fg.with_cells(
        out.iter()
            .zip(fg.cells())
            .map(|(&l, &f)| f && l == 0)
            .collect(),
    );
    let base = markers.max_label();
    let extra = connected_components(&leftover, Connectivity::Four);
    for (o, &l) in out.iter_mut().zip(extra.cells()) {
        if l != 0 {
            *o = base + l;
        }
    }
    Ok(markers.with_cells(out))
}

/// Edge energy, markers and watershed in one step; the result is compacted.
pub fn postprocess(prob: &ScalarField, maps: &HoVerMaps, cfg: &PostprocessConfig) -> Result<LabelMap> {
    let cfg = cfg.validated()?;
    prob.require_same_dims("probability map", &maps.horizontal, "hover maps")?;
    maps.horizontal
        .require_same_dims("horizontal map", &maps.vertical, "vertical map")?;
    let energy = edge_energy(maps);
    let markers = extract_markers(prob, &energy, &cfg)?;
    let fg = prob.threshold(cfg.prob_threshold);
    Ok(watershed(&energy, &markers, &fg)?.relabel_compact())
}
