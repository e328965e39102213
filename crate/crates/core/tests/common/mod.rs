#![allow(dead_code)]

pub mod fixtures;
pub mod oracle;
pub mod walk;

use bendseg::raster::{BinaryGrid, Grid, LabelMap};

/// Test-local splitmix64, kept separate from the library generator.
pub struct Rng(u64);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    pub fn below(&mut self, n: u64) -> u64 {
        self.next_u64() % n
    }

    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }
}

/// The 8 symmetries of the square: `k` quarter turns, then an optional
/// horizontal flip.
pub fn dihedral<T: bendseg::raster::Cell>(g: &Grid<T>, k: u8, flip: bool) -> Grid<T> {
    let mut cur = g.clone();
    for _ in 0..k {
        let (w, h) = cur.dims();
        // rotate 90° clockwise: new (x, y) takes old (y, h - 1 - x)
        cur = Grid::from_fn(h, w, |x, y| cur.get(y, h - 1 - x)).unwrap();
    }
    if flip {
        let (w, h) = cur.dims();
        cur = Grid::from_fn(w, h, |x, y| cur.get(w - 1 - x, y)).unwrap();
    }
    cur
}

pub fn all_symmetries() -> Vec<(u8, bool)> {
    (0..4).flat_map(|k| [(k, false), (k, true)]).collect()
}

pub fn random_noise_mask(rng: &mut Rng, max_side: u64, density: f64) -> BinaryGrid {
    let w = 1 + rng.below(max_side) as usize;
    let h = 1 + rng.below(max_side) as usize;
    BinaryGrid::from_fn(w, h, |_, _| rng.unit() < density).unwrap()
}

/// Union of a few random disks and rectangles.
pub fn random_blob_mask(rng: &mut Rng, max_side: u64) -> BinaryGrid {
    let w = 4 + rng.below(max_side - 3) as usize;
    let h = 4 + rng.below(max_side - 3) as usize;
    let shapes: Vec<(u64, f64, f64, f64, f64)> = (0..1 + rng.below(4))
        .map(|_| {
            (
                rng.below(2),
                rng.unit() * w as f64,
                rng.unit() * h as f64,
                1.0 + rng.unit() * 6.0,
                1.0 + rng.unit() * 6.0,
            )
        })
        .collect();
    BinaryGrid::from_fn(w, h, |x, y| {
        shapes.iter().any(|&(kind, cx, cy, a, b)| {
            let (dx, dy) = (x as f64 - cx, y as f64 - cy);
            if kind == 0 {
                (dx / a).powi(2) + (dy / b).powi(2) <= 1.0
            } else {
                dx.abs() <= a && dy.abs() <= b
            }
        })
    })
    .unwrap()
}

/// Random label map with up to `max_labels` instances drawn as noisy blobs.
pub fn random_label_map(rng: &mut Rng, w: usize, h: usize, max_labels: u32) -> LabelMap {
    let k = rng.below(max_labels as u64 + 1) as u32;
    let centers: Vec<(f64, f64, f64)> = (0..k)
        .map(|_| (rng.unit() * w as f64, rng.unit() * h as f64, 1.0 + rng.unit() * 5.0))
        .collect();
    let mut cells = vec![0u32; w * h];
    for (i, &(cx, cy, r)) in centers.iter().enumerate() {
        for y in 0..h {
            for x in 0..w {
                let d = ((x as f64 - cx).powi(2) + (y as f64 - cy).powi(2)).sqrt();
                if d <= r && rng.unit() < 0.9 {
                    cells[y * w + x] = i as u32 + 1;
                }
            }
        }
    }
    LabelMap::new(w, h, cells).unwrap()
}
