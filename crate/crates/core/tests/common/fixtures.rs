//! Frozen masks shared by several test targets.
#![allow(dead_code)]

use bendseg::raster::{BinaryGrid, ScalarField};

pub const DISK_RADIUS: f64 = 6.0;
pub const DISK_A: (f64, f64) = (8.0, 10.0);
pub const DISK_B: (f64, f64) = (17.0, 10.0);

pub fn disks(w: usize, h: usize, centres: &[(f64, f64)], r: f64) -> BinaryGrid {
    BinaryGrid::from_fn(w, h, |x, y| {
        centres.iter().any(|&(cx, cy)| (x as f64 - cx).powi(2) + (y as f64 - cy).powi(2) <= r * r)
    })
    .unwrap()
}

/// Two radius-6 disks with centres 9 px apart.
pub fn merged_disks() -> BinaryGrid {
    disks(26, 21, &[DISK_A, DISK_B], DISK_RADIUS)
}

/// The same two disks, 16 px apart.
pub fn separated_disks() -> BinaryGrid {
    disks(33, 21, &[DISK_A, (DISK_A.0 + 16.0, DISK_A.1)], DISK_RADIUS)
}

/// Where the two circle outlines of [`merged_disks`] cross.
pub fn disk_intersections() -> [(f64, f64); 2] {
    let half = (DISK_B.0 - DISK_A.0) / 2.0;
    let rise = (DISK_RADIUS * DISK_RADIUS - half * half).sqrt();
    let mx = DISK_A.0 + half;
    [(mx, DISK_A.1 - rise), (mx, DISK_A.1 + rise)]
}

/// Two 5×5 squares joined by a 3×1 neck on which the probability is 0.45.
pub fn dumbbell_prob() -> ScalarField {
    ScalarField::from_fn(15, 7, |x, y| {
        let square = (1..6).contains(&y) && ((1..6).contains(&x) || (9..14).contains(&x));
        if square {
            1.0
        } else if y == 3 && (6..9).contains(&x) {
            0.45
        } else {
            0.0
        }
    })
    .unwrap()
}
