//! Second boundary route for star-shaped masks: boundary pixels sorted by
//! angle around a centre, energies from the turning angle.
#![allow(dead_code)]

use bendseg::raster::BinaryGrid;

/// Foreground pixels with a 4-neighbour outside the foreground.
pub fn boundary_pixels(mask: &BinaryGrid) -> Vec<(i64, i64)> {
    let (w, h) = mask.dims();
    let fg = |x: i64, y: i64| x >= 0 && y >= 0 && (x as usize) < w && (y as usize) < h && mask.get(x as usize, y as usize);
    let mut out = Vec::new();
    for y in 0..h as i64 {
        for x in 0..w as i64 {
            if fg(x, y) && [(1, 0), (-1, 0), (0, 1), (0, -1)].iter().any(|&(dx, dy)| !fg(x + dx, y + dy)) {
                out.push((x, y));
            }
        }
    }
    out
}

/// Boundary of the pixels in `region` ordered by angle around `centre`.
/// Panics if consecutive pixels are not 8-adjacent (mask not star-shaped
/// about the centre at pixel scale).
pub fn angular_walk(mask: &BinaryGrid, centre: (f64, f64)) -> Vec<(i64, i64)> {
    let mut pts = boundary_pixels(mask);
    let angle = |&(x, y): &(i64, i64)| (y as f64 - centre.1).atan2(x as f64 - centre.0);
    pts.sort_by(|a, b| angle(a).total_cmp(&angle(b)));
    for i in 0..pts.len() {
        let (a, b) = (pts[i], pts[(i + 1) % pts.len()]);
        let (dx, dy) = ((a.0 - b.0).abs(), (a.1 - b.1).abs());
        assert!(dx <= 1 && dy <= 1 && (dx, dy) != (0, 0), "walk broke between {a:?} and {b:?}");
    }
    pts
}

/// Energy from the turning angle θ between incoming and outgoing steps:
/// curvature 2·tan(θ/2) squared over the summed step lengths.
pub fn turning_energy(prev: (i64, i64), cur: (i64, i64), next: (i64, i64), cap: f64) -> f64 {
    let (ax, ay) = ((cur.0 - prev.0) as f64, (cur.1 - prev.1) as f64);
    let (bx, by) = ((next.0 - cur.0) as f64, (next.1 - cur.1) as f64);
    let mut theta = (by.atan2(bx) - ay.atan2(ax)).abs();
    if theta > std::f64::consts::PI {
        theta = 2.0 * std::f64::consts::PI - theta;
    }
    if (std::f64::consts::PI - theta).abs() < 1e-9 {
        return cap;
    }
    let k = 2.0 * (theta / 2.0).tan();
    k * k / (ax.hypot(ay) + bx.hypot(by))
}

pub fn walk_energies(walk: &[(i64, i64)], cap: f64) -> Vec<f64> {
    let n = walk.len();
    (0..n)
        .map(|i| turning_energy(walk[(i + n - 1) % n], walk[i], walk[(i + 1) % n], cap))
        .collect()
}

/// Mean energy over several walks.
pub fn walk_loss(walks: &[Vec<(i64, i64)>], cap: f64) -> f64 {
    let all: Vec<f64> = walks.iter().flat_map(|w| walk_energies(w, cap)).collect();
    all.iter().sum::<f64>() / all.len() as f64
}
