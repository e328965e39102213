use super::{trace_outer_contours, Contour, EdgeVector, PixelPoint};
use crate::error::{Error, Result};
use crate::raster::BinaryGrid;

const NEIGHBOR_OFFSETS: [(i64, i64); 8] = [
    (-1, -1),
    (0, -1),
    (1, -1),
    (-1, 0),
    (1, 0),
    (-1, 1),
    (0, 1),
    (1, 1),
];

/// Largest bending energy any pair of distinct 8-neighbors can produce
/// (a 45° fold between an axis and a diagonal step).
pub const MAX_REGULAR_BE: f64 = 9.656854249492381;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BendConfig {
    /// Energy assigned where the contour folds back onto itself (one-pixel spurs).
    pub be_cap: f64,
    /// Curvature denominators below this are treated as a fold-back.
    pub epsilon: f64,
}

impl BendConfig {
    pub fn new(be_cap: f64, epsilon: f64) -> Result<Self> {
        if !(be_cap > MAX_REGULAR_BE) || !be_cap.is_finite() {
            return Err(Error::validation(format!(
                "be_cap must be finite and above {MAX_REGULAR_BE:.4}, got {be_cap}"
            )));
        }
        if !(epsilon > 0.0) || !epsilon.is_finite() {
            return Err(Error::validation(format!("epsilon must be positive, got {epsilon}")));
        }
        Ok(BendConfig { be_cap, epsilon })
    }
}

impl Default for BendConfig {
    fn default() -> Self {
        BendConfig {
            be_cap: 24.0,
            epsilon: 1e-9,
        }
    }
}

fn edges(prev: PixelPoint, cur: PixelPoint, next: PixelPoint) -> Result<(EdgeVector, EdgeVector)> {
    let incoming = EdgeVector::between(prev, cur);
    let outgoing = EdgeVector::between(cur, next);
    if incoming.is_zero() || outgoing.is_zero() {
        return Err(Error::validation(format!(
            "zero-length edge at ({}, {})",
            cur.x, cur.y
        )));
    }
    Ok((incoming, outgoing))
}

/// `None` when the two edges are antiparallel.
fn regular_curvature(incoming: EdgeVector, outgoing: EdgeVector, cfg: &BendConfig) -> Option<f64> {
    let denom = incoming.length() * outgoing.length() + incoming.dot(outgoing) as f64;
    if denom < cfg.epsilon {
        None
    } else {
        Some(2.0 * incoming.cross(outgoing).abs() as f64 / denom)
    }
}

/// Discrete curvature at `cur`.
///
/// At a fold-back the returned value is the one whose bending energy equals
/// `cfg.be_cap`.
pub fn curvature(prev: PixelPoint, cur: PixelPoint, next: PixelPoint, cfg: &BendConfig) -> Result<f64> {
    let (incoming, outgoing) = edges(prev, cur, next)?;
    Ok(regular_curvature(incoming, outgoing, cfg)
        .unwrap_or_else(|| (cfg.be_cap * (incoming.length() + outgoing.length())).sqrt()))
}

/// Bending energy `κ² / (|v_out| + |v_in|)` at `cur`, or `cfg.be_cap` at a fold-back.
pub fn bending_energy(
    prev: PixelPoint,
    cur: PixelPoint,
    next: PixelPoint,
    cfg: &BendConfig,
) -> Result<f64> {
    let (incoming, outgoing) = edges(prev, cur, next)?;
    Ok(match regular_curvature(incoming, outgoing, cfg) {
        Some(k) => k * k / (incoming.length() + outgoing.length()),
        None => cfg.be_cap,
    })
}

/// Smallest bending energy over every pair of distinct contour neighbors of
/// `cur`; used where more than two contour pixels touch a point.
pub fn point_bending_energy(neighbors: &[PixelPoint], cur: PixelPoint, cfg: &BendConfig) -> Result<f64> {
    let mut distinct: Vec<PixelPoint> = neighbors.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    if let Some(p) = distinct.iter().find(|p| !p.is_8_adjacent(cur)) {
        return Err(Error::validation(format!(
            "({}, {}) is not an 8-neighbor of ({}, {})",
            p.x, p.y, cur.x, cur.y
        )));
    }
    if distinct.len() < 2 {
        return Err(Error::validation(format!(
            "need at least two distinct neighbors, got {}",
            distinct.len()
        )));
    }
    let mut best = f64::INFINITY;
    for (i, &a) in distinct.iter().enumerate() {
        for &b in &distinct[i + 1..] {
            best = best.min(bending_energy(a, cur, b, cfg)?);
        }
    }
    Ok(best)
}

/// Traced contours with per-point energies and their image-level mean.
#[derive(Debug, Clone, PartialEq)]
pub struct BendingReport {
    pub contours: Vec<Contour>,
    /// Number of points entering the mean.
    pub m: usize,
    pub loss: f64,
}

pub fn bend_contours(mask: &BinaryGrid, cfg: &BendConfig) -> BendingReport {
    let mut contours = trace_outer_contours(mask);
    let (w, h) = mask.dims();
    let mut on_contour = vec![false; w * h];
    for c in &contours {
        for p in &c.points {
            on_contour[p.y as usize * w + p.x as usize] = true;
        }
    }
    let is_contour = |p: PixelPoint| {
        p.x >= 0 && p.y >= 0 && (p.x as usize) < w && (p.y as usize) < h
            && on_contour[p.y as usize * w + p.x as usize]
    };

    let mut energies = Vec::new();
    for contour in contours.iter_mut().filter(|c| c.is_measured()) {
        for i in 0..contour.len() {
            let cur = contour.points[i];
            let touching: Vec<PixelPoint> = NEIGHBOR_OFFSETS
                .iter()
                .map(|&(dx, dy)| cur.offset(dx, dy))
                .filter(|&q| is_contour(q))
                .collect();
            let be = if touching.len() > 2 {
                point_bending_energy(&touching, cur, cfg)
            } else {
                let (prev, next) = contour.neighbors_of(i);
                bending_energy(prev, cur, next, cfg)
            }
            .expect("traced contour steps are between distinct 8-neighbors");
            contour.per_point_be[i] = be;
            energies.push(be);
        }
    }

    let m = energies.len();
    // sorted summation makes the mean independent of trace order
    energies.sort_by(f64::total_cmp);
    let loss = if m == 0 {
        0.0
    } else {
        energies.iter().sum::<f64>() / m as f64
    };
    BendingReport { contours, m, loss }
}

/// Mean bending energy over all measured contour points of the mask.
pub fn bending_loss(mask: &BinaryGrid, cfg: &BendConfig) -> f64 {
    bend_contours(mask, cfg).loss
}

/// One local contour shape: step into the center pixel and step out of it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pattern {
    pub incoming: EdgeVector,
    pub outgoing: EdgeVector,
    pub be: f64,
}

/// All 28 shapes formed by an unordered pair of distinct 8-neighbors of a pixel.
pub fn enumerate_patterns(cfg: &BendConfig) -> Vec<Pattern> {
    let cur = PixelPoint::new(0, 0);
    let mut out = Vec::with_capacity(28);
    for (i, &(ax, ay)) in NEIGHBOR_OFFSETS.iter().enumerate() {
        for &(bx, by) in &NEIGHBOR_OFFSETS[i + 1..] {
            let prev = cur.offset(ax, ay);
            let next = cur.offset(bx, by);
            out.push(Pattern {
                incoming: EdgeVector::between(prev, cur),
                outgoing: EdgeVector::between(cur, next),
                be: bending_energy(prev, cur, next, cfg).expect("distinct neighbors"),
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const P0: PixelPoint = PixelPoint::new(0, 0);

    fn be(v1: (i64, i64), v2: (i64, i64)) -> f64 {
        let prev = PixelPoint::new(-v1.0, -v1.1);
        bending_energy(prev, P0, P0.offset(v2.0, v2.1), &BendConfig::default()).unwrap()
    }

    fn kappa(v1: (i64, i64), v2: (i64, i64)) -> f64 {
        let prev = PixelPoint::new(-v1.0, -v1.1);
        curvature(prev, P0, P0.offset(v2.0, v2.1), &BendConfig::default()).unwrap()
    }

    #[test]
    fn curvature_examples() {
        assert_eq!(kappa((1, 0), (1, 0)), 0.0);
        assert!((kappa((1, 0), (0, 1)) - 2.0).abs() < 1e-12);
        assert!((kappa((1, 0), (-1, 1)) - 2.0 / (2f64.sqrt() - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn bending_energy_matches_published_group_values() {
        assert_eq!(be((1, 0), (1, 0)), 0.0);
        assert!((be((1, 0), (1, 1)) - 0.284271).abs() < 1e-6);
        assert!((be((1, 1), (-1, 1)) - 2f64.sqrt()).abs() < 1e-12);
        assert!((be((1, 0), (0, 1)) - 2.0).abs() < 1e-12);
        assert!((be((1, 0), (-1, 1)) - MAX_REGULAR_BE).abs() < 1e-12);
        assert!((be((1, 0), (-1, 1)) * 10.0).round() == 97.0);
    }

    #[test]
    fn fold_back_gets_cap() {
        let cfg = BendConfig::default();
        let a = PixelPoint::new(1, 0);
        assert_eq!(bending_energy(a, P0, a, &cfg).unwrap(), 24.0);
        let k = curvature(a, P0, a, &cfg).unwrap();
        assert!((k * k / 2.0 - 24.0).abs() < 1e-12);
        let d = PixelPoint::new(1, 1);
        assert_eq!(bending_energy(d, P0, d, &cfg).unwrap(), 24.0);
    }

    #[test]
    fn zero_edge_is_rejected() {
        let cfg = BendConfig::default();
        assert!(curvature(P0, P0, PixelPoint::new(1, 0), &cfg).is_err());
        assert!(bending_energy(PixelPoint::new(1, 0), P0, P0, &cfg).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(BendConfig::new(9.0, 1e-9).is_err());
        assert!(BendConfig::new(9.7, 1e-9).is_ok());
        assert!(BendConfig::new(24.0, 0.0).is_err());
        assert!(BendConfig::new(f64::NAN, 1e-9).is_err());
    }

    #[test]
    fn min_rule_examples() {
        let cfg = BendConfig::default();
        let w = PixelPoint::new(-1, 0);
        let e = PixelPoint::new(1, 0);
        let ne = PixelPoint::new(1, -1);
        let n = PixelPoint::new(0, -1);
        assert_eq!(point_bending_energy(&[w, e], P0, &cfg).unwrap(), 0.0);
        assert_eq!(point_bending_energy(&[w, e, ne], P0, &cfg).unwrap(), 0.0);
        assert!((point_bending_energy(&[n, e], P0, &cfg).unwrap() - 2.0).abs() < 1e-12);
        assert!(point_bending_energy(&[n], P0, &cfg).is_err());
        assert!(point_bending_energy(&[n, n], P0, &cfg).is_err());
        assert!(point_bending_energy(&[n, PixelPoint::new(2, 0)], P0, &cfg).is_err());
    }

    #[test]
    fn three_neighbor_pairs_enumerated_by_hand() {
        // west–east 0, west–northeast 0.2843, east–northeast 9.657
        let cfg = BendConfig::default();
        let w = PixelPoint::new(-1, 0);
        let e = PixelPoint::new(1, 0);
        let ne = PixelPoint::new(1, -1);
        assert!((bending_energy(w, P0, ne, &cfg).unwrap() - 0.2843).abs() < 1e-4);
        assert!((bending_energy(e, P0, ne, &cfg).unwrap() - 9.657).abs() < 1e-3);
    }

    #[test]
    fn pattern_groups() {
        let pats = enumerate_patterns(&BendConfig::default());
        assert_eq!(pats.len(), 28);
        let count = |v: f64| pats.iter().filter(|p| (p.be - v).abs() < 1e-3).count();
        assert_eq!(count(0.0), 4);
        assert_eq!(count(0.2843), 8);
        assert_eq!(count(1.4142), 4);
        assert_eq!(count(2.0), 4);
        assert_eq!(count(9.657), 8);
    }

    fn rect(w: usize, h: usize) -> BinaryGrid {
        BinaryGrid::filled(w, h, true).unwrap()
    }

    #[test]
    fn filled_rectangles() {
        let cfg = BendConfig::default();
        assert!((bending_loss(&rect(3, 3), &cfg) - 1.0).abs() < 1e-9);
        assert!((bending_loss(&rect(5, 5), &cfg) - 0.5).abs() < 1e-9);
        assert!((bending_loss(&rect(5, 10), &cfg) - 8.0 / 26.0).abs() < 1e-9);
        assert_eq!(bend_contours(&rect(5, 5), &cfg).m, 16);
    }

    #[test]
    fn short_contours_are_excluded() {
        let cfg = BendConfig::default();
        assert_eq!(bending_loss(&BinaryGrid::filled(4, 4, false).unwrap(), &cfg), 0.0);
        let dot = BinaryGrid::from_fn(3, 3, |x, y| x == 1 && y == 1).unwrap();
        let r = bend_contours(&dot, &cfg);
        assert_eq!((r.m, r.loss), (0, 0.0));
        // a 1-pixel dot next to a 3x3 square does not dilute the mean
        let mixed = BinaryGrid::from_fn(6, 3, |x, _| x < 3).unwrap();
        let mut cells = mixed.into_cells();
        cells[6 + 5] = true;
        let mixed = BinaryGrid::new(6, 3, cells).unwrap();
        let r = bend_contours(&mixed, &cfg);
        assert_eq!(r.m, 8);
        assert!((r.loss - 1.0).abs() < 1e-12);
    }
}
