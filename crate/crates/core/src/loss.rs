//! Composite segmentation loss `l1 + alpha * l_bend` and a greedy refiner
//! that lowers it by flipping boundary pixels.

use crate::contour::{bending_loss, BendConfig};
use crate::error::{Error, Result};
use crate::raster::{BinaryGrid, ScalarField};

/// Per-pixel data term.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PixelLoss {
    CrossEntropy,
    DiceLoss,
    Mse,
}

impl std::str::FromStr for PixelLoss {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ce" | "cross_entropy" => Ok(PixelLoss::CrossEntropy),
            "dice" | "dice_loss" => Ok(PixelLoss::DiceLoss),
            "mse" => Ok(PixelLoss::Mse),
            other => Err(Error::validation(format!("unknown pixel loss {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossConfig {
    /// Weight of the bending term.
    pub alpha: f64,
    pub l1_kind: PixelLoss,
    /// Binarization threshold applied before contours are traced.
    pub prob_threshold: f64,
    /// Cross-entropy clamps probabilities to `[eps, 1 - eps]`.
    pub clamp_epsilon: f64,
}

impl LossConfig {
    pub fn new(alpha: f64, l1_kind: PixelLoss) -> Result<Self> {
        LossConfig {
            alpha,
            l1_kind,
            ..LossConfig::default()
        }
        .validated()
    }

    pub fn validated(self) -> Result<Self> {
        if !(self.alpha >= 0.0) || !self.alpha.is_finite() {
            return Err(Error::validation(format!("alpha must be >= 0, got {}", self.alpha)));
        }
        if !(self.prob_threshold > 0.0 && self.prob_threshold < 1.0) {
            return Err(Error::validation(format!(
                "prob_threshold must lie in (0, 1), got {}",
                self.prob_threshold
            )));
        }
        if !(self.clamp_epsilon > 0.0 && self.clamp_epsilon < 0.5) {
            return Err(Error::validation(format!(
                "clamp_epsilon must lie in (0, 0.5), got {}",
                self.clamp_epsilon
            )));
        }
        Ok(self)
    }
}

impl Default for LossConfig {
    fn default() -> Self {
        LossConfig {
            alpha: 1.0,
            l1_kind: PixelLoss::Mse,
            prob_threshold: 0.5,
            clamp_epsilon: 1e-7,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossBreakdown {
    pub l1: f64,
    pub l_bend: f64,
    pub total: f64,
}

fn check_inputs(pred: &ScalarField, gt: &BinaryGrid) -> Result<()> {
    pred.require_same_dims("prediction", gt, "ground truth")?;
    if let Some(i) = pred.cells().iter().position(|v| !(0.0..=1.0).contains(v)) {
        return Err(Error::validation(format!(
            "prediction value {} at ({}, {}) outside [0, 1]",
            pred.cells()[i],
            i % pred.width(),
            i / pred.width()
        )));
    }
    Ok(())
}

/// Data term between a probability map and a target mask.
pub fn pixel_loss(pred: &ScalarField, gt: &BinaryGrid, kind: PixelLoss, clamp_epsilon: f64) -> Result<f64> {
    check_inputs(pred, gt)?;
    Ok(pixel_loss_unchecked(pred, gt, kind, clamp_epsilon))
}

fn pixel_loss_unchecked(pred: &ScalarField, gt: &BinaryGrid, kind: PixelLoss, eps: f64) -> f64 {
    let pairs = pred.cells().iter().zip(gt.cells());
    let n = pred.len() as f64;
    match kind {
        PixelLoss::CrossEntropy => {
            pairs
                .map(|(&p, &y)| {
                    let p = p.clamp(eps, 1.0 - eps);
                    if y {
                        -p.ln()
                    } else {
                        -(1.0 - p).ln()
                    }
                })
                .sum::<f64>()
                / n
        }
        PixelLoss::DiceLoss => {
            let (mut inter, mut sum_p, mut sum_y) = (0.0, 0.0, 0.0);
            for (&p, &y) in pairs {
                sum_p += p;
                if y {
                    inter += p;
                    sum_y += 1.0;
                }
            }
            if sum_p + sum_y == 0.0 {
                0.0
            } else {
                1.0 - 2.0 * inter / (sum_p + sum_y)
            }
        }
        PixelLoss::Mse => {
            pairs
                .map(|(&p, &y)| {
                    let d = p - if y { 1.0 } else { 0.0 };
                    d * d
                })
                .sum::<f64>()
                / n
        }
    }
}

/// `l1 + alpha * l_bend`, with the bending term measured on the thresholded prediction.
pub fn total_loss(
    pred: &ScalarField,
    gt: &BinaryGrid,
    cfg: &LossConfig,
    bend_cfg: &BendConfig,
) -> Result<LossBreakdown> {
    let cfg = cfg.validated()?;
    check_inputs(pred, gt)?;
    let l1 = pixel_loss_unchecked(pred, gt, cfg.l1_kind, cfg.clamp_epsilon);
    let l_bend = bending_loss(&pred.threshold(cfg.prob_threshold), bend_cfg);
    Ok(LossBreakdown {
        l1,
        l_bend,
        total: l1 + cfg.alpha * l_bend,
    })
}

/// Result of [`refine_mask_traced`].
#[derive(Debug, Clone, PartialEq)]
pub struct Refinement {
    pub mask: BinaryGrid,
    /// Objective of the initial mask followed by the value after each accepted flip.
    pub totals: Vec<f64>,
    /// Full scans performed.
    pub passes: usize,
    pub converged: bool,
}

/// Greedy local search over boundary pixels, see [`refine_mask_traced`].
pub fn refine_mask(
    prob: &ScalarField,
    init: &BinaryGrid,
    cfg: &LossConfig,
    bend_cfg: &BendConfig,
    max_iters: usize,
) -> Result<BinaryGrid> {
    refine_mask_traced(prob, init, cfg, bend_cfg, max_iters).map(|r| r.mask)
}

/// Minimizes `pixel_loss(prob, mask) + alpha * bending_loss(mask)` over masks.
///
/// Each pass scans row-major over pixels that have a 4-neighbor in the other
/// state and keeps a flip only if it strictly lowers the objective. Stops after
/// a pass without flips or after `max_iters` passes.
pub fn refine_mask_traced(
    prob: &ScalarField,
    init: &BinaryGrid,
    cfg: &LossConfig,
    bend_cfg: &BendConfig,
    max_iters: usize,
) -> Result<Refinement> {
    let cfg = cfg.validated()?;
    check_inputs(prob, init)?;
    let objective = |mask: &BinaryGrid| {
        pixel_loss_unchecked(prob, mask, cfg.l1_kind, cfg.clamp_epsilon)
            + cfg.alpha * bending_loss(mask, bend_cfg)
    };

    let (w, h) = init.dims();
    let mut cells = init.cells().to_vec();
    let mut current = objective(init);
    let mut totals = vec![current];
    let mut passes = 0;
    let mut converged = false;

    while passes < max_iters {
        passes += 1;
        let mut flipped = false;
        for i in 0..cells.len() {
            let (x, y) = (i % w, i / w);
            let on_boundary = [(0i64, -1i64), (-1, 0), (1, 0), (0, 1)].iter().any(|&(dx, dy)| {
                let (nx, ny) = (x as i64 + dx, y as i64 + dy);
                nx >= 0
                    && ny >= 0
                    && (nx as usize) < w
                    && (ny as usize) < h
                    && cells[ny as usize * w + nx as usize] != cells[i]
            });
            if !on_boundary {
                continue;
            }
            cells[i] = !cells[i];
            let candidate = init.with_cells(cells.clone());
            let value = objective(&candidate);
            if value < current {
                current = value;
                totals.push(value);
                flipped = true;
            } else {
                cells[i] = !cells[i];
            }
        }
        if !flipped {
            converged = true;
            break;
        }
    }

    Ok(Refinement {
        mask: init.with_cells(cells),
        totals,
        passes,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square_field(w: usize, h: usize, x0: usize, y0: usize, side: usize) -> ScalarField {
        ScalarField::from_fn(w, h, |x, y| {
            if (x0..x0 + side).contains(&x) && (y0..y0 + side).contains(&y) {
                1.0
            } else {
                0.0
            }
        })
        .unwrap()
    }

    #[test]
    fn perfect_prediction_has_zero_data_term() {
        let pred = square_field(7, 7, 1, 1, 5);
        let gt = pred.threshold(0.5);
        assert_eq!(pixel_loss(&pred, &gt, PixelLoss::Mse, 1e-7).unwrap(), 0.0);
        assert_eq!(pixel_loss(&pred, &gt, PixelLoss::DiceLoss, 1e-7).unwrap(), 0.0);
        let ce = pixel_loss(&pred, &gt, PixelLoss::CrossEntropy, 1e-7).unwrap();
        assert!(ce <= 2.0 * 1e-7 * (1e-7f64).ln().abs());
    }

    #[test]
    fn data_term_arithmetic() {
        let half = ScalarField::filled(4, 2, 0.5).unwrap();
        let gt = BinaryGrid::from_fn(4, 2, |_, y| y == 0).unwrap();
        assert!((pixel_loss(&half, &gt, PixelLoss::Mse, 1e-7).unwrap() - 0.25).abs() < 1e-15);
        let zero = ScalarField::filled(3, 3, 0.0).unwrap();
        let all = BinaryGrid::filled(3, 3, true).unwrap();
        assert_eq!(pixel_loss(&zero, &all, PixelLoss::DiceLoss, 1e-7).unwrap(), 1.0);
        let none = BinaryGrid::filled(3, 3, false).unwrap();
        assert_eq!(pixel_loss(&zero, &none, PixelLoss::DiceLoss, 1e-7).unwrap(), 0.0);
    }

    #[test]
    fn rejects_bad_inputs() {
        let pred = ScalarField::filled(2, 2, 0.5).unwrap();
        let gt = BinaryGrid::filled(3, 2, false).unwrap();
        assert!(matches!(
            pixel_loss(&pred, &gt, PixelLoss::Mse, 1e-7),
            Err(Error::Validation(msg)) if msg.contains("2x2") && msg.contains("3x2")
        ));
        let out_of_range = ScalarField::filled(3, 2, 1.5).unwrap();
        assert!(pixel_loss(&out_of_range, &gt, PixelLoss::Mse, 1e-7).is_err());
        assert!(LossConfig::new(-1.0, PixelLoss::Mse).is_err());
        let bad_threshold = LossConfig { prob_threshold: 1.0, ..LossConfig::default() };
        assert!(bad_threshold.validated().is_err());
    }

    #[test]
    fn parses_kind_names() {
        assert_eq!("ce".parse::<PixelLoss>().unwrap(), PixelLoss::CrossEntropy);
        assert_eq!("dice".parse::<PixelLoss>().unwrap(), PixelLoss::DiceLoss);
        assert_eq!("mse".parse::<PixelLoss>().unwrap(), PixelLoss::Mse);
        assert!("l2".parse::<PixelLoss>().is_err());
    }

    #[test]
    fn composite_on_square() {
        let pred = square_field(7, 7, 1, 1, 5);
        let gt = pred.threshold(0.5);
        let cfg = LossConfig::new(1.0, PixelLoss::Mse).unwrap();
        let b = total_loss(&pred, &gt, &cfg, &BendConfig::default()).unwrap();
        assert_eq!(b.l1, 0.0);
        assert!((b.l_bend - 0.5).abs() < 1e-12);
        assert!((b.total - 0.5).abs() < 1e-12);
        let zero = LossConfig::new(0.0, PixelLoss::Mse).unwrap();
        let b0 = total_loss(&pred, &gt, &zero, &BendConfig::default()).unwrap();
        assert_eq!(b0.total, b0.l1);
    }

    #[test]
    fn refiner_edge_cases() {
        let prob = square_field(7, 7, 1, 1, 5);
        let init = prob.threshold(0.5);
        let cfg = LossConfig::default();
        let out = refine_mask(&prob, &init, &cfg, &BendConfig::default(), 0).unwrap();
        assert_eq!(out, init);
        let no_bend = LossConfig::new(0.0, PixelLoss::Mse).unwrap();
        let out = refine_mask(&prob, &init, &no_bend, &BendConfig::default(), 10).unwrap();
        assert_eq!(out, init);
        let wrong = BinaryGrid::filled(6, 7, false).unwrap();
        assert!(refine_mask(&prob, &wrong, &cfg, &BendConfig::default(), 3).is_err());
    }
}
