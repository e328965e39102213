//! Instance-segmentation scores: aggregated Jaccard index, global Dice, and
//! recognition / segmentation / panoptic quality under IoU > 0.5 matching.

use crate::error::Result;
use crate::raster::{BinaryGrid, LabelMap};
use std::collections::HashMap;

/// Intersection over union; two empty masks give 0.
pub fn iou(a: &BinaryGrid, b: &BinaryGrid) -> Result<f64> {
    a.require_same_dims("first mask", b, "second mask")?;
    let (mut inter, mut union) = (0usize, 0usize);
    for (&x, &y) in a.cells().iter().zip(b.cells()) {
        inter += (x && y) as usize;
        union += (x || y) as usize;
    }
    Ok(if union == 0 { 0.0 } else { inter as f64 / union as f64 })
}

/// Dice over the foregrounds (any nonzero label); both empty gives 1.
pub fn dice_global(gt: &LabelMap, pred: &LabelMap) -> Result<f64> {
    gt.require_same_dims("ground truth", pred, "prediction")?;
    let (mut inter, mut g, mut s) = (0usize, 0usize, 0usize);
    for (&a, &b) in gt.cells().iter().zip(pred.cells()) {
        g += (a != 0) as usize;
        s += (b != 0) as usize;
        inter += (a != 0 && b != 0) as usize;
    }
    Ok(if g + s == 0 {
        1.0
    } else {
        2.0 * inter as f64 / (g + s) as f64
    })
}

/// Pixel counts of every (ground truth, prediction) instance pair.
struct Overlaps {
    gt_labels: Vec<u32>,
    pred_labels: Vec<u32>,
    gt_sizes: Vec<usize>,
    pred_sizes: Vec<usize>,
    /// Row-major `gt × pred`.
    inter: Vec<usize>,
}

impl Overlaps {
    fn new(gt: &LabelMap, pred: &LabelMap) -> Result<Self> {
        gt.require_same_dims("ground truth", pred, "prediction")?;
        let gt_labels = gt.labels();
        let pred_labels = pred.labels();
        let index = |labels: &[u32]| -> HashMap<u32, usize> {
            labels.iter().enumerate().map(|(i, &l)| (l, i)).collect()
        };
        let (gi, pi) = (index(&gt_labels), index(&pred_labels));
        let np = pred_labels.len();
        let mut gt_sizes = vec![0; gt_labels.len()];
        let mut pred_sizes = vec![0; np];
        let mut inter = vec![0; gt_labels.len() * np];
        for (&g, &p) in gt.cells().iter().zip(pred.cells()) {
            let g = (g != 0).then(|| gi[&g]);
            let p = (p != 0).then(|| pi[&p]);
            if let Some(g) = g {
                gt_sizes[g] += 1;
            }
            if let Some(p) = p {
                pred_sizes[p] += 1;
            }
            if let (Some(g), Some(p)) = (g, p) {
                inter[g * np + p] += 1;
            }
        }
        Ok(Overlaps {
            gt_labels,
            pred_labels,
            gt_sizes,
            pred_sizes,
            inter,
        })
    }

    fn inter(&self, g: usize, p: usize) -> usize {
        self.inter[g * self.pred_labels.len() + p]
    }

    fn union(&self, g: usize, p: usize) -> usize {
        self.gt_sizes[g] + self.pred_sizes[p] - self.inter(g, p)
    }
}

/// Aggregated Jaccard index.
///
/// Each ground-truth instance (ascending label) takes the prediction with the
/// highest Jaccard index, ties going to the smaller prediction label; a
/// prediction may be taken by several instances. An instance with no overlap
/// adds its own size to the denominator. Predictions never taken add their
/// size to the denominator.
pub fn aji(gt: &LabelMap, pred: &LabelMap) -> Result<f64> {
    let ov = Overlaps::new(gt, pred)?;
    if ov.gt_labels.is_empty() && ov.pred_labels.is_empty() {
        return Ok(1.0);
    }
    let mut used = vec![false; ov.pred_labels.len()];
    let (mut num, mut den) = (0usize, 0usize);
    for g in 0..ov.gt_labels.len() {
        let mut best: Option<(usize, usize, usize)> = None; // (pred, inter, union)
        for p in 0..ov.pred_labels.len() {
            let i = ov.inter(g, p);
            if i == 0 {
                continue;
            }
            let u = ov.union(g, p);
            // i/u > bi/bu, compared exactly
            let better = match best {
                None => true,
                Some((_, bi, bu)) => (i as u128) * (bu as u128) > (bi as u128) * (u as u128),
            };
            if better {
                best = Some((p, i, u));
            }
        }
        match best {
            Some((p, i, u)) => {
                used[p] = true;
                num += i;
                den += u;
            }
            None => den += ov.gt_sizes[g],
        }
    }
    den += used
        .iter()
        .zip(&ov.pred_sizes)
        .filter(|(&u, _)| !u)
        .map(|(_, &s)| s)
        .sum::<usize>();
    Ok(if den == 0 { 0.0 } else { num as f64 / den as f64 })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchedPair {
    pub gt_label: u32,
    pub pred_label: u32,
    pub iou: f64,
}

/// One-to-one pairing of instances whose IoU exceeds 0.5.
#[derive(Debug, Clone, PartialEq)]
pub struct Matching {
    /// Ordered by ground-truth label.
    pub pairs: Vec<MatchedPair>,
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
}

/// Pairs every (gt, pred) with IoU strictly above 0.5. Such pairs are
/// necessarily one-to-one, which is asserted.
pub fn match_unique(gt: &LabelMap, pred: &LabelMap) -> Result<Matching> {
    let ov = Overlaps::new(gt, pred)?;
    let mut pairs = Vec::new();
    let mut pred_taken = vec![false; ov.pred_labels.len()];
    for g in 0..ov.gt_labels.len() {
        let mut gt_taken = false;
        for p in 0..ov.pred_labels.len() {
            let (i, u) = (ov.inter(g, p), ov.union(g, p));
            if 2 * i > u {
                assert!(
                    !gt_taken && !pred_taken[p],
                    "IoU > 0.5 matched an instance twice (gt {}, pred {})",
                    ov.gt_labels[g],
                    ov.pred_labels[p]
                );
                gt_taken = true;
                pred_taken[p] = true;
                pairs.push(MatchedPair {
                    gt_label: ov.gt_labels[g],
                    pred_label: ov.pred_labels[p],
                    iou: i as f64 / u as f64,
                });
            }
        }
    }
    let tp = pairs.len();
    Ok(Matching {
        tp,
        fp: ov.pred_labels.len() - tp,
        fn_: ov.gt_labels.len() - tp,
        pairs,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PanopticScores {
    pub rq: f64,
    pub sq: f64,
    pub pq: f64,
}

/// Recognition quality (F1 over matches), segmentation quality (mean matched
/// IoU) and their product. No instances on either side scores 1 throughout;
/// no matches gives `sq = 0`.
pub fn pq_scores(matching: &Matching) -> PanopticScores {
    let Matching { tp, fp, fn_, .. } = *matching;
    if tp + fp + fn_ == 0 {
        return PanopticScores {
            rq: 1.0,
            sq: 1.0,
            pq: 1.0,
        };
    }
    let rq = tp as f64 / (tp as f64 + 0.5 * fp as f64 + 0.5 * fn_ as f64);
    let sq = if tp == 0 {
        0.0
    } else {
        matching.pairs.iter().map(|p| p.iou).sum::<f64>() / tp as f64
    };
    PanopticScores { rq, sq, pq: rq * sq }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsReport {
    pub aji: f64,
    pub dice: f64,
    pub rq: f64,
    pub sq: f64,
    pub pq: f64,
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
}

impl MetricsReport {
    /// `{"aji":..,"dice":..,"rq":..,"sq":..,"pq":..,"tp":..,"fp":..,"fn":..}`
    /// with reals at six decimals.
    pub fn to_json(&self) -> String {
        format!(
            "{{\"aji\":{:.6},\"dice\":{:.6},\"rq\":{:.6},\"sq\":{:.6},\"pq\":{:.6},\"tp\":{},\"fp\":{},\"fn\":{}}}",
            self.aji, self.dice, self.rq, self.sq, self.pq, self.tp, self.fp, self.fn_
        )
    }
}

/// All five scores for one image, after compacting both maps.
pub fn evaluate(gt: &LabelMap, pred: &LabelMap) -> Result<MetricsReport> {
    gt.require_same_dims("ground truth", pred, "prediction")?;
    let gt = gt.relabel_compact();
    let pred = pred.relabel_compact();
    let matching = match_unique(&gt, &pred)?;
    let PanopticScores { rq, sq, pq } = pq_scores(&matching);
    Ok(MetricsReport {
        aji: aji(&gt, &pred)?,
        dice: dice_global(&gt, &pred)?,
        rq,
        sq,
        pq,
        tp: matching.tp,
        fp: matching.fp,
        fn_: matching.fn_,
    })
}
