//! Brute-force metric definitions: every quantity recounted from pixels for
//! every label pair, no contingency table.
#![allow(dead_code)]

use bendseg::raster::LabelMap;

pub struct BruteScores {
    pub aji: f64,
    pub dice: f64,
    /// `(gt label, pred label, iou)` for every pair with IoU > 0.5.
    pub pairs: Vec<(u32, u32, f64)>,
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    pub rq: f64,
    pub sq: f64,
    pub pq: f64,
}

fn distinct(map: &LabelMap) -> Vec<u32> {
    let mut out = Vec::new();
    for &l in map.cells() {
        if l != 0 && !out.contains(&l) {
            out.push(l);
        }
    }
    out.sort();
    out
}

fn area(map: &LabelMap, l: u32) -> usize {
    map.cells().iter().filter(|&&v| v == l).count()
}

fn inter(a: &LabelMap, la: u32, b: &LabelMap, lb: u32) -> usize {
    a.cells().iter().zip(b.cells()).filter(|&(&x, &y)| x == la && y == lb).count()
}

fn union(a: &LabelMap, la: u32, b: &LabelMap, lb: u32) -> usize {
    a.cells().iter().zip(b.cells()).filter(|&(&x, &y)| x == la || y == lb).count()
}

pub fn brute_scores(gt: &LabelMap, pred: &LabelMap) -> BruteScores {
    let g = distinct(gt);
    let p = distinct(pred);

    // aggregated Jaccard
    let aji = if g.is_empty() && p.is_empty() {
        1.0
    } else {
        let mut num = 0usize;
        let mut den = 0usize;
        let mut chosen: Vec<u32> = Vec::new();
        for &gl in &g {
            let mut best: Option<u32> = None;
            let mut best_j = 0.0f64;
            for &pl in &p {
                let i = inter(gt, gl, pred, pl);
                if i == 0 {
                    continue;
                }
                let j = i as f64 / union(gt, gl, pred, pl) as f64;
                if best.is_none() || j > best_j {
                    best = Some(pl);
                    best_j = j;
                }
            }
            match best {
                Some(pl) => {
                    num += inter(gt, gl, pred, pl);
                    den += union(gt, gl, pred, pl);
                    chosen.push(pl);
                }
                None => den += area(gt, gl),
            }
        }
        for &pl in &p {
            if !chosen.contains(&pl) {
                den += area(pred, pl);
            }
        }
        if den == 0 { 0.0 } else { num as f64 / den as f64 }
    };

    let fg_g = gt.cells().iter().filter(|&&v| v != 0).count();
    let fg_p = pred.cells().iter().filter(|&&v| v != 0).count();
    let both = gt.cells().iter().zip(pred.cells()).filter(|&(&a, &b)| a != 0 && b != 0).count();
    let dice = if fg_g + fg_p == 0 { 1.0 } else { 2.0 * both as f64 / (fg_g + fg_p) as f64 };

    let mut pairs = Vec::new();
    for &gl in &g {
        for &pl in &p {
            let iou = inter(gt, gl, pred, pl) as f64 / union(gt, gl, pred, pl) as f64;
            if iou > 0.5 {
                pairs.push((gl, pl, iou));
            }
        }
    }
    let tp = pairs.len();
    let fp = p.len() - tp;
    let fn_ = g.len() - tp;
    let (rq, sq) = if tp + fp + fn_ == 0 {
        (1.0, 1.0)
    } else {
        let rq = tp as f64 / (tp as f64 + (fp + fn_) as f64 / 2.0);
        let sq = if tp == 0 { 0.0 } else { pairs.iter().map(|t| t.2).sum::<f64>() / tp as f64 };
        (rq, sq)
    };
    BruteScores { aji, dice, pairs, tp, fp, fn_, rq, sq, pq: rq * sq }
}
