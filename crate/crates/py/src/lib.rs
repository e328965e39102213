//! Python bindings. Grids cross the boundary as nested lists, row-major
//! (`grid[y][x]`); masks accept any integers or bools, nonzero is foreground.

use bendseg::contour::{self, BendConfig, PixelPoint};
use bendseg::hover::{self, HoVerMaps, PostprocessConfig};
use bendseg::loss::{self, LossConfig, PixelLoss};
use bendseg::metrics;
use bendseg::raster::{BinaryGrid, Cell, Grid, LabelMap};
use bendseg::synth::{self, SceneParams};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn to_py(e: bendseg::Error) -> PyErr {
    match e {
        bendseg::Error::Capacity(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn grid<T: Cell>(rows: Vec<Vec<T>>) -> PyResult<Grid<T>> {
    let height = rows.len();
    let width = rows.first().map_or(0, Vec::len);
    if let Some((y, row)) = rows.iter().enumerate().find(|(_, r)| r.len() != width) {
        return Err(PyValueError::new_err(format!(
            "row {y} has {} entries, row 0 has {width}",
            row.len()
        )));
    }
    Grid::new(width, height, rows.into_iter().flatten().collect()).map_err(to_py)
}

fn mask(rows: Vec<Vec<i64>>) -> PyResult<BinaryGrid> {
    grid(rows.into_iter().map(|r| r.into_iter().map(|v| v != 0).collect()).collect())
}

fn rows<T: Cell>(g: &Grid<T>) -> Vec<Vec<T>> {
    g.cells().chunks(g.width()).map(<[T]>::to_vec).collect()
}

fn point((x, y): (i64, i64)) -> PixelPoint {
    PixelPoint::new(x, y)
}

fn bend_config(cap: f64) -> PyResult<BendConfig> {
    BendConfig::new(cap, BendConfig::default().epsilon).map_err(to_py)
}

/// Curvature at `cur` from the steps `prev -> cur -> next`.
#[pyfunction]
#[pyo3(signature = (prev, cur, next, cap = 24.0))]
fn curvature(prev: (i64, i64), cur: (i64, i64), next: (i64, i64), cap: f64) -> PyResult<f64> {
    contour::curvature(point(prev), point(cur), point(next), &bend_config(cap)?).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (prev, cur, next, cap = 24.0))]
fn bending_energy(prev: (i64, i64), cur: (i64, i64), next: (i64, i64), cap: f64) -> PyResult<f64> {
    contour::bending_energy(point(prev), point(cur), point(next), &bend_config(cap)?).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (mask_rows, cap = 24.0))]
fn bending_loss(mask_rows: Vec<Vec<i64>>, cap: f64) -> PyResult<f64> {
    Ok(contour::bending_loss(&mask(mask_rows)?, &bend_config(cap)?))
}

/// `(m, loss, contours)` where each contour is a list of `(x, y, energy)`.
#[pyfunction]
#[pyo3(signature = (mask_rows, cap = 24.0))]
fn bend_contours(mask_rows: Vec<Vec<i64>>, cap: f64) -> PyResult<(usize, f64, Vec<Vec<(i64, i64, f64)>>)> {
    let report = contour::bend_contours(&mask(mask_rows)?, &bend_config(cap)?);
    let contours = report
        .contours
        .iter()
        .map(|c| c.points.iter().zip(&c.per_point_be).map(|(p, &be)| (p.x, p.y, be)).collect())
        .collect();
    Ok((report.m, report.loss, contours))
}

/// Outer contours as lists of `(x, y)`.
#[pyfunction]
fn trace_contours(mask_rows: Vec<Vec<i64>>) -> PyResult<Vec<Vec<(i64, i64)>>> {
    Ok(contour::trace_outer_contours(&mask(mask_rows)?)
        .iter()
        .map(|c| c.points.iter().map(|p| (p.x, p.y)).collect())
        .collect())
}

/// `((dx_in, dy_in), (dx_out, dy_out), energy)` for every neighbour pair.
#[pyfunction]
#[pyo3(signature = (cap = 24.0))]
fn enumerate_patterns(cap: f64) -> PyResult<Vec<((i64, i64), (i64, i64), f64)>> {
    Ok(contour::enumerate_patterns(&bend_config(cap)?)
        .iter()
        .map(|p| ((p.incoming.dx, p.incoming.dy), (p.outgoing.dx, p.outgoing.dy), p.be))
        .collect())
}

#[pyclass(name = "MetricsReport", get_all, frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyMetricsReport {
    aji: f64,
    dice: f64,
    rq: f64,
    sq: f64,
    pq: f64,
    tp: usize,
    fp: usize,
    #[pyo3(name = "fn_")]
    fn_: usize,
}

#[pymethods]
impl PyMetricsReport {
    fn to_json(&self) -> String {
        metrics::MetricsReport {
            aji: self.aji,
            dice: self.dice,
            rq: self.rq,
            sq: self.sq,
            pq: self.pq,
            tp: self.tp,
            fp: self.fp,
            fn_: self.fn_,
        }
        .to_json()
    }

    fn __repr__(&self) -> String {
        format!(
            "MetricsReport(aji={:.6}, dice={:.6}, rq={:.6}, sq={:.6}, pq={:.6}, tp={}, fp={}, fn={})",
            self.aji, self.dice, self.rq, self.sq, self.pq, self.tp, self.fp, self.fn_
        )
    }
}

#[pyfunction]
fn evaluate(gt: Vec<Vec<u32>>, pred: Vec<Vec<u32>>) -> PyResult<PyMetricsReport> {
    let r = metrics::evaluate(&grid(gt)?, &grid(pred)?).map_err(to_py)?;
    Ok(PyMetricsReport {
        aji: r.aji,
        dice: r.dice,
        rq: r.rq,
        sq: r.sq,
        pq: r.pq,
        tp: r.tp,
        fp: r.fp,
        fn_: r.fn_,
    })
}

/// `(l1, l_bend, total)`; `l1` is one of `"ce"`, `"dice"`, `"mse"`.
#[pyfunction]
#[pyo3(signature = (pred, gt, alpha = 1.0, l1 = "mse"))]
fn total_loss(pred: Vec<Vec<f64>>, gt: Vec<Vec<i64>>, alpha: f64, l1: &str) -> PyResult<(f64, f64, f64)> {
    let kind: PixelLoss = l1.parse().map_err(to_py)?;
    let cfg = LossConfig::new(alpha, kind).map_err(to_py)?;
    let out = loss::total_loss(&grid(pred)?, &mask(gt)?, &cfg, &BendConfig::default()).map_err(to_py)?;
    Ok((out.l1, out.l_bend, out.total))
}

#[pyfunction]
#[pyo3(signature = (prob, init, alpha = 1.0, l1 = "mse", max_iters = 100))]
fn refine_mask(
    prob: Vec<Vec<f64>>,
    init: Vec<Vec<i64>>,
    alpha: f64,
    l1: &str,
    max_iters: usize,
) -> PyResult<Vec<Vec<bool>>> {
    let kind: PixelLoss = l1.parse().map_err(to_py)?;
    let cfg = LossConfig::new(alpha, kind).map_err(to_py)?;
    let out = loss::refine_mask(&grid(prob)?, &mask(init)?, &cfg, &BendConfig::default(), max_iters)
        .map_err(to_py)?;
    Ok(rows(&out))
}

/// `(horizontal, vertical)` distance maps of a label map.
#[pyfunction]
fn hover_from_labels(labels: Vec<Vec<u32>>) -> PyResult<(Vec<Vec<f64>>, Vec<Vec<f64>>)> {
    let maps = hover::hover_from_labels(&grid(labels)?);
    Ok((rows(&maps.horizontal), rows(&maps.vertical)))
}

#[pyfunction]
#[pyo3(signature = (prob, hover_h, hover_v, tau = 0.4, min_size = 10, prob_threshold = 0.5))]
fn postprocess(
    prob: Vec<Vec<f64>>,
    hover_h: Vec<Vec<f64>>,
    hover_v: Vec<Vec<f64>>,
    tau: f64,
    min_size: usize,
    prob_threshold: f64,
) -> PyResult<Vec<Vec<u32>>> {
    let maps = HoVerMaps::new(grid(hover_h)?, grid(hover_v)?).map_err(to_py)?;
    let cfg = PostprocessConfig {
        prob_threshold,
        edge_threshold: tau,
        min_marker_size: min_size,
    };
    let labels: LabelMap = hover::postprocess(&grid(prob)?, &maps, &cfg).map_err(to_py)?;
    Ok(rows(&labels))
}

type SceneRows = (Vec<Vec<u32>>, Vec<Vec<f64>>, Vec<Vec<f64>>, Vec<Vec<f64>>);

/// `(gt, prob, hover_h, hover_v)`, optionally perturbed by Gaussian noise.
#[pyfunction]
#[pyo3(signature = (width, height, count, overlap_pairs = 0, seed = 0, radius_min = 6.0, radius_max = 10.0, noise_sigma = 0.0, noise_seed = 0))]
#[allow(clippy::too_many_arguments)]
fn gen_scene(
    width: usize,
    height: usize,
    count: usize,
    overlap_pairs: usize,
    seed: u64,
    radius_min: f64,
    radius_max: f64,
    noise_sigma: f64,
    noise_seed: u64,
) -> PyResult<SceneRows> {
    let params = SceneParams {
        width,
        height,
        count,
        radius_range: (radius_min, radius_max),
        overlap_pairs,
        seed,
    };
    let scene = synth::gen_scene(&params).map_err(to_py)?;
    let scene = synth::perturb(&scene, noise_sigma, noise_seed).map_err(to_py)?;
    Ok((
        rows(&scene.gt),
        rows(&scene.prob),
        rows(&scene.hover.horizontal),
        rows(&scene.hover.vertical),
    ))
}

#[pymodule]
fn bendseg_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyMetricsReport>()?;
    m.add_function(wrap_pyfunction!(curvature, m)?)?;
    m.add_function(wrap_pyfunction!(bending_energy, m)?)?;
    m.add_function(wrap_pyfunction!(bending_loss, m)?)?;
    m.add_function(wrap_pyfunction!(bend_contours, m)?)?;
    m.add_function(wrap_pyfunction!(trace_contours, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_patterns, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(total_loss, m)?)?;
    m.add_function(wrap_pyfunction!(refine_mask, m)?)?;
    m.add_function(wrap_pyfunction!(hover_from_labels, m)?)?;
    m.add_function(wrap_pyfunction!(postprocess, m)?)?;
    m.add_function(wrap_pyfunction!(gen_scene, m)?)?;
    Ok(())
}
