//! Seeded synthetic nuclei scenes: rasterized rotated ellipses with ground
//! truth, a probability map and hover maps.
//!
//! Randomness comes from splitmix64 (Steele, Lea & Flood), normal deviates
//! from the Box–Muller transform, so scenes are reproducible bit-for-bit on
//! any platform.

use crate::error::{Error, Result};
use crate::hover::{hover_from_labels, HoVerMaps};
use crate::raster::{LabelMap, ScalarField};
use std::f64::consts::PI;

const MAX_ATTEMPTS: usize = 10_000;
const PARTNER_TRIES: usize = 40;
const OVERLAP_RANGE: (f64, f64) = (0.05, 0.25);

#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Standard normal via Box–Muller; consumes two uniforms per call.
    pub fn gaussian(&mut self) -> f64 {
        let u1 = 1.0 - self.next_f64(); // (0, 1]
        let u2 = self.next_f64();
        (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SceneParams {
    pub width: usize,
    pub height: usize,
    pub count: usize,
    /// Range of the ellipse semi-axes, in pixels.
    pub radius_range: (f64, f64),
    /// Number of deliberately overlapping pairs among the `count` ellipses.
    pub overlap_pairs: usize,
    pub seed: u64,
}

impl SceneParams {
    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.radius_range;
        if self.width == 0 || self.height == 0 {
            return Err(Error::validation("scene dimensions must be positive"));
        }
        if self.count == 0 {
            return Err(Error::validation("count must be positive"));
        }
        if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
            return Err(Error::validation(format!(
                "radius range must satisfy 0 < min <= max, got ({lo}, {hi})"
            )));
        }
        if self.count < 2 * self.overlap_pairs {
            return Err(Error::validation(format!(
                "{} overlapping pairs need at least {} ellipses, got {}",
                self.overlap_pairs,
                2 * self.overlap_pairs,
                self.count
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub gt: LabelMap,
    pub prob: ScalarField,
    pub hover: HoVerMaps,
}

#[derive(Debug, Clone, Copy)]
struct Ellipse {
    cx: f64,
    cy: f64,
    a: f64,
    b: f64,
    theta: f64,
}

impl Ellipse {
    fn random_shape(rng: &mut SplitMix64, (lo, hi): (f64, f64)) -> (f64, f64, f64) {
        (rng.uniform(lo, hi), rng.uniform(lo, hi), rng.uniform(0.0, PI))
    }

    /// Pixel indices whose centers fall inside, or `None` if any part would
    /// leave the image (a one-pixel margin is kept).
    fn raster(&self, w: usize, h: usize) -> Option<Vec<usize>> {
        let r = self.a.max(self.b);
        if self.cx - r < 1.0 || self.cy - r < 1.0 || self.cx + r > w as f64 - 2.0 || self.cy + r > h as f64 - 2.0 {
            return None;
        }
        let (s, c) = self.theta.sin_cos();
        let mut px = Vec::new();
        for y in (self.cy - r).floor() as usize..=(self.cy + r).ceil() as usize {
            for x in (self.cx - r).floor() as usize..=(self.cx + r).ceil() as usize {
                let (dx, dy) = (x as f64 - self.cx, y as f64 - self.cy);
                let u = (dx * c + dy * s) / self.a;
                let v = (-dx * s + dy * c) / self.b;
                if u * u + v * v <= 1.0 {
                    px.push(y * w + x);
                }
            }
        }
        (!px.is_empty()).then_some(px)
    }
}

struct Canvas {
    w: usize,
    h: usize,
    labels: Vec<u32>,
    /// Placement group per pixel; members of one overlap pair share a group.
    groups: Vec<u32>,
}

impl Canvas {
    /// No pixel of another group within Euclidean distance < 2.
    fn clear_of_others(&self, px: &[usize], group: u32) -> bool {
        px.iter().all(|&i| {
            let (x, y) = ((i % self.w) as i64, (i / self.w) as i64);
            (-1..=1).all(|dy| {
                (-1..=1).all(|dx| {
                    let (nx, ny) = (x + dx, y + dy);
                    if nx < 0 || ny < 0 || nx >= self.w as i64 || ny >= self.h as i64 {
                        return true;
                    }
                    let g = self.groups[ny as usize * self.w + nx as usize];
                    g == 0 || g == group
                })
            })
        })
    }

    fn draw(&mut self, px: &[usize], label: u32, group: u32) {
        for &i in px {
            self.labels[i] = label;
            self.groups[i] = group;
        }
    }
}

/// Rejection-samples `count` ellipses, the first `2 * overlap_pairs` of them
/// in overlapping pairs (5–25% of the smaller ellipse shared), the rest kept
/// at least 2 px away from everything else. Later ellipses own overlap pixels.
pub fn gen_scene(params: &SceneParams) -> Result<Scene> {
    params.validate()?;
    let (w, h) = (params.width, params.height);
    let mut rng = SplitMix64::new(params.seed);
    let mut canvas = Canvas {
        w,
        h,
        labels: vec![0; w * h],
        groups: vec![0; w * h],
    };
    let mut attempts = 0usize;
    let capacity = |attempts: usize| {
        Error::Capacity(format!(
            "could not place {} ellipses in {w}x{h} after {attempts} attempts; use a smaller count or radii",
            params.count
        ))
    };
    let random_ellipse = |rng: &mut SplitMix64| {
        let (a, b, theta) = Ellipse::random_shape(rng, params.radius_range);
        Ellipse {
            cx: rng.uniform(0.0, w as f64),
            cy: rng.uniform(0.0, h as f64),
            a,
            b,
            theta,
        }
    };

    let mut label = 0u32;
    for pair in 0..params.overlap_pairs {
        let group = pair as u32 + 1;
        'placement: loop {
            attempts += 1;
            if attempts > MAX_ATTEMPTS {
                return Err(capacity(attempts - 1));
            }
            let first = random_ellipse(&mut rng);
            let Some(first_px) = first.raster(w, h).filter(|px| canvas.clear_of_others(px, group)) else {
                continue;
            };
            for _ in 0..PARTNER_TRIES {
                attempts += 1;
                if attempts > MAX_ATTEMPTS {
                    return Err(capacity(attempts - 1));
                }
                let (a, b, theta) = Ellipse::random_shape(&mut rng, params.radius_range);
                let reach = (first.a + first.b) / 2.0 + (a + b) / 2.0;
                let dist = rng.uniform(0.4, 1.0) * reach;
                let dir = rng.uniform(0.0, 2.0 * PI);
                let second = Ellipse {
                    cx: first.cx + dist * dir.cos(),
                    cy: first.cy + dist * dir.sin(),
                    a,
                    b,
                    theta,
                };
                let Some(second_px) = second.raster(w, h) else { continue };
                let shared = second_px.iter().filter(|i| first_px.binary_search(i).is_ok()).count();
                let fraction = shared as f64 / first_px.len().min(second_px.len()) as f64;
                if !(OVERLAP_RANGE.0..=OVERLAP_RANGE.1).contains(&fraction)
                    || !canvas.clear_of_others(&second_px, group)
                {
                    continue;
                }
                canvas.draw(&first_px, label + 1, group);
                canvas.draw(&second_px, label + 2, group);
                label += 2;
                break 'placement;
            }
        }
    }

    let singles_group_base = params.overlap_pairs as u32;
    for k in 0..params.count - 2 * params.overlap_pairs {
        let group = singles_group_base + k as u32 + 1;
        loop {
            attempts += 1;
            if attempts > MAX_ATTEMPTS {
                return Err(capacity(attempts - 1));
            }
            let e = random_ellipse(&mut rng);
            if let Some(px) = e.raster(w, h).filter(|px| canvas.clear_of_others(px, group)) {
                label += 1;
                canvas.draw(&px, label, group);
                break;
            }
        }
    }

    let gt = LabelMap::new(w, h, canvas.labels)?;
    let prob = gt.map(|&l| if l != 0 { 1.0 } else { 0.0 })?;
    let hover = hover_from_labels(&gt);
    Ok(Scene { gt, prob, hover })
}

/// Adds `noise_sigma` Gaussian noise to the probability map (clamped to
/// `[0, 1]`) and to the hover maps inside instances (clamped to `[-1, 1]`).
pub fn perturb(scene: &Scene, noise_sigma: f64, seed: u64) -> Result<Scene> {
    if !(noise_sigma >= 0.0) || !noise_sigma.is_finite() {
        return Err(Error::validation(format!(
            "noise sigma must be >= 0, got {noise_sigma}"
        )));
    }
    if noise_sigma == 0.0 {
        return Ok(scene.clone());
    }
    let mut rng = SplitMix64::new(seed);
    let prob = scene
        .prob
        .map(|&p| (p + noise_sigma * rng.gaussian()).clamp(0.0, 1.0))?;
    let mut jitter = |field: &ScalarField| -> Result<ScalarField> {
        let cells = field
            .cells()
            .iter()
            .zip(scene.gt.cells())
            .map(|(&v, &l)| {
                if l == 0 {
                    v
                } else {
                    (v + noise_sigma * rng.gaussian()).clamp(-1.0, 1.0)
                }
            })
            .collect();
        ScalarField::new(field.width(), field.height(), cells)
    };
    let horizontal = jitter(&scene.hover.horizontal)?;
    let vertical = jitter(&scene.hover.vertical)?;
    Ok(Scene {
        gt: scene.gt.clone(),
        prob,
        hover: HoVerMaps {
            horizontal,
            vertical,
        },
    })
}
