//! Row-major 2D grids, connected-component labeling and the PGM/sf32 codecs.
//!
//! Grids are immutable once built; every operation returns a new grid.

mod codec;
mod components;

pub use codec::{
    decode, decode_binary, decode_labels, decode_scalar, encode, encode_binary, encode_labels,
    encode_labels_8bit, encode_scalar, Decoded, GridKind,
};
pub use components::{connected_components, Connectivity};

use crate::error::{Error, Result};

/// Element types a grid may hold.
pub trait Cell: Copy + PartialEq + std::fmt::Debug {
    fn is_valid(&self) -> bool {
        true
    }
}

impl Cell for bool {}
impl Cell for u32 {}
impl Cell for f64 {
    fn is_valid(&self) -> bool {
        self.is_finite()
    }
}

/// Dense `width × height` raster stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid<T: Cell> {
    width: usize,
    height: usize,
    cells: Vec<T>,
}

/// Foreground/background mask.
pub type BinaryGrid = Grid<bool>;
/// Instance map, 0 is background.
pub type LabelMap = Grid<u32>;
/// Finite real-valued field.
pub type ScalarField = Grid<f64>;

impl<T: Cell> Grid<T> {
    pub fn new(width: usize, height: usize, cells: Vec<T>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::validation(format!(
                "grid dimensions must be positive, got {width}x{height}"
            )));
        }
        let expected = width
            .checked_mul(height)
            .ok_or_else(|| Error::validation("grid dimensions overflow"))?;
        if cells.len() != expected {
            return Err(Error::validation(format!(
                "expected {expected} cells for {width}x{height}, got {}",
                cells.len()
            )));
        }
        if let Some(i) = cells.iter().position(|c| !c.is_valid()) {
            return Err(Error::validation(format!(
                "non-finite value at ({}, {})",
                i % width,
                i / width
            )));
        }
        Ok(Grid {
            width,
            height,
            cells,
        })
    }

    pub fn filled(width: usize, height: usize, value: T) -> Result<Self> {
        Self::new(width, height, vec![value; width.saturating_mul(height)])
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> T) -> Result<Self> {
        let mut cells = Vec::with_capacity(width.saturating_mul(height));
        for y in 0..height {
            for x in 0..width {
                cells.push(f(x, y));
            }
        }
        Self::new(width, height, cells)
    }

    /// Builds a grid with the same shape as `self`; `cells` must already be valid.
    pub(crate) fn with_cells<U: Cell>(&self, cells: Vec<U>) -> Grid<U> {
        debug_assert_eq!(cells.len(), self.cells.len());
        debug_assert!(cells.iter().all(Cell::is_valid));
        Grid {
            width: self.width,
            height: self.height,
            cells,
        }
    }

    pub fn map<U: Cell>(&self, f: impl FnMut(&T) -> U) -> Result<Grid<U>> {
        Grid::new(self.width, self.height, self.cells.iter().map(f).collect())
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// `(width, height)`.
    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cells(&self) -> &[T] {
        &self.cells
    }

    pub fn into_cells(self) -> Vec<T> {
        self.cells
    }

    pub fn get(&self, x: usize, y: usize) -> T {
        self.cells[y * self.width + x]
    }

    /// Like [`Grid::get`] but with signed coordinates; `None` outside the grid.
    pub fn get_signed(&self, x: i64, y: i64) -> Option<T> {
        if x < 0 || y < 0 || x >= self.width as i64 || y >= self.height as i64 {
            None
        } else {
            Some(self.cells[y as usize * self.width + x as usize])
        }
    }

    pub fn same_dims<U: Cell>(&self, other: &Grid<U>) -> bool {
        self.dims() == other.dims()
    }

    pub(crate) fn require_same_dims<U: Cell>(
        &self,
        what_self: &str,
        other: &Grid<U>,
        what_other: &str,
    ) -> Result<()> {
        if self.same_dims(other) {
            Ok(())
        } else {
            Err(Error::dimension_mismatch(
                what_self,
                self.dims(),
                what_other,
                other.dims(),
            ))
        }
    }
}

impl BinaryGrid {
    /// Number of foreground cells.
    pub fn count(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }
}

impl LabelMap {
    pub fn max_label(&self) -> u32 {
        self.cells.iter().copied().max().unwrap_or(0)
    }

    /// Sorted distinct nonzero labels.
    pub fn labels(&self) -> Vec<u32> {
        let mut labels: Vec<u32> = self.cells.iter().copied().filter(|&l| l != 0).collect();
        labels.sort_unstable();
        labels.dedup();
        labels
    }

    /// Number of distinct nonzero labels.
    pub fn instance_count(&self) -> usize {
        self.labels().len()
    }

    /// Remaps nonzero labels to `1..=K` in row-major first-encounter order.
    pub fn relabel_compact(&self) -> LabelMap {
        let mut remap = std::collections::HashMap::new();
        let mut next = 0u32;
        let cells = self
            .cells
            .iter()
            .map(|&l| {
                if l == 0 {
                    0
                } else {
                    *remap.entry(l).or_insert_with(|| {
                        next += 1;
                        next
                    })
                }
            })
            .collect();
        self.with_cells(cells)
    }

    /// True where the label equals `id`; an absent id gives an empty mask.
    pub fn extract_binary(&self, id: u32) -> BinaryGrid {
        self.with_cells(self.cells.iter().map(|&l| id != 0 && l == id).collect())
    }

    /// Any nonzero label is foreground.
    pub fn foreground(&self) -> BinaryGrid {
        self.with_cells(self.cells.iter().map(|&l| l != 0).collect())
    }
}

impl ScalarField {
    /// Strictly-greater-than threshold.
    pub fn threshold(&self, t: f64) -> BinaryGrid {
        self.with_cells(self.cells.iter().map(|&v| v > t).collect())
    }
}

impl From<&BinaryGrid> for ScalarField {
    fn from(mask: &BinaryGrid) -> Self {
        mask.with_cells(mask.cells.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect())
    }
}
