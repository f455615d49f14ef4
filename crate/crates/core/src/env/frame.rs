use std::fmt::Write as _;

use crate::error::{Error, Result};

pub const FREE: u8 = 0;
pub const GOAL: u8 = 6;

/// Agent-independent palette raster: `FREE`, obstacle class `1..=5`, `GOAL`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Frame {
    height: usize,
    width: usize,
    cells: Vec<u8>,
}

impl Frame {
    pub fn new(height: usize, width: usize) -> Self {
        Self {
            height,
            width,
            cells: vec![FREE; height * width],
        }
    }

    pub fn from_cells(height: usize, width: usize, cells: Vec<u8>) -> Result<Self> {
        if cells.len() != height * width {
            return Err(Error::Argument(format!(
                "{} cells for a {height}x{width} frame",
                cells.len()
            )));
        }
        if let Some(v) = cells.iter().find(|v| **v > GOAL) {
            return Err(Error::Argument(format!("palette value {v} out of range")));
        }
        Ok(Self {
            height,
            width,
            cells,
        })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn cells(&self) -> &[u8] {
        &self.cells
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.cells[row * self.width + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: u8) {
        self.cells[row * self.width + col] = value;
    }

    /// Value at a signed coordinate, `None` outside the grid.
    pub fn get_signed(&self, row: i64, col: i64) -> Option<u8> {
        if row < 0 || col < 0 || row >= self.height as i64 || col >= self.width as i64 {
            None
        } else {
            Some(self.get(row as usize, col as usize))
        }
    }

    #[inline]
    pub fn is_obstacle_value(v: u8) -> bool {
        v != FREE && v != GOAL
    }

    /// Row-major obstacle mask. Goal pixels count as free.
    pub fn obstacle_mask(&self) -> Vec<bool> {
        self.cells.iter().map(|v| Self::is_obstacle_value(*v)).collect()
    }

    pub fn count(&self, value: u8) -> usize {
        self.cells.iter().filter(|v| **v == value).count()
    }

    /// Centroid `(x, y)` of the goal pixels, in pixel-center coordinates.
    pub fn goal_center(&self) -> Option<(f64, f64)> {
        let (mut sx, mut sy, mut n) = (0usize, 0usize, 0usize);
        for (i, v) in self.cells.iter().enumerate() {
            if *v == GOAL {
                sx += i % self.width;
                sy += i / self.width;
                n += 1;
            }
        }
        (n > 0).then(|| (sx as f64 / n as f64, sy as f64 / n as f64))
    }

    /// Row-major run-length encoding, `"value:count,value:count,..."`.
    pub fn to_rle(&self) -> String {
        let mut out = String::new();
        let mut iter = self.cells.iter().copied();
        let Some(mut current) = iter.next() else {
            return out;
        };
        let mut run = 1usize;
        for v in iter {
            if v == current {
                run += 1;
            } else {
                let _ = write!(out, "{current}:{run},");
                current = v;
                run = 1;
            }
        }
        let _ = write!(out, "{current}:{run}");
        out
    }

    pub fn from_rle(height: usize, width: usize, rle: &str) -> Result<Self> {
        let mut cells = Vec::with_capacity(height * width);
        if !rle.is_empty() {
            for token in rle.split(',') {
                let (v, n) = token
                    .split_once(':')
                    .ok_or_else(|| Error::Argument(format!("bad rle token {token:?}")))?;
                let v: u8 = v
                    .parse()
                    .map_err(|_| Error::Argument(format!("bad rle value {v:?}")))?;
                let n: usize = n
                    .parse()
                    .map_err(|_| Error::Argument(format!("bad rle count {n:?}")))?;
                cells.extend(std::iter::repeat_n(v, n));
            }
        }
        Self::from_cells(height, width, cells)
    }
}
