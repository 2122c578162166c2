//! On-disk forms of grid states, shift distributions and run statistics.
//!
//! Binary grid layout, all little-endian: `x_min: f64`, `dx: f64`,
//! `n: u64`, then `n` pairs `re: f64, im: f64`.

use std::io::{self, Read, Write};

use gkp_core::montecarlo::Histogram;
use gkp_core::oracle::{Axis, WaveGrid};
use gkp_core::ShiftDistribution;
use num_complex::Complex64;
use thiserror::Error;

use crate::report::{col, CsvTable};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("invalid data: {0}")]
    Invalid(#[from] gkp_core::Error),
    #[error("grid length {0} does not fit in memory")]
    TooLong(u64),
}

/// Largest grid accepted when reading, matching the two-mode memory guard
/// squared.
const MAX_GRID_POINTS: u64 = 1 << 24;

pub fn write_grid_binary<W: Write>(mut w: W, grid: &WaveGrid) -> io::Result<()> {
    let axis = grid.axis();
    w.write_all(&axis.x_min.to_le_bytes())?;
    w.write_all(&axis.dx.to_le_bytes())?;
    w.write_all(&(axis.n as u64).to_le_bytes())?;
    for c in grid.amplitudes() {
        w.write_all(&c.re.to_le_bytes())?;
        w.write_all(&c.im.to_le_bytes())?;
    }
    w.flush()
}

fn read_f64<R: Read>(r: &mut R) -> io::Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

pub fn read_grid_binary<R: Read>(mut r: R) -> Result<WaveGrid, FormatError> {
    let x_min = read_f64(&mut r)?;
    let dx = read_f64(&mut r)?;
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    let n = u64::from_le_bytes(b);
    if n > MAX_GRID_POINTS {
        return Err(FormatError::TooLong(n));
    }
    let axis = Axis { x_min, dx, n: n as usize };
    axis.validate()?;
    let mut amps = Vec::with_capacity(axis.n);
    for _ in 0..axis.n {
        let re = read_f64(&mut r)?;
        let im = read_f64(&mut r)?;
        amps.push(Complex64::new(re, im));
    }
    Ok(WaveGrid::new(axis, amps)?)
}

pub fn write_grid_csv<W: Write>(w: W, grid: &WaveGrid) -> Result<(), FormatError> {
    let mut t = CsvTable::new(w, &[col("x", "1"), col("re", "1"), col("im", "1")])?;
    for (j, c) in grid.amplitudes().iter().enumerate() {
        t.row(&[grid.axis().point(j), c.re, c.im])?;
    }
    Ok(t.finish()?)
}

pub fn distribution_to_json(dist: &ShiftDistribution) -> Result<String, FormatError> {
    Ok(serde_json::to_string(dist)?)
}

/// Parses and validates a distribution written by [`distribution_to_json`].
pub fn distribution_from_json(text: &str) -> Result<ShiftDistribution, FormatError> {
    let dist: ShiftDistribution = serde_json::from_str(text)?;
    dist.validate()?;
    Ok(dist)
}

/// One row per grid cell centre: `u`, `v`, density.
pub fn write_distribution_csv<W: Write>(w: W, dist: &ShiftDistribution) -> Result<(), FormatError> {
    let mut t = CsvTable::new(w, &[col("u", "1"), col("v", "1"), col("density", "1/area")])?;
    for iu in 0..dist.nu {
        for iv in 0..dist.nv {
            t.row(&[dist.u_at(iu), dist.v_at(iv), dist.at(iu, iv)])?;
        }
    }
    Ok(t.finish()?)
}

/// Per-round residual magnitudes, one row per bin.
pub fn write_histogram_csv<W: Write>(w: W, hist: &Histogram) -> Result<(), FormatError> {
    let mut t = CsvTable::new(w, &[col("residual_low", "1"), col("residual_high", "1"), col("count", "steps")])?;
    for (i, c) in hist.counts.iter().enumerate() {
        let lo = i as f64 * hist.bin_width;
        t.row(&[lo, lo + hist.bin_width, *c as f64])?;
    }
    Ok(t.finish()?)
}
