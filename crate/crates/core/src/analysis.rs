//! Operational visibility extraction from sampled patterns.

use crate::engine::{InterferencePattern, ScreenGeometry, SlitArray};
use crate::error::{Error, Result};
use crate::measures::michelson;

/// Minimum grid density, in samples per fringe width.
pub const MIN_SAMPLES_PER_FRINGE: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakEstimate {
    /// Refined position of the maximum.
    pub x_star: f64,
    pub i_max: f64,
    /// Index of the largest sample in the window.
    pub grid_index: usize,
}

/// Primary fringe width `lambda L / d`.
pub fn fringe_width(geometry: &ScreenGeometry, slits: &SlitArray) -> f64 {
    geometry.fringe_width(slits.spacing())
}

/// Vertex of the parabola through `(-1, y0), (0, y1), (1, y2)`, as
/// `(offset, value)`. `None` when the three points are collinear.
fn parabola_vertex(y0: f64, y1: f64, y2: f64) -> Option<(f64, f64)> {
    let curvature = y0 - 2.0 * y1 + y2;
    if curvature.abs() <= 1e-14 * (y0.abs() + y1.abs() + y2.abs()) {
        return None;
    }
    let offset = ((y0 - y2) / (2.0 * curvature)).clamp(-0.5, 0.5);
    Some((offset, y1 - 0.25 * (y0 - y2) * offset))
}

fn window_indices(pattern: &InterferencePattern, lo: f64, hi: f64) -> Result<(usize, usize)> {
    let first = pattern.grid.iter().position(|&x| x >= lo);
    let last = pattern.grid.iter().rposition(|&x| x <= hi);
    match (first, last) {
        (Some(a), Some(b)) if b >= a + 2 => Ok((a, b)),
        _ => Err(Error::EmptyWindow),
    }
}

fn check_density(pattern: &InterferencePattern, first: usize, last: usize) -> Result<()> {
    let step = (pattern.grid[last] - pattern.grid[first]) / (last - first) as f64;
    let per_fringe = pattern.fringe_width() / step;
    if per_fringe < MIN_SAMPLES_PER_FRINGE as f64 {
        return Err(Error::UndersampledGrid {
            per_fringe,
            required: MIN_SAMPLES_PER_FRINGE,
        });
    }
    Ok(())
}

/// Offset to position: the grid may be non-uniform after CSV import, so the
/// local step on the relevant side is used.
fn refined_x(grid: &[f64], k: usize, offset: f64) -> f64 {
    if offset >= 0.0 {
        grid[k] + offset * (grid[k + 1] - grid[k])
    } else {
        grid[k] + offset * (grid[k] - grid[k - 1])
    }
}

/// Largest sample of `total` in `window` (default: the central fringe,
/// `|x| <= w/2`), refined by a three-point parabola.
pub fn find_primary_max(
    pattern: &InterferencePattern,
    window: Option<(f64, f64)>,
) -> Result<PeakEstimate> {
    let w = pattern.fringe_width();
    let (lo, hi) = window.unwrap_or((-0.5 * w, 0.5 * w));
    let (first, last) = window_indices(pattern, lo, hi)?;
    check_density(pattern, first, last)?;

    let mut k = first;
    for idx in first..=last {
        if pattern.total[idx] > pattern.total[k] {
            k = idx;
        }
    }
    let y = &pattern.total;
    let mut estimate = PeakEstimate {
        x_star: pattern.grid[k],
        i_max: y[k],
        grid_index: k,
    };
    if k > 0 && k + 1 < y.len() && y[k] >= y[k - 1] && y[k] >= y[k + 1] {
        if let Some((offset, value)) = parabola_vertex(y[k - 1], y[k], y[k + 1]) {
            estimate.x_star = refined_x(&pattern.grid, k, offset);
            estimate.i_max = value.max(y[k]);
        }
    }
    Ok(estimate)
}

/// Linear interpolation of the incoherent reference.
pub fn incoherent_at(pattern: &InterferencePattern, x: f64) -> f64 {
    let g = &pattern.grid;
    let k = match g.partition_point(|&v| v <= x) {
        0 => return pattern.incoherent[0],
        k if k >= g.len() => return pattern.incoherent[g.len() - 1],
        k => k - 1,
    };
    let t = (x - g[k]) / (g[k + 1] - g[k]);
    pattern.incoherent[k] + t * (pattern.incoherent[k + 1] - pattern.incoherent[k])
}

/// `V_C = (I_max - I_inc) / ((n - 1) I_inc)`, with `I_inc` read from the
/// incoherent reference at the refined peak position.
pub fn extract_vc(pattern: &InterferencePattern) -> Result<f64> {
    let peak = find_primary_max(pattern, None)?;
    extract_vc_at(pattern, &peak)
}

pub fn extract_vc_at(pattern: &InterferencePattern, peak: &PeakEstimate) -> Result<f64> {
    let i_inc = incoherent_at(pattern, peak.x_star);
    if !(i_inc > 0.0) {
        return Err(Error::ZeroIncoherentIntensity);
    }
    let n = pattern.meta.n;
    if n < 2 {
        return Err(Error::TooSmall(n));
    }
    Ok((peak.i_max - i_inc) / i_inc / (n - 1) as f64)
}

/// Michelson contrast between the central primary maximum and the lowest
/// point before the adjacent primary maximum.
///
/// Exact only for two slits under a uniform envelope.
pub fn extract_michelson(pattern: &InterferencePattern) -> Result<f64> {
    let peak = find_primary_max(pattern, None)?;
    let w = pattern.fringe_width();
    let x0 = peak.x_star;
    let (x_end, x_start) = (*pattern.grid.last().unwrap(), pattern.grid[0]);
    let (lo, hi) = if x0 + w <= x_end {
        (x0, x0 + w)
    } else if x0 - w >= x_start {
        (x0 - w, x0)
    } else {
        return Err(Error::EmptyWindow);
    };
    let first = pattern.grid.iter().position(|&x| x > lo).ok_or(Error::EmptyWindow)?;
    let last = pattern.grid.iter().rposition(|&x| x < hi).ok_or(Error::EmptyWindow)?;
    if last < first + 2 {
        return Err(Error::EmptyWindow);
    }
    check_density(pattern, first, last)?;

    let y = &pattern.total;
    let mut k = first;
    for idx in first..=last {
        if y[idx] < y[k] {
            k = idx;
        }
    }
    let mut i_min = y[k];
    if k > 0 && k + 1 < y.len() {
        if let Some((_, value)) = parabola_vertex(y[k - 1], y[k], y[k + 1]) {
            i_min = value.min(y[k]);
        }
    }
    michelson(peak.i_max, i_min.max(0.0))
}
