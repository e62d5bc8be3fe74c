//! Histogram image features standing in for a CNN's two taps.
//!
//! `H` is spatially resolved: for each cell of a 2x2 grid (row-major) and
//! each channel, a 32-bin intensity histogram normalized to sum 1, giving
//! `32 * 4 * channels` values. `I` is global: for each channel, the mean and
//! population variance of intensities scaled to `[0, 1]` followed by a
//! normalized 16-bin histogram, giving `18 * channels` values.

use alloc::vec::Vec;

use super::image::ImageMatrix;
use crate::error::{Error, Result};

pub const GRID_BINS: usize = 32;
pub const GLOBAL_BINS: usize = 16;

pub const fn hidden_dim(channels: usize) -> usize {
    GRID_BINS * 4 * channels
}

pub const fn prediction_dim(channels: usize) -> usize {
    (2 + GLOBAL_BINS) * channels
}

pub fn baseline_image_features(img: &ImageMatrix) -> Result<(Vec<f32>, Vec<f32>)> {
    let (h, w, ch) = (img.height(), img.width(), img.channels());
    if h < 2 || w < 2 {
        return Err(Error::InvalidImage(alloc::format!(
            "baseline features need at least 2x2 pixels, got {w}x{h}"
        )));
    }
    let (mid_y, mid_x) = (h / 2, w / 2);
    let mut grid = alloc::vec![0u64; 4 * ch * GRID_BINS];
    let mut global = alloc::vec![0u64; ch * GLOBAL_BINS];
    let mut sum = alloc::vec![0f64; ch];
    let mut sum_sq = alloc::vec![0f64; ch];
    for y in 0..h {
        for x in 0..w {
            let cell = (y >= mid_y) as usize * 2 + (x >= mid_x) as usize;
            for c in 0..ch {
                let v = img.get(y, x, c);
                grid[(cell * ch + c) * GRID_BINS + (v as usize >> 3)] += 1;
                global[c * GLOBAL_BINS + (v as usize >> 4)] += 1;
                let s = v as f64 / 255.0;
                sum[c] += s;
                sum_sq[c] += s * s;
            }
        }
    }
    let mut hidden = Vec::with_capacity(grid.len());
    for cell in 0..4 {
        let cell_pixels = {
            let rows = if cell < 2 { mid_y } else { h - mid_y };
            let cols = if cell % 2 == 0 { mid_x } else { w - mid_x };
            (rows * cols) as f64
        };
        for c in 0..ch {
            let bins = &grid[(cell * ch + c) * GRID_BINS..][..GRID_BINS];
            hidden.extend(bins.iter().map(|&n| (n as f64 / cell_pixels) as f32));
        }
    }
    let n = (h * w) as f64;
    let mut prediction = Vec::with_capacity(prediction_dim(ch));
    for c in 0..ch {
        let mean = sum[c] / n;
        let var = (sum_sq[c] / n - mean * mean).max(0.0);
        prediction.push(mean as f32);
        prediction.push(var as f32);
        prediction.extend(
            global[c * GLOBAL_BINS..][..GLOBAL_BINS]
                .iter()
                .map(|&k| (k as f64 / n) as f32),
        );
    }
    Ok((hidden, prediction))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_black() {
        let img = ImageMatrix::filled(224, 224, 1, 0).unwrap();
        let (h, i) = baseline_image_features(&img).unwrap();
        assert_eq!(h.len(), hidden_dim(1));
        assert_eq!(i.len(), prediction_dim(1));
        for cell in h.chunks(GRID_BINS) {
            assert_eq!(cell[0], 1.0);
            assert!(cell[1..].iter().all(|&v| v == 0.0));
        }
        assert_eq!(i[0], 0.0);
        assert_eq!(i[1], 0.0);
        assert_eq!(i[2], 1.0);
    }

    #[test]
    fn histograms_sum_to_one() {
        let img = ImageMatrix::from_fn(224, 224, 3, |y, x, c| ((y * 31 + x * 17 + c * 101) % 256) as u8).unwrap();
        let (h, i) = baseline_image_features(&img).unwrap();
        for cell in h.chunks(GRID_BINS) {
            let s: f64 = cell.iter().map(|&v| v as f64).sum();
            assert!((s - 1.0).abs() < 1e-6);
        }
        for ch in i.chunks(2 + GLOBAL_BINS) {
            let s: f64 = ch[2..].iter().map(|&v| v as f64).sum();
            assert!((s - 1.0).abs() < 1e-6);
            assert!(ch[1] >= 0.0);
        }
    }

    #[test]
    fn random_image_matches_brute_force() {
        // brute-force oracle: walk each grid cell and channel separately
        let mut state = 0x9e37_79b9_7f4a_7c15u64;
        let img = ImageMatrix::from_fn(224, 224, 3, |_, _, _| {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 56) as u8
        })
        .unwrap();
        let (h, i) = baseline_image_features(&img).unwrap();
        let mut k = 0;
        for (ys, xs) in [
            (0..112, 0..112),
            (0..112, 112..224),
            (112..224, 0..112),
            (112..224, 112..224),
        ] {
            for c in 0..3 {
                for bin in 0..GRID_BINS {
                    let mut count = 0usize;
                    for y in ys.clone() {
                        for x in xs.clone() {
                            let v = img.get(y, x, c) as usize;
                            if v * GRID_BINS / 256 == bin {
                                count += 1;
                            }
                        }
                    }
                    let expected = count as f64 / (112.0 * 112.0);
                    assert!((h[k] as f64 - expected).abs() < 1e-7, "H[{k}]");
                    k += 1;
                }
            }
        }
        for c in 0..3 {
            let vals: Vec<f64> = (0..224 * 224)
                .map(|p| img.get(p / 224, p % 224, c) as f64 / 255.0)
                .collect();
            let mean = vals.iter().sum::<f64>() / vals.len() as f64;
            let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / vals.len() as f64;
            let base = c * 18;
            assert!((i[base] as f64 - mean).abs() < 1e-6);
            assert!((i[base + 1] as f64 - var).abs() < 1e-6);
            for bin in 0..GLOBAL_BINS {
                let count = vals
                    .iter()
                    .filter(|&&v| ((v * 255.0).round() as usize) * GLOBAL_BINS / 256 == bin)
                    .count();
                assert!((i[base + 2 + bin] as f64 - count as f64 / vals.len() as f64).abs() < 1e-7);
            }
        }
    }
}
