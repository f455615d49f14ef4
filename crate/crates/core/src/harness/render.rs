use std::path::Path;

use crate::env::{goal_footprint_origin, round_px, Frame, GOAL};
use crate::error::{Error, Result};
use crate::models::ErrorMap;

use super::write_atomic;

pub type Rgb = [u8; 3];

pub const FREE_RGB: Rgb = [68, 1, 84];
pub const GOAL_RGB: Rgb = [253, 231, 37];
/// Obstacle classes 1 to 5, shades of cyan and blue.
pub const CLASS_RGB: [Rgb; 5] = [
    [0, 255, 255],
    [0, 200, 230],
    [0, 150, 200],
    [64, 224, 208],
    [0, 110, 180],
];
pub const AGENT_RGB: Rgb = [255, 255, 255];

pub const ERROR_BG_RGB: Rgb = [16, 16, 16];
pub const FN_RGB: Rgb = [255, 0, 0];
pub const FP_RGB: Rgb = [0, 0, 255];
pub const PREDICTED_GOAL_RGB: Rgb = [255, 165, 0];

fn value_rgb(v: u8) -> Rgb {
    match v {
        GOAL => GOAL_RGB,
        1..=5 => CLASS_RGB[v as usize - 1],
        _ => FREE_RGB,
    }
}

fn ppm(height: usize, width: usize, pixels: &[Rgb]) -> Vec<u8> {
    let mut out = format!("P6\n{width} {height}\n255\n").into_bytes();
    out.reserve(pixels.len() * 3);
    for p in pixels {
        out.extend_from_slice(p);
    }
    out
}

/// Binary PPM of a frame, optionally with the agent pixel drawn on top.
pub fn frame_ppm(frame: &Frame, agent: Option<(f64, f64)>) -> Vec<u8> {
    let (h, w) = (frame.height(), frame.width());
    let mut px: Vec<Rgb> = frame.cells().iter().map(|&v| value_rgb(v)).collect();
    if let Some((x, y)) = agent {
        let (c, r) = (round_px(x), round_px(y));
        if (0..w as i64).contains(&c) && (0..h as i64).contains(&r) {
            px[r as usize * w + c as usize] = AGENT_RGB;
        }
    }
    ppm(h, w, &px)
}

pub fn render_ppm(frame: &Frame, agent: Option<(f64, f64)>, path: &Path) -> Result<()> {
    write_atomic(path, &frame_ppm(frame, agent))
}

/// Binary PPM of an error map: false negatives red, false positives blue,
/// the true goal pixels yellow and the predicted goal footprint orange on
/// top, so a perfect goal prediction shows orange only.
pub fn error_map_ppm(err: &ErrorMap, truth: &Frame, goal_size: usize) -> Result<Vec<u8>> {
    let (h, w) = (err.height, err.width);
    if (truth.height(), truth.width()) != (h, w) {
        return Err(Error::Argument(format!(
            "error map is {h}x{w}, truth is {}x{}",
            truth.height(),
            truth.width()
        )));
    }
    if let Some(&(r, c)) = err.fn_cells.iter().chain(&err.fp_cells).find(|(r, c)| *r >= h || *c >= w) {
        return Err(Error::Argument(format!("error cell ({r}, {c}) outside {h}x{w} map")));
    }
    let mut px = vec![ERROR_BG_RGB; h * w];
    for &(r, c) in &err.fn_cells {
        px[r * w + c] = FN_RGB;
    }
    for &(r, c) in &err.fp_cells {
        px[r * w + c] = FP_RGB;
    }
    for (i, &v) in truth.cells().iter().enumerate() {
        if v == GOAL {
            px[i] = GOAL_RGB;
        }
    }
    if let Some(center) = err.predicted_goal {
        let (c0, r0) = goal_footprint_origin(center, goal_size);
        for r in r0..r0 + goal_size as i64 {
            for c in c0..c0 + goal_size as i64 {
                if (0..h as i64).contains(&r) && (0..w as i64).contains(&c) {
                    px[r as usize * w + c as usize] = PREDICTED_GOAL_RGB;
                }
            }
        }
    }
    Ok(ppm(h, w, &px))
}

pub fn render_error_map(err: &ErrorMap, truth: &Frame, goal_size: usize, path: &Path) -> Result<()> {
    write_atomic(path, &error_map_ppm(err, truth, goal_size)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{prediction_error, PredictedFrame};

    fn body(bytes: &[u8]) -> &[u8] {
        let mut newlines = 0;
        let start = bytes
            .iter()
            .position(|&b| {
                newlines += (b == b'\n') as usize;
                newlines == 3
            })
            .unwrap();
        &bytes[start + 1..]
    }

    #[test]
    fn header_and_size() {
        let f = Frame::new(48, 48);
        let bytes = frame_ppm(&f, None);
        assert!(bytes.starts_with(b"P6\n48 48\n255\n"));
        assert_eq!(bytes.len(), 13 + 48 * 48 * 3);
    }

    #[test]
    fn palette_values_are_distinct() {
        let mut all: Vec<Rgb> = (0..=6).map(value_rgb).collect();
        all.push(AGENT_RGB);
        let n = all.len();
        all.sort();
        all.dedup();
        assert_eq!(all.len(), n);
    }

    #[test]
    fn agent_overlay() {
        let mut f = Frame::new(3, 4);
        f.set(1, 2, 3);
        let bytes = frame_ppm(&f, Some((0.4, 2.0)));
        let px = body(&bytes);
        assert_eq!(&px[(4 + 2) * 3..][..3], &CLASS_RGB[2]);
        assert_eq!(&px[(2 * 4) * 3..][..3], &AGENT_RGB);
    }

    #[test]
    fn exact_prediction_has_no_error_colors() {
        let mut f = Frame::new(6, 6);
        f.set(1, 1, 2);
        f.set(4, 4, GOAL);
        let err = prediction_error(&PredictedFrame::from_frame(&f), &f).unwrap();
        let bytes = error_map_ppm(&err, &f, 1).unwrap();
        for p in body(&bytes).chunks(3) {
            assert_ne!(p, FN_RGB);
            assert_ne!(p, FP_RGB);
        }
        // Perfect goal prediction: orange replaces yellow.
        assert_eq!(&body(&bytes)[(4 * 6 + 4) * 3..][..3], &PREDICTED_GOAL_RGB);
        assert!(!body(&bytes).chunks(3).any(|p| p == GOAL_RGB));
    }

    #[test]
    fn counts_match_error_cells() {
        let mut truth = Frame::new(5, 5);
        for c in 0..3 {
            truth.set(0, c, 4);
        }
        let mut occ = vec![false; 25];
        occ[20] = true;
        occ[24] = true;
        let pred = PredictedFrame::new(5, 5, occ, None).unwrap();
        let err = prediction_error(&pred, &truth).unwrap();
        let bytes = error_map_ppm(&err, &truth, 2).unwrap();
        let count = |rgb: Rgb| body(&bytes).chunks(3).filter(|p| *p == rgb).count();
        assert_eq!((count(FN_RGB), count(FP_RGB)), (3, 2));
    }

    #[test]
    fn error_colors() {
        let mut truth = Frame::new(2, 3);
        truth.set(0, 0, 1);
        let mut occ = vec![false; 6];
        occ[5] = true;
        let pred = PredictedFrame::new(2, 3, occ, None).unwrap();
        let err = prediction_error(&pred, &truth).unwrap();
        let bytes = error_map_ppm(&err, &truth, 2).unwrap();
        let px = body(&bytes);
        assert_eq!(&px[0..3], &FN_RGB);
        assert_eq!(&px[15..18], &FP_RGB);
    }

    #[test]
    fn writes_file_atomically() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sub/frame.ppm");
        render_ppm(&Frame::new(2, 2), None, &path).unwrap();
        assert_eq!(std::fs::read(&path).unwrap().len(), 11 + 12);
        assert_eq!(std::fs::read_dir(path.parent().unwrap()).unwrap().count(), 1);
    }
}
