//! 8-bit raster images, bilinear resizing and exact augmentations.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Side length images are resized to before featurization.
pub const MODEL_INPUT_SIDE: usize = 224;

/// Row-major, channel-interleaved 8-bit image with 1 or 3 channels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageMatrix {
    height: usize,
    width: usize,
    channels: usize,
    pixels: Vec<u8>,
}

impl ImageMatrix {
    pub fn new(height: usize, width: usize, channels: usize, pixels: Vec<u8>) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(Error::InvalidImage(alloc::format!("zero dimension {width}x{height}")));
        }
        if channels != 1 && channels != 3 {
            return Err(Error::InvalidImage(alloc::format!(
                "{channels} channels (expected 1 or 3)"
            )));
        }
        let expected = height * width * channels;
        if pixels.len() != expected {
            return Err(Error::ShapeMismatch {
                context: "image pixels",
                expected,
                actual: pixels.len(),
            });
        }
        Ok(Self {
            height,
            width,
            channels,
            pixels,
        })
    }

    pub fn filled(height: usize, width: usize, channels: usize, value: u8) -> Result<Self> {
        Self::new(height, width, channels, alloc::vec![value; height * width * channels])
    }

    pub fn from_fn(
        height: usize,
        width: usize,
        channels: usize,
        mut f: impl FnMut(usize, usize, usize) -> u8,
    ) -> Result<Self> {
        let mut pixels = Vec::with_capacity(height * width * channels);
        for y in 0..height {
            for x in 0..width {
                for c in 0..channels {
                    pixels.push(f(y, x, c));
                }
            }
        }
        Self::new(height, width, channels, pixels)
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    #[inline]
    pub fn get(&self, y: usize, x: usize, c: usize) -> u8 {
        self.pixels[(y * self.width + x) * self.channels + c]
    }
}

/// Bilinear resize with half-pixel centres and edge clamping; output values
/// are rounded to the nearest integer.
pub fn resize_image(img: &ImageMatrix, height: usize, width: usize) -> Result<ImageMatrix> {
    if height == 0 || width == 0 {
        return Err(Error::InvalidImage(alloc::format!(
            "zero target dimension {width}x{height}"
        )));
    }
    let sy = img.height as f64 / height as f64;
    let sx = img.width as f64 / width as f64;
    let coord = |dst: usize, scale: f64, len: usize| -> (usize, usize, f64) {
        let src = ((dst as f64 + 0.5) * scale - 0.5).clamp(0.0, (len - 1) as f64);
        let lo = libm::floor(src) as usize;
        let hi = (lo + 1).min(len - 1);
        (lo, hi, src - lo as f64)
    };
    let rows: Vec<_> = (0..height).map(|y| coord(y, sy, img.height)).collect();
    let cols: Vec<_> = (0..width).map(|x| coord(x, sx, img.width)).collect();
    let mut pixels = Vec::with_capacity(height * width * img.channels);
    for &(y0, y1, fy) in &rows {
        for &(x0, x1, fx) in &cols {
            for c in 0..img.channels {
                let top = img.get(y0, x0, c) as f64 * (1.0 - fx) + img.get(y0, x1, c) as f64 * fx;
                let bottom = img.get(y1, x0, c) as f64 * (1.0 - fx) + img.get(y1, x1, c) as f64 * fx;
                let v = top * (1.0 - fy) + bottom * fy;
                pixels.push(libm::floor(v + 0.5).clamp(0.0, 255.0) as u8);
            }
        }
    }
    ImageMatrix::new(height, width, img.channels, pixels)
}

/// Per-channel linear colour change `v * scale + shift`, rounded and clamped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ColourShift {
    pub scale: [f64; 3],
    pub shift: [f64; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Augmentation {
    /// Quarter turn clockwise.
    Rotate90,
    Rotate180,
    HFlip,
    VFlip,
    Crop {
        x: usize,
        y: usize,
        w: usize,
        h: usize,
    },
    Colour(ColourShift),
}

/// Geometric ops are exact pixel permutations or selections; `Colour` is
/// the only op that changes values.
pub fn augment_image(img: &ImageMatrix, op: Augmentation) -> Result<ImageMatrix> {
    let (h, w, ch) = (img.height, img.width, img.channels);
    match op {
        Augmentation::Rotate90 => ImageMatrix::from_fn(w, h, ch, |y, x, c| img.get(h - 1 - x, y, c)),
        Augmentation::Rotate180 => ImageMatrix::from_fn(h, w, ch, |y, x, c| img.get(h - 1 - y, w - 1 - x, c)),
        Augmentation::HFlip => ImageMatrix::from_fn(h, w, ch, |y, x, c| img.get(y, w - 1 - x, c)),
        Augmentation::VFlip => ImageMatrix::from_fn(h, w, ch, |y, x, c| img.get(h - 1 - y, x, c)),
        Augmentation::Crop {
            x: cx,
            y: cy,
            w: cw,
            h: chh,
        } => {
            if cw == 0 || chh == 0 || cx + cw > w || cy + chh > h {
                return Err(Error::CropOutOfBounds {
                    x: cx,
                    y: cy,
                    w: cw,
                    h: chh,
                    width: w,
                    height: h,
                });
            }
            ImageMatrix::from_fn(chh, cw, ch, |y, x, c| img.get(cy + y, cx + x, c))
        }
        Augmentation::Colour(shift) => ImageMatrix::from_fn(h, w, ch, |y, x, c| {
            let v = img.get(y, x, c) as f64 * shift.scale[c] + shift.shift[c];
            libm::floor(v + 0.5).clamp(0.0, 255.0) as u8
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn arb_image() -> impl Strategy<Value = ImageMatrix> {
        (1usize..12, 1usize..12, prop::sample::select(alloc::vec![1usize, 3])).prop_flat_map(|(h, w, c)| {
            prop::collection::vec(any::<u8>(), h * w * c).prop_map(move |px| ImageMatrix::new(h, w, c, px).unwrap())
        })
    }

    /// Independent bilinear oracle: maps the output pixel centre into source
    /// coordinates and blends the four surrounding texels explicitly.
    fn oracle_bilinear(img: &ImageMatrix, oh: usize, ow: usize, y: usize, x: usize, c: usize) -> u8 {
        let fy_src = ((y as f64 + 0.5) * img.height() as f64 / oh as f64 - 0.5)
            .max(0.0)
            .min((img.height() - 1) as f64);
        let fx_src = ((x as f64 + 0.5) * img.width() as f64 / ow as f64 - 0.5)
            .max(0.0)
            .min((img.width() - 1) as f64);
        let (y0, x0) = (fy_src.floor() as usize, fx_src.floor() as usize);
        let (y1, x1) = ((y0 + 1).min(img.height() - 1), (x0 + 1).min(img.width() - 1));
        let (dy, dx) = (fy_src - y0 as f64, fx_src - x0 as f64);
        let p = |yy, xx| img.get(yy, xx, c) as f64;
        let v = p(y0, x0) * (1.0 - dy) * (1.0 - dx)
            + p(y0, x1) * (1.0 - dy) * dx
            + p(y1, x0) * dy * (1.0 - dx)
            + p(y1, x1) * dy * dx;
        v.round() as u8
    }

    #[test]
    fn identity_resize() {
        let img = ImageMatrix::from_fn(224, 224, 3, |y, x, c| ((y * 7 + x * 3 + c * 11) % 256) as u8).unwrap();
        assert_eq!(resize_image(&img, 224, 224).unwrap(), img);
    }

    #[test]
    fn constant_stays_constant() {
        let img = ImageMatrix::filled(30, 50, 3, 173).unwrap();
        let out = resize_image(&img, 224, 224).unwrap();
        assert_eq!((out.height(), out.width(), out.channels()), (224, 224, 3));
        assert!(out.pixels().iter().all(|&p| p == 173));
    }

    #[test]
    fn checkerboard_matches_oracle() {
        let img = ImageMatrix::from_fn(448, 448, 1, |y, x, _| if (y / 7 + x / 5) % 2 == 0 { 255 } else { 0 }).unwrap();
        let out = resize_image(&img, 224, 224).unwrap();
        let spots = [
            (0, 0),
            (1, 1),
            (3, 17),
            (50, 2),
            (100, 100),
            (111, 203),
            (150, 77),
            (199, 13),
            (222, 5),
            (223, 223),
        ];
        for (y, x) in spots {
            assert_eq!(
                out.get(y, x, 0),
                oracle_bilinear(&img, 224, 224, y, x, 0),
                "pixel ({y},{x})"
            );
        }
        let up = ImageMatrix::from_fn(5, 3, 3, |y, x, c| (y * 40 + x * 60 + c) as u8).unwrap();
        let out = resize_image(&up, 11, 7).unwrap();
        for y in 0..11 {
            for x in 0..7 {
                for c in 0..3 {
                    assert_eq!(out.get(y, x, c), oracle_bilinear(&up, 11, 7, y, x, c));
                }
            }
        }
    }

    #[test]
    fn rejects_zero_dims() {
        assert!(ImageMatrix::new(0, 3, 1, alloc::vec![]).is_err());
        assert!(ImageMatrix::new(2, 2, 2, alloc::vec![0; 8]).is_err());
        assert!(ImageMatrix::new(2, 2, 1, alloc::vec![0; 3]).is_err());
        let img = ImageMatrix::filled(2, 2, 1, 0).unwrap();
        assert!(resize_image(&img, 0, 5).is_err());
    }

    #[test]
    fn crop_bounds() {
        let img = ImageMatrix::from_fn(4, 5, 1, |y, x, _| (y * 5 + x) as u8).unwrap();
        let c = augment_image(&img, Augmentation::Crop { x: 1, y: 2, w: 3, h: 2 }).unwrap();
        assert_eq!(c.pixels(), &[11, 12, 13, 16, 17, 18]);
        assert!(matches!(
            augment_image(&img, Augmentation::Crop { x: 3, y: 0, w: 3, h: 1 }),
            Err(Error::CropOutOfBounds { .. })
        ));
    }

    #[test]
    fn rotate90_clockwise() {
        // 2x3 image  a b c / d e f  ->  3x2  d a / e b / f c
        let img = ImageMatrix::new(2, 3, 1, alloc::vec![1, 2, 3, 4, 5, 6]).unwrap();
        let r = augment_image(&img, Augmentation::Rotate90).unwrap();
        assert_eq!((r.height(), r.width()), (3, 2));
        assert_eq!(r.pixels(), &[4, 1, 5, 2, 6, 3]);
    }

    #[test]
    fn colour_shift_clamps() {
        let img = ImageMatrix::new(1, 1, 3, alloc::vec![10, 200, 250]).unwrap();
        let op = Augmentation::Colour(ColourShift {
            scale: [2.0, 1.0, 1.1],
            shift: [0.0, -5.0, 10.0],
        });
        assert_eq!(augment_image(&img, op).unwrap().pixels(), &[20, 195, 255]);
    }

    proptest! {
        #[test]
        fn geometric_ops_are_exact(img in arb_image()) {
            let hflip = augment_image(&img, Augmentation::HFlip).unwrap();
            prop_assert_eq!(&augment_image(&hflip, Augmentation::HFlip).unwrap(), &img);
            let vflip = augment_image(&img, Augmentation::VFlip).unwrap();
            prop_assert_eq!(&augment_image(&vflip, Augmentation::VFlip).unwrap(), &img);
            let mut r = img.clone();
            for _ in 0..4 {
                r = augment_image(&r, Augmentation::Rotate90).unwrap();
            }
            prop_assert_eq!(&r, &img);
            let r180 = augment_image(&img, Augmentation::Rotate180).unwrap();
            let twice90 = augment_image(&augment_image(&img, Augmentation::Rotate90).unwrap(), Augmentation::Rotate90).unwrap();
            prop_assert_eq!(&r180, &twice90);
            let full = Augmentation::Crop { x: 0, y: 0, w: img.width(), h: img.height() };
            prop_assert_eq!(&augment_image(&img, full).unwrap(), &img);
            for out in [&hflip, &vflip, &r180] {
                let mut a = out.pixels().to_vec();
                let mut b = img.pixels().to_vec();
                a.sort_unstable();
                b.sort_unstable();
                prop_assert_eq!(a, b);
            }
        }
    }
}
