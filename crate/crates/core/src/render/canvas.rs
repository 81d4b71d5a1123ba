//! Deterministic software rasterizer for schematic line art.
//!
//! All drawing is coverage-free (hard-edged) and purely arithmetic, so the
//! same display list always produces the same bytes.

use image::RgbImage;

pub type Rgb = [u8; 3];

pub struct Canvas {
    width: u32,
    height: u32,
    data: Vec<u8>,
}

impl Canvas {
    pub fn new(width: u32, height: u32, background: Rgb) -> Self {
        let mut data = vec![0u8; (width as usize) * (height as usize) * 3];
        for px in data.chunks_exact_mut(3) {
            px.copy_from_slice(&background);
        }
        Canvas { width, height, data }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    #[inline]
    fn put(&mut self, x: i64, y: i64, color: Rgb) {
        if x < 0 || y < 0 || x >= self.width as i64 || y >= self.height as i64 {
            return;
        }
        let idx = ((y as usize) * (self.width as usize) + (x as usize)) * 3;
        self.data[idx..idx + 3].copy_from_slice(&color);
    }

    /// Stamp every pixel whose center lies within `width/2` of the segment.
    /// Degenerate segments paint a dot of the same radius.
    pub fn segment(&mut self, x1: f64, y1: f64, x2: f64, y2: f64, width: f64, color: Rgb) {
        let r = (width.max(1.0)) / 2.0;
        let (min_x, max_x) = (x1.min(x2) - r, x1.max(x2) + r);
        let (min_y, max_y) = (y1.min(y2) - r, y1.max(y2) + r);
        let x_lo = min_x.floor() as i64;
        let x_hi = max_x.ceil() as i64;
        let y_lo = min_y.floor() as i64;
        let y_hi = max_y.ceil() as i64;
        let dx = x2 - x1;
        let dy = y2 - y1;
        let len2 = dx * dx + dy * dy;
        for py in y_lo..=y_hi {
            for px in x_lo..=x_hi {
                let cx = px as f64 + 0.5;
                let cy = py as f64 + 0.5;
                let t = if len2 > 0.0 {
                    (((cx - x1) * dx + (cy - y1) * dy) / len2).clamp(0.0, 1.0)
                } else {
                    0.0
                };
                let ex = x1 + t * dx - cx;
                let ey = y1 + t * dy - cy;
                if ex * ex + ey * ey <= r * r {
                    self.put(px, py, color);
                }
            }
        }
    }

    /// Fill all pixels whose center lies inside the rectangle.
    pub fn fill_rect(&mut self, x0: f64, y0: f64, x1: f64, y1: f64, color: Rgb) {
        let x_lo = x0.min(x1).floor() as i64;
        let x_hi = x0.max(x1).ceil() as i64;
        let y_lo = y0.min(y1).floor() as i64;
        let y_hi = y0.max(y1).ceil() as i64;
        for py in y_lo..=y_hi {
            for px in x_lo..=x_hi {
                let cx = px as f64 + 0.5;
                let cy = py as f64 + 0.5;
                if cx >= x0.min(x1) && cx <= x0.max(x1) && cy >= y0.min(y1) && cy <= y0.max(y1) {
                    self.put(px, py, color);
                }
            }
        }
    }

    /// Stroke a circle outline of the given stroke width.
    pub fn ring(&mut self, cx: f64, cy: f64, radius: f64, width: f64, color: Rgb) {
        let r = (width.max(1.0)) / 2.0;
        let lo = radius - r;
        let hi = radius + r;
        let x_lo = (cx - hi).floor() as i64;
        let x_hi = (cx + hi).ceil() as i64;
        let y_lo = (cy - hi).floor() as i64;
        let y_hi = (cy + hi).ceil() as i64;
        for py in y_lo..=y_hi {
            for px in x_lo..=x_hi {
                let dx = px as f64 + 0.5 - cx;
                let dy = py as f64 + 0.5 - cy;
                let d = (dx * dx + dy * dy).sqrt();
                if d >= lo && d <= hi {
                    self.put(px, py, color);
                }
            }
        }
    }

    pub fn disc(&mut self, cx: f64, cy: f64, radius: f64, color: Rgb) {
        let x_lo = (cx - radius).floor() as i64;
        let x_hi = (cx + radius).ceil() as i64;
        let y_lo = (cy - radius).floor() as i64;
        let y_hi = (cy + radius).ceil() as i64;
        for py in y_lo..=y_hi {
            for px in x_lo..=x_hi {
                let dx = px as f64 + 0.5 - cx;
                let dy = py as f64 + 0.5 - cy;
                if dx * dx + dy * dy <= radius * radius {
                    self.put(px, py, color);
                }
            }
        }
    }

    pub fn into_image(self) -> RgbImage {
        RgbImage::from_raw(self.width, self.height, self.data)
            .expect("canvas buffer matches dimensions")
    }
}

/// Integer box-filter downsample. Output dimensions are `ceil(dim / f)`;
/// edge blocks average over the pixels that exist.
pub fn downsample(img: &RgbImage, factor: u32) -> RgbImage {
    assert!(factor >= 1);
    if factor == 1 {
        return img.clone();
    }
    let f = factor as u64;
    let (w, h) = img.dimensions();
    let ow = w.div_ceil(factor);
    let oh = h.div_ceil(factor);
    let mut out = RgbImage::new(ow, oh);
    for oy in 0..oh {
        for ox in 0..ow {
            let x0 = ox as u64 * f;
            let y0 = oy as u64 * f;
            let x1 = (x0 + f).min(w as u64);
            let y1 = (y0 + f).min(h as u64);
            let mut sum = [0u64; 3];
            for y in y0..y1 {
                for x in x0..x1 {
                    let p = img.get_pixel(x as u32, y as u32);
                    for c in 0..3 {
                        sum[c] += p.0[c] as u64;
                    }
                }
            }
            let count = (x1 - x0) * (y1 - y0);
            let mut px = [0u8; 3];
            for c in 0..3 {
                px[c] = ((2 * sum[c] + count) / (2 * count)) as u8;
            }
            out.put_pixel(ox, oy, image::Rgb(px));
        }
    }
    out
}

/// Encode to PNG bytes. The encoder settings are fixed, so identical
/// pixels yield identical bytes.
pub fn encode_png(img: &RgbImage) -> Vec<u8> {
    use image::codecs::png::PngEncoder;
    use image::ImageEncoder;
    let mut bytes = Vec::new();
    PngEncoder::new(&mut bytes)
        .write_image(img.as_raw(), img.width(), img.height(), image::ExtendedColorType::Rgb8)
        .expect("in-memory PNG encoding cannot fail");
    bytes
}

/// Nearest-neighbour integer upscale.
pub fn upscale(img: &RgbImage, factor: u32) -> RgbImage {
    assert!(factor >= 1);
    if factor == 1 {
        return img.clone();
    }
    let (w, h) = img.dimensions();
    let mut out = RgbImage::new(w * factor, h * factor);
    for y in 0..h * factor {
        for x in 0..w * factor {
            out.put_pixel(x, y, *img.get_pixel(x / factor, y / factor));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn segment_paints_something_and_is_deterministic() {
        let mut a = Canvas::new(20, 20, [255, 255, 255]);
        a.segment(2.0, 2.0, 17.0, 17.0, 2.0, [0, 0, 0]);
        let mut b = Canvas::new(20, 20, [255, 255, 255]);
        b.segment(2.0, 2.0, 17.0, 17.0, 2.0, [0, 0, 0]);
        let ia = a.into_image();
        let ib = b.into_image();
        assert_eq!(ia.as_raw(), ib.as_raw());
        assert!(ia.pixels().any(|p| p.0 == [0, 0, 0]));
    }

    #[test]
    fn downsample_halves_dimensions() {
        let img = RgbImage::from_pixel(10, 8, image::Rgb([100, 100, 100]));
        let out = downsample(&img, 2);
        assert_eq!(out.dimensions(), (5, 4));
        assert_eq!(out.get_pixel(0, 0).0, [100, 100, 100]);
    }

    #[test]
    fn downsample_rounds_to_nearest() {
        let mut img = RgbImage::new(2, 2);
        img.put_pixel(0, 0, image::Rgb([255, 0, 0]));
        img.put_pixel(1, 0, image::Rgb([0, 0, 0]));
        img.put_pixel(0, 1, image::Rgb([0, 0, 0]));
        img.put_pixel(1, 1, image::Rgb([0, 0, 0]));
        let out = downsample(&img, 2);
        // (255 + 0 + 0 + 0) / 4 = 63.75 -> 64
        assert_eq!(out.get_pixel(0, 0).0, [64, 0, 0]);
    }

    #[test]
    fn png_encoding_is_stable() {
        let img = RgbImage::from_pixel(4, 4, image::Rgb([1, 2, 3]));
        assert_eq!(encode_png(&img), encode_png(&img));
    }
}
