//! Field rendering: decision times to colors, Hilbert-curve packing of a
//! 1-D enumeration onto a square grid, and PPM emission.
//!
//! The color convention: lighter grey = decided sooner, pure white =
//! undecided within budget, red = the budget-maximal champions. Unused
//! grid cells are a light grey distinct from pure white.

use thiserror::Error;

#[derive(Error, Debug, PartialEq, Eq)]
pub enum VizError {
    #[error("decision time {t} outside 1..={s}")]
    TimeOutOfRange { t: u64, s: u64 },
    #[error("curve index {d} outside a 2^{order} x 2^{order} grid")]
    CurveIndexOutOfRange { d: u64, order: u32 },
    #[error("grid of order {order} holds {capacity} cells, need {count}")]
    GridTooSmall { order: u32, capacity: u64, count: u64 },
    #[error("crop {x},{y},{w},{h} exceeds image {width}x{height}")]
    BadCrop { x: u32, y: u32, w: u32, h: u32, width: u32, height: u32 },
}

pub type Rgb = (u8, u8, u8);

pub const WHITE: Rgb = (255, 255, 255);
pub const RED: Rgb = (255, 0, 0);
/// Fill for grid cells beyond the enumerated count; never pure white so
/// non-halting stays unambiguous.
pub const BACKGROUND: Rgb = (245, 245, 245);

/// One cell of a field: a decision time or undecided-within-budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldValue {
    Decided(u64),
    Undecided,
}

/// Pinned spectrum: white for undecided, red at the maximum `s`, and a
/// grey ramp `230 - round(200*(t-1)/max(s-2,1))` elsewhere, so smaller
/// times are lighter.
pub fn color_of(value: FieldValue, s: u64) -> Result<Rgb, VizError> {
    match value {
        FieldValue::Undecided => Ok(WHITE),
        FieldValue::Decided(t) => {
            if t == 0 || t > s {
                return Err(VizError::TimeOutOfRange { t, s });
            }
            if t == s {
                return Ok(RED);
            }
            let den = (s - 2).max(1);
            let g = 230 - ((200 * (t - 1) * 2 + den) / (2 * den)) as u8;
            Ok((g, g, g))
        }
    }
}

/// Hilbert curve position of linear index `d` on a `2^order` grid.
/// Pinned orientation: order 1 visits (0,0), (0,1), (1,1), (1,0).
pub fn curve_point(order: u32, d: u64) -> Result<(u32, u32), VizError> {
    let side = 1u64 << order;
    if d >= side * side {
        return Err(VizError::CurveIndexOutOfRange { d, order });
    }
    let (mut x, mut y) = (0u64, 0u64);
    let mut t = d;
    let mut s = 1u64;
    while s < side {
        let rx = 1 & (t / 2);
        let ry = 1 & (t ^ rx);
        if ry == 0 {
            if rx == 1 {
                x = s - 1 - x;
                y = s - 1 - y;
            }
            std::mem::swap(&mut x, &mut y);
        }
        x += s * rx;
        y += s * ry;
        t /= 4;
        s *= 2;
    }
    Ok((x as u32, y as u32))
}

/// Smallest curve order whose grid holds `count` cells.
pub fn curve_order_for(count: u64) -> u32 {
    let mut order = 0;
    while (1u64 << (2 * order)) < count {
        order += 1;
    }
    order
}

/// Row-major RGB image, always `2^order` square when produced by
/// [`render_field`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldImage {
    pub width: u32,
    pub height: u32,
    pub pixels: Vec<Rgb>,
}

impl FieldImage {
    fn filled(width: u32, height: u32, color: Rgb) -> Self {
        Self { width, height, pixels: vec![color; width as usize * height as usize] }
    }

    pub fn pixel(&self, x: u32, y: u32) -> Rgb {
        self.pixels[y as usize * self.width as usize + x as usize]
    }

    fn set(&mut self, x: u32, y: u32, color: Rgb) {
        self.pixels[y as usize * self.width as usize + x as usize] = color;
    }

    pub fn count_color(&self, color: Rgb) -> u64 {
        self.pixels.iter().filter(|&&p| p == color).count() as u64
    }

    /// Binary PPM (P6, maxval 255).
    pub fn to_ppm(&self) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.reserve(self.pixels.len() * 3);
        for &(r, g, b) in &self.pixels {
            out.extend_from_slice(&[r, g, b]);
        }
        out
    }

    pub fn crop(&self, x: u32, y: u32, w: u32, h: u32) -> Result<FieldImage, VizError> {
        if x + w > self.width || y + h > self.height || w == 0 || h == 0 {
            return Err(VizError::BadCrop { x, y, w, h, width: self.width, height: self.height });
        }
        let mut out = FieldImage::filled(w, h, BACKGROUND);
        for dy in 0..h {
            for dx in 0..w {
                out.set(dx, dy, self.pixel(x + dx, y + dy));
            }
        }
        Ok(out)
    }
}

/// Pack per-index decision times onto a Hilbert grid. Index `i` lands on
/// `curve_point(order, i)`; cells past `count` keep the background fill.
pub fn render_field(
    values: impl IntoIterator<Item = FieldValue>,
    count: u64,
    s: u64,
    order: u32,
) -> Result<FieldImage, VizError> {
    let side = 1u64 << order;
    if side * side < count {
        return Err(VizError::GridTooSmall { order, capacity: side * side, count });
    }
    let mut image = FieldImage::filled(side as u32, side as u32, BACKGROUND);
    for (i, value) in values.into_iter().enumerate() {
        if i as u64 >= count {
            break;
        }
        let (x, y) = curve_point(order, i as u64)?;
        image.set(x, y, color_of(value, s)?);
    }
    Ok(image)
}

/// Direct matrix layout for truth-space fields: one pixel per cell,
/// row-major (row = goal, column = system).
pub fn render_matrix(
    values: impl IntoIterator<Item = FieldValue>,
    width: u32,
    height: u32,
    s: u64,
) -> Result<FieldImage, VizError> {
    let mut image = FieldImage::filled(width, height, BACKGROUND);
    for (i, value) in values.into_iter().enumerate().take((width as usize) * height as usize) {
        image.pixels[i] = color_of(value, s)?;
    }
    Ok(image)
}

/// Legend strip: one cell per time 1..=s, then the undecided white cell.
pub fn render_spectrum_legend(s: u64) -> Result<FieldImage, VizError> {
    let mut image = FieldImage::filled(s as u32 + 1, 1, BACKGROUND);
    for t in 1..=s {
        image.set(t as u32 - 1, 0, color_of(FieldValue::Decided(t), s)?);
    }
    image.set(s as u32, 0, WHITE);
    Ok(image)
}
