//! ARGB rasters and their portable pixmap / PNG codecs.
//!
//! Loaded pixels always carry alpha `0xFE`. The PPM writer emits a fixed
//! header `P6 <w> <h> 255\n` (or `P3 ...`), which the reader accepts along
//! with any standard-conforming header layout, including `#` comments.

use std::fmt;
use std::io::Cursor;

use thiserror::Error;

use crate::model::Color;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ImageError {
    #[error("malformed header at byte {offset}: {reason}")]
    MalformedHeader { offset: usize, reason: String },
    #[error("bad sample at byte {offset}: {reason}")]
    BadSample { offset: usize, reason: String },
    #[error("truncated payload at byte {offset}: expected {expected} samples, found {found}")]
    Truncated {
        offset: usize,
        expected: usize,
        found: usize,
    },
    #[error("unsupported format at byte {offset}: {what}")]
    Unsupported { offset: usize, what: String },
    #[error("png: {0}")]
    Png(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImageFormat {
    /// `P3` or `P6`, detected from the magic number.
    Ppm,
    Png,
}

impl ImageFormat {
    pub fn from_extension(path: &std::path::Path) -> Option<ImageFormat> {
        let ext = path.extension()?.to_str()?.to_ascii_lowercase();
        match ext.as_str() {
            "ppm" | "pnm" => Some(ImageFormat::Ppm),
            "png" => Some(ImageFormat::Png),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PpmEncoding {
    /// `P3`
    Ascii,
    /// `P6`
    Binary,
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RasterImage {
    width: u32,
    height: u32,
    pixels: Vec<Color>,
}

impl fmt::Debug for RasterImage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RasterImage({}x{})", self.width, self.height)
    }
}

impl RasterImage {
    /// Row-major pixels, top row first. Returns `None` when the dimensions are
    /// zero or do not match the pixel count.
    pub fn new(width: u32, height: u32, pixels: Vec<Color>) -> Option<RasterImage> {
        if width == 0 || height == 0 || pixels.len() != width as usize * height as usize {
            return None;
        }
        Some(RasterImage {
            width,
            height,
            pixels,
        })
    }

    pub fn filled(width: u32, height: u32, color: Color) -> Option<RasterImage> {
        RasterImage::new(width, height, vec![color; width as usize * height as usize])
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn pixels(&self) -> &[Color] {
        &self.pixels
    }

    /// `y = 0` is the top row.
    pub fn get(&self, x: u32, y: u32) -> Color {
        self.pixels[y as usize * self.width as usize + x as usize]
    }

    pub fn set(&mut self, x: u32, y: u32, color: Color) {
        self.pixels[y as usize * self.width as usize + x as usize] = color;
    }
}

/// Decodes `bytes`, sniffing the format from the magic number when no hint
/// is given.
pub fn load_image(bytes: &[u8], hint: Option<ImageFormat>) -> Result<RasterImage, ImageError> {
    let format = match hint {
        Some(f) => f,
        None if bytes.starts_with(b"P3") || bytes.starts_with(b"P6") => ImageFormat::Ppm,
        None if bytes.starts_with(b"\x89PNG") => ImageFormat::Png,
        None => {
            return Err(ImageError::Unsupported {
                offset: 0,
                what: "unrecognised magic number".into(),
            })
        }
    };
    match format {
        ImageFormat::Ppm => decode_ppm(bytes),
        ImageFormat::Png => decode_png(bytes),
    }
}

struct Cursorish<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Cursorish<'_> {
    /// Skips whitespace and `#` comments.
    fn skip_space(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while self.bytes.get(self.pos).is_some_and(|&b| b != b'\n') {
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    /// Reads an unsigned decimal; returns `(value, start offset)`.
    fn number(&mut self, what: &str) -> Result<(u64, usize), ImageError> {
        self.skip_space();
        let start = self.pos;
        let mut value: u64 = 0;
        while let Some(&b) = self.bytes.get(self.pos) {
            if !b.is_ascii_digit() {
                break;
            }
            value = value
                .checked_mul(10)
                .and_then(|v| v.checked_add((b - b'0') as u64))
                .filter(|v| *v <= u32::MAX as u64)
                .ok_or_else(|| ImageError::MalformedHeader {
                    offset: start,
                    reason: format!("{what} is too large"),
                })?;
            self.pos += 1;
        }
        if self.pos == start {
            return Err(ImageError::MalformedHeader {
                offset: start,
                reason: format!("expected {what}"),
            });
        }
        Ok((value, start))
    }
}

fn decode_ppm(bytes: &[u8]) -> Result<RasterImage, ImageError> {
    let encoding = match bytes.get(..2) {
        Some(b"P3") => PpmEncoding::Ascii,
        Some(b"P6") => PpmEncoding::Binary,
        Some([b'P', _]) => {
            return Err(ImageError::Unsupported {
                offset: 0,
                what: format!("netpbm variant {:?}", String::from_utf8_lossy(&bytes[..2])),
            })
        }
        _ => {
            return Err(ImageError::MalformedHeader {
                offset: 0,
                reason: "missing P3/P6 magic".into(),
            })
        }
    };
    let mut cur = Cursorish { bytes, pos: 2 };
    if !cur
        .bytes
        .get(2)
        .is_some_and(|b| b.is_ascii_whitespace() || *b == b'#')
    {
        return Err(ImageError::MalformedHeader {
            offset: 2,
            reason: "expected whitespace after magic".into(),
        });
    }
    let (width, w_at) = cur.number("width")?;
    let (height, h_at) = cur.number("height")?;
    let (maxval, m_at) = cur.number("maxval")?;
    if width == 0 {
        return Err(ImageError::MalformedHeader {
            offset: w_at,
            reason: "width must be positive".into(),
        });
    }
    if height == 0 {
        return Err(ImageError::MalformedHeader {
            offset: h_at,
            reason: "height must be positive".into(),
        });
    }
    if maxval == 0 {
        return Err(ImageError::MalformedHeader {
            offset: m_at,
            reason: "maxval must be positive".into(),
        });
    }
    if maxval > 255 {
        return Err(ImageError::Unsupported {
            offset: m_at,
            what: format!("16-bit samples (maxval {maxval})"),
        });
    }
    let samples = (width * height)
        .checked_mul(3)
        .filter(|s| *s <= 1 << 32)
        .ok_or_else(|| ImageError::MalformedHeader {
            offset: w_at,
            reason: "image dimensions too large".into(),
        })? as usize;

    let scale = |v: u64| ((v * 255 + maxval / 2) / maxval) as u8;
    let mut channels: Vec<u8> = Vec::with_capacity(samples.min(bytes.len()));
    match encoding {
        PpmEncoding::Binary => {
            // Exactly one whitespace byte separates maxval from the raster.
            match bytes.get(cur.pos) {
                Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
                _ => {
                    return Err(ImageError::MalformedHeader {
                        offset: cur.pos,
                        reason: "expected a single whitespace byte before the raster".into(),
                    })
                }
            }
            let data = &bytes[cur.pos..];
            if data.len() < samples {
                let whole = data.len() / 3;
                return Err(ImageError::Truncated {
                    offset: bytes.len(),
                    expected: samples / 3,
                    found: whole,
                });
            }
            for (i, &v) in data[..samples].iter().enumerate() {
                if v as u64 > maxval {
                    return Err(ImageError::BadSample {
                        offset: cur.pos + i,
                        reason: format!("sample {v} exceeds maxval {maxval}"),
                    });
                }
                channels.push(scale(v as u64));
            }
        }
        PpmEncoding::Ascii => {
            for i in 0..samples {
                cur.skip_space();
                if cur.pos >= bytes.len() {
                    return Err(ImageError::Truncated {
                        offset: cur.pos,
                        expected: samples / 3,
                        found: i / 3,
                    });
                }
                let (v, at) = cur.number("sample").map_err(|e| match e {
                    ImageError::MalformedHeader { offset, reason } => {
                        ImageError::BadSample { offset, reason }
                    }
                    other => other,
                })?;
                if v > maxval {
                    return Err(ImageError::BadSample {
                        offset: at,
                        reason: format!("sample {v} exceeds maxval {maxval}"),
                    });
                }
                channels.push(scale(v));
            }
        }
    }
    let pixels = channels
        .chunks_exact(3)
        .map(|p| Color::from_rgb(p[0], p[1], p[2]))
        .collect();
    Ok(RasterImage::new(width as u32, height as u32, pixels).expect("dimensions checked"))
}

fn decode_png(bytes: &[u8]) -> Result<RasterImage, ImageError> {
    let img = image::load_from_memory_with_format(bytes, image::ImageFormat::Png)
        .map_err(|e| ImageError::Png(e.to_string()))?
        .to_rgb8();
    let pixels = img
        .pixels()
        .map(|p| Color::from_rgb(p[0], p[1], p[2]))
        .collect();
    RasterImage::new(img.width(), img.height(), pixels)
        .ok_or_else(|| ImageError::Png("empty image".into()))
}

/// Encodes as a portable pixmap with header `P<n> <w> <h> 255\n`. The ASCII
/// form writes one image row per line.
pub fn write_ppm(img: &RasterImage, encoding: PpmEncoding) -> Vec<u8> {
    let magic = match encoding {
        PpmEncoding::Ascii => "P3",
        PpmEncoding::Binary => "P6",
    };
    let mut out = format!("{magic} {} {} 255\n", img.width, img.height).into_bytes();
    match encoding {
        PpmEncoding::Binary => {
            out.extend(img.pixels.iter().flat_map(|c| c.rgb()));
        }
        PpmEncoding::Ascii => {
            for row in img.pixels.chunks(img.width as usize) {
                let line: Vec<String> = row
                    .iter()
                    .flat_map(|c| c.rgb())
                    .map(|v| v.to_string())
                    .collect();
                out.extend(line.join(" ").bytes());
                out.push(b'\n');
            }
        }
    }
    out
}

pub fn write_png(img: &RasterImage) -> Result<Vec<u8>, ImageError> {
    let raw: Vec<u8> = img.pixels.iter().flat_map(|c| c.rgb()).collect();
    let buf = image::RgbImage::from_raw(img.width, img.height, raw)
        .ok_or_else(|| ImageError::Png("buffer size mismatch".into()))?;
    let mut out = Cursor::new(Vec::new());
    buf.write_to(&mut out, image::ImageFormat::Png)
        .map_err(|e| ImageError::Png(e.to_string()))?;
    Ok(out.into_inner())
}
