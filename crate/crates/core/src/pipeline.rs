//! Raster image to tile system compilation, rendering and round-trip checks.
//!
//! Every pixel becomes its own tile type. The bottom-left pixel is the seed;
//! the bottom row and the left column grow from it along strength-2 chains,
//! and each interior pixel tile binds cooperatively to its west and south
//! neighbours through two strength-1 glues unique to those edges.
//!
//! Glue numbering, for a `W x H` image with `y` counted from the bottom:
//!
//! * the vertical edge between pixels `(x - 1, y)` and `(x, y)`, `1 <= x < W`,
//!   is glue `1 + y (W - 1) + (x - 1)`;
//! * the horizontal edge between `(x, y - 1)` and `(x, y)`, `1 <= y < H`, is
//!   glue `1 + H (W - 1) + (y - 1) W + x`.
//!
//! Vertical edges on the bottom row and horizontal edges on the left column
//! have strength 2; all others have strength 1.

use std::time::Instant;

use thiserror::Error;

use crate::model::{Assembly, Color, GlueStrengthTable, Site, TileId, TileSystem, TileType};
use crate::raster::RasterImage;
use crate::sim::{run, HaltReason, SimConfig, SimError};

pub const SEED_GROUP: &str = "seed tile";
pub const BOTTOM_ROW_GROUP: &str = "bottom row";
pub const LEFT_COLUMN_GROUP: &str = "left column";
pub const PIXEL_GROUP: &str = "pixel tiles";

/// Side length of the rapid-mode target.
pub const RAPID_SIZE: u32 = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CompileMode {
    #[default]
    Normal,
    /// Downscale to 32x32 first.
    Rapid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CompileOptions {
    pub mode: CompileMode,
    /// Largest `(width, height)` accepted in normal mode.
    pub max_dims: (u32, u32),
}

impl Default for CompileOptions {
    fn default() -> Self {
        CompileOptions {
            mode: CompileMode::Normal,
            max_dims: (256, 256),
        }
    }
}

impl CompileOptions {
    pub fn new(mode: CompileMode) -> Self {
        CompileOptions {
            mode,
            ..Default::default()
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CompileError {
    #[error(
        "image is {width}x{height}, above the {max_w}x{max_h} cap; raise the cap (--max-dim) or use rapid mode"
    )]
    CapExceeded {
        width: u32,
        height: u32,
        max_w: u32,
        max_h: u32,
    },
}

/// Nearest-neighbour resample: output `(x, y)` reads input
/// `(floor((x + 0.5) W / w), floor((y + 0.5) H / h))`.
pub fn downscale_nearest(img: &RasterImage, w: u32, h: u32) -> RasterImage {
    let (sw, sh) = (img.width() as u64, img.height() as u64);
    let mut pixels = Vec::with_capacity(w as usize * h as usize);
    for y in 0..h as u64 {
        let sy = ((2 * y + 1) * sh / (2 * h as u64)) as u32;
        for x in 0..w as u64 {
            let sx = ((2 * x + 1) * sw / (2 * w as u64)) as u32;
            pixels.push(img.get(sx, sy));
        }
    }
    RasterImage::new(w, h, pixels).expect("nonzero target")
}

/// The image a compile in `mode` reproduces.
pub fn compile_target(img: &RasterImage, mode: CompileMode) -> RasterImage {
    match mode {
        CompileMode::Normal => img.clone(),
        CompileMode::Rapid => downscale_nearest(img, RAPID_SIZE, RAPID_SIZE),
    }
}

struct Edges {
    w: u32,
    h: u32,
}

impl Edges {
    /// Edge between `(x - 1, y)` and `(x, y)`.
    fn vertical(&self, x: u32, y: u32) -> u32 {
        1 + y * (self.w - 1) + (x - 1)
    }

    /// Edge between `(x, y - 1)` and `(x, y)`.
    fn horizontal(&self, x: u32, y: u32) -> u32 {
        1 + self.h * (self.w - 1) + (y - 1) * self.w + x
    }

    fn count(&self) -> u32 {
        self.h * (self.w - 1) + self.w * (self.h - 1)
    }

    /// `{N E S W}` glues of pixel `(x, y)`, `y` from the bottom.
    fn glues(&self, x: u32, y: u32) -> [u32; 4] {
        [
            if y + 1 < self.h {
                self.horizontal(x, y + 1)
            } else {
                0
            },
            if x + 1 < self.w {
                self.vertical(x + 1, y)
            } else {
                0
            },
            if y >= 1 { self.horizontal(x, y) } else { 0 },
            if x >= 1 { self.vertical(x, y) } else { 0 },
        ]
    }
}

/// One tile type per pixel of the (possibly downscaled) image.
pub fn compile_image(img: &RasterImage, opts: &CompileOptions) -> Result<TileSystem, CompileError> {
    if opts.mode == CompileMode::Normal {
        let (max_w, max_h) = opts.max_dims;
        if img.width() > max_w || img.height() > max_h {
            return Err(CompileError::CapExceeded {
                width: img.width(),
                height: img.height(),
                max_w,
                max_h,
            });
        }
    }
    let img = compile_target(img, opts.mode);
    let (w, h) = (img.width(), img.height());
    let edges = Edges { w, h };
    let color = |x: u32, y: u32| img.get(x, h - 1 - y);

    let mut tiles = Vec::with_capacity(w as usize * h as usize);
    tiles.push(TileType::new(SEED_GROUP, edges.glues(0, 0), color(0, 0)));
    for x in 1..w {
        tiles.push(TileType::new(
            BOTTOM_ROW_GROUP,
            edges.glues(x, 0),
            color(x, 0),
        ));
    }
    for y in 1..h {
        tiles.push(TileType::new(
            LEFT_COLUMN_GROUP,
            edges.glues(0, y),
            color(0, y),
        ));
    }
    for y in 1..h {
        for x in 1..w {
            tiles.push(TileType::new(PIXEL_GROUP, edges.glues(x, y), color(x, y)));
        }
    }

    let mut strengths = vec![1u32; edges.count() as usize];
    for x in 1..w {
        strengths[edges.vertical(x, 0) as usize - 1] = 2;
    }
    for y in 1..h {
        strengths[edges.horizontal(0, y) as usize - 1] = 2;
    }

    Ok(TileSystem {
        tiles,
        strengths: GlueStrengthTable::new(strengths),
        seed: TileId(1),
        temperature: 2,
        gse: None,
        gmc: None,
    })
}

/// Paints the tight bounding box of `asm` with east on the right and north
/// at the top; empty sites get `background`.
pub fn render(asm: &Assembly, system: &TileSystem, background: Color) -> RasterImage {
    let (min_row, max_row, min_col, max_col) = asm.bounds();
    let w = (max_col - min_col + 1) as u32;
    let h = (max_row - min_row + 1) as u32;
    let mut img = RasterImage::filled(w, h, background).expect("assembly is nonempty");
    for (site, id) in asm.iter() {
        let Some(tile) = system.tile(id) else {
            continue;
        };
        let x = (max_col - site.col) as u32;
        let y = (max_row - site.row) as u32;
        img.set(x, y, tile.color);
    }
    img
}

/// Site holding pixel `(x, y)` (top-row-first image coordinates) of a
/// compiled `height`-row image.
pub fn pixel_site(x: u32, y: u32, height: u32) -> Site {
    Site::new((height - 1 - y) as i64, -(x as i64))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PixelMismatch {
    pub x: u32,
    pub y: u32,
    pub expected: Color,
    pub found: Option<Color>,
}

#[derive(Debug, Clone)]
pub struct RoundTripReport {
    pub passed: bool,
    pub first_mismatch: Option<PixelMismatch>,
    pub tile_count: usize,
    pub glue_count: usize,
    pub steps: u64,
    pub halted: HaltReason,
    pub wall_time: f64,
}

#[derive(Debug, Error)]
pub enum RoundTripError {
    #[error(transparent)]
    Compile(#[from] CompileError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// Compiles, grows to quiescence, renders and compares against the compile
/// target (the image itself, or its 32x32 downscale in rapid mode).
pub fn verify_roundtrip(
    img: &RasterImage,
    opts: &CompileOptions,
) -> Result<RoundTripReport, RoundTripError> {
    let start = Instant::now();
    let system = compile_image(img, opts)?;
    let target = compile_target(img, opts.mode);
    let result = run(&system, &SimConfig::default())?;
    // Transparent black never occurs in a loaded image, so holes show up.
    let rendered = render(&result.assembly, &system, Color(0));

    let mut first_mismatch = None;
    if (rendered.width(), rendered.height()) != (target.width(), target.height()) {
        first_mismatch = Some(PixelMismatch {
            x: 0,
            y: 0,
            expected: target.get(0, 0),
            found: None,
        });
    } else {
        'scan: for y in 0..target.height() {
            for x in 0..target.width() {
                let (want, got) = (target.get(x, y), rendered.get(x, y));
                if want != got {
                    first_mismatch = Some(PixelMismatch {
                        x,
                        y,
                        expected: want,
                        found: (got != Color(0)).then_some(got),
                    });
                    break 'scan;
                }
            }
        }
    }

    Ok(RoundTripReport {
        passed: first_mismatch.is_none() && result.halted == HaltReason::Quiescent,
        first_mismatch,
        tile_count: system.tiles.len(),
        glue_count: system.glue_count(),
        steps: result.steps,
        halted: result.halted,
        wall_time: start.elapsed().as_secs_f64(),
    })
}
