use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tileasm_core::tilefile::emit;
use tileasm_core::{
    compile_image, load_image, run, Color, CompileMode, CompileOptions, HaltReason, ImageFormat,
    RasterImage, SimConfig,
};

pub const CSV_HEADER: &str = "width,height,tile_types,tile_file_bytes,sim_steps,wall_time_s";

#[derive(Debug, Clone, PartialEq)]
pub struct StatsRow {
    pub width: u32,
    pub height: u32,
    pub tile_types: usize,
    pub tile_file_bytes: usize,
    pub sim_steps: u64,
    /// Fastest simulation over all repeats, in seconds.
    pub wall_time: f64,
}

impl StatsRow {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{:.6}",
            self.width,
            self.height,
            self.tile_types,
            self.tile_file_bytes,
            self.sim_steps,
            self.wall_time
        )
    }
}

pub enum StatsSource {
    Random { sizes: Vec<(u32, u32)>, seed: u64 },
    Directory(PathBuf),
}

/// Random image for one size. Each size draws from its own stream, so a
/// size's image does not depend on which other sizes are requested.
pub fn random_image(seed: u64, width: u32, height: u32) -> RasterImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((u64::from(width) << 32) | u64::from(height));
    let pixels = (0..u64::from(width) * u64::from(height))
        .map(|_| Color::from_rgb(rng.random(), rng.random(), rng.random()))
        .collect();
    RasterImage::new(width, height, pixels).expect("pixel count matches")
}

/// Compiles `img`, emits the tile file and grows it `repeat` times.
pub fn measure(img: &RasterImage, mode: CompileMode, repeat: u32) -> Result<StatsRow, String> {
    let system = compile_image(img, &CompileOptions::new(mode)).map_err(|e| e.to_string())?;
    let text = emit(&system).map_err(|e| e.to_string())?;
    let mut best = f64::INFINITY;
    let mut steps = 0;
    for _ in 0..repeat.max(1) {
        let result = run(&system, &SimConfig::default()).map_err(|e| e.to_string())?;
        if result.halted != HaltReason::Quiescent {
            return Err(format!("assembly halted by {}", result.halted));
        }
        steps = result.steps;
        best = best.min(result.wall_time);
    }
    let target = tileasm_core::pipeline::compile_target(img, mode);
    Ok(StatsRow {
        width: target.width(),
        height: target.height(),
        tile_types: system.tiles.len(),
        tile_file_bytes: text.len(),
        sim_steps: steps,
        wall_time: best,
    })
}

/// Failed measurements keep their dimensions and carry the reason in a
/// trailing seventh column.
fn error_row(width: u32, height: u32, msg: &str) -> String {
    let msg: String = msg
        .chars()
        .map(|c| {
            if c == ',' || c == '\n' || c == '\r' {
                ' '
            } else {
                c
            }
        })
        .collect();
    format!("{width},{height},,,,,error: {msg}")
}

pub fn write_csv<W: Write>(
    source: &StatsSource,
    mode: CompileMode,
    repeat: u32,
    out: &mut W,
) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    match source {
        StatsSource::Random { sizes, seed } => {
            for &(w, h) in sizes {
                let line = match measure(&random_image(*seed, w, h), mode, repeat) {
                    Ok(row) => row.to_csv(),
                    Err(e) => error_row(w, h, &e),
                };
                writeln!(out, "{line}")?;
            }
        }
        StatsSource::Directory(dir) => {
            let mut paths: Vec<PathBuf> = fs::read_dir(dir)?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| ImageFormat::from_extension(p).is_some())
                .collect();
            paths.sort();
            for path in paths {
                let loaded = fs::read(&path).map_err(|e| e.to_string()).and_then(|b| {
                    load_image(&b, ImageFormat::from_extension(&path)).map_err(|e| e.to_string())
                });
                let line = match loaded {
                    Ok(img) => match measure(&img, mode, repeat) {
                        Ok(row) => row.to_csv(),
                        Err(e) => error_row(img.width(), img.height(), &e),
                    },
                    Err(e) => error_row(0, 0, &format!("{}: {e}", path.display())),
                };
                writeln!(out, "{line}")?;
            }
        }
    }
    Ok(())
}
