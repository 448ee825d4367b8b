//! Abstract tile assembly toolkit: tile-system generators for cyclic pixel
//! patterns, a pixel-per-tile image compiler, a deterministic simulator and
//! the textual tile-file format that connects them.

pub mod generators;
pub mod model;
pub mod pipeline;
pub mod raster;
pub mod sim;
pub mod tilefile;

pub use generators::{
    expected_tile_count, gen_nonuniform, gen_transform, gen_uniform, nonuniform_oracle,
    uniform_oracle, wrap1, Generated, GeneratorLayout, ShiftSpec, TileRole,
};
pub use model::{
    attach_strength, validate_system, Assembly, Color, Glue, GlueStrengthTable, Side, Site, TileId,
    TileSystem, TileType, Violation,
};
pub use pipeline::{
    compile_image, downscale_nearest, render, verify_roundtrip, CompileMode, CompileOptions,
};
pub use raster::{load_image, ImageFormat, RasterImage};
pub use sim::{
    check_directed, eligible_tiles, frontier_sites, run, BoundingBox, HaltReason, NondetPolicy,
    SimConfig, SimError, SimResult, SiteOrder,
};
