use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "tileasm",
    version,
    about = "Generate, compile, simulate and verify aTAM tile systems"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Pattern where every row is the row below shifted by S.
    GenUniform(GenUniformArgs),
    /// Pattern with one shift per row (N-1 values).
    GenNonuniform(GenNonuniformArgs),
    /// Per-row shifts with the base row rotated by k.
    GenTransform(GenTransformArgs),
    /// Compile an image (PPM or PNG) into a one-tile-per-pixel system.
    Compile(CompileArgs),
    /// Grow a tile file and render the assembly.
    Run(RunArgs),
    /// Check a generated or compiled system against its expected output.
    Verify(VerifyArgs),
    /// Print a CSV of compile and assembly costs for random images.
    Stats(StatsArgs),
}

#[derive(Debug, Args)]
pub struct GenUniformArgs {
    /// Pattern width (number of distinct labels).
    #[arg(short = 'N')]
    pub n: u32,
    /// Shift between consecutive rows; taken mod N.
    #[arg(short = 'S', allow_negative_numbers = true)]
    pub shift: i64,
    /// Output tile file; stdout when omitted.
    #[arg(short = 'o', long = "out")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenNonuniformArgs {
    #[arg(short = 'N')]
    pub n: u32,
    /// Comma-separated shifts for rows 1..N-1.
    #[arg(
        short = 'S',
        value_delimiter = ',',
        allow_hyphen_values = true,
        required = true
    )]
    pub shifts: Vec<i64>,
    #[arg(short = 'o', long = "out")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenTransformArgs {
    #[arg(short = 'N')]
    pub n: u32,
    #[arg(
        short = 'S',
        value_delimiter = ',',
        allow_hyphen_values = true,
        required = true
    )]
    pub shifts: Vec<i64>,
    /// Rotation applied to the base row.
    #[arg(short = 'k', allow_negative_numbers = true)]
    pub rotate: i64,
    #[arg(short = 'o', long = "out")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Normal,
    Rapid,
}

#[derive(Debug, Args)]
pub struct CompileArgs {
    pub image: PathBuf,
    #[arg(long, value_enum, default_value_t = Mode::Normal)]
    pub mode: Mode,
    #[arg(short = 'o', long = "out")]
    pub out: Option<PathBuf>,
    /// Largest accepted image in normal mode, as WxH.
    #[arg(long, value_parser = parse_dims)]
    pub max_dim: Option<(u32, u32)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OnNondet {
    /// Stop with exit status 4.
    Fail,
    /// Place the lowest-numbered candidate and keep going.
    Lowest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Order {
    Lex,
    Insertion,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    pub tile_file: PathBuf,
    #[arg(long, default_value_t = 10_000_000)]
    pub max_steps: u64,
    /// Inclusive bounds min_row,max_row,min_col,max_col.
    #[arg(long = "box", allow_hyphen_values = true)]
    pub bounding_box: Option<String>,
    /// Rendered assembly; format from the extension (.ppm or .png).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// One `step row col tile_id` line per attachment.
    #[arg(long)]
    pub event_log: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OnNondet::Fail)]
    pub on_nondet: OnNondet,
    #[arg(long, value_enum, default_value_t = Order::Lex)]
    pub order: Order,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(subcommand)]
    pub target: VerifyTarget,
}

#[derive(Debug, Subcommand)]
pub enum VerifyTarget {
    Uniform {
        #[arg(short = 'N')]
        n: u32,
        #[arg(short = 'S', allow_negative_numbers = true)]
        shift: i64,
    },
    Nonuniform {
        #[arg(short = 'N')]
        n: u32,
        #[arg(
            short = 'S',
            value_delimiter = ',',
            allow_hyphen_values = true,
            required = true
        )]
        shifts: Vec<i64>,
    },
    Transform {
        #[arg(short = 'N')]
        n: u32,
        #[arg(
            short = 'S',
            value_delimiter = ',',
            allow_hyphen_values = true,
            required = true
        )]
        shifts: Vec<i64>,
        #[arg(short = 'k', allow_negative_numbers = true)]
        rotate: i64,
    },
    Image {
        image: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Normal)]
        mode: Mode,
        #[arg(long, value_parser = parse_dims)]
        max_dim: Option<(u32, u32)>,
    },
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    /// Comma-separated sizes; `16` means 16x16, `16x8` is width x height.
    #[arg(long, default_value = "")]
    pub sizes: String,
    /// Seed for the random images.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Measure every image in this directory instead of random ones.
    #[arg(long, conflicts_with = "sizes")]
    pub dir: Option<PathBuf>,
    /// Simulations per size; the fastest wall time is reported.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    pub repeat: u32,
    #[arg(long, value_enum, default_value_t = Mode::Normal)]
    pub mode: Mode,
}

pub fn parse_dims(s: &str) -> Result<(u32, u32), String> {
    let s = s.trim();
    let (w, h) = match s.split_once(['x', 'X']) {
        Some((w, h)) => (w, h),
        None => (s, s),
    };
    let w: u32 = w
        .trim()
        .parse()
        .map_err(|_| format!("bad width in {s:?}"))?;
    let h: u32 = h
        .trim()
        .parse()
        .map_err(|_| format!("bad height in {s:?}"))?;
    if w == 0 || h == 0 {
        return Err(format!("dimensions must be positive: {s:?}"));
    }
    Ok((w, h))
}

/// Parses a `--sizes` list. An empty string is an empty list.
pub fn parse_sizes(s: &str) -> Result<Vec<(u32, u32)>, String> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(parse_dims)
        .collect()
}
