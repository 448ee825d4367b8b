use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use tileasm_core::generators::cumulative_offsets;
use tileasm_core::raster::{write_png, write_ppm, PpmEncoding};
use tileasm_core::sim::write_event_log;
use tileasm_core::tilefile::{emit, parse};
use tileasm_core::{
    compile_image, gen_nonuniform, gen_transform, gen_uniform, load_image, render, uniform_oracle,
    verify_roundtrip, wrap1, BoundingBox, Color, CompileMode, CompileOptions, Generated,
    HaltReason, ImageFormat, NondetPolicy, RasterImage, SimConfig, SiteOrder, TileSystem,
};

use crate::args::{
    CompileArgs, GenNonuniformArgs, GenTransformArgs, GenUniformArgs, Mode, OnNondet, Order,
    RunArgs, StatsArgs, VerifyTarget,
};
use crate::stats::{self, StatsSource};
use crate::{CliError, Command};

pub fn dispatch(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::GenUniform(a) => gen_uniform_cmd(a),
        Command::GenNonuniform(a) => gen_nonuniform_cmd(a),
        Command::GenTransform(a) => gen_transform_cmd(a),
        Command::Compile(a) => compile_cmd(a),
        Command::Run(a) => run_cmd(a),
        Command::Verify(a) => verify_cmd(a.target),
        Command::Stats(a) => stats_cmd(a),
    }
}

pub fn compile_mode(mode: Mode) -> CompileMode {
    match mode {
        Mode::Normal => CompileMode::Normal,
        Mode::Rapid => CompileMode::Rapid,
    }
}

fn compile_options(mode: Mode, max_dim: Option<(u32, u32)>) -> CompileOptions {
    let mut opts = CompileOptions::new(compile_mode(mode));
    if let Some(dims) = max_dim {
        opts.max_dims = dims;
    }
    opts
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

fn stdout_error(e: io::Error) -> CliError {
    CliError::io("<stdout>", e)
}

/// Writes the tile file to `out` (or stdout) and reports `summary` on the
/// stream that is not carrying the file.
fn deliver(text: &str, out: Option<&Path>, summary: &str) -> Result<(), CliError> {
    match out {
        Some(path) => {
            write_file(path, text.as_bytes())?;
            println!("{summary}");
        }
        None => {
            io::stdout()
                .write_all(text.as_bytes())
                .map_err(stdout_error)?;
            eprintln!("{summary}");
        }
    }
    Ok(())
}

fn emit_system(system: &TileSystem) -> Result<String, CliError> {
    emit(system).map_err(|e| CliError::Usage(e.to_string()))
}

fn gen_summary(g: &Generated, distinct: usize) -> String {
    format!(
        "tiles: {}\ndistinct shifts: {distinct}",
        g.system.tiles.len()
    )
}

fn gen_uniform_cmd(a: GenUniformArgs) -> Result<(), CliError> {
    let g = gen_uniform(a.n, a.shift)?;
    deliver(
        &emit_system(&g.system)?,
        a.out.as_deref(),
        &gen_summary(&g, 1),
    )
}

fn distinct_count(n: u32, shifts: &[i64]) -> Result<usize, CliError> {
    let spec = tileasm_core::ShiftSpec::per_row(n, shifts)?;
    Ok(spec.distinct_shifts().len())
}

fn gen_nonuniform_cmd(a: GenNonuniformArgs) -> Result<(), CliError> {
    let g = gen_nonuniform(a.n, &a.shifts)?;
    let d = distinct_count(a.n, &a.shifts)?;
    deliver(
        &emit_system(&g.system)?,
        a.out.as_deref(),
        &gen_summary(&g, d),
    )
}

fn gen_transform_cmd(a: GenTransformArgs) -> Result<(), CliError> {
    let g = gen_transform(a.n, &a.shifts, a.rotate)?;
    let d = distinct_count(a.n, &a.shifts)?;
    deliver(
        &emit_system(&g.system)?,
        a.out.as_deref(),
        &gen_summary(&g, d),
    )
}

pub fn read_image(path: &Path) -> Result<RasterImage, CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    load_image(&bytes, ImageFormat::from_extension(path)).map_err(|source| CliError::Image {
        path: path.to_path_buf(),
        source,
    })
}

fn compile_cmd(a: CompileArgs) -> Result<(), CliError> {
    let img = read_image(&a.image)?;
    let system = compile_image(&img, &compile_options(a.mode, a.max_dim))?;
    let text = emit_system(&system)?;
    let target = tileasm_core::pipeline::compile_target(&img, compile_mode(a.mode));
    let (w, h) = (target.width(), target.height());
    // Compiled systems fill their rectangle one tile per step.
    let summary = format!(
        "width: {w}\nheight: {h}\ntile_types: {}\ntile_file_bytes: {}\nsim_steps: {}",
        system.tiles.len(),
        text.len(),
        u64::from(w) * u64::from(h) - 1
    );
    deliver(&text, a.out.as_deref(), &summary)
}

fn read_tile_file(path: &Path) -> Result<TileSystem, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let (system, doc) = parse(&text).map_err(|e| CliError::TileFile {
        path: path.to_path_buf(),
        source: e.into(),
    })?;
    for w in &doc.warnings {
        match w.line {
            Some(line) => eprintln!("{}:{line}: warning: {}", path.display(), w.message),
            None => eprintln!("{}: warning: {}", path.display(), w.message),
        }
    }
    Ok(system)
}

fn write_image(path: &Path, img: &RasterImage) -> Result<(), CliError> {
    let bytes = match ImageFormat::from_extension(path) {
        Some(ImageFormat::Png) => write_png(img).map_err(|source| CliError::Image {
            path: path.to_path_buf(),
            source,
        })?,
        Some(ImageFormat::Ppm) => write_ppm(img, PpmEncoding::Binary),
        None => {
            return Err(CliError::Usage(format!(
                "{}: output image needs a .ppm or .png extension",
                path.display()
            )))
        }
    };
    write_file(path, &bytes)
}

fn run_cmd(a: RunArgs) -> Result<(), CliError> {
    let bounding_box = match &a.bounding_box {
        Some(s) => Some(
            s.parse::<BoundingBox>()
                .map_err(|e| CliError::Usage(format!("--box {s:?}: {e}")))?,
        ),
        None => None,
    };
    let cfg = SimConfig {
        max_steps: a.max_steps,
        bounding_box,
        on_nondeterminism: match a.on_nondet {
            OnNondet::Fail => NondetPolicy::Fail,
            OnNondet::Lowest => NondetPolicy::PickLowest,
        },
        site_order: match a.order {
            Order::Lex => SiteOrder::Lexicographic,
            Order::Insertion => SiteOrder::Insertion,
        },
    };
    // Validate output paths before a possibly long simulation.
    if let Some(out) = &a.out {
        if ImageFormat::from_extension(out).is_none() {
            return Err(CliError::Usage(format!(
                "{}: output image needs a .ppm or .png extension",
                out.display()
            )));
        }
    }
    let system = read_tile_file(&a.tile_file)?;
    let result = tileasm_core::run(&system, &cfg)?;

    if let Some(path) = &a.out {
        write_image(path, &render(&result.assembly, &system, Color(0)))?;
    }
    if let Some(path) = &a.event_log {
        let file = fs::File::create(path).map_err(|e| CliError::io(path, e))?;
        let mut w = BufWriter::new(file);
        write_event_log(&result.events, &mut w)
            .and_then(|_| w.flush())
            .map_err(|e| CliError::io(path, e))?;
    }

    let (r0, r1, c0, c1) = result.assembly.bounds();
    println!("steps: {}", result.steps);
    println!("halted: {}", result.halted);
    println!("tiles placed: {}", result.assembly.len());
    println!("rows: {r0}..={r1}");
    println!("cols: {c0}..={c1}");
    println!(
        "nondeterministic sites: {}",
        result.nondeterministic_sites.len()
    );
    println!("wall_time_s: {:.6}", result.wall_time);

    match result.halted {
        HaltReason::StepCap => Err(CliError::StepCap(cfg.max_steps)),
        _ => Ok(()),
    }
}

fn verify_generated(g: &Generated, expected: impl Fn(u32, u32) -> u32) -> Result<(), CliError> {
    let n = g.layout.n;
    let cfg = SimConfig::default();
    let result = tileasm_core::run(&g.system, &cfg)?;
    let mismatches = g.compare(&result.assembly, expected);
    let want_steps = u64::from(n) * u64::from(n) - 1;
    println!("steps: {} (expected {want_steps})", result.steps);
    println!("halted: {}", result.halted);
    println!("label mismatches: {}", mismatches.len());
    for m in mismatches.iter().take(10) {
        let found = m.found.map_or("empty".to_string(), |f| f.to_string());
        println!(
            "  row {} col {}: expected {} found {found}",
            m.row, m.col, m.expected
        );
    }
    if !mismatches.is_empty() {
        return Err(CliError::VerifyFailed(format!(
            "{} label mismatches",
            mismatches.len()
        )));
    }
    if result.steps != want_steps || result.halted != HaltReason::Quiescent {
        return Err(CliError::VerifyFailed(format!(
            "assembly took {} steps and halted by {}",
            result.steps, result.halted
        )));
    }
    println!("PASS");
    Ok(())
}

fn shifted_label(n: u32, offsets: &[u32], rotate: i64, r: u32, c: u32) -> u32 {
    if (r, c) == (0, 0) {
        return n + 1;
    }
    let x = i64::from(c) + 1 - i64::from(offsets[r as usize]) - rotate;
    wrap1(x, i64::from(n)).expect("n is at least 2") as u32
}

fn verify_cmd(target: VerifyTarget) -> Result<(), CliError> {
    match target {
        VerifyTarget::Uniform { n, shift } => {
            let g = gen_uniform(n, shift)?;
            verify_generated(&g, |r, c| {
                uniform_oracle(n, shift, r, c).expect("site in range")
            })
        }
        VerifyTarget::Nonuniform { n, shifts } => {
            let g = gen_nonuniform(n, &shifts)?;
            let offsets = cumulative_offsets(n, &shifts)?;
            verify_generated(&g, |r, c| shifted_label(n, &offsets, 0, r, c))
        }
        VerifyTarget::Transform { n, shifts, rotate } => {
            let g = gen_transform(n, &shifts, rotate)?;
            let offsets = cumulative_offsets(n, &shifts)?;
            verify_generated(&g, |r, c| shifted_label(n, &offsets, rotate, r, c))
        }
        VerifyTarget::Image {
            image,
            mode,
            max_dim,
        } => {
            let img = read_image(&image)?;
            let report =
                verify_roundtrip(&img, &compile_options(mode, max_dim)).map_err(|e| match e {
                    tileasm_core::pipeline::RoundTripError::Compile(e) => CliError::Compile(e),
                    tileasm_core::pipeline::RoundTripError::Sim(e) => CliError::Sim(e),
                })?;
            println!("tile_types: {}", report.tile_count);
            println!("glue_types: {}", report.glue_count);
            println!("steps: {}", report.steps);
            println!("halted: {}", report.halted);
            match report.first_mismatch {
                None if report.passed => {
                    println!("PASS");
                    Ok(())
                }
                Some(m) => {
                    let found = m.found.map_or("nothing".to_string(), |c| c.to_string());
                    Err(CliError::VerifyFailed(format!(
                        "pixel ({}, {}) expected {} found {found}",
                        m.x, m.y, m.expected
                    )))
                }
                None => Err(CliError::VerifyFailed("rendered image differs".into())),
            }
        }
    }
}

fn stats_cmd(a: StatsArgs) -> Result<(), CliError> {
    let source = match &a.dir {
        Some(dir) => StatsSource::Directory(dir.clone()),
        None => StatsSource::Random {
            sizes: crate::args::parse_sizes(&a.sizes).map_err(CliError::Usage)?,
            seed: a.seed,
        },
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    stats::write_csv(&source, compile_mode(a.mode), a.repeat, &mut out).map_err(stdout_error)?;
    out.flush().map_err(stdout_error)
}
