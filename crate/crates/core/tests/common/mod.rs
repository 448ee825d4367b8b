//! Test-only oracles shared by the integration suites. Nothing here calls the
//! simulator or the strength function of the library.
#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::Rng;
use tileasm_core::{Color, RasterImage, TileId, TileSystem};

/// `(d_row, d_col)` for N, E, S, W: rows grow north, columns grow west.
const OFFSETS: [(i64, i64); 4] = [(1, 0), (0, -1), (-1, 0), (0, 1)];

pub struct BruteAssembly {
    pub placed: BTreeMap<(i64, i64), TileId>,
    /// Sites where more than one tile type fitted at some pass.
    pub ambiguous: Vec<((i64, i64), Vec<TileId>)>,
    pub passes: usize,
}

fn strength_of(sys: &TileSystem, glue: u32) -> u32 {
    if glue == 0 {
        0
    } else {
        sys.strengths
            .as_slice()
            .get(glue as usize - 1)
            .copied()
            .unwrap_or(0)
    }
}

/// Tries every tile type at every empty site next to the assembly, pass after
/// pass, until nothing fits or `limit` tiles are placed. Ambiguous sites take
/// the lowest fitting id.
pub fn brute_assemble(sys: &TileSystem, limit: usize) -> BruteAssembly {
    let mut placed = BTreeMap::new();
    placed.insert((0i64, 0i64), sys.seed);
    let mut ambiguous = Vec::new();
    let mut passes = 0;
    loop {
        passes += 1;
        let mut sites: Vec<(i64, i64)> = placed
            .keys()
            .flat_map(|&(r, c)| OFFSETS.iter().map(move |(dr, dc)| (r + dr, c + dc)))
            .filter(|s| !placed.contains_key(s))
            .collect();
        sites.sort_unstable();
        sites.dedup();
        let mut added = false;
        for site in sites {
            let mut fits = Vec::new();
            for (i, tile) in sys.tiles.iter().enumerate() {
                let mut total = 0;
                for (side, (dr, dc)) in OFFSETS.iter().enumerate() {
                    let Some(other) = placed.get(&(site.0 + dr, site.1 + dc)) else {
                        continue;
                    };
                    let facing = sys.tiles[other.0 as usize - 1].glues[(side + 2) % 4].0;
                    let mine = tile.glues[side].0;
                    if mine != 0 && mine == facing {
                        total += strength_of(sys, mine);
                    }
                }
                if total >= sys.temperature {
                    fits.push(TileId(i as u32 + 1));
                }
            }
            if fits.len() > 1 {
                ambiguous.push((site, fits.clone()));
            }
            if let Some(&first) = fits.first() {
                placed.insert(site, first);
                added = true;
                if placed.len() >= limit {
                    return BruteAssembly {
                        placed,
                        ambiguous,
                        passes,
                    };
                }
            }
        }
        if !added {
            return BruteAssembly {
                placed,
                ambiguous,
                passes,
            };
        }
    }
}

pub fn random_image<R: Rng>(rng: &mut R, w: u32, h: u32) -> RasterImage {
    let pixels = (0..w * h)
        .map(|_| Color::from_rgb(rng.random(), rng.random(), rng.random()))
        .collect();
    RasterImage::new(w, h, pixels).unwrap()
}

/// Direct summation: offsets[r] = (s_1 + ... + s_r) mod n.
pub fn summed_offsets(n: u32, shifts: &[i64]) -> Vec<i64> {
    let mut out = vec![0i64];
    let mut acc = 0i64;
    for s in shifts {
        acc += s;
        out.push(acc.rem_euclid(n as i64));
    }
    out
}

/// Base row `[1, 2, ..., n]` rotated right by `k`: position `c` holds the
/// label that sat at `c - k`.
pub fn rotated_base_row(n: u32, k: i64) -> Vec<u32> {
    let base: Vec<u32> = (1..=n).collect();
    (0..n as i64)
        .map(|c| base[(c - k).rem_euclid(n as i64) as usize])
        .collect()
}
