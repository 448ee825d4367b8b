//! Deterministic abstract tile assembly simulator.
//!
//! Growth starts from the seed at the origin. At each step the first
//! attachable frontier site (lexicographic or insertion order) receives a tile
//! whose matching glue strength reaches the temperature. Attachment is
//! irreversible, so a site that becomes attachable stays attachable until it
//! is filled; the simulator caches each site's candidate list and refreshes
//! only the neighbours of the tile it just placed.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::io::{self, BufRead, Write};
use std::str::FromStr;
use std::time::Instant;

use thiserror::Error;

use crate::model::{
    attach_strength, validate_system, Assembly, Glue, ModelError, Side, Site, TileId, TileSystem,
    Violation,
};

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid tile system: {}", join_violations(.0))]
    InvalidSystem(Vec<Violation>),
    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
    #[error("nondeterministic attachment at {site}: candidates {}", join_ids(.candidates))]
    Nondeterministic { site: Site, candidates: Vec<TileId> },
    #[error(transparent)]
    Model(#[from] ModelError),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

fn join_ids(ids: &[TileId]) -> String {
    ids.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NondetPolicy {
    #[default]
    Fail,
    PickLowest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SiteOrder {
    /// Smallest `(row, col)` first.
    #[default]
    Lexicographic,
    /// Sites in the order they first became attachable.
    Insertion,
}

/// Inclusive site bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundingBox {
    pub min_row: i64,
    pub max_row: i64,
    pub min_col: i64,
    pub max_col: i64,
}

impl BoundingBox {
    pub fn new(min_row: i64, max_row: i64, min_col: i64, max_col: i64) -> BoundingBox {
        BoundingBox {
            min_row,
            max_row,
            min_col,
            max_col,
        }
    }

    pub fn contains(&self, site: Site) -> bool {
        (self.min_row..=self.max_row).contains(&site.row)
            && (self.min_col..=self.max_col).contains(&site.col)
    }

    pub fn area(&self) -> u64 {
        let rows = (self.max_row - self.min_row + 1).max(0) as u64;
        let cols = (self.max_col - self.min_col + 1).max(0) as u64;
        rows * cols
    }
}

impl FromStr for BoundingBox {
    type Err = String;

    /// `min_row,max_row,min_col,max_col`
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<i64> = s
            .split(',')
            .map(|p| p.trim().parse::<i64>().map_err(|e| format!("{p:?}: {e}")))
            .collect::<Result<_, _>>()?;
        match parts[..] {
            [a, b, c, d] if a <= b && c <= d => Ok(BoundingBox::new(a, b, c, d)),
            [_, _, _, _] => Err("box bounds must satisfy min <= max".into()),
            _ => Err("expected min_row,max_row,min_col,max_col".into()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimConfig {
    pub max_steps: u64,
    pub bounding_box: Option<BoundingBox>,
    pub on_nondeterminism: NondetPolicy,
    pub site_order: SiteOrder,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            max_steps: 10_000_000,
            bounding_box: None,
            on_nondeterminism: NondetPolicy::Fail,
            site_order: SiteOrder::Lexicographic,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HaltReason {
    Quiescent,
    StepCap,
    BoxFull,
}

impl fmt::Display for HaltReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HaltReason::Quiescent => "quiescent",
            HaltReason::StepCap => "step-cap",
            HaltReason::BoxFull => "box-full",
        })
    }
}

/// One attachment; `step` counts from 1 (the seed is not logged).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Attachment {
    pub step: u64,
    pub site: Site,
    pub tile: TileId,
}

#[derive(Debug, Clone)]
pub struct SimResult {
    pub assembly: Assembly,
    pub steps: u64,
    pub halted: HaltReason,
    /// Sites that admitted two or more tile types when they were filled.
    pub nondeterministic_sites: Vec<(Site, Vec<TileId>)>,
    pub events: Vec<Attachment>,
    pub wall_time: f64,
}

/// Unoccupied sites 4-adjacent to the assembly, clipped to `bounds`.
pub fn frontier_sites(asm: &Assembly, bounds: Option<&BoundingBox>) -> BTreeSet<Site> {
    asm.iter()
        .flat_map(|(site, _)| site.neighbors().map(|(_, n)| n))
        .filter(|n| !asm.is_occupied(*n))
        .filter(|n| bounds.is_none_or(|b| b.contains(*n)))
        .collect()
}

/// Tiles whose binding strength at `site` reaches the temperature, ascending.
/// Scans every tile type; the simulator uses an indexed equivalent.
pub fn eligible_tiles(
    system: &TileSystem,
    asm: &Assembly,
    site: Site,
) -> Result<Vec<TileId>, ModelError> {
    let mut out = Vec::new();
    for (id, tile) in system.ids().zip(&system.tiles) {
        if attach_strength(system, asm, site, tile)? >= system.temperature {
            out.push(id);
        }
    }
    Ok(out)
}

/// Tiles grouped by the glue they show on each side.
struct GlueIndex {
    by_side: [HashMap<Glue, Vec<TileId>>; 4],
}

impl GlueIndex {
    fn new(system: &TileSystem) -> GlueIndex {
        let mut by_side: [HashMap<Glue, Vec<TileId>>; 4] = Default::default();
        for (id, tile) in system.ids().zip(&system.tiles) {
            for side in Side::ALL {
                let glue = tile.glue(side);
                if !glue.is_null() && system.strengths.strength(glue) > 0 {
                    by_side[side.index()].entry(glue).or_default().push(id);
                }
            }
        }
        GlueIndex { by_side }
    }

    fn eligible(&self, system: &TileSystem, asm: &Assembly, site: Site) -> Vec<TileId> {
        let mut acc: Vec<(TileId, u32)> = Vec::new();
        for (side, neighbor) in site.neighbors() {
            let Some(other) = asm.get(neighbor).and_then(|id| system.tile(id)) else {
                continue;
            };
            let glue = other.glue(side.opposite());
            let Some(tiles) = self.by_side[side.index()].get(&glue) else {
                continue;
            };
            let strength = system.strengths.strength(glue);
            for &id in tiles {
                match acc.iter_mut().find(|(t, _)| *t == id) {
                    Some((_, s)) => *s += strength,
                    None => acc.push((id, strength)),
                }
            }
        }
        let mut out: Vec<TileId> = acc
            .into_iter()
            .filter(|(_, s)| *s >= system.temperature)
            .map(|(id, _)| id)
            .collect();
        out.sort_unstable();
        out
    }
}

struct Frontier {
    order: SiteOrder,
    seq: i64,
    queue: BTreeMap<(i64, i64), Site>,
    candidates: HashMap<Site, ((i64, i64), Vec<TileId>)>,
}

impl Frontier {
    fn new(order: SiteOrder) -> Frontier {
        Frontier {
            order,
            seq: 0,
            queue: BTreeMap::new(),
            candidates: HashMap::new(),
        }
    }

    fn update(&mut self, site: Site, eligible: Vec<TileId>) {
        if eligible.is_empty() {
            return;
        }
        if let Some(entry) = self.candidates.get_mut(&site) {
            entry.1 = eligible;
            return;
        }
        let key = match self.order {
            SiteOrder::Lexicographic => (site.row, site.col),
            SiteOrder::Insertion => {
                self.seq += 1;
                (self.seq, 0)
            }
        };
        self.queue.insert(key, site);
        self.candidates.insert(site, (key, eligible));
    }

    fn pop(&mut self) -> Option<(Site, Vec<TileId>)> {
        let (_, site) = self.queue.pop_first()?;
        let (_, eligible) = self.candidates.remove(&site)?;
        Some((site, eligible))
    }

    fn is_empty(&self) -> bool {
        self.queue.is_empty()
    }
}

/// Grows the system's seed until no site admits a tile, the step cap is hit,
/// or the bounding box is full.
pub fn run(system: &TileSystem, cfg: &SimConfig) -> Result<SimResult, SimError> {
    let violations = validate_system(system);
    if !violations.is_empty() {
        return Err(SimError::InvalidSystem(violations));
    }
    if cfg.max_steps == 0 {
        return Err(SimError::InvalidConfig(
            "max_steps must be at least 1".into(),
        ));
    }
    let bounds = cfg.bounding_box;
    if let Some(b) = &bounds {
        if !b.contains(Site::ORIGIN) {
            return Err(SimError::InvalidConfig(
                "bounding box must contain the seed site (0, 0)".into(),
            ));
        }
    }

    let start = Instant::now();
    let index = GlueIndex::new(system);
    let mut asm = Assembly::new(Site::ORIGIN, system.seed);
    let mut frontier = Frontier::new(cfg.site_order);
    let mut events = Vec::new();
    let mut nondeterministic_sites = Vec::new();
    let mut steps = 0u64;

    let refresh = |asm: &Assembly, frontier: &mut Frontier, placed: Site| {
        for (_, n) in placed.neighbors() {
            if asm.is_occupied(n) || bounds.is_some_and(|b| !b.contains(n)) {
                continue;
            }
            frontier.update(n, index.eligible(system, asm, n));
        }
    };
    refresh(&asm, &mut frontier, Site::ORIGIN);

    let halted = loop {
        if bounds.is_some_and(|b| asm.len() as u64 >= b.area()) {
            break HaltReason::BoxFull;
        }
        if frontier.is_empty() {
            break HaltReason::Quiescent;
        }
        if steps >= cfg.max_steps {
            break HaltReason::StepCap;
        }
        let (site, candidates) = frontier.pop().expect("frontier not empty");
        if candidates.len() > 1 {
            if cfg.on_nondeterminism == NondetPolicy::Fail {
                return Err(SimError::Nondeterministic { site, candidates });
            }
            nondeterministic_sites.push((site, candidates.clone()));
        }
        let tile = candidates[0];
        asm.place(site, tile)?;
        steps += 1;
        events.push(Attachment {
            step: steps,
            site,
            tile,
        });
        refresh(&asm, &mut frontier, site);
    };

    Ok(SimResult {
        assembly: asm,
        steps,
        halted,
        nondeterministic_sites,
        events,
        wall_time: start.elapsed().as_secs_f64(),
    })
}

#[derive(Debug, Clone)]
pub struct DirectedReport {
    pub directed: bool,
    pub offending: Vec<(Site, Vec<TileId>)>,
    pub steps: u64,
    pub halted: HaltReason,
}

/// Runs the system to halt, taking the lowest candidate at every ambiguous
/// site, and reports whether any site ever admitted more than one tile type.
/// Candidate sets only grow as neighbours arrive, so checking each site when
/// it is filled covers every intermediate frontier.
pub fn check_directed(system: &TileSystem, cfg: &SimConfig) -> Result<DirectedReport, SimError> {
    let cfg = SimConfig {
        on_nondeterminism: NondetPolicy::PickLowest,
        ..cfg.clone()
    };
    let result = run(system, &cfg)?;
    Ok(DirectedReport {
        directed: result.nondeterministic_sites.is_empty(),
        offending: result.nondeterministic_sites,
        steps: result.steps,
        halted: result.halted,
    })
}

/// Writes one `step row col tile_id` line per attachment.
pub fn write_event_log<W: Write>(events: &[Attachment], mut out: W) -> io::Result<()> {
    for e in events {
        writeln!(out, "{} {} {} {}", e.step, e.site.row, e.site.col, e.tile)?;
    }
    Ok(())
}

pub fn read_event_log<R: BufRead>(input: R) -> io::Result<Vec<Attachment>> {
    let bad = |line: usize| {
        io::Error::new(
            io::ErrorKind::InvalidData,
            format!("bad event on line {line}"),
        )
    };
    let mut out = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<i64> = line
            .split_whitespace()
            .map(|t| t.parse::<i64>().map_err(|_| bad(i + 1)))
            .collect::<Result<_, _>>()?;
        let [step, row, col, tile] = f[..] else {
            return Err(bad(i + 1));
        };
        if step < 1 || tile < 1 || tile > u32::MAX as i64 {
            return Err(bad(i + 1));
        }
        out.push(Attachment {
            step: step as u64,
            site: Site::new(row, col),
            tile: TileId(tile as u32),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Color, GlueStrengthTable, TileType};

    fn sys(tiles: Vec<TileType>, strengths: Vec<u32>) -> TileSystem {
        TileSystem {
            tiles,
            strengths: GlueStrengthTable::new(strengths),
            seed: TileId(1),
            temperature: 2,
            gse: None,
            gmc: None,
        }
    }

    /// A single strength-2 chain growing northwards `len` tiles.
    fn chain(len: u32) -> TileSystem {
        let mut tiles = vec![TileType::new("seed", [1, 0, 0, 0], Color::RED)];
        for g in 1..len {
            tiles.push(TileType::new("link", [g + 1, 0, g, 0], Color::BLUE));
        }
        sys(tiles, vec![2; len as usize + 1])
    }

    #[test]
    fn frontier_of_lone_seed() {
        let asm = Assembly::new(Site::ORIGIN, TileId(1));
        let f: Vec<_> = frontier_sites(&asm, None).into_iter().collect();
        assert_eq!(
            f,
            vec![
                Site::new(-1, 0),
                Site::new(0, -1),
                Site::new(0, 1),
                Site::new(1, 0)
            ]
        );
    }

    #[test]
    fn frontier_of_full_box_is_empty() {
        let mut asm = Assembly::new(Site::ORIGIN, TileId(1));
        for r in 0..3 {
            for c in 0..3 {
                if (r, c) != (0, 0) {
                    asm.place(Site::new(r, c), TileId(1)).unwrap();
                }
            }
        }
        let b = BoundingBox::new(0, 2, 0, 2);
        assert!(frontier_sites(&asm, Some(&b)).is_empty());
        assert_eq!(frontier_sites(&asm, None).len(), 12);
    }

    #[test]
    fn zero_step_cap_is_rejected() {
        let cfg = SimConfig {
            max_steps: 0,
            ..SimConfig::default()
        };
        assert!(matches!(
            run(&chain(4), &cfg),
            Err(SimError::InvalidConfig(_))
        ));
    }

    #[test]
    fn step_cap_of_one() {
        let cfg = SimConfig {
            max_steps: 1,
            ..SimConfig::default()
        };
        let r = run(&chain(4), &cfg).unwrap();
        assert_eq!(r.steps, 1);
        assert_eq!(r.halted, HaltReason::StepCap);
        assert_eq!(r.assembly.len(), 2);
    }

    #[test]
    fn chain_quiesces() {
        let r = run(&chain(5), &SimConfig::default()).unwrap();
        assert_eq!(r.halted, HaltReason::Quiescent);
        assert_eq!(r.steps, 4);
        assert_eq!(r.assembly.get(Site::new(4, 0)), Some(TileId(5)));
    }

    #[test]
    fn box_clips_growth() {
        let cfg = SimConfig {
            bounding_box: Some(BoundingBox::new(0, 2, 0, 0)),
            ..SimConfig::default()
        };
        let r = run(&chain(6), &cfg).unwrap();
        assert_eq!(r.halted, HaltReason::BoxFull);
        assert_eq!(r.assembly.len(), 3);
    }

    #[test]
    fn box_must_contain_seed() {
        let cfg = SimConfig {
            bounding_box: Some(BoundingBox::new(1, 2, 0, 0)),
            ..SimConfig::default()
        };
        assert!(matches!(
            run(&chain(3), &cfg),
            Err(SimError::InvalidConfig(_))
        ));
    }

    #[test]
    fn ambiguous_system_fails_or_picks_lowest() {
        let mut s = chain(2);
        s.tiles
            .push(TileType::new("twin", [0, 0, 1, 0], Color::BLUE));
        match run(&s, &SimConfig::default()) {
            Err(SimError::Nondeterministic { site, candidates }) => {
                assert_eq!(site, Site::new(1, 0));
                assert_eq!(candidates, vec![TileId(2), TileId(3)]);
            }
            other => panic!("expected nondeterminism, got {other:?}"),
        }
        let report = check_directed(&s, &SimConfig::default()).unwrap();
        assert!(!report.directed);
        assert_eq!(report.offending.len(), 1);
    }

    #[test]
    fn invalid_system_is_rejected() {
        let mut s = chain(2);
        s.seed = TileId(9);
        assert!(matches!(
            run(&s, &SimConfig::default()),
            Err(SimError::InvalidSystem(_))
        ));
    }

    #[test]
    fn event_log_round_trips() {
        let r = run(&chain(4), &SimConfig::default()).unwrap();
        let mut buf = Vec::new();
        write_event_log(&r.events, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf.clone()).unwrap().lines().next(),
            Some("1 1 0 2")
        );
        assert_eq!(read_event_log(&buf[..]).unwrap(), r.events);
    }

    #[test]
    fn box_parses() {
        assert_eq!("0,3,-1,2".parse(), Ok(BoundingBox::new(0, 3, -1, 2)));
        assert!("0,3".parse::<BoundingBox>().is_err());
        assert!("3,0,0,0".parse::<BoundingBox>().is_err());
    }
}
