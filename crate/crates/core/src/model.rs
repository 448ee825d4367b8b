//! Tiles, glues, tile systems and assemblies.
//!
//! Lattice convention: the seed sits at `(0, 0)`, `row` grows northwards and
//! `col` grows westwards. Generator systems grow their base row west of the
//! seed and their base column north of it, so both coordinates stay
//! non-negative for them. Rendering puts east on the right, which places a
//! generator seed in the bottom-right corner of the picture.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("site {0} is already occupied")]
    Occupied(Site),
    #[error("site {0} has no occupied neighbour")]
    Detached(Site),
    #[error("tile {0} does not exist")]
    UnknownTile(TileId),
}

/// Glue label on one tile edge. Label 0 is the null glue and never binds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Glue(pub u32);

impl Glue {
    pub const NULL: Glue = Glue(0);

    pub fn is_null(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Glue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    North,
    East,
    South,
    West,
}

impl Side {
    /// Edge order used everywhere: tile records list glues as `{N E S W}`.
    pub const ALL: [Side; 4] = [Side::North, Side::East, Side::South, Side::West];

    pub fn index(self) -> usize {
        match self {
            Side::North => 0,
            Side::East => 1,
            Side::South => 2,
            Side::West => 3,
        }
    }

    pub fn opposite(self) -> Side {
        match self {
            Side::North => Side::South,
            Side::East => Side::West,
            Side::South => Side::North,
            Side::West => Side::East,
        }
    }

    /// `(d_row, d_col)` of the neighbour on this side.
    pub fn offset(self) -> (i64, i64) {
        match self {
            Side::North => (1, 0),
            Side::South => (-1, 0),
            Side::West => (0, 1),
            Side::East => (0, -1),
        }
    }
}

/// One-based tile type index, stable through tile-file emission and parsing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TileId(pub u32);

impl TileId {
    pub fn index(self) -> usize {
        (self.0 as usize).wrapping_sub(1)
    }

    pub fn from_index(index: usize) -> TileId {
        TileId(index as u32 + 1)
    }
}

impl fmt::Display for TileId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// 32-bit ARGB color stored as a signed integer, the way tile files print it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Color(pub i32);

impl Color {
    pub const BLUE: Color = Color::from_argb(0xFE00_00FF);
    pub const RED: Color = Color::from_argb(0xFEFF_0000);

    pub const fn from_argb(argb: u32) -> Color {
        Color(argb as i32)
    }

    /// Opaque-ish color with the conventional `0xFE` alpha byte.
    pub const fn from_rgb(r: u8, g: u8, b: u8) -> Color {
        Color::from_argb(0xFE00_0000 | (r as u32) << 16 | (g as u32) << 8 | b as u32)
    }

    pub const fn argb(self) -> u32 {
        self.0 as u32
    }

    pub const fn rgb(self) -> [u8; 3] {
        let v = self.argb();
        [(v >> 16) as u8, (v >> 8) as u8, v as u8]
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#010X}", self.argb())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TileType {
    /// Display label. Consecutive tiles sharing a label form one `%` group
    /// in the tile file.
    pub label: String,
    /// Glues in `{N E S W}` order.
    pub glues: [Glue; 4],
    pub color: Color,
}

impl TileType {
    pub fn new(label: impl Into<String>, glues: [u32; 4], color: Color) -> TileType {
        TileType {
            label: label.into(),
            glues: glues.map(Glue),
            color,
        }
    }

    pub fn glue(&self, side: Side) -> Glue {
        self.glues[side.index()]
    }
}

/// Strength of each glue label. Glue `g >= 1` is stored at position `g - 1`;
/// the null glue always has strength 0 and has no slot.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct GlueStrengthTable {
    strengths: Vec<u32>,
}

impl GlueStrengthTable {
    /// `strengths[i]` is the strength of glue `i + 1`.
    pub fn new(strengths: Vec<u32>) -> Self {
        GlueStrengthTable { strengths }
    }

    pub fn get(&self, glue: Glue) -> Option<u32> {
        if glue.is_null() {
            return Some(0);
        }
        self.strengths.get(glue.0 as usize - 1).copied()
    }

    /// Strength used for binding; unknown glues bind with strength 0.
    pub fn strength(&self, glue: Glue) -> u32 {
        self.get(glue).unwrap_or(0)
    }

    /// Number of non-null glue labels with an entry.
    pub fn len(&self) -> usize {
        self.strengths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strengths.is_empty()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.strengths
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TileSystem {
    pub tiles: Vec<TileType>,
    pub strengths: GlueStrengthTable,
    pub seed: TileId,
    pub temperature: u32,
    /// kTAM free-energy parameters; carried through files, never simulated.
    pub gse: Option<f64>,
    pub gmc: Option<f64>,
}

impl TileSystem {
    pub fn tile(&self, id: TileId) -> Option<&TileType> {
        self.tiles.get(id.index())
    }

    pub fn ids(&self) -> impl Iterator<Item = TileId> + '_ {
        (0..self.tiles.len()).map(TileId::from_index)
    }

    /// Number of distinct non-null glues appearing on any tile edge.
    pub fn glue_count(&self) -> usize {
        let mut seen: Vec<Glue> = self
            .tiles
            .iter()
            .flat_map(|t| t.glues)
            .filter(|g| !g.is_null())
            .collect();
        seen.sort_unstable();
        seen.dedup();
        seen.len()
    }

    pub fn max_glue(&self) -> Glue {
        self.tiles
            .iter()
            .flat_map(|t| t.glues)
            .max()
            .unwrap_or(Glue::NULL)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NoTiles,
    DanglingSeed(TileId),
    MissingStrength { glue: Glue, tile: TileId },
    TemperatureBelowOne,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoTiles => write!(f, "tile system has no tiles"),
            Violation::DanglingSeed(id) => write!(f, "dangling seed: tile {id} does not exist"),
            Violation::MissingStrength { glue, tile } => {
                write!(
                    f,
                    "missing strength for glue {glue} (first used by tile {tile})"
                )
            }
            Violation::TemperatureBelowOne => write!(f, "temperature must be at least 1"),
        }
    }
}

/// Structural problems with a tile system. An empty list means the system is
/// ready to simulate. Tile ids are positional, so duplicates cannot occur.
pub fn validate_system(system: &TileSystem) -> Vec<Violation> {
    let mut out = Vec::new();
    if system.tiles.is_empty() {
        out.push(Violation::NoTiles);
    }
    if system.tile(system.seed).is_none() && !system.tiles.is_empty() {
        out.push(Violation::DanglingSeed(system.seed));
    }
    if system.temperature < 1 {
        out.push(Violation::TemperatureBelowOne);
    }
    let mut missing: BTreeMap<Glue, TileId> = BTreeMap::new();
    for (id, tile) in system.ids().zip(&system.tiles) {
        for glue in tile.glues {
            if system.strengths.get(glue).is_none() {
                missing.entry(glue).or_insert(id);
            }
        }
    }
    out.extend(
        missing
            .into_iter()
            .map(|(glue, tile)| Violation::MissingStrength { glue, tile }),
    );
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Site {
    pub row: i64,
    pub col: i64,
}

impl Site {
    pub const ORIGIN: Site = Site { row: 0, col: 0 };

    pub const fn new(row: i64, col: i64) -> Site {
        Site { row, col }
    }

    pub fn neighbor(self, side: Side) -> Site {
        let (dr, dc) = side.offset();
        Site::new(self.row + dr, self.col + dc)
    }

    pub fn neighbors(self) -> impl Iterator<Item = (Side, Site)> {
        Side::ALL.into_iter().map(move |s| (s, self.neighbor(s)))
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.row, self.col)
    }
}

/// A connected set of placed tiles grown from a seed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assembly {
    placed: HashMap<Site, TileId>,
    seed_site: Site,
}

impl Assembly {
    pub fn new(seed_site: Site, seed: TileId) -> Assembly {
        let mut placed = HashMap::new();
        placed.insert(seed_site, seed);
        Assembly { placed, seed_site }
    }

    /// Places `tile` at an empty site adjacent to the assembly. No glue check
    /// is done here; see [`attach_strength`].
    pub fn place(&mut self, site: Site, tile: TileId) -> Result<(), ModelError> {
        if self.placed.contains_key(&site) {
            return Err(ModelError::Occupied(site));
        }
        if !site.neighbors().any(|(_, n)| self.placed.contains_key(&n)) {
            return Err(ModelError::Detached(site));
        }
        self.placed.insert(site, tile);
        Ok(())
    }

    pub fn get(&self, site: Site) -> Option<TileId> {
        self.placed.get(&site).copied()
    }

    pub fn is_occupied(&self, site: Site) -> bool {
        self.placed.contains_key(&site)
    }

    pub fn seed_site(&self) -> Site {
        self.seed_site
    }

    pub fn len(&self) -> usize {
        self.placed.len()
    }

    pub fn is_empty(&self) -> bool {
        self.placed.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Site, TileId)> + '_ {
        self.placed.iter().map(|(s, t)| (*s, *t))
    }

    /// Placed sites sorted by `(row, col)`.
    pub fn sorted(&self) -> Vec<(Site, TileId)> {
        let mut v: Vec<_> = self.iter().collect();
        v.sort_unstable();
        v
    }

    /// `(min_row, max_row, min_col, max_col)` of the placed sites.
    pub fn bounds(&self) -> (i64, i64, i64, i64) {
        let mut b = (i64::MAX, i64::MIN, i64::MAX, i64::MIN);
        for site in self.placed.keys() {
            b.0 = b.0.min(site.row);
            b.1 = b.1.max(site.row);
            b.2 = b.2.min(site.col);
            b.3 = b.3.max(site.col);
        }
        b
    }
}

/// Total strength with which `tile` would bind at the empty `site`: the sum
/// of glue strengths over the sides whose neighbour is occupied and shows the
/// same non-null glue on the facing edge.
pub fn attach_strength(
    system: &TileSystem,
    asm: &Assembly,
    site: Site,
    tile: &TileType,
) -> Result<u32, ModelError> {
    if asm.is_occupied(site) {
        return Err(ModelError::Occupied(site));
    }
    let mut total = 0;
    for (side, neighbor) in site.neighbors() {
        let glue = tile.glue(side);
        if glue.is_null() {
            continue;
        }
        let Some(other) = asm.get(neighbor).and_then(|id| system.tile(id)) else {
            continue;
        };
        if other.glue(side.opposite()) == glue {
            total += system.strengths.strength(glue);
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn system(tiles: Vec<TileType>, strengths: Vec<u32>) -> TileSystem {
        TileSystem {
            tiles,
            strengths: GlueStrengthTable::new(strengths),
            seed: TileId(1),
            temperature: 2,
            gse: None,
            gmc: None,
        }
    }

    #[test]
    fn listing_colors_decode_as_argb() {
        assert_eq!(Color::BLUE.0, -33554177);
        assert_eq!(Color::RED.0, -16842752);
        assert_eq!(Color::BLUE.rgb(), [0, 0, 255]);
        assert_eq!(Color::RED.rgb(), [255, 0, 0]);
    }

    #[test]
    fn null_glue_has_zero_strength() {
        let table = GlueStrengthTable::new(vec![5, 5]);
        assert_eq!(table.get(Glue::NULL), Some(0));
        assert_eq!(table.get(Glue(2)), Some(5));
        assert_eq!(table.get(Glue(3)), None);
    }

    #[test]
    fn null_glues_never_match() {
        // Every edge 0, strengths table claims nothing for glue 0.
        let sys = system(vec![TileType::new("a", [0, 0, 0, 0], Color::RED)], vec![]);
        let asm = Assembly::new(Site::ORIGIN, TileId(1));
        let s = attach_strength(&sys, &asm, Site::new(1, 0), &sys.tiles[0]).unwrap();
        assert_eq!(s, 0);
    }

    #[test]
    fn cooperative_rule_tile_binds_with_two() {
        // South neighbour shows N-glue 2, east neighbour shows W-glue 4.
        let south = TileType::new("south", [2, 0, 0, 0], Color::RED);
        let east = TileType::new("east", [0, 0, 0, 4], Color::RED);
        let rule = TileType::new("rule", [1, 4, 2, 1], Color::BLUE);
        let sys = system(vec![south, east, rule], vec![1, 1, 1, 1]);
        let mut asm = Assembly::new(Site::new(0, 1), TileId(1));
        asm.place(Site::new(0, 0), TileId(3)).unwrap();
        asm.place(Site::new(1, 0), TileId(2)).unwrap();
        // (1,1): south is (0,1), east is (1,0).
        let s = attach_strength(&sys, &asm, Site::new(1, 1), &sys.tiles[2]).unwrap();
        assert_eq!(s, 2);
    }

    #[test]
    fn empty_neighbourhood_binds_with_zero() {
        let sys = system(vec![TileType::new("a", [1, 1, 1, 1], Color::RED)], vec![1]);
        let asm = Assembly::new(Site::ORIGIN, TileId(1));
        let s = attach_strength(&sys, &asm, Site::new(5, 5), &sys.tiles[0]).unwrap();
        assert_eq!(s, 0);
    }

    #[test]
    fn mismatched_glue_binds_with_zero() {
        let seed = TileType::new("seed", [3, 0, 0, 0], Color::RED);
        let probe = TileType::new("probe", [0, 0, 2, 0], Color::RED);
        let sys = system(vec![seed, probe], vec![1, 1, 1]);
        let asm = Assembly::new(Site::ORIGIN, TileId(1));
        let s = attach_strength(&sys, &asm, Site::new(1, 0), &sys.tiles[1]).unwrap();
        assert_eq!(s, 0);
    }

    #[test]
    fn occupied_site_is_rejected() {
        let sys = system(vec![TileType::new("a", [0; 4], Color::RED)], vec![]);
        let asm = Assembly::new(Site::ORIGIN, TileId(1));
        assert_eq!(
            attach_strength(&sys, &asm, Site::ORIGIN, &sys.tiles[0]),
            Err(ModelError::Occupied(Site::ORIGIN))
        );
    }

    #[test]
    fn validation_reports() {
        let mut sys = system(vec![TileType::new("a", [1, 0, 0, 1], Color::RED)], vec![2]);
        assert!(validate_system(&sys).is_empty());

        sys.seed = TileId(7);
        assert_eq!(
            validate_system(&sys),
            vec![Violation::DanglingSeed(TileId(7))]
        );

        sys.seed = TileId(1);
        sys.tiles.push(TileType::new("b", [9, 0, 9, 0], Color::RED));
        assert_eq!(
            validate_system(&sys),
            vec![Violation::MissingStrength {
                glue: Glue(9),
                tile: TileId(2)
            }]
        );

        sys.tiles.pop();
        sys.temperature = 0;
        assert_eq!(validate_system(&sys), vec![Violation::TemperatureBelowOne]);
    }

    #[test]
    fn place_requires_adjacency() {
        let mut asm = Assembly::new(Site::ORIGIN, TileId(1));
        assert_eq!(
            asm.place(Site::new(2, 0), TileId(1)),
            Err(ModelError::Detached(Site::new(2, 0)))
        );
        asm.place(Site::new(1, 0), TileId(1)).unwrap();
        assert_eq!(
            asm.place(Site::new(1, 0), TileId(1)),
            Err(ModelError::Occupied(Site::new(1, 0)))
        );
        assert_eq!(asm.len(), 2);
    }
}
