//! Tile systems for cyclic pixel patterns.
//!
//! An `N`-wide pattern row holds the labels `1..=N`. The seed and a base row
//! of `N - 1` tiles lay down row 0; a base column of `N - 1` tiles carries
//! each row's east-most label upwards; rule tiles fill the interior by reading
//! the label below (`X`, south glue) and the label to the east (`T`, east glue)
//! and writing `Op = X - s` on their north and west edges, where `s` is the
//! shift applied to that row. Glues `1..=N` are pattern glues of strength 1;
//! `N+1..=2N` are boundary glues of strength 2; the temperature is 2, so
//! boundary tiles grow by single bonds and rule tiles need both inputs.
//!
//! Row `r` of the finished `N x N` square is the base row cyclically shifted by
//! the cumulative shift `s_1 + ... + s_r (mod N)`.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::model::{Assembly, Color, GlueStrengthTable, Site, TileId, TileSystem, TileType};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

fn invalid(msg: impl Into<String>) -> GenError {
    GenError::InvalidArgument(msg.into())
}

/// Group labels used for generated tiles; these become the `%` comments of
/// the emitted tile file.
pub const SEED_GROUP: &str = "seed tile";
pub const BASE_ROW_GROUP: &str = "First row. (bottom boundary row)";
pub const BASE_COLUMN_GROUP: &str = "First column. (Right most column)";
pub const RULE_GROUP: &str = "Rule tiles";

/// Reduces `x` into `1..=n` (a modulus that maps multiples of `n` to `n`).
pub fn wrap1(x: i64, n: i64) -> Result<i64, GenError> {
    if n < 1 {
        return Err(invalid(format!("modulus must be positive, got {n}")));
    }
    Ok((x - 1).rem_euclid(n) + 1)
}

fn cyc(x: i64, n: u32) -> u32 {
    ((x - 1).rem_euclid(n as i64) + 1) as u32
}

/// Two-color palette keyed on label parity: odd labels blue, even labels red.
pub fn palette(label: u32) -> Color {
    if label % 2 == 1 {
        Color::BLUE
    } else {
        Color::RED
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ShiftKind {
    Uniform(i64),
    /// `shifts[r - 1]` is the shift applied to row `r`.
    PerRow(Vec<i64>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShiftSpec {
    pub n: u32,
    pub kind: ShiftKind,
}

impl ShiftSpec {
    pub fn uniform(n: u32, shift: i64) -> Result<ShiftSpec, GenError> {
        check_width(n)?;
        Ok(ShiftSpec {
            n,
            kind: ShiftKind::Uniform(shift),
        })
    }

    pub fn per_row(n: u32, shifts: &[i64]) -> Result<ShiftSpec, GenError> {
        check_width(n)?;
        if shifts.len() != n as usize - 1 {
            return Err(invalid(format!(
                "expected {} shift values (N - 1), got {}",
                n - 1,
                shifts.len()
            )));
        }
        Ok(ShiftSpec {
            n,
            kind: ShiftKind::PerRow(shifts.to_vec()),
        })
    }

    /// Shift of row `r` (`1 <= r < n`), reduced into `0..n`.
    pub fn row_shift(&self, r: u32) -> u32 {
        let raw = match &self.kind {
            ShiftKind::Uniform(s) => *s,
            ShiftKind::PerRow(v) => v[r as usize - 1],
        };
        raw.rem_euclid(self.n as i64) as u32
    }

    pub fn distinct_shifts(&self) -> Vec<u32> {
        let set: BTreeSet<u32> = (1..self.n).map(|r| self.row_shift(r)).collect();
        set.into_iter().collect()
    }
}

fn check_width(n: u32) -> Result<(), GenError> {
    if n < 2 {
        return Err(invalid(format!(
            "base row length N must be at least 2, got {n}"
        )));
    }
    if n > 1 << 16 {
        return Err(invalid(format!("base row length N = {n} is too large")));
    }
    Ok(())
}

/// Number of tile types the generator emits for `spec`: `3N - 1` for a
/// uniform shift, `1 + 2(N - 1) + N * d` for per-row shifts with `d` distinct
/// values mod `N`.
pub fn expected_tile_count(spec: &ShiftSpec) -> usize {
    let n = spec.n as usize;
    match spec.kind {
        ShiftKind::Uniform(_) => 3 * n - 1,
        ShiftKind::PerRow(_) => 1 + 2 * (n - 1) + n * spec.distinct_shifts().len(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TileRole {
    Seed,
    BaseRow,
    BaseColumn,
    Rule { input: u32, east: u32, output: u32 },
}

/// What each generated tile is for, and the pattern label it carries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorLayout {
    pub n: u32,
    roles: Vec<TileRole>,
    values: Vec<u32>,
}

impl GeneratorLayout {
    pub fn role(&self, id: TileId) -> Option<TileRole> {
        self.roles.get(id.index()).copied()
    }

    pub fn roles(&self) -> &[TileRole] {
        &self.roles
    }

    /// Pattern label in `1..=N` shown by the tile (the seed shows the label of
    /// column 0 of the base row).
    pub fn value(&self, id: TileId) -> Option<u32> {
        self.values.get(id.index()).copied()
    }

    /// Site label as used by the closed-form oracles: the seed reports its
    /// boundary glue `N + 1`, every other tile its pattern label.
    pub fn label(&self, id: TileId) -> Option<u32> {
        match self.role(id)? {
            TileRole::Seed => Some(self.n + 1),
            _ => self.value(id),
        }
    }

    pub fn count(&self, role: fn(&TileRole) -> bool) -> usize {
        self.roles.iter().filter(|r| role(r)).count()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Generated {
    pub system: TileSystem,
    pub layout: GeneratorLayout,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelMismatch {
    pub row: u32,
    pub col: u32,
    pub expected: u32,
    pub found: Option<u32>,
}

impl Generated {
    /// Label of the tile placed at pattern position `(r, c)`.
    pub fn label_at(&self, asm: &Assembly, r: u32, c: u32) -> Option<u32> {
        let id = asm.get(Site::new(r as i64, c as i64))?;
        self.layout.label(id)
    }

    /// Compares every site of the `N x N` square against `expected`.
    pub fn compare(
        &self,
        asm: &Assembly,
        expected: impl Fn(u32, u32) -> u32,
    ) -> Vec<LabelMismatch> {
        let n = self.layout.n;
        let mut out = Vec::new();
        for r in 0..n {
            for c in 0..n {
                let want = expected(r, c);
                let found = self.label_at(asm, r, c);
                if found != Some(want) {
                    out.push(LabelMismatch {
                        row: r,
                        col: c,
                        expected: want,
                        found,
                    });
                }
            }
        }
        out
    }
}

/// Tile system for a pattern whose every row is the row below shifted by
/// `shift`.
pub fn gen_uniform(n: u32, shift: i64) -> Result<Generated, GenError> {
    let spec = ShiftSpec::uniform(n, shift)?;
    Ok(build(&spec, 0))
}

/// Tile system for a pattern where row `r` is the row below shifted by
/// `shifts[r - 1]`. Rule tiles are emitted once per distinct shift value.
pub fn gen_nonuniform(n: u32, shifts: &[i64]) -> Result<Generated, GenError> {
    let spec = ShiftSpec::per_row(n, shifts)?;
    Ok(build(&spec, 0))
}

/// Like [`gen_nonuniform`], with the base row cyclically rotated so that the
/// label at base-row column `c` is `wrap1(c + 1 - rotate, N)`.
pub fn gen_transform(n: u32, shifts: &[i64], rotate: i64) -> Result<Generated, GenError> {
    let spec = ShiftSpec::per_row(n, shifts)?;
    let rotate = rotate.rem_euclid(n as i64) as u32;
    Ok(build(&spec, rotate))
}

fn build(spec: &ShiftSpec, rotate: u32) -> Generated {
    let n = spec.n;
    let mut tiles = Vec::new();
    let mut roles = Vec::new();
    let mut values = Vec::new();
    let mut push = |tile: TileType, role: TileRole, value: u32| {
        tiles.push(tile);
        roles.push(role);
        values.push(value);
    };

    let first = cyc(1 - rotate as i64, n);
    push(
        TileType::new(SEED_GROUP, [n + 1, 0, 0, n + 1], palette(first)),
        TileRole::Seed,
        first,
    );

    // Base row: column c carries position glues c+N (east) and c+N+1 (west).
    for c in 1..n {
        let value = cyc(c as i64 + 1 - rotate as i64, n);
        let y = c + n;
        push(
            TileType::new(BASE_ROW_GROUP, [value, y, 0, y + 1], palette(value)),
            TileRole::BaseRow,
            value,
        );
    }

    // Base column: row r shows the label of column 0 of that row on its west edge.
    let mut t = first;
    for r in 1..n {
        t = cyc(t as i64 - spec.row_shift(r) as i64, n);
        let y = r + n;
        push(
            TileType::new(BASE_COLUMN_GROUP, [y + 1, 0, y, t], palette(t)),
            TileRole::BaseColumn,
            t,
        );
    }

    for s in spec.distinct_shifts() {
        for op in 1..=n {
            let input = cyc(op as i64 + s as i64, n);
            let east = cyc(input as i64 - 1 - s as i64, n);
            debug_assert_eq!(cyc(input as i64 - s as i64, n), op);
            push(
                TileType::new(RULE_GROUP, [op, east, input, op], palette(op)),
                TileRole::Rule {
                    input,
                    east,
                    output: op,
                },
                op,
            );
        }
    }

    let strengths = (1..=2 * n).map(|g| if g <= n { 1 } else { 2 }).collect();
    Generated {
        system: TileSystem {
            tiles,
            strengths: GlueStrengthTable::new(strengths),
            seed: TileId(1),
            temperature: 2,
            gse: None,
            gmc: None,
        },
        layout: GeneratorLayout { n, roles, values },
    }
}

fn check_site(n: u32, r: u32, c: u32) -> Result<(), GenError> {
    check_width(n)?;
    if r >= n || c >= n {
        return Err(invalid(format!(
            "site ({r}, {c}) outside the {n}x{n} pattern"
        )));
    }
    Ok(())
}

/// Expected label at `(r, c)` of the uniform-shift pattern:
/// `N + 1` at the seed, otherwise `wrap1(c + 1 - r * shift, N)`.
pub fn uniform_oracle(n: u32, shift: i64, r: u32, c: u32) -> Result<u32, GenError> {
    check_site(n, r, c)?;
    if (r, c) == (0, 0) {
        return Ok(n + 1);
    }
    let offset = (r as i64 * shift.rem_euclid(n as i64)).rem_euclid(n as i64);
    Ok(cyc(c as i64 + 1 - offset, n))
}

/// `offsets[r] = shifts[0] + ... + shifts[r - 1] (mod N)`, with `offsets[0] = 0`.
pub fn cumulative_offsets(n: u32, shifts: &[i64]) -> Result<Vec<u32>, GenError> {
    check_width(n)?;
    if shifts.len() != n as usize - 1 {
        return Err(invalid(format!(
            "expected {} shift values (N - 1), got {}",
            n - 1,
            shifts.len()
        )));
    }
    let ni = n as i64;
    let mut acc = 0i64;
    let mut out = vec![0u32];
    for s in shifts {
        acc = (acc + s.rem_euclid(ni)).rem_euclid(ni);
        out.push(acc as u32);
    }
    Ok(out)
}

/// Expected label at `(r, c)` of the per-row shift pattern: the base row
/// shifted by the cumulative shift of rows `1..=r`.
pub fn nonuniform_oracle(n: u32, shifts: &[i64], r: u32, c: u32) -> Result<u32, GenError> {
    check_site(n, r, c)?;
    let offsets = cumulative_offsets(n, shifts)?;
    if (r, c) == (0, 0) {
        return Ok(n + 1);
    }
    Ok(cyc(c as i64 + 1 - offsets[r as usize] as i64, n))
}
