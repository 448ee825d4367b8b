//! Textual tile-file format.
//!
//! Canonical layout:
//!
//! ```text
//! num tile types=11
//! num binding types=8
//! binding strengths={1 1 1 1 2 2 2 2}
//! seed=1
//! temperature=2
//!
//! %seed tile
//! {5 0 0 5}(-33554177)
//!
//! %First row. (bottom boundary row)
//! {2 5 0 6}(-16842752)
//! ...
//! ```
//!
//! Optional `Gse=<v>` and `Gmc=<v>` lines follow `temperature`. Each tile line
//! is `{N E S W}(color)` with the color as a signed 32-bit ARGB decimal. A `%`
//! comment on a line of its own names the group of the tiles that follow it
//! and becomes their label; a `%` comment after a tile record is kept in the
//! document but does not affect the tile system.
//!
//! The parser is tolerant of whitespace (including line breaks inside
//! records), blank lines and comments anywhere, and a missing header: absent
//! keys are inferred from the body, each with a warning. Binding strengths
//! default to 1 for glues up to half the binding count and 2 above it, the
//! seed defaults to tile 1 and the temperature to 2.

use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::model::{
    validate_system, Color, GlueStrengthTable, TileId, TileSystem, TileType, Violation,
};

/// Largest binding-type count accepted from a file.
pub const MAX_BINDING_TYPES: usize = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TileFileError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("invalid tile system: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Header {
    pub num_tile_types: usize,
    pub num_binding_types: usize,
    pub binding_strengths: Vec<u32>,
    /// One-based tile index.
    pub seed: u32,
    pub temperature: u32,
    pub gse: Option<f64>,
    pub gmc: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TileRecord {
    pub glues: [u32; 4],
    pub color: i32,
    /// Text of the last stand-alone comment before this record.
    pub group: String,
    /// Trailing comment on the record's line.
    pub comment: Option<String>,
    pub line: usize,
    pub col: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Comment {
    pub line: usize,
    pub col: usize,
    pub text: String,
    /// The comment was the first thing on its line.
    pub standalone: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Warning {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TileFileDoc {
    pub header: Header,
    pub records: Vec<TileRecord>,
    pub comments: Vec<Comment>,
    pub warnings: Vec<Warning>,
}

/// Canonical text for a valid system.
pub fn emit(system: &TileSystem) -> Result<String, TileFileError> {
    let violations = validate_system(system);
    if !violations.is_empty() {
        return Err(TileFileError::Invalid(violations));
    }
    let mut out = String::new();
    let strengths = system.strengths.as_slice();
    let _ = writeln!(out, "num tile types={}", system.tiles.len());
    let _ = writeln!(out, "num binding types={}", strengths.len());
    let joined: Vec<String> = strengths.iter().map(u32::to_string).collect();
    let _ = writeln!(out, "binding strengths={{{}}}", joined.join(" "));
    let _ = writeln!(out, "seed={}", system.seed);
    let _ = writeln!(out, "temperature={}", system.temperature);
    if let Some(v) = system.gse {
        let _ = writeln!(out, "Gse={v}");
    }
    if let Some(v) = system.gmc {
        let _ = writeln!(out, "Gmc={v}");
    }
    let mut group: Option<&str> = None;
    for tile in &system.tiles {
        if group != Some(tile.label.as_str()) {
            out.push('\n');
            let label = tile.label.replace(['\n', '\r'], " ");
            let _ = writeln!(out, "%{label}");
            group = Some(&tile.label);
        }
        let [n, e, s, w] = tile.glues;
        let _ = writeln!(out, "{{{n} {e} {s} {w}}}({})", tile.color.0);
    }
    Ok(out)
}

/// `emit(parse(text))`.
pub fn canonicalize(text: &str) -> Result<String, TileFileError> {
    let (system, _) = parse(text)?;
    emit(&system)
}

struct Scanner<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
    col: usize,
    line_has_content: bool,
}

impl<'a> Scanner<'a> {
    fn new(src: &'a str) -> Self {
        Scanner {
            src,
            pos: 0,
            line: 1,
            col: 1,
            line_has_content: false,
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
            self.line_has_content = false;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.bump();
        }
    }

    fn skip_inline_ws(&mut self) {
        while self.peek().is_some_and(|c| c.is_whitespace() && c != '\n') {
            self.bump();
        }
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError {
            line: self.line,
            col: self.col,
            message: message.into(),
        }
    }

    /// Rest of the current line, stopping before `\n` or `%`.
    fn take_line(&mut self) -> &'a str {
        let start = self.pos;
        while self.peek().is_some_and(|c| c != '\n' && c != '%') {
            self.bump();
        }
        &self.src[start..self.pos]
    }

    fn unsigned(&mut self, what: &str) -> Result<u32, ParseError> {
        let at = self.error("");
        let mut value: u64 = 0;
        let mut digits = 0;
        while let Some(d) = self.peek().and_then(|c| c.to_digit(10)) {
            value = value * 10 + d as u64;
            if value > u32::MAX as u64 {
                return Err(ParseError {
                    message: format!("{what} out of range"),
                    ..at
                });
            }
            digits += 1;
            self.bump();
        }
        if digits == 0 {
            return Err(ParseError {
                message: format!("expected {what} integer"),
                ..at
            });
        }
        if self
            .peek()
            .is_some_and(|c| c.is_alphanumeric() || c == '.' || c == '_')
        {
            return Err(self.error(format!("expected {what} integer")));
        }
        Ok(value as u32)
    }

    /// `{ a b c ... }` list of unsigned integers.
    fn braced_list(&mut self, what: &str) -> Result<Vec<u32>, ParseError> {
        if self.bump() != Some('{') {
            return Err(self.error("expected '{'"));
        }
        let mut out = Vec::new();
        loop {
            self.skip_ws();
            match self.peek() {
                Some('}') => {
                    self.bump();
                    return Ok(out);
                }
                None => return Err(self.error("unterminated '{'")),
                Some(_) => out.push(self.unsigned(what)?),
            }
        }
    }

    fn color(&mut self) -> Result<i32, ParseError> {
        self.skip_ws();
        if self.peek() != Some('(') {
            return Err(self.error("expected '(' and a color after tile glues"));
        }
        self.bump();
        self.skip_ws();
        let at = self.error("");
        let negative = match self.peek() {
            Some('-') => {
                self.bump();
                true
            }
            Some('+') => {
                self.bump();
                false
            }
            _ => false,
        };
        let magnitude = self.unsigned("color").map_err(|e| ParseError {
            message: e.message,
            ..at.clone()
        })? as i64;
        let value = if negative { -magnitude } else { magnitude };
        if value < i32::MIN as i64 {
            return Err(ParseError {
                message: "color out of range".into(),
                ..at
            });
        }
        self.skip_ws();
        if self.bump() != Some(')') {
            return Err(self.error("expected ')' after color"));
        }
        // Values above i32::MAX are unsigned ARGB spellings of the same color.
        Ok(value as u32 as i32)
    }
}

#[derive(Default)]
struct RawHeader {
    num_tile_types: Option<(usize, usize)>,
    num_binding_types: Option<(usize, usize)>,
    binding_strengths: Option<(Vec<u32>, usize)>,
    seed: Option<(u32, usize)>,
    temperature: Option<(u32, usize)>,
    gse: Option<f64>,
    gmc: Option<f64>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Key {
    NumTileTypes,
    NumBindingTypes,
    BindingStrengths,
    Seed,
    Temperature,
    Gse,
    Gmc,
}

impl Key {
    fn lookup(raw: &str) -> Option<Key> {
        let norm = raw
            .split_whitespace()
            .collect::<Vec<_>>()
            .join(" ")
            .to_ascii_lowercase();
        Some(match norm.as_str() {
            "num tile types" => Key::NumTileTypes,
            "num binding types" => Key::NumBindingTypes,
            "binding strengths" => Key::BindingStrengths,
            "seed" => Key::Seed,
            "temperature" => Key::Temperature,
            "gse" => Key::Gse,
            "gmc" => Key::Gmc,
            _ => return None,
        })
    }
}

fn header_line(sc: &mut Scanner, raw: &mut RawHeader) -> Result<(), ParseError> {
    let line = sc.line;
    let key_at = sc.error("");
    let start = sc.pos;
    while sc.peek().is_some_and(|c| c != '=' && c != '\n' && c != '%') {
        sc.bump();
    }
    let key_text = &sc.src[start..sc.pos];
    if sc.peek() != Some('=') {
        return Err(ParseError {
            message: format!("expected 'key=value', found {:?}", key_text.trim()),
            ..key_at
        });
    }
    let key = Key::lookup(key_text).ok_or_else(|| ParseError {
        message: format!("unknown header key {:?}", key_text.trim()),
        ..key_at.clone()
    })?;
    sc.bump();
    sc.skip_inline_ws();
    let value_at = sc.error("");
    let duplicate = || ParseError {
        message: format!("duplicate header key {:?}", key_text.trim()),
        ..key_at.clone()
    };

    let scalar = |sc: &mut Scanner| -> Result<u32, ParseError> {
        let v = sc.unsigned("header value")?;
        sc.skip_inline_ws();
        Ok(v)
    };
    let real = |sc: &mut Scanner| -> Result<f64, ParseError> {
        let text = sc.take_line().trim();
        text.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| ParseError {
                message: format!("expected a number, found {text:?}"),
                ..value_at.clone()
            })
    };

    match key {
        Key::NumTileTypes => {
            let v = scalar(sc)?;
            if raw.num_tile_types.replace((v as usize, line)).is_some() {
                return Err(duplicate());
            }
        }
        Key::NumBindingTypes => {
            let v = scalar(sc)?;
            if raw.num_binding_types.replace((v as usize, line)).is_some() {
                return Err(duplicate());
            }
        }
        Key::BindingStrengths => {
            let v = sc.braced_list("strength")?;
            sc.skip_inline_ws();
            if raw.binding_strengths.replace((v, line)).is_some() {
                return Err(duplicate());
            }
        }
        Key::Seed => {
            let v = scalar(sc)?;
            if raw.seed.replace((v, line)).is_some() {
                return Err(duplicate());
            }
        }
        Key::Temperature => {
            let v = scalar(sc)?;
            if raw.temperature.replace((v, line)).is_some() {
                return Err(duplicate());
            }
        }
        Key::Gse => {
            let v = real(sc)?;
            if raw.gse.replace(v).is_some() {
                return Err(duplicate());
            }
        }
        Key::Gmc => {
            let v = real(sc)?;
            if raw.gmc.replace(v).is_some() {
                return Err(duplicate());
            }
        }
    }
    match sc.peek() {
        None | Some('\n') | Some('%') => Ok(()),
        Some(c) => Err(sc.error(format!("unexpected {c:?} after header value"))),
    }
}

fn record(sc: &mut Scanner, group: &str) -> Result<TileRecord, ParseError> {
    let (line, col) = (sc.line, sc.col);
    let glues = sc.braced_list("glue")?;
    if glues.len() != 4 {
        return Err(ParseError {
            line,
            col,
            message: format!("expected 4 glues, found {}", glues.len()),
        });
    }
    let color = sc.color()?;
    Ok(TileRecord {
        glues: [glues[0], glues[1], glues[2], glues[3]],
        color,
        group: group.to_string(),
        comment: None,
        line,
        col,
    })
}

/// Parses tile-file text into a tile system plus the document it came from.
pub fn parse(text: &str) -> Result<(TileSystem, TileFileDoc), ParseError> {
    let mut sc = Scanner::new(text);
    let mut raw = RawHeader::default();
    let mut records: Vec<TileRecord> = Vec::new();
    let mut comments = Vec::new();
    let mut group = String::new();
    let mut last_record_line = 0;

    loop {
        sc.skip_ws();
        let Some(c) = sc.peek() else { break };
        match c {
            '%' => {
                let (line, col, standalone) = (sc.line, sc.col, !sc.line_has_content);
                sc.bump();
                let start = sc.pos;
                while sc.peek().is_some_and(|c| c != '\n') {
                    sc.bump();
                }
                let body = sc.src[start..sc.pos].trim().to_string();
                if standalone {
                    group = body.clone();
                } else if last_record_line == line {
                    if let Some(r) = records.last_mut() {
                        r.comment = Some(body.clone());
                    }
                }
                comments.push(Comment {
                    line,
                    col,
                    text: body,
                    standalone,
                });
            }
            '{' => {
                sc.line_has_content = true;
                let rec = record(&mut sc, &group)?;
                sc.line_has_content = true;
                last_record_line = sc.line;
                records.push(rec);
            }
            c if c.is_alphabetic() => {
                sc.line_has_content = true;
                header_line(&mut sc, &mut raw)?;
            }
            c => return Err(sc.error(format!("unexpected character {c:?}"))),
        }
    }

    let mut warnings = Vec::new();

    if let Some((n, line)) = raw.num_tile_types {
        if n != records.len() {
            return Err(ParseError {
                line,
                col: 1,
                message: format!("header declares {n} tile types, body has {}", records.len()),
            });
        }
    } else {
        warnings.push(Warning {
            line: None,
            message: format!("num tile types missing; inferred {}", records.len()),
        });
    }

    let max_glue = records.iter().flat_map(|r| r.glues).max().unwrap_or(0) as usize;
    let binding_types = match (raw.num_binding_types, &raw.binding_strengths) {
        (Some((g, _)), _) => g,
        (None, Some((s, _))) => {
            warnings.push(Warning {
                line: None,
                message: format!(
                    "num binding types missing; inferred {} from strengths",
                    s.len()
                ),
            });
            s.len()
        }
        (None, None) => {
            warnings.push(Warning {
                line: None,
                message: format!("num binding types missing; inferred {max_glue}"),
            });
            max_glue
        }
    };
    if binding_types > MAX_BINDING_TYPES {
        let line = raw.num_binding_types.map_or(1, |(_, l)| l);
        return Err(ParseError {
            line,
            col: 1,
            message: format!("too many binding types ({binding_types})"),
        });
    }
    for r in &records {
        if let Some(g) = r.glues.iter().find(|g| **g as usize > binding_types) {
            return Err(ParseError {
                line: r.line,
                col: r.col,
                message: format!("glue {g} exceeds the {binding_types} declared binding types"),
            });
        }
    }

    let strengths = match raw.binding_strengths {
        Some((s, line)) => {
            if s.len() != binding_types {
                return Err(ParseError {
                    line,
                    col: 1,
                    message: format!(
                        "{} binding strengths given for {binding_types} binding types",
                        s.len()
                    ),
                });
            }
            s
        }
        None => {
            warnings.push(Warning {
                line: None,
                message: "binding strengths missing; using 1 for the lower half of the glues and 2 for the upper half".into(),
            });
            (1..=binding_types)
                .map(|g| if g <= binding_types / 2 { 1 } else { 2 })
                .collect()
        }
    };

    let seed = raw.seed.map(|(s, _)| s).unwrap_or_else(|| {
        warnings.push(Warning {
            line: None,
            message: "seed missing; using tile 1".into(),
        });
        1
    });
    let temperature = raw.temperature.map(|(t, _)| t).unwrap_or_else(|| {
        warnings.push(Warning {
            line: None,
            message: "temperature missing; using 2".into(),
        });
        2
    });

    let system = TileSystem {
        tiles: records
            .iter()
            .map(|r| TileType::new(r.group.clone(), r.glues, Color(r.color)))
            .collect(),
        strengths: GlueStrengthTable::new(strengths.clone()),
        seed: TileId(seed),
        temperature,
        gse: raw.gse,
        gmc: raw.gmc,
    };
    let doc = TileFileDoc {
        header: Header {
            num_tile_types: records.len(),
            num_binding_types: binding_types,
            binding_strengths: strengths,
            seed,
            temperature,
            gse: raw.gse,
            gmc: raw.gmc,
        },
        records,
        comments,
        warnings,
    };
    Ok((system, doc))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = "\
num tile types=2
num binding types=2
binding strengths={2 1}
seed=1
temperature=2

%seed tile
{1 0 0 0}(-33554177)

%next
{0 0 1 2}(-16842752)
";

    #[test]
    fn canonical_text_round_trips() {
        let (sys, doc) = parse(SMALL).unwrap();
        assert!(doc.warnings.is_empty());
        assert_eq!(sys.tiles.len(), 2);
        assert_eq!(sys.tiles[0].label, "seed tile");
        assert_eq!(sys.tiles[1].label, "next");
        assert_eq!(emit(&sys).unwrap(), SMALL);
        assert_eq!(canonicalize(SMALL).unwrap(), SMALL);
    }

    #[test]
    fn three_glue_record_is_rejected() {
        let err = parse("%x\n\n  {1 2 3}(5)\n").unwrap_err();
        assert_eq!(err.line, 3);
        assert_eq!(err.col, 3);
        assert!(err.message.contains("expected 4 glues"), "{err}");
        let err = parse("{1 2 3 4 5}(5)").unwrap_err();
        assert!(err.message.contains("found 5"), "{err}");
    }

    #[test]
    fn non_integer_glue() {
        let err = parse("{1 2 x 4}(5)").unwrap_err();
        assert_eq!((err.line, err.col), (1, 6));
        let err = parse("{1 2 -3 4}(5)").unwrap_err();
        assert_eq!((err.line, err.col), (1, 6));
        let err = parse("{1 2 3.5 4}(5)").unwrap_err();
        assert_eq!(err.line, 1);
    }

    #[test]
    fn glue_above_binding_count() {
        let err = parse("num binding types=3\n{1 2 3 4}(5)\n").unwrap_err();
        assert_eq!(err.line, 2);
        assert!(err.message.contains("glue 4 exceeds"), "{err}");
    }

    #[test]
    fn duplicate_header_key() {
        let err = parse("seed=1\nseed=2\n").unwrap_err();
        assert_eq!(err.line, 2);
        assert!(err.message.contains("duplicate"), "{err}");
    }

    #[test]
    fn header_mismatches() {
        assert!(parse("num tile types=3\n{1 0 0 0}(1)\n").is_err());
        assert!(parse("num binding types=2\nbinding strengths={1}\n{1 0 0 0}(1)\n").is_err());
        assert!(parse("colour=3\n").is_err());
        assert!(parse("temperature=two\n").is_err());
        assert!(parse("temperature=2 3\n").is_err());
    }

    #[test]
    fn defaults_are_warned() {
        let (sys, doc) = parse("{3 0 0 4}(1)\n{0 0 3 0}(2)").unwrap();
        assert_eq!(sys.strengths.as_slice(), &[1, 1, 2, 2]);
        assert_eq!(sys.seed, TileId(1));
        assert_eq!(sys.temperature, 2);
        assert_eq!(doc.warnings.len(), 5);
        assert_eq!(sys.tiles[0].label, "");
    }

    #[test]
    fn tolerant_whitespace_and_comments() {
        let text = "  seed = 1 % trailing\n{ 1\n 0 0  0 } ( -5 ) % first\n\n%g\n{0 0 1 0}(+7)";
        let (sys, doc) = parse(text).unwrap();
        assert_eq!(sys.tiles[0].glues.map(|g| g.0), [1, 0, 0, 0]);
        assert_eq!(sys.tiles[0].color, Color(-5));
        assert_eq!(sys.tiles[1].color, Color(7));
        assert_eq!(sys.tiles[1].label, "g");
        assert_eq!(doc.records[0].comment.as_deref(), Some("first"));
        assert_eq!(doc.comments.len(), 3);
        assert!(!doc.comments[0].standalone);
    }

    #[test]
    fn unsigned_color_spelling() {
        let (sys, _) = parse("{0 0 0 0}(4261413119)").unwrap();
        assert_eq!(sys.tiles[0].color, Color::BLUE);
        assert!(parse("{0 0 0 0}(4294967296)").is_err());
        assert!(parse("{0 0 0 0}(-2147483649)").is_err());
    }

    #[test]
    fn kinetic_parameters_pass_through() {
        let text = "Gse=8.5\nGmc=17\n{1 0 0 1}(1)\n";
        let (sys, _) = parse(text).unwrap();
        assert_eq!(sys.gse, Some(8.5));
        assert_eq!(sys.gmc, Some(17.0));
        let again = parse(&emit(&sys).unwrap()).unwrap().0;
        assert_eq!(again, sys);
    }

    #[test]
    fn seed_only_system() {
        let sys = TileSystem {
            tiles: vec![TileType::new("seed tile", [0, 0, 0, 0], Color::RED)],
            strengths: GlueStrengthTable::default(),
            seed: TileId(1),
            temperature: 2,
            gse: None,
            gmc: None,
        };
        let text = emit(&sys).unwrap();
        assert_eq!(text.lines().filter(|l| l.starts_with('{')).count(), 1);
        assert!(text.contains("binding strengths={}\n"));
        assert_eq!(parse(&text).unwrap().0, sys);
    }

    #[test]
    fn invalid_system_is_not_emitted() {
        let sys = TileSystem {
            tiles: vec![TileType::new("", [9, 0, 0, 0], Color::RED)],
            strengths: GlueStrengthTable::default(),
            seed: TileId(1),
            temperature: 2,
            gse: None,
            gmc: None,
        };
        assert!(matches!(emit(&sys), Err(TileFileError::Invalid(_))));
    }

    #[test]
    fn huge_binding_count_is_refused() {
        assert!(parse("num binding types=4294967295\n").is_err());
    }
}
