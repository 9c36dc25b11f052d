//! Delimiter-separated parsing of match and odds files driven by column maps.

use std::collections::HashMap;
use std::io::Read;

use serde::{Deserialize, Serialize};

use super::records::{parse_date, Hand, MatchRecord, OddsRecord, PlayerLine, Round, Surface};
use crate::error::{Error, Result};

/// Source column names for one player's fields. An empty name means "not present in
/// this export"; the field is then always absent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PlayerColumns {
    pub name: String,
    pub hand: String,
    pub height: String,
    pub age: String,
    pub rank_points: String,
    pub aces: String,
    pub double_faults: String,
    pub serve_points: String,
    pub first_in: String,
    pub first_won: String,
    pub second_won: String,
    pub bp_saved: String,
    pub bp_faced: String,
}

impl PlayerColumns {
    /// Column names of the public ATP match exports (`winner_*` / `w_*` style).
    pub fn atp(side_word: &str, side_letter: &str) -> Self {
        let s = |f: &str| format!("{side_word}_{f}");
        let c = |f: &str| format!("{side_letter}_{f}");
        Self {
            name: s("name"),
            hand: s("hand"),
            height: s("ht"),
            age: s("age"),
            rank_points: s("rank_points"),
            aces: c("ace"),
            double_faults: c("df"),
            serve_points: c("svpt"),
            first_in: c("1stIn"),
            first_won: c("1stWon"),
            second_won: c("2ndWon"),
            bp_saved: c("bpSaved"),
            bp_faced: c("bpFaced"),
        }
    }
}

impl Default for PlayerColumns {
    fn default() -> Self {
        Self::atp("winner", "w")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MatchColumns {
    pub tournament_id: String,
    pub date: String,
    pub surface: String,
    pub round: String,
    pub best_of: String,
    pub winner: PlayerColumns,
    pub loser: PlayerColumns,
}

impl Default for MatchColumns {
    fn default() -> Self {
        Self {
            // Tournament names are stable across seasons; the ATP `tourney_id` is year-prefixed.
            tournament_id: "tourney_name".into(),
            date: "tourney_date".into(),
            surface: "surface".into(),
            round: "round".into(),
            best_of: "best_of".into(),
            winner: PlayerColumns::atp("winner", "w"),
            loser: PlayerColumns::atp("loser", "l"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OddsColumns {
    pub date: String,
    pub winner: String,
    pub loser: String,
    /// (winner odds column, loser odds column) per bookmaker. Pairs whose columns are
    /// not in the header are ignored, since bookmaker coverage varies between seasons.
    pub bookmakers: Vec<(String, String)>,
}

impl Default for OddsColumns {
    fn default() -> Self {
        let books = ["B365", "PS", "EX", "LB", "CB", "SJ", "IW", "UB", "GB", "SB", "B&W"];
        Self {
            date: "Date".into(),
            winner: "Winner".into(),
            loser: "Loser".into(),
            bookmakers: books.iter().map(|b| (format!("{b}W"), format!("{b}L"))).collect(),
        }
    }
}

/// A data row that could not be turned into a record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowError {
    /// 1-based line number in the source file.
    pub line: u64,
    pub message: String,
}

#[derive(Debug, Clone, Default)]
pub struct MatchParse {
    pub records: Vec<MatchRecord>,
    pub row_errors: Vec<RowError>,
    /// Player lines whose serve counts violated the count invariants; their serve
    /// counts were dropped.
    pub inconsistent_stats: usize,
}

#[derive(Debug, Clone, Default)]
pub struct OddsParse {
    pub records: Vec<OddsRecord>,
    pub row_errors: Vec<RowError>,
    /// Bookmaker pairs with a value below 1.0 or an unparseable value.
    pub invalid_pairs: usize,
    /// Bookmaker pairs with exactly one side filled in.
    pub incomplete_pairs: usize,
}

struct Header {
    index: HashMap<String, usize>,
    width: usize,
}

impl Header {
    fn read<R: Read>(rdr: &mut csv::Reader<R>) -> Result<Self> {
        let h = rdr.headers().map_err(|e| Error::Header(e.to_string()))?;
        if h.is_empty() || (h.len() == 1 && h[0].trim().is_empty()) {
            return Err(Error::Header("empty header row".into()));
        }
        let mut index = HashMap::new();
        for (i, name) in h.iter().enumerate() {
            let name = name.trim().trim_start_matches('\u{feff}').to_string();
            if index.insert(name.clone(), i).is_some() {
                return Err(Error::Header(format!("duplicate column `{name}`")));
            }
        }
        Ok(Self { index, width: h.len() })
    }

    fn required(&self, col: &str, field: &str) -> Result<usize> {
        if col.is_empty() {
            return Err(Error::Header(format!("no source column mapped for required field `{field}`")));
        }
        self.index
            .get(col)
            .copied()
            .ok_or_else(|| Error::Header(format!("column `{col}` (field `{field}`) not in header")))
    }

    fn optional(&self, col: &str, field: &str) -> Result<Option<usize>> {
        if col.is_empty() {
            Ok(None)
        } else {
            self.required(col, field).map(Some)
        }
    }
}

fn reader<R: Read>(source: R, delimiter: u8) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(source)
}

fn cell(rec: &csv::StringRecord, idx: Option<usize>) -> &str {
    idx.and_then(|i| rec.get(i)).unwrap_or("").trim()
}

fn parse_count(s: &str) -> Option<u32> {
    let v: f64 = s.parse().ok()?;
    (v.is_finite() && v >= 0.0 && v.fract() == 0.0 && v <= f64::from(u32::MAX)).then_some(v as u32)
}

fn parse_positive(s: &str) -> Option<f64> {
    let v: f64 = s.parse().ok()?;
    (v.is_finite() && v > 0.0).then_some(v)
}

struct PlayerIdx {
    name: usize,
    hand: Option<usize>,
    height: Option<usize>,
    age: Option<usize>,
    rank_points: Option<usize>,
    counts: [Option<usize>; 8],
}

impl PlayerIdx {
    fn resolve(h: &Header, c: &PlayerColumns, side: &str) -> Result<Self> {
        let f = |x: &str| format!("{side}.{x}");
        Ok(Self {
            name: h.required(&c.name, &f("name"))?,
            hand: h.optional(&c.hand, &f("hand"))?,
            height: h.optional(&c.height, &f("height"))?,
            age: h.optional(&c.age, &f("age"))?,
            rank_points: h.optional(&c.rank_points, &f("rank_points"))?,
            counts: [
                h.optional(&c.aces, &f("aces"))?,
                h.optional(&c.double_faults, &f("double_faults"))?,
                h.optional(&c.serve_points, &f("serve_points"))?,
                h.optional(&c.first_in, &f("first_in"))?,
                h.optional(&c.first_won, &f("first_won"))?,
                h.optional(&c.second_won, &f("second_won"))?,
                h.optional(&c.bp_saved, &f("bp_saved"))?,
                h.optional(&c.bp_faced, &f("bp_faced"))?,
            ],
        })
    }

    fn read(&self, rec: &csv::StringRecord) -> PlayerLine {
        let count = |k: usize| parse_count(cell(rec, self.counts[k]));
        PlayerLine {
            name: cell(rec, Some(self.name)).to_string(),
            hand: self.hand.map(|i| Hand::parse_lenient(cell(rec, Some(i)))),
            height: parse_positive(cell(rec, self.height)),
            age: parse_positive(cell(rec, self.age)),
            rank_points: parse_count(cell(rec, self.rank_points)),
            aces: count(0),
            double_faults: count(1),
            serve_points: count(2),
            first_in: count(3),
            first_won: count(4),
            second_won: count(5),
            bp_saved: count(6),
            bp_faced: count(7),
        }
    }
}

/// Parse a match file. Fatal only for header problems; bad rows are reported.
pub fn parse_matches<R: Read>(source: R, columns: &MatchColumns, delimiter: u8) -> Result<MatchParse> {
    let mut rdr = reader(source, delimiter);
    let header = Header::read(&mut rdr)?;
    let date = header.required(&columns.date, "date")?;
    let round = header.required(&columns.round, "round")?;
    let tournament = header.optional(&columns.tournament_id, "tournament_id")?;
    let surface = header.optional(&columns.surface, "surface")?;
    let best_of = header.optional(&columns.best_of, "best_of")?;
    let winner = PlayerIdx::resolve(&header, &columns.winner, "winner")?;
    let loser = PlayerIdx::resolve(&header, &columns.loser, "loser")?;

    let mut out = MatchParse::default();
    for result in rdr.records() {
        let rec = match result {
            Ok(r) => r,
            Err(e) => {
                let line = e.position().map_or(0, |p| p.line());
                out.row_errors.push(RowError { line, message: e.to_string() });
                continue;
            }
        };
        let line = rec.position().map_or(0, |p| p.line());
        let fail = |msg: String| RowError { line, message: msg };
        if rec.len() != header.width {
            out.row_errors.push(fail(format!("expected {} fields, found {}", header.width, rec.len())));
            continue;
        }
        let Some(d) = parse_date(cell(&rec, Some(date))) else {
            out.row_errors.push(fail(format!("missing or invalid date `{}`", cell(&rec, Some(date)))));
            continue;
        };
        let mut w = winner.read(&rec);
        let mut l = loser.read(&rec);
        if w.name.is_empty() || l.name.is_empty() {
            out.row_errors.push(fail("missing player name".into()));
            continue;
        }
        if w.name == l.name {
            out.row_errors.push(fail(format!("winner and loser are both `{}`", w.name)));
            continue;
        }
        let r = match cell(&rec, Some(round)).parse::<Round>() {
            Ok(r) => r,
            Err(e) => {
                out.row_errors.push(fail(e));
                continue;
            }
        };
        let bo = match cell(&rec, best_of) {
            "" => 3,
            s => match parse_count(s) {
                Some(v @ (3 | 5)) => v as u8,
                _ => {
                    out.row_errors.push(fail(format!("invalid best_of `{s}`")));
                    continue;
                }
            },
        };
        for p in [&mut w, &mut l] {
            if !p.stats_consistent() {
                p.clear_serve_stats();
                out.inconsistent_stats += 1;
            }
        }
        out.records.push(MatchRecord {
            tournament_id: cell(&rec, tournament).to_string(),
            date: d,
            surface: Surface::parse_lenient(cell(&rec, surface)),
            round: r,
            best_of: bo,
            winner: w,
            loser: l,
        });
    }
    Ok(out)
}

/// Parse a bookmaker odds file.
pub fn parse_odds<R: Read>(source: R, columns: &OddsColumns, delimiter: u8) -> Result<OddsParse> {
    let mut rdr = reader(source, delimiter);
    let header = Header::read(&mut rdr)?;
    let date = header.required(&columns.date, "date")?;
    let winner = header.required(&columns.winner, "winner_name")?;
    let loser = header.required(&columns.loser, "loser_name")?;
    let books: Vec<(usize, usize)> = columns
        .bookmakers
        .iter()
        .filter_map(|(w, l)| Some((*header.index.get(w)?, *header.index.get(l)?)))
        .collect();
    if books.is_empty() {
        return Err(Error::Header("no bookmaker odds column pair found in header".into()));
    }

    let mut out = OddsParse::default();
    for result in rdr.records() {
        let rec = match result {
            Ok(r) => r,
            Err(e) => {
                let line = e.position().map_or(0, |p| p.line());
                out.row_errors.push(RowError { line, message: e.to_string() });
                continue;
            }
        };
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != header.width {
            out.row_errors.push(RowError {
                line,
                message: format!("expected {} fields, found {}", header.width, rec.len()),
            });
            continue;
        }
        let Some(d) = parse_date(cell(&rec, Some(date))) else {
            out.row_errors.push(RowError { line, message: "missing or invalid date".into() });
            continue;
        };
        let (wn, ln) = (cell(&rec, Some(winner)), cell(&rec, Some(loser)));
        if wn.is_empty() || ln.is_empty() {
            out.row_errors.push(RowError { line, message: "missing player name".into() });
            continue;
        }
        let mut pairs = Vec::new();
        for &(wi, li) in &books {
            match (cell(&rec, Some(wi)), cell(&rec, Some(li))) {
                ("", "") => {}
                ("", _) | (_, "") => out.incomplete_pairs += 1,
                (a, b) => match (a.parse::<f64>(), b.parse::<f64>()) {
                    (Ok(a), Ok(b)) if a >= 1.0 && b >= 1.0 && a.is_finite() && b.is_finite() => {
                        pairs.push((a, b))
                    }
                    _ => out.invalid_pairs += 1,
                },
            }
        }
        out.records.push(OddsRecord {
            date: d,
            winner_name: wn.to_string(),
            loser_name: ln.to_string(),
            pairs,
        });
    }
    Ok(out)
}
