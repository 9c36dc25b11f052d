//! The merged-dataset file: one row per match, fixed column order.
//!
//! Columns: `match_id, tournament_id, date, surface, round, best_of`, then for each of
//! `winner_` and `loser_`: `name, hand, height, age, rank_points, aces, double_faults,
//! serve_points, first_in, first_won, second_won, bp_saved, bp_faced`, then
//! `avg_winner_odds, avg_loser_odds`. Dates are `YYYY-MM-DD`; absent values are empty cells.

use std::io::{Read, Write};

use super::records::{parse_date, Hand, MatchRecord, MergedMatch, PlayerLine, Surface};
use crate::error::{Error, Result};

const PLAYER_FIELDS: [&str; 13] = [
    "name",
    "hand",
    "height",
    "age",
    "rank_points",
    "aces",
    "double_faults",
    "serve_points",
    "first_in",
    "first_won",
    "second_won",
    "bp_saved",
    "bp_faced",
];

pub fn merged_header() -> Vec<String> {
    let mut h: Vec<String> =
        ["match_id", "tournament_id", "date", "surface", "round", "best_of"].map(String::from).to_vec();
    for side in ["winner", "loser"] {
        h.extend(PLAYER_FIELDS.iter().map(|f| format!("{side}_{f}")));
    }
    h.push("avg_winner_odds".into());
    h.push("avg_loser_odds".into());
    h
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn player_cells(p: &PlayerLine) -> [String; 13] {
    [
        p.name.clone(),
        p.hand.map(|h| h.as_str().to_string()).unwrap_or_default(),
        opt(p.height),
        opt(p.age),
        opt(p.rank_points),
        opt(p.aces),
        opt(p.double_faults),
        opt(p.serve_points),
        opt(p.first_in),
        opt(p.first_won),
        opt(p.second_won),
        opt(p.bp_saved),
        opt(p.bp_faced),
    ]
}

pub fn write_merged<W: Write>(sink: W, matches: &[MergedMatch]) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(merged_header())?;
    for (i, m) in matches.iter().enumerate() {
        let r = &m.record;
        let mut row = vec![
            i.to_string(),
            r.tournament_id.clone(),
            r.date.format("%Y-%m-%d").to_string(),
            r.surface.as_str().to_string(),
            r.round.as_str().to_string(),
            r.best_of.to_string(),
        ];
        row.extend(player_cells(&r.winner));
        row.extend(player_cells(&r.loser));
        row.push(opt(m.odds.map(|o| o.0)));
        row.push(opt(m.odds.map(|o| o.1)));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

fn field<T: std::str::FromStr>(s: &str, line: u64, what: &str) -> Result<Option<T>> {
    if s.is_empty() {
        return Ok(None);
    }
    s.parse()
        .map(Some)
        .map_err(|_| Error::Data(format!("line {line}: invalid {what} `{s}`")))
}

fn read_player(cells: &[&str], line: u64) -> Result<PlayerLine> {
    Ok(PlayerLine {
        name: cells[0].to_string(),
        hand: if cells[1].is_empty() { None } else { Some(Hand::parse_lenient(cells[1])) },
        height: field(cells[2], line, "height")?,
        age: field(cells[3], line, "age")?,
        rank_points: field(cells[4], line, "rank_points")?,
        aces: field(cells[5], line, "aces")?,
        double_faults: field(cells[6], line, "double_faults")?,
        serve_points: field(cells[7], line, "serve_points")?,
        first_in: field(cells[8], line, "first_in")?,
        first_won: field(cells[9], line, "first_won")?,
        second_won: field(cells[10], line, "second_won")?,
        bp_saved: field(cells[11], line, "bp_saved")?,
        bp_faced: field(cells[12], line, "bp_faced")?,
    })
}

/// Read a merged-dataset file written by [`write_merged`]. Any deviation from the schema is fatal.
pub fn read_merged<R: Read>(source: R) -> Result<Vec<MergedMatch>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(source);
    let header: Vec<String> = rdr.headers()?.iter().map(String::from).collect();
    if header != merged_header() {
        return Err(Error::Header("not a merged-dataset file (column layout differs)".into()));
    }
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let c: Vec<&str> = rec.iter().collect();
        let date = parse_date(c[2]).ok_or_else(|| Error::Data(format!("line {line}: invalid date `{}`", c[2])))?;
        let round = c[4].parse().map_err(|e| Error::Data(format!("line {line}: {e}")))?;
        let best_of = field(c[5], line, "best_of")?.unwrap_or(3);
        let record = MatchRecord {
            tournament_id: c[1].to_string(),
            date,
            surface: Surface::parse_lenient(c[3]),
            round,
            best_of,
            winner: read_player(&c[6..19], line)?,
            loser: read_player(&c[19..32], line)?,
        };
        let odds = match (field::<f64>(c[32], line, "odds")?, field::<f64>(c[33], line, "odds")?) {
            (Some(w), Some(l)) => Some((w, l)),
            (None, None) => None,
            _ => return Err(Error::Data(format!("line {line}: odds present for only one side"))),
        };
        out.push(MergedMatch { record, odds });
    }
    Ok(out)
}
