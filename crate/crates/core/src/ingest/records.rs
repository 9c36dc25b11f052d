use std::fmt;
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Surface {
    Hard,
    Clay,
    Grass,
    Carpet,
    Unknown,
}

impl Surface {
    pub const KNOWN: [Surface; 4] = [Surface::Hard, Surface::Clay, Surface::Grass, Surface::Carpet];

    /// Lenient parse: anything unrecognised (including empty) is `Unknown`.
    pub fn parse_lenient(s: &str) -> Surface {
        match s.trim().to_ascii_lowercase().as_str() {
            "hard" => Surface::Hard,
            "clay" => Surface::Clay,
            "grass" => Surface::Grass,
            "carpet" => Surface::Carpet,
            _ => Surface::Unknown,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Surface::Hard => "Hard",
            Surface::Clay => "Clay",
            Surface::Grass => "Grass",
            Surface::Carpet => "Carpet",
            Surface::Unknown => "Unknown",
        }
    }
}

impl fmt::Display for Surface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Round {
    R128,
    R64,
    R32,
    R16,
    QF,
    SF,
    F,
    RR,
}

impl Round {
    pub const ALL: [Round; 8] =
        [Round::R128, Round::R64, Round::R32, Round::R16, Round::QF, Round::SF, Round::F, Round::RR];

    pub fn as_str(self) -> &'static str {
        match self {
            Round::R128 => "R128",
            Round::R64 => "R64",
            Round::R32 => "R32",
            Round::R16 => "R16",
            Round::QF => "QF",
            Round::SF => "SF",
            Round::F => "F",
            Round::RR => "RR",
        }
    }
}

impl FromStr for Round {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        Round::ALL
            .into_iter()
            .find(|r| r.as_str().eq_ignore_ascii_case(t))
            .ok_or_else(|| format!("unknown round `{t}`"))
    }
}

impl fmt::Display for Round {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Hand {
    L,
    R,
    U,
}

impl Hand {
    pub fn parse_lenient(s: &str) -> Hand {
        match s.trim() {
            "L" | "l" => Hand::L,
            "R" | "r" => Hand::R,
            _ => Hand::U,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Hand::L => "L",
            Hand::R => "R",
            Hand::U => "U",
        }
    }
}

/// Which participant of a match.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Winner,
    Loser,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Winner => Side::Loser,
            Side::Loser => Side::Winner,
        }
    }
}

/// One player's attributes and raw serve counts in a single match.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PlayerLine {
    pub name: String,
    pub hand: Option<Hand>,
    pub height: Option<f64>,
    pub age: Option<f64>,
    pub rank_points: Option<u32>,
    pub aces: Option<u32>,
    pub double_faults: Option<u32>,
    pub serve_points: Option<u32>,
    pub first_in: Option<u32>,
    pub first_won: Option<u32>,
    pub second_won: Option<u32>,
    pub bp_saved: Option<u32>,
    pub bp_faced: Option<u32>,
}

impl PlayerLine {
    pub fn hand(&self) -> Hand {
        self.hand.unwrap_or(Hand::U)
    }

    /// Check the count invariants that can be checked with the fields present.
    pub fn stats_consistent(&self) -> bool {
        let le = |a: Option<u32>, b: Option<u32>| match (a, b) {
            (Some(a), Some(b)) => a <= b,
            _ => true,
        };
        let second_ok = match (self.second_won, self.serve_points, self.first_in) {
            (Some(w), Some(sp), Some(fi)) => fi <= sp && w <= sp - fi,
            _ => true,
        };
        le(self.first_in, self.serve_points)
            && le(self.first_won, self.first_in)
            && second_ok
            && le(self.bp_saved, self.bp_faced)
    }

    /// Drop all serve and break-point counts.
    pub fn clear_serve_stats(&mut self) {
        self.aces = None;
        self.double_faults = None;
        self.serve_points = None;
        self.first_in = None;
        self.first_won = None;
        self.second_won = None;
        self.bp_saved = None;
        self.bp_faced = None;
    }
}

/// One completed match.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchRecord {
    pub tournament_id: String,
    pub date: NaiveDate,
    pub surface: Surface,
    pub round: Round,
    pub best_of: u8,
    pub winner: PlayerLine,
    pub loser: PlayerLine,
}

impl MatchRecord {
    pub fn player(&self, side: Side) -> &PlayerLine {
        match side {
            Side::Winner => &self.winner,
            Side::Loser => &self.loser,
        }
    }
}

/// Bookmaker decimal odds for one match.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OddsRecord {
    pub date: NaiveDate,
    pub winner_name: String,
    pub loser_name: String,
    /// (winner_odds, loser_odds) per bookmaker, each value >= 1.0.
    pub pairs: Vec<(f64, f64)>,
}

/// A match with its bookmaker-averaged odds, when a same-key odds row existed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MergedMatch {
    pub record: MatchRecord,
    pub odds: Option<(f64, f64)>,
}

impl MergedMatch {
    pub fn unmatched(record: MatchRecord) -> Self {
        Self { record, odds: None }
    }

    /// Averaged decimal odds for one side.
    pub fn odds_for(&self, side: Side) -> Option<f64> {
        self.odds.map(|(w, l)| match side {
            Side::Winner => w,
            Side::Loser => l,
        })
    }
}

/// Parse a calendar day written as `YYYYMMDD`, `YYYY-MM-DD` or `DD/MM/YYYY`.
pub fn parse_date(s: &str) -> Option<NaiveDate> {
    let t = s.trim();
    // Some exports write the date as a float (e.g. `20100615.0`).
    let t = t.strip_suffix(".0").unwrap_or(t);
    NaiveDate::parse_from_str(t, "%Y%m%d")
        .or_else(|_| NaiveDate::parse_from_str(t, "%Y-%m-%d"))
        .or_else(|_| NaiveDate::parse_from_str(t, "%d/%m/%Y"))
        .ok()
        .filter(|_| t.len() >= 8)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dates_in_all_accepted_forms() {
        let d = NaiveDate::from_ymd_opt(2010, 6, 15).unwrap();
        assert_eq!(parse_date("20100615"), Some(d));
        assert_eq!(parse_date("2010-06-15"), Some(d));
        assert_eq!(parse_date("15/06/2010"), Some(d));
        assert_eq!(parse_date(" 20100615 "), Some(d));
        assert_eq!(parse_date(""), None);
        assert_eq!(parse_date("2010615"), None);
        assert_eq!(parse_date("2010-13-01"), None);
    }

    #[test]
    fn round_and_surface_parsing() {
        assert_eq!("sf".parse::<Round>(), Ok(Round::SF));
        assert!("BR".parse::<Round>().is_err());
        assert_eq!(Surface::parse_lenient("Clay"), Surface::Clay);
        assert_eq!(Surface::parse_lenient(""), Surface::Unknown);
        assert_eq!(Hand::parse_lenient("A"), Hand::U);
    }

    #[test]
    fn stats_consistency_checks() {
        let mut p = PlayerLine {
            serve_points: Some(80),
            first_in: Some(48),
            first_won: Some(30),
            second_won: Some(20),
            bp_saved: Some(2),
            bp_faced: Some(3),
            ..Default::default()
        };
        assert!(p.stats_consistent());
        p.second_won = Some(33);
        assert!(!p.stats_consistent());
        p.second_won = Some(32);
        assert!(p.stats_consistent());
        p.bp_saved = Some(4);
        assert!(!p.stats_consistent());
    }
}
