//! Synthetic tournament corpus with a latent skill model.
//!
//! Each player has a latent overall skill and a correlated serve skill. Tournaments run
//! single-elimination draws; the match winner is drawn from a logistic function of the
//! skill gap, and the per-match serve counts are drawn from the players' serve skills.
//! Bookmaker odds, when generated, are the true win probability plus noise and margin.
//! Used for tests, the acceptance suite and demos where real ATP files are unavailable.

use std::io::Write;

use chrono::{Days, NaiveDate};
use rand::seq::SliceRandom;
use rand::Rng as _;

use crate::error::Result;
use crate::ingest::{Hand, MatchRecord, OddsRecord, PlayerLine, Round, Surface};
use crate::rng::{derive_seed, rng_from_seed, Rng};

#[derive(Debug, Clone)]
pub struct SyntheticConfig {
    pub seed: u64,
    pub n_players: usize,
    pub n_tournaments: usize,
    /// log2 of the draw size range, e.g. (2, 5) gives draws of 4 to 32 players.
    pub draw_log2: (u32, u32),
    pub start: NaiveDate,
    /// Days between consecutive tournament starts.
    pub spacing_days: u64,
    /// Probability that a tournament's matches get bookmaker odds.
    pub odds_fraction: f64,
    /// Probability that any single optional field is blanked.
    pub missing_rate: f64,
    /// Weight of the skill gap in the win-probability logit.
    pub skill_weight: f64,
    /// Include `Unknown` surfaces, `U` hands and `RR` rounds.
    pub exotic: bool,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            n_players: 120,
            n_tournaments: 300,
            draw_log2: (3, 5),
            start: NaiveDate::from_ymd_opt(2010, 1, 4).expect("valid date"),
            spacing_days: 7,
            odds_fraction: 0.4,
            missing_rate: 0.03,
            skill_weight: 2.0,
            exotic: false,
        }
    }
}

impl SyntheticConfig {
    /// A tiny corpus (a handful of players, at most `max_matches` matches) spread over
    /// about three years, exercising every edge case of the feature engine.
    pub fn small(seed: u64, max_matches: usize) -> Self {
        Self {
            seed,
            n_players: 6,
            n_tournaments: max_matches / 3,
            draw_log2: (1, 2),
            spacing_days: 45,
            odds_fraction: 0.5,
            missing_rate: 0.15,
            exotic: true,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone)]
struct Player {
    name: String,
    hand: Hand,
    height: f64,
    birth_year: f64,
    skill: f64,
    serve: f64,
}

#[derive(Debug, Clone, Default)]
pub struct SyntheticCorpus {
    pub matches: Vec<MatchRecord>,
    pub odds: Vec<OddsRecord>,
}

fn normal(rng: &mut Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

fn binomial(rng: &mut Rng, n: u32, p: f64) -> u32 {
    (0..n).filter(|_| rng.gen::<f64>() < p).count() as u32
}

fn round_for(remaining: usize, exotic_rr: bool) -> Round {
    if exotic_rr {
        return Round::RR;
    }
    match remaining {
        2 => Round::F,
        4 => Round::SF,
        8 => Round::QF,
        16 => Round::R16,
        32 => Round::R32,
        64 => Round::R64,
        _ => Round::R128,
    }
}

pub fn generate(cfg: &SyntheticConfig) -> SyntheticCorpus {
    let mut rng = rng_from_seed(derive_seed(cfg.seed, "synthetic", 0));
    let players: Vec<Player> = (0..cfg.n_players)
        .map(|i| {
            let skill = normal(&mut rng);
            let hand = match rng.gen_range(0..20) {
                0..=2 => Hand::L,
                3 if cfg.exotic => Hand::U,
                _ => Hand::R,
            };
            Player {
                name: format!("Player{:03} {}.", i, (b'A' + (i % 26) as u8) as char),
                hand,
                height: 185.0 + 7.0 * normal(&mut rng),
                birth_year: 1980.0 + 10.0 * rng.gen::<f64>(),
                skill,
                serve: 0.7 * skill + 0.7 * normal(&mut rng),
            }
        })
        .collect();

    let tournaments: Vec<(String, Surface)> = (0..(cfg.n_tournaments / 4).max(3))
        .map(|t| {
            let surface = match t % 5 {
                0 | 1 => Surface::Hard,
                2 => Surface::Clay,
                3 => Surface::Grass,
                _ if cfg.exotic => Surface::Unknown,
                _ => Surface::Carpet,
            };
            (format!("Open {t}"), surface)
        })
        .collect();

    let mut corpus = SyntheticCorpus::default();
    if players.len() < 2 {
        return corpus;
    }
    let blank = |rng: &mut Rng| rng.gen::<f64>() < cfg.missing_rate;
    for t in 0..cfg.n_tournaments {
        let (ref tname, surface) = tournaments[t % tournaments.len()];
        let start = cfg.start + Days::new(cfg.spacing_days * t as u64);
        let size = 1usize << rng.gen_range(cfg.draw_log2.0..=cfg.draw_log2.1);
        let size = size.min(1 << players.len().ilog2());
        let best_of = if size >= 32 && rng.gen_bool(0.25) { 5 } else { 3 };
        let rr = cfg.exotic && rng.gen_bool(0.1);
        let mut idx: Vec<usize> = (0..players.len()).collect();
        idx.shuffle(&mut rng);
        let mut alive: Vec<usize> = idx[..size].to_vec();
        let with_odds = rng.gen::<f64>() < cfg.odds_fraction;
        let mut day = 0u64;
        while alive.len() >= 2 {
            let round = round_for(alive.len(), rr);
            let date = start + Days::new(day);
            let mut next = Vec::with_capacity(alive.len() / 2);
            for pair in alive.chunks(2) {
                let (a, b) = (&players[pair[0]], &players[pair[1]]);
                let p_a = sigmoid(cfg.skill_weight * (a.skill - b.skill) + 0.8 * (a.serve - b.serve));
                let a_wins = rng.gen::<f64>() < p_a;
                let (wi, li, p_w) = if a_wins { (pair[0], pair[1], p_a) } else { (pair[1], pair[0], 1.0 - p_a) };
                next.push(wi);
                let age_at = |p: &Player| date.format("%Y").to_string().parse::<f64>().unwrap_or(2010.0) - p.birth_year;
                let line = |p: &Player, won: bool, rng: &mut Rng| {
                    let serve_points = 50 + rng.gen_range(0..50) + if best_of == 5 { 30 } else { 0 };
                    let first_in = binomial(rng, serve_points, (0.6 + 0.03 * p.serve).clamp(0.3, 0.9));
                    let bonus = if won { 0.04 } else { -0.04 };
                    let first_won = binomial(rng, first_in, (0.7 + 0.06 * p.serve + bonus).clamp(0.3, 0.95));
                    let second_won =
                        binomial(rng, serve_points - first_in, (0.5 + 0.05 * p.serve + bonus).clamp(0.2, 0.9));
                    let bp_faced = rng.gen_range(0..12);
                    let bp_saved = binomial(rng, bp_faced, (0.6 + 0.05 * p.skill).clamp(0.2, 0.95));
                    let aces = binomial(rng, serve_points, (0.06 + 0.02 * p.serve).clamp(0.0, 0.3));
                    let dfs = binomial(rng, serve_points, 0.03);
                    let mut l = PlayerLine {
                        name: p.name.clone(),
                        hand: Some(p.hand),
                        height: Some((p.height * 10.0).round() / 10.0),
                        age: Some((age_at(p) * 10.0).round() / 10.0),
                        rank_points: Some((2000.0 * (p.skill + 3.0)).max(0.0) as u32),
                        aces: Some(aces),
                        double_faults: Some(dfs),
                        serve_points: Some(serve_points),
                        first_in: Some(first_in),
                        first_won: Some(first_won),
                        second_won: Some(second_won),
                        bp_saved: Some(bp_saved),
                        bp_faced: Some(bp_faced),
                    };
                    if blank(rng) {
                        l.height = None;
                    }
                    if blank(rng) {
                        l.age = None;
                    }
                    if blank(rng) {
                        l.rank_points = None;
                    }
                    if blank(rng) {
                        l.clear_serve_stats();
                    } else if blank(rng) {
                        l.aces = None;
                    }
                    l
                };
                let winner = line(&players[wi], true, &mut rng);
                let loser = line(&players[li], false, &mut rng);
                if with_odds {
                    let books = rng.gen_range(1..=3);
                    let pairs = (0..books)
                        .map(|_| {
                            let q = (p_w + 0.05 * normal(&mut rng)).clamp(0.03, 0.97);
                            let margin = 1.05;
                            let w = (1.0 / (q * margin)).max(1.01);
                            let l = (1.0 / ((1.0 - q) * margin)).max(1.01);
                            ((w * 100.0).round() / 100.0, (l * 100.0).round() / 100.0)
                        })
                        .collect();
                    corpus.odds.push(OddsRecord {
                        date,
                        winner_name: winner.name.clone(),
                        loser_name: loser.name.clone(),
                        pairs,
                    });
                }
                corpus.matches.push(MatchRecord {
                    tournament_id: tname.clone(),
                    date,
                    surface,
                    round,
                    best_of,
                    winner,
                    loser,
                });
            }
            alive = next;
            day += 1;
        }
    }
    corpus
}

/// Write matches in the public ATP column layout (the default match column map).
pub fn write_atp_csv<W: Write>(sink: W, matches: &[MatchRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    let side = |word: &str, letter: &str| {
        let mut v: Vec<String> =
            ["name", "hand", "ht", "age", "rank_points"].iter().map(|f| format!("{word}_{f}")).collect();
        v.extend(
            ["ace", "df", "svpt", "1stIn", "1stWon", "2ndWon", "bpSaved", "bpFaced"]
                .iter()
                .map(|f| format!("{letter}_{f}")),
        );
        v
    };
    let mut header: Vec<String> =
        ["tourney_name", "tourney_date", "surface", "round", "best_of"].map(String::from).to_vec();
    header.extend(side("winner", "w"));
    header.extend(side("loser", "l"));
    w.write_record(&header)?;
    let o = |v: Option<u32>| v.map(|x| x.to_string()).unwrap_or_default();
    let of = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for m in matches {
        let mut row = vec![
            m.tournament_id.clone(),
            m.date.format("%Y%m%d").to_string(),
            if m.surface == Surface::Unknown { String::new() } else { m.surface.to_string() },
            m.round.to_string(),
            m.best_of.to_string(),
        ];
        for p in [&m.winner, &m.loser] {
            row.extend([
                p.name.clone(),
                p.hand.map(|h| h.as_str().to_string()).unwrap_or_default(),
                of(p.height),
                of(p.age),
                o(p.rank_points),
                o(p.aces),
                o(p.double_faults),
                o(p.serve_points),
                o(p.first_in),
                o(p.first_won),
                o(p.second_won),
                o(p.bp_saved),
                o(p.bp_faced),
            ]);
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Write odds with one `BkN W/L` column pair per bookmaker slot (the default odds column map's
/// first three bookmakers: B365, PS, EX).
pub fn write_odds_csv<W: Write>(sink: W, odds: &[OddsRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(["Date", "Winner", "Loser", "B365W", "B365L", "PSW", "PSL", "EXW", "EXL"])?;
    for o in odds {
        let mut row = vec![o.date.format("%d/%m/%Y").to_string(), o.winner_name.clone(), o.loser_name.clone()];
        for k in 0..3 {
            match o.pairs.get(k) {
                Some((a, b)) => row.extend([a.to_string(), b.to_string()]),
                None => row.extend([String::new(), String::new()]),
            }
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}
