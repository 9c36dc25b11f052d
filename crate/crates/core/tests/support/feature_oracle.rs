//! Brute-force feature recomputation: a full scan over the match list for every
//! feature, applying the date predicates directly. Shares nothing with the feature
//! engine except the input types.

use chrono::{Months, NaiveDate};
use tennis_core::features::{Feature, FEATURE_COUNT};
use tennis_core::ingest::{Hand, MergedMatch, PlayerLine, Round, Side, Surface};

fn key(name: &str) -> String {
    let mut out = String::new();
    for tok in name.split_whitespace() {
        let t: String = tok.chars().filter(|&c| c != '.').collect::<String>().to_lowercase();
        if t.is_empty() {
            continue;
        }
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(&t);
    }
    out
}

struct Past<'a> {
    date: NaiveDate,
    won: bool,
    me: &'a PlayerLine,
    opp: &'a PlayerLine,
    m: &'a tennis_core::ingest::MatchRecord,
}

fn appearances<'a>(matches: &'a [MergedMatch], player: &str) -> Vec<Past<'a>> {
    let k = key(player);
    let mut out = Vec::new();
    for mm in matches {
        let m = &mm.record;
        if key(&m.winner.name) == k {
            out.push(Past { date: m.date, won: true, me: &m.winner, opp: &m.loser, m });
        }
        if key(&m.loser.name) == k {
            out.push(Past { date: m.date, won: false, me: &m.loser, opp: &m.winner, m });
        }
    }
    out
}

fn ratio(pairs: impl Iterator<Item = (u32, u32)>) -> f64 {
    let (mut n, mut d) = (0.0f64, 0.0f64);
    for (a, b) in pairs {
        n += f64::from(a);
        d += f64::from(b);
    }
    if d == 0.0 {
        f64::NAN
    } else {
        n / d
    }
}

fn rate<'a>(it: impl Iterator<Item = &'a Past<'a>>) -> f64 {
    let v: Vec<bool> = it.map(|p| p.won).collect();
    if v.is_empty() {
        f64::NAN
    } else {
        v.iter().filter(|&&w| w).count() as f64 / v.len() as f64
    }
}

pub fn oracle_features(matches: &[MergedMatch], match_idx: usize, side: Side) -> [f64; FEATURE_COUNT] {
    let m = &matches[match_idx].record;
    let (me, opp) = match side {
        Side::Winner => (&m.winner, &m.loser),
        Side::Loser => (&m.loser, &m.winner),
    };
    let all = appearances(matches, &me.name);
    let from = m.date.checked_sub_months(Months::new(12)).unwrap();
    let life: Vec<&Past> = all.iter().filter(|p| p.date < m.date).collect();
    let recent: Vec<&Past> = all.iter().filter(|p| p.date < m.date && p.date >= from).collect();

    let mut f = [f64::NAN; FEATURE_COUNT];
    let mut set = |feat: Feature, v: f64| f[feat.index()] = v;
    set(Feature::Height, me.height.unwrap_or(f64::NAN));
    set(Feature::Age, me.age.unwrap_or(f64::NAN));
    set(Feature::RankPoints, me.rank_points.map(f64::from).unwrap_or(f64::NAN));
    set(
        Feature::AceVsDf,
        ratio(recent.iter().filter_map(|p| Some((p.me.aces?, p.me.double_faults?)))),
    );
    set(Feature::PastPer, rate(recent.iter().copied()));
    if !life.is_empty() {
        set(Feature::Champ, life.iter().filter(|p| p.won && p.m.round == Round::F).count() as f64);
        set(Feature::GamesPlayed, recent.len() as f64);
    }
    set(Feature::WinRound, rate(life.iter().copied().filter(|p| p.m.round == m.round)));
    if !m.tournament_id.is_empty() {
        set(Feature::TourPer, rate(life.iter().copied().filter(|p| p.m.tournament_id == m.tournament_id)));
    }
    let oh = opp.hand.unwrap_or(Hand::U);
    if oh != Hand::U {
        set(Feature::HandPer, rate(life.iter().copied().filter(|p| p.opp.hand.unwrap_or(Hand::U) == oh)));
    }
    if m.surface != Surface::Unknown {
        set(Feature::SurfacePer, rate(life.iter().copied().filter(|p| p.m.surface == m.surface)));
    }
    set(Feature::OpponPer, rate(life.iter().copied().filter(|p| key(&p.opp.name) == key(&opp.name))));
    set(
        Feature::FirstIn1stServe,
        ratio(recent.iter().filter_map(|p| Some((p.me.first_in?, p.me.serve_points?)))),
    );
    set(
        Feature::FirstWonFirstIn,
        ratio(recent.iter().filter_map(|p| Some((p.me.first_won?, p.me.first_in?)))),
    );
    set(
        Feature::SecondWonSecondIn,
        ratio(recent.iter().filter_map(|p| {
            let (sp, fi) = (p.me.serve_points?, p.me.first_in?);
            if fi > sp {
                return None;
            }
            Some((p.me.second_won?, sp - fi))
        })),
    );
    set(Feature::BpSBpF, ratio(recent.iter().filter_map(|p| Some((p.me.bp_saved?, p.me.bp_faced?)))));

    let surfaces = [
        (Surface::Hard, Feature::SurfaceHard),
        (Surface::Clay, Feature::SurfaceClay),
        (Surface::Grass, Feature::SurfaceGrass),
        (Surface::Carpet, Feature::SurfaceCarpet),
    ];
    if m.surface != Surface::Unknown {
        for (s, feat) in surfaces {
            set(feat, if s == m.surface { 1.0 } else { 0.0 });
        }
    }
    let rounds = [
        (Round::R128, Feature::RoundR128),
        (Round::R64, Feature::RoundR64),
        (Round::R32, Feature::RoundR32),
        (Round::R16, Feature::RoundR16),
        (Round::QF, Feature::RoundQF),
        (Round::SF, Feature::RoundSF),
        (Round::F, Feature::RoundF),
        (Round::RR, Feature::RoundRR),
    ];
    for (r, feat) in rounds {
        set(feat, if r == m.round { 1.0 } else { 0.0 });
    }
    f
}

/// Bitwise comparison treating NaN == NaN.
pub fn same(a: f64, b: f64) -> bool {
    (a.is_nan() && b.is_nan()) || a == b
}
