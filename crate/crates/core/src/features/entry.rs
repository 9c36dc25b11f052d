use serde::{Deserialize, Serialize};

use super::history::{HistoryEvent, PlayerHistory, Window};
use crate::ingest::{Hand, MatchRecord, MergedMatch, PlayerLine, Round, Side, Surface};

/// Feature columns, in matrix column order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Feature {
    Height,
    Age,
    RankPoints,
    AceVsDf,
    PastPer,
    Champ,
    WinRound,
    GamesPlayed,
    TourPer,
    HandPer,
    SurfacePer,
    OpponPer,
    FirstIn1stServe,
    FirstWonFirstIn,
    SecondWonSecondIn,
    BpSBpF,
    SurfaceHard,
    SurfaceClay,
    SurfaceGrass,
    SurfaceCarpet,
    RoundR128,
    RoundR64,
    RoundR32,
    RoundR16,
    RoundQF,
    RoundSF,
    RoundF,
    RoundRR,
}

pub const FEATURE_COUNT: usize = 28;

impl Feature {
    pub const ALL: [Feature; FEATURE_COUNT] = [
        Feature::Height,
        Feature::Age,
        Feature::RankPoints,
        Feature::AceVsDf,
        Feature::PastPer,
        Feature::Champ,
        Feature::WinRound,
        Feature::GamesPlayed,
        Feature::TourPer,
        Feature::HandPer,
        Feature::SurfacePer,
        Feature::OpponPer,
        Feature::FirstIn1stServe,
        Feature::FirstWonFirstIn,
        Feature::SecondWonSecondIn,
        Feature::BpSBpF,
        Feature::SurfaceHard,
        Feature::SurfaceClay,
        Feature::SurfaceGrass,
        Feature::SurfaceCarpet,
        Feature::RoundR128,
        Feature::RoundR64,
        Feature::RoundR32,
        Feature::RoundR16,
        Feature::RoundQF,
        Feature::RoundSF,
        Feature::RoundF,
        Feature::RoundRR,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Feature::Height => "w_height",
            Feature::Age => "w_age",
            Feature::RankPoints => "w_rank_points",
            Feature::AceVsDf => "AceVsDf",
            Feature::PastPer => "PastPer",
            Feature::Champ => "Champ",
            Feature::WinRound => "WinRound",
            Feature::GamesPlayed => "GamesPlayed",
            Feature::TourPer => "TourPer",
            Feature::HandPer => "HandPer",
            Feature::SurfacePer => "SurfacePer",
            Feature::OpponPer => "OpponPer",
            Feature::FirstIn1stServe => "FirstIn1stServe",
            Feature::FirstWonFirstIn => "FirstWonFirstIn",
            Feature::SecondWonSecondIn => "SecondWonSecondIn",
            Feature::BpSBpF => "BpSBpF",
            Feature::SurfaceHard => "surfaceHard",
            Feature::SurfaceClay => "surfaceClay",
            Feature::SurfaceGrass => "surfaceGrass",
            Feature::SurfaceCarpet => "surfaceCarpet",
            Feature::RoundR128 => "roundR128",
            Feature::RoundR64 => "roundR64",
            Feature::RoundR32 => "roundR32",
            Feature::RoundR16 => "roundR16",
            Feature::RoundQF => "roundQF",
            Feature::RoundSF => "roundSF",
            Feature::RoundF => "roundF",
            Feature::RoundRR => "roundRR",
        }
    }

    /// Case-insensitive lookup, so `RoundSF` and `roundSF` name the same column.
    pub fn from_name(name: &str) -> Option<Feature> {
        Feature::ALL.into_iter().find(|f| f.name().eq_ignore_ascii_case(name.trim()))
    }

    /// Proportions bounded to [0, 1] when defined.
    pub fn is_unit_ratio(self) -> bool {
        matches!(
            self,
            Feature::PastPer
                | Feature::WinRound
                | Feature::TourPer
                | Feature::HandPer
                | Feature::SurfacePer
                | Feature::OpponPer
                | Feature::FirstIn1stServe
                | Feature::FirstWonFirstIn
                | Feature::SecondWonSecondIn
                | Feature::BpSBpF
        )
    }

    /// Computed from the player's earlier matches (as opposed to the current row).
    pub fn is_history(self) -> bool {
        (Feature::AceVsDf.index()..=Feature::BpSBpF.index()).contains(&self.index())
    }

    pub fn surface_flag(s: Surface) -> Option<Feature> {
        match s {
            Surface::Hard => Some(Feature::SurfaceHard),
            Surface::Clay => Some(Feature::SurfaceClay),
            Surface::Grass => Some(Feature::SurfaceGrass),
            Surface::Carpet => Some(Feature::SurfaceCarpet),
            Surface::Unknown => None,
        }
    }

    pub fn round_flag(r: Round) -> Feature {
        match r {
            Round::R128 => Feature::RoundR128,
            Round::R64 => Feature::RoundR64,
            Round::R32 => Feature::RoundR32,
            Round::R16 => Feature::RoundR16,
            Round::QF => Feature::RoundQF,
            Round::SF => Feature::RoundSF,
            Round::F => Feature::RoundF,
            Round::RR => Feature::RoundRR,
        }
    }
}

pub fn feature_names() -> Vec<String> {
    Feature::ALL.iter().map(|f| f.name().to_string()).collect()
}

/// One player in one match.
#[derive(Debug, Clone, PartialEq)]
pub struct PlayerMatchEntry {
    pub match_idx: usize,
    pub side: Side,
    pub player: String,
    /// 1 if this player won.
    pub label: u8,
    /// Values in [`Feature::ALL`] order; NaN marks a missing value.
    pub features: [f64; FEATURE_COUNT],
    /// This player's bookmaker-averaged decimal odds.
    pub odds: Option<f64>,
}

impl PlayerMatchEntry {
    pub fn get(&self, f: Feature) -> f64 {
        self.features[f.index()]
    }

    pub fn missing_mask(&self) -> [bool; FEATURE_COUNT] {
        self.features.map(f64::is_nan)
    }
}

pub const RECENT: Window = Window::Months(12);

/// Σ num / Σ den over events where both counts are present; NaN for a zero denominator.
fn pooled_ratio<F>(matches: &[MergedMatch], events: &[HistoryEvent], pick: F) -> f64
where
    F: Fn(&PlayerLine) -> Option<(u32, u32)>,
{
    let (mut num, mut den) = (0u64, 0u64);
    for e in events {
        if let Some((n, d)) = pick(matches[e.match_idx].record.player(e.side)) {
            num += u64::from(n);
            den += u64::from(d);
        }
    }
    if den == 0 {
        f64::NAN
    } else {
        num as f64 / den as f64
    }
}

/// Win rate over the events accepted by `filter`; NaN if none qualify.
fn win_rate<F>(matches: &[MergedMatch], events: &[HistoryEvent], filter: F) -> f64
where
    F: Fn(&HistoryEvent, &MatchRecord) -> bool,
{
    let (mut won, mut played) = (0usize, 0usize);
    for e in events {
        if filter(e, &matches[e.match_idx].record) {
            played += 1;
            won += usize::from(e.won());
        }
    }
    if played == 0 {
        f64::NAN
    } else {
        won as f64 / played as f64
    }
}

fn both<A, B>(a: Option<A>, b: Option<B>) -> Option<(A, B)> {
    a.zip(b)
}

/// Features for the player on `side` of `matches[match_idx]`, from strictly earlier matches.
pub fn compute_entry(
    matches: &[MergedMatch],
    match_idx: usize,
    side: Side,
    history: &PlayerHistory,
) -> PlayerMatchEntry {
    let merged = &matches[match_idx];
    let m = &merged.record;
    let me = m.player(side);
    let opp = m.player(side.opposite());
    let opp_key = history.key(match_idx, side.opposite());

    let lifetime = history.window_events(&me.name, m.date, Window::Lifetime);
    let recent = history.window_events(&me.name, m.date, RECENT);

    let mut f = [f64::NAN; FEATURE_COUNT];
    let mut put = |feat: Feature, v: f64| f[feat.index()] = v;

    put(Feature::Height, me.height.unwrap_or(f64::NAN));
    put(Feature::Age, me.age.unwrap_or(f64::NAN));
    put(Feature::RankPoints, me.rank_points.map_or(f64::NAN, f64::from));

    put(Feature::AceVsDf, pooled_ratio(matches, recent, |p| both(p.aces, p.double_faults)));
    put(Feature::PastPer, win_rate(matches, recent, |_, _| true));
    if !lifetime.is_empty() {
        let finals_won = lifetime
            .iter()
            .filter(|e| e.won() && matches[e.match_idx].record.round == Round::F)
            .count();
        put(Feature::Champ, finals_won as f64);
        put(Feature::GamesPlayed, recent.len() as f64);
    }
    put(Feature::WinRound, win_rate(matches, lifetime, |_, r| r.round == m.round));
    if !m.tournament_id.is_empty() {
        put(Feature::TourPer, win_rate(matches, lifetime, |_, r| r.tournament_id == m.tournament_id));
    }
    let opp_hand = opp.hand();
    if opp_hand != Hand::U {
        put(
            Feature::HandPer,
            win_rate(matches, lifetime, |e, r| r.player(e.side.opposite()).hand() == opp_hand),
        );
    }
    if m.surface != Surface::Unknown {
        put(Feature::SurfacePer, win_rate(matches, lifetime, |_, r| r.surface == m.surface));
    }
    put(
        Feature::OpponPer,
        win_rate(matches, lifetime, |e, _| history.key(e.match_idx, e.side.opposite()) == opp_key),
    );

    put(Feature::FirstIn1stServe, pooled_ratio(matches, recent, |p| both(p.first_in, p.serve_points)));
    put(Feature::FirstWonFirstIn, pooled_ratio(matches, recent, |p| both(p.first_won, p.first_in)));
    put(
        Feature::SecondWonSecondIn,
        pooled_ratio(matches, recent, |p| match (p.second_won, p.serve_points, p.first_in) {
            (Some(w), Some(sp), Some(fi)) if fi <= sp => Some((w, sp - fi)),
            _ => None,
        }),
    );
    put(Feature::BpSBpF, pooled_ratio(matches, recent, |p| both(p.bp_saved, p.bp_faced)));

    if let Some(flag) = Feature::surface_flag(m.surface) {
        for s in Surface::KNOWN {
            let ff = Feature::surface_flag(s).expect("known surface");
            put(ff, if ff == flag { 1.0 } else { 0.0 });
        }
    }
    let round_flag = Feature::round_flag(m.round);
    for r in Round::ALL {
        let ff = Feature::round_flag(r);
        put(ff, if ff == round_flag { 1.0 } else { 0.0 });
    }

    PlayerMatchEntry {
        match_idx,
        side,
        player: me.name.clone(),
        label: u8::from(side == Side::Winner),
        features: f,
        odds: merged.odds_for(side),
    }
}
