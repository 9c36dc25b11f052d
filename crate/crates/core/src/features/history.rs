use std::collections::HashMap;

use chrono::{Months, NaiveDate};

use crate::ingest::{normalize_name, MergedMatch, Side};

/// One appearance of a player in a match.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HistoryEvent {
    pub date: NaiveDate,
    pub match_idx: usize,
    /// The side the player was on; `Side::Winner` means they won.
    pub side: Side,
}

impl HistoryEvent {
    pub fn won(&self) -> bool {
        self.side == Side::Winner
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Window {
    /// Events dated within the last `n` calendar months.
    Months(u32),
    Lifetime,
}

/// Per-player, date-ordered index of match appearances.
///
/// Players are keyed by [`normalize_name`]. Each player's events are sorted ascending
/// by date, with same-day events kept in input order.
#[derive(Debug, Clone, Default)]
pub struct PlayerHistory {
    events: HashMap<String, Vec<HistoryEvent>>,
    /// Normalized (winner, loser) names per match index.
    keys: Vec<(String, String)>,
}

impl PlayerHistory {
    pub fn build(matches: &[MergedMatch]) -> Self {
        let mut events: HashMap<String, Vec<HistoryEvent>> = HashMap::new();
        let mut keys = Vec::with_capacity(matches.len());
        for (idx, m) in matches.iter().enumerate() {
            let w = normalize_name(&m.record.winner.name);
            let l = normalize_name(&m.record.loser.name);
            for (name, side) in [(&w, Side::Winner), (&l, Side::Loser)] {
                events.entry(name.clone()).or_default().push(HistoryEvent {
                    date: m.record.date,
                    match_idx: idx,
                    side,
                });
            }
            keys.push((w, l));
        }
        for list in events.values_mut() {
            list.sort_by_key(|e| e.date);
        }
        Self { events, keys }
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn player_count(&self) -> usize {
        self.events.len()
    }

    pub fn events(&self, player: &str) -> &[HistoryEvent] {
        self.events.get(&normalize_name(player)).map_or(&[], Vec::as_slice)
    }

    /// Normalized name of the player on `side` of match `match_idx`.
    pub fn key(&self, match_idx: usize, side: Side) -> &str {
        let (w, l) = &self.keys[match_idx];
        match side {
            Side::Winner => w,
            Side::Loser => l,
        }
    }

    /// Events strictly before `as_of`, restricted to the window. Unknown players give
    /// an empty slice.
    pub fn window_events(&self, player: &str, as_of: NaiveDate, window: Window) -> &[HistoryEvent] {
        let list = self.events(player);
        let end = list.partition_point(|e| e.date < as_of);
        let start = match window {
            Window::Lifetime => 0,
            Window::Months(n) => match as_of.checked_sub_months(Months::new(n)) {
                Some(from) => list[..end].partition_point(|e| e.date < from),
                None => 0,
            },
        };
        &list[start..end]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{MatchRecord, PlayerLine, Round, Surface};

    fn day(y: i32, m: u32, d: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(y, m, d).unwrap()
    }

    fn mm(date: NaiveDate, w: &str, l: &str) -> MergedMatch {
        MergedMatch::unmatched(MatchRecord {
            tournament_id: "T".into(),
            date,
            surface: Surface::Hard,
            round: Round::R32,
            best_of: 3,
            winner: PlayerLine { name: w.into(), ..Default::default() },
            loser: PlayerLine { name: l.into(), ..Default::default() },
        })
    }

    #[test]
    fn one_match_two_players() {
        let h = PlayerHistory::build(&[mm(day(2010, 1, 1), "A", "B")]);
        assert_eq!(h.player_count(), 2);
        assert_eq!(h.events("A").len(), 1);
        assert!(h.events("A")[0].won());
        assert!(!h.events("b")[0].won());
    }

    #[test]
    fn events_sorted_by_date() {
        let h = PlayerHistory::build(&[
            mm(day(2010, 5, 1), "A", "B"),
            mm(day(2010, 1, 1), "C", "A"),
            mm(day(2010, 3, 1), "A", "D"),
        ]);
        let dates: Vec<_> = h.events("A").iter().map(|e| e.date).collect();
        assert_eq!(dates, vec![day(2010, 1, 1), day(2010, 3, 1), day(2010, 5, 1)]);
        let idx: Vec<_> = h.events("A").iter().map(|e| e.match_idx).collect();
        assert_eq!(idx, vec![1, 2, 0]);
    }

    #[test]
    fn empty_input() {
        assert!(PlayerHistory::build(&[]).is_empty());
    }

    #[test]
    fn twelve_month_window_boundaries() {
        let as_of = day(2012, 6, 15);
        let h = PlayerHistory::build(&[
            mm(day(2011, 5, 15), "A", "B"),
            mm(day(2012, 6, 14), "A", "C"),
            mm(as_of, "A", "D"),
        ]);
        let w = h.window_events("A", as_of, Window::Months(12));
        assert_eq!(w.len(), 1);
        assert_eq!(w[0].date, day(2012, 6, 14));
        assert_eq!(h.window_events("A", as_of, Window::Lifetime).len(), 2);
        // exactly twelve months back is inside the window
        let h2 = PlayerHistory::build(&[mm(day(2011, 6, 15), "A", "B")]);
        assert_eq!(h2.window_events("A", as_of, Window::Months(12)).len(), 1);
    }

    #[test]
    fn month_arithmetic_clamps() {
        let h = PlayerHistory::build(&[mm(day(2011, 2, 28), "A", "B"), mm(day(2011, 2, 27), "A", "C")]);
        let w = h.window_events("A", day(2012, 2, 29), Window::Months(12));
        assert_eq!(w.len(), 1);
    }

    #[test]
    fn cold_start_and_unknown_player() {
        let h = PlayerHistory::build(&[mm(day(2010, 1, 1), "A", "B")]);
        assert!(h.window_events("A", day(2010, 1, 1), Window::Lifetime).is_empty());
        assert!(h.window_events("Z", day(2011, 1, 1), Window::Lifetime).is_empty());
    }
}
