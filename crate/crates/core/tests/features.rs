mod support;

use chrono::NaiveDate;
use support::feature_oracle::{oracle_features, same};
use tennis_core::features::{
    assemble_dataset, compute_entry, featurize, Feature, PlayerHistory, FEATURE_COUNT,
};
use tennis_core::ingest::{Hand, MatchRecord, MergedMatch, PlayerLine, Round, Side, Surface};
use tennis_core::synthetic::{generate, SyntheticConfig};

fn day(y: i32, m: u32, d: u32) -> NaiveDate {
    NaiveDate::from_ymd_opt(y, m, d).unwrap()
}

fn line(name: &str) -> PlayerLine {
    PlayerLine { name: name.into(), hand: Some(Hand::R), ..Default::default() }
}

fn mm(date: NaiveDate, w: PlayerLine, l: PlayerLine, round: Round) -> MergedMatch {
    MergedMatch::unmatched(MatchRecord {
        tournament_id: "Open".into(),
        date,
        surface: Surface::Clay,
        round,
        best_of: 3,
        winner: w,
        loser: l,
    })
}

#[test]
fn ace_ratio_over_recent_window() {
    let mut a1 = line("A");
    a1.aces = Some(25);
    a1.double_faults = Some(4);
    let mut a2 = line("A");
    a2.aces = Some(15);
    a2.double_faults = Some(6);
    let mut old = line("A");
    old.aces = Some(100);
    old.double_faults = Some(1);
    let ms = vec![
        mm(day(2009, 1, 1), old, line("X"), Round::R32),
        mm(day(2010, 3, 1), a1, line("B"), Round::R32),
        mm(day(2010, 5, 1), line("C"), a2, Round::R32),
        mm(day(2010, 6, 1), line("A"), line("D"), Round::QF),
    ];
    let h = PlayerHistory::build(&ms);
    let e = compute_entry(&ms, 3, Side::Winner, &h);
    assert_eq!(e.get(Feature::AceVsDf), 4.0);
    assert_eq!(e.get(Feature::PastPer), 0.5);
    assert_eq!(e.get(Feature::GamesPlayed), 2.0);
}

#[test]
fn first_serve_in_ratio() {
    let mut a = line("A");
    a.first_in = Some(300);
    a.serve_points = Some(500);
    let ms = vec![
        mm(day(2010, 3, 1), a, line("B"), Round::R32),
        mm(day(2010, 4, 1), line("A"), line("C"), Round::R16),
    ];
    let e = compute_entry(&ms, 1, Side::Winner, &PlayerHistory::build(&ms));
    assert_eq!(e.get(Feature::FirstIn1stServe), 0.6);
}

#[test]
fn debut_player_has_only_row_and_flag_features() {
    let mut a = line("A");
    a.height = Some(190.0);
    let ms = vec![mm(day(2010, 3, 1), a, line("B"), Round::SF)];
    let e = compute_entry(&ms, 0, Side::Winner, &PlayerHistory::build(&ms));
    for f in Feature::ALL {
        if f.is_history() {
            assert!(e.get(f).is_nan(), "{} should be missing", f.name());
        }
    }
    assert_eq!(e.get(Feature::Height), 190.0);
    assert_eq!(e.get(Feature::SurfaceClay), 1.0);
    assert_eq!(e.get(Feature::SurfaceHard), 0.0);
    assert_eq!(e.get(Feature::RoundSF), 1.0);
    assert_eq!(e.get(Feature::RoundF), 0.0);
    assert_eq!(e.label, 1);
}

#[test]
fn lifetime_record_features() {
    let ms = vec![
        mm(day(2008, 1, 1), line("A"), line("B"), Round::F),
        mm(day(2008, 2, 1), line("B"), line("A"), Round::F),
        mm(day(2009, 1, 1), line("A"), line("C"), Round::F),
        mm(day(2012, 1, 1), line("A"), line("B"), Round::F),
    ];
    let e = compute_entry(&ms, 3, Side::Winner, &PlayerHistory::build(&ms));
    assert_eq!(e.get(Feature::Champ), 2.0);
    assert_eq!(e.get(Feature::WinRound), 2.0 / 3.0);
    assert_eq!(e.get(Feature::OpponPer), 0.5);
    assert_eq!(e.get(Feature::TourPer), 2.0 / 3.0);
    assert_eq!(e.get(Feature::SurfacePer), 2.0 / 3.0);
    // nothing inside the last twelve months
    assert_eq!(e.get(Feature::GamesPlayed), 0.0);
    assert!(e.get(Feature::PastPer).is_nan());
}

#[test]
fn three_matches_six_balanced_entries() {
    let ms = vec![
        mm(day(2010, 1, 1), line("A"), line("B"), Round::R32),
        mm(day(2010, 1, 2), line("C"), line("D"), Round::R32),
        mm(day(2010, 1, 3), line("A"), line("C"), Round::R16),
    ];
    let ds = featurize(&ms);
    assert_eq!(ds.len(), 6);
    assert_eq!(ds.labels.iter().map(|&l| u32::from(l)).sum::<u32>(), 3);
    assert_eq!(ds.matrix.n_cols(), FEATURE_COUNT);
}

#[test]
fn shared_player_history_flows_forward() {
    let ms = vec![
        mm(day(2010, 1, 1), line("A"), line("B"), Round::R32),
        mm(day(2010, 2, 1), line("C"), line("A"), Round::R32),
    ];
    let ds = featurize(&ms);
    let past = ds.feature_index("PastPer").unwrap();
    // entry 3 is A (loser) in the second match; A won their only prior match
    assert_eq!(ds.entries[3].player, "A");
    assert_eq!(ds.matrix.get(3, past), 1.0);
    assert!(ds.matrix.get(0, past).is_nan());
}

#[test]
fn unknown_surface_leaves_flags_missing() {
    let mut m = mm(day(2010, 1, 1), line("A"), line("B"), Round::R32);
    m.record.surface = Surface::Unknown;
    let e = compute_entry(&[m.clone()], 0, Side::Loser, &PlayerHistory::build(&[m]));
    assert!(e.get(Feature::SurfaceHard).is_nan());
    assert_eq!(e.get(Feature::RoundR32), 1.0);
    assert_eq!(e.label, 0);
}

#[test]
fn matches_oracle_on_small_random_fixtures() {
    for seed in 0..40 {
        let corpus = generate(&SyntheticConfig::small(seed, 50));
        let ms: Vec<MergedMatch> = corpus.matches.into_iter().map(MergedMatch::unmatched).collect();
        let ds = featurize(&ms);
        for (i, e) in ds.entries.iter().enumerate() {
            let side = if ds.labels[i] == 1 { Side::Winner } else { Side::Loser };
            let want = oracle_features(&ms, e.match_id, side);
            for (j, f) in Feature::ALL.iter().enumerate() {
                assert!(
                    same(ds.matrix.get(i, j), want[j]),
                    "seed {seed} entry {i} {}: {} vs oracle {}",
                    f.name(),
                    ds.matrix.get(i, j),
                    want[j]
                );
            }
        }
    }
}

#[test]
fn value_ranges_and_one_hot() {
    let c = generate(&SyntheticConfig { n_tournaments: 60, ..Default::default() });
    let ms: Vec<MergedMatch> = c.matches.into_iter().map(MergedMatch::unmatched).collect();
    let ds = featurize(&ms);
    let mean = ds.labels.iter().map(|&l| f64::from(l)).sum::<f64>() / ds.len() as f64;
    assert_eq!(mean, 0.5);
    for i in 0..ds.len() {
        let row = ds.matrix.row(i);
        for f in Feature::ALL {
            let v = row[f.index()];
            if v.is_nan() {
                continue;
            }
            if f.is_unit_ratio() {
                assert!((0.0..=1.0).contains(&v), "{} = {v}", f.name());
            }
            if f == Feature::AceVsDf {
                assert!(v >= 0.0);
            }
        }
        let surf: f64 = [Feature::SurfaceHard, Feature::SurfaceClay, Feature::SurfaceGrass, Feature::SurfaceCarpet]
            .iter()
            .map(|f| row[f.index()])
            .sum();
        assert_eq!(surf, 1.0);
        let rounds: f64 = (Feature::RoundR128.index()..=Feature::RoundRR.index()).map(|j| row[j]).sum();
        assert_eq!(rounds, 1.0);
    }
}

#[test]
fn deterministic_and_csv_round_trip() {
    let c = generate(&SyntheticConfig { n_tournaments: 30, odds_fraction: 0.5, ..Default::default() });
    let (ms, _) = tennis_core::ingest::merge_odds(c.matches, &c.odds);
    let h = PlayerHistory::build(&ms);
    let a = assemble_dataset(&ms, &h);
    let b = assemble_dataset(&ms, &h);
    assert_eq!(a.matrix.as_slice().iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
               b.matrix.as_slice().iter().map(|v| v.to_bits()).collect::<Vec<_>>());
    let mut buf = Vec::new();
    a.write_csv(&mut buf).unwrap();
    let back = tennis_core::features::Dataset::read_csv(buf.as_slice()).unwrap();
    assert_eq!(back.entries, a.entries);
    assert_eq!(back.labels, a.labels);
    for (x, y) in back.matrix.as_slice().iter().zip(a.matrix.as_slice()) {
        assert!(same(*x, *y));
    }
    let pairs = a.odds_pairs();
    assert!(pairs.iter().any(Option::is_some));
    assert_eq!(pairs[0].map(|(o, p)| (p, o)), pairs[1]);
}

#[test]
fn deleting_future_matches_changes_nothing() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);
    let mut checked = 0;
    for seed in 0..20 {
        let c = generate(&SyntheticConfig { seed, n_players: 30, n_tournaments: 40, ..Default::default() });
        let ms: Vec<MergedMatch> = c.matches.into_iter().map(MergedMatch::unmatched).collect();
        let h = PlayerHistory::build(&ms);
        for _ in 0..50 {
            let k = rng.gen_range(0..ms.len());
            let side = if rng.gen() { Side::Winner } else { Side::Loser };
            let full = compute_entry(&ms, k, side, &h);
            let date = ms[k].record.date;
            let mut past: Vec<MergedMatch> = ms.iter().filter(|m| m.record.date < date).cloned().collect();
            past.push(ms[k].clone());
            let cut = compute_entry(&past, past.len() - 1, side, &PlayerHistory::build(&past));
            for f in Feature::ALL {
                assert!(same(full.get(f), cut.get(f)), "seed {seed} match {k} {}", f.name());
            }
            checked += 1;
        }
    }
    assert_eq!(checked, 1_000);
}
