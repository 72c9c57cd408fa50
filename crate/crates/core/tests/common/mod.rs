#![allow(dead_code)]

use std::collections::BTreeSet;

use mazesynth::maze::{parse_labyrinth, Cell, Labyrinth, MazeFormat};
use mazesynth::typesys::{Ctor, Type};
use proptest::prelude::*;
use rand::Rng;

pub const FIG1: &str = "...\n.#S\n...\n#G#\n";

pub fn fig1() -> Labyrinth {
    parse_labyrinth(FIG1, MazeFormat::Ascii).unwrap()
}

/// A labyrinth of at most 5x5 with at most 6 blocked cells. Start and goal
/// are free but need not be connected.
pub fn random_labyrinth<R: Rng>(rng: &mut R) -> Labyrinth {
    let rows = rng.gen_range(1..=5);
    let cols = rng.gen_range(1..=5);
    let cells: Vec<Cell> = (0..rows).flat_map(|r| (0..cols).map(move |c| Cell(r, c))).collect();
    let start = cells[rng.gen_range(0..cells.len())];
    let goal = cells[rng.gen_range(0..cells.len())];
    let max_blocked = 6.min(cells.len().saturating_sub(2));
    let wanted = rng.gen_range(0..=max_blocked);
    let mut blocked = BTreeSet::new();
    while blocked.len() < wanted {
        let c = cells[rng.gen_range(0..cells.len())];
        if c != start && c != goal {
            blocked.insert(c);
        }
    }
    Labyrinth::new(rows, cols, blocked, start, goal).unwrap()
}

pub fn arb_labyrinth() -> impl Strategy<Value = Labyrinth> {
    any::<u64>().prop_map(|seed| {
        use rand::SeedableRng;
        random_labyrinth(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed))
    })
}

/// Random types over a small vocabulary so that subtyping relations occur.
pub fn arb_type(depth: u32) -> impl Strategy<Value = Type> {
    let leaf = prop_oneof![
        4 => prop::sample::select(vec!["A", "B", "C"]).prop_map(Type::atom),
        2 => (0i64..2, 0i64..2).prop_map(|(r, c)| Type::Constructor(Ctor::new("Pos", vec![r, c]))),
        1 => Just(Type::Top),
    ];
    leaf.prop_recursive(depth, 24, 3, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Type::Arrow(Box::new(a), Box::new(b))),
            prop::collection::vec(inner, 2..=3).prop_map(Type::Intersection),
        ]
    })
}

pub mod lab {
    use std::path::PathBuf;

    use mazesynth::bridge::*;
    use mazesynth::maze::{Cell, Move, MovementPlan};

    pub fn fixture_path(name: &str) -> PathBuf {
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
    }

    /// Compares against a checked-in fixture; `UPDATE_SNAPSHOTS=1` rewrites it.
    pub fn check_snapshot(name: &str, actual: &str) -> Result<(), String> {
        let path = fixture_path(name);
        if std::env::var_os("UPDATE_SNAPSHOTS").is_some() {
            std::fs::create_dir_all(path.parent().unwrap()).unwrap();
            std::fs::write(&path, actual).unwrap();
        }
        let expected = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
        if expected == actual {
            Ok(())
        } else {
            Err(format!("{} differs from the fixture:\n{actual}", path.display()))
        }
    }

    pub fn fig1_maze_set() -> String {
        r#"{"topic":"lab/maze/set","payload":{"rows":4,"cols":3,"blocked":[[1,1],[3,0],[3,2]],"start":[1,2],"goal":[3,1]}}"#
            .to_string()
    }

    pub fn execute(moves: &[&str]) -> String {
        let moves: Vec<String> = moves.iter().map(|m| format!("\"{m}\"")).collect();
        format!(
            r#"{{"topic":"lab/robot/execute","payload":{{"robot":"r1","moves":[{}],"tickMs":100}}}}"#,
            moves.join(",")
        )
    }

    /// The scripted session behind the transcript fixture: synthesis, a
    /// completed run, a run broken by an injected obstacle and a run of an
    /// invalid plan, plus the error replies along the way.
    pub fn scripted_transcript() -> String {
        let bus = Bus::new();
        let transcript = Transcript::attach(&bus);
        let service = Service::start(&bus, Clock::Manual);
        let send = |line: &str| {
            service.submit_line(line);
            service.settle();
        };
        let ticks = |n: usize| {
            for _ in 0..n {
                service.tick();
            }
            service.settle();
        };

        send(r#"{"topic":"lab/synth/request","payload":{"id":"early","maxSolutions":10,"constraints":["simplePath"]}}"#);
        send("{not json");
        send(&fig1_maze_set());
        send(r#"{"topic":"lab/synth/request","payload":{"id":"fig1","maxSolutions":10,"constraints":["simplePath"]}}"#);

        send(&execute(&["down", "left", "down"]));
        ticks(4);

        send(&fig1_maze_set());
        send(&execute(&["down", "left", "down"]));
        ticks(1);
        send(r#"{"topic":"lab/world/obstacle","payload":{"cell":[2,2],"blocked":true}}"#);
        send(r#"{"topic":"lab/world/obstacle","payload":{"cell":[2,1],"blocked":true}}"#);
        ticks(1);

        send(&fig1_maze_set());
        send(&execute(&["left"]));
        ticks(1);

        service.shutdown();
        transcript.text()
    }

    /// The world after the short plan through the reference labyrinth has run to the goal.
    pub fn fig1_end_state() -> SimState {
        let lab = super::fig1();
        let mut state = SimState::new(lab.clone());
        let plan = MovementPlan::from_moves(&lab, lab.start(), &[Move::Down, Move::Left, Move::Down]).unwrap();
        execute_plan(&mut state, DEFAULT_ROBOT, &plan).unwrap();
        assert_eq!(state.robots[DEFAULT_ROBOT].cell, Cell(3, 1));
        state
    }

    /// Reads `<polyline>` elements back into (color, points).
    pub fn parse_svg_polylines(svg: &str) -> Vec<Polyline> {
        let re = regex::Regex::new(r#"<polyline points="([^"]*)" stroke="(#[0-9A-F]{6})"[^>]*fill="none"/>"#).unwrap();
        re.captures_iter(svg)
            .map(|c| Polyline {
                color: c[2].to_string(),
                points: c[1]
                    .split(' ')
                    .filter(|s| !s.is_empty())
                    .map(|xy| {
                        let (x, y) = xy.split_once(',').unwrap();
                        [x.parse().unwrap(), y.parse().unwrap()]
                    })
                    .collect(),
            })
            .collect()
    }
}
