mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::io::{BufRead, BufReader, Write};
use std::net::TcpStream;
use std::time::Duration;

use common::fig1;
use common::lab::*;
use mazesynth::bridge::*;
use mazesynth::maze::{Cell, Move};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn envelopes(text: &str) -> Vec<Envelope> {
    text.lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

#[test]
fn transcript_matches_fixture() {
    let first = scripted_transcript();
    let second = scripted_transcript();
    assert_eq!(first, second, "transcript is not deterministic");
    check_snapshot("transcript.ndjson", &first).unwrap();
}

#[test]
fn transcript_contents() {
    let envs = envelopes(&scripted_transcript());
    for e in &envs {
        validate(e).unwrap_or_else(|r| panic!("{}: {r}", e.to_line()));
    }
    let errors: Vec<&str> = envs
        .iter()
        .filter(|e| e.topic == ERROR)
        .map(|e| e.payload["reason"].as_str().unwrap())
        .collect();
    assert_eq!(errors.len(), 3);
    assert_eq!(errors[0], "no labyrinth loaded");
    assert!(errors[1].starts_with("malformed envelope"));
    assert!(errors[2].contains("occupied"));

    let synth: Vec<&Envelope> = envs.iter().filter(|e| e.topic.starts_with("lab/synth/") && e.topic != SYNTH_REQUEST).collect();
    assert_eq!(synth.len(), 3);
    assert_eq!(synth[0].payload["moves"], serde_json::json!(["down", "left", "down"]));
    assert_eq!(synth[0].payload["cells"], serde_json::json!([[1, 2], [2, 2], [2, 1], [3, 1]]));
    assert_eq!(synth[1].payload["moves"].as_array().unwrap().len(), 7);
    assert_eq!(synth[2].payload, serde_json::json!({"id": "fig1", "count": 2, "exhaustive": true}));

    let halts: Vec<(String, String)> = envs
        .iter()
        .filter(|e| e.topic == ROBOT_HALT)
        .map(|e| (e.payload["cause"].as_str().unwrap().to_string(), e.payload["cell"].to_string()))
        .collect();
    assert_eq!(
        halts,
        vec![
            ("planComplete".to_string(), "[3,1]".to_string()),
            ("worldFailure".to_string(), "[2,2]".to_string()),
            ("specError".to_string(), "[1,2]".to_string()),
        ]
    );
    let first_run: Vec<String> = envs
        .iter()
        .filter(|e| e.topic == ROBOT_POSITION)
        .take(3)
        .map(|e| e.payload["cell"].to_string())
        .collect();
    assert_eq!(first_run, vec!["[2,2]", "[2,1]", "[3,1]"]);
}

#[test]
fn ticks_increase_per_robot() {
    let envs = envelopes(&scripted_transcript());
    let mut last: BTreeMap<String, u64> = BTreeMap::new();
    for e in envs.iter().filter(|e| e.topic == ROBOT_POSITION) {
        let robot = e.payload["robot"].as_str().unwrap().to_string();
        let t = e.payload["t"].as_u64().unwrap();
        if let Some(prev) = last.insert(robot, t) {
            assert!(t > prev);
        }
    }
    let frames: Vec<u64> = envs
        .iter()
        .filter(|e| e.topic == LASER_FRAME)
        .map(|e| e.payload["frame"].as_u64().unwrap())
        .collect();
    assert!(frames.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn invalid_maze_is_reported() {
    let bus = Bus::new();
    let t = Transcript::attach(&bus);
    let service = Service::start(&bus, Clock::Manual);
    service.submit_line(
        r#"{"topic":"lab/maze/set","payload":{"rows":4,"cols":3,"blocked":[[3,1]],"start":[1,2],"goal":[3,1]}}"#,
    );
    service.settle();
    service.submit_line(r#"{"topic":"lab/maze/set","payload":{"rows":4}}"#);
    service.settle();
    let envs = envelopes(&t.text());
    let reasons: Vec<&str> = envs
        .iter()
        .filter(|e| e.topic == ERROR)
        .map(|e| e.payload["reason"].as_str().unwrap())
        .collect();
    assert_eq!(reasons.len(), 2);
    assert!(reasons[0].contains("goal (3,1) is blocked"), "{}", reasons[0]);
    assert!(reasons[1].starts_with("invalid lab/maze/set payload"));
}

#[test]
fn warnings_precede_solutions() {
    let bus = Bus::new();
    let t = Transcript::attach(&bus);
    let service = Service::start(&bus, Clock::Manual);
    service.submit_line(
        r#"{"topic":"lab/maze/set","payload":{"rows":1,"cols":3,"blocked":[],"start":[0,0],"goal":[0,2]}}"#,
    );
    service.submit_line(r#"{"topic":"lab/synth/request","payload":{"id":"row","maxSolutions":5,"maxDepth":4,"constraints":[]}}"#);
    service.settle();
    let topics: Vec<String> = envelopes(&t.text())
        .into_iter()
        .map(|e| e.topic)
        .filter(|t| t.starts_with("lab/synth/") && t != SYNTH_REQUEST)
        .collect();
    assert_eq!(
        topics,
        // walks of 2 and 4 moves: right;right, then two with one back-step
        vec![SYNTH_WARNING, SYNTH_WARNING, SYNTH_SOLUTION, SYNTH_SOLUTION, SYNTH_SOLUTION, SYNTH_DONE]
    );
}

#[test]
fn realtime_clock_runs_plans() {
    let bus = Bus::new();
    let t = Transcript::attach(&bus);
    let service = Service::start(&bus, Clock::Realtime);
    service.submit_line(&fig1_maze_set());
    service.submit_line(&execute(&["down", "left", "down"]).replace("100", "5"));
    service.wait_idle();
    let envs = envelopes(&t.text());
    let halt = envs.iter().find(|e| e.topic == ROBOT_HALT).unwrap();
    assert_eq!(halt.payload["cause"], "planComplete");
    assert_eq!(envs.iter().filter(|e| e.topic == ROBOT_POSITION).count(), 3);
}

#[test]
fn end_state_svg_snapshot() {
    let frame = render_frame(&fig1_end_state());
    assert_eq!(frame.frame, 3);
    let colors: Vec<&str> = frame.polylines.iter().map(|p| p.color.as_str()).collect();
    assert_eq!(
        colors,
        vec![GRID_COLOR, BLOCKED_COLOR, BLOCKED_COLOR, BLOCKED_COLOR, GOAL_COLOR, ROBOT_COLOR]
    );
    let robot = frame.polylines.last().unwrap();
    assert_eq!(robot.points[0], [1.2, 3.2]);
    assert_eq!(robot.points[2], [1.8, 3.8]);
    let svg = frame_to_svg(&frame);
    assert!(svg.contains(r#"viewBox="0 0 3 4""#));
    check_snapshot("fig1_end_state.svg", &svg).unwrap();
}

#[test]
fn svg_round_trips() {
    let frame = render_frame(&fig1_end_state());
    let parsed = parse_svg_polylines(&frame_to_svg(&frame));
    assert_eq!(parsed, frame.polylines);
    let empty = Frame {
        frame: 0,
        polylines: Vec::new(),
    };
    assert!(parse_svg_polylines(&frame_to_svg(&empty)).is_empty());
}

/// Two frames agree except for one robot square moved by `delta` (dx, dy).
pub fn differs_by_robot_translation(a: &Frame, b: &Frame, delta: (f64, f64)) -> bool {
    if a.polylines.len() != b.polylines.len() {
        return false;
    }
    let mut moved = 0;
    for (p, q) in a.polylines.iter().zip(&b.polylines) {
        if p == q {
            continue;
        }
        let shifted = p.color == ROBOT_COLOR
            && q.color == ROBOT_COLOR
            && p.points.len() == q.points.len()
            && p.points.iter().zip(&q.points).all(|(u, v)| {
                (u[0] + delta.0 - v[0]).abs() < 1e-9 && (u[1] + delta.1 - v[1]).abs() < 1e-9
            });
        if !shifted {
            return false;
        }
        moved += 1;
    }
    moved == 1
}

#[test]
fn consecutive_frames_translate_the_robot() {
    let lab = fig1();
    let mut state = SimState::new(lab);
    let moves = [Move::Up, Move::Left, Move::Left, Move::Down, Move::Down, Move::Right, Move::Down];
    state.execute(DEFAULT_ROBOT, &moves, 1).unwrap();
    let mut prev = render_frame(&state);
    for mv in moves {
        state.step();
        let next = render_frame(&state);
        let (dr, dc) = mv.delta();
        assert!(differs_by_robot_translation(&prev, &next, (dc as f64, dr as f64)), "{mv}");
        assert_eq!(next.frame, prev.frame + 1);
        prev = next;
    }
    assert_eq!(state.robots[DEFAULT_ROBOT].cell, Cell(3, 1));
}

#[test]
fn random_commands_keep_robots_safe() {
    let lab = fig1();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..200 {
        let mut state = SimState::new(lab.clone());
        let mut injected = false;
        let mut last_t = 0;
        for _ in 0..30 {
            let out = match rng.gen_range(0..4) {
                0 => {
                    let moves: Vec<Move> = (0..rng.gen_range(0..6)).map(|_| Move::ALL[rng.gen_range(0..4)]).collect();
                    state.execute(DEFAULT_ROBOT, &moves, 1).unwrap()
                }
                1 => {
                    let cell = Cell(rng.gen_range(0..5), rng.gen_range(0..4));
                    let blocked = rng.gen_bool(0.7);
                    match state.set_obstacle(cell, blocked) {
                        Ok(out) => {
                            injected |= blocked;
                            out
                        }
                        Err(_) => Vec::new(),
                    }
                }
                _ => state.step(),
            };
            for e in &out {
                validate(e).unwrap();
                if e.topic == ROBOT_POSITION {
                    let t = e.payload["t"].as_u64().unwrap();
                    assert!(t > last_t);
                    last_t = t;
                }
                if e.topic == ROBOT_HALT && e.payload["cause"] == "worldFailure" {
                    assert!(injected);
                }
            }
            let cell = state.robots[DEFAULT_ROBOT].cell;
            assert!(lab.is_free(cell));
            assert!(!state.world_blocked.contains(&cell));
        }
    }
}

#[test]
fn random_sessions_publish_valid_envelopes() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let bus = Bus::new();
    let t = Transcript::attach(&bus);
    let service = Service::start(&bus, Clock::Manual);
    let mut lines = vec![fig1_maze_set()];
    for i in 0..60 {
        lines.push(match rng.gen_range(0..5) {
            0 => format!(
                r#"{{"topic":"lab/synth/request","payload":{{"id":"q{i}","maxSolutions":{},"maxDepth":{},"constraints":["noImmediateReversal"]}}}}"#,
                rng.gen_range(1..4),
                rng.gen_range(1..8)
            ),
            1 => execute(&["down", "left", "up", "right", "down"][..rng.gen_range(0..5)]),
            2 => format!(
                r#"{{"topic":"lab/world/obstacle","payload":{{"cell":[{},{}],"blocked":{}}}}}"#,
                rng.gen_range(0..4),
                rng.gen_range(0..3),
                rng.gen_bool(0.5)
            ),
            3 => "garbage".to_string(),
            _ => String::new(),
        });
    }
    for line in &lines {
        if line.is_empty() {
            service.tick();
        } else {
            service.submit_line(line);
        }
    }
    service.settle();
    service.shutdown();
    let envs = envelopes(&t.text());
    assert!(envs.len() > lines.len());
    for e in &envs {
        validate(e).unwrap_or_else(|r| panic!("{}: {r}", e.to_line()));
    }
}

#[test]
fn tcp_transport_round_trip() {
    let bus = Bus::new();
    let service = Service::start(&bus, Clock::Manual);
    let server = TcpServer::bind("127.0.0.1:0", &bus).unwrap().spawn().unwrap();
    let addr = server.local_addr();
    assert!(TcpServer::bind(addr, &bus).is_err(), "port should be taken");

    let mut stream = TcpStream::connect(addr).unwrap();
    stream.set_read_timeout(Some(Duration::from_secs(10))).unwrap();
    let mut reader = BufReader::new(stream.try_clone().unwrap());
    let mut read_until = |topic: &str| -> Vec<Envelope> {
        let mut got = Vec::new();
        loop {
            let mut line = String::new();
            assert!(reader.read_line(&mut line).unwrap() > 0, "connection closed");
            let env: Envelope = serde_json::from_str(&line).unwrap();
            let done = env.topic == topic;
            got.push(env);
            if done {
                return got;
            }
        }
    };

    writeln!(stream, "oops").unwrap();
    let got = read_until(ERROR);
    assert_eq!(got.len(), 1);

    writeln!(stream, "{}", fig1_maze_set()).unwrap();
    writeln!(
        stream,
        r#"{{"topic":"lab/synth/request","payload":{{"id":"tcp","maxSolutions":10,"constraints":["simplePath"]}}}}"#
    )
    .unwrap();
    let got = read_until(SYNTH_DONE);
    let topics: BTreeSet<&str> = got.iter().map(|e| e.topic.as_str()).collect();
    assert!(topics.contains(MAZE_SET) && topics.contains(LASER_FRAME) && topics.contains(SYNTH_SOLUTION));
    assert_eq!(got.last().unwrap().payload["count"], 2);

    drop(stream);
    server.shutdown();
    service.shutdown();
}

#[test]
fn stdio_transport_echoes_ndjson() {
    let bus = Bus::new();
    let service = Service::start(&bus, Clock::Manual);
    let out = SharedBuf::default();
    let input = format!("{}\n\nbad\n", fig1_maze_set());
    serve_stdio(&service, input.as_bytes(), out.clone()).unwrap();
    let text = String::from_utf8(out.0.lock().unwrap().clone()).unwrap();
    let topics: Vec<String> = envelopes(&text).into_iter().map(|e| e.topic).collect();
    assert_eq!(topics, vec![MAZE_SET, LASER_FRAME, ERROR]);
}

#[derive(Clone, Default)]
struct SharedBuf(std::sync::Arc<std::sync::Mutex<Vec<u8>>>);

impl Write for SharedBuf {
    fn write(&mut self, buf: &[u8]) -> std::io::Result<usize> {
        self.0.lock().unwrap().extend_from_slice(buf);
        Ok(buf.len())
    }

    fn flush(&mut self) -> std::io::Result<()> {
        Ok(())
    }
}
