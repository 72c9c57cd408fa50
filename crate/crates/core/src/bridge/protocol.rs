use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::maze::{Cell, Constraint, MazeSpec, Move};

pub const MAZE_SET: &str = "lab/maze/set";
pub const SYNTH_REQUEST: &str = "lab/synth/request";
pub const SYNTH_SOLUTION: &str = "lab/synth/solution";
pub const SYNTH_DONE: &str = "lab/synth/done";
pub const SYNTH_WARNING: &str = "lab/synth/warning";
pub const ROBOT_EXECUTE: &str = "lab/robot/execute";
pub const ROBOT_POSITION: &str = "lab/robot/position";
pub const ROBOT_HALT: &str = "lab/robot/halt";
pub const WORLD_OBSTACLE: &str = "lab/world/obstacle";
pub const LASER_FRAME: &str = "lab/laser/frame";
pub const ERROR: &str = "lab/error";

/// Topics clients may publish.
pub const COMMAND_TOPICS: [&str; 4] = [MAZE_SET, SYNTH_REQUEST, ROBOT_EXECUTE, WORLD_OBSTACLE];

/// One wire message, serialized as `{"topic": .., "payload": {..}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Envelope {
    pub topic: String,
    pub payload: Value,
}

impl Envelope {
    pub fn new<P: Serialize>(topic: &str, payload: &P) -> Self {
        Envelope {
            topic: topic.to_string(),
            payload: serde_json::to_value(payload).expect("payload types serialize to JSON objects"),
        }
    }

    pub fn error(reason: impl Into<String>) -> Self {
        Envelope::new(ERROR, &LabError { reason: reason.into() })
    }

    /// Single-line JSON, as sent over NDJSON transports.
    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("envelopes always serialize")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct SynthRequest {
    pub id: String,
    pub max_solutions: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_depth: Option<usize>,
    pub constraints: Vec<Constraint>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthSolution {
    pub id: String,
    pub index: usize,
    pub term: String,
    pub moves: Vec<Move>,
    pub cells: Vec<Cell>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthDone {
    pub id: String,
    pub count: usize,
    pub exhaustive: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthWarning {
    pub id: String,
    pub kind: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct RobotExecute {
    pub robot: String,
    pub moves: Vec<Move>,
    pub tick_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RobotPosition {
    pub robot: String,
    pub cell: Cell,
    pub t: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum HaltCause {
    PlanComplete,
    /// The world changed after synthesis (an injected obstacle).
    WorldFailure,
    /// The plan is invalid against the maze it was synthesized for.
    SpecError,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RobotHalt {
    pub robot: String,
    pub cause: HaltCause,
    pub cell: Cell,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorldObstacle {
    pub cell: Cell,
    pub blocked: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabError {
    pub reason: String,
}

/// A validated client command.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Command {
    MazeSet(MazeSpec),
    SynthRequest(SynthRequest),
    RobotExecute(RobotExecute),
    WorldObstacle(WorldObstacle),
}

fn payload<T: DeserializeOwned>(env: &Envelope) -> Result<T, String> {
    if !env.payload.is_object() {
        return Err(format!("payload of {} must be a JSON object", env.topic));
    }
    T::deserialize(&env.payload).map_err(|e| format!("invalid {} payload: {e}", env.topic))
}

impl Command {
    /// Checks topic and payload schema. Maze geometry is validated later.
    pub fn from_envelope(env: &Envelope) -> Result<Command, String> {
        let cmd = match env.topic.as_str() {
            MAZE_SET => Command::MazeSet(payload(env)?),
            SYNTH_REQUEST => {
                let req: SynthRequest = payload(env)?;
                if req.max_solutions == 0 {
                    return Err("maxSolutions must be positive".into());
                }
                if req.max_depth == Some(0) {
                    return Err("maxDepth must be positive".into());
                }
                Command::SynthRequest(req)
            }
            ROBOT_EXECUTE => Command::RobotExecute(payload(env)?),
            WORLD_OBSTACLE => Command::WorldObstacle(payload(env)?),
            other if is_lab_topic(other) => return Err(format!("topic {other} is not accepted from clients")),
            other => return Err(format!("unknown topic `{other}`")),
        };
        Ok(cmd)
    }

    pub fn topic(&self) -> &'static str {
        match self {
            Command::MazeSet(_) => MAZE_SET,
            Command::SynthRequest(_) => SYNTH_REQUEST,
            Command::RobotExecute(_) => ROBOT_EXECUTE,
            Command::WorldObstacle(_) => WORLD_OBSTACLE,
        }
    }

    pub fn to_envelope(&self) -> Envelope {
        match self {
            Command::MazeSet(p) => Envelope::new(MAZE_SET, p),
            Command::SynthRequest(p) => Envelope::new(SYNTH_REQUEST, p),
            Command::RobotExecute(p) => Envelope::new(ROBOT_EXECUTE, p),
            Command::WorldObstacle(p) => Envelope::new(WORLD_OBSTACLE, p),
        }
    }
}

/// `lab/(maze|synth|robot|world|laser)/<name>` or `lab/error`.
pub fn is_lab_topic(topic: &str) -> bool {
    if topic == ERROR {
        return true;
    }
    let mut parts = topic.split('/');
    matches!(
        (parts.next(), parts.next(), parts.next(), parts.next()),
        (Some("lab"), Some("maze" | "synth" | "robot" | "world" | "laser"), Some(name), None) if !name.is_empty()
    )
}

/// Parses one NDJSON line into a command.
pub fn parse_line(line: &str) -> Result<Command, String> {
    let env: Envelope = serde_json::from_str(line).map_err(|e| format!("malformed envelope: {e}"))?;
    Command::from_envelope(&env)
}

/// Checks a published envelope against its topic's schema.
pub fn validate(env: &Envelope) -> Result<(), String> {
    fn check<T: DeserializeOwned>(env: &Envelope) -> Result<(), String> {
        payload::<T>(env).map(drop)
    }
    match env.topic.as_str() {
        SYNTH_SOLUTION => check::<SynthSolution>(env),
        SYNTH_DONE => check::<SynthDone>(env),
        SYNTH_WARNING => {
            let w: SynthWarning = payload(env)?;
            match w.kind.as_str() {
                "unusedCombinator" | "uninhabited" => Ok(()),
                k => Err(format!("unknown warning kind `{k}`")),
            }
        }
        ROBOT_POSITION => check::<RobotPosition>(env),
        ROBOT_HALT => check::<RobotHalt>(env),
        LASER_FRAME => check::<super::Frame>(env),
        ERROR => check::<LabError>(env),
        _ => Command::from_envelope(env).map(drop),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn topics() {
        assert!(is_lab_topic("lab/maze/set"));
        assert!(is_lab_topic("lab/error"));
        assert!(!is_lab_topic("lab/maze"));
        assert!(!is_lab_topic("lab/door/open"));
        assert!(!is_lab_topic("lab/maze/set/x"));
    }

    #[test]
    fn request_schema() {
        let cmd = parse_line(
            r#"{"topic":"lab/synth/request","payload":{"id":"a","maxSolutions":10,"constraints":["simplePath",{"maxLength":4}]}}"#,
        )
        .unwrap();
        let Command::SynthRequest(req) = &cmd else { panic!() };
        assert_eq!(req.constraints, vec![Constraint::SimplePath, Constraint::MaxLength(4)]);
        assert_eq!(req.max_depth, None);
        assert_eq!(
            cmd.to_envelope().to_line(),
            r#"{"topic":"lab/synth/request","payload":{"id":"a","maxSolutions":10,"constraints":["simplePath",{"maxLength":4}]}}"#
        );
    }

    #[test]
    fn rejections() {
        assert!(parse_line("not json").unwrap_err().starts_with("malformed envelope"));
        assert!(parse_line(r#"{"topic":"lab/synth/request","payload":{"id":"a"}}"#).is_err());
        assert!(parse_line(r#"{"topic":"lab/synth/request","payload":[]}"#).is_err());
        assert!(parse_line(r#"{"topic":"lab/synth/done","payload":{}}"#)
            .unwrap_err()
            .contains("not accepted"));
        assert!(parse_line(r#"{"topic":"x","payload":{}}"#).unwrap_err().contains("unknown topic"));
        assert!(parse_line(
            r#"{"topic":"lab/robot/execute","payload":{"robot":"r1","moves":["north"],"tickMs":5}}"#
        )
        .is_err());
    }
}
