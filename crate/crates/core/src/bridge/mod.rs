//! The simulated lab: a publish/subscribe bus, the synthesis and robot
//! service behind it, laser-frame rendering and NDJSON transports.
//!
//! Messages are [`Envelope`]s `{"topic": .., "payload": {..}}` on topics
//! `lab/(maze|synth|robot|world|laser)/<name>` and `lab/error`. Clients
//! publish the four [`COMMAND_TOPICS`]; the service publishes the rest.
//! A real broker can be attached by relaying between it and a [`Bus`].

mod bus;
mod protocol;
mod render;
mod service;
mod sim;
mod transport;

pub use self::bus::{topic_matches, Bus, SubscriptionId, Transcript};
pub use self::protocol::*;
pub use self::render::{
    frame_to_svg, render_frame, Frame, Polyline, BLOCKED_COLOR, GOAL_COLOR, GRID_COLOR, ROBOT_COLOR,
};
pub use self::service::{synth_messages, Clock, Service};
pub use self::sim::{execute_plan, Robot, SimError, SimState, DEFAULT_ROBOT};
pub use self::transport::{ingest, serve_stdio, TcpHandle, TcpServer, DEFAULT_PORT};
