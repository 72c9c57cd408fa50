use std::collections::BTreeMap;
use std::sync::mpsc::{self, Receiver, Sender};
use std::thread::{self, JoinHandle};
use std::time::Duration;

use super::protocol::{
    Command, RobotExecute, SynthDone, SynthRequest, SynthSolution, SynthWarning, WorldObstacle, SYNTH_DONE,
    SYNTH_SOLUTION, SYNTH_WARNING,
};
use super::{ingest, Bus, Envelope, SimState, SubscriptionId, COMMAND_TOPICS};
use crate::maze::{synthesize, Labyrinth, MazeSpec, SynthOptions};

/// How robot ticks are driven.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Clock {
    /// Each robot steps every `tickMs` milliseconds of wall time.
    #[default]
    Realtime,
    /// Ticks happen only on [`Service::tick`]; `tickMs` is ignored.
    Manual,
}

enum Msg {
    Command(Command),
    /// `None` steps every busy robot; `Some` is a scheduled real-time tick.
    Tick(Option<(String, u64)>),
    Barrier { ack: Sender<()>, robots: bool },
    /// Runs robots to a stop under a manual clock, then acts as a barrier.
    Drain(Sender<()>),
    SynthFinished(Vec<Envelope>),
    Shutdown,
}

/// The lab service: listens for commands on a bus and publishes results.
///
/// All state changes go through one queue processed by a single worker
/// thread. Synthesis runs on its own threads and reports back through the
/// same queue.
pub struct Service {
    bus: Bus,
    tx: Sender<Msg>,
    subscription: SubscriptionId,
    worker: Option<JoinHandle<()>>,
}

impl Service {
    pub fn start(bus: &Bus, clock: Clock) -> Service {
        let (tx, rx) = mpsc::channel();
        let inbox = tx.clone();
        let subscription = bus.subscribe("lab/#", move |env| {
            if COMMAND_TOPICS.contains(&env.topic.as_str()) {
                // only validated commands reach the bus
                if let Ok(cmd) = Command::from_envelope(env) {
                    let _ = inbox.send(Msg::Command(cmd));
                }
            }
        });
        let worker = Worker {
            bus: bus.clone(),
            tx: tx.clone(),
            clock,
            sim: None,
            generations: BTreeMap::new(),
            next_generation: 0,
            running_synth: 0,
            waiting: Vec::new(),
        };
        let handle = thread::Builder::new()
            .name("lab-service".into())
            .spawn(move || worker.run(rx))
            .expect("failed to spawn service thread");
        Service {
            bus: bus.clone(),
            tx,
            subscription,
            worker: Some(handle),
        }
    }

    pub fn bus(&self) -> &Bus {
        &self.bus
    }

    /// Publishes a command on the bus.
    pub fn submit(&self, cmd: &Command) {
        self.bus.publish(&cmd.to_envelope());
    }

    /// Publishes one NDJSON line, or a `lab/error` if it is not a valid command.
    pub fn submit_line(&self, line: &str) {
        ingest(&self.bus, line);
    }

    /// One logical tick for every moving robot.
    pub fn tick(&self) {
        let _ = self.tx.send(Msg::Tick(None));
    }

    /// Blocks until every command published so far is handled and all
    /// synthesis requests have reported.
    pub fn settle(&self) {
        self.barrier(false);
    }

    /// Like [`settle`](Self::settle), and also waits for robots to stop.
    pub fn wait_idle(&self) {
        self.barrier(true);
    }

    /// Like [`wait_idle`](Self::wait_idle), but under a manual clock the
    /// remaining ticks are issued here instead of waiting for [`tick`](Self::tick).
    pub fn drain(&self) {
        let (ack, done) = mpsc::channel();
        if self.tx.send(Msg::Drain(ack)).is_ok() {
            let _ = done.recv();
        }
    }

    fn barrier(&self, robots: bool) {
        let (ack, done) = mpsc::channel();
        if self.tx.send(Msg::Barrier { ack, robots }).is_ok() {
            let _ = done.recv();
        }
    }

    pub fn shutdown(mut self) {
        self.stop();
    }

    fn stop(&mut self) {
        self.bus.unsubscribe(self.subscription);
        let _ = self.tx.send(Msg::Shutdown);
        if let Some(h) = self.worker.take() {
            let _ = h.join();
        }
    }
}

impl Drop for Service {
    fn drop(&mut self) {
        self.stop();
    }
}

struct Worker {
    bus: Bus,
    tx: Sender<Msg>,
    clock: Clock,
    sim: Option<SimState>,
    /// Current plan generation per robot; stale real-time ticks are ignored.
    generations: BTreeMap<String, u64>,
    next_generation: u64,
    running_synth: usize,
    waiting: Vec<(Sender<()>, bool)>,
}

impl Worker {
    fn run(mut self, rx: Receiver<Msg>) {
        while let Ok(msg) = rx.recv() {
            match msg {
                Msg::Command(cmd) => self.command(cmd),
                Msg::Tick(None) => {
                    if let Some(sim) = &mut self.sim {
                        let out = sim.step();
                        self.publish(out);
                    }
                }
                Msg::Tick(Some((robot, generation))) => self.timed_tick(&robot, generation),
                Msg::Barrier { ack, robots } => self.waiting.push((ack, robots)),
                Msg::Drain(ack) => {
                    if self.clock == Clock::Manual {
                        // every step consumes a move or halts, so this ends
                        while let Some(sim) = self.sim.as_mut().filter(|s| s.is_busy()) {
                            let out = sim.step();
                            self.publish(out);
                        }
                    }
                    self.waiting.push((ack, true));
                }
                Msg::SynthFinished(out) => {
                    self.running_synth -= 1;
                    self.publish(out);
                }
                Msg::Shutdown => break,
            }
            self.release_barriers();
        }
    }

    fn release_barriers(&mut self) {
        let synth_idle = self.running_synth == 0;
        let robots_idle = !self.sim.as_ref().is_some_and(SimState::is_busy);
        self.waiting.retain(|(ack, robots)| {
            if synth_idle && (!robots || robots_idle) {
                let _ = ack.send(());
                false
            } else {
                true
            }
        });
    }

    fn publish(&self, out: Vec<Envelope>) {
        for env in &out {
            self.bus.publish(env);
        }
    }

    fn error(&self, reason: impl Into<String>) {
        self.bus.publish(&Envelope::error(reason));
    }

    fn command(&mut self, cmd: Command) {
        match cmd {
            Command::MazeSet(spec) => self.maze_set(spec),
            Command::SynthRequest(req) => self.synth(req),
            Command::RobotExecute(req) => self.execute(req),
            Command::WorldObstacle(req) => self.obstacle(req),
        }
    }

    fn maze_set(&mut self, spec: MazeSpec) {
        match Labyrinth::try_from(spec) {
            Ok(lab) => {
                let mut sim = SimState::new(lab);
                sim.tick = self.sim.as_ref().map_or(0, |s| s.tick);
                self.generations.clear();
                let frame = sim.frame();
                self.sim = Some(sim);
                self.bus.publish(&frame);
            }
            Err(e) => self.error(format!("invalid maze: {e}")),
        }
    }

    fn synth(&mut self, req: SynthRequest) {
        let Some(sim) = &self.sim else {
            return self.error("no labyrinth loaded");
        };
        let lab = sim.model.clone();
        let tx = self.tx.clone();
        self.running_synth += 1;
        thread::spawn(move || {
            let _ = tx.send(Msg::SynthFinished(synth_messages(&lab, &req)));
        });
    }

    fn execute(&mut self, req: RobotExecute) {
        let Some(sim) = &mut self.sim else {
            return self.error("no labyrinth loaded");
        };
        match sim.execute(&req.robot, &req.moves, req.tick_ms) {
            Ok(out) => {
                let moving = sim.robots[&req.robot].is_moving();
                self.publish(out);
                self.next_generation += 1;
                self.generations.insert(req.robot.clone(), self.next_generation);
                if moving && self.clock == Clock::Realtime {
                    self.schedule(req.robot, self.next_generation, req.tick_ms);
                }
            }
            Err(e) => self.error(e.to_string()),
        }
    }

    fn obstacle(&mut self, req: WorldObstacle) {
        let Some(sim) = &mut self.sim else {
            return self.error("no labyrinth loaded");
        };
        match sim.set_obstacle(req.cell, req.blocked) {
            Ok(out) => self.publish(out),
            Err(e) => self.error(e.to_string()),
        }
    }

    fn schedule(&self, robot: String, generation: u64, tick_ms: u64) {
        let tx = self.tx.clone();
        thread::spawn(move || {
            thread::sleep(Duration::from_millis(tick_ms));
            let _ = tx.send(Msg::Tick(Some((robot, generation))));
        });
    }

    fn timed_tick(&mut self, robot: &str, generation: u64) {
        if self.generations.get(robot) != Some(&generation) {
            return;
        }
        let Some(sim) = &mut self.sim else { return };
        let out = sim.step_robot(robot);
        let next = sim.robots.get(robot).filter(|r| r.is_moving()).map(|r| r.tick_ms);
        self.publish(out);
        if let Some(tick_ms) = next {
            self.schedule(robot.to_string(), generation, tick_ms);
        }
    }
}

/// Everything one synthesis request publishes: warnings, then solutions,
/// then `done`; or a single `lab/error`.
pub fn synth_messages(lab: &Labyrinth, req: &SynthRequest) -> Vec<Envelope> {
    let opts = SynthOptions {
        max_solutions: req.max_solutions,
        max_depth: req.max_depth,
        constraints: req.constraints.clone(),
    };
    let outcome = match synthesize(lab, &opts) {
        Ok(o) => o,
        Err(e) => return vec![Envelope::error(format!("synthesis request `{}` failed: {e}", req.id))],
    };
    let mut out: Vec<Envelope> = outcome
        .warnings
        .iter()
        .map(|w| {
            Envelope::new(
                SYNTH_WARNING,
                &SynthWarning {
                    id: req.id.clone(),
                    kind: w.kind.name().to_string(),
                    detail: w.detail.clone(),
                },
            )
        })
        .collect();
    out.extend(outcome.solutions.iter().map(|s| {
        Envelope::new(
            SYNTH_SOLUTION,
            &SynthSolution {
                id: req.id.clone(),
                index: s.index,
                term: s.term.to_string(),
                moves: s.plan.moves.clone(),
                cells: s.plan.cells.clone(),
            },
        )
    }));
    out.push(Envelope::new(
        SYNTH_DONE,
        &SynthDone {
            id: req.id.clone(),
            count: outcome.solutions.len(),
            exhaustive: outcome.exhaustive,
        },
    ));
    out
}
