use std::fs;
use std::io::{self, BufReader, Read};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use mazesynth::bridge::{
    execute_plan, frame_to_svg, render_frame, serve_stdio, synth_messages, Clock, Envelope, Service, SimState,
    SynthRequest, TcpServer, DEFAULT_PORT, DEFAULT_ROBOT, ERROR, SYNTH_DONE, SYNTH_SOLUTION, SYNTH_WARNING,
};
use mazesynth::inhab::{build_grammar, explain_cover};
use mazesynth::maze::{
    encode, oracle_simple_paths, oracle_walks, parse_labyrinth, synthesize, Constraint, Labyrinth, MazeFormat,
    MovementPlan, SynthOptions,
};
use mazesynth::typesys::parse_type;
use serde_json::{json, Value};

/// Labyrinth path synthesis by intersection type inhabitation.
///
/// Mazes are ASCII grids over `.` (free), `#` (blocked), `S` (start) and
/// `G` (goal), or the JSON maze schema of the lab protocol. Files ending in
/// `.json` are read as JSON; `-` reads standard input.
///
/// Text output is meant for people; `--format json` prints one JSON
/// document on stdout for scripts.
#[derive(Parser)]
#[command(name = "mazesynth", version)]
struct Cli {
    #[arg(long, value_enum, global = true, default_value_t = Format::Text)]
    format: Format,

    #[command(subcommand)]
    command: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// Synthesize movement plans, shortest first.
    ///
    /// Text mode prints one plan per line as `moves  cells  term`, e.g.
    /// `down;left;down  (1,2)->(2,2)->(2,1)->(3,1)  down(left(down(start)))`.
    /// Warnings go to stderr. Exit status: 0 with solutions, 2 without,
    /// 1 on bad input.
    Synthesize {
        #[command(flatten)]
        maze: MazeArgs,
        #[command(flatten)]
        synth: SynthArgs,
        /// Request id echoed in JSON output.
        #[arg(long, default_value = "cli")]
        id: String,
    },
    /// Print the tree grammar of all plans, one rule per line.
    Grammar {
        #[command(flatten)]
        maze: MazeArgs,
        /// Print the construction event log (JSON array) instead.
        #[arg(long)]
        events: bool,
    },
    /// Render laser frames along a synthesized plan as SVG.
    ///
    /// Writes one file per tick (`OUT` with `-000`, `-001`, .. before the
    /// extension), or only the end state to `OUT` with `--final`.
    Render {
        #[command(flatten)]
        maze: MazeArgs,
        #[command(flatten)]
        synth: SynthArgs,
        /// Which solution to play, counting from 0.
        #[arg(long, default_value_t = 0, conflicts_with = "final_only")]
        plan_index: usize,
        /// Render only the state after the first solution completes.
        #[arg(long = "final")]
        final_only: bool,
        #[arg(long, value_name = "OUT")]
        svg: PathBuf,
    },
    /// Run the lab service over NDJSON.
    Serve {
        #[arg(long, env = "MAZESYNTH_PORT", default_value_t = DEFAULT_PORT)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        #[arg(long, value_enum, default_value_t = Transport::Tcp)]
        transport: Transport,
        /// Advance robots only on explicit ticks (stdio testing aid).
        #[arg(long)]
        manual_clock: bool,
    },
    /// Brute-force reference answers.
    Oracle {
        #[command(flatten)]
        maze: MazeArgs,
        /// Count walks from start to goal of each length up to this bound.
        #[arg(long, conflicts_with = "simple_paths", required_unless_present = "simple_paths")]
        max_len: Option<usize>,
        /// List all plans that visit no cell twice.
        #[arg(long)]
        simple_paths: bool,
    },
    /// Show how a combinator does or does not cover a target type.
    Explain {
        #[command(flatten)]
        maze: MazeArgs,
        /// Combinator name, e.g. `down`.
        combinator: String,
        /// Target type, e.g. `MovementPlan & Pos(2,2)`.
        target: String,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Transport {
    Tcp,
    Stdio,
}

#[derive(Args)]
struct MazeArgs {
    /// Maze file, or `-` for stdin.
    maze: PathBuf,
    /// Override format detection.
    #[arg(long, value_enum)]
    maze_format: Option<MazeFormatArg>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MazeFormatArg {
    Ascii,
    Json,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
    max_solutions: u64,
    /// Longest plan considered, in moves. Defaults to the number of free
    /// cells with --simple-path, or to --max-length.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    max_depth: Option<u64>,
    /// Never visit a cell twice.
    #[arg(long)]
    simple_path: bool,
    /// Never undo the previous move.
    #[arg(long)]
    no_reversal: bool,
    /// At most this many moves.
    #[arg(long)]
    max_length: Option<usize>,
}

impl SynthArgs {
    fn request(&self, id: &str) -> SynthRequest {
        let mut constraints = Vec::new();
        if self.simple_path {
            constraints.push(Constraint::SimplePath);
        }
        if self.no_reversal {
            constraints.push(Constraint::NoImmediateReversal);
        }
        if let Some(n) = self.max_length {
            constraints.push(Constraint::MaxLength(n));
        }
        SynthRequest {
            id: id.to_string(),
            max_solutions: self.max_solutions as usize,
            max_depth: self.max_depth.map(|d| d as usize),
            constraints,
        }
    }
}

fn load_maze(args: &MazeArgs) -> Result<Labyrinth> {
    let text = if args.maze == Path::new("-") {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        s
    } else {
        fs::read_to_string(&args.maze).with_context(|| format!("cannot read {}", args.maze.display()))?
    };
    let format = match args.maze_format {
        Some(MazeFormatArg::Json) => MazeFormat::Json,
        Some(MazeFormatArg::Ascii) => MazeFormat::Ascii,
        None if args.maze.extension().is_some_and(|e| e == "json") => MazeFormat::Json,
        None => MazeFormat::Ascii,
    };
    parse_labyrinth(&text, format).with_context(|| format!("invalid maze {}", args.maze.display()))
}

fn print_json(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("JSON values serialize"));
}

fn cmd_synthesize(format: Format, maze: &MazeArgs, synth: &SynthArgs, id: &str) -> Result<ExitCode> {
    let lab = load_maze(maze)?;
    let out = synth_messages(&lab, &synth.request(id));
    let payloads = |topic: &str| -> Vec<Value> {
        out.iter()
            .filter(|e| e.topic == topic)
            .map(|e| e.payload.clone())
            .collect()
    };
    if let Some(err) = out.iter().find(|e| e.topic == ERROR) {
        bail!("{}", err.payload["reason"].as_str().unwrap_or_default());
    }
    let solutions = payloads(SYNTH_SOLUTION);
    let warnings = payloads(SYNTH_WARNING);
    let done = payloads(SYNTH_DONE).pop().expect("synthesis always reports done");
    match format {
        Format::Json => print_json(&json!({
            "solutions": solutions,
            "warnings": warnings,
            "count": done["count"],
            "exhaustive": done["exhaustive"],
        })),
        Format::Text => {
            for w in &warnings {
                eprintln!("warning: {} {}", w["kind"].as_str().unwrap(), w["detail"].as_str().unwrap());
            }
            for s in &solutions {
                let moves: Vec<&str> = s["moves"].as_array().unwrap().iter().map(|m| m.as_str().unwrap()).collect();
                let cells: Vec<String> = s["cells"]
                    .as_array()
                    .unwrap()
                    .iter()
                    .map(|c| format!("({},{})", c[0], c[1]))
                    .collect();
                let moves = if moves.is_empty() { "-".to_string() } else { moves.join(";") };
                println!("{moves}  {}  {}", cells.join("->"), s["term"].as_str().unwrap());
            }
            let exhaustive = if done["exhaustive"] == true { ", exhaustive" } else { "" };
            eprintln!("{} solution(s){exhaustive}", done["count"]);
        }
    }
    Ok(if solutions.is_empty() { ExitCode::from(2) } else { ExitCode::SUCCESS })
}

fn cmd_grammar(format: Format, maze: &MazeArgs, events: bool) -> Result<ExitCode> {
    let lab = load_maze(maze)?;
    let (repo, goal) = encode(&lab);
    let build = build_grammar(&repo, &goal);
    if events {
        // the event log is JSON in either format
        println!("{}", serde_json::to_string_pretty(&build.events)?);
    } else if format == Format::Json {
        print_json(&json!({ "grammar": build.grammar, "diagnostics": build.diagnostics }));
    } else {
        print!("{}", build.grammar.to_text());
    }
    Ok(ExitCode::SUCCESS)
}

fn frame_paths(out: &Path, count: usize) -> Vec<PathBuf> {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let ext = out.extension().map(|e| e.to_string_lossy().into_owned()).unwrap_or_else(|| "svg".into());
    (0..count)
        .map(|i| out.with_file_name(format!("{stem}-{i:03}.{ext}")))
        .collect()
}

fn cmd_render(format: Format, maze: &MazeArgs, synth: &SynthArgs, index: usize, final_only: bool, out: &Path) -> Result<ExitCode> {
    let lab = load_maze(maze)?;
    let opts = SynthOptions {
        max_solutions: index.saturating_add(1),
        max_depth: synth.max_depth.map(|d| d as usize),
        constraints: synth.request("render").constraints,
    };
    let outcome = synthesize(&lab, &opts)?;
    let Some(solution) = outcome.solutions.get(index) else {
        bail!("plan index {index} out of range: {} solution(s)", outcome.solutions.len());
    };
    let plan: &MovementPlan = &solution.plan;
    let mut state = SimState::new(lab);
    let mut frames = vec![render_frame(&state)];
    let envelopes: Vec<Envelope> = execute_plan(&mut state, DEFAULT_ROBOT, plan)?;
    frames.extend(
        envelopes
            .into_iter()
            .filter(|e| e.topic == mazesynth::bridge::LASER_FRAME)
            .map(|e| serde_json::from_value(e.payload).expect("frames round-trip")),
    );
    let written: Vec<PathBuf> = if final_only {
        fs::write(out, frame_to_svg(frames.last().unwrap()))?;
        vec![out.to_path_buf()]
    } else {
        let paths = frame_paths(out, frames.len());
        for (frame, path) in frames.iter().zip(&paths) {
            fs::write(path, frame_to_svg(frame))?;
        }
        paths
    };
    match format {
        Format::Json => print_json(&json!({
            "plan": { "term": solution.term.to_string(), "moves": plan.moves, "cells": plan.cells },
            "files": written.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
        })),
        Format::Text => {
            println!("{plan}");
            for p in &written {
                println!("{}", p.display());
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_serve(port: u16, host: &str, transport: Transport, manual: bool) -> Result<ExitCode> {
    let bus = mazesynth::bridge::Bus::new();
    let clock = if manual { Clock::Manual } else { Clock::Realtime };
    let service = Service::start(&bus, clock);
    match transport {
        Transport::Tcp => {
            let server = TcpServer::bind((host, port), &bus).with_context(|| format!("cannot listen on {host}:{port}"))?;
            eprintln!("listening on {}", server.local_addr()?);
            server.run()?;
        }
        Transport::Stdio => {
            let stdin = io::stdin();
            serve_stdio(&service, BufReader::new(stdin.lock()), io::stdout())?;
        }
    }
    service.shutdown();
    Ok(ExitCode::SUCCESS)
}

fn cmd_oracle(format: Format, maze: &MazeArgs, max_len: Option<usize>) -> Result<ExitCode> {
    let lab = load_maze(maze)?;
    match max_len {
        Some(n) => {
            let walks = oracle_walks(&lab, n);
            match format {
                Format::Json => print_json(&json!(walks)),
                Format::Text => {
                    for (len, count) in walks {
                        println!("{len}: {count}");
                    }
                }
            }
        }
        None => {
            let plans = oracle_simple_paths(&lab);
            match format {
                Format::Json => print_json(&json!(plans)),
                Format::Text => {
                    for p in &plans {
                        println!("{p}");
                    }
                }
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_explain(format: Format, maze: &MazeArgs, combinator: &str, target: &str) -> Result<ExitCode> {
    let lab = load_maze(maze)?;
    let (repo, _) = encode(&lab);
    let target = parse_type(target).with_context(|| format!("invalid target type `{target}`"))?;
    let trace = explain_cover(&repo, combinator, &target)?;
    match format {
        Format::Json => print_json(&serde_json::to_value(&trace)?),
        Format::Text => {
            println!("{combinator} : {}", trace.combinator_type);
            println!("target: {}", trace.target);
            for group in &trace.paths_by_arity {
                println!("arity {}: {} path(s)", group.arity, group.paths.len());
            }
            for report in &trace.target_paths {
                println!("target path {}", report.target_path);
                for check in &report.checks {
                    let names: Vec<String> = check.candidates.iter().map(|p| p.to_string()).collect();
                    println!("  arity {}: candidates [{}]", check.arity, names.join(", "));
                }
            }
            for c in &trace.covers {
                let args: Vec<String> = c.arg_types.iter().map(|t| t.to_string()).collect();
                println!("cover: arity {} args [{}]", c.arity, args.join(", "));
            }
            for f in &trace.failures {
                println!("failure: {f}");
            }
        }
    }
    Ok(if trace.succeeded() { ExitCode::SUCCESS } else { ExitCode::from(2) })
}

fn run(cli: Cli) -> Result<ExitCode> {
    let format = cli.format;
    match &cli.command {
        Cmd::Synthesize { maze, synth, id } => cmd_synthesize(format, maze, synth, id),
        Cmd::Grammar { maze, events } => cmd_grammar(format, maze, *events),
        Cmd::Render {
            maze,
            synth,
            plan_index,
            final_only,
            svg,
        } => cmd_render(format, maze, synth, if *final_only { 0 } else { *plan_index }, *final_only, svg),
        Cmd::Serve {
            port,
            host,
            transport,
            manual_clock,
        } => cmd_serve(*port, host, *transport, *manual_clock),
        Cmd::Oracle { maze, max_len, .. } => cmd_oracle(format, maze, *max_len),
        Cmd::Explain {
            maze,
            combinator,
            target,
        } => cmd_explain(format, maze, combinator, target),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // usage errors are input errors
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
