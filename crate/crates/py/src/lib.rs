//! Python bindings for `mazesynth`.
//!
//! Structured results cross the boundary as JSON and come out as plain
//! dicts and lists, with the same shapes as the wire protocol.

use pyo3::exceptions::{PyKeyError, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;

use mazesynth::bridge::{
    execute_plan, frame_to_svg, render_frame, synth_messages, Frame, SimState, SynthRequest, DEFAULT_ROBOT, ERROR,
    LASER_FRAME,
};
use mazesynth::inhab::{build_grammar, covers as covers_of, explain_cover};
use mazesynth::maze::{
    encode, oracle_simple_paths, oracle_walks, parse_labyrinth, Constraint, MazeFormat, Move, MovementPlan,
};
use mazesynth::typesys::{self, organize as organize_type, Type};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<'py>(py: Python<'py>, value: &impl Serialize) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(value_err)?;
    py.import("json")?.call_method1("loads", (text,))
}

fn from_py<T: serde::de::DeserializeOwned>(obj: &Bound<'_, PyAny>) -> PyResult<T> {
    let text: String = obj.py().import("json")?.call_method1("dumps", (obj,))?.extract()?;
    serde_json::from_str(&text).map_err(value_err)
}

fn ty(text: &str) -> PyResult<Type> {
    typesys::parse_type(text).map_err(value_err)
}

/// Canonical form of a type.
#[pyfunction]
fn parse_type(text: &str) -> PyResult<String> {
    Ok(ty(text)?.to_string())
}

#[pyfunction]
fn subtype(a: &str, b: &str) -> PyResult<bool> {
    Ok(typesys::subtype(&ty(a)?, &ty(b)?))
}

/// Paths of a type, each printed as a type.
#[pyfunction]
fn organize(text: &str) -> PyResult<Vec<String>> {
    Ok(organize_type(&ty(text)?).iter().map(ToString::to_string).collect())
}

/// Minimal covers of `target` by the paths of `sigma`.
#[pyfunction]
fn covers<'py>(py: Python<'py>, sigma: &str, target: &str) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &covers_of(&ty(sigma)?, &ty(target)?))
}

#[pyclass(module = "mazesynth", frozen)]
struct Labyrinth {
    inner: mazesynth::maze::Labyrinth,
}

fn moves_from(names: Vec<String>) -> PyResult<Vec<Move>> {
    names.iter().map(|m| m.parse().map_err(value_err)).collect()
}

#[pymethods]
impl Labyrinth {
    /// Parses ASCII (`.`, `#`, `S`, `G`) or, with `format="json"`, the
    /// `lab/maze/set` payload.
    #[new]
    #[pyo3(signature = (text, format = "ascii"))]
    fn new(text: &str, format: &str) -> PyResult<Self> {
        let format: MazeFormat = format.parse().map_err(value_err)?;
        Ok(Labyrinth {
            inner: parse_labyrinth(text, format).map_err(value_err)?,
        })
    }

    #[getter]
    fn rows(&self) -> usize {
        self.inner.rows()
    }

    #[getter]
    fn cols(&self) -> usize {
        self.inner.cols()
    }

    #[getter]
    fn start(&self) -> (usize, usize) {
        let c = self.inner.start();
        (c.0, c.1)
    }

    #[getter]
    fn goal(&self) -> (usize, usize) {
        let c = self.inner.goal();
        (c.0, c.1)
    }

    fn to_ascii(&self) -> String {
        self.inner.to_ascii()
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner).map_err(value_err)
    }

    /// The combinator repository: name to type.
    fn repository(&self) -> Vec<(String, String)> {
        let (repo, _) = encode(&self.inner);
        repo.iter().map(|(n, t)| (n.to_string(), t.to_string())).collect()
    }

    fn goal_type(&self) -> String {
        encode(&self.inner).1.to_string()
    }

    /// Runs a synthesis request and returns its `lab/synth/*` messages as
    /// `(topic, payload)` pairs: warnings, solutions, then done.
    #[pyo3(signature = (max_solutions = 10, max_depth = None, constraints = None, id = "py"))]
    fn synthesize<'py>(
        &self,
        py: Python<'py>,
        max_solutions: usize,
        max_depth: Option<usize>,
        constraints: Option<&Bound<'py, PyAny>>,
        id: &str,
    ) -> PyResult<Vec<(String, Bound<'py, PyAny>)>> {
        if max_solutions == 0 {
            return Err(PyValueError::new_err("max_solutions must be positive"));
        }
        let constraints: Vec<Constraint> = match constraints {
            Some(c) => from_py(c)?,
            None => Vec::new(),
        };
        let req = SynthRequest {
            id: id.to_string(),
            max_solutions,
            max_depth,
            constraints,
        };
        let lab = self.inner.clone();
        let msgs = py.detach(move || synth_messages(&lab, &req));
        msgs.into_iter()
            .map(|env| {
                if env.topic == ERROR {
                    let reason = env.payload["reason"].as_str().unwrap_or_default().to_string();
                    return Err(PyValueError::new_err(reason));
                }
                Ok((env.topic, to_py(py, &env.payload)?))
            })
            .collect()
    }

    /// The pruned tree grammar, one rule per line.
    fn grammar(&self) -> String {
        let (repo, goal) = encode(&self.inner);
        build_grammar(&repo, &goal).grammar.to_text()
    }

    fn grammar_events<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let (repo, goal) = encode(&self.inner);
        to_py(py, &build_grammar(&repo, &goal).events)
    }

    fn diagnostics<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let (repo, goal) = encode(&self.inner);
        to_py(py, &build_grammar(&repo, &goal).diagnostics)
    }

    /// Why `combinator` does or does not cover `target`.
    fn explain<'py>(&self, py: Python<'py>, combinator: &str, target: &str) -> PyResult<Bound<'py, PyAny>> {
        let (repo, _) = encode(&self.inner);
        let trace = explain_cover(&repo, combinator, &ty(target)?).map_err(|e| PyKeyError::new_err(e.to_string()))?;
        to_py(py, &trace)
    }

    /// Number of start-to-goal walks by length, up to `max_len` moves.
    fn walk_counts(&self, max_len: usize) -> Vec<(usize, u64)> {
        oracle_walks(&self.inner, max_len).into_iter().collect()
    }

    /// All simple start-to-goal paths as move lists.
    fn simple_paths(&self) -> Vec<Vec<String>> {
        oracle_simple_paths(&self.inner)
            .iter()
            .map(|p| p.moves.iter().map(|m| m.name().to_string()).collect())
            .collect()
    }

    /// SVG frames of robot `r1` executing `moves`, starting with the
    /// initial state.
    fn render_svg(&self, moves: Vec<String>) -> PyResult<Vec<String>> {
        let moves = moves_from(moves)?;
        let plan = MovementPlan::from_moves(&self.inner, self.inner.start(), &moves).map_err(value_err)?;
        let mut state = SimState::new(self.inner.clone());
        let mut frames = vec![render_frame(&state)];
        for env in execute_plan(&mut state, DEFAULT_ROBOT, &plan).map_err(value_err)? {
            if env.topic == LASER_FRAME {
                let frame: Frame = serde_json::from_value(env.payload).map_err(value_err)?;
                frames.push(frame);
            }
        }
        Ok(frames.iter().map(frame_to_svg).collect())
    }

    fn __repr__(&self) -> String {
        format!("Labyrinth({}x{}, start={}, goal={})", self.inner.rows(), self.inner.cols(), self.inner.start(), self.inner.goal())
    }
}

#[pymodule]
#[pyo3(name = "mazesynth")]
fn mazesynth_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(parse_type, m)?)?;
    m.add_function(wrap_pyfunction!(subtype, m)?)?;
    m.add_function(wrap_pyfunction!(organize, m)?)?;
    m.add_function(wrap_pyfunction!(covers, m)?)?;
    m.add_class::<Labyrinth>()?;
    Ok(())
}
