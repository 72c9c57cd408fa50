mod common;

use common::fig1;
use mazesynth::inhab::{build_grammar, covers, enumerate, explain_cover, Repository, Term, TreeGrammar};
use mazesynth::maze::*;
use mazesynth::typesys::{organize, parse_type, Type};

fn ty(s: &str) -> Type {
    parse_type(s).unwrap()
}

#[test]
fn layout() {
    let lab = fig1();
    assert_eq!((lab.rows(), lab.cols()), (4, 3));
    assert_eq!(lab.start(), Cell(1, 2));
    assert_eq!(lab.goal(), Cell(3, 1));
    assert_eq!(lab.blocked().iter().copied().collect::<Vec<_>>(), vec![Cell(1, 1), Cell(3, 0), Cell(3, 2)]);
    assert_eq!(lab.free_count(), 9);
}

#[test]
fn encoding_of_down() {
    let (repo, goal) = encode(&fig1());
    assert_eq!(goal, ty("MovementPlan & Pos(3,1)"));
    assert_eq!(repo.names().collect::<Vec<_>>(), vec!["down", "left", "right", "start", "up"]);
    let down = repo.get("down").unwrap();
    let pos_arrows: Vec<String> = organize(down)
        .into_iter()
        .filter(|p| p.head.name == "Pos")
        .map(|p| p.to_string())
        .collect();
    assert_eq!(
        pos_arrows,
        vec![
            "Pos(0,0) -> Pos(1,0)",
            "Pos(0,2) -> Pos(1,2)",
            "Pos(1,0) -> Pos(2,0)",
            "Pos(1,2) -> Pos(2,2)",
            "Pos(2,1) -> Pos(3,1)",
        ]
    );
    // brute force over free cells
    let lab = fig1();
    let brute = lab.free_cells().filter(|&c| lab.free_step(c, Move::Down).is_some()).count();
    assert_eq!(brute, pos_arrows.len());
    assert!(mazesynth::typesys::subtype(down, &ty("MovementPlan -> MovementPlan")));
    assert!(mazesynth::typesys::subtype(down, &ty("Pos(0,0) -> Pos(1,0)")));
    assert_eq!(repo.get("start").unwrap(), &ty("MovementPlan & Pos(1,2)"));
}

#[test]
fn single_row_has_bare_vertical_moves() {
    let lab = parse_labyrinth("SG", MazeFormat::Ascii).unwrap();
    let (repo, _) = encode(&lab);
    assert_eq!(repo.get("up").unwrap(), &ty("MovementPlan -> MovementPlan"));
    assert_eq!(repo.get("down").unwrap(), &ty("MovementPlan -> MovementPlan"));
}

#[test]
fn covering_example() {
    let (repo, _) = encode(&fig1());
    let down = repo.get("down").unwrap();
    let found = covers(down, &ty("MovementPlan & Pos(2,2)"));
    assert_eq!(found.len(), 1);
    assert_eq!(found[0].arity, 1);
    assert_eq!(found[0].arg_types, vec![ty("MovementPlan & Pos(1,2)")]);
    assert!(covers(down, &ty("MovementPlan & Pos(0,0)")).is_empty());

    let start = repo.get("start").unwrap();
    let own = covers(start, start);
    assert_eq!(own.len(), 1);
    assert_eq!(own[0].arity, 0);
    assert!(own[0].arg_types.is_empty());
}

#[test]
fn explain_matches_covers_and_reports_failures() {
    let (repo, _) = encode(&fig1());
    let target = ty("MovementPlan & Pos(2,2)");
    let trace = explain_cover(&repo, "down", &target).unwrap();
    assert_eq!(trace.covers, covers(repo.get("down").unwrap(), &target));
    assert!(trace.succeeded());

    let trace = explain_cover(&repo, "left", &ty("MovementPlan & Pos(3,1)")).unwrap();
    assert!(!trace.succeeded());
    assert!(
        trace.failures.iter().any(|f| f == "no path of arity 1 has head <= Pos(3,1)"),
        "{:?}",
        trace.failures
    );
    assert!(explain_cover(&repo, "jump", &target).is_err());
}

#[test]
fn grammar_shape() {
    let (repo, goal) = encode(&fig1());
    let build = build_grammar(&repo, &goal);
    let g = &build.grammar;
    let goal_rules: Vec<String> = g.rules_for(&goal).unwrap().iter().map(|r| r.to_string()).collect();
    assert_eq!(goal_rules, vec!["down(MovementPlan & Pos(2,1))"]);
    assert!(g
        .to_text()
        .lines()
        .any(|l| l == "MovementPlan & Pos(3,1) <- down(MovementPlan & Pos(2,1))"));
    assert!(build.diagnostics.goal_inhabited);
    assert!(build.diagnostics.grammar_infinite);
    assert!(build.diagnostics.unused_combinators.is_empty());
    assert_eq!(TreeGrammar::replay(&build.events).unwrap(), *g);
}

#[test]
fn trivial_grammar() {
    let mut repo = Repository::new();
    repo.insert("start", ty("MovementPlan & Pos(0,0)"));
    let goal = ty("MovementPlan & Pos(0,0)");
    let build = build_grammar(&repo, &goal);
    assert_eq!(build.grammar.to_text(), "MovementPlan & Pos(0,0) <- start()\n");
    assert!(build.diagnostics.goal_inhabited);
    assert!(!build.diagnostics.grammar_infinite);
    let terms: Vec<Term> = enumerate(&build.grammar, 5, 10, None).collect();
    assert_eq!(terms, vec![Term::leaf("start")]);
}

#[test]
fn walk_oracle_and_unfiltered_enumeration() {
    let lab = fig1();
    let walks = oracle_walks(&lab, 5);
    assert_eq!(walks.into_iter().collect::<Vec<_>>(), vec![(3, 1), (5, 5)]);
    assert_eq!(oracle_walks(&lab, 3).into_iter().collect::<Vec<_>>(), vec![(3, 1)]);

    let (repo, goal) = encode(&lab);
    let g = build_grammar(&repo, &goal).grammar;
    let mut e = enumerate(&g, 6, usize::MAX, None);
    let terms: Vec<Term> = e.by_ref().collect();
    assert_eq!(terms.len(), 6);
    assert!(e.is_exhausted());
    for t in &terms {
        let plan = decode(t, &lab).unwrap();
        assert_eq!(plan.end(), lab.goal());
        assert!(repo.check(t, &goal));
    }
}

#[test]
fn simple_paths() {
    let lab = fig1();
    let oracle = oracle_simple_paths(&lab);
    // DFS tries `up` first, so the long route is found first
    assert_eq!(oracle.iter().map(MovementPlan::len).collect::<Vec<_>>(), vec![7, 3]);

    let (repo, goal) = encode(&lab);
    let g = build_grammar(&repo, &goal).grammar;
    let simple = |t: &Term| decode(t, &lab).is_ok_and(|p| accepts(&[Constraint::SimplePath], &p));
    let terms: Vec<Term> = enumerate(&g, 9, usize::MAX, Some(Box::new(simple))).collect();
    let plans: Vec<MovementPlan> = terms.iter().map(|t| decode(t, &lab).unwrap()).collect();
    let mut sorted = oracle.clone();
    sorted.sort_by_key(MovementPlan::len);
    assert_eq!(plans, sorted);
    assert_eq!(terms[0].to_string(), "down(left(down(start)))");
    assert_eq!(
        plans[0].cells,
        vec![Cell(1, 2), Cell(2, 2), Cell(2, 1), Cell(3, 1)]
    );
    assert_eq!(plans[0].to_string(), "down;left;down  (1,2)->(2,2)->(2,1)->(3,1)");
}

#[test]
fn decoding() {
    let lab = fig1();
    let plan = decode(&Term::leaf("start"), &lab).unwrap();
    assert!(plan.is_empty());
    assert_eq!(plan.cells, vec![Cell(1, 2)]);
    assert!(matches!(
        decode(&"left(start)".parse().unwrap(), &lab),
        Err(DecodeError::InvalidStep { .. })
    ));
    assert!(matches!(
        decode(&"down(up)".parse().unwrap(), &lab),
        Err(DecodeError::IllFormedTerm(_))
    ));
    assert!(matches!(
        decode(&"down(start, start)".parse().unwrap(), &lab),
        Err(DecodeError::IllFormedTerm(_))
    ));
}

#[test]
fn constraint_examples() {
    let lab = fig1();
    let long = oracle_simple_paths(&lab).remove(0);
    let short = oracle_simple_paths(&lab).remove(1);
    assert_eq!(short.len(), 3);
    assert!(accepts(&[Constraint::SimplePath], &short));
    assert!(!accepts(&[Constraint::MaxLength(3)], &long));
    let zigzag = MovementPlan::from_moves(&lab, Cell(1, 2), &[Move::Down, Move::Up, Move::Down]).unwrap();
    assert!(!accepts(&[Constraint::NoImmediateReversal], &zigzag));
    assert!(accepts(&[Constraint::MaxLength(3)], &zigzag));
}

#[test]
fn synthesize_fig1() {
    let out = synthesize(
        &fig1(),
        &SynthOptions {
            constraints: vec![Constraint::SimplePath],
            ..SynthOptions::default()
        },
    )
    .unwrap();
    assert_eq!(out.solutions.len(), 2);
    assert!(out.exhaustive);
    assert!(out.warnings.is_empty());
    assert_eq!(out.max_depth, 9);
}

#[test]
fn diagnostics() {
    let row = parse_labyrinth("S..G", MazeFormat::Ascii).unwrap();
    let (repo, goal) = encode(&row);
    let d = build_grammar(&repo, &goal).diagnostics;
    assert_eq!(d.unused_combinators.iter().map(String::as_str).collect::<Vec<_>>(), vec!["down", "up"]);

    let walled = parse_labyrinth("S.#G\n..#.\n", MazeFormat::Ascii).unwrap();
    let (repo, goal) = encode(&walled);
    let d = build_grammar(&repo, &goal).diagnostics;
    assert!(!d.goal_inhabited);
    assert!(d.uninhabited_targets.contains(&goal));
    let out = synthesize(&walled, &SynthOptions { max_depth: Some(8), ..SynthOptions::default() }).unwrap();
    assert!(out.solutions.is_empty());
    assert!(out
        .warnings
        .iter()
        .any(|w| w.kind == WarningKind::Uninhabited && w.detail == "MovementPlan & Pos(0,3)"));
}

#[test]
fn parse_errors() {
    assert!(matches!(parse_labyrinth("S.", MazeFormat::Ascii), Err(MazeError::MissingMarker('G'))));
    assert!(matches!(parse_labyrinth("S..\nG.", MazeFormat::Ascii), Err(MazeError::Ragged { .. })));
    assert!(matches!(parse_labyrinth("SGS", MazeFormat::Ascii), Err(MazeError::DuplicateMarker('S'))));
    assert!(matches!(parse_labyrinth("{", MazeFormat::Json), Err(MazeError::Json(_))));
    let json = serde_json::to_string(&fig1()).unwrap();
    assert_eq!(parse_labyrinth(&json, MazeFormat::Json).unwrap(), fig1());
}
