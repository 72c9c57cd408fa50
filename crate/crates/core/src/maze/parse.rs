use std::str::FromStr;

use super::{Cell, Labyrinth, MazeError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MazeFormat {
    /// Lines over `.`, `#`, `S`, `G`.
    Ascii,
    /// The `lab/maze/set` payload schema.
    Json,
}

impl FromStr for MazeFormat {
    type Err = MazeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "ascii" | "txt" => Ok(MazeFormat::Ascii),
            "json" => Ok(MazeFormat::Json),
            _ => Err(MazeError::UnknownFormat(s.to_string())),
        }
    }
}

pub fn parse_labyrinth(text: &str, format: MazeFormat) -> Result<Labyrinth, MazeError> {
    match format {
        MazeFormat::Ascii => parse_ascii(text),
        MazeFormat::Json => serde_json::from_str(text).map_err(|e| MazeError::Json(e.to_string())),
    }
}

fn parse_ascii(text: &str) -> Result<Labyrinth, MazeError> {
    let mut lines: Vec<&str> = text.lines().map(|l| l.trim_end_matches('\r')).collect();
    while lines.last().is_some_and(|l| l.trim().is_empty()) {
        lines.pop();
    }
    if lines.is_empty() {
        return Err(MazeError::Empty);
    }
    let cols = lines[0].chars().count();
    let mut blocked = Vec::new();
    let mut start = None;
    let mut goal = None;
    for (r, line) in lines.iter().enumerate() {
        let found = line.chars().count();
        if found != cols {
            return Err(MazeError::Ragged {
                line: r + 1,
                expected: cols,
                found,
            });
        }
        for (c, ch) in line.chars().enumerate() {
            let cell = Cell(r, c);
            match ch {
                '.' => {}
                '#' => blocked.push(cell),
                'S' | 'G' => {
                    let slot = if ch == 'S' { &mut start } else { &mut goal };
                    if slot.replace(cell).is_some() {
                        return Err(MazeError::DuplicateMarker(ch));
                    }
                }
                _ => {
                    return Err(MazeError::BadChar {
                        line: r + 1,
                        col: c + 1,
                        ch,
                    })
                }
            }
        }
    }
    let start = start.ok_or(MazeError::MissingMarker('S'))?;
    let goal = goal.ok_or(MazeError::MissingMarker('G'))?;
    Labyrinth::new(lines.len(), cols, blocked, start, goal)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn figure_layout() {
        let lab = parse_labyrinth("...\n.#S\n...\n#G#\n", MazeFormat::Ascii).unwrap();
        assert_eq!((lab.rows(), lab.cols()), (4, 3));
        assert_eq!(lab.start(), Cell(1, 2));
        assert_eq!(lab.goal(), Cell(3, 1));
        assert_eq!(
            lab.blocked().iter().copied().collect::<Vec<_>>(),
            vec![Cell(1, 1), Cell(3, 0), Cell(3, 2)]
        );
        assert_eq!(lab.to_ascii(), "...\n.#S\n...\n#G#\n");
    }

    #[test]
    fn single_row() {
        let lab = parse_labyrinth("SG", MazeFormat::Ascii).unwrap();
        assert_eq!((lab.rows(), lab.cols()), (1, 2));
        assert_eq!(lab.goal(), Cell(0, 1));
    }

    #[test]
    fn errors() {
        assert_eq!(
            parse_labyrinth("S.", MazeFormat::Ascii),
            Err(MazeError::MissingMarker('G'))
        );
        assert_eq!(
            parse_labyrinth("SG\nS.", MazeFormat::Ascii),
            Err(MazeError::DuplicateMarker('S'))
        );
        assert_eq!(
            parse_labyrinth("S..\nG.", MazeFormat::Ascii),
            Err(MazeError::Ragged {
                line: 2,
                expected: 3,
                found: 2
            })
        );
        assert!(matches!(
            parse_labyrinth("SxG", MazeFormat::Ascii),
            Err(MazeError::BadChar { ch: 'x', .. })
        ));
        assert_eq!(parse_labyrinth("\n\n", MazeFormat::Ascii), Err(MazeError::Empty));
        assert!(matches!(
            parse_labyrinth("{\"rows\":", MazeFormat::Json),
            Err(MazeError::Json(_))
        ));
    }

    #[test]
    fn json_input() {
        let lab = parse_labyrinth(
            r#"{"rows":1,"cols":2,"blocked":[],"start":[0,0],"goal":[0,1]}"#,
            MazeFormat::Json,
        )
        .unwrap();
        assert_eq!(lab, parse_labyrinth("SG", MazeFormat::Ascii).unwrap());
    }

    #[test]
    fn crlf_and_trailing_blank_lines() {
        let lab = parse_labyrinth("S.\r\n.G\r\n\r\n", MazeFormat::Ascii).unwrap();
        assert_eq!(lab.goal(), Cell(1, 1));
    }
}
