use std::path::{Path, PathBuf};

use crate::gf2geom::{parse_point, Subspace};
use crate::spread::{Spread, SpreadError, SPREAD_SIZE};

use super::{IoError, ParseError, ParseErrorKind};

/// Spreads read from a text file, with the line number where each block
/// starts.
#[derive(Clone, Debug)]
pub struct SpreadFile {
    pub source: Option<PathBuf>,
    pub spreads: Vec<Spread>,
    pub line_numbers: Vec<usize>,
}

fn err(line: usize, kind: ParseErrorKind) -> ParseError {
    ParseError { file: None, line, kind }
}

/// One `{a,b,c}` group: three distinct collinear points.
fn parse_line(body: &str, line: usize) -> Result<Subspace, ParseError> {
    let toks: Vec<&str> = body.split(',').map(str::trim).collect();
    if toks.len() != 3 {
        return Err(err(line, ParseErrorKind::NotALine(format!("{{{body}}} has {} points", toks.len()))));
    }
    let pts = toks
        .iter()
        .map(|t| parse_point(t, 5))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| err(line, e.into()))?;
    let l = Subspace::span(5, &pts).map_err(|e| err(line, e.into()))?;
    if l.dim() != 2 || pts[0] == pts[1] || pts[0] == pts[2] || pts[1] == pts[2] {
        return Err(err(line, ParseErrorKind::NotALine(format!("{{{body}}}"))));
    }
    Ok(l)
}

/// Parses every block of a spread file. Blocks are separated by blank lines,
/// `#` starts a comment, and a block lists nine `{tok,tok,tok}` groups
/// separated by commas or whitespace, over one or several text lines.
pub fn parse_spreads(text: &str) -> Result<SpreadFile, ParseError> {
    let mut spreads = Vec::new();
    let mut line_numbers = Vec::new();
    let mut block: Vec<(Subspace, usize)> = Vec::new();
    let mut block_start = 0;

    let mut flush = |block: &mut Vec<(Subspace, usize)>, start: usize| -> Result<(), ParseError> {
        if block.is_empty() {
            return Ok(());
        }
        if block.len() != SPREAD_SIZE {
            let error = SpreadError::WrongLineCount {
                expected: SPREAD_SIZE,
                got: block.len(),
            };
            return Err(err(
                start,
                ParseErrorKind::Spread {
                    block: spreads.len() + 1,
                    error,
                    detail: String::new(),
                },
            ));
        }
        let lines: Vec<Subspace> = block.iter().map(|(l, _)| *l).collect();
        let s = Spread::new(&lines).map_err(|e| {
            let (at, detail) = match e {
                SpreadError::DuplicateLine(i, j) | SpreadError::LinesMeet(i, j) => {
                    (block[j].1, format!(": {} and {}", block[i].0.to_compact(), block[j].0.to_compact()))
                }
                _ => (start, String::new()),
            };
            err(
                at,
                ParseErrorKind::Spread {
                    block: spreads.len() + 1,
                    error: e,
                    detail,
                },
            )
        })?;
        spreads.push(s);
        line_numbers.push(start);
        block.clear();
        Ok(())
    };

    for (i, raw) in text.lines().enumerate() {
        let n = i + 1;
        if let Some(c) = raw.chars().find(|&c| !(c == '\t' || (' '..='~').contains(&c))) {
            return Err(err(n, ParseErrorKind::BadCharacter(c)));
        }
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            if raw.trim().is_empty() {
                flush(&mut block, block_start)?;
            }
            continue;
        }
        if block.is_empty() {
            block_start = n;
        }
        let mut rest = content;
        loop {
            rest = rest.trim_start_matches(|c: char| c.is_whitespace() || c == ',');
            if rest.is_empty() {
                break;
            }
            let Some(body) = rest.strip_prefix('{') else {
                return Err(err(n, ParseErrorKind::Syntax(format!("expected '{{' at {rest:?}"))));
            };
            let Some(close) = body.find('}') else {
                return Err(err(n, ParseErrorKind::Syntax("unclosed '{'".into())));
            };
            block.push((parse_line(&body[..close], n)?, n));
            rest = &body[close + 1..];
        }
    }
    flush(&mut block, block_start)?;
    Ok(SpreadFile {
        source: None,
        spreads,
        line_numbers,
    })
}

pub fn read_spread_file(path: &Path) -> Result<SpreadFile, IoError> {
    let text = std::fs::read_to_string(path).map_err(|e| IoError::Read {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    let mut f = parse_spreads(&text).map_err(|mut e| {
        e.file = Some(path.to_path_buf());
        IoError::Parse(e)
    })?;
    f.source = Some(path.to_path_buf());
    Ok(f)
}

/// One spread as a single line of comma-separated groups.
pub fn format_spread(s: &Spread) -> String {
    s.lines().map(|l| l.to_compact()).collect::<Vec<_>>().join(",")
}

/// Blocks separated by blank lines, with an optional comment before each.
pub fn format_spread_file<'a>(spreads: impl IntoIterator<Item = (&'a Spread, Option<String>)>) -> String {
    let blocks: Vec<String> = spreads
        .into_iter()
        .map(|(s, comment)| match comment {
            Some(c) => format!("# {c}\n{}\n", format_spread(s)),
            None => format!("{}\n", format_spread(s)),
        })
        .collect();
    blocks.join("\n")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spread::tests::reference_s1;

    const EX1: &str = "{1,25,125},{15,24,3u},{14,23,5u},{145,234,4u},{12,345,u},{124,34,123},{2,35,235},{245,3,1u},{135,4,2u}";

    #[test]
    fn parses_single_and_multi_line_blocks() {
        let text = format!("# first\n{EX1}\n\n{{1,25,125}} {{15,24,3u}}\n{{14,23,5u}},{{145,234,4u}},{{12,345,u}}\n{{124,34,123}},{{2,35,235}},{{245,3,1u}},{{135,4,2u}} # tail\n");
        let f = parse_spreads(&text).unwrap();
        assert_eq!(f.spreads.len(), 2);
        assert_eq!(f.line_numbers, vec![2, 4]);
        assert_eq!(f.spreads[0], reference_s1());
        assert_eq!(f.spreads[1].line_ids(), reference_s1().line_ids());
    }

    #[test]
    fn round_trip() {
        let s = reference_s1();
        let text = format_spread_file([(&s, Some("reference".to_string())), (&s, None)]);
        let f = parse_spreads(&text).unwrap();
        assert_eq!(f.spreads.len(), 2);
        assert_eq!(f.spreads[0].line_ids(), s.line_ids());
        assert_eq!(
            format_spread_file(f.spreads.iter().map(|s| (s, None))),
            format_spread_file([(&s, None), (&s, None)])
        );
    }

    #[test]
    fn errors_carry_positions() {
        let dup = EX1.replacen("{14,23,5u}", "{1,25,125}", 1);
        let e = parse_spreads(&format!("\n\n{dup}\n")).unwrap_err();
        assert_eq!(e.line, 3);
        assert!(matches!(
            e.kind,
            ParseErrorKind::Spread {
                block: 1,
                error: SpreadError::DuplicateLine(0, 2),
                ..
            }
        ));

        let e = parse_spreads("{1,2,3}").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::NotALine(_)));
        let e = parse_spreads("{1,2,12}\n{1,x,2}").unwrap_err();
        assert_eq!(e.line, 2);
        let e = parse_spreads("{1,2,12}").unwrap_err();
        assert!(matches!(
            e.kind,
            ParseErrorKind::Spread {
                error: SpreadError::WrongLineCount { got: 1, .. },
                ..
            }
        ));
        let e = parse_spreads("{1,2,12").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Syntax(_)));
        let e = parse_spreads("{1,2,12}\n{1,é}").unwrap_err();
        assert_eq!((e.line, e.kind), (2, ParseErrorKind::BadCharacter('é')));
    }
}
