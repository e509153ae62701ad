//! Edge-list text formats.
//!
//! ```text
//! bipartite <n1> <n2>        digraph <n>
//! <x> <y>                    <tail> <head>
//! ...                        ...
//! ```
//!
//! Blank lines and `#` comments are ignored, except that a standard graph
//! records its padding as `# isolated-padding <k>`.

use std::io::{BufRead, Write};

use super::{BipartiteGraph, Digraph};
use crate::error::{Error, Result};

const PADDING_TAG: &str = "# isolated-padding";

pub fn write_bipartite<W: Write>(g: &BipartiteGraph, mut w: W) -> Result<()> {
    writeln!(w, "bipartite {} {}", g.n1(), g.n2())?;
    if g.padding() > 0 {
        writeln!(w, "{PADDING_TAG} {}", g.padding())?;
    }
    for &(x, y) in g.graph().edges() {
        writeln!(w, "{x} {y}")?;
    }
    Ok(())
}

pub fn write_digraph<W: Write>(d: &Digraph, mut w: W) -> Result<()> {
    writeln!(w, "digraph {}", d.n())?;
    for &(u, v) in d.arcs() {
        writeln!(w, "{u} {v}")?;
    }
    Ok(())
}

struct Lines<R> {
    inner: std::io::Lines<R>,
    line_no: usize,
}

impl<R: BufRead> Lines<R> {
    fn new(r: R) -> Self {
        Lines {
            inner: r.lines(),
            line_no: 0,
        }
    }

    /// Next non-blank line with its number; `#` lines are handed to `on_comment`.
    fn next_data(
        &mut self,
        on_comment: &mut dyn FnMut(&str, usize) -> Result<()>,
    ) -> Result<Option<(usize, String)>> {
        for line in self.inner.by_ref() {
            self.line_no += 1;
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            if trimmed.starts_with('#') {
                on_comment(trimmed, self.line_no)?;
                continue;
            }
            return Ok(Some((self.line_no, trimmed.to_string())));
        }
        Ok(None)
    }
}

fn parse_fields<const K: usize>(line: &str, line_no: usize) -> Result<[usize; K]> {
    let mut out = [0usize; K];
    let mut it = line.split_whitespace();
    for slot in out.iter_mut() {
        let tok = it.next().ok_or_else(|| Error::Parse {
            line: line_no,
            msg: format!("expected {K} integers"),
        })?;
        *slot = tok.parse().map_err(|_| Error::Parse {
            line: line_no,
            msg: format!("not a non-negative integer: {tok:?}"),
        })?;
    }
    if it.next().is_some() {
        return Err(Error::Parse {
            line: line_no,
            msg: format!("expected exactly {K} integers"),
        });
    }
    Ok(out)
}

fn header<'a>(line: &'a str, keyword: &str, line_no: usize) -> Result<&'a str> {
    line.strip_prefix(keyword)
        .filter(|rest| rest.starts_with(char::is_whitespace))
        .ok_or_else(|| Error::Parse {
            line: line_no,
            msg: format!("expected header starting with {keyword:?}"),
        })
}

pub fn read_bipartite<R: BufRead>(r: R) -> Result<BipartiteGraph> {
    let mut lines = Lines::new(r);
    let mut padding = 0usize;
    let mut on_comment = |c: &str, line_no: usize| -> Result<()> {
        if let Some(rest) = c.strip_prefix(PADDING_TAG) {
            padding = rest.trim().parse().map_err(|_| Error::Parse {
                line: line_no,
                msg: "bad padding count".into(),
            })?;
        }
        Ok(())
    };
    let (line_no, first) = lines.next_data(&mut on_comment)?.ok_or(Error::Parse {
        line: 0,
        msg: "empty input".into(),
    })?;
    let [n1, n2] = parse_fields::<2>(header(&first, "bipartite", line_no)?, line_no)?;
    let mut edges = Vec::new();
    while let Some((line_no, line)) = lines.next_data(&mut on_comment)? {
        let [x, y] = parse_fields::<2>(&line, line_no)?;
        edges.push((x, y));
    }
    if padding > n1 {
        return Err(Error::Parse {
            line: 0,
            msg: format!("padding {padding} exceeds n1 = {n1}"),
        });
    }
    Ok(BipartiteGraph::new(n1, n2, edges)?.with_padding(padding))
}

pub fn read_digraph<R: BufRead>(r: R) -> Result<Digraph> {
    let mut lines = Lines::new(r);
    let mut ignore = |_: &str, _: usize| Ok(());
    let (line_no, first) = lines.next_data(&mut ignore)?.ok_or(Error::Parse {
        line: 0,
        msg: "empty input".into(),
    })?;
    let [n] = parse_fields::<1>(header(&first, "digraph", line_no)?, line_no)?;
    let mut arcs = Vec::new();
    while let Some((line_no, line)) = lines.next_data(&mut ignore)? {
        let [u, v] = parse_fields::<2>(&line, line_no)?;
        arcs.push((u, v));
    }
    Digraph::new(n, arcs)
}
