//! Reading chains from text or JSON.
//!
//! Text format: one vertex per line as three whitespace-separated numbers,
//! `#` starts a comment, a blank line ends a chain, and an optional first
//! line `open` or `closed` sets the chain type (default open).
//!
//! ```text
//! # unit square
//! closed
//! 0 0 0
//! 1 0 0
//! 1 1 0
//! 0 1 0
//! ```
//!
//! JSON: `{"closed": bool, "vertices": [[x, y, z], ...]}` or an array of those.

use crate::chain::PolyChain;
use crate::error::{Error, Result};
use crate::vec3::Point3;
use std::path::Path;

pub fn parse_chain_file(path: impl AsRef<Path>) -> Result<Vec<PolyChain>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Unsupported(format!("cannot read {}: {e}", path.display())))?;
    parse_chains(&text)
}

/// Parses either format, picking JSON when the first non-blank character is `{` or `[`.
pub fn parse_chains(text: &str) -> Result<Vec<PolyChain>> {
    match text.trim_start().chars().next() {
        Some('{') | Some('[') => parse_json(text),
        _ => parse_text(text),
    }
}

pub fn parse_json(text: &str) -> Result<Vec<PolyChain>> {
    let located = |e: serde_json::Error| Error::Parse { line: e.line(), column: e.column(), message: e.to_string() };
    let chains = if text.trim_start().starts_with('[') {
        serde_json::from_str::<Vec<PolyChain>>(text).map_err(located)?
    } else {
        vec![serde_json::from_str::<PolyChain>(text).map_err(located)?]
    };
    if chains.is_empty() {
        return Err(Error::Parse { line: 1, column: 1, message: "no chains".into() });
    }
    Ok(chains)
}

struct Block {
    start: usize,
    closed: Option<bool>,
    vertices: Vec<Point3>,
}

impl Block {
    fn new(start: usize) -> Self {
        Block { start, closed: None, vertices: Vec::new() }
    }

    fn finish(self) -> Result<PolyChain> {
        PolyChain::new(self.vertices, self.closed.unwrap_or(false))
            .map_err(|e| Error::InvalidChain(format!("chain starting at line {}: {e}", self.start)))
    }
}

pub fn parse_text(text: &str) -> Result<Vec<PolyChain>> {
    let mut chains = Vec::new();
    let mut block: Option<Block> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            // comment-only lines do not end a chain
            if raw.trim().is_empty() {
                if let Some(b) = block.take() {
                    chains.push(b.finish()?);
                }
            }
            continue;
        }
        let b = block.get_or_insert_with(|| Block::new(line));
        let keyword = content.trim();
        if keyword == "open" || keyword == "closed" {
            if b.closed.is_some() || !b.vertices.is_empty() {
                let column = raw.find(keyword).unwrap_or(0) + 1;
                return Err(Error::Parse {
                    line,
                    column,
                    message: format!("`{keyword}` must be the first line of a chain"),
                });
            }
            b.closed = Some(keyword == "closed");
            continue;
        }
        b.vertices.push(parse_vertex(content, line)?);
    }
    if let Some(b) = block {
        chains.push(b.finish()?);
    }
    if chains.is_empty() {
        return Err(Error::Parse { line: 1, column: 1, message: "no chains".into() });
    }
    Ok(chains)
}

fn parse_vertex(content: &str, line: usize) -> Result<Point3> {
    let mut xyz = [0.0; 3];
    let mut count = 0;
    let mut rest = content;
    let mut offset = 0;
    while let Some(start) = rest.find(|c: char| !c.is_whitespace()) {
        let token_end = rest[start..].find(char::is_whitespace).map_or(rest.len(), |e| start + e);
        let token = &rest[start..token_end];
        let column = offset + start + 1;
        if count == 3 {
            return Err(Error::Parse { line, column, message: "expected exactly three coordinates".into() });
        }
        let value: f64 = token.parse().map_err(|_| Error::Parse {
            line,
            column,
            message: format!("`{token}` is not a number"),
        })?;
        if !value.is_finite() {
            return Err(Error::Parse { line, column, message: format!("`{token}` is not finite") });
        }
        xyz[count] = value;
        count += 1;
        offset += token_end;
        rest = &rest[token_end..];
    }
    if count < 3 {
        return Err(Error::Parse {
            line,
            column: content.trim_end().len() + 1,
            message: format!("expected three coordinates, found {count}"),
        });
    }
    Ok(Point3::from(xyz))
}

/// Renders chains in the text format, readable by [`parse_text`].
pub fn to_text(chains: &[PolyChain]) -> String {
    let mut out = String::new();
    for (k, c) in chains.iter().enumerate() {
        if k > 0 {
            out.push('\n');
        }
        out.push_str(if c.is_closed() { "closed\n" } else { "open\n" });
        for p in c.vertices() {
            out.push_str(&format!("{:?} {:?} {:?}\n", p.x, p.y, p.z));
        }
    }
    out
}
