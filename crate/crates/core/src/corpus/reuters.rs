//! Reader for the Reuters-21578 SGML distribution.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

/// One `<REUTERS>` element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Article {
    pub new_id: String,
    pub topics: Vec<String>,
    pub title: String,
    /// `<BODY>` text with entities decoded; empty when the article has none.
    pub body: String,
}

/// Read a single `.sgm` file, or every `*.sgm` file of a directory in
/// name order.
pub fn read_path(path: &Path) -> Result<Vec<Article>> {
    let files = if path.is_dir() {
        let mut files: Vec<PathBuf> = fs::read_dir(path)
            .map_err(|e| Error::io(path, e))?
            .filter_map(|entry| entry.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|ext| ext == "sgm"))
            .collect();
        files.sort();
        files
    } else {
        vec![path.to_path_buf()]
    };
    let mut articles = Vec::new();
    for file in files {
        let bytes = fs::read(&file).map_err(|e| Error::io(&file, e))?;
        // The collection is not valid UTF-8 throughout; Latin-1 maps every byte.
        let text: String = bytes.iter().map(|&b| b as char).collect();
        articles.extend(parse_sgml(&text)?);
    }
    Ok(articles)
}

/// Parse the contents of one `.sgm` file.
pub fn parse_sgml(text: &str) -> Result<Vec<Article>> {
    let mut articles = Vec::new();
    let mut rest = text;
    let mut offset = 0usize;
    while let Some(start) = rest.find("<REUTERS") {
        let line = line_of(text, offset + start);
        let after = &rest[start..];
        let end = after.find("</REUTERS>").ok_or_else(|| Error::Parse {
            line,
            message: "unterminated <REUTERS> element".into(),
        })?;
        let element = &after[..end];
        articles.push(parse_article(element, line)?);
        let consumed = start + end + "</REUTERS>".len();
        offset += consumed;
        rest = &rest[consumed..];
    }
    Ok(articles)
}

fn line_of(text: &str, byte: usize) -> usize {
    text[..byte].bytes().filter(|&b| b == b'\n').count() + 1
}

fn parse_article(element: &str, line: usize) -> Result<Article> {
    let open_end = element.find('>').ok_or_else(|| Error::Parse {
        line,
        message: "malformed <REUTERS> tag".into(),
    })?;
    let new_id = attribute(&element[..open_end], "NEWID").ok_or_else(|| Error::Parse {
        line,
        message: "<REUTERS> without NEWID".into(),
    })?;
    let topics = inner(element, "TOPICS")
        .map(|t| {
            let mut out = Vec::new();
            let mut rest = t;
            while let Some(d) = inner(rest, "D") {
                out.push(decode_entities(d.trim()));
                let close = rest.find("</D>").map_or(rest.len(), |i| i + 4);
                rest = &rest[close..];
            }
            out
        })
        .unwrap_or_default();
    Ok(Article {
        new_id: new_id.to_string(),
        topics,
        title: inner(element, "TITLE").map(decode_entities).unwrap_or_default(),
        body: inner(element, "BODY").map(decode_entities).unwrap_or_default(),
    })
}

fn attribute<'a>(tag: &'a str, name: &str) -> Option<&'a str> {
    let key = format!("{name}=\"");
    let start = tag.find(&key)? + key.len();
    let len = tag[start..].find('"')?;
    Some(&tag[start..start + len])
}

/// Content between `<tag ...>` and `</tag>`.
fn inner<'a>(s: &'a str, tag: &str) -> Option<&'a str> {
    let open = format!("<{tag}");
    let mut search = 0;
    let start = loop {
        let at = search + s[search..].find(&open)?;
        let next = s[at + open.len()..].chars().next()?;
        if next == '>' || next.is_whitespace() {
            break at;
        }
        search = at + open.len();
    };
    let body_start = start + s[start..].find('>')? + 1;
    let close = format!("</{tag}>");
    let len = s[body_start..].find(&close)?;
    Some(&s[body_start..body_start + len])
}

fn decode_entities(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut rest = s;
    while let Some(amp) = rest.find('&') {
        out.push_str(&rest[..amp]);
        let tail = &rest[amp..];
        let decoded = tail.find(';').filter(|&semi| semi <= 8).and_then(|semi| {
            let name = &tail[1..semi];
            let c = match name {
                "lt" => Some('<'),
                "gt" => Some('>'),
                "amp" => Some('&'),
                "quot" => Some('"'),
                "apos" => Some('\''),
                _ => name
                    .strip_prefix('#')
                    .and_then(|n| n.parse::<u32>().ok())
                    .and_then(char::from_u32),
            }?;
            Some((c, semi + 1))
        });
        match decoded {
            Some((c, len)) => {
                out.push(c);
                rest = &tail[len..];
            }
            None => {
                out.push('&');
                rest = &tail[1..];
            }
        }
    }
    out.push_str(rest);
    out
}
