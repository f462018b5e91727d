use std::collections::HashMap;
use std::io::{BufRead, BufReader, Read};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::post::{MemePost, Subreddit};
use super::schema::{RecordFormat, Schema};
use crate::error::Result;

/// A record that could not be turned into a [`MemePost`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordError {
    /// 1-based line in the input file.
    pub line: usize,
    pub field: Option<String>,
    pub message: String,
}

impl std::fmt::Display for RecordError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.field {
            Some(field) => write!(f, "line {}: field `{}`: {}", self.line, field, self.message),
            None => write!(f, "line {}: {}", self.line, self.message),
        }
    }
}

#[derive(Debug, Default, Clone, PartialEq)]
pub struct ParseOutcome {
    pub posts: Vec<MemePost>,
    pub errors: Vec<RecordError>,
}

enum Raw<'a> {
    Json(&'a Value),
    Text(&'a str),
}

trait Record {
    fn get(&self, key: &str) -> Option<Raw<'_>>;
}

impl Record for serde_json::Map<String, Value> {
    fn get(&self, key: &str) -> Option<Raw<'_>> {
        if let Some(v) = serde_json::Map::get(self, key) {
            return Some(Raw::Json(v));
        }
        let mut parts = key.split('.');
        let mut cur = serde_json::Map::get(self, parts.next()?)?;
        for part in parts {
            cur = cur.as_object()?.get(part)?;
        }
        Some(Raw::Json(cur))
    }
}

struct CsvRow<'a> {
    header: &'a HashMap<String, usize>,
    fields: Vec<String>,
}

impl Record for CsvRow<'_> {
    fn get(&self, key: &str) -> Option<Raw<'_>> {
        self.header.get(key).and_then(|&i| self.fields.get(i)).map(|s| Raw::Text(s.as_str()))
    }
}

type FieldResult<T> = std::result::Result<Option<T>, String>;

fn is_blank(raw: &Raw<'_>) -> bool {
    match raw {
        Raw::Json(Value::Null) => true,
        Raw::Json(Value::String(s)) => s.trim().is_empty(),
        Raw::Text(s) => s.trim().is_empty(),
        _ => false,
    }
}

fn text_of(raw: Raw<'_>) -> FieldResult<String> {
    if is_blank(&raw) {
        return Ok(None);
    }
    Ok(Some(match raw {
        Raw::Json(Value::String(s)) => s.clone(),
        Raw::Json(v) => v.to_string(),
        Raw::Text(s) => s.to_string(),
    }))
}

fn float_of(raw: Raw<'_>) -> FieldResult<f64> {
    if is_blank(&raw) {
        return Ok(None);
    }
    let v = match raw {
        Raw::Json(Value::Number(n)) => n.as_f64().ok_or("not a number")?,
        Raw::Json(Value::String(s)) => s.trim().parse::<f64>().map_err(|e| e.to_string())?,
        Raw::Text(s) => s.trim().parse::<f64>().map_err(|e| e.to_string())?,
        Raw::Json(other) => return Err(format!("expected a number, found {other}")),
    };
    if v.is_finite() {
        Ok(Some(v))
    } else {
        Err("non-finite number".into())
    }
}

fn int_of(raw: Raw<'_>) -> FieldResult<i64> {
    if let Raw::Json(Value::Number(n)) = &raw {
        if let Some(i) = n.as_i64() {
            return Ok(Some(i));
        }
    }
    if let Raw::Text(s) = &raw {
        if let Ok(i) = s.trim().parse::<i64>() {
            return Ok(Some(i));
        }
    }
    match float_of(raw)? {
        None => Ok(None),
        Some(f) if f.fract() == 0.0 && f.abs() < 9.0e15 => Ok(Some(f as i64)),
        Some(f) => Err(format!("expected an integer, found {f}")),
    }
}

fn count_of(raw: Raw<'_>) -> FieldResult<u64> {
    match int_of(raw)? {
        None => Ok(None),
        Some(i) if i >= 0 => Ok(Some(i as u64)),
        Some(i) => Err(format!("expected a nonnegative integer, found {i}")),
    }
}

fn bool_of(raw: Raw<'_>) -> FieldResult<bool> {
    if is_blank(&raw) {
        return Ok(None);
    }
    let s = match raw {
        Raw::Json(Value::Bool(b)) => return Ok(Some(*b)),
        Raw::Json(Value::Number(n)) => n.to_string(),
        Raw::Json(Value::String(s)) => s.clone(),
        Raw::Text(s) => s.to_string(),
        Raw::Json(other) => return Err(format!("expected a boolean, found {other}")),
    };
    match s.trim().to_ascii_lowercase().as_str() {
        "true" | "1" | "1.0" | "yes" | "t" => Ok(Some(true)),
        "false" | "0" | "0.0" | "no" | "f" => Ok(Some(false)),
        other => Err(format!("expected a boolean, found `{other}`")),
    }
}

/// Splits a list cell. Accepts a JSON array, a Python-style list literal
/// (`['a', 'b']`), or `|`-separated text.
fn list_items(raw: Raw<'_>) -> FieldResult<Vec<String>> {
    if is_blank(&raw) {
        return Ok(None);
    }
    let text = match raw {
        Raw::Json(Value::Array(items)) => {
            return Ok(Some(
                items
                    .iter()
                    .map(|v| match v {
                        Value::String(s) => s.clone(),
                        other => other.to_string(),
                    })
                    .collect(),
            ))
        }
        Raw::Json(Value::String(s)) => s.clone(),
        Raw::Text(s) => s.to_string(),
        Raw::Json(other) => return Err(format!("expected a list, found {other}")),
    };
    let t = text.trim();
    if let Some(inner) = t.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
        return Ok(Some(split_list_literal(inner)?));
    }
    Ok(Some(t.split('|').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect()))
}

fn split_list_literal(inner: &str) -> std::result::Result<Vec<String>, String> {
    let mut items = Vec::new();
    let mut chars = inner.chars().peekable();
    loop {
        while matches!(chars.peek(), Some(c) if c.is_whitespace() || *c == ',') {
            chars.next();
        }
        let Some(&c) = chars.peek() else { break };
        if c == '\'' || c == '"' {
            chars.next();
            let mut item = String::new();
            loop {
                match chars.next() {
                    Some('\\') => {
                        if let Some(esc) = chars.next() {
                            item.push(esc);
                        }
                    }
                    Some(ch) if ch == c => break,
                    Some(ch) => item.push(ch),
                    None => return Err("unterminated quoted list item".into()),
                }
            }
            items.push(item);
        } else {
            let mut item = String::new();
            while let Some(&ch) = chars.peek() {
                if ch == ',' {
                    break;
                }
                item.push(ch);
                chars.next();
            }
            items.push(item.trim().to_string());
        }
    }
    Ok(items)
}

fn floats_of(raw: Raw<'_>) -> FieldResult<Vec<f64>> {
    if let Raw::Json(Value::Array(items)) = &raw {
        return items
            .iter()
            .map(|v| float_of(Raw::Json(v))?.ok_or_else(|| "empty list item".to_string()))
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(Some);
    }
    match list_items(raw)? {
        None => Ok(None),
        Some(items) => items
            .iter()
            .map(|s| s.trim().parse::<f64>().map_err(|e| format!("`{s}`: {e}")))
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(Some),
    }
}

fn build_post<R: Record>(rec: &R, schema: &Schema, line: usize) -> std::result::Result<MemePost, RecordError> {
    let f = &schema.fields;
    let err = |field: &str, message: String| RecordError { line, field: Some(field.to_string()), message };
    macro_rules! field {
        ($key:expr, $conv:ident) => {
            match rec.get($key) {
                None => None,
                Some(raw) => $conv(raw).map_err(|m| err($key, m))?,
            }
        };
    }
    macro_rules! required {
        ($key:expr, $conv:ident) => {
            field!($key, $conv).ok_or_else(|| err($key, "missing mandatory field".into()))?
        };
    }
    macro_rules! optional {
        ($key:expr, $conv:ident) => {
            match $key {
                Some(k) => field!(k.as_str(), $conv),
                None => None,
            }
        };
    }

    let id: String = required!(&f.id, text_of);
    let ups = required!(&f.ups, count_of);
    let subreddit_name: String = required!(&f.subreddit, text_of);
    let subreddit: Subreddit = subreddit_name.parse().map_err(|e: crate::Error| err(&f.subreddit, e.to_string()))?;
    let subscribers = required!(&f.subscribers, count_of);
    if subscribers < 1 {
        return Err(err(&f.subscribers, "subscribers must be >= 1".into()));
    }
    let created_utc = required!(&f.created_utc, int_of);

    let thumb_height = field!(&f.thumb_height, float_of).unwrap_or(0.0);
    let thumb_width = field!(&f.thumb_width, float_of).unwrap_or(0.0);
    let vgg_labels = optional!(&f.vgg_labels, list_items);
    let vgg_probs = optional!(&f.vgg_probs, floats_of);

    let post = MemePost {
        id,
        created_utc,
        ups,
        is_nsfw: field!(&f.is_nsfw, bool_of).unwrap_or(false),
        subreddit,
        subscribers,
        thumb_height,
        thumb_width,
        title: field!(&f.title, text_of).unwrap_or_default(),
        media_ref: field!(&f.media_ref, text_of).unwrap_or_default(),
        raw_text: optional!(&f.raw_text, text_of),
        processed_words: optional!(&f.processed_words, list_items),
        vgg_labels,
        vgg_probs,
        sentiment: optional!(&f.sentiment, float_of),
        dead_link: optional!(&f.dead_link, bool_of).unwrap_or(false),
    };
    post.validate().map_err(|e| RecordError { line, field: None, message: e.to_string() })?;
    Ok(post)
}

/// Reads an archive file. Malformed records are reported in
/// [`ParseOutcome::errors`] and skipped; well-formed ones keep input order.
pub fn parse_records<R: Read>(input: R, schema: &Schema) -> Result<ParseOutcome> {
    match schema.format {
        RecordFormat::Jsonl => parse_jsonl(input, schema),
        RecordFormat::Csv => parse_csv(input, schema),
    }
}

fn collect(results: Vec<std::result::Result<MemePost, RecordError>>) -> ParseOutcome {
    let mut out = ParseOutcome::default();
    for r in results {
        match r {
            Ok(p) => out.posts.push(p),
            Err(e) => out.errors.push(e),
        }
    }
    out
}

fn parse_jsonl<R: Read>(input: R, schema: &Schema) -> Result<ParseOutcome> {
    let mut lines = Vec::new();
    for (i, line) in BufReader::new(input).lines().enumerate() {
        let line = line.map_err(|e| crate::Error::data(format!("line {}: {e}", i + 1)))?;
        if !line.trim().is_empty() {
            lines.push((i + 1, line));
        }
    }
    let results = lines
        .par_iter()
        .map(|(line_no, line)| {
            let value: Value = serde_json::from_str(line).map_err(|e| RecordError {
                line: *line_no,
                field: None,
                message: format!("malformed JSON: {e}"),
            })?;
            let obj = value.as_object().ok_or_else(|| RecordError {
                line: *line_no,
                field: None,
                message: "record is not a JSON object".into(),
            })?;
            build_post(obj, schema, *line_no)
        })
        .collect();
    Ok(collect(results))
}

fn parse_csv<R: Read>(input: R, schema: &Schema) -> Result<ParseOutcome> {
    let mut reader = csv::ReaderBuilder::new().delimiter(schema.delimiter as u8).flexible(true).from_reader(input);
    let header: HashMap<String, usize> = match reader.headers() {
        Ok(h) => h.iter().enumerate().map(|(i, name)| (name.trim().to_string(), i)).collect(),
        Err(e) if matches!(e.kind(), csv::ErrorKind::Io(_)) => return Err(e.into()),
        Err(_) => HashMap::new(),
    };
    let mut rows = Vec::new();
    let mut early_errors = Vec::new();
    for record in reader.records() {
        match record {
            Ok(r) => {
                let line = r.position().map(|p| p.line() as usize).unwrap_or(0);
                rows.push((line, r.iter().map(str::to_string).collect::<Vec<_>>()));
            }
            Err(e) => {
                let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
                early_errors
                    .push((line, Err(RecordError { line, field: None, message: format!("malformed row: {e}") })));
            }
        }
    }
    let mut results: Vec<(usize, std::result::Result<MemePost, RecordError>)> = rows
        .into_par_iter()
        .map(|(line, fields)| {
            let row = CsvRow { header: &header, fields };
            (line, build_post(&row, schema, line))
        })
        .collect();
    results.extend(early_errors);
    results.sort_by_key(|(line, _)| *line);
    Ok(collect(results.into_iter().map(|(_, r)| r).collect()))
}
