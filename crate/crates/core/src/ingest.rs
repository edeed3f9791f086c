//! JSONL post ingestion and per-author timelines.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufRead, BufReader};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

/// Lines inspected before deciding whether a file is JSONL posts at all.
pub const SCHEMA_SAMPLE: usize = 1000;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot read {path}: {source}")]
    Unreadable { path: PathBuf, source: io::Error },
    #[error("{path}: {malformed} of the first {sampled} lines are not posts")]
    SchemaError { path: PathBuf, malformed: usize, sampled: usize },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PostParseError {
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error("missing or invalid field `{0}`")]
    Field(&'static str),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Post {
    pub id: String,
    pub author_id: String,
    /// Seconds since the Unix epoch.
    pub timestamp: i64,
    pub text: String,
    pub is_retweet: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile_location: Option<String>,
}

fn parse_timestamp(v: &Value) -> Option<i64> {
    match v {
        Value::Number(n) => n.as_i64().or_else(|| n.as_f64().filter(|f| f.fract() == 0.0).map(|f| f as i64)),
        Value::String(s) => s
            .trim()
            .parse::<i64>()
            .ok()
            .or_else(|| chrono::DateTime::parse_from_rfc3339(s.trim()).ok().map(|d| d.timestamp())),
        _ => None,
    }
}

/// Parses one JSONL line. Timestamps may be integer epoch seconds or RFC 3339.
pub fn parse_post_line(line: &str) -> Result<Post, PostParseError> {
    let value: Value = serde_json::from_str(line).map_err(|e| PostParseError::Json(e.to_string()))?;
    let obj = value.as_object().ok_or(PostParseError::Json("not an object".into()))?;
    let string = |key: &'static str| -> Result<String, PostParseError> {
        match obj.get(key) {
            Some(Value::String(s)) if !s.is_empty() => Ok(s.clone()),
            Some(Value::Number(n)) if key != "text" => Ok(n.to_string()),
            _ => Err(PostParseError::Field(key)),
        }
    };
    let id = string("id")?;
    let author_id = string("author_id")?;
    let timestamp = obj
        .get("timestamp")
        .and_then(parse_timestamp)
        .filter(|t| *t > 0)
        .ok_or(PostParseError::Field("timestamp"))?;
    let text = match obj.get("text") {
        Some(Value::String(s)) => s.clone(),
        _ => return Err(PostParseError::Field("text")),
    };
    let is_retweet = obj.get("is_retweet").and_then(Value::as_bool).ok_or(PostParseError::Field("is_retweet"))?;
    let profile_location = match obj.get("profile_location") {
        None | Some(Value::Null) => None,
        Some(Value::String(s)) => Some(s.clone()),
        Some(_) => return Err(PostParseError::Field("profile_location")),
    };
    Ok(Post { id, author_id, timestamp, text, is_retweet, profile_location })
}

/// Errors unless more than half of `lines` parse.
pub fn check_schema(path: &Path, lines: &[String]) -> Result<(), IngestError> {
    let sample: Vec<&String> = lines.iter().filter(|l| !l.trim().is_empty()).take(SCHEMA_SAMPLE).collect();
    let malformed = sample.iter().filter(|l| parse_post_line(l).is_err()).count();
    if malformed * 2 > sample.len() {
        return Err(IngestError::SchemaError { path: path.into(), malformed, sampled: sample.len() });
    }
    Ok(())
}

/// Streaming post reader over one or more JSONL files. Malformed lines are
/// skipped and counted; I/O failures end the stream with an error item.
pub struct PostReader {
    files: std::vec::IntoIter<PathBuf>,
    current: Option<(PathBuf, io::Lines<BufReader<File>>)>,
    pending: std::collections::VecDeque<String>,
    skipped: u64,
    read: u64,
    failed: bool,
}

impl PostReader {
    pub fn skipped(&self) -> u64 {
        self.skipped
    }

    pub fn read(&self) -> u64 {
        self.read
    }

    fn open_next(&mut self) -> Result<bool, IngestError> {
        let Some(path) = self.files.next() else { return Ok(false) };
        let (lines, head) = open_with_sample(&path)?;
        self.pending.extend(head);
        self.current = Some((path, lines));
        Ok(true)
    }
}

/// Opens `path`, reads up to [`SCHEMA_SAMPLE`] lines and checks them.
pub fn open_with_sample(path: &Path) -> Result<(io::Lines<BufReader<File>>, Vec<String>), IngestError> {
    let unreadable = |source| IngestError::Unreadable { path: path.into(), source };
    let mut lines = BufReader::new(File::open(path).map_err(unreadable)?).lines();
    let mut head = Vec::new();
    for line in lines.by_ref() {
        head.push(line.map_err(unreadable)?);
        if head.len() == SCHEMA_SAMPLE {
            break;
        }
    }
    check_schema(path, &head)?;
    Ok((lines, head))
}

impl Iterator for PostReader {
    type Item = Result<Post, IngestError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed {
            return None;
        }
        loop {
            let line = if let Some(l) = self.pending.pop_front() {
                l
            } else {
                let next = match &mut self.current {
                    Some((path, lines)) => match lines.next() {
                        Some(Ok(l)) => Some(Ok(l)),
                        Some(Err(source)) => Some(Err(IngestError::Unreadable { path: path.clone(), source })),
                        None => None,
                    },
                    None => None,
                };
                match next {
                    Some(Ok(l)) => l,
                    Some(Err(e)) => {
                        self.failed = true;
                        return Some(Err(e));
                    }
                    None => match self.open_next() {
                        Ok(true) => continue,
                        Ok(false) => return None,
                        Err(e) => {
                            self.failed = true;
                            return Some(Err(e));
                        }
                    },
                }
            };
            if line.trim().is_empty() {
                continue;
            }
            match parse_post_line(&line) {
                Ok(p) => {
                    self.read += 1;
                    return Some(Ok(p));
                }
                Err(_) => self.skipped += 1,
            }
        }
    }
}

/// Reads posts from one file.
pub fn read_posts(path: impl AsRef<Path>) -> PostReader {
    read_posts_many([path.as_ref().to_path_buf()])
}

/// Reads posts from several files in order.
pub fn read_posts_many(paths: impl IntoIterator<Item = PathBuf>) -> PostReader {
    PostReader {
        files: paths.into_iter().collect::<Vec<_>>().into_iter(),
        current: None,
        pending: Default::default(),
        skipped: 0,
        read: 0,
        failed: false,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuthorTimeline {
    pub author_id: String,
    /// Ascending by timestamp; ties keep input order.
    pub posts: Vec<Post>,
    pub span_days: f64,
}

impl AuthorTimeline {
    pub fn new(author_id: impl Into<String>, mut posts: Vec<Post>) -> Self {
        posts.sort_by_key(|p| p.timestamp);
        let span_days = match (posts.first(), posts.last()) {
            (Some(a), Some(b)) => (b.timestamp - a.timestamp) as f64 / 86_400.0,
            _ => 0.0,
        };
        AuthorTimeline { author_id: author_id.into(), posts, span_days }
    }
}

/// Groups posts by author. Partial groupings from parallel readers can be
/// combined with [`merge_timelines`].
pub fn group_timelines(posts: impl IntoIterator<Item = Post>) -> BTreeMap<String, AuthorTimeline> {
    let mut by_author: BTreeMap<String, Vec<Post>> = BTreeMap::new();
    for p in posts {
        by_author.entry(p.author_id.clone()).or_default().push(p);
    }
    by_author.into_iter().map(|(a, posts)| (a.clone(), AuthorTimeline::new(a, posts))).collect()
}

pub fn merge_timelines(
    mut a: BTreeMap<String, AuthorTimeline>,
    b: BTreeMap<String, AuthorTimeline>,
) -> BTreeMap<String, AuthorTimeline> {
    for (author, tl) in b {
        let merged = match a.remove(&author) {
            Some(existing) => {
                let mut posts = existing.posts;
                posts.extend(tl.posts);
                AuthorTimeline::new(author.clone(), posts)
            }
            None => tl,
        };
        a.insert(author, merged);
    }
    a
}
