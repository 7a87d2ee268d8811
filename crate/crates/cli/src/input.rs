//! Instance files: a JSON document, or one vector per line with `--plain`.

use std::fmt;
use std::path::Path;

use num_bigint::BigInt;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use zonostrat_core::linalg::IntMatrix;
use zonostrat_core::Instance;

/// Arbitrary-precision integer stored as a JSON number when it fits in
/// `i64` and as a decimal string otherwise.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Int(pub BigInt);

impl Serialize for Int {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match i64::try_from(&self.0) {
            Ok(v) => s.serialize_i64(v),
            Err(_) => s.serialize_str(&self.0.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for Int {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(i64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Number(v) => Ok(Int(v.into())),
            Raw::Text(t) => t
                .trim()
                .parse::<BigInt>()
                .map(Int)
                .map_err(|_| serde::de::Error::custom(format!("invalid integer {t:?}"))),
        }
    }
}

impl fmt::Display for Int {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

pub fn ints(v: &[BigInt]) -> Vec<Int> {
    v.iter().cloned().map(Int).collect()
}

fn bigs(v: &[Int]) -> Vec<BigInt> {
    v.iter().map(|x| x.0.clone()).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub vectors: Vec<Vec<Int>>,
    /// Optional `(k−r) × k` matrix used for output coordinates.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub paper_pi: Option<Vec<Vec<Int>>>,
}

/// An input problem: a file, a field, or a line.
#[derive(Debug, thiserror::Error)]
pub enum InputError {
    #[error("cannot read {path}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}")]
    Json { path: String, source: serde_json::Error },
    #[error("{path}: line {line}: {message}")]
    Line { path: String, line: usize, message: String },
    #[error("{path}: field {field}: {message}")]
    Field { path: String, field: String, message: String },
}

/// A validated instance file.
#[derive(Clone, Debug)]
pub struct LoadedInstance {
    pub name: Option<String>,
    pub instance: Instance,
    /// `T` with `paper_pi = T · pi`, when a printed presentation was given.
    pub printed: Option<IntMatrix>,
}

impl LoadedInstance {
    /// Converts canonical point coordinates to the requested ones.
    pub fn coordinates(&self, p: &[BigInt], printed: bool) -> Vec<BigInt> {
        match (&self.printed, printed) {
            (Some(t), true) => t.mul_vec(p),
            _ => p.to_vec(),
        }
    }
}

pub fn read_instance(path: &Path, plain: bool) -> Result<LoadedInstance, InputError> {
    let shown = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| InputError::Io {
        path: shown.clone(),
        source,
    })?;
    let file = if plain {
        parse_plain(&text).map_err(|(line, message)| InputError::Line {
            path: shown.clone(),
            line,
            message,
        })?
    } else {
        serde_json::from_str::<InstanceFile>(&text).map_err(|source| InputError::Json {
            path: shown.clone(),
            source,
        })?
    };
    validate(file).map_err(|(field, message)| InputError::Field {
        path: shown,
        field,
        message,
    })
}

/// One vector per line, entries separated by whitespace or commas; `#`
/// starts a comment.
pub fn parse_plain(text: &str) -> Result<InstanceFile, (usize, String)> {
    let mut vectors = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let entries = content
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<BigInt>().map(Int).map_err(|_| (i + 1, format!("invalid integer {s:?}"))))
            .collect::<Result<Vec<_>, _>>()?;
        vectors.push(entries);
    }
    Ok(InstanceFile {
        name: None,
        vectors,
        paper_pi: None,
    })
}

pub fn validate(file: InstanceFile) -> Result<LoadedInstance, (String, String)> {
    let Some(first) = file.vectors.first() else {
        return Err(("vectors".into(), "at least one vector is required".into()));
    };
    let n = first.len();
    for (j, v) in file.vectors.iter().enumerate() {
        if v.len() != n {
            return Err((
                format!("vectors[{j}]"),
                format!("dimension mismatch: {} entries, expected {n}", v.len()),
            ));
        }
    }
    let instance = Instance::new(file.vectors.iter().map(|v| bigs(v)).collect())
        .map_err(|e| ("vectors".to_string(), e.to_string()))?;
    let printed = match &file.paper_pi {
        None => None,
        Some(rows) => {
            let k = instance.k();
            if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != k) {
                return Err((
                    format!("paper_pi[{i}]"),
                    format!("dimension mismatch: {} entries, expected {k}", r.len()),
                ));
            }
            let m = IntMatrix::from_rows(rows.iter().map(|r| bigs(r)).collect(), k);
            Some(
                instance
                    .presentation_change(&m)
                    .map_err(|e| ("paper_pi".to_string(), e.to_string()))?,
            )
        }
    };
    Ok(LoadedInstance {
        name: file.name,
        instance,
        printed,
    })
}
