//! The system specification file format.
//!
//! Line-oriented, LF-terminated, `#` comments, whitespace-separated tokens:
//!
//! ```text
//! system "<name>"
//! mode free|table
//! cap <int>
//! vertex <id>
//! arrow <name> deg=<int> src=<id> rng=<id>
//! mul <x> <y> = <z>        # table mode only
//! ```
//!
//! Unknown directives are rejected. Parsing normalizes nothing: the file's
//! declaration order is preserved, and [`SpecFile::serialize`] writes it
//! back out canonically, so parse → serialize → parse is the identity.

use std::collections::HashSet;
use std::fmt;

use pps_core::graded_graph::{
    build_free, build_table, ArrowDecl, BuildError, Generator, GradedSystem, Mode, MulEntry,
};

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum SpecError {
    Parse { line: usize, message: String },
    Semantic { line: usize, message: String },
    Build(BuildError),
}

impl fmt::Display for SpecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpecError::Parse { line, message } => {
                write!(f, "parse error at line {line}: {message}")
            }
            SpecError::Semantic { line: 0, message } => write!(f, "error: {message}"),
            SpecError::Semantic { line, message } => {
                write!(f, "error at line {line}: {message}")
            }
            SpecError::Build(e) => write!(f, "build error: {e}"),
        }
    }
}

impl std::error::Error for SpecError {}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ArrowLine {
    pub name: String,
    pub degree: u32,
    pub src: String,
    pub rng: String,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MulLine {
    pub left: String,
    pub right: String,
    pub result: String,
}

/// A parsed specification file.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SpecFile {
    pub name: String,
    pub mode: Mode,
    pub cap: u32,
    pub vertices: Vec<String>,
    pub arrows: Vec<ArrowLine>,
    pub muls: Vec<MulLine>,
}

fn parse_err(line: usize, message: impl Into<String>) -> SpecError {
    SpecError::Parse {
        line,
        message: message.into(),
    }
}

fn semantic_err(line: usize, message: impl Into<String>) -> SpecError {
    SpecError::Semantic {
        line,
        message: message.into(),
    }
}

fn key_value<'a>(token: &'a str, key: &str, line: usize) -> Result<&'a str, SpecError> {
    token
        .strip_prefix(key)
        .and_then(|rest| rest.strip_prefix('='))
        .ok_or_else(|| parse_err(line, format!("expected `{key}=<value>`, found `{token}`")))
}

/// Declared names may not carry the separators used elsewhere: `·` names
/// composite words, `|` splits generator pairs, `"` quotes system names.
fn check_name(name: &str, line: usize) -> Result<(), SpecError> {
    if name.contains(['·', '|', '"']) {
        return Err(semantic_err(
            line,
            format!("name `{name}` contains a reserved character"),
        ));
    }
    Ok(())
}

pub fn parse_spec(text: &str) -> Result<SpecFile, SpecError> {
    let mut name: Option<String> = None;
    let mut mode: Option<Mode> = None;
    let mut cap: Option<u32> = None;
    let mut vertices: Vec<String> = Vec::new();
    let mut arrows: Vec<ArrowLine> = Vec::new();
    let mut muls: Vec<MulLine> = Vec::new();
    let mut vertex_set: HashSet<String> = HashSet::new();
    let mut names: HashSet<String> = HashSet::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = content.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        match tokens[0] {
            "system" => {
                if tokens.len() != 2 {
                    return Err(parse_err(line, "expected `system \"<name>\"`"));
                }
                let quoted = tokens[1];
                let inner = quoted
                    .strip_prefix('"')
                    .and_then(|s| s.strip_suffix('"'))
                    .ok_or_else(|| parse_err(line, "system name must be double-quoted"))?;
                if name.replace(inner.to_string()).is_some() {
                    return Err(semantic_err(line, "duplicate `system` directive"));
                }
            }
            "mode" => {
                if tokens.len() != 2 {
                    return Err(parse_err(line, "expected `mode free|table`"));
                }
                let m = match tokens[1] {
                    "free" => Mode::Free,
                    "table" => Mode::Table,
                    other => return Err(parse_err(line, format!("unknown mode `{other}`"))),
                };
                if mode.replace(m).is_some() {
                    return Err(semantic_err(line, "duplicate `mode` directive"));
                }
            }
            "cap" => {
                if tokens.len() != 2 {
                    return Err(parse_err(line, "expected `cap <int>`"));
                }
                let c: u32 = tokens[1]
                    .parse()
                    .map_err(|_| parse_err(line, format!("bad cap `{}`", tokens[1])))?;
                if cap.replace(c).is_some() {
                    return Err(semantic_err(line, "duplicate `cap` directive"));
                }
            }
            "vertex" => {
                if tokens.len() != 2 {
                    return Err(parse_err(line, "expected `vertex <id>`"));
                }
                let v = tokens[1].to_string();
                check_name(&v, line)?;
                if !names.insert(v.clone()) {
                    return Err(semantic_err(line, format!("duplicate name `{v}`")));
                }
                vertex_set.insert(v.clone());
                vertices.push(v);
            }
            "arrow" => {
                if tokens.len() != 5 {
                    return Err(parse_err(
                        line,
                        "expected `arrow <name> deg=<int> src=<id> rng=<id>`",
                    ));
                }
                let aname = tokens[1].to_string();
                check_name(&aname, line)?;
                let deg_txt = key_value(tokens[2], "deg", line)?;
                let degree: u32 = deg_txt
                    .parse()
                    .map_err(|_| parse_err(line, format!("bad degree `{deg_txt}`")))?;
                let src = key_value(tokens[3], "src", line)?.to_string();
                let rng = key_value(tokens[4], "rng", line)?.to_string();
                if degree == 0 {
                    return Err(semantic_err(
                        line,
                        format!("arrow `{aname}` has degree 0; identities are implicit"),
                    ));
                }
                if !names.insert(aname.clone()) {
                    return Err(semantic_err(line, format!("duplicate name `{aname}`")));
                }
                for v in [&src, &rng] {
                    if !vertex_set.contains(v) {
                        return Err(semantic_err(line, format!("undeclared vertex `{v}`")));
                    }
                }
                arrows.push(ArrowLine {
                    name: aname,
                    degree,
                    src,
                    rng,
                });
            }
            "mul" => {
                if tokens.len() != 5 || tokens[3] != "=" {
                    return Err(parse_err(line, "expected `mul <x> <y> = <z>`"));
                }
                for t in [tokens[1], tokens[2], tokens[4]] {
                    if !names.contains(t) {
                        return Err(semantic_err(line, format!("undeclared arrow `{t}`")));
                    }
                }
                muls.push(MulLine {
                    left: tokens[1].to_string(),
                    right: tokens[2].to_string(),
                    result: tokens[4].to_string(),
                });
            }
            other => {
                return Err(parse_err(line, format!("unknown directive `{other}`")));
            }
        }
    }

    let name = name.ok_or_else(|| semantic_err(0, "missing `system` directive"))?;
    let mode = mode.ok_or_else(|| semantic_err(0, "missing `mode` directive"))?;
    let cap = cap.ok_or_else(|| semantic_err(0, "missing `cap` directive"))?;
    if mode == Mode::Free && !muls.is_empty() {
        return Err(semantic_err(
            0,
            "`mul` entries are not allowed in free mode",
        ));
    }
    for a in &arrows {
        if a.degree > cap {
            return Err(semantic_err(
                0,
                format!("arrow `{}` has degree {} above cap {cap}", a.name, a.degree),
            ));
        }
    }
    Ok(SpecFile {
        name,
        mode,
        cap,
        vertices,
        arrows,
        muls,
    })
}

impl SpecFile {
    /// Canonical text form; parsing it reproduces this value exactly.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("system \"{}\"\n", self.name));
        out.push_str(&format!(
            "mode {}\n",
            match self.mode {
                Mode::Free => "free",
                Mode::Table => "table",
            }
        ));
        out.push_str(&format!("cap {}\n", self.cap));
        for v in &self.vertices {
            out.push_str(&format!("vertex {v}\n"));
        }
        for a in &self.arrows {
            out.push_str(&format!(
                "arrow {} deg={} src={} rng={}\n",
                a.name, a.degree, a.src, a.rng
            ));
        }
        for m in &self.muls {
            out.push_str(&format!("mul {} {} = {}\n", m.left, m.right, m.result));
        }
        out
    }

    /// Builds the graded system this file describes.
    pub fn build(&self) -> Result<GradedSystem, SpecError> {
        match self.mode {
            Mode::Free => {
                let generators: Vec<Generator> = self
                    .arrows
                    .iter()
                    .map(|a| Generator {
                        name: a.name.clone(),
                        degree: a.degree,
                        src: a.src.clone(),
                        rng: a.rng.clone(),
                    })
                    .collect();
                build_free(&generators, &self.vertices, self.cap).map_err(SpecError::Build)
            }
            Mode::Table => {
                let decls: Vec<ArrowDecl> = self
                    .arrows
                    .iter()
                    .map(|a| ArrowDecl {
                        name: a.name.clone(),
                        degree: a.degree,
                        src: a.src.clone(),
                        rng: a.rng.clone(),
                    })
                    .collect();
                let entries: Vec<MulEntry> = self
                    .muls
                    .iter()
                    .map(|m| MulEntry {
                        left: m.left.clone(),
                        right: m.right.clone(),
                        result: m.result.clone(),
                    })
                    .collect();
                build_table(&self.vertices, &decls, &entries, self.cap).map_err(SpecError::Build)
            }
        }
    }
}
