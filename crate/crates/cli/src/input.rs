//! Resolution of structure, morphism, formula and vocabulary arguments.

use std::env;
use std::fs;
use std::path::{Path, PathBuf};

use fmtlab_core::logic::{parse, parse_with, Formula};
use fmtlab_core::structures::fixtures;
use fmtlab_core::{Error, Morphism, Result, Structure, Vocabulary};
use serde_json::Value;

const FIXTURE_PREFIX: &str = "fixtures/";

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Candidate files for a structure argument, most specific first.
fn candidates(arg: &str, base: Option<&Path>) -> Vec<PathBuf> {
    let mut out = Vec::new();
    let mut push = |p: PathBuf| {
        out.push(p.with_extension("json"));
        out.push(p);
    };
    if let Ok(dir) = env::var("FMT_FIXTURES") {
        let name = arg.strip_prefix(FIXTURE_PREFIX).unwrap_or(arg);
        if !name.contains('/') {
            push(Path::new(&dir).join(name));
        }
    }
    if let Some(base) = base {
        if Path::new(arg).is_relative() {
            push(base.join(arg));
        }
    }
    push(PathBuf::from(arg));
    out.retain(|p| !p.as_os_str().is_empty());
    out
}

/// Loads a structure from a file path (with or without `.json`), the
/// `FMT_FIXTURES` directory, or the bundled fixtures.
pub fn structure(arg: &str) -> Result<Structure> {
    structure_from(arg, None)
}

fn structure_from(arg: &str, base: Option<&Path>) -> Result<Structure> {
    for path in candidates(arg, base) {
        if path.is_file() {
            return Structure::from_json(&read(&path)?)
                .map_err(|e| Error::Malformed(format!("{}: {e}", path.display())));
        }
    }
    let name = Path::new(arg).file_name().and_then(|n| n.to_str()).unwrap_or(arg);
    let name = name.strip_suffix(".json").unwrap_or(name);
    fixtures::by_name(name).ok_or_else(|| Error::Io(format!("no structure file or fixture named {arg:?}")))
}

/// All `*.json` structures in a directory, sorted by file name, with their
/// file stems as labels.
pub fn directory(dir: &str) -> Result<(Vec<String>, Vec<Structure>)> {
    let entries = fs::read_dir(dir).map_err(|e| Error::Io(format!("{dir}: {e}")))?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    let mut labels = Vec::new();
    let mut structures = Vec::new();
    for p in paths {
        let s = Structure::from_json(&read(&p)?).map_err(|e| Error::Malformed(format!("{}: {e}", p.display())))?;
        labels.push(p.file_stem().and_then(|s| s.to_str()).unwrap_or_default().to_string());
        structures.push(s);
    }
    Ok((labels, structures))
}

/// Loads a morphism document:
/// `{"source": S, "target": T, "map": {"a": "x", ...}}`, where `S` and `T`
/// are structure documents or structure references.
pub fn morphism(arg: &str) -> Result<Morphism> {
    let path = Path::new(arg);
    let text = read(path)?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| Error::Malformed(format!("{arg}: line {} column {}: {e}", e.line(), e.column())))?;
    let base = path.parent();
    let end = |key: &str| -> Result<Structure> {
        match value.get(key) {
            Some(Value::String(r)) => structure_from(r, base),
            Some(doc @ Value::Object(_)) => Structure::from_json(&doc.to_string()),
            _ => Err(Error::Malformed(format!("{arg}: missing {key:?}"))),
        }
    };
    let (source, target) = (end("source")?, end("target")?);
    let map = value
        .get("map")
        .and_then(Value::as_object)
        .ok_or_else(|| Error::Malformed(format!("{arg}: missing \"map\" object")))?;
    let mut pairs = Vec::with_capacity(map.len());
    for (k, v) in map {
        let v = v.as_str().ok_or_else(|| Error::Malformed(format!("{arg}: map value for {k:?} is not a string")))?;
        pairs.push((k.as_str(), v));
    }
    Morphism::from_names(&source, &target, &pairs)
}

/// A formula given inline or as a path to a file holding it.
pub fn formula_text(arg: &str) -> Result<String> {
    let path = Path::new(arg);
    if path.is_file() {
        return read(path).map(|s| s.trim().to_string());
    }
    Ok(arg.to_string())
}

pub fn formula(arg: &str, vocab: Option<&Vocabulary>) -> Result<Formula> {
    let text = formula_text(arg)?;
    match vocab {
        Some(v) => parse_with(&text, v),
        None => parse(&text),
    }
}

/// Parses a vocabulary: comma-separated `NAME/ARITY` relations and bare
/// constant names, e.g. `E/2,c1`. `graph` and `sigmaN` name `{E/2}` and
/// `{E/2}` with `N` constants; `empty` is the empty vocabulary.
pub fn vocabulary(spec: &str) -> Result<Vocabulary> {
    let spec = spec.trim();
    match spec {
        "graph" => return Ok(Vocabulary::graph()),
        "empty" | "" => return Vocabulary::new(Vec::<(String, usize)>::new(), Vec::<String>::new()),
        _ => {}
    }
    if let Some(n) = spec.strip_prefix("sigma").and_then(|n| n.parse::<usize>().ok()) {
        return Ok(Vocabulary::graph_with_constants(n));
    }
    let mut relations = Vec::new();
    let mut constants = Vec::new();
    for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        match item.split_once('/') {
            Some((name, arity)) => {
                let arity = arity
                    .parse::<usize>()
                    .map_err(|_| Error::InvalidVocabulary(format!("bad arity in {item:?}")))?;
                relations.push((name.to_string(), arity));
            }
            None => constants.push(item.to_string()),
        }
    }
    Vocabulary::new(relations, constants)
}

/// Element names, comma separated.
pub fn names(list: &str) -> Vec<String> {
    list.split(',').map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect()
}

pub fn indices(s: &Structure, list: Option<&str>) -> Result<Vec<usize>> {
    s.indices_of(&names(list.unwrap_or("")))
}

/// `a=b` pairs, comma separated.
pub fn pairs(list: &str) -> Result<Vec<(String, String)>> {
    names(list)
        .into_iter()
        .map(|p| {
            p.split_once('=')
                .map(|(a, b)| (a.trim().to_string(), b.trim().to_string()))
                .ok_or_else(|| Error::Malformed(format!("expected name=name, found {p:?}")))
        })
        .collect()
}
