//! Body input for the CLI: JSON files and named presets.
//!
//! A body file is either a bare body object ({"type": "cube", "n": 2} and
//! friends) or an envelope {"body": {...}, "symmetric": true} when the
//! caller wants the symmetry claim verified up front. The three failure
//! modes get distinct variants and distinct process exit codes so scripts
//! can tell a typo from a bad body.

use std::fmt;
use std::path::Path;

use nalgebra::DVector;
use serde::Deserialize;
use sympcap::bodies::{self, Body, BodySpec};
use sympcap::error::Error;
use sympcap::lincap;

#[derive(Debug)]
pub enum LoadError {
    /// Unreadable file, malformed JSON, unknown fields, or a description
    /// that cannot be built into a body.
    Schema(String),
    /// The file claimed "symmetric": true but the body is not symmetric.
    Asymmetric,
    /// The origin is not strictly interior to the described body.
    OriginExterior,
}

impl LoadError {
    /// Process exit code for this failure; keeps the three modes apart
    /// from the generic config exit (2) and the failed-check exit (1).
    pub fn exit_code(&self) -> u8 {
        match self {
            LoadError::Schema(_) => 3,
            LoadError::Asymmetric => 4,
            LoadError::OriginExterior => 5,
        }
    }
}

impl fmt::Display for LoadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LoadError::Schema(msg) => write!(f, "schema violation: {msg}"),
            LoadError::Asymmetric => write!(f, "body is not symmetric but was declared symmetric"),
            LoadError::OriginExterior => write!(f, "origin is not strictly interior to the body"),
        }
    }
}

impl std::error::Error for LoadError {}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Envelope {
    body: BodySpec,
    #[serde(default)]
    symmetric: bool,
}

/// Parse a body description. Accepts a bare [`BodySpec`] object or the
/// {"body", "symmetric"} envelope.
pub fn parse_body_spec(text: &str) -> Result<Body, LoadError> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| LoadError::Schema(e.to_string()))?;
    let enveloped = value.as_object().is_some_and(|m| m.contains_key("body"));
    let (spec, claimed) = if enveloped {
        let env: Envelope =
            serde_json::from_value(value).map_err(|e| LoadError::Schema(e.to_string()))?;
        (env.body, env.symmetric)
    } else {
        let spec: BodySpec =
            serde_json::from_value(value).map_err(|e| LoadError::Schema(e.to_string()))?;
        (spec, false)
    };
    let body = spec.build().map_err(|e| match e {
        Error::OriginNotInterior => LoadError::OriginExterior,
        other => LoadError::Schema(other.to_string()),
    })?;
    if claimed {
        let sym = body
            .is_symmetric(1e-9)
            .map_err(|e| LoadError::Schema(e.to_string()))?;
        if !sym {
            return Err(LoadError::Asymmetric);
        }
    }
    Ok(body)
}

pub fn load_body_spec(path: &Path) -> Result<Body, LoadError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| LoadError::Schema(format!("{}: {e}", path.display())))?;
    parse_body_spec(&text)
}

/// Named preset grammar, dash separated so ids are CSV and filename safe:
/// ball-N, cube-N, cross-N, cube-cross-N, rotated-cube-N,
/// ellipsoid-R1-R2[-R3...], random-N-GENS-SEED. N is the half dimension.
pub fn preset(name: &str) -> Result<Body, LoadError> {
    let bad = |msg: &str| LoadError::Schema(format!("preset {name:?}: {msg}"));
    let parts: Vec<&str> = name.split('-').collect();
    let tail_usize = |s: &str| s.parse::<usize>().map_err(|_| bad("expected an integer"));
    match parts.as_slice() {
        ["ball", n] => Ok(bodies::ball(tail_usize(n)?)),
        ["cube", n] => Ok(bodies::cube(tail_usize(n)?)),
        ["cross", n] => Ok(bodies::cross_polytope(tail_usize(n)?)),
        ["cube", "cross", n] => Ok(bodies::cube_cross_product(tail_usize(n)?)),
        ["rotated", "cube", n] => {
            lincap::build_rotated_cube(tail_usize(n)?).map_err(|e| bad(&e.to_string()))
        }
        ["ellipsoid", radii @ ..] if !radii.is_empty() => {
            let r: Vec<f64> = radii
                .iter()
                .map(|s| s.parse::<f64>().map_err(|_| bad("expected a radius")))
                .collect::<Result<_, _>>()?;
            Body::ellipsoid_radii(&r).map_err(|e| bad(&e.to_string()))
        }
        ["random", n, gens, seed] => {
            let s = seed.parse::<u64>().map_err(|_| bad("expected a seed"))?;
            bodies::random_symmetric_vpolytope(tail_usize(n)?, tail_usize(gens)?, s)
                .map_err(|e| bad(&e.to_string()))
        }
        _ => Err(bad("unknown preset")),
    }
}

/// Resolve a --body argument: an existing file wins, otherwise the name is
/// tried as a preset. Returns the id used in reports alongside the body.
pub fn resolve_body(arg: &str) -> Result<(String, Body), LoadError> {
    let path = Path::new(arg);
    if path.exists() {
        let id = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| arg.to_string());
        Ok((id, load_body_spec(path)?))
    } else {
        Ok((arg.to_string(), preset(arg)?))
    }
}

/// Unit vector e_i, a convenience for tests and the suite drivers.
pub fn unit(dim: usize, i: usize) -> DVector<f64> {
    let mut e = DVector::zeros(dim);
    e[i] = 1.0;
    e
}
