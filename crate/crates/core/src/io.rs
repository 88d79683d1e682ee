//! JSON file formats for every object the tool reads or writes.
//!
//! Each file embeds the field spec {p, e, poly} so the geometry it describes
//! is reconstructible without out-of-band context. Deserialization only
//! checks shape; geometric validity is established by the module validators
//! ([`egg_validate`], [`flock_validate`], [`gq_check`]) on the decoded data.
//!
//! [`egg_validate`]: crate::egg::egg_validate
//! [`flock_validate`]: crate::flock::flock_validate
//! [`gq_check`]: crate::gq::gq_check

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::egg::{egg_validate, Egg, EggCheckOptions, EggError};
use crate::flock::{flock_validate, Flock, FlockError};
use crate::gf::{FiniteField, GfError};
use crate::gq::{GqError, IncidenceStructure};
use crate::projgeom::Subspace;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("i/o failure on {path}: {source}")]
    File { path: String, source: std::io::Error },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Field(#[from] GfError),
    #[error(transparent)]
    Egg(#[from] EggError),
    #[error(transparent)]
    Flock(#[from] FlockError),
    #[error(transparent)]
    Gq(#[from] GqError),
}

// ---------------------------------------------------------------------------
// Field spec
// ---------------------------------------------------------------------------

/// {p, e, poly}: the prime, the degree, and the e lower coefficients of the
/// monic modulus polynomial.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u64,
    pub e: u32,
    pub poly: Vec<u64>,
}

impl FieldSpec {
    pub fn of(f: &FiniteField) -> FieldSpec {
        FieldSpec {
            p: f.p() as u64,
            e: f.e(),
            poly: f.poly().iter().map(|&c| c as u64).collect(),
        }
    }

    pub fn build(&self) -> Result<Arc<FiniteField>, IoError> {
        Ok(FiniteField::new(self.p, self.e, Some(&self.poly))?)
    }
}

// ---------------------------------------------------------------------------
// Geometry files
// ---------------------------------------------------------------------------

/// {ambient_dim, rows}: a subspace as spanning row vectors of integer codes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubspaceDto {
    pub ambient_dim: usize,
    pub rows: Vec<Vec<u32>>,
}

impl SubspaceDto {
    pub fn of(s: &Subspace) -> SubspaceDto {
        SubspaceDto { ambient_dim: s.vdim(), rows: s.m.rows_iter().map(|r| r.to_vec()).collect() }
    }

    pub fn build(&self, f: &FiniteField) -> Subspace {
        Subspace::from_rows(f, self.ambient_dim, &self.rows)
    }
}

/// {field, n, m, elements}: an egg candidate, each element given as n row
/// vectors of length 2n+m.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EggFile {
    pub field: FieldSpec,
    pub n: u32,
    pub m: u32,
    pub elements: Vec<Vec<Vec<u32>>>,
}

impl EggFile {
    pub fn of(egg: &Egg) -> EggFile {
        EggFile {
            field: FieldSpec::of(&egg.field),
            n: egg.n,
            m: egg.m,
            elements: egg
                .elements
                .iter()
                .map(|e| e.m.rows_iter().map(|r| r.to_vec()).collect())
                .collect(),
        }
    }

    /// Decodes and validates, returning a checked egg.
    pub fn build(&self, opts: &EggCheckOptions) -> Result<Egg, IoError> {
        let f = self.field.build()?;
        let vdim = (2 * self.n + self.m) as usize;
        let elements: Vec<Subspace> =
            self.elements.iter().map(|rows| Subspace::from_rows(&f, vdim, rows)).collect();
        Ok(egg_validate(&f, self.n, self.m, elements, opts)?)
    }
}

/// {v, b, incidences, labels?}: a point-line incidence list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IncidenceFile {
    pub v: usize,
    pub b: usize,
    pub incidences: Vec<(u32, u32)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub point_labels: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line_labels: Option<Vec<String>>,
}

impl IncidenceFile {
    pub fn of(s: &IncidenceStructure) -> IncidenceFile {
        let mut incidences = Vec::new();
        for (l, pts) in s.line_points.iter().enumerate() {
            for &p in pts {
                incidences.push((p, l as u32));
            }
        }
        IncidenceFile {
            v: s.v,
            b: s.b,
            incidences,
            point_labels: s.point_labels.clone(),
            line_labels: s.line_labels.clone(),
        }
    }

    pub fn build(&self) -> Result<IncidenceStructure, IoError> {
        let mut s = IncidenceStructure::new(self.v, self.b, &self.incidences)?;
        s.point_labels = self.point_labels.clone().filter(|l| l.len() == self.v);
        s.line_labels = self.line_labels.clone().filter(|l| l.len() == self.b);
        Ok(s)
    }
}

/// {field, planes}: a flock candidate as 4-coefficient plane vectors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlockFile {
    pub field: FieldSpec,
    pub planes: Vec<Vec<u32>>,
}

impl FlockFile {
    pub fn of(fl: &Flock) -> FlockFile {
        FlockFile {
            field: FieldSpec::of(&fl.field),
            planes: fl.planes.iter().map(|p| p.to_vec()).collect(),
        }
    }

    /// Decodes and validates, returning a checked flock.
    pub fn build(&self) -> Result<Flock, IoError> {
        let f = self.field.build()?;
        Ok(flock_validate(&f, &self.planes)?)
    }
}

// ---------------------------------------------------------------------------
// Certificates
// ---------------------------------------------------------------------------

/// A self-contained, re-checkable verification certificate:
/// {check, instance, counts, witnesses, pass}.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Certificate {
    /// Content-based check id, e.g. "pi0-conic-uniqueness".
    pub check: String,
    /// Instance descriptor, e.g. "O(2,4,3)".
    pub instance: String,
    pub counts: BTreeMap<String, u64>,
    pub witnesses: Vec<serde_json::Value>,
    pub pass: bool,
}

// ---------------------------------------------------------------------------
// File helpers
// ---------------------------------------------------------------------------

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, IoError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| IoError::File { path: path.display().to_string(), source })?;
    Ok(serde_json::from_str(&text)?)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), IoError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)
        .map_err(|source| IoError::File { path: path.display().to_string(), source })
}

/// Deterministic pretty JSON with a trailing newline, as written to files.
pub fn render_json<T: Serialize>(value: &T) -> Result<String, IoError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conics::fixtures;

    #[test]
    fn field_specs_round_trip_through_json_and_rebuild_the_same_field() {
        for (p, e) in [(3u64, 1u32), (2, 2), (3, 2), (5, 1)] {
            let f = FiniteField::new(p, e, None).unwrap();
            let spec = FieldSpec::of(&f);
            let text = serde_json::to_string(&spec).unwrap();
            let back: FieldSpec = serde_json::from_str(&text).unwrap();
            let g = back.build().unwrap();
            assert!(f.same_field(&g));
        }
    }

    #[test]
    fn egg_files_round_trip_and_revalidate() {
        let egg = &*fixtures::O123;
        let file = EggFile::of(egg);
        let text = serde_json::to_string(&file).unwrap();
        let back: EggFile = serde_json::from_str(&text).unwrap();
        let rebuilt = back.build(&EggCheckOptions::default()).unwrap();
        assert_eq!(rebuilt.elements, egg.elements);
        assert_eq!((rebuilt.n, rebuilt.m), (1, 2));
    }

    #[test]
    fn incidence_files_round_trip_the_structure() {
        let model = &*fixtures::T123;
        let file = IncidenceFile::of(&model.structure);
        let text = serde_json::to_string(&file).unwrap();
        let back: IncidenceFile = serde_json::from_str(&text).unwrap();
        let s = back.build().unwrap();
        assert_eq!(s.v, model.structure.v);
        assert_eq!(s.b, model.structure.b);
        assert_eq!(s.line_points, model.structure.line_points);
    }

    #[test]
    fn flock_files_round_trip_and_revalidate() {
        let f = FiniteField::new(3, 1, None).unwrap();
        let fl = flock_validate(&f, &crate::flock::linear_flock(&f).unwrap()).unwrap();
        let file = FlockFile::of(&fl);
        let text = serde_json::to_string(&file).unwrap();
        let back: FlockFile = serde_json::from_str(&text).unwrap();
        let refl = back.build().unwrap();
        assert_eq!(refl.planes, fl.planes);
    }

    #[test]
    fn malformed_json_is_an_error_not_a_panic() {
        let r: Result<EggFile, _> = serde_json::from_str("{\"field\": 3}");
        assert!(r.is_err());
    }
}
