//! Workspace persistence: UTF-8 JSON with rationals as "p/q" strings,
//! fixed key order (struct order), and a schema version gate. Writing is
//! deterministic, so canonical files round-trip byte-identically.

use crate::calculus::RationalMap;
use crate::cheese::SwissCheese;
use crate::measures::FeasibilityResult;
use crate::slits::PropagationSystem;
use serde::{Deserialize, Serialize};
use std::path::Path;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum PersistError {
    #[error("schema version mismatch: file has {found}, expected {expected}")]
    SchemaMismatch { found: u32, expected: u32 },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct WorkspaceFile {
    pub schema_version: u32,
    pub cheese: Option<SwissCheese>,
    pub rational_maps: Vec<RationalMap>,
    pub propagation_systems: Vec<PropagationSystem>,
    pub feasibility_results: Vec<FeasibilityResult>,
}

impl WorkspaceFile {
    pub fn new() -> WorkspaceFile {
        WorkspaceFile {
            schema_version: SCHEMA_VERSION,
            ..Default::default()
        }
    }

    pub fn to_canonical_json(&self) -> Result<String, PersistError> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn save(&self, path: &Path) -> Result<(), PersistError> {
        std::fs::write(path, self.to_canonical_json()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<WorkspaceFile, PersistError> {
        let text = std::fs::read_to_string(path)?;
        let ws: WorkspaceFile = serde_json::from_str(&text)?;
        if ws.schema_version != SCHEMA_VERSION {
            return Err(PersistError::SchemaMismatch {
                found: ws.schema_version,
                expected: SCHEMA_VERSION,
            });
        }
        Ok(ws)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cheese::{
        enumerate_candidates, epsilon_budget, generate_mckissick_discs, CheeseGroup, SwissCheese,
    };
    use crate::geometry::{Q, QPoint};
    use crate::targets::TargetSet;

    fn sample_workspace() -> WorkspaceFile {
        let k = TargetSet::segment(
            QPoint::new("-1/2".parse().unwrap(), Q::zero()),
            QPoint::new("1/2".parse().unwrap(), Q::zero()),
        )
        .unwrap();
        let groups: Vec<CheeseGroup> = enumerate_candidates(&k, 2, 0)
            .unwrap()
            .into_iter()
            .map(|c| {
                let budget = epsilon_budget(&c.d_n.lower, c.n, 8);
                let deleted = generate_mckissick_discs(&c, &budget, 2, None).unwrap();
                CheeseGroup {
                    candidate: c,
                    budget,
                    deleted,
                }
            })
            .collect();
        let mut ws = WorkspaceFile::new();
        ws.cheese = Some(SwissCheese::assemble(k, groups).unwrap());
        ws
    }

    #[test]
    fn round_trip_is_byte_identical() {
        let ws = sample_workspace();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ws.json");
        ws.save(&path).unwrap();
        let bytes1 = std::fs::read(&path).unwrap();
        let loaded = WorkspaceFile::load(&path).unwrap();
        assert_eq!(loaded, ws);
        loaded.save(&path).unwrap();
        let bytes2 = std::fs::read(&path).unwrap();
        assert_eq!(bytes1, bytes2);
    }

    #[test]
    fn rationals_serialize_as_strings() {
        let ws = sample_workspace();
        let text = ws.to_canonical_json().unwrap();
        assert!(text.contains("\"1/8\""), "radius rendered as p/q");
        assert!(text.contains("\"schema_version\": 1"));
    }

    #[test]
    fn schema_mismatch_rejected() {
        let ws = WorkspaceFile::new();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ws.json");
        let text = ws
            .to_canonical_json()
            .unwrap()
            .replace("\"schema_version\": 1", "\"schema_version\": 999");
        std::fs::write(&path, text).unwrap();
        assert!(matches!(
            WorkspaceFile::load(&path),
            Err(PersistError::SchemaMismatch { found: 999, .. })
        ));
    }
}
