//! On-disk formats: the JSON matrix file, the plain-text generating-set
//! format, and the TOML run configuration for searches.

use crate::constructions::StateRecipe;
use crate::exact_subspace::{ExactTensor, GaussianRational, GeneratingSet};
use crate::search::SearchConfig;
use crate::tensor_algebra::{BipartiteMatrix, C64};
use serde::{Deserialize, Serialize};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("cannot read {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: String, source: std::io::Error },
    #[error("parse error in {path}: {message}")]
    Parse { path: String, message: String },
    #[error("{path}: expected {expected} entries for k = {k}, found {got}")]
    LengthMismatch { path: String, k: usize, expected: usize, got: usize },
    #[error("{path}: non-finite entry at index {index}")]
    NonFinite { path: String, index: usize },
    #[error("{path}: local dimension must be at least 1")]
    BadDimension { path: String },
    #[error("{path} line {line}: {message}")]
    GeneratingSetSyntax { path: String, line: usize, message: String },
}

/// Optional provenance carried inside a matrix file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MatrixMetadata {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub recipe: Option<StateRecipe>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// Serialized form of a bipartite matrix: local dimension plus `k⁴` row-major
/// `[re, im]` pairs. JSON numbers round-trip doubles exactly.
#[derive(Debug, Serialize, Deserialize)]
struct MatrixFile {
    k: usize,
    entries: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    metadata: Option<MatrixMetadata>,
}

pub fn save_matrix(
    path: &Path,
    matrix: &BipartiteMatrix,
    metadata: Option<MatrixMetadata>,
) -> Result<(), FormatError> {
    let entries: Vec<[f64; 2]> = matrix.entries_row_major().iter().map(|z| [z.re, z.im]).collect();
    let file = MatrixFile {
        k: matrix.local_dim(),
        entries,
        metadata,
    };
    let body = serde_json::to_string(&file).expect("serializable");
    std::fs::write(path, body + "\n").map_err(|source| FormatError::Write {
        path: path.display().to_string(),
        source,
    })
}

pub fn load_matrix(path: &Path) -> Result<(BipartiteMatrix, Option<MatrixMetadata>), FormatError> {
    let text = std::fs::read_to_string(path).map_err(|source| FormatError::Read {
        path: path.display().to_string(),
        source,
    })?;
    let display = path.display().to_string();
    let file: MatrixFile = serde_json::from_str(&text).map_err(|e| FormatError::Parse {
        path: display.clone(),
        message: e.to_string(),
    })?;
    if file.k == 0 {
        return Err(FormatError::BadDimension { path: display });
    }
    let expected = file.k.pow(4);
    if file.entries.len() != expected {
        return Err(FormatError::LengthMismatch {
            path: display,
            k: file.k,
            expected,
            got: file.entries.len(),
        });
    }
    if let Some(index) = file
        .entries
        .iter()
        .position(|[re, im]| !re.is_finite() || !im.is_finite())
    {
        return Err(FormatError::NonFinite { path: display, index });
    }
    let entries: Vec<C64> = file.entries.iter().map(|[re, im]| C64::new(*re, *im)).collect();
    let matrix = BipartiteMatrix::from_entries(file.k, entries).expect("length checked");
    Ok((matrix, file.metadata))
}

/// Parses the generating-set text format: one generator per line as
/// `v | w`, each factor a comma-separated list of Gaussian rationals like
/// `1`, `-2/3`, `1/2+1 i`. Blank lines and `#` comments are skipped.
pub fn parse_generating_set(text: &str, path: &str) -> Result<GeneratingSet, FormatError> {
    let mut generators = Vec::new();
    let mut ambient = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let syntax = |message: String| FormatError::GeneratingSetSyntax {
            path: path.to_string(),
            line: idx + 1,
            message,
        };
        let (left_str, right_str) = line
            .split_once('|')
            .ok_or_else(|| syntax("expected `v | w`".to_string()))?;
        let parse_factor = |s: &str| -> Result<Vec<GaussianRational>, FormatError> {
            s.split(',')
                .map(|tok| {
                    tok.trim()
                        .parse::<GaussianRational>()
                        .map_err(|e| syntax(e.to_string()))
                })
                .collect()
        };
        let left = parse_factor(left_str)?;
        let right = parse_factor(right_str)?;
        if left.len() != right.len() {
            return Err(syntax(format!(
                "factor lengths differ: {} vs {}",
                left.len(),
                right.len()
            )));
        }
        match ambient {
            None => ambient = Some(left.len()),
            Some(k) if k != left.len() => {
                return Err(syntax(format!("expected factors of length {k}, found {}", left.len())))
            }
            _ => {}
        }
        generators.push(ExactTensor::new(left, right));
    }
    let k = ambient.ok_or_else(|| FormatError::GeneratingSetSyntax {
        path: path.to_string(),
        line: 0,
        message: "no generators found".to_string(),
    })?;
    GeneratingSet::new(k, generators).map_err(|e| FormatError::GeneratingSetSyntax {
        path: path.to_string(),
        line: 0,
        message: e.to_string(),
    })
}

pub fn load_generating_set(path: &Path) -> Result<GeneratingSet, FormatError> {
    let text = std::fs::read_to_string(path).map_err(|source| FormatError::Read {
        path: path.display().to_string(),
        source,
    })?;
    parse_generating_set(&text, &path.display().to_string())
}

pub fn format_generating_set(set: &GeneratingSet) -> String {
    let mut out = String::new();
    for g in set.generators() {
        let left: Vec<String> = g.left().iter().map(|x| x.to_string()).collect();
        let right: Vec<String> = g.right().iter().map(|x| x.to_string()).collect();
        out.push_str(&format!("{} | {}\n", left.join(", "), right.join(", ")));
    }
    out
}

/// Loads a search run configuration from TOML; unknown keys are rejected.
pub fn load_search_config(path: &Path) -> Result<SearchConfig, FormatError> {
    let text = std::fs::read_to_string(path).map_err(|source| FormatError::Read {
        path: path.display().to_string(),
        source,
    })?;
    toml::from_str(&text).map_err(|e| FormatError::Parse {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::invariant_gap_state;
    use crate::exact_subspace::sym_skew_dims;
    use crate::search::Strategy;
    use crate::tensor_algebra::max_abs_diff;

    #[test]
    fn matrix_round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("state.json");
        let rho = invariant_gap_state(3).unwrap();
        save_matrix(&path, &rho, None).unwrap();
        let (back, meta) = load_matrix(&path).unwrap();
        assert_eq!(max_abs_diff(&rho, &back), 0.0);
        assert!(meta.is_none());
    }

    #[test]
    fn metadata_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("state.json");
        let rho = invariant_gap_state(2).unwrap();
        let meta = MatrixMetadata {
            name: Some("boundary".into()),
            recipe: None,
            seed: Some(5),
        };
        save_matrix(&path, &rho, Some(meta.clone())).unwrap();
        let (_, back) = load_matrix(&path).unwrap();
        assert_eq!(back, Some(meta));
    }

    #[test]
    fn identity_file_loads() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("id.json");
        let entries: Vec<[f64; 2]> = (0..16)
            .map(|i| [if i % 5 == 0 { 1.0 } else { 0.0 }, 0.0])
            .collect();
        std::fs::write(&path, serde_json::to_string(&serde_json::json!({"k": 2, "entries": entries})).unwrap()).unwrap();
        let (m, _) = load_matrix(&path).unwrap();
        assert_eq!(max_abs_diff(&m, &BipartiteMatrix::identity(2)), 0.0);
    }

    #[test]
    fn truncated_file_reports_length_mismatch() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("short.json");
        std::fs::write(&path, r#"{"k": 2, "entries": [[1.0, 0.0]]}"#).unwrap();
        assert!(matches!(
            load_matrix(&path),
            Err(FormatError::LengthMismatch { expected: 16, got: 1, .. })
        ));
    }

    #[test]
    fn garbage_reports_parse_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.json");
        std::fs::write(&path, "not json").unwrap();
        assert!(matches!(load_matrix(&path), Err(FormatError::Parse { .. })));
    }

    #[test]
    fn generating_set_round_trip() {
        let text = "# sharp pair at k = 2\n0, 1 | 1, 1\n1, 1 | 0, 1\n";
        let set = parse_generating_set(text, "inline").unwrap();
        assert_eq!(set.ambient_dim(), 2);
        assert_eq!(sym_skew_dims(&set), (2, 1, 1));
        let rendered = format_generating_set(&set);
        let again = parse_generating_set(&rendered, "inline").unwrap();
        assert_eq!(set, again);
    }

    #[test]
    fn generating_set_with_gaussian_entries() {
        let text = "1/2+1 i, 1 | 0, -3/4 i\n";
        let set = parse_generating_set(text, "inline").unwrap();
        let rendered = format_generating_set(&set);
        let again = parse_generating_set(&rendered, "inline").unwrap();
        assert_eq!(set, again);
    }

    #[test]
    fn generating_set_syntax_errors_carry_line_numbers() {
        let err = parse_generating_set("1, 0 | 1\n", "inline").unwrap_err();
        assert!(matches!(err, FormatError::GeneratingSetSyntax { line: 1, .. }));
        let err = parse_generating_set("0, 1\n", "inline").unwrap_err();
        assert!(matches!(err, FormatError::GeneratingSetSyntax { line: 1, .. }));
    }

    #[test]
    fn search_config_toml_rejects_unknown_keys() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        std::fs::write(&path, "k = 3\nstrategy = \"random\"\niterations = 10\nseed = 1\n").unwrap();
        let config = load_search_config(&path).unwrap();
        assert_eq!(config.k, 3);
        assert_eq!(config.strategy, Strategy::Random);
        std::fs::write(&path, "k = 3\nstrategy = \"random\"\niterations = 10\nbogus = 1\n").unwrap();
        assert!(matches!(load_search_config(&path), Err(FormatError::Parse { .. })));
    }
}
