//! Plain-text matrices and JSON scheme metadata.
//!
//! A matrix file is a header line `rows cols` followed by `rows` lines of
//! `0`/`1` characters. A scheme is stored as `PREFIX.mat` plus `PREFIX.json`.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{BinaryMatrix, BurstSpace, Component, Role, Scheme, Thresholds};

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub fn format_matrix(m: &BinaryMatrix) -> String {
    let mut out = String::with_capacity(m.rows() * (m.cols() + 1) + 16);
    out.push_str(&format!("{} {}\n", m.rows(), m.cols()));
    for r in 0..m.rows() {
        out.extend(m.row(r).iter().map(|&b| if b == 1 { '1' } else { '0' }));
        out.push('\n');
    }
    out
}

/// Parses the matrix format; `path` is only used to label errors.
pub fn parse_matrix(text: &str, path: &Path) -> Result<BinaryMatrix> {
    let err = |line: usize, msg: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        msg,
    };
    let mut lines = text.split_terminator('\n');
    let header = lines
        .next()
        .ok_or_else(|| err(1, "missing header".into()))?;
    let dims: Vec<&str> = header.split(' ').collect();
    let parse_dim = |s: &str| s.parse::<usize>().ok();
    let (rows, cols) = match dims.as_slice() {
        [r, c] => match (parse_dim(r), parse_dim(c)) {
            (Some(r), Some(c)) => (r, c),
            _ => return Err(err(1, format!("malformed header {header:?}"))),
        },
        _ => return Err(err(1, format!("malformed header {header:?}"))),
    };
    let mut m = BinaryMatrix::zeros(rows, cols).map_err(|e| err(1, e.to_string()))?;
    for r in 0..rows {
        let line_no = r + 2;
        let line = lines
            .next()
            .ok_or_else(|| err(line_no, format!("expected {rows} rows, found {r}")))?;
        if line.len() != cols {
            return Err(err(
                line_no,
                format!(
                    "row has {} characters, expected {cols}",
                    line.chars().count()
                ),
            ));
        }
        for (c, ch) in line.bytes().enumerate() {
            match ch {
                b'0' => {}
                b'1' => m.set(r, c, 1),
                other => {
                    return Err(err(
                        line_no,
                        format!(
                            "unexpected character {:?} at column {}",
                            other as char,
                            c + 1
                        ),
                    ))
                }
            }
        }
    }
    if lines.next().is_some() {
        return Err(err(rows + 2, "trailing content after the last row".into()));
    }
    if !text.is_empty() && !text.ends_with('\n') {
        return Err(err(rows + 1, "missing final newline".into()));
    }
    Ok(m)
}

pub fn save_matrix(m: &BinaryMatrix, path: &Path) -> Result<()> {
    fs::write(path, format_matrix(m)).map_err(|e| io_err(path, e))
}

pub fn load_matrix(path: &Path) -> Result<BinaryMatrix> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    parse_matrix(&text, path)
}

/// Paths of the two files holding a scheme.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchemeFilePair {
    pub matrix: PathBuf,
    pub metadata: PathBuf,
}

impl SchemeFilePair {
    pub fn from_prefix(prefix: impl AsRef<Path>) -> Self {
        let prefix = prefix.as_ref().as_os_str();
        let with = |ext: &str| {
            let mut p = prefix.to_os_string();
            p.push(ext);
            PathBuf::from(p)
        };
        SchemeFilePair {
            matrix: with(".mat"),
            metadata: with(".json"),
        }
    }
}

#[derive(Serialize, Deserialize, Debug, PartialEq, Eq)]
struct ComponentMeta {
    name: String,
    rows: [usize; 2],
}

#[derive(Serialize, Deserialize, Debug, PartialEq, Eq)]
struct SchemeMeta {
    model: String,
    n: usize,
    ell: usize,
    thresholds: Vec<u32>,
    components: Vec<ComponentMeta>,
}

/// Compact JSON metadata for a scheme.
pub fn scheme_metadata(scheme: &Scheme) -> String {
    let model = match scheme.space() {
        BurstSpace::Fixed { .. } => "fixed",
        BurstSpace::Bounded { .. } => "bounded",
    };
    let meta = SchemeMeta {
        model: model.into(),
        n: scheme.n(),
        ell: scheme.space().ell(),
        thresholds: scheme.thresholds().values().to_vec(),
        components: scheme
            .components()
            .iter()
            .map(|c| ComponentMeta {
                name: c.role.name().into(),
                rows: [c.rows.start, c.rows.end],
            })
            .collect(),
    };
    serde_json::to_string(&meta).expect("metadata serializes")
}

/// Rebuilds a scheme from its matrix and JSON metadata, checking that they agree.
pub fn scheme_from_parts(matrix: BinaryMatrix, metadata: &str) -> Result<Scheme> {
    let meta: SchemeMeta =
        serde_json::from_str(metadata).map_err(|e| Error::Validation(e.to_string()))?;
    let space = match meta.model.as_str() {
        "fixed" => BurstSpace::Fixed { ell: meta.ell },
        "bounded" => BurstSpace::Bounded { ell: meta.ell },
        other => return Err(Error::Validation(format!("unknown model {other:?}"))),
    };
    if meta.n != matrix.cols() {
        return Err(Error::Validation(format!(
            "metadata n={} but the matrix has {} columns",
            meta.n,
            matrix.cols()
        )));
    }
    let thresholds =
        Thresholds::new(meta.thresholds).map_err(|e| Error::Validation(e.to_string()))?;
    let mut components = Vec::with_capacity(meta.components.len());
    for c in meta.components {
        let role = Role::from_name(&c.name)
            .ok_or_else(|| Error::Validation(format!("unknown component {:?}", c.name)))?;
        let [a, b] = c.rows;
        components.push(Component { role, rows: a..b });
    }
    Scheme::new(matrix, thresholds, space, components).map_err(|e| match e {
        Error::Validation(_) => e,
        other => Error::Validation(other.to_string()),
    })
}

pub fn save_scheme(scheme: &Scheme, pair: &SchemeFilePair) -> Result<()> {
    save_matrix(scheme.matrix(), &pair.matrix)?;
    let mut json = scheme_metadata(scheme);
    json.push('\n');
    fs::write(&pair.metadata, json).map_err(|e| io_err(&pair.metadata, e))
}

pub fn load_scheme(pair: &SchemeFilePair) -> Result<Scheme> {
    let matrix = load_matrix(&pair.matrix)?;
    let json = fs::read_to_string(&pair.metadata).map_err(|e| io_err(&pair.metadata, e))?;
    scheme_from_parts(matrix, &json)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> PathBuf {
        PathBuf::from("m.mat")
    }

    #[test]
    fn one_row_format() {
        let m = BinaryMatrix::from_strs(&["101"]).unwrap();
        assert_eq!(format_matrix(&m), "1 3\n101\n");
        assert_eq!(parse_matrix("1 3\n101\n", &p()).unwrap(), m);
    }

    #[test]
    fn parse_errors_carry_lines() {
        let line = |text: &str| match parse_matrix(text, &p()) {
            Err(Error::Parse { line, .. }) => line,
            other => panic!("expected parse error, got {other:?}"),
        };
        assert_eq!(line(""), 1);
        assert_eq!(line("2 x\n"), 1);
        assert_eq!(line("2 3\n101\n1021\n"), 3);
        assert_eq!(line("2 3\n101\n1x1\n"), 3);
        assert_eq!(line("2 3\n101\n"), 3);
        assert_eq!(line("1 3\n101\n111\n"), 3);
        assert_eq!(line("1 3\n101"), 2);
    }

    #[test]
    fn prefix_paths() {
        let pair = SchemeFilePair::from_prefix("/tmp/a.b/run");
        assert_eq!(pair.matrix, PathBuf::from("/tmp/a.b/run.mat"));
        assert_eq!(pair.metadata, PathBuf::from("/tmp/a.b/run.json"));
    }

    fn small_scheme() -> Scheme {
        let m = BinaryMatrix::from_strs(&["0101", "0011", "1111"]).unwrap();
        Scheme::new(
            m,
            Thresholds::saturation(2).unwrap(),
            BurstSpace::Bounded { ell: 2 },
            vec![Component {
                role: Role::Integer,
                rows: 0..3,
            }],
        )
        .unwrap()
    }

    #[test]
    fn metadata_layout() {
        assert_eq!(
            scheme_metadata(&small_scheme()),
            r#"{"model":"bounded","n":4,"ell":2,"thresholds":[1,2],"components":[{"name":"integer","rows":[0,3]}]}"#
        );
    }

    #[test]
    fn metadata_errors() {
        let m = small_scheme().matrix().clone();
        let missing =
            r#"{"model":"bounded","n":4,"ell":2,"components":[{"name":"integer","rows":[0,3]}]}"#;
        assert!(matches!(
            scheme_from_parts(m.clone(), missing),
            Err(Error::Validation(_))
        ));
        let wrong_n = r#"{"model":"bounded","n":5,"ell":2,"thresholds":[1,2],"components":[{"name":"integer","rows":[0,3]}]}"#;
        assert!(matches!(
            scheme_from_parts(m.clone(), wrong_n),
            Err(Error::Validation(_))
        ));
        let gap = r#"{"model":"bounded","n":4,"ell":2,"thresholds":[1,2],"components":[{"name":"integer","rows":[0,2]}]}"#;
        assert!(matches!(
            scheme_from_parts(m.clone(), gap),
            Err(Error::Validation(_))
        ));
        let role = r#"{"model":"bounded","n":4,"ell":2,"thresholds":[1,2],"components":[{"name":"x","rows":[0,3]}]}"#;
        assert!(matches!(
            scheme_from_parts(m.clone(), role),
            Err(Error::Validation(_))
        ));
        let model = r#"{"model":"odd","n":4,"ell":2,"thresholds":[1,2],"components":[{"name":"integer","rows":[0,3]}]}"#;
        assert!(matches!(
            scheme_from_parts(m, model),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn scheme_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let pair = SchemeFilePair::from_prefix(dir.path().join("s"));
        let scheme = small_scheme();
        save_scheme(&scheme, &pair).unwrap();
        assert_eq!(load_scheme(&pair).unwrap(), scheme);
    }
}
