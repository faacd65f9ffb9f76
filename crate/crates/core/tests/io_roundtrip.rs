use std::path::Path;

use burst_sqgt::bounded::build_bounded_scheme;
use burst_sqgt::io::{
    format_matrix, load_matrix, load_scheme, parse_matrix, save_matrix, save_scheme, SchemeFilePair,
};
use burst_sqgt::refine::{build_b, build_fixed_scheme};
use burst_sqgt::{BinaryMatrix, BuildOptions, Error, Thresholds};
use proptest::prelude::*;

#[test]
fn example_b_file_shape() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("b.mat");
    save_matrix(build_b(2, 7).unwrap().matrix(), &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "7 29");
    assert_eq!(lines.len(), 8);
    assert!(lines[1..].iter().all(|l| l.len() == 29));
    assert_eq!(lines[1], "00011011000000000000000001111");
}

#[test]
fn fixed_scheme_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let pair = SchemeFilePair::from_prefix(dir.path().join("fixed"));
    let built = build_fixed_scheme(
        2048,
        2,
        7,
        &Thresholds::new(vec![1, 2, 4]).unwrap(),
        &BuildOptions::default(),
    )
    .unwrap();
    save_scheme(&built.scheme, &pair).unwrap();
    assert_eq!(
        std::fs::read_to_string(&pair.metadata).unwrap().trim_end(),
        r#"{"model":"fixed","n":2048,"ell":29,"thresholds":[1,2,4],"components":[{"name":"sketch","rows":[0,4]},{"name":"refine","rows":[4,11]}]}"#
    );
    assert_eq!(load_scheme(&pair).unwrap(), built.scheme);
}

#[test]
fn bounded_scheme_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let pair = SchemeFilePair::from_prefix(dir.path().join("bounded"));
    let built = build_bounded_scheme(256, 16, 4, None, &BuildOptions::default()).unwrap();
    save_scheme(&built.scheme, &pair).unwrap();
    let meta = std::fs::read_to_string(&pair.metadata).unwrap();
    for name in ["phase1", "phase2", "integer"] {
        assert!(meta.contains(&format!("\"name\":\"{name}\"")));
    }
    assert_eq!(load_scheme(&pair).unwrap(), built.scheme);
}

#[test]
fn metadata_must_match_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let pair = SchemeFilePair::from_prefix(dir.path().join("s"));
    let built = build_bounded_scheme(64, 8, 2, None, &BuildOptions::default()).unwrap();
    save_scheme(&built.scheme, &pair).unwrap();
    save_matrix(&BinaryMatrix::zeros(3, 64).unwrap(), &pair.matrix).unwrap();
    assert!(matches!(load_scheme(&pair), Err(Error::Validation(_))));
    std::fs::write(
        &pair.metadata,
        r#"{"model":"bounded","n":64,"ell":8,"components":[]}"#,
    )
    .unwrap();
    assert!(matches!(load_scheme(&pair), Err(Error::Validation(_))));
}

#[test]
fn missing_files_are_io_errors() {
    assert!(matches!(
        load_matrix(Path::new("/nonexistent/x.mat")),
        Err(Error::Io { .. })
    ));
}

fn matrix() -> impl Strategy<Value = BinaryMatrix> {
    (1usize..12, 1usize..80).prop_flat_map(|(r, c)| {
        prop::collection::vec(prop::collection::vec(0u8..2, c), r)
            .prop_map(|rows| BinaryMatrix::from_rows(&rows).unwrap())
    })
}

proptest! {
    #[test]
    fn matrix_round_trip(m in matrix()) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.mat");
        save_matrix(&m, &path).unwrap();
        prop_assert_eq!(load_matrix(&path).unwrap(), m.clone());
        let text = format_matrix(&m);
        prop_assert_eq!(text.len(), format!("{} {}\n", m.rows(), m.cols()).len() + m.rows() * (m.cols() + 1));
    }

    #[test]
    fn stray_character_is_located(m in matrix(), pick in any::<usize>()) {
        let mut text = format_matrix(&m).into_bytes();
        let header = text.iter().position(|&b| b == b'\n').unwrap() + 1;
        let r = pick % m.rows();
        let c = (pick / 7) % m.cols();
        text[header + r * (m.cols() + 1) + c] = b'2';
        let err = parse_matrix(std::str::from_utf8(&text).unwrap(), Path::new("x")).unwrap_err();
        let located = matches!(err, Error::Parse { line, .. } if line == r + 2);
        prop_assert!(located, "{}", err);
    }
}
