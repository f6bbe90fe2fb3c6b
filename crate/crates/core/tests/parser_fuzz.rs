use ecg_augment::dataset::{
    container::{parse_matrices, write_matrix},
    decode_batch, encode_batch, load_labels, ContainerError, DatasetManifest, Matrix, MatrixValues,
};
use ecg_augment::{AugmentPolicy, Label, Record, Signal};
use proptest::prelude::*;

fn container_fixture() -> Vec<u8> {
    write_matrix(&Matrix::new(
        "val",
        2,
        3,
        MatrixValues::Int16(vec![1, -2, 3, -4, 5, -6]),
    ))
}

fn batch_fixture() -> Vec<u8> {
    let records: Vec<Record> = (0..3)
        .map(|i| {
            let s = Signal::single_lead(50.0, vec![i as f32; 8]).unwrap();
            Record::new(format!("A{i:05}"), s, Some(Label::Other)).unwrap()
        })
        .collect();
    encode_batch(&records, Some("00ff")).unwrap()
}

fn mutate(mut bytes: Vec<u8>, edits: &[(usize, u8)], cut: Option<usize>) -> Vec<u8> {
    for &(pos, val) in edits {
        if !bytes.is_empty() {
            let i = pos % bytes.len();
            bytes[i] = val;
        }
    }
    if let Some(c) = cut {
        bytes.truncate(c % (bytes.len() + 1));
    }
    bytes
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn random_bytes_never_panic(bytes in proptest::collection::vec(any::<u8>(), 0..256)) {
        let _ = parse_matrices(&bytes);
        let _ = decode_batch(&bytes);
        let _ = load_labels(&bytes);
        if let Ok(text) = std::str::from_utf8(&bytes) {
            let _ = DatasetManifest::parse(text);
            let _ = AugmentPolicy::from_toml_str(text);
        }
    }

    #[test]
    fn mutated_fixtures_never_panic(
        edits in proptest::collection::vec((any::<usize>(), any::<u8>()), 0..6),
        cut in proptest::option::of(any::<usize>()),
    ) {
        let c = mutate(container_fixture(), &edits, cut);
        if let Ok(ms) = parse_matrices(&c) {
            for m in ms {
                prop_assert_eq!(m.values.len(), m.rows * m.cols);
            }
        }
        let b = mutate(batch_fixture(), &edits, cut);
        if let Ok(batch) = decode_batch(&b) {
            prop_assert!(batch.records.len() <= 3);
        }
    }
}

#[test]
fn huge_declared_dimensions_are_rejected_without_allocating() {
    for (rows, cols) in [(i32::MAX, i32::MAX), (1 << 20, 1 << 20), (-1, 5), (1, -7)] {
        let mut bytes = Vec::new();
        for v in [0i32, rows, cols, 0, 4] {
            bytes.extend_from_slice(&v.to_le_bytes());
        }
        bytes.extend_from_slice(b"val\0");
        let err = parse_matrices(&bytes).unwrap_err();
        assert!(
            matches!(
                err,
                ContainerError::OversizedPayload { .. }
                    | ContainerError::InvalidDimensions { .. }
                    | ContainerError::TruncatedPayload { .. }
            ),
            "{err:?}"
        );
    }
    let mut bytes = Vec::new();
    for v in [0i32, 1, 1, 0, i32::MAX] {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    assert!(parse_matrices(&bytes).is_err());
}

#[test]
fn batch_with_oversized_header_length_is_rejected() {
    let mut bytes = b"ECGB0001".to_vec();
    bytes.extend_from_slice(&u32::MAX.to_le_bytes());
    bytes.extend_from_slice(b"{}");
    assert!(decode_batch(&bytes).is_err());
}
