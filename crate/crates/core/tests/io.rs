use std::f64::consts::TAU;

use tt_flock::experiments::{
    make_initial_data, read_checkpoint, read_series, write_checkpoint, write_series, InitSpec,
    TimeSeriesRecord,
};
use tt_flock::spectral::{make_grid, Dealias};
use tt_flock::Error;

fn state() -> tt_flock::models::State {
    let g = make_grid(2, 16, TAU, Dealias::OneHalf).unwrap();
    let mut s = make_initial_data(
        &g,
        &InitSpec::RandomSmall {
            epsilon: 1e-2,
            k0: 4.0,
            seed: 4,
        },
        None,
    )
    .unwrap();
    s.t = 3.25;
    s
}

#[test]
fn checkpoint_roundtrip_is_bitwise() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("a.ttlb");
    let s = state();
    write_checkpoint(&p, &s).unwrap();
    let r = read_checkpoint(&p).unwrap();
    assert_eq!(r.t, s.t);
    assert_eq!(r.fields.max_abs_diff(&s.fields), 0.0);
}

#[test]
fn corrupted_checkpoints_are_detected() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("a.ttlb");
    write_checkpoint(&p, &state()).unwrap();
    let good = std::fs::read(&p).unwrap();

    let mut flipped = good.clone();
    let mid = flipped.len() / 2;
    flipped[mid] ^= 0x10;
    std::fs::write(&p, &flipped).unwrap();
    assert!(matches!(read_checkpoint(&p), Err(Error::Checkpoint { .. })));

    std::fs::write(&p, &good[..good.len() - 9]).unwrap();
    assert!(matches!(read_checkpoint(&p), Err(Error::Checkpoint { .. })));

    let mut magic = good.clone();
    magic[0] = b'X';
    std::fs::write(&p, &magic).unwrap();
    assert!(matches!(read_checkpoint(&p), Err(Error::Checkpoint { .. })));

    let e = read_checkpoint(&dir.path().join("missing.ttlb")).unwrap_err();
    assert_eq!(e.exit_code(), 3);
}

#[test]
fn series_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("s.jsonl");
    let mut rec = TimeSeriesRecord {
        t: 1.5,
        h3: 2.0,
        hm: 2.0,
        hdot_minus_s: 0.5,
        hdot_l: vec![1.0, 0.25],
        ubar_l2: 0.1,
        hypo: 4.1,
        envelope: vec![1.2, 0.5],
        mean_eta: 0.0,
        ledger: Default::default(),
    };
    rec.ledger.insert("ledger.k0.residual".into(), 1e-9);
    let header = serde_json::json!({ "version": 1 });
    write_series(&p, &header, std::slice::from_ref(&rec)).unwrap();
    let text = std::fs::read_to_string(&p).unwrap();
    for key in [
        "\"t\"",
        "\"h3\"",
        "\"hm\"",
        "\"hdot_minus_s\"",
        "\"hdot_l\"",
        "\"ubar_l2\"",
        "\"hypo\"",
        "\"envelope\"",
        "\"ledger.k0.residual\"",
    ] {
        assert!(text.lines().nth(1).unwrap().contains(key), "{key}");
    }
    let (h, recs) = read_series(&p).unwrap();
    assert_eq!(h, header);
    assert_eq!(recs.len(), 1);
    assert_eq!(recs[0].hdot_l, rec.hdot_l);
    assert_eq!(recs[0].ledger, rec.ledger);
}
