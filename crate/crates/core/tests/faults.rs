use ncdiff::faults;
use ncdiff::verify::{verify_all, Options};
use ncdiff::{builtins, Error, Geometry, Scalar};

#[test]
fn load_time_faults_name_their_check() {
    for f in faults::all() {
        let w = f.detect().unwrap_or_else(|e| panic!("{e}"));
        assert!(!w.is_empty());
    }
}

#[test]
fn fault_witnesses_point_at_basis_data() {
    let w = faults::broken_leibniz().detect().unwrap();
    assert!(w.starts_with("d(δ"), "{w}");
    let w = faults::non_linear_field().detect().unwrap();
    assert!(w.contains("f01"), "{w}");
    let w = faults::non_associative().detect().unwrap();
    assert!(w.contains(")·δ"), "{w}");
    let w = faults::negative_state().detect().unwrap();
    assert!(w.contains("uniform"), "{w}");
    let w = faults::singular_sigma().detect().unwrap();
    assert!(w.contains("kills"), "{w}");
}

#[test]
fn a_sound_bundle_is_not_a_fault() {
    let mut f = faults::negative_state();
    f.bundle = builtins::two_point();
    assert!(f.detect().is_err());
}

#[test]
fn doubled_box_is_caught_by_ev_duality() {
    let g = faults::doubled_box();
    let b = builtins::two_point();
    let opts = Options { suites: vec!["bullet".into(), "ev-duality".into()], seed: 1 };
    let (report, _) = verify_all(&b, &g, &opts).unwrap();
    assert!(!report.passed);
    let ev = report.suite("ev-duality").unwrap();
    let failed: Vec<_> = ev.failures().collect();
    assert!(!failed.is_empty());
    assert!(failed.iter().all(|o| o.check == "ev-leibniz" && o.witness.is_some()));
    // The product only sees the dual connection, which is a left connection for any □.
    assert!(report.suite("bullet").unwrap().passed);
}

#[test]
fn doubled_box_would_fail_loading() {
    let mut b = builtins::two_point();
    b.right_connection.box_ = b.right_connection.box_.scale(&Scalar::from_int(2));
    let Err(err) = Geometry::from_bundle(&b, None) else { panic!("doubled □ loaded") };
    assert!(matches!(err, Error::Validation { ref check, .. } if check == "box-leibniz"), "{err}");
}
