use stabgap_wasm::ops;

#[test]
fn t_state() {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let v = ops::state_entropies(2, 1, &[r, 0.5], &[0.0, 0.5]).unwrap();
    assert!((v["linear"].as_f64().unwrap() - 0.25).abs() < 1e-12);
    assert!(ops::state_entropies(2, 1, &[1.0], &[0.0, 0.0]).is_err());
    assert!(ops::state_entropies(3, 7, &[1.0], &[0.0]).is_err());
}

#[test]
fn tetrahedron() {
    let v = ops::polyhedron_gap(4, 1).unwrap();
    assert!((v["extrinsic"].as_f64().unwrap() - 17.0 / 45.0).abs() < 1e-9);
    assert_eq!(v["d_small"], 2);
    assert!(ops::polyhedron_gap(8, 2).is_err());
}

#[test]
fn stars_round_trip() {
    let v = ops::majorana_stars(3, &[0.3, -0.2, 0.5, 0.1], &[0.1, 0.4, 0.0, -0.6]).unwrap();
    assert_eq!(v["stars"].as_array().unwrap().len(), 3);
    assert!((v["round_trip_fidelity"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    let sep = v["separable_se"].as_f64().unwrap();
    assert!(sep >= 0.0);
    assert!(ops::majorana_stars(2, &[1.0], &[0.0]).is_err());
}
