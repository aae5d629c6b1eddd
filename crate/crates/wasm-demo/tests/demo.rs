use mitivqe_wasm::*;

#[test]
fn hardware_parameters_and_ground_state() {
    assert!((ground_energy() - -15.56089).abs() < 1e-4);
    let e = exact_energy(&hardware_theta());
    assert!(e > ground_energy() && e < -15.55);
    assert_eq!(exact_energy(&[]), e);
}

#[test]
fn scan_passes_through_the_start_point() {
    let theta = hardware_theta();
    let scan = energy_scan(&theta, 3, 201);
    assert_eq!(scan.len(), 201);
    assert!(scan.iter().all(|&e| e >= ground_energy() - 1e-9));
    // Endpoints are the same angle.
    assert!((scan[0] - scan[200]).abs() < 1e-10);
}

#[test]
fn zne_reports_every_fit() {
    let out = zne_demo(&[], 1e-3, 1e-2, 4000, 1);
    assert_eq!(out.len(), 7);
    assert!(out[..5].iter().all(|v| v.is_finite()));
    assert!(out[0] < out[2], "noise raises the energy with scale");
}

#[test]
fn trex_lambdas_follow_the_flip_rate() {
    let out = trex_demo(&[], 0.05, 4000, 3);
    let exact = out[2];
    assert!((out[1] - exact).abs() < (out[0] - exact).abs());
    for (w, lambda) in out[3..].iter().enumerate() {
        let expect = 0.9f64.powi(w as i32 + 1);
        assert!((lambda - expect).abs() < 0.03, "weight {}: {lambda}", w + 1);
    }
}
