use superlens::analytic::zeroth_order_field;
use superlens::forward::io::{read_field_binary, read_trace_csv, write_field_binary, write_trace_csv};
use superlens::forward::{solve_total_field, trace_on_gamma_b, Grid, Profile, ProfileShape, SolverOptions};
use superlens::measurement::{apply_noise, sample_trace, MeasurementSet};
use superlens::reconstruction::{profile_error, reconstruct_profile};
use superlens::spectral::alpha;
use superlens::{SceneParameters, C64};

fn small() -> Grid {
    Grid { nx: 64, ny_omega: 33, ny_slab: 33 }
}

fn high_index() -> SceneParameters {
    SceneParameters::experiment(C64::new(16.0, 0.0), C64::new(1.0, 0.0))
}

/// `g` written as a Fourier shape, translated by `s`.
fn shifted_smooth(s: f64) -> Profile {
    let base = Profile::smooth(0.01);
    let coefficients = (-10..=10)
        .map(|n| (n, base.coefficient(n) * C64::from_polar(1.0, -alpha(n, 1.0) * s)))
        .collect();
    Profile::new(0.01, 1.0, ProfileShape::Fourier { coefficients }).unwrap()
}

#[test]
fn translating_the_profile_translates_the_trace() {
    let grid = small();
    let h = 1.0 / grid.nx as f64;
    for p in [SceneParameters::vacuum(), high_index()] {
        let t0 = trace_on_gamma_b(&solve_total_field(&shifted_smooth(0.0), &p, &grid, &SolverOptions::default()).unwrap());
        for k in [1usize, 5, 17] {
            let f = solve_total_field(&shifted_smooth(k as f64 * h), &p, &grid, &SolverOptions::default()).unwrap();
            let t = trace_on_gamma_b(&f);
            let scale = t0.iter().map(|v| v.norm()).fold(0.0, f64::max);
            let err = (0..grid.nx)
                .map(|j| (t[(j + k) % grid.nx] - t0[j]).norm())
                .fold(0.0, f64::max);
            assert!(err < 1e-8 * scale, "{} shift {k}: {err:e}", p.label());
        }
    }
}

#[test]
fn fourier_shape_matches_cosine_shape() {
    let p = high_index();
    let a = trace_on_gamma_b(&solve_total_field(&Profile::smooth(0.01), &p, &small(), &SolverOptions::default()).unwrap());
    let b = trace_on_gamma_b(&solve_total_field(&shifted_smooth(0.0), &p, &small(), &SolverOptions::default()).unwrap());
    for (u, v) in a.iter().zip(&b) {
        assert!((u - v).norm() < 1e-10);
    }
}

#[test]
fn forward_measure_reconstruct() {
    let p = high_index();
    let truth = Profile::smooth(0.01);
    let field = solve_total_field(&truth, &p, &small(), &SolverOptions::default()).unwrap();
    assert!(field.report.backward_error < 1e-10);
    let clean = sample_trace(&trace_on_gamma_b(&field), &p, 100).unwrap();
    let r = reconstruct_profile(&clean, &p, 3).unwrap();
    let e = profile_error(&r, &truth, 200);
    // modes 1 and 3 come back within the linearisation error
    assert!(e.mode(1).unwrap().rel_error.unwrap() < 0.02);
    assert!(e.mode(3).unwrap().rel_error.unwrap() < 0.05);
    assert!(e.max_imaginary < 1e-3 * 0.01);

    let noisy = apply_noise(&clean, 0.05, 7).unwrap();
    let mut buf = Vec::new();
    noisy.write_csv(&mut buf).unwrap();
    let back = MeasurementSet::read_csv(buf.as_slice(), None).unwrap();
    assert_eq!(back, noisy);
    let r2 = reconstruct_profile(&back, &back.scene, 3).unwrap();
    assert_eq!(r2.coefficients, reconstruct_profile(&noisy, &p, 3).unwrap().coefficients);
}

#[test]
fn flat_trace_equals_zeroth_order_trace() {
    for p in [SceneParameters::vacuum(), high_index()] {
        let f = solve_total_field(&Profile::flat(), &p, &Grid { nx: 8, ny_omega: 129, ny_slab: 129 }, &SolverOptions::default())
            .unwrap();
        let u0 = zeroth_order_field(&p).unwrap().trace();
        for u in trace_on_gamma_b(&f) {
            assert!((u - u0).norm() < 1e-4 * u0.norm().max(1.0));
        }
    }
}

#[test]
fn trace_and_field_files_round_trip() {
    let p = high_index();
    let f = solve_total_field(&Profile::tent(0.01), &p, &small(), &SolverOptions::default()).unwrap();
    let trace = trace_on_gamma_b(&f);
    let mut buf = Vec::new();
    write_trace_csv(&mut buf, &f.x(), &trace, &[("scene", serde_json::to_string(&p).unwrap())]).unwrap();
    let (h, x, t) = read_trace_csv(buf.as_slice()).unwrap();
    assert_eq!(t, trace);
    assert_eq!(x, f.x());
    let scene: SceneParameters = serde_json::from_str(&h["scene"]).unwrap();
    assert_eq!(scene, p);

    let mut bin = Vec::new();
    write_field_binary(&mut bin, &f).unwrap();
    let dump = read_field_binary(bin.as_slice()).unwrap();
    assert_eq!((dump.nx, dump.ny), (64, 65));
    assert_eq!(dump.values, f.values.concat());
}
