use fracdim::experiments::{switching_series, TrackingExperimentSpec};
use fracdim::{
    generate_fbm, summarize, track, EstimatorConfig, FbmSpec, Method, TimeSeries, TrackingConfig,
};

fn fbm(h: f64, n: usize, seed: u64) -> TimeSeries {
    generate_fbm(&FbmSpec::new(h, n, seed).unwrap())
}

#[test]
fn estimates_depend_only_on_the_window() {
    let x = fbm(0.5, 2048, 11);
    let est = EstimatorConfig::new(32).with_alpha(4.0 / 512.0);
    for method in [Method::Higuchi, Method::Bk, Method::Pursuit] {
        let cfg = TrackingConfig::new(512, method, est).with_stride(7);
        let base = track(&x, &cfg).unwrap();
        let probe = &base.steps[100];
        let (lo, hi) = (probe.window_start - 1, probe.window_start - 1 + 512);

        let mut perturbed = x.samples().to_vec();
        for (i, v) in perturbed.iter_mut().enumerate() {
            if i < lo || i >= hi {
                *v = *v * 3.0 + 17.0;
            }
        }
        let other = track(&TimeSeries::new(perturbed).unwrap(), &cfg).unwrap();
        assert_eq!(
            other.steps[100].dimension.unwrap().to_bits(),
            probe.dimension.unwrap().to_bits(),
            "{method}"
        );
    }
}

#[test]
fn strided_trace_subsamples_unit_stride() {
    let x = fbm(0.6, 1500, 5);
    let est = EstimatorConfig::new(16).with_alpha(2.0 / 256.0);
    for method in [Method::Higuchi, Method::Bk, Method::Pursuit] {
        let full = track(&x, &TrackingConfig::new(256, method, est)).unwrap();
        for stride in [2, 5, 16] {
            let sub = track(
                &x,
                &TrackingConfig::new(256, method, est).with_stride(stride),
            )
            .unwrap();
            let expected: Vec<_> = full.steps.iter().step_by(stride).collect();
            assert_eq!(sub.steps.len(), expected.len());
            for (s, e) in sub.steps.iter().zip(expected) {
                assert_eq!(s.window_start, e.window_start);
                assert_eq!(s.dimension.map(f64::to_bits), e.dimension.map(f64::to_bits));
            }
        }
    }
}

#[test]
fn tracking_is_deterministic() {
    let x = fbm(0.4, 3000, 8);
    let cfg = TrackingConfig::new(
        1024,
        Method::Pursuit,
        EstimatorConfig::new(64).with_alpha(1e-3),
    )
    .with_stride(3);
    assert_eq!(track(&x, &cfg).unwrap(), track(&x, &cfg).unwrap());
}

#[test]
fn pure_fbm_trace_is_stable() {
    // Per-trace std-dev over these seeds is 0.010-0.029.
    let cfg = TrackingConfig::new(4096, Method::Higuchi, EstimatorConfig::new(64)).with_stride(64);
    for seed in 0..10 {
        let x = fbm(0.5, 1 << 14, 100 + seed);
        let dims: Vec<f64> = track(&x, &cfg).unwrap().dimensions().flatten().collect();
        let s = summarize(&dims).unwrap();
        assert!(s.std_dev < 0.1, "seed {seed}: std-dev {}", s.std_dev);
        assert!((s.mean - 1.5).abs() < 0.05, "seed {seed}: mean {}", s.mean);
    }
}

#[test]
fn switching_series_trace_moves_from_first_to_second_regime() {
    let spec = TrackingExperimentSpec::default();
    let x = switching_series(&spec, 21).unwrap();
    assert_eq!(x.len(), (1 << 14) - 1);
    assert_eq!(x.at(1 << 13), 0.0);
    let cfg = TrackingConfig::new(4096, Method::Higuchi, EstimatorConfig::new(64)).with_stride(256);
    let trace = track(&x, &cfg).unwrap();
    let first = trace.steps.first().unwrap().dimension.unwrap();
    let last = trace.steps.last().unwrap().dimension.unwrap();
    assert!((first - 1.3).abs() < 0.1, "first {first}");
    assert!((last - 1.5).abs() < 0.1, "last {last}");
}
