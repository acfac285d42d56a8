use levygof::condmoments::QuantileSplit;
use levygof::distributions::sample_levy;
use levygof::estimators::*;
use levygof::{Error, LevyParams, RandomStream, Sample};
use proptest::prelude::*;

fn levy_sample(c: f64, n: usize, seed: u64) -> Sample {
    Sample::new(
        sample_levy(
            &LevyParams::scale(c).unwrap(),
            n,
            &mut RandomStream::new(seed, 0),
        )
        .unwrap(),
    )
    .unwrap()
}

fn split(a: f64, b: f64) -> QuantileSplit {
    QuantileSplit::new(a, b).unwrap()
}

#[test]
fn all_estimators_are_consistent() {
    let s = levy_sample(2.0, 1_000_000, 31);
    let qcm = estimate_qcm(&s, &split(0.02, 0.48)).unwrap().value;
    let qcv = estimate_qcv(&s, &split(0.0, 0.7)).unwrap().value;
    let mle = estimate_mle(&s).unwrap().value;
    let cov = estimate_cov(&s).unwrap().value;
    assert!((qcm - 2.0).abs() < 0.02, "qcm {qcm}");
    assert!((qcv - 2.0).abs() < 0.05, "qcv {qcv}");
    assert!((mle - 2.0).abs() < 0.01, "mle {mle}");
    assert!((cov - 2.0).abs() < 0.05, "cov {cov}");
}

#[test]
fn mle_of_constant_sample() {
    let s = Sample::new(vec![4.25; 9]).unwrap();
    assert!((estimate_mle(&s).unwrap().value - 4.25).abs() < 1e-14);
}

#[test]
fn estimate_records_method_and_split() {
    let s = levy_sample(1.0, 100, 1);
    let e = estimate(EstimatorKind::Qcm, &s, Some(&split(0.2, 0.48))).unwrap();
    assert_eq!(e.method, EstimatorKind::Qcm);
    assert_eq!(e.split, Some(split(0.2, 0.48)));
    let e = estimate(EstimatorKind::Mle, &s, None).unwrap();
    assert_eq!(e.split, None);
    assert!(estimate(EstimatorKind::Qcv, &s, None).is_err());
}

#[test]
fn precondition_failures() {
    let negative = Sample::new(vec![1.0, -2.0, 3.0]).unwrap();
    assert!(matches!(estimate_mle(&negative), Err(Error::Domain(_))));
    assert!(matches!(estimate_cov(&negative), Err(Error::Domain(_))));
    let tiny = Sample::new(vec![1e-310, 1.0]).unwrap();
    assert!(estimate_mle(&tiny).is_err());

    let constant = Sample::new(vec![2.0; 30]).unwrap();
    assert!(matches!(
        estimate_qcv(&constant, &split(0.0, 0.7)),
        Err(Error::Estimation(_))
    ));
    assert!(matches!(estimate_cov(&constant), Err(Error::Estimation(_))));
    assert!(estimate_cov(&Sample::new(vec![3.0]).unwrap()).is_err());

    let mixed = Sample::new(vec![-5.0, -4.0, -3.0, -2.0, 10.0]).unwrap();
    assert!(matches!(
        estimate_qcm(&mixed, &split(0.0, 0.6)),
        Err(Error::Estimation(_))
    ));
}

#[test]
fn kinds_parse() {
    for (s, k) in [
        ("qcm", EstimatorKind::Qcm),
        ("QCV", EstimatorKind::Qcv),
        ("mle", EstimatorKind::Mle),
        ("cov", EstimatorKind::Cov),
    ] {
        assert_eq!(s.parse::<EstimatorKind>().unwrap(), k);
    }
    assert!("median".parse::<EstimatorKind>().is_err());
}

fn positive_sample() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(1e-3f64..1e4, 30..150)
}

proptest! {
    #[test]
    fn estimators_are_scale_equivariant(v in positive_sample(), lambda in 1e-3f64..1e3) {
        let s = Sample::new(v).unwrap();
        let t = s.affine(lambda, 0.0).unwrap();
        let pairs = [
            (estimate_qcm(&s, &split(0.02, 0.48)), estimate_qcm(&t, &split(0.02, 0.48))),
            (estimate_qcv(&s, &split(0.0, 0.7)), estimate_qcv(&t, &split(0.0, 0.7))),
            (estimate_mle(&s), estimate_mle(&t)),
        ];
        for (base, scaled) in pairs {
            let (base, scaled) = (base.unwrap().value, scaled.unwrap().value);
            prop_assert!((scaled - lambda * base).abs() <= 1e-10 * scaled);
        }
        if let (Ok(base), Ok(scaled)) = (estimate_cov(&s), estimate_cov(&t)) {
            prop_assert!((scaled.value - lambda * base.value).abs() <= 1e-9 * scaled.value);
        }
    }

    #[test]
    fn qcv_is_location_invariant(v in positive_sample(), mu in -1e3f64..1e3) {
        let s = Sample::new(v).unwrap();
        let base = estimate_qcv(&s, &split(0.0, 0.7)).unwrap().value;
        let shifted = estimate_qcv(&s.affine(1.0, mu).unwrap(), &split(0.0, 0.7)).unwrap().value;
        prop_assert!((shifted - base).abs() <= 1e-9 * base);
    }

    #[test]
    fn cov_is_positive_on_positive_data(v in positive_sample()) {
        // ln is increasing, so W and Z = ln W are comonotone: the cross-product
        // sum is positive unless all observations coincide.
        let s = Sample::new(v).unwrap();
        prop_assert!(estimate_cov(&s).unwrap().value > 0.0);
    }
}

fn correlation(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let cov: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    cov / (vx * vy).sqrt()
}

#[test]
fn pairwise_correlations_match_reference_matrix() {
    use levygof::montecarlo::{simulate_estimators, ReplicationPlan};
    let plan = ReplicationPlan::new(6, 10_000).unwrap().with_workers(4);
    // The reference matrix is reproduced with the QCV window (0.0, 0.3); the
    // boxplot window (0.0, 0.7) gives visibly weaker QCV correlations.
    let draws = simulate_estimators(
        &LevyParams::scale(2.0).unwrap(),
        250,
        QuantileSplit::new(0.02, 0.48).unwrap(),
        QuantileSplit::new(0.0, 0.3).unwrap(),
        &plan,
    )
    .unwrap();
    let cols: Vec<Vec<f64>> = vec![
        draws.iter().map(|d| d.qcm).collect(),
        draws.iter().map(|d| d.qcv).collect(),
        draws.iter().map(|d| d.mle).collect(),
        draws.iter().map(|d| d.cov).collect(),
    ];
    // Upper triangle in the order qcm, qcv, mle, cov.
    let reference = [
        ((0, 1), 0.85),
        ((0, 2), 0.83),
        ((0, 3), 0.40),
        ((1, 2), 0.60),
        ((1, 3), 0.23),
        ((2, 3), 0.76),
    ];
    let mut misses = Vec::new();
    for ((i, j), want) in reference {
        let r = correlation(&cols[i], &cols[j]);
        if (r - want).abs() > 0.05 {
            misses.push(format!("({i},{j}): {r:.3} vs {want}"));
        }
    }
    assert!(misses.is_empty(), "{misses:?}");
}
