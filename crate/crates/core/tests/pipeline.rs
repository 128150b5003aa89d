use lensfocus::dataset::BundledTable;
use lensfocus::estimation::{
    aggregate, estimate_row, propagate_uncertainty, EstimateRow, ObservationRow, RoundingMode,
};
use lensfocus::optics::{
    focal_from_magnification, width_two_position, LensKind, Magnification, TransverseWidth,
};
use lensfocus::sensor::PixelCount;
use lensfocus::simulation::NoiseSpec;
use lensfocus::Error;
use proptest::prelude::*;

fn row(obs_no: u32, d1: f64, p1: u32, d: f64, p2: u32) -> ObservationRow {
    ObservationRow {
        obs_no,
        d1_cm: d1,
        pixel1: PixelCount(p1),
        d_cm: d,
        pixel2: PixelCount(p2),
    }
}

#[test]
fn table1_row1_in_table_mode() {
    let s = BundledTable::Concave.session();
    let r = estimate_row(
        &s.camera,
        &s.object,
        Some(LensKind::Concave),
        &s.rows[0],
        RoundingMode::TableReproduction,
    )
    .unwrap();
    assert_eq!(r.i1_cm, 0.2059);
    assert_eq!(r.i2_cm, 0.0639);
    assert_eq!(r.width_cm, 3.76);
    assert_eq!(r.focal_length_cm, -26.7);
}

#[test]
fn table2_row10_depends_on_rounding_mode() {
    let s = BundledTable::Convex.session();
    let obs = s.rows[9];
    let table = estimate_row(
        &s.camera,
        &s.object,
        None,
        &obs,
        RoundingMode::TableReproduction,
    )
    .unwrap();
    assert_eq!(
        (
            table.i1_cm,
            table.i2_cm,
            table.width_cm,
            table.focal_length_cm
        ),
        (0.0244, 0.0218, 4.17, 17.5)
    );

    // Python evaluation of the unrounded chain:
    // I = 8.6 / (0.422 |1/0.02184 - 1/0.02436|), f = -9.1 / (2/I - 1)
    let full = estimate_row(
        &s.camera,
        &s.object,
        None,
        &obs,
        RoundingMode::FullPrecision,
    )
    .unwrap();
    assert!((full.width_cm - 4.302_445_497_630_337).abs() < 1e-12);
    assert!((full.focal_length_cm - 17.004_638_793_287_977).abs() < 1e-10);
}

#[test]
fn equal_pixels_are_degenerate() {
    let s = BundledTable::Concave.session();
    let r = estimate_row(
        &s.camera,
        &s.object,
        None,
        &row(1, 4.0, 700, 10.0, 700),
        RoundingMode::FullPrecision,
    );
    assert!(matches!(r, Err(Error::DegenerateObservation(_))));
}

#[test]
fn declared_kind_must_match_sign() {
    let s = BundledTable::Concave.session();
    let r = estimate_row(
        &s.camera,
        &s.object,
        Some(LensKind::Convex),
        &s.rows[0],
        RoundingMode::FullPrecision,
    );
    assert!(matches!(
        r,
        Err(Error::InconsistentKind {
            declared: LensKind::Convex,
            ..
        })
    ));
}

#[test]
fn full_precision_equals_closed_form() {
    for table in [BundledTable::Concave, BundledTable::Convex] {
        let s = table.session();
        let (fc, pitch) = (s.camera.focal_length_cm(), s.camera.pixel_pitch_um());
        let (o, u) = (s.object.width().get(), s.object.distance().get());
        for obs in &s.rows {
            let i1 = f64::from(obs.pixel1.get()) * pitch * 1e-4;
            let i2 = f64::from(obs.pixel2.get()) * pitch * 1e-4;
            let width = obs.d_cm.abs() / (fc * (1.0 / i2 - 1.0 / i1).abs());
            let m = width / o;
            let f = u / (1.0 / m - 1.0);
            let r =
                estimate_row(&s.camera, &s.object, None, obs, RoundingMode::FullPrecision).unwrap();
            assert!(((r.focal_length_cm - f) / f).abs() < 1e-12, "{obs:?}");
        }
    }
}

#[test]
fn aggregate_examples() {
    let agg = BundledTable::Concave
        .session()
        .aggregate(RoundingMode::TableReproduction)
        .unwrap();
    assert!((agg.mean_f + 26.94).abs() < 1e-12);
    assert!((agg.sem_f - 0.06).abs() < 1e-12);

    // sample SEM of the printed column 17.3, 17.1, ..., 17.5, by hand: sqrt(0.181 / 9 / 10)
    let agg = BundledTable::Convex
        .session()
        .aggregate(RoundingMode::TableReproduction)
        .unwrap();
    assert!((agg.mean_f - 17.17).abs() < 1e-12);
    assert!((agg.sem_f - (0.181f64 / 90.0).sqrt()).abs() < 1e-12);

    let template = BundledTable::Concave
        .session()
        .estimate(RoundingMode::FullPrecision)
        .unwrap()[0];
    let same: Vec<EstimateRow> = (0..10)
        .map(|_| EstimateRow {
            focal_length_cm: -12.5,
            ..template
        })
        .collect();
    let agg = aggregate(&same).unwrap();
    assert_eq!((agg.mean_f, agg.sem_f), (-12.5, 0.0));

    assert!(matches!(
        aggregate(&same[..1]),
        Err(Error::InsufficientData { needed: 2, got: 1 })
    ));
}

#[test]
fn inverse_degenerate_magnification() {
    let u = lensfocus::SignedDistance::new(-8.8).unwrap();
    let r = focal_from_magnification(u, Magnification::new(1.0).unwrap());
    assert!(matches!(r, Err(Error::DegenerateMagnification(_))));
}

#[test]
fn zero_noise_collapses_distribution() {
    let s = BundledTable::Concave.session();
    let mc =
        propagate_uncertainty(&s.camera, &s.object, &s.rows[0], &NoiseSpec::zero(9), 500).unwrap();
    let nominal = estimate_row(
        &s.camera,
        &s.object,
        None,
        &s.rows[0],
        RoundingMode::FullPrecision,
    )
    .unwrap();
    assert!(mc.summary.sd_f < 1e-9);
    assert!(mc.samples.iter().all(|&f| f == nominal.focal_length_cm));
    assert_eq!(mc.failed, 0);
}

#[test]
fn seeded_monte_carlo_reproduces() {
    let s = BundledTable::Concave.session();
    let noise = NoiseSpec::with_seed(2024);
    let a = propagate_uncertainty(&s.camera, &s.object, &s.rows[0], &noise, 100_000).unwrap();
    let b = propagate_uncertainty(&s.camera, &s.object, &s.rows[0], &noise, 100_000).unwrap();
    assert!(a.summary.sd_f > 0.0);
    assert_eq!(a.summary, b.summary);
}

#[test]
fn short_baseline_widens_spread() {
    let s = BundledTable::Concave.session();
    let noise = NoiseSpec::with_seed(11);
    let sd = |i: usize| {
        propagate_uncertainty(&s.camera, &s.object, &s.rows[i], &noise, 20_000)
            .unwrap()
            .summary
            .sd_f
    };
    // row 3 has D = 8.7 cm, row 2 has D = 22.4 cm
    assert!(sd(2) > sd(1));
}

#[test]
fn monte_carlo_rejects_few_trials() {
    let s = BundledTable::Concave.session();
    let r = propagate_uncertainty(
        &s.camera,
        &s.object,
        &s.rows[0],
        &NoiseSpec::with_seed(1),
        99,
    );
    assert!(matches!(r, Err(Error::InvalidInput(_))));
}

#[test]
fn monte_carlo_aborts_on_frequent_failures() {
    let s = BundledTable::Concave.session();
    // a one-pixel image with ±2 px jitter often has non-positive width
    let obs = row(1, 5.0, 1, 10.0, 3);
    let noise = NoiseSpec {
        pixel_halfwidth: 2.0,
        ..NoiseSpec::with_seed(3)
    };
    let r = propagate_uncertainty(&s.camera, &s.object, &obs, &noise, 1000);
    assert!(matches!(r, Err(Error::TooManyFailures { .. })));
}

proptest! {
    #[test]
    fn aggregate_translation(values in prop::collection::vec(-50.0..50.0f64, 2..20), shift in -20.0..20.0f64) {
        let template = BundledTable::Concave.session().estimate(RoundingMode::FullPrecision).unwrap()[0];
        let rows = |c: f64| -> Vec<EstimateRow> {
            values.iter().map(|v| EstimateRow { focal_length_cm: v + c, ..template }).collect()
        };
        let a = aggregate(&rows(0.0)).unwrap();
        let b = aggregate(&rows(shift)).unwrap();
        prop_assert!((b.mean_f - a.mean_f - shift).abs() < 1e-9);
        prop_assert!((b.sem_f - a.sem_f).abs() < 1e-9);
    }

    #[test]
    fn width_never_nan(d in -200.0..200.0f64, fc in 0.05..3.0f64, i1 in 1e-4..2.0f64, i2 in 1e-4..2.0f64) {
        let r = width_two_position(d, fc, TransverseWidth::new(i1).unwrap(), TransverseWidth::new(i2).unwrap());
        match r {
            Ok(w) => prop_assert!(w.get().is_finite() && w.get() > 0.0),
            Err(e) => prop_assert!(matches!(e, Error::DegenerateObservation(_))),
        }
    }
}
