mod common;

use rayon::prelude::*;

use zetapack::io::{read_log, write_log};
use zetapack::numerics::power_neg;
use zetapack::packer::{pack, Branch, PackOptions, FIRST_UNSEEDED};
use zetapack::verifier::{verify_sweepline, Tolerances};
use zetapack::Exponent;

#[test]
fn squares_are_placed_in_order_with_exact_sides() {
    for tv in [0.55, Exponent::LOG3_2.get(), 0.65, 2.0 / 3.0, 0.75, 0.85] {
        let t = Exponent::new(tv).unwrap();
        let rep = pack(t, &PackOptions::new(3000)).unwrap();
        assert!(rep.succeeded(), "t = {tv}");
        for (p, n) in rep.placements.iter().zip(1u64..) {
            assert_eq!(p.n, n);
            assert_eq!(p.side, power_neg(n, t));
            assert_eq!((p.rect.dx, p.rect.dy), (p.side, p.side));
        }
        assert!(
            rep.conservation_defect < 1e-12,
            "t = {tv}: {}",
            rep.conservation_defect
        );
        assert_eq!(rep.trace.first().map(|r| r.n), Some(FIRST_UNSEEDED));
        assert!(rep.trace.iter().all(|r| r.branch != Branch::Fail));
    }
}

#[test]
fn packing_tiles_the_container_exactly() {
    // shared edges coincide bit for bit, so even zero tolerance passes
    let exact = Tolerances {
        overlap: 0.0,
        area: 1e-12,
    };
    for tv in [Exponent::LOG3_2.get(), 2.0 / 3.0, 0.8] {
        let rep = pack(Exponent::new(tv).unwrap(), &PackOptions::new(20_000)).unwrap();
        let check = verify_sweepline(&rep.placements, &rep.residuals, &rep.container, exact);
        assert!(check.passed, "t = {tv}: {check:?}");
    }
}

#[test]
fn residual_boxes_are_well_formed() {
    let rep = pack(Exponent::TWO_THIRDS, &PackOptions::new(5000)).unwrap();
    let mut ids: Vec<u64> = rep.residuals.iter().map(|b| b.id).collect();
    let len = ids.len();
    ids.dedup();
    assert_eq!(ids.len(), len);
    assert!(ids.windows(2).all(|w| w[0] < w[1]));
    assert!(rep
        .residuals
        .iter()
        .all(|b| b.rect.is_valid() && b.width() <= b.height()));
    let widest = rep.residuals.iter().map(|b| b.width()).fold(0.0, f64::max);
    assert!(widest >= power_neg(5001, Exponent::TWO_THIRDS));
}

#[test]
fn runs_are_independent_of_thread_count() {
    let ts = [0.62, 0.64, 0.66, 0.7];
    let serial: Vec<_> = ts
        .iter()
        .map(|&t| pack(Exponent::new(t).unwrap(), &PackOptions::new(4000)).unwrap())
        .collect();
    let parallel: Vec<_> = ts
        .par_iter()
        .map(|&t| pack(Exponent::new(t).unwrap(), &PackOptions::new(4000)).unwrap())
        .collect();
    for (a, b) in serial.iter().zip(&parallel) {
        assert_eq!(a.placements, b.placements);
        assert_eq!(a.residuals, b.residuals);
        assert_eq!(a.summary, b.summary);
    }
}

#[test]
fn log_round_trip_preserves_geometry() {
    let rep = pack(Exponent::LOG3_2, &PackOptions::new(2000)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.log");
    write_log(&rep, &path).unwrap();
    let back = read_log(&path).unwrap();
    assert_eq!(back.t, rep.t);
    assert_eq!(back.container, rep.container);
    assert_eq!(back.placements, rep.placements);
    let rects =
        |r: &zetapack::PackingReport| r.residuals.iter().map(|b| b.rect).collect::<Vec<_>>();
    assert_eq!(rects(&back), rects(&rep));
    assert_eq!(back.summary, rep.summary);
    let (brute, sweep) = common::both(&back, Tolerances::default());
    assert!(sweep.passed && brute == sweep);
}

#[test]
fn interim_verification_stays_clean() {
    let mut opts = PackOptions::new(5000);
    opts.verify_interval = 20;
    let rep = pack(Exponent::TWO_THIRDS, &opts).unwrap();
    assert!(rep.summary.interim_checks >= 10, "{:?}", rep.summary);
    assert_eq!(rep.summary.interim_failures, 0);
}
