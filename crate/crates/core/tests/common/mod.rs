#![allow(dead_code)]

use zetapack::geometry::Rect;
use zetapack::numerics::Exponent;
use zetapack::packer::PackingReport;
use zetapack::verifier::{verify_bruteforce, verify_sweepline, Tolerances, VerificationReport};

/// `(t, n_max)` pairs for the verifier comparison: ten exponents inside and
/// outside the proven range, n_max from 40 to 2000.
pub fn oracle_runs() -> Vec<(Exponent, u64)> {
    let ts = [
        Exponent::LOG3_2.get(),
        0.64,
        0.65,
        0.66,
        2.0 / 3.0,
        0.55,
        0.6,
        0.7,
        0.8,
        0.88,
    ];
    (1..=50u64)
        .map(|k| {
            (
                Exponent::new(ts[(k as usize * 7) % ts.len()]).unwrap(),
                40 * k,
            )
        })
        .collect()
}

/// Both verifiers over one report.
pub fn both(rep: &PackingReport, tol: Tolerances) -> (VerificationReport, VerificationReport) {
    let brute = verify_bruteforce(&rep.placements, &rep.residuals, &rep.container, tol).unwrap();
    let sweep = verify_sweepline(&rep.placements, &rep.residuals, &rep.container, tol);
    (brute, sweep)
}

/// Moves the middle square right by `dx`.
pub fn shift_one(rep: &mut PackingReport, dx: f64) -> usize {
    let i = rep.placements.len() / 2;
    let r = rep.placements[i].rect;
    rep.placements[i].rect = Rect::new(r.x0 + dx, r.y0, r.dx, r.dy);
    i
}

/// `zeta(s)` by Euler-Maclaurin: direct sum below `N = 1000`, then the
/// integral, the half term and four Bernoulli corrections. Error far below
/// 1e-15 for `s > 1`.
pub fn zeta_euler_maclaurin(s: f64) -> f64 {
    const N: u64 = 1000;
    // B_2k / (2k)!
    const B: [f64; 4] = [1.0 / 12.0, -1.0 / 720.0, 1.0 / 30240.0, -1.0 / 1209600.0];
    let nf = N as f64;
    let head: f64 = (1..N).rev().map(|j| (j as f64).powf(-s)).sum();
    let mut tail = nf.powf(1.0 - s) / (s - 1.0) + 0.5 * nf.powf(-s);
    // rising factorial s (s+1) ... (s+2k-2) times N^(-s-2k+1)
    let mut rising = s;
    for (k, b) in B.iter().enumerate() {
        let k = k as f64 + 1.0;
        tail += b * rising * nf.powf(-s - 2.0 * k + 1.0);
        rising *= (s + 2.0 * k - 1.0) * (s + 2.0 * k);
    }
    head + tail
}
