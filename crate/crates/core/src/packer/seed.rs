use crate::boxset::BoxSet;
use crate::error::{Error, Result};
use crate::geometry::{BoxIds, PlacedSquare, Rect};
use crate::numerics::{power_neg, zeta_2t, Exponent};

/// Container `[0, zeta(2t)] x [0, 1]` with `S_1, S_2, S_3` standing in a row
/// on the bottom edge, and the three boxes of empty space around them.
#[derive(Debug, Clone)]
pub struct Seed {
    pub container: Rect,
    pub zeta: f64,
    pub placements: Vec<PlacedSquare>,
    pub set: BoxSet,
    /// First id not used by the seed boxes.
    pub next_id: u64,
}

/// Seeds the container. The residual boxes, in id order, are the strip to
/// the right of `S_3`, the gap above `S_2` and the gap above `S_3`.
pub fn seed_container(t: Exponent, zeta_tol: f64) -> Result<Seed> {
    let zeta = zeta_2t(t, zeta_tol)?;
    let s2 = power_neg(2, t);
    let s3 = power_neg(3, t);

    let x2 = 1.0;
    let x3 = x2 + s2;
    let x4 = x3 + s3;
    let strip_width = zeta - x4;
    if strip_width.is_nan() || strip_width <= 0.0 {
        return Err(Error::SeedInfeasible {
            t: t.get(),
            strip_width,
        });
    }

    let placements = vec![
        PlacedSquare::at(1, power_neg(1, t), 0.0, 0.0),
        PlacedSquare::at(2, s2, x2, 0.0),
        PlacedSquare::at(3, s3, x3, 0.0),
    ];
    let mut ids = BoxIds::default();
    let set: BoxSet = [
        Rect::new(x4, 0.0, strip_width, 1.0),
        Rect::new(x2, s2, s2, 1.0 - s2),
        Rect::new(x3, s3, s3, 1.0 - s3),
    ]
    .into_iter()
    .map(|r| ids.make(r))
    .collect();

    Ok(Seed {
        container: Rect::new(0.0, 0.0, zeta, 1.0),
        zeta,
        placements,
        set,
        next_id: ids.fresh(),
    })
}
