//! Axis-aligned rectangles and the two guillotine operations the packing
//! uses: cutting a slab off one end of a box and putting a square snugly at
//! one end.
//!
//! A box's *width* is its shorter side and its *height* the longer one,
//! independent of how it sits in the container. The near end of a box is the
//! end with the smaller coordinate along its long axis.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default interior-penetration tolerance, container units.
pub const DEFAULT_OVERLAP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
}

impl Axis {
    pub fn other(self) -> Axis {
        match self {
            Axis::X => Axis::Y,
            Axis::Y => Axis::X,
        }
    }
}

/// `[x0, x0 + dx] x [y0, y0 + dy]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x0: f64,
    pub y0: f64,
    pub dx: f64,
    pub dy: f64,
}

impl Rect {
    pub fn new(x0: f64, y0: f64, dx: f64, dy: f64) -> Self {
        Rect { x0, y0, dx, dy }
    }

    #[inline]
    pub fn x1(&self) -> f64 {
        self.x0 + self.dx
    }

    #[inline]
    pub fn y1(&self) -> f64 {
        self.y0 + self.dy
    }

    pub fn area(&self) -> f64 {
        self.dx * self.dy
    }

    pub fn is_valid(&self) -> bool {
        self.x0.is_finite()
            && self.y0.is_finite()
            && self.dx.is_finite()
            && self.dy.is_finite()
            && self.dx > 0.0
            && self.dy > 0.0
    }

    #[inline]
    pub fn start(&self, axis: Axis) -> f64 {
        match axis {
            Axis::X => self.x0,
            Axis::Y => self.y0,
        }
    }

    #[inline]
    pub fn extent(&self, axis: Axis) -> f64 {
        match axis {
            Axis::X => self.dx,
            Axis::Y => self.dy,
        }
    }

    fn with_span(mut self, axis: Axis, start: f64, extent: f64) -> Rect {
        match axis {
            Axis::X => {
                self.x0 = start;
                self.dx = extent;
            }
            Axis::Y => {
                self.y0 = start;
                self.dy = extent;
            }
        }
        self
    }

    /// `self` lies inside `outer`, allowing each edge to stick out by `tol`.
    pub fn within(&self, outer: &Rect, tol: f64) -> bool {
        self.x0 >= outer.x0 - tol
            && self.y0 >= outer.y0 - tol
            && self.x1() <= outer.x1() + tol
            && self.y1() <= outer.y1() + tol
    }
}

/// Allocates box ids in creation order.
#[derive(Debug, Clone, Default)]
pub struct BoxIds {
    next: u64,
}

impl BoxIds {
    pub fn starting_at(next: u64) -> Self {
        BoxIds { next }
    }

    pub fn fresh(&mut self) -> u64 {
        let id = self.next;
        self.next += 1;
        id
    }

    pub fn make(&mut self, rect: Rect) -> OrientedBox {
        OrientedBox {
            rect,
            id: self.fresh(),
        }
    }
}

/// A residual box: its physical rectangle plus a creation-order id.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrientedBox {
    pub rect: Rect,
    pub id: u64,
}

impl OrientedBox {
    pub fn width(&self) -> f64 {
        self.rect.dx.min(self.rect.dy)
    }

    pub fn height(&self) -> f64 {
        self.rect.dx.max(self.rect.dy)
    }

    pub fn area(&self) -> f64 {
        self.rect.area()
    }

    pub fn semiperimeter(&self) -> f64 {
        self.rect.dx + self.rect.dy
    }

    /// x for square boxes.
    pub fn long_axis(&self) -> Axis {
        if self.rect.dx >= self.rect.dy {
            Axis::X
        } else {
            Axis::Y
        }
    }

    pub fn is_square(&self) -> bool {
        self.rect.dx == self.rect.dy
    }
}

/// A packed square `S_n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlacedSquare {
    pub n: u64,
    pub side: f64,
    pub rect: Rect,
}

impl PlacedSquare {
    pub fn at(n: u64, side: f64, x0: f64, y0: f64) -> Self {
        PlacedSquare {
            n,
            side,
            rect: Rect::new(x0, y0, side, side),
        }
    }
}

/// Cuts `bx` perpendicular to `axis` at distance `len` from its near end.
/// The near piece has extent `len` along `axis`; the far piece the rest. The
/// cross extent is copied unchanged into both, and fresh ids go to near then
/// far.
pub fn split_along(
    bx: &OrientedBox,
    axis: Axis,
    len: f64,
    ids: &mut BoxIds,
) -> Result<(OrientedBox, OrientedBox)> {
    let extent = bx.rect.extent(axis);
    if !(len > 0.0 && len < extent) {
        return Err(Error::Precondition(format!(
            "cut at {len} outside (0, {extent}) of box {}",
            bx.id
        )));
    }
    let start = bx.rect.start(axis);
    let near = bx.rect.with_span(axis, start, len);
    Ok((
        ids.make(near),
        ids.make(far_piece(&bx.rect, axis, start + len)),
    ))
}

/// The part of `r` beyond `cut` along `axis`. Its extent is measured back
/// from the far edge of `r`, so that edge is inherited rather than
/// re-accumulated.
fn far_piece(r: &Rect, axis: Axis, cut: f64) -> Rect {
    let end = r.start(axis) + r.extent(axis);
    r.with_span(axis, cut, end - cut)
}

/// Cuts `bx` perpendicular to its long axis, `len` from the near end.
pub fn split_long(
    bx: &OrientedBox,
    len: f64,
    ids: &mut BoxIds,
) -> Result<(OrientedBox, OrientedBox)> {
    split_along(bx, bx.long_axis(), len, ids)
}

/// Puts a square of side `width(bx)` at the near end of `bx`. Returns the
/// square and the far remainder, which is absent when the square fills the
/// box exactly.
pub fn place_square_snug(
    bx: &OrientedBox,
    side: f64,
    ids: &mut BoxIds,
) -> Result<(Rect, Option<OrientedBox>)> {
    if side != bx.width() {
        return Err(Error::Precondition(format!(
            "square side {side} differs from width {} of box {}",
            bx.width(),
            bx.id
        )));
    }
    let axis = bx.long_axis();
    let square = Rect::new(bx.rect.x0, bx.rect.y0, side, side);
    let rest = bx.height() - side;
    if rest == 0.0 {
        return Ok((square, None));
    }
    let far = far_piece(&bx.rect, axis, bx.rect.start(axis) + side);
    Ok((square, Some(ids.make(far))))
}

/// Interiors of `a` and `b` overlap by more than `tol` along both axes.
/// Rectangles that only share an edge or corner never overlap.
pub fn rects_interior_overlap(a: &Rect, b: &Rect, tol: f64) -> bool {
    let px = a.x1().min(b.x1()) - a.x0.max(b.x0);
    let py = a.y1().min(b.y1()) - a.y0.max(b.y0);
    px > tol && py > tol
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bx(dx: f64, dy: f64) -> OrientedBox {
        OrientedBox {
            rect: Rect::new(0.0, 0.0, dx, dy),
            id: 0,
        }
    }

    #[test]
    fn width_height_convention() {
        let b = bx(2.0, 1.0);
        assert_eq!(
            (b.width(), b.height(), b.area(), b.semiperimeter()),
            (1.0, 2.0, 2.0, 3.0)
        );
        assert_eq!(b.long_axis(), Axis::X);
        assert_eq!(bx(0.5, 0.7).long_axis(), Axis::Y);
        assert_eq!(bx(0.5, 0.5).long_axis(), Axis::X);
    }

    #[test]
    fn split_long_tall_box() {
        let mut ids = BoxIds::starting_at(1);
        let (near, far) = split_long(&bx(0.63, 1.0), 0.48, &mut ids).unwrap();
        assert_eq!(near.rect, Rect::new(0.0, 0.0, 0.63, 0.48));
        assert_eq!(far.rect.y0, 0.48);
        assert!((far.rect.dy - 0.52).abs() < 1e-15);
        assert_eq!(far.rect.dx, 0.63);
        assert_eq!((near.id, far.id), (1, 2));
        let total = near.area() + far.area();
        assert!((total - 0.63).abs() <= 4.0 * f64::EPSILON);
    }

    #[test]
    fn split_long_rejects_full_length() {
        let mut ids = BoxIds::default();
        assert!(split_long(&bx(2.0, 1.0), 2.0, &mut ids).is_err());
        assert!(split_long(&bx(2.0, 1.0), 0.0, &mut ids).is_err());
        // a cut equal to the width is fine; only the long extent is exclusive
        assert!(split_long(&bx(2.0, 1.0), 1.0, &mut ids).is_ok());
    }

    #[test]
    fn snug_square_leaves_strip() {
        let mut ids = BoxIds::starting_at(7);
        let side = 0.63;
        let (sq, rest) = place_square_snug(&bx(side, 1.0), side, &mut ids).unwrap();
        assert_eq!(sq, Rect::new(0.0, 0.0, 0.63, 0.63));
        let rest = rest.unwrap();
        assert_eq!(rest.width(), 1.0 - 0.63);
        assert_eq!(rest.height(), side);
        assert_eq!(rest.id, 7);
        assert!(sq.within(&bx(side, 1.0).rect, 0.0));
    }

    #[test]
    fn snug_square_exact_fit() {
        let mut ids = BoxIds::default();
        let (sq, rest) = place_square_snug(&bx(1.0, 1.0), 1.0, &mut ids).unwrap();
        assert_eq!(sq, Rect::new(0.0, 0.0, 1.0, 1.0));
        assert!(rest.is_none());
        assert!(place_square_snug(&bx(1.0, 2.0), 0.9, &mut ids).is_err());
    }

    #[test]
    fn overlap_semantics() {
        let a = Rect::new(0.0, 0.0, 1.0, 1.0);
        assert!(!rects_interior_overlap(
            &a,
            &Rect::new(1.0, 0.0, 1.0, 1.0),
            0.0
        ));
        assert!(!rects_interior_overlap(
            &a,
            &Rect::new(1.0, 1.0, 1.0, 1.0),
            0.0
        ));
        assert!(rects_interior_overlap(
            &a,
            &Rect::new(0.5, 0.5, 1.0, 1.0),
            0.0
        ));
        let close = Rect::new(1.0 - 1e-15, 0.0, 1.0, 1.0);
        assert!(!rects_interior_overlap(&a, &close, 1e-12));
        assert!(rects_interior_overlap(&a, &close, 0.0));
    }
}
