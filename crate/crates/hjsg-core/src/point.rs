//! Exact dyadic/rational abscissae with one-sided trace semantics.
//!
//! DG functions are discontinuous across cell boundaries, so a point value is
//! only well defined together with the side the limit is taken from. Cells
//! are half-open `(a, b]`: an abscissa `x > 0` canonically carries the value
//! from below (it belongs to the cell ending at `x` when `x` is a boundary),
//! and `x = 0` carries the value from above. Abscissae are kept as exact
//! rationals so that membership and piece-selection tests never depend on
//! floating-point rounding (interpolation nodes such as `1/3` are not dyadic).

/// Which one-sided limit a point value refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    /// Limit from below (`x -> a^-`).
    Below,
    /// Limit from above (`x -> a^+`).
    Above,
}

/// An abscissa `num / den` in `[0, 1]` with a trace side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactPoint {
    pub num: u64,
    pub den: u64,
    pub side: Side,
}

impl ExactPoint {
    pub fn new(num: u64, den: u64, side: Side) -> Self {
        debug_assert!(den > 0 && num <= den);
        ExactPoint { num, den, side }
    }

    /// Canonical side for an abscissa in a half-open partition.
    pub fn canonical(num: u64, den: u64) -> Self {
        let side = if num == 0 { Side::Above } else { Side::Below };
        ExactPoint::new(num, den, side)
    }

    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// Same abscissa and side after reducing the fraction (for comparisons).
    pub fn reduced(&self) -> (u64, u64, Side) {
        let g = gcd(self.num.max(1), self.den);
        (self.num / g, self.den / g, self.side)
    }

    /// Local coordinate `2^{level-1} x - j` of the abscissa inside the
    /// support of a level `>= 1` node, as an exact rational (may be outside
    /// `[0, 1]`, signalled by `None`). The side is carried over unchanged.
    pub fn support_local(&self, level: u8, translation: u32) -> Option<LocalPoint> {
        debug_assert!(level >= 1);
        let scale = 1u64 << (level - 1);
        let num = (self.num as i128) * (scale as i128) - (translation as i128) * (self.den as i128);
        let den = self.den as i128;
        // membership in the half-open support in side semantics:
        // Below needs u in (0, 1], Above needs u in [0, 1)
        let inside = match self.side {
            Side::Below => num > 0 && num <= den,
            Side::Above => num >= 0 && num < den,
        };
        if !inside {
            return None;
        }
        Some(LocalPoint {
            num: num as u64,
            den: self.den,
            side: self.side,
        })
    }
}

/// A point expressed in the local `[0, 1]` coordinate of some support.
#[derive(Debug, Clone, Copy)]
pub struct LocalPoint {
    pub num: u64,
    pub den: u64,
    pub side: Side,
}

impl LocalPoint {
    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// True when the point lies in the left half `(0, 1/2]` in side
    /// semantics (callers have already established membership in `[0, 1]`).
    pub fn in_left_half(&self) -> bool {
        match self.side {
            Side::Below => 2 * self.num <= self.den,
            Side::Above => 2 * self.num < self.den,
        }
    }

    /// Rescales to the coordinate of the chosen half, `u -> 2u` or `2u - 1`.
    pub fn half_local(&self, left: bool) -> LocalPoint {
        let num = if left {
            2 * self.num
        } else {
            2 * self.num - self.den
        };
        LocalPoint {
            num,
            den: self.den,
            side: self.side,
        }
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}
