/// Closed interval of the extended real line. Empty when `lo > hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const EMPTY: Interval = Interval {
        lo: f64::INFINITY,
        hi: f64::NEG_INFINITY,
    };

    pub const fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub const fn point(x: f64) -> Self {
        Self { lo: x, hi: x }
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    /// Smallest interval containing both.
    pub fn hull(self, other: Interval) -> Interval {
        Interval::new(self.lo.min(other.lo), self.hi.max(other.hi))
    }

    /// Distance from `x`; infinite for the empty interval.
    pub fn distance(&self, x: f64) -> f64 {
        if self.is_empty() {
            f64::INFINITY
        } else if x < self.lo {
            self.lo - x
        } else if x > self.hi {
            x - self.hi
        } else {
            0.0
        }
    }

    /// Nearest point of a nonempty interval.
    pub fn clamp(&self, x: f64) -> f64 {
        x.max(self.lo).min(self.hi)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distances() {
        let i = Interval::new(-1.0, 2.0);
        assert_eq!(i.distance(0.0), 0.0);
        assert_eq!(i.distance(3.5), 1.5);
        assert_eq!(i.distance(-4.0), 3.0);
        assert_eq!(Interval::EMPTY.distance(0.0), f64::INFINITY);
        assert_eq!(Interval::new(f64::NEG_INFINITY, 0.0).distance(-1e300), 0.0);
        assert_eq!(i.clamp(9.0), 2.0);
    }
}
