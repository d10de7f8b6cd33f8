//! Points of the hyperbolic plane in the hyperboloid model.

/// A point `(t, x, y)` on the upper sheet `t² − x² − y² = 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HypPoint {
    pub t: f64,
    pub x: f64,
    pub y: f64,
}

impl HypPoint {
    pub const ORIGIN: HypPoint = HypPoint { t: 1.0, x: 0.0, y: 0.0 };

    /// Point at hyperbolic distance `r` from the origin in direction `theta`.
    pub fn polar(r: f64, theta: f64) -> Self {
        HypPoint {
            t: r.cosh(),
            x: r.sinh() * theta.cos(),
            y: r.sinh() * theta.sin(),
        }
    }

    pub fn from_poincare(p: [f64; 2]) -> Self {
        let s = p[0] * p[0] + p[1] * p[1];
        let d = 1.0 - s;
        HypPoint {
            t: (1.0 + s) / d,
            x: 2.0 * p[0] / d,
            y: 2.0 * p[1] / d,
        }
    }

    pub fn to_poincare(self) -> [f64; 2] {
        [self.x / (1.0 + self.t), self.y / (1.0 + self.t)]
    }

    pub fn distance(self, other: HypPoint) -> f64 {
        // |p − q|² in the Minkowski form equals 4 sinh²(d/2).
        let (dt, dx, dy) = (self.t - other.t, self.x - other.x, self.y - other.y);
        let s = (dx * dx + dy * dy - dt * dt).max(0.0);
        2.0 * (0.5 * s.sqrt()).asinh()
    }

    pub fn distance_from_origin(self) -> f64 {
        self.distance(HypPoint::ORIGIN)
    }

    /// Point a fraction `s` of the way along the geodesic from `self` to `other`.
    pub fn geodesic_lerp(self, other: HypPoint, s: f64) -> HypPoint {
        let d = self.distance(other);
        if d < 1e-300 {
            return self;
        }
        let (w0, w1) = (((1.0 - s) * d).sinh() / d.sinh(), (s * d).sinh() / d.sinh());
        HypPoint {
            t: w0 * self.t + w1 * other.t,
            x: w0 * self.x + w1 * other.x,
            y: w0 * self.y + w1 * other.y,
        }
    }
}
