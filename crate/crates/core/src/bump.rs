//! Tensor-product bump test functions `Π (1 - s_i²)³`.

use serde::{Deserialize, Serialize};

use crate::geometry::{Point2, Rect2, P2};

/// `∫_{-1}^{1} (1 - s²)³ ds`.
pub const BUMP_1D_INTEGRAL: f64 = 32.0 / 35.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub center: P2,
    pub r1: f64,
    pub r2: f64,
}

fn profile(s: f64) -> (f64, f64) {
    if s.abs() >= 1.0 {
        return (0.0, 0.0);
    }
    let u = 1.0 - s * s;
    (u * u * u, -6.0 * s * u * u)
}

impl Bump {
    pub fn new(center: P2, r1: f64, r2: f64) -> Self {
        Bump { center, r1, r2 }
    }

    pub fn square(center: P2, r: f64) -> Self {
        Bump::new(center, r, r)
    }

    /// The closed support `center ± (r1, r2)`.
    pub fn support(&self) -> Rect2<f64> {
        Rect2::centered(&self.center, &self.r1, &self.r2)
    }

    pub fn eval(&self, x: P2) -> f64 {
        let (p, _) = profile((x.x1 - self.center.x1) / self.r1);
        let (q, _) = profile((x.x2 - self.center.x2) / self.r2);
        p * q
    }

    pub fn grad(&self, x: P2) -> P2 {
        let (p, dp) = profile((x.x1 - self.center.x1) / self.r1);
        let (q, dq) = profile((x.x2 - self.center.x2) / self.r2);
        Point2::new(dp * q / self.r1, p * dq / self.r2)
    }

    pub fn integral(&self) -> f64 {
        self.r1 * self.r2 * BUMP_1D_INTEGRAL * BUMP_1D_INTEGRAL
    }
}
