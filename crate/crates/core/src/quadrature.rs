//! Composite trapezoid rule on uniform outcome grids.

use num_complex::Complex64;

use crate::measurement::OutcomeGrid;

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Compensated sum for complex values.
#[derive(Debug, Clone, Copy, Default)]
pub struct ComplexSum {
    re: CompensatedSum,
    im: CompensatedSum,
}

impl ComplexSum {
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

/// Trapezoid weight of grid point `i` out of `len` points with spacing `step`.
pub fn trapezoid_weight(i: usize, len: usize, step: f64) -> f64 {
    if i == 0 || i + 1 == len {
        0.5 * step
    } else {
        step
    }
}

/// `∫ f(n_m) dn_m` over the grid.
pub fn trapezoid(grid: &OutcomeGrid, mut f: impl FnMut(f64) -> f64) -> f64 {
    let len = grid.len();
    let mut acc = CompensatedSum::default();
    for (i, x) in grid.points().enumerate() {
        acc.add(trapezoid_weight(i, len, grid.step()) * f(x));
    }
    acc.value()
}
