//! The insulating-fluid breakdown data (19 failure times in minutes at 34 kV)
//! together with the analysis settings and the published estimates for it.

use crate::estimators::{Estimator, Target};

pub const FAILURE_TIMES: [f64; 19] = [
    0.19, 0.78, 0.96, 1.31, 2.78, 3.16, 4.15, 4.67, 4.85, 6.50, 7.35, 8.01, 8.27, 12.06, 31.75, 32.52,
    33.91, 36.71, 72.89,
];

pub const LAMBDA: f64 = 0.022;
pub const THETA: f64 = 1.95;
/// Gamma prior shape.
pub const A: f64 = 0.3;
/// Gamma prior rate.
pub const B: f64 = 0.62;
pub const U: f64 = 0.13;
pub const V: f64 = 2.0;
pub const C: f64 = 1.12;

/// LINEX shape used for `α` and the hazard rate.
pub const Q_ALPHA: f64 = 1.0;
/// LINEX shape used for the system reliabilities.
pub const Q_RELIABILITY: f64 = 2.0;
/// Mission time and component count of the reliability targets.
pub const T_SYSTEM: f64 = 8.0;
pub const K_SYSTEM: usize = 5;
pub const T_HAZARD: f64 = 100.0;

/// The three censoring plans applied to the data (all with `n = 19`).
pub const SCHEMES: [&str; 3] = ["4,4,1,0*7", "1*4,0*11", "0*19"];

/// One published estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GoldenCell {
    pub scheme: &'static str,
    pub target: Target,
    pub estimator: Estimator,
    pub value: f64,
}

impl GoldenCell {
    /// Cells that are closed-form expressions of `(m, S_m)` get the tight
    /// tolerance; cells that need quadrature or series summation get the loose one.
    pub fn is_closed_form(&self) -> bool {
        match self.target {
            Target::Alpha | Target::Hazard => true,
            Target::Series | Target::Parallel => matches!(self.estimator, Estimator::Mle | Estimator::BayesSelf),
        }
    }

    pub fn tolerance(&self) -> f64 {
        if self.is_closed_form() {
            5e-5
        } else {
            5e-4
        }
    }
}

type Block = [[f64; 9]; 3];

// Rows follow SCHEMES; columns follow Estimator::ALL.
const ALPHA: Block = [
    [0.5046544, 0.5040238, 0.4920799, 0.4939043, 0.4821611, 0.4984300, 0.4864750, 0.4893785, 0.4778472],
    [0.7551532, 0.7469420, 0.7292817, 0.7376206, 0.7201228, 0.7443637, 0.7265510, 0.7308776, 0.7136946],
    [0.9562884, 0.9419926, 0.9197259, 0.9332954, 0.9111610, 0.9418252, 0.9192925, 0.9247657, 0.9030294],
];

const SERIES: Block = [
    [0.9035096, 0.9070496, 0.8748089, 0.9059035, 0.8739527, 0.9050869, 0.8733484, 0.9067198, 0.8745567],
    [0.8591299, 0.8645737, 0.8422885, 0.8627888, 0.8408187, 0.8616302, 0.8398686, 0.8639468, 0.8417681],
    [0.8250787, 0.8319167, 0.8151976, 0.8296637, 0.8132397, 0.8282548, 0.8120185, 0.8310727, 0.8144606],
];

const PARALLEL: Block = [
    [0.912545, 0.91612, 0.883557, 0.914963, 0.882692, 0.914138, 0.882082, 0.915787, 0.883302],
    [0.867721, 0.873219, 0.850711, 0.871417, 0.849227, 0.870247, 0.848267, 0.872586, 0.850186],
    [0.833329, 0.840236, 0.82335, 0.83796, 0.821372, 0.836537, 0.820139, 0.839383, 0.822605],
];

const HAZARD: Block = [
    [1.412937, 1.411171, 1.377730, 1.382838, 1.349960, 1.395509, 1.362038, 1.370167, 1.337882],
    [2.114286, 2.091296, 2.041851, 2.065198, 2.016207, 2.084077, 2.034205, 2.046319, 1.998210],
    [2.677426, 2.637401, 2.575058, 2.613050, 2.551078, 2.636932, 2.573845, 2.589169, 2.528311],
];

/// All 108 published cells, in table order.
pub fn golden_cells() -> Vec<GoldenCell> {
    let mut out = Vec::with_capacity(108);
    for (target, block) in [
        (Target::Alpha, &ALPHA),
        (Target::Series, &SERIES),
        (Target::Parallel, &PARALLEL),
        (Target::Hazard, &HAZARD),
    ] {
        for (scheme, row) in SCHEMES.iter().zip(block.iter()) {
            for (estimator, &value) in Estimator::ALL.iter().zip(row.iter()) {
                out.push(GoldenCell {
                    scheme,
                    target,
                    estimator: *estimator,
                    value,
                });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn data_is_strictly_increasing() {
        assert!(FAILURE_TIMES.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn golden_table_shape() {
        let cells = golden_cells();
        assert_eq!(cells.len(), 108);
        assert_eq!(cells.iter().filter(|c| c.is_closed_form()).count(), 27 + 27 + 12);
    }
}
