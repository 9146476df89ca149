//! Text, JSON and CSV renderings of estimates and simulation results.
//!
//! CSV numbers carry 10 significant digits and text tables 7 decimals. Both
//! are produced by Rust's own float formatting, so output does not depend on
//! the locale.

use std::io::Write;

use serde::Serialize;

use crate::censoring::{CensoringScheme, SampleSummary};
use crate::error::{Result, WgedError};
use crate::estimators::{EstimateGrid, EstimationSetup, Estimator, GammaPrior, HyperPrior, Target};
use crate::montecarlo::{MseTable, OrderingReport};

/// Formats `x` with `digits` significant digits in positional notation,
/// falling back to scientific notation outside `1e-6 ..= 1e15`.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    let digits = digits.max(1);
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let exp: i32 = sci[sci.find('e').expect("exponent") + 1..].parse().expect("integer exponent");
    if !(-6..=15).contains(&exp) {
        return sci;
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    let rounded: f64 = sci.parse().expect("round-trips");
    format!("{:.*}", decimals, rounded)
}

fn csv_writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out)
}

fn csv_err(e: csv::Error) -> WgedError {
    WgedError::domain(format!("cannot write CSV: {}", e))
}

/// One estimate in an [`EstimateReport`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateEntry {
    pub target: Target,
    pub estimator: Estimator,
    /// `self`, `linex:q`, or `-` for the MLE.
    pub loss: String,
    pub value: f64,
}

/// Settings that determine an [`EstimateReport`] besides the data.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateSettings {
    pub lambda: f64,
    pub theta: f64,
    pub prior: GammaPrior<f64>,
    pub hyper: HyperPrior<f64>,
    /// LINEX shape per target in `Target::ALL` order.
    pub linex_q: [f64; 4],
    pub series_t: f64,
    pub series_k: usize,
    pub parallel_t: f64,
    pub parallel_k: usize,
    pub hazard_t: f64,
}

impl EstimateSettings {
    pub fn from_setup(setup: &EstimationSetup<f64>) -> Self {
        Self {
            lambda: setup.known.lambda,
            theta: setup.known.theta,
            prior: setup.prior,
            hyper: setup.hyper,
            linex_q: setup.linex_q,
            series_t: setup.series.t,
            series_k: setup.series.k,
            parallel_t: setup.parallel.t,
            parallel_k: setup.parallel.k,
            hazard_t: setup.t_hazard,
        }
    }
}

/// Estimates computed from one censored sample.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateReport {
    pub scheme: CensoringScheme,
    pub m: usize,
    pub s_m: f64,
    pub settings: EstimateSettings,
    /// Entries ordered by target, then estimator column.
    pub estimates: Vec<EstimateEntry>,
}

impl EstimateReport {
    pub fn new(
        scheme: &CensoringScheme,
        summary: &SampleSummary<f64>,
        setup: &EstimationSetup<f64>,
        grid: &EstimateGrid<f64>,
    ) -> Self {
        let mut estimates = Vec::new();
        for target in Target::ALL {
            for est in Estimator::ALL {
                if let Some(value) = grid.get(target, est) {
                    let loss = match est {
                        Estimator::Mle => "-".to_string(),
                        e if e.is_linex() => format!("linex:{}", setup.linex_q[target.index()]),
                        _ => "self".to_string(),
                    };
                    estimates.push(EstimateEntry {
                        target,
                        estimator: est,
                        loss,
                        value,
                    });
                }
            }
        }
        Self {
            scheme: scheme.clone(),
            m: summary.m,
            s_m: summary.s_m,
            settings: EstimateSettings::from_setup(setup),
            estimates,
        }
    }

    pub fn get(&self, target: Target, estimator: Estimator) -> Option<f64> {
        self.estimates
            .iter()
            .find(|e| e.target == target && e.estimator == estimator)
            .map(|e| e.value)
    }

    pub fn to_text(&self) -> String {
        render_estimate_table(std::slice::from_ref(self))
    }
}

/// Aligned text table with one block per target and one row per report,
/// estimator columns in the order MLE, BS, BL, EBS1, EBL1, ..., EBL3.
pub fn render_estimate_table(reports: &[EstimateReport]) -> String {
    const W: usize = 11;
    let scheme_w = reports
        .iter()
        .map(|r| r.scheme.to_string().len())
        .max()
        .unwrap_or(0)
        .max(10);
    let mut out = String::new();
    for target in Target::ALL {
        if !reports
            .iter()
            .any(|r| r.estimates.iter().any(|e| e.target == target))
        {
            continue;
        }
        out.push_str(target.label());
        out.push('\n');
        out.push_str(&format!("{:<scheme_w$}", "scheme"));
        for est in Estimator::ALL {
            out.push_str(&format!(" {:>W$}", est.label()));
        }
        out.push('\n');
        for r in reports {
            out.push_str(&format!("{:<scheme_w$}", r.scheme.to_string()));
            for est in Estimator::ALL {
                let cell = r.get(target, est).map_or("-".to_string(), |v| format!("{:.7}", v));
                out.push_str(&format!(" {:>W$}", cell));
            }
            out.push('\n');
        }
        out.push('\n');
    }
    out
}

/// Writes `scheme, estimator, target, loss, mean, mse` rows in table order.
pub fn write_mse_csv<W: Write>(table: &MseTable, out: W) -> Result<()> {
    let mut w = csv_writer(out);
    w.write_record(["scheme", "estimator", "target", "loss", "mean", "mse"])
        .map_err(csv_err)?;
    for r in &table.rows {
        w.write_record([
            r.scheme.to_string(),
            r.estimator.label().to_string(),
            r.target.label().to_string(),
            r.loss.clone(),
            fmt_sig(r.mean, 10),
            fmt_sig(r.mse, 10),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| WgedError::domain(format!("cannot write CSV: {}", e)))
}

/// Writes one row per ordering check: chain links first, then the
/// within-family decreases in sample size.
pub fn write_orderings_csv<W: Write>(report: &OrderingReport, out: W) -> Result<()> {
    let mut w = csv_writer(out);
    w.write_record(["check", "target", "scheme", "lhs", "rhs", "lhs_mse", "rhs_mse", "verdict"])
        .map_err(csv_err)?;
    let verdict = |ok: bool| if ok { "pass" } else { "fail" };
    for l in &report.links {
        w.write_record([
            format!("{}_chain", l.chain),
            l.target.label().to_string(),
            l.scheme.to_string(),
            l.lhs.label().to_string(),
            l.rhs.label().to_string(),
            fmt_sig(l.lhs_mse, 10),
            fmt_sig(l.rhs_mse, 10),
            verdict(l.holds).to_string(),
        ])
        .map_err(csv_err)?;
    }
    for m in &report.monotone {
        w.write_record([
            "n_decrease".to_string(),
            m.target.label().to_string(),
            format!("{} -> {}", m.smaller, m.larger),
            m.estimator.label().to_string(),
            m.estimator.label().to_string(),
            fmt_sig(m.larger_mse, 10),
            fmt_sig(m.smaller_mse, 10),
            verdict(m.holds).to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| WgedError::domain(format!("cannot write CSV: {}", e)))
}

/// Nearest of the 50%, 70% and 100% observed-fraction series shown in the figures.
pub fn fraction_series(scheme: &CensoringScheme) -> &'static str {
    let f = scheme.observed_fraction();
    [(0.5, "50%"), (0.7, "70%"), (1.0, "100%")]
        .iter()
        .min_by(|a, b| (a.0 - f).abs().total_cmp(&(b.0 - f).abs()))
        .expect("non-empty")
        .1
}

/// Plot-ready MSE series for one target: one row per scheme, ordered by
/// fraction series and then `n`, with one MSE column per estimator.
pub fn write_figure_csv<W: Write>(table: &MseTable, target: Target, out: W) -> Result<()> {
    let mut w = csv_writer(out);
    let mut header = vec!["series".to_string(), "n".into(), "m".into(), "fraction".into()];
    header.extend(Estimator::ALL.iter().map(|e| e.label().to_string()));
    w.write_record(&header).map_err(csv_err)?;

    let order = |s: &CensoringScheme| {
        let rank = ["50%", "70%", "100%"]
            .iter()
            .position(|l| *l == fraction_series(s))
            .expect("known series");
        (rank, s.n(), s.m())
    };
    let mut schemes = table.schemes();
    schemes.sort_by_key(|s| order(s));
    for s in &schemes {
        let mut rec = vec![
            fraction_series(s).to_string(),
            s.n().to_string(),
            s.m().to_string(),
            fmt_sig(s.observed_fraction(), 10),
        ];
        for est in Estimator::ALL {
            rec.push(table.get(s, target, est).map_or(String::new(), |r| fmt_sig(r.mse, 10)));
        }
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush().map_err(|e| WgedError::domain(format!("cannot write CSV: {}", e)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::montecarlo::MseRow;

    #[test]
    fn significant_digits() {
        assert_eq!(fmt_sig(0.020612, 10), "0.02061200000");
        assert_eq!(fmt_sig(2.005066, 10), "2.005066000");
        assert_eq!(fmt_sig(-1234.5, 3), "-1230");
        assert_eq!(fmt_sig(9.99999999999, 10), "10.00000000");
        assert_eq!(fmt_sig(1.5e-9, 4), "1.500e-9");
        assert_eq!(fmt_sig(0.0, 10), "0");
    }

    fn table() -> MseTable {
        let mut rows = Vec::new();
        for (s, n) in [("0*20", 20), ("4,4,2,0*7", 20), ("0*50", 50)] {
            let scheme = CensoringScheme::parse(s, n).unwrap();
            for target in Target::ALL {
                for est in Estimator::ALL {
                    rows.push(MseRow {
                        scheme: scheme.clone(),
                        estimator: est,
                        target,
                        loss: "self".into(),
                        mean: 1.0,
                        mse: 1.0 / n as f64 + est.index() as f64 * 1e-3,
                    });
                }
            }
        }
        MseTable { replications: 1, rows }
    }

    #[test]
    fn mse_csv_quotes_scheme_and_uses_lf() {
        let mut buf = Vec::new();
        write_mse_csv(&table(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(!text.contains('\r'));
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("scheme,estimator,target,loss,mean,mse"));
        assert_eq!(
            lines.next(),
            Some("\"n=20, m=20; R=(0*20)\",MLE,alpha,self,1.000000000,0.05000000000")
        );
        assert_eq!(text.lines().count(), 1 + 3 * 36);
    }

    #[test]
    fn figure_rows_follow_series_then_n() {
        let mut buf = Vec::new();
        write_figure_csv(&table(), Target::Alpha, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let first_cols: Vec<_> = text.lines().skip(1).map(|l| l.split(',').take(3).collect::<Vec<_>>().join(",")).collect();
        assert_eq!(first_cols, ["50%,20,10", "100%,20,20", "100%,50,50"]);
    }

    #[test]
    fn fraction_series_buckets() {
        let s = |t: &str, n| fraction_series(&CensoringScheme::parse(t, n).unwrap());
        assert_eq!(s("2,2,1,0*12", 20), "70%");
        assert_eq!(s("4,4,2,0*17", 30), "70%");
        assert_eq!(s("4,4,2,0*37", 50), "70%");
        assert_eq!(s("5*5,0*20", 50), "50%");
    }
}
