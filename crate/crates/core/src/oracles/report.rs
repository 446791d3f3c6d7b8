//! Verification report rows, as CSV or plain text.

use std::io::Write;

use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckRow {
    pub name: String,
    /// `key=value` pairs separated by `;`.
    pub parameters: String,
    pub value: Complex64,
    pub target: Complex64,
    pub error: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Extra diagnostics printed in the text report (for example a D-ladder
    /// table).
    pub detail: Option<String>,
}

impl CheckRow {
    /// A row that passes when `error <= tolerance`.
    pub fn within(
        name: &str,
        parameters: String,
        value: Complex64,
        target: Complex64,
        error: f64,
        tolerance: f64,
    ) -> Self {
        Self {
            name: name.to_string(),
            parameters,
            value,
            target,
            error,
            tolerance,
            pass: error <= tolerance,
            detail: None,
        }
    }

    /// A row for a computation that could not be carried out.
    pub fn failed(name: &str, parameters: String, tolerance: f64, reason: String) -> Self {
        let nan = Complex64::new(f64::NAN, f64::NAN);
        Self {
            name: name.to_string(),
            parameters,
            value: nan,
            target: nan,
            error: f64::INFINITY,
            tolerance,
            pass: false,
            detail: Some(reason),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SuiteReport {
    pub rows: Vec<CheckRow>,
}

pub const CSV_HEADER: [&str; 9] = [
    "check",
    "parameters",
    "value_re",
    "value_im",
    "target_re",
    "target_im",
    "error",
    "tolerance",
    "pass",
];

/// Seventeen significant digits.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn first_failure(&self) -> Option<&CheckRow> {
        self.rows.iter().find(|r| !r.pass)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(CSV_HEADER)?;
        for r in &self.rows {
            w.write_record([
                r.name.clone(),
                r.parameters.clone(),
                fmt_float(r.value.re),
                fmt_float(r.value.im),
                fmt_float(r.target.re),
                fmt_float(r.target.im),
                fmt_float(r.error),
                fmt_float(r.tolerance),
                if r.pass { "pass" } else { "fail" }.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in &self.rows {
            out.push_str(&format!(
                "{:<4} {:<26} error {:>10.3e} (tol {:.1e})  {}\n",
                if r.pass { "ok" } else { "FAIL" },
                r.name,
                r.error,
                r.tolerance,
                r.parameters
            ));
            if let (false, Some(d)) = (r.pass, &r.detail) {
                for line in d.lines() {
                    out.push_str(&format!("       {line}\n"));
                }
            }
        }
        out
    }
}
