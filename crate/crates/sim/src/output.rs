//! CSV result tables.
//!
//! Numbers use Rust's shortest round-trip scientific notation. Rows that
//! carry no numbers hold `infeasible` or `unsupported` in every value column.

use std::io::Write;

use crate::error::Result;
use crate::experiments::{Outcome, Row};

pub const HEADER: [&str; 8] = [
    "variable",
    "scheme",
    "method",
    "c_ccu",
    "c_ceu",
    "c_sum",
    "std_err",
    "effective_order",
];

fn num(x: f64) -> String {
    format!("{x:e}")
}

fn record(row: &Row) -> [String; 8] {
    let head = [
        num(row.value),
        row.scheme.name().into(),
        row.method.name().into(),
    ];
    let tail: [String; 5] = match &row.outcome {
        Outcome::Capacities {
            value,
            effective_order,
        } => [
            num(value.c_ccu),
            num(value.c_ceu),
            num(value.c_sum),
            num(value.std_error.sum),
            effective_order.map(|o| o.to_string()).unwrap_or_default(),
        ],
        Outcome::Infeasible(_) => core::array::from_fn(|_| "infeasible".into()),
        Outcome::Unsupported => core::array::from_fn(|_| "unsupported".into()),
    };
    let [a, b, c] = head;
    let [d, e, f, g, h] = tail;
    [a, b, c, d, e, f, g, h]
}

pub fn write_rows<W: Write>(out: W, rows: &[Row]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for row in rows {
        w.write_record(record(row))?;
    }
    w.flush()?;
    Ok(())
}
