use clap::ValueEnum;
use serde_json::Value;

use sperner_eq::json_numbers::rationalize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// numbers as exact "a/b" strings
    Rational,
    /// numbers as shortest round-trip decimals
    Float,
}

pub fn render(report: Value, mode: Mode) -> String {
    let report = match mode {
        Mode::Rational => rationalize(report),
        Mode::Float => report,
    };
    serde_json::to_string_pretty(&report).expect("JSON value serializes")
}
