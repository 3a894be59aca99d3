//! The quote file format: a small hand-editable CSV with a metadata header.
//!
//! ```text
//! # forward=1178
//! # discount_factor=0.99712
//! # maturity=0.356
//! strike,call,digital
//! 1000,207.919,0.841
//! 1200,64.473,0.423
//! ```
//!
//! `forward`, `discount_factor` and the column header are required; the
//! `maturity` label and the digital column are optional. Prices in the file
//! are discounted (present-value); [`QuoteFile::to_market`] divides them by
//! the discount factor, since calibration works on undiscounted quotes.

use maxent_core::{DigitalVector, MarketSlice};

#[derive(Debug, Clone, PartialEq)]
pub struct QuoteFile {
    pub forward: f64,
    pub discount_factor: f64,
    /// Free-form label; must parse as a year fraction only when a method
    /// that needs a maturity (Black-Scholes) is requested.
    pub maturity: Option<String>,
    pub strikes: Vec<f64>,
    /// Discounted call prices, exactly as stored in the file.
    pub calls: Vec<f64>,
    /// Discounted digital prices, if the file carries the third column.
    pub digitals: Option<Vec<f64>>,
}

impl QuoteFile {
    pub fn parse(text: &str) -> Result<QuoteFile, String> {
        let mut forward = None;
        let mut discount_factor = None;
        let mut maturity = None;
        let mut strikes = Vec::new();
        let mut calls = Vec::new();
        let mut digitals = Vec::new();
        let mut saw_header_row = false;

        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(meta) = line.strip_prefix('#') {
                let Some((key, value)) = meta.split_once('=') else {
                    continue; // plain comment
                };
                let value = value.trim();
                match key.trim() {
                    "forward" => forward = Some(parse_num(lineno, value)?),
                    "discount_factor" => discount_factor = Some(parse_num(lineno, value)?),
                    "maturity" => maturity = Some(value.to_string()),
                    _ => {} // unknown metadata is allowed
                }
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if !saw_header_row && fields[0].eq_ignore_ascii_case("strike") {
                saw_header_row = true;
                continue;
            }
            match fields.len() {
                2 | 3 => {}
                k => {
                    return Err(format!(
                        "line {}: expected 'strike,call[,digital]', found {k} fields",
                        lineno + 1
                    ))
                }
            }
            if fields.len() == 3 && digitals.len() != strikes.len() {
                return Err(format!(
                    "line {}: digital column must be filled on every row or on none",
                    lineno + 1
                ));
            }
            strikes.push(parse_num(lineno, fields[0])?);
            calls.push(parse_num(lineno, fields[1])?);
            if fields.len() == 3 {
                digitals.push(parse_num(lineno, fields[2])?);
            } else if !digitals.is_empty() {
                return Err(format!(
                    "line {}: digital column must be filled on every row or on none",
                    lineno + 1
                ));
            }
        }

        let forward = forward.ok_or("quote file is missing a '# forward=' header line")?;
        let discount_factor =
            discount_factor.ok_or("quote file is missing a '# discount_factor=' header line")?;
        if !(forward.is_finite() && forward > 0.0) {
            return Err(format!(
                "forward must be positive and finite, got {forward}"
            ));
        }
        if !(discount_factor.is_finite() && discount_factor > 0.0) {
            return Err(format!(
                "discount_factor must be positive and finite, got {discount_factor}"
            ));
        }
        Ok(QuoteFile {
            forward,
            discount_factor,
            maturity,
            strikes,
            calls,
            digitals: if digitals.is_empty() {
                None
            } else {
                Some(digitals)
            },
        })
    }

    /// Undiscount the quotes and pair them with the forward. Value-level
    /// validation (monotonicity, convexity, rectangle membership) is left to
    /// the calibration layer, which reports the offending strike.
    pub fn to_market(&self) -> (MarketSlice, Option<DigitalVector>) {
        let df = self.discount_factor;
        let calls = self.calls.iter().map(|c| c / df).collect();
        let digitals = self
            .digitals
            .as_ref()
            .map(|d| DigitalVector::new(d.iter().map(|v| v / df).collect()));
        let slice = MarketSlice::new(self.forward, df, self.strikes.clone(), calls);
        (slice, digitals)
    }

    /// Serialize back to the file format. All numbers use the shortest
    /// representation that round-trips, so parse → render → parse is exact.
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# forward={}\n", self.forward));
        out.push_str(&format!("# discount_factor={}\n", self.discount_factor));
        if let Some(m) = &self.maturity {
            out.push_str(&format!("# maturity={m}\n"));
        }
        match &self.digitals {
            Some(digitals) => {
                out.push_str("strike,call,digital\n");
                for i in 0..self.strikes.len() {
                    out.push_str(&format!(
                        "{},{},{}\n",
                        self.strikes[i], self.calls[i], digitals[i]
                    ));
                }
            }
            None => {
                out.push_str("strike,call\n");
                for i in 0..self.strikes.len() {
                    out.push_str(&format!("{},{}\n", self.strikes[i], self.calls[i]));
                }
            }
        }
        out
    }
}

fn parse_num(lineno: usize, s: &str) -> Result<f64, String> {
    s.parse::<f64>()
        .map_err(|_| format!("line {}: cannot parse '{s}' as a number", lineno + 1))
}
